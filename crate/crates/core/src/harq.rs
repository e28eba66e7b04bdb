//! Type-I ARQ: outage after repeated identical attempts and the delay spent
//! on them.
//!
//! Every attempt costs `n + ν` channel uses, the feedback ν included, also
//! on the attempt that finally succeeds.

use crate::error::{domain, Result};
use crate::real::Real;

/// Retransmission settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArqConfig<T> {
    m: u32,
    nu: u64,
    symbol_time: T,
}

impl<T: Real> ArqConfig<T> {
    /// `m` attempts at most, `nu` feedback channel uses per attempt,
    /// `symbol_time` seconds per channel use.
    pub fn new(m: u32, nu: u64, symbol_time: T) -> Result<Self> {
        if m == 0 {
            return Err(domain("at least one transmission attempt is required"));
        }
        if !(symbol_time.is_finite() && symbol_time > T::zero()) {
            return Err(domain(format!("symbol time must be positive, got {symbol_time}")));
        }
        Ok(Self { m, nu, symbol_time })
    }

    /// 5G NR numerology 3 symbol time, 1/120 kHz rounded to 8.3 µs.
    pub fn nr_symbol_time() -> T {
        T::lit(8.3e-6)
    }

    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn nu(&self) -> u64 {
        self.nu
    }
    pub fn symbol_time(&self) -> T {
        self.symbol_time
    }

    pub fn with_attempts(&self, m: u32) -> Result<Self> {
        Self::new(m, self.nu, self.symbol_time)
    }

    fn attempt_cost(&self, n: u64) -> u64 {
        n + self.nu
    }
}

/// Delay in channel uses and seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayReport<T> {
    /// Integral for worst-case delays; a mean for expected delays.
    pub channel_uses: T,
    /// `channel_uses · symbol_time`.
    pub seconds: T,
    /// Probability of delivery within the attempt limit, when it applies.
    pub reliability: Option<T>,
}

impl<T: Real> DelayReport<T> {
    fn new(channel_uses: T, symbol_time: T, reliability: Option<T>) -> Self {
        Self {
            channel_uses,
            seconds: channel_uses * symbol_time,
            reliability,
        }
    }

    pub fn millis(&self) -> T {
        self.seconds * T::lit(1e3)
    }
}

fn check_probability<T: Real>(eps: T) -> Result<()> {
    if eps >= T::zero() && eps <= T::one() {
        Ok(())
    } else {
        Err(domain(format!("per-attempt outage must lie in [0, 1], got {eps}")))
    }
}

/// Outage after at most `m` independent attempts, `eps^m`.
pub fn arq_outage<T: Real>(eps: T, m: u32) -> Result<T> {
    check_probability(eps)?;
    if m == 0 {
        return Err(domain("at least one transmission attempt is required"));
    }
    Ok(eps.powi(m as i32))
}

/// Delay when every one of the `m` attempts is used: `m·(n + ν)`.
pub fn worst_case_delay<T: Real>(cfg: &ArqConfig<T>, n: u64) -> DelayReport<T> {
    let uses = u64::from(cfg.m) * cfg.attempt_cost(n);
    DelayReport::new(T::from_u64(uses).unwrap(), cfg.symbol_time, None)
}

/// Mean delay when attempt `j` happens only after `j − 1` failures:
/// `(n + ν)·Σ_{j=1..m} eps^{j−1}`.
pub fn expected_delay<T: Real>(eps: T, cfg: &ArqConfig<T>, n: u64) -> Result<DelayReport<T>> {
    check_probability(eps)?;
    let mut attempts = T::zero();
    let mut reach = T::one();
    for _ in 0..cfg.m {
        attempts = attempts + reach;
        reach = reach * eps;
    }
    let cost = T::from_u64(cfg.attempt_cost(n)).unwrap();
    let reliability = T::one() - arq_outage(eps, cfg.m)?;
    Ok(DelayReport::new(cost * attempts, cfg.symbol_time, Some(reliability)))
}

/// Result of [`max_attempts_within_budget`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BudgetOutcome<T> {
    Feasible {
        m: u32,
        meets_target: bool,
        outage: T,
    },
    /// A single attempt already exceeds the budget.
    Infeasible,
}

/// Largest attempt count whose worst-case delay fits `budget_seconds`, and
/// whether the outage target is met with it. The `m` stored in `cfg` is
/// ignored.
pub fn max_attempts_within_budget<T: Real>(
    eps: T,
    cfg: &ArqConfig<T>,
    n: u64,
    budget_seconds: T,
    target_outage: T,
) -> Result<BudgetOutcome<T>> {
    check_probability(eps)?;
    if !(budget_seconds > T::zero()) {
        return Err(domain(format!("delay budget must be positive, got {budget_seconds}")));
    }
    if !(target_outage > T::zero()) {
        return Err(domain(format!("target outage must be positive, got {target_outage}")));
    }
    let cost = T::from_u64(cfg.attempt_cost(n)).unwrap();
    let fits = |m: u64| T::from_u64(m).unwrap() * cost * cfg.symbol_time <= budget_seconds;
    if !fits(1) {
        return Ok(BudgetOutcome::Infeasible);
    }
    let cap = u64::from(u32::MAX);
    let guess = (budget_seconds / (cost * cfg.symbol_time))
        .floor()
        .to_u64()
        .unwrap_or(cap)
        .clamp(1, cap);
    // the division can land one off; settle against the product used above
    let mut m = guess;
    while m > 1 && !fits(m) {
        m -= 1;
    }
    while m < cap && fits(m + 1) {
        m += 1;
    }
    let m = m as u32;
    let outage = arq_outage(eps, m)?;
    Ok(BudgetOutcome::Feasible {
        m,
        meets_target: outage <= target_outage,
        outage,
    })
}
