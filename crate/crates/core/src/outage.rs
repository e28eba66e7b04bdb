//! Finite-blocklength outage of the reference link.
//!
//! The exact outage averages the normal-approximation block error
//! `Q(√n (log₂(1+z) − R) / √V(z))` over the SINR law. The linearized outage
//! replaces the Q-curve by a ramp that falls from 1 to 0 on `[ϱ, ϑ]`,
//! centered at `θ = 2^R − 1`, after which the average reduces to CDF values
//! plus one integral over the ramp. For α = 4 and for ξ = 0 that integral
//! has a closed form.
//!
//! When `ϱ < 0` (short codes at low rate) the ramp is integrated from
//! `ϱ⁺ = max(ϱ, 0)`, because the SINR has no mass below zero. Every estimate
//! records whether that clamp was active.
//!
//! All closed forms are evaluated through the identity
//!
//! `ε = 1 − (1 − W(ϱ⁺))·S(ϱ⁺) − (β/√2π) ∫_{ϱ⁺}^{ϑ} S(z) dz`
//!
//! where `S = 1 − F` and `W` is the ramp. With `ϱ ≥ 0` the middle term is
//! zero (`W(ϱ) = 1`) and the expression is the textbook one; with the clamp
//! active it keeps the ramp mass between 0 and `ϱ⁺` that the unclamped
//! expression would drop.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::numerics::{
    erfcx_unchecked, gamma_between, integrate_with, q_unchecked, scaled_erfc_deficit, QuadratureOptions,
};
use crate::real::Real;
use crate::sinr::SinrParams;

/// Blocklength, payload and the ramp constants derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeParams<T> {
    n: u64,
    k: Option<u64>,
    rate: T,
    beta: T,
    theta: T,
    upsilon: T,
    rho: T,
}

impl<T: Real> CodeParams<T> {
    /// Code of blocklength `n` at `rate` bits per channel use.
    pub fn from_rate(n: u64, rate: T) -> Result<Self> {
        Self::build(n, None, rate)
    }

    /// Code carrying `k` information bits in `n` channel uses (R = k/n).
    pub fn from_bits(n: u64, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(domain("information bits must be at least 1"));
        }
        let rate = T::from_u64(k).unwrap() / T::from_u64(n.max(1)).unwrap();
        Self::build(n, Some(k), rate)
    }

    fn build(n: u64, k: Option<u64>, rate: T) -> Result<Self> {
        if n == 0 {
            return Err(domain("blocklength must be at least 1"));
        }
        if !(rate.is_finite() && rate > T::zero()) {
            return Err(domain(format!("rate must be positive, got {rate}")));
        }
        let two = T::lit(2.0);
        let nf = T::from_u64(n).unwrap();
        let theta = two.powf(rate) - T::one();
        let beta = (nf / T::TAU()).sqrt() / (two.powf(two * rate) - T::one()).sqrt();
        let half_width = (T::FRAC_PI_2()).sqrt() / beta;
        Ok(Self {
            n,
            k,
            rate,
            beta,
            theta,
            upsilon: theta + half_width,
            rho: theta - half_width,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }
    pub fn k(&self) -> Option<u64> {
        self.k
    }
    pub fn rate(&self) -> T {
        self.rate
    }
    pub fn beta(&self) -> T {
        self.beta
    }
    /// SINR threshold `2^R − 1`, the center of the ramp.
    pub fn theta(&self) -> T {
        self.theta
    }
    /// Upper ramp breakpoint ϑ.
    pub fn upsilon(&self) -> T {
        self.upsilon
    }
    /// Lower ramp breakpoint ϱ; negative for short low-rate codes.
    pub fn rho(&self) -> T {
        self.rho
    }
    /// `max(ϱ, 0)`.
    pub fn rho_clamped(&self) -> T {
        self.rho.max(T::zero())
    }
    pub fn rho_is_clamped(&self) -> bool {
        self.rho < T::zero()
    }
    /// Magnitude of the ramp slope, `β/√2π`.
    pub fn ramp_slope(&self) -> T {
        self.beta / T::TAU().sqrt()
    }
}

pub fn derive_code_params<T: Real>(n: u64, rate: T) -> Result<CodeParams<T>> {
    CodeParams::from_rate(n, rate)
}

/// Channel dispersion `(1 − (1+z)⁻²)(log₂ e)²` for `z ≥ 0`.
pub fn dispersion<T: Real>(z: T) -> T {
    if z <= T::zero() {
        return T::zero();
    }
    let log2e = T::LOG2_E();
    -(T::lit(-2.0) * z.ln_1p()).exp_m1() * log2e * log2e
}

/// Block error probability at a given SINR under the normal approximation.
/// Exactly 0.5 at `z = θ`; the limit 1 at `z = 0`.
pub fn conditional_error<T: Real>(z: T, c: &CodeParams<T>) -> T {
    if z <= T::zero() {
        return T::one();
    }
    if z.is_infinite() {
        return T::zero();
    }
    let nf = T::from_u64(c.n).unwrap();
    // log₂(1+z) − R, written against θ so the zero lands exactly on z = θ
    let excess = (z.ln_1p() - c.theta.ln_1p()) * T::LOG2_E();
    let arg = nf.sqrt() * excess / dispersion(z).sqrt();
    q_unchecked(arg)
}

/// Piecewise-linear stand-in for [`conditional_error`].
pub fn linearized_kernel<T: Real>(z: T, c: &CodeParams<T>) -> T {
    if z <= c.rho {
        T::one()
    } else if z >= c.upsilon {
        T::zero()
    } else {
        T::lit(0.5) - c.ramp_slope() * (z - c.theta)
    }
}

/// How an outage value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    ExactQuadrature,
    Linearized,
    /// Interference-limited closed form, any α > 2.
    ClosedFormSs,
    /// Interference-limited closed form at α = 4.
    ClosedFormSsAlpha4,
    /// Noise-plus-sparse-interference closed form at α = 4.
    ClosedFormMicroOp,
    MonteCarlo,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::ExactQuadrature,
        Method::Linearized,
        Method::ClosedFormSs,
        Method::ClosedFormSsAlpha4,
        Method::ClosedFormMicroOp,
        Method::MonteCarlo,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::ExactQuadrature => "exact",
            Method::Linearized => "linearized",
            Method::ClosedFormSs => "closed_ss",
            Method::ClosedFormSsAlpha4 => "closed_ss_a4",
            Method::ClosedFormMicroOp => "closed_uo",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.label() == key)
            .or(match key.as_str() {
                "exact_quadrature" | "quadrature" => Some(Method::ExactQuadrature),
                "linear" => Some(Method::Linearized),
                "mc" => Some(Method::MonteCarlo),
                _ => None,
            })
            .ok_or_else(|| domain(format!("unknown method '{s}'")))
    }
}

/// Method request for [`outage`]: let the dispatcher pick, or force one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    #[default]
    Auto,
    Forced(Method),
}

/// An outage probability together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate<T> {
    pub value: T,
    pub method: Method,
    /// Absolute; quadrature error for the integral methods, a rounding
    /// estimate for closed forms, two standard errors for Monte Carlo.
    pub error_bound: T,
    pub clamped_rho: bool,
}

impl<T: Real> OutageEstimate<T> {
    pub(crate) fn new(value: T, method: Method, error_bound: T, clamped_rho: bool) -> Self {
        Self {
            value: value.max(T::zero()).min(T::one()),
            method,
            error_bound: error_bound.abs(),
            clamped_rho,
        }
    }

    pub fn reliability(&self) -> T {
        T::one() - self.value
    }
}

/// Settings for [`outage_exact_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions<T> {
    /// Lower integration limit. The mass of `[0, z_floor]` is added with
    /// kernel value 1 and its possible deviation goes into the error bound.
    pub z_floor: T,
    pub quadrature: QuadratureOptions<T>,
}

impl<T: Real> Default for ExactOptions<T> {
    fn default() -> Self {
        Self {
            z_floor: T::lit(1e-12).max(T::epsilon() * T::epsilon()),
            quadrature: QuadratureOptions::default(),
        }
    }
}

/// Outage by adaptive quadrature of the block error against the SINR density.
pub fn outage_exact<T: Real>(p: &SinrParams<T>, c: &CodeParams<T>) -> Result<OutageEstimate<T>> {
    outage_exact_with(p, c, &ExactOptions::default())
}

pub fn outage_exact_with<T: Real>(
    p: &SinrParams<T>,
    c: &CodeParams<T>,
    opts: &ExactOptions<T>,
) -> Result<OutageEstimate<T>> {
    if p.is_degenerate() {
        return Ok(OutageEstimate::new(
            T::zero(),
            Method::ExactQuadrature,
            T::zero(),
            false,
        ));
    }
    let floor = opts.z_floor;
    let width = c.upsilon - c.rho;
    let mut cuts: Vec<T> = [
        c.theta * T::lit(0.5),
        c.theta,
        c.theta + width * T::lit(0.25),
        c.theta + width,
        c.theta + width * T::lit(4.0),
        c.theta + width * T::lit(16.0),
    ]
    .into_iter()
    .filter(|&z| z > floor)
    .collect();
    cuts.insert(0, floor);
    cuts.push(T::infinity());

    let pieces = T::from_usize(cuts.len() - 1).unwrap();
    let piece_opts = QuadratureOptions {
        abs_tol: opts.quadrature.abs_tol / pieces,
        ..opts.quadrature
    };
    let integrand = |z: T| conditional_error(z, c) * p.pdf_unchecked(z);
    let mut value = T::zero();
    let mut error = T::zero();
    let mut evaluations = 0;
    for w in cuts.windows(2) {
        match integrate_with(integrand, w[0], w[1], &piece_opts) {
            Ok(r) => {
                value = value + r.value;
                error = error + r.error_estimate;
                evaluations += r.evaluations;
            }
            Err(Error::Convergence {
                best,
                error_estimate,
                evaluations: used,
            }) => {
                return Err(Error::Convergence {
                    best: value.as_f64() + best,
                    error_estimate: error.as_f64() + error_estimate,
                    evaluations: evaluations + used,
                })
            }
            Err(e) => return Err(e),
        }
    }
    let floor_mass = p.cdf_unchecked(floor);
    value = value + floor_mass;
    error = error + floor_mass * (T::one() - conditional_error(floor, c));
    Ok(OutageEstimate::new(value, Method::ExactQuadrature, error, false))
}

/// Linearized outage: CDF values in closed form, the ramp's first moment
/// by quadrature.
pub fn outage_linearized<T: Real>(p: &SinrParams<T>, c: &CodeParams<T>) -> Result<OutageEstimate<T>> {
    outage_linearized_with(p, c, &QuadratureOptions::default())
}

pub fn outage_linearized_with<T: Real>(
    p: &SinrParams<T>,
    c: &CodeParams<T>,
    opts: &QuadratureOptions<T>,
) -> Result<OutageEstimate<T>> {
    let clamped = c.rho_is_clamped();
    if p.is_degenerate() {
        return Ok(OutageEstimate::new(T::zero(), Method::Linearized, T::zero(), clamped));
    }
    let lo = c.rho_clamped();
    let hi = c.upsilon;
    let slope = c.ramp_slope();
    let moment = integrate_with(|z: T| z * p.pdf_unchecked(z), lo, hi, opts)?;
    let f_lo = p.cdf_unchecked(lo);
    let f_hi = p.cdf_unchecked(hi);
    let value = f_lo + (T::lit(0.5) + slope * c.theta) * (f_hi - f_lo) - slope * moment.value;
    Ok(OutageEstimate::new(
        value,
        Method::Linearized,
        slope * moment.error_estimate,
        clamped,
    ))
}

// ε = 1 − (1 − W(ϱ⁺))·S(ϱ⁺) − slope·J, J = ∫_{ϱ⁺}^{ϑ} S.
fn assemble_closed<T: Real>(
    p: &SinrParams<T>,
    c: &CodeParams<T>,
    survival_integral: T,
    integral_scale: T,
    method: Method,
) -> OutageEstimate<T> {
    let lo = c.rho_clamped();
    let slope = c.ramp_slope();
    let head = (T::one() - linearized_kernel(lo, c)) * p.survival(lo);
    let tail = slope * survival_integral;
    let value = T::one() - head - tail;
    let bound = T::lit(16.0) * T::epsilon() * (T::one() + head + slope * integral_scale);
    OutageEstimate::new(value, method, bound, c.rho_is_clamped())
}

/// Interference-limited closed form (ξ = 0, any α > 2), in terms of the
/// unregularized incomplete gamma function.
pub fn outage_closed_ss<T: Real>(p: &SinrParams<T>, c: &CodeParams<T>) -> Result<OutageEstimate<T>> {
    if p.xi() != T::zero() {
        return Err(Error::ScenarioMismatch(format!(
            "interference-limited closed form needs xi = 0, got {}",
            p.xi()
        )));
    }
    if p.is_degenerate() {
        return Ok(OutageEstimate::new(
            T::zero(),
            Method::ClosedFormSs,
            T::zero(),
            c.rho_is_clamped(),
        ));
    }
    let scale = p.interference_scale();
    let half_alpha = p.alpha() / T::lit(2.0);
    let delta = T::lit(2.0) / p.alpha();
    let x_lo = scale * c.rho_clamped().powf(delta);
    let x_hi = scale * c.upsilon.powf(delta);
    // J = (α/2) (ζλ)^(−α/2) [Γ(α/2, x_lo) − Γ(α/2, x_hi)]
    let prefactor = half_alpha * scale.powf(-half_alpha);
    let j = prefactor * gamma_between(half_alpha, x_lo, x_hi)?;
    Ok(assemble_closed(p, c, j, j.abs() + c.upsilon, Method::ClosedFormSs))
}

// γ(2, x) = 1 − (1 + x) e^{−x}, with a series where that form cancels.
fn lower_gamma_two<T: Real>(x: T) -> T {
    if x < T::lit(0.5) {
        let eps = T::epsilon();
        let mut power = x * x;
        let mut factorial = T::one();
        let mut sum = T::zero();
        for k in 0..60 {
            let kf = T::from_usize(k).unwrap();
            if k > 0 {
                power = -power * x;
                factorial = factorial * kf;
            }
            let term = power / (factorial * (kf + T::lit(2.0)));
            sum = sum + term;
            if term.abs() < eps * sum.abs() {
                break;
            }
        }
        sum
    } else {
        T::one() - (T::one() + x) * (-x).exp()
    }
}

/// Interference-limited closed form at α = 4, where the incomplete gamma
/// reduces to `Γ(2, x) = (1 + x) e^{−x}`.
pub fn outage_closed_ss_alpha4<T: Real>(p: &SinrParams<T>, c: &CodeParams<T>) -> Result<OutageEstimate<T>> {
    if p.alpha() != T::lit(4.0) || p.xi() != T::zero() {
        return Err(Error::ScenarioMismatch(format!(
            "alpha = 4 interference-limited closed form needs alpha = 4 and xi = 0, got alpha = {}, xi = {}",
            p.alpha(),
            p.xi()
        )));
    }
    if p.is_degenerate() {
        return Ok(OutageEstimate::new(
            T::zero(),
            Method::ClosedFormSsAlpha4,
            T::zero(),
            c.rho_is_clamped(),
        ));
    }
    let scale = p.interference_scale();
    let x_lo = scale * c.rho_clamped().sqrt();
    let x_hi = scale * c.upsilon.sqrt();
    let j = T::lit(2.0) / (scale * scale) * (lower_gamma_two(x_hi) - lower_gamma_two(x_lo));
    Ok(assemble_closed(
        p,
        c,
        j,
        j.abs() + c.upsilon,
        Method::ClosedFormSsAlpha4,
    ))
}

/// Noise-plus-sparse-interference closed form at α = 4 (ξ > 0, λ ≥ 0).
///
/// With `t = √z` the survival integral becomes a Gaussian integral:
/// `∫ S dz = ∫ 2t e^{−ζλ t − ξ t²} dt`, which evaluates to error functions.
/// It is computed in the scaled form
/// `∫_{z₁}^{z₂} S dz = S(z₁)·A(√z₁) − S(z₂)·A(√z₂)`,
/// `A(t) = [1 − √π y erfcx(y) + √(πξ)·t·erfcx(y)] / ξ`,
/// `y = √ξ t + ζλ / (2√ξ)`, which stays finite when `e^{(ζλ)²/4ξ}` does not.
pub fn outage_closed_micro_op<T: Real>(p: &SinrParams<T>, c: &CodeParams<T>) -> Result<OutageEstimate<T>> {
    if p.alpha() != T::lit(4.0) || !(p.xi() > T::zero()) {
        return Err(Error::ScenarioMismatch(format!(
            "micro-operator closed form needs alpha = 4 and xi > 0, got alpha = {}, xi = {}",
            p.alpha(),
            p.xi()
        )));
    }
    let xi = p.xi();
    let scale = p.interference_scale();
    let root_xi = xi.sqrt();
    let shift = scale / (T::lit(2.0) * root_xi);
    let root_pi_xi = (T::PI() * xi).sqrt();
    let weight = |z: T| {
        let t = z.sqrt();
        let y = root_xi * t + shift;
        let scaled = erfcx_unchecked(y);
        (scaled_erfc_deficit(y) + root_pi_xi * t * scaled) / xi
    };
    let lo = c.rho_clamped();
    let hi = c.upsilon;
    let upper = p.survival(lo) * weight(lo);
    let lower = p.survival(hi) * weight(hi);
    let j = upper - lower;
    Ok(assemble_closed(
        p,
        c,
        j,
        upper.abs() + lower.abs(),
        Method::ClosedFormMicroOp,
    ))
}

/// Relative deviation `|(exact − approx) / exact|`.
pub fn approximation_error<T: Real>(exact: &OutageEstimate<T>, approx: &OutageEstimate<T>) -> Result<T> {
    if exact.value == T::zero() {
        return Err(Error::UndefinedMetric(
            "relative error needs a nonzero reference outage".into(),
        ));
    }
    Ok(((exact.value - approx.value) / exact.value).abs())
}

/// The cheapest analytic method whose preconditions hold.
pub fn select_method<T: Real>(p: &SinrParams<T>) -> Method {
    let alpha4 = p.alpha() == T::lit(4.0);
    if p.is_degenerate() {
        Method::Linearized
    } else if p.xi() == T::zero() && alpha4 {
        Method::ClosedFormSsAlpha4
    } else if p.xi() == T::zero() {
        Method::ClosedFormSs
    } else if alpha4 {
        Method::ClosedFormMicroOp
    } else {
        Method::Linearized
    }
}

/// Evaluates one method, or the dispatcher's pick under [`MethodChoice::Auto`].
pub fn outage<T: Real>(p: &SinrParams<T>, c: &CodeParams<T>, choice: MethodChoice) -> Result<OutageEstimate<T>> {
    let method = match choice {
        MethodChoice::Auto => select_method(p),
        MethodChoice::Forced(m) => m,
    };
    match method {
        Method::ExactQuadrature => outage_exact(p, c),
        Method::Linearized => outage_linearized(p, c),
        Method::ClosedFormSs => outage_closed_ss(p, c),
        Method::ClosedFormSsAlpha4 => outage_closed_ss_alpha4(p, c),
        Method::ClosedFormMicroOp => outage_closed_micro_op(p, c),
        Method::MonteCarlo => Err(domain(
            "Monte Carlo outage needs spatial samples; see spatial::empirical_outage",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_adaptive, q_function};

    fn code() -> CodeParams<f64> {
        CodeParams::from_rate(200, 0.1).unwrap()
    }

    fn link(alpha: f64, lambda: f64, ratio: f64, eta: f64) -> SinrParams<f64> {
        SinrParams::new(alpha, lambda, 1.0, ratio, 1.0, eta).unwrap()
    }

    #[test]
    fn code_constants() {
        // mpmath, 40 digits
        let c = code();
        assert!((c.theta() - 0.071_773_462_536_293_164).abs() < 1e-12);
        assert!((c.beta() - 14.630_931_654_997_213).abs() < 1e-12);
        assert!((c.upsilon() - 0.157_435_412_634_148_29).abs() < 1e-12);
        assert!((c.rho() - -0.013_888_487_561_561_966).abs() < 1e-12);
        assert!(c.rho_is_clamped());
        assert_eq!(c.rho_clamped(), 0.0);

        let from_bits = CodeParams::<f64>::from_bits(200, 20).unwrap();
        assert_eq!(from_bits.rate(), 0.1);
        assert_eq!(from_bits.theta(), c.theta());
        assert_eq!(from_bits.k(), Some(20));
    }

    #[test]
    fn code_rejects_bad_inputs() {
        assert!(CodeParams::<f64>::from_rate(0, 0.1).is_err());
        assert!(CodeParams::<f64>::from_rate(10, 0.0).is_err());
        assert!(CodeParams::<f64>::from_rate(10, -1.0).is_err());
        assert!(CodeParams::<f64>::from_bits(10, 0).is_err());
    }

    #[test]
    fn dispersion_values() {
        assert_eq!(dispersion(0.0_f64), 0.0);
        let l2e = std::f64::consts::LOG2_E;
        assert!((dispersion(1.0_f64) - 0.75 * l2e * l2e).abs() < 1e-15);
        assert!((dispersion(1.0_f64) - 1.561_026_735_754_205_8).abs() < 1e-14);
        assert!((dispersion(1e9_f64) - l2e * l2e).abs() < 1e-8);
    }

    #[test]
    fn conditional_error_values() {
        let c = code();
        assert_eq!(conditional_error(c.theta(), &c), 0.5);
        assert_eq!(conditional_error(0.0, &c), 1.0);
        assert!(conditional_error(1e-9, &c) > 1.0 - 1e-12);
        // direct evaluation of the Q argument at z = 0.2
        let z: f64 = 0.2;
        let arg = 200f64.sqrt() * ((1.0 + z).log2() - 0.1) / dispersion(z).sqrt();
        let direct = q_function(arg).unwrap();
        let v = conditional_error(z, &c);
        assert!((v - direct).abs() < 1e-12);
        // mpmath: 0.0019190114377404998547
        assert!((v - 0.001_919_011_437_740_499_9).abs() < 1e-14, "{v}");
    }

    #[test]
    fn kernel_values() {
        let c = code();
        assert_eq!(linearized_kernel(c.theta(), &c), 0.5);
        assert_eq!(linearized_kernel(c.upsilon(), &c), 0.0);
        let mid = 0.5 * (c.theta() + c.upsilon());
        assert!((linearized_kernel(mid, &c) - 0.25).abs() < 1e-14);
        assert_eq!(linearized_kernel(-1.0, &c), 1.0);
        assert_eq!(linearized_kernel(10.0, &c), 0.0);
    }

    #[test]
    fn kernel_is_continuous_at_breakpoints() {
        let c = CodeParams::<f64>::from_rate(1000, 0.3).unwrap();
        let h = 1e-12;
        assert!((linearized_kernel(c.rho() + h, &c) - 1.0).abs() < 1e-9);
        assert!(linearized_kernel(c.upsilon() - h, &c).abs() < 1e-9);
    }

    #[test]
    fn exact_degenerate_is_zero() {
        let p = link(4.0, 0.0, 1.0, 0.0);
        let e = outage_exact(&p, &code()).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.method, Method::ExactQuadrature);
    }

    #[test]
    fn exact_pure_noise_matches_independent_quadrature() {
        // exponential law: ∫ Q(g(z)) e^{-z} dz, integrated here without the
        // SINR module and on a different partition
        let c = code();
        let p = link(4.0, 0.0, 1.0, 1.0);
        let oracle = integrate_adaptive(
            |z: f64| conditional_error(z, &c) * (-z).exp(),
            0.0,
            f64::INFINITY,
            1e-13,
            1e-12,
        )
        .unwrap();
        let e = outage_exact(&p, &c).unwrap();
        assert!((e.value - oracle.value).abs() < 1e-9, "{} vs {}", e.value, oracle.value);
        // mpmath: 0.073467938097955451
        assert!((e.value - 0.073_467_938_097_955_451).abs() < 1e-9);
    }

    #[test]
    fn exact_matches_high_precision_reference() {
        // mpmath quad, 40 digits
        let cases = [
            (link(4.0, 0.01, 1.4, 0.0), 200, 0.015_768_072_887_975_882),
            (link(4.0, 0.01, 1.0, 0.0), 500, 0.013_219_200_280_530_548),
            (link(3.0, 0.01, 1.0, 0.0), 200, 0.013_414_544_652_599_017),
            (link(4.0, 1e-4, 1.0, 1e-3), 200, 2.110_699_214_721_402_3e-4),
            (link(4.0, 1.0, 1.0, 0.0), 200, 0.731_069_065_335_863_15),
        ];
        for (p, n, want) in cases {
            let c = CodeParams::from_rate(n, 0.1).unwrap();
            let e = outage_exact(&p, &c).unwrap();
            assert!((e.value - want).abs() < 1e-9 * want.max(1e-3), "{} vs {want}", e.value);
            assert!(e.error_bound < 1e-8);
        }
    }

    #[test]
    fn linearized_equals_ramp_integral() {
        let c = code();
        for p in [
            link(4.0, 0.01, 1.0, 0.0),
            link(3.0, 0.1, 2.0, 0.01),
            link(5.0, 0.0, 1.0, 1.0),
        ] {
            let direct = integrate_adaptive(
                |z: f64| linearized_kernel(z, &c) * p.pdf_unchecked(z),
                0.0,
                f64::INFINITY,
                1e-13,
                1e-12,
            )
            .unwrap();
            let l = outage_linearized(&p, &c).unwrap();
            assert!((l.value - direct.value).abs() < 1e-9, "{} vs {}", l.value, direct.value);
            assert!(l.clamped_rho);
            assert_eq!(l.method, Method::Linearized);
        }
    }

    #[test]
    fn linearized_reference_values() {
        // mpmath quad of the ramp integral; the exact/linearized gap at the
        // n = 200 operating point is ~6.5% (noise only) and ~3.35% at n = 500
        let c200 = code();
        let noise = link(4.0, 0.0, 1.0, 1.0);
        let l = outage_linearized(&noise, &c200).unwrap();
        assert!((l.value - 0.068_685_125_076_785_352).abs() < 1e-10);
        let e = outage_exact(&noise, &c200).unwrap();
        let delta = approximation_error(&e, &l).unwrap();
        assert!((delta - 0.065_100_7).abs() < 1e-6, "{delta}");

        let c500 = CodeParams::from_rate(500, 0.1).unwrap();
        let dsa = link(4.0, 0.01, 1.0, 0.0);
        let l = outage_linearized(&dsa, &c500).unwrap();
        assert!((l.value - 0.012_775_965_580_834_747).abs() < 1e-11);
        assert!(!l.clamped_rho);
        let e = outage_exact(&dsa, &c500).unwrap();
        let delta = approximation_error(&e, &l).unwrap();
        assert!((delta - 0.033_529_6).abs() < 1e-6, "{delta}");
    }

    #[test]
    fn closed_ss_matches_linearized() {
        let c = code();
        for alpha in [4.0, 3.0] {
            let p = link(alpha, 0.01, 1.0, 0.0);
            let closed = outage_closed_ss(&p, &c).unwrap();
            let lin = outage_linearized(&p, &c).unwrap();
            assert!(
                (closed.value - lin.value).abs() < 1e-9,
                "alpha {alpha}: {} vs {}",
                closed.value,
                lin.value
            );
            assert!(closed.clamped_rho);
        }
    }

    #[test]
    fn closed_ss_vanishing_density() {
        let p = link(4.0, 1e-12, 1.0, 0.0);
        let v = outage_closed_ss(&p, &code()).unwrap().value;
        assert!(v < 1e-9, "{v}");
    }

    #[test]
    fn closed_forms_reject_wrong_scenario() {
        let c = code();
        let noisy = link(4.0, 0.01, 1.0, 0.001);
        assert!(matches!(outage_closed_ss(&noisy, &c), Err(Error::ScenarioMismatch(_))));
        assert!(matches!(
            outage_closed_ss_alpha4(&noisy, &c),
            Err(Error::ScenarioMismatch(_))
        ));
        let alpha3 = link(3.0, 0.01, 1.0, 0.0);
        assert!(matches!(
            outage_closed_ss_alpha4(&alpha3, &c),
            Err(Error::ScenarioMismatch(_))
        ));
        assert!(matches!(
            outage_closed_micro_op(&link(4.0, 0.01, 1.0, 0.0), &c),
            Err(Error::ScenarioMismatch(_))
        ));
        assert!(matches!(
            outage_closed_micro_op(&link(3.0, 0.01, 1.0, 0.01), &c),
            Err(Error::ScenarioMismatch(_))
        ));
    }

    #[test]
    fn alpha4_equals_general_form() {
        let c = code();
        let p = link(4.0, 0.01, 1.0, 0.0);
        let a4 = outage_closed_ss_alpha4(&p, &c).unwrap();
        let general = outage_closed_ss(&p, &c).unwrap();
        assert!((a4.value - general.value).abs() < 1e-9);
        assert_eq!(a4.method, Method::ClosedFormSsAlpha4);
    }

    #[test]
    fn micro_op_values() {
        let c = code();
        for lambda in [0.0, 1e-4, 1e-2] {
            let p = link(4.0, lambda, 1.0, 0.001);
            let closed = outage_closed_micro_op(&p, &c).unwrap();
            let lin = outage_linearized(&p, &c).unwrap();
            assert!(
                (closed.value - lin.value).abs() < 1e-9,
                "lambda {lambda}: {} vs {}",
                closed.value,
                lin.value
            );
        }
        let p = link(4.0, 1e-4, 1.0, 0.001);
        assert!(outage_closed_micro_op(&p, &c).unwrap().value <= 1e-3);
    }

    #[test]
    fn micro_op_survives_large_exponent() {
        // (ζλ)²/4ξ ≈ 6000: the unscaled form would overflow
        let c = code();
        let p = link(4.0, 1.0, 1.0, 0.001);
        let closed = outage_closed_micro_op(&p, &c).unwrap();
        let lin = outage_linearized(&p, &c).unwrap();
        assert!(closed.value.is_finite());
        assert!(
            (closed.value - lin.value).abs() < 1e-8,
            "{} vs {}",
            closed.value,
            lin.value
        );
    }

    #[test]
    fn approximation_error_arithmetic() {
        let mk = |v| OutageEstimate::new(v, Method::Linearized, 0.0, false);
        assert_eq!(approximation_error(&mk(0.3), &mk(0.3)).unwrap(), 0.0);
        let d: f64 = approximation_error(&mk(0.02), &mk(0.0208)).unwrap();
        assert!((d - 0.04).abs() < 1e-12);
        assert!(matches!(
            approximation_error(&mk(0.0), &mk(0.1)),
            Err(Error::UndefinedMetric(_))
        ));
    }

    #[test]
    fn dispatcher_picks_closed_forms() {
        assert_eq!(select_method(&link(4.0, 0.01, 1.0, 0.0)), Method::ClosedFormSsAlpha4);
        assert_eq!(select_method(&link(3.0, 0.01, 1.0, 0.0)), Method::ClosedFormSs);
        assert_eq!(select_method(&link(4.0, 0.01, 1.0, 0.1)), Method::ClosedFormMicroOp);
        assert_eq!(select_method(&link(3.0, 0.01, 1.0, 0.1)), Method::Linearized);
        let forced = outage(
            &link(4.0, 0.01, 1.0, 0.0),
            &code(),
            MethodChoice::Forced(Method::ExactQuadrature),
        )
        .unwrap();
        assert_eq!(forced.method, Method::ExactQuadrature);
        assert!(outage(
            &link(4.0, 0.01, 1.0, 0.0),
            &code(),
            MethodChoice::Forced(Method::MonteCarlo)
        )
        .is_err());
    }

    #[test]
    fn method_labels_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.label().parse::<Method>().unwrap(), m);
        }
        assert!("bogus".parse::<Method>().is_err());
    }

    #[test]
    fn single_precision_closed_form() {
        let c = CodeParams::<f32>::from_rate(200, 0.1).unwrap();
        let p = SinrParams::<f32>::new(4.0, 0.01, 1.0, 1.0, 1.0, 0.0).unwrap();
        let v = outage_closed_ss_alpha4(&p, &c).unwrap().value;
        assert!((v - 0.011_907_765).abs() < 1e-5, "{v}");
    }
}
