//! SINR law of the reference link in a Poisson field of Rayleigh-faded
//! interferers:
//!
//! `F(z) = 1 − exp(−ζλ z^(2/α) − ξ z)` with
//! `κ = Γ(1 + 2/α) Γ(1 − 2/α)`, `ζ = κ π d² (W_p/W_s)^(2/α)`, `ξ = η d^α / W_s`.
//!
//! Everything is on the linear SINR scale.

use crate::error::{domain, Error, Result};
use crate::numerics::{find_root, gamma};
use crate::real::Real;

/// Physical parameters of the reference link plus the derived κ, ζ, ξ.
///
/// Fields are private so the derived constants always match the inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrParams<T> {
    alpha: T,
    lambda: T,
    d: T,
    w_p: T,
    w_s: T,
    eta: T,
    kappa: T,
    zeta: T,
    xi: T,
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(domain(msg()))
    }
}

impl<T: Real> SinrParams<T> {
    /// Validates the physical parameters and derives κ, ζ and ξ.
    pub fn new(alpha: T, lambda: T, d: T, w_p: T, w_s: T, eta: T) -> Result<Self> {
        if !alpha.is_finite() || alpha <= T::lit(2.0) {
            return Err(Error::ModelDomain(format!(
                "path-loss exponent must exceed 2, got {alpha}"
            )));
        }
        require(d.is_finite() && d > T::zero(), || {
            format!("distance must be positive, got {d}")
        })?;
        require(w_p.is_finite() && w_p > T::zero(), || {
            format!("interferer power must be positive, got {w_p}")
        })?;
        require(w_s.is_finite() && w_s > T::zero(), || {
            format!("reference power must be positive, got {w_s}")
        })?;
        require(lambda.is_finite() && lambda >= T::zero(), || {
            format!("density must be nonnegative, got {lambda}")
        })?;
        require(eta.is_finite() && eta >= T::zero(), || {
            format!("noise power must be nonnegative, got {eta}")
        })?;

        let delta = T::lit(2.0) / alpha;
        let kappa = gamma(T::one() + delta)? * gamma(T::one() - delta)?;
        let zeta = kappa * T::PI() * d * d * (w_p / w_s).powf(delta);
        let xi = eta * d.powf(alpha) / w_s;
        Ok(Self {
            alpha,
            lambda,
            d,
            w_p,
            w_s,
            eta,
            kappa,
            zeta,
            xi,
        })
    }

    /// Same link with a different interferer density.
    pub fn with_lambda(&self, lambda: T) -> Result<Self> {
        Self::new(self.alpha, lambda, self.d, self.w_p, self.w_s, self.eta)
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }
    pub fn lambda(&self) -> T {
        self.lambda
    }
    pub fn d(&self) -> T {
        self.d
    }
    pub fn w_p(&self) -> T {
        self.w_p
    }
    pub fn w_s(&self) -> T {
        self.w_s
    }
    pub fn eta(&self) -> T {
        self.eta
    }
    pub fn kappa(&self) -> T {
        self.kappa
    }
    pub fn zeta(&self) -> T {
        self.zeta
    }
    pub fn xi(&self) -> T {
        self.xi
    }

    /// ζλ, the coefficient of `z^(2/α)` in the exponent.
    pub fn interference_scale(&self) -> T {
        self.zeta * self.lambda
    }

    /// No interferers and no noise: the SINR is infinite almost surely.
    pub fn is_degenerate(&self) -> bool {
        self.lambda == T::zero() && self.xi == T::zero()
    }

    fn exponent(&self, z: T) -> T {
        let interference = if self.lambda == T::zero() {
            T::zero()
        } else {
            self.interference_scale() * z.powf(T::lit(2.0) / self.alpha)
        };
        interference + self.xi * z
    }

    /// `P[Z > z]` for `z ≥ 0`; no argument checks.
    pub(crate) fn survival(&self, z: T) -> T {
        if self.is_degenerate() {
            return T::one();
        }
        (-self.exponent(z)).exp()
    }

    /// `P[Z ≤ z]` for `z ≥ 0`; no argument checks.
    pub(crate) fn cdf_unchecked(&self, z: T) -> T {
        if self.is_degenerate() {
            return T::zero();
        }
        -(-self.exponent(z)).exp_m1()
    }

    /// Density for `z > 0`; no argument checks.
    pub(crate) fn pdf_unchecked(&self, z: T) -> T {
        if self.is_degenerate() {
            return T::zero();
        }
        let delta = T::lit(2.0) / self.alpha;
        let interference = if self.lambda == T::zero() {
            T::zero()
        } else {
            delta * self.interference_scale() * z.powf(delta - T::one())
        };
        (interference + self.xi) * (-self.exponent(z)).exp()
    }

    pub fn cdf(&self, z: T) -> Result<T> {
        require(z >= T::zero(), || format!("SINR must be nonnegative, got {z}"))?;
        Ok(self.cdf_unchecked(z))
    }

    pub fn pdf(&self, z: T) -> Result<T> {
        require(z > T::zero() && z.is_finite(), || {
            format!("density is defined for finite z > 0, got {z}")
        })?;
        Ok(self.pdf_unchecked(z))
    }

    /// Inverse CDF: the `z` with `F(z) = u`.
    pub fn quantile(&self, u: T) -> Result<T> {
        require(u > T::zero() && u < T::one(), || {
            format!("quantile level must lie in (0, 1), got {u}")
        })?;
        if self.is_degenerate() {
            return Err(domain("quantile needs lambda > 0 or xi > 0"));
        }
        let target = -(-u).ln_1p();
        let scale = self.interference_scale();
        let half_alpha = self.alpha / T::lit(2.0);
        if self.lambda == T::zero() {
            return Ok(target / self.xi);
        }
        let interference_only = (target / scale).powf(half_alpha);
        if self.xi == T::zero() {
            return Ok(interference_only);
        }
        // each term alone already exceeds the target beyond its own root
        let hi = interference_only.min(target / self.xi);
        find_root(|z| self.exponent(z) - target, T::zero(), hi, T::zero(), 400)
    }
}

/// Builds [`SinrParams`] from the physical link description.
pub fn derive_params<T: Real>(alpha: T, lambda: T, d: T, w_p: T, w_s: T, eta: T) -> Result<SinrParams<T>> {
    SinrParams::new(alpha, lambda, d, w_p, w_s, eta)
}

pub fn sinr_cdf<T: Real>(p: &SinrParams<T>, z: T) -> Result<T> {
    p.cdf(z)
}

pub fn sinr_pdf<T: Real>(p: &SinrParams<T>, z: T) -> Result<T> {
    p.pdf(z)
}

pub fn sinr_quantile<T: Real>(p: &SinrParams<T>, u: T) -> Result<T> {
    p.quantile(u)
}
