//! Gamma, incomplete gamma and error-function family.
//!
//! Incomplete gamma functions here are UNREGULARIZED:
//! `gamma_upper(s, x) = ∫ₓ^∞ u^(s-1) e^(-u) du`, so `gamma_upper(s, 0) = Γ(s)`.
//! The regularized form is `gamma_upper(s, x) / gamma(s)`.

use crate::error::{domain, Error, Result};
use crate::real::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const MAX_ITER: usize = 10_000;

// Below this threshold a Q-function value is reported as exactly zero.
const Q_UNDERFLOW: f64 = 1e-320;

fn finite<T: Real>(x: T, what: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{what} must be finite, got {x}")))
    }
}

fn lanczos_sum<T: Real>(x: T) -> T {
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::from_usize(i).unwrap());
    }
    acc
}

/// Γ(x) for real x (Lanczos, with reflection below 1/2). Poles at the
/// nonpositive integers return an error.
pub fn gamma<T: Real>(x: T) -> Result<T> {
    finite(x, "gamma argument")?;
    if x <= T::zero() && x == x.floor() {
        return Err(domain(format!("gamma has a pole at {x}")));
    }
    Ok(gamma_unchecked(x))
}

pub(crate) fn gamma_unchecked<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        let pi = T::PI();
        return pi / ((pi * x).sin() * gamma_unchecked(T::one() - x));
    }
    let xm = x - T::one();
    let t = xm + T::lit(LANCZOS_G) + half;
    let sum = lanczos_sum(xm);
    if x < T::lit(140.0) {
        (T::TAU()).sqrt() * t.powf(xm + half) * (-t).exp() * sum
    } else {
        ((xm + half) * t.ln() - t + (T::TAU().sqrt() * sum).ln()).exp()
    }
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma<T: Real>(x: T) -> Result<T> {
    finite(x, "ln_gamma argument")?;
    if x <= T::zero() {
        return Err(domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        return gamma_unchecked(x).ln();
    }
    let xm = x - T::one();
    let t = xm + T::lit(LANCZOS_G) + half;
    (xm + half) * t.ln() - t + (T::TAU().sqrt() * lanczos_sum(xm)).ln()
}

// x^s e^{-x}, evaluated in log space.
fn power_exp<T: Real>(s: T, x: T) -> T {
    (s * x.ln() - x).exp()
}

// Σ x^k / (s (s+1) ... (s+k)); γ(s, x) = x^s e^{-x} · this.
fn lower_series<T: Real>(s: T, x: T) -> T {
    let eps = T::epsilon();
    let mut term = T::one() / s;
    let mut sum = term;
    let mut denom = s;
    for _ in 0..MAX_ITER {
        denom = denom + T::one();
        term = term * x / denom;
        sum = sum + term;
        if term.abs() < sum.abs() * eps {
            break;
        }
    }
    sum
}

// Continued fraction h with Γ(s, x) = x^s e^{-x} · h (modified Lentz).
fn upper_fraction<T: Real>(s: T, x: T) -> T {
    let eps = T::epsilon();
    let tiny = T::min_positive_value() / eps;
    let two = T::lit(2.0);
    let mut b = x + T::one() - s;
    let mut c = T::one() / tiny;
    let mut d = T::one() / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let fi = T::from_usize(i).unwrap();
        let an = -fi * (fi - s);
        b = b + two;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = T::one() / d;
        let delta = d * c;
        h = h * delta;
        if (delta - T::one()).abs() <= eps {
            break;
        }
    }
    h
}

fn check_incomplete<T: Real>(s: T, x: T) -> Result<()> {
    finite(s, "shape")?;
    if !(x >= T::zero()) {
        return Err(domain(format!("incomplete gamma needs x >= 0, got {x}")));
    }
    if s <= T::zero() {
        return Err(domain(format!("incomplete gamma needs s > 0, got {s}")));
    }
    Ok(())
}

/// Unregularized upper incomplete gamma Γ(s, x) = ∫ₓ^∞ u^(s-1) e^(-u) du.
pub fn gamma_upper<T: Real>(s: T, x: T) -> Result<T> {
    check_incomplete(s, x)?;
    if x == T::zero() {
        return Ok(gamma_unchecked(s));
    }
    if x.is_infinite() {
        return Ok(T::zero());
    }
    if x < s + T::one() {
        Ok(gamma_unchecked(s) - power_exp(s, x) * lower_series(s, x))
    } else {
        Ok(power_exp(s, x) * upper_fraction(s, x))
    }
}

/// Unregularized lower incomplete gamma γ(s, x) = ∫₀ˣ u^(s-1) e^(-u) du.
pub fn gamma_lower<T: Real>(s: T, x: T) -> Result<T> {
    check_incomplete(s, x)?;
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x.is_infinite() {
        return Ok(gamma_unchecked(s));
    }
    if x < s + T::one() {
        Ok(power_exp(s, x) * lower_series(s, x))
    } else {
        Ok(gamma_unchecked(s) - power_exp(s, x) * upper_fraction(s, x))
    }
}

/// ∫ from `x1` to `x2` of u^(s-1) e^(-u) du, i.e. Γ(s, x1) − Γ(s, x2), taking
/// whichever of the lower or upper tails avoids cancellation.
pub fn gamma_between<T: Real>(s: T, x1: T, x2: T) -> Result<T> {
    check_incomplete(s, x1)?;
    check_incomplete(s, x2)?;
    if x2 < x1 {
        return gamma_between(s, x2, x1).map(|v| -v);
    }
    let pivot = s + T::one();
    if x2 < pivot {
        Ok(gamma_lower(s, x2)? - gamma_lower(s, x1)?)
    } else {
        Ok(gamma_upper(s, x1)? - gamma_upper(s, x2)?)
    }
}

// erf via the all-positive series 2/√π e^{-x²} Σ 2^k x^{2k+1} / (2k+1)!!.
fn erf_series<T: Real>(x: T) -> T {
    let eps = T::epsilon();
    let two_x2 = T::lit(2.0) * x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = T::zero();
    for _ in 0..MAX_ITER {
        k = k + T::one();
        term = term * two_x2 / (T::lit(2.0) * k + T::one());
        sum = sum + term;
        if term.abs() < sum.abs() * eps {
            break;
        }
    }
    T::FRAC_2_SQRT_PI() * (-x * x).exp() * sum
}

const SERIES_LIMIT: f64 = 1.5;

/// Error function.
pub fn erf<T: Real>(t: T) -> Result<T> {
    finite(t, "erf argument")?;
    Ok(erf_unchecked(t))
}

pub(crate) fn erf_unchecked<T: Real>(t: T) -> T {
    let x = t.abs();
    let v = if x < T::lit(SERIES_LIMIT) {
        erf_series(x)
    } else {
        T::one() - erfc_unchecked(x)
    };
    if t < T::zero() {
        -v
    } else {
        v
    }
}

/// Complementary error function, accurate in relative terms in the upper tail.
pub fn erfc<T: Real>(t: T) -> Result<T> {
    finite(t, "erfc argument")?;
    Ok(erfc_unchecked(t))
}

pub(crate) fn erfc_unchecked<T: Real>(t: T) -> T {
    if t < T::zero() {
        return T::lit(2.0) - erfc_unchecked(-t);
    }
    if t == T::zero() {
        return T::one();
    }
    if t < T::lit(SERIES_LIMIT) {
        return T::one() - erf_series(t);
    }
    let x2 = t * t;
    if !x2.is_finite() {
        return T::zero();
    }
    (-x2).exp() * t * upper_fraction(T::lit(0.5), x2) / T::PI().sqrt()
}

/// Scaled complementary error function e^(t²) erfc(t), for t ≥ 0.
pub fn erfcx<T: Real>(t: T) -> Result<T> {
    finite(t, "erfcx argument")?;
    if t < T::zero() {
        return Err(domain(format!("erfcx is only provided for t >= 0, got {t}")));
    }
    Ok(erfcx_unchecked(t))
}

pub(crate) fn erfcx_unchecked<T: Real>(t: T) -> T {
    if t < T::lit(SERIES_LIMIT) {
        return (t * t).exp() * erfc_unchecked(t);
    }
    let x2 = t * t;
    if !x2.is_finite() || t > T::one() / T::epsilon() {
        // leading asymptotic term; the next one is below machine precision
        return T::one() / (t * T::PI().sqrt());
    }
    t * upper_fraction(T::lit(0.5), x2) / T::PI().sqrt()
}

/// 1 − √π·y·erfcx(y) for y ≥ 0, without the cancellation of the direct
/// form at large y.
pub(crate) fn scaled_erfc_deficit<T: Real>(y: T) -> T {
    if y < T::lit(8.0) {
        return T::one() - T::PI().sqrt() * y * erfcx_unchecked(y);
    }
    // 1 - Σ_k (-1)^k (2k-1)!! / (2y²)^k, asymptotic
    let inv = T::one() / (T::lit(2.0) * y * y);
    let eps = T::epsilon();
    let mut term = T::one();
    let mut sum = T::zero();
    let mut prev = T::infinity();
    for k in 1..200 {
        let odd = T::from_usize(2 * k - 1).unwrap();
        term = -term * odd * inv;
        if term.abs() >= prev {
            break;
        }
        prev = term.abs();
        sum = sum - term;
        if term.abs() < sum.abs() * eps {
            break;
        }
    }
    sum
}

/// Gaussian tail probability Q(t) = ½·erfc(t/√2). Values below 1e-320 are
/// returned as exactly zero.
pub fn q_function<T: Real>(t: T) -> Result<T> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("q_function needs a finite argument, got {t}")));
    }
    Ok(q_unchecked(t))
}

pub(crate) fn q_unchecked<T: Real>(t: T) -> T {
    let v = T::lit(0.5) * erfc_unchecked(t * T::FRAC_1_SQRT_2());
    if v < T::lit(Q_UNDERFLOW) {
        T::zero()
    } else {
        v
    }
}
