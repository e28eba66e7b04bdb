//! Adaptive Gauss–Kronrod (7/15) quadrature with global error control.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};
use crate::real::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5] and the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Integral estimate with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub error_estimate: T,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    /// Cap on the number of subintervals kept by the adaptive scheme.
    pub max_subdivisions: usize,
}

impl<T: Real> Default for QuadratureOptions<T> {
    fn default() -> Self {
        let eps = T::epsilon();
        Self {
            abs_tol: T::lit(1e-10).max(eps * T::lit(1e3)),
            rel_tol: T::lit(1e-8).max(eps * T::lit(1e2)),
            max_subdivisions: 4000,
        }
    }
}

impl<T: Real> QuadratureOptions<T> {
    pub fn with_tolerances(abs_tol: T, rel_tol: T) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Segment<T> {}
impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on error; ties broken by position for determinism
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}

fn kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Segment<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    let mut kron = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kron = kron + T::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * pair;
        }
    }
    let value = kron * half_len;
    let mut error = ((kron - gauss) * half_len).abs();
    if !error.is_finite() {
        error = T::infinity();
    }
    Segment { a, b, value, error }
}

/// Integrates `f` over `[a, b]` to `max(abs_tol, rel_tol·|value|)`.
///
/// `b` may be `+∞`; the tail is mapped to `[0, 1)` with `u = a + t/(1 − t)`.
pub fn integrate_adaptive<T, F>(f: F, a: T, b: T, abs_tol: T, rel_tol: T) -> Result<QuadratureResult<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    integrate_with(f, a, b, &QuadratureOptions::with_tolerances(abs_tol, rel_tol))
}

pub fn integrate_with<T, F>(mut f: F, a: T, b: T, opts: &QuadratureOptions<T>) -> Result<QuadratureResult<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if a.is_nan() || b.is_nan() || a.is_infinite() {
        return Err(domain(format!("invalid integration bounds [{a}, {b}]")));
    }
    if a > b {
        return Err(domain(format!("integration needs a <= b, got [{a}, {b}]")));
    }
    if b.is_infinite() {
        let mapped = |t: T| {
            let s = T::one() - t;
            let v = f(a + t / s);
            let w = v / (s * s);
            if w.is_finite() {
                w
            } else {
                T::zero()
            }
        };
        return adapt(mapped, T::zero(), T::one(), opts);
    }
    if a == b {
        return Ok(QuadratureResult {
            value: T::zero(),
            error_estimate: T::zero(),
            evaluations: 1,
        });
    }
    adapt(f, a, b, opts)
}

fn adapt<T, F>(mut f: F, a: T, b: T, opts: &QuadratureOptions<T>) -> Result<QuadratureResult<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let eps = T::epsilon();
    let mut evaluations = 15;
    let first = kronrod(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut value = first.value;
    let mut error = first.error;

    loop {
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            break;
        }
        if heap.len() >= opts.max_subdivisions {
            return Err(Error::Convergence {
                best: value.as_f64(),
                error_estimate: error.as_f64(),
                evaluations,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        if worst.error == T::zero() {
            heap.push(worst);
            break;
        }
        let mid = T::lit(0.5) * (worst.a + worst.b);
        let width = worst.b - worst.a;
        if width <= eps * T::lit(100.0) * mid.abs().max(T::min_positive_value()) {
            // cannot bisect further; accept what is left at this resolution
            heap.push(Segment {
                error: T::zero(),
                ..worst
            });
            error = error - worst.error;
            continue;
        }
        let left = kronrod(&mut f, worst.a, mid);
        let right = kronrod(&mut f, mid, worst.b);
        evaluations += 30;
        value = value - worst.value + left.value + right.value;
        error = error - worst.error + left.error + right.error;
        heap.push(left);
        heap.push(right);
        if !value.is_finite() {
            return Err(Error::Convergence {
                best: value.as_f64(),
                error_estimate: f64::INFINITY,
                evaluations,
            });
        }
    }

    // resum to shed drift from the incremental updates
    let mut segments: Vec<_> = heap.into_vec();
    segments.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal));
    let value = segments.iter().fold(T::zero(), |acc, s| acc + s.value);
    let error = segments.iter().fold(T::zero(), |acc, s| acc + s.error);
    Ok(QuadratureResult {
        value,
        error_estimate: error.max(T::zero()),
        evaluations,
    })
}
