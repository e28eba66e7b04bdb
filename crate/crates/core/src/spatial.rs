//! Spatial Monte Carlo of the reference link.
//!
//! The receiver sits at the origin, the reference transmitter at distance
//! `d`, and interferers form a Poisson field of density λ with unit-mean
//! exponential power fades. Interferers are generated in order of distance
//! (cumulative exponential gaps in `πr²`), so a realization on a larger disc
//! extends the one on a smaller disc with the same stream.
//!
//! Only a disc of radius `R` is simulated. Interference from beyond it is
//! either dropped ([`FarField::Truncate`]) or replaced by its mean
//! ([`FarField::MeanField`]). The radius comes from a bound on the resulting
//! sup-distance between the simulated and the infinite-plane SINR CDF:
//!
//! - truncation: `|ΔF(z)| ≤ ξ_R·z·S(z)`, with `ξ_R` the far-field mean as an
//!   equivalent noise level;
//! - mean field: `|ΔF(z)| ≤ q_R·z²·S(z)`, with
//!   `q_R = λπ W_p² d^{2α} R^{2−2α} / (W_s² (α−1))`,
//!
//! and `sup z S(z)`, `sup z² S(z)` bounded through whichever of the noise and
//! interference terms gives the smaller value.

use std::io::Write;

use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::numerics::{RandomStream, SeedSpec};
use crate::outage::{conditional_error, CodeParams, Method, OutageEstimate};
use crate::real::Real;
use crate::sinr::SinrParams;

/// Realizations per parallel work item.
const CHUNK: usize = 2048;

/// How the interference from outside the simulated disc is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FarField {
    Truncate,
    #[default]
    MeanField,
}

/// How the disc radius is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusPolicy<T> {
    Fixed(T),
    /// Smallest radius whose CDF bias bound is at most `tolerance`
    /// (absolute, sup over z), but never below `4d`.
    CdfBias {
        tolerance: T,
    },
}

impl<T: Real> Default for RadiusPolicy<T> {
    fn default() -> Self {
        RadiusPolicy::CdfBias {
            tolerance: T::lit(1e-5),
        }
    }
}

/// Everything a batch of realizations depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldConfig<T> {
    physical: SinrParams<T>,
    radius: T,
    far_field: FarField,
    n_realizations: usize,
    seed: SeedSpec,
}

impl<T: Real> FieldConfig<T> {
    /// Default radius policy with the mean-field tail.
    pub fn new(physical: SinrParams<T>, n_realizations: usize, seed: SeedSpec) -> Result<Self> {
        Self::configure(
            physical,
            n_realizations,
            seed,
            RadiusPolicy::default(),
            FarField::default(),
        )
    }

    pub fn configure(
        physical: SinrParams<T>,
        n_realizations: usize,
        seed: SeedSpec,
        policy: RadiusPolicy<T>,
        far_field: FarField,
    ) -> Result<Self> {
        if n_realizations == 0 {
            return Err(domain("at least one realization is required"));
        }
        let radius = select_radius(&physical, policy, far_field)?;
        Ok(Self {
            physical,
            radius,
            far_field,
            n_realizations,
            seed,
        })
    }

    pub fn physical(&self) -> &SinrParams<T> {
        &self.physical
    }
    pub fn radius(&self) -> T {
        self.radius
    }
    pub fn far_field(&self) -> FarField {
        self.far_field
    }
    pub fn n_realizations(&self) -> usize {
        self.n_realizations
    }
    pub fn seed(&self) -> SeedSpec {
        self.seed
    }

    /// Same field on a disc of a different radius.
    pub fn with_radius(&self, radius: T) -> Result<Self> {
        check_radius(radius)?;
        Ok(Self { radius, ..*self })
    }

    /// Expected number of interferers per realization.
    pub fn mean_interferers(&self) -> T {
        self.physical.lambda() * T::PI() * self.radius * self.radius
    }

    /// Bound on the sup-distance between the simulated and the
    /// infinite-plane CDF.
    pub fn bias_bound(&self) -> T {
        cdf_bias_bound(&self.physical, self.radius, self.far_field)
    }
}

fn check_radius<T: Real>(radius: T) -> Result<()> {
    if radius.is_finite() && radius > T::zero() {
        Ok(())
    } else {
        Err(domain(format!("disc radius must be positive and finite, got {radius}")))
    }
}

/// Mean interference from beyond radius `R`, divided by the reference link
/// gain `W_s d^{−α}`: the noise level it would amount to.
pub fn far_field_noise<T: Real>(p: &SinrParams<T>, radius: T) -> T {
    let two = T::lit(2.0);
    p.lambda() * T::TAU() * p.w_p() * radius.powf(two - p.alpha()) / (p.alpha() - two) * p.d().powf(p.alpha()) / p.w_s()
}

// q_R of the mean-field bound, without the sup factor.
fn mean_field_coefficient<T: Real>(p: &SinrParams<T>, radius: T) -> T {
    let a = p.alpha();
    let gain = p.w_p() * p.d().powf(a) / p.w_s();
    p.lambda() * T::PI() * gain * gain * radius.powf(T::lit(2.0) - T::lit(2.0) * a) / (a - T::one())
}

// sup_z z^k S(z) ≤ min over the noise and interference factors of S.
fn moment_sup<T: Real>(p: &SinrParams<T>, k: T) -> T {
    let e = T::E();
    let mut sup = T::infinity();
    if p.xi() > T::zero() {
        sup = sup.min((k / (e * p.xi())).powf(k));
    }
    let scale = p.interference_scale();
    if scale > T::zero() {
        let half_alpha = p.alpha() / T::lit(2.0);
        sup = sup.min((k * half_alpha / (e * scale)).powf(k * half_alpha));
    }
    sup
}

/// Upper bound on `sup_z |F_disc(z) − F(z)|` for a disc of radius `radius`.
pub fn cdf_bias_bound<T: Real>(p: &SinrParams<T>, radius: T, far_field: FarField) -> T {
    if p.lambda() == T::zero() {
        return T::zero();
    }
    match far_field {
        FarField::Truncate => far_field_noise(p, radius) * moment_sup(p, T::one()),
        FarField::MeanField => mean_field_coefficient(p, radius) * moment_sup(p, T::lit(2.0)),
    }
}

/// Radius the policy selects for this link.
pub fn select_radius<T: Real>(p: &SinrParams<T>, policy: RadiusPolicy<T>, far_field: FarField) -> Result<T> {
    let floor = T::lit(4.0) * p.d();
    match policy {
        RadiusPolicy::Fixed(r) => {
            check_radius(r)?;
            Ok(r)
        }
        RadiusPolicy::CdfBias { tolerance } => {
            if !(tolerance > T::zero()) {
                return Err(domain(format!("bias tolerance must be positive, got {tolerance}")));
            }
            if p.lambda() == T::zero() {
                return Ok(floor);
            }
            // both bounds are a power of R: solve at R = 1 and rescale
            let (at_unit, exponent) = match far_field {
                FarField::Truncate => (cdf_bias_bound(p, T::one(), far_field), p.alpha() - T::lit(2.0)),
                FarField::MeanField => (
                    cdf_bias_bound(p, T::one(), far_field),
                    T::lit(2.0) * p.alpha() - T::lit(2.0),
                ),
            };
            let r = (at_unit / tolerance).powf(exponent.recip());
            if !r.is_finite() {
                return Err(domain("no finite radius meets the bias tolerance"));
            }
            Ok(r.max(floor))
        }
    }
}

/// One SINR draw: `W_s h₀ d^{−α} / (Σ W_p h_i |x_i|^{−α} + I_far + η)`.
/// Infinite when there is neither interference nor noise.
pub fn realize_field<T: Real>(cfg: &FieldConfig<T>, stream: &mut RandomStream) -> T {
    let p = &cfg.physical;
    let exp1 = |s: &mut RandomStream| T::lit(Exp1.sample(s));
    let signal_fade = exp1(stream);
    let neg_half_alpha = -p.alpha() / T::lit(2.0);
    let mut interference = T::zero();
    if p.lambda() > T::zero() {
        let area_scale = T::one() / (p.lambda() * T::PI());
        let r2_max = cfg.radius * cfg.radius;
        let mut mass = T::zero();
        loop {
            mass = mass + exp1(stream);
            let r2 = mass * area_scale;
            if r2 > r2_max {
                break;
            }
            interference = interference + exp1(stream) * r2.powf(neg_half_alpha);
        }
        interference = interference * p.w_p();
        if cfg.far_field == FarField::MeanField {
            interference = interference + far_field_noise(p, cfg.radius) * p.w_s() / p.d().powf(p.alpha());
        }
    }
    let signal = p.w_s() * signal_fade / p.d().powf(p.alpha());
    let denominator = interference + p.eta();
    if denominator == T::zero() {
        T::infinity()
    } else {
        signal / denominator
    }
}

/// SINR samples, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution<T> {
    samples: Vec<T>,
}

impl<T: Real> EmpiricalDistribution<T> {
    /// Sorts `samples`; NaNs are rejected.
    pub fn from_samples(mut samples: Vec<T>) -> Result<Self> {
        if samples.iter().any(|v| v.is_nan()) {
            return Err(domain("samples contain NaN"));
        }
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    /// Fraction of samples `≤ z`.
    pub fn cdf(&self, z: T) -> T {
        if self.samples.is_empty() {
            return T::zero();
        }
        let below = self.samples.partition_point(|&v| v <= z);
        T::from_usize(below).unwrap() / T::from_usize(self.samples.len()).unwrap()
    }
}

/// Runs all realizations of `cfg`. Realization `i` always reads block `i`
/// of the seed's stream, so the result does not depend on the thread count.
pub fn collect_samples<T: Real>(cfg: &FieldConfig<T>) -> EmpiricalDistribution<T> {
    let starts: Vec<usize> = (0..cfg.n_realizations).step_by(CHUNK).collect();
    let chunks: Vec<Vec<T>> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + CHUNK).min(cfg.n_realizations);
            let mut stream = RandomStream::for_block(cfg.seed, start as u64);
            (start..end)
                .map(|i| {
                    stream.seek_block(i as u64);
                    realize_field(cfg, &mut stream)
                })
                .collect()
        })
        .collect();
    EmpiricalDistribution::from_samples(chunks.concat()).expect("field samples are never NaN")
}

/// Samples drawn from the analytic law by inversion, on the same block
/// layout as [`collect_samples`].
pub fn inverse_transform_samples<T: Real>(
    p: &SinrParams<T>,
    count: usize,
    seed: SeedSpec,
) -> Result<EmpiricalDistribution<T>> {
    if count == 0 {
        return Err(domain("at least one sample is required"));
    }
    let starts: Vec<usize> = (0..count).step_by(CHUNK).collect();
    let chunks: Vec<Vec<T>> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + CHUNK).min(count);
            let mut stream = RandomStream::for_block(seed, start as u64);
            (start..end)
                .map(|i| {
                    stream.seek_block(i as u64);
                    // (0, 1): reject the single zero of the 53-bit grid
                    let mut u = stream.next_uniform();
                    while u == 0.0 {
                        u = stream.next_uniform();
                    }
                    p.quantile(T::lit(u))
                })
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<_>>()?;
    EmpiricalDistribution::from_samples(chunks.concat())
}

pub fn empirical_cdf<T: Real>(d: &EmpiricalDistribution<T>, z: T) -> T {
    d.cdf(z)
}

/// Sample mean of the block error, with two standard errors as the bound.
pub fn empirical_outage<T: Real>(d: &EmpiricalDistribution<T>, c: &CodeParams<T>) -> Result<OutageEstimate<T>> {
    let count = d.count();
    if count == 0 {
        return Err(domain("empirical outage needs at least one sample"));
    }
    let errors: Vec<f64> = d.samples.iter().map(|&z| conditional_error(z, c).as_f64()).collect();
    let nf = count as f64;
    let mean = errors.iter().sum::<f64>() / nf;
    let spread = if count > 1 {
        (errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (nf - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(OutageEstimate::new(
        T::lit(mean),
        Method::MonteCarlo,
        T::lit(2.0 * spread / nf.sqrt()),
        false,
    ))
}

/// Kolmogorov–Smirnov distance between the samples and the analytic CDF,
/// checked on both sides of every sample.
pub fn ks_statistic<T: Real>(d: &EmpiricalDistribution<T>, p: &SinrParams<T>) -> Result<T> {
    let count = d.count();
    if count < 10 {
        return Err(domain(format!("KS statistic needs at least 10 samples, got {count}")));
    }
    let nf = T::from_usize(count).unwrap();
    let mut worst = T::zero();
    for (i, &z) in d.samples.iter().enumerate() {
        let f = if z.is_infinite() {
            T::one()
        } else {
            p.cdf_unchecked(z.max(T::zero()))
        };
        let above = T::from_usize(i + 1).unwrap() / nf - f;
        let below = f - T::from_usize(i).unwrap() / nf;
        worst = worst.max(above).max(below);
    }
    Ok(worst)
}

/// Asymptotic 95% critical value of the one-sample KS statistic.
pub fn ks_critical_value<T: Real>(count: usize) -> T {
    T::lit(1.36) / T::from_usize(count).unwrap().sqrt()
}

/// Writes one sample per line.
pub fn write_samples<T: Real, W: Write>(d: &EmpiricalDistribution<T>, mut out: W) -> std::io::Result<()> {
    for z in &d.samples {
        writeln!(out, "{z:e}")?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_adaptive;

    fn link(alpha: f64, lambda: f64, eta: f64) -> SinrParams<f64> {
        SinrParams::new(alpha, lambda, 1.0, 1.0, 1.0, eta).unwrap()
    }

    #[test]
    fn noise_only_field_is_exponential() {
        let cfg = FieldConfig::new(link(4.0, 0.0, 1.0), 1, SeedSpec::new(3, 0)).unwrap();
        let mut a = RandomStream::for_block(cfg.seed(), 0);
        let mut b = RandomStream::for_block(cfg.seed(), 0);
        let z = realize_field(&cfg, &mut a);
        let h0: f64 = Exp1.sample(&mut b);
        assert_eq!(z, h0);
    }

    #[test]
    fn realization_is_deterministic() {
        let cfg = FieldConfig::new(link(4.0, 0.01, 0.0), 1, SeedSpec::new(9, 1)).unwrap();
        let z1 = realize_field(&cfg, &mut RandomStream::for_block(cfg.seed(), 5));
        let z2 = realize_field(&cfg, &mut RandomStream::for_block(cfg.seed(), 5));
        assert_eq!(z1.to_bits(), z2.to_bits());
    }

    #[test]
    fn empty_field_without_noise_is_infinite() {
        let cfg = FieldConfig::new(link(4.0, 0.0, 0.0), 1, SeedSpec::default()).unwrap();
        assert!(realize_field(&cfg, &mut RandomStream::new(cfg.seed())).is_infinite());
    }

    #[test]
    fn radius_policy_meets_its_tolerance() {
        for far in [FarField::Truncate, FarField::MeanField] {
            for p in [link(4.0, 0.01, 0.0), link(3.0, 0.01, 0.0), link(4.0, 1e-4, 1e-3)] {
                let r = select_radius(&p, RadiusPolicy::CdfBias { tolerance: 1e-5 }, far).unwrap();
                let bound = cdf_bias_bound(&p, r, far);
                assert!(bound <= 1e-5 * (1.0 + 1e-9), "{far:?} {bound}");
                assert!(r >= 4.0);
            }
        }
        let p = link(4.0, 0.01, 0.0);
        assert_eq!(
            select_radius(&p, RadiusPolicy::Fixed(12.5), FarField::Truncate).unwrap(),
            12.5
        );
        assert!(select_radius(&p, RadiusPolicy::Fixed(-1.0), FarField::Truncate).is_err());
        assert!(FieldConfig::new(p, 0, SeedSpec::default()).is_err());
    }

    #[test]
    fn far_field_noise_matches_campbell_integral() {
        let p = SinrParams::new(3.5, 0.02, 1.5, 2.0, 0.7, 0.0).unwrap();
        let r = 10.0;
        let tail = integrate_adaptive(
            |x: f64| 0.02 * std::f64::consts::TAU * x * 2.0 * x.powf(-3.5),
            r,
            f64::INFINITY,
            1e-14,
            1e-12,
        )
        .unwrap();
        let want = tail.value * 1.5_f64.powf(3.5) / 0.7;
        assert!((far_field_noise(&p, r) / want - 1.0).abs() < 1e-9);
    }

    #[test]
    fn empirical_cdf_order_statistics() {
        let d = EmpiricalDistribution::from_samples(vec![5.0, 1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_eq!(d.samples(), &[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(empirical_cdf(&d, 0.5), 0.0);
        assert_eq!(empirical_cdf(&d, 3.0), 0.6);
        assert_eq!(empirical_cdf(&d, 9.0), 1.0);
        assert!(EmpiricalDistribution::from_samples(vec![f64::NAN]).is_err());
    }

    #[test]
    fn empirical_outage_edge_cases() {
        let c = CodeParams::<f64>::from_rate(200, 0.1).unwrap();
        let at_theta = EmpiricalDistribution::from_samples(vec![c.theta(); 16]).unwrap();
        let e = empirical_outage(&at_theta, &c).unwrap();
        assert_eq!(e.value, 0.5);
        assert_eq!(e.error_bound, 0.0);
        assert_eq!(e.method, Method::MonteCarlo);
        let huge = EmpiricalDistribution::from_samples(vec![f64::INFINITY, 1e12, 1e9]).unwrap();
        assert_eq!(empirical_outage(&huge, &c).unwrap().value, 0.0);
        let empty = EmpiricalDistribution::<f64>::from_samples(vec![]).unwrap();
        assert!(empirical_outage(&empty, &c).is_err());
    }

    #[test]
    fn ks_needs_ten_samples() {
        let d = EmpiricalDistribution::from_samples(vec![1.0; 9]).unwrap();
        assert!(ks_statistic(&d, &link(4.0, 0.01, 0.0)).is_err());
    }

    #[test]
    fn ks_of_point_mass() {
        // all mass at the median: distance 1/2 from the continuous law
        let p = link(4.0, 0.0, 1.0);
        let median = std::f64::consts::LN_2;
        let d = EmpiricalDistribution::from_samples(vec![median; 100]).unwrap();
        let ks = ks_statistic(&d, &p).unwrap();
        assert!((ks - 0.5).abs() < 1e-12);
    }

    #[test]
    fn inverse_transform_matches_law() {
        let p = link(4.0, 0.01, 0.001);
        let d = inverse_transform_samples(&p, 20_000, SeedSpec::new(1, 2)).unwrap();
        assert!(ks_statistic(&d, &p).unwrap() < ks_critical_value::<f64>(20_000));
    }

    #[test]
    fn small_run_is_thread_count_invariant() {
        let cfg = FieldConfig::new(link(4.0, 0.01, 0.0), 5000, SeedSpec::new(4, 4)).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = one.install(|| collect_samples(&cfg));
        let b = three.install(|| collect_samples(&cfg));
        assert!(a
            .samples()
            .iter()
            .zip(b.samples())
            .all(|(x, y)| x.to_bits() == y.to_bits()));
        assert_eq!(a.count(), 5000);
    }

    #[test]
    fn dump_is_one_value_per_line() {
        let d = EmpiricalDistribution::from_samples(vec![0.25, 1.5]).unwrap();
        let mut buf = Vec::new();
        write_samples(&d, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let parsed: Vec<f64> = text.lines().map(|l| l.parse().unwrap()).collect();
        assert_eq!(parsed, vec![0.25, 1.5]);
    }
}
