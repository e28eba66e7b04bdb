//! Acceptance gate. Prints one line per criterion and exits non-zero when
//! any of them fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use fbl_core::harq::{arq_outage, worst_case_delay};
use fbl_core::numerics::integrate_adaptive;
use fbl_core::outage::{
    approximation_error, conditional_error, linearized_kernel, outage_closed_micro_op, outage_closed_ss,
    outage_closed_ss_alpha4, outage_exact, outage_linearized,
};
use fbl_core::spatial::{collect_samples, empirical_outage, ks_critical_value, ks_statistic};
use fbl_core::{ArqConfig, CodeParams, FieldConfig, OutageEstimate, RandomStream, SeedSpec, SinrParams};
use fbl_sweep::output::csv_string;
use fbl_sweep::params::Param;
use fbl_sweep::presets::FIGURE_IDS;
use fbl_sweep::{figure_preset, run_sweep};

type Estimator = fn(&SinrParams<f64>, &CodeParams<f64>) -> fbl_core::Result<OutageEstimate<f64>>;

/// Id, time limit, check.
type Criterion = (u32, Duration, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn link(alpha: f64, lambda: f64, ratio: f64, eta: f64) -> SinrParams<f64> {
    SinrParams::new(alpha, lambda, 1.0, ratio, 1.0, eta).unwrap()
}

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..count)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
        .collect()
}

fn uniform(rng: &mut RandomStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.next_uniform()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

fn criterion_1() -> Outcome {
    let p = link(4.0, 1e-2, 1.0, 0.0);
    let kappa = (p.kappa() - PI / 2.0).abs();
    let zeta = (p.zeta() - PI * PI / 2.0).abs();
    let mut rng = RandomStream::new(SeedSpec::new(1, 0));
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = 1 + (rng.next_uniform() * 5000.0) as u64;
        let r = uniform(&mut rng, 0.01, 4.0);
        let c = CodeParams::from_rate(n, r).unwrap();
        worst = worst.max((c.upsilon() - c.rho() - (2.0 * PI).sqrt() / c.beta()).abs());
    }
    let pass = kappa <= 1e-12 && zeta <= 1e-12 && worst <= 1e-12;
    check(
        pass,
        format!("|kappa-pi/2|={kappa:.1e} |zeta-pi^2/2|={zeta:.1e} window identity max err={worst:.1e} over 100 pairs"),
    )
}

fn criterion_2() -> Outcome {
    let mut tuples = 0;
    let mut worst_mass = 0.0f64;
    let mut worst_fd = 0.0f64;
    for alpha in [2.5, 3.0, 4.0, 5.0] {
        for lambda in [0.0, 1e-4, 1e-2, 1.0] {
            for eta in [0.0, 1e-3, 1.0] {
                if lambda == 0.0 && eta == 0.0 {
                    continue;
                }
                tuples += 1;
                let p = link(alpha, lambda, 1.0, eta);
                let mass = integrate_adaptive(|z: f64| p.pdf(z).unwrap(), 0.0, f64::INFINITY, 1e-12, 1e-11)
                    .unwrap()
                    .value;
                worst_mass = worst_mass.max((mass - 1.0).abs());
                for u in [0.01, 0.1, 0.5, 0.9, 0.99] {
                    let z = p.quantile(u).unwrap();
                    let h = 1e-5 * z;
                    let fd = (p.cdf(z + h).unwrap() - p.cdf(z - h).unwrap()) / (2.0 * h);
                    let pdf = p.pdf(z).unwrap();
                    worst_fd = worst_fd.max((fd - pdf).abs() / pdf);
                }
            }
        }
    }
    let pass = tuples >= 20 && worst_mass <= 1e-8 && worst_fd <= 1e-6;
    check(
        pass,
        format!("{tuples} tuples: max |mass-1|={worst_mass:.1e} max rel |pdf-dF|={worst_fd:.1e}"),
    )
}

fn criterion_3() -> Outcome {
    const SAMPLES: usize = 100_000;
    const SEED: u64 = 20_240_601;
    // (alpha, lambda, W_p/W_s, xi); d = W_s = 1 so xi = eta
    let tuples = [
        (4.0, 1e-2, 1.0, 0.0),
        (4.0, 1e-4, 1.0, 1e-3),
        (3.0, 1e-2, 1.0, 0.0),
        (5.0, 1e-3, 1.0, 1e-2),
        (2.5, 1e-1, 2.0, 1.0),
    ];
    let critical = ks_critical_value::<f64>(SAMPLES);
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, &(alpha, lambda, ratio, xi)) in tuples.iter().enumerate() {
        let p = link(alpha, lambda, ratio, xi);
        let cfg = FieldConfig::new(p, SAMPLES, SeedSpec::new(SEED, i as u64)).unwrap();
        let ks = ks_statistic(&collect_samples(&cfg), &p).unwrap();
        pass &= ks < critical;
        parts.push(format!("{ks:.4}"));
    }
    // doubled density simulated, compared against the nominal law
    let nominal = link(4.0, 1e-2, 1.0, 0.0);
    let doubled = nominal.with_lambda(2e-2).unwrap();
    let cfg = FieldConfig::new(doubled, SAMPLES, SeedSpec::new(SEED, 99)).unwrap();
    let control = ks_statistic(&collect_samples(&cfg), &nominal).unwrap();
    pass &= control > critical;
    check(
        pass,
        format!(
            "KS [{}] < {critical:.4}; doubled-lambda control {control:.4} > bound",
            parts.join(", ")
        ),
    )
}

fn criterion_4() -> Outcome {
    const SAMPLES: usize = 1_000_000;
    const SEED: u64 = 4_004;
    let c = CodeParams::from_rate(500, 0.1).unwrap();
    let lambdas = log_grid(1e-5, 1e-1, 30);
    let mut mc_failures = Vec::new();
    let mut deltas = Vec::new();
    let mut worst_closed = 0.0f64;
    for (s, eta) in [0.0, 1e-3].into_iter().enumerate() {
        for (i, &lambda) in lambdas.iter().enumerate() {
            let p = link(4.0, lambda, 1.0, eta);
            let exact = outage_exact(&p, &c).unwrap();
            let lin = outage_linearized(&p, &c).unwrap();
            deltas.push(approximation_error(&exact, &lin).unwrap());

            let closed: Vec<OutageEstimate<f64>> = if eta == 0.0 {
                vec![
                    outage_closed_ss(&p, &c).unwrap(),
                    outage_closed_ss_alpha4(&p, &c).unwrap(),
                ]
            } else {
                vec![outage_closed_micro_op(&p, &c).unwrap()]
            };
            for e in closed {
                worst_closed = worst_closed.max((e.value - lin.value).abs());
            }

            let seed = SeedSpec::new(SEED, (s * 100 + i) as u64);
            let mc = empirical_outage(&collect_samples(&FieldConfig::new(p, SAMPLES, seed).unwrap()), &c).unwrap();
            if (mc.value - exact.value).abs() > 2.0 * mc.error_bound {
                mc_failures.push(format!("lambda={lambda:.2e} eta={eta}"));
            }
        }
    }
    let max_delta = deltas.iter().cloned().fold(0.0, f64::max);
    let med_delta = median(deltas);
    let mc_ok = mc_failures.is_empty();
    let max_ok = max_delta <= 0.04;
    let med_ok = med_delta <= 0.01;
    let closed_ok = worst_closed <= 1e-6;
    check(
        mc_ok && max_ok && med_ok && closed_ok,
        format!(
            "MC within 2 bounds {} ({} misses{}); max delta {max_delta:.4} <= 0.04 {}; median delta {med_delta:.4} <= 0.01 {}; closed vs linearized {worst_closed:.1e} <= 1e-6 {}",
            verdict(mc_ok),
            mc_failures.len(),
            if mc_ok { String::new() } else { format!(": {}", mc_failures.join("; ")) },
            verdict(max_ok),
            verdict(med_ok),
            verdict(closed_ok),
        ),
    )
}

fn criterion_5() -> Outcome {
    let c = CodeParams::from_rate(200, 0.1).unwrap();
    let uo = outage_exact(&link(4.0, 1e-4, 1.0, 1e-3), &c).unwrap().value;
    let dsa = link(4.0, 1e-2, 1.4, 0.0);
    let mut best = f64::INFINITY;
    for n in 100..=1000u64 {
        let c = CodeParams::from_rate(n, 0.1).unwrap();
        best = best.min(outage_closed_ss_alpha4(&dsa, &c).unwrap().value);
        if n % 25 == 0 {
            best = best.min(outage_exact(&dsa, &c).unwrap().value);
        }
    }
    let uo_ok = uo <= 1e-3;
    let dsa_ok = best > 1e-3;
    check(
        uo_ok && dsa_ok,
        format!(
            "micro-operator eps={uo:.3e} <= 1e-3 {}; DSA min eps over n=100..1000 {best:.3e} > 1e-3 {}",
            verdict(uo_ok),
            verdict(dsa_ok)
        ),
    )
}

/// Checks that `values` moves in one direction, allowing for the stated
/// quadrature error of neighbouring entries.
fn monotone(values: &[OutageEstimate<f64>], increasing: bool) -> bool {
    values.windows(2).all(|w| {
        let slack = w[0].error_bound + w[1].error_bound + 1e-14;
        if increasing {
            w[1].value >= w[0].value - slack
        } else {
            w[1].value <= w[0].value + slack
        }
    })
}

fn criterion_6() -> Outcome {
    const POINTS: usize = 50;
    const BASES: usize = 4;
    let mut rng = RandomStream::new(SeedSpec::new(6, 0));
    let mut ok = [true; 4];
    let names = ["lambda", "R", "W_s", "n at fixed k"];
    let methods: [Estimator; 2] = [outage_exact, outage_linearized];
    for _ in 0..BASES {
        let alpha = uniform(&mut rng, 2.5, 5.0);
        let lambda = 10f64.powf(uniform(&mut rng, -5.0, -1.0));
        let eta = if rng.next_uniform() < 0.5 {
            0.0
        } else {
            10f64.powf(uniform(&mut rng, -4.0, 0.0))
        };
        let ratio = uniform(&mut rng, 0.5, 2.0);
        let n = 100 + (rng.next_uniform() * 900.0) as u64;
        let r = uniform(&mut rng, 0.05, 0.5);
        let k = 10 + (rng.next_uniform() * 40.0) as u64;

        let mut draw = |lo: f64, hi: f64, log: bool| {
            let mut v: Vec<f64> = (0..POINTS)
                .map(|_| {
                    let u = uniform(&mut rng, lo, hi);
                    if log {
                        10f64.powf(u)
                    } else {
                        u
                    }
                })
                .collect();
            v.sort_by(f64::total_cmp);
            v
        };
        let lambdas = draw(-6.0, 0.0, true);
        let rates = draw(0.01, 2.0, false);
        let powers = draw(-1.0, 1.0, true);
        let lengths: Vec<u64> = draw(100.0, 1000.0, false).into_iter().map(|x| x as u64).collect();

        for method in methods {
            let code = CodeParams::from_rate(n, r).unwrap();
            let by_lambda: Vec<_> = lambdas
                .iter()
                .map(|&l| method(&link(alpha, l, ratio, eta), &code).unwrap())
                .collect();
            let p = link(alpha, lambda, ratio, eta);
            let by_rate: Vec<_> = rates
                .iter()
                .map(|&x| method(&p, &CodeParams::from_rate(n, x).unwrap()).unwrap())
                .collect();
            let by_power: Vec<_> = powers
                .iter()
                .map(|&w| method(&SinrParams::new(alpha, lambda, 1.0, ratio, w, eta).unwrap(), &code).unwrap())
                .collect();
            let by_length: Vec<_> = lengths
                .iter()
                .map(|&m| method(&p, &CodeParams::from_bits(m, k).unwrap()).unwrap())
                .collect();
            ok[0] &= monotone(&by_lambda, true);
            ok[1] &= monotone(&by_rate, true);
            ok[2] &= monotone(&by_power, false);
            ok[3] &= monotone(&by_length, false);
        }
    }
    let mut threshold_ok = true;
    let mut rng = RandomStream::new(SeedSpec::new(6, 1));
    for _ in 0..POINTS {
        let c = CodeParams::from_rate(10 + (rng.next_uniform() * 5000.0) as u64, uniform(&mut rng, 0.01, 4.0)).unwrap();
        threshold_ok &= conditional_error(c.theta(), &c) == 0.5 && linearized_kernel(c.theta(), &c) == 0.5;
    }
    let mut parts: Vec<String> = names
        .iter()
        .zip(ok)
        .map(|(n, o)| format!("{n} {}", verdict(o)))
        .collect();
    parts.push(format!("kernels at theta = 0.5 {}", verdict(threshold_ok)));
    check(
        ok.iter().all(|&o| o) && threshold_ok,
        format!(
            "{} bases x {POINTS} points, exact and linearized: {}",
            BASES,
            parts.join("; ")
        ),
    )
}

fn criterion_7() -> Outcome {
    // 0.1 is not a binary fraction: its square rounds to the f64 just above
    // 0.01, so exactness is checked against the rounded product and on a
    // dyadic input where the decimal and binary answers coincide
    let two = arq_outage(0.1f64, 2).unwrap();
    let dyadic = arq_outage(0.125f64, 2).unwrap();
    let ts = ArqConfig::<f64>::nr_symbol_time();
    let d1 = worst_case_delay(&ArqConfig::new(1, 0, ts).unwrap(), 200).millis();
    let d2 = worst_case_delay(&ArqConfig::new(2, 0, ts).unwrap(), 200).millis();
    let numbers_ok =
        two == 0.1 * 0.1 && (two - 0.01).abs() <= f64::EPSILON * 0.01 && dyadic == 0.015625 && d1 == 1.66 && d2 == 3.32;

    let out = run_sweep(&figure_preset("fig10").unwrap()).unwrap();
    let curve = |label: &str| -> Vec<(f64, f64)> {
        out.rows
            .iter()
            .filter(|r| r.series == label)
            .map(|r| (r.point.lambda, r.delay.unwrap().arq_outage))
            .collect()
    };
    let (dsa1, dsa2, uo1, uo2) = (curve("dsa_m1"), curve("dsa_m2"), curve("uo_m1"), curve("uo_m2"));
    let below = |a: &[(f64, f64)], b: &[(f64, f64)]| {
        a.len() == b.len() && !a.is_empty() && a.iter().zip(b).all(|(x, y)| x.0 == y.0 && x.1 < y.1)
    };
    let m2_below = below(&dsa2, &dsa1) && below(&uo2, &uo1);
    let crossing = |a: &[(f64, f64)], b: &[(f64, f64)]| -> Option<f64> {
        a.windows(2).zip(b.windows(2)).find_map(|(x, y)| {
            let before = x[0].1 - y[0].1;
            let after = x[1].1 - y[1].1;
            (before * after < 0.0).then_some(x[1].0)
        })
    };
    let cross1 = crossing(&dsa1, &uo1);
    let cross2 = crossing(&dsa2, &uo2);
    let cross_ok = cross1.is_some() && cross2.is_some();
    check(
        numbers_ok && m2_below && cross_ok,
        format!(
            "arq_outage(0.1,2)={two} arq_outage(0.125,2)={dyadic} delays {d1} ms / {d2} ms {}; m=2 below m=1 {}; DSA/uO crossing near lambda {:?} (m=1), {:?} (m=2) {}",
            verdict(numbers_ok),
            verdict(m2_below),
            cross1,
            cross2,
            verdict(cross_ok)
        ),
    )
}

fn criterion_8() -> Outcome {
    // values for the parameters presets leave to the user
    let required = |p: Param| -> Vec<f64> {
        match p {
            Param::WP => vec![1.0, 1.4],
            Param::WS => vec![1.0],
            Param::N => vec![200.0, 500.0],
            Param::R => vec![0.1, 0.5],
            Param::Eta => vec![1e-4, 1e-3, 1e-2],
            _ => vec![1.0],
        }
    };
    let mut identical = true;
    let mut rows = 0;
    for id in FIGURE_IDS {
        let mut spec = figure_preset(id).unwrap();
        for p in spec.required.clone() {
            spec.set(p, required(p));
        }
        let a = csv_string(&run_sweep(&spec).unwrap()).unwrap();
        let b = csv_string(&run_sweep(&spec).unwrap()).unwrap();
        identical &= a == b;
        rows += a.lines().count() - 1;
    }
    // a seeded simulation column on top of a preset
    let mut spec = figure_preset("fig7").unwrap();
    spec.methods.push("monte_carlo".parse().unwrap());
    spec.mc = Some(fbl_sweep::spec::McSettings {
        samples: 20_000,
        seed: 8,
        ..Default::default()
    });
    let a = csv_string(&run_sweep(&spec).unwrap()).unwrap();
    let b = csv_string(&run_sweep(&spec).unwrap()).unwrap();
    let mc_identical = a == b;

    let cfg = FieldConfig::new(link(4.0, 1e-2, 1.0, 1e-3), 100_000, SeedSpec::new(8, 1)).unwrap();
    let runs: Vec<Vec<u64>> = [1, 3, 8]
        .into_iter()
        .map(|threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| collect_samples(&cfg))
                .samples()
                .iter()
                .map(|z| z.to_bits())
                .collect()
        })
        .collect();
    let workers_ok = runs.windows(2).all(|w| w[0] == w[1]);
    check(
        identical && mc_identical && workers_ok,
        format!(
            "{} presets ({rows} rows) byte-identical {}; seeded simulation sweep {}; samples across 1/3/8 workers {}",
            FIGURE_IDS.len(),
            verdict(identical),
            verdict(mc_identical),
            verdict(workers_ok)
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        (1, Duration::from_secs(1), criterion_1),
        (2, Duration::from_secs(30), criterion_2),
        (3, Duration::from_secs(120), criterion_3),
        (4, Duration::from_secs(600), criterion_4),
        (5, Duration::from_secs(60), criterion_5),
        (6, Duration::from_secs(120), criterion_6),
        (7, Duration::from_secs(120), criterion_7),
        (8, Duration::from_secs(300), criterion_8),
    ];
    let mut failed = 0;
    let mut ran = 0;
    for (id, limit, run) in criterion_runs(&criteria) {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let pass = outcome.pass && in_time;
        ran += 1;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id}: {} | {} | {:.2} s (limit {} s){}",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { " over time" }
        );
    }
    println!("acceptance: {} of {} criteria passed", ran - failed, ran);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn criterion_runs(c: &[Criterion]) -> impl Iterator<Item = Criterion> + '_ {
    let only: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    c.iter()
        .copied()
        .filter(move |(id, _, _)| only.is_none_or(|o| o == *id))
}
