//! Named sweeps behind the `figure` subcommand.
//!
//! Only values printed with a figure are pinned. Values a figure leaves
//! open are listed in `required` and must come from the caller. The density
//! axis defaults to 30 log-spaced points over `[1e-5, 1e-1]`.

use fbl_core::outage::Method;

use crate::error::{usage, Result};
use crate::params::{Axis, Grid, Param, Scenario};
use crate::spec::{ChartSpec, MethodSel, Series, SweepSpec};

pub const FIGURE_IDS: [&str; 10] = [
    "fig2", "fig4", "fig5", "fig6", "fig7", "fig8a", "fig8b", "fig9a", "fig9b", "fig10",
];

fn lambda_axis() -> Axis {
    Axis {
        param: Param::Lambda,
        grid: Grid::Log {
            start: 1e-5,
            stop: 1e-1,
            count: 30,
        },
    }
}

fn n_axis() -> Axis {
    Axis {
        param: Param::N,
        grid: Grid::Lin {
            start: 100.0,
            stop: 1000.0,
            count: 19,
        },
    }
}

fn dsa(label: &str) -> Series {
    Series::new(label, Scenario::DynamicSpectrumAccess).with(Param::D, 1.0)
}

fn micro(label: &str) -> Series {
    Series::new(label, Scenario::MicroOperator).with(Param::D, 1.0)
}

fn fixed(m: Method) -> MethodSel {
    MethodSel::Fixed(m)
}

fn chart(x: &str, y: &[&str], along: Param, x_log: bool, y_log: bool, title: &str) -> Option<ChartSpec> {
    Some(ChartSpec {
        x: x.into(),
        y: y.iter().map(|s| (*s).to_owned()).collect(),
        along: Some(along),
        x_log,
        y_log,
        title: title.into(),
    })
}

/// Spec for one figure id. Unknown ids are usage errors.
pub fn figure_preset(id: &str) -> Result<SweepSpec> {
    let ss4 = fixed(Method::ClosedFormSsAlpha4);
    let uo = fixed(Method::ClosedFormMicroOp);
    let spec = match id {
        "fig2" => {
            let mut s = SweepSpec::new(id, vec![dsa("dsa")]);
            s.axes = vec![lambda_axis()];
            s.methods = vec![ss4];
            s.required = vec![Param::WP, Param::WS, Param::N, Param::R];
            s.chart = chart(
                "lambda",
                &["eps_closed_ss_a4"],
                Param::Lambda,
                true,
                true,
                "outage vs density and rate",
            );
            s
        }
        "fig4" => {
            let mut s = SweepSpec::new(id, vec![dsa("dsa").with(Param::N, 200.0).with(Param::R, 0.1)]);
            s.axes = vec![lambda_axis()];
            s.methods = vec![ss4];
            s.required = vec![Param::WP, Param::WS];
            s.chart = chart(
                "lambda",
                &["eps_closed_ss_a4"],
                Param::Lambda,
                true,
                true,
                "outage vs density, transmit powers",
            );
            s
        }
        "fig5" => {
            let mut s = SweepSpec::new(id, vec![micro("uo").with(Param::N, 200.0).with(Param::R, 0.1)]);
            s.axes = vec![lambda_axis()];
            s.methods = vec![uo];
            s.required = vec![Param::Eta];
            s.chart = chart(
                "lambda",
                &["eps_closed_uo"],
                Param::Lambda,
                true,
                true,
                "outage vs density, noise levels",
            );
            s
        }
        "fig6" => {
            let mut s = SweepSpec::new(id, vec![dsa("dsa").with(Param::N, 500.0).with(Param::R, 0.1)]);
            s.axes = vec![lambda_axis()];
            s.methods = vec![fixed(Method::ExactQuadrature), fixed(Method::Linearized), ss4];
            s.required = vec![Param::WP, Param::WS];
            s.chart = chart(
                "lambda",
                &["eps_exact", "eps_linearized", "eps_closed_ss_a4"],
                Param::Lambda,
                true,
                true,
                "approximation accuracy, interference limited",
            );
            s
        }
        "fig7" => {
            let mut s = SweepSpec::new(
                id,
                vec![micro("uo")
                    .with(Param::N, 500.0)
                    .with(Param::R, 0.1)
                    .with(Param::WP, 1.0)
                    .with(Param::WS, 1.0)],
            );
            s.axes = vec![lambda_axis()];
            s.methods = vec![fixed(Method::ExactQuadrature), fixed(Method::Linearized), uo];
            s.chart = chart(
                "lambda",
                &["eps_exact", "eps_linearized", "eps_closed_uo"],
                Param::Lambda,
                true,
                true,
                "approximation accuracy, micro-operator",
            );
            s
        }
        "fig8a" => {
            let mut s = SweepSpec::new(id, vec![dsa("dsa").with(Param::N, 200.0).with(Param::R, 0.1)]);
            s.axes = vec![lambda_axis()];
            s.methods = vec![ss4];
            s.required = vec![Param::WP, Param::WS];
            s.chart = chart(
                "eps_closed_ss_a4",
                &["lambda"],
                Param::Lambda,
                true,
                true,
                "density vs outage",
            );
            s
        }
        "fig8b" => {
            let mut s = SweepSpec::new(
                id,
                vec![micro("uo")
                    .with(Param::N, 200.0)
                    .with(Param::R, 0.1)
                    .with(Param::WP, 1.0)
                    .with(Param::WS, 1.0)],
            );
            s.axes = vec![lambda_axis()];
            s.methods = vec![uo];
            s.chart = chart(
                "eps_closed_uo",
                &["lambda"],
                Param::Lambda,
                true,
                true,
                "density vs outage",
            );
            s
        }
        "fig9a" => {
            let mut s = SweepSpec::new(
                id,
                vec![dsa("dsa")
                    .with(Param::Lambda, 1e-2)
                    .with(Param::WP, 1.4)
                    .with(Param::WS, 1.0)
                    .with(Param::K, 20.0)],
            );
            s.axes = vec![n_axis()];
            s.methods = vec![ss4];
            s.chart = chart(
                "eps_closed_ss_a4",
                &["n"],
                Param::N,
                true,
                false,
                "blocklength vs outage",
            );
            s
        }
        "fig9b" => {
            let mut s = SweepSpec::new(
                id,
                vec![micro("uo")
                    .with(Param::Lambda, 1e-4)
                    .with(Param::WP, 1.0)
                    .with(Param::WS, 1.0)
                    .with(Param::Eta, 1e-3)
                    .with(Param::K, 20.0)],
            );
            s.axes = vec![n_axis()];
            s.methods = vec![uo];
            s.chart = chart("eps_closed_uo", &["n"], Param::N, true, false, "blocklength vs outage");
            s
        }
        "fig10" => {
            let series = [1.0, 2.0]
                .into_iter()
                .flat_map(|m| {
                    [
                        dsa(&format!("dsa_m{m}")).with(Param::WP, 1.4).with(Param::WS, 1.0),
                        micro(&format!("uo_m{m}"))
                            .with(Param::WP, 1.0)
                            .with(Param::WS, 1.0)
                            .with(Param::Eta, 1e-3),
                    ]
                    .map(|s| s.with(Param::M, m).with(Param::N, 200.0).with(Param::R, 0.1))
                })
                .collect();
            let mut s = SweepSpec::new(id, series);
            s.axes = vec![lambda_axis()];
            s.methods = vec![MethodSel::Auto];
            s.delay = true;
            s.chart = chart(
                "lambda",
                &["arq_outage"],
                Param::Lambda,
                true,
                true,
                "outage after m attempts",
            );
            s
        }
        other => {
            return Err(usage(format!(
                "unknown figure '{other}'; expected one of {}",
                FIGURE_IDS.join(", ")
            )))
        }
    };
    Ok(spec)
}
