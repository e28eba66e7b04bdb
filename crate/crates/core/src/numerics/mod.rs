//! Numerical kernels shared by the analytic modules.

mod quadrature;
mod rng;
mod roots;
mod special;

pub use quadrature::{integrate_adaptive, integrate_with, QuadratureOptions, QuadratureResult};
pub use rng::{RandomStream, SeedSpec};
pub use roots::find_root;
pub use special::{erf, erfc, erfcx, gamma, gamma_between, gamma_lower, gamma_upper, ln_gamma, q_function};

pub(crate) use special::{erfcx_unchecked, q_unchecked, scaled_erfc_deficit};
