//! Young functions, Luxemburg norms, moduli of continuity, Dini integrals,
//! bump norms and Morrey weights.

mod bump;
mod gauge;
mod luxemburg;
mod modulus;
mod morrey_weight;

pub use bump::bump_norm;
pub use gauge::{conjugate, inverse, Composed, Conjugate, Gauge, YoungFunction, YoungSpec};
pub use luxemburg::{luxemburg_mean_norm, luxemburg_raw_norm, luxemburg_solve};
pub use modulus::{dini_integral, tail_divergent, ModulusOmega, ModulusSpec, TailIntegral};
pub use morrey_weight::{MorreySpec, MorreyWeight};

pub(crate) use luxemburg::{norm_fast, raw_norm_region};
