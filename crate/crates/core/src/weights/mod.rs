//! Weight diagnostics: condition F, Muckenhoupt-type constants and two-weight
//! bump conditions.

mod condition_f;
mod muckenhoupt;

pub use condition_f::{best_subset, condition_f_constant, ConditionF, ConditionFParams, FWitness};
pub use muckenhoupt::{ainfty_constant, ap_constant, bump_condition, bump_value, BumpExponents, CubeSup};
