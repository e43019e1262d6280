//! Medians, sharp medians, local sharp maximal functions and Orlicz fractional
//! maximal functions.

mod functions;
mod median;

pub use functions::{fractional_average, fractional_maximal, lemma41_rhs, local_sharp_maximal, resample, sup_inf_maximal, Maximal};
pub use median::{median, median_sorted, sharp_level, sharp_median, sharp_median_plugin, sharp_median_sorted};
