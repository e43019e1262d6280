//! Fractional integral operators by quadrature, kernel diagnostics and the
//! coefficient sequences `lambda_m`.

mod apply;
mod kernel;
mod lambda;

pub use apply::{apply_kernel, apply_spec};
pub use kernel::{Coefficient, Dini, Homogeneous, Kernel, KernelSpec, Riesz, SphereFunction, PRODUCT_SUBCELLS, SINGULAR_DEPTH};
pub use lambda::{
    default_c_n, hormander_lambda, hormander_lambda_spec, kernel_smoothness_ratio, omega_lambda, smoothness_samples,
    LambdaSequence, LambdaSource, SmoothnessSample, MAX_PAIRS,
};
