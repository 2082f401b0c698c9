//! Dense `f64` kernels with exact gradients.

pub mod gradcheck;
pub mod gru;
pub mod ops;
pub mod optim;
pub mod params;
pub mod tensor;

pub use gradcheck::{grad_check, GRAD_CHECK_EPS};
pub use gru::{gru_step, gru_step_backward, GruCache, GruParams};
pub use ops::{affine, affine_backward, max_pool, max_pool_backward, sigmoid, softmax, softmax_xent, Pooled};
pub use optim::Adam;
pub use params::{ParamSet, Params};
pub use tensor::Tensor;
