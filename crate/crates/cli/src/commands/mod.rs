pub mod filters;
pub mod kernels;
