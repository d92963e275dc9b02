//! Finite-dimensional realizations of Kolmogorov decompositions of
//! positive-definite kernels, the intertwining operators they induce, frame
//! dilations, and the cycle-based dilation of non-orthogonal wavelet frames.

pub mod dilation;
pub mod error;
pub mod filters;
pub mod frames;
pub mod kernel;
pub mod numlin;
pub mod structured_reps;

pub use error::{Error, Result};
pub use numlin::{ComplexMatrix, C64};
