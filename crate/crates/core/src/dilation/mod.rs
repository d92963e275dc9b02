//! The dilated wavelet representation built from the cycles of a low-pass
//! filter, with its scaling functions, wavelets and checks.

pub mod build;
pub mod checks;
pub mod ops;

pub use build::*;
pub use checks::*;
pub use ops::*;
