//! Filters on the circle, transfer operators, cycles and cascade
//! approximations of scaling functions and wavelets.

pub mod cascade;
pub mod cycles;
pub mod poly;
pub mod transfer;

pub use cascade::*;
pub use cycles::*;
pub use poly::*;
pub use transfer::*;
