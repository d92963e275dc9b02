//! Representations carried by structured kernels: GNS for matrix algebras,
//! unitary representations of finite groups, and Gabor unitary pairs.

pub mod gabor;
pub mod gns;
pub mod group;

pub use gabor::{gabor_from_kernel, gabor_intertwiner, kernel_from_gabor, GaborSystem};
pub use gns::{gns_construct, GnsRep, StateFunctional};
pub use group::{
    check_group_kernel, group_intertwiner, group_representation, positive_type_function, FiniteGroup, GroupRep,
};
