//! Exact symbolic computation for the torus-fixed-point combinatorics of
//! symmetric products of projective space, the fixed-point restrictions of
//! the extended I-function, and mechanical verification of the Givental-cone
//! pole and recursion conditions.
//!
//! Everything is exact rational arithmetic; there is no floating point
//! anywhere in the crate.

pub mod combinat;
pub mod coneverify;
pub mod exactalg;
pub mod ifunction;
pub mod sectors;
pub mod symgroup;
pub mod trees;

pub use combinat::{LabelConvention, Labeling, Multipartition, OrderedZeroPartition, Partition};
pub use exactalg::{AlphaPoly, AlphaRat, LinearForm, Rat, ZPoly, ZRat};
pub use sectors::{EdgeClass, FixedSector};
