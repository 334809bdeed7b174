//! Iterated integrals of `dx/(x − p_a)` along piecewise paths, as truncated
//! noncommutative series, and their pairing with the fundamental group of
//! the twice-punctured line.

pub mod group;
pub mod path;
pub mod regularize;
pub mod series;
pub mod transport;
pub mod verify;

pub use group::{GroupRingElement, GroupWord};
pub use path::{pt, Path, Piece, Point};
pub use regularize::{transport_regularized, transport_regularized_with, Regularized};
pub use series::NCSeries;
pub use transport::{transport, transport_with, Poles};
pub use verify::{
    extension_class_check, pair, pair_sandwich, run_proposition, verify_half_integrality, verify_product_formula,
    verify_vanishing_on_i, Sandwich,
};
