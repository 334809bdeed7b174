//! Multiple zeta values: word combinatorics, dimension counts, iterated
//! integrals along paths, numerical evaluation, relation spaces and a
//! purity complex.

pub mod chen;
pub mod dims;
pub mod error;
pub mod intrel;
pub mod evaluator;
pub mod linalg;
pub mod prec;
pub mod purity;
pub mod relations;
pub mod words;

pub use error::{MzvError, Result};
pub use prec::{PrecComplex, PrecReal};
pub use words::{Index, Word, WordCombination};
