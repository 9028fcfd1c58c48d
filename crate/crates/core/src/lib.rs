//! Finite combinatorics of block sequences and variable words: the
//! partial semigroups `FIN_k` / `FIN_±k`, variable words over graded
//! alphabets, the encodings between them, and bounded Ramsey searches.

pub mod distance;
pub mod encoding;
pub mod error;
pub mod json;
pub mod net;
pub mod search;
pub mod selftest;
pub mod vector;
pub mod word;

pub use distance::Distance;
pub use error::{Error, Result};
pub use vector::Mode;
