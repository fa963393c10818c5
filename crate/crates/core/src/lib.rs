//! Exact machinery for studying how well small-rank matrices over F_p can
//! approximate sign matrices: finite-field and cyclotomic arithmetic, dense
//! matrix generators (Kronecker powers, Majority powers, Walsh-Hadamard and
//! Hamming-distance matrices), an exact lift of F_p low-rank decompositions
//! to bounded-entry complex ones, spectral lower-bound evaluators, exact
//! brute-force rigidity solvers, and the two hardness-amplification
//! constructions with their exact error formulas.
//!
//! Feature `parallel` (default) runs the data-parallel inner loops on
//! rayon; results are bit-identical with the sequential fallback.

pub mod amplify;
pub mod cyclo;
pub mod error;
mod exec;
pub mod fp;
pub mod io;
pub mod lift;
pub mod matrix;
pub mod rigidity;
pub mod spectral;

pub use error::{Error, Result};
