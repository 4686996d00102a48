//! Finite-algebra toolkit for nilpotent pre-Lie rings of cardinality `p^4`,
//! the braces they generate through the group of flows, and the involutive
//! set-theoretic Yang-Baxter solutions those braces carry.
//!
//! All arithmetic is exact modular arithmetic over `Z/p^e`; every advertised
//! property is verified by sweeps, not assumed.

// Coefficient kernels walk several fixed-size arrays in lockstep; indexed
// loops read closer to the formulas there than zipped iterators.
#![allow(clippy::needless_range_loop)]

pub mod brace;
pub mod error;
pub mod families;
pub mod flows;
pub mod io;
pub mod modarith;
pub mod prelie;
pub mod report;
pub mod rng;
pub mod search;
pub mod ybe;

pub use error::{Error, Result};
