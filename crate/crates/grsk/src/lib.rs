//! Geometric RSK correspondence as compositions of local moves, with its
//! symmetric, triangular and tropical variants, Whittaker-function numerics
//! and Monte Carlo checks of the induced polymer laws.

pub mod error;
pub mod exact_numerics;
pub mod grsk_core;
pub mod grsk_symmetric;
pub mod grsk_triangular;
pub mod io;
pub mod polymer_mc;
pub mod quadrature;
pub mod tropical_rsk;
pub mod whittaker_eval;

pub use error::{GrskError, Result};
pub use exact_numerics::{DualRational, PosRational, Scalar};
pub use grsk_core::{Pattern, PatternPair, WeightMatrix};
pub use grsk_symmetric::SymmetricWeightMatrix;
pub use grsk_triangular::TriangularArray;
