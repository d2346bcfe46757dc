//! Compile Bayesian network classifiers into ordered decision diagrams and
//! explain individual decisions symbolically.
//!
//! * [`dd`]: hash-consed ordered decision diagrams and their tractable queries.
//! * [`classifier`]: naive Bayes and latent-tree classifiers, exact posteriors,
//!   threshold decisions and brute-force decision tables.
//! * [`compiler`]: classifier → decision diagram compilation.
//! * [`explain`]: minimum-cardinality and prime-implicant explanations.
//! * [`monotone`]: monotonicity checks on compiled decision functions.
//! * [`io`]: classifier and diagram file formats, CSV training input.

pub mod classifier;
pub mod cli;
pub mod compiler;
pub mod dd;
pub mod error;
pub mod explain;
pub mod io;
pub mod monotone;

pub use error::{Error, Result};
