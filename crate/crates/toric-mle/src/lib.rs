//! Maximum likelihood estimation on scaled toric models.
//!
//! A discrete exponential family is the image of a monomial map
//! `p_j = c_j * theta^{a_j}` determined by an integer exponent matrix and a
//! vector of scaling constants. This crate solves the likelihood equations
//! of such models two ways and computes exact ML degrees for the families
//! where closed formulas exist:
//!
//! - [`ips`]: generalized iterative proportional scaling, converging to the
//!   unique positive MLE guaranteed by Birch's theorem;
//! - [`homotopy`]: a predictor-corrector tracker for the straight-line
//!   homotopy between two scalings of the same model, carrying the MLE of
//!   an easy scaling (often ML degree one) to the MLE of the target;
//! - [`families`]: constructors for rational normal scrolls, Veronese and
//!   Segre embeddings, and hierarchical log-linear models, together with
//!   exact root-counting ML degrees and discriminant membership tests;
//! - [`mod@bench`]: the IPS-versus-homotopy timing harness.
//!
//! The guide in `book/` walks through the concepts chapter by chapter; its
//! code listings are compiled and run as part of `cargo test`.

pub mod bench;
pub mod error;
pub mod exact;
pub mod families;
pub mod fixtures;
pub mod homotopy;
pub mod io;
pub mod ips;
pub mod model;
pub mod poly;

pub use error::{Error, Result};
pub use model::{
    birch_residual, log_likelihood, sufficient_statistics, DataVector, LikelihoodSystem, MleResult,
    ProbabilityVector, ThetaPoint, ToricModel,
};

// Run every code listing in the guide as a doctest so the book cannot drift
// out of sync with the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/ips.md")]
    mod ips {}
    #[doc = include_str!("../../../book/src/homotopy.md")]
    mod homotopy {}
    #[doc = include_str!("../../../book/src/ml-degrees.md")]
    mod ml_degrees {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
