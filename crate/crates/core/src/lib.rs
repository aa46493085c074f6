//! Monotonicity testing of real-valued functions on explicitly given DAGs.
//!
//! A function `f` on a DAG is monotone when `f(u) <= f(v)` for every reachable
//! pair `u ~> v`. This crate provides the machinery to study that property at
//! desk scale:
//!
//! - [`graph`] — DAGs with cached transitive closure/reduction, bipartite
//!   scaffolds, and `C4` detection.
//! - [`monotonicity`] — violation structure, the exact distance to
//!   monotonicity (via maximum bipartite matching), and monotone extension of
//!   partial query transcripts.
//! - [`positivity`] — positive (uniquely restricted) matchings: witness
//!   synthesis by difference constraints and alternating-cycle certificates.
//! - [`pmrs`] — explicit families of edge-disjoint positive matchings built
//!   from shift vectors, refinement, and dense-core extraction.
//! - [`hard`] — samplers for the correlated-noise YES/NO distributions over a
//!   matching family, exact transcript-distribution enumeration, and
//!   bounded-range quantization.
//! - [`gibbs`] — a truncated log-concave Gibbs measure that softly plants a
//!   violated matching, with an exact single-site sampler and an adaptive
//!   query game.
//! - [`testers`] — sublinear one-sided testers driven by the transitive
//!   reduction and closure, plus bottleneck-partition diagnostics.
//!
//! The companion `book/` directory contains a narrative guide; its chapters
//! are embedded below in [`guide`] so the code snippets run as doc-tests.

pub mod error;
pub mod graph;
pub mod guide;
pub mod hard;
pub mod monotonicity;
pub mod pmrs;
pub mod positivity;
pub mod rat;
pub mod rng;
pub mod testers;

pub mod gibbs;

pub use error::{Error, Result};
pub use rat::Rat;
