//! Homomorphism densities of graphs in step kernels, and numerical tools
//! around (weakly) norming graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: small simple graphs, components, isomorphism, subgraphs.
//! * [`kernel`]: symmetric step kernels on finite partitions of a
//!   probability space, Dirac mixtures and the block-random model.
//! * [`density`]: exact evaluation of `t(H, W)` and of decorated densities
//!   by variable elimination, with a brute-force oracle and an exact
//!   rational evaluator.
//! * [`norming`]: Hölder-type checks, structural necessary conditions and
//!   re-validatable certificates refuting the (weakly/semi) norming property.
//! * [`moduli`]: Monte-Carlo witnesses for the moduli of convexity and
//!   smoothness of `‖·‖_{r(H)}` and the `ℓ^m` embedding identity.
//! * [`cli`]: the command-line surface used by the `graphnorm` binary.

pub mod cli;
pub mod density;
pub mod error;
pub mod graph;
pub mod kernel;
pub mod moduli;
pub mod norming;
pub mod seeds;

pub use density::{
    decorated_density, density, density_bruteforce, elimination_plan, norm_h, norm_rh,
    Decoration, EliminationPlan,
};
pub use error::{Error, Result};
pub use graph::Graph;
pub use kernel::{DiracMixture, StepKernel};
