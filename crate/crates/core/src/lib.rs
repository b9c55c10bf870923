//! Solver for the minimum submodular cost partial multi-cover problem.
//!
//! Sets carry a submodular cost on sub-collections, elements carry a
//! covering requirement and a profit, and the goal is a cheapest
//! sub-collection whose fully covered elements reach a `q` fraction of the
//! total profit. The pipeline reformulates the problem over `r_e`-covers,
//! solves the Lovász-extension relaxation by cutting planes and rounds it in
//! two phases. Brute-force oracles for small instances live in [`exact`].

pub mod instance;
pub mod lovasz;
pub mod cli;
pub mod covers;
pub mod exact;
pub mod lp;
pub mod num;
pub mod oracle;
pub mod relax;
pub mod rounding;
pub mod scpsc;

pub use instance::{Instance, InstanceError, Problem};
pub use num::{Rational, Scalar};
pub use oracle::{CostOracle, CostValue};
