//! Finite-dimensional operator-algebra toolkit for EPR states and beable
//! subalgebras.
//!
//! Everything lives inside a full matrix algebra `M_n`: observables are
//! Hermitian matrices, subalgebras are unital *-closed spans of matrices, and
//! states are density matrices. On top of that foundation the crate builds
//! EPR-correlated states for incommensurable pairs of observables, decides
//! classicality of a state on a subalgebra, checks the beable conditions of a
//! measurement context and reproduces the exclusion results, including a
//! clock-and-shift stand-in for position and momentum.
//!
//! The guide in `book/` walks through each layer; its code listings are
//! compiled and run as doctests of this crate.

pub mod algebra;
pub mod beable;
pub mod classical;
pub mod epr;
pub mod error;
pub mod gns;
pub mod matrix;
pub mod nnls;
pub mod random;
pub mod report;
pub mod spectral;
pub mod state;
pub mod svd;
pub mod tolerance;
pub mod weyl;
pub mod witness;

pub use algebra::{commutant, generate_algebra, StarAlgebra};
pub use error::{Error, Result};
pub use matrix::{Operator, Vector, C64};
pub use report::{emit_report, list_builtin_scenarios, run_scenario, Report, ReportFormat, ScenarioConfig};
pub use tolerance::ToleranceConfig;

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/algebras.md")]
    pub struct Algebras;
    #[doc = include_str!("../../../book/src/classicality.md")]
    pub struct Classicality;
    #[doc = include_str!("../../../book/src/epr.md")]
    pub struct Epr;
    #[doc = include_str!("../../../book/src/witness.md")]
    pub struct Witness;
    #[doc = include_str!("../../../book/src/exclusion.md")]
    pub struct Exclusion;
    #[doc = include_str!("../../../book/src/weyl.md")]
    pub struct Weyl;
    #[doc = include_str!("../../../book/src/scenarios.md")]
    pub struct Scenarios;
}
