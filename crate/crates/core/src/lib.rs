//! Polymatroid and matroid workbench.
//!
//! Rank functions live on ground sets of at most 20 labelled elements and are
//! stored densely, one value per subset. Integer ranks (`i64`) are exact;
//! float ranks (`f64`) carry explicit tolerances on every decision.
//!
//! * [`polymatroid`]: validation, duality, tightening, factors, extensions
//! * [`entropy`]: joint distributions and entropy vectors
//! * [`inequalities`]: information expressions and the MMRV inequality
//! * [`matroid`]: circuits and circuit connectivity
//! * [`expansion`]: Helgason expansion as a lazy rank oracle
//! * [`secret_sharing`]: access structures, matroid ports, realization
//! * [`reproduce`]: the five-variable counterexample pipeline
//!
//! With the default `parallel` feature, subset sweeps run on rayon; see [`par::Strategy`].

pub mod entropy;
pub mod error;
pub mod expansion;
pub mod ground;
pub mod inequalities;
pub mod matroid;
pub mod par;
pub mod polymatroid;
pub mod rank;
pub mod reproduce;
pub mod secret_sharing;

pub use entropy::{EntropyVector, JointDistribution, Row};
pub use error::{Error, Result};
pub use expansion::{helgason_expand, BlockCounts, ExpandedMatroid};
pub use ground::{GroundSet, SubsetMask};
pub use inequalities::{mmrv, mmrv_identity_residual, mmrv_with_roles, InfoExpression, InfoTerm, Roles};
pub use matroid::{is_matroid, Matroid};
pub use par::Strategy;
pub use polymatroid::{basis_r, linear_combine, round_to_integer, FactorMap, Polymatroid};
pub use rank::{AnyRankVector, Mode, Rank, RankVector, SetFunction};
pub use secret_sharing::{AccessStructure, ExplicitStructure, ParticipantSet};
