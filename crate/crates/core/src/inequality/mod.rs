//! Empirical checks of weighted Sobolev, trace, Hardy and chain-rule inequalities on radial functions.

mod case;
mod estimate;
mod family;
mod suite;

pub use case::{ChainFunction, InequalityCase, Ratio};
pub use estimate::{
    boundary_violation_sweep, check_chain_rule, estimate_best_constant, evaluate_family, ConstantEstimate,
    MemberRatio, SweepBase, SweepReport, SweepRow,
};
pub use family::{FamilyKind, Member, TestFamily};
pub use suite::{boundary_plans, spreading_orbit, standard_cases, SweepPlan};
