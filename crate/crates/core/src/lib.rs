//! Capacities and Choquet integration on finite spaces, layered uncertainty
//! value functions, the Ellsberg urn, and executable checks of the
//! uncertainty monad laws.

pub mod category;
pub mod choquet;
pub mod ellsberg;
pub mod error;
pub mod hierarchy;
pub mod laws;
pub mod random;
pub mod scalar;
pub mod space;
pub mod spacefile;
pub mod tower;
pub mod uncertainty;

pub use error::{Error, Result};
pub use hierarchy::{
    conditional_act, integrate_family, terminal_space, value_function, xi_chain, FamilyIntegrand,
    FamilyLevel, Level, LevelAct, USequence, UtilityFunction,
};
pub use laws::{run_suite, LawConfig, LawReport, Suite};
pub use scalar::{Backend, Rational, Scalar};
pub use space::{Act, Capacity, FiniteSpace, PointMap, Subset};
pub use spacefile::SpaceFile;
pub use tower::{build_tower, projective_consistency, GridTower, ProjectiveVector, TowerElement};
pub use uncertainty::{
    check_separated, comonotone_counterexample, GTransform, Separation, UncertaintySpace,
};
