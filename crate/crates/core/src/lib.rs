//! Decision engine for careers scored on three axes: wealth (career
//! capital), autonomy and meaning (counterfactual impact).
//!
//! The crate scores and compares options, simulates plans under the
//! couplings between the axes, solves satisficing problems, compares
//! sequential and simultaneous strategies under risk, and analyses
//! two-partner household coordination games.

pub mod commands;
pub mod coupling;
pub mod error;
pub mod household;
pub mod model;
pub mod satisficing;
pub mod scenario;
pub mod trajectory;

pub use error::{Category, Error, Result};
pub use model::{
    dominates, impact_raw, impact_to_meaning_score, meaning_score, normalize_axes, pareto_frontier,
    utility, Axis, CareerState, DominanceRelation, ImpactFactors, LabeledState, NormalizationConfig,
    Preferences, RawMeasures,
};
pub use scenario::{load_scenario, save_scenario, Scenario};
