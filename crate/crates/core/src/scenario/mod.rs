//! Scenario documents: strict JSON ingestion with field-path diagnostics,
//! default injection, canonical persistence, and the archetype library.

pub mod archetypes;
pub mod canonical;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::coupling::{CouplingParams, GrowthModel, MarketStructure, Mission};
use crate::error::{join_path, Error, Result};
use crate::household::HouseholdGame;
use crate::model::{CareerState, LabeledState, NormalizationConfig, Preferences};
use crate::satisficing::Thresholds;
use crate::trajectory::{CareerPlan, PhaseSchedule, Role, SimulationInputs, StrategyScenario};

pub use canonical::to_canonical_string;

pub const SCENARIO_VERSION: &str = "1";

/// Prefix of annotation keys that strict parsing tolerates and drops.
pub const EXTENSION_PREFIX: &str = "x_";

/// Object keys whose children are user-chosen names rather than schema keys.
const NAME_KEYED: [&str; 2] = ["plans", "colocation_map"];

fn default_version() -> String {
    SCENARIO_VERSION.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_version")]
    pub version: String,
    pub preferences: Preferences,
    pub initial_state: CareerState,
    #[serde(default)]
    pub normalization: NormalizationConfig,
    #[serde(default)]
    pub market: MarketStructure,
    #[serde(default)]
    pub coupling: CouplingParams,
    #[serde(default)]
    pub growth: GrowthModel,
    #[serde(default)]
    pub roles: Vec<Role>,
    #[serde(default)]
    pub missions: Vec<Mission>,
    #[serde(default)]
    pub plans: BTreeMap<String, CareerPlan>,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub phases: PhaseSchedule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategyScenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub household: Option<HouseholdGame>,
}

impl Scenario {
    /// Minimal scenario; every optional section takes its default.
    pub fn new(preferences: Preferences, initial_state: CareerState) -> Self {
        Self {
            version: default_version(),
            preferences,
            initial_state,
            normalization: NormalizationConfig::default(),
            market: MarketStructure::default(),
            coupling: CouplingParams::default(),
            growth: GrowthModel::default(),
            roles: Vec::new(),
            missions: Vec::new(),
            plans: BTreeMap::new(),
            thresholds: Thresholds::default(),
            phases: PhaseSchedule::default(),
            strategy: None,
            household: None,
        }
    }

    /// Checks every invariant and cross-reference, reporting the first
    /// violation with its field path.
    pub fn validate(&self) -> Result<()> {
        if self.version != SCENARIO_VERSION {
            return Err(Error::validation(
                "version",
                format!("unsupported version `{}` (expected `{SCENARIO_VERSION}`)", self.version),
            ));
        }
        self.normalization.validate().map_err(|e| e.within("normalization"))?;
        self.market.validate().map_err(|e| e.within("market"))?;
        self.coupling.validate().map_err(|e| e.within("coupling"))?;
        self.growth.validate().map_err(|e| e.within("growth"))?;

        let mut ids = HashSet::new();
        for (i, role) in self.roles.iter().enumerate() {
            let path = format!("roles[{i}]");
            role.validate().map_err(|e| e.within(&path))?;
            if !ids.insert(role.id.as_str()) {
                return Err(Error::validation(join_path(&path, "id"), format!("duplicate role id `{}`", role.id)));
            }
        }
        let mut ids = HashSet::new();
        for (i, mission) in self.missions.iter().enumerate() {
            let path = format!("missions[{i}]");
            mission.validate().map_err(|e| e.within(&path))?;
            if !ids.insert(mission.id.as_str()) {
                return Err(Error::validation(
                    join_path(&path, "id"),
                    format!("duplicate mission id `{}`", mission.id),
                ));
            }
        }

        self.phases.validate().map_err(|e| e.within("phases"))?;
        let covers = |plan: &CareerPlan, path: &str| -> Result<()> {
            match self.phases.end() {
                Some(end) if plan.horizon > end => Err(Error::validation(
                    join_path(path, "horizon"),
                    format!("phase schedule ends at year {end} but the plan runs {} years", plan.horizon),
                )),
                _ => Ok(()),
            }
        };
        for (name, plan) in &self.plans {
            let path = format!("plans.{name}");
            plan.validate(&self.roles).map_err(|e| e.within(&path))?;
            covers(plan, &path)?;
        }
        if let Some(strategy) = &self.strategy {
            strategy.validate(&self.roles).map_err(|e| e.within("strategy"))?;
            covers(&strategy.safe_path, "strategy.safe_path")?;
            covers(&strategy.venture_path, "strategy.venture_path")?;
        }
        if let Some(game) = &self.household {
            game.validate().map_err(|e| e.within("household"))?;
        }
        Ok(())
    }

    pub fn inputs(&self) -> SimulationInputs<'_> {
        SimulationInputs {
            roles: &self.roles,
            market: &self.market,
            coupling: &self.coupling,
            growth: &self.growth,
            phases: &self.phases,
            initial: self.initial_state,
            prefs: self.preferences,
        }
    }

    pub fn plan(&self, name: &str) -> Result<&CareerPlan> {
        self.plans
            .get(name)
            .ok_or_else(|| Error::unresolved("plans", name))
    }

    /// Every role as a labelled point, in catalog order.
    pub fn role_options(&self) -> Vec<LabeledState> {
        self.roles
            .iter()
            .map(|r| LabeledState::new(r.id.clone(), r.point(&self.normalization)))
            .collect()
    }
}

/// Removes `x_`-prefixed keys from schema objects. Name-keyed maps (plan
/// names, location maps) are left alone.
fn strip_extensions(value: &mut Value, name_keyed: bool) {
    match value {
        Value::Object(map) => {
            if !name_keyed {
                map.retain(|k, _| !k.starts_with(EXTENSION_PREFIX));
            }
            for (key, child) in map.iter_mut() {
                let child_keyed = !name_keyed && NAME_KEYED.contains(&key.as_str());
                strip_extensions(child, child_keyed);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|v| strip_extensions(v, false)),
        _ => {}
    }
}

/// Splits `"field: message"` produced by the value types' own validation.
fn split_field_message(message: &str) -> Option<(&str, &str)> {
    let (field, rest) = message.split_once(": ")?;
    field
        .chars()
        .all(|c| c.is_ascii_lowercase() || c == '_')
        .then_some((field, rest))
}

fn schema_error(err: serde_path_to_error::Error<serde_json::Error>) -> Error {
    let path = err.path().to_string();
    let path = if path == "." { String::new() } else { path };
    let message = err.inner().to_string();

    if let Some(missing) = message
        .strip_prefix("missing field `")
        .and_then(|s| s.strip_suffix('`'))
    {
        return Error::validation(join_path(&path, missing), "missing required field");
    }
    if let Some(rest) = message.strip_prefix(": ") {
        return Error::validation(path, rest);
    }
    if let Some((field, rest)) = split_field_message(&message) {
        return Error::validation(join_path(&path, field), rest);
    }
    Error::validation(path, message)
}

/// Parses, validates and fills defaults for a scenario held as JSON value.
pub fn load_scenario_value(mut value: Value) -> Result<Scenario> {
    if !value.is_object() {
        return Err(Error::validation("", "scenario document must be a JSON object"));
    }
    strip_extensions(&mut value, false);
    let scenario: Scenario = serde_path_to_error::deserialize(value).map_err(schema_error)?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn parse_document(document: &str) -> Result<Value> {
    serde_json::from_str(document).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Parses a scenario document (UTF-8 JSON).
pub fn load_scenario(document: &str) -> Result<Scenario> {
    load_scenario_value(parse_document(document)?)
}

/// Canonical text of a scenario; `load_scenario` of it gives the same scenario.
pub fn save_scenario(scenario: &Scenario) -> Result<String> {
    to_canonical_string(scenario)
}

/// Overlays the top-level keys of `partial` onto `base`.
pub fn merge_shallow(base: &Value, partial: &Value) -> Result<Value> {
    let (Some(base), Some(partial)) = (base.as_object(), partial.as_object()) else {
        return Err(Error::validation("", "scenario document must be a JSON object"));
    };
    let mut merged = base.clone();
    for (key, value) in partial {
        merged.insert(key.clone(), value.clone());
    }
    Ok(Value::Object(merged))
}
