//! Scenario-level commands shared by the CLI and the HTTP service, so both
//! front ends produce identical result documents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::household::{lifecycle_report, CooperativeTemplate, LifecycleReport, TransformedGame};
use crate::model::{pareto_frontier, utility, CareerState, LabeledState, Preferences};
use crate::satisficing::{least_regret_relaxation, satisfice, Relaxation, Thresholds};
use crate::scenario::archetypes::{archetype_table, transition_matrix, ArchetypeEntry, TransitionCost};
use crate::scenario::Scenario;
use crate::trajectory::{evaluate_strategy, option_value, simulate, OptionValueReport, StrategyReport, Trajectory};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Score,
    Frontier,
    Simulate { plan: String },
    Satisfice,
    Strategy,
    Options { specialized: String, generalized: String },
    Household { template: Option<CooperativeTemplate> },
    Archetypes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub label: String,
    pub state: CareerState,
    pub utility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub preferences: Preferences,
    pub rows: Vec<ScoreRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierReport {
    pub frontier: Vec<LabeledState>,
    pub dominated: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub plan: String,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatisficeReport {
    pub thresholds: Thresholds,
    pub feasible: Vec<LabeledState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxation: Option<Relaxation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptionsReport {
    pub specialized: String,
    pub generalized: String,
    #[serde(flatten)]
    pub value: OptionValueReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HouseholdReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<CooperativeTemplate>,
    #[serde(flatten)]
    pub lifecycle: LifecycleReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchetypesReport {
    pub archetypes: Vec<ArchetypeEntry>,
    pub transitions: Vec<TransitionCost>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Report {
    Score(ScoreReport),
    Frontier(FrontierReport),
    Simulate(SimulateReport),
    Satisfice(SatisficeReport),
    Strategy(StrategyReport),
    Options(OptionsReport),
    Household(HouseholdReport),
    Archetypes(ArchetypesReport),
}

pub fn score(scenario: &Scenario) -> ScoreReport {
    let rows = scenario
        .role_options()
        .into_iter()
        .map(|o| ScoreRow {
            utility: utility(&o.state, &scenario.preferences),
            label: o.label,
            state: o.state,
        })
        .collect();
    ScoreReport {
        preferences: scenario.preferences,
        rows,
    }
}

pub fn frontier(scenario: &Scenario) -> Result<FrontierReport> {
    let options = scenario.role_options();
    let frontier = pareto_frontier(&options)?;
    let dominated = options
        .iter()
        .filter(|o| !frontier.iter().any(|f| f.label == o.label))
        .map(|o| o.label.clone())
        .collect();
    Ok(FrontierReport { frontier, dominated })
}

pub fn simulate_plan(scenario: &Scenario, plan: &str) -> Result<SimulateReport> {
    let trajectory = simulate(scenario.plan(plan)?, &scenario.inputs())?;
    Ok(SimulateReport {
        plan: plan.to_string(),
        trajectory,
    })
}

/// Feasible roles under the scenario thresholds. An empty feasible set is
/// reported as [`Error::Infeasible`] carrying the full report, including the
/// relaxation advice.
pub fn satisfice_roles(scenario: &Scenario) -> Result<SatisficeReport> {
    let options = scenario.role_options();
    let feasible = satisfice(&options, &scenario.thresholds);
    if !feasible.is_empty() {
        return Ok(SatisficeReport {
            thresholds: scenario.thresholds,
            feasible,
            relaxation: None,
        });
    }
    let relaxation = least_regret_relaxation(&options, &scenario.thresholds)?;
    let message = match &relaxation {
        Relaxation::Advice(a) => format!(
            "no role meets all thresholds; lowering {} to {} unlocks {}",
            a.axis,
            crate::scenario::canonical::format_number(a.required_threshold),
            a.unlocked_options.join(", ")
        ),
        _ => "no role meets all thresholds and no single-axis relaxation suffices (multi-axis infeasible)"
            .to_string(),
    };
    let report = SatisficeReport {
        thresholds: scenario.thresholds,
        feasible,
        relaxation: Some(relaxation),
    };
    let detail = serde_json::to_value(&report).map_err(|e| Error::Internal(e.to_string()))?;
    Err(Error::infeasible(message, detail))
}

pub fn strategy(scenario: &Scenario) -> Result<StrategyReport> {
    let s = scenario
        .strategy
        .as_ref()
        .ok_or_else(|| Error::validation("strategy", "scenario has no strategy section"))?;
    evaluate_strategy(s, &scenario.inputs())
}

pub fn options(scenario: &Scenario, specialized: &str, generalized: &str) -> Result<OptionsReport> {
    let value = option_value(
        scenario.plan(specialized)?,
        scenario.plan(generalized)?,
        &scenario.missions,
        &scenario.inputs(),
    )?;
    Ok(OptionsReport {
        specialized: specialized.to_string(),
        generalized: generalized.to_string(),
        value,
    })
}

pub fn household(scenario: &Scenario, template: Option<CooperativeTemplate>) -> Result<HouseholdReport> {
    let game = scenario
        .household
        .as_ref()
        .ok_or_else(|| Error::validation("household", "scenario has no household section"))?;
    let transformed = match template {
        Some(t) => t.apply(game)?,
        None => TransformedGame::Single(game.clone()),
    };
    Ok(HouseholdReport {
        template,
        lifecycle: lifecycle_report(&transformed)?,
    })
}

pub fn archetypes() -> ArchetypesReport {
    ArchetypesReport {
        archetypes: archetype_table(),
        transitions: transition_matrix(),
    }
}

/// Runs `command`. Only `Archetypes` works without a scenario.
pub fn run(command: &Command, scenario: Option<&Scenario>) -> Result<Report> {
    if let Command::Archetypes = command {
        return Ok(Report::Archetypes(archetypes()));
    }
    let scenario = scenario.ok_or_else(|| Error::validation("scenario", "a scenario is required"))?;
    Ok(match command {
        Command::Score => Report::Score(score(scenario)),
        Command::Frontier => Report::Frontier(frontier(scenario)?),
        Command::Simulate { plan } => Report::Simulate(simulate_plan(scenario, plan)?),
        Command::Satisfice => Report::Satisfice(satisfice_roles(scenario)?),
        Command::Strategy => Report::Strategy(strategy(scenario)?),
        Command::Options {
            specialized,
            generalized,
        } => Report::Options(options(scenario, specialized, generalized)?),
        Command::Household { template } => Report::Household(household(scenario, *template)?),
        Command::Archetypes => unreachable!(),
    })
}
