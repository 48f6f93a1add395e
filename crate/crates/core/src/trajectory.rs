//! Year-by-year simulation of career plans, phase schedules, the
//! sequential-versus-simultaneous strategy comparison and option value.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coupling::{
    capital_growth_step, detect_second_control_trap, feasible_autonomy_cap, first_trap_against,
    mission_set, stabilized_autonomy_cap, CouplingParams, GrowthModel, MarketStructure, Mission,
    TrapKind, TrapReport,
};
use crate::error::{check_nonnegative, check_range, Error, Result};
use crate::model::{
    meaning_score, utility, CareerState, ImpactFactors, NormalizationConfig, Preferences, AXIS_MAX,
};

/// Longest plan the engine will simulate, in years.
pub const MAX_HORIZON: u32 = 1000;

/// A job or position a plan can move into.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Role {
    pub id: String,
    pub practice_quality: f64,
    pub offered_autonomy: f64,
    pub impact: ImpactFactors,
    pub income: f64,
    #[serde(default)]
    pub entry_min_w: f64,
    #[serde(default)]
    pub entry_cost_w: f64,
}

impl Role {
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::validation("id", "must not be empty"));
        }
        check_range("practice_quality", self.practice_quality, 0.0, 1.0)?;
        check_range("offered_autonomy", self.offered_autonomy, 0.0, AXIS_MAX)?;
        check_nonnegative("income", self.income)?;
        check_range("entry_min_w", self.entry_min_w, 0.0, AXIS_MAX)?;
        check_range("entry_cost_w", self.entry_cost_w, 0.0, AXIS_MAX)
    }

    /// The role as a point: earnings-only wealth score, offered autonomy,
    /// and the meaning score of its impact rating.
    pub fn point(&self, normalization: &NormalizationConfig) -> CareerState {
        CareerState::clamped(
            normalization.income_score(self.income),
            self.offered_autonomy,
            meaning_score(&self.impact),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanMove {
    pub year: u32,
    pub role_id: String,
}

/// An ordered list of moves; the move at year `y` takes effect for year `y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CareerPlan {
    pub horizon: u32,
    pub moves: Vec<PlanMove>,
}

impl CareerPlan {
    pub fn single(role_id: impl Into<String>, horizon: u32) -> Self {
        Self {
            horizon,
            moves: vec![PlanMove {
                year: 0,
                role_id: role_id.into(),
            }],
        }
    }

    /// Structural checks plus role-id resolution against `roles`.
    pub fn validate(&self, roles: &[Role]) -> Result<()> {
        if self.horizon > MAX_HORIZON {
            return Err(Error::validation(
                "horizon",
                format!("must not exceed {MAX_HORIZON} (got {})", self.horizon),
            ));
        }
        match self.moves.first() {
            None => return Err(Error::validation("moves", "a plan needs at least one move")),
            Some(first) if first.year != 0 => {
                return Err(Error::validation(
                    "moves[0].year",
                    format!("first move must be at year 0 (got {})", first.year),
                ))
            }
            Some(_) => {}
        }
        for (i, pair) in self.moves.windows(2).enumerate() {
            if pair[1].year <= pair[0].year {
                return Err(Error::validation(
                    format!("moves[{}].year", i + 1),
                    "move years must be strictly increasing",
                ));
            }
        }
        let last = self.moves.last().map_or(0, |m| m.year);
        if self.horizon < last {
            return Err(Error::validation(
                "horizon",
                format!("must be at least the last move year {last} (got {})", self.horizon),
            ));
        }
        for (i, mv) in self.moves.iter().enumerate() {
            if !roles.iter().any(|r| r.id == mv.role_id) {
                return Err(Error::unresolved(format!("moves[{i}].role_id"), &mv.role_id));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Priority {
    #[serde(rename = "maximize_w")]
    MaximizeW,
    #[serde(rename = "convert")]
    ConvertToAorM,
    #[serde(rename = "maximize_m")]
    MaximizeM,
}

/// A half-open span `[start_year, end_year)` of the schedule; an absent
/// `end_year` extends the phase indefinitely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Phase {
    pub start_year: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_year: Option<u32>,
    pub priority: Priority,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhaseSchedule(pub Vec<Phase>);

impl Default for PhaseSchedule {
    /// Capital building for years 0-10, conversion for 10-25, meaning from 25 on.
    fn default() -> Self {
        PhaseSchedule(vec![
            Phase {
                start_year: 0,
                end_year: Some(10),
                priority: Priority::MaximizeW,
            },
            Phase {
                start_year: 10,
                end_year: Some(25),
                priority: Priority::ConvertToAorM,
            },
            Phase {
                start_year: 25,
                end_year: None,
                priority: Priority::MaximizeM,
            },
        ])
    }
}

impl PhaseSchedule {
    pub fn validate(&self) -> Result<()> {
        let phases = &self.0;
        if phases.is_empty() {
            return Err(Error::validation("", "schedule needs at least one phase"));
        }
        if phases[0].start_year != 0 {
            return Err(Error::validation("[0].start_year", "schedule must start at year 0"));
        }
        for (i, p) in phases.iter().enumerate() {
            match p.end_year {
                Some(end) if end <= p.start_year => {
                    return Err(Error::validation(
                        format!("[{i}].end_year"),
                        "must be greater than start_year",
                    ))
                }
                None if i + 1 != phases.len() => {
                    return Err(Error::validation(
                        format!("[{i}].end_year"),
                        "only the last phase may be open-ended",
                    ))
                }
                _ => {}
            }
            if let Some(next) = phases.get(i + 1) {
                if p.end_year != Some(next.start_year) {
                    return Err(Error::validation(
                        format!("[{}].start_year", i + 1),
                        "phases must be contiguous and non-overlapping",
                    ));
                }
            }
        }
        Ok(())
    }

    /// First year not covered, or `None` for an open-ended schedule.
    pub fn end(&self) -> Option<u32> {
        self.0.last().and_then(|p| p.end_year)
    }
}

/// Priority of the phase that covers `year`.
pub fn phase_priority(year: u32, schedule: &PhaseSchedule) -> Result<Priority> {
    schedule
        .0
        .iter()
        .find(|p| year >= p.start_year && p.end_year.is_none_or(|end| year < end))
        .map(|p| p.priority)
        .ok_or_else(|| Error::validation("phases", format!("year {year} is not covered")))
}

/// Everything a simulation needs besides the plan.
#[derive(Debug, Clone, Copy)]
pub struct SimulationInputs<'a> {
    pub roles: &'a [Role],
    pub market: &'a MarketStructure,
    pub coupling: &'a CouplingParams,
    pub growth: &'a GrowthModel,
    pub phases: &'a PhaseSchedule,
    pub initial: CareerState,
    pub prefs: Preferences,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEntry {
    pub year: u32,
    pub role_id: String,
    /// State at the end of the year.
    pub state: CareerState,
    /// Autonomy cap in force during the year (capital-funded, meaning-stabilized).
    pub autonomy_cap: f64,
    pub trap: TrapReport,
    pub phase: Priority,
    /// Role the plan tried to enter this year but whose capital gate was unmet.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refused_move: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub initial: CareerState,
    pub entries: Vec<TrajectoryEntry>,
    pub terminal_state: CareerState,
    pub terminal_utility: f64,
}

/// Simulates `plan` one year at a time.
///
/// Each year: a scheduled move is taken if capital meets the role's entry
/// gate (paying its entry cost), otherwise refused and logged. The role's
/// offered autonomy is checked against the meaning-stabilized cap funded by
/// the capital held at the start of the year. Above the cap the person is in
/// the first control trap: autonomy is held to the cap and capital decays by
/// `delta_instability` instead of growing. Otherwise capital grows with the
/// role's practice quality, and the second trap is flagged when the market
/// would fund more autonomy than the role grants.
pub fn simulate(plan: &CareerPlan, inputs: &SimulationInputs<'_>) -> Result<Trajectory> {
    plan.validate(inputs.roles).map_err(|e| e.within("plan"))?;
    let roles: BTreeMap<&str, &Role> = inputs.roles.iter().map(|r| (r.id.as_str(), r)).collect();
    let moves: BTreeMap<u32, &str> = plan
        .moves
        .iter()
        .map(|m| (m.year, m.role_id.as_str()))
        .collect();

    let mut w = inputs.initial.w();
    let mut current: Option<&Role> = None;
    let mut entries = Vec::with_capacity(plan.horizon as usize);
    let mut last_state = inputs.initial;

    for year in 0..plan.horizon {
        let mut refused_move = None;
        if let Some(&role_id) = moves.get(&year) {
            let role = roles[role_id];
            if w >= role.entry_min_w {
                w = (w - role.entry_cost_w).max(0.0);
                current = Some(role);
            } else if current.is_none() {
                return Err(Error::validation(
                    "plan.moves[0]",
                    format!(
                        "initial capital {w} is below the entry gate {} of `{role_id}`",
                        role.entry_min_w
                    ),
                ));
            } else {
                refused_move = Some(role_id.to_string());
            }
        }
        let role = current.ok_or_else(|| Error::Internal("no active role".into()))?;

        let m = meaning_score(&role.impact);
        let cap = stabilized_autonomy_cap(feasible_autonomy_cap(w, inputs.market), m, inputs.coupling);
        let mut trap = first_trap_against(role.offered_autonomy, cap);
        let a = role.offered_autonomy.min(cap);

        let w_start = w;
        if trap.trap == TrapKind::FirstTrap {
            w *= 1.0 - inputs.coupling.delta_instability;
        } else {
            w = capital_growth_step(w, role.practice_quality, inputs.growth, 1.0)?;
            trap = detect_second_control_trap(w_start, inputs.coupling, cap, role.offered_autonomy);
        }

        let state = CareerState::clamped(w, a, m);
        last_state = state;
        entries.push(TrajectoryEntry {
            year,
            role_id: role.id.clone(),
            state,
            autonomy_cap: cap,
            trap,
            phase: phase_priority(year, inputs.phases)?,
            refused_move,
        });
    }

    Ok(Trajectory {
        initial: inputs.initial,
        entries,
        terminal_state: last_state,
        terminal_utility: utility(&last_state, &inputs.prefs),
    })
}

/// Signed per-axis shift applied to a venture's terminal state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StateAdjustment {
    pub w: f64,
    pub a: f64,
    pub m: f64,
}

impl StateAdjustment {
    pub fn validate(&self) -> Result<()> {
        check_range("w", self.w, -AXIS_MAX, AXIS_MAX)?;
        check_range("a", self.a, -AXIS_MAX, AXIS_MAX)?;
        check_range("m", self.m, -AXIS_MAX, AXIS_MAX)
    }

    pub fn apply(&self, state: &CareerState) -> CareerState {
        CareerState::clamped(state.w() + self.w, state.a() + self.a, state.m() + self.m)
    }
}

/// Safe "capital first, then pivot" path against a venture that tries to
/// win on every axis at once and either succeeds or fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyScenario {
    pub safe_path: CareerPlan,
    pub venture_path: CareerPlan,
    pub success_probability: f64,
    #[serde(default)]
    pub success_adjustment: StateAdjustment,
    #[serde(default)]
    pub failure_adjustment: StateAdjustment,
    pub risk_exponent: f64,
}

impl StrategyScenario {
    pub fn validate(&self, roles: &[Role]) -> Result<()> {
        self.safe_path.validate(roles).map_err(|e| e.within("safe_path"))?;
        self.venture_path.validate(roles).map_err(|e| e.within("venture_path"))?;
        check_range("success_probability", self.success_probability, 0.0, 1.0)?;
        self.success_adjustment.validate().map_err(|e| e.within("success_adjustment"))?;
        self.failure_adjustment.validate().map_err(|e| e.within("failure_adjustment"))?;
        if !(self.risk_exponent > 0.0 && self.risk_exponent <= 1.0) {
            return Err(Error::validation(
                "risk_exponent",
                format!("must lie in (0, 1] (got {})", self.risk_exponent),
            ));
        }
        Ok(())
    }
}

/// Utility with the wealth axis passed through `100 * (W / 100)^rho` first.
pub fn risk_adjusted_utility(state: &CareerState, prefs: &Preferences, rho: f64) -> f64 {
    let w = AXIS_MAX * (state.w() / AXIS_MAX).powf(rho);
    prefs.lambda_w() * w + prefs.lambda_a() * state.a() + prefs.lambda_m() * state.m()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Sequential,
    Simultaneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchOutcome {
    Success,
    Failure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyBranch {
    pub strategy: StrategyKind,
    pub outcome: BranchOutcome,
    pub probability: f64,
    pub terminal_state: CareerState,
    pub utility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub sequential_eu: f64,
    pub simultaneous_eu: f64,
    pub preferred: StrategyKind,
    pub branches: Vec<StrategyBranch>,
}

/// Expected risk-adjusted utility of both strategies by explicit
/// enumeration of the success and failure branches. The safe path is
/// unaffected by the venture's outcome. Ties go to the sequential strategy.
pub fn evaluate_strategy(
    scenario: &StrategyScenario,
    inputs: &SimulationInputs<'_>,
) -> Result<StrategyReport> {
    scenario.validate(inputs.roles).map_err(|e| e.within("strategy"))?;
    let p = scenario.success_probability;
    let rho = scenario.risk_exponent;
    let safe = simulate(&scenario.safe_path, inputs)?.terminal_state;
    let venture = simulate(&scenario.venture_path, inputs)?.terminal_state;

    let mut branches = Vec::with_capacity(4);
    for (outcome, probability) in [(BranchOutcome::Success, p), (BranchOutcome::Failure, 1.0 - p)] {
        branches.push(StrategyBranch {
            strategy: StrategyKind::Sequential,
            outcome,
            probability,
            terminal_state: safe,
            utility: risk_adjusted_utility(&safe, &inputs.prefs, rho),
        });
    }
    for (outcome, probability, adj) in [
        (BranchOutcome::Success, p, &scenario.success_adjustment),
        (BranchOutcome::Failure, 1.0 - p, &scenario.failure_adjustment),
    ] {
        let terminal = adj.apply(&venture);
        branches.push(StrategyBranch {
            strategy: StrategyKind::Simultaneous,
            outcome,
            probability,
            terminal_state: terminal,
            utility: risk_adjusted_utility(&terminal, &inputs.prefs, rho),
        });
    }

    let expected = |kind: StrategyKind| -> f64 {
        branches
            .iter()
            .filter(|b| b.strategy == kind && b.probability > 0.0)
            .map(|b| b.probability * b.utility)
            .sum()
    };
    let sequential_eu = expected(StrategyKind::Sequential);
    let simultaneous_eu = expected(StrategyKind::Simultaneous);
    let preferred = if simultaneous_eu > sequential_eu {
        StrategyKind::Simultaneous
    } else {
        StrategyKind::Sequential
    };
    Ok(StrategyReport {
        sequential_eu,
        simultaneous_eu,
        preferred,
        branches,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptionValueReport {
    pub terminal_w_spec: f64,
    pub terminal_w_gen: f64,
    /// `terminal_w_spec - terminal_w_gen`.
    pub w_gap: f64,
    pub reachable_missions_spec: Vec<String>,
    pub reachable_missions_gen: Vec<String>,
    pub max_meaning_spec: f64,
    pub max_meaning_gen: f64,
    /// `max_meaning_gen - max_meaning_spec`.
    pub meaning_gap: f64,
}

/// Compares a specialized and a generalized plan by terminal capital and by
/// the best meaning score among the missions each leaves within reach.
pub fn option_value(
    specialized: &CareerPlan,
    generalized: &CareerPlan,
    missions: &[Mission],
    inputs: &SimulationInputs<'_>,
) -> Result<OptionValueReport> {
    let spec = simulate(specialized, inputs).map_err(|e| e.within("specialized"))?;
    let gen = simulate(generalized, inputs).map_err(|e| e.within("generalized"))?;
    let reach = |t: &Trajectory| -> (Vec<String>, f64) {
        let set = mission_set(t.terminal_state.w(), missions);
        let best = set
            .iter()
            .map(|m| meaning_score(&m.impact))
            .fold(0.0, f64::max);
        (set.into_iter().map(|m| m.id.clone()).collect(), best)
    };
    let (reach_spec, best_spec) = reach(&spec);
    let (reach_gen, best_gen) = reach(&gen);
    let (w_spec, w_gen) = (spec.terminal_state.w(), gen.terminal_state.w());
    Ok(OptionValueReport {
        terminal_w_spec: w_spec,
        terminal_w_gen: w_gen,
        w_gap: w_spec - w_gen,
        reachable_missions_spec: reach_spec,
        reachable_missions_gen: reach_gen,
        max_meaning_spec: best_spec,
        max_meaning_gen: best_gen,
        meaning_gap: best_gen - best_spec,
    })
}
