//! Two-partner household coordination game.
//!
//! Each partner picks one strategy from a finite set; payoffs are the
//! partners' own weighted utilities, adjusted by shared household
//! constraints. The module enumerates pure Nash equilibria, finds the
//! cooperative (joint-welfare) optimum, and reports the gap between them.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{check_nonnegative, check_range, Error, Result};
use crate::model::{check_unique_labels, utility, CareerState, Preferences};

pub const MAX_STRATEGIES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyOption {
    pub label: String,
    pub state: CareerState,
    /// Tagged as a high-variance bet (startup, sabbatical, ...).
    #[serde(default)]
    pub high_variance: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Agent {
    pub preferences: Preferences,
    pub strategies: Vec<StrategyOption>,
}

impl Agent {
    fn validate(&self) -> Result<()> {
        if self.strategies.is_empty() {
            return Err(Error::validation("strategies", "must not be empty"));
        }
        if self.strategies.len() > MAX_STRATEGIES {
            return Err(Error::validation(
                "strategies",
                format!("at most {MAX_STRATEGIES} strategies (got {})", self.strategies.len()),
            ));
        }
        check_unique_labels("strategies", self.strategies.iter().map(|s| s.label.as_str()))
    }

    fn index_of(&self, label: &str) -> Option<usize> {
        self.strategies.iter().position(|s| s.label == label)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HouseholdConstraints {
    pub colocation_required: bool,
    /// Strategy label to location label.
    pub colocation_map: BTreeMap<String, String>,
    pub care_requirement: bool,
    /// Strategies that leave room for care responsibilities.
    pub flexible_strategies: BTreeSet<String>,
    /// Utility points both partners lose when care is uncovered.
    pub care_penalty: f64,
    /// Minimum combined wealth score of the household, in `[0, 200]`.
    pub joint_w_floor: f64,
    /// Forbids both partners taking high-variance strategies at once.
    pub exclusive_high_variance: bool,
    /// Utility points a partner loses for each high-variance strategy the
    /// other partner takes (shared exposure to the downside).
    pub risk_spillover: f64,
}

impl Default for HouseholdConstraints {
    fn default() -> Self {
        Self {
            colocation_required: false,
            colocation_map: BTreeMap::new(),
            care_requirement: false,
            flexible_strategies: BTreeSet::new(),
            care_penalty: 0.0,
            joint_w_floor: 0.0,
            exclusive_high_variance: false,
            risk_spillover: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HouseholdGame {
    pub agent1: Agent,
    pub agent2: Agent,
    #[serde(default)]
    pub constraints: HouseholdConstraints,
}

impl HouseholdGame {
    pub fn validate(&self) -> Result<()> {
        self.agent1.validate().map_err(|e| e.within("agent1"))?;
        self.agent2.validate().map_err(|e| e.within("agent2"))?;
        let c = &self.constraints;
        check_nonnegative("constraints.care_penalty", c.care_penalty)?;
        check_nonnegative("constraints.risk_spillover", c.risk_spillover)?;
        check_range("constraints.joint_w_floor", c.joint_w_floor, 0.0, 200.0)?;
        let known = |label: &str| {
            self.agent1.index_of(label).is_some() || self.agent2.index_of(label).is_some()
        };
        for label in &c.flexible_strategies {
            if !known(label) {
                return Err(Error::unresolved("constraints.flexible_strategies", label));
            }
        }
        for label in c.colocation_map.keys() {
            if !known(label) {
                return Err(Error::unresolved("constraints.colocation_map", label));
            }
        }
        if c.colocation_required {
            for (who, agent) in [("agent1", &self.agent1), ("agent2", &self.agent2)] {
                for (i, s) in agent.strategies.iter().enumerate() {
                    if !c.colocation_map.contains_key(&s.label) {
                        return Err(Error::validation(
                            format!("{who}.strategies[{i}].label"),
                            format!("`{}` has no location but colocation is required", s.label),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn strategy(&self, agent: usize, index: usize) -> &StrategyOption {
        match agent {
            1 => &self.agent1.strategies[index],
            _ => &self.agent2.strategies[index],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub s1: String,
    pub s2: String,
    pub payoff1: Option<f64>,
    pub payoff2: Option<f64>,
    /// `payoff1 + payoff2` for feasible profiles.
    pub joint_welfare: Option<f64>,
    pub feasible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<String>,
}

/// Payoffs of the profile `(s1, s2)`.
///
/// Colocation with differing locations, a combined wealth score below the
/// household floor, and (when exclusive) two high-variance strategies make
/// the profile infeasible. Uncovered care costs both partners the penalty,
/// and each high-variance pick costs the other partner the risk spillover.
pub fn payoff(game: &HouseholdGame, s1: &str, s2: &str) -> Result<Profile> {
    let i = game
        .agent1
        .index_of(s1)
        .ok_or_else(|| Error::unresolved("agent1.strategies", s1))?;
    let j = game
        .agent2
        .index_of(s2)
        .ok_or_else(|| Error::unresolved("agent2.strategies", s2))?;
    Ok(profile_at(game, i, j))
}

fn profile_at(game: &HouseholdGame, i: usize, j: usize) -> Profile {
    let (a, b) = (game.strategy(1, i), game.strategy(2, j));
    let c = &game.constraints;
    let infeasible = |reason: &str| Profile {
        s1: a.label.clone(),
        s2: b.label.clone(),
        payoff1: None,
        payoff2: None,
        joint_welfare: None,
        feasible: false,
        violation: Some(reason.to_string()),
    };

    if c.colocation_required && c.colocation_map.get(&a.label) != c.colocation_map.get(&b.label) {
        return infeasible("colocation");
    }
    if a.state.w() + b.state.w() < c.joint_w_floor {
        return infeasible("income floor");
    }
    if c.exclusive_high_variance && a.high_variance && b.high_variance {
        return infeasible("correlated risk");
    }

    let mut p1 = utility(&a.state, &game.agent1.preferences);
    let mut p2 = utility(&b.state, &game.agent2.preferences);
    if c.care_requirement
        && !c.flexible_strategies.contains(&a.label)
        && !c.flexible_strategies.contains(&b.label)
    {
        p1 -= c.care_penalty;
        p2 -= c.care_penalty;
    }
    if a.high_variance {
        p2 -= c.risk_spillover;
    }
    if b.high_variance {
        p1 -= c.risk_spillover;
    }
    Profile {
        s1: a.label.clone(),
        s2: b.label.clone(),
        payoff1: Some(p1),
        payoff2: Some(p2),
        joint_welfare: Some(p1 + p2),
        feasible: true,
        violation: None,
    }
}

/// Every profile, row-major over (agent1 strategy, agent2 strategy).
pub fn profile_matrix(game: &HouseholdGame) -> Vec<Vec<Profile>> {
    (0..game.agent1.strategies.len())
        .map(|i| {
            (0..game.agent2.strategies.len())
                .map(|j| profile_at(game, i, j))
                .collect()
        })
        .collect()
}

fn pure_nash_in(matrix: &[Vec<Profile>]) -> Vec<Profile> {
    let mut out = Vec::new();
    for (i, row) in matrix.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            let (Some(p1), Some(p2)) = (p.payoff1, p.payoff2) else {
                continue;
            };
            let agent1_improves = matrix
                .iter()
                .enumerate()
                .any(|(k, r)| k != i && r[j].payoff1.is_some_and(|v| v > p1));
            let agent2_improves = row
                .iter()
                .enumerate()
                .any(|(k, q)| k != j && q.payoff2.is_some_and(|v| v > p2));
            if !agent1_improves && !agent2_improves {
                out.push(p.clone());
            }
        }
    }
    out
}

/// All pure-strategy Nash equilibria among feasible profiles. Deviations
/// into infeasible profiles are not available to either partner.
pub fn pure_nash(game: &HouseholdGame) -> Result<Vec<Profile>> {
    game.validate()?;
    Ok(pure_nash_in(&profile_matrix(game)))
}

fn cooperative_in(matrix: &[Vec<Profile>]) -> Option<Profile> {
    let mut best: Option<&Profile> = None;
    for p in matrix.iter().flatten() {
        let Some(jw) = p.joint_welfare else { continue };
        let better = match best {
            None => true,
            Some(b) => {
                let bw = b.joint_welfare.unwrap_or(f64::NEG_INFINITY);
                jw > bw || (jw == bw && (p.s1.as_str(), p.s2.as_str()) < (b.s1.as_str(), b.s2.as_str()))
            }
        };
        if better {
            best = Some(p);
        }
    }
    best.cloned()
}

fn no_feasible_profile(game: &HouseholdGame) -> Error {
    Error::infeasible(
        "no feasible household profile",
        json!({
            "agent1_strategies": game.agent1.strategies.len(),
            "agent2_strategies": game.agent2.strategies.len(),
        }),
    )
}

/// Feasible profile with the highest `payoff1 + payoff2`; ties go to the
/// lexicographically smallest `(s1, s2)` label pair.
pub fn cooperative_optimum(game: &HouseholdGame) -> Result<Profile> {
    game.validate()?;
    cooperative_in(&profile_matrix(game)).ok_or_else(|| no_feasible_profile(game))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashAssessment {
    pub profile: Profile,
    /// Some feasible profile is at least as good for both and better for one.
    pub pareto_suboptimal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub pure_nash_profiles: Vec<NashAssessment>,
    pub cooperative_optimum: Profile,
    /// Cooperative joint welfare minus the best Nash joint welfare.
    pub gap: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn pareto_improvable(p: &Profile, matrix: &[Vec<Profile>]) -> bool {
    let (Some(a), Some(b)) = (p.payoff1, p.payoff2) else {
        return false;
    };
    matrix.iter().flatten().any(|q| match (q.payoff1, q.payoff2) {
        (Some(x), Some(y)) => x >= a && y >= b && (x > a || y > b),
        _ => false,
    })
}

/// Nash equilibria, cooperative optimum and the welfare gap between them.
pub fn coordination_gap(game: &HouseholdGame) -> Result<EquilibriumReport> {
    game.validate()?;
    let matrix = profile_matrix(game);
    let coop = cooperative_in(&matrix).ok_or_else(|| no_feasible_profile(game))?;
    let nash = pure_nash_in(&matrix);
    let coop_welfare = coop.joint_welfare.unwrap_or_default();

    let best_nash = nash
        .iter()
        .filter_map(|p| p.joint_welfare)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
    let (gap, note) = match best_nash {
        Some(w) => ((coop_welfare - w).max(0.0), None),
        None => (0.0, Some("no pure Nash equilibrium exists".to_string())),
    };
    let pure_nash_profiles = nash
        .into_iter()
        .map(|p| NashAssessment {
            pareto_suboptimal: pareto_improvable(&p, &matrix),
            profile: p,
        })
        .collect();
    Ok(EquilibriumReport {
        pure_nash_profiles,
        cooperative_optimum: coop,
        gap,
        note,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CooperativeTemplate {
    /// Alternate career focus: one period with partner 1 on a career
    /// strategy and partner 2 on a flexible one, then the mirror period.
    SequentialFocus,
    /// At most one partner takes a high-variance strategy.
    RiskHedging,
    /// Both partners must pick strategies in the same location.
    GeographicBundling,
}

pub fn cooperative_templates() -> Vec<CooperativeTemplate> {
    vec![
        CooperativeTemplate::SequentialFocus,
        CooperativeTemplate::RiskHedging,
        CooperativeTemplate::GeographicBundling,
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub enum TransformedGame {
    Single(HouseholdGame),
    TwoPeriod(HouseholdGame, HouseholdGame),
}

fn template_error(template: CooperativeTemplate, message: impl Into<String>) -> Error {
    Error::validation(format!("household.template.{}", template.name()), message)
}

impl CooperativeTemplate {
    pub fn name(self) -> &'static str {
        match self {
            CooperativeTemplate::SequentialFocus => "sequential_focus",
            CooperativeTemplate::RiskHedging => "risk_hedging",
            CooperativeTemplate::GeographicBundling => "geographic_bundling",
        }
    }

    pub fn apply(self, game: &HouseholdGame) -> Result<TransformedGame> {
        game.validate()?;
        match self {
            CooperativeTemplate::SequentialFocus => {
                let flexible = &game.constraints.flexible_strategies;
                let restrict = |agent: &Agent, want_flexible: bool, who: &str| -> Result<Agent> {
                    let strategies: Vec<_> = agent
                        .strategies
                        .iter()
                        .filter(|s| flexible.contains(&s.label) == want_flexible)
                        .cloned()
                        .collect();
                    if strategies.is_empty() {
                        let kind = if want_flexible { "flexible" } else { "career" };
                        return Err(template_error(self, format!("{who} has no {kind} strategy")));
                    }
                    Ok(Agent {
                        preferences: agent.preferences,
                        strategies,
                    })
                };
                let period = |agent1_career: bool| -> Result<HouseholdGame> {
                    let agent1 = restrict(&game.agent1, !agent1_career, "agent1")?;
                    let agent2 = restrict(&game.agent2, agent1_career, "agent2")?;
                    // drop constraint entries for strategies no longer on offer
                    let kept: BTreeSet<&str> = agent1
                        .strategies
                        .iter()
                        .chain(&agent2.strategies)
                        .map(|s| s.label.as_str())
                        .collect();
                    let mut constraints = game.constraints.clone();
                    constraints.colocation_map.retain(|k, _| kept.contains(k.as_str()));
                    constraints.flexible_strategies.retain(|k| kept.contains(k.as_str()));
                    Ok(HouseholdGame {
                        agent1,
                        agent2,
                        constraints,
                    })
                };
                let first = period(true)?;
                let second = period(false)?;
                Ok(TransformedGame::TwoPeriod(first, second))
            }
            CooperativeTemplate::RiskHedging => {
                let tagged = game
                    .agent1
                    .strategies
                    .iter()
                    .chain(&game.agent2.strategies)
                    .any(|s| s.high_variance);
                if !tagged {
                    return Err(template_error(self, "no high-variance strategies are tagged"));
                }
                let mut g = game.clone();
                g.constraints.exclusive_high_variance = true;
                Ok(TransformedGame::Single(g))
            }
            CooperativeTemplate::GeographicBundling => {
                let map = &game.constraints.colocation_map;
                for s in game.agent1.strategies.iter().chain(&game.agent2.strategies) {
                    if !map.contains_key(&s.label) {
                        return Err(template_error(
                            self,
                            format!("strategy `{}` has no location", s.label),
                        ));
                    }
                }
                let mut g = game.clone();
                g.constraints.colocation_required = true;
                Ok(TransformedGame::Single(g))
            }
        }
    }
}

impl std::str::FromStr for CooperativeTemplate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        cooperative_templates()
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::validation("template", format!("unknown template `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifecycleReport {
    pub periods: Vec<EquilibriumReport>,
    /// Sum of the periods' cooperative joint welfare.
    pub combined_cooperative_welfare: f64,
    /// Sum of the periods' best Nash joint welfare (periods without an
    /// equilibrium contribute nothing).
    pub combined_nash_welfare: f64,
}

/// Coordination reports for every period of a transformed game.
pub fn lifecycle_report(transformed: &TransformedGame) -> Result<LifecycleReport> {
    let games: Vec<&HouseholdGame> = match transformed {
        TransformedGame::Single(g) => vec![g],
        TransformedGame::TwoPeriod(a, b) => vec![a, b],
    };
    let periods = games
        .into_iter()
        .map(coordination_gap)
        .collect::<Result<Vec<_>>>()?;
    let combined_cooperative_welfare = periods
        .iter()
        .filter_map(|r| r.cooperative_optimum.joint_welfare)
        .sum();
    let combined_nash_welfare = periods
        .iter()
        .filter_map(|r| {
            r.pure_nash_profiles
                .iter()
                .filter_map(|n| n.profile.joint_welfare)
                .reduce(f64::max)
        })
        .sum();
    Ok(LifecycleReport {
        periods,
        combined_cooperative_welfare,
        combined_nash_welfare,
    })
}
