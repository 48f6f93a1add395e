//! Aspiration-level filtering and single-axis threshold relaxation.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::model::{Axis, CareerState, LabeledState, AXIS_MAX};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThresholdsRepr {
    w_min: f64,
    a_min: f64,
    m_min: f64,
}

/// Minimum acceptable score on each axis.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "ThresholdsRepr", into = "ThresholdsRepr")]
pub struct Thresholds {
    w_min: f64,
    a_min: f64,
    m_min: f64,
}

impl Thresholds {
    pub fn new(w_min: f64, a_min: f64, m_min: f64) -> Result<Self> {
        check_range("w_min", w_min, 0.0, AXIS_MAX)?;
        check_range("a_min", a_min, 0.0, AXIS_MAX)?;
        check_range("m_min", m_min, 0.0, AXIS_MAX)?;
        Ok(Self { w_min, a_min, m_min })
    }

    pub fn get(&self, axis: Axis) -> f64 {
        match axis {
            Axis::W => self.w_min,
            Axis::A => self.a_min,
            Axis::M => self.m_min,
        }
    }

    /// Copy with one axis replaced.
    pub fn with(&self, axis: Axis, value: f64) -> Result<Self> {
        let mut t = *self;
        match axis {
            Axis::W => t.w_min = value,
            Axis::A => t.a_min = value,
            Axis::M => t.m_min = value,
        }
        Thresholds::new(t.w_min, t.a_min, t.m_min)
    }

    /// Meets or exceeds every threshold.
    pub fn admits(&self, state: &CareerState) -> bool {
        Axis::ALL.iter().all(|&axis| state.get(axis) >= self.get(axis))
    }

    fn admits_except(&self, state: &CareerState, skip: Axis) -> bool {
        Axis::ALL
            .iter()
            .filter(|&&axis| axis != skip)
            .all(|&axis| state.get(axis) >= self.get(axis))
    }
}

impl TryFrom<ThresholdsRepr> for Thresholds {
    type Error = Error;

    fn try_from(r: ThresholdsRepr) -> Result<Self> {
        Thresholds::new(r.w_min, r.a_min, r.m_min)
    }
}

impl From<Thresholds> for ThresholdsRepr {
    fn from(t: Thresholds) -> Self {
        ThresholdsRepr {
            w_min: t.w_min,
            a_min: t.a_min,
            m_min: t.m_min,
        }
    }
}

/// Options meeting all three thresholds, in input order.
pub fn satisfice(options: &[LabeledState], t: &Thresholds) -> Vec<LabeledState> {
    options.iter().filter(|o| t.admits(&o.state)).cloned().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationAdvice {
    pub axis: Axis,
    /// Lowered threshold on `axis` that first admits an option.
    pub required_threshold: f64,
    /// Threshold slack given up: original threshold minus `required_threshold`.
    pub regret: f64,
    pub unlocked_options: Vec<String>,
}

/// Shortfall on one axis: how far the best option (ignoring the other axes)
/// falls below the threshold, and whether a single-axis relaxation exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisDeficit {
    pub axis: Axis,
    pub threshold: f64,
    /// Best value on this axis among all options.
    pub best_value: f64,
    pub deficit: f64,
    /// Whether some option clears the other two thresholds.
    pub relaxable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Relaxation {
    AlreadyFeasible { reason: String },
    Advice(RelaxationAdvice),
    MultiAxisInfeasible { deficits: Vec<AxisDeficit> },
}

/// Which single threshold can be lowered with the least regret.
///
/// For each axis the candidates are the options that already clear the
/// other two thresholds; the required threshold is their best value on the
/// axis. The axis with the smallest regret wins, ties resolved W, A, M.
pub fn least_regret_relaxation(options: &[LabeledState], t: &Thresholds) -> Result<Relaxation> {
    if options.iter().any(|o| t.admits(&o.state)) {
        return Ok(Relaxation::AlreadyFeasible {
            reason: "already feasible".into(),
        });
    }

    let mut best: Option<(f64, Axis, f64)> = None;
    for axis in Axis::ALL {
        let reachable = options
            .iter()
            .filter(|o| t.admits_except(&o.state, axis))
            .map(|o| o.state.get(axis))
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
        if let Some(value) = reachable {
            let regret = t.get(axis) - value;
            if best.is_none_or(|(r, _, _)| regret < r) {
                best = Some((regret, axis, value));
            }
        }
    }

    match best {
        Some((regret, axis, required)) => {
            let relaxed = t.with(axis, required)?;
            let unlocked_options = options
                .iter()
                .filter(|o| relaxed.admits(&o.state))
                .map(|o| o.label.clone())
                .collect();
            Ok(Relaxation::Advice(RelaxationAdvice {
                axis,
                required_threshold: required,
                regret,
                unlocked_options,
            }))
        }
        None => {
            let deficits = Axis::ALL
                .iter()
                .map(|&axis| {
                    let best_value = options
                        .iter()
                        .map(|o| o.state.get(axis))
                        .fold(0.0, f64::max);
                    AxisDeficit {
                        axis,
                        threshold: t.get(axis),
                        best_value,
                        deficit: (t.get(axis) - best_value).max(0.0),
                        relaxable: false,
                    }
                })
                .collect();
            Ok(Relaxation::MultiAxisInfeasible { deficits })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::pareto_frontier;
    use proptest::prelude::*;

    fn opt(label: &str, w: f64, a: f64, m: f64) -> LabeledState {
        LabeledState::new(label, CareerState::new(w, a, m).unwrap())
    }

    fn six() -> Vec<LabeledState> {
        vec![
            opt("a", 60.0, 50.0, 30.0),
            opt("b", 49.9, 90.0, 90.0),
            opt("c", 50.0, 40.0, 20.0),
            opt("d", 80.0, 39.0, 80.0),
            opt("e", 95.0, 45.0, 19.0),
            opt("f", 10.0, 10.0, 10.0),
        ]
    }

    #[test]
    fn vacuous_thresholds_keep_everything() {
        assert_eq!(satisfice(&six(), &Thresholds::default()), six());
    }

    #[test]
    fn out_of_range_threshold_rejected() {
        assert_eq!(Thresholds::new(101.0, 0.0, 0.0).unwrap_err().field_path(), Some("w_min"));
    }

    #[test]
    fn mixed_set_matches_predicate() {
        let t = Thresholds::new(50.0, 40.0, 20.0).unwrap();
        let labels: Vec<_> = satisfice(&six(), &t).into_iter().map(|o| o.label).collect();
        assert_eq!(labels, ["a", "c"]);
    }

    #[test]
    fn already_feasible() {
        let r = least_regret_relaxation(&six(), &Thresholds::default()).unwrap();
        assert!(matches!(r, Relaxation::AlreadyFeasible { reason } if reason == "already feasible"));
    }

    #[test]
    fn single_candidate_arithmetic() {
        let opts = vec![opt("only", 45.0, 60.0, 60.0)];
        let t = Thresholds::new(50.0, 50.0, 50.0).unwrap();
        match least_regret_relaxation(&opts, &t).unwrap() {
            Relaxation::Advice(a) => {
                assert_eq!(a.axis, Axis::W);
                assert_eq!(a.required_threshold, 45.0);
                assert_eq!(a.regret, 5.0);
                assert_eq!(a.unlocked_options, ["only"]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn picks_cheapest_axis() {
        // relaxing M by 2 unlocks "m_short"; relaxing W needs 10
        let opts = vec![
            opt("w_short", 50.0, 70.0, 70.0),
            opt("m_short", 70.0, 70.0, 58.0),
            opt("both_short", 40.0, 70.0, 40.0),
        ];
        let t = Thresholds::new(60.0, 60.0, 60.0).unwrap();
        match least_regret_relaxation(&opts, &t).unwrap() {
            Relaxation::Advice(a) => {
                assert_eq!(a.axis, Axis::M);
                assert_eq!(a.regret, 2.0);
                assert_eq!(a.unlocked_options, ["m_short"]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ties_resolve_in_axis_order() {
        let opts = vec![opt("x", 45.0, 60.0, 60.0), opt("y", 60.0, 60.0, 45.0)];
        let t = Thresholds::new(50.0, 50.0, 50.0).unwrap();
        match least_regret_relaxation(&opts, &t).unwrap() {
            Relaxation::Advice(a) => assert_eq!(a.axis, Axis::W),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn multi_axis_infeasible_reports_deficits() {
        let opts = vec![opt("x", 10.0, 10.0, 90.0), opt("y", 90.0, 10.0, 10.0)];
        let t = Thresholds::new(50.0, 50.0, 50.0).unwrap();
        match least_regret_relaxation(&opts, &t).unwrap() {
            Relaxation::MultiAxisInfeasible { deficits } => {
                assert_eq!(deficits.len(), 3);
                assert_eq!(deficits[1].axis, Axis::A);
                assert_eq!(deficits[1].deficit, 40.0);
                assert_eq!(deficits[0].deficit, 0.0);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            least_regret_relaxation(&[], &t).unwrap(),
            Relaxation::MultiAxisInfeasible { .. }
        ));
    }

    fn arb_options() -> impl Strategy<Value = Vec<LabeledState>> {
        prop::collection::vec((0.0..=100.0f64, 0.0..=100.0f64, 0.0..=100.0f64), 0..10).prop_map(|v| {
            v.into_iter()
                .enumerate()
                .map(|(i, (w, a, m))| opt(&format!("o{i}"), w, a, m))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn raising_thresholds_never_grows_feasible_set(opts in arb_options(),
                                                       t in (0.0..=100.0f64, 0.0..=100.0f64, 0.0..=100.0f64),
                                                       bump in (0.0..=30.0f64, 0.0..=30.0f64, 0.0..=30.0f64)) {
            let lo = Thresholds::new(t.0, t.1, t.2).unwrap();
            let hi = Thresholds::new((t.0 + bump.0).min(100.0), (t.1 + bump.1).min(100.0), (t.2 + bump.2).min(100.0)).unwrap();
            let small = satisfice(&opts, &hi);
            let big = satisfice(&opts, &lo);
            prop_assert!(small.iter().all(|o| big.contains(o)));
        }

        #[test]
        fn filtering_commutes_with_frontier(opts in arb_options(),
                                            t in (0.0..=100.0f64, 0.0..=100.0f64, 0.0..=100.0f64)) {
            let t = Thresholds::new(t.0, t.1, t.2).unwrap();
            let frontier = pareto_frontier(&opts).unwrap();
            let lhs: Vec<_> = satisfice(&opts, &t).into_iter().filter(|o| frontier.contains(o)).collect();
            let rhs = satisfice(&frontier, &t);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn advice_is_feasible_and_tight(opts in arb_options(),
                                        t in (0.0..=100.0f64, 0.0..=100.0f64, 0.0..=100.0f64)) {
            let t = Thresholds::new(t.0, t.1, t.2).unwrap();
            if let Relaxation::Advice(a) = least_regret_relaxation(&opts, &t).unwrap() {
                prop_assert!(a.required_threshold < t.get(a.axis));
                prop_assert!(!a.unlocked_options.is_empty());
                let relaxed = t.with(a.axis, a.required_threshold).unwrap();
                prop_assert!(!satisfice(&opts, &relaxed).is_empty());
                let tighter = t.with(a.axis, (a.required_threshold + 1e-6).min(100.0)).unwrap();
                prop_assert!(satisfice(&opts, &tighter).is_empty());
            }
        }
    }
}
