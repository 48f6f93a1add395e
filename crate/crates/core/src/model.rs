//! Domain values on the three axes, utility scoring, impact scoring and
//! Pareto dominance.
//!
//! Every axis is a cardinal score on `[0, 100]`. Results that depend on the
//! scale (utility, regret, coordination gaps) are only as meaningful as the
//! scores fed in.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_nonnegative, check_range, Error, Result};

/// Upper end of every axis score.
pub const AXIS_MAX: f64 = 100.0;

/// Upper end of each impact rating.
pub const FACTOR_MAX: f64 = 5.0;

/// Largest possible impact product, `5^4`.
pub const IMPACT_RAW_MAX: f64 = FACTOR_MAX * FACTOR_MAX * FACTOR_MAX * FACTOR_MAX;

/// Allowed drift of `lambda_w + lambda_a + lambda_m` away from 1.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    W,
    A,
    M,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::W, Axis::A, Axis::M];
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::W => "W",
            Axis::A => "A",
            Axis::M => "M",
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateRepr {
    w: f64,
    a: f64,
    m: f64,
}

/// A point in (wealth, autonomy, meaning) space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct CareerState {
    w: f64,
    a: f64,
    m: f64,
}

impl CareerState {
    pub fn new(w: f64, a: f64, m: f64) -> Result<Self> {
        check_range("w", w, 0.0, AXIS_MAX)?;
        check_range("a", a, 0.0, AXIS_MAX)?;
        check_range("m", m, 0.0, AXIS_MAX)?;
        Ok(Self { w, a, m })
    }

    /// Builds a state from computed (finite) values, clamping into range.
    pub(crate) fn clamped(w: f64, a: f64, m: f64) -> Self {
        debug_assert!(w.is_finite() && a.is_finite() && m.is_finite());
        Self {
            w: w.clamp(0.0, AXIS_MAX),
            a: a.clamp(0.0, AXIS_MAX),
            m: m.clamp(0.0, AXIS_MAX),
        }
    }

    pub fn origin() -> Self {
        Self { w: 0.0, a: 0.0, m: 0.0 }
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn get(&self, axis: Axis) -> f64 {
        match axis {
            Axis::W => self.w,
            Axis::A => self.a,
            Axis::M => self.m,
        }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.w, self.a, self.m]
    }
}

impl TryFrom<StateRepr> for CareerState {
    type Error = Error;

    fn try_from(r: StateRepr) -> Result<Self> {
        CareerState::new(r.w, r.a, r.m)
    }
}

impl From<CareerState> for StateRepr {
    fn from(s: CareerState) -> Self {
        StateRepr { w: s.w, a: s.a, m: s.m }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PreferencesRepr {
    lambda_w: f64,
    lambda_a: f64,
    lambda_m: f64,
}

/// Weights on the three axes. Always on the probability simplex;
/// `lambda_m` doubles as the altruism parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PreferencesRepr", into = "PreferencesRepr")]
pub struct Preferences {
    lambda_w: f64,
    lambda_a: f64,
    lambda_m: f64,
}

impl Preferences {
    pub fn new(lambda_w: f64, lambda_a: f64, lambda_m: f64) -> Result<Self> {
        check_range("lambda_w", lambda_w, 0.0, 1.0)?;
        check_range("lambda_a", lambda_a, 0.0, 1.0)?;
        check_range("lambda_m", lambda_m, 0.0, 1.0)?;
        let sum = lambda_w + lambda_a + lambda_m;
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::validation(
                "",
                format!("lambda_w + lambda_a + lambda_m must equal 1 (got {sum})"),
            ));
        }
        Ok(Self {
            lambda_w,
            lambda_a,
            lambda_m,
        })
    }

    pub fn lambda_w(&self) -> f64 {
        self.lambda_w
    }

    pub fn lambda_a(&self) -> f64 {
        self.lambda_a
    }

    pub fn lambda_m(&self) -> f64 {
        self.lambda_m
    }
}

impl Default for Preferences {
    fn default() -> Self {
        Self {
            lambda_w: 1.0 / 3.0,
            lambda_a: 1.0 / 3.0,
            lambda_m: 1.0 / 3.0,
        }
    }
}

impl TryFrom<PreferencesRepr> for Preferences {
    type Error = Error;

    fn try_from(r: PreferencesRepr) -> Result<Self> {
        Preferences::new(r.lambda_w, r.lambda_a, r.lambda_m)
    }
}

impl From<Preferences> for PreferencesRepr {
    fn from(p: Preferences) -> Self {
        PreferencesRepr {
            lambda_w: p.lambda_w,
            lambda_a: p.lambda_a,
            lambda_m: p.lambda_m,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ImpactRepr {
    scale: f64,
    neglectedness: f64,
    tractability: f64,
    personal_fit: f64,
}

/// Scale, neglectedness, tractability and personal fit, each rated on `[0, 5]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ImpactRepr", into = "ImpactRepr")]
pub struct ImpactFactors {
    scale: f64,
    neglectedness: f64,
    tractability: f64,
    personal_fit: f64,
}

impl ImpactFactors {
    pub fn new(scale: f64, neglectedness: f64, tractability: f64, personal_fit: f64) -> Result<Self> {
        check_range("scale", scale, 0.0, FACTOR_MAX)?;
        check_range("neglectedness", neglectedness, 0.0, FACTOR_MAX)?;
        check_range("tractability", tractability, 0.0, FACTOR_MAX)?;
        check_range("personal_fit", personal_fit, 0.0, FACTOR_MAX)?;
        Ok(Self {
            scale,
            neglectedness,
            tractability,
            personal_fit,
        })
    }

    pub fn zero() -> Self {
        Self {
            scale: 0.0,
            neglectedness: 0.0,
            tractability: 0.0,
            personal_fit: 0.0,
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn neglectedness(&self) -> f64 {
        self.neglectedness
    }

    pub fn tractability(&self) -> f64 {
        self.tractability
    }

    pub fn personal_fit(&self) -> f64 {
        self.personal_fit
    }
}

impl TryFrom<ImpactRepr> for ImpactFactors {
    type Error = Error;

    fn try_from(r: ImpactRepr) -> Result<Self> {
        ImpactFactors::new(r.scale, r.neglectedness, r.tractability, r.personal_fit)
    }
}

impl From<ImpactFactors> for ImpactRepr {
    fn from(f: ImpactFactors) -> Self {
        ImpactRepr {
            scale: f.scale,
            neglectedness: f.neglectedness,
            tractability: f.tractability,
            personal_fit: f.personal_fit,
        }
    }
}

/// Multiplicative counterfactual impact `S * N * T * F`, in `[0, 625]`.
pub fn impact_raw(factors: &ImpactFactors) -> f64 {
    factors.scale * factors.neglectedness * factors.tractability * factors.personal_fit
}

/// Rescales a raw impact product onto the `[0, 100]` meaning axis.
pub fn impact_to_meaning_score(raw: f64) -> Result<f64> {
    check_range("raw", raw, 0.0, IMPACT_RAW_MAX)?;
    Ok(AXIS_MAX * raw / IMPACT_RAW_MAX)
}

/// Meaning score of an impact rating; `impact_raw` followed by rescaling.
pub fn meaning_score(factors: &ImpactFactors) -> f64 {
    // a valid rating always lands inside [0, 625]
    AXIS_MAX * impact_raw(factors) / IMPACT_RAW_MAX
}

/// Weighted utility `lambda_w*W + lambda_a*A + lambda_m*M`.
pub fn utility(state: &CareerState, prefs: &Preferences) -> f64 {
    prefs.lambda_w * state.w + prefs.lambda_a * state.a + prefs.lambda_m * state.m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DominanceRelation {
    LeftDominates,
    RightDominates,
    Incomparable,
    Equal,
}

/// Pareto comparison: one side dominates when it is at least as high on
/// every axis and strictly higher on at least one.
pub fn dominates(a: &CareerState, b: &CareerState) -> DominanceRelation {
    let (mut a_better, mut b_better) = (false, false);
    for (x, y) in a.components().into_iter().zip(b.components()) {
        if x > y {
            a_better = true;
        } else if y > x {
            b_better = true;
        }
    }
    match (a_better, b_better) {
        (false, false) => DominanceRelation::Equal,
        (true, false) => DominanceRelation::LeftDominates,
        (false, true) => DominanceRelation::RightDominates,
        (true, true) => DominanceRelation::Incomparable,
    }
}

/// A labelled option, e.g. a role or a candidate career.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledState {
    pub label: String,
    pub state: CareerState,
}

impl LabeledState {
    pub fn new(label: impl Into<String>, state: CareerState) -> Self {
        Self {
            label: label.into(),
            state,
        }
    }
}

pub(crate) fn check_unique_labels<'a>(
    path: &str,
    labels: impl IntoIterator<Item = &'a str>,
) -> Result<()> {
    let mut seen = HashSet::new();
    for (i, label) in labels.into_iter().enumerate() {
        if !seen.insert(label) {
            return Err(Error::validation(
                format!("{path}[{i}]"),
                format!("duplicate label `{label}`"),
            ));
        }
    }
    Ok(())
}

/// Options not dominated by any other option, in input order. Identical
/// states never dominate each other, so duplicates survive together.
pub fn pareto_frontier(options: &[LabeledState]) -> Result<Vec<LabeledState>> {
    check_unique_labels("options", options.iter().map(|o| o.label.as_str()))?;

    // Sort indices by descending W; a dominator of option i always has
    // W >= W_i, so only the prefix up to the last index with W >= W_i needs
    // checking.
    let mut order: Vec<usize> = (0..options.len()).collect();
    order.sort_by(|&i, &j| options[j].state.w.total_cmp(&options[i].state.w));

    let mut dominated = vec![false; options.len()];
    for (rank, &i) in order.iter().enumerate() {
        let wi = options[i].state.w;
        for &j in order[..rank]
            .iter()
            .chain(order[rank + 1..].iter().take_while(|&&j| options[j].state.w >= wi))
        {
            if dominates(&options[j].state, &options[i].state) == DominanceRelation::LeftDominates {
                dominated[i] = true;
                break;
            }
        }
    }

    Ok(options
        .iter()
        .zip(dominated)
        .filter(|(_, d)| !d)
        .map(|(o, _)| o.clone())
        .collect())
}

/// Ceilings that saturate the wealth proxies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalizationConfig {
    /// Currency per year at which the income proxy saturates.
    pub income_ceiling: f64,
    /// Years of expenses at which the runway proxy saturates.
    pub runway_ceiling: f64,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        Self {
            income_ceiling: 200_000.0,
            runway_ceiling: 5.0,
        }
    }
}

impl NormalizationConfig {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("income_ceiling", self.income_ceiling),
            ("runway_ceiling", self.runway_ceiling),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::validation(
                    field,
                    format!("must be a finite positive number (got {v})"),
                ));
            }
        }
        Ok(())
    }

    /// Earnings-only wealth score: `100 * min(1, income / income_ceiling)`.
    pub fn income_score(&self, income: f64) -> f64 {
        AXIS_MAX * (income / self.income_ceiling).min(1.0)
    }
}

/// Raw, unnormalized proxies for each axis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawMeasures {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub income: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runway: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discretionary_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub impact_factors: Option<ImpactFactors>,
}

/// Maps raw proxies onto axis scores.
///
/// W blends income and runway 50/50 against their ceilings, A is the
/// discretionary fraction of work time, M comes from the impact rating.
pub fn normalize_axes(raw: &RawMeasures, config: &NormalizationConfig) -> Result<CareerState> {
    config.validate()?;
    let missing: Vec<&str> = [
        ("income", raw.income.is_none()),
        ("runway", raw.runway.is_none()),
        ("discretionary_fraction", raw.discretionary_fraction.is_none()),
        ("impact_factors", raw.impact_factors.is_none()),
    ]
    .into_iter()
    .filter_map(|(name, absent)| absent.then_some(name))
    .collect();
    if !missing.is_empty() {
        return Err(Error::validation(
            "",
            format!("missing proxies: {}", missing.join(", ")),
        ));
    }
    let (income, runway, fraction, impact) = (
        raw.income.unwrap_or_default(),
        raw.runway.unwrap_or_default(),
        raw.discretionary_fraction.unwrap_or_default(),
        raw.impact_factors.unwrap_or_else(ImpactFactors::zero),
    );
    check_nonnegative("income", income)?;
    check_nonnegative("runway", runway)?;
    check_range("discretionary_fraction", fraction, 0.0, 1.0)?;

    let blend = 0.5 * income / config.income_ceiling + 0.5 * runway / config.runway_ceiling;
    let w = AXIS_MAX * blend.min(1.0);
    let a = AXIS_MAX * fraction;
    let m = meaning_score(&impact);
    CareerState::new(w, a, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(w: f64, a: f64, m: f64) -> CareerState {
        CareerState::new(w, a, m).unwrap()
    }

    fn f(s: f64, n: f64, t: f64, p: f64) -> ImpactFactors {
        ImpactFactors::new(s, n, t, p).unwrap()
    }

    #[test]
    fn impact_worked_examples() {
        assert_eq!(impact_raw(&f(5.0, 1.0, 2.0, 2.0)), 20.0);
        assert_eq!(impact_raw(&f(2.0, 4.0, 4.0, 4.0)), 128.0);
        assert_eq!(impact_raw(&f(5.0, 3.0, 3.0, 4.0)), 180.0);
        assert_eq!(impact_raw(&f(5.0, 0.0, 5.0, 5.0)), 0.0);
    }

    #[test]
    fn impact_rejects_out_of_range_factor() {
        let err = ImpactFactors::new(5.0, 6.0, 1.0, 1.0).unwrap_err();
        assert_eq!(err.field_path(), Some("neglectedness"));
        assert!(ImpactFactors::new(-0.1, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn meaning_rescaling() {
        assert_eq!(impact_to_meaning_score(0.0).unwrap(), 0.0);
        assert_eq!(impact_to_meaning_score(625.0).unwrap(), 100.0);
        assert!((impact_to_meaning_score(180.0).unwrap() - 28.8).abs() < 1e-12);
        assert!(impact_to_meaning_score(625.5).is_err());
        assert!(impact_to_meaning_score(-1.0).is_err());
    }

    #[test]
    fn utility_examples() {
        let s = st(60.0, 40.0, 20.0);
        assert_eq!(utility(&s, &Preferences::new(1.0, 0.0, 0.0).unwrap()), 60.0);
        let u = utility(&s, &Preferences::new(0.5, 0.3, 0.2).unwrap());
        assert!((u - 46.0).abs() < 1e-12);
        assert_eq!(utility(&CareerState::origin(), &Preferences::default()), 0.0);
    }

    #[test]
    fn preferences_enforce_simplex() {
        assert!(Preferences::new(0.5, 0.3, 0.1).is_err());
        assert!(Preferences::new(0.5, 0.3, 0.2 + 5e-10).is_ok());
        assert!(Preferences::new(1.2, -0.2, 0.0).is_err());
    }

    #[test]
    fn dominance_examples() {
        use DominanceRelation::*;
        assert_eq!(dominates(&st(4.0, 3.0, 3.0), &st(3.0, 3.0, 3.0)), LeftDominates);
        assert_eq!(dominates(&st(3.0, 3.0, 3.0), &st(4.0, 3.0, 3.0)), RightDominates);
        assert_eq!(dominates(&st(3.0, 3.0, 3.0), &st(3.0, 3.0, 3.0)), Equal);
        assert_eq!(dominates(&st(5.0, 1.0, 1.0), &st(1.0, 5.0, 1.0)), Incomparable);
    }

    #[test]
    fn frontier_examples() {
        let opts = vec![
            LabeledState::new("a", st(4.0, 3.0, 3.0)),
            LabeledState::new("b", st(3.0, 3.0, 3.0)),
        ];
        let fr = pareto_frontier(&opts).unwrap();
        assert_eq!(fr, vec![opts[0].clone()]);

        let opts = vec![
            LabeledState::new("x", st(5.0, 1.0, 1.0)),
            LabeledState::new("y", st(1.0, 5.0, 1.0)),
            LabeledState::new("z", st(1.0, 1.0, 5.0)),
        ];
        assert_eq!(pareto_frontier(&opts).unwrap(), opts);
    }

    #[test]
    fn frontier_keeps_identical_states() {
        let opts = vec![
            LabeledState::new("a", st(4.0, 4.0, 4.0)),
            LabeledState::new("b", st(4.0, 4.0, 4.0)),
            LabeledState::new("c", st(1.0, 1.0, 1.0)),
        ];
        let labels: Vec<_> = pareto_frontier(&opts).unwrap().into_iter().map(|o| o.label).collect();
        assert_eq!(labels, ["a", "b"]);
    }

    #[test]
    fn frontier_rejects_duplicate_labels() {
        let opts = vec![
            LabeledState::new("a", st(4.0, 4.0, 4.0)),
            LabeledState::new("a", st(1.0, 4.0, 4.0)),
        ];
        let err = pareto_frontier(&opts).unwrap_err();
        assert_eq!(err.field_path(), Some("options[1]"));
    }

    #[test]
    fn normalization_examples() {
        let cfg = NormalizationConfig::default();
        let raw = |income, runway| RawMeasures {
            income: Some(income),
            runway: Some(runway),
            discretionary_fraction: Some(0.25),
            impact_factors: Some(f(5.0, 3.0, 3.0, 4.0)),
        };
        assert_eq!(normalize_axes(&raw(200_000.0, 5.0), &cfg).unwrap().w(), 100.0);
        assert_eq!(normalize_axes(&raw(0.0, 0.0), &cfg).unwrap().w(), 0.0);
        let s = normalize_axes(&raw(200_000.0, 0.0), &cfg).unwrap();
        assert_eq!(s.w(), 50.0);
        assert_eq!(s.a(), 25.0);
        assert!((s.m() - 28.8).abs() < 1e-12);
        // saturation past the ceilings
        assert_eq!(normalize_axes(&raw(1e7, 50.0), &cfg).unwrap().w(), 100.0);
    }

    #[test]
    fn normalization_lists_missing_fields() {
        let raw = RawMeasures {
            income: Some(1.0),
            ..Default::default()
        };
        let msg = normalize_axes(&raw, &NormalizationConfig::default())
            .unwrap_err()
            .to_string();
        assert!(msg.contains("runway"), "{msg}");
        assert!(msg.contains("discretionary_fraction"), "{msg}");
        assert!(msg.contains("impact_factors"), "{msg}");
        assert!(!msg.contains("income,"), "{msg}");
    }

    #[test]
    fn state_rejects_out_of_range() {
        assert_eq!(CareerState::new(0.0, 101.0, 0.0).unwrap_err().field_path(), Some("a"));
        assert!(CareerState::new(f64::NAN, 1.0, 0.0).is_err());
    }
}
