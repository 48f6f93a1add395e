//! Couplings between the axes: capital growth, the capital-funded autonomy
//! cap, both control traps, mission gating by capital, and the
//! meaning-driven autonomy stabilizer.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_nonnegative, check_range, Error, Result};
use crate::model::{ImpactFactors, AXIS_MAX};

/// How the labour market converts capital into fundable autonomy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarketStructure {
    /// Smooth scaling: `cap = 100 * (w / 100)^gamma`.
    Auction { gamma: f64 },
    /// Step function: `low_cap` below `threshold_w`, `high_cap` at or above.
    WinnerTakeAll {
        threshold_w: f64,
        low_cap: f64,
        high_cap: f64,
    },
}

impl Default for MarketStructure {
    fn default() -> Self {
        MarketStructure::Auction { gamma: 1.0 }
    }
}

impl MarketStructure {
    pub fn validate(&self) -> Result<()> {
        match *self {
            MarketStructure::Auction { gamma } => {
                if !gamma.is_finite() || gamma <= 0.0 {
                    return Err(Error::validation(
                        "gamma",
                        format!("must be a finite positive number (got {gamma})"),
                    ));
                }
            }
            MarketStructure::WinnerTakeAll {
                threshold_w,
                low_cap,
                high_cap,
            } => {
                check_range("threshold_w", threshold_w, 0.0, AXIS_MAX)?;
                check_range("low_cap", low_cap, 0.0, AXIS_MAX)?;
                check_range("high_cap", high_cap, 0.0, AXIS_MAX)?;
                if low_cap > high_cap {
                    return Err(Error::validation(
                        "low_cap",
                        format!("must not exceed high_cap ({low_cap} > {high_cap})"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Parameters of the logistic capital-growth law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrowthModel {
    /// Learning rate per year at full practice quality.
    pub eta: f64,
    /// Effective capital used for the growth rate when actual capital is lower.
    pub floor_w: f64,
}

impl Default for GrowthModel {
    fn default() -> Self {
        Self {
            eta: 0.3,
            floor_w: 1.0,
        }
    }
}

impl GrowthModel {
    pub fn validate(&self) -> Result<()> {
        if !self.eta.is_finite() || self.eta <= 0.0 {
            return Err(Error::validation(
                "eta",
                format!("must be a finite positive number (got {})", self.eta),
            ));
        }
        if !(self.floor_w > 0.0 && self.floor_w < AXIS_MAX) {
            return Err(Error::validation(
                "floor_w",
                format!("must lie strictly between 0 and 100 (got {})", self.floor_w),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingParams {
    /// Capital level from which an employer treats the person as too
    /// critical to release autonomy. `None` disables the second-trap check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_star_trap: Option<f64>,
    /// Strength of the meaning bonus on the autonomy cap.
    pub beta_meaning: f64,
    /// Fraction of capital lost per year spent in the first control trap.
    pub delta_instability: f64,
}

impl Default for CouplingParams {
    fn default() -> Self {
        Self {
            w_star_trap: None,
            beta_meaning: 0.5,
            delta_instability: 0.15,
        }
    }
}

impl CouplingParams {
    pub fn validate(&self) -> Result<()> {
        if let Some(w_star) = self.w_star_trap {
            check_range("w_star_trap", w_star, 0.0, AXIS_MAX)?;
        }
        check_nonnegative("beta_meaning", self.beta_meaning)?;
        check_range("delta_instability", self.delta_instability, 0.0, 1.0)
    }
}

/// A high-impact mission that opens up once capital reaches `min_w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mission {
    pub id: String,
    pub min_w: f64,
    pub impact: ImpactFactors,
}

impl Mission {
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::validation("id", "must not be empty"));
        }
        check_range("min_w", self.min_w, 0.0, AXIS_MAX)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrapKind {
    None,
    FirstTrap,
    SecondTrap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BindingConstraint {
    None,
    MarketViability,
    OrganizationalResistance,
}

impl fmt::Display for BindingConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BindingConstraint::None => "none",
            BindingConstraint::MarketViability => "market viability",
            BindingConstraint::OrganizationalResistance => "organizational resistance",
        })
    }
}

/// Outcome of a control-trap check. The trap kind fixes the binding
/// constraint, so the two are only constructed together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapReport {
    pub trap: TrapKind,
    pub binding_constraint: BindingConstraint,
    pub detail: String,
}

impl TrapReport {
    pub fn none() -> Self {
        Self {
            trap: TrapKind::None,
            binding_constraint: BindingConstraint::None,
            detail: String::new(),
        }
    }

    fn first(attempted: f64, cap: f64) -> Self {
        Self {
            trap: TrapKind::FirstTrap,
            binding_constraint: BindingConstraint::MarketViability,
            detail: format!(
                "attempted autonomy {attempted} exceeds the capital-funded cap {cap}: financial instability"
            ),
        }
    }

    fn second(w: f64, w_star: f64, requested: f64, granted: f64) -> Self {
        Self {
            trap: TrapKind::SecondTrap,
            binding_constraint: BindingConstraint::OrganizationalResistance,
            detail: format!(
                "capital {w} >= {w_star} but granted autonomy {granted} < requested {requested}: organizational resistance"
            ),
        }
    }

    pub fn is_trap(&self) -> bool {
        self.trap != TrapKind::None
    }
}

/// Upper bound on autonomy the market will fund at capital `w`.
pub fn feasible_autonomy_cap(w: f64, market: &MarketStructure) -> f64 {
    match *market {
        MarketStructure::Auction { gamma } => AXIS_MAX * (w / AXIS_MAX).powf(gamma),
        MarketStructure::WinnerTakeAll {
            threshold_w,
            low_cap,
            high_cap,
        } => {
            if w < threshold_w {
                low_cap
            } else {
                high_cap
            }
        }
    }
}

/// Autonomy cap raised by meaning: `min(100, base * (1 + beta * m / 100))`.
pub fn stabilized_autonomy_cap(base_cap: f64, m: f64, params: &CouplingParams) -> f64 {
    (base_cap * (1.0 + params.beta_meaning * m / AXIS_MAX)).min(AXIS_MAX)
}

/// First trap against an already computed cap; reaching the cap exactly is
/// still feasible.
pub(crate) fn first_trap_against(a_attempted: f64, cap: f64) -> TrapReport {
    if a_attempted > cap {
        TrapReport::first(a_attempted, cap)
    } else {
        TrapReport::none()
    }
}

/// Autonomy attempted beyond what capital can fund.
pub fn detect_first_control_trap(a_attempted: f64, w: f64, market: &MarketStructure) -> TrapReport {
    first_trap_against(a_attempted, feasible_autonomy_cap(w, market))
}

/// Capital high enough to make the person critical while the employer
/// grants less autonomy than requested. Disabled when `w_star_trap` is unset.
pub fn detect_second_control_trap(
    w: f64,
    params: &CouplingParams,
    a_requested: f64,
    a_granted: f64,
) -> TrapReport {
    match params.w_star_trap {
        Some(w_star) if w >= w_star && a_requested > a_granted => {
            TrapReport::second(w, w_star, a_requested, a_granted)
        }
        _ => TrapReport::none(),
    }
}

/// Missions unlocked at capital `w`, in catalog order.
pub fn mission_set<'a>(w: f64, catalog: &'a [Mission]) -> Vec<&'a Mission> {
    catalog.iter().filter(|m| m.min_w <= w).collect()
}

/// One step of capital growth scaled by practice quality:
/// `w + eta * q * w_eff * (1 - w_eff / 100)^2 * dt`.
///
/// Growth is amplified by existing capital and flattens with the squared
/// headroom near the skill ceiling. The rate uses `w_eff = max(w, floor_w)`
/// so that zero capital is not absorbing; with `quality == 0` the capital is
/// returned unchanged.
pub fn capital_growth_step(w: f64, quality: f64, model: &GrowthModel, dt: f64) -> Result<f64> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::validation("dt", format!("must be positive (got {dt})")));
    }
    check_range("w", w, 0.0, AXIS_MAX)?;
    check_range("practice_quality", quality, 0.0, 1.0)?;
    let w_eff = w.max(model.floor_w);
    let headroom = 1.0 - w_eff / AXIS_MAX;
    let growth = model.eta * quality * w_eff * headroom * headroom * dt;
    Ok((w + growth).clamp(0.0, AXIS_MAX))
}
