//! Built-in career archetypes and the transition costs between them.
//!
//! Default scores and cost magnitudes are conventions, not measurements:
//! only the qualitative signatures and the direction of the cost asymmetry
//! are fixed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::CareerState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArchetypeName {
    IndustrialRnD,
    TenuredAcademia,
    VentureEntrepreneurship,
}

impl ArchetypeName {
    pub const ALL: [ArchetypeName; 3] = [
        ArchetypeName::IndustrialRnD,
        ArchetypeName::TenuredAcademia,
        ArchetypeName::VentureEntrepreneurship,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ArchetypeName::IndustrialRnD => "IndustrialRnD",
            ArchetypeName::TenuredAcademia => "TenuredAcademia",
            ArchetypeName::VentureEntrepreneurship => "VentureEntrepreneurship",
        }
    }
}

impl fmt::Display for ArchetypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ArchetypeName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ArchetypeName::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::validation("archetype", format!("unknown archetype `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    Low,
    Mid,
    High,
    VeryHigh,
}

/// Score assigned to each qualitative level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelScale {
    pub low: f64,
    pub mid: f64,
    pub high: f64,
    pub very_high: f64,
}

impl Default for LevelScale {
    fn default() -> Self {
        Self {
            low: 25.0,
            mid: 50.0,
            high: 75.0,
            very_high: 90.0,
        }
    }
}

impl LevelScale {
    pub fn validate(&self) -> Result<()> {
        let v = [self.low, self.mid, self.high, self.very_high];
        if v.iter().any(|x| !(0.0..=100.0).contains(x)) || v.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::validation(
                "levels",
                "level scores must lie in [0, 100] and strictly increase Low < Mid < High < VeryHigh",
            ));
        }
        Ok(())
    }

    pub fn score(&self, level: Level) -> f64 {
        match level {
            Level::Low => self.low,
            Level::Mid => self.mid,
            Level::High => self.high,
            Level::VeryHigh => self.very_high,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchetypeEntry {
    pub name: ArchetypeName,
    /// Qualitative level on (W, A, M).
    pub signature: [Level; 3],
    pub default_state: CareerState,
    pub variance_note: String,
}

fn signature(name: ArchetypeName) -> [Level; 3] {
    use Level::*;
    match name {
        ArchetypeName::IndustrialRnD => [High, Mid, Low],
        ArchetypeName::TenuredAcademia => [Low, High, High],
        ArchetypeName::VentureEntrepreneurship => [VeryHigh, High, High],
    }
}

fn variance_note(name: ArchetypeName) -> &'static str {
    match name {
        ArchetypeName::IndustrialRnD => {
            "high compensation and leadership control; impact channelled through profit-oriented objectives"
        }
        ArchetypeName::TenuredAcademia => {
            "research autonomy and public-good impact at below-industry pay"
        }
        ArchetypeName::VentureEntrepreneurship => {
            "high variance, right-skewed outcomes: median well below mean; model the downside in the strategy scenario"
        }
    }
}

pub fn archetype_with(name: ArchetypeName, scale: &LevelScale) -> Result<ArchetypeEntry> {
    scale.validate()?;
    let sig = signature(name);
    Ok(ArchetypeEntry {
        name,
        signature: sig,
        default_state: CareerState::new(scale.score(sig[0]), scale.score(sig[1]), scale.score(sig[2]))?,
        variance_note: variance_note(name).to_string(),
    })
}

/// Archetype entry under the default level scale.
pub fn archetype(name: ArchetypeName) -> ArchetypeEntry {
    let sig = signature(name);
    let scale = LevelScale::default();
    ArchetypeEntry {
        name,
        signature: sig,
        default_state: CareerState::clamped(scale.score(sig[0]), scale.score(sig[1]), scale.score(sig[2])),
        variance_note: variance_note(name).to_string(),
    }
}

pub fn archetype_table() -> Vec<ArchetypeEntry> {
    ArchetypeName::ALL.into_iter().map(archetype).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionCost {
    pub from: ArchetypeName,
    pub to: ArchetypeName,
    /// Wealth-score points lost on the move.
    pub w_cost: f64,
    /// Capital needed before the move is open.
    pub min_w_gate: f64,
    pub note: String,
}

/// Default cost of moving between archetypes. Asymmetric on purpose:
/// industry to academia means a pay cut plus credentialing, the way back
/// mostly costs purpose.
pub fn transition_cost(from: ArchetypeName, to: ArchetypeName) -> TransitionCost {
    use ArchetypeName::*;
    let (w_cost, min_w_gate, note) = match (from, to) {
        (a, b) if a == b => (0.0, 0.0, "no transition"),
        (IndustrialRnD, TenuredAcademia) => (30.0, 60.0, "substantial pay cut and credentialing"),
        (TenuredAcademia, IndustrialRnD) => (5.0, 0.0, "earnings restored at the expense of purpose"),
        (_, VentureEntrepreneurship) | (VentureEntrepreneurship, _) => (
            10.0,
            0.0,
            "outcome variance is modelled in the strategy scenario, not in this cost",
        ),
        _ => unreachable!("all archetype pairs are covered"),
    };
    TransitionCost {
        from,
        to,
        w_cost,
        min_w_gate,
        note: note.to_string(),
    }
}

pub fn transition_matrix() -> Vec<TransitionCost> {
    ArchetypeName::ALL
        .into_iter()
        .flat_map(|from| ArchetypeName::ALL.into_iter().map(move |to| transition_cost(from, to)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ArchetypeName::*;

    #[test]
    fn signatures() {
        assert_eq!(archetype(IndustrialRnD).signature, [Level::High, Level::Mid, Level::Low]);
        assert_eq!(archetype(TenuredAcademia).signature, [Level::Low, Level::High, Level::High]);
        assert_eq!(
            archetype(VentureEntrepreneurship).signature,
            [Level::VeryHigh, Level::High, Level::High]
        );
    }

    #[test]
    fn default_states_follow_level_order() {
        for entry in archetype_table() {
            let scores = entry.default_state.components();
            for (i, level) in entry.signature.iter().enumerate() {
                assert_eq!(scores[i], LevelScale::default().score(*level));
            }
        }
        let s = LevelScale::default();
        assert!(s.low < s.mid && s.mid < s.high && s.high < s.very_high);
        assert_eq!(archetype(VentureEntrepreneurship).default_state.w(), 90.0);
    }

    #[test]
    fn custom_scale_must_be_increasing() {
        let bad = LevelScale { low: 50.0, mid: 50.0, high: 75.0, very_high: 90.0 };
        assert!(archetype_with(IndustrialRnD, &bad).is_err());
        let ok = LevelScale { low: 10.0, mid: 30.0, high: 60.0, very_high: 95.0 };
        assert_eq!(archetype_with(TenuredAcademia, &ok).unwrap().default_state.w(), 10.0);
    }

    #[test]
    fn costs() {
        assert_eq!(transition_cost(IndustrialRnD, IndustrialRnD).w_cost, 0.0);
        assert!(
            transition_cost(IndustrialRnD, TenuredAcademia).w_cost
                > transition_cost(TenuredAcademia, IndustrialRnD).w_cost
        );
        assert_eq!(transition_cost(IndustrialRnD, TenuredAcademia).min_w_gate, 60.0);
        assert_eq!(transition_cost(TenuredAcademia, VentureEntrepreneurship).w_cost, 10.0);
        let m = transition_matrix();
        assert_eq!(m.len(), 9);
        for from in ArchetypeName::ALL {
            for to in ArchetypeName::ALL {
                assert!(m.iter().any(|c| c.from == from && c.to == to));
            }
        }
    }

    #[test]
    fn names_parse() {
        assert_eq!("tenuredacademia".parse::<ArchetypeName>().unwrap(), TenuredAcademia);
        assert!("Astronaut".parse::<ArchetypeName>().is_err());
    }
}
