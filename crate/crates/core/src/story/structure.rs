use rand::Rng;
use serde::{Deserialize, Serialize};

use super::StoryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureKind {
    FamiliarToDiverse,
    DiverseToFamiliar,
    TypicalToUntypical,
    UntypicalToTypical,
}

impl StructureKind {
    /// Structures moving between familiar and diverse zones.
    pub fn is_familiarity(&self) -> bool {
        matches!(self, StructureKind::FamiliarToDiverse | StructureKind::DiverseToFamiliar)
    }

    /// Whether the story starts in the familiar (or typical) zone.
    pub fn starts_primary(&self) -> bool {
        matches!(self, StructureKind::FamiliarToDiverse | StructureKind::TypicalToUntypical)
    }
}

/// Preference targets, both in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preferences {
    /// Familiar preference `f`.
    pub familiar: f64,
    /// Typical preference `t`.
    pub typical: f64,
}

impl Default for Preferences {
    fn default() -> Self {
        Preferences {
            familiar: 0.5,
            typical: 0.5,
        }
    }
}

impl Preferences {
    pub fn new(familiar: f64, typical: f64) -> Result<Self, StoryError> {
        let p = Preferences { familiar, typical };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<(), StoryError> {
        for (name, value) in [("f", self.familiar), ("t", self.typical)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(StoryError::InvalidPreference { name, value });
            }
        }
        Ok(())
    }
}

/// The two structures allowed by the preferences.
pub fn candidate_structures(prefs: Preferences) -> [StructureKind; 2] {
    [
        if prefs.familiar >= 0.5 {
            StructureKind::FamiliarToDiverse
        } else {
            StructureKind::DiverseToFamiliar
        },
        if prefs.typical >= 0.5 {
            StructureKind::TypicalToUntypical
        } else {
            StructureKind::UntypicalToTypical
        },
    ]
}

/// Picks one of the two candidate structures uniformly.
pub fn choose_structure<R: Rng + ?Sized>(prefs: Preferences, rng: &mut R) -> Result<StructureKind, StoryError> {
    prefs.check()?;
    let pair = candidate_structures(prefs);
    Ok(pair[rng.random_range(0..2)])
}

/// `⌈x·T⌉`, tolerant of representation error in `x·T`.
fn ceil_share(x: f64, length: usize) -> usize {
    let v = (x * length as f64 - 1e-9).ceil();
    (v.max(0.0) as usize).min(length)
}

/// Event counts `(primary, secondary)`: familiar and diverse for familiarity
/// structures, typical and un-typical for typicality structures.
pub fn sample_counts(prefs: Preferences, length: usize, kind: StructureKind) -> (usize, usize) {
    let share = if kind.is_familiarity() {
        prefs.familiar
    } else {
        prefs.typical
    };
    let primary = ceil_share(share, length);
    (primary, length - primary)
}
