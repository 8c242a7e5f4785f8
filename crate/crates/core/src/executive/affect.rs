//! Affective state and the signal-to-affect threshold table.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AnxietyLevel {
    #[default]
    Low,
    Medium,
    High,
}

impl AnxietyLevel {
    pub const ALL: [AnxietyLevel; 3] = [AnxietyLevel::Low, AnxietyLevel::Medium, AnxietyLevel::High];

    pub fn as_str(self) -> &'static str {
        match self {
            AnxietyLevel::Low => "low",
            AnxietyLevel::Medium => "medium",
            AnxietyLevel::High => "high",
        }
    }

    /// Low and medium count as acceptable anxiety for a procedure step.
    pub fn is_ok(self) -> bool {
        self != AnxietyLevel::High
    }

    /// Moves by `delta` levels, saturating at both ends.
    pub fn shifted(self, delta: i32) -> AnxietyLevel {
        let i = (self as i32 + delta).clamp(0, 2);
        AnxietyLevel::ALL[i as usize]
    }
}

impl fmt::Display for AnxietyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for AnxietyLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AnxietyLevel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown anxiety level `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Engagement {
    #[default]
    Low,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct AffectiveState {
    pub anxiety: AnxietyLevel,
    pub engagement: Engagement,
    /// In [-1, 1].
    pub valence: f64,
    /// In [0, 1].
    pub arousal: f64,
}

impl AffectiveState {
    pub fn new(anxiety: AnxietyLevel, engagement: Engagement, valence: f64, arousal: f64) -> Self {
        AffectiveState {
            anxiety,
            engagement,
            valence: clamp(valence, -1.0, 1.0),
            arousal: clamp(arousal, 0.0, 1.0),
        }
    }
}

fn clamp(x: f64, lo: f64, hi: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(lo, hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Attention {
    OnRobot,
    OnCarer,
    OnProcedure,
    #[default]
    Away,
}

pub const EXPRESSIONS: [&str; 6] = ["happiness", "sadness", "fear", "anger", "surprise", "neutral"];

/// Features from the vision pipeline (or the patient simulator).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct SimulatedSignals {
    /// Probabilities in `EXPRESSIONS` order.
    pub expression: [f64; 6],
    pub attention: Attention,
    /// Normalized units, >= 0.
    pub head_speed: f64,
}

impl SimulatedSignals {
    pub fn happiness(&self) -> f64 {
        self.expression[0]
    }

    /// Sadness + fear + anger.
    pub fn negative(&self) -> f64 {
        self.expression[1] + self.expression[2] + self.expression[3]
    }

    pub fn surprise(&self) -> f64 {
        self.expression[4]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AffectThresholds {
    /// Negative-expression mass at which anxiety is high on its own.
    pub high_negative: f64,
    /// Negative-expression mass at which anxiety is at least medium.
    pub medium_negative: f64,
    /// Head speed at which the child counts as restless.
    pub restless_speed: f64,
}

impl Default for AffectThresholds {
    fn default() -> Self {
        AffectThresholds {
            high_negative: 0.5,
            medium_negative: 0.25,
            restless_speed: 1.0,
        }
    }
}

/// Maps signal features to an affective state through the threshold table.
///
/// anxiety: high if negative >= high_negative, or negative >= medium_negative
/// while restless; medium if either holds alone; low otherwise.
/// engagement: high iff attention is on the robot and the child is not restless.
pub fn estimate(signals: &SimulatedSignals, t: &AffectThresholds) -> AffectiveState {
    let neg = signals.negative();
    let speed = if signals.head_speed.is_finite() { signals.head_speed.max(0.0) } else { 0.0 };
    let restless = speed >= t.restless_speed;
    let anxiety = if neg >= t.high_negative || (neg >= t.medium_negative && restless) {
        AnxietyLevel::High
    } else if neg >= t.medium_negative || restless {
        AnxietyLevel::Medium
    } else {
        AnxietyLevel::Low
    };
    let engagement = if signals.attention == Attention::OnRobot && !restless {
        Engagement::High
    } else {
        Engagement::Low
    };
    let agitation = signals.expression[2] + signals.expression[3] + signals.surprise();
    let motion = if t.restless_speed > 0.0 { (speed / (2.0 * t.restless_speed)).min(1.0) } else { 0.0 };
    AffectiveState::new(
        anxiety,
        engagement,
        signals.happiness() - neg,
        0.6 * agitation + 0.4 * motion,
    )
}
