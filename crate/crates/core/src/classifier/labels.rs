use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::median_in_place;

/// Life-satisfaction rating on the 1–10 scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct WellbeingScore(u8);

impl WellbeingScore {
    pub const MIN: u8 = 1;
    pub const MAX: u8 = 10;

    pub fn new(value: u8) -> Result<Self> {
        if (Self::MIN..=Self::MAX).contains(&value) {
            Ok(WellbeingScore(value))
        } else {
            Err(Error::InvalidConfig(format!("wellbeing score {value} outside [1, 10]")))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for WellbeingScore {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        WellbeingScore::new(v)
    }
}

impl From<WellbeingScore> for u8 {
    fn from(s: WellbeingScore) -> u8 {
        s.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwbLabel {
    Low = 0,
    High = 1,
}

impl SwbLabel {
    pub fn from_margin(margin: f64) -> Self {
        // Boundary ties go to high.
        if margin >= 0.0 {
            SwbLabel::High
        } else {
            SwbLabel::Low
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            SwbLabel::Low => -1.0,
            SwbLabel::High => 1.0,
        }
    }

    pub fn is_high(self) -> bool {
        self == SwbLabel::High
    }
}

impl fmt::Display for SwbLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SwbLabel::Low => "low",
            SwbLabel::High => "high",
        })
    }
}

/// Median split: a score at or above the sample median is high.
///
/// Returns the labels with the threshold used.
pub fn binarize_swb(scores: &[WellbeingScore]) -> Result<(Vec<SwbLabel>, f64)> {
    if scores.len() < 2 {
        return Err(Error::DegenerateSplit(format!(
            "need at least 2 scores, got {}",
            scores.len()
        )));
    }
    let mut values: Vec<f64> = scores.iter().map(|s| f64::from(s.value())).collect();
    let threshold = median_in_place(&mut values);
    let labels: Vec<SwbLabel> = scores
        .iter()
        .map(|s| {
            if f64::from(s.value()) >= threshold {
                SwbLabel::High
            } else {
                SwbLabel::Low
            }
        })
        .collect();
    let highs = labels.iter().filter(|l| l.is_high()).count();
    if highs == 0 || highs == labels.len() {
        return Err(Error::DegenerateSplit(format!(
            "every score falls on one side of the median {threshold}"
        )));
    }
    Ok((labels, threshold))
}
