//! Accuracy, Cohen's kappa and rank AUC for binary SWB predictions.

use serde::{Deserialize, Serialize};

use crate::classifier::SwbLabel;
use crate::error::{Error, Result};

/// Binary confusion counts, with high as the positive class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tp: u64,
}

impl Confusion {
    pub fn new(tn: u64, fp: u64, fn_: u64, tp: u64) -> Self {
        Confusion { tn, fp, fn_, tp }
    }

    pub fn from_predictions(truth: &[SwbLabel], predicted: &[SwbLabel]) -> Self {
        debug_assert_eq!(truth.len(), predicted.len());
        let mut c = Confusion::default();
        for (t, p) in truth.iter().zip(predicted) {
            match (t, p) {
                (SwbLabel::Low, SwbLabel::Low) => c.tn += 1,
                (SwbLabel::Low, SwbLabel::High) => c.fp += 1,
                (SwbLabel::High, SwbLabel::Low) => c.fn_ += 1,
                (SwbLabel::High, SwbLabel::High) => c.tp += 1,
            }
        }
        c
    }

    pub fn total(&self) -> u64 {
        self.tn + self.fp + self.fn_ + self.tp
    }

    pub fn accuracy(&self) -> f64 {
        let n = self.total();
        if n == 0 {
            return 0.0;
        }
        (self.tn + self.tp) as f64 / n as f64
    }
}

/// `(p_o − p_e) / (1 − p_e)` with `p_e` from the product of the marginals.
/// Returns 0 when chance agreement is already perfect.
pub fn cohen_kappa(c: &Confusion) -> f64 {
    let n = c.total() as f64;
    if n == 0.0 {
        return 0.0;
    }
    let observed = (c.tn + c.tp) as f64 / n;
    let predicted_high = (c.tp + c.fp) as f64;
    let actual_high = (c.tp + c.fn_) as f64;
    let predicted_low = (c.tn + c.fn_) as f64;
    let actual_low = (c.tn + c.fp) as f64;
    let expected = (predicted_high * actual_high + predicted_low * actual_low) / (n * n);
    if expected >= 1.0 {
        return 0.0;
    }
    (observed - expected) / (1.0 - expected)
}

/// Mann–Whitney AUC: the fraction of (high, low) pairs where the high sample
/// scores above the low one, ties counting one half.
///
/// Computed from mid-ranks in `O(n log n)`.
pub fn auc_rank(scores: &[f64], labels: &[SwbLabel]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: labels.len(),
            actual: scores.len(),
        });
    }
    let highs = labels.iter().filter(|l| l.is_high()).count();
    let lows = labels.len() - highs;
    if highs == 0 || lows == 0 {
        return Err(Error::SingleClassInput);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Sum of 1-based mid-ranks of the high samples.
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let mid_rank = (i + 1 + j) as f64 / 2.0;
        rank_sum += mid_rank * order[i..j].iter().filter(|&&k| labels[k].is_high()).count() as f64;
        i = j;
    }

    let highs = highs as f64;
    let u = rank_sum - highs * (highs + 1.0) / 2.0;
    Ok(u / (highs * lows as f64))
}
