//! Gaussian naive Bayes baseline.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::classifier::svm::check_training_set;
use crate::classifier::SwbLabel;
use crate::error::{Error, Result};

pub const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    pub log_prior: f64,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
}

impl ClassStats {
    fn fit(rows: &[&Vec<f64>], total: usize) -> Self {
        let n = rows.len() as f64;
        let dim = rows[0].len();
        let mut mean = vec![0.0; dim];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(r.iter()) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut variance = vec![0.0; dim];
        for r in rows {
            for ((s, v), m) in variance.iter_mut().zip(r.iter()).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        variance
            .iter_mut()
            .for_each(|s| *s = (*s / n).max(VARIANCE_FLOOR));
        ClassStats {
            log_prior: (n / total as f64).ln(),
            mean,
            variance,
        }
    }

    fn log_joint(&self, x: &[f64]) -> f64 {
        self.log_prior
            + x.iter()
                .zip(&self.mean)
                .zip(&self.variance)
                .map(|((v, m), s)| -0.5 * (2.0 * PI * s).ln() - (v - m) * (v - m) / (2.0 * s))
                .sum::<f64>()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    pub low: ClassStats,
    pub high: ClassStats,
}

impl GaussianNb {
    pub fn dim(&self) -> usize {
        self.low.mean.len()
    }

    /// Normalized log-posteriors `(low, high)`.
    pub fn log_posterior(&self, x: &[f64]) -> Result<(f64, f64)> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "model expects {} features, got {}",
                self.dim(),
                x.len()
            )));
        }
        let low = self.low.log_joint(x);
        let high = self.high.log_joint(x);
        let top = low.max(high);
        let norm = top + ((low - top).exp() + (high - top).exp()).ln();
        Ok((low - norm, high - norm))
    }

    pub fn posterior_high(&self, x: &[f64]) -> Result<f64> {
        Ok(self.log_posterior(x)?.1.exp())
    }

    /// Log-posterior difference `log P(high|x) − log P(low|x)`.
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        let (low, high) = self.log_posterior(x)?;
        Ok(high - low)
    }

    pub fn predict(&self, x: &[f64]) -> Result<(SwbLabel, f64)> {
        let margin = self.decision(x)?;
        Ok((SwbLabel::from_margin(margin), margin))
    }
}

pub fn train_gaussian_nb(x: &[Vec<f64>], y: &[SwbLabel]) -> Result<GaussianNb> {
    check_training_set(x, y)?;
    let (high, low): (Vec<_>, Vec<_>) = x.iter().zip(y).partition(|(_, l)| l.is_high());
    let high: Vec<&Vec<f64>> = high.into_iter().map(|(r, _)| r).collect();
    let low: Vec<&Vec<f64>> = low.into_iter().map(|(r, _)| r).collect();
    Ok(GaussianNb {
        low: ClassStats::fit(&low, x.len()),
        high: ClassStats::fit(&high, x.len()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use SwbLabel::{High, Low};

    #[test]
    fn separated_clusters_are_learned() {
        let x: Vec<Vec<f64>> = [-10.2, -9.8, -10.0, -10.1, 9.9, 10.0, 10.3, 9.7]
            .iter()
            .map(|&v| vec![v])
            .collect();
        let y = [Low, Low, Low, Low, High, High, High, High];
        let nb = train_gaussian_nb(&x, &y).unwrap();
        for (r, l) in x.iter().zip(y) {
            assert_eq!(nb.predict(r).unwrap().0, l);
        }
    }

    #[test]
    fn identical_classes_give_even_posterior() {
        let x: Vec<Vec<f64>> = [1.0, 2.0, 3.0, 1.0, 2.0, 3.0].iter().map(|&v| vec![v, v * v]).collect();
        let y = [Low, Low, Low, High, High, High];
        let nb = train_gaussian_nb(&x, &y).unwrap();
        for probe in [[0.0, 0.0], [2.5, 1.0], [-4.0, 17.0]] {
            assert!((nb.posterior_high(&probe).unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn log_posterior_matches_density_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let x: Vec<Vec<f64>> = (0..12)
            .map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let y: Vec<SwbLabel> = (0..12).map(|i| if i % 3 == 0 { High } else { Low }).collect();
        let nb = train_gaussian_nb(&x, &y).unwrap();

        // direct formula: prior × Π normal densities, normalized
        let density = |stats: &ClassStats, probe: &[f64]| -> f64 {
            let mut p = stats.log_prior.exp();
            for j in 0..probe.len() {
                let (m, v) = (stats.mean[j], stats.variance[j]);
                p *= (-(probe[j] - m).powi(2) / (2.0 * v)).exp() / (2.0 * PI * v).sqrt();
            }
            p
        };
        for _ in 0..20 {
            let probe: Vec<f64> = (0..3).map(|_| rng.random_range(-1.5..1.5)).collect();
            let (pl, ph) = (density(&nb.low, &probe), density(&nb.high, &probe));
            let (ll, lh) = nb.log_posterior(&probe).unwrap();
            assert!((lh - (ph / (pl + ph)).ln()).abs() < 1e-9);
            assert!((ll - (pl / (pl + ph)).ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn variance_floor_and_errors() {
        let x = vec![vec![1.0], vec![1.0], vec![2.0]];
        let nb = train_gaussian_nb(&x, &[Low, Low, High]).unwrap();
        assert_eq!(nb.low.variance[0], VARIANCE_FLOOR);
        assert!(matches!(train_gaussian_nb(&x, &[Low, Low, Low]), Err(Error::SingleClassTrainingSet)));
    }
}
