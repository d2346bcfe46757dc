use crate::dd::Variable;
use crate::error::{Error, Result};

use super::{Feature, NaiveBayes};

/// How missing feature values are treated during training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    /// Leave the value out of the counts.
    #[default]
    Skip,
    /// The caller has already mapped missing entries to a real value.
    AsValue,
}

/// Labelled rows over discrete features. `None` marks a missing value.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Vec<Variable>,
    pub rows: Vec<(Vec<Option<usize>>, bool)>,
}

/// Maximum-likelihood naive Bayes with additive smoothing `k`; records the
/// accuracy on the training rows (missing values marginalized out).
pub fn train_naive_bayes(data: &Dataset, smoothing: f64, threshold: f64) -> Result<NaiveBayes> {
    if smoothing.is_nan() || smoothing < 0.0 {
        return Err(Error::Training(format!(
            "smoothing {smoothing} must be nonnegative"
        )));
    }
    if data.rows.is_empty() {
        return Err(Error::Training("empty dataset".into()));
    }
    let n = data.features.len();
    let positives = data.rows.iter().filter(|(_, y)| *y).count();
    let negatives = data.rows.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::Training("dataset contains a single class".into()));
    }
    let mut counts: Vec<[Vec<f64>; 2]> = data
        .features
        .iter()
        .map(|f| [vec![0.0; f.domain_size()], vec![0.0; f.domain_size()]])
        .collect();
    for (r, (values, label)) in data.rows.iter().enumerate() {
        if values.len() != n {
            return Err(Error::Training(format!(
                "row {r} has {} values, expected {n}",
                values.len()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if let Some(v) = *v {
                if v >= data.features[i].domain_size() {
                    return Err(Error::Training(format!("row {r}: value {v} out of domain")));
                }
                counts[i][usize::from(*label)][v] += 1.0;
            }
        }
    }
    let features = data
        .features
        .iter()
        .zip(&counts)
        .map(|(f, [neg, pos])| Feature {
            name: f.name.clone(),
            labels: f.labels.clone(),
            given_pos: smooth(pos, smoothing),
            given_neg: smooth(neg, smoothing),
        })
        .collect::<Vec<_>>();
    for f in &features {
        if f.given_pos.iter().chain(&f.given_neg).any(|p| p.is_nan()) {
            return Err(Error::Training(format!(
                "feature {} is never observed in one class and smoothing is 0",
                f.name
            )));
        }
    }
    let prior = (positives as f64 + smoothing) / (data.rows.len() as f64 + 2.0 * smoothing);
    let mut nb = NaiveBayes::new(prior, threshold, features)?;
    let w = nb.raw_weights();
    let correct = data
        .rows
        .iter()
        .filter(|(values, label)| {
            let lo = nb.log_odds_partial(values);
            !lo.is_nan() && (lo >= w.threshold) == *label
        })
        .count();
    nb.set_training_accuracy(correct as f64 / data.rows.len() as f64);
    Ok(nb)
}

fn smooth(counts: &[f64], k: f64) -> Vec<f64> {
    let total: f64 = counts.iter().sum::<f64>() + k * counts.len() as f64;
    counts.iter().map(|c| (c + k) / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(rows: &[(usize, bool)]) -> Dataset {
        Dataset {
            features: vec![Variable::binary("X")],
            rows: rows.iter().map(|&(v, y)| (vec![Some(v)], y)).collect(),
        }
    }

    #[test]
    fn laplace_smoothing_by_hand() {
        let d = data(&[(1, true), (1, true), (0, false), (0, false)]);
        let nb = train_naive_bayes(&d, 1.0, 0.5).unwrap();
        assert!((nb.features()[0].given_pos[1] - 0.75).abs() < 1e-15);
        assert!((nb.prior() - 0.5).abs() < 1e-15);
        assert_eq!(nb.training_accuracy(), Some(1.0));
    }

    #[test]
    fn unsmoothed_unseen_value_is_zero() {
        let d = data(&[(1, true), (1, true), (0, false), (1, false)]);
        let nb = train_naive_bayes(&d, 0.0, 0.5).unwrap();
        assert_eq!(nb.features()[0].given_pos[0], 0.0);
        assert_eq!(nb.features()[0].weight(0), f64::NEG_INFINITY);
    }

    #[test]
    fn degenerate_datasets() {
        assert!(matches!(
            train_naive_bayes(&data(&[]), 1.0, 0.5),
            Err(Error::Training(_))
        ));
        assert!(matches!(
            train_naive_bayes(&data(&[(1, true), (0, true)]), 1.0, 0.5),
            Err(Error::Training(_))
        ));
    }

    #[test]
    fn missing_values_are_skipped() {
        let mut d = data(&[(1, true), (0, false)]);
        d.rows.push((vec![None], true));
        let nb = train_naive_bayes(&d, 0.0, 0.5).unwrap();
        assert_eq!(nb.features()[0].given_pos, vec![0.0, 1.0]);
        assert!((nb.prior() - 2.0 / 3.0).abs() < 1e-15);
    }
}
