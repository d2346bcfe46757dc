use crate::dd::{Instance, Variable, VariableTable};
use crate::error::{Error, Result};

use super::{check_distribution, check_threshold};

/// A feature with its class-conditional distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct Feature {
    pub name: String,
    pub labels: Vec<String>,
    /// `Pr(X = v | c)`
    pub given_pos: Vec<f64>,
    /// `Pr(X = v | c̄)`
    pub given_neg: Vec<f64>,
}

impl Feature {
    /// Binary feature from its false-positive rate `fp = Pr(X = + | c̄)` and
    /// false-negative rate `fn = Pr(X = - | c)`. Value 0 is `-`, value 1 is `+`.
    pub fn from_rates(name: impl Into<String>, fp: f64, fn_: f64) -> Feature {
        Feature {
            name: name.into(),
            labels: vec!["-".to_string(), "+".to_string()],
            given_pos: vec![fn_, 1.0 - fn_],
            given_neg: vec![1.0 - fp, fp],
        }
    }

    /// Log-likelihood ratio of value `v`.
    pub fn weight(&self, v: usize) -> f64 {
        self.given_pos[v].ln() - self.given_neg[v].ln()
    }
}

/// Naive Bayes classifier: a class prior, one CPT pair per feature and a
/// decision threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayes {
    prior: f64,
    threshold: f64,
    features: Vec<Feature>,
    training_accuracy: Option<f64>,
}

/// Log-odds form of the decision rule: `decide(x) = 1` iff
/// `prior + Σ features[i][x_i] ≥ threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogOddsWeights {
    pub prior: f64,
    pub threshold: f64,
    pub features: Vec<Vec<f64>>,
}

impl LogOddsWeights {
    pub fn decide(&self, x: &Instance) -> Result<bool> {
        let total = self.score(x);
        if total.is_nan() {
            return Err(Error::UndefinedPosterior);
        }
        Ok(total >= self.threshold)
    }

    /// Prior weight plus feature weights, accumulated left to right.
    pub fn score(&self, x: &Instance) -> f64 {
        x.iter()
            .enumerate()
            .fold(self.prior, |acc, (i, &v)| acc + self.features[i][v])
    }

    pub fn all_finite(&self) -> bool {
        self.features.iter().flatten().all(|w| w.is_finite())
    }
}

impl NaiveBayes {
    pub fn new(prior: f64, threshold: f64, features: Vec<Feature>) -> Result<Self> {
        if !(prior > 0.0 && prior < 1.0) {
            return Err(Error::Range(format!("class prior {prior} not in (0, 1)")));
        }
        check_threshold(threshold)?;
        for f in &features {
            if f.given_pos.len() != f.labels.len() || f.given_neg.len() != f.labels.len() {
                return Err(Error::Structure(format!(
                    "feature {} has {} values but CPT rows of length {} and {}",
                    f.name,
                    f.labels.len(),
                    f.given_pos.len(),
                    f.given_neg.len()
                )));
            }
            check_distribution(&f.given_pos, || format!("{} given +", f.name))?;
            check_distribution(&f.given_neg, || format!("{} given -", f.name))?;
        }
        // validates labels
        VariableTable::new(
            features
                .iter()
                .map(|f| Variable::new(f.name.clone(), f.labels.clone()))
                .collect(),
        )?;
        Ok(NaiveBayes {
            prior,
            threshold,
            features,
            training_accuracy: None,
        })
    }

    /// Binary classifier from `(name, fp, fn)` triples.
    pub fn from_rates(prior: f64, threshold: f64, rates: &[(&str, f64, f64)]) -> Result<Self> {
        let features = rates
            .iter()
            .map(|&(name, fp, fn_)| Feature::from_rates(name, fp, fn_))
            .collect();
        NaiveBayes::new(prior, threshold, features)
    }

    pub fn prior(&self) -> f64 {
        self.prior
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn training_accuracy(&self) -> Option<f64> {
        self.training_accuracy
    }

    pub(crate) fn set_training_accuracy(&mut self, acc: f64) {
        self.training_accuracy = Some(acc);
    }

    /// Same classifier with another threshold.
    pub fn with_threshold(&self, threshold: f64) -> Result<Self> {
        check_threshold(threshold)?;
        Ok(NaiveBayes {
            threshold,
            ..self.clone()
        })
    }

    pub fn variables(&self) -> VariableTable {
        VariableTable::new(
            self.features
                .iter()
                .map(|f| Variable::new(f.name.clone(), f.labels.clone()))
                .collect(),
        )
        .expect("labels validated on construction")
    }

    /// Weights with infinite sentinels for zero CPT entries and thresholds at
    /// 0 or 1.
    pub(crate) fn raw_weights(&self) -> LogOddsWeights {
        let t = self.threshold;
        LogOddsWeights {
            prior: (self.prior / (1.0 - self.prior)).ln(),
            threshold: t.ln() - (1.0 - t).ln(),
            features: self
                .features
                .iter()
                .map(|f| (0..f.labels.len()).map(|v| f.weight(v)).collect())
                .collect(),
        }
    }

    /// Per-value log-likelihood ratios plus prior and threshold weights.
    pub fn log_odds_weights(&self) -> Result<LogOddsWeights> {
        if self.threshold <= 0.0 || self.threshold >= 1.0 {
            return Err(Error::Range(format!(
                "threshold {} has no finite log-odds",
                self.threshold
            )));
        }
        Ok(self.raw_weights())
    }

    /// Log posterior odds of the class. `NaN` when `Pr(x) = 0`.
    pub fn log_odds(&self, x: &Instance) -> Result<f64> {
        self.variables().check_instance(x)?;
        Ok(self.raw_weights().score(x))
    }

    /// Log posterior odds with some features unobserved.
    pub fn log_odds_partial(&self, x: &[Option<usize>]) -> f64 {
        let w = self.raw_weights();
        x.iter().enumerate().fold(w.prior, |acc, (i, v)| match v {
            Some(v) => acc + w.features[i][*v],
            None => acc,
        })
    }

    /// `Pr(c | x)`.
    pub fn posterior(&self, x: &Instance) -> Result<f64> {
        let lo = self.log_odds(x)?;
        if lo.is_nan() {
            return Err(Error::UndefinedPosterior);
        }
        Ok(logistic(lo))
    }

    /// Threshold decision, compared in log-odds space.
    pub fn decide(&self, x: &Instance) -> Result<bool> {
        self.variables().check_instance(x)?;
        self.raw_weights().decide(x)
    }
}

pub(crate) fn logistic(lo: f64) -> f64 {
    if lo >= 0.0 {
        1.0 / (1.0 + (-lo).exp())
    } else {
        let e = lo.exp();
        e / (1.0 + e)
    }
}
