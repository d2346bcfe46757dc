//! Bayesian network classifiers with a binary class and a threshold
//! decision rule: an instance is classified positively iff `Pr(c | x) ≥ T`.

mod latent_tree;
mod naive_bayes;
mod table;
mod train;

pub(crate) use latent_tree::normalize_max as latent_tree_normalize_max;
pub use latent_tree::{LatentTree, NodeKind, TreeNode};
pub use naive_bayes::{Feature, LogOddsWeights, NaiveBayes};
pub use table::{capacity_from_env, DecisionTable, DEFAULT_CAPACITY};
pub use train::{train_naive_bayes, Dataset, MissingPolicy};

use crate::dd::{Instance, VariableTable};
use crate::error::{Error, Result};

/// Tolerance for CPT rows summing to one.
pub const CPT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Classifier {
    NaiveBayes(NaiveBayes),
    LatentTree(LatentTree),
}

impl Classifier {
    /// Feature variables in the classifier's own feature order.
    pub fn variables(&self) -> VariableTable {
        match self {
            Classifier::NaiveBayes(nb) => nb.variables(),
            Classifier::LatentTree(lt) => lt.variables(),
        }
    }

    pub fn threshold(&self) -> f64 {
        match self {
            Classifier::NaiveBayes(nb) => nb.threshold(),
            Classifier::LatentTree(lt) => lt.threshold(),
        }
    }

    pub fn posterior(&self, x: &Instance) -> Result<f64> {
        match self {
            Classifier::NaiveBayes(nb) => nb.posterior(x),
            Classifier::LatentTree(lt) => lt.posterior(x),
        }
    }

    pub fn decide(&self, x: &Instance) -> Result<bool> {
        match self {
            Classifier::NaiveBayes(nb) => nb.decide(x),
            Classifier::LatentTree(lt) => lt.decide(x),
        }
    }
}

impl From<NaiveBayes> for Classifier {
    fn from(nb: NaiveBayes) -> Self {
        Classifier::NaiveBayes(nb)
    }
}

impl From<LatentTree> for Classifier {
    fn from(lt: LatentTree) -> Self {
        Classifier::LatentTree(lt)
    }
}

pub(crate) fn check_distribution(row: &[f64], name: impl FnOnce() -> String) -> Result<()> {
    if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::Normalization {
            row: name(),
            sum: row.iter().sum(),
        });
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > CPT_TOLERANCE {
        return Err(Error::Normalization { row: name(), sum });
    }
    Ok(())
}

pub(crate) fn check_threshold(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Range(format!("threshold {t} not in [0, 1]")));
    }
    Ok(())
}
