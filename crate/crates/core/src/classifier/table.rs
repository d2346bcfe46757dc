use crate::dd::{Dd, Instance, Manager, VariableTable};
use crate::error::{Error, Result};

use super::Classifier;

/// Default cap on the number of instances a brute-force table may hold.
pub const DEFAULT_CAPACITY: u128 = 1 << 22;

/// Brute-force cap from `BNX_BRUTE_CAP`, falling back to [`DEFAULT_CAPACITY`].
pub fn capacity_from_env() -> u128 {
    std::env::var("BNX_BRUTE_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CAPACITY)
}

/// Dense truth table of a decision function, indexed by instance rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTable {
    vars: VariableTable,
    bits: Vec<bool>,
}

impl DecisionTable {
    pub fn from_fn(
        vars: VariableTable,
        cap: u128,
        mut f: impl FnMut(&Instance) -> Result<bool>,
    ) -> Result<Self> {
        let required = vars.space_size().unwrap_or(u128::MAX);
        if required > cap {
            return Err(Error::Capacity { required, cap });
        }
        let bits = vars
            .instances()
            .map(|x| f(&x))
            .collect::<Result<Vec<_>>>()?;
        Ok(DecisionTable { vars, bits })
    }

    /// Truth table of a diagram, in the diagram's variable order.
    pub fn from_diagram(m: &Manager, f: Dd, cap: u128) -> Result<Self> {
        DecisionTable::from_fn(m.vars().clone(), cap, |x| m.evaluate(f, x))
    }

    /// Exhaustive decision table of a classifier.
    pub fn from_classifier(c: &Classifier, cap: u128) -> Result<Self> {
        DecisionTable::from_fn(c.variables(), cap, |x| c.decide(x))
    }

    /// Like [`DecisionTable::from_classifier`], mapping zero-probability
    /// instances to `impossible` instead of failing.
    pub fn from_classifier_total(c: &Classifier, cap: u128, impossible: bool) -> Result<Self> {
        DecisionTable::from_fn(c.variables(), cap, |x| match c.decide(x) {
            Err(Error::UndefinedPosterior) => Ok(impossible),
            other => other,
        })
    }

    pub fn vars(&self) -> &VariableTable {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, x: &Instance) -> bool {
        self.bits[self.vars.rank(x)]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_positive(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// `(instance, decision)` pairs in rank order.
    pub fn iter(&self) -> impl Iterator<Item = (Instance, bool)> + '_ {
        self.vars.instances().zip(self.bits.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::NaiveBayes;

    #[test]
    fn admissions_table_column() {
        let nb = NaiveBayes::from_rates(
            0.30,
            0.50,
            &[
                ("W", 0.10, 0.04),
                ("F", 0.20, 0.30),
                ("E", 0.15, 0.60),
                ("G", 0.11, 0.03),
            ],
        )
        .unwrap();
        let t = DecisionTable::from_classifier(&nb.clone().into(), DEFAULT_CAPACITY).unwrap();
        let positive_ranks: Vec<usize> = (0..16).filter(|&r| t.bits()[r]).collect();
        // - + + +, + - - +, + - + +, + + - +, + + + -, + + + +
        assert_eq!(positive_ranks, vec![7, 9, 11, 13, 14, 15]);
        let all =
            DecisionTable::from_classifier(&nb.with_threshold(0.0).unwrap().into(), 16).unwrap();
        assert_eq!(all.count_positive(), 16);
    }

    #[test]
    fn capacity_is_enforced() {
        let err = DecisionTable::from_fn(VariableTable::binary(5), 16, |_| Ok(true)).unwrap_err();
        assert!(matches!(
            err,
            Error::Capacity {
                required: 32,
                cap: 16
            }
        ));
    }
}
