use crate::classifier::{LogOddsWeights, NaiveBayes};
use crate::error::{Error, Result};

use super::{
    check_order, completion_table, permuted_vars, CompileOptions, CompiledOdd, FrontierStats, Leaf,
    MergeSignature, PartialDecisionGraph,
};

const SUM_TOLERANCE: f64 = 1e-12;

/// Open leaf of a naive Bayes compilation.
#[derive(Debug, Clone)]
pub struct NbLeaf {
    /// Sum of the feature weights observed on the path, in path order.
    pub accumulated: f64,
    /// One representative path assignment, indexed by feature.
    pub prefix: Vec<Option<usize>>,
}

/// Sorted achievable sums of the weights of `features`, accumulated in the
/// given order and deduplicated with relative tolerance 1e-12.
pub fn achievable_sums(weights: &LogOddsWeights, features: &[usize]) -> Vec<f64> {
    let mut sums = vec![0.0];
    for &f in features {
        let mut next: Vec<f64> = sums
            .iter()
            .flat_map(|s| weights.features[f].iter().map(move |w| s + w))
            .collect();
        next.sort_by(f64::total_cmp);
        next.dedup_by(|a, b| close(*a, *b));
        sums = next;
    }
    sums
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= SUM_TOLERANCE * a.abs().max(b.abs())
}

/// Step-wise naive Bayes compiler. Features may be expanded in any order.
#[derive(Debug)]
pub struct NaiveBayesCompiler<'a> {
    nb: &'a NaiveBayes,
    weights: LogOddsWeights,
    finite: bool,
    options: CompileOptions,
    domains: Vec<usize>,
    graph: PartialDecisionGraph<NbLeaf>,
}

impl<'a> NaiveBayesCompiler<'a> {
    pub fn new(nb: &'a NaiveBayes, options: CompileOptions) -> Result<Self> {
        let weights = nb.raw_weights();
        let finite = weights.all_finite() && !weights.prior.is_nan();
        let n = nb.features().len();
        let domains: Vec<usize> = nb.features().iter().map(|f| f.labels.len()).collect();
        let mut c = NaiveBayesCompiler {
            nb,
            weights,
            finite,
            options,
            graph: PartialDecisionGraph::new(domains.clone(), Leaf::Sink(false)),
            domains,
        };
        let start = NbLeaf {
            accumulated: 0.0,
            prefix: vec![None; n],
        };
        let all: Vec<usize> = (0..n).collect();
        let sums = if c.finite {
            achievable_sums(&c.weights, &all)
        } else {
            Vec::new()
        };
        let root = c.classify(start, &all, &sums)?;
        c.graph = PartialDecisionGraph::new(c.domains.clone(), root);
        Ok(c)
    }

    pub fn graph(&self) -> &PartialDecisionGraph<NbLeaf> {
        &self.graph
    }

    pub fn remaining(&self) -> Vec<usize> {
        (0..self.nb.features().len())
            .filter(|&f| !self.graph.is_processed(f))
            .collect()
    }

    /// Cut rank of a leaf with accumulated weight `accumulated` among the
    /// achievable sums `sums` of the remaining features. Rank 0 means every
    /// completion is positive, rank `sums.len()` means none is.
    pub fn merge_signature(&self, accumulated: f64, sums: &[f64]) -> MergeSignature {
        let target = self.weights.threshold - self.weights.prior - accumulated;
        MergeSignature::Cut(sums.partition_point(|&s| s < target))
    }

    fn classify(&self, leaf: NbLeaf, remaining: &[usize], sums: &[f64]) -> Result<Leaf<NbLeaf>> {
        if self.finite {
            let sig = self.merge_signature(leaf.accumulated, sums);
            return Ok(match sig {
                MergeSignature::Cut(0) => Leaf::Sink(true),
                MergeSignature::Cut(r) if r == sums.len() => Leaf::Sink(false),
                sig => Leaf::Open(leaf, sig),
            });
        }
        // zero CPT entries: compare sub-decision tables directly
        let impossible = self.options.impossible;
        let table = completion_table(
            &self.domains,
            &leaf.prefix,
            remaining,
            self.options.table_cap,
            |x| match self.weights.decide(x) {
                Err(Error::UndefinedPosterior) => Ok(impossible),
                other => other,
            },
        )?;
        Ok(if table.iter().all(|&b| b == table[0]) {
            Leaf::Sink(table[0])
        } else {
            Leaf::Open(leaf, MergeSignature::Table(table))
        })
    }

    pub fn expand_then_merge(&mut self, feature: usize) -> Result<FrontierStats> {
        if feature >= self.nb.features().len() || self.graph.is_processed(feature) {
            return Err(Error::Sequencing(format!(
                "feature {feature} is unknown or already processed"
            )));
        }
        let remaining: Vec<usize> = self
            .remaining()
            .into_iter()
            .filter(|&f| f != feature)
            .collect();
        let sums = if self.finite {
            achievable_sums(&self.weights, &remaining)
        } else {
            Vec::new()
        };
        let mut graph = std::mem::replace(
            &mut self.graph,
            PartialDecisionGraph::new(Vec::new(), Leaf::Sink(false)),
        );
        let this = &*self;
        let result = graph.expand_then_merge(feature, |leaf, v| {
            let mut prefix = leaf.prefix.clone();
            prefix[feature] = Some(v);
            let next = NbLeaf {
                accumulated: leaf.accumulated + this.weights.features[feature][v],
                prefix,
            };
            this.classify(next, &remaining, &sums)
        });
        self.graph = graph;
        result
    }

    pub fn finish(self) -> Result<CompiledOdd> {
        let order = self.graph.order();
        let stats = self.graph.stats().to_vec();
        let vars = permuted_vars(&self.nb.variables(), &order);
        let (manager, root) = self.graph.into_diagram(vars)?;
        Ok(CompiledOdd {
            manager,
            root,
            order,
            stats,
            impossible_leaves: 0,
        })
    }
}

/// Compile a naive Bayes decision function along `order`.
pub fn compile_naive_bayes(nb: &NaiveBayes, order: &[usize]) -> Result<CompiledOdd> {
    compile_naive_bayes_with(nb, order, CompileOptions::default())
}

pub fn compile_naive_bayes_with(
    nb: &NaiveBayes,
    order: &[usize],
    options: CompileOptions,
) -> Result<CompiledOdd> {
    check_order(order, nb.features().len())?;
    let mut c = NaiveBayesCompiler::new(nb, options)?;
    for &f in order {
        c.expand_then_merge(f)?;
    }
    c.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn admissions() -> NaiveBayes {
        NaiveBayes::from_rates(
            0.30,
            0.50,
            &[
                ("W", 0.10, 0.04),
                ("F", 0.20, 0.30),
                ("E", 0.15, 0.60),
                ("G", 0.11, 0.03),
            ],
        )
        .unwrap()
    }

    #[test]
    fn admissions_compiles_to_table_one() {
        let nb = admissions();
        let odd = compile_naive_bayes(&nb, &[0, 1, 2, 3]).unwrap();
        assert_eq!(odd.manager.model_count(odd.root).unwrap(), 6u32.into());
        for x in nb.variables().instances() {
            assert_eq!(odd.decide(&x).unwrap(), nb.decide(&x).unwrap());
        }
    }

    #[test]
    fn suffix_sets_are_bounded() {
        let w = admissions().raw_weights();
        assert!(achievable_sums(&w, &[0, 1, 2, 3]).len() <= 16);
        assert_eq!(achievable_sums(&w, &[]), vec![0.0]);
    }

    #[test]
    fn first_expansion_leaves_at_most_two_open() {
        let nb = admissions();
        let mut c = NaiveBayesCompiler::new(&nb, CompileOptions::default()).unwrap();
        let stats = c.expand_then_merge(0).unwrap();
        assert!(stats.open <= 2);
        assert!(c.expand_then_merge(0).is_err());
        assert!(c.expand_then_merge(7).is_err());
    }

    #[test]
    fn zero_threshold_compiles_to_true() {
        let nb = admissions().with_threshold(0.0).unwrap();
        let odd = compile_naive_bayes(&nb, &[3, 2, 1, 0]).unwrap();
        assert_eq!(odd.manager.sink_value(odd.root), Some(true));
    }

    #[test]
    fn uninformative_feature_merges_back() {
        let mut nb = admissions();
        let mut features = nb.features().to_vec();
        features.insert(
            1,
            crate::classifier::Feature {
                name: "U".into(),
                labels: vec!["a".into(), "b".into(), "c".into()],
                given_pos: vec![0.2, 0.3, 0.5],
                given_neg: vec![0.2, 0.3, 0.5],
            },
        );
        nb = NaiveBayes::new(nb.prior(), nb.threshold(), features).unwrap();
        let mut c = NaiveBayesCompiler::new(&nb, CompileOptions::default()).unwrap();
        let before = c.expand_then_merge(0).unwrap().open;
        let after = c.expand_then_merge(1).unwrap().open;
        assert_eq!(before, after);
    }

    #[test]
    fn zero_entries_use_table_signatures() {
        let nb = crate::classifier::train_naive_bayes(
            &crate::classifier::Dataset {
                features: vec![
                    crate::dd::Variable::binary("A"),
                    crate::dd::Variable::binary("B"),
                ],
                rows: vec![
                    (vec![Some(1), Some(1)], true),
                    (vec![Some(1), Some(0)], true),
                    (vec![Some(0), Some(0)], false),
                    (vec![Some(1), Some(1)], false),
                ],
            },
            0.0,
            0.5,
        )
        .unwrap();
        let odd = compile_naive_bayes(&nb, &[0, 1]).unwrap();
        for x in nb.variables().instances() {
            let expected = nb.decide(&x).unwrap_or(false);
            assert_eq!(odd.decide(&x).unwrap(), expected, "{x:?}");
        }
    }
}
