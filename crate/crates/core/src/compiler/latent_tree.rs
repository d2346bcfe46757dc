use std::cell::Cell;

use crate::classifier::{latent_tree_normalize_max, LatentTree, NodeKind};
use crate::error::{Error, Result};

use super::{
    completion_table, permuted_vars, CompileOptions, CompiledOdd, Leaf, MergeSignature,
    PartialDecisionGraph,
};

/// How open leaves of a latent-tree compilation are merged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LtMerge {
    /// Compare exact sub-decision tables while the remaining feature space
    /// fits the table cap; fall back to message matrices above it.
    #[default]
    Exact,
    /// Merge only leaves with proportional class-by-state message matrices,
    /// checked once every feature under a child subtree is observed.
    Message,
    /// Never merge; the graph is a full decision tree.
    None,
}

/// Open leaf of a latent-tree compilation.
#[derive(Debug, Clone)]
pub struct LtLeaf {
    /// Representative path assignment, indexed by feature.
    pub prefix: Vec<Option<usize>>,
    /// `matrix[γ * |R| + r] ∝ Pr(class = γ, observed evidence, R = r)` for the
    /// current tree node `R`, scaled to unit maximum. Evidence under the child
    /// subtree currently being expanded is folded in once it is complete.
    pub matrix: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Step {
    Descend(usize),
    Expand { child: usize, features: Vec<usize> },
}

fn preorder(lt: &LatentTree) -> Vec<usize> {
    let mut ids = vec![0; lt.nodes().len()];
    let mut stack = vec![lt.root()];
    let mut next = 0;
    while let Some(u) = stack.pop() {
        ids[u] = next;
        next += 1;
        stack.extend(lt.children(u).iter().rev());
    }
    ids
}

fn leaves_under(lt: &LatentTree, node: usize, out: &mut Vec<usize>) {
    if lt.kind(node) == NodeKind::Feature {
        out.push(lt.feature_of_node(node).expect("leaf is a feature"));
    }
    for &c in lt.children(node) {
        leaves_under(lt, c, out);
    }
}

fn plan(lt: &LatentTree) -> Vec<Step> {
    let pre = preorder(lt);
    let leaf_count: Vec<usize> = (0..lt.nodes().len())
        .map(|u| {
            let mut v = Vec::new();
            leaves_under(lt, u, &mut v);
            v.len()
        })
        .collect();
    let mut processed = vec![false; lt.nodes().len()];
    let mut r = lt.root();
    let mut steps = Vec::new();
    loop {
        let open: Vec<usize> = lt
            .children(r)
            .iter()
            .copied()
            .filter(|&c| !processed[c])
            .collect();
        if open.is_empty() {
            break;
        }
        if open.len() == 1 && lt.kind(open[0]) == NodeKind::Hidden {
            steps.push(Step::Descend(open[0]));
            r = open[0];
            continue;
        }
        let c = *open
            .iter()
            .min_by_key(|&&c| (leaf_count[c], pre[c]))
            .expect("nonempty");
        let mut features = Vec::new();
        leaves_under(lt, c, &mut features);
        steps.push(Step::Expand { child: c, features });
        processed[c] = true;
    }
    steps
}

/// Feature order in which a latent tree is compiled: repeatedly descend
/// through a lone unprocessed internal child, otherwise expand the child
/// subtree with the fewest leaves (ties: smallest pre-order id), its leaves in
/// pre-order.
pub fn processing_order(lt: &LatentTree) -> Vec<usize> {
    plan(lt)
        .into_iter()
        .flat_map(|s| match s {
            Step::Descend(_) => Vec::new(),
            Step::Expand { features, .. } => features,
        })
        .collect()
}

/// Quantized signature of a class-by-state matrix, `None` if it is all zero.
pub fn message_signature(matrix: &[f64]) -> Option<MergeSignature> {
    let max = matrix.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return None;
    }
    Some(MergeSignature::Message(
        matrix
            .iter()
            .map(|v| (v / max * 1e12).round() as i64)
            .collect(),
    ))
}

/// Latent-tree compiler driving [`PartialDecisionGraph`] along the plan.
#[derive(Debug)]
pub struct LatentTreeCompiler<'a> {
    lt: &'a LatentTree,
    merge: LtMerge,
    options: CompileOptions,
    domains: Vec<usize>,
    graph: PartialDecisionGraph<LtLeaf>,
    /// Current tree node `R` and its domain size.
    current: usize,
    unique: Cell<usize>,
    impossible: Cell<usize>,
}

impl<'a> LatentTreeCompiler<'a> {
    pub fn new(lt: &'a LatentTree, merge: LtMerge, options: CompileOptions) -> Result<Self> {
        let domains: Vec<usize> = lt.variables().domain_sizes();
        let n = domains.len();
        let prior = &lt.nodes()[lt.root()].cpt[0];
        let start = LtLeaf {
            prefix: vec![None; n],
            matrix: vec![prior[0], 0.0, 0.0, prior[1]],
        };
        let mut c = LatentTreeCompiler {
            lt,
            merge,
            options,
            graph: PartialDecisionGraph::new(domains.clone(), Leaf::Sink(false)),
            domains,
            current: lt.root(),
            unique: Cell::new(0),
            impossible: Cell::new(0),
        };
        let all: Vec<usize> = (0..n).collect();
        let root = c.classify(start, &all, true)?;
        c.graph = PartialDecisionGraph::new(c.domains.clone(), root);
        Ok(c)
    }

    pub fn graph(&self) -> &PartialDecisionGraph<LtLeaf> {
        &self.graph
    }

    fn final_decision(&self, matrix: &[f64]) -> bool {
        let k = matrix.len() / 2;
        let neg: f64 = matrix[..k].iter().sum();
        let pos: f64 = matrix[k..].iter().sum();
        if neg + pos <= 0.0 {
            self.impossible.set(self.impossible.get() + 1);
            return self.options.impossible;
        }
        pos / (neg + pos) >= self.lt.threshold()
    }

    fn classify(&self, leaf: LtLeaf, remaining: &[usize], boundary: bool) -> Result<Leaf<LtLeaf>> {
        if remaining.is_empty() {
            return Ok(Leaf::Sink(self.final_decision(&leaf.matrix)));
        }
        let space = remaining
            .iter()
            .try_fold(1u128, |acc, &f| acc.checked_mul(self.domains[f] as u128))
            .unwrap_or(u128::MAX);
        if self.merge == LtMerge::Exact && space <= self.options.table_cap {
            let impossible = self.options.impossible;
            let table =
                completion_table(
                    &self.domains,
                    &leaf.prefix,
                    remaining,
                    space,
                    |x| match self.lt.decide(x) {
                        Err(Error::UndefinedPosterior) => Ok(impossible),
                        other => other,
                    },
                )?;
            return Ok(if table.iter().all(|&b| b == table[0]) {
                Leaf::Sink(table[0])
            } else {
                Leaf::Open(leaf, MergeSignature::Table(table))
            });
        }
        if self.merge != LtMerge::None && boundary {
            return Ok(match message_signature(&leaf.matrix) {
                Some(sig) => Leaf::Open(leaf, sig),
                None => {
                    self.impossible.set(self.impossible.get() + 1);
                    Leaf::Sink(self.options.impossible)
                }
            });
        }
        let id = self.unique.get();
        self.unique.set(id + 1);
        Ok(Leaf::Open(leaf, MergeSignature::Unique(id)))
    }

    fn remaining_after(&self, feature: Option<usize>) -> Vec<usize> {
        (0..self.domains.len())
            .filter(|&f| !self.graph.is_processed(f) && Some(f) != feature)
            .collect()
    }

    fn descend(&mut self, child: usize) -> Result<()> {
        let cpt = &self.lt.nodes()[child].cpt;
        let (rows, cols) = (cpt.len(), cpt[0].len());
        let remaining = self.remaining_after(None);
        let mut graph = std::mem::replace(
            &mut self.graph,
            PartialDecisionGraph::new(Vec::new(), Leaf::Sink(false)),
        );
        let this = &*self;
        let result = graph.remap(|leaf| {
            let mut matrix = vec![0.0; 2 * cols];
            for g in 0..2 {
                for (r, row) in cpt.iter().enumerate().take(rows) {
                    let m = leaf.matrix[g * rows + r];
                    for (c, p) in row.iter().enumerate() {
                        matrix[g * cols + c] += m * p;
                    }
                }
            }
            latent_tree_normalize_max(&mut matrix);
            this.classify(
                LtLeaf {
                    prefix: leaf.prefix.clone(),
                    matrix,
                },
                &remaining,
                true,
            )
        });
        self.graph = graph;
        self.current = child;
        result
    }

    fn expand_child(&mut self, child: usize, features: &[usize]) -> Result<()> {
        let rows = self.lt.nodes()[self.current].labels.len();
        for (j, &feature) in features.iter().enumerate() {
            let boundary = j + 1 == features.len();
            let remaining = self.remaining_after(Some(feature));
            let mut graph = std::mem::replace(
                &mut self.graph,
                PartialDecisionGraph::new(Vec::new(), Leaf::Sink(false)),
            );
            let this = &*self;
            let result = graph.expand_then_merge(feature, |leaf, v| {
                let mut prefix = leaf.prefix.clone();
                prefix[feature] = Some(v);
                let mut matrix = leaf.matrix.clone();
                if boundary {
                    let message = this.lt.message(child, &this.lt.evidence(&prefix));
                    for g in 0..2 {
                        for r in 0..rows {
                            matrix[g * rows + r] *= message[r];
                        }
                    }
                    latent_tree_normalize_max(&mut matrix);
                }
                this.classify(LtLeaf { prefix, matrix }, &remaining, boundary)
            });
            self.graph = graph;
            result?;
        }
        Ok(())
    }

    /// Run the whole plan and intern the result.
    pub fn run(mut self) -> Result<CompiledOdd> {
        for step in plan(self.lt) {
            match step {
                Step::Descend(c) => self.descend(c)?,
                Step::Expand { child, features } => self.expand_child(child, &features)?,
            }
        }
        let order = self.graph.order();
        let stats = self.graph.stats().to_vec();
        let vars = permuted_vars(&self.lt.variables(), &order);
        let impossible_leaves = self.impossible.get();
        let (manager, root) = self.graph.into_diagram(vars)?;
        Ok(CompiledOdd {
            manager,
            root,
            order,
            stats,
            impossible_leaves,
        })
    }
}

/// Compile a latent-tree decision function with default options.
pub fn compile_latent_tree(lt: &LatentTree) -> Result<CompiledOdd> {
    compile_latent_tree_with(lt, LtMerge::default(), CompileOptions::default())
}

pub fn compile_latent_tree_with(
    lt: &LatentTree,
    merge: LtMerge,
    options: CompileOptions,
) -> Result<CompiledOdd> {
    LatentTreeCompiler::new(lt, merge, options)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::TreeNode;

    fn node(name: &str, k: usize, parent: Option<usize>, cpt: Vec<Vec<f64>>) -> TreeNode {
        TreeNode {
            name: name.into(),
            labels: (0..k).map(|i| i.to_string()).collect(),
            parent,
            cpt,
        }
    }

    /// C → {H1 → {X1, X2, X3}, X4, H2 → {X5, X6}}
    fn tree() -> LatentTree {
        let b = |p: f64, q: f64| vec![vec![p, 1.0 - p], vec![q, 1.0 - q]];
        LatentTree::new(
            vec![
                node("C", 2, None, vec![vec![0.6, 0.4]]),
                node("H1", 2, Some(0), b(0.8, 0.3)),
                node("X1", 2, Some(1), b(0.7, 0.2)),
                node("X2", 2, Some(1), b(0.9, 0.35)),
                node("X3", 2, Some(1), b(0.6, 0.1)),
                node("X4", 2, Some(0), b(0.75, 0.4)),
                node("H2", 2, Some(0), b(0.3, 0.85)),
                node("X5", 2, Some(6), b(0.55, 0.15)),
                node("X6", 2, Some(6), b(0.8, 0.45)),
            ],
            0.5,
        )
        .unwrap()
    }

    #[test]
    fn plan_picks_smallest_child_first() {
        let lt = tree();
        // X4 (1 leaf), then H2 (2 leaves), then descend into H1 and take its leaves
        assert_eq!(
            plan(&lt),
            vec![
                Step::Expand {
                    child: 5,
                    features: vec![3]
                },
                Step::Expand {
                    child: 6,
                    features: vec![4, 5]
                },
                Step::Descend(1),
                Step::Expand {
                    child: 2,
                    features: vec![0]
                },
                Step::Expand {
                    child: 3,
                    features: vec![1]
                },
                Step::Expand {
                    child: 4,
                    features: vec![2]
                },
            ]
        );
        assert_eq!(processing_order(&lt), vec![3, 4, 5, 0, 1, 2]);
    }

    #[test]
    fn every_merge_mode_gives_the_oracle_function() {
        let lt = tree();
        let mut roots = Vec::new();
        for merge in [LtMerge::Exact, LtMerge::Message, LtMerge::None] {
            let odd = compile_latent_tree_with(&lt, merge, CompileOptions::default()).unwrap();
            for x in lt.variables().instances() {
                assert_eq!(
                    odd.decide(&x).unwrap(),
                    lt.decide(&x).unwrap(),
                    "{merge:?} {x:?}"
                );
            }
            assert_eq!(odd.order, processing_order(&lt));
            roots.push(odd.manager.size(odd.root).unwrap());
        }
        // the interned result is canonical whatever merging happened on the way
        assert_eq!(roots[0], roots[1]);
        assert_eq!(roots[1], roots[2]);
    }

    #[test]
    fn proportional_matrices_share_a_signature() {
        let a = message_signature(&[0.2, 0.4, 0.1, 0.05]).unwrap();
        let b = message_signature(&[0.4, 0.8, 0.2, 0.1]).unwrap();
        assert_eq!(a, b);
        assert!(message_signature(&[0.0; 4]).is_none());
    }
}
