//! Classifier → ordered decision diagram compilation by expand-then-merge.
//!
//! A layered decision graph is grown one feature at a time. Every open leaf
//! stands for the sub-classifier obtained by observing the features on its
//! path; after expanding a leaf by all values of the next feature, children
//! whose sub-classifiers carry the same [`MergeSignature`] are merged, and
//! children whose decision no longer depends on the remaining features are
//! closed into sinks. The finished graph is interned bottom-up into a reduced
//! diagram, so any under-merging disappears in the result.

mod latent_tree;
mod naive_bayes;

pub use latent_tree::{
    compile_latent_tree, compile_latent_tree_with, processing_order, LatentTreeCompiler, LtMerge,
};
pub use latent_tree::{message_signature, LtLeaf};
pub use naive_bayes::{
    achievable_sums, compile_naive_bayes, compile_naive_bayes_with, NaiveBayesCompiler, NbLeaf,
};

use std::collections::HashMap;
use std::hash::Hash;

use crate::classifier::Classifier;
use crate::dd::{Dd, Instance, Manager, Mode, VariableTable};
use crate::error::{Error, Result};

/// Key deciding when two open leaves carry equivalent sub-classifiers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MergeSignature {
    /// Rank of the adjusted threshold among the achievable weight sums of
    /// the remaining naive Bayes features.
    Cut(usize),
    /// Class-by-state likelihood matrix of a latent tree, scaled to unit
    /// maximum and quantized.
    Message(Vec<i64>),
    /// Decision table over every completion of the remaining features.
    Table(Vec<bool>),
    /// A leaf that is never merged.
    Unique(usize),
}

/// Outcome of extending a leaf: closed into a sink, or still open.
#[derive(Debug, Clone)]
pub enum Leaf<S> {
    Sink(bool),
    Open(S, MergeSignature),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Sink(bool),
    /// Index of a node in the next layer.
    Open(usize),
}

/// Frontier sizes around one expand-then-merge step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrontierStats {
    /// Features processed after this step.
    pub depth: usize,
    pub feature: usize,
    /// Open children before merging.
    pub expanded: usize,
    /// Open leaves after merging.
    pub open: usize,
}

#[derive(Debug, Clone)]
struct Layer {
    feature: usize,
    nodes: Vec<Vec<Edge>>,
}

/// Layered decision graph under construction.
#[derive(Debug, Clone)]
pub struct PartialDecisionGraph<S> {
    domains: Vec<usize>,
    root: Edge,
    layers: Vec<Layer>,
    frontier: Vec<S>,
    processed: Vec<bool>,
    stats: Vec<FrontierStats>,
}

impl<S> PartialDecisionGraph<S> {
    /// Graph whose root is `root`, over features with the given domain sizes.
    pub fn new(domains: Vec<usize>, root: Leaf<S>) -> Self {
        let (root, frontier) = match root {
            Leaf::Sink(b) => (Edge::Sink(b), Vec::new()),
            Leaf::Open(s, _) => (Edge::Open(0), vec![s]),
        };
        PartialDecisionGraph {
            processed: vec![false; domains.len()],
            domains,
            root,
            layers: Vec::new(),
            frontier,
            stats: Vec::new(),
        }
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn frontier(&self) -> &[S] {
        &self.frontier
    }

    pub fn stats(&self) -> &[FrontierStats] {
        &self.stats
    }

    pub fn is_processed(&self, feature: usize) -> bool {
        self.processed[feature]
    }

    /// Features in the order they were expanded.
    pub fn order(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.feature).collect()
    }

    /// Expand every open leaf by all values of `feature`, then merge the new
    /// leaves with equal signatures.
    pub fn expand_then_merge(
        &mut self,
        feature: usize,
        mut extend: impl FnMut(&S, usize) -> Result<Leaf<S>>,
    ) -> Result<FrontierStats> {
        let b = *self
            .domains
            .get(feature)
            .ok_or_else(|| Error::Sequencing(format!("unknown feature {feature}")))?;
        if self.processed[feature] {
            return Err(Error::Sequencing(format!(
                "feature {feature} already processed"
            )));
        }
        self.processed[feature] = true;
        let mut seen: HashMap<MergeSignature, usize> = HashMap::new();
        let mut next = Vec::new();
        let mut nodes = Vec::with_capacity(self.frontier.len());
        let mut expanded = 0;
        for state in &self.frontier {
            let mut edges = Vec::with_capacity(b);
            for v in 0..b {
                edges.push(match extend(state, v)? {
                    Leaf::Sink(bit) => Edge::Sink(bit),
                    Leaf::Open(s, sig) => {
                        expanded += 1;
                        let idx = *seen.entry(sig).or_insert_with(|| {
                            next.push(s);
                            next.len() - 1
                        });
                        Edge::Open(idx)
                    }
                });
            }
            nodes.push(edges);
        }
        self.layers.push(Layer { feature, nodes });
        self.frontier = next;
        let stats = FrontierStats {
            depth: self.layers.len(),
            feature,
            expanded,
            open: self.frontier.len(),
        };
        self.stats.push(stats);
        Ok(stats)
    }

    /// Re-summarize every open leaf without expanding, merging or closing
    /// leaves as the new summaries dictate.
    pub fn remap(&mut self, mut f: impl FnMut(&S) -> Result<Leaf<S>>) -> Result<()> {
        let mut seen: HashMap<MergeSignature, usize> = HashMap::new();
        let mut next = Vec::new();
        let mut mapping = Vec::with_capacity(self.frontier.len());
        for state in &self.frontier {
            mapping.push(match f(state)? {
                Leaf::Sink(bit) => Edge::Sink(bit),
                Leaf::Open(s, sig) => {
                    let idx = *seen.entry(sig).or_insert_with(|| {
                        next.push(s);
                        next.len() - 1
                    });
                    Edge::Open(idx)
                }
            });
        }
        let relink = |e: &mut Edge| {
            if let Edge::Open(i) = *e {
                *e = mapping[i];
            }
        };
        match self.layers.last_mut() {
            Some(layer) => layer.nodes.iter_mut().flatten().for_each(relink),
            None => relink(&mut self.root),
        }
        self.frontier = next;
        Ok(())
    }

    /// Intern the finished graph into a reduced diagram over `vars`, whose
    /// variable `d` is the feature expanded at depth `d`.
    pub fn into_diagram(self, vars: VariableTable) -> Result<(Manager, Dd)> {
        if !self.frontier.is_empty() {
            return Err(Error::Sequencing(format!(
                "{} leaves are still open after processing {} features",
                self.frontier.len(),
                self.layers.len()
            )));
        }
        let mut m = Manager::new(vars, Mode::Reduced);
        let mut below: Vec<Dd> = Vec::new();
        for (depth, layer) in self.layers.iter().enumerate().rev() {
            let mut built = Vec::with_capacity(layer.nodes.len());
            for edges in &layer.nodes {
                let children: Vec<Dd> = edges
                    .iter()
                    .map(|e| match *e {
                        Edge::Sink(b) => m.constant(b),
                        Edge::Open(i) => below[i],
                    })
                    .collect();
                built.push(m.intern_node(depth, &children)?);
            }
            below = built;
        }
        let root = match self.root {
            Edge::Sink(b) => m.constant(b),
            Edge::Open(i) => below[i],
        };
        Ok((m, root))
    }
}

/// Result of compiling a classifier.
#[derive(Debug)]
pub struct CompiledOdd {
    pub manager: Manager,
    pub root: Dd,
    /// `order[v]`: classifier feature tested by diagram variable `v`.
    pub order: Vec<usize>,
    pub stats: Vec<FrontierStats>,
    /// Leaves closed because their evidence has probability zero.
    pub impossible_leaves: usize,
}

impl CompiledOdd {
    /// Classifier-ordered instance → diagram-ordered instance.
    pub fn to_diagram_order(&self, x: &Instance) -> Instance {
        Instance(self.order.iter().map(|&f| x[f]).collect())
    }

    /// Diagram-ordered instance → classifier-ordered instance.
    pub fn to_feature_order(&self, x: &Instance) -> Instance {
        let mut out = vec![0; x.len()];
        for (v, &f) in self.order.iter().enumerate() {
            out[f] = x[v];
        }
        Instance(out)
    }

    /// Decision of the compiled function on a classifier-ordered instance.
    pub fn decide(&self, x: &Instance) -> Result<bool> {
        self.manager.evaluate(self.root, &self.to_diagram_order(x))
    }
}

/// Options shared by both compilers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompileOptions {
    /// Decision assigned to zero-probability evidence.
    pub impossible: bool,
    /// Cap on the completions enumerated for a table signature.
    pub table_cap: u128,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            impossible: false,
            table_cap: 1 << 12,
        }
    }
}

pub(crate) fn check_order(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::Argument(format!(
            "order lists {} features, classifier has {n}",
            order.len()
        )));
    }
    for &f in order {
        if f >= n || std::mem::replace(&mut seen[f], true) {
            return Err(Error::Argument(format!(
                "order is not a permutation: {order:?}"
            )));
        }
    }
    Ok(())
}

/// Compile any classifier. `order` applies to naive Bayes only (default:
/// declaration order); latent trees use their own processing order.
pub fn compile_classifier(c: &Classifier, order: Option<&[usize]>) -> Result<CompiledOdd> {
    match c {
        Classifier::NaiveBayes(nb) => match order {
            Some(order) => compile_naive_bayes(nb, order),
            None => compile_naive_bayes(nb, &(0..nb.features().len()).collect::<Vec<_>>()),
        },
        Classifier::LatentTree(lt) => {
            if order.is_some() {
                return Err(Error::Argument(
                    "latent trees are compiled in their own feature order".into(),
                ));
            }
            compile_latent_tree(lt)
        }
    }
}

/// Variable table of the classifier features permuted into `order`.
pub fn permuted_vars(vars: &VariableTable, order: &[usize]) -> VariableTable {
    VariableTable::new(
        order
            .iter()
            .map(|&f| vars.get(f).cloned().expect("valid order"))
            .collect(),
    )
    .expect("permutation of a valid table")
}

/// Decision table over all completions of `free` features of `prefix`.
pub(crate) fn completion_table(
    domains: &[usize],
    prefix: &[Option<usize>],
    free: &[usize],
    cap: u128,
    mut decide: impl FnMut(&Instance) -> Result<bool>,
) -> Result<Vec<bool>> {
    let required = free
        .iter()
        .try_fold(1u128, |acc, &f| acc.checked_mul(domains[f] as u128))
        .unwrap_or(u128::MAX);
    if required > cap {
        return Err(Error::Capacity { required, cap });
    }
    let mut x: Vec<usize> = prefix.iter().map(|v| v.unwrap_or(0)).collect();
    for &f in free {
        x[f] = 0;
    }
    let mut out = Vec::with_capacity(required as usize);
    loop {
        out.push(decide(&Instance(x.clone()))?);
        // odometer over the free features, last one fastest
        let mut i = free.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            let f = free[i];
            x[f] += 1;
            if x[f] < domains[f] {
                break;
            }
            x[f] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::BoolOp;

    #[test]
    fn graph_interns_into_reduced_diagram() {
        // parity-free toy: leaf state = number of 1s seen, close when >= 1
        let mut g =
            PartialDecisionGraph::new(vec![2, 2], Leaf::Open(0u32, MergeSignature::Unique(0)));
        g.expand_then_merge(0, |_, v| {
            Ok(if v == 1 {
                Leaf::Sink(true)
            } else {
                Leaf::Open(0, MergeSignature::Cut(0))
            })
        })
        .unwrap();
        assert!(g
            .expand_then_merge(0, |_, _| Ok(Leaf::Sink(false)))
            .is_err());
        g.expand_then_merge(1, |_, v| Ok(Leaf::Sink(v == 1)))
            .unwrap();
        assert_eq!(g.order(), vec![0, 1]);
        let (mut m, root) = g.into_diagram(VariableTable::binary(2)).unwrap();
        let a = m.literal(0, 1).unwrap();
        let b = m.literal(1, 1).unwrap();
        assert_eq!(root, m.combine(a, b, BoolOp::Or).unwrap());
    }

    #[test]
    fn completion_table_order() {
        let t = completion_table(&[2, 3], &[None, None], &[0, 1], 16, |x| {
            Ok(x[0] == 1 && x[1] == 2)
        })
        .unwrap();
        assert_eq!(t, vec![false, false, false, false, false, true]);
        assert!(completion_table(&[2, 3], &[None, None], &[0, 1], 5, |_| Ok(true)).is_err());
    }
}
