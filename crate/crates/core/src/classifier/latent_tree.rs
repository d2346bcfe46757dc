use crate::dd::{Instance, Variable, VariableTable};
use crate::error::{Error, Result};

use super::{check_distribution, check_threshold};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Class,
    Hidden,
    Feature,
}

/// A node of a latent tree. `cpt[p][s] = Pr(node = s | parent = p)`; the root
/// has a single row holding the class prior, value 1 being the positive class.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub name: String,
    pub labels: Vec<String>,
    pub parent: Option<usize>,
    pub cpt: Vec<Vec<f64>>,
}

/// Tree-structured classifier: class at the root, features at the leaves,
/// hidden variables in between.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentTree {
    nodes: Vec<TreeNode>,
    threshold: f64,
    root: usize,
    children: Vec<Vec<usize>>,
    /// Leaf node ids in increasing order; position = feature index.
    features: Vec<usize>,
}

impl LatentTree {
    pub fn new(nodes: Vec<TreeNode>, threshold: f64) -> Result<Self> {
        check_threshold(threshold)?;
        let n = nodes.len();
        let roots: Vec<usize> = (0..n).filter(|&i| nodes[i].parent.is_none()).collect();
        let &[root] = roots.as_slice() else {
            return Err(Error::Structure(format!(
                "latent tree needs exactly one root, found {}",
                roots.len()
            )));
        };
        if nodes[root].labels.len() != 2 {
            return Err(Error::Structure("class variable must be binary".into()));
        }
        let mut children = vec![Vec::new(); n];
        for (i, node) in nodes.iter().enumerate() {
            if let Some(p) = node.parent {
                if p >= n || p == i {
                    return Err(Error::Structure(format!(
                        "node {} has invalid parent {p}",
                        node.name
                    )));
                }
                children[p].push(i);
            }
        }
        // every node must reach the root
        for start in 0..n {
            let (mut cur, mut steps) = (start, 0);
            while let Some(p) = nodes[cur].parent {
                cur = p;
                steps += 1;
                if steps > n {
                    return Err(Error::Structure("parent links contain a cycle".into()));
                }
            }
        }
        if children[root].is_empty() {
            return Err(Error::Structure("class variable has no children".into()));
        }
        for (i, node) in nodes.iter().enumerate() {
            let rows = node.parent.map_or(1, |p| nodes[p].labels.len());
            if node.cpt.len() != rows {
                return Err(Error::Structure(format!(
                    "node {} needs {rows} CPT rows, found {}",
                    node.name,
                    node.cpt.len()
                )));
            }
            for (r, row) in node.cpt.iter().enumerate() {
                if row.len() != node.labels.len() {
                    return Err(Error::Structure(format!(
                        "node {} CPT row {r} has {} entries, expected {}",
                        node.name,
                        row.len(),
                        node.labels.len()
                    )));
                }
                let parent_label = match node.parent {
                    Some(p) => nodes[p].labels[r].clone(),
                    None => "prior".to_string(),
                };
                check_distribution(row, || format!("{} given {parent_label}", node.name))?;
            }
            let _ = i;
        }
        let features: Vec<usize> = (0..n).filter(|&i| children[i].is_empty()).collect();
        let tree = LatentTree {
            nodes,
            threshold,
            root,
            children,
            features,
        };
        // validates labels and names
        let vars = tree.variables_checked()?;
        for (i, v) in vars.iter().enumerate() {
            if vars.iter().skip(i + 1).any(|w| w.name == v.name) {
                return Err(Error::Structure(format!(
                    "duplicate feature name {}",
                    v.name
                )));
            }
        }
        Ok(tree)
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    pub fn kind(&self, node: usize) -> NodeKind {
        if node == self.root {
            NodeKind::Class
        } else if self.children[node].is_empty() {
            NodeKind::Feature
        } else {
            NodeKind::Hidden
        }
    }

    /// Leaf node ids in feature order.
    pub fn feature_nodes(&self) -> &[usize] {
        &self.features
    }

    pub fn feature_of_node(&self, node: usize) -> Option<usize> {
        self.features.binary_search(&node).ok()
    }

    fn variables_checked(&self) -> Result<VariableTable> {
        VariableTable::new(
            self.features
                .iter()
                .map(|&i| Variable::new(self.nodes[i].name.clone(), self.nodes[i].labels.clone()))
                .collect(),
        )
    }

    pub fn variables(&self) -> VariableTable {
        self.variables_checked().expect("validated on construction")
    }

    pub fn with_threshold(&self, threshold: f64) -> Result<Self> {
        check_threshold(threshold)?;
        Ok(LatentTree {
            threshold,
            ..self.clone()
        })
    }

    /// Evidence vector indexed by node id from a feature-ordered instance.
    pub fn evidence(&self, x: &[Option<usize>]) -> Vec<Option<usize>> {
        let mut e = vec![None; self.nodes.len()];
        for (f, &node) in self.features.iter().enumerate() {
            e[node] = x[f];
        }
        e
    }

    /// `λ(s) ∝ Pr(evidence below node | node = s)`, scaled to unit maximum
    /// (all zeros when the evidence is impossible).
    pub fn likelihood(&self, node: usize, evidence: &[Option<usize>]) -> Vec<f64> {
        let size = self.nodes[node].labels.len();
        if self.children[node].is_empty() {
            return match evidence[node] {
                Some(v) => (0..size).map(|s| if s == v { 1.0 } else { 0.0 }).collect(),
                None => vec![1.0; size],
            };
        }
        let mut lambda = vec![1.0; size];
        for &c in &self.children[node] {
            let m = self.message(c, evidence);
            for (l, m) in lambda.iter_mut().zip(m) {
                *l *= m;
            }
        }
        normalize_max(&mut lambda);
        lambda
    }

    /// Message from `node` to its parent: `Σ_s cpt[p][s] λ(s)`, scaled.
    pub fn message(&self, node: usize, evidence: &[Option<usize>]) -> Vec<f64> {
        let lambda = self.likelihood(node, evidence);
        let mut m: Vec<f64> = self.nodes[node]
            .cpt
            .iter()
            .map(|row| row.iter().zip(&lambda).map(|(p, l)| p * l).sum())
            .collect();
        normalize_max(&mut m);
        m
    }

    /// Unnormalized `[Pr(c̄, e), Pr(c, e)]` up to a common positive factor.
    pub fn class_joint(&self, evidence: &[Option<usize>]) -> [f64; 2] {
        let lambda = self.likelihood(self.root, evidence);
        let prior = &self.nodes[self.root].cpt[0];
        [prior[0] * lambda[0], prior[1] * lambda[1]]
    }

    /// `Pr(c | x)` by leaf-to-root sum-product message passing.
    pub fn posterior(&self, x: &Instance) -> Result<f64> {
        self.variables().check_instance(x)?;
        let obs: Vec<Option<usize>> = x.iter().map(|&v| Some(v)).collect();
        self.posterior_partial(&obs)
    }

    /// Posterior with some features unobserved.
    pub fn posterior_partial(&self, x: &[Option<usize>]) -> Result<f64> {
        let [neg, pos] = self.class_joint(&self.evidence(x));
        if neg + pos <= 0.0 {
            return Err(Error::UndefinedPosterior);
        }
        Ok(pos / (neg + pos))
    }

    pub fn decide(&self, x: &Instance) -> Result<bool> {
        Ok(self.posterior(x)? >= self.threshold)
    }
}

pub(crate) fn normalize_max(v: &mut [f64]) {
    let max = v.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        for x in v.iter_mut() {
            *x /= max;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::NaiveBayes;

    fn node(name: &str, k: usize, parent: Option<usize>, cpt: Vec<Vec<f64>>) -> TreeNode {
        TreeNode {
            name: name.into(),
            labels: (0..k).map(|i| i.to_string()).collect(),
            parent,
            cpt,
        }
    }

    #[test]
    fn naive_bayes_shaped_tree_matches_naive_bayes() {
        let nb = NaiveBayes::from_rates(
            0.3,
            0.5,
            &[("A", 0.1, 0.2), ("B", 0.35, 0.05), ("C", 0.4, 0.3)],
        )
        .unwrap();
        let mut nodes = vec![node("C0", 2, None, vec![vec![0.7, 0.3]])];
        for f in nb.features() {
            nodes.push(TreeNode {
                name: f.name.clone(),
                labels: f.labels.clone(),
                parent: Some(0),
                cpt: vec![f.given_neg.clone(), f.given_pos.clone()],
            });
        }
        let lt = LatentTree::new(nodes, 0.5).unwrap();
        for x in nb.variables().instances() {
            let (a, b) = (nb.posterior(&x).unwrap(), lt.posterior(&x).unwrap());
            assert!((a - b).abs() < 1e-12, "{x:?}: {a} vs {b}");
            assert_eq!(nb.decide(&x).unwrap(), lt.decide(&x).unwrap());
        }
    }

    #[test]
    fn structural_errors() {
        let two_roots = vec![
            node("C", 2, None, vec![vec![0.5, 0.5]]),
            node("D", 2, None, vec![vec![0.5, 0.5]]),
        ];
        assert!(LatentTree::new(two_roots, 0.5).is_err());
        let cycle = vec![
            node("C", 2, None, vec![vec![0.5, 0.5]]),
            node("H", 2, Some(2), vec![vec![0.5, 0.5]; 2]),
            node("G", 2, Some(1), vec![vec![0.5, 0.5]; 2]),
        ];
        assert!(LatentTree::new(cycle, 0.5).is_err());
        let bad_row = vec![
            node("C", 2, None, vec![vec![0.5, 0.5]]),
            node("X", 2, Some(0), vec![vec![0.5, 0.4], vec![0.5, 0.5]]),
        ];
        assert!(matches!(
            LatentTree::new(bad_row, 0.5),
            Err(Error::Normalization { .. })
        ));
    }

    #[test]
    fn kinds_and_features() {
        let nodes = vec![
            node("C", 2, None, vec![vec![0.5, 0.5]]),
            node(
                "H",
                3,
                Some(0),
                vec![vec![0.2, 0.3, 0.5], vec![0.6, 0.2, 0.2]],
            ),
            node(
                "X1",
                2,
                Some(1),
                vec![vec![0.9, 0.1], vec![0.5, 0.5], vec![0.2, 0.8]],
            ),
            node("X2", 2, Some(0), vec![vec![0.3, 0.7], vec![0.6, 0.4]]),
        ];
        let lt = LatentTree::new(nodes, 0.5).unwrap();
        assert_eq!(lt.kind(0), NodeKind::Class);
        assert_eq!(lt.kind(1), NodeKind::Hidden);
        assert_eq!(lt.feature_nodes(), &[2, 3]);
        assert_eq!(lt.feature_of_node(3), Some(1));
    }
}
