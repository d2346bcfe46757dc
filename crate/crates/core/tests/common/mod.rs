#![allow(dead_code)]

use bnx_core::classifier::{Feature, LatentTree, NaiveBayes, TreeNode};
use bnx_core::dd::{Dd, Instance, Manager, Mode, Variable, VariableTable};
use rand::Rng;

pub fn admissions() -> NaiveBayes {
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

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

/// Strictly positive distribution over `k` values.
pub fn random_row(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|v| v / s).collect()
}

fn labels(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("v{i}")).collect()
}

pub fn random_nb(rng: &mut impl Rng, n: usize, max_b: usize) -> NaiveBayes {
    let features = (0..n)
        .map(|i| {
            let b = rng.gen_range(2..=max_b);
            Feature {
                name: format!("X{i}"),
                labels: labels(b),
                given_pos: random_row(rng, b),
                given_neg: random_row(rng, b),
            }
        })
        .collect();
    NaiveBayes::new(
        rng.gen_range(0.05..0.95),
        rng.gen_range(0.02..0.98),
        features,
    )
    .unwrap()
}

/// Random latent tree: binary class root, up to three hidden nodes with
/// domains of size ≤ 3, and `n` feature leaves.
pub fn random_lt(rng: &mut impl Rng, n: usize) -> LatentTree {
    let mut nodes = vec![TreeNode {
        name: "C".into(),
        labels: labels(2),
        parent: None,
        cpt: vec![random_row(rng, 2)],
    }];
    let hidden = rng.gen_range(0..=3);
    for h in 0..hidden {
        let parent = rng.gen_range(0..nodes.len());
        let k = rng.gen_range(2..=3);
        let rows = nodes[parent].labels.len();
        nodes.push(TreeNode {
            name: format!("H{h}"),
            labels: labels(k),
            parent: Some(parent),
            cpt: (0..rows).map(|_| random_row(rng, k)).collect(),
        });
    }
    let internal = nodes.len();
    // every hidden node gets a child first so it stays internal
    let mut parents: Vec<usize> = (1..internal).collect();
    while parents.len() < n {
        parents.push(rng.gen_range(0..internal));
    }
    parents.truncate(n.max(internal - 1));
    for (i, &parent) in parents.iter().enumerate() {
        let k = rng.gen_range(2..=3);
        let rows = nodes[parent].labels.len();
        nodes.push(TreeNode {
            name: format!("X{i}"),
            labels: labels(k),
            parent: Some(parent),
            cpt: (0..rows).map(|_| random_row(rng, k)).collect(),
        });
    }
    LatentTree::new(nodes, rng.gen_range(0.05..0.95)).unwrap()
}

pub fn random_domains(rng: &mut impl Rng, n: usize, max_b: usize) -> VariableTable {
    VariableTable::new(
        (0..n)
            .map(|i| Variable::new(format!("X{i}"), labels(rng.gen_range(2..=max_b))))
            .collect(),
    )
    .unwrap()
}

/// Random function of random density, built by Shannon expansion.
pub fn random_function(rng: &mut impl Rng, vars: VariableTable) -> (Manager, Dd) {
    let p = rng.gen_range(0.15..0.85);
    let mut m = Manager::new(vars, Mode::Reduced);
    let f = m.from_fn(|_| rng.gen_bool(p));
    (m, f)
}

/// Random monotone function: a disjunction of random positive terms.
pub fn random_monotone(rng: &mut impl Rng, n: usize) -> (Manager, Dd) {
    let terms: Vec<Vec<usize>> = (0..rng.gen_range(1..=4))
        .map(|_| (0..n).filter(|_| rng.gen_bool(0.4)).collect())
        .collect();
    let mut m = Manager::new(VariableTable::binary(n), Mode::Reduced);
    let f = m.from_fn(|x| terms.iter().any(|t| t.iter().all(|&v| x[v] == 1)));
    (m, f)
}

pub fn random_instance(rng: &mut impl Rng, vars: &VariableTable) -> Instance {
    Instance(
        (0..vars.len())
            .map(|i| rng.gen_range(0..vars.domain_size(i)))
            .collect(),
    )
}
