mod common;

use bnx_core::classifier::{Classifier, DecisionTable, NaiveBayes};
use bnx_core::compiler::{
    compile_latent_tree, compile_latent_tree_with, compile_naive_bayes, compile_naive_bayes_with,
    processing_order, CompileOptions, LtMerge, NaiveBayesCompiler,
};
use bnx_core::dd::Instance;
use bnx_core::Error;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use common::*;

fn check_against_table(c: &Classifier, odd: &bnx_core::compiler::CompiledOdd) {
    let table = DecisionTable::from_classifier(c, 1 << 20).unwrap();
    for (x, d) in table.iter() {
        assert_eq!(odd.decide(&x).unwrap(), d, "{x:?}");
    }
}

#[test]
fn random_naive_bayes_any_order() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..60 {
        let n = rng.gen_range(1..=7);
        let nb = random_nb(&mut rng, n, 3);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let odd = compile_naive_bayes(&nb, &order).unwrap();
        assert_eq!(odd.order, order);
        check_against_table(&nb.clone().into(), &odd);
    }
}

#[test]
fn naive_bayes_frontier_bound() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..40 {
        let n = rng.gen_range(2..=8);
        let nb = random_nb(&mut rng, n, 3);
        let b = nb.features().iter().map(|f| f.labels.len()).max().unwrap() as f64;
        let odd = compile_naive_bayes(&nb, &(0..n).collect::<Vec<_>>()).unwrap();
        for s in &odd.stats {
            let i = s.depth as f64;
            assert!(
                s.open as f64 <= b.powf(i).min(b.powf(n as f64 - i)),
                "{s:?}"
            );
        }
    }
}

#[test]
fn zero_probability_entries() {
    let mut nb = admissions();
    // make W = + impossible under the negative class
    let mut features = nb.features().to_vec();
    features[0].given_neg = vec![1.0, 0.0];
    nb = NaiveBayes::new(nb.prior(), nb.threshold(), features).unwrap();
    let odd = compile_naive_bayes(&nb, &[0, 1, 2, 3]).unwrap();
    for x in nb.variables().instances() {
        assert_eq!(odd.decide(&x).unwrap(), nb.decide(&x).unwrap());
    }
    assert!(odd.decide(&Instance(vec![1, 0, 0, 0])).unwrap());
}

#[test]
fn extreme_thresholds() {
    let nb = admissions();
    for (t, models) in [(0.0, 16u32), (1.0, 0)] {
        let odd = compile_naive_bayes(&nb.with_threshold(t).unwrap(), &[0, 1, 2, 3]).unwrap();
        assert_eq!(odd.manager.model_count(odd.root).unwrap(), models.into());
    }
}

#[test]
fn stepwise_api_rejects_misuse() {
    let nb = admissions();
    let mut c = NaiveBayesCompiler::new(&nb, CompileOptions::default()).unwrap();
    c.expand_then_merge(2).unwrap();
    assert!(matches!(c.expand_then_merge(2), Err(Error::Sequencing(_))));
    assert!(matches!(c.expand_then_merge(9), Err(Error::Sequencing(_))));
    assert!(matches!(
        compile_naive_bayes(&nb, &[0, 0, 1, 2]),
        Err(Error::Argument(_))
    ));
    let mut c = NaiveBayesCompiler::new(&nb, CompileOptions::default()).unwrap();
    c.expand_then_merge(0).unwrap();
    // stopping early leaves open leaves
    assert!(matches!(c.finish(), Err(Error::Sequencing(_))));
    let _ = compile_naive_bayes_with(&nb, &[3, 2, 1, 0], CompileOptions::default()).unwrap();
}

#[test]
fn random_latent_trees_every_merge_mode() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..30 {
        let n = rng.gen_range(1..=7);
        let lt = random_lt(&mut rng, n);
        let c: Classifier = lt.clone().into();
        for merge in [LtMerge::Exact, LtMerge::Message, LtMerge::None] {
            let odd = compile_latent_tree_with(&lt, merge, CompileOptions::default()).unwrap();
            assert_eq!(odd.order, processing_order(&lt));
            check_against_table(&c, &odd);
        }
    }
}

#[test]
fn latent_tree_frontier_bound() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..30 {
        let n = rng.gen_range(2..=8);
        let lt = random_lt(&mut rng, n);
        let vars = lt.variables();
        let b = (0..vars.len()).map(|i| vars.domain_size(i)).max().unwrap() as f64;
        let n = vars.len() as f64;
        let odd = compile_latent_tree(&lt).unwrap();
        for s in &odd.stats {
            assert!(s.open as f64 <= b.powf(0.75 * n), "{s:?}");
        }
    }
}

#[test]
fn naive_bayes_shaped_tree_compiles_like_naive_bayes() {
    let nb = admissions();
    let text = bnx_core::io::format_classifier(&nb.clone().into());
    assert!(text.starts_with("kind naive_bayes"));
    let mut nodes = vec![bnx_core::classifier::TreeNode {
        name: "A".into(),
        labels: vec!["-".into(), "+".into()],
        parent: None,
        cpt: vec![vec![1.0 - nb.prior(), nb.prior()]],
    }];
    for f in nb.features() {
        nodes.push(bnx_core::classifier::TreeNode {
            name: f.name.clone(),
            labels: f.labels.clone(),
            parent: Some(0),
            cpt: vec![f.given_neg.clone(), f.given_pos.clone()],
        });
    }
    let lt = bnx_core::classifier::LatentTree::new(nodes, nb.threshold()).unwrap();
    let a = compile_latent_tree(&lt).unwrap();
    let b = compile_naive_bayes(&nb, &a.order).unwrap();
    assert_eq!(
        a.manager.size(a.root).unwrap(),
        b.manager.size(b.root).unwrap()
    );
    assert_eq!(
        a.manager.model_count(a.root).unwrap(),
        b.manager.model_count(b.root).unwrap()
    );
}
