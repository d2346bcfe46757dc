mod common;

use bnx_core::classifier::DecisionTable;
use bnx_core::compiler::compile_naive_bayes;
use bnx_core::dd::{Instance, Manager, Mode, VariableTable};
use bnx_core::explain::explain_pi;
use bnx_core::monotone::{
    is_monotone, is_monotone_brute, is_monotone_with, match_explanation,
    verify_mc_pi_correspondence,
};
use bnx_core::Error;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::*;

#[test]
fn admissions_is_monotone_and_satisfies_the_correspondence() {
    let odd = compile_naive_bayes(&admissions(), &[0, 1, 2, 3]).unwrap();
    let mut m = odd.manager;
    assert!(is_monotone(&mut m, odd.root).unwrap().monotone);
    for x in m.vars().clone().instances() {
        assert!(
            verify_mc_pi_correspondence(&mut m, odd.root, &x).unwrap(),
            "{x:?}"
        );
    }
}

#[test]
fn agrees_with_brute_force_and_witnesses_violate() {
    let mut rng = StdRng::seed_from_u64(31);
    for _ in 0..150 {
        let n = rng.gen_range(1..=6);
        let (mut m, f) = if rng.gen_bool(0.3) {
            random_monotone(&mut rng, n)
        } else {
            random_function(&mut rng, VariableTable::binary(n))
        };
        let table = DecisionTable::from_diagram(&m, f, 1 << 20).unwrap();
        let r = is_monotone(&mut m, f).unwrap();
        assert_eq!(r.monotone, is_monotone_brute(&table).unwrap());
        if let Some((lo, hi)) = &r.witness {
            assert!(m.evaluate(f, lo).unwrap() && !m.evaluate(f, hi).unwrap());
            assert!((0..n).all(|v| lo[v] <= hi[v]));
        }
    }
}

#[test]
fn monotone_functions_satisfy_the_correspondence() {
    let mut rng = StdRng::seed_from_u64(32);
    for _ in 0..60 {
        let n = rng.gen_range(1..=6);
        let (mut m, f) = random_monotone(&mut rng, n);
        let x = random_instance(&mut rng, m.vars());
        assert!(verify_mc_pi_correspondence(&mut m, f, &x).unwrap());
        // shortest explanations of positive decisions only use 1-values
        if m.evaluate(f, &x).unwrap() {
            for z in explain_pi(&mut m, f, &x).unwrap().shortest() {
                assert!(z.iter().all(|v| v.is_none_or(|v| v == 1)));
            }
        }
    }
}

#[test]
fn flip_mask_and_errors() {
    let mut m = Manager::new(VariableTable::binary(2), Mode::Reduced);
    let f = m.from_fn(|x| x[0] == 0 && x[1] == 1);
    assert!(!is_monotone(&mut m, f).unwrap().monotone);
    let r = is_monotone_with(&mut m, f, &[true, false]).unwrap();
    assert!(r.monotone && r.per_variable == vec![true, true]);
    assert!(is_monotone_with(&mut m, f, &[true]).is_err());
    assert!(matches!(
        verify_mc_pi_correspondence(&mut m, f, &Instance(vec![0, 1])),
        Err(Error::Contract(_))
    ));
    let vars = VariableTable::new(vec![bnx_core::dd::Variable::new(
        "A",
        vec!["a".into(), "b".into(), "c".into()],
    )])
    .unwrap();
    let mut m3 = Manager::new(vars, Mode::Reduced);
    let g = m3.literal(0, 2).unwrap();
    assert!(is_monotone(&mut m3, g).is_err());
}

#[test]
fn matching_examples() {
    let mc = Instance(vec![1, 0, 0, 1]);
    let wg = bnx_core::dd::PartialInstance(vec![Some(1), None, None, Some(1)]);
    let wfe = bnx_core::dd::PartialInstance(vec![Some(1), Some(1), Some(1), None]);
    assert!(match_explanation(&mc, &wg, true));
    assert!(!match_explanation(&mc, &wfe, true));
}
