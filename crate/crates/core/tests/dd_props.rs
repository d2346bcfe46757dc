mod common;

use bnx_core::dd::{BoolOp, Costs, Instance, Manager, Mode, PartialInstance, VariableTable};
use num_bigint::BigUint;
use proptest::prelude::*;

/// Domain sizes plus truth tables for two functions over them.
fn tables() -> impl Strategy<Value = (Vec<usize>, Vec<bool>, Vec<bool>)> {
    prop::collection::vec(2usize..=3, 1..=4).prop_flat_map(|sizes| {
        let len: usize = sizes.iter().product();
        (
            Just(sizes),
            prop::collection::vec(any::<bool>(), len),
            prop::collection::vec(any::<bool>(), len),
        )
    })
}

fn vars(sizes: &[usize]) -> VariableTable {
    VariableTable::new(
        sizes
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                bnx_core::dd::Variable::new(
                    format!("X{i}"),
                    (0..b).map(|v| v.to_string()).collect(),
                )
            })
            .collect(),
    )
    .unwrap()
}

proptest! {
    #[test]
    fn operations_match_truth_tables((sizes, ta, tb) in tables(), mode_complete in any::<bool>()) {
        let vt = vars(&sizes);
        let mode = if mode_complete { Mode::Complete } else { Mode::Reduced };
        let mut m = Manager::new(vt.clone(), mode);
        let f = m.from_fn(|x| ta[vt.rank(x)]);
        let g = m.from_fn(|x| tb[vt.rank(x)]);
        // canonicity: rebuilding gives the same node
        prop_assert_eq!(m.from_fn(|x| ta[vt.rank(x)]), f);
        let and = m.combine(f, g, BoolOp::And).unwrap();
        let or = m.combine(f, g, BoolOp::Or).unwrap();
        let diff = m.combine(f, g, BoolOp::AndNot).unwrap();
        let not = m.complement(f).unwrap();
        for x in vt.instances() {
            let (a, b) = (ta[vt.rank(&x)], tb[vt.rank(&x)]);
            prop_assert_eq!(m.evaluate(and, &x).unwrap(), a && b);
            prop_assert_eq!(m.evaluate(or, &x).unwrap(), a || b);
            prop_assert_eq!(m.evaluate(diff, &x).unwrap(), a && !b);
            prop_assert_eq!(m.evaluate(not, &x).unwrap(), !a);
        }
        let count = ta.iter().filter(|&&b| b).count();
        prop_assert_eq!(m.model_count(f).unwrap(), BigUint::from(count));
        let models: Vec<Instance> = m.models(f).unwrap().collect();
        let expected: Vec<Instance> = vt.instances().filter(|x| ta[vt.rank(x)]).collect();
        prop_assert_eq!(models, expected);
    }

    #[test]
    fn minimize_and_conjoin((sizes, ta, _tb) in tables(), seed in any::<u64>(), mode_complete in any::<bool>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let vt = vars(&sizes);
        let mode = if mode_complete { Mode::Complete } else { Mode::Reduced };
        let mut m = Manager::new(vt.clone(), mode);
        let f = m.from_fn(|x| ta[vt.rank(x)]);
        let costs = Costs(sizes.iter().map(|&b| (0..b).map(|_| rng.gen_range(0..3)).collect()).collect());
        let min = m.cardinality_minimize(f, &costs).unwrap();
        let best = vt.instances().filter(|x| ta[vt.rank(x)]).map(|x| costs.cost_of(&x)).min();
        prop_assert_eq!(m.min_cost(f, &costs).unwrap(), best);
        for x in vt.instances() {
            let keep = ta[vt.rank(&x)] && Some(costs.cost_of(&x)) == best;
            prop_assert_eq!(m.evaluate(min, &x).unwrap(), keep);
        }
        let alpha = PartialInstance((0..sizes.len()).map(|i| rng.gen_bool(0.4).then(|| rng.gen_range(0..sizes[i]))).collect());
        let h = m.conjoin_assignment(f, &alpha).unwrap();
        for x in vt.instances() {
            prop_assert_eq!(m.evaluate(h, &x).unwrap(), ta[vt.rank(&x)] && alpha.is_compatible(&x));
        }
    }

    #[test]
    fn restrict_matches_cofactor((sizes, ta, _tb) in tables(), pick in any::<prop::sample::Index>()) {
        let vt = vars(&sizes);
        let mut m = Manager::new(vt.clone(), Mode::Reduced);
        let f = m.from_fn(|x| ta[vt.rank(x)]);
        let var = pick.index(sizes.len());
        for value in 0..sizes[var] {
            let r = m.restrict(f, var, value).unwrap();
            for x in vt.instances() {
                prop_assert_eq!(m.evaluate(r, &x).unwrap(), ta[vt.rank(&x.with(var, value))]);
            }
        }
    }
}

#[test]
fn foreign_handles_and_mode_errors() {
    let mut a = Manager::new(VariableTable::binary(2), Mode::Reduced);
    let mut b = Manager::new(VariableTable::binary(2), Mode::Complete);
    let fa = a.literal(0, 1).unwrap();
    let fb = b.literal(0, 1).unwrap();
    assert!(matches!(
        a.combine(fa, fb, BoolOp::And),
        Err(bnx_core::Error::ForeignDiagram)
    ));
    assert!(matches!(
        b.restrict(fb, 0, 1),
        Err(bnx_core::Error::Mode(_))
    ));
    assert!(a.evaluate(fa, &Instance(vec![0])).is_err());
}
