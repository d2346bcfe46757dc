//! Exhaustive reference implementations of the explanation definitions.

use crate::classifier::DecisionTable;
use crate::dd::{Instance, PartialInstance};
use crate::error::{Error, Result};

use super::OnOffPartition;

/// MC-explanations by scanning the table: decision-preserving `x⋆` that keep
/// every feature of `x` already at `1 − f(x)`, with the fewest features at
/// `f(x)`. Binary tables only.
pub fn brute_mc_oracle(table: &DecisionTable, x: &Instance) -> Result<Vec<Instance>> {
    if !table.vars().is_binary() {
        return Err(Error::Contract(
            "brute_mc_oracle needs binary features".into(),
        ));
    }
    let n = table.vars().len();
    brute_mc_general(table, x, &OnOffPartition::binary(n))
}

/// Generalized MC-explanations by scanning the table (see
/// [`super::mc_explanations_general`] for the roles of on- and off-values).
pub fn brute_mc_general(
    table: &DecisionTable,
    x: &Instance,
    p: &OnOffPartition,
) -> Result<Vec<Instance>> {
    table.vars().check_instance(x)?;
    let i = table.get(x);
    let costly = |var: usize, v: usize| p.on[var][v] == i;
    let mut best: Option<usize> = None;
    let mut out = Vec::new();
    for (y, d) in table.iter() {
        if d != i {
            continue;
        }
        let frozen_ok = (0..x.len()).all(|var| {
            let frozen = p.fixed[var].is_some() || !costly(var, x[var]);
            !frozen || y[var] == x[var]
        });
        if !frozen_ok {
            continue;
        }
        let cost = (0..y.len()).filter(|&var| costly(var, y[var])).count();
        match best {
            Some(b) if cost > b => {}
            Some(b) if cost == b => out.push(y),
            _ => {
                best = Some(cost);
                out.clear();
                out.push(y);
            }
        }
    }
    Ok(out)
}

/// Every completion of `z` has decision `decision` in the table.
pub fn is_prime_implicant_brute(
    table: &DecisionTable,
    z: &PartialInstance,
    decision: bool,
) -> bool {
    let implicant = |z: &PartialInstance| {
        table
            .iter()
            .all(|(y, d)| !z.is_compatible(&y) || d == decision)
    };
    if !implicant(z) {
        return false;
    }
    (0..z.len()).filter(|&v| z[v].is_some()).all(|v| {
        let mut smaller = z.clone();
        smaller.0[v] = None;
        !implicant(&smaller)
    })
}

/// PI-explanations by enumerating every sub-assignment of `x`, sorted.
/// Work grows like `Π (1 + b_i)`; refused above `cap`.
pub fn brute_pi_oracle(
    table: &DecisionTable,
    x: &Instance,
    cap: u128,
) -> Result<Vec<PartialInstance>> {
    let vars = table.vars();
    vars.check_instance(x)?;
    let n = vars.len();
    let work = vars
        .domain_sizes()
        .iter()
        .try_fold(1u128, |acc, &b| acc.checked_mul(1 + b as u128))
        .unwrap_or(u128::MAX);
    if n > 16 || work > cap {
        return Err(Error::Capacity {
            required: work,
            cap,
        });
    }
    let i = table.get(x);
    let subset = |mask: usize| {
        PartialInstance(
            (0..n)
                .map(|v| (mask >> v & 1 == 1).then_some(x[v]))
                .collect(),
        )
    };
    // implicant[mask]: every completion of x restricted to mask has decision i
    let mut implicant = vec![true; 1 << n];
    for (y, d) in table.iter() {
        if d == i {
            continue;
        }
        // y breaks every mask on which it agrees with x
        let agree = (0..n).fold(0usize, |acc, v| acc | (usize::from(y[v] == x[v]) << v));
        let mut sub = agree;
        loop {
            implicant[sub] = false;
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & agree;
        }
    }
    let mut out: Vec<PartialInstance> = (0..1usize << n)
        .filter(|&mask| {
            implicant[mask] && (0..n).all(|v| mask >> v & 1 == 0 || !implicant[mask & !(1 << v)])
        })
        .map(subset)
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::VariableTable;

    #[test]
    fn constant_tables() {
        let t = DecisionTable::from_fn(VariableTable::binary(3), 64, |_| Ok(true)).unwrap();
        let x = Instance(vec![1, 0, 1]);
        assert_eq!(
            brute_mc_oracle(&t, &x).unwrap(),
            vec![Instance(vec![0, 0, 0])]
        );
        assert_eq!(
            brute_pi_oracle(&t, &x, 1 << 20).unwrap(),
            vec![PartialInstance::empty(3)]
        );
        assert!(is_prime_implicant_brute(
            &t,
            &PartialInstance::empty(3),
            true
        ));
    }

    #[test]
    fn capacity_is_enforced() {
        let t = DecisionTable::from_fn(VariableTable::binary(4), 64, |x| Ok(x[0] == 1)).unwrap();
        assert!(matches!(
            brute_pi_oracle(&t, &Instance(vec![0; 4]), 10),
            Err(Error::Capacity { .. })
        ));
    }
}
