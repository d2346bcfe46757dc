//! Monotonicity of decision functions over binary features, and the
//! correspondence between MC-explanations and shortest PI-explanations that
//! holds for monotone functions.

use crate::classifier::DecisionTable;
use crate::dd::{BoolOp, Dd, Instance, Manager, PartialInstance};
use crate::error::{Error, Result};
use crate::explain::{explain_pi, mc_explanations};

/// Outcome of [`is_monotone`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub monotone: bool,
    /// `per_variable[i]`: raising variable `i` never lowers the decision.
    pub per_variable: Vec<bool>,
    /// When not monotone: `(lower, upper)` with `lower ⊆¹ upper` and
    /// `f(lower) = 1 > f(upper) = 0`. Values are in the original encoding.
    pub witness: Option<(Instance, Instance)>,
}

/// Decide monotonicity with respect to `0 < 1` on every variable, or `1 < 0`
/// on the variables whose `flip` entry is set.
pub fn is_monotone_with(m: &mut Manager, f: Dd, flip: &[bool]) -> Result<MonotonicityReport> {
    let n = m.num_vars();
    if !m.vars().is_binary() {
        return Err(Error::Contract(
            "monotonicity is only defined for binary features".into(),
        ));
    }
    if flip.len() != n {
        return Err(Error::Length {
            expected: n,
            got: flip.len(),
        });
    }
    let mut per_variable = Vec::with_capacity(n);
    let mut witness = None;
    for (var, &flipped) in flip.iter().enumerate().take(n) {
        let (low, high) = if flipped { (1, 0) } else { (0, 1) };
        let f_low = m.restrict(f, var, low)?;
        let f_high = m.restrict(f, var, high)?;
        let violation = m.combine(f_low, f_high, BoolOp::AndNot)?;
        let ok = m.sink_value(violation) == Some(false);
        per_variable.push(ok);
        if !ok && witness.is_none() {
            let rest = m
                .models(violation)?
                .next()
                .expect("nonzero diagram has a model");
            witness = Some((rest.with(var, low), rest.with(var, high)));
        }
    }
    Ok(MonotonicityReport {
        monotone: per_variable.iter().all(|&b| b),
        per_variable,
        witness,
    })
}

pub fn is_monotone(m: &mut Manager, f: Dd) -> Result<MonotonicityReport> {
    let n = m.num_vars();
    is_monotone_with(m, f, &vec![false; n])
}

/// Monotonicity by checking every pair that differs in one raised variable.
pub fn is_monotone_brute(table: &DecisionTable) -> Result<bool> {
    if !table.vars().is_binary() {
        return Err(Error::Contract(
            "monotonicity is only defined for binary features".into(),
        ));
    }
    Ok(table
        .iter()
        .all(|(x, d)| !d || (0..x.len()).all(|v| x[v] == 1 || table.get(&x.with(v, 1)))))
}

/// `mc` is obtained from `pi` by setting every missing feature to 0 (for a
/// positive decision) or to 1 (for a negative one).
pub fn match_explanation(mc: &Instance, pi: &PartialInstance, positive: bool) -> bool {
    let fill = usize::from(!positive);
    mc.len() == pi.len()
        && mc
            .iter()
            .zip(pi.iter())
            .all(|(&a, b)| a == b.unwrap_or(fill))
}

/// Every MC-explanation of `f(x)` matches some shortest PI-explanation and
/// vice versa. `f` must be monotone.
pub fn verify_mc_pi_correspondence(m: &mut Manager, f: Dd, x: &Instance) -> Result<bool> {
    if !is_monotone(m, f)?.monotone {
        return Err(Error::Contract(
            "the correspondence needs a monotone function".into(),
        ));
    }
    let mc = mc_explanations(m, f, x)?;
    let positive = mc.decision;
    let mcs = mc.explanations(m)?;
    let mut pis = explain_pi(m, f, x)?;
    let shortest = pis.shortest();
    let forward = mcs
        .iter()
        .all(|a| shortest.iter().any(|z| match_explanation(a, z, positive)));
    let backward = shortest
        .iter()
        .all(|z| mcs.iter().any(|a| match_explanation(a, z, positive)));
    Ok(forward && backward && mcs.len() == shortest.len())
}
