//! Explanations of individual decisions.
//!
//! * MC-explanations: decision-preserving instances reached from `x` by
//!   flipping a minimum number of features towards the opposite value.
//! * PI-explanations: minimal partial instances of `x` all of whose
//!   completions keep the decision, i.e. prime implicants compatible with `x`.

mod oracle;
mod pi;

pub use oracle::{brute_mc_general, brute_mc_oracle, brute_pi_oracle, is_prime_implicant_brute};
pub use pi::{explain_pi, pi_cover, pi_inst, verify_implicant, ImplicantSet};

use num_bigint::BigUint;

use crate::dd::{Costs, Dd, Instance, Manager, PartialInstance};
use crate::error::{Error, Result};

/// All MC-explanations of one decision, as a diagram in the caller's manager.
#[derive(Debug, Clone)]
pub struct McExplanationSet {
    /// Models are exactly the MC-explanations.
    pub diagram: Dd,
    pub instance: Instance,
    pub decision: bool,
}

impl McExplanationSet {
    pub fn count(&self, m: &Manager) -> Result<BigUint> {
        m.model_count(self.diagram)
    }

    /// Explanations in lexicographic order.
    pub fn explanations(&self, m: &Manager) -> Result<Vec<Instance>> {
        Ok(m.models(self.diagram)?.collect())
    }
}

/// Split of each variable's values into on- and off-values, plus a set of
/// fixed features that must keep their current value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OnOffPartition {
    /// `on[var][value]`
    pub on: Vec<Vec<bool>>,
    pub fixed: PartialInstance,
}

impl OnOffPartition {
    /// Binary reading: value 1 is on, value 0 is off, nothing fixed.
    pub fn binary(n: usize) -> Self {
        OnOffPartition {
            on: vec![vec![false, true]; n],
            fixed: PartialInstance::empty(n),
        }
    }

    /// Given on-value sets for each variable of `m`, nothing fixed.
    pub fn from_on_values(m: &Manager, on: &[Vec<usize>]) -> Result<Self> {
        let vars = m.vars();
        if on.len() != vars.len() {
            return Err(Error::Length {
                expected: vars.len(),
                got: on.len(),
            });
        }
        let mut table = Vec::with_capacity(on.len());
        for (var, values) in on.iter().enumerate() {
            let size = vars.domain_size(var);
            let mut row = vec![false; size];
            for &v in values {
                if v >= size {
                    return Err(Error::Domain {
                        var,
                        value: v,
                        size,
                    });
                }
                row[v] = true;
            }
            table.push(row);
        }
        Ok(OnOffPartition {
            on: table,
            fixed: PartialInstance::empty(on.len()),
        })
    }

    pub fn with_fixed(mut self, fixed: PartialInstance) -> Self {
        self.fixed = fixed;
        self
    }

    fn validate(&self, m: &Manager, x: &Instance) -> Result<()> {
        let n = m.num_vars();
        if self.on.len() != n || self.fixed.len() != n {
            return Err(Error::Argument(format!(
                "partition must cover all {n} variables"
            )));
        }
        for (var, row) in self.on.iter().enumerate() {
            if row.len() != m.vars().domain_size(var) {
                return Err(Error::Arity {
                    var,
                    expected: m.vars().domain_size(var),
                    got: row.len(),
                });
            }
        }
        if !self.on.iter().flatten().any(|&b| b) {
            return Err(Error::Argument("partition has no on-value".into()));
        }
        if !self.fixed.is_compatible(x) {
            return Err(Error::Argument(
                "fixed features disagree with the instance".into(),
            ));
        }
        Ok(())
    }
}

/// All MC-explanations of the decision `f(x)` on binary features: fix the
/// features of `x` already at the opposite value `1 − f(x)`, then keep the
/// decision-preserving completions with the fewest features at `f(x)`.
pub fn mc_explanations(m: &mut Manager, f: Dd, x: &Instance) -> Result<McExplanationSet> {
    if !m.vars().is_binary() {
        return Err(Error::Contract(
            "MC-explanations need binary features; use mc_explanations_general".into(),
        ));
    }
    let i = m.evaluate(f, x)?;
    let value = usize::from(i);
    let alpha = PartialInstance(x.iter().map(|&v| (v != value).then_some(v)).collect());
    let g = if i { f } else { m.complement(f)? };
    let g = m.conjoin_assignment(g, &alpha)?;
    let costs = Costs::count_value(m.vars(), value);
    let diagram = m.cardinality_minimize(g, &costs)?;
    Ok(McExplanationSet {
        diagram,
        instance: x.clone(),
        decision: i,
    })
}

/// MC-explanations over multi-valued features. For a positive decision the
/// features at off-values stay put and the on-count is minimized; for a
/// negative decision the roles swap, so the binary partition `on = {1}`
/// reproduces [`mc_explanations`] in both polarities. Fixed features always
/// keep their value.
pub fn mc_explanations_general(
    m: &mut Manager,
    f: Dd,
    x: &Instance,
    p: &OnOffPartition,
) -> Result<McExplanationSet> {
    m.vars().check_instance(x)?;
    p.validate(m, x)?;
    let i = m.evaluate(f, x)?;
    // `costly[var][value]`: values whose use is counted
    let costly: Vec<Vec<bool>> =
        p.on.iter()
            .map(|row| row.iter().map(|&on| on == i).collect())
            .collect();
    let alpha = PartialInstance(
        x.iter()
            .enumerate()
            .map(|(var, &v)| (p.fixed[var].is_some() || !costly[var][v]).then_some(v))
            .collect(),
    );
    let g = if i { f } else { m.complement(f)? };
    let g = m.conjoin_assignment(g, &alpha)?;
    let costs = Costs(
        costly
            .iter()
            .map(|row| row.iter().map(|&c| u32::from(c)).collect())
            .collect(),
    );
    let diagram = m.cardinality_minimize(g, &costs)?;
    Ok(McExplanationSet {
        diagram,
        instance: x.clone(),
        decision: i,
    })
}
