use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::dd::{BoolOp, Costs, Dd, Instance, Manager, Mode, PartialInstance, VariableTable};
use crate::error::{Error, Result};

/// A set of implicants as a complete-mode diagram over the extended domains:
/// variable `i` takes its original values plus `⋆ = domain_size(i)`.
#[derive(Debug)]
pub struct ImplicantSet {
    pub manager: Manager,
    pub root: Dd,
    /// Instance the implicants are restricted to, if any.
    pub instance: Option<Instance>,
    /// Decision the implicants preserve.
    pub decision: bool,
}

impl ImplicantSet {
    /// Domain sizes of the original variables.
    fn base_sizes(&self) -> Vec<usize> {
        self.manager
            .vars()
            .domain_sizes()
            .iter()
            .map(|b| b - 1)
            .collect()
    }

    fn decode_one(&self, x: &Instance) -> PartialInstance {
        let base = self.base_sizes();
        PartialInstance(
            x.iter()
                .zip(&base)
                .map(|(&v, &b)| (v < b).then_some(v))
                .collect(),
        )
    }

    /// The implicants, in lexicographic order of their extended encoding.
    pub fn decode(&self) -> Vec<PartialInstance> {
        self.manager
            .models(self.root)
            .expect("own root")
            .map(|x| self.decode_one(&x))
            .collect()
    }

    pub fn count(&self) -> BigUint {
        self.manager.model_count(self.root).expect("own root")
    }

    pub fn size(&self) -> usize {
        self.manager.size(self.root).expect("own root")
    }

    fn length_costs(&self) -> Costs {
        Costs(
            self.base_sizes()
                .iter()
                .map(|&b| (0..=b).map(|v| u32::from(v < b)).collect())
                .collect(),
        )
    }

    /// The implicants with the fewest assigned features.
    pub fn shortest(&mut self) -> Vec<PartialInstance> {
        let costs = self.length_costs();
        let min = self
            .manager
            .cardinality_minimize(self.root, &costs)
            .expect("costs match the extended table");
        self.manager
            .models(min)
            .expect("own root")
            .map(|x| self.decode_one(&x))
            .collect()
    }

    /// Keep only the implicants `z ⊆ x`.
    pub fn filter_compatible(mut self, x: &Instance) -> Result<ImplicantSet> {
        let base = self.base_sizes();
        let mut chain = self.manager.constant(true);
        for var in (0..base.len()).rev() {
            let f = self.manager.constant(false);
            let children: Vec<Dd> = (0..=base[var])
                .map(|v| {
                    if v == x[var] || v == base[var] {
                        chain
                    } else {
                        f
                    }
                })
                .collect();
            chain = self.manager.intern_node(var, &children)?;
        }
        self.root = self.manager.combine(self.root, chain, BoolOp::And)?;
        self.instance = Some(x.clone());
        Ok(self)
    }

    /// Number of implicants per length.
    pub fn length_histogram(&self) -> BTreeMap<usize, BigUint> {
        let base = self.base_sizes();
        let n = base.len();
        let mut memo: HashMap<Dd, Vec<BigUint>> = HashMap::new();
        let nodes = self.manager.topological(self.root).expect("own root");
        let sink = |m: &Manager, d: Dd| -> Option<Vec<BigUint>> {
            m.sink_value(d)
                .map(|b| if b { vec![BigUint::one()] } else { Vec::new() })
        };
        for (u, var, children) in nodes {
            let mut acc: Vec<BigUint> = vec![BigUint::zero(); n + 1];
            for (v, c) in children.into_iter().enumerate() {
                let hist = match sink(&self.manager, c) {
                    Some(h) => h,
                    None => memo[&c].clone(),
                };
                let shift = usize::from(v < base[var]);
                for (len, count) in hist.into_iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                    acc[len + shift] += count;
                }
            }
            memo.insert(u, acc);
        }
        let top = match sink(&self.manager, self.root) {
            Some(h) => h,
            None => memo.remove(&self.root).unwrap_or_default(),
        };
        top.into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }
}

struct PiBuilder<'a> {
    f_mgr: &'a mut Manager,
    out: Manager,
    sizes: Vec<usize>,
    instance: Option<&'a Instance>,
    memo: HashMap<(Dd, usize), Dd>,
}

impl PiBuilder<'_> {
    fn cofactor(&self, f: Dd, level: usize, v: usize) -> Dd {
        if self.f_mgr.var_of(f) == Some(level) {
            self.f_mgr.children(f)[v]
        } else {
            f
        }
    }

    /// Prime implicants of `f` over variables `level..n`, as a complete
    /// diagram rooted at `level`.
    fn pi(&mut self, f: Dd, level: usize) -> Result<Dd> {
        if self.f_mgr.sink_value(f) == Some(false) {
            return Ok(self.out.constant(false));
        }
        if level == self.sizes.len() {
            return Ok(self.out.constant(true));
        }
        if let Some(&r) = self.memo.get(&(f, level)) {
            return Ok(r);
        }
        let b = self.sizes[level];
        let cofactors: Vec<Dd> = (0..b).map(|v| self.cofactor(f, level, v)).collect();
        let mut conj = cofactors[0];
        for &c in &cofactors[1..] {
            conj = self.f_mgr.combine(conj, c, BoolOp::And)?;
        }
        let star = self.pi(conj, level + 1)?;
        let mut children = Vec::with_capacity(b + 1);
        for (v, &c) in cofactors.iter().enumerate() {
            if self.instance.is_some_and(|x| x[level] != v) {
                children.push(self.out.constant(false));
                continue;
            }
            let g = self.pi(c, level + 1)?;
            children.push(self.out.combine(g, star, BoolOp::AndNot)?);
        }
        children.push(star);
        let r = self.out.intern_node(level, &children)?;
        self.memo.insert((f, level), r);
        Ok(r)
    }
}

fn build(m: &mut Manager, f: Dd, instance: Option<&Instance>) -> Result<(Manager, Dd)> {
    let vars: VariableTable = m.vars().with_wildcards();
    let mut b = PiBuilder {
        sizes: m.vars().domain_sizes(),
        f_mgr: m,
        out: Manager::new(vars, Mode::Complete),
        instance,
        memo: HashMap::new(),
    };
    let root = b.pi(f, 0)?;
    Ok((b.out, root))
}

/// All prime implicants of `f`.
pub fn pi_cover(m: &mut Manager, f: Dd) -> Result<ImplicantSet> {
    let (manager, root) = build(m, f, None)?;
    Ok(ImplicantSet {
        manager,
        root,
        instance: None,
        decision: true,
    })
}

/// Prime implicants of `f` compatible with `x`; `f(x)` must be 1.
pub fn pi_inst(m: &mut Manager, f: Dd, x: &Instance) -> Result<ImplicantSet> {
    if !m.evaluate(f, x)? {
        return Err(Error::Contract(
            "pi_inst needs f(x) = 1; complement f for negative instances".into(),
        ));
    }
    let (manager, root) = build(m, f, Some(x))?;
    Ok(ImplicantSet {
        manager,
        root,
        instance: Some(x.clone()),
        decision: true,
    })
}

/// PI-explanations of the decision `f(x)`, whichever its polarity.
pub fn explain_pi(m: &mut Manager, f: Dd, x: &Instance) -> Result<ImplicantSet> {
    let decision = m.evaluate(f, x)?;
    let g = if decision { f } else { m.complement(f)? };
    let mut s = pi_inst(m, g, x)?;
    s.decision = decision;
    Ok(s)
}

/// Every completion of `z` has decision `decision` under `f`.
pub fn verify_implicant(
    m: &mut Manager,
    f: Dd,
    z: &PartialInstance,
    decision: bool,
) -> Result<bool> {
    let other = if decision { m.complement(f)? } else { f };
    let h = m.conjoin_assignment(other, z)?;
    Ok(m.sink_value(h) == Some(false))
}
