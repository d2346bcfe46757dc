//! Hash-consed ordered decision diagrams over multi-valued variables.
//!
//! A [`Manager`] owns every node of the diagrams built inside it. Variables
//! are identified by their position in the manager's [`VariableTable`], and
//! that position is also the diagram order: an edge always goes from a node on
//! variable `i` to a node on some variable `j > i`, or to a sink.
//!
//! Two node disciplines are supported (see [`Mode`]):
//!
//! * `Reduced`: canonical ROBDD-style diagrams. A node whose children are all
//!   identical is never allocated, so a variable skipped on a path is free.
//! * `Complete`: every path that reaches the 1-sink tests every variable.
//!   Only nodes whose children are all the 0-sink collapse, and an edge may
//!   jump straight to the 0-sink from any level. Used for sets of partial
//!   instances, where a skipped variable would be ambiguous.
//!
//! Nodes are never freed; a manager is dropped as a whole.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU32, Ordering};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

static NEXT_MANAGER_ID: AtomicU32 = AtomicU32::new(1);

const FALSE: u32 = 0;
const TRUE: u32 = 1;

/// One variable of a diagram: a name and its value labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub labels: Vec<String>,
}

impl Variable {
    pub fn new(name: impl Into<String>, labels: Vec<String>) -> Self {
        Variable {
            name: name.into(),
            labels,
        }
    }

    /// A binary variable labelled `-` / `+`.
    pub fn binary(name: impl Into<String>) -> Self {
        Variable::new(name, vec!["-".to_string(), "+".to_string()])
    }

    pub fn domain_size(&self) -> usize {
        self.labels.len()
    }
}

/// Ordered list of variables. Index `i` is the `i`-th variable of the order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VariableTable {
    vars: Vec<Variable>,
}

impl VariableTable {
    pub fn new(vars: Vec<Variable>) -> Result<Self> {
        for (i, v) in vars.iter().enumerate() {
            if v.labels.len() < 2 {
                return Err(Error::Structure(format!(
                    "variable {} ({}) needs at least two values",
                    i, v.name
                )));
            }
            for (a, la) in v.labels.iter().enumerate() {
                if v.labels[..a].contains(la) {
                    return Err(Error::Structure(format!(
                        "variable {} has duplicate value label {la:?}",
                        v.name
                    )));
                }
            }
        }
        Ok(VariableTable { vars })
    }

    /// `n` binary variables named `X1..Xn`.
    pub fn binary(n: usize) -> Self {
        VariableTable {
            vars: (1..=n).map(|i| Variable::binary(format!("X{i}"))).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Variable> {
        self.vars.get(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Variable> {
        self.vars.iter()
    }

    pub fn domain_size(&self, i: usize) -> usize {
        self.vars[i].labels.len()
    }

    pub fn domain_sizes(&self) -> Vec<usize> {
        self.vars.iter().map(|v| v.labels.len()).collect()
    }

    pub fn is_binary(&self) -> bool {
        self.vars.iter().all(|v| v.labels.len() == 2)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Number of complete instances, `None` if it does not fit in a `u128`.
    pub fn space_size(&self) -> Option<u128> {
        self.vars
            .iter()
            .try_fold(1u128, |acc, v| acc.checked_mul(v.labels.len() as u128))
    }

    pub fn check_instance(&self, x: &Instance) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::Length {
                expected: self.len(),
                got: x.len(),
            });
        }
        for (i, &v) in x.iter().enumerate() {
            let size = self.domain_size(i);
            if v >= size {
                return Err(Error::Domain {
                    var: i,
                    value: v,
                    size,
                });
            }
        }
        Ok(())
    }

    pub fn check_partial(&self, z: &PartialInstance) -> Result<()> {
        if z.len() != self.len() {
            return Err(Error::Length {
                expected: self.len(),
                got: z.len(),
            });
        }
        for (i, v) in z.iter().enumerate() {
            if let Some(v) = *v {
                let size = self.domain_size(i);
                if v >= size {
                    return Err(Error::Domain {
                        var: i,
                        value: v,
                        size,
                    });
                }
            }
        }
        Ok(())
    }

    /// Mixed-radix rank of `x`, first variable most significant.
    pub fn rank(&self, x: &Instance) -> usize {
        x.iter()
            .enumerate()
            .fold(0usize, |acc, (i, &v)| acc * self.domain_size(i) + v)
    }

    pub fn unrank(&self, mut rank: usize) -> Instance {
        let mut values = vec![0; self.len()];
        for i in (0..self.len()).rev() {
            let b = self.domain_size(i);
            values[i] = rank % b;
            rank /= b;
        }
        Instance(values)
    }

    /// Every instance in lexicographic order.
    pub fn instances(&self) -> Instances {
        Instances {
            sizes: self.domain_sizes(),
            next: Some(vec![0; self.len()]),
        }
    }

    /// The table extended with one extra "don't care" value per variable,
    /// labelled `*`, used for sets of partial instances.
    pub fn with_wildcards(&self) -> VariableTable {
        VariableTable {
            vars: self
                .vars
                .iter()
                .map(|v| {
                    let mut labels = v.labels.clone();
                    labels.push("*".to_string());
                    Variable::new(v.name.clone(), labels)
                })
                .collect(),
        }
    }

    /// Parse whitespace-separated value labels. For binary variables `+`
    /// and `-` also select value 1 and 0.
    pub fn parse_instance(&self, text: &str) -> Result<Instance> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() != self.len() {
            return Err(Error::Length {
                expected: self.len(),
                got: tokens.len(),
            });
        }
        let mut values = Vec::with_capacity(tokens.len());
        for (i, tok) in tokens.iter().enumerate() {
            let var = &self.vars[i];
            let v = match var.labels.iter().position(|l| l == tok) {
                Some(v) => v,
                None if var.labels.len() == 2 && *tok == "+" => 1,
                None if var.labels.len() == 2 && *tok == "-" => 0,
                None => {
                    return Err(Error::Argument(format!(
                        "{tok:?} is not a value of variable {}",
                        var.name
                    )))
                }
            };
            values.push(v);
        }
        Ok(Instance(values))
    }

    pub fn format_instance(&self, x: &Instance) -> String {
        x.iter()
            .enumerate()
            .map(|(i, &v)| self.vars[i].labels[v].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Unset variables render as `*`.
    pub fn format_partial(&self, z: &PartialInstance) -> String {
        z.iter()
            .enumerate()
            .map(|(i, v)| match v {
                Some(v) => self.vars[i].labels[*v].as_str(),
                None => "*",
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Lexicographic iterator over all instances of a variable table.
pub struct Instances {
    sizes: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Iterator for Instances {
    type Item = Instance;

    fn next(&mut self) -> Option<Instance> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            succ[i] += 1;
            if succ[i] < self.sizes[i] {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(Instance(current))
    }
}

/// A complete assignment: one value index per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Instance(pub Vec<usize>);

impl Instance {
    pub fn with(&self, var: usize, value: usize) -> Instance {
        let mut x = self.clone();
        x.0[var] = value;
        x
    }
}

impl std::ops::Deref for Instance {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.0
    }
}

/// A partial assignment; `None` marks an unconstrained variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialInstance(pub Vec<Option<usize>>);

impl PartialInstance {
    pub fn empty(n: usize) -> Self {
        PartialInstance(vec![None; n])
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut z = PartialInstance::empty(n);
        for &(var, value) in pairs {
            z.0[var] = Some(value);
        }
        z
    }

    /// Number of assigned variables.
    pub fn len_assigned(&self) -> usize {
        self.0.iter().filter(|v| v.is_some()).count()
    }

    /// Every assigned variable agrees with `x`.
    pub fn is_compatible(&self, x: &Instance) -> bool {
        self.0
            .iter()
            .zip(x.iter())
            .all(|(z, &v)| z.is_none_or(|z| z == v))
    }

    /// `self` assigns a subset of what `other` assigns, with equal values.
    pub fn is_subset_of(&self, other: &PartialInstance) -> bool {
        self.0
            .iter()
            .zip(other.0.iter())
            .all(|(a, b)| a.is_none() || a == b)
    }
}

impl std::ops::Deref for PartialInstance {
    type Target = [Option<usize>];
    fn deref(&self) -> &[Option<usize>] {
        &self.0
    }
}

impl From<&Instance> for PartialInstance {
    fn from(x: &Instance) -> Self {
        PartialInstance(x.iter().map(|&v| Some(v)).collect())
    }
}

/// Per-variable, per-value costs for cardinality minimization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Costs(pub Vec<Vec<u32>>);

impl Costs {
    /// Cost 1 for value `value` of every binary variable, 0 otherwise: the
    /// classic `value`-minimization.
    pub fn count_value(vars: &VariableTable, value: usize) -> Self {
        Costs(
            vars.iter()
                .map(|v| {
                    (0..v.domain_size())
                        .map(|u| u32::from(u == value))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn cost_of(&self, x: &Instance) -> u64 {
        x.iter()
            .enumerate()
            .map(|(i, &v)| self.0[i][v] as u64)
            .sum()
    }
}

/// Boolean connective for [`Manager::combine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoolOp {
    And,
    Or,
    /// `f ∧ ¬g`
    AndNot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Reduced,
    Complete,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Reduced => "reduced",
            Mode::Complete => "complete",
        }
    }
}

/// Handle to a diagram (its root node) inside one manager.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dd {
    mgr: u32,
    node: u32,
}

impl Dd {
    /// Raw node index inside its manager; stable for the manager's lifetime.
    pub fn index(self) -> u32 {
        self.node
    }
}

#[derive(Debug, Clone)]
struct Node {
    var: u32,
    children: Box<[u32]>,
}

/// Owner of a unique table and of every node it hands out.
#[derive(Debug)]
pub struct Manager {
    id: u32,
    vars: VariableTable,
    sizes: Vec<usize>,
    mode: Mode,
    nodes: Vec<Node>,
    unique: HashMap<(u32, Box<[u32]>), u32>,
    apply_cache: HashMap<(BoolOp, u32, u32), u32>,
    tautology: Option<u32>,
}

impl Manager {
    pub fn new(vars: VariableTable, mode: Mode) -> Self {
        let n = vars.len() as u32;
        let sink = |_| Node {
            var: n,
            children: Box::new([]),
        };
        Manager {
            id: NEXT_MANAGER_ID.fetch_add(1, Ordering::Relaxed),
            sizes: vars.domain_sizes(),
            vars,
            mode,
            nodes: vec![sink(0), sink(1)],
            unique: HashMap::new(),
            apply_cache: HashMap::new(),
            tautology: None,
        }
    }

    pub fn vars(&self) -> &VariableTable {
        &self.vars
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn num_vars(&self) -> usize {
        self.sizes.len()
    }

    /// Total nodes allocated, sinks included.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn handle(&self, node: u32) -> Dd {
        Dd { mgr: self.id, node }
    }

    fn own(&self, f: Dd) -> Result<u32> {
        if f.mgr != self.id {
            return Err(Error::ForeignDiagram);
        }
        Ok(f.node)
    }

    fn level(&self, u: u32) -> usize {
        self.nodes[u as usize].var as usize
    }

    fn child(&self, u: u32, v: usize) -> u32 {
        self.nodes[u as usize].children[v]
    }

    /// Child of `u` on value `v` when viewed at `level`: a node on a later
    /// variable does not test `level`, so every value leads back to it.
    fn cofactor(&self, u: u32, level: usize, v: usize) -> u32 {
        if self.level(u) == level {
            self.child(u, v)
        } else {
            u
        }
    }

    pub fn constant(&self, value: bool) -> Dd {
        self.handle(if value { TRUE } else { FALSE })
    }

    pub fn sink_value(&self, f: Dd) -> Option<bool> {
        match f.node {
            FALSE => Some(false),
            TRUE => Some(true),
            _ => None,
        }
    }

    /// Variable tested at the root, `None` for a sink.
    pub fn var_of(&self, f: Dd) -> Option<usize> {
        (f.node > TRUE).then(|| self.level(f.node))
    }

    pub fn children(&self, f: Dd) -> Vec<Dd> {
        self.nodes[f.node as usize]
            .children
            .iter()
            .map(|&c| self.handle(c))
            .collect()
    }

    /// The function that is 1 everywhere. In complete mode this is a chain of
    /// nodes testing every variable.
    pub fn tautology(&mut self) -> Dd {
        let node = self.tautology_node();
        self.handle(node)
    }

    fn tautology_node(&mut self) -> u32 {
        if self.mode == Mode::Reduced {
            return TRUE;
        }
        if let Some(t) = self.tautology {
            return t;
        }
        let mut node = TRUE;
        for var in (0..self.num_vars()).rev() {
            let children = vec![node; self.sizes[var]];
            node = self.mk(var, children);
        }
        self.tautology = Some(node);
        node
    }

    /// Diagram for `var = value`.
    pub fn literal(&mut self, var: usize, value: usize) -> Result<Dd> {
        let size = *self.sizes.get(var).ok_or(Error::UnknownVariable(var))?;
        if value >= size {
            return Err(Error::Domain { var, value, size });
        }
        let mut z = PartialInstance::empty(self.num_vars());
        z.0[var] = Some(value);
        let t = self.tautology_node();
        let r = self.conjoin_rec(t, &z, &mut HashMap::new());
        let r = self.wrap_literals(0, self.level(t), r, &z);
        Ok(self.handle(r))
    }

    /// Canonical node for `(var, children)`, checking order and arity.
    pub fn intern_node(&mut self, var: usize, children: &[Dd]) -> Result<Dd> {
        let size = *self.sizes.get(var).ok_or(Error::UnknownVariable(var))?;
        if children.len() != size {
            return Err(Error::Arity {
                var,
                expected: size,
                got: children.len(),
            });
        }
        let mut raw = Vec::with_capacity(size);
        for &c in children {
            let c = self.own(c)?;
            let cv = self.level(c);
            let ok = match self.mode {
                Mode::Reduced => cv > var,
                Mode::Complete => c == FALSE || cv == var + 1,
            };
            if !ok {
                return Err(Error::Ordering { var, child_var: cv });
            }
            raw.push(c);
        }
        let node = self.mk(var, raw);
        Ok(self.handle(node))
    }

    fn mk(&mut self, var: usize, children: Vec<u32>) -> u32 {
        debug_assert_eq!(children.len(), self.sizes[var]);
        let first = children[0];
        let collapse = match self.mode {
            Mode::Reduced => children.iter().all(|&c| c == first),
            Mode::Complete => children.iter().all(|&c| c == FALSE),
        };
        if collapse {
            return first;
        }
        let key = (var as u32, children.into_boxed_slice());
        if let Some(&u) = self.unique.get(&key) {
            return u;
        }
        let u = self.nodes.len() as u32;
        self.nodes.push(Node {
            var: key.0,
            children: key.1.clone(),
        });
        self.unique.insert(key, u);
        u
    }

    pub fn evaluate(&self, f: Dd, x: &Instance) -> Result<bool> {
        let mut u = self.own(f)?;
        self.vars.check_instance(x)?;
        while u > TRUE {
            u = self.child(u, x[self.level(u)]);
        }
        Ok(u == TRUE)
    }

    /// `1 - f`. Linear in the size of `f`.
    pub fn complement(&mut self, f: Dd) -> Result<Dd> {
        let u = self.own(f)?;
        let r = match self.mode {
            Mode::Reduced => self.negate_rec(u, &mut HashMap::new()),
            Mode::Complete => {
                let t = self.tautology_node();
                self.apply(BoolOp::AndNot, t, u)
            }
        };
        Ok(self.handle(r))
    }

    fn negate_rec(&mut self, u: u32, memo: &mut HashMap<u32, u32>) -> u32 {
        match u {
            FALSE => return TRUE,
            TRUE => return FALSE,
            _ => {}
        }
        if let Some(&r) = memo.get(&u) {
            return r;
        }
        let var = self.level(u);
        let children: Vec<u32> = self.nodes[u as usize].children.to_vec();
        let mapped = children
            .into_iter()
            .map(|c| self.negate_rec(c, memo))
            .collect();
        let r = self.mk(var, mapped);
        memo.insert(u, r);
        r
    }

    /// Cofactor of `f` with `var` fixed to `value`. Reduced mode only.
    pub fn restrict(&mut self, f: Dd, var: usize, value: usize) -> Result<Dd> {
        let u = self.own(f)?;
        if self.mode != Mode::Reduced {
            return Err(Error::Mode(self.mode.as_str()));
        }
        let size = *self.sizes.get(var).ok_or(Error::UnknownVariable(var))?;
        if value >= size {
            return Err(Error::Domain { var, value, size });
        }
        let r = self.restrict_rec(u, var, value, &mut HashMap::new());
        Ok(self.handle(r))
    }

    fn restrict_rec(
        &mut self,
        u: u32,
        var: usize,
        value: usize,
        memo: &mut HashMap<u32, u32>,
    ) -> u32 {
        let level = self.level(u);
        if level > var {
            return u;
        }
        if level == var {
            return self.child(u, value);
        }
        if let Some(&r) = memo.get(&u) {
            return r;
        }
        let children: Vec<u32> = self.nodes[u as usize].children.to_vec();
        let mapped = children
            .into_iter()
            .map(|c| self.restrict_rec(c, var, value, memo))
            .collect();
        let r = self.mk(level, mapped);
        memo.insert(u, r);
        r
    }

    /// Pointwise boolean combination, memoized in the manager's apply cache.
    pub fn combine(&mut self, f: Dd, g: Dd, op: BoolOp) -> Result<Dd> {
        let (u, w) = (self.own(f)?, self.own(g)?);
        let r = self.apply(op, u, w);
        Ok(self.handle(r))
    }

    fn apply(&mut self, op: BoolOp, f: u32, g: u32) -> u32 {
        match op {
            BoolOp::And => {
                if f == FALSE || g == FALSE {
                    return FALSE;
                }
                if f == TRUE || f == g {
                    return g;
                }
                if g == TRUE {
                    return f;
                }
            }
            BoolOp::Or => {
                if f == TRUE || g == TRUE {
                    return TRUE;
                }
                if f == FALSE || f == g {
                    return g;
                }
                if g == FALSE {
                    return f;
                }
            }
            BoolOp::AndNot => {
                if f == FALSE || g == TRUE || f == g {
                    return FALSE;
                }
                if g == FALSE {
                    return f;
                }
            }
        }
        let key = match op {
            BoolOp::AndNot => (op, f, g),
            _ => (op, f.min(g), f.max(g)),
        };
        if let Some(&r) = self.apply_cache.get(&key) {
            return r;
        }
        let top = self.level(f).min(self.level(g));
        let children = (0..self.sizes[top])
            .map(|v| {
                let (fc, gc) = (self.cofactor(f, top, v), self.cofactor(g, top, v));
                self.apply(op, fc, gc)
            })
            .collect();
        let r = self.mk(top, children);
        self.apply_cache.insert(key, r);
        r
    }

    /// `f` conjoined with the literals of `alpha`: every edge disagreeing with
    /// `alpha` is redirected to the 0-sink, and literal nodes are inserted for
    /// constrained variables that a path skips.
    pub fn conjoin_assignment(&mut self, f: Dd, alpha: &PartialInstance) -> Result<Dd> {
        let u = self.own(f)?;
        self.vars.check_partial(alpha)?;
        let r = self.conjoin_rec(u, alpha, &mut HashMap::new());
        let r = self.wrap_literals(0, self.level(u), r, alpha);
        Ok(self.handle(r))
    }

    fn conjoin_rec(
        &mut self,
        u: u32,
        alpha: &PartialInstance,
        memo: &mut HashMap<u32, u32>,
    ) -> u32 {
        if u <= TRUE {
            return u;
        }
        if let Some(&r) = memo.get(&u) {
            return r;
        }
        let var = self.level(u);
        let children: Vec<u32> = self.nodes[u as usize].children.to_vec();
        let mut mapped = Vec::with_capacity(children.len());
        for (v, c) in children.into_iter().enumerate() {
            if alpha[var].is_some_and(|a| a != v) {
                mapped.push(FALSE);
                continue;
            }
            let inner = self.conjoin_rec(c, alpha, memo);
            let wrapped = self.wrap_literals(var + 1, self.level(c), inner, alpha);
            mapped.push(wrapped);
        }
        let r = self.mk(var, mapped);
        memo.insert(u, r);
        r
    }

    /// Insert literal nodes for the constrained variables in `from..to`.
    fn wrap_literals(
        &mut self,
        from: usize,
        to: usize,
        mut inner: u32,
        alpha: &PartialInstance,
    ) -> u32 {
        if inner == FALSE {
            return FALSE;
        }
        for var in (from..to).rev() {
            if let Some(a) = alpha[var] {
                let children = (0..self.sizes[var])
                    .map(|v| if v == a { inner } else { FALSE })
                    .collect();
                inner = self.mk(var, children);
            }
        }
        inner
    }

    /// Minimum cost over the models of `f`; `None` when `f` has no model.
    pub fn min_cost(&self, f: Dd, costs: &Costs) -> Result<Option<u64>> {
        let u = self.own(f)?;
        self.check_costs(costs)?;
        let labels = self.cost_labels(costs, u);
        let total = self.edge_cost(&labels, 0, u);
        Ok((total != u64::MAX).then_some(total))
    }

    /// Keep only the models of `f` whose cost is minimal. Two linear passes:
    /// a bottom-up minimum-cost labelling, then pruning of every edge that
    /// does not achieve its node's minimum.
    pub fn cardinality_minimize(&mut self, f: Dd, costs: &Costs) -> Result<Dd> {
        let u = self.own(f)?;
        self.check_costs(costs)?;
        let labels = self.cost_labels(costs, u);
        if labels.below(u) == u64::MAX {
            return Ok(self.constant(false));
        }
        let mut memo = HashMap::new();
        let pruned = self.prune_rec(u, costs, &labels, &mut memo);
        let r = self.wrap_min(0, self.level(u), pruned, costs, &labels);
        Ok(self.handle(r))
    }

    fn check_costs(&self, costs: &Costs) -> Result<()> {
        if costs.0.len() != self.num_vars() {
            return Err(Error::Length {
                expected: self.num_vars(),
                got: costs.0.len(),
            });
        }
        for (var, row) in costs.0.iter().enumerate() {
            if row.len() != self.sizes[var] {
                return Err(Error::Arity {
                    var,
                    expected: self.sizes[var],
                    got: row.len(),
                });
            }
        }
        Ok(())
    }

    fn cost_labels(&self, costs: &Costs, root: u32) -> CostLabels {
        let n = self.num_vars();
        let mut prefix = vec![0u64; n + 1];
        for var in 0..n {
            let m = costs.0[var].iter().copied().min().unwrap_or(0) as u64;
            prefix[var + 1] = prefix[var] + m;
        }
        let mut labels = CostLabels {
            prefix,
            node: HashMap::new(),
        };
        for u in self.reachable(root) {
            let best = match u {
                FALSE => u64::MAX,
                TRUE => 0,
                _ => {
                    let var = self.level(u);
                    self.nodes[u as usize]
                        .children
                        .iter()
                        .enumerate()
                        .filter_map(|(v, &c)| {
                            let via = self.edge_cost(&labels, var + 1, c);
                            (via != u64::MAX).then(|| costs.0[var][v] as u64 + via)
                        })
                        .min()
                        .unwrap_or(u64::MAX)
                }
            };
            labels.node.insert(u, best);
        }
        labels
    }

    /// Cost of entering node `u` from level `from`.
    fn edge_cost(&self, labels: &CostLabels, from: usize, u: u32) -> u64 {
        let below = labels.below(u);
        if below == u64::MAX {
            return u64::MAX;
        }
        labels.prefix[self.level(u)] - labels.prefix[from] + below
    }

    fn prune_rec(
        &mut self,
        u: u32,
        costs: &Costs,
        labels: &CostLabels,
        memo: &mut HashMap<u32, u32>,
    ) -> u32 {
        if u <= TRUE {
            return u;
        }
        if let Some(&r) = memo.get(&u) {
            return r;
        }
        let var = self.level(u);
        let best = labels.below(u);
        let children: Vec<u32> = self.nodes[u as usize].children.to_vec();
        let mut mapped = Vec::with_capacity(children.len());
        for (v, c) in children.into_iter().enumerate() {
            let via = self.edge_cost(labels, var + 1, c);
            if via == u64::MAX || costs.0[var][v] as u64 + via != best {
                mapped.push(FALSE);
                continue;
            }
            let inner = self.prune_rec(c, costs, labels, memo);
            let wrapped = self.wrap_min(var + 1, self.level(c), inner, costs, labels);
            mapped.push(wrapped);
        }
        let r = self.mk(var, mapped);
        memo.insert(u, r);
        r
    }

    /// Restrict skipped variables in `from..to` to their cheapest values.
    fn wrap_min(
        &mut self,
        from: usize,
        to: usize,
        mut inner: u32,
        costs: &Costs,
        labels: &CostLabels,
    ) -> u32 {
        for var in (from..to).rev() {
            let m = (labels.prefix[var + 1] - labels.prefix[var]) as u32;
            let children = costs.0[var]
                .iter()
                .map(|&c| if c == m { inner } else { FALSE })
                .collect();
            inner = self.mk(var, children);
        }
        inner
    }

    /// Exact number of models of `f`.
    pub fn model_count(&self, f: Dd) -> Result<BigUint> {
        let u = self.own(f)?;
        let mut memo: HashMap<u32, BigUint> = HashMap::new();
        let below = self.count_rec(u, &mut memo);
        Ok(self.span(0, self.level(u)) * below)
    }

    fn span(&self, from: usize, to: usize) -> BigUint {
        self.sizes[from..to]
            .iter()
            .fold(BigUint::one(), |acc, &b| acc * BigUint::from(b))
    }

    fn count_rec(&self, u: u32, memo: &mut HashMap<u32, BigUint>) -> BigUint {
        match u {
            FALSE => return BigUint::zero(),
            TRUE => return BigUint::one(),
            _ => {}
        }
        if let Some(c) = memo.get(&u) {
            return c.clone();
        }
        let var = self.level(u);
        let mut total = BigUint::zero();
        for &c in self.nodes[u as usize].children.iter() {
            if c == FALSE {
                continue;
            }
            total += self.span(var + 1, self.level(c)) * self.count_rec(c, memo);
        }
        memo.insert(u, total.clone());
        total
    }

    /// Models of `f` in lexicographic order (lowest value index first).
    pub fn models(&self, f: Dd) -> Result<Models<'_>> {
        let u = self.own(f)?;
        let stack = if u == FALSE { Vec::new() } else { vec![(u, 0)] };
        Ok(Models {
            mgr: self,
            stack,
            current: vec![0; self.num_vars()],
        })
    }

    /// Reachable nodes of `f`, sinks included.
    pub fn size(&self, f: Dd) -> Result<usize> {
        Ok(self.reachable(self.own(f)?).len())
    }

    /// Reachable node indices, children before parents.
    fn reachable(&self, root: u32) -> Vec<u32> {
        let mut seen = std::collections::HashSet::new();
        let mut order = Vec::new();
        let mut stack = vec![(root, false)];
        while let Some((u, expanded)) = stack.pop() {
            if expanded {
                order.push(u);
                continue;
            }
            if !seen.insert(u) {
                continue;
            }
            stack.push((u, true));
            for &c in self.nodes[u as usize].children.iter().rev() {
                if !seen.contains(&c) {
                    stack.push((c, false));
                }
            }
        }
        order
    }

    /// Internal nodes reachable from `f` in topological order (children
    /// first), as `(node, var, children)` handles.
    pub fn topological(&self, f: Dd) -> Result<Vec<(Dd, usize, Vec<Dd>)>> {
        let u = self.own(f)?;
        Ok(self
            .reachable(u)
            .into_iter()
            .filter(|&w| w > TRUE)
            .map(|w| (self.handle(w), self.level(w), self.children(self.handle(w))))
            .collect())
    }

    /// Build the diagram of an arbitrary function by full Shannon expansion.
    /// Exponential; meant for tests and small tables.
    pub fn from_fn(&mut self, mut f: impl FnMut(&Instance) -> bool) -> Dd {
        let mut x = vec![0; self.num_vars()];
        let r = self.build_from_fn(0, &mut x, &mut f);
        self.handle(r)
    }

    fn build_from_fn(
        &mut self,
        level: usize,
        x: &mut Vec<usize>,
        f: &mut impl FnMut(&Instance) -> bool,
    ) -> u32 {
        if level == self.num_vars() {
            return if f(&Instance(x.clone())) { TRUE } else { FALSE };
        }
        let mut children = Vec::with_capacity(self.sizes[level]);
        for v in 0..self.sizes[level] {
            x[level] = v;
            children.push(self.build_from_fn(level + 1, x, f));
        }
        self.mk(level, children)
    }
}

struct CostLabels {
    /// `prefix[i]`: sum of the cheapest value cost of variables `0..i`.
    prefix: Vec<u64>,
    /// Minimum cost from a node down to the 1-sink, `u64::MAX` if none.
    node: HashMap<u32, u64>,
}

impl CostLabels {
    fn below(&self, u: u32) -> u64 {
        self.node.get(&u).copied().unwrap_or(u64::MAX)
    }
}

/// Model enumerator returned by [`Manager::models`].
pub struct Models<'a> {
    mgr: &'a Manager,
    /// `stack[l]` holds the node reached at level `l` and the next value to try.
    stack: Vec<(u32, usize)>,
    current: Vec<usize>,
}

impl Iterator for Models<'_> {
    type Item = Instance;

    fn next(&mut self) -> Option<Instance> {
        let n = self.mgr.num_vars();
        loop {
            let depth = self.stack.len();
            if depth == 0 {
                return None;
            }
            let level = depth - 1;
            if level == n {
                self.stack.pop();
                return Some(Instance(self.current.clone()));
            }
            let (u, next) = self.stack[level];
            if next >= self.mgr.sizes[level] {
                self.stack.pop();
                continue;
            }
            self.stack[level].1 += 1;
            let c = self.mgr.cofactor(u, level, next);
            if c == FALSE {
                continue;
            }
            self.current[level] = next;
            self.stack.push((c, 0));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(values: &[usize]) -> Instance {
        Instance(values.to_vec())
    }

    fn lit(m: &mut Manager, var: usize) -> Dd {
        m.literal(var, 1).unwrap()
    }

    #[test]
    fn all_equal_children_collapse() {
        let mut m = Manager::new(VariableTable::binary(2), Mode::Reduced);
        let f = m.constant(false);
        assert_eq!(m.intern_node(0, &[f, f]).unwrap(), f);
    }

    #[test]
    fn interning_is_idempotent() {
        let mut m = Manager::new(VariableTable::binary(2), Mode::Reduced);
        let (f, t) = (m.constant(false), m.constant(true));
        let a = m.intern_node(0, &[f, t]).unwrap();
        let b = m.intern_node(0, &[f, t]).unwrap();
        assert_eq!(a, b);
        assert_eq!(m.node_count(), 3);
    }

    #[test]
    fn intern_rejects_order_and_arity_violations() {
        let mut m = Manager::new(VariableTable::binary(2), Mode::Reduced);
        let (f, t) = (m.constant(false), m.constant(true));
        let x1 = m.intern_node(0, &[f, t]).unwrap();
        assert!(matches!(
            m.intern_node(1, &[x1, t]),
            Err(Error::Ordering { .. })
        ));
        assert!(matches!(m.intern_node(0, &[f]), Err(Error::Arity { .. })));
        let mut other = Manager::new(VariableTable::binary(2), Mode::Reduced);
        assert!(matches!(
            other.intern_node(0, &[x1, t]),
            Err(Error::ForeignDiagram)
        ));
    }

    #[test]
    fn constants_and_literals() {
        let mut m = Manager::new(VariableTable::binary(2), Mode::Reduced);
        let t = m.constant(true);
        assert!(m.evaluate(t, &x(&[0, 1])).unwrap());
        assert_eq!(m.size(t).unwrap(), 1);
        let l = lit(&mut m, 0);
        assert_eq!(m.size(l).unwrap(), 3);
        let c = m.complement(t).unwrap();
        assert_eq!(m.sink_value(c), Some(false));
        assert!(matches!(
            m.evaluate(l, &x(&[2, 0])),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn restrict_and_combine_basics() {
        let mut m = Manager::new(VariableTable::binary(2), Mode::Reduced);
        let (a, b) = (lit(&mut m, 0), lit(&mut m, 1));
        let and = m.combine(a, b, BoolOp::And).unwrap();
        let r = m.restrict(and, 0, 0).unwrap();
        assert_eq!(m.sink_value(r), Some(false));
        assert_eq!(m.restrict(b, 0, 1).unwrap(), b);
        let or = m.combine(a, b, BoolOp::Or).unwrap();
        assert_eq!(m.model_count(or).unwrap(), BigUint::from(3u32));
        let t = m.constant(true);
        assert_eq!(m.combine(or, t, BoolOp::And).unwrap(), or);
        let not_or = m.complement(or).unwrap();
        let none = m.combine(or, not_or, BoolOp::And).unwrap();
        assert_eq!(m.sink_value(none), Some(false));
    }

    #[test]
    fn conjoin_assignment_inserts_skipped_literals() {
        let mut m = Manager::new(VariableTable::binary(3), Mode::Reduced);
        let t = m.constant(true);
        let alpha = PartialInstance::from_pairs(3, &[(0, 1)]);
        let r = m.conjoin_assignment(t, &alpha).unwrap();
        assert_eq!(r, lit(&mut m, 0));
        let empty = PartialInstance::empty(3);
        let c = lit(&mut m, 2);
        assert_eq!(m.conjoin_assignment(c, &empty).unwrap(), c);
    }

    #[test]
    fn minimize_tautology_gives_all_zero() {
        let vars = VariableTable::binary(4);
        let costs = Costs::count_value(&vars, 1);
        let mut m = Manager::new(vars, Mode::Reduced);
        let t = m.constant(true);
        let g = m.cardinality_minimize(t, &costs).unwrap();
        let models: Vec<_> = m.models(g).unwrap().collect();
        assert_eq!(models, vec![x(&[0, 0, 0, 0])]);
        let f = m.constant(false);
        assert_eq!(m.cardinality_minimize(f, &costs).unwrap(), f);
    }

    #[test]
    fn enumerate_constant_true() {
        let m = Manager::new(VariableTable::binary(2), Mode::Reduced);
        let t = m.constant(true);
        let models: Vec<_> = m.models(t).unwrap().collect();
        assert_eq!(models, vec![x(&[0, 0]), x(&[0, 1]), x(&[1, 0]), x(&[1, 1])]);
    }

    #[test]
    fn complete_mode_keeps_redundant_tests() {
        let mut m = Manager::new(VariableTable::binary(2), Mode::Complete);
        let t = m.tautology();
        assert_eq!(m.size(t).unwrap(), 3);
        assert_eq!(m.model_count(t).unwrap(), BigUint::from(4u32));
        let l = m.literal(1, 0).unwrap();
        let c = m.complement(l).unwrap();
        assert_eq!(c, m.literal(1, 1).unwrap());
        // a 1-sink may only hang below the last variable
        let tr = m.constant(true);
        assert!(m.intern_node(0, &[tr, tr]).is_err());
        assert!(m.restrict(l, 0, 0).is_err());
    }

    #[test]
    fn instance_parsing_accepts_sign_aliases() {
        let vars = VariableTable::new(vec![
            Variable::new("A", vec!["n".into(), "y".into()]),
            Variable::new("B", vec!["lo".into(), "mid".into(), "hi".into()]),
        ])
        .unwrap();
        assert_eq!(vars.parse_instance("+ mid").unwrap(), x(&[1, 1]));
        assert_eq!(vars.parse_instance("n hi").unwrap(), x(&[0, 2]));
        assert!(vars.parse_instance("+ +").is_err());
        assert!(vars.parse_instance("+").is_err());
        assert_eq!(
            vars.format_partial(&PartialInstance(vec![None, Some(2)])),
            "* hi"
        );
        assert_eq!(vars.rank(&x(&[1, 2])), 5);
        assert_eq!(vars.unrank(5), x(&[1, 2]));
    }
}
