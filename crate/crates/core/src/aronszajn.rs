//! A special Aronszajn tree built level by level below an ordinal bound.
//!
//! Nodes are construction recipes rather than explicit functions: a limit
//! node has infinitely many restrictions, and only the ones that are asked
//! for get built. Every level is countably infinite; a level inventory holds
//! the first `budget` nodes of a fixed enumeration of it.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{calkin_wilf, calkin_wilf_depth, calkin_wilf_index, rational, reciprocal_below, Q};
use crate::ordinal::{Ladder, Ordinal};
pub use crate::schedule::{cantor_unpair, level_schedule};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Recipe {
    Root,
    /// `parent ∪ {(level(parent), n)}` where `n` is the Calkin-Wilf index
    /// of `offset`, so the label is `label(parent) + offset`. The offset is
    /// stored rather than `n`, whose binary size grows with `1/offset`.
    Child {
        parent: NodeId,
        #[serde(serialize_with = "ser_q")]
        offset: Q,
    },
    /// `y[sigma, base, k]`: the union of a chain climbing the ladder of the
    /// node's level, with label `label(base) + 1/k`.
    #[serde(rename_all = "camelCase")]
    Limit {
        base_level: Ordinal,
        base: NodeId,
        #[serde(serialize_with = "ser_biguint")]
        k: BigUint,
        #[serde(skip)]
        chain: Vec<NodeId>,
        #[serde(skip)]
        chain_start: usize,
    },
}

fn ser_biguint<S: serde::Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(n)
}

#[derive(Clone, Debug, Serialize)]
pub struct Node {
    pub level: Ordinal,
    #[serde(serialize_with = "ser_q")]
    pub label: Q,
    pub recipe: Recipe,
}

fn ser_q<S: serde::Serializer>(q: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(q)
}

/// Bounds accepted by [`Tree::build_levels`].
pub fn max_bound() -> Ordinal {
    Ordinal::omega_pow(Ordinal::omega())
}

#[derive(Clone, Debug)]
pub struct Tree {
    bound: Ordinal,
    budget: usize,
    span: usize,
    nodes: Vec<Node>,
    children: HashMap<(NodeId, Q), NodeId>,
    limits: HashMap<(Ordinal, NodeId, BigUint), NodeId>,
    schedule: BTreeSet<Ordinal>,
    levels: BTreeMap<Ordinal, Vec<NodeId>>,
}

impl Tree {
    pub fn new(bound: Ordinal, budget: usize, span: usize) -> Result<Self> {
        if bound >= max_bound() {
            return Err(Error::Config(format!("bound {bound} must be below {}", max_bound())));
        }
        if budget == 0 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        let schedule = level_schedule(&bound, span)?;
        let root = Node { level: Ordinal::zero(), label: Q::zero(), recipe: Recipe::Root };
        Ok(Tree {
            bound,
            budget,
            span,
            nodes: vec![root],
            children: HashMap::new(),
            limits: HashMap::new(),
            schedule,
            levels: BTreeMap::new(),
        })
    }

    /// Builds the tree and materializes every scheduled level.
    pub fn build_levels(bound: Ordinal, budget: usize) -> Result<Self> {
        let mut t = Tree::new(bound, budget, budget)?;
        t.materialize()?;
        Ok(t)
    }

    pub const ROOT: NodeId = 0;

    pub fn bound(&self) -> &Ordinal {
        &self.bound
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn span(&self) -> usize {
        self.span
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn label(&self, id: NodeId) -> &Q {
        &self.nodes[id].label
    }

    pub fn level_of(&self, id: NodeId) -> &Ordinal {
        &self.nodes[id].level
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn schedule(&self) -> &BTreeSet<Ordinal> {
        &self.schedule
    }

    pub fn levels(&self) -> &BTreeMap<Ordinal, Vec<NodeId>> {
        &self.levels
    }

    pub fn level(&self, a: &Ordinal) -> &[NodeId] {
        self.levels.get(a).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Overwrites a label; used to exercise the checker.
    pub fn set_label(&mut self, id: NodeId, label: Q) {
        self.nodes[id].label = label;
    }

    /// The child with branch index `n`.
    pub fn child(&mut self, parent: NodeId, n: &BigUint) -> NodeId {
        self.child_with_offset(parent, calkin_wilf(n))
    }

    /// The child whose label exceeds the parent's by `offset > 0`.
    pub fn child_with_offset(&mut self, parent: NodeId, offset: Q) -> NodeId {
        assert!(offset.is_positive(), "child offsets are positive");
        if let Some(&id) = self.children.get(&(parent, offset.clone())) {
            return id;
        }
        let p = &self.nodes[parent];
        let node = Node {
            level: p.level.succ(),
            label: p.label.clone() + offset.clone(),
            recipe: Recipe::Child { parent, offset: offset.clone() },
        };
        self.nodes.push(node);
        let id = self.nodes.len() - 1;
        self.children.insert((parent, offset), id);
        id
    }

    /// The branch index of a child node, when it has at most `max_bits`
    /// binary digits.
    pub fn branch_index(&self, id: NodeId, max_bits: u64) -> Option<BigUint> {
        match &self.nodes[id].recipe {
            Recipe::Child { offset, .. } if calkin_wilf_depth(offset) <= BigUint::from(max_bits) => {
                Some(calkin_wilf_index(offset))
            }
            _ => None,
        }
    }

    /// `y[level(base), base, k]` at the limit level `delta`.
    pub fn limit_node(&mut self, delta: &Ordinal, base: NodeId, k: BigUint) -> Result<NodeId> {
        if !delta.is_limit() {
            return Err(Error::NotLimit(delta.clone()));
        }
        if k.is_zero() {
            return Err(Error::Precondition("k must be positive".into()));
        }
        let base_level = self.nodes[base].level.clone();
        if &base_level >= delta {
            return Err(Error::Precondition(format!("base level {base_level} is not below {delta}")));
        }
        let key = (delta.clone(), base, k.clone());
        if let Some(&id) = self.limits.get(&key) {
            return Ok(id);
        }
        let chain_start = Ladder::canonical(delta)?
            .first_above(&base_level, usize::MAX)
            .expect("ladders are cofinal");
        let node = Node {
            level: delta.clone(),
            label: self.nodes[base].label.clone() + Q::new(1.into(), k.clone().into()),
            recipe: Recipe::Limit { base_level, base, k, chain: Vec::new(), chain_start },
        };
        self.nodes.push(node);
        let id = self.nodes.len() - 1;
        self.limits.insert(key, id);
        Ok(id)
    }

    /// A node `y > x` at level `rho` with `label(y) < label(x) + eps`.
    pub fn star_witness(&mut self, x: NodeId, rho: &Ordinal, eps: &Q) -> Result<NodeId> {
        let sigma = self.nodes[x].level.clone();
        if rho < &sigma {
            return Err(Error::Precondition(format!("target level {rho} is below {sigma}")));
        }
        if !eps.is_positive() {
            return Err(Error::Precondition("epsilon must be positive".into()));
        }
        if rho == &sigma {
            return Ok(x);
        }
        match rho.predecessor() {
            Some(tau) => {
                let half = eps / Q::from_integer(2.into());
                let below = self.star_witness(x, &tau, &half)?;
                let room = self.nodes[x].label.clone() + eps.clone() - self.nodes[below].label.clone();
                Ok(self.child_with_offset(below, room / Q::from_integer(2.into())))
            }
            None => self.limit_node(rho, x, reciprocal_below(eps)),
        }
    }

    /// Chain slack `1/k - 1/(k + i + 1)`: positive, increasing, below `1/k`.
    fn chain_slack(k: &BigUint, i: usize) -> Q {
        let k = BigInt::from(k.clone());
        Q::new(1.into(), k.clone()) - Q::new(1.into(), k + i + 1)
    }

    fn extend_chain(&mut self, id: NodeId, upto: &Ordinal) -> Result<NodeId> {
        loop {
            let (delta, base, k, len, start, last) = match &self.nodes[id].recipe {
                Recipe::Limit { base, k, chain, chain_start, .. } => (
                    self.nodes[id].level.clone(),
                    *base,
                    k.clone(),
                    chain.len(),
                    *chain_start,
                    chain.last().copied(),
                ),
                _ => return Err(Error::Precondition("not a limit node".into())),
            };
            if let Some(l) = last {
                if &self.nodes[l].level >= upto {
                    return Ok(l);
                }
            }
            let target = delta.ladder_element(start + len)?;
            let f_base = self.nodes[base].label.clone();
            let next = match last {
                None => self.star_witness(base, &target, &Self::chain_slack(&k, 0))?,
                Some(prev) => {
                    let eps = f_base + Self::chain_slack(&k, len) - self.nodes[prev].label.clone();
                    self.star_witness(prev, &target, &eps)?
                }
            };
            if let Recipe::Limit { chain, .. } = &mut self.nodes[id].recipe {
                chain.push(next);
            }
        }
    }

    /// The restriction of `y` to level `rho`.
    pub fn restrict(&mut self, mut y: NodeId, rho: &Ordinal) -> Result<NodeId> {
        if rho > &self.nodes[y].level {
            return Err(Error::Precondition(format!(
                "cannot restrict a node of level {} to {rho}",
                self.nodes[y].level
            )));
        }
        loop {
            if &self.nodes[y].level == rho {
                return Ok(y);
            }
            y = match &self.nodes[y].recipe {
                Recipe::Root => unreachable!("root has level 0"),
                Recipe::Child { parent, .. } => *parent,
                Recipe::Limit { base_level, base, .. } if rho <= base_level => *base,
                Recipe::Limit { .. } => self.extend_chain(y, rho)?,
            };
        }
    }

    pub fn is_below(&mut self, x: NodeId, y: NodeId) -> Result<bool> {
        let lx = self.nodes[x].level.clone();
        if lx >= self.nodes[y].level {
            return Ok(false);
        }
        Ok(self.restrict(y, &lx)? == x)
    }

    fn materialize(&mut self) -> Result<()> {
        let schedule: Vec<Ordinal> = self.schedule.iter().cloned().collect();
        for a in schedule {
            let ids = if a.is_zero() {
                vec![Self::ROOT]
            } else if let Some(tau) = a.predecessor() {
                let below = self.level(&tau).to_vec();
                let mut ids = Vec::new();
                let mut q = 0u64;
                while ids.len() < self.budget {
                    let (i, n) = cantor_unpair(q);
                    q += 1;
                    if let Some(&x) = below.get(i as usize) {
                        ids.push(self.child(x, &BigUint::from(n)));
                    }
                }
                ids
            } else {
                let bases: Vec<NodeId> =
                    self.levels.range(..a.clone()).flat_map(|(_, v)| v.iter().copied()).collect();
                let mut ids = Vec::new();
                let mut q = 0u64;
                while ids.len() < self.budget {
                    let (i, k) = cantor_unpair(q);
                    q += 1;
                    if let Some(&x) = bases.get(i as usize) {
                        ids.push(self.limit_node(&a, x, BigUint::from(k + 1))?);
                    }
                }
                ids
            };
            self.levels.insert(a, ids);
        }
        Ok(())
    }

    pub fn view(&self, id: NodeId) -> NodeView {
        NodeView { id, level: self.nodes[id].level.clone(), label: self.nodes[id].label.to_string(), recipe: self.nodes[id].recipe.clone() }
    }

    /// Checks `($)` between every inventory node and its restriction to
    /// every lower scheduled level, strict increase along those branches,
    /// and `(★)` on `samples` random queries `(x, rho, 1/k)` with `x` from
    /// an inventory.
    pub fn verify_special(&mut self, samples: usize, seed: u64) -> Result<SpecialReport> {
        let mut rep = SpecialReport {
            bound: self.bound.clone(),
            budget: self.budget,
            span: self.span,
            scope: "materialized levels only; each level is infinite and holds its first `budget` nodes".into(),
            levels: self.levels.iter().map(|(a, v)| (a.to_string(), v.len())).collect(),
            pairs_checked: 0,
            branches_checked: 0,
            star_checks: 0,
            limit_collisions: Vec::new(),
            violations: Vec::new(),
            pass: true,
        };
        let schedule: Vec<Ordinal> = self.schedule.iter().cloned().collect();
        let inventory: Vec<NodeId> = self.levels.values().flatten().copied().collect();
        for &y in &inventory {
            let ly = self.nodes[y].level.clone();
            let mut branch = Vec::new();
            for s in schedule.iter().filter(|s| **s < ly) {
                let z = self.restrict(y, s)?;
                rep.pairs_checked += 1;
                if self.nodes[z].label >= self.nodes[y].label {
                    rep.violations.push(Violation::pair("($)", self.view(z), self.view(y)));
                }
                branch.push(z);
            }
            branch.push(y);
            rep.branches_checked += 1;
            for w in branch.windows(2) {
                if self.nodes[w[0]].label >= self.nodes[w[1]].label {
                    rep.violations.push(Violation::pair("branch increase", self.view(w[0]), self.view(w[1])));
                }
            }
        }
        // Limit nodes agreeing on every scheduled level below them.
        for (a, ids) in self.levels.clone() {
            if !a.is_limit() {
                continue;
            }
            let below: Vec<Ordinal> = schedule.iter().filter(|s| **s < a).cloned().collect();
            let mut seen: HashMap<Vec<NodeId>, NodeId> = HashMap::new();
            for &y in &ids {
                let sig = below.iter().map(|s| self.restrict(y, s)).collect::<Result<Vec<_>>>()?;
                if let Some(&other) = seen.get(&sig) {
                    rep.limit_collisions.push((other, y));
                } else {
                    seen.insert(sig, y);
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if schedule.len() > 1 {
            for _ in 0..samples {
                let i = rng.gen_range(0..schedule.len() - 1);
                let j = rng.gen_range(i + 1..schedule.len());
                let (sigma, rho) = (&schedule[i], &schedule[j]);
                let pool = self.level(sigma).to_vec();
                let x = pool[rng.gen_range(0..pool.len())];
                let k: i64 = rng.gen_range(1..=32);
                let eps = rational(1, k);
                let y = self.star_witness(x, rho, &eps)?;
                rep.star_checks += 1;
                let ok = &self.nodes[y].level == rho
                    && self.restrict(y, sigma)? == x
                    && self.nodes[y].label < self.nodes[x].label.clone() + eps.clone();
                if !ok {
                    let mut v = Violation::pair("(★)", self.view(x), self.view(y));
                    v.epsilon = Some(eps.to_string());
                    rep.violations.push(v);
                }
            }
        }
        rep.pass = rep.violations.is_empty();
        Ok(rep)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeView {
    pub id: NodeId,
    pub level: Ordinal,
    pub label: String,
    pub recipe: Recipe,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Violation {
    pub condition: String,
    pub lower: NodeView,
    pub upper: NodeView,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
}

impl Violation {
    fn pair(condition: &str, lower: NodeView, upper: NodeView) -> Self {
        Violation { condition: condition.into(), lower, upper, epsilon: None }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpecialReport {
    pub bound: Ordinal,
    pub budget: usize,
    pub span: usize,
    pub scope: String,
    pub levels: BTreeMap<String, usize>,
    pub pairs_checked: usize,
    pub branches_checked: usize,
    pub star_checks: usize,
    pub limit_collisions: Vec<(NodeId, NodeId)>,
    pub violations: Vec<Violation>,
    pub pass: bool,
}

/// The first `n` labels of the level-1 enumeration: `cw(0), cw(1), ...`.
pub fn first_level_labels(n: usize) -> Vec<Q> {
    let mut k = BigUint::zero();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(calkin_wilf(&k));
        k += BigUint::one();
    }
    out
}
