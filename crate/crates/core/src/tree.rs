//! Finite generic filters and the leveled tree they induce.
//!
//! The tree order is the branch-closure order: `s < t` when some branch
//! `b_ξ` contains both and `s < t` as ordinals. It is well defined exactly
//! when shared nodes have the same predecessors in every branch through them,
//! which is what the initial-segment clause guarantees. Levels are aligned
//! blocks: `t ∈ [ω·γ, ω·γ + ω)` sits at level `γ`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ordinal::{Ordinal, Term};
use crate::poset::{validate_condition, Condition, Variant};
use crate::walk::Walker;

/// Fresh values `ω·γ + j` (`j <` this) offered when growing a branch.
pub const FRESH_WIDTH: u64 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DenseRequirement {
    Touch { xi: Ordinal },
    /// `b_ξ` gets a node at level `level`.
    Grow { xi: Ordinal, level: Ordinal },
}

impl DenseRequirement {
    pub fn xi(&self) -> &Ordinal {
        match self {
            DenseRequirement::Touch { xi } | DenseRequirement::Grow { xi, .. } => xi,
        }
    }
}

impl fmt::Display for DenseRequirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DenseRequirement::Touch { xi } => write!(f, "touch {xi}"),
            DenseRequirement::Grow { xi, level } => write!(f, "grow {xi} {level}"),
        }
    }
}

impl FromStr for DenseRequirement {
    type Err = Error;

    /// `touch ORD` or `grow ORD LEVEL`.
    fn from_str(s: &str) -> Result<Self> {
        let words: Vec<&str> = s.split_whitespace().collect();
        match words.as_slice() {
            ["touch", xi] => Ok(DenseRequirement::Touch { xi: xi.parse()? }),
            ["grow", xi, level] => Ok(DenseRequirement::Grow {
                xi: xi.parse()?,
                level: level.parse()?,
            }),
            _ => Err(Error::Config(format!("bad requirement `{s}`"))),
        }
    }
}

/// One requirement per line; blank lines and `#` comments are skipped.
pub fn parse_requirements(text: &str) -> Result<Vec<DenseRequirement>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::parse)
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Unmet {
    pub requirement: DenseRequirement,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GenericFilter {
    pub variant: Variant,
    /// Decreasing: each element extends the previous one.
    pub chain: Vec<Condition>,
    pub met: Vec<DenseRequirement>,
    pub unmet: Vec<Unmet>,
}

impl GenericFilter {
    pub fn last(&self) -> &Condition {
        self.chain.last().expect("chain starts with the empty condition")
    }
}

/// `γ` with `t = ω·γ + n`.
pub fn level_of(t: &Ordinal) -> Ordinal {
    let terms = t.terms().iter().filter_map(|term| {
        let e = match term.exponent.as_u64() {
            Some(0) => return None,
            Some(k) => Ordinal::from(k - 1),
            None => term.exponent.clone(),
        };
        Some(Term {
            exponent: e,
            coefficient: term.coefficient.clone(),
        })
    });
    Ordinal::from_terms(terms)
}

/// Builds a chain meeting the requirements in order, one extension per met
/// requirement. A grow step tries the values of the target block already used
/// by other branches together with `FRESH_WIDTH` fresh ones, in a seeded
/// order, and takes the first that keeps the condition valid.
pub fn build_filter(
    reqs: &[DenseRequirement],
    seed: u64,
    budget: usize,
    variant: &Variant,
    walker: &Walker,
) -> Result<GenericFilter> {
    if budget < reqs.len() {
        return Err(Error::BudgetExhausted {
            budget,
            needed: reqs.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let family = walker.family();
    let mut filter = GenericFilter {
        variant: variant.clone(),
        chain: vec![Condition::new()],
        met: Vec::new(),
        unmet: Vec::new(),
    };
    let valid = |c: &Condition| -> Result<bool> { Ok(validate_condition(c, variant, walker)?.valid()) };

    for req in reqs {
        let current = filter.last().clone();
        let xi = req.xi();
        if xi >= family.bound() || !variant.domain_ok(xi, family.as_ref())? {
            filter.unmet.push(Unmet {
                requirement: req.clone(),
                reason: format!("{xi} is not allowed in the domain"),
            });
            continue;
        }
        let mut next = current.clone();
        next.touch(xi.clone());
        match req {
            DenseRequirement::Touch { .. } => {}
            DenseRequirement::Grow { level, .. } => {
                if current.values_at(xi).any(|v| &level_of(v) == level) {
                    filter.met.push(req.clone());
                    continue;
                }
                let base = level.mul_omega_pow_left(&Ordinal::one());
                let mut offered: BTreeSet<Ordinal> = current
                    .value_pool()
                    .into_iter()
                    .filter(|v| &level_of(v) == level)
                    .collect();
                offered.extend((0..FRESH_WIDTH).map(|j| base.add(&Ordinal::from(j))));
                let mut offered: Vec<Ordinal> = offered.into_iter().collect();
                offered.shuffle(&mut rng);
                let mut chosen = None;
                for t in offered {
                    let mut trial = next.clone();
                    trial.insert(xi.clone(), t);
                    if valid(&trial)? {
                        chosen = Some(trial);
                        break;
                    }
                }
                let Some(trial) = chosen else {
                    filter.unmet.push(Unmet {
                        requirement: req.clone(),
                        reason: format!("no value at level {level} keeps the condition valid"),
                    });
                    continue;
                };
                next = trial;
            }
        }
        if next != current {
            if !valid(&next)? {
                filter.unmet.push(Unmet {
                    requirement: req.clone(),
                    reason: "the extension is not a condition".into(),
                });
                continue;
            }
            filter.chain.push(next);
        }
        filter.met.push(req.clone());
    }
    Ok(filter)
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeNode {
    pub node: Ordinal,
    pub level: Ordinal,
    /// Immediate predecessor in the tree order.
    pub parent: Option<Ordinal>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LeveledTree {
    pub variant: Variant,
    pub nodes: Vec<TreeNode>,
    pub branches: BTreeMap<Ordinal, BTreeSet<Ordinal>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeClause {
    /// A branch meets one level block twice.
    Level,
    /// A shared node has different predecessors in two branches.
    Predecessors,
    /// `b_ξ ∩ b_η` is not an initial segment of both.
    InitialSegment,
    RhoCap,
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeViolation {
    pub clause: TreeClause,
    pub xi: Ordinal,
    pub eta: Option<Ordinal>,
    pub detail: String,
}

/// `Δ(b_ξ, b_η)`: the level of the largest shared node, next to `ρ(ξ, η)`.
#[derive(Debug, Clone, Serialize)]
pub struct PairDelta {
    pub xi: Ordinal,
    pub eta: Ordinal,
    pub shared_max: Option<Ordinal>,
    pub delta: Option<Ordinal>,
    pub rho: Ordinal,
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeReport {
    pub violations: Vec<TreeViolation>,
    pub pairs: Vec<PairDelta>,
}

impl TreeReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Recomputes every invariant from the branch map alone.
pub fn check_tree(tree: &LeveledTree, variant: &Variant, walker: &Walker) -> Result<TreeReport> {
    let mut violations = Vec::new();
    let mut pairs = Vec::new();
    for (xi, b) in &tree.branches {
        let mut seen = BTreeSet::new();
        for t in b {
            if !seen.insert(level_of(t)) {
                violations.push(TreeViolation {
                    clause: TreeClause::Level,
                    xi: xi.clone(),
                    eta: None,
                    detail: format!("two nodes at level {}", level_of(t)),
                });
            }
        }
    }
    let list: Vec<(&Ordinal, &BTreeSet<Ordinal>)> = tree.branches.iter().collect();
    for (i, (xi, a)) in list.iter().enumerate() {
        for (eta, b) in &list[i + 1..] {
            let mut push = |clause, detail: String| {
                violations.push(TreeViolation {
                    clause,
                    xi: (*xi).clone(),
                    eta: Some((*eta).clone()),
                    detail,
                })
            };
            let shared: BTreeSet<Ordinal> = a.intersection(b).cloned().collect();
            for t in &shared {
                let below_a: Vec<&Ordinal> = a.range(..t).collect();
                let below_b: Vec<&Ordinal> = b.range(..t).collect();
                if below_a != below_b {
                    push(TreeClause::Predecessors, format!("{t} has different predecessors"));
                    break;
                }
            }
            let top = shared.last().cloned();
            if let Some(top) = &top {
                let prefix = |s: &BTreeSet<Ordinal>| s.range(..=top).count() == shared.len();
                if !prefix(a) || !prefix(b) {
                    push(TreeClause::InitialSegment, format!("the shared part up to {top} is not an initial segment"));
                }
            }
            let rho = walker.rho(xi, eta)?;
            if let Some(top) = &top {
                if !variant.cap_holds(top, &rho) {
                    push(TreeClause::RhoCap, format!("shared node {top} breaks the cap ρ = {rho}"));
                }
            }
            pairs.push(PairDelta {
                xi: (*xi).clone(),
                eta: (*eta).clone(),
                delta: top.as_ref().map(level_of),
                shared_max: top,
                rho,
            });
        }
    }
    Ok(TreeReport { violations, pairs })
}

/// The tree of a filter: `b_ξ` is the union of `p(ξ)` along the chain.
/// Errors if any invariant fails, which would point at a bug in the filter.
pub fn tree_of(filter: &GenericFilter, walker: &Walker) -> Result<LeveledTree> {
    let mut branches: BTreeMap<Ordinal, BTreeSet<Ordinal>> = BTreeMap::new();
    for c in &filter.chain {
        for (xi, vals) in c.entries() {
            branches.entry(xi.clone()).or_default().extend(vals.iter().cloned());
        }
    }
    let mut parents: BTreeMap<Ordinal, Option<Ordinal>> = BTreeMap::new();
    for b in branches.values() {
        let mut prev = None;
        for t in b {
            parents.entry(t.clone()).or_insert_with(|| prev.clone());
            prev = Some(t.clone());
        }
    }
    let tree = LeveledTree {
        variant: filter.variant.clone(),
        nodes: parents
            .into_iter()
            .map(|(node, parent)| TreeNode {
                level: level_of(&node),
                node,
                parent,
            })
            .collect(),
        branches,
    };
    let report = check_tree(&tree, &filter.variant, walker)?;
    if let Some(v) = report.violations.first() {
        return Err(Error::TreeInvariant(format!("{:?} at {}: {}", v.clause, v.xi, v.detail)));
    }
    Ok(tree)
}

impl LeveledTree {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Graphviz rendering; nodes are labelled `ordinal@level`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tree {\n  rankdir=BT;\n");
        for n in &self.nodes {
            let _ = writeln!(out, "  \"{}\" [label=\"{}@{}\"];", n.node, n.node, n.level);
        }
        for n in &self.nodes {
            if let Some(p) = &n.parent {
                let _ = writeln!(out, "  \"{}\" -> \"{}\";", n.node, p);
            }
        }
        out.push_str("}\n");
        out
    }
}
