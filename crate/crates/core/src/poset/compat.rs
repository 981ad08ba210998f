//! Deciding compatibility by forced closure.
//!
//! Start from the pointwise union `r = p ∪ q`. Whenever `s ∈ r(α)`,
//! `t ∈ r(α) ∩ r(β)`, `s < t` and `s ∉ r(β)`, every common extension must put
//! `s` into its value set at `β` (the initial-segment clause), so add it. At the
//! fixpoint `r` satisfies the initial-segment clause, and the remaining clauses
//! (window, `ρ` cap) only get harder as value sets grow. So `r` is a common
//! extension if it validates, and otherwise any violation it shows is inherited
//! by every common extension.

use serde::Serialize;

use super::condition::Condition;
use super::validate::{shared_max, validate_condition, window_clash, ConditionClause};
use super::variant::Variant;
use crate::error::{Error, Result};
use crate::ordinal::Ordinal;
use crate::walk::Walker;

pub const CLOSURE_BUDGET: usize = 100_000;

/// `value ∈ r(from)` lies below `above ∈ r(from) ∩ r(into)`, hence joins `r(into)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForcedStep {
    pub value: Ordinal,
    pub into: Ordinal,
    pub from: Ordinal,
    pub above: Ordinal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstruction {
    /// `shared ∈ r(α) ∩ r(β)` breaks the cap `ρ(α, β)`.
    RhoCap {
        alpha: Ordinal,
        beta: Ordinal,
        shared: Ordinal,
        rho: Ordinal,
        strict: bool,
    },
    /// `low < high` both in `r(alpha)` and less than ω apart.
    Window {
        alpha: Ordinal,
        low: Ordinal,
        high: Ordinal,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IncompatibilityCertificate {
    pub derivation: Vec<ForcedStep>,
    pub obstruction: Obstruction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Compatibility {
    Compatible {
        witness: Condition,
        derivation: Vec<ForcedStep>,
    },
    Incompatible {
        certificate: IncompatibilityCertificate,
    },
}

impl Compatibility {
    pub fn is_compatible(&self) -> bool {
        matches!(self, Compatibility::Compatible { .. })
    }

    pub fn witness(&self) -> Option<&Condition> {
        match self {
            Compatibility::Compatible { witness, .. } => Some(witness),
            Compatibility::Incompatible { .. } => None,
        }
    }

    pub fn certificate(&self) -> Option<&IncompatibilityCertificate> {
        match self {
            Compatibility::Compatible { .. } => None,
            Compatibility::Incompatible { certificate } => Some(certificate),
        }
    }
}

/// Closes `start` under the forced-membership rule, recording each addition.
pub fn forced_closure(start: &Condition) -> Result<(Condition, Vec<ForcedStep>)> {
    let mut r = start.clone();
    let dom: Vec<Ordinal> = r.dom().cloned().collect();
    let mut steps = Vec::new();
    loop {
        let mut changed = false;
        for from in &dom {
            for into in &dom {
                if from == into {
                    continue;
                }
                let (a, b) = (r.get(from).expect("dom"), r.get(into).expect("dom"));
                let Some(top) = shared_max(a, b) else {
                    continue;
                };
                let missing: Vec<Ordinal> =
                    a.range(..&top).filter(|s| !b.contains(*s)).cloned().collect();
                for s in missing {
                    if steps.len() >= CLOSURE_BUDGET {
                        return Err(Error::ClosureBudget(CLOSURE_BUDGET));
                    }
                    r.insert(into.clone(), s.clone());
                    steps.push(ForcedStep {
                        value: s,
                        into: into.clone(),
                        from: from.clone(),
                        above: top.clone(),
                    });
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok((r, steps));
        }
    }
}

pub fn compatible(p: &Condition, q: &Condition, variant: &Variant, walker: &Walker) -> Result<Compatibility> {
    let (r, derivation) = forced_closure(&p.union(q))?;
    let report = validate_condition(&r, variant, walker)?;
    if report.valid() {
        return Ok(Compatibility::Compatible {
            witness: r,
            derivation,
        });
    }
    let pick = |clause| report.violations.iter().find(|v| v.clause == clause);
    let obstruction = if let Some(v) = pick(ConditionClause::RhoCap) {
        let beta = v.beta.clone().expect("pair clause");
        let shared = shared_max(r.get(&v.alpha).expect("dom"), r.get(&beta).expect("dom"))
            .expect("shared value");
        Obstruction::RhoCap {
            rho: walker.rho(&v.alpha, &beta)?,
            alpha: v.alpha.clone(),
            beta,
            shared,
            strict: variant.strict(),
        }
    } else if let Some(v) = pick(ConditionClause::Window) {
        let vals: Vec<&Ordinal> = r.values_at(&v.alpha).collect();
        let w = vals
            .windows(2)
            .find(|w| window_clash(w[0], w[1]))
            .expect("window violation");
        Obstruction::Window {
            alpha: v.alpha.clone(),
            low: w[0].clone(),
            high: w[1].clone(),
        }
    } else {
        return Err(Error::Precondition(format!(
            "inputs are not conditions of {variant}: {}",
            report.violations[0].detail
        )));
    };
    Ok(Compatibility::Incompatible {
        certificate: IncompatibilityCertificate {
            derivation,
            obstruction,
        },
    })
}

impl IncompatibilityCertificate {
    /// Replays the derivation from `p ∪ q` and re-checks the obstruction,
    /// recomputing `ρ` from scratch.
    pub fn verify(&self, p: &Condition, q: &Condition, walker: &Walker) -> Result<bool> {
        let mut r = p.union(q);
        for step in &self.derivation {
            let premise = r.get(&step.from).is_some_and(|a| a.contains(&step.value) && a.contains(&step.above))
                && r.get(&step.into).is_some_and(|b| b.contains(&step.above))
                && step.value < step.above;
            if !premise {
                return Ok(false);
            }
            r.insert(step.into.clone(), step.value.clone());
        }
        Ok(match &self.obstruction {
            Obstruction::RhoCap {
                alpha,
                beta,
                shared,
                rho,
                strict,
            } => {
                let plain = Walker::uncached(walker.family().clone());
                let fresh = plain.rho(alpha, beta)?;
                let in_both = r.get(alpha).is_some_and(|a| a.contains(shared))
                    && r.get(beta).is_some_and(|b| b.contains(shared));
                let broken = if *strict { shared >= &fresh } else { shared > &fresh };
                alpha < beta && in_both && &fresh == rho && broken
            }
            Obstruction::Window { alpha, low, high } => {
                r.get(alpha).is_some_and(|a| a.contains(low) && a.contains(high))
                    && low < high
                    && window_clash(low, high)
            }
        })
    }

    /// The shared value and the pair it breaks, when the obstruction is a cap.
    pub fn rho_witness(&self) -> Option<(&Ordinal, &Ordinal, &Ordinal, &Ordinal)> {
        match &self.obstruction {
            Obstruction::RhoCap {
                alpha,
                beta,
                shared,
                rho,
                ..
            } => Some((alpha, beta, shared, rho)),
            Obstruction::Window { .. } => None,
        }
    }
}
