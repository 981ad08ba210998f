use std::collections::BTreeSet;

use serde::Serialize;

use super::condition::Condition;
use super::variant::Variant;
use crate::error::Result;
use crate::ordinal::Ordinal;
use crate::walk::Walker;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionClause {
    /// Domain point outside the family bound or the variant's domain.
    Domain,
    /// Value at or above the tier `Ω`.
    ValueBound,
    /// Two values of one set closer than ω.
    Window,
    /// `p(α) ∩ p(β)` not an initial segment of both.
    InitialSegment,
    /// Shared maximum above the `ρ` cap.
    RhoCap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionViolation {
    pub clause: ConditionClause,
    pub alpha: Ordinal,
    pub beta: Option<Ordinal>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub variant: String,
    pub violations: Vec<ConditionViolation>,
}

impl ConditionReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, clause: ConditionClause) -> bool {
        self.violations.iter().any(|v| v.clause == clause)
    }
}

/// `a` and `b` (with `a < b`) lie in a common window `[ν, ν + ω)`.
pub fn window_clash(a: &Ordinal, b: &Ordinal) -> bool {
    b < &a.add(&Ordinal::omega())
}

/// The first `t ∈ a ∩ b` with some smaller element of `a` or `b` missing from
/// the other, as `(t, missing)`.
pub fn initial_segment_gap(
    a: &BTreeSet<Ordinal>,
    b: &BTreeSet<Ordinal>,
) -> Option<(Ordinal, Ordinal)> {
    let top = a.iter().rev().find(|x| b.contains(*x))?;
    for (x, other) in [(a, b), (b, a)] {
        if let Some(s) = x.range(..top).find(|s| !other.contains(*s)) {
            return Some((top.clone(), s.clone()));
        }
    }
    None
}

pub fn shared_max(a: &BTreeSet<Ordinal>, b: &BTreeSet<Ordinal>) -> Option<Ordinal> {
    a.iter().rev().find(|x| b.contains(*x)).cloned()
}

pub fn validate_condition(p: &Condition, variant: &Variant, walker: &Walker) -> Result<ConditionReport> {
    let family = walker.family();
    let mut violations = Vec::new();
    let mut push = |clause, alpha: &Ordinal, beta: Option<&Ordinal>, detail: String| {
        violations.push(ConditionViolation {
            clause,
            alpha: alpha.clone(),
            beta: beta.cloned(),
            detail,
        })
    };

    let mut in_bound = Vec::new();
    for (alpha, vals) in p.entries() {
        if alpha >= family.bound() {
            push(
                ConditionClause::Domain,
                alpha,
                None,
                format!("{alpha} is not below the family bound {}", family.bound()),
            );
            continue;
        }
        in_bound.push(alpha);
        if !variant.domain_ok(alpha, family.as_ref())? {
            push(
                ConditionClause::Domain,
                alpha,
                None,
                format!("{alpha} is not allowed in {variant}"),
            );
        }
        if let Some(tier) = family.tier() {
            if let Some(v) = vals.iter().find(|v| *v >= tier) {
                push(
                    ConditionClause::ValueBound,
                    alpha,
                    None,
                    format!("value {v} is not below {tier}"),
                );
            }
        }
        let list: Vec<&Ordinal> = vals.iter().collect();
        for w in list.windows(2) {
            if window_clash(w[0], w[1]) {
                push(
                    ConditionClause::Window,
                    alpha,
                    None,
                    format!("{} and {} share a window", w[0], w[1]),
                );
            }
        }
    }

    for (i, alpha) in in_bound.iter().enumerate() {
        for beta in &in_bound[i + 1..] {
            let (a, b) = (p.get(alpha).expect("dom"), p.get(beta).expect("dom"));
            if let Some((t, s)) = initial_segment_gap(a, b) {
                push(
                    ConditionClause::InitialSegment,
                    alpha,
                    Some(beta),
                    format!("{t} is shared but {s} below it is not"),
                );
            }
            if let Some(m) = shared_max(a, b) {
                let rho = walker.rho(alpha, beta)?;
                if !variant.cap_holds(&m, &rho) {
                    let rel = if variant.strict() { "<" } else { "≤" };
                    push(
                        ConditionClause::RhoCap,
                        alpha,
                        Some(beta),
                        format!("shared max {m} is not {rel} ρ = {rho}"),
                    );
                }
            }
        }
    }
    Ok(ConditionReport {
        variant: variant.to_string(),
        violations,
    })
}

pub fn is_valid(p: &Condition, variant: &Variant, walker: &Walker) -> Result<bool> {
    Ok(validate_condition(p, variant, walker)?.valid())
}
