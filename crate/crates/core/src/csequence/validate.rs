use serde::Serialize;

use super::club::Club;
use super::family::{CSequence, CofinalityClass};
use crate::error::Result;
use crate::ordinal::{Ordinal, OrdinalGrid};

/// The square-sequence clauses checked per limit ordinal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyClause {
    /// `C_α` is closed and cofinal in `α`.
    Club,
    /// `otp(C_α) ≤ Ω`.
    OtpBound,
    /// `otp(C_α) < α` above the first tier.
    OtpBelowAlpha,
    /// No element of `C_α` is tier-class.
    ElementClass,
    /// `α' ∈ lim(C_α)` implies `C_α ∩ α' = C_{α'}`.
    Coherence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyViolation {
    pub clause: FamilyClause,
    pub alpha: Ordinal,
    pub witness: Option<Ordinal>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub family: String,
    pub sample_bound: Ordinal,
    pub limits_checked: usize,
    pub coherence_checks: usize,
    pub violations: Vec<FamilyViolation>,
}

impl FamilyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations_of(&self, clause: FamilyClause) -> impl Iterator<Item = &FamilyViolation> {
        self.violations.iter().filter(move |v| v.clause == clause)
    }
}

/// Checks every limit ordinal of `sample` below the family bound. Elements and
/// limit points of each `C_α` are probed through the sample as well.
pub fn validate_family(family: &dyn CSequence, sample: &OrdinalGrid) -> Result<FamilyReport> {
    let threshold = family.tier().cloned().unwrap_or_else(Ordinal::omega);
    let mut report = FamilyReport {
        family: family.name(),
        sample_bound: sample.bound().clone(),
        limits_checked: 0,
        coherence_checks: 0,
        violations: Vec::new(),
    };
    let points: Vec<&Ordinal> = sample
        .points()
        .iter()
        .filter(|p| *p < family.bound())
        .collect();

    for &alpha in points.iter().filter(|a| a.is_limit()) {
        report.limits_checked += 1;
        let club = family.club(alpha)?;
        let mut flag = |clause, witness: Option<&Ordinal>, detail: String| {
            report.violations.push(FamilyViolation {
                clause,
                alpha: alpha.clone(),
                witness: witness.cloned(),
                detail,
            })
        };

        match &club {
            Club::Interval { len, .. } if &club.sup() == alpha && len.is_limit() => {}
            Club::Ladder { .. } if &club.sup() == alpha => {}
            other => flag(
                FamilyClause::Club,
                None,
                format!("C_{alpha} = {} is not closed and cofinal", describe(other)),
            ),
        }

        let otp = club.otp();
        if let Some(tier) = family.tier() {
            if &otp > tier {
                flag(
                    FamilyClause::OtpBound,
                    None,
                    format!("otp(C_{alpha}) = {otp} exceeds {tier}"),
                );
            }
        }
        if alpha > &threshold && &otp >= alpha {
            flag(
                FamilyClause::OtpBelowAlpha,
                None,
                format!("otp(C_{alpha}) = {otp} is not below {alpha}"),
            );
        }

        for &x in points.iter().take_while(|x| **x < alpha) {
            if family.tier().is_some()
                && club.contains(x)
                && family.class_of(x)? == CofinalityClass::TierClass
            {
                flag(
                    FamilyClause::ElementClass,
                    Some(x),
                    format!("{x} ∈ C_{alpha} is tier-class"),
                );
            }
            if club.is_limit_point(x) {
                report_coherence(family, alpha, &club, x, &mut flag)?;
            }
        }
    }
    report.coherence_checks = points
        .iter()
        .filter(|a| a.is_limit())
        .map(|a| {
            family
                .club(a)
                .map(|c| points.iter().filter(|x| c.is_limit_point(x)).count())
                .unwrap_or(0)
        })
        .sum();
    Ok(report)
}

fn report_coherence(
    family: &dyn CSequence,
    alpha: &Ordinal,
    club: &Club,
    gamma: &Ordinal,
    flag: &mut impl FnMut(FamilyClause, Option<&Ordinal>, String),
) -> Result<()> {
    let truncated = club.truncate(gamma).expect("limit point");
    let below = family.club(gamma)?;
    if !same_set(&truncated, &below) {
        flag(
            FamilyClause::Coherence,
            Some(gamma),
            format!(
                "C_{alpha} ∩ {gamma} = {} but C_{gamma} = {}",
                describe(&truncated),
                describe(&below)
            ),
        );
    }
    Ok(())
}

fn same_set(a: &Club, b: &Club) -> bool {
    match (a, b) {
        (Club::Interval { base: b1, len: l1 }, Club::Interval { base: b2, len: l2 }) => {
            b1 == b2 && l1 == l2
        }
        _ => a == b,
    }
}

fn describe(c: &Club) -> String {
    match c {
        Club::Empty => "∅".into(),
        Club::Singleton { element } => format!("{{{element}}}"),
        Club::Finite { elements } => {
            let items: Vec<String> = elements.iter().map(|e| e.to_string()).collect();
            format!("{{{}}}", items.join(", "))
        }
        Club::Interval { base, len } => format!("{{{base}+t : 0<t<{len}}}"),
        Club::Ladder { ladder } => format!("ladder to {}", ladder.sup()),
    }
}
