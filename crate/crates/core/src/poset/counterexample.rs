//! Witnesses that `Q_μ` fails to be a complete suborder for suitable `μ` of
//! ω-class: every `p ∈ Q_μ` has an extension inside `Q_μ` that is
//! incompatible with `q = {(β, {otp(C_β)})}`.

use super::compat::{compatible, IncompatibilityCertificate};
use super::condition::Condition;
use super::validate::validate_condition;
use super::variant::Variant;
use crate::csequence::{Club, CofinalityClass};
use crate::error::{Error, Result};
use crate::ordinal::Ordinal;
use crate::walk::Walker;

fn unmet(detail: impl Into<String>) -> Error {
    Error::Precondition(detail.into())
}

/// The least limit point of `club` strictly above `floor`, when limit points
/// are cofinal in the club.
fn next_limit_point(club: &Club, floor: Option<&Ordinal>) -> Option<Ordinal> {
    let Club::Interval { base, len } = club else {
        return None;
    };
    if len.last_exponent().is_none_or(|e| e < &Ordinal::from(2u64)) {
        return None;
    }
    let t = match floor.and_then(|f| f.sub_left(base)) {
        Some(t) => t.limit_part().add(&Ordinal::omega()),
        None => Ordinal::omega(),
    };
    (&t < len).then(|| base.add(&t))
}

/// The query condition `{(β, {otp(C_β)})}`.
pub fn counterexample_query(beta: &Ordinal, walker: &Walker) -> Result<Condition> {
    let nu = walker.family().club(beta)?.otp();
    let mut q = Condition::new();
    q.insert(beta.clone(), nu);
    Ok(q)
}

/// Extends `p ∈ Q_μ` to `p̄ = p ∪ {(α, p(ξ) ∩ (ν+1))}` with `ν = otp(C_β)`,
/// `ξ` the first domain point with `ν ∈ p(ξ)` and `α` the least limit point
/// of `C_μ` above `dom(p)`. Returns `p̄` and the certificate that `p̄` is
/// incompatible with [`counterexample_query`].
pub fn suborder_counterexample(
    mu: &Ordinal,
    beta: &Ordinal,
    p: &Condition,
    walker: &Walker,
) -> Result<(Condition, IncompatibilityCertificate)> {
    let family = walker.family();
    family.check_bound(beta)?;
    if family.class_of(mu)? != CofinalityClass::OmegaClass {
        return Err(unmet(format!("{mu} is not of ω-class")));
    }
    if !family.club(beta)?.is_limit_point(mu) {
        return Err(unmet(format!("{mu} is not a limit point of C_{beta}")));
    }
    let club_mu = family.club(mu)?;
    if next_limit_point(&club_mu, None).is_none() {
        return Err(unmet(format!("the limit points of C_{mu} are not cofinal in {mu}")));
    }
    let variant = Variant::Qmu { mu: mu.clone() };
    let report = validate_condition(p, &variant, walker)?;
    if let Some(v) = report.violations.first() {
        return Err(unmet(format!("p is not a condition of {variant}: {}", v.detail)));
    }
    let q = counterexample_query(beta, walker)?;
    let nu = q.values_at(beta).next().expect("one value").clone();
    if !compatible(p, &q, &Variant::Q, walker)?.is_compatible() {
        return Err(unmet("p is already incompatible with the query"));
    }
    let Some(xi) = p.entries().iter().find(|(_, v)| v.contains(&nu)).map(|(k, _)| k.clone()) else {
        return Err(unmet(format!("{nu} is not a value of p")));
    };
    let alpha = next_limit_point(&club_mu, p.dom().last())
        .ok_or_else(|| unmet(format!("no limit point of C_{mu} above dom(p)")))?;

    let mut pbar = p.clone();
    pbar.touch(alpha.clone());
    for v in p.values_at(&xi).filter(|v| *v <= &nu) {
        pbar.insert(alpha.clone(), v.clone());
    }
    match compatible(&pbar, &q, &Variant::Q, walker)? {
        super::Compatibility::Incompatible { certificate } => Ok((pbar, certificate)),
        super::Compatibility::Compatible { .. } => Err(Error::Hypothesis {
            clause: "construction".into(),
            detail: format!("the extension at {alpha} is still compatible with the query"),
        }),
    }
}
