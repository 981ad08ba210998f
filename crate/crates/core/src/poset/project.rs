//! Projections of `Q`-conditions into `Q_c` and `Q_μ`, with the merge that
//! witnesses the reduction property.
//!
//! Both searches run over a finite [`OrdinalGrid`]: candidates for the moved
//! points, and the ordinals quantified over in the clauses, are grid points.
//! A failed search is an error naming the clause that cut the candidates off.

use std::collections::BTreeSet;

use serde::Serialize;

use super::condition::Condition;
use super::validate::validate_condition;
use super::variant::Variant;
use crate::csequence::CofinalityClass;
use crate::error::{Error, Result};
use crate::ordinal::{Ordinal, OrdinalGrid};
use crate::walk::Walker;

/// Node limit for the backtracking search in [`project_below`].
pub const SEARCH_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct CountableProjection {
    pub condition: Condition,
    /// `(β_i, β'_i)` for each tier-class domain point.
    pub moved: Vec<(Ordinal, Ordinal)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BelowProjection {
    pub condition: Condition,
    pub moved: Vec<(Ordinal, Ordinal)>,
    pub nu_bar: Ordinal,
    pub mu0: Ordinal,
}

fn require_q(q: &Condition, walker: &Walker) -> Result<()> {
    let report = validate_condition(q, &Variant::Q, walker)?;
    match report.violations.first() {
        Some(v) => Err(Error::Precondition(format!("not a condition of Q: {}", v.detail))),
        None => Ok(()),
    }
}

fn transport(q: &Condition, keep: &[Ordinal], moved: &[(Ordinal, Ordinal)]) -> Condition {
    let mut out = Condition::new();
    for a in keep {
        out.touch(a.clone());
        for v in q.values_at(a) {
            out.insert(a.clone(), v.clone());
        }
    }
    for (from, to) in moved {
        out.touch(to.clone());
        for v in q.values_at(from) {
            out.insert(to.clone(), v.clone());
        }
    }
    out
}

/// The common extension of `r` and `q` for `r` below a projection of `q`:
/// `r` itself, plus `β_i ↦ r(β'_i) ∩ (max(q(β_i)) + 1)` for every moved pair.
pub fn merge_projection(r: &Condition, q: &Condition, moved: &[(Ordinal, Ordinal)]) -> Condition {
    let mut s = r.clone();
    for (beta, image) in moved {
        s.touch(beta.clone());
        let Some(top) = q.get(beta).and_then(|v| v.last()) else {
            continue;
        };
        for v in r.values_at(image).filter(|v| *v <= top) {
            s.insert(beta.clone(), v.clone());
        }
    }
    s
}

/// Which of the four clauses rejects `xi` as the image of `beta`, if any.
fn countable_clause(q: &Condition, beta: &Ordinal, xi: &Ordinal, walker: &Walker) -> Result<Option<u8>> {
    let family = walker.family();
    if !family.club(beta)?.is_limit_point(xi) {
        return Ok(Some(1));
    }
    if q.dom().any(|a| a < beta && a >= xi) {
        return Ok(Some(2));
    }
    for alpha in q.dom().filter(|a| *a > beta) {
        if walker.rho(xi, alpha)? != walker.rho(beta, alpha)? {
            return Ok(Some(3));
        }
    }
    if let Some(top) = q.get(beta).and_then(|v| v.last()) {
        if &family.club(xi)?.otp() <= top {
            return Ok(Some(4));
        }
    }
    Ok(None)
}

/// Replaces every tier-class `β_i ∈ dom(q)` by the least grid point `ξ` that
/// is a limit point of `C_{β_i}`, lies above `dom(q) ∩ β_i`, has
/// `ρ(ξ, α) = ρ(β_i, α)` for every `α ∈ dom(q)` above `β_i`, and has
/// `otp(C_ξ) > max(q(β_i))`. Values move along with the points.
pub fn project_to_countable(q: &Condition, walker: &Walker, grid: &OrdinalGrid) -> Result<CountableProjection> {
    require_q(q, walker)?;
    let family = walker.family();
    let mut keep = Vec::new();
    let mut tier = Vec::new();
    for a in q.dom() {
        if family.class_of(a)? == CofinalityClass::TierClass {
            tier.push(a.clone());
        } else {
            keep.push(a.clone());
        }
    }
    let mut moved = Vec::new();
    for beta in &tier {
        let mut rejected = [0usize; 5];
        let mut found = None;
        for xi in &grid.points()[..grid.lower_bound(beta)] {
            match countable_clause(q, beta, xi, walker)? {
                None => {
                    found = Some(xi.clone());
                    break;
                }
                Some(c) => rejected[c as usize] += 1,
            }
        }
        let Some(xi) = found else {
            return Err(Error::SearchExhausted(format!(
                "no grid point qualifies for {beta}; rejected by clause 2: {}, clause 3: {}, clause 4: {}",
                rejected[2], rejected[3], rejected[4]
            )));
        };
        moved.push((beta.clone(), xi));
    }
    let condition = transport(q, &keep, &moved);
    let report = validate_condition(&condition, &Variant::Qc, walker)?;
    if let Some(v) = report.violations.first() {
        return Err(Error::Hypothesis {
            clause: "projection".into(),
            detail: format!("the projection is not a condition of Qc: {}", v.detail),
        });
    }
    Ok(CountableProjection { condition, moved })
}

fn capped(x: Ordinal, cap: &Ordinal) -> Ordinal {
    x.min(cap.clone())
}

/// Projects `q` into `Q_μ`. With `L = dom(q) ∩ μ` and `H = dom(q) \ μ`:
///
/// * `ν̄` is the successor of the largest value and largest `ρ` on `dom(q)`,
/// * `μ₀` is the least grid point above `max(L)` with `ρ(γ, β) > ν̄` for every
///   grid point `γ ∈ [μ₀, μ)` and `β ∈ H`,
/// * `H'` is the lexicographically least increasing tuple of grid points in
///   `(μ₀, μ)` that reproduces the sets `A_{ν,β}` on grid points below `μ₀`
///   and the values `ρ(β_i, β_j)`.
pub fn project_below(q: &Condition, mu: &Ordinal, walker: &Walker, grid: &OrdinalGrid) -> Result<BelowProjection> {
    require_q(q, walker)?;
    walker.family().check_bound(mu)?;
    let low: Vec<Ordinal> = q.dom().filter(|a| *a < mu).cloned().collect();
    let high: Vec<Ordinal> = q.dom().filter(|a| *a >= mu).cloned().collect();

    let dom: Vec<&Ordinal> = q.dom().collect();
    let mut top = q.value_pool().last().cloned().unwrap_or_else(Ordinal::zero);
    for (i, a) in dom.iter().enumerate() {
        for b in &dom[i + 1..] {
            top = top.max(walker.rho(a, b)?);
        }
    }
    let nu_bar = top.succ();

    if high.is_empty() {
        return Ok(BelowProjection {
            condition: q.clone(),
            moved: Vec::new(),
            nu_bar,
            mu0: Ordinal::zero(),
        });
    }

    let below_mu = &grid.points()[..grid.lower_bound(mu)];
    let floor = low.last().map(|m| m.succ()).unwrap_or_else(Ordinal::zero);
    let mut start = below_mu.len();
    while start > 0 {
        let gamma = &below_mu[start - 1];
        let mut far = true;
        for beta in &high {
            if walker.rho(gamma, beta)? <= nu_bar {
                far = false;
                break;
            }
        }
        if !far {
            break;
        }
        start -= 1;
    }
    let start = start.max(grid.lower_bound(&floor));
    let mu0 = below_mu
        .get(start)
        .cloned()
        .ok_or_else(|| Error::SearchExhausted(format!("no grid point can serve as μ₀ below {mu}")))?;

    // the witnesses for the A-sets: grid points below μ₀, plus L
    let mut probes: BTreeSet<Ordinal> = below_mu[..start].iter().cloned().collect();
    probes.extend(low.iter().cloned());
    let probes: Vec<Ordinal> = probes.into_iter().collect();

    let mut candidates: Vec<Vec<Ordinal>> = Vec::new();
    for beta in &high {
        let mut list = Vec::new();
        for xi in below_mu[start..].iter().filter(|x| *x > &mu0) {
            let mut same = true;
            for alpha in &probes {
                let (a, b) = (walker.rho(alpha, beta)?, walker.rho(alpha, xi)?);
                if capped(a, &nu_bar) != capped(b, &nu_bar) {
                    same = false;
                    break;
                }
            }
            if same {
                list.push(xi.clone());
            }
        }
        if list.is_empty() {
            return Err(Error::SearchExhausted(format!(
                "clause 3: no grid point in ({mu0}, {mu}) reproduces the A-sets of {beta}"
            )));
        }
        candidates.push(list);
    }

    let mut chosen: Vec<Ordinal> = Vec::new();
    let mut nodes = 0usize;
    if !extend_tuple(&high, &candidates, &mut chosen, &mut nodes, walker)? {
        return Err(Error::SearchExhausted(format!(
            "clause 4: no increasing tuple of candidates reproduces ρ on {} high points",
            high.len()
        )));
    }
    let moved: Vec<(Ordinal, Ordinal)> = high.into_iter().zip(chosen).collect();
    let condition = transport(q, &low, &moved);
    let report = validate_condition(&condition, &Variant::Qmu { mu: mu.clone() }, walker)?;
    if let Some(v) = report.violations.first() {
        return Err(Error::Hypothesis {
            clause: "projection".into(),
            detail: format!("the projection is not a condition of Qmu[{mu}]: {}", v.detail),
        });
    }
    Ok(BelowProjection {
        condition,
        moved,
        nu_bar,
        mu0,
    })
}

fn extend_tuple(
    high: &[Ordinal],
    candidates: &[Vec<Ordinal>],
    chosen: &mut Vec<Ordinal>,
    nodes: &mut usize,
    walker: &Walker,
) -> Result<bool> {
    let i = chosen.len();
    if i == high.len() {
        return Ok(true);
    }
    for xi in &candidates[i] {
        *nodes += 1;
        if *nodes > SEARCH_BUDGET {
            return Err(Error::BudgetExhausted {
                budget: SEARCH_BUDGET,
                needed: *nodes,
            });
        }
        if chosen.last().is_some_and(|prev| prev >= xi) {
            continue;
        }
        let mut ok = true;
        for (j, prev) in chosen.iter().enumerate() {
            if walker.rho(prev, xi)? != walker.rho(&high[j], &high[i])? {
                ok = false;
                break;
            }
        }
        if ok {
            chosen.push(xi.clone());
            if extend_tuple(high, candidates, chosen, nodes, walker)? {
                return Ok(true);
            }
            chosen.pop();
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csequence::TwoTierSquare;
    use crate::ordinal::ord;
    use crate::poset::is_valid;
    use std::sync::Arc;

    fn setup() -> (Walker, OrdinalGrid) {
        let w = Walker::new(Arc::new(TwoTierSquare::new(ord("w^2")).unwrap()));
        let g = OrdinalGrid::new(w.family().bound(), 4, 2).unwrap();
        (w, g)
    }

    #[test]
    fn countable_identity_and_single_point() {
        let (w, g) = setup();
        let q = Condition::parse_short("w^2+w: 3; w^3+5: 3");
        let proj = project_to_countable(&q, &w, &g).unwrap();
        assert_eq!(proj.condition, q);
        assert!(proj.moved.is_empty());

        // C_{Ω·2} = (Ω, Ω·2); the least limit point with order type above 3 is Ω+ω
        let q = Condition::parse_short("w^2*2: 3");
        let proj = project_to_countable(&q, &w, &g).unwrap();
        assert_eq!(proj.moved, vec![(ord("w^2*2"), ord("w^2+w"))]);
        assert_eq!(proj.condition, Condition::parse_short("w^2+w: 3"));
    }

    #[test]
    fn countable_merge_extends_both() {
        let (w, g) = setup();
        let q = Condition::parse_short("w^2+3: 1; w^2*2: 1, w+2");
        let proj = project_to_countable(&q, &w, &g).unwrap();
        let image = proj.moved[0].1.clone();
        assert!(image > ord("w^2+3"));
        let mut r = proj.condition.clone();
        r.insert(image.clone(), ord("w*3"));
        r.insert(ord("w^3+1"), ord("7"));
        assert!(is_valid(&r, &Variant::Qc, &w).unwrap());
        let s = merge_projection(&r, &q, &proj.moved);
        assert!(s.extends(&r) && s.extends(&q));
        assert!(is_valid(&s, &Variant::Q, &w).unwrap());
    }

    #[test]
    fn below_identity_and_search() {
        let (w, g) = setup();
        let q = Condition::parse_short("w+1: 2");
        let proj = project_below(&q, &ord("w^2*2"), &w, &g).unwrap();
        assert_eq!(proj.condition, q);

        let q = Condition::parse_short("w+1: 2; w^2*3+w: 2");
        let mu = ord("w^2*3");
        let proj = project_below(&q, &mu, &w, &g).unwrap();
        assert_eq!(proj.moved.len(), 1);
        let image = &proj.moved[0].1;
        assert!(image < &mu && image > &proj.mu0);
        assert!(is_valid(&proj.condition, &Variant::Qmu { mu }, &w).unwrap());
        let s = merge_projection(&proj.condition, &q, &proj.moved);
        assert!(s.extends(&q) && is_valid(&s, &Variant::Q, &w).unwrap());

        // below a limit of tiers the small grid has nothing that reflects ρ
        let q = Condition::parse_short("w+1: 2; w^3+w: 2");
        let err = project_below(&q, &ord("w^3"), &w, &g).unwrap_err();
        assert!(matches!(err, Error::SearchExhausted(_)));
    }

    #[test]
    fn invalid_input_is_rejected() {
        let (w, g) = setup();
        let q = Condition::parse_short("w: 3, 5");
        assert!(matches!(project_to_countable(&q, &w, &g), Err(Error::Precondition(_))));
        assert!(matches!(project_below(&q, &ord("w^2"), &w, &g), Err(Error::Precondition(_))));
    }
}
