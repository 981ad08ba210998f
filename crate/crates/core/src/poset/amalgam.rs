//! The explicit common extension of two conditions from a refined Δ-system.

use std::collections::BTreeSet;

use super::condition::Condition;
use super::validate::{shared_max, validate_condition};
use super::variant::Variant;
use crate::error::{Error, Result};
use crate::ordinal::Ordinal;
use crate::walk::Walker;

fn hypothesis(clause: &str, detail: impl Into<String>) -> Error {
    Error::Hypothesis {
        clause: clause.into(),
        detail: detail.into(),
    }
}

/// Checks that the order isomorphisms `dom(p) → dom(q)` and
/// `⋃range(p) → ⋃range(q)` fix `dom_root` and `val_root` pointwise and carry
/// `p` onto `q`.
pub fn isomorphic_fixing(
    p: &Condition,
    q: &Condition,
    dom_root: &BTreeSet<Ordinal>,
    val_root: &BTreeSet<Ordinal>,
) -> std::result::Result<(), String> {
    let (dp, dq): (Vec<_>, Vec<_>) = (p.dom().collect(), q.dom().collect());
    let (vp, vq): (Vec<_>, Vec<_>) = (
        p.value_pool().into_iter().collect(),
        q.value_pool().into_iter().collect(),
    );
    if dp.len() != dq.len() || vp.len() != vq.len() {
        return Err("different sizes".into());
    }
    for (x, y) in dp.iter().zip(&dq) {
        if (dom_root.contains(*x) || dom_root.contains(*y)) && x != y {
            return Err(format!("domain root point {x} is not fixed"));
        }
    }
    for (x, y) in vp.iter().zip(&vq) {
        if (val_root.contains(x) || val_root.contains(y)) && x != y {
            return Err(format!("value root point {x} is not fixed"));
        }
    }
    let image = |x: &Ordinal| vp.binary_search(x).map(|i| vq[i].clone()).expect("pool");
    for (x, y) in dp.iter().zip(&dq) {
        let mapped: BTreeSet<Ordinal> = p.values_at(x).map(image).collect();
        if q.get(y) != Some(&mapped) {
            return Err(format!("p({x}) is not carried onto q({y})"));
        }
    }
    Ok(())
}

/// Builds the common extension `r` of `p` and `q` on `dom(p) ∪ dom(q)`:
///
/// * `r(γ) = p(γ) ∪ q(γ)` for `γ` in the root `d`,
/// * `r(α) = p(α)` on the rest of `dom(p)`,
/// * `r(β) = q(β)` on the rest of `dom(q)` when every `max(q(γ) ∩ q(β))` lies
///   in the value root `c`, and `r(β) = p(γ) ∪ q(β)` for the unique `γ ∈ d`
///   with that maximum in `b` otherwise.
///
/// Here `c = ⋃range(p) ∩ ⋃range(q)`, `a = ⋃range(p) \ c` and
/// `b = ⋃range(q) \ c`. Every hypothesis is checked first; a failure names the
/// clause. The result is validated in the base poset of `variant` before it is
/// returned.
pub fn amalgamate_delta_pair(
    p: &Condition,
    q: &Condition,
    root: &BTreeSet<Ordinal>,
    variant: &Variant,
    walker: &Walker,
) -> Result<Condition> {
    for (name, s) in [("p", p), ("q", q)] {
        let report = validate_condition(s, variant, walker)?;
        if let Some(v) = report.violations.first() {
            return Err(hypothesis("conditions", format!("{name} is not a condition: {}", v.detail)));
        }
    }
    let (dp, dq) = (p.dom_set(), q.dom_set());
    let shared_dom: BTreeSet<Ordinal> = dp.intersection(&dq).cloned().collect();
    if &shared_dom != root {
        return Err(hypothesis(
            "delta-system",
            format!("dom(p) ∩ dom(q) has {} points, root has {}", shared_dom.len(), root.len()),
        ));
    }
    let (rp, rq) = (p.value_pool(), q.value_pool());
    let c: BTreeSet<Ordinal> = rp.intersection(&rq).cloned().collect();
    let a: BTreeSet<Ordinal> = rp.difference(&c).cloned().collect();
    let b: BTreeSet<Ordinal> = rq.difference(&c).cloned().collect();

    isomorphic_fixing(p, q, root, &c).map_err(|e| hypothesis("isomorphism", e))?;

    let below = |x: &BTreeSet<Ordinal>, y: &BTreeSet<Ordinal>| match (x.last(), y.first()) {
        (Some(hi), Some(lo)) => hi < lo,
        _ => true,
    };
    if !below(&c, &a) || !below(&a, &b) {
        return Err(hypothesis("layout", "values are not arranged as c < a < b"));
    }

    let petals_p: Vec<&Ordinal> = dp.difference(root).collect();
    let petals_q: Vec<&Ordinal> = dq.difference(root).collect();
    for alpha in &petals_p {
        for beta in &petals_q {
            let rho = walker.rho_pair(alpha, beta)?;
            if let Some(top) = c.last() {
                if &rho <= top {
                    return Err(hypothesis(
                        "rho-gap",
                        format!("ρ({alpha}, {beta}) = {rho} is not above max(c) = {top}"),
                    ));
                }
            }
            for gamma in root {
                let low = walker.rho_pair(gamma, alpha)?.min(walker.rho_pair(gamma, beta)?);
                if rho < low {
                    return Err(hypothesis(
                        "min-inequality",
                        format!("ρ({alpha}, {beta}) = {rho} < {low} via {gamma}"),
                    ));
                }
            }
        }
    }

    let roots: Vec<&Ordinal> = root.iter().collect();
    for (i, g1) in roots.iter().enumerate() {
        for g2 in &roots[i + 1..] {
            for s in [p, q] {
                let (x, y) = (s.get(g1).expect("root"), s.get(g2).expect("root"));
                if x.intersection(y).any(|v| !c.contains(v)) {
                    return Err(hypothesis(
                        "root-intersections",
                        format!("values shared at {g1} and {g2} leave c"),
                    ));
                }
            }
        }
    }

    let mut r = Condition::new();
    for gamma in root {
        r.touch(gamma.clone());
        for v in p.values_at(gamma).chain(q.values_at(gamma)) {
            r.insert(gamma.clone(), v.clone());
        }
    }
    for alpha in &petals_p {
        r.touch((*alpha).clone());
        for v in p.values_at(alpha) {
            r.insert((*alpha).clone(), v.clone());
        }
    }
    for beta in &petals_q {
        let qb = q.get(beta).expect("dom");
        let reaching: Vec<&Ordinal> = root
            .iter()
            .filter(|g| {
                shared_max(q.get(g).expect("root"), qb).is_some_and(|m| b.contains(&m))
            })
            .collect();
        if reaching.len() > 1 {
            return Err(hypothesis(
                "unique-gamma",
                format!("{} root points meet q({beta}) above c", reaching.len()),
            ));
        }
        r.touch((*beta).clone());
        let extra = reaching.first().map(|g| p.values_at(g)).into_iter().flatten();
        for v in qb.iter().chain(extra) {
            r.insert((*beta).clone(), v.clone());
        }
    }

    let report = validate_condition(&r, &variant.base(), walker)?;
    if let Some(v) = report.violations.first() {
        return Err(hypothesis(
            "construction",
            format!("the amalgam is not a condition: {}", v.detail),
        ));
    }
    if !r.extends(p) || !r.extends(q) {
        return Err(hypothesis("construction", "the amalgam does not extend both inputs"));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csequence::TwoTierSquare;
    use crate::poset::compatible;
    use crate::ordinal::ord;
    use std::sync::Arc;

    fn f3() -> Walker {
        Walker::new(Arc::new(TwoTierSquare::new(ord("w^2")).unwrap()))
    }

    fn c(text: &str) -> Condition {
        Condition::parse_short(text)
    }

    #[test]
    fn empty_root_is_union() {
        let w = f3();
        let (p, q) = (c("w^2+w: 3"), c("w^3+w: w*2"));
        let r = amalgamate_delta_pair(&p, &q, &BTreeSet::new(), &Variant::Q, &w).unwrap();
        assert_eq!(r, p.union(&q));
    }

    #[test]
    fn root_values_are_merged() {
        let w = f3();
        // ρ(ω^2+5, ·) = 4 above it and ρ(ω^2+ω+1, ω^3+ω+2) = ω+1
        let p = c("w^2+5: 2, w*3; w^2+w+1: 2");
        let q = c("w^2+5: 2, w*5; w^3+w+2: 2");
        let root: BTreeSet<Ordinal> = [ord("w^2+5")].into();
        let r = amalgamate_delta_pair(&p, &q, &root, &Variant::Q, &w).unwrap();
        assert!(r.extends(&p) && r.extends(&q));
        assert_eq!(r.get(&ord("w^2+5")).unwrap().len(), 3);
        assert!(compatible(&p, &q, &Variant::Q, &w).unwrap().is_compatible());
        // a root point with large ρ to both petals breaks the min inequality
        let p = c("w*3: 2, w*4; w^2+w+1: 2");
        let q = c("w*3: 2, w*5; w^3+w+2: 2");
        let root: BTreeSet<Ordinal> = [ord("w*3")].into();
        let err = amalgamate_delta_pair(&p, &q, &root, &Variant::Q, &w).unwrap_err();
        assert!(matches!(err, Error::Hypothesis { ref clause, .. } if clause == "min-inequality"));
    }

    #[test]
    fn hypotheses_are_enforced() {
        let w = f3();
        let root: BTreeSet<Ordinal> = [ord("w^3")].into();
        let err = amalgamate_delta_pair(&c("w: 1, 3"), &c("w: 1"), &root, &Variant::Q, &w).unwrap_err();
        assert!(matches!(err, Error::Hypothesis { ref clause, .. } if clause == "conditions"));
        // root mismatch
        let err = amalgamate_delta_pair(&c("w: 1"), &c("w: 1"), &root, &Variant::Q, &w).unwrap_err();
        assert!(matches!(err, Error::Hypothesis { ref clause, .. } if clause == "delta-system"));
        // not isomorphic
        let p = c("w^3: 2; w: 2");
        let q = c("w^3: 2, w*3; w*2: 2");
        let err = amalgamate_delta_pair(&p, &q, &root, &Variant::Q, &w).unwrap_err();
        assert!(matches!(err, Error::Hypothesis { ref clause, .. } if clause == "isomorphism"));
        // b below a
        let root: BTreeSet<Ordinal> = [ord("w^2+5")].into();
        let p = c("w^2+5: 2; w^2+w+1: w*5");
        let q = c("w^2+5: 2; w^3+w+2: w*2");
        let err = amalgamate_delta_pair(&p, &q, &root, &Variant::Q, &w).unwrap_err();
        assert!(matches!(err, Error::Hypothesis { ref clause, .. } if clause == "layout"));
    }
}
