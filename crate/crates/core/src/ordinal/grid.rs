use std::collections::HashMap;

use num_bigint::BigUint;

use super::{Ordinal, Term};
use crate::error::{Error, Result};

/// Finite sweep of the ordinals below a bound: every CNF ordinal `< bound` whose
/// coefficients are at most `cap` and whose exponents are themselves grid
/// ordinals of nesting depth at most `depth`.
///
/// Below `ω^k` with `depth ≥ 1` this is exactly `{ω^(k-1)·c₁ + … + c_k : cᵢ ≤ cap}`.
#[derive(Debug, Clone)]
pub struct OrdinalGrid {
    bound: Ordinal,
    cap: u64,
    points: Vec<Ordinal>,
    index: HashMap<Ordinal, usize>,
}

pub const DEFAULT_MAX_POINTS: usize = 200_000;

impl OrdinalGrid {
    pub fn new(bound: &Ordinal, cap: u64, depth: u32) -> Result<Self> {
        Self::with_limit(bound, cap, depth, DEFAULT_MAX_POINTS)
    }

    pub fn with_limit(bound: &Ordinal, cap: u64, depth: u32, max_points: usize) -> Result<Self> {
        if cap == 0 {
            return Err(Error::Config("coefficient cap must be positive".into()));
        }
        let mut points = enumerate_below(bound, cap, depth, max_points)?;
        points.sort();
        points.dedup();
        let index = points
            .iter()
            .enumerate()
            .map(|(i, o)| (o.clone(), i))
            .collect();
        Ok(OrdinalGrid {
            bound: bound.clone(),
            cap,
            points,
            index,
        })
    }

    /// The explicit finite grid `{0, 1, …, n-1}`.
    pub fn finite(n: u64) -> Self {
        let points: Vec<Ordinal> = (0..n).map(Ordinal::from).collect();
        let index = points
            .iter()
            .enumerate()
            .map(|(i, o)| (o.clone(), i))
            .collect();
        OrdinalGrid {
            bound: Ordinal::from(n),
            cap: n,
            points,
            index,
        }
    }

    pub fn bound(&self) -> &Ordinal {
        &self.bound
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// Points in increasing order.
    pub fn points(&self) -> &[Ordinal] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, o: &Ordinal) -> Option<usize> {
        self.index.get(o).copied()
    }

    /// Index of the first point `≥ o`.
    pub fn lower_bound(&self, o: &Ordinal) -> usize {
        self.points.partition_point(|p| p < o)
    }
}

fn enumerate_below(bound: &Ordinal, cap: u64, depth: u32, max_points: usize) -> Result<Vec<Ordinal>> {
    if bound.is_zero() {
        return Ok(Vec::new());
    }
    // candidate exponents: everything up to the bound's leading exponent
    let lead = bound.leading_exponent().expect("nonzero").clone();
    let mut exponents: Vec<Ordinal> = if depth == 0 || lead.is_zero() {
        vec![Ordinal::zero()]
    } else {
        let mut e = enumerate_below(&lead.succ(), cap, depth - 1, max_points)?;
        e.sort();
        e.dedup();
        e
    };
    exponents.retain(|e| e <= &lead);
    exponents.reverse();

    let mut out = Vec::new();
    let mut prefix = Vec::new();
    extend(&exponents, 0, cap, bound, &mut prefix, &mut out, max_points)?;
    Ok(out)
}

fn extend(
    exponents: &[Ordinal],
    from: usize,
    cap: u64,
    bound: &Ordinal,
    prefix: &mut Vec<Term>,
    out: &mut Vec<Ordinal>,
    max_points: usize,
) -> Result<()> {
    let current = Ordinal::from_normal_terms(prefix.clone());
    if &current >= bound {
        return Ok(());
    }
    if out.len() >= max_points {
        return Err(Error::EnumerationCap { cap: max_points });
    }
    out.push(current);
    for i in from..exponents.len() {
        for c in 1..=cap {
            prefix.push(Term {
                exponent: exponents[i].clone(),
                coefficient: BigUint::from(c),
            });
            extend(exponents, i + 1, cap, bound, prefix, out, max_points)?;
            prefix.pop();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::ord;

    #[test]
    fn grid_below_omega_four() {
        let g = OrdinalGrid::new(&ord("w^4"), 4, 1).unwrap();
        assert_eq!(g.len(), 625);
        assert_eq!(g.points()[0], ord("0"));
        assert_eq!(g.points()[624], ord("w^3*4+w^2*4+w*4+4"));
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(g.index_of(&ord("w+1")), Some(6));
    }

    #[test]
    fn finite_bound() {
        let g = OrdinalGrid::new(&ord("5"), 10, 1).unwrap();
        assert_eq!(g.len(), 5);
        let g = OrdinalGrid::new(&ord("w*2+1"), 2, 1).unwrap();
        // 0,1,2,w,w+1,w+2,w*2
        assert_eq!(g.len(), 7);
    }

    #[test]
    fn nested_exponents() {
        let g = OrdinalGrid::new(&ord("w^w"), 2, 2).unwrap();
        assert!(g.index_of(&ord("w^2*2+w+1")).is_some());
        assert!(g.points().iter().all(|p| p < &ord("w^w")));
    }

    #[test]
    fn cap_is_enforced() {
        let err = OrdinalGrid::with_limit(&ord("w^4"), 4, 1, 100).unwrap_err();
        assert!(matches!(err, Error::EnumerationCap { .. }));
    }
}
