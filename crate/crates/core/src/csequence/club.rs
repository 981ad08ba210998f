use serde::Serialize;

use crate::error::{Error, Result};
use crate::ordinal::Ordinal;

/// Largest finite segment `C_β ∩ [Λ, α)` accepted before the family is declared broken.
pub const SEGMENT_LIMIT: usize = 1 << 16;

/// A strictly increasing ω-sequence with no limit points below its supremum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ladder {
    /// `{ α[n] : n < ω }` for the canonical fundamental sequence of `target`.
    Canonical { target: Ordinal },
    /// `{ ω^tier_exp · q[n] + 1 : n < ω }`.
    TierSteps { tier_exp: Ordinal, q: Ordinal },
}

impl Ladder {
    pub fn at(&self, n: u64) -> Ordinal {
        match self {
            Ladder::Canonical { target } => target.fundamental(n).expect("limit target"),
            Ladder::TierSteps { tier_exp, q } => q
                .fundamental(n)
                .expect("limit q")
                .mul_omega_pow_left(tier_exp)
                .succ(),
        }
    }

    pub fn sup(&self) -> Ordinal {
        match self {
            Ladder::Canonical { target } => target.clone(),
            Ladder::TierSteps { tier_exp, q } => q.mul_omega_pow_left(tier_exp),
        }
    }

    /// Least `n` with `at(n) ≥ alpha`; `None` when `alpha ≥ sup`.
    pub fn first_at_least(&self, alpha: &Ordinal) -> Option<u64> {
        if alpha >= &self.sup() {
            return None;
        }
        if &self.at(0) >= alpha {
            return Some(0);
        }
        let mut hi: u64 = 1;
        while &self.at(hi) < alpha {
            hi = hi.checked_mul(2)?;
        }
        let mut lo = hi / 2; // at(lo) < alpha <= at(hi)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if &self.at(mid) < alpha {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(hi)
    }
}

/// One set `C_α`, in a representation that answers the walk queries exactly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Club {
    Empty,
    Singleton { element: Ordinal },
    Ladder { ladder: Ladder },
    /// `{ base + t : 0 < t < len }`.
    Interval { base: Ordinal, len: Ordinal },
    /// Explicit finite set, strictly increasing.
    Finite { elements: Vec<Ordinal> },
}

impl Club {
    pub fn finite(mut elements: Vec<Ordinal>) -> Club {
        elements.sort();
        elements.dedup();
        match elements.len() {
            0 => Club::Empty,
            1 => Club::Singleton {
                element: elements.pop().expect("one element"),
            },
            _ => Club::Finite { elements },
        }
    }

    pub fn contains(&self, x: &Ordinal) -> bool {
        match self {
            Club::Empty => false,
            Club::Singleton { element } => element == x,
            Club::Ladder { ladder } => ladder
                .first_at_least(x)
                .is_some_and(|n| &ladder.at(n) == x),
            Club::Interval { base, len } => {
                x > base && x.sub_left(base).is_some_and(|t| &t < len)
            }
            Club::Finite { elements } => elements.binary_search(x).is_ok(),
        }
    }

    /// Supremum of the set (for a club in `α`, this is `α`).
    pub fn sup(&self) -> Ordinal {
        match self {
            Club::Empty => Ordinal::zero(),
            Club::Singleton { element } => element.succ(),
            Club::Ladder { ladder } => ladder.sup(),
            Club::Interval { base, len } => base.add(len),
            Club::Finite { elements } => elements.last().expect("nonempty").succ(),
        }
    }

    /// Order type of the whole set.
    pub fn otp(&self) -> Ordinal {
        match self {
            Club::Empty => Ordinal::zero(),
            Club::Singleton { .. } => Ordinal::one(),
            Club::Ladder { .. } => Ordinal::omega(),
            Club::Interval { len, .. } => interval_type(len),
            Club::Finite { elements } => Ordinal::from(elements.len() as u64),
        }
    }

    /// `min(C \ α)`, or `None` if every element is below `α`.
    pub fn min_above(&self, alpha: &Ordinal) -> Option<Ordinal> {
        match self {
            Club::Empty => None,
            Club::Singleton { element } => (element >= alpha).then(|| element.clone()),
            Club::Ladder { ladder } => ladder.first_at_least(alpha).map(|n| ladder.at(n)),
            Club::Interval { base, len } => {
                let first = base.succ();
                if alpha <= &first {
                    Some(first)
                } else if alpha < &base.add(len) {
                    Some(alpha.clone())
                } else {
                    None
                }
            }
            Club::Finite { elements } => {
                let i = elements.partition_point(|x| x < alpha);
                elements.get(i).cloned()
            }
        }
    }

    /// `otp(C ∩ α)`.
    pub fn otp_below(&self, alpha: &Ordinal) -> Ordinal {
        match self {
            Club::Empty => Ordinal::zero(),
            Club::Singleton { element } => {
                if element < alpha {
                    Ordinal::one()
                } else {
                    Ordinal::zero()
                }
            }
            Club::Ladder { ladder } => match ladder.first_at_least(alpha) {
                Some(n) => Ordinal::from(n),
                None => Ordinal::omega(),
            },
            Club::Interval { base, len } => {
                if alpha <= &base.succ() {
                    return Ordinal::zero();
                }
                let t = alpha.sub_left(base).expect("alpha > base");
                interval_type(if &t < len { &t } else { len })
            }
            Club::Finite { elements } => {
                Ordinal::from(elements.partition_point(|x| x < alpha) as u64)
            }
        }
    }

    pub fn is_limit_point(&self, x: &Ordinal) -> bool {
        match self {
            Club::Interval { base, len } => {
                x > base
                    && x.sub_left(base)
                        .is_some_and(|t| t.is_limit() && &t < len)
            }
            _ => false,
        }
    }

    /// `Λ`: the largest limit point of `C ∩ (α + 1)`, or zero when there is none.
    /// Only meaningful for `α` below the supremum of the set.
    pub fn max_limit_point_upto(&self, alpha: &Ordinal) -> Ordinal {
        match self {
            Club::Interval { base, len } => {
                if alpha <= base {
                    return Ordinal::zero();
                }
                let t = alpha.sub_left(base).expect("alpha > base");
                if &t >= len {
                    return Ordinal::zero();
                }
                let lim = t.limit_part();
                if lim.is_zero() {
                    Ordinal::zero()
                } else {
                    base.add(&lim)
                }
            }
            _ => Ordinal::zero(),
        }
    }

    /// `C ∩ [lower, α)` in increasing order; errors past [`SEGMENT_LIMIT`] points.
    pub fn segment(&self, lower: &Ordinal, alpha: &Ordinal, beta: &Ordinal) -> Result<Vec<Ordinal>> {
        let too_big = || Error::InfiniteSegment {
            alpha: alpha.to_string(),
            beta: beta.to_string(),
            lambda: lower.to_string(),
            limit: SEGMENT_LIMIT,
        };
        match self {
            Club::Empty => Ok(Vec::new()),
            Club::Singleton { element } => Ok(if element >= lower && element < alpha {
                vec![element.clone()]
            } else {
                Vec::new()
            }),
            Club::Finite { elements } => Ok(elements
                .iter()
                .filter(|x| *x >= lower && *x < alpha)
                .cloned()
                .collect()),
            Club::Ladder { ladder } => {
                let start = ladder.first_at_least(lower).unwrap_or(u64::MAX);
                let end = ladder.first_at_least(alpha).ok_or_else(too_big)?;
                if end <= start {
                    return Ok(Vec::new());
                }
                if (end - start) as usize > SEGMENT_LIMIT {
                    return Err(too_big());
                }
                Ok((start..end).map(|n| ladder.at(n)).collect())
            }
            Club::Interval { base, len } => {
                let sup = base.add(len);
                let hi = if alpha < &sup { alpha.clone() } else { sup };
                let first = base.succ();
                let lo = if lower > &first { lower.clone() } else { first };
                if lo >= hi {
                    return Ok(Vec::new());
                }
                // lo and hi must share their limit part for the segment to be finite
                let lo_t = lo.sub_left(base).expect("lo > base");
                let hi_t = hi.sub_left(base).expect("hi > base");
                if lo_t.limit_part() != hi_t.limit_part() {
                    return Err(too_big());
                }
                let count = hi_t.finite_part() - lo_t.finite_part();
                let count: usize = num_traits::ToPrimitive::to_usize(&count)
                    .filter(|c| *c <= SEGMENT_LIMIT)
                    .ok_or_else(too_big)?;
                let mut out = Vec::with_capacity(count);
                let mut x = lo;
                for _ in 0..count {
                    let next = x.succ();
                    out.push(x);
                    x = next;
                }
                Ok(out)
            }
        }
    }

    /// `C ∩ γ` for a limit point `γ`, in the same representation.
    pub fn truncate(&self, gamma: &Ordinal) -> Option<Club> {
        match self {
            Club::Interval { base, .. } if self.is_limit_point(gamma) => Some(Club::Interval {
                base: base.clone(),
                len: gamma.sub_left(base).expect("gamma > base"),
            }),
            _ => None,
        }
    }

    pub fn max_element_below(&self, alpha: &Ordinal) -> Option<Ordinal> {
        match self {
            Club::Empty => None,
            Club::Singleton { element } => (element < alpha).then(|| element.clone()),
            Club::Finite { elements } => {
                let i = elements.partition_point(|x| x < alpha);
                i.checked_sub(1).map(|i| elements[i].clone())
            }
            Club::Ladder { ladder } => match ladder.first_at_least(alpha) {
                Some(0) => None,
                Some(n) => Some(ladder.at(n - 1)),
                None => None, // unbounded below its sup
            },
            Club::Interval { base, len } => {
                if alpha <= &base.succ() {
                    return None;
                }
                let t = alpha.sub_left(base).expect("alpha > base");
                // no maximum when t is a limit; t = len is the excluded base
                if &t >= len || t.is_limit() {
                    None
                } else {
                    Some(alpha.pred().expect("successor"))
                }
            }
        }
    }
}

/// Order type of `{t : 0 < t < len}`.
fn interval_type(len: &Ordinal) -> Ordinal {
    match len.as_u64() {
        Some(0) => Ordinal::zero(),
        Some(n) => Ordinal::from(n - 1),
        None if len.is_finite() => Ordinal::from(len.finite_part() - 1u32),
        None => len.clone(),
    }
}
