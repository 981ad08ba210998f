//! Ordinals below ε₀ in Cantor normal form.
//!
//! An [`Ordinal`] is a strictly decreasing sequence of `ω^exponent · coefficient`
//! terms. Values are immutable and cheap to clone (the term list is shared).

mod grid;
mod notation;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

pub use grid::OrdinalGrid;
pub use notation::ParseOrdinalError;

use crate::error::{Error, Result};

/// One Cantor-normal-form summand `ω^exponent · coefficient`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub exponent: Ordinal,
    pub coefficient: BigUint,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ordinal(Arc<[Term]>);

impl Default for Ordinal {
    fn default() -> Self {
        Ordinal::zero()
    }
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal(Arc::from(Vec::new()))
    }

    pub fn one() -> Self {
        Ordinal::from(1u64)
    }

    pub fn omega() -> Self {
        Ordinal::omega_pow(Ordinal::one())
    }

    /// `ω^e`.
    pub fn omega_pow(e: Ordinal) -> Self {
        Ordinal::term(e, BigUint::one())
    }

    /// `ω^e · c`; zero when `c` is zero.
    pub fn term(exponent: Ordinal, coefficient: BigUint) -> Self {
        if coefficient.is_zero() {
            return Ordinal::zero();
        }
        Ordinal(Arc::from(vec![Term {
            exponent,
            coefficient,
        }]))
    }

    /// Builds an ordinal from arbitrary terms by summing them left to right, so
    /// non-normal input is absorbed exactly like ordinal addition would.
    pub fn from_terms<I: IntoIterator<Item = Term>>(terms: I) -> Self {
        terms.into_iter().fold(Ordinal::zero(), |acc, t| {
            acc.add(&Ordinal::term(t.exponent, t.coefficient))
        })
    }

    fn from_normal_terms(terms: Vec<Term>) -> Self {
        debug_assert!(is_normal(&terms));
        Ordinal(Arc::from(terms))
    }

    pub fn terms(&self) -> &[Term] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|t| t.exponent.is_zero())
    }

    pub fn as_u64(&self) -> Option<u64> {
        match &*self.0 {
            [] => Some(0),
            [t] if t.exponent.is_zero() => t.coefficient.to_u64(),
            _ => None,
        }
    }

    pub fn is_successor(&self) -> bool {
        self.0.last().is_some_and(|t| t.exponent.is_zero())
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && !self.is_successor()
    }

    /// `α + 1`.
    pub fn succ(&self) -> Self {
        self.add(&Ordinal::one())
    }

    /// The immediate predecessor of a successor ordinal.
    pub fn pred(&self) -> Option<Self> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.0.to_vec();
        let last = terms.last_mut().expect("successor has a term");
        last.coefficient -= 1u32;
        if last.coefficient.is_zero() {
            terms.pop();
        }
        Some(Ordinal::from_normal_terms(terms))
    }

    /// The finite tail: `α = λ + n` with `λ` zero or a limit.
    pub fn finite_part(&self) -> BigUint {
        match self.0.last() {
            Some(t) if t.exponent.is_zero() => t.coefficient.clone(),
            _ => BigUint::zero(),
        }
    }

    /// Largest ordinal `≤ self` that is zero or a limit.
    pub fn limit_part(&self) -> Self {
        if self.is_successor() {
            Ordinal::from_normal_terms(self.0[..self.0.len() - 1].to_vec())
        } else {
            self.clone()
        }
    }

    pub fn leading_exponent(&self) -> Option<&Ordinal> {
        self.0.first().map(|t| &t.exponent)
    }

    pub fn last_exponent(&self) -> Option<&Ordinal> {
        self.0.last().map(|t| &t.exponent)
    }

    /// Power of ω (`ω^e` with coefficient one), i.e. additively indecomposable.
    pub fn is_omega_power(&self) -> bool {
        matches!(&*self.0, [t] if t.coefficient.is_one())
    }

    /// Ordinal sum `self + other`.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some(head) = other.0.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> = Vec::with_capacity(self.0.len() + other.0.len());
        let mut merged = head.coefficient.clone();
        for t in self.0.iter() {
            match t.exponent.cmp(&head.exponent) {
                Ordering::Greater => terms.push(t.clone()),
                Ordering::Equal => {
                    merged += &t.coefficient;
                    break;
                }
                Ordering::Less => break,
            }
        }
        terms.push(Term {
            exponent: head.exponent.clone(),
            coefficient: merged,
        });
        terms.extend(other.0[1..].iter().cloned());
        Ordinal::from_normal_terms(terms)
    }

    /// Left subtraction: the unique `x` with `lower + x = self`, if `lower ≤ self`.
    pub fn sub_left(&self, lower: &Ordinal) -> Option<Ordinal> {
        if lower > self {
            return None;
        }
        for (i, (a, b)) in lower.0.iter().zip(self.0.iter()).enumerate() {
            if a == b {
                continue;
            }
            if a.exponent == b.exponent {
                // same exponent, larger coefficient in self
                let mut rest = vec![Term {
                    exponent: b.exponent.clone(),
                    coefficient: &b.coefficient - &a.coefficient,
                }];
                rest.extend(self.0[i + 1..].iter().cloned());
                return Some(Ordinal::from_normal_terms(rest));
            }
            return Some(Ordinal::from_normal_terms(self.0[i..].to_vec()));
        }
        Some(Ordinal::from_normal_terms(
            self.0[lower.0.len().min(self.0.len())..].to_vec(),
        ))
    }

    /// `ω^e · self` (left multiplication by a power of ω).
    pub fn mul_omega_pow_left(&self, e: &Ordinal) -> Ordinal {
        let terms = self
            .0
            .iter()
            .map(|t| Term {
                exponent: e.add(&t.exponent),
                coefficient: t.coefficient.clone(),
            })
            .collect();
        Ordinal::from_normal_terms(terms)
    }

    /// `self · n` for a natural number `n`.
    pub fn mul_nat(&self, n: u64) -> Ordinal {
        if n == 0 || self.is_zero() {
            return Ordinal::zero();
        }
        let mut terms = self.0.to_vec();
        terms[0].coefficient *= n;
        Ordinal::from_normal_terms(terms)
    }

    /// Canonical fundamental sequence `α[n]` of a limit ordinal. Strictly
    /// increasing in `n` with supremum `α`.
    pub fn fundamental(&self, n: u64) -> Option<Ordinal> {
        if !self.is_limit() {
            return None;
        }
        let mut terms = self.0.to_vec();
        let last = terms.pop().expect("limit has a term");
        let e = last.exponent;
        let c = last.coefficient - 1u32;
        if !c.is_zero() {
            terms.push(Term {
                exponent: e.clone(),
                coefficient: c,
            });
        }
        let base = Ordinal::from_normal_terms(terms);
        let step = match e.pred() {
            Some(e_pred) => Ordinal::term(e_pred, BigUint::from(n)),
            None => Ordinal::omega_pow(e.fundamental(n)?),
        };
        Some(base.add(&step))
    }

    /// Writes `self = omega · q + r` with `r < omega`, for `omega` a power of ω
    /// and `self < omega · omega`.
    pub fn split_two_tier(&self, omega: &Ordinal) -> Result<(Ordinal, Ordinal)> {
        if !omega.is_omega_power() {
            return Err(Error::NotOmegaPower(omega.to_string()));
        }
        let e = omega.leading_exponent().expect("power of omega");
        let square = Ordinal::omega_pow(e.add(e));
        if self >= &square {
            return Err(Error::OutOfRange {
                value: self.to_string(),
                bound: square.to_string(),
            });
        }
        let mut q = Vec::new();
        let mut r = Vec::new();
        for t in self.0.iter() {
            if &t.exponent >= e {
                q.push(Term {
                    exponent: t.exponent.sub_left(e).expect("exponent >= e"),
                    coefficient: t.coefficient.clone(),
                });
            } else {
                r.push(t.clone());
            }
        }
        Ok((Ordinal::from_normal_terms(q), Ordinal::from_normal_terms(r)))
    }
}

fn is_normal(terms: &[Term]) -> bool {
    terms.iter().all(|t| !t.coefficient.is_zero())
        && terms.windows(2).all(|w| w[0].exponent > w[1].exponent)
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            let ord = a
                .exponent
                .cmp(&b.exponent)
                .then_with(|| a.coefficient.cmp(&b.coefficient));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::Add for &Ordinal {
    type Output = Ordinal;
    fn add(self, rhs: &Ordinal) -> Ordinal {
        Ordinal::add(self, rhs)
    }
}

impl std::ops::Add for Ordinal {
    type Output = Ordinal;
    fn add(self, rhs: Ordinal) -> Ordinal {
        Ordinal::add(&self, &rhs)
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::term(Ordinal::zero(), BigUint::from(n))
    }
}

impl From<BigUint> for Ordinal {
    fn from(n: BigUint) -> Self {
        Ordinal::term(Ordinal::zero(), n)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        notation::write_ordinal(self, f)
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ordinal({self})")
    }
}

impl serde::Serialize for Ordinal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Ordinal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand used heavily in tests and examples.
pub fn ord(text: &str) -> Ordinal {
    text.parse()
        .unwrap_or_else(|e| panic!("bad ordinal literal {text:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn addition_absorbs_smaller_terms() {
        assert_eq!(ord("3") + ord("w"), ord("w"));
        assert_eq!(ord("w") + ord("3"), ord("w+3"));
        assert_eq!(ord("w^2+w") + ord("w*5"), ord("w^2+w*6"));
        assert_eq!(ord("w*2+7") + ord("w^2"), ord("w^2"));
    }

    #[test]
    fn comparison_is_lexicographic() {
        assert!(ord("w") > ord("1000000"));
        assert!(ord("w^2") > ord("w*99+5"));
        assert!(ord("w^w") > ord("w^5*3"));
        assert!(ord("w+1") > ord("w"));
        assert!(ord("0") < ord("1"));
    }

    #[test]
    fn left_subtraction_inverts_addition() {
        let a = ord("w^2+w");
        let b = ord("w^2*2");
        let x = b.sub_left(&a).unwrap();
        assert_eq!(x, ord("w^2"));
        assert_eq!(a.add(&x), b);
        assert_eq!(ord("w*3+2").sub_left(&ord("w*3")).unwrap(), ord("2"));
        assert_eq!(ord("w+5").sub_left(&ord("3")).unwrap(), ord("w+5"));
        assert!(ord("3").sub_left(&ord("w")).is_none());
    }

    #[test]
    fn successor_structure() {
        assert!(ord("w+1").is_successor());
        assert!(ord("w^2").is_limit());
        assert!(!ord("0").is_limit());
        assert_eq!(ord("w*2+1").pred().unwrap(), ord("w*2"));
        assert_eq!(ord("w^2+w+3").limit_part(), ord("w^2+w"));
    }

    #[test]
    fn fundamental_sequences() {
        assert_eq!(ord("w").fundamental(5).unwrap(), ord("5"));
        assert_eq!(ord("w*2").fundamental(3).unwrap(), ord("w+3"));
        assert_eq!(ord("w^2").fundamental(4).unwrap(), ord("w*4"));
        assert_eq!(ord("w^w").fundamental(3).unwrap(), ord("w^3"));
        assert_eq!(ord("w^w").fundamental(0).unwrap(), ord("1"));
        assert!(ord("w+1").fundamental(0).is_none());
    }

    #[test]
    fn two_tier_split() {
        let omega = ord("w^2");
        assert_eq!(
            ord("w^2*3+w*2").split_two_tier(&omega).unwrap(),
            (ord("3"), ord("w*2"))
        );
        assert_eq!(ord("5").split_two_tier(&omega).unwrap(), (ord("0"), ord("5")));
        assert_eq!(ord("w^2").split_two_tier(&omega).unwrap(), (ord("1"), ord("0")));
        assert_eq!(
            ord("w^3*2+w^2+4").split_two_tier(&omega).unwrap(),
            (ord("w*2+1"), ord("4"))
        );
        assert!(ord("w^4").split_two_tier(&omega).is_err());
        assert!(ord("w").split_two_tier(&ord("w*2")).is_err());
    }

    #[test]
    fn left_multiplication_by_omega_power() {
        let q = ord("w+3");
        assert_eq!(q.mul_omega_pow_left(&ord("2")), ord("w^3+w^2*3"));
        assert_eq!(ord("w").mul_nat(3), ord("w*3"));
        assert_eq!(ord("w^2+w").mul_nat(2), ord("w^2*2+w"));
    }
}
