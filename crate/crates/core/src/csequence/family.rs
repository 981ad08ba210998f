use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::club::{Club, Ladder};
use crate::error::{Error, Result};
use crate::ordinal::Ordinal;

/// Where an ordinal sits: successor, small limit, or a limit whose C-set has the
/// full tier order type `Ω` (the stand-in for cofinality ω₁).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CofinalityClass {
    Successor,
    OmegaClass,
    TierClass,
}

/// A C-sequence `α ↦ C_α` defined below `bound`.
///
/// Implementors provide [`club`](CSequence::club); the walk queries are derived
/// from it. Successors follow the convention `C_{α+1} = {α}` and `C_0 = ∅`
/// unless an implementation deliberately overrides them.
pub trait CSequence: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    fn bound(&self) -> &Ordinal;

    /// The tier parameter `Ω`, if the family has one.
    fn tier(&self) -> Option<&Ordinal> {
        None
    }

    fn club(&self, alpha: &Ordinal) -> Result<Club>;

    fn check_bound(&self, alpha: &Ordinal) -> Result<()> {
        if alpha >= self.bound() {
            return Err(Error::OutOfFamilyBound {
                family: self.name(),
                ordinal: alpha.to_string(),
                bound: self.bound().to_string(),
            });
        }
        Ok(())
    }

    /// `min(C_β \ α)` for `α < β`.
    fn c_min_above(&self, beta: &Ordinal, alpha: &Ordinal) -> Result<Ordinal> {
        let club = self.club(beta)?;
        club.min_above(alpha).ok_or_else(|| {
            Error::Precondition(format!(
                "C_{beta} has no element at or above {alpha} (is {alpha} < {beta}?)"
            ))
        })
    }

    /// `otp(C_β ∩ α)` for `α ≤ β`.
    fn c_otp_below(&self, beta: &Ordinal, alpha: &Ordinal) -> Result<Ordinal> {
        Ok(self.club(beta)?.otp_below(alpha))
    }

    /// `Λ(α, β)`: largest limit point of `C_β ∩ (α+1)`, zero if none.
    fn c_lambda(&self, alpha: &Ordinal, beta: &Ordinal) -> Result<Ordinal> {
        Ok(self.club(beta)?.max_limit_point_upto(alpha))
    }

    /// `C_β ∩ [Λ(α,β), α)`, increasing.
    fn c_segment(&self, alpha: &Ordinal, beta: &Ordinal) -> Result<Vec<Ordinal>> {
        let club = self.club(beta)?;
        let lambda = club.max_limit_point_upto(alpha);
        club.segment(&lambda, alpha, beta)
    }

    fn class_of(&self, alpha: &Ordinal) -> Result<CofinalityClass> {
        if alpha.is_successor() {
            return Ok(CofinalityClass::Successor);
        }
        if alpha.is_zero() {
            self.check_bound(alpha)?;
            return Ok(CofinalityClass::OmegaClass);
        }
        let otp = self.club(alpha)?.otp();
        Ok(match self.tier() {
            Some(tier) if &otp == tier => CofinalityClass::TierClass,
            _ => CofinalityClass::OmegaClass,
        })
    }
}

fn conventional(
    family: &dyn CSequence,
    alpha: &Ordinal,
    limit: impl FnOnce() -> Result<Club>,
) -> Result<Club> {
    family.check_bound(alpha)?;
    if alpha.is_zero() {
        Ok(Club::Empty)
    } else if let Some(p) = alpha.pred() {
        Ok(Club::Singleton { element: p })
    } else {
        limit()
    }
}

/// F1: canonical fundamental sequences; every limit `C_α` has type ω.
#[derive(Debug, Clone)]
pub struct CanonicalFamily {
    bound: Ordinal,
}

impl CanonicalFamily {
    pub fn new(bound: Ordinal) -> Self {
        CanonicalFamily { bound }
    }
}

impl CSequence for CanonicalFamily {
    fn name(&self) -> String {
        "f1".into()
    }
    fn bound(&self) -> &Ordinal {
        &self.bound
    }
    fn club(&self, alpha: &Ordinal) -> Result<Club> {
        conventional(self, alpha, || {
            Ok(Club::Ladder {
                ladder: Ladder::Canonical {
                    target: alpha.clone(),
                },
            })
        })
    }
}

/// F2: full intervals `C_α = (0, α)`. Coherent, but `otp(C_α) = α`.
#[derive(Debug, Clone)]
pub struct FullIntervalFamily {
    bound: Ordinal,
    tier: Option<Ordinal>,
}

impl FullIntervalFamily {
    pub fn new(bound: Ordinal, tier: Option<Ordinal>) -> Self {
        FullIntervalFamily { bound, tier }
    }
}

impl CSequence for FullIntervalFamily {
    fn name(&self) -> String {
        "f2".into()
    }
    fn bound(&self) -> &Ordinal {
        &self.bound
    }
    fn tier(&self) -> Option<&Ordinal> {
        self.tier.as_ref()
    }
    fn club(&self, alpha: &Ordinal) -> Result<Club> {
        conventional(self, alpha, || {
            Ok(Club::Interval {
                base: Ordinal::zero(),
                len: alpha.clone(),
            })
        })
    }
}

/// F3, the two-tier square family with parameter `Ω = ω^e`, defined below `Ω·Ω`:
///
/// * `C_{Ω·q + r} = {Ω·q + t : 0 < t < r}` for limit `r < Ω`,
/// * `C_{Ω·(q+1)} = {Ω·q + t : 0 < t < Ω}`,
/// * `C_{Ω·q} = {Ω·q[n] + 1 : n < ω}` for limit `q`.
#[derive(Debug, Clone)]
pub struct TwoTierSquare {
    omega: Ordinal,
    tier_exp: Ordinal,
    bound: Ordinal,
}

impl TwoTierSquare {
    pub fn new(omega: Ordinal) -> Result<Self> {
        if !omega.is_omega_power() || omega.is_finite() {
            return Err(Error::NotOmegaPower(omega.to_string()));
        }
        let tier_exp = omega.leading_exponent().expect("power").clone();
        let bound = Ordinal::omega_pow(tier_exp.add(&tier_exp));
        Ok(TwoTierSquare {
            omega,
            tier_exp,
            bound,
        })
    }

    pub fn omega(&self) -> &Ordinal {
        &self.omega
    }

    /// `Ω · q`.
    pub fn tier_multiple(&self, q: &Ordinal) -> Ordinal {
        q.mul_omega_pow_left(&self.tier_exp)
    }
}

impl CSequence for TwoTierSquare {
    fn name(&self) -> String {
        format!("f3[{}]", self.omega)
    }
    fn bound(&self) -> &Ordinal {
        &self.bound
    }
    fn tier(&self) -> Option<&Ordinal> {
        Some(&self.omega)
    }
    fn club(&self, alpha: &Ordinal) -> Result<Club> {
        conventional(self, alpha, || {
            let (q, r) = alpha.split_two_tier(&self.omega)?;
            Ok(if !r.is_zero() {
                Club::Interval {
                    base: self.tier_multiple(&q),
                    len: r,
                }
            } else if let Some(q0) = q.pred() {
                Club::Interval {
                    base: self.tier_multiple(&q0),
                    len: self.omega.clone(),
                }
            } else {
                Club::Ladder {
                    ladder: Ladder::TierSteps {
                        tier_exp: self.tier_exp.clone(),
                        q,
                    },
                }
            })
        })
    }
}

/// A family given by explicit overrides on top of an optional base family.
/// Ordinals without an override fall back to the base, or to the successor
/// convention when there is no base.
#[derive(Debug, Clone)]
pub struct OverlayFamily {
    name: String,
    base: Option<Arc<dyn CSequence>>,
    bound: Ordinal,
    overrides: BTreeMap<Ordinal, Club>,
}

impl OverlayFamily {
    pub fn new(name: impl Into<String>, base: Option<Arc<dyn CSequence>>, bound: Ordinal) -> Self {
        OverlayFamily {
            name: name.into(),
            base,
            bound,
            overrides: BTreeMap::new(),
        }
    }

    /// Wraps `base` with the same bound.
    pub fn over(base: Arc<dyn CSequence>) -> Self {
        let bound = base.bound().clone();
        let name = format!("{}+overrides", base.name());
        OverlayFamily::new(name, Some(base), bound)
    }

    pub fn set(&mut self, alpha: Ordinal, club: Club) -> &mut Self {
        self.overrides.insert(alpha, club);
        self
    }

    pub fn overrides(&self) -> &BTreeMap<Ordinal, Club> {
        &self.overrides
    }
}

impl CSequence for OverlayFamily {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn bound(&self) -> &Ordinal {
        &self.bound
    }
    fn tier(&self) -> Option<&Ordinal> {
        self.base.as_ref().and_then(|b| b.tier())
    }
    fn club(&self, alpha: &Ordinal) -> Result<Club> {
        self.check_bound(alpha)?;
        if let Some(c) = self.overrides.get(alpha) {
            return Ok(c.clone());
        }
        match &self.base {
            Some(base) => base.club(alpha),
            None => conventional(self, alpha, || {
                Err(Error::MissingSequence {
                    family: self.name.clone(),
                    ordinal: alpha.to_string(),
                })
            }),
        }
    }
}

/// Builtin family selection as used by configuration and the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    F1 { bound: Ordinal },
    F2 { bound: Ordinal, tier: Option<Ordinal> },
    F3 { omega: Ordinal },
}

impl FamilySpec {
    pub fn build(&self) -> Result<Arc<dyn CSequence>> {
        Ok(match self {
            FamilySpec::F1 { bound } => Arc::new(CanonicalFamily::new(bound.clone())),
            FamilySpec::F2 { bound, tier } => {
                Arc::new(FullIntervalFamily::new(bound.clone(), tier.clone()))
            }
            FamilySpec::F3 { omega } => Arc::new(TwoTierSquare::new(omega.clone())?),
        })
    }
}
