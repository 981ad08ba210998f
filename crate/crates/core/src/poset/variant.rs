use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::csequence::{CSequence, CofinalityClass};
use crate::error::Result;
use crate::ordinal::Ordinal;

/// Which poset a condition is judged in.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Variant {
    /// Weak cap `max(p(α) ∩ p(β)) ≤ ρ(α, β)`.
    Q,
    /// Strict cap `max(p(α) ∩ p(β)) < ρ(α, β)`.
    P,
    /// `Q` restricted to domains without tier-class points.
    Qc,
    /// `Q` restricted to domains inside `A`.
    Qa { set: BTreeSet<Ordinal> },
    /// `Q` restricted to domains below `μ`.
    Qmu { mu: Ordinal },
}

impl Variant {
    pub fn strict(&self) -> bool {
        matches!(self, Variant::P)
    }

    /// The unrestricted poset with the same cap.
    pub fn base(&self) -> Variant {
        if self.strict() {
            Variant::P
        } else {
            Variant::Q
        }
    }

    /// Whether `alpha` may appear in the domain.
    pub fn domain_ok(&self, alpha: &Ordinal, family: &dyn CSequence) -> Result<bool> {
        Ok(match self {
            Variant::Q | Variant::P => true,
            Variant::Qc => family.class_of(alpha)? != CofinalityClass::TierClass,
            Variant::Qa { set } => set.contains(alpha),
            Variant::Qmu { mu } => alpha < mu,
        })
    }

    /// `shared` respects the cap `rho`.
    pub fn cap_holds(&self, shared: &Ordinal, rho: &Ordinal) -> bool {
        if self.strict() {
            shared < rho
        } else {
            shared <= rho
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Q => write!(f, "Q"),
            Variant::P => write!(f, "P"),
            Variant::Qc => write!(f, "Qc"),
            Variant::Qa { set } => {
                let items: Vec<String> = set.iter().map(|x| x.to_string()).collect();
                write!(f, "QA{{{}}}", items.join(","))
            }
            Variant::Qmu { mu } => write!(f, "Qmu[{mu}]"),
        }
    }
}

impl FromStr for Variant {
    type Err = String;

    /// `q`, `p`, `qc`, `qmu:ORD`, `qa:ORD,ORD,...`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let lower = s.trim().to_ascii_lowercase();
        let ordinal = |t: &str| t.trim().parse::<Ordinal>().map_err(|e| e.to_string());
        match lower.split_once(':') {
            None => match lower.as_str() {
                "q" => Ok(Variant::Q),
                "p" => Ok(Variant::P),
                "qc" => Ok(Variant::Qc),
                _ => Err(format!("unknown variant `{s}`")),
            },
            Some(("qmu", mu)) => Ok(Variant::Qmu { mu: ordinal(mu)? }),
            Some(("qa", set)) => Ok(Variant::Qa {
                set: set
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(ordinal)
                    .collect::<std::result::Result<_, _>>()?,
            }),
            Some(_) => Err(format!("unknown variant `{s}`")),
        }
    }
}
