//! Walks from `β` down to `α` and the function `ρ`.
//!
//! `ρ(α, α) = 0` and for `α < β`
//!
//! ```text
//! ρ(α, β) = max{ otp(C_β ∩ α), ρ(α, min(C_β \ α)), ρ(ξ, α) : ξ ∈ C_β ∩ [Λ(α, β), α) }
//! ```
//!
//! The lower trace is not part of the recursion. It follows the usual definition
//! from the walks literature: the running maxima of `max(C_{βᵢ} ∩ α)` along the
//! upper trace, skipping the steps where that set is empty or has no maximum.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use dashmap::DashMap;
use serde::{Deserialize, Serialize};

use crate::csequence::CSequence;
use crate::error::{Error, Result};
use crate::ordinal::Ordinal;

pub const DEFAULT_DEPTH_BUDGET: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkTrace {
    pub alpha: Ordinal,
    pub beta: Ordinal,
    pub upper: Vec<Ordinal>,
    pub lower: Vec<Ordinal>,
    /// `Λ(α, βᵢ)` for every step `βᵢ > α` of the upper trace.
    pub lambdas: Vec<Ordinal>,
    pub rho: Ordinal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub entries: usize,
    pub hits: u64,
    pub misses: u64,
}

/// Computes walks over one family. The `ρ` memo belongs to the walker, so its
/// key is effectively `(family, α, β)`. Safe to share across threads.
#[derive(Debug)]
pub struct Walker {
    family: Arc<dyn CSequence>,
    memo: Option<DashMap<(Ordinal, Ordinal), Ordinal>>,
    hits: AtomicU64,
    misses: AtomicU64,
    depth_budget: usize,
}

impl Walker {
    pub fn new(family: Arc<dyn CSequence>) -> Self {
        Walker {
            family,
            memo: Some(DashMap::new()),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            depth_budget: DEFAULT_DEPTH_BUDGET,
        }
    }

    /// A walker that recomputes every value from scratch.
    pub fn uncached(family: Arc<dyn CSequence>) -> Self {
        Walker {
            memo: None,
            ..Walker::new(family)
        }
    }

    pub fn with_depth_budget(mut self, budget: usize) -> Self {
        self.depth_budget = budget;
        self
    }

    pub fn family(&self) -> &Arc<dyn CSequence> {
        &self.family
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            entries: self.memo.as_ref().map_or(0, |m| m.len()),
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
        }
    }

    /// The memoized value for `(α, β)`, if it has been computed.
    pub fn cached(&self, alpha: &Ordinal, beta: &Ordinal) -> Option<Ordinal> {
        let memo = self.memo.as_ref()?;
        memo.get(&(alpha.clone(), beta.clone())).map(|v| v.clone())
    }

    pub fn clear_cache(&self) {
        if let Some(m) = &self.memo {
            m.clear();
        }
    }

    fn check_pair(&self, alpha: &Ordinal, beta: &Ordinal) -> Result<()> {
        self.family.check_bound(beta)?;
        if alpha > beta {
            return Err(Error::Precondition(format!(
                "walk needs α ≤ β, got α = {alpha}, β = {beta}"
            )));
        }
        Ok(())
    }

    pub fn rho(&self, alpha: &Ordinal, beta: &Ordinal) -> Result<Ordinal> {
        self.check_pair(alpha, beta)?;
        self.rho_at(alpha, beta, 0)
    }

    /// `ρ` on the unordered pair `{x, y}`.
    pub fn rho_pair(&self, x: &Ordinal, y: &Ordinal) -> Result<Ordinal> {
        if x <= y {
            self.rho(x, y)
        } else {
            self.rho(y, x)
        }
    }

    fn rho_at(&self, alpha: &Ordinal, beta: &Ordinal, depth: usize) -> Result<Ordinal> {
        if alpha == beta {
            return Ok(Ordinal::zero());
        }
        if depth > self.depth_budget {
            return Err(Error::RecursionBudget(self.depth_budget));
        }
        if let Some(memo) = &self.memo {
            // the guard is dropped before recursing
            let hit = memo.get(&(alpha.clone(), beta.clone())).map(|v| v.clone());
            if let Some(v) = hit {
                self.hits.fetch_add(1, Ordering::Relaxed);
                return Ok(v);
            }
            self.misses.fetch_add(1, Ordering::Relaxed);
        }

        let club = self.family.club(beta)?;
        let mut best = club.otp_below(alpha);
        let next = club.min_above(alpha).ok_or_else(|| {
            Error::Precondition(format!("C_{beta} has no element at or above {alpha}"))
        })?;
        let down = self.rho_at(alpha, &next, depth + 1)?;
        if down > best {
            best = down;
        }
        let lambda = club.max_limit_point_upto(alpha);
        for xi in club.segment(&lambda, alpha, beta)? {
            let side = self.rho_at(&xi, alpha, depth + 1)?;
            if side > best {
                best = side;
            }
        }

        if let Some(memo) = &self.memo {
            memo.insert((alpha.clone(), beta.clone()), best.clone());
        }
        Ok(best)
    }

    /// `β = β₀ > β₁ > … > βₖ = α` with `βᵢ₊₁ = min(C_{βᵢ} \ α)`.
    pub fn upper_trace(&self, alpha: &Ordinal, beta: &Ordinal) -> Result<Vec<Ordinal>> {
        self.check_pair(alpha, beta)?;
        let mut trace = vec![beta.clone()];
        let mut current = beta.clone();
        while &current != alpha {
            if trace.len() > self.depth_budget {
                return Err(Error::RecursionBudget(self.depth_budget));
            }
            current = self.family.c_min_above(&current, alpha)?;
            trace.push(current.clone());
        }
        Ok(trace)
    }

    pub fn lower_trace(&self, alpha: &Ordinal, beta: &Ordinal) -> Result<Vec<Ordinal>> {
        let upper = self.upper_trace(alpha, beta)?;
        self.lower_from_upper(alpha, &upper)
    }

    fn lower_from_upper(&self, alpha: &Ordinal, upper: &[Ordinal]) -> Result<Vec<Ordinal>> {
        let mut lower: Vec<Ordinal> = Vec::new();
        for step in &upper[..upper.len() - 1] {
            let Some(m) = self.family.club(step)?.max_element_below(alpha) else {
                continue;
            };
            if lower.last().is_none_or(|last| &m > last) {
                lower.push(m);
            }
        }
        Ok(lower)
    }

    pub fn walk(&self, alpha: &Ordinal, beta: &Ordinal) -> Result<WalkTrace> {
        let upper = self.upper_trace(alpha, beta)?;
        let lower = self.lower_from_upper(alpha, &upper)?;
        let lambdas = upper[..upper.len() - 1]
            .iter()
            .map(|b| self.family.c_lambda(alpha, b))
            .collect::<Result<Vec<_>>>()?;
        let rho = self.rho(alpha, beta)?;
        Ok(WalkTrace {
            alpha: alpha.clone(),
            beta: beta.clone(),
            upper,
            lower,
            lambdas,
            rho,
        })
    }
}
