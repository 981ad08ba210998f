//! The `ρ` lemmas, checked exhaustively over a [`RhoTable`].
//!
//! Statements that quantify over cofinal sets or over points arbitrarily close
//! below a limit are probed with canonical fundamental sequences `α[n]`, which
//! live off the grid and are evaluated through the walker. The small-preimage
//! check estimates order types from a finer grid; see [`saturated_otp`].

use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::ordinal::{Ordinal, OrdinalGrid};
use crate::par::Exec;
use crate::table::RhoTable;
use crate::walk::Walker;

/// Fraction of `(β, γ)` pairs for which the limit-in-trace search must find a witness.
pub const TRACE_RESOLVED_THRESHOLD: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma {
    /// `α ∈ lim(C_β)` implies `ρ(ξ, α) = ρ(ξ, β)` for `ξ < α`.
    Coherence,
    /// `{ξ < α : ρ(ξ, β) ≤ ν}` cofinal in limit `α` implies `ρ(α, β) ≤ ν`.
    CofinalLimit,
    /// `otp{ξ < α : ρ(ξ, α) ≤ ν} < Ω`.
    SmallPreimage,
    /// Both triangle inequalities for `α < β < γ`.
    Subadditivity,
    /// `ρ(β, γ) < max{ρ(α, β), ρ(α, γ)}` implies `ρ(α, γ) = ρ(α, β)`.
    Equality,
    /// For limit `β < γ` there is `β' < β` with `ρ(α, γ) ≥ ρ(α, β)` on `(β', β)`.
    LimitInTrace,
    /// Memoized and plain recursion agree.
    MemoAgreement,
}

impl Lemma {
    pub const ALL: [Lemma; 7] = [
        Lemma::Coherence,
        Lemma::CofinalLimit,
        Lemma::SmallPreimage,
        Lemma::Subadditivity,
        Lemma::Equality,
        Lemma::LimitInTrace,
        Lemma::MemoAgreement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::Coherence => "coherence",
            Lemma::CofinalLimit => "cofinal-limit",
            Lemma::SmallPreimage => "small-preimage",
            Lemma::Subadditivity => "subadditivity",
            Lemma::Equality => "equality",
            Lemma::LimitInTrace => "limit-in-trace",
            Lemma::MemoAgreement => "memo-agreement",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaViolation {
    pub points: Vec<Ordinal>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub lemma: Lemma,
    pub checked: u64,
    pub violation_count: u64,
    /// The first few violations, in sweep order.
    pub violations: Vec<LemmaViolation>,
    /// Cases a bounded search could not settle (limit-in-trace, or points the
    /// estimator cannot handle).
    pub unresolved: u64,
    pub unresolved_cases: Vec<LemmaViolation>,
    pub millis: u128,
}

impl LemmaReport {
    fn new(lemma: Lemma) -> Self {
        LemmaReport {
            lemma,
            checked: 0,
            violation_count: 0,
            violations: Vec::new(),
            unresolved: 0,
            unresolved_cases: Vec::new(),
            millis: 0,
        }
    }

    pub fn resolved_fraction(&self) -> f64 {
        if self.checked == 0 {
            1.0
        } else {
            1.0 - self.unresolved as f64 / self.checked as f64
        }
    }

    pub fn passed(&self) -> bool {
        self.violation_count == 0
            && (self.lemma != Lemma::LimitInTrace
                || self.resolved_fraction() >= TRACE_RESOLVED_THRESHOLD)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub family: String,
    pub bound: Ordinal,
    pub cap: u64,
    pub points: usize,
    pub pairs: usize,
    pub lemmas: Vec<LemmaReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.lemmas.iter().all(LemmaReport::passed)
    }

    pub fn get(&self, lemma: Lemma) -> Option<&LemmaReport> {
        self.lemmas.iter().find(|r| r.lemma == lemma)
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub exec: Exec,
    /// Cofinal probes use `α[n]` and `α[n] + 1` for `n` in `[probe_terms, 2·probe_terms)`.
    pub probe_terms: u64,
    /// Limit-in-trace witnesses are searched among `β[n]`, `n ≤ trace_search`;
    /// probes run up to `n = 2·trace_search`.
    pub trace_search: u64,
    /// The preimage estimate uses a grid with coefficient cap `cap + extra`.
    pub preimage_extra_cap: u64,
    /// Number of table pairs recomputed without the memo.
    pub memo_sample: usize,
    pub max_recorded: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            exec: Exec::default(),
            probe_terms: 6,
            trace_search: 6,
            preimage_extra_cap: 2,
            memo_sample: 20_000,
            max_recorded: 10,
        }
    }
}

/// Per-chunk partial result, merged in index order.
#[derive(Default)]
struct Partial {
    checked: u64,
    count: u64,
    found: Vec<LemmaViolation>,
    unresolved: u64,
    open: Vec<LemmaViolation>,
}

impl Partial {
    fn violation(&mut self, max: usize, points: &[&Ordinal], detail: impl FnOnce() -> String) {
        self.count += 1;
        if self.found.len() < max {
            self.found.push(LemmaViolation {
                points: points.iter().map(|p| (*p).clone()).collect(),
                detail: detail(),
            });
        }
    }

    fn unresolved(&mut self, max: usize, points: &[&Ordinal], detail: impl FnOnce() -> String) {
        self.unresolved += 1;
        if self.open.len() < max {
            self.open.push(LemmaViolation {
                points: points.iter().map(|p| (*p).clone()).collect(),
                detail: detail(),
            });
        }
    }
}

fn merge(lemma: Lemma, parts: Vec<Partial>, max: usize, started: Instant) -> LemmaReport {
    let mut report = LemmaReport::new(lemma);
    for p in parts {
        report.checked += p.checked;
        report.violation_count += p.count;
        report.unresolved += p.unresolved;
        report.violations.extend(p.found);
        report.unresolved_cases.extend(p.open);
    }
    report.violations.truncate(max);
    report.unresolved_cases.truncate(max);
    report.millis = started.elapsed().as_millis();
    report
}

pub fn run_suite(walker: &Walker, table: &RhoTable, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let lemmas = vec![
        check_coherence(walker, table, cfg)?,
        check_cofinal_limit(walker, table, cfg)?,
        check_small_preimage(walker, table, cfg)?,
        check_subadditivity(table, cfg),
        check_equality(table, cfg),
        check_limit_in_trace(walker, table, cfg)?,
        check_memo_agreement(walker, table, cfg)?,
    ];
    Ok(SuiteReport {
        family: walker.family().name(),
        bound: table.grid().bound().clone(),
        cap: table.grid().cap(),
        points: table.len(),
        pairs: table.pair_count(),
        lemmas,
    })
}

pub fn check_coherence(walker: &Walker, table: &RhoTable, cfg: &SuiteConfig) -> Result<LemmaReport> {
    let started = Instant::now();
    let pts = table.grid().points();
    let family = walker.family();
    let parts = cfg.exec.try_map_range(pts.len(), |j| -> Result<Partial> {
        let mut p = Partial::default();
        let beta = &pts[j];
        let club = family.club(beta)?;
        for i in 0..j {
            if !club.is_limit_point(&pts[i]) {
                continue;
            }
            for l in 0..i {
                p.checked += 1;
                if table.rank(l, i) != table.rank(l, j) {
                    p.violation(cfg.max_recorded, &[&pts[l], &pts[i], beta], || {
                        format!(
                            "ρ(ξ,α) = {} but ρ(ξ,β) = {}",
                            table.value(l, i),
                            table.value(l, j)
                        )
                    });
                }
            }
        }
        Ok(p)
    })?;
    Ok(merge(Lemma::Coherence, parts, cfg.max_recorded, started))
}

/// `α[n] + k` for `n ∈ ns` and `k ∈ {0, 1}`.
fn probes(alpha: &Ordinal, ns: std::ops::Range<u64>) -> Vec<Ordinal> {
    ns.flat_map(|n| {
        let x = alpha.fundamental(n).expect("limit");
        let y = x.succ();
        [x, y]
    })
    .collect()
}

pub fn check_cofinal_limit(
    walker: &Walker,
    table: &RhoTable,
    cfg: &SuiteConfig,
) -> Result<LemmaReport> {
    let started = Instant::now();
    let pts = table.grid().points();
    let n = pts.len();
    let parts = cfg.exec.try_map_range(n, |i| -> Result<Partial> {
        let mut p = Partial::default();
        let alpha = &pts[i];
        if !alpha.is_limit() {
            return Ok(p);
        }
        let ladder: Vec<(Ordinal, Ordinal)> = (cfg.probe_terms..2 * cfg.probe_terms)
            .map(|m| {
                let x = alpha.fundamental(m).expect("limit");
                let y = x.succ();
                (x, y)
            })
            .collect();
        for beta in &pts[i + 1..n] {
            p.checked += 1;
            // w_m = max ρ over {α[m], α[m]+1}
            let tail = ladder
                .iter()
                .map(|(x, y)| Ok(walker.rho(x, beta)?.max(walker.rho(y, beta)?)))
                .collect::<Result<Vec<_>>>()?;
            let Some(nu) = tail_bound(&tail) else {
                p.unresolved(cfg.max_recorded, &[alpha, beta], || {
                    format!("no recognisable pattern in probe values {tail:?}")
                });
                continue;
            };
            let at = table.get(alpha, beta).expect("grid pair");
            if at > &nu {
                p.violation(cfg.max_recorded, &[alpha, beta], || {
                    format!("ρ(α,β) = {at} exceeds the tail bound {nu}")
                });
            }
        }
        Ok(p)
    })?;
    Ok(merge(Lemma::CofinalLimit, parts, cfg.max_recorded, started))
}

/// A value `ν` whose preimage contains the whole probed tail, read off the
/// probe values `w_m`: their common value if constant, or `π + ω^(e+1)` when
/// every step keeps the prefix `π` and raises the coefficient at `ω^e`.
/// Anything else is left undecided.
pub fn tail_bound(values: &[Ordinal]) -> Option<Ordinal> {
    let first = values.first()?;
    if values.iter().all(|v| v == first) {
        return Some(first.clone());
    }
    let mut pattern: Option<(usize, Ordinal)> = None;
    for pair in values.windows(2) {
        let (a, b) = (pair[0].terms(), pair[1].terms());
        if pair[0] >= pair[1] {
            return None;
        }
        let i = a.iter().zip(b).take_while(|(x, y)| x == y).count();
        let e = b.get(i)?.exponent.clone();
        match &pattern {
            Some((j, f)) if *j != i || f != &e => return None,
            _ => pattern = Some((i, e)),
        }
    }
    let (i, e) = pattern?;
    let last = values.last()?;
    let prefix = Ordinal::from_terms(last.terms()[..i].iter().cloned());
    Some(prefix.add(&Ordinal::omega_pow(e.succ())))
}

/// Coefficient vector `[a_{k-1}, …, a_0]` of an ordinal below `ω^k`.
fn digits(o: &Ordinal, k: usize) -> Option<Vec<u64>> {
    let mut out = vec![0u64; k];
    for t in o.terms() {
        let e = t.exponent.as_u64()? as usize;
        if e >= k {
            return None;
        }
        out[k - 1 - e] = num_traits::ToPrimitive::to_u64(&t.coefficient)?;
    }
    Some(out)
}

/// Order-type estimate for a set of grid points given as coefficient vectors
/// (lexicographically sorted, all of one length) drawn from a grid with
/// coefficient cap `cap`.
///
/// A coefficient that reaches `cap` is read as unbounded: the last block is
/// taken to repeat ω times, contributing `x·ω = ω^(e+1)` where `ω^e` leads its
/// type `x`. Everything else is summed exactly.
pub fn saturated_otp(points: &[Vec<u64>], cap: u64) -> Ordinal {
    fn go(points: &[Vec<u64>], level: usize, cap: u64) -> Ordinal {
        if points.is_empty() {
            return Ordinal::zero();
        }
        if level == points[0].len() {
            return Ordinal::from(points.len() as u64);
        }
        let mut total = Ordinal::zero();
        let mut start = 0;
        while start < points.len() {
            let d = points[start][level];
            let end = start + points[start..].partition_point(|p| p[level] == d);
            let block = go(&points[start..end], level + 1, cap);
            let part = if d >= cap {
                let e = block.leading_exponent().expect("nonempty block").clone();
                Ordinal::omega_pow(e.succ())
            } else {
                block
            };
            total = total.add(&part);
            start = end;
        }
        total
    }
    go(points, 0, cap)
}

pub fn check_small_preimage(
    walker: &Walker,
    table: &RhoTable,
    cfg: &SuiteConfig,
) -> Result<LemmaReport> {
    let started = Instant::now();
    let Some(tier) = walker.family().tier().cloned() else {
        return Ok(merge(Lemma::SmallPreimage, Vec::new(), 0, started));
    };
    let base = table.grid();
    let ext_cap = base.cap() + cfg.preimage_extra_cap;
    let ext = OrdinalGrid::new(base.bound(), ext_cap, 1)?;
    let k = ext
        .points()
        .iter()
        .filter_map(|p| p.leading_exponent().and_then(Ordinal::as_u64))
        .max()
        .map_or(1, |e| e as usize + 1);
    let ext_digits: Vec<Option<Vec<u64>>> = ext.points().iter().map(|p| digits(p, k)).collect();

    let pts = base.points();
    let parts = cfg.exec.try_map_range(pts.len(), |j| -> Result<Partial> {
        let mut p = Partial::default();
        let alpha = &pts[j];
        if alpha.is_zero() {
            return Ok(p);
        }
        p.checked += 1;
        let below = ext.lower_bound(alpha);
        if ext_digits[..below].iter().any(Option::is_none) {
            p.unresolved(cfg.max_recorded, &[alpha], || {
                "points with infinite exponents; no estimate".into()
            });
            return Ok(p);
        }
        let rhos = ext.points()[..below]
            .iter()
            .map(|xi| walker.rho(xi, alpha))
            .collect::<Result<Vec<_>>>()?;
        let mut ranks: Vec<u32> = (0..j).map(|i| table.rank(i, j)).collect();
        ranks.sort_unstable();
        ranks.dedup();
        for r in ranks {
            let nu = &table.values()[r as usize];
            let set: Vec<Vec<u64>> = (0..below)
                .filter(|&i| &rhos[i] <= nu)
                .map(|i| ext_digits[i].clone().expect("checked"))
                .collect();
            let otp = saturated_otp(&set, ext_cap);
            if otp >= tier {
                p.violation(cfg.max_recorded, &[alpha, nu], || {
                    format!("estimated otp{{ξ < α : ρ(ξ,α) ≤ ν}} = {otp}, not below {tier}")
                });
                break;
            }
        }
        Ok(p)
    })?;
    Ok(merge(Lemma::SmallPreimage, parts, cfg.max_recorded, started))
}

pub fn check_subadditivity(table: &RhoTable, cfg: &SuiteConfig) -> LemmaReport {
    let started = Instant::now();
    let pts = table.grid().points();
    let n = pts.len();
    let parts = cfg.exec.map_range(n, |i| {
        let mut p = Partial::default();
        for j in i + 1..n {
            let rij = table.rank(i, j);
            for k in j + 1..n {
                let rik = table.rank(i, k);
                let rjk = table.rank(j, k);
                p.checked += 1;
                if rik > rij.max(rjk) || rij > rik.max(rjk) {
                    p.violation(cfg.max_recorded, &[&pts[i], &pts[j], &pts[k]], || {
                        format!(
                            "ρ(α,β) = {}, ρ(α,γ) = {}, ρ(β,γ) = {}",
                            table.value(i, j),
                            table.value(i, k),
                            table.value(j, k)
                        )
                    });
                }
            }
        }
        p
    });
    merge(Lemma::Subadditivity, parts, cfg.max_recorded, started)
}

pub fn check_equality(table: &RhoTable, cfg: &SuiteConfig) -> LemmaReport {
    let started = Instant::now();
    let pts = table.grid().points();
    let n = pts.len();
    let parts = cfg.exec.map_range(n, |i| {
        let mut p = Partial::default();
        for j in i + 1..n {
            let rij = table.rank(i, j);
            for k in j + 1..n {
                let rik = table.rank(i, k);
                let rjk = table.rank(j, k);
                p.checked += 1;
                if rjk < rij.max(rik) && rik != rij {
                    p.violation(cfg.max_recorded, &[&pts[i], &pts[j], &pts[k]], || {
                        format!(
                            "ρ(β,γ) = {} is below the max, yet ρ(α,γ) = {} ≠ ρ(α,β) = {}",
                            table.value(j, k),
                            table.value(i, k),
                            table.value(i, j)
                        )
                    });
                }
            }
        }
        p
    });
    merge(Lemma::Equality, parts, cfg.max_recorded, started)
}

pub fn check_limit_in_trace(
    walker: &Walker,
    table: &RhoTable,
    cfg: &SuiteConfig,
) -> Result<LemmaReport> {
    let started = Instant::now();
    let pts = table.grid().points();
    let n = pts.len();
    let search = cfg.trace_search;
    let parts = cfg.exec.try_map_range(n, |j| -> Result<Partial> {
        let mut p = Partial::default();
        let beta = &pts[j];
        if !beta.is_limit() {
            return Ok(p);
        }
        let ladder: Vec<Ordinal> = (0..=search)
            .map(|m| beta.fundamental(m).expect("limit"))
            .collect();
        let xs = probes(beta, 1..2 * search + 1);
        let at_beta = xs
            .iter()
            .map(|x| walker.rho(x, beta))
            .collect::<Result<Vec<_>>>()?;
        for l in j + 1..n {
            let gamma = &pts[l];
            p.checked += 1;
            // the largest probe α < β where ρ(α,γ) < ρ(α,β)
            let mut worst: Option<&Ordinal> = None;
            for i in (0..j).rev() {
                if table.rank(i, l) < table.rank(i, j) {
                    worst = Some(&pts[i]);
                    break;
                }
            }
            for (x, rb) in xs.iter().zip(&at_beta) {
                if &walker.rho(x, gamma)? < rb && worst.is_none_or(|w| x > w) {
                    worst = Some(x);
                }
            }
            let found = match worst {
                None => true,
                Some(w) => ladder.iter().any(|b| b >= w),
            };
            if !found {
                let w = worst.expect("unresolved only with a bad probe").clone();
                p.unresolved(cfg.max_recorded, &[beta, gamma], || {
                    format!("ρ(α,γ) < ρ(α,β) at α = {w}, above β[{search}]")
                });
            }
        }
        Ok(p)
    })?;
    Ok(merge(Lemma::LimitInTrace, parts, cfg.max_recorded, started))
}

pub fn check_memo_agreement(
    walker: &Walker,
    table: &RhoTable,
    cfg: &SuiteConfig,
) -> Result<LemmaReport> {
    let started = Instant::now();
    let plain = Walker::uncached(walker.family().clone());
    let pts = table.grid().points();
    let n = pts.len();
    let stride = (table.pair_count() / cfg.memo_sample.max(1)).max(1);
    let parts = cfg.exec.try_map_range(n, |i| -> Result<Partial> {
        let mut p = Partial::default();
        let offset = i * n - i * (i + 1) / 2;
        for j in i + 1..n {
            if !(offset + j - i - 1).is_multiple_of(stride) {
                continue;
            }
            p.checked += 1;
            let fresh = plain.rho(&pts[i], &pts[j])?;
            if &fresh != table.value(i, j) {
                p.violation(cfg.max_recorded, &[&pts[i], &pts[j]], || {
                    format!("memoized {} vs plain {fresh}", table.value(i, j))
                });
            }
        }
        Ok(p)
    })?;
    Ok(merge(Lemma::MemoAgreement, parts, cfg.max_recorded, started))
}
