//! Acceptance checks. Prints one PASS/FAIL line per criterion (with indented
//! detail lines) and exits nonzero if any criterion fails.
//!
//! `cargo test --test acceptance -- 3 5` runs only criteria 3 and 5.

mod criteria;
mod oracle;

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rhowalk::csequence::{
    validate_family, CanonicalFamily, Club, FamilyClause, OverlayFamily, TwoTierSquare,
};
use rhowalk::deltasys::{knaster_harness, KnasterConfig};
use rhowalk::lemmas::{run_suite, Lemma, SuiteConfig};
use rhowalk::ordinal::OrdinalGrid;
use rhowalk::par::Exec;
use rhowalk::poset::{compatible, is_valid, ConditionSampler, Variant};
use rhowalk::table::RhoTable;
use rhowalk::walk::Walker;
use rhowalk::{ord, Ordinal};

use oracle::{rho_small, small_to_ordinal, BruteForce};

const RHO_TIME_LIMIT: Duration = Duration::from_secs(5);
const SUITE_TIME_LIMIT: Duration = Duration::from_secs(120);
const KNASTER_TIME_LIMIT: Duration = Duration::from_secs(60);
const LIMIT_IN_TRACE_RESOLVED: f64 = 0.99;

pub struct Outcome {
    pub pass: bool,
    pub summary: String,
    pub details: Vec<String>,
}

impl Outcome {
    pub fn new(summary: impl Into<String>) -> Self {
        Outcome {
            pass: true,
            summary: summary.into(),
            details: Vec::new(),
        }
    }

    /// Records a sub-check; a failing one fails the criterion.
    pub fn check(&mut self, ok: bool, line: impl Into<String>) {
        let line = line.into();
        self.details.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
        self.pass &= ok;
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.details.push(format!("     {}", line.into()));
    }
}

pub fn f1() -> Walker {
    Walker::new(Arc::new(CanonicalFamily::new(ord("w^w"))))
}

pub fn f3(omega: &str) -> Walker {
    Walker::new(Arc::new(TwoTierSquare::new(ord(omega)).unwrap()))
}

pub fn random_ordinal<R: Rng>(rng: &mut R, max_exp: u64, max_coef: u64) -> Ordinal {
    let mut acc = Ordinal::zero();
    for e in (0..=max_exp).rev() {
        let c = rng.gen_range(0..=max_coef);
        acc = acc.add(&Ordinal::omega_pow(Ordinal::from(e)).mul_nat(c));
    }
    acc
}

fn rho_base() -> Outcome {
    let started = Instant::now();
    let mut out = Outcome::new("ρ(α,α)=0, small values, plain-recursion oracle on F1");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (w1, w3) = (f1(), f3("w^2"));
    let mut diagonal_bad = 0;
    for i in 0..500 {
        let (walker, alpha) = if i % 2 == 0 {
            (&w1, random_ordinal(&mut rng, 6, 5))
        } else {
            (&w3, random_ordinal(&mut rng, 3, 5))
        };
        if walker.rho(&alpha, &alpha).unwrap() != Ordinal::zero() {
            diagonal_bad += 1;
        }
    }
    out.check(diagonal_bad == 0, format!("ρ(α,α)=0 on 500 sampled α: {diagonal_bad} failures"));

    let omega = Ordinal::omega();
    let bad_omega = (0..64u64)
        .filter(|&n| {
            let lib = w1.rho(&Ordinal::from(n), &omega).unwrap();
            lib != Ordinal::from(n) || rho_small((0, n), (1, 0)) != n
        })
        .count();
    out.check(bad_omega == 0, format!("ρ(n,ω)=n for n<64: {bad_omega} failures"));
    let mut bad_finite = 0;
    for n in 0..64u64 {
        for m in 0..n {
            let lib = w1.rho(&Ordinal::from(m), &Ordinal::from(n)).unwrap();
            if !lib.is_zero() || rho_small((0, m), (0, n)) != 0 {
                bad_finite += 1;
            }
        }
    }
    out.check(bad_finite == 0, format!("ρ(m,n)=0 for m<n<64: {bad_finite} failures"));

    let points: Vec<(u64, u64)> = (0..5).flat_map(|a| (0..16).map(move |b| (a, b))).collect();
    let plain = Walker::uncached(w1.family().clone());
    let (mut pairs, mut mismatches) = (0, 0);
    for (i, &x) in points.iter().enumerate() {
        for &y in &points[i..] {
            let expected = Ordinal::from(rho_small(x, y));
            let (a, b) = (small_to_ordinal(x), small_to_ordinal(y));
            pairs += 1;
            if w1.rho(&a, &b).unwrap() != expected || plain.rho(&a, &b).unwrap() != expected {
                mismatches += 1;
                if mismatches <= 5 {
                    out.note(format!("mismatch at ({a}, {b}): oracle {expected}"));
                }
            }
        }
    }
    out.check(
        mismatches == 0,
        format!("oracle agreement below ω·5: {pairs} pairs, {mismatches} mismatches"),
    );
    let elapsed = started.elapsed();
    out.check(elapsed < RHO_TIME_LIMIT, format!("runtime {elapsed:.2?} < {RHO_TIME_LIMIT:?}"));
    out
}

fn lemma_suite() -> Outcome {
    let started = Instant::now();
    let mut out = Outcome::new("property suite on F3 (Ω=ω², sweep below ω⁴, cap 4)");
    let walker = f3("w^2");
    let grid = OrdinalGrid::new(&ord("w^4"), 4, 1).unwrap();
    let table = RhoTable::build(&walker, grid, Exec::default()).unwrap();
    let suite = run_suite(&walker, &table, &SuiteConfig::default()).unwrap();
    out.note(format!("{} points, {} pairs", suite.points, suite.pairs));
    for r in &suite.lemmas {
        let mut line = format!(
            "{}: checked {}, violations {}",
            r.lemma.name(),
            r.checked,
            r.violation_count
        );
        let ok = if r.lemma == Lemma::LimitInTrace {
            let resolved = r.resolved_fraction();
            line += &format!(", resolved {:.2}%", resolved * 100.0);
            r.violation_count == 0 && resolved >= LIMIT_IN_TRACE_RESOLVED
        } else {
            r.violation_count == 0
        };
        out.check(ok, line);
        for v in r.violations.iter().take(3) {
            let pts: Vec<String> = v.points.iter().map(|p| p.to_string()).collect();
            out.note(format!("  at ({}): {}", pts.join(", "), v.detail));
        }
        for v in r.unresolved_cases.iter().take(3) {
            let pts: Vec<String> = v.points.iter().map(|p| p.to_string()).collect();
            out.note(format!("  unresolved ({}): {}", pts.join(", "), v.detail));
        }
    }
    let elapsed = started.elapsed();
    out.check(elapsed < SUITE_TIME_LIMIT, format!("runtime {elapsed:.1?} < {SUITE_TIME_LIMIT:?}"));
    out
}

fn compat_oracle() -> Outcome {
    let mut out = Outcome::new("closure-based compatibility vs brute force, 10,000 pairs per variant");
    let walker = f3("w^2");
    let grid = OrdinalGrid::new(walker.family().bound(), 2, 2).unwrap();
    let points = grid.points().to_vec();
    for (variant, strict) in [(Variant::Q, false), (Variant::P, true)] {
        let brute = BruteForce {
            walker: &walker,
            strict,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(if strict { 32 } else { 31 });
        let (mut agree, mut incompatible) = (0, 0);
        let (mut bad_witness, mut bad_cert, mut disagree) = (0, 0, 0);
        for _ in 0..10_000 {
            // a small shared domain makes overlapping supports common
            let domain: Vec<Ordinal> = (0..4)
                .map(|_| points[rng.gen_range(0..points.len())].clone())
                .collect();
            let sampler = ConditionSampler::new(domain);
            let (p, q) = loop {
                let p = sampler.sample(&mut rng, &variant, &walker).unwrap();
                let q = sampler.sample(&mut rng, &variant, &walker).unwrap();
                if let (Some(p), Some(q)) = (p, q) {
                    break (p, q);
                }
            };
            let lib = compatible(&p, &q, &variant, &walker).unwrap();
            let reference = brute.common_extension(&p, &q);
            if lib.is_compatible() == reference.is_some() {
                agree += 1;
            } else {
                disagree += 1;
                if disagree <= 5 {
                    out.note(format!("disagree on p = {p}, q = {q}"));
                }
            }
            match (lib.witness(), lib.certificate()) {
                (Some(w), _) => {
                    let ok = is_valid(w, &variant, &walker).unwrap()
                        && brute.valid(w)
                        && w.extends(&p)
                        && w.extends(&q);
                    bad_witness += usize::from(!ok);
                }
                (None, Some(cert)) => {
                    incompatible += 1;
                    bad_cert += usize::from(!cert.verify(&p, &q, &walker).unwrap());
                }
                (None, None) => unreachable!(),
            }
        }
        out.check(
            disagree == 0,
            format!("{variant}: {agree}/10000 agree ({incompatible} incompatible)"),
        );
        out.check(bad_witness == 0, format!("{variant}: {bad_witness} witnesses fail to validate or extend"));
        out.check(bad_cert == 0, format!("{variant}: {bad_cert} certificates fail to re-verify"));
    }
    out
}

fn knaster() -> Outcome {
    let started = Instant::now();
    let mut out = Outcome::new("Knaster harness, n=1000, seed 42, F3 (Ω=ω²), Q and P");
    let walker = f3("w^2");
    for variant in [Variant::Q, Variant::P] {
        let report = knaster_harness(&KnasterConfig::new(1000, 42, variant.clone()), &walker).unwrap();
        out.check(
            report.refined_size >= 2 && report.incompatible.is_empty(),
            format!(
                "{variant}: largest refined family {}, {} pairs checked, {} incompatible",
                report.refined_size,
                report.pairs_checked,
                report.incompatible.len()
            ),
        );
        out.check(
            report.amalgam_rejected.is_empty() && report.amalgam_skipped.is_empty(),
            format!(
                "{variant}: {} amalgams confirmed, {} skipped, {} rejected",
                report.amalgams_confirmed,
                report.amalgam_skipped.len(),
                report.amalgam_rejected.len()
            ),
        );
        for f in report.amalgam_skipped.iter().chain(&report.amalgam_rejected).take(5) {
            out.note(format!("  bucket {} ({}, {}): {}", f.bucket, f.left, f.right, f.detail));
        }
    }
    let elapsed = started.elapsed();
    out.check(elapsed < KNASTER_TIME_LIMIT, format!("runtime {elapsed:.2?} < {KNASTER_TIME_LIMIT:?}"));
    out
}

fn family_validator() -> Outcome {
    let mut out = Outcome::new("square-sequence validator on F3, F1 and corrupted families");
    let sweep = |bound: &str| OrdinalGrid::new(&ord(bound), 4, 1).unwrap();
    let w3 = f3("w^2");
    let report = validate_family(w3.family().as_ref(), &sweep("w^4")).unwrap();
    out.check(
        report.passed(),
        format!(
            "F3: {} limits, {} coherence checks, {} violations",
            report.limits_checked,
            report.coherence_checks,
            report.violations.len()
        ),
    );
    let w1 = f1();
    let report = validate_family(w1.family().as_ref(), &sweep("w^4")).unwrap();
    out.check(
        report.passed() && report.coherence_checks == 0,
        format!(
            "F1: {} limits, {} coherence checks (vacuous), {} violations",
            report.limits_checked,
            report.coherence_checks,
            report.violations.len()
        ),
    );

    let corruptions = [
        ("w*2", Club::finite(vec![ord("w+1"), ord("w+3")]), FamilyClause::Club),
        (
            "w*3",
            Club::Interval {
                base: ord("w"),
                len: ord("w*2"),
            },
            FamilyClause::Coherence,
        ),
        (
            "w^3",
            Club::Interval {
                base: ord("0"),
                len: ord("w^3"),
            },
            FamilyClause::OtpBound,
        ),
    ];
    for (at, club, clause) in corruptions {
        let mut broken = OverlayFamily::over(w3.family().clone());
        broken.set(ord(at), club);
        let report = validate_family(&broken, &sweep("w^4")).unwrap();
        let flagged = report
            .violations
            .iter()
            .any(|v| v.clause == clause && v.alpha == ord(at));
        let clauses: Vec<String> = report
            .violations
            .iter()
            .map(|v| format!("{:?}@{}", v.clause, v.alpha))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        out.check(
            flagged,
            format!("C_{at} corrupted: expected {clause:?}@{at}, got [{}]", clauses.join(", ")),
        );
    }
    out
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "rho-base", rho_base),
        (2, "lemma-suite", lemma_suite),
        (3, "compatibility", compat_oracle),
        (4, "knaster", knaster),
        (5, "projections", criteria::projections),
        (6, "counterexample", criteria::counterexample),
        (7, "generic-tree", criteria::generic_tree),
        (8, "family-validator", family_validator),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (n, name, run) in criteria {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let started = Instant::now();
        let out = run();
        println!(
            "{} criterion {n} ({name}): {} [{:.1?}]",
            if out.pass { "PASS" } else { "FAIL" },
            out.summary,
            started.elapsed()
        );
        for d in &out.details {
            println!("    {d}");
        }
        if !out.pass {
            failed.push(n);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
