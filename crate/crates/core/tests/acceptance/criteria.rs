//! Criteria 5 to 7: projections, the suborder counterexample, generic trees.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rhowalk::csequence::CofinalityClass;
use rhowalk::ordinal::OrdinalGrid;
use rhowalk::poset::{
    compatible, counterexample_query, is_valid, merge_projection, project_below,
    project_to_countable, suborder_counterexample, validate_condition, Condition, ConditionSampler,
    Variant,
};
use rhowalk::tree::{build_filter, check_tree, tree_of, DenseRequirement};
use rhowalk::walk::Walker;
use rhowalk::{ord, Error, Ordinal};

use crate::oracle::BruteForce;
use crate::{f3, Outcome};

const PROJECTION_SAMPLES: usize = 200;
const DESCENTS: usize = 100;
const MAX_SEARCH_FAILURE_RATE: f64 = 0.05;
const COUNTEREXAMPLE_TRIPLES: usize = 50;
const FILTERS: u64 = 100;
/// Coefficient cap of the grid the projection searches draw candidates from.
const SEARCH_GRID_CAP: u64 = 4;

/// A random `r' ≤ r` inside `variant`: up to three values added at existing or
/// new domain points, each kept only if the result is still a condition.
fn descend<R: Rng>(
    r: &Condition,
    pool: &[Ordinal],
    sampler: &ConditionSampler,
    variant: &Variant,
    walker: &Walker,
    rng: &mut R,
) -> Condition {
    let mut out = r.clone();
    for _ in 0..rng.gen_range(1..=3) {
        let dom: Vec<Ordinal> = out.dom().cloned().collect();
        let at = if rng.gen_bool(0.5) && !dom.is_empty() {
            dom.choose(rng).unwrap().clone()
        } else {
            pool.choose(rng).unwrap().clone()
        };
        if !variant.domain_ok(&at, walker.family().as_ref()).unwrap() {
            continue;
        }
        let mut next = out.clone();
        next.insert(at, sampler.value(rng));
        if is_valid(&next, variant, walker).unwrap() {
            out = next;
        }
    }
    out
}

struct ProjectionTally {
    successes: usize,
    failures: usize,
    merges: usize,
    bad_merges: usize,
    bad_outputs: usize,
}

impl ProjectionTally {
    fn new() -> Self {
        ProjectionTally {
            successes: 0,
            failures: 0,
            merges: 0,
            bad_merges: 0,
            bad_outputs: 0,
        }
    }

    fn report(&self, out: &mut Outcome, what: &str) {
        let rate = self.failures as f64 / PROJECTION_SAMPLES as f64;
        out.check(
            self.bad_outputs == 0,
            format!("{what}: {} projections, {} fail to validate", self.successes, self.bad_outputs),
        );
        out.check(
            self.bad_merges == 0,
            format!("{what}: {} merges after descents, {} invalid", self.merges, self.bad_merges),
        );
        out.check(
            rate < MAX_SEARCH_FAILURE_RATE,
            format!(
                "{what}: {} search failures of {PROJECTION_SAMPLES} ({:.1}% < {:.0}%)",
                self.failures,
                rate * 100.0,
                MAX_SEARCH_FAILURE_RATE * 100.0
            ),
        );
    }
}

fn why(s: &Condition, walker: &Walker) -> String {
    let report = validate_condition(s, &Variant::Q, walker).unwrap();
    match report.violations.first() {
        Some(v) => format!("{:?} between {} and {:?}: {}", v.clause, v.alpha, v.beta.as_ref().map(|b| b.to_string()), v.detail),
        None => "merge does not extend both".into(),
    }
}

fn merge_ok(s: &Condition, r: &Condition, q: &Condition, walker: &Walker) -> bool {
    is_valid(s, &Variant::Q, walker).unwrap() && s.extends(r) && s.extends(q)
}

pub fn projections() -> Outcome {
    let mut out = Outcome::new("projections into Qc and below μ, with reduction spot-checks");
    let walker = f3("w^2");
    let family = walker.family().clone();
    let grid = OrdinalGrid::new(family.bound(), SEARCH_GRID_CAP, 2).unwrap();
    let pool = OrdinalGrid::new(family.bound(), 2, 2).unwrap().points().to_vec();
    let is_tier = |a: &Ordinal| family.class_of(a).unwrap() == CofinalityClass::TierClass;
    let tier_points: Vec<Ordinal> = pool.iter().filter(|a| is_tier(a)).cloned().collect();
    let sampler = ConditionSampler::new(pool.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    let mut tally = ProjectionTally::new();
    for _ in 0..PROJECTION_SAMPLES {
        let q = loop {
            if let Some(q) = sampler.sample(&mut rng, &Variant::Q, &walker).unwrap() {
                if q.dom().any(is_tier) {
                    break q;
                }
            }
        };
        match project_to_countable(&q, &walker, &grid) {
            Ok(proj) => {
                tally.successes += 1;
                if !is_valid(&proj.condition, &Variant::Qc, &walker).unwrap() {
                    tally.bad_outputs += 1;
                }
                for _ in 0..DESCENTS {
                    let r = descend(&proj.condition, &pool, &sampler, &Variant::Qc, &walker, &mut rng);
                    tally.merges += 1;
                    let s = merge_projection(&r, &q, &proj.moved);
                    if !merge_ok(&s, &r, &q, &walker) {
                        tally.bad_merges += 1;
                        if tally.bad_merges <= 5 {
                            out.note(format!("Qc merge failed: q = {q}, r = {r}: {}", why(&s, &walker)));
                        }
                    }
                }
            }
            Err(e @ Error::SearchExhausted(_)) => {
                tally.failures += 1;
                out.note(format!("Qc search failed on {q}: {e}"));
            }
            Err(e) => panic!("project_to_countable({q}): {e}"),
        }
    }
    tally.report(&mut out, "Qc");

    // μ of tier class with part of the domain at or above it
    let mut tally = ProjectionTally::new();
    for _ in 0..PROJECTION_SAMPLES {
        let (q, mu) = loop {
            let mu = tier_points.choose(&mut rng).unwrap().clone();
            if let Some(q) = sampler.sample(&mut rng, &Variant::Q, &walker).unwrap() {
                if q.dom().any(|a| a >= &mu) {
                    break (q, mu);
                }
            }
        };
        let below = Variant::Qmu { mu: mu.clone() };
        match project_below(&q, &mu, &walker, &grid) {
            Ok(proj) => {
                tally.successes += 1;
                if !is_valid(&proj.condition, &below, &walker).unwrap() {
                    tally.bad_outputs += 1;
                }
                for _ in 0..DESCENTS {
                    let r = descend(&proj.condition, &pool, &sampler, &below, &walker, &mut rng);
                    tally.merges += 1;
                    let s = merge_projection(&r, &q, &proj.moved);
                    if !merge_ok(&s, &r, &q, &walker) {
                        tally.bad_merges += 1;
                        if tally.bad_merges <= 5 {
                            out.note(format!("merge below {mu} failed: q = {q}, r = {r}: {}", why(&s, &walker)));
                        }
                    }
                }
            }
            Err(e @ (Error::SearchExhausted(_) | Error::BudgetExhausted { .. })) => {
                tally.failures += 1;
                out.note(format!("search below {mu} failed on {q}: {e}"));
            }
            Err(e) => panic!("project_below({q}, {mu}): {e}"),
        }
    }
    tally.report(&mut out, "below tier-class μ");
    out
}

pub fn counterexample() -> Outcome {
    let mut out = Outcome::new("Qμ is not a complete suborder: 50 witnessed triples on F3 (Ω=ω³)");
    let walker = f3("w^3");
    let brute = BruteForce {
        walker: &walker,
        strict: false,
    };
    let tier = ord("w^3");
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut seen = BTreeSet::new();
    let (mut found, mut attempts, mut unmet) = (0, 0, 0);
    let (mut bad_ext, mut bad_cert, mut bad_brute, mut bad_input) = (0, 0, 0, 0);
    while found < COUNTEREXAMPLE_TRIPLES && attempts < 50_000 {
        attempts += 1;
        // β = Ω·k + r and μ = Ω·k + t with t < r limits, t a multiple of ω²
        let base = tier.mul_nat(rng.gen_range(0..3));
        let a = rng.gen_range(1..=3);
        let t = ord("w^2").mul_nat(a);
        let r = ord("w^2")
            .mul_nat(a + rng.gen_range(1..=3))
            .add(&Ordinal::omega().mul_nat(rng.gen_range(0..3)));
        let (mu, beta) = (base.add(&t), base.add(&r));
        let nu = walker.family().club(&beta).unwrap().otp();

        let below = Variant::Qmu { mu: mu.clone() };
        let points = OrdinalGrid::new(&mu, 3, 1).unwrap().points().to_vec();
        let mut p = Condition::new();
        let k = rng.gen_range(1..=3);
        for xi in points.choose_multiple(&mut rng, k) {
            p.touch(xi.clone());
        }
        let dom: Vec<Ordinal> = p.dom().cloned().collect();
        p.insert(dom.choose(&mut rng).unwrap().clone(), nu.clone());
        for xi in &dom {
            for _ in 0..rng.gen_range(0..=2) {
                let v = Ordinal::omega().mul_nat(rng.gen_range(0..4)).add(&Ordinal::from(rng.gen_range(0..2)));
                let mut next = p.clone();
                next.insert(xi.clone(), v);
                if is_valid(&next, &below, &walker).unwrap() {
                    p = next;
                }
            }
        }
        if !seen.insert(format!("{mu}|{beta}|{p}")) {
            continue;
        }
        let (pbar, cert) = match suborder_counterexample(&mu, &beta, &p, &walker) {
            Ok(x) => x,
            Err(Error::Precondition(_)) => {
                unmet += 1;
                continue;
            }
            Err(e) => panic!("suborder_counterexample({mu}, {beta}, {p}): {e}"),
        };
        found += 1;
        let q = counterexample_query(&beta, &walker).unwrap();
        if brute.common_extension(&p, &q).is_none() {
            bad_input += 1;
        }
        if !(pbar.extends(&p) && is_valid(&pbar, &below, &walker).unwrap()) {
            bad_ext += 1;
        }
        if !cert.verify(&pbar, &q, &walker).unwrap() {
            bad_cert += 1;
        }
        let lib = compatible(&pbar, &q, &Variant::Q, &walker).unwrap();
        if brute.common_extension(&pbar, &q).is_some() || lib.is_compatible() {
            bad_brute += 1;
            out.note(format!("p̄ = {pbar} is compatible with {q} by brute force"));
        }
        if found <= 3 {
            out.note(format!("μ = {mu}, β = {beta}, p = {p} ↦ p̄ = {pbar}"));
        }
    }
    out.note(format!("{attempts} candidates drawn, {unmet} missed the preconditions"));
    out.check(
        found == COUNTEREXAMPLE_TRIPLES,
        format!("{found} triples meeting the preconditions"),
    );
    out.check(bad_input == 0, format!("{bad_input} inputs p not compatible with q by brute force"));
    out.check(bad_ext == 0, format!("{bad_ext} p̄ fail to extend p inside Qμ"));
    out.check(bad_cert == 0, format!("{bad_cert} certificates fail to re-verify"));
    out.check(bad_brute == 0, format!("{bad_brute} p̄ found compatible with q by brute force"));
    out
}

pub fn generic_tree() -> Outcome {
    let mut out = Outcome::new("100 simulated filters, tree invariants and the ρ cap on branches");
    let walker = f3("w^2");
    let pool = OrdinalGrid::new(walker.family().bound(), 2, 2).unwrap().points().to_vec();
    let (mut bad_chain, mut bad_tree, mut bad_cap) = (0, 0, 0);
    let (mut met, mut unmet, mut pairs) = (0, 0, 0);
    for seed in 0..FILTERS {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let variant = if seed % 2 == 0 { Variant::Q } else { Variant::P };
        let k = rng.gen_range(3..=5);
        let points: Vec<Ordinal> = pool.choose_multiple(&mut rng, k).cloned().collect();
        let reqs: Vec<DenseRequirement> = (0..rng.gen_range(4..=10))
            .map(|_| {
                let xi = points.choose(&mut rng).unwrap().clone();
                if rng.gen_bool(0.3) {
                    DenseRequirement::Touch { xi }
                } else {
                    DenseRequirement::Grow {
                        xi,
                        level: Ordinal::from(rng.gen_range(1..=6u64)),
                    }
                }
            })
            .collect();
        let budget = reqs.len() + rng.gen_range(0..=3);
        let filter = build_filter(&reqs, seed, budget, &variant, &walker).unwrap();
        met += filter.met.len();
        unmet += filter.unmet.len();
        let chain_ok = filter.chain.windows(2).all(|w| w[1].extends(&w[0]))
            && filter.chain.iter().all(|c| is_valid(c, &variant, &walker).unwrap());
        bad_chain += usize::from(!chain_ok);
        let tree = match tree_of(&filter, &walker) {
            Ok(t) => t,
            Err(e) => {
                bad_tree += 1;
                out.note(format!("seed {seed}: {e}"));
                continue;
            }
        };
        if !check_tree(&tree, &variant, &walker).unwrap().passed() {
            bad_tree += 1;
        }
        let branches: Vec<(&Ordinal, &BTreeSet<Ordinal>)> = tree.branches.iter().collect();
        for (i, (xi, bx)) in branches.iter().enumerate() {
            for (eta, by) in &branches[i + 1..] {
                let Some(top) = bx.intersection(by).max() else {
                    continue;
                };
                pairs += 1;
                let rho = walker.rho_pair(xi, eta).unwrap();
                let capped = if variant == Variant::P { top < &rho } else { top <= &rho };
                let initial = bx.range(..top).eq(by.range(..top));
                if !(capped && initial) {
                    bad_cap += 1;
                    out.note(format!("seed {seed}: b_{xi} ∩ b_{eta} has max {top}, ρ = {rho}"));
                }
            }
        }
    }
    out.note(format!("{met} requirements met, {unmet} unmet, {pairs} meeting branch pairs"));
    out.check(bad_chain == 0, format!("{bad_chain} chains not decreasing or not valid"));
    out.check(bad_tree == 0, format!("{bad_tree} trees violate an invariant"));
    out.check(bad_cap == 0, format!("{bad_cap} branch pairs break the cap (strict in P)"));
    out
}
