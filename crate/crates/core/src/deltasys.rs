//! Δ-system extraction, the ρ-gap refinement, and the Knaster harness that
//! chains them with the amalgamation.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ordinal::{Ordinal, OrdinalGrid};
use crate::par::Exec;
use crate::poset::{
    amalgamate_delta_pair, compatible, is_valid, isomorphic_fixing, Compatibility, Condition,
    ConditionSampler, Variant,
};
use crate::walk::Walker;

pub const HARNESS_HEADER: &str = "Finite samples cannot establish the Knaster property. This run only \
stresses the Δ-system, ρ-gap and amalgamation constructions on one pseudo-random sample.";

/// Finds a root `r` and a large subfamily whose pairwise intersections all
/// equal `r`. Candidate roots are `∅` and every pairwise intersection; for
/// each, members are taken greedily in input order and the largest result
/// wins. Returns the root and the chosen indices.
pub fn delta_system(sets: &[BTreeSet<Ordinal>]) -> (BTreeSet<Ordinal>, Vec<usize>) {
    match sets.len() {
        0 => return (BTreeSet::new(), Vec::new()),
        1 => return (sets[0].clone(), vec![0]),
        _ => {}
    }
    let mut roots: BTreeSet<BTreeSet<Ordinal>> = BTreeSet::new();
    roots.insert(BTreeSet::new());
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            roots.insert(a.intersection(b).cloned().collect());
        }
    }
    let mut best: (BTreeSet<Ordinal>, Vec<usize>) = (BTreeSet::new(), vec![0]);
    for root in roots {
        let mut chosen: Vec<usize> = Vec::new();
        for (i, s) in sets.iter().enumerate() {
            if !root.is_subset(s) {
                continue;
            }
            let fits = chosen.iter().all(|&j| {
                let meet: BTreeSet<Ordinal> = sets[j].intersection(s).cloned().collect();
                meet == root
            });
            if fits {
                chosen.push(i);
            }
        }
        if chosen.len() > best.1.len() {
            best = (root, chosen);
        }
    }
    best
}

/// Whether every pair from `members` meets exactly in `root`.
pub fn is_sunflower(sets: &[BTreeSet<Ordinal>], members: &[usize], root: &BTreeSet<Ordinal>) -> bool {
    members.iter().enumerate().all(|(k, &i)| {
        members[k + 1..].iter().all(|&j| {
            let meet: BTreeSet<Ordinal> = sets[i].intersection(&sets[j]).cloned().collect();
            &meet == root
        })
    })
}

/// Both gap bullets for the petals of `a` and `b` over `root`: every cross
/// pair has `ρ > ν` (when `nu` is given) and `ρ(α, β) ≥ min{ρ(γ, α), ρ(γ, β)}`
/// for every `γ` in the root.
pub fn gap_holds(
    a: &BTreeSet<Ordinal>,
    b: &BTreeSet<Ordinal>,
    root: &BTreeSet<Ordinal>,
    nu: Option<&Ordinal>,
    walker: &Walker,
) -> Result<bool> {
    for alpha in a.difference(root) {
        for beta in b.difference(root) {
            let rho = walker.rho_pair(alpha, beta)?;
            if nu.is_some_and(|nu| &rho <= nu) {
                return Ok(false);
            }
            for gamma in root {
                let low = walker.rho_pair(gamma, alpha)?.min(walker.rho_pair(gamma, beta)?);
                if rho < low {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Greedily keeps the members (indices into `sets`, in order) whose petals
/// satisfy [`gap_holds`] against every member already kept.
pub fn rho_gap_refine(
    sets: &[BTreeSet<Ordinal>],
    members: &[usize],
    root: &BTreeSet<Ordinal>,
    nu: Option<&Ordinal>,
    walker: &Walker,
) -> Result<Vec<usize>> {
    let mut kept: Vec<usize> = Vec::new();
    for &i in members {
        let mut ok = true;
        for &j in &kept {
            if !gap_holds(&sets[j], &sets[i], root, nu, walker)? {
                ok = false;
                break;
            }
        }
        if ok {
            kept.push(i);
        }
    }
    Ok(kept)
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinedFamily {
    pub members: Vec<Condition>,
    pub root: BTreeSet<Ordinal>,
    pub value_root: BTreeSet<Ordinal>,
    /// `ν = max(value_root)`; absent when the value root is empty.
    pub gap: Option<Ordinal>,
    /// Sizes after each stage: bucket, domain Δ-system, value Δ-system,
    /// isomorphism fixing the roots, value layout, ρ-gap.
    pub stages: Vec<(String, usize)>,
}

/// Isomorphism type used for bucketing: domain size, the value sets as ranks
/// in the value pool, and `ρ` on domain pairs truncated at `nu_bar`.
pub fn iso_key(c: &Condition, nu_bar: &Ordinal, walker: &Walker) -> Result<String> {
    let pool: Vec<Ordinal> = c.value_pool().into_iter().collect();
    let mut key = format!("{}|", c.len());
    for vals in c.entries().values() {
        let ranks: Vec<String> = vals
            .iter()
            .map(|v| pool.binary_search(v).expect("pool").to_string())
            .collect();
        key.push_str(&ranks.join(","));
        key.push('/');
    }
    key.push('|');
    let dom: Vec<&Ordinal> = c.dom().collect();
    for (i, a) in dom.iter().enumerate() {
        for b in &dom[i + 1..] {
            let rho = walker.rho(a, b)?.min(nu_bar.clone());
            key.push_str(&rho.to_string());
            key.push(',');
        }
    }
    Ok(key)
}

fn block_below(x: &BTreeSet<Ordinal>, y: &BTreeSet<Ordinal>) -> bool {
    match (x.last(), y.first()) {
        (Some(hi), Some(lo)) => hi.add(&Ordinal::omega()) <= *lo,
        _ => true,
    }
}

/// Runs the refinement pipeline on one bucket of pairwise isomorphic
/// conditions.
pub fn refine_bucket(bucket: &[Condition], walker: &Walker) -> Result<RefinedFamily> {
    let mut stages = vec![("bucket".to_string(), bucket.len())];
    let doms: Vec<BTreeSet<Ordinal>> = bucket.iter().map(Condition::dom_set).collect();
    let (root, members) = delta_system(&doms);
    stages.push(("domain-delta".into(), members.len()));

    let pools: Vec<BTreeSet<Ordinal>> = members.iter().map(|&i| bucket[i].value_pool()).collect();
    let (value_root, picked) = delta_system(&pools);
    let members: Vec<usize> = picked.iter().map(|&k| members[k]).collect();
    stages.push(("value-delta".into(), members.len()));

    let members: Vec<usize> = match members.first() {
        Some(&head) => members
            .iter()
            .copied()
            .filter(|&i| isomorphic_fixing(&bucket[head], &bucket[i], &root, &value_root).is_ok())
            .collect(),
        None => members,
    };
    stages.push(("isomorphic".into(), members.len()));

    // petals ordered by their least value, each a full ω-block above the last
    let petal = |i: usize| -> BTreeSet<Ordinal> {
        bucket[i].value_pool().difference(&value_root).cloned().collect()
    };
    let mut ordered: Vec<usize> = members
        .into_iter()
        .filter(|&i| value_root.last().is_none_or(|top| petal(i).first().is_none_or(|lo| lo > top)))
        .collect();
    ordered.sort_by_key(|&i| (petal(i).first().cloned(), i));
    let mut laid: Vec<usize> = Vec::new();
    for i in ordered {
        if laid.last().is_none_or(|&j| block_below(&petal(j), &petal(i))) {
            laid.push(i);
        }
    }
    stages.push(("layout".into(), laid.len()));

    let gap = value_root.last().cloned();
    let kept = rho_gap_refine(&doms, &laid, &root, gap.as_ref(), walker)?;
    stages.push(("rho-gap".into(), kept.len()));

    Ok(RefinedFamily {
        members: kept.iter().map(|&i| bucket[i].clone()).collect(),
        root,
        value_root,
        gap,
        stages,
    })
}

#[derive(Debug, Clone)]
pub struct KnasterConfig {
    pub n: usize,
    pub seed: u64,
    pub variant: Variant,
    /// Coefficient cap of the grid the domain points come from.
    pub grid_cap: u64,
    pub grid_depth: u32,
    pub points: (usize, usize),
    pub values: (usize, usize),
    pub blocks: u64,
    pub offsets: u64,
    pub exec: Exec,
}

impl KnasterConfig {
    pub fn new(n: usize, seed: u64, variant: Variant) -> Self {
        KnasterConfig {
            n,
            seed,
            variant,
            grid_cap: 2,
            grid_depth: 2,
            points: (1, 3),
            values: (1, 3),
            blocks: 6,
            offsets: 1,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairFailure {
    pub bucket: usize,
    pub left: usize,
    pub right: usize,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BucketSummary {
    pub key: String,
    pub stages: Vec<(String, usize)>,
    pub root: BTreeSet<Ordinal>,
    pub value_root: BTreeSet<Ordinal>,
    pub pairs: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct KnasterReport {
    pub header: String,
    pub family: String,
    pub variant: String,
    pub n: usize,
    pub seed: u64,
    pub generated: usize,
    pub buckets: usize,
    /// The refined family of the bucket with the most survivors.
    pub refined_size: usize,
    pub best: Option<RefinedFamily>,
    /// Buckets whose refined family has at least two members.
    pub checked_buckets: Vec<BucketSummary>,
    pub pairs_checked: usize,
    pub incompatible: Vec<PairFailure>,
    pub amalgams_confirmed: usize,
    /// Pairs where the amalgamation's hypotheses fail; compatibility was still
    /// decided by the closure procedure.
    pub amalgam_skipped: Vec<PairFailure>,
    /// Amalgams that were built but failed the independent check.
    pub amalgam_rejected: Vec<PairFailure>,
}

impl KnasterReport {
    pub fn passed(&self) -> bool {
        self.refined_size >= 2 && self.incompatible.is_empty() && self.amalgam_rejected.is_empty()
    }
}

enum PairOutcome {
    Confirmed,
    Skipped(String),
    Rejected(String),
    Incompatible(String),
}

fn check_pair(p: &Condition, q: &Condition, fam: &RefinedFamily, variant: &Variant, walker: &Walker) -> Result<PairOutcome> {
    let decided = compatible(p, q, variant, walker)?;
    let Compatibility::Compatible { .. } = decided else {
        let cert = decided.certificate().expect("incompatible");
        return Ok(PairOutcome::Incompatible(format!("{:?}", cert.obstruction)));
    };
    // the amalgamation expects p's petal values below q's
    let petal_min = |c: &Condition| c.value_pool().difference(&fam.value_root).next().cloned();
    let (lo, hi) = if petal_min(p) <= petal_min(q) { (p, q) } else { (q, p) };
    match amalgamate_delta_pair(lo, hi, &fam.root, variant, walker) {
        Ok(r) => {
            if r.extends(p) && r.extends(q) && is_valid(&r, &variant.base(), walker)? {
                Ok(PairOutcome::Confirmed)
            } else {
                Ok(PairOutcome::Rejected(format!("amalgam {r} does not check out")))
            }
        }
        Err(Error::Hypothesis { clause, detail }) => Ok(PairOutcome::Skipped(format!("{clause}: {detail}"))),
        Err(e) => Err(e),
    }
}

/// Samples `n` valid conditions over a grid of the walker's family, buckets
/// them by [`iso_key`], refines every bucket with [`refine_bucket`] and checks
/// every pair in every refined family of size at least two. Deterministic in
/// the seed.
pub fn knaster_harness(config: &KnasterConfig, walker: &Walker) -> Result<KnasterReport> {
    if config.n < 2 {
        return Err(Error::Precondition("the harness needs at least two conditions".into()));
    }
    let family = walker.family();
    let grid = OrdinalGrid::new(family.bound(), config.grid_cap, config.grid_depth)?;
    let mut sampler = ConditionSampler::new(grid.points().to_vec());
    sampler.points = config.points;
    sampler.values = config.values;
    sampler.blocks = config.blocks;
    sampler.offsets = config.offsets;
    let nu_bar = Ordinal::omega().mul_nat(config.blocks);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut sample = Vec::with_capacity(config.n);
    for _ in 0..config.n {
        if let Some(c) = sampler.sample(&mut rng, &config.variant, walker)? {
            sample.push(c);
        }
    }

    let keys = config.exec.try_map_range(sample.len(), |i| iso_key(&sample[i], &nu_bar, walker))?;
    let mut buckets: BTreeMap<String, Vec<Condition>> = BTreeMap::new();
    for (k, c) in keys.into_iter().zip(&sample) {
        buckets.entry(k).or_default().push(c.clone());
    }
    let bucket_list: Vec<(&String, &Vec<Condition>)> = buckets.iter().collect();
    let refined = config
        .exec
        .try_map_range(bucket_list.len(), |i| refine_bucket(bucket_list[i].1, walker))?;

    let mut report = KnasterReport {
        header: HARNESS_HEADER.to_string(),
        family: family.name(),
        variant: config.variant.to_string(),
        n: config.n,
        seed: config.seed,
        generated: sample.len(),
        buckets: buckets.len(),
        refined_size: 0,
        best: None,
        checked_buckets: Vec::new(),
        pairs_checked: 0,
        incompatible: Vec::new(),
        amalgams_confirmed: 0,
        amalgam_skipped: Vec::new(),
        amalgam_rejected: Vec::new(),
    };

    for (b, fam) in refined.iter().enumerate() {
        if fam.members.len() > report.refined_size {
            report.refined_size = fam.members.len();
            report.best = Some(fam.clone());
        }
        if fam.members.len() < 2 {
            continue;
        }
        let m = fam.members.len();
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
        let outcomes = config.exec.try_map_range(pairs.len(), |k| {
            let (i, j) = pairs[k];
            check_pair(&fam.members[i], &fam.members[j], fam, &config.variant, walker)
        })?;
        for ((i, j), outcome) in pairs.iter().zip(outcomes) {
            let failure = |detail: String| PairFailure {
                bucket: b,
                left: *i,
                right: *j,
                detail,
            };
            match outcome {
                PairOutcome::Confirmed => report.amalgams_confirmed += 1,
                PairOutcome::Skipped(d) => report.amalgam_skipped.push(failure(d)),
                PairOutcome::Rejected(d) => report.amalgam_rejected.push(failure(d)),
                PairOutcome::Incompatible(d) => report.incompatible.push(failure(d)),
            }
        }
        report.pairs_checked += pairs.len();
        report.checked_buckets.push(BucketSummary {
            key: bucket_list[b].0.clone(),
            stages: fam.stages.clone(),
            root: fam.root.clone(),
            value_root: fam.value_root.clone(),
            pairs: pairs.len(),
        });
    }
    Ok(report)
}
