use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use rhowalk::csequence::{validate_family, FamilyReport};
use rhowalk::deltasys::{delta_system, knaster_harness, rho_gap_refine, KnasterConfig};
use rhowalk::lemmas::{run_suite, SuiteConfig};
use rhowalk::ordinal::OrdinalGrid;
use rhowalk::par::Exec;
use rhowalk::poset::{compatible, project_below, project_to_countable, validate_condition, Condition};
use rhowalk::table::RhoTable;
use rhowalk::tree::{build_filter, check_tree, parse_requirements, tree_of};
use rhowalk::walk::Walker;
use rhowalk::{Error, Ordinal};

use crate::config::{ordinal, Format, RunConfig};
use crate::{Command, Failure, Status};

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Ok
    } else {
        Status::Violations
    }
}

fn joined(items: &[Ordinal]) -> String {
    items.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(", ")
}

fn read_condition(path: &Path) -> Result<Condition, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn sweep(cfg: &RunConfig, bound: &Ordinal) -> Result<OrdinalGrid, Failure> {
    OrdinalGrid::new(bound, cfg.cap, cfg.depth).map_err(usage)
}

fn family_report(cfg: &RunConfig, walker: &Walker) -> Result<FamilyReport, Failure> {
    let family = walker.family();
    let grid = sweep(cfg, family.bound())?;
    validate_family(family.as_ref(), &grid).map_err(usage)
}

fn print_family_report(report: &FamilyReport, format: Format) -> Result<(), Failure> {
    if format == Format::Json {
        return print_json(report);
    }
    println!(
        "family {}: {} limits, {} coherence checks, {} violations",
        report.family,
        report.limits_checked,
        report.coherence_checks,
        report.violations.len()
    );
    for v in &report.violations {
        println!("  {:?} at {}: {}", v.clause, v.alpha, v.detail);
    }
    Ok(())
}

pub fn dispatch(cfg: &RunConfig, command: Command) -> Result<Status, Failure> {
    let walker = Walker::new(cfg.build_family()?);
    if let Command::ValidateFamily = command {
        let format = cfg.require_format(&[Format::Text, Format::Json])?;
        let report = family_report(cfg, &walker)?;
        print_family_report(&report, format)?;
        return Ok(status(report.passed()));
    }
    if cfg.validate {
        let report = family_report(cfg, &walker)?;
        if !report.passed() {
            eprintln!("family failed validation; rerun with --no-validate to skip the check");
            print_family_report(&report, cfg.format)?;
            return Ok(Status::Violations);
        }
    }
    match command {
        Command::ValidateFamily => unreachable!(),
        Command::Rho { a, b } => rho(cfg, &walker, &a, &b),
        Command::Walk { a, b } => walk(cfg, &walker, &a, &b),
        Command::Table { bound } => table(cfg, &walker, &bound),
        Command::ValidateCond { file } => validate_cond(cfg, &walker, &file),
        Command::Compatible { first, second } => compat(cfg, &walker, &first, &second),
        Command::ProjectQc { file } => project_qc(cfg, &walker, &file),
        Command::ProjectMu { file, mu } => project_mu(cfg, &walker, &file, &mu),
        Command::Delta { file, nu } => delta(cfg, &walker, &file, nu.as_deref()),
        Command::Knaster { n } => knaster(cfg, &walker, n),
        Command::Simulate { script, budget } => simulate(cfg, &walker, &script, budget),
        Command::Lemmas { bound } => lemmas(cfg, &walker, &bound),
    }
}

fn rho(cfg: &RunConfig, walker: &Walker, a: &str, b: &str) -> Result<Status, Failure> {
    let format = cfg.require_format(&[Format::Text, Format::Json])?;
    let (alpha, beta) = (ordinal(a)?, ordinal(b)?);
    let rho = walker.rho(&alpha, &beta).map_err(usage)?;
    if format == Format::Json {
        #[derive(Serialize)]
        struct Out<'a> {
            alpha: &'a Ordinal,
            beta: &'a Ordinal,
            rho: &'a Ordinal,
        }
        print_json(&Out {
            alpha: &alpha,
            beta: &beta,
            rho: &rho,
        })?;
    } else {
        println!("{rho}");
    }
    Ok(Status::Ok)
}

fn walk(cfg: &RunConfig, walker: &Walker, a: &str, b: &str) -> Result<Status, Failure> {
    let format = cfg.require_format(&[Format::Text, Format::Json])?;
    let trace = walker.walk(&ordinal(a)?, &ordinal(b)?).map_err(usage)?;
    if format == Format::Json {
        print_json(&trace)?;
    } else {
        println!("upper:   {}", joined(&trace.upper));
        println!("lower:   {}", joined(&trace.lower));
        println!("lambdas: {}", joined(&trace.lambdas));
        println!("rho:     {}", trace.rho);
    }
    Ok(Status::Ok)
}

fn table(cfg: &RunConfig, walker: &Walker, bound: &str) -> Result<Status, Failure> {
    let bound = ordinal(bound)?;
    if &bound > walker.family().bound() {
        return Err(Failure::Usage(format!(
            "{bound} exceeds the family bound {}",
            walker.family().bound()
        )));
    }
    let table = RhoTable::build(walker, sweep(cfg, &bound)?, Exec::default()).map_err(usage)?;
    match cfg.require_format(&[Format::Text, Format::Json, Format::Csv])? {
        Format::Json => print_json(&table.records().collect::<Vec<_>>())?,
        Format::Csv => {
            let mut out = csv::Writer::from_writer(std::io::stdout());
            for record in table.records() {
                out.serialize(record).map_err(|e| Failure::Usage(e.to_string()))?;
            }
            out.flush().map_err(|e| Failure::Usage(e.to_string()))?;
        }
        _ => {
            for r in table.records() {
                println!("rho({}, {}) = {}", r.alpha, r.beta, r.rho);
            }
        }
    }
    Ok(Status::Ok)
}

fn validate_cond(cfg: &RunConfig, walker: &Walker, file: &Path) -> Result<Status, Failure> {
    let format = cfg.require_format(&[Format::Text, Format::Json])?;
    let p = read_condition(file)?;
    let report = validate_condition(&p, &cfg.variant, walker).map_err(usage)?;
    if format == Format::Json {
        print_json(&report)?;
    } else if report.valid() {
        println!("valid in {}", report.variant);
    } else {
        println!("invalid in {}: {} violations", report.variant, report.violations.len());
        for v in &report.violations {
            println!("  {:?} at {}: {}", v.clause, v.alpha, v.detail);
        }
    }
    Ok(status(report.valid()))
}

fn compat(cfg: &RunConfig, walker: &Walker, first: &Path, second: &Path) -> Result<Status, Failure> {
    let format = cfg.require_format(&[Format::Text, Format::Json])?;
    let (p, q) = (read_condition(first)?, read_condition(second)?);
    let result = compatible(&p, &q, &cfg.variant, walker).map_err(usage)?;
    if format == Format::Json {
        print_json(&result)?;
    } else if let Some(w) = result.witness() {
        println!("compatible");
        println!("witness: {w}");
    } else if let Some(cert) = result.certificate() {
        println!("incompatible");
        for step in &cert.derivation {
            println!(
                "  forced {} into r({}) below {} from r({})",
                step.value, step.into, step.above, step.from
            );
        }
        let obstruction = serde_json::to_string(&cert.obstruction).unwrap_or_default();
        println!("  obstruction: {obstruction}");
    }
    Ok(Status::Ok)
}

/// Search failures are reported as violations; anything else is a usage error.
fn search_outcome<T: Serialize>(
    result: rhowalk::Result<T>,
    format: Format,
    text: impl FnOnce(&T),
) -> Result<Status, Failure> {
    match result {
        Ok(value) => {
            if format == Format::Json {
                print_json(&value)?;
            } else {
                text(&value);
            }
            Ok(Status::Ok)
        }
        Err(e @ Error::SearchExhausted(_)) => {
            println!("{e}");
            Ok(Status::Violations)
        }
        Err(e) => Err(usage(e)),
    }
}

fn print_moved(moved: &[(Ordinal, Ordinal)]) {
    for (from, to) in moved {
        println!("  {from} -> {to}");
    }
}

fn project_qc(cfg: &RunConfig, walker: &Walker, file: &Path) -> Result<Status, Failure> {
    let format = cfg.require_format(&[Format::Text, Format::Json])?;
    let q = read_condition(file)?;
    let grid = sweep(cfg, walker.family().bound())?;
    search_outcome(project_to_countable(&q, walker, &grid), format, |p| {
        println!("{}", p.condition);
        print_moved(&p.moved);
    })
}

fn project_mu(cfg: &RunConfig, walker: &Walker, file: &Path, mu: &str) -> Result<Status, Failure> {
    let format = cfg.require_format(&[Format::Text, Format::Json])?;
    let q = read_condition(file)?;
    let mu = ordinal(mu)?;
    let grid = sweep(cfg, walker.family().bound())?;
    search_outcome(project_below(&q, &mu, walker, &grid), format, |p| {
        println!("{}", p.condition);
        println!("  nu_bar = {}, mu0 = {}", p.nu_bar, p.mu0);
        print_moved(&p.moved);
    })
}

/// One entry of a `delta` input: a plain set of ordinals or a condition,
/// whose domain is used.
#[derive(Deserialize)]
#[serde(untagged)]
enum DeltaEntry {
    Set(BTreeSet<Ordinal>),
    Condition(Condition),
}

fn delta(cfg: &RunConfig, walker: &Walker, file: &Path, nu: Option<&str>) -> Result<Status, Failure> {
    let format = cfg.require_format(&[Format::Text, Format::Json])?;
    let text = std::fs::read_to_string(file)
        .map_err(|e| Failure::Usage(format!("{}: {e}", file.display())))?;
    let entries: Vec<DeltaEntry> = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", file.display())))?;
    let sets: Vec<BTreeSet<Ordinal>> = entries
        .into_iter()
        .map(|e| match e {
            DeltaEntry::Set(s) => s,
            DeltaEntry::Condition(c) => c.dom_set(),
        })
        .collect();
    let nu = nu.map(ordinal).transpose()?;
    let (root, members) = delta_system(&sets);
    let refined = rho_gap_refine(&sets, &members, &root, nu.as_ref(), walker).map_err(usage)?;
    if format == Format::Json {
        #[derive(Serialize)]
        struct Out<'a> {
            sets: usize,
            root: &'a BTreeSet<Ordinal>,
            members: &'a [usize],
            refined: &'a [usize],
        }
        print_json(&Out {
            sets: sets.len(),
            root: &root,
            members: &members,
            refined: &refined,
        })?;
    } else {
        let root: Vec<Ordinal> = root.into_iter().collect();
        println!("sets:    {}", sets.len());
        println!("root:    {{{}}}", joined(&root));
        println!("members: {members:?}");
        println!("refined: {refined:?}");
    }
    Ok(Status::Ok)
}

fn knaster(cfg: &RunConfig, walker: &Walker, n: usize) -> Result<Status, Failure> {
    let format = cfg.require_format(&[Format::Text, Format::Json])?;
    let config = KnasterConfig::new(n, cfg.seed, cfg.variant.clone());
    let report = knaster_harness(&config, walker).map_err(usage)?;
    if format == Format::Json {
        print_json(&report)?;
    } else {
        println!("{}", report.header);
        println!(
            "{} in {}, n = {}, seed = {}: {} generated, {} buckets",
            report.family, report.variant, report.n, report.seed, report.generated, report.buckets
        );
        println!(
            "largest refined family {}, {} pairs checked, {} incompatible",
            report.refined_size,
            report.pairs_checked,
            report.incompatible.len()
        );
        println!(
            "amalgams: {} confirmed, {} skipped, {} rejected",
            report.amalgams_confirmed,
            report.amalgam_skipped.len(),
            report.amalgam_rejected.len()
        );
        for f in report.incompatible.iter().chain(&report.amalgam_rejected) {
            println!("  bucket {} ({}, {}): {}", f.bucket, f.left, f.right, f.detail);
        }
        println!("{}", if report.passed() { "PASS" } else { "FAIL" });
    }
    Ok(status(report.passed()))
}

fn simulate(
    cfg: &RunConfig,
    walker: &Walker,
    script: &Path,
    budget: Option<usize>,
) -> Result<Status, Failure> {
    let format = cfg.require_format(&[Format::Text, Format::Json, Format::Dot])?;
    let text = std::fs::read_to_string(script)
        .map_err(|e| Failure::Usage(format!("{}: {e}", script.display())))?;
    let reqs = parse_requirements(&text).map_err(usage)?;
    let budget = budget.unwrap_or(reqs.len());
    let filter = build_filter(&reqs, cfg.seed, budget, &cfg.variant, walker).map_err(usage)?;
    let tree = match tree_of(&filter, walker) {
        Ok(t) => t,
        Err(e @ Error::TreeInvariant(_)) => {
            println!("{e}");
            return Ok(Status::Violations);
        }
        Err(e) => return Err(usage(e)),
    };
    let report = check_tree(&tree, &cfg.variant, walker).map_err(usage)?;
    match format {
        Format::Dot => print!("{}", tree.to_dot()),
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a, F, T, R> {
                filter: &'a F,
                tree: &'a T,
                report: &'a R,
            }
            print_json(&Out {
                filter: &filter,
                tree: &tree,
                report: &report,
            })?;
        }
        _ => {
            println!(
                "{} requirements: {} met, {} unmet",
                reqs.len(),
                filter.met.len(),
                filter.unmet.len()
            );
            for u in &filter.unmet {
                println!("  unmet `{}`: {}", u.requirement, u.reason);
            }
            println!("final condition: {}", filter.last());
            println!("tree: {} nodes, {} branches", tree.node_count(), tree.branches.len());
            println!("{} pairs checked, {} violations", report.pairs.len(), report.violations.len());
        }
    }
    Ok(status(report.passed()))
}

fn lemmas(cfg: &RunConfig, walker: &Walker, bound: &str) -> Result<Status, Failure> {
    let format = cfg.require_format(&[Format::Text, Format::Json])?;
    let bound = ordinal(bound)?;
    let table = RhoTable::build(walker, sweep(cfg, &bound)?, Exec::default()).map_err(usage)?;
    let report = run_suite(walker, &table, &SuiteConfig::default()).map_err(usage)?;
    if format == Format::Json {
        print_json(&report)?;
    } else {
        println!(
            "{} below {} (cap {}): {} points, {} pairs",
            report.family, report.bound, report.cap, report.points, report.pairs
        );
        for r in &report.lemmas {
            println!(
                "{:<15} {}  checked {}, violations {}, unresolved {}",
                r.lemma.name(),
                if r.passed() { "pass" } else { "FAIL" },
                r.checked,
                r.violation_count,
                r.unresolved
            );
            for v in r.violations.iter().take(3) {
                println!("    at ({}): {}", joined(&v.points), v.detail);
            }
        }
        let passed = report.lemmas.iter().filter(|r| r.passed()).count();
        println!("{passed}/{} lemma suites pass", report.lemmas.len());
    }
    Ok(status(report.passed()))
}
