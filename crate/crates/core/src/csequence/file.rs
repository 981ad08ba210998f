//! Text format for explicit C-sequences.
//!
//! ```text
//! # comment
//! name  my-family          (optional)
//! base  f3 w^2             (optional: f1 BOUND | f2 BOUND [TIER] | f3 OMEGA)
//! bound w^4                (required when there is no base)
//! w*2 = {w+1, w+3}         explicit finite C-set
//! w^2 = {}
//! ```

use std::path::Path;
use std::sync::Arc;

use super::club::Club;
use super::family::{CSequence, FamilySpec, OverlayFamily};
use crate::error::{Error, Result};
use crate::ordinal::Ordinal;

pub fn parse_family_spec(words: &[&str]) -> std::result::Result<FamilySpec, String> {
    let ordinal = |s: &str| s.parse::<Ordinal>().map_err(|e| e.to_string());
    match words {
        ["f1", bound] => Ok(FamilySpec::F1 {
            bound: ordinal(bound)?,
        }),
        ["f2", bound] => Ok(FamilySpec::F2 {
            bound: ordinal(bound)?,
            tier: None,
        }),
        ["f2", bound, tier] => Ok(FamilySpec::F2 {
            bound: ordinal(bound)?,
            tier: Some(ordinal(tier)?),
        }),
        ["f3", omega] => Ok(FamilySpec::F3 {
            omega: ordinal(omega)?,
        }),
        _ => Err(format!("unrecognized family `{}`", words.join(" "))),
    }
}

pub fn parse_family_text(text: &str) -> Result<OverlayFamily> {
    let mut name = String::from("file");
    let mut base: Option<Arc<dyn CSequence>> = None;
    let mut bound: Option<Ordinal> = None;
    let mut entries = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| Error::FamilyFile {
            line: line_no,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((key, set)) = line.split_once('=') {
            let key: Ordinal = key.trim().parse().map_err(|e| err(format!("{e}")))?;
            let set = set.trim();
            let inner = set
                .strip_prefix('{')
                .and_then(|s| s.strip_suffix('}'))
                .ok_or_else(|| err("expected `{...}`".into()))?;
            let mut elements = Vec::new();
            for item in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let x: Ordinal = item.parse().map_err(|e| err(format!("{e}")))?;
                if x >= key {
                    return Err(err(format!("element {x} is not below {key}")));
                }
                elements.push(x);
            }
            entries.push((key, Club::finite(elements)));
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["name", n] => name = n.to_string(),
            ["bound", b] => bound = Some(b.parse().map_err(|e| err(format!("{e}")))?),
            ["base", rest @ ..] => {
                let spec = parse_family_spec(rest).map_err(err)?;
                base = Some(spec.build()?);
            }
            _ => return Err(err(format!("cannot parse `{line}`"))),
        }
    }

    let bound = match (bound, &base) {
        (Some(b), _) => b,
        (None, Some(base)) => base.bound().clone(),
        (None, None) => {
            return Err(Error::FamilyFile {
                line: 0,
                message: "either `base` or `bound` is required".into(),
            })
        }
    };
    let mut family = OverlayFamily::new(name, base, bound);
    for (k, c) in entries {
        family.set(k, c);
    }
    Ok(family)
}

pub fn load_family_file(path: &Path) -> Result<OverlayFamily> {
    parse_family_text(&std::fs::read_to_string(path)?)
}
