use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::ValueEnum;
use serde::Deserialize;

use rhowalk::csequence::{load_family_file, parse_family_spec, CSequence};
use rhowalk::poset::Variant;
use rhowalk::Ordinal;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
    Dot,
}

/// Defaults read from the TOML file named by `RHOWALK_CONFIG` (or `--config`).
/// Every key is optional; flags win over the file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub family: Option<String>,
    pub omega: Option<String>,
    pub bound: Option<String>,
    pub tier: Option<String>,
    pub cap: Option<u64>,
    pub depth: Option<u32>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub variant: Option<String>,
    pub no_validate: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// `f1`, `f2`, `f3`, or a path to a family file.
    pub family: String,
    pub omega: Ordinal,
    pub bound: Ordinal,
    pub tier: Option<Ordinal>,
    pub cap: u64,
    pub depth: u32,
    pub seed: u64,
    pub format: Format,
    pub variant: Variant,
    pub validate: bool,
}

pub fn ordinal(text: &str) -> Result<Ordinal, Failure> {
    text.parse::<Ordinal>()
        .map_err(|e| Failure::Usage(format!("`{text}`: {e}")))
}

impl RunConfig {
    pub fn resolve(flags: &crate::Global, file: FileConfig) -> Result<Self, Failure> {
        let pick = |flag: &Option<String>, file: Option<String>, default: &str| {
            flag.clone().or(file).unwrap_or_else(|| default.to_string())
        };
        let cap = flags.cap.or(file.cap).unwrap_or(3);
        let depth = flags.depth.or(file.depth).unwrap_or(2);
        if cap == 0 || depth == 0 {
            return Err(Failure::Usage("--cap and --depth must be positive".into()));
        }
        let tier = match flags.tier.clone().or(file.tier) {
            Some(t) => Some(ordinal(&t)?),
            None => None,
        };
        let variant = pick(&flags.variant, file.variant, "q");
        Ok(RunConfig {
            family: pick(&flags.family, file.family, "f3"),
            omega: ordinal(&pick(&flags.omega, file.omega, "w^2"))?,
            bound: ordinal(&pick(&flags.bound, file.bound, "w^4"))?,
            tier,
            cap,
            depth,
            seed: flags.seed.or(file.seed).unwrap_or(0),
            format: flags.format.or(file.format).unwrap_or(Format::Text),
            variant: variant.parse().map_err(Failure::Usage)?,
            validate: !(flags.no_validate || file.no_validate.unwrap_or(false)),
        })
    }

    pub fn build_family(&self) -> Result<Arc<dyn CSequence>, Failure> {
        let spec = match self.family.as_str() {
            "f1" | "f2" => {
                let mut words = vec![self.family.clone(), self.bound.to_string()];
                if let (Some(t), "f2") = (&self.tier, self.family.as_str()) {
                    words.push(t.to_string());
                }
                words
            }
            "f3" => vec![self.family.clone(), self.omega.to_string()],
            path => {
                let family = load_family_file(&PathBuf::from(path))
                    .map_err(|e| Failure::Usage(e.to_string()))?;
                return Ok(Arc::new(family));
            }
        };
        let words: Vec<&str> = spec.iter().map(String::as_str).collect();
        let spec = parse_family_spec(&words).map_err(Failure::Usage)?;
        spec.build().map_err(|e| Failure::Usage(e.to_string()))
    }

    pub fn require_format(&self, allowed: &[Format]) -> Result<Format, Failure> {
        if allowed.contains(&self.format) {
            Ok(self.format)
        } else {
            Err(Failure::Usage(format!(
                "format {:?} is not available for this command",
                self.format
            )))
        }
    }
}
