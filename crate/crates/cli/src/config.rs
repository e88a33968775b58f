//! Building a [`SuiteConfig`] from built-in defaults, `TRANSMUTE_SEED`, an
//! optional config file and command-line flags, in increasing precedence.
//!
//! The config file is flat `key = value` lines whose keys are the long flag
//! names without dashes (`seed`, `n`, `identities`, `band-z`, ...). Blank
//! lines and lines starting with `#` are ignored.

use std::path::{Path, PathBuf};

use transmute::catalog::parse_selection;
use transmute::engine::{OutputFormat, SuiteConfig};

pub const SEED_ENV: &str = "TRANSMUTE_SEED";

/// Every run setting, each optional so that layers can be merged.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Overrides {
    pub identities: Option<String>,
    pub n: Option<usize>,
    pub replicates: Option<u32>,
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub band_z: Option<f64>,
    pub k_values: Option<Vec<u32>>,
    pub n_values: Option<Vec<u32>>,
    pub timings: Option<bool>,
}

impl Overrides {
    /// Fields set in `other` replace those in `self`.
    pub fn layer(self, other: Overrides) -> Overrides {
        Overrides {
            identities: other.identities.or(self.identities),
            n: other.n.or(self.n),
            replicates: other.replicates.or(self.replicates),
            seed: other.seed.or(self.seed),
            alpha: other.alpha.or(self.alpha),
            out: other.out.or(self.out),
            format: other.format.or(self.format),
            band_z: other.band_z.or(self.band_z),
            k_values: other.k_values.or(self.k_values),
            n_values: other.n_values.or(self.n_values),
            timings: other.timings.or(self.timings),
        }
    }

    pub fn into_config(self) -> Result<SuiteConfig, String> {
        let mut config = SuiteConfig::default();
        if let Some(s) = &self.identities {
            config.identities = parse_selection(s).map_err(|e| e.to_string())?;
        }
        if let Some(n) = self.n {
            config.n = n;
        }
        if let Some(r) = self.replicates {
            config.replicates = r;
        }
        if let Some(seed) = self.seed {
            config.master_seed = seed;
        }
        if let Some(alpha) = self.alpha {
            config.alpha = alpha;
        }
        config.output_path = self.out;
        if let Some(format) = self.format {
            config.output_format = format;
        }
        if let Some(z) = self.band_z {
            config.band_z = z;
        }
        if let Some(k) = self.k_values {
            config.i7_k_values = k;
        }
        if let Some(n) = self.n_values {
            config.i8_n_values = n;
        }
        if let Some(t) = self.timings {
            config.record_timings = t;
        }
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }
}

pub fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "json" => Ok(OutputFormat::Json),
        "csv" => Ok(OutputFormat::Csv),
        other => Err(format!("unknown output format `{other}` (expected json or csv)")),
    }
}

pub fn parse_u32_list(s: &str) -> Result<Vec<u32>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<u32>().map_err(|e| format!("bad integer `{p}`: {e}")))
        .collect()
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(format!("expected a boolean, got `{other}`")),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| format!("bad value for `{key}`: `{value}` ({e})"))
}

pub fn parse_config_text(text: &str) -> Result<Overrides, String> {
    let mut o = Overrides::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", lineno + 1))?;
        let key = key.trim().trim_start_matches("--");
        let value = value.trim();
        let at = |e: String| format!("line {}: {e}", lineno + 1);
        match key {
            "identities" => o.identities = Some(value.to_string()),
            "n" => o.n = Some(parse_num(key, value).map_err(at)?),
            "replicates" => o.replicates = Some(parse_num(key, value).map_err(at)?),
            "seed" => o.seed = Some(parse_num(key, value).map_err(at)?),
            "alpha" => o.alpha = Some(parse_num(key, value).map_err(at)?),
            "out" => o.out = Some(PathBuf::from(value)),
            "format" => o.format = Some(parse_format(value).map_err(at)?),
            "band-z" | "band_z" => o.band_z = Some(parse_num(key, value).map_err(at)?),
            "k-values" | "k_values" => o.k_values = Some(parse_u32_list(value).map_err(at)?),
            "n-values" | "n_values" => o.n_values = Some(parse_u32_list(value).map_err(at)?),
            "timings" => o.timings = Some(parse_bool(value).map_err(at)?),
            other => return Err(at(format!("unknown key `{other}`"))),
        }
    }
    Ok(o)
}

pub fn read_config_file(path: &Path) -> Result<Overrides, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    parse_config_text(&text)
}

pub fn env_layer(value: Option<String>) -> Result<Overrides, String> {
    match value {
        None => Ok(Overrides::default()),
        Some(v) => Ok(Overrides {
            seed: Some(
                v.trim()
                    .parse()
                    .map_err(|e| format!("{SEED_ENV} must be an unsigned 64-bit integer: {e}"))?,
            ),
            ..Overrides::default()
        }),
    }
}
