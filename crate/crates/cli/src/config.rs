//! Flat `key = value` run configuration.
//!
//! One key per line, `#` starts a comment, blank lines are ignored. Keys and
//! defaults:
//!
//! | key | default | meaning |
//! |---|---|---|
//! | `v` | `1` | schema version, only 1 is understood |
//! | `dim` | required | spatial dimension `N` |
//! | `geometry` | `line` for `N = 1`, else `exterior` | `line` or `exterior` |
//! | `r_in` | `1` | obstacle radius for `exterior` |
//! | `r_outer` | cone rule | truncation radius (half-width on the line) |
//! | `h`, `tau` | `0.05`, `0.025` | grid spacing and time step |
//! | `t_max` | `100` | horizon |
//! | `t0` | `1` | weight time shift |
//! | `lambda` | `0` | weight exponent, in `[0, N/2)` |
//! | `nonlinearity` | `odd_power` | `odd_power`, `absolute_power` or `zero` |
//! | `p` | required unless `zero` | power |
//! | `profile` | `bump` | `bump`, `poly_tail` or `self_similar` |
//! | `center`, `radius` | `0` (line) or `r_in + radius + 1`, `2` | bump placement |
//! | `mu`, `r_cut` | required for `poly_tail` | tail exponent and cut |
//! | `beta`, `r_cut` | required for `self_similar` | profile `Φ_β(·, 0)` and cut |
//! | `epsilon`, `u1_factor` | `1`, `0` | `u₀ = ε·profile`, `u₁ = u1_factor·u₀` |
//! | `blowup_threshold` | `1e6` | sup-norm blowup criterion |
//! | `report_every` | `1` | time between reports |
//! | `seed` | `0` | recorded in the manifest |

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use dampwave_core::grid::Geometry;
use dampwave_core::solver::{
    DomainSpec, InitialData, InitialProfile, NonlinearityKind, NonlinearitySpec, SimConfig, DEFAULT_BLOWUP_THRESHOLD,
};
use dampwave_core::weights::WeightParams;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

const KEYS: &[&str] = &[
    "v",
    "dim",
    "geometry",
    "r_in",
    "r_outer",
    "h",
    "tau",
    "t_max",
    "t0",
    "lambda",
    "nonlinearity",
    "p",
    "profile",
    "center",
    "radius",
    "mu",
    "r_cut",
    "beta",
    "epsilon",
    "u1_factor",
    "blowup_threshold",
    "report_every",
    "seed",
];

/// Diagnostic for a rejected configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigError {
    /// 1-based line of the offending entry, when there is one.
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.key) {
            (Some(l), Some(k)) => write!(f, "line {l}, key {k}: {}", self.message),
            (None, Some(k)) => write!(f, "key {k}: {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn error(line: Option<usize>, key: Option<&str>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        key: key.map(str::to_string),
        message: message.into(),
    }
}

/// A resolved configuration together with its run seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub sim: SimConfig,
    pub seed: u64,
}

struct Entries {
    values: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.values.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| error(Some(line), Some(key), format!("cannot parse {v:?}"))),
        }
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn required<T: FromStr>(&self, key: &str, why: &str) -> Result<T, ConfigError> {
        self.get(key)?
            .ok_or_else(|| error(None, Some(key), format!("missing required key ({why})")))
    }

    /// Attaches the line of `key` to a validation failure.
    fn blame(&self, key: &str, message: impl Into<String>) -> ConfigError {
        error(self.raw(key).map(|(l, _)| l), Some(key), message)
    }
}

fn tokenize(text: &str) -> Result<Entries, ConfigError> {
    let mut values = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(error(Some(line), None, format!("expected key = value, got {content:?}")));
        };
        let (k, v) = (k.trim().to_ascii_lowercase(), v.trim());
        if !KEYS.contains(&k.as_str()) {
            return Err(error(Some(line), Some(&k), "unknown key"));
        }
        if v.is_empty() {
            return Err(error(Some(line), Some(&k), "empty value"));
        }
        if let Some((first, _)) = values.insert(k.clone(), (line, v.to_string())) {
            return Err(error(Some(line), Some(&k), format!("duplicate key, first set on line {first}")));
        }
    }
    Ok(Entries { values })
}

/// Parses and fully resolves a configuration text.
pub fn parse_config_str(text: &str) -> Result<ResolvedConfig, ConfigError> {
    let e = tokenize(text)?;
    let version: u32 = e.or("v", SCHEMA_VERSION)?;
    if version != SCHEMA_VERSION {
        return Err(e.blame("v", format!("unsupported schema version {version}")));
    }
    let dim: usize = e.required("dim", "spatial dimension")?;
    if dim == 0 {
        return Err(e.blame("dim", "dim must be at least 1"));
    }
    let r_in: f64 = e.or("r_in", 1.0)?;
    let geometry = match e.raw("geometry").map(|(_, v)| v) {
        None if dim == 1 => Geometry::FullLine,
        None => Geometry::RadialExterior { r_in },
        Some("line") => Geometry::FullLine,
        Some("exterior") => Geometry::RadialExterior { r_in },
        Some(other) => return Err(e.blame("geometry", format!("expected line or exterior, got {other:?}"))),
    };
    let h: f64 = e.or("h", 0.05)?;
    let tau: f64 = e.or("tau", 0.025)?;
    let t_max: f64 = e.or("t_max", 100.0)?;
    let t0: f64 = e.or("t0", 1.0)?;
    let lambda: f64 = e.or("lambda", 0.0)?;
    let weight = WeightParams::new(dim, lambda, t0).map_err(|err| {
        let key = if !(t0 > 0.0) { "t0" } else { "lambda" };
        e.blame(key, err.to_string())
    })?;

    let kind = match e.raw("nonlinearity").map(|(_, v)| v).unwrap_or("odd_power") {
        "odd_power" => NonlinearityKind::OddPower,
        "absolute_power" => NonlinearityKind::AbsolutePower,
        "zero" => NonlinearityKind::Zero,
        other => {
            return Err(e.blame(
                "nonlinearity",
                format!("expected odd_power, absolute_power or zero, got {other:?}"),
            ))
        }
    };
    let nonlinearity = match kind {
        NonlinearityKind::Zero => NonlinearitySpec::zero(),
        _ => NonlinearitySpec::new(kind, e.required("p", "power of the nonlinearity")?),
    };

    let radius: f64 = e.or("radius", 2.0)?;
    let profile = match e.raw("profile").map(|(_, v)| v).unwrap_or("bump") {
        "bump" => {
            let center = match geometry {
                Geometry::FullLine => 0.0,
                Geometry::RadialExterior { r_in } => r_in + radius + 1.0,
            };
            InitialProfile::Bump {
                center: e.or("center", center)?,
                radius,
            }
        }
        "poly_tail" => InitialProfile::PolyTail {
            mu: e.required("mu", "poly_tail decay exponent")?,
            r_cut: e.required("r_cut", "poly_tail cut radius")?,
        },
        "self_similar" => InitialProfile::SelfSimilar {
            beta: e.required("beta", "self_similar weight index")?,
            r_cut: e.required("r_cut", "self_similar cut radius")?,
        },
        other => {
            return Err(e.blame(
                "profile",
                format!("expected bump, poly_tail or self_similar, got {other:?}"),
            ))
        }
    };
    let initial_data = InitialData {
        profile,
        epsilon: e.or("epsilon", 1.0)?,
        u1_factor: e.or("u1_factor", 0.0)?,
    };
    let r_outer = match e.get("r_outer")? {
        Some(r) => r,
        None => SimConfig::required_r_outer(&initial_data, t_max, h),
    };
    let report_every: f64 = e.or("report_every", 1.0)?;
    if !(report_every > 0.0) {
        return Err(e.blame("report_every", "must be positive"));
    }
    let sim = SimConfig {
        domain: DomainSpec {
            dim,
            geometry,
            r_outer,
            h,
        },
        nonlinearity,
        weight,
        initial_data,
        tau,
        t_max,
        blowup_threshold: e.or("blowup_threshold", DEFAULT_BLOWUP_THRESHOLD)?,
        output_stride: ((report_every / tau).round() as usize).max(1),
    };
    sim.validate().map_err(|err| {
        let msg = err.to_string();
        match culprit(msg.trim_start_matches("invalid configuration: ")) {
            Some(k) => e.blame(k, msg),
            None => error(None, None, msg),
        }
    })?;
    Ok(ResolvedConfig {
        sim,
        seed: e.or("seed", 0)?,
    })
}

/// Key responsible for a [`SimConfig::validate`] message.
fn culprit(msg: &str) -> Option<&'static str> {
    const PREFIXES: &[(&str, &str)] = &[
        ("CFL", "tau"),
        ("tau", "tau"),
        ("grid spacing", "h"),
        ("full_line", "geometry"),
        ("radial_exterior", "r_in"),
        ("r_outer", "r_outer"),
        ("truncation radius", "r_outer"),
        ("t_max", "t_max"),
        ("blowup_threshold", "blowup_threshold"),
        ("p =", "p"),
        ("initial data", "epsilon"),
        ("bump", "radius"),
        ("tail exponent", "mu"),
        ("r_cut", "r_cut"),
        ("self-similar", "beta"),
        ("heat profile", "beta"),
    ];
    PREFIXES.iter().find(|(p, _)| msg.starts_with(p)).map(|&(_, k)| k)
}

/// Reads and resolves the configuration file at `path`.
pub fn parse_config(path: &Path) -> Result<ResolvedConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| error(None, None, format!("cannot read {}: {err}", path.display())))?;
    parse_config_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config_str("dim = 1\np = 3\n").unwrap().sim;
        assert_eq!(c.weight.t0, 1.0);
        assert_eq!(c.weight.lambda, 0.0);
        assert_eq!(c.domain.h, 0.05);
        assert_eq!(c.tau, 0.025);
        assert_eq!(c.t_max, 100.0);
        assert_eq!(c.domain.geometry, Geometry::FullLine);
        assert_eq!(c.output_stride, 40);
    }

    #[test]
    fn comments_and_case_are_tolerated() {
        let text = "# header\n  DIM = 2   # trailing\n\np=2\nprofile = bump\n";
        let c = parse_config_str(text).unwrap().sim;
        assert_eq!(c.domain.geometry, Geometry::RadialExterior { r_in: 1.0 });
        assert_eq!(c.initial_data.profile, InitialProfile::Bump { center: 4.0, radius: 2.0 });
    }

    #[test]
    fn cfl_violation_names_tau() {
        let err = parse_config_str("dim = 1\np = 3\nh = 0.05\ntau = 0.05\n").unwrap_err();
        assert_eq!(err.key.as_deref(), Some("tau"));
        assert_eq!(err.line, Some(4));
        assert!(err.message.contains("CFL"));
    }

    #[test]
    fn lambda_at_half_dimension_is_rejected() {
        let err = parse_config_str("dim = 2\np = 3\nlambda = 1\n").unwrap_err();
        assert_eq!(err.key.as_deref(), Some("lambda"));
        assert_eq!(err.line, Some(3));
    }

    #[test]
    fn bad_lines_are_located() {
        assert_eq!(parse_config_str("dim = 1\nbogus = 2\n").unwrap_err().line, Some(2));
        assert_eq!(parse_config_str("dim = 1\np 3\n").unwrap_err().line, Some(2));
        assert_eq!(parse_config_str("dim = 1\ndim = 2\n").unwrap_err().line, Some(2));
        assert_eq!(parse_config_str("dim = x\n").unwrap_err().key.as_deref(), Some("dim"));
        assert_eq!(parse_config_str("p = 3\n").unwrap_err().key.as_deref(), Some("dim"));
        assert_eq!(parse_config_str("v = 2\ndim = 1\np = 3").unwrap_err().key.as_deref(), Some("v"));
    }

    #[test]
    fn supercritical_power_is_rejected_in_three_dimensions() {
        let err = parse_config_str("dim = 3\np = 3.5\n").unwrap_err();
        assert_eq!(err.key.as_deref(), Some("p"));
    }

    #[test]
    fn zero_nonlinearity_needs_no_power() {
        let c = parse_config_str("dim = 3\nnonlinearity = zero\n").unwrap().sim;
        assert!(c.nonlinearity.is_zero());
    }
}
