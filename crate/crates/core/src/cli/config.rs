//! JSON run configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::HypothesisMode;
use crate::system::GeneratorSystem;
use crate::thermo::PotentialKind;

/// A generator system as written in a config: row-major decimal strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSource {
    pub generators: Vec<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translations: Option<Vec<Vec<String>>>,
}

impl SystemSource {
    pub fn build(&self) -> Result<GeneratorSystem> {
        let sys = GeneratorSystem::from_decimal(&self.generators)?;
        match &self.translations {
            None => Ok(sys),
            Some(ts) => {
                let parsed = ts
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        t.iter()
                            .map(|x| {
                                x.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                                    Error::input(format!("translation {}: {x:?} is not a decimal number", i + 1))
                                })
                            })
                            .collect::<Result<Vec<f64>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                sys.with_translations(parsed)
            }
        }
    }
}

/// Command options. Every field is optional; each command documents its defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<HypothesisMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    /// Connector length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Word length for pressure and dimension commands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialKind>,
    /// Report the square pressure `P₂` instead of the sv-squared pressure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub square: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_start: Option<usize>,
    /// `[n, ψ(n)]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<(usize, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_tail_start: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Longest cylinder in the mixing command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<usize>,
    /// Attractor depth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_dir: Option<String>,
}

impl Outputs {
    fn is_empty(&self) -> bool {
        self.report.is_none() && self.csv_dir.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "options_empty")]
    pub options: Options,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Outputs::is_empty")]
    pub output: Outputs,
}

fn options_empty(o: &Options) -> bool {
    *o == Options::default()
}

pub const COMMANDS: [&str; 9] =
    ["check-hypotheses", "spannability", "qm", "pressure", "s0", "r0", "affinity-dim", "mixing", "export-attractor"];

impl RunConfig {
    /// Canonical JSON: fields in declaration order, absent options omitted.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Range checks that do not need the system.
    pub fn validate(&self) -> Result<()> {
        if let Some(c) = &self.command {
            if !COMMANDS.contains(&c.as_str()) {
                return Err(Error::input(format!("unknown command {c:?}; expected one of {}", COMMANDS.join(", "))));
            }
        }
        let o = &self.options;
        let nonneg = |name: &str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::input(format!("options.{name} must be finite and nonnegative, got {v}")))
            }
        };
        if let Some(s) = o.s {
            nonneg("s", s)?;
        }
        for &s in o.s_grid.iter().flatten() {
            nonneg("s_grid", s)?;
        }
        if let Some(b) = o.beta {
            nonneg("beta", b)?;
        }
        for (name, v) in [("k_max", o.k_max), ("n", o.n), ("n_max", o.n_max), ("max_len", o.max_len), ("k", o.k)] {
            if v == Some(0) {
                return Err(Error::input(format!("options.{name} must be positive")));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::input("threads must be positive"));
        }
        if self.budget == Some(0) {
            return Err(Error::input("budget must be positive"));
        }
        Ok(())
    }
}

/// Parse and validate a config; errors carry the line and column of the problem.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
        Error::input(format!("config line {}, column {}: {}", e.line(), e.column(), strip_position(&e.to_string())))
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn strip_position(msg: &str) -> &str {
    match msg.rfind(" at line ") {
        Some(i) => &msg[..i],
        None => msg,
    }
}
