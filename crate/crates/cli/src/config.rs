use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Constants,
    Green,
    Ground,
    SweepOmega,
    Singular,
    SweepB,
    Morse,
    Kummer,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Green => "green",
            Command::Ground => "ground",
            Command::SweepOmega => "sweep-omega",
            Command::Singular => "singular",
            Command::SweepB => "sweep-b",
            Command::Morse => "morse",
            Command::Kummer => "kummer",
            Command::Report => "report",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// `r_min` refinement for `morse`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    /// Halve `r_min` at each step.
    #[default]
    Halving,
    /// Step `r_min` by one oscillation period `e^{-π/α}` (5 ≤ d ≤ 12).
    PerOscillation,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::Halving => "halving",
            Policy::PerOscillation => "per-oscillation",
        }
    }
}

/// Radial Gross-Pitaevskii lab: ground states, singular solutions, spectra.
#[derive(Debug, Parser)]
#[command(name = "gplab", version)]
pub struct Cli {
    /// Computation to run; may come from the config file instead.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// JSON file with the same keys as the flags (snake_case); flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub omega_list: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub b_list: Option<Vec<f64>>,
    /// `LO,HI,N`: N logarithmically spaced amplitudes in [LO, HI].
    #[arg(long, value_delimiter = ',')]
    pub b_log: Option<Vec<f64>>,
    #[arg(long)]
    pub grid_n: Option<usize>,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub policy: Option<Policy>,
    /// Number of Kummer levels.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Directory of earlier outputs, for `report`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Everything a run depends on. Unset fields take per-command defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_log: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<Policy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }

    /// File values overridden by every flag that was given.
    pub fn resolve(cli: Cli) -> Result<Self, ConfigError> {
        let mut cfg = match &cli.config {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        macro_rules! take {
            ($($f:ident),*) => { $( if cli.$f.is_some() { cfg.$f = cli.$f; } )* };
        }
        take!(d, omega, omega_list, b_list, b_log, grid_n, r_min, r_max, tol, policy, levels, input, out, format);
        if cli.command.is_some() {
            cfg.subcommand = cli.command;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn command(&self) -> Command {
        self.subcommand.expect("validated")
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn d(&self) -> u32 {
        self.d.expect("validated")
    }

    /// `d` is checked against each command's range; numbers must be finite,
    /// tolerances positive and grids at least 64 nodes.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let Some(cmd) = self.subcommand else {
            return bad("no subcommand given");
        };
        let finite = |name: &str, v: Option<f64>| match v {
            Some(x) if !x.is_finite() => bad(format!("--{name} must be finite")),
            _ => Ok(()),
        };
        finite("omega", self.omega)?;
        finite("r-min", self.r_min)?;
        finite("r-max", self.r_max)?;
        for (name, list) in [("omega-list", &self.omega_list), ("b-list", &self.b_list), ("b-log", &self.b_log)] {
            if let Some(l) = list {
                if l.is_empty() || l.iter().any(|x| !x.is_finite()) {
                    return bad(format!("--{name} needs finite values"));
                }
            }
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t < 1.0) {
                return bad("--tol must lie in (0, 1)");
            }
        }
        if let Some(n) = self.grid_n {
            if n < 64 {
                return bad("--grid-n must be at least 64");
            }
        }
        if let (Some(lo), Some(hi)) = (self.r_min, self.r_max) {
            if !(lo < hi) {
                return bad("--r-min must be below --r-max");
            }
        }
        for (name, v) in [("r-min", self.r_min), ("r-max", self.r_max)] {
            if let Some(x) = v {
                if !(x > 0.0) {
                    return bad(format!("--{name} must be positive"));
                }
            }
        }
        if let Some(b) = &self.b_log {
            if b.len() != 3 || !(b[0] > 0.0 && b[1] > b[0] && b[2] >= 2.0 && b[2].fract() == 0.0) {
                return bad("--b-log takes LO,HI,N with 0 < LO < HI and integer N ≥ 2");
            }
        }
        if let Some(l) = self.levels {
            if !(1..=8).contains(&l) {
                return bad("--levels must lie in 1..=8");
            }
        }
        if cmd == Command::Report {
            if self.input.is_none() {
                return bad("report needs --input DIR");
            }
            return Ok(());
        }
        let Some(d) = self.d else {
            return bad(format!("{} needs --d", cmd.name()));
        };
        let (lo, hi) = match cmd {
            Command::Constants | Command::Ground | Command::SweepOmega => (3, 64),
            Command::Green => (3, 6),
            Command::Singular | Command::SweepB | Command::Morse | Command::Kummer => (5, 64),
            Command::Report => unreachable!(),
        };
        if !(lo..=hi).contains(&d) {
            return bad(format!("{} needs {lo} ≤ d ≤ {hi}, got {d}", cmd.name()));
        }
        match cmd {
            Command::Ground if self.omega.is_none() => bad("ground needs --omega"),
            Command::SweepOmega if self.omega_list.is_none() && !matches!(d, 3 | 7) => {
                bad("sweep-omega needs --omega-list (defaults exist only for d = 3 and d = 7)")
            }
            Command::Morse if self.policy == Some(Policy::PerOscillation) && d > 12 => {
                bad("the per-oscillation policy needs 5 ≤ d ≤ 12")
            }
            Command::SweepB if self.b_list.is_some() && self.b_log.is_some() => bad("give --b-list or --b-log, not both"),
            _ => Ok(()),
        }
    }

    /// SHA-256 of the canonical JSON of the config without its output keys.
    pub fn hash(&self) -> String {
        let key = RunConfig { out: None, format: None, ..self.clone() };
        let json = serde_json::to_string(&key).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
