//! Run configuration: presets, TOML files and command-line flags, merged
//! in that order.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Every field is optional; each command reads the ones it needs and
/// falls back to its own defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub serial: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub expressions: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observables: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequences: Option<Vec<String>>,
    /// Compare `[a(n)], 2[a(n)], ...` with `n, 2n, ...`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compare: Option<String>,
    /// Track the running average at the origin over dyadic windows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oscillation: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moduli: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hardy: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pivot: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// First `N` for checks that only concern the tail of a series.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<u64>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        RunConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    /// Fields set in `top` win.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        let base = self;
        overlay!(base, top; n, checkpoints, grid, seed, serial, out, expressions, system, observables,
            sequences, compare, oscillation, set, ell, moduli, trials, family, hardy, pivot, expect, count,
            at, point, degree, bound, threshold, tolerance, from)
    }

    pub fn from_toml(text: &str) -> Result<RunConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn serial(&self) -> bool {
        self.serial.unwrap_or(false)
    }

    /// Basic sanity checks shared by all commands.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.n == Some(0) {
            return Err(CliError::usage("N must be positive"));
        }
        if self.grid == Some(0) {
            return Err(CliError::usage("grid must be positive"));
        }
        if self.ell == Some(0) {
            return Err(CliError::usage("ell must be positive"));
        }
        if let Some(c) = &self.checkpoints {
            if c.windows(2).any(|w| w[0] >= w[1]) || c.first() == Some(&0) {
                return Err(CliError::usage("checkpoints must be positive and increasing"));
            }
            if let (Some(&last), Some(n)) = (c.last(), self.n) {
                if last > n {
                    return Err(CliError::usage(format!("checkpoint {last} exceeds N = {n}")));
                }
            }
        }
        for (name, v) in [("tolerance", self.tolerance), ("threshold", self.threshold)] {
            if v.is_some_and(|x| !x.is_finite() || x < 0.0) {
                return Err(CliError::usage(format!("{name} must be a nonnegative number")));
            }
        }
        Ok(())
    }
}

/// A named experiment: the command it belongs to, the property it
/// exercises and its configuration.
pub struct Preset {
    pub name: &'static str,
    pub command: &'static str,
    pub property: &'static str,
    pub config: fn() -> RunConfig,
}

fn strings(v: &[&str]) -> Option<Vec<String>> {
    Some(v.iter().map(|s| s.to_string()).collect())
}

fn furstenberg(a: &str) -> RunConfig {
    RunConfig {
        system: Some("rotation(golden)".into()),
        observables: strings(&["char(1)", "char(1)"]),
        compare: Some(a.into()),
        n: Some(100_000),
        tolerance: Some(0.05),
        ..Default::default()
    }
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "furstenberg-compare-t32",
        command: "avg",
        property: "averages along [n^(3/2)], 2[n^(3/2)] approach the Furstenberg averages",
        config: || furstenberg("t^(3/2)"),
    },
    Preset {
        name: "furstenberg-compare-tlogt",
        command: "avg",
        property: "averages along [n log n], 2[n log n] approach the Furstenberg averages",
        config: || furstenberg("t*log(t)"),
    },
    Preset {
        name: "product-splitting",
        command: "avg",
        property: "averages along [n^(1/2)], [n^(3/2)] converge to the product of the integrals",
        config: || RunConfig {
            system: Some("rotation(golden)".into()),
            observables: strings(&["char(1)", "char(1)"]),
            sequences: strings(&["t^(1/2)", "t^(3/2)"]),
            n: Some(1_000_000),
            checkpoints: Some(vec![1_000, 10_000, 100_000, 1_000_000]),
            tolerance: Some(0.05),
            ..Default::default()
        },
    },
    Preset {
        name: "bad-sequence",
        command: "avg",
        property: "running averages along [2n + log n] on Z/2 keep oscillating",
        config: || RunConfig {
            system: Some("cyclic(2)".into()),
            observables: strings(&["vec(1,-1)"]),
            sequences: strings(&["2*t + log(t)"]),
            oscillation: Some(true),
            n: Some(1_000_000),
            from: Some(100),
            threshold: Some(0.1),
            ..Default::default()
        },
    },
    Preset {
        name: "rotation-arc-quarter",
        command: "recur",
        property: "multiple recurrence along [n^(1/2)], [n^(3/2)] for an arc of measure 1/4",
        config: || RunConfig {
            system: Some("rotation(golden)".into()),
            set: Some("arc(0, 0.25)".into()),
            sequences: strings(&["t^(1/2)", "t^(3/2)"]),
            n: Some(1_000_000),
            from: Some(10_000),
            tolerance: Some(0.01),
            ..Default::default()
        },
    },
    Preset {
        name: "seminorm-oracle",
        command: "seminorm",
        property: "recursive uniformity seminorms agree with brute-force Gowers norms on Z/m",
        config: || RunConfig {
            moduli: Some((2..=32).collect()),
            ell: Some(3),
            trials: Some(100),
            seed: Some(4),
            tolerance: Some(1e-9),
            ..Default::default()
        },
    },
    Preset {
        name: "pet-golden",
        command: "pet-type",
        property: "the type of {t, 2t, t^2} and of its van der Corput step at t",
        config: || RunConfig {
            family: Some("{t, 2t, t^2}".into()),
            pivot: Some(0),
            expect: strings(&["(2,1,2)", "(2,1,1)"]),
            ..Default::default()
        },
    },
    Preset {
        name: "pet-hardy-golden",
        command: "pet-type",
        property: "the Hardy type of {t^(1/3), t^(5/2), t^(5/2) + t^(1/2), t^(5/2) + t^(7/3)}",
        config: || RunConfig {
            family: Some("t^(1/3), t^(5/2), t^(5/2) + t^(1/2), t^(5/2) + t^(7/3)".into()),
            hardy: Some(true),
            expect: strings(&["(2,2,0,1)"]),
            ..Default::default()
        },
    },
    Preset {
        name: "pet-corpus",
        command: "pet-tree",
        property: "van der Corput steps lower the type and derivations stop within depth 64",
        config: || RunConfig {
            seed: Some(7),
            count: Some(500),
            ..Default::default()
        },
    },
    Preset {
        name: "taylor-windows",
        command: "taylor",
        property: "floors agree with floors of Taylor polynomials on short windows",
        config: || RunConfig {
            expressions: strings(&["t^(3/2)", "t*log(t)", "t^(5/2)"]),
            at: Some(vec![10_000, 100_000, 1_000_000]),
            ..Default::default()
        },
    },
    Preset {
        name: "equidist-rational",
        command: "equidist",
        property: "a badly distributed affine orbit has a frequency with small smoothness norm",
        config: || RunConfig {
            system: Some("affine(1,0;2,1 | 1/6, 1/4)".into()),
            point: strings(&["1/3", "0"]),
            n: Some(10_000),
            bound: Some(12),
            threshold: Some(10.0),
            ..Default::default()
        },
    },
];

pub fn preset(name: &str, command: &str) -> Result<&'static Preset, CliError> {
    let p = PRESETS.iter().find(|p| p.name == name).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
        CliError::usage(format!("unknown preset '{name}' (known: {})", names.join(", ")))
    })?;
    if p.command != command {
        return Err(CliError::usage(format!("preset '{name}' belongs to '{}', not '{command}'", p.command)));
    }
    Ok(p)
}
