//! Strategy selection flags shared by several subcommands.

use clap::{Args, ValueEnum};
use serde_json::{json, Value};
use shardbench::{AsciiSumConfig, LetterConfig, MappingConfig, Md5Config, Md5Input, Strategy};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyKind {
    Letter,
    AsciiSum,
    Mapping,
    Md5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Md5InputArg {
    /// Hash "<name>\n", as `echo <name> | md5sum` does.
    Newline,
    /// Hash the name's bytes only.
    Bare,
}

impl From<Md5InputArg> for Md5Input {
    fn from(arg: Md5InputArg) -> Self {
        match arg {
            Md5InputArg::Newline => Md5Input::NewlineTerminated,
            Md5InputArg::Bare => Md5Input::Bare,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct StrategyArgs {
    /// Placement strategy.
    #[arg(long, value_enum)]
    pub strategy: StrategyKind,

    /// Per-level moduli for ascii-sum (default 31,33) or md5 (default 64,64,128).
    #[arg(long, value_delimiter = ',')]
    pub moduli: Option<Vec<u32>>,

    /// Letter expansion depth, 1-6 (default 6).
    #[arg(long)]
    pub levels: Option<u8>,

    /// Members per bucket for the mapping strategy.
    #[arg(long)]
    pub bucket_size: Option<u64>,

    /// Server count for the mapping strategy.
    #[arg(long)]
    pub servers: Option<u32>,

    /// Member ID range for the mapping strategy, `1..N` or `N`.
    #[arg(long, value_parser = parse_id_range)]
    pub ids: Option<u64>,

    /// Bytes hashed by the md5 strategy.
    #[arg(long, value_enum)]
    pub md5_input: Option<Md5InputArg>,
}

fn parse_id_range(s: &str) -> Result<u64, String> {
    let end = match s.split_once("..") {
        Some((start, end)) => {
            if start.trim() != "1" {
                return Err("ID ranges start at 1".into());
            }
            end.trim().trim_start_matches('=')
        }
        None => s.trim(),
    };
    match end.parse::<u64>() {
        Ok(0) | Err(_) => Err(format!("expected `1..N` with N >= 1, got {s:?}")),
        Ok(n) => Ok(n),
    }
}

/// A fully validated strategy selection.
#[derive(Debug, Clone)]
pub enum Selected {
    Names(Strategy),
    Mapping {
        cfg: MappingConfig,
        ids: Option<u64>,
    },
}

impl StrategyArgs {
    fn reject(&self, flag: &str, present: bool) -> Result<(), CliError> {
        if present {
            return Err(CliError::usage(format!(
                "--{flag} does not apply to --strategy {}",
                kind_name(self.strategy)
            )));
        }
        Ok(())
    }

    pub fn resolve(&self) -> Result<Selected, CliError> {
        let mapping_flags = [
            ("bucket-size", self.bucket_size.is_some()),
            ("servers", self.servers.is_some()),
            ("ids", self.ids.is_some()),
        ];
        if self.strategy != StrategyKind::Mapping {
            for (flag, present) in mapping_flags {
                self.reject(flag, present)?;
            }
        }
        if self.strategy != StrategyKind::Md5 {
            self.reject("md5-input", self.md5_input.is_some())?;
        }

        match self.strategy {
            StrategyKind::Letter => {
                self.reject("moduli", self.moduli.is_some())?;
                let cfg = match self.levels {
                    Some(levels) => LetterConfig::new(levels)?,
                    None => LetterConfig::default(),
                };
                Ok(Selected::Names(Strategy::Letter(cfg)))
            }
            StrategyKind::AsciiSum => {
                self.reject("levels", self.levels.is_some())?;
                let cfg = match &self.moduli {
                    Some(m) => AsciiSumConfig::new(m.clone())?,
                    None => AsciiSumConfig::default(),
                };
                Ok(Selected::Names(Strategy::AsciiSum(cfg)))
            }
            StrategyKind::Md5 => {
                self.reject("levels", self.levels.is_some())?;
                let cfg = match &self.moduli {
                    Some(m) => Md5Config::new(m.clone())?,
                    None => Md5Config::default(),
                };
                let input = self.md5_input.map(Md5Input::from).unwrap_or_default();
                Ok(Selected::Names(Strategy::Md5(cfg.with_input(input))))
            }
            StrategyKind::Mapping => {
                self.reject("levels", self.levels.is_some())?;
                self.reject("moduli", self.moduli.is_some())?;
                let (Some(bucket_size), Some(servers)) = (self.bucket_size, self.servers) else {
                    return Err(CliError::usage(
                        "--strategy mapping requires --bucket-size and --servers",
                    ));
                };
                Ok(Selected::Mapping {
                    cfg: MappingConfig::new(bucket_size, servers)?,
                    ids: self.ids,
                })
            }
        }
    }
}

pub fn kind_name(kind: StrategyKind) -> &'static str {
    match kind {
        StrategyKind::Letter => "letter",
        StrategyKind::AsciiSum => "ascii-sum",
        StrategyKind::Mapping => "mapping",
        StrategyKind::Md5 => "md5",
    }
}

fn join(values: &[u32]) -> String {
    values
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Canonical `name:params` label, e.g. `md5:64,64,128` or `letter:6`.
pub fn strategy_label(strategy: &Strategy) -> String {
    match strategy {
        Strategy::Letter(cfg) => format!("letter:{}", cfg.levels()),
        Strategy::AsciiSum(cfg) => format!("ascii-sum:{}", join(cfg.moduli())),
        Strategy::Md5(cfg) => {
            let base = format!("md5:{}", join(cfg.moduli()));
            match cfg.input() {
                Md5Input::NewlineTerminated => base,
                Md5Input::Bare => format!("{base}:bare"),
            }
        }
    }
}

/// Configuration echo embedded in reports.
pub fn config_json(selected: &Selected) -> Value {
    match selected {
        Selected::Names(Strategy::Letter(cfg)) => json!({ "levels": cfg.levels() }),
        Selected::Names(Strategy::AsciiSum(cfg)) => json!({ "moduli": cfg.moduli() }),
        Selected::Names(Strategy::Md5(cfg)) => json!({
            "moduli": cfg.moduli(),
            "md5_input": match cfg.input() {
                Md5Input::NewlineTerminated => "newline",
                Md5Input::Bare => "bare",
            },
        }),
        Selected::Mapping { cfg, ids } => json!({
            "bucket_size": cfg.bucket_size(),
            "servers": cfg.num_servers(),
            "ids": ids,
        }),
    }
}

/// Parses a `compare` strategy spec: `letter[:N]`, `ascii-sum[:m,...]` or
/// `md5[:m,...][:bare]`.
pub fn parse_strategy_spec(spec: &str) -> Result<Strategy, String> {
    let (name, params) = match spec.split_once(':') {
        Some((name, params)) => (name, Some(params)),
        None => (spec, None),
    };
    let moduli = |params: &str| -> Result<Vec<u32>, String> {
        params
            .split(',')
            .map(|m| {
                m.trim()
                    .parse::<u32>()
                    .map_err(|e| format!("bad modulus {m:?}: {e}"))
            })
            .collect()
    };
    let strategy = match name {
        "letter" => {
            let cfg = match params {
                Some(p) => {
                    let levels = p
                        .parse::<u8>()
                        .map_err(|e| format!("bad letter depth {p:?}: {e}"))?;
                    LetterConfig::new(levels).map_err(|e| e.to_string())?
                }
                None => LetterConfig::default(),
            };
            Strategy::Letter(cfg)
        }
        "ascii-sum" => {
            let cfg = match params {
                Some(p) => AsciiSumConfig::new(moduli(p)?).map_err(|e| e.to_string())?,
                None => AsciiSumConfig::default(),
            };
            Strategy::AsciiSum(cfg)
        }
        "md5" => {
            let (params, input) = match params.and_then(|p| p.strip_suffix(":bare")) {
                Some(rest) => (Some(rest), Md5Input::Bare),
                None if params == Some("bare") => (None, Md5Input::Bare),
                None => (params, Md5Input::NewlineTerminated),
            };
            let cfg = match params {
                Some(p) => Md5Config::new(moduli(p)?).map_err(|e| e.to_string())?,
                None => Md5Config::default(),
            };
            Strategy::Md5(cfg.with_input(input))
        }
        "mapping" => {
            return Err("mapping keys on member IDs and cannot be compared on a name corpus".into())
        }
        other => return Err(format!("unknown strategy {other:?}")),
    };
    Ok(strategy)
}
