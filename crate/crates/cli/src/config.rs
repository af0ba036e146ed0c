//! Run configuration: per-command key tables, config-file sections and flag
//! overrides, with the origin of every value kept for the output echo.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Arg, ArgMatches, Command};
use serde::Serialize;
use twistchain::{ModelParams, Regime};

use crate::error::CliError;

pub struct KeySpec {
    pub key: &'static str,
    pub flag: &'static str,
    pub help: &'static str,
    pub default: Option<&'static str>,
}

const fn key(key: &'static str, flag: &'static str, help: &'static str, default: Option<&'static str>) -> KeySpec {
    KeySpec { key, flag, help, default }
}

const TWO_N: KeySpec = key("two_n", "two-n", "number of sites (even, 4..=14 for dense routes)", Some("4"));
const B: KeySpec = key("b", "b", "inhomogeneity a = i b", Some("0.2"));
const ETA: KeySpec = key("eta", "eta", "anisotropy; taken as eta_plus when regime = shifted", None);
const ETA_PLUS: KeySpec = key("eta_plus", "eta-plus", "real part of eta = eta_plus + i pi (selects the shifted regime)", None);
const REGIME: KeySpec = key("regime", "regime", "real | shifted", None);
const OUT: KeySpec = key("out", "out", "output directory", Some("results"));
const FORMAT: KeySpec = key("format", "format", "json | csv | both", Some("both"));
const OMEGA_MAX: KeySpec = key("omega_max", "omega-max", "Fourier cutoff, or auto", Some("auto"));

pub struct CommandSpec {
    pub name: &'static str,
    pub about: &'static str,
    pub keys: &'static [KeySpec],
}

pub const REPRODUCE_TARGETS: [&str; 10] = [
    "table1", "table2", "table3", "fig2b", "fig3", "fig4b", "fig5b", "fig5d", "fig6b", "fig7a",
];

pub const COMMANDS: [CommandSpec; 10] = [
    CommandSpec {
        name: "ed",
        about: "Exact diagonalization: spectrum, degeneracies and the low band",
        keys: &[TWO_N, B, ETA, ETA_PLUS, REGIME, OUT, FORMAT],
    },
    CommandSpec {
        name: "transfer-check",
        about: "Residuals of the R-matrix and transfer-matrix identities",
        keys: &[TWO_N, B, ETA, ETA_PLUS, REGIME,
            key("tolerance", "tolerance", "largest accepted relative residual", Some("1e-10")), OUT, FORMAT],
    },
    CommandSpec {
        name: "roots",
        about: "Zero roots, energy and momentum of every eigenstate",
        keys: &[TWO_N, B, ETA, ETA_PLUS, REGIME, OUT, FORMAT],
    },
    CommandSpec {
        name: "bae-solve",
        about: "Solve the homogeneous Bethe equations from pattern seeds",
        keys: &[TWO_N, B, ETA, ETA_PLUS, REGIME,
            key("seeds", "seeds", "JSON file with a list of pattern seeds", None), OUT, FORMAT],
    },
    CommandSpec {
        name: "thermo",
        about: "Thermodynamic-limit ground energy and root density",
        keys: &[TWO_N, B, ETA, ETA_PLUS, REGIME, OMEGA_MAX,
            key("points", "points", "density grid points on [-pi/2, pi/2)", Some("201")),
            key("mu", "mu", "boundary root position (shifted regime; default: minimizer)", None), OUT, FORMAT],
    },
    CommandSpec {
        name: "excite",
        about: "Excitation energy and momentum over the root parameter",
        keys: &[TWO_N, B, ETA, ETA_PLUS, REGIME, OMEGA_MAX,
            key("kind", "kind", "pair | boundary | spinon (default: pair for real, boundary for shifted)", None),
            key("n", "n", "pair order", Some("2")),
            key("points", "points", "grid points per root parameter", Some("101")), OUT, FORMAT],
    },
    CommandSpec {
        name: "qpt-scan",
        about: "Per-site ground energy and its derivative across b = pi/4",
        keys: &[key("two_n", "two-n", "number of sites", Some("18")), ETA_PLUS, OMEGA_MAX,
            key("b_min", "b-min", "scan start", Some("0.05")),
            key("b_max", "b-max", "scan end", Some("1.5")),
            key("step", "step", "grid step", Some("0.01")), OUT, FORMAT],
    },
    CommandSpec {
        name: "scaling",
        about: "Finite-size deviation from the analytic result and its fits",
        keys: &[TWO_N, B, ETA, ETA_PLUS, REGIME,
            key("quantity", "quantity", "ground | pair | boundary", Some("ground")),
            key("sizes", "sizes", "comma-separated chain lengths", Some("8,10,12")),
            key("n", "n", "pair order for quantity = pair", Some("2")), OUT, FORMAT],
    },
    CommandSpec {
        name: "texture",
        about: "Projections of eigenstates onto a kink basis",
        keys: &[TWO_N, B, ETA, ETA_PLUS, REGIME,
            key("basis", "basis", "ferro | neel (default: ferro for real, neel for shifted)", None), OUT, FORMAT],
    },
    CommandSpec {
        name: "reproduce",
        about: "Regenerate a published table or figure and check its tolerances",
        keys: &[OUT, FORMAT],
    },
];

pub fn command_spec(name: &str) -> &'static CommandSpec {
    COMMANDS.iter().find(|c| c.name == name).expect("command registered")
}

pub fn cli() -> Command {
    let mut root = Command::new("twistchain")
        .about("Finite-size and thermodynamic-limit toolkit for the antiperiodic J1-J2 chain")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("PATH")
                .help("config file; flags override its values"),
        );
    for spec in &COMMANDS {
        let mut sub = Command::new(spec.name).about(spec.about);
        if spec.name == "reproduce" {
            sub = sub.arg(
                Arg::new("target")
                    .required(true)
                    .value_parser(REPRODUCE_TARGETS)
                    .help("table or figure to regenerate"),
            );
        }
        for k in spec.keys {
            let mut arg = Arg::new(k.key).long(k.flag).value_name("VALUE").help(k.help);
            if let Some(d) = k.default {
                arg = arg.long_help(format!("{} [default: {d}]", k.help));
            }
            sub = sub.arg(arg);
        }
        root = root.subcommand(sub);
    }
    root
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputEntry {
    pub key: String,
    pub value: String,
    pub source: String,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    pub target: Option<String>,
    values: BTreeMap<&'static str, (String, String)>,
}

fn scalar_text(v: &toml::Value) -> Option<String> {
    match v {
        toml::Value::String(s) => Some(s.clone()),
        toml::Value::Integer(i) => Some(i.to_string()),
        toml::Value::Float(f) => Some(f.to_string()),
        toml::Value::Boolean(b) => Some(b.to_string()),
        toml::Value::Array(items) => items
            .iter()
            .map(scalar_text)
            .collect::<Option<Vec<_>>>()
            .map(|v| v.join(",")),
        _ => None,
    }
}

fn file_layers(path: &Path, spec: &CommandSpec) -> Result<Vec<(String, BTreeMap<String, String>)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config file {}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::config(format!("{}: {}", path.display(), e.to_string().trim_end())))?;
    let mut global = BTreeMap::new();
    let mut section = BTreeMap::new();
    let known_anywhere = |k: &str| COMMANDS.iter().any(|c| c.keys.iter().any(|s| s.key == k));
    for (k, v) in &table {
        match v {
            toml::Value::Table(inner) => {
                if !COMMANDS.iter().any(|c| c.name == k) {
                    return Err(CliError::config(format!("{}: unknown section [{k}]", path.display())));
                }
                if k != spec.name {
                    continue;
                }
                for (ik, iv) in inner {
                    if !spec.keys.iter().any(|s| s.key == ik) {
                        return Err(CliError::config(format!("{}: unknown key '{ik}' in section [{k}]", path.display())));
                    }
                    let text = scalar_text(iv)
                        .ok_or_else(|| CliError::config(format!("{}: key '{ik}' must be a scalar or list", path.display())))?;
                    section.insert(ik.clone(), text);
                }
            }
            _ => {
                if !known_anywhere(k) {
                    return Err(CliError::config(format!("{}: unknown key '{k}'", path.display())));
                }
                let text = scalar_text(v)
                    .ok_or_else(|| CliError::config(format!("{}: key '{k}' must be a scalar or list", path.display())))?;
                if spec.keys.iter().any(|s| s.key == k) {
                    global.insert(k.clone(), text);
                }
            }
        }
    }
    Ok(vec![
        (format!("file:{}", path.display()), global),
        (format!("file:{}[{}]", path.display(), spec.name), section),
    ])
}

impl RunConfig {
    /// Defaults, then the config file (global keys, then the command's
    /// section), then flags.
    pub fn load(matches: &ArgMatches) -> Result<Self, CliError> {
        let (name, sub) = matches.subcommand().expect("subcommand required");
        let spec = command_spec(name);
        let mut values: BTreeMap<&'static str, (String, String)> = BTreeMap::new();
        for k in spec.keys {
            if let Some(d) = k.default {
                values.insert(k.key, (d.to_string(), "default".into()));
            }
        }
        let config_path = sub.try_get_one::<String>("config").ok().flatten().map(PathBuf::from);
        if let Some(path) = &config_path {
            for (source, layer) in file_layers(path, spec)? {
                for (k, v) in layer {
                    let key = spec.keys.iter().find(|s| s.key == k).expect("checked").key;
                    values.insert(key, (v, source.clone()));
                }
            }
        }
        for k in spec.keys {
            if let Some(v) = sub.get_one::<String>(k.key) {
                values.insert(k.key, (v.clone(), "flag".into()));
            }
        }
        Ok(Self {
            command: spec.name,
            target: sub.try_get_one::<String>("target").ok().flatten().cloned(),
            values,
        })
    }

    pub fn echo(&self) -> Vec<InputEntry> {
        self.values
            .iter()
            .map(|(k, (v, s))| InputEntry {
                key: k.to_string(),
                value: v.clone(),
                source: s.clone(),
            })
            .collect()
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(v, _)| v.as_str())
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<Option<T>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| CliError::invalid(key, v, &format!("expected {what}"))),
        }
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.opt_f64(key)?.ok_or_else(|| CliError::missing(key))
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        let v: Option<f64> = self.parse(key, "a number")?;
        match v {
            Some(x) if !x.is_finite() => Err(CliError::invalid(key, &x.to_string(), "must be finite")),
            other => Ok(other),
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        self.parse(key, "a non-negative integer")?.ok_or_else(|| CliError::missing(key))
    }

    pub fn str(&self, key: &str) -> Result<&str, CliError> {
        self.raw(key).ok_or_else(|| CliError::missing(key))
    }

    pub fn choice(&self, key: &str, allowed: &[&str], fallback: &'static str) -> Result<String, CliError> {
        let v = self.raw(key).unwrap_or(fallback);
        if allowed.contains(&v) {
            Ok(v.to_string())
        } else {
            Err(CliError::invalid(key, v, &format!("expected one of {}", allowed.join(", "))))
        }
    }

    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>, CliError> {
        let raw = self.str(key)?;
        raw.split(',')
            .map(|s| s.trim().parse().map_err(|_| CliError::invalid(key, raw, "expected comma-separated integers")))
            .collect()
    }

    /// `Some(cutoff)` for a fixed Fourier cutoff, `None` for auto.
    pub fn omega_max(&self) -> Result<twistchain::thermo::Truncation, CliError> {
        match self.raw("omega_max") {
            None | Some("auto") => Ok(twistchain::thermo::Truncation::AUTO),
            Some(v) => {
                let n: usize = self.parse("omega_max", "an integer or auto")?.expect("present");
                if n == 0 {
                    return Err(CliError::invalid("omega_max", v, "must be positive"));
                }
                Ok(twistchain::thermo::Truncation::fixed(n))
            }
        }
    }

    pub fn regime(&self) -> Result<Regime, CliError> {
        let eta = self.raw("eta").is_some();
        let eta_plus = self.raw("eta_plus").is_some();
        let declared = self.raw("regime");
        if eta && eta_plus {
            return Err(CliError::invalid("eta_plus", self.raw("eta_plus").unwrap_or(""), "give either eta or eta_plus, not both"));
        }
        match declared {
            None if eta_plus => Ok(Regime::EtaPlusIPi),
            None | Some("real") if !eta_plus => Ok(Regime::RealEta),
            Some("shifted") => Ok(Regime::EtaPlusIPi),
            Some("real") => Err(CliError::invalid("regime", "real", "eta_plus implies regime = shifted")),
            Some(other) => Err(CliError::invalid("regime", other, "expected real or shifted")),
            None => unreachable!(),
        }
    }

    pub fn model(&self) -> Result<ModelParams, CliError> {
        let regime = self.regime()?;
        let eta = match (self.opt_f64("eta")?, self.opt_f64("eta_plus")?) {
            (Some(e), None) | (None, Some(e)) => e,
            _ => return Err(CliError::missing(if self.command == "qpt-scan" { "eta_plus" } else { "eta" })),
        };
        let two_n = self.usize("two_n")?;
        let b = self.opt_f64("b")?.unwrap_or(0.2);
        ModelParams::new(two_n, b, eta, regime).map_err(|e| CliError::Config(format!("{e}")))
    }

    pub fn out_dir(&self) -> Result<PathBuf, CliError> {
        Ok(PathBuf::from(self.str("out")?))
    }

    pub fn format(&self) -> Result<String, CliError> {
        self.choice("format", &["json", "csv", "both"], "both")
    }
}
