//! Experiment config files.
//!
//! A flat `key = value` format with optional `[section]` headers that
//! prefix the keys below them, so `[env]` followed by `x1 = ...` is the same
//! as `env.x1 = ...`. `#` starts a comment.
//!
//! ```text
//! agents = 10
//! timesteps = 2000
//! h = 0.001
//! w = 1
//! model = 1
//! runs = 25
//! seed = 42
//! record_every = 1
//! lambda_init = uniform        # or fixed(0.5)
//! schedule = ordered           # or unordered
//!
//! [env]
//! x1 = uniform(0, 1)
//! x2 = uniform(0, 0.5)
//! ```

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use super::ExperimentConfig;
use crate::environment::{AxisDistribution, Environment};
use crate::error::{Error, Result};
use crate::game::{LambdaInit, Reliability, Schedule, UpdateModel};

const KEYS: &[&str] = &[
    "agents",
    "timesteps",
    "h",
    "w",
    "model",
    "runs",
    "seed",
    "record_every",
    "env.x1",
    "env.x2",
    "lambda_init",
    "schedule",
];

fn config_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn number<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| config_err(line, format!("{key}: cannot parse '{raw}'")))
}

/// Splits `name(a, b, ...)` into `name` and its arguments.
fn call(raw: &str) -> Option<(&str, Vec<&str>)> {
    let open = raw.find('(')?;
    let inner = raw[open + 1..].strip_suffix(')')?;
    let args = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(str::trim).collect()
    };
    Some((raw[..open].trim(), args))
}

fn axis(line: usize, key: &str, raw: &str) -> Result<AxisDistribution> {
    let bad = || config_err(line, format!("{key}: expected uniform(lo,hi), got '{raw}'"));
    let (name, args) = call(raw).ok_or_else(bad)?;
    match (name, args.as_slice()) {
        ("uniform", [lo, hi]) => {
            AxisDistribution::uniform(number(line, key, lo)?, number(line, key, hi)?)
                .map_err(|e| config_err(line, format!("{key}: {e}")))
        }
        ("constant", [v]) => Ok(AxisDistribution::Constant(number(line, key, v)?)),
        _ => Err(bad()),
    }
}

fn lambda_init(line: usize, raw: &str) -> Result<LambdaInit> {
    if raw == "uniform" {
        return Ok(LambdaInit::Uniform);
    }
    match call(raw) {
        Some(("fixed", args)) if args.len() == 1 => {
            Ok(LambdaInit::Fixed(number(line, "lambda_init", args[0])?))
        }
        _ => Err(config_err(
            line,
            format!("lambda_init: expected uniform or fixed(v), got '{raw}'"),
        )),
    }
}

/// Parses config text on top of the defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut section: Option<String> = None;

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| config_err(line, "unterminated section header"))?
                .trim();
            if name.is_empty() {
                section = None;
            } else {
                section = Some(name.to_string());
            }
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| config_err(line, format!("expected key = value, got '{content}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let key = match &section {
            Some(s) => format!("{s}.{key}"),
            None => key.to_string(),
        };
        if !KEYS.contains(&key.as_str()) {
            return Err(config_err(line, format!("unknown key '{key}'")));
        }
        if let Some(prev) = seen.insert(key.clone(), line) {
            return Err(config_err(
                line,
                format!("duplicate key '{key}' (first on line {prev})"),
            ));
        }

        match key.as_str() {
            "agents" => cfg.game.n_agents = number(line, &key, value)?,
            "timesteps" => cfg.game.timesteps = number(line, &key, value)?,
            "h" => cfg.game.h = number(line, &key, value)?,
            "w" => cfg.game.reliability = Reliability::Global(number(line, &key, value)?),
            "model" => {
                cfg.game.model = UpdateModel::from_number(number(line, &key, value)?)
                    .map_err(|e| config_err(line, e.to_string()))?
            }
            "runs" => cfg.runs = number(line, &key, value)?,
            "seed" => cfg.master_seed = number(line, &key, value)?,
            "record_every" => cfg.record_every = number(line, &key, value)?,
            "env.x1" => cfg.env.x1 = axis(line, &key, value)?,
            "env.x2" => cfg.env.x2 = axis(line, &key, value)?,
            "lambda_init" => cfg.game.lambda_init = lambda_init(line, value)?,
            "schedule" => {
                cfg.game.schedule = match value {
                    "ordered" => Schedule::Ordered,
                    "unordered" => Schedule::Unordered,
                    other => {
                        return Err(config_err(
                            line,
                            format!("schedule: expected ordered or unordered, got '{other}'"),
                        ))
                    }
                }
            }
            _ => unreachable!("key checked against KEYS"),
        }
    }

    // Whole-config checks, reported against the line that set the offending key.
    let line_of = |keys: &[&str]| {
        keys.iter()
            .filter_map(|k| seen.get(*k))
            .copied()
            .max()
            .unwrap_or(0)
    };
    let checks: [(&[&str], Result<()>); 4] = [
        (
            &[
                "agents",
                "timesteps",
                "h",
                "w",
                "model",
                "lambda_init",
                "schedule",
            ],
            cfg.game.validate(),
        ),
        (
            &["runs"],
            if cfg.runs == 0 {
                Err(Error::invalid("runs must be at least 1"))
            } else {
                Ok(())
            },
        ),
        (&["record_every", "timesteps"], {
            if cfg.record_every == 0 || cfg.record_every > cfg.game.timesteps {
                Err(Error::invalid("record_every must lie in [1, timesteps]"))
            } else {
                Ok(())
            }
        }),
        (
            &["env.x1", "env.x2"],
            Environment::new(cfg.env.x1, cfg.env.x2, cfg.game.labels.bounds()).map(|_| ()),
        ),
    ];
    for (keys, check) in checks {
        if let Err(e) = check {
            return Err(config_err(line_of(keys), e.to_string()));
        }
    }
    Ok(cfg)
}

pub fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = "\
# every key set, narrower x1 range
agents = 12
timesteps = 300
h = 0.01
w = 0.8
model = 2
runs = 4
seed = 99
record_every = 10
lambda_init = fixed(0.25)
schedule = unordered

[env]
x1 = uniform(0.25, 0.75)
x2 = uniform(0,0.5)   # trailing comment
";

    #[test]
    fn parses_every_key() {
        let cfg = parse_config(FULL).unwrap();
        assert_eq!(cfg.game.n_agents, 12);
        assert_eq!(cfg.game.timesteps, 300);
        assert_eq!(cfg.game.h, 0.01);
        assert_eq!(cfg.game.reliability, Reliability::Global(0.8));
        assert_eq!(cfg.game.model, UpdateModel::Mismatch);
        assert_eq!(cfg.runs, 4);
        assert_eq!(cfg.master_seed, 99);
        assert_eq!(cfg.record_every, 10);
        assert_eq!(cfg.game.lambda_init, LambdaInit::Fixed(0.25));
        assert_eq!(cfg.game.schedule, Schedule::Unordered);
        assert_eq!(
            cfg.env,
            Environment::uniform_box((0.25, 0.75), (0.0, 0.5)).unwrap()
        );
    }

    #[test]
    fn dotted_keys_equal_sections() {
        let dotted = parse_config("env.x1 = uniform(0.1,0.2)\nenv.x2 = uniform(0.3,0.4)").unwrap();
        let sectioned =
            parse_config("[env]\nx1 = uniform(0.1,0.2)\nx2 = uniform(0.3,0.4)").unwrap();
        assert_eq!(dotted, sectioned);
    }

    #[test]
    fn empty_config_is_the_default() {
        assert_eq!(parse_config("").unwrap(), ExperimentConfig::default());
    }

    fn error_line(text: &str) -> usize {
        match parse_config(text) {
            Err(Error::Config { line, .. }) => line,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(error_line("agents = 10\nbogus = 1"), 2);
        assert_eq!(error_line("\n\nh = fast"), 3);
        assert_eq!(error_line("h = 1.5"), 1);
        assert_eq!(error_line("agents = 3\nmodel = 3"), 2);
        assert_eq!(error_line("timesteps = 5\nrecord_every = 6"), 2);
        assert_eq!(error_line("[env]\nx1 = uniform(0.5, 1.5)"), 2);
        assert_eq!(error_line("[env]\nx1 = normal(0, 1)"), 2);
        assert_eq!(error_line("w = 1\nw = 0.5"), 2);
        assert_eq!(error_line("lambda_init = fixed(2)"), 1);
        assert_eq!(error_line("schedule = random"), 1);
        assert_eq!(error_line("just words"), 1);
        assert_eq!(error_line("[env\nx1 = uniform(0,1)"), 1);
    }
}
