//! Run configuration from TOML text, the built-in preset and command-line overrides.
//!
//! Later sources win: preset, then keys in the file, then flags. Every
//! violation is collected before reporting so one run shows all of them.

use std::path::PathBuf;

use epdyn::{Complex64, ModelParams, StateVector};
use toml::{Table, Value};

use crate::error::CliError;

pub const PARAM_KEYS: [&str; 5] = ["omega1", "omega2", "epsilon1", "epsilon2", "delta"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Basis {
    /// observational basis, rotated by π/4 from the diagonal one
    #[default]
    Rotated,
    /// basis in which the unperturbed Hamiltonian is diagonal
    Original,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub lambda: Option<Complex64>,
    pub lambda_range: Option<(f64, f64)>,
    pub psi0: Option<StateVector>,
    pub basis: Basis,
    pub grid: Option<usize>,
    pub t_max: Option<f64>,
    pub format: Format,
    pub output: Option<PathBuf>,
}

/// Model parameters of a named preset.
pub fn preset(name: &str) -> Option<ModelParams> {
    match name {
        "paper" => Some(ModelParams::paper()),
        _ => None,
    }
}

/// A configuration that may still lack parameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialConfig {
    pub params: [Option<Complex64>; 5],
    pub lambda: Option<Complex64>,
    pub lambda_range: Option<(f64, f64)>,
    pub psi0: Option<StateVector>,
    pub basis: Option<Basis>,
    pub grid: Option<usize>,
    pub t_max: Option<f64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

impl PartialConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::Config(vec![format!("parse error: {e}")]))?;
        let mut out = Self::default();
        let mut problems = Vec::new();

        // the preset goes first so explicit keys can override it
        if let Some(v) = table.get("preset") {
            match v.as_str().map(|name| (name, preset(name))) {
                Some((_, Some(p))) => out.apply_preset(&p),
                Some((name, None)) => problems.push(format!(
                    "{}unknown preset `{name}`",
                    at_line(text, "preset")
                )),
                None => problems.push(format!(
                    "{}`preset` must be a string",
                    at_line(text, "preset")
                )),
            }
        }
        for (key, v) in &table {
            if let Err(msg) = out.set(key, v) {
                problems.push(format!("{}{msg}", at_line(text, key)));
            }
        }
        if out.lambda.is_some() && out.lambda_range.is_some() {
            problems.push("give either `lambda` or `lambda_range`, not both".into());
        }
        if problems.is_empty() {
            Ok(out)
        } else {
            Err(CliError::Config(problems))
        }
    }

    fn set(&mut self, key: &str, v: &Value) -> Result<(), String> {
        let wrap = |msg: String| format!("`{key}` {msg}");
        if let Some(k) = PARAM_KEYS.iter().position(|p| *p == key) {
            self.params[k] = Some(complex_value(v).map_err(wrap)?);
            return Ok(());
        }
        match key {
            "preset" => {}
            "lambda" => {
                let l = match v {
                    Value::Array(_) => complex_value(v),
                    _ => real_value(v).map(|x| Complex64::new(x, 0.0)),
                };
                self.lambda = Some(l.map_err(wrap)?);
            }
            "lambda_range" => {
                let [lo, hi] = real_pair(v).map_err(wrap)?;
                if lo >= hi {
                    return Err(wrap(format!("must satisfy lo < hi, got [{lo}, {hi}]")));
                }
                self.lambda_range = Some((lo, hi));
            }
            "psi0" => {
                let nums = real_array(v).map_err(wrap)?;
                self.psi0 = Some(state_from_numbers(&nums).map_err(wrap)?);
            }
            "basis" => {
                self.basis = Some(match v.as_str() {
                    Some("rotated") => Basis::Rotated,
                    Some("original") => Basis::Original,
                    _ => return Err(wrap("must be \"rotated\" or \"original\"".into())),
                });
            }
            "format" => {
                self.format = Some(match v.as_str() {
                    Some("csv") => Format::Csv,
                    Some("json") => Format::Json,
                    _ => return Err(wrap("must be \"csv\" or \"json\"".into())),
                });
            }
            "grid" => match v.as_integer() {
                Some(n) if n >= 2 => self.grid = Some(n as usize),
                _ => return Err(wrap("must be an integer ≥ 2".into())),
            },
            "tmax" => {
                let t = real_value(v).map_err(wrap)?;
                if t <= 0.0 {
                    return Err(wrap(format!("must be positive, got {t}")));
                }
                self.t_max = Some(t);
            }
            "output" => {
                let path = v.as_str().ok_or_else(|| wrap("must be a string".into()))?;
                self.output = Some(PathBuf::from(path));
            }
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    pub fn apply_preset(&mut self, p: &ModelParams) {
        self.params = [
            Some(p.omega1),
            Some(p.omega2),
            Some(p.epsilon1),
            Some(p.epsilon2),
            Some(p.delta),
        ];
    }

    /// Checks that every parameter is present and builds the model.
    pub fn finish(self) -> Result<RunConfig, CliError> {
        let missing: Vec<&str> = PARAM_KEYS
            .iter()
            .zip(&self.params)
            .filter(|(_, v)| v.is_none())
            .map(|(k, _)| *k)
            .collect();
        if !missing.is_empty() {
            return Err(CliError::Config(vec![format!(
                "missing required keys: {}",
                missing.join(", ")
            )]));
        }
        let [w1, w2, e1, e2, d] = self.params.map(Option::unwrap);
        let params = ModelParams::new(w1, w2, e1, e2, d)
            .map_err(|e| CliError::Config(vec![e.to_string()]))?;
        Ok(RunConfig {
            params,
            lambda: self.lambda,
            lambda_range: self.lambda_range,
            psi0: self.psi0,
            basis: self.basis.unwrap_or_default(),
            grid: self.grid,
            t_max: self.t_max,
            format: self.format.unwrap_or_default(),
            output: self.output,
        })
    }
}

/// Parses and validates a complete configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    PartialConfig::from_toml(text)?.finish()
}

/// `"line N: "` for the first line assigning `key`, or nothing if it cannot be found.
fn at_line(text: &str, key: &str) -> String {
    text.lines()
        .position(|line| {
            let line = line.trim_start();
            line.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| format!("line {}: ", i + 1))
        .unwrap_or_default()
}

fn real_value(v: &Value) -> Result<f64, String> {
    let x = match v {
        Value::Float(x) => *x,
        Value::Integer(n) => *n as f64,
        _ => return Err(format!("expected a number, found {}", v.type_str())),
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("must be finite, got {x}"))
    }
}

fn real_array(v: &Value) -> Result<Vec<f64>, String> {
    match v {
        Value::Array(items) => items.iter().map(real_value).collect(),
        _ => Err(format!(
            "expected an array of numbers, found {}",
            v.type_str()
        )),
    }
}

fn real_pair(v: &Value) -> Result<[f64; 2], String> {
    match real_array(v)?.as_slice() {
        &[a, b] => Ok([a, b]),
        other => Err(format!(
            "expected a two-element array, found {} elements",
            other.len()
        )),
    }
}

fn complex_value(v: &Value) -> Result<Complex64, String> {
    let [re, im] = real_pair(v).map_err(|e| format!("{e} (complex numbers are [re, im])"))?;
    Ok(Complex64::new(re, im))
}

/// Two numbers are real components, four are `re z1, im z1, re z2, im z2`.
pub fn state_from_numbers(nums: &[f64]) -> Result<StateVector, String> {
    if let Some(x) = nums.iter().find(|x| !x.is_finite()) {
        return Err(format!("components must be finite, got {x}"));
    }
    match *nums {
        [a, b] => Ok(StateVector::from_real(a, b)),
        [a, b, c, d] => Ok(StateVector::new(Complex64::new(a, b), Complex64::new(c, d))),
        _ => Err(format!("expected 2 or 4 numbers, found {}", nums.len())),
    }
}

/// Flag syntax for complex numbers: `a,b` is `a + bi`; a single number is real.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts = parse_numbers(s)?;
    match *parts {
        [re] => Ok(Complex64::new(re, 0.0)),
        [re, im] => Ok(Complex64::new(re, im)),
        _ => Err(format!("expected `re` or `re,im`, got `{s}`")),
    }
}

pub fn parse_state(s: &str) -> Result<StateVector, String> {
    state_from_numbers(&parse_numbers(s)?)
}

fn parse_numbers(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|part| {
            let part = part.trim();
            match part.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                Ok(x) => Err(format!("value must be finite, got {x}")),
                Err(_) => Err(format!("`{part}` is not a number")),
            }
        })
        .collect()
}
