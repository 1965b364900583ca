//! Run configuration: flat `key = value` lines grouped under `[section]`
//! headers. `#` and `;` start comments. Every value keeps the line it came
//! from so validation errors can point at it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use critrad_core::{Expr, Measure};

use crate::error::CliError;

const SCHEMA: &[(&str, &[&str])] = &[
    ("domain", &["dim", "half_width", "n"]),
    ("functions", &["p", "w", "v", "rho", "f"]),
    (
        "radii",
        &["kind", "min", "max", "count", "values", "potential_min", "potential_max", "potential_count"],
    ),
    ("sweep", &["stride", "interior", "radii"]),
    (
        "run",
        &[
            "measure", "thetas", "eta", "q", "beta", "seed", "n0", "pair_budget", "random",
            "operators", "levels", "cap", "x0", "radius",
        ],
    ),
    ("output", &["dir"]),
];

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// The raw key-value text after syntax checks.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

fn invalid(line: usize, msg: impl fmt::Display) -> CliError {
    CliError::Validation(format!("line {line}: {msg}"))
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RawConfig::default();
        let mut current: Option<String> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split(['#', ';']).next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| invalid(line, "unterminated section header"))?
                    .trim()
                    .to_ascii_lowercase();
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return Err(invalid(line, format!("unknown section [{name}]")));
                }
                if cfg.sections.contains_key(&name) {
                    return Err(invalid(line, format!("section [{name}] appears twice")));
                }
                cfg.sections.insert(name.clone(), BTreeMap::new());
                current = Some(name);
                continue;
            }
            let (key, value) =
                body.split_once('=').ok_or_else(|| invalid(line, "expected `key = value`"))?;
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim();
            let section = current.as_ref().ok_or_else(|| invalid(line, "key outside any section"))?;
            let known = SCHEMA.iter().find(|(s, _)| s == section).map(|(_, k)| *k).unwrap_or(&[]);
            if !known.contains(&key.as_str()) {
                return Err(invalid(line, format!("unknown key `{key}` in [{section}]")));
            }
            if value.is_empty() {
                return Err(invalid(line, format!("`{key}` has no value")));
            }
            let map = cfg.sections.get_mut(section).expect("section was inserted");
            if map.insert(key.clone(), Entry { value: value.to_string(), line }).is_some() {
                return Err(invalid(line, format!("`{key}` set twice in [{section}]")));
            }
        }
        Ok(cfg)
    }

    fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section)?.get(key)
    }

    pub fn text(&self, section: &str, key: &str) -> Option<&str> {
        self.entry(section, key).map(|e| e.value.as_str())
    }

    pub fn get<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: fmt::Display,
    {
        match self.entry(section, key) {
            None => Ok(None),
            Some(e) => e.value.parse().map(Some).map_err(|err| {
                invalid(e.line, format!("[{section}] {key} = `{}`: {err}", e.value))
            }),
        }
    }

    pub fn require<T: FromStr>(&self, section: &str, key: &str) -> Result<T, CliError>
    where
        T::Err: fmt::Display,
    {
        self.get(section, key)?
            .ok_or_else(|| CliError::Validation(format!("missing [{section}] {key}")))
    }

    pub fn list<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<Vec<T>>, CliError>
    where
        T::Err: fmt::Display,
    {
        let Some(e) = self.entry(section, key) else { return Ok(None) };
        e.value
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|err| invalid(e.line, format!("[{section}] {key}: `{}`: {err}", s.trim())))
            })
            .collect::<Result<Vec<T>, _>>()
            .map(Some)
    }

    pub fn expr(&self, key: &str) -> Result<Option<Expr>, CliError> {
        match self.entry("functions", key) {
            None => Ok(None),
            Some(e) => Expr::parse(&e.value)
                .map(Some)
                .map_err(|err| invalid(e.line, format!("[functions] {key}: {err}"))),
        }
    }

    /// Line of a key, for diagnostics raised after parsing.
    pub fn line(&self, section: &str, key: &str) -> Option<usize> {
        self.entry(section, key).map(|e| e.line)
    }

    /// All values as a nested map, for the report.
    pub fn to_map(&self) -> BTreeMap<String, BTreeMap<String, String>> {
        self.sections
            .iter()
            .map(|(s, m)| (s.clone(), m.iter().map(|(k, e)| (k.clone(), e.value.clone())).collect()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiiKind {
    Log,
    Lattice,
    List,
}

impl FromStr for RadiiKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "log" => Ok(RadiiKind::Log),
            "lattice" => Ok(RadiiKind::Lattice),
            "list" => Ok(RadiiKind::List),
            _ => Err("expected log, lattice or list".into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasureArg(pub Measure);

impl FromStr for MeasureArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "clipped" => Ok(MeasureArg(Measure::Clipped)),
            "full" => Ok(MeasureArg(Measure::Full)),
            _ => Err("expected clipped or full".into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let c = RawConfig::parse(
            "# header\n[domain]\ndim = 2 ; trailing\nhalf_width=1.5\n\n[functions]\np = 2 + x1^2\n",
        )
        .unwrap();
        assert_eq!(c.require::<usize>("domain", "dim").unwrap(), 2);
        assert_eq!(c.require::<f64>("domain", "half_width").unwrap(), 1.5);
        assert_eq!(c.text("functions", "p"), Some("2 + x1^2"));
        assert_eq!(c.line("functions", "p"), Some(7));
        assert!(c.get::<usize>("domain", "n").unwrap().is_none());
    }

    #[test]
    fn diagnostics_carry_lines() {
        let e = RawConfig::parse("[domain]\ndim = 2\nbogus = 1\n").unwrap_err();
        assert_eq!(e.to_string(), "line 3: unknown key `bogus` in [domain]");
        let e = RawConfig::parse("dim = 2\n").unwrap_err();
        assert!(e.to_string().starts_with("line 1:"));
        let e = RawConfig::parse("[nope]\n").unwrap_err();
        assert!(e.to_string().contains("unknown section"));
        let e = RawConfig::parse("[domain]\n[domain]\n").unwrap_err();
        assert!(e.to_string().contains("twice"));
        let c = RawConfig::parse("[domain]\n\ndim = two\n").unwrap();
        let e = c.require::<usize>("domain", "dim").unwrap_err();
        assert!(e.to_string().starts_with("line 3:"));
        let c = RawConfig::parse("[functions]\np = 2 +\n").unwrap();
        assert!(c.expr("p").unwrap_err().to_string().starts_with("line 2:"));
    }

    #[test]
    fn lists() {
        let c = RawConfig::parse("[run]\nthetas = 0, 0.5,2\n").unwrap();
        assert_eq!(c.list::<f64>("run", "thetas").unwrap(), Some(vec![0.0, 0.5, 2.0]));
        let c = RawConfig::parse("[run]\nthetas = 0, x\n").unwrap();
        assert!(c.list::<f64>("run", "thetas").is_err());
    }
}
