//! Flat `key = value` config files and flag/config/default resolution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// A user-facing configuration problem (exit code 1).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// Parse `key = value` lines. Keys mirror long flag names; `#` starts a
/// comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError(format!("config line {}: expected `key = value`", ln + 1)));
        };
        let key = k.trim().trim_start_matches("--").to_string();
        if key.is_empty() {
            return Err(ConfigError(format!("config line {}: empty key", ln + 1)));
        }
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(ConfigError(format!("config line {}: duplicate key `{key}`", ln + 1)));
        }
    }
    Ok(map)
}

pub fn load_config(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Resolves every setting with precedence flag > config file > default and
/// remembers the outcome for the run manifest.
pub struct Resolver {
    file: BTreeMap<String, String>,
    used: BTreeSet<String>,
    resolved: BTreeMap<String, String>,
}

impl Resolver {
    pub fn new(file: BTreeMap<String, String>) -> Self {
        Resolver {
            file,
            used: BTreeSet::new(),
            resolved: BTreeMap::new(),
        }
    }

    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> anyhow::Result<T>
    where
        T: FromStr + fmt::Display,
        T::Err: fmt::Display,
    {
        self.used.insert(key.to_string());
        let value = match (flag, self.file.get(key)) {
            (Some(v), _) => v,
            (None, Some(text)) => text
                .parse()
                .map_err(|e| config_error(format!("config key `{key}` = `{text}`: {e}")))?,
            (None, None) => default,
        };
        self.resolved.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    /// Like [`get`](Self::get) for settings without a default.
    pub fn get_opt<T>(&mut self, key: &str, flag: Option<T>) -> anyhow::Result<Option<T>>
    where
        T: FromStr + fmt::Display,
        T::Err: fmt::Display,
    {
        self.used.insert(key.to_string());
        let value = match (flag, self.file.get(key)) {
            (Some(v), _) => Some(v),
            (None, Some(text)) => Some(
                text.parse()
                    .map_err(|e| config_error(format!("config key `{key}` = `{text}`: {e}")))?,
            ),
            (None, None) => None,
        };
        if let Some(v) = &value {
            self.resolved.insert(key.to_string(), v.to_string());
        }
        Ok(value)
    }

    /// Reject config keys the subcommand never asked for.
    pub fn finish(self) -> anyhow::Result<BTreeMap<String, String>> {
        let unknown: Vec<&String> = self.file.keys().filter(|k| !self.used.contains(*k)).collect();
        if !unknown.is_empty() {
            return Err(config_error(format!("unknown config keys: {unknown:?}")));
        }
        Ok(self.resolved)
    }
}

/// Render resolved settings back into the config format.
pub fn render_config(settings: &BTreeMap<String, String>) -> String {
    settings.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

/// Comma-separated list, e.g. `5,10,15`.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let items = s
            .split(',')
            .map(|p| p.trim().parse::<T>().map_err(|e| format!("`{p}`: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if items.is_empty() {
            return Err("empty list".into());
        }
        Ok(List(items))
    }
}

impl<T: fmt::Display> fmt::Display for List<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_files() {
        let m = parse_config("# sweep\nseeds = 20\n--lr=0.002 # trailing\n\n").unwrap();
        assert_eq!(m["seeds"], "20");
        assert_eq!(m["lr"], "0.002");
        assert!(parse_config("seeds 20").is_err());
        assert!(parse_config("a = 1\na = 2").is_err());
    }

    #[test]
    fn precedence_and_unknown_keys() {
        let file = parse_config("seeds = 20\nepochs = 10").unwrap();
        let mut r = Resolver::new(file);
        assert_eq!(r.get("seeds", Some(3usize), 200).unwrap(), 3);
        assert_eq!(r.get("epochs", None, 300usize).unwrap(), 10);
        assert_eq!(r.get("lr", None, 0.002f64).unwrap(), 0.002);
        let resolved = r.finish().unwrap();
        assert_eq!(render_config(&resolved), "epochs = 10\nlr = 0.002\nseeds = 3\n");

        let mut r = Resolver::new(parse_config("typo = 1").unwrap());
        r.get("seeds", None, 1usize).unwrap();
        assert!(r.finish().is_err());
        let mut r = Resolver::new(parse_config("seeds = x").unwrap());
        assert!(r.get("seeds", None, 1usize).is_err());
    }

    #[test]
    fn lists_round_trip() {
        let l: List<usize> = "5, 10,15".parse().unwrap();
        assert_eq!(l.0, vec![5, 10, 15]);
        assert_eq!(l.to_string(), "5,10,15");
        assert!("5,,3".parse::<List<usize>>().is_err());
    }
}
