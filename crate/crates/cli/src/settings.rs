//! Flat `key = value` config files and their merge with command-line flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Every key a config file may set. Keys are matched after mapping `-` to `_`.
const KNOWN_KEYS: &[&str] = &[
    "epsilon",
    "g1",
    "g2",
    "n_bar",
    "theta",
    "delta_nu",
    "seed",
    "samples",
    "shots",
    "replications",
    "mc",
    "output",
    "format",
    "eps_min",
    "eps_max",
    "eps_points",
    "exact",
    "report",
];

#[derive(Debug, Default)]
pub struct FileValues(BTreeMap<String, String>);

impl FileValues {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("config: cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("config line {}: expected key = value", n + 1)))?;
            let key = key.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Validation(format!("config line {}: unknown key '{key}'", n + 1)));
            }
            map.insert(key, value.trim().to_owned());
        }
        Ok(Self(map))
    }

    /// The flag value if given, else the file value, else `None`.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.0
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|e| CliError::Validation(format!("{key}: cannot parse '{v}': {e}")))
            })
            .transpose()
    }

    pub fn or<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }

    /// A switch is on when the flag is passed or the file sets it to `true`.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        Ok(flag || self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_dashes_and_blank_lines() {
        let f = FileValues::parse("# run\nepsilon = 0.2\n\nn-bar=3 # squeezed\nmc = true\n").unwrap();
        assert_eq!(f.or(None, "epsilon", 0.1).unwrap(), 0.2);
        assert_eq!(f.or(None, "n_bar", 1.0).unwrap(), 3.0);
        assert!(f.switch(false, "mc").unwrap());
        assert!(!f.switch(false, "exact").unwrap());
    }

    #[test]
    fn flags_override_file() {
        let f = FileValues::parse("seed = 4").unwrap();
        assert_eq!(f.or(Some(9u64), "seed", 0).unwrap(), 9);
        assert_eq!(f.or(None, "seed", 0u64).unwrap(), 4);
        assert_eq!(f.or(None, "shots", 10_000usize).unwrap(), 10_000);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(FileValues::parse("colour = red").is_err());
        assert!(FileValues::parse("epsilon 0.1").is_err());
        let f = FileValues::parse("epsilon = abc").unwrap();
        assert!(f.or(None, "epsilon", 0.1f64).is_err());
    }
}
