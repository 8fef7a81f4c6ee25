//! Plain-text `key=value` configuration, merged under command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::CliError;

/// Keys accepted in a config file. Dashes and underscores are
/// interchangeable.
pub const KEYS: [&str; 9] = [
    "omega-c", "omega-h", "gamma", "kappa", "delta", "xi0", "nbar-c", "nbar-h", "nbar-e",
];

#[derive(Debug, Default, Clone)]
pub struct Config(BTreeMap<&'static str, f64>);

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
            let k = k.trim().replace('_', "-");
            let key = KEYS
                .iter()
                .find(|&&known| known == k)
                .ok_or_else(|| format!("line {}: unknown key `{k}`", i + 1))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| format!("line {}: `{}` is not a number", i + 1, v.trim()))?;
            map.insert(*key, v);
        }
        Ok(Config(map))
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.0.get(key).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_aliases() {
        let c = Config::parse("# defaults\nnbar_c = 2.5\n\ngamma=0.5 # trailing\n").unwrap();
        assert_eq!(c.get("nbar-c"), Some(2.5));
        assert_eq!(c.get("gamma"), Some(0.5));
        assert_eq!(c.get("kappa"), None);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(Config::parse("temperature=3")
            .unwrap_err()
            .contains("unknown key"));
        assert!(Config::parse("gamma=fast")
            .unwrap_err()
            .contains("not a number"));
        assert!(Config::parse("gamma").unwrap_err().contains("key=value"));
    }
}
