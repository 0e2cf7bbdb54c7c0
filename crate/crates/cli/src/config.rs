//! Key/value defaults file shared by every subcommand.
//!
//! Format: one `key = value` pair per line, `#` starts a comment, blank
//! lines are ignored. Keys are the long flag names without the leading
//! dashes (`m`, `e`, `B`, `omega`, `theta`, `s-z`, and `format` where the
//! subcommand prints tables). Values from the file fill in parameters the
//! command line leaves unset; explicit flags always win.

use std::collections::BTreeMap;
use std::path::Path;

use crate::CliError;

/// Physical-parameter keys every subcommand accepts in a config file.
pub const PHYS_KEYS: [&str; 6] = ["m", "e", "B", "omega", "theta", "s-z"];

/// Parsed config file: raw string values by key, later lines overriding
/// earlier ones.
#[derive(Debug, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    /// Reject any key outside `allowed`, naming the offender.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        for key in self.entries.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "unknown config key `{key}` (allowed here: {})",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    /// Raw string value for a key, if present.
    pub fn get_raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Value parsed as a float, if present.
    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<f64>().map(Some).map_err(|_| {
                CliError::Usage(format!(
                    "config value for `{key}` is not a number: `{raw}`"
                ))
            }),
        }
    }
}

/// Read and parse a config file.
pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|err| {
        CliError::Usage(format!("cannot read config file {}: {err}", path.display()))
    })?;
    parse(&text, &path.display().to_string())
}

fn parse(text: &str, origin: &str) -> Result<ConfigFile, CliError> {
    let mut entries = BTreeMap::new();
    for (index, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "{origin}:{}: expected `key = value`, got `{line}`",
                index + 1
            )));
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(CliError::Usage(format!(
                "{origin}:{}: empty key before `=`",
                index + 1
            )));
        }
        entries.insert(key.to_string(), value.to_string());
    }
    Ok(ConfigFile { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_blanks_and_overrides() {
        let cfg = parse(
            "# defaults\n\nm = 2.0\ntheta = 0.1  # inline\nm = 3.0\n",
            "test",
        )
        .unwrap();
        assert_eq!(cfg.get_f64("m").unwrap(), Some(3.0));
        assert_eq!(cfg.get_f64("theta").unwrap(), Some(0.1));
        assert_eq!(cfg.get_f64("e").unwrap(), None);
    }

    #[test]
    fn rejects_lines_without_assignment() {
        let err = parse("just words\n", "test").unwrap_err();
        assert!(matches!(err, CliError::Usage(msg) if msg.contains("test:1")));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_numbers() {
        let cfg = parse("masz = 1\n", "test").unwrap();
        assert!(cfg.check_keys(&PHYS_KEYS).is_err());

        let cfg = parse("m = abc\n", "test").unwrap();
        assert!(cfg.check_keys(&PHYS_KEYS).is_ok());
        assert!(cfg.get_f64("m").is_err());
    }
}
