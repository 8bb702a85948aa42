//! Run configuration: defaults, then a `key=value` file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            _ => Err(format!("unknown format {s:?}, expected json, csv or text")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub cache_dir: Option<PathBuf>,
    pub digits: u32,
    pub trunc: u64,
    pub jobs: usize,
    /// `None` leaves the choice to the subcommand.
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            cache_dir: None,
            digits: 50,
            trunc: 200,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            format: None,
        }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Flag values that override the file; `None` means not given.
#[derive(Default)]
pub struct Overrides {
    pub cache_dir: Option<PathBuf>,
    pub digits: Option<u32>,
    pub trunc: Option<u64>,
    pub jobs: Option<usize>,
    pub format: Option<Format>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError(format!("config key {key}: cannot parse {value:?}")))
}

impl RunConfig {
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("config line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "cache_dir" => self.cache_dir = Some(PathBuf::from(value)),
                "digits" => self.digits = parse(key, value)?,
                "trunc" => self.trunc = parse(key, value)?,
                "jobs" => self.jobs = parse(key, value)?,
                "format" => self.format = Some(value.parse().map_err(ConfigError)?),
                _ => return Err(ConfigError(format!("unknown config key {key:?}"))),
            }
        }
        Ok(())
    }

    /// Defaults, then the file, then `FGC_CACHE`, then flags.
    pub fn load(file: Option<&Path>, env_cache: Option<String>, o: Overrides) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        if let Some(dir) = env_cache.filter(|d| !d.is_empty()) {
            cfg.cache_dir = Some(PathBuf::from(dir));
        }
        if let Some(d) = o.cache_dir {
            cfg.cache_dir = Some(d);
        }
        if let Some(d) = o.digits {
            cfg.digits = d;
        }
        if let Some(t) = o.trunc {
            cfg.trunc = t;
        }
        if let Some(j) = o.jobs {
            cfg.jobs = j;
        }
        if o.format.is_some() {
            cfg.format = o.format;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.digits < 10 {
            return Err(ConfigError(format!("precision {} is below 10 digits", self.digits)));
        }
        if self.trunc == 0 {
            return Err(ConfigError("truncation must be positive".into()));
        }
        if self.jobs == 0 {
            return Err(ConfigError("worker count must be at least 1".into()));
        }
        Ok(())
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let mut cfg = RunConfig::default();
        cfg.apply_text("# comment\ndigits = 30\ntrunc=120\nformat=json\n").unwrap();
        assert_eq!((cfg.digits, cfg.trunc, cfg.format), (30, 120, Some(Format::Json)));
        let o = Overrides { digits: Some(40), ..Default::default() };
        let dir = std::env::temp_dir().join(format!("fgc-cfg-{}", std::process::id()));
        std::fs::write(&dir, "digits=30\ncache_dir=/tmp/x\n").unwrap();
        let cfg = RunConfig::load(Some(&dir), Some("/tmp/env".into()), o).unwrap();
        assert_eq!(cfg.digits, 40);
        assert_eq!(cfg.cache_dir, Some(PathBuf::from("/tmp/env")));
        std::fs::remove_file(dir).unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = RunConfig::default();
        assert!(cfg.apply_text("colour=red").is_err());
        assert!(cfg.apply_text("digits").is_err());
        assert!(cfg.apply_text("digits=abc").is_err());
        let o = Overrides { digits: Some(5), ..Default::default() };
        assert!(RunConfig::load(None, None, o).is_err());
        let o = Overrides { jobs: Some(0), ..Default::default() };
        assert!(RunConfig::load(None, None, o).is_err());
    }
}
