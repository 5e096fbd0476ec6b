//! The `atp.conf` key=value store.

use std::fmt;
use std::path::{Path, PathBuf};

pub const CONFIG_FILE: &str = "atp.conf";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NavigationType {
    Xml,
    Dsl,
    Html,
}

impl NavigationType {
    pub const NAMES: &'static str = "xml, dsl, html";

    fn parse(s: &str) -> Option<Self> {
        match s {
            "xml" => Some(Self::Xml),
            "dsl" => Some(Self::Dsl),
            "html" => Some(Self::Html),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Xml => "xml",
            Self::Dsl => "dsl",
            Self::Html => "html",
        }
    }

    /// File extension of inputs of this type.
    pub fn extension(self) -> &'static str {
        match self {
            Self::Xml => "xml",
            Self::Dsl => "nav",
            Self::Html => "html",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ReportFormat {
    Json,
    Html,
    Text,
}

impl ReportFormat {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "json" => Some(Self::Json),
            "html" => Some(Self::Html),
            "text" => Some(Self::Text),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Json => "json",
            Self::Html => "html",
            Self::Text => "text",
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            Self::Json => "report.json",
            Self::Html => "report.html",
            Self::Text => "report.txt",
        }
    }
}

pub const KEYS: [&str; 7] = ["sut", "root", "navigation-type", "navigation-folder", "seed", "report-format", "faults"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    /// URL of the application under test.
    pub sut: String,
    /// Project directory, relative to the configuration directory.
    pub root: String,
    pub navigation_type: NavigationType,
    pub navigation_folder: Option<String>,
    pub seed: u64,
    pub report_format: Vec<ReportFormat>,
    /// Fault file applied to the simulated application on `run`.
    pub faults: Option<String>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            sut: "http://localhost:8080/".into(),
            root: "project".into(),
            navigation_type: NavigationType::Xml,
            navigation_folder: None,
            seed: 0,
            report_format: vec![ReportFormat::Json, ReportFormat::Html, ReportFormat::Text],
            faults: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Config {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let optional = |v: &str| (!v.is_empty()).then(|| v.to_owned());
        match key {
            "sut" => self.sut = value.to_owned(),
            "root" if value.is_empty() => return Err(ConfigError("root must not be empty".into())),
            "root" => self.root = value.to_owned(),
            "navigation-type" => {
                self.navigation_type = NavigationType::parse(value).ok_or_else(|| {
                    ConfigError(format!("unsupported navigation-type `{value}`; expected one of {}", NavigationType::NAMES))
                })?
            }
            "navigation-folder" => self.navigation_folder = optional(value),
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| ConfigError(format!("seed must be a non-negative integer, got `{value}`")))?
            }
            "report-format" => {
                let mut formats = Vec::new();
                for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                    let f = ReportFormat::parse(part).ok_or_else(|| {
                        ConfigError(format!("unknown report format `{part}`; expected a subset of json, html, text"))
                    })?;
                    if !formats.contains(&f) {
                        formats.push(f);
                    }
                }
                formats.sort();
                self.report_format = formats;
            }
            "faults" => self.faults = optional(value),
            other => return Err(ConfigError(format!("unknown key `{other}`; valid keys: {}", KEYS.join(", ")))),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "sut" => self.sut.clone(),
            "root" => self.root.clone(),
            "navigation-type" => self.navigation_type.as_str().to_owned(),
            "navigation-folder" => self.navigation_folder.clone().unwrap_or_default(),
            "seed" => self.seed.to_string(),
            "report-format" => self.report_format.iter().map(|f| f.as_str()).collect::<Vec<_>>().join(","),
            "faults" => self.faults.clone().unwrap_or_default(),
            _ => return None,
        })
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Config::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("{CONFIG_FILE} line {}: expected key=value", i + 1)))?;
            cfg.set(key.trim(), value.trim()).map_err(|e| ConfigError(format!("{CONFIG_FILE} line {}: {e}", i + 1)))?;
        }
        Ok(cfg)
    }

    pub fn render(&self) -> String {
        KEYS.iter().map(|k| format!("{k}={}\n", self.get(k).expect("known key"))).collect()
    }

    pub fn load(dir: &Path) -> Result<Self, ConfigError> {
        match std::fs::read_to_string(dir.join(CONFIG_FILE)) {
            Ok(text) => Self::parse(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::default()),
            Err(e) => Err(ConfigError(format!("cannot read {CONFIG_FILE}: {e}"))),
        }
    }

    pub fn save(&self, dir: &Path) -> Result<(), ConfigError> {
        std::fs::write(dir.join(CONFIG_FILE), self.render())
            .map_err(|e| ConfigError(format!("cannot write {CONFIG_FILE}: {e}")))
    }

    /// Resolves a configured path against the configuration directory.
    pub fn resolve(dir: &Path, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_owned()
        } else {
            dir.join(p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_parse_round_trip() {
        let mut c = Config::default();
        c.set("navigation-type", "dsl").unwrap();
        c.set("navigation-folder", "models/shop").unwrap();
        c.set("report-format", "text,json").unwrap();
        c.set("seed", "17").unwrap();
        assert_eq!(Config::parse(&c.render()).unwrap(), c);
        assert_eq!(c.get("report-format").unwrap(), "json,text");
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = Config::default();
        let e = c.set("navigation-type", "xmi").unwrap_err();
        assert!(e.0.contains("xml, dsl, html"), "{e}");
        assert!(c.set("colour", "red").unwrap_err().0.contains("valid keys"));
        assert!(c.set("seed", "-1").is_err());
        assert!(c.set("report-format", "pdf").is_err());
        assert!(Config::parse("sut\n").is_err());
    }
}
