//! Line-oriented experiment configs: `[section]` headers and `key = value`
//! entries, `#` comments. Parse errors carry the offending line number.

use std::collections::BTreeSet;
use std::path::PathBuf;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TaskKind {
    KernelTable,
    Entropy,
    ShortTime,
    BallVolume,
    Rigidity,
    Genus,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::KernelTable => "kernel-table",
            TaskKind::Entropy => "entropy",
            TaskKind::ShortTime => "short-time",
            TaskKind::BallVolume => "ball-volume",
            TaskKind::Rigidity => "rigidity",
            TaskKind::Genus => "genus",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

#[derive(Clone, Debug)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

/// A parsed config: sections of key/value pairs plus the original text
/// (hashed into output records for provenance).
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    sections: Vec<Section>,
    pub text: String,
    pub task: TaskKind,
    pub output_path: PathBuf,
    pub output_format: OutputFormat,
    pub seed_order: u64,
}

fn config_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: Vec<Section> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let stripped = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if stripped.is_empty() {
                continue;
            }
            if let Some(name) = stripped.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| config_err(line, "unterminated section header"))?
                    .trim();
                if name.is_empty() {
                    return Err(config_err(line, "empty section name"));
                }
                if sections.iter().any(|s| s.name == name) {
                    return Err(config_err(line, format!("duplicate section [{name}]")));
                }
                sections.push(Section {
                    name: name.to_string(),
                    line,
                    entries: Vec::new(),
                });
                continue;
            }
            let (key, value) = stripped
                .split_once('=')
                .ok_or_else(|| config_err(line, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(config_err(line, "empty key"));
            }
            let section = sections
                .last_mut()
                .ok_or_else(|| config_err(line, "entry before any [section] header"))?;
            if section.entries.iter().any(|e| e.key == key) {
                return Err(config_err(line, format!("duplicate key `{key}`")));
            }
            section.entries.push(Entry {
                key: key.to_string(),
                value: value.to_string(),
                line,
            });
        }

        let known: BTreeSet<&str> =
            ["shape", "ambient", "task", "output", "search"].into_iter().collect();
        for s in &sections {
            if !known.contains(s.name.as_str()) {
                return Err(config_err(s.line, format!("unknown section [{}]", s.name)));
            }
        }

        let mut cfg = ExperimentConfig {
            sections,
            text: text.to_string(),
            task: TaskKind::Entropy,
            output_path: PathBuf::new(),
            output_format: OutputFormat::Json,
            seed_order: 0,
        };

        let (kind, line) = cfg.require("task", "kind")?;
        cfg.task = match kind.as_str() {
            "kernel-table" => TaskKind::KernelTable,
            "entropy" => TaskKind::Entropy,
            "short-time" => TaskKind::ShortTime,
            "ball-volume" => TaskKind::BallVolume,
            "rigidity" => TaskKind::Rigidity,
            "genus" => TaskKind::Genus,
            other => return Err(config_err(line, format!("unknown task kind `{other}`"))),
        };

        let (path, line) = cfg.require("output", "path")?;
        if path.is_empty() {
            return Err(config_err(line, "output path is empty"));
        }
        cfg.output_path = PathBuf::from(path);
        let (format, line) = cfg.require("output", "format")?;
        cfg.output_format = match format.as_str() {
            "csv" => OutputFormat::Csv,
            "json" => OutputFormat::Json,
            other => return Err(config_err(line, format!("unknown output format `{other}`"))),
        };

        if let Some((v, line)) = cfg.get("search", "seed_order") {
            cfg.seed_order = v
                .parse()
                .map_err(|_| config_err(line, "seed_order must be a nonnegative integer"))?;
        }

        Ok(cfg)
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.iter().any(|s| s.name == section)
    }

    fn section_line(&self, section: &str) -> usize {
        self.sections
            .iter()
            .find(|s| s.name == section)
            .map_or(0, |s| s.line)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<(String, usize)> {
        self.sections.iter().find(|s| s.name == section).and_then(|s| {
            s.entries
                .iter()
                .find(|e| e.key == key)
                .map(|e| (e.value.clone(), e.line))
        })
    }

    pub fn require(&self, section: &str, key: &str) -> Result<(String, usize)> {
        if !self.has_section(section) {
            return Err(config_err(0, format!("missing section [{section}]")));
        }
        self.get(section, key).ok_or_else(|| {
            config_err(
                self.section_line(section),
                format!("missing key `{key}` in [{section}]"),
            )
        })
    }

    pub fn get_f64(&self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.get(section, key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse()
                .map(Some)
                .map_err(|_| config_err(line, format!("`{key}` must be a number"))),
        }
    }

    pub fn require_f64(&self, section: &str, key: &str) -> Result<f64> {
        let (v, line) = self.require(section, key)?;
        v.parse()
            .map_err(|_| config_err(line, format!("`{key}` must be a number")))
    }

    pub fn get_usize(&self, section: &str, key: &str) -> Result<Option<usize>> {
        match self.get(section, key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse()
                .map(Some)
                .map_err(|_| config_err(line, format!("`{key}` must be a nonnegative integer"))),
        }
    }

    pub fn require_f64_list(&self, section: &str, key: &str) -> Result<Vec<f64>> {
        let (v, line) = self.require(section, key)?;
        let parsed: std::result::Result<Vec<f64>, _> =
            v.split_whitespace().map(str::parse).collect();
        let list = parsed
            .map_err(|_| config_err(line, format!("`{key}` must be a space-separated number list")))?;
        if list.is_empty() {
            return Err(config_err(line, format!("`{key}` must be nonempty")));
        }
        Ok(list)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "\
# cylinder entropy
[shape]
name = cylinder
params = 1.0 8.0

[task]
kind = entropy

[output]
path = out.json
format = json

[search]
seed_order = 3
";

    #[test]
    fn parses_sections_keys_and_seed_order() {
        let cfg = ExperimentConfig::parse(GOOD).unwrap();
        assert_eq!(cfg.task, TaskKind::Entropy);
        assert_eq!(cfg.output_format, OutputFormat::Json);
        assert_eq!(cfg.seed_order, 3);
        assert_eq!(cfg.require("shape", "name").unwrap().0, "cylinder");
        assert_eq!(
            cfg.require_f64_list("shape", "params").unwrap(),
            vec![1.0, 8.0]
        );
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "[task]\nkind entropy\n";
        match ExperimentConfig::parse(bad) {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected config error, got {other:?}"),
        }
        let bad = "[task]\nkind = juggling\n[output]\npath = x\nformat = json\n";
        match ExperimentConfig::parse(bad) {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_duplicates_and_strays() {
        assert!(ExperimentConfig::parse("x = 1\n").is_err());
        assert!(ExperimentConfig::parse("[task]\n[task]\n").is_err());
        assert!(ExperimentConfig::parse("[task]\nkind = entropy\nkind = genus\n").is_err());
        assert!(ExperimentConfig::parse("[banquet]\n").is_err());
    }
}
