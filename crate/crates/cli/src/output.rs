use serde::Serialize;
use std::fmt;
use std::path::{Path, PathBuf};

/// Invalid configuration; reported with exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub status: Status,
    pub name: String,
    pub value: String,
    pub tolerance: String,
    /// Identity or inequality being checked.
    pub tag: String,
}

impl Check {
    pub fn below(name: &str, value: f64, tol: f64, tag: &str) -> Check {
        Check::new(
            value < tol,
            name,
            format!("{value:.3e}"),
            format!("< {tol:.0e}"),
            tag,
        )
    }

    pub fn new(ok: bool, name: &str, value: String, tolerance: String, tag: &str) -> Check {
        Check {
            status: if ok { Status::Pass } else { Status::Fail },
            name: name.into(),
            value,
            tolerance,
            tag: tag.into(),
        }
    }

    pub fn inconclusive(name: &str, value: String, tag: &str) -> Check {
        Check {
            status: Status::Inconclusive,
            name: name.into(),
            value,
            tolerance: "-".into(),
            tag: tag.into(),
        }
    }

    pub fn line(&self) -> String {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        format!(
            "{status} {}: value {} tolerance {} [{}]",
            self.name, self.value, self.tolerance, self.tag
        )
    }
}

/// Writes the artifacts of one subcommand into the output directory.
pub struct Output {
    dir: PathBuf,
    command: String,
}

impl Output {
    pub fn new(dir: &Path, command: &str) -> anyhow::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Output {
            dir: dir.to_path_buf(),
            command: command.into(),
        })
    }

    pub fn path(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}{suffix}", self.command))
    }

    pub fn json<T: Serialize>(&self, value: &T) -> anyhow::Result<PathBuf> {
        let p = self.path(".json");
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(&p, text)?;
        Ok(p)
    }

    pub fn csv(&self, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<PathBuf> {
        let p = self.path(".csv");
        let mut w = csv::Writer::from_path(&p)?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(p)
    }

    pub fn text(&self, suffix: &str, body: &str) -> anyhow::Result<PathBuf> {
        let p = self.path(suffix);
        std::fs::write(&p, body)?;
        Ok(p)
    }
}

/// Row of numbers formatted with the shortest round-trip representation.
pub fn row<I: IntoIterator<Item = f64>>(values: I) -> Vec<String> {
    values.into_iter().map(|v| v.to_string()).collect()
}
