//! Run settings: defaults, the key-value config file, and flag overrides.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use namebench_core::filters::ProfiniteThread;
use serde::Serialize;

use crate::CliError;

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_WINDOW: u64 = 64;
pub const DEFAULT_DEPTH: u32 = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Tsv,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Format, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "tsv" => Ok(Format::Tsv),
            _ => Err(CliError::Usage(format!("unknown format {s:?} (json or tsv)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Tsv => "tsv",
        })
    }
}

/// Everything that can influence a report. `depth` is the chain horizon `T`
/// used by the ap1 and splice suites.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Settings {
    pub seed: u64,
    pub window: u64,
    pub depth: u32,
    pub thread: ProfiniteThread,
    #[serde(skip)]
    pub format: Format,
    #[serde(skip)]
    pub out: Option<String>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            seed: DEFAULT_SEED,
            window: DEFAULT_WINDOW,
            depth: DEFAULT_DEPTH,
            thread: ProfiniteThread::Zero,
            format: Format::Json,
            out: None,
        }
    }
}

impl Settings {
    /// Apply `key = value` lines; `#` starts a comment.
    pub fn apply_config_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| CliError::Usage(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn apply_config_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_config_text(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let bad = |what: &str| CliError::Usage(format!("invalid {what} {value:?}"));
        match key {
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "window" => self.window = value.parse().map_err(|_| bad("window"))?,
            "depth" => {
                let depth: u32 = value.parse().map_err(|_| bad("depth"))?;
                if depth > 16 {
                    return Err(CliError::Usage(format!("depth {depth} exceeds 16")));
                }
                self.depth = depth;
            }
            "thread" => self.thread = value.parse().map_err(|_| bad("thread"))?,
            "format" => self.format = value.parse()?,
            "out" => self.out = Some(value.to_string()),
            _ => return Err(CliError::Usage(format!("unknown key {key:?}"))),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text() {
        let mut s = Settings::default();
        s.apply_config_text("# run\nseed = 42\nwindow=32  # short\nthread = int:3\nformat = tsv\n")
            .unwrap();
        assert_eq!((s.seed, s.window, s.format), (42, 32, Format::Tsv));
        assert_eq!(s.thread.to_string(), "int:3");
        assert!(s.apply_config_text("colour = blue").is_err());
        assert!(s.apply_config_text("seed").is_err());
        assert!(s.apply_config_text("depth = 99").is_err());
    }
}
