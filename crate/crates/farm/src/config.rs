//! `key = value` configuration files.

use crate::error::{FarmError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Address the migration listener binds to.
    pub listen: String,
    /// Peer to push suspended machines to, if any.
    pub peer: Option<String>,
    pub poll_ms: u64,
    pub max_workers: usize,
    /// Cycles granted per run session.
    pub cycle_budget: i64,
    /// Quota applied to graphs accepted over the wire.
    pub graph_quota: Option<usize>,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            listen: "127.0.0.1:0".into(),
            peer: None,
            poll_ms: 25,
            max_workers: 1,
            cycle_budget: 100,
            graph_quota: None,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut cfg = Config::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| FarmError::Config(format!("line {}: expected key = value", no + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| FarmError::Config(format!("line {}: bad {what}: {value}", no + 1));
            match key {
                "listen" => cfg.listen = value.to_string(),
                "peer" => cfg.peer = Some(value.to_string()),
                "poll_ms" => cfg.poll_ms = value.parse().map_err(|_| bad("poll_ms"))?,
                "max_workers" => {
                    cfg.max_workers = value.parse().map_err(|_| bad("max_workers"))?
                }
                "cycle_budget" => {
                    cfg.cycle_budget = value.parse().map_err(|_| bad("cycle_budget"))?
                }
                "graph_quota" => {
                    cfg.graph_quota = Some(value.parse().map_err(|_| bad("graph_quota"))?)
                }
                other => {
                    return Err(FarmError::Config(format!(
                        "line {}: unknown key '{other}'",
                        no + 1
                    )))
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Config> {
        Config::parse(&std::fs::read_to_string(path)?)
    }
}
