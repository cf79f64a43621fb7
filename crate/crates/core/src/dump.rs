//! Text dump of a built index's statistics, read back by the `expect`
//! command.
//!
//! ```text
//! #mlix-stats v1
//! deployment=partial
//! S=20000
//! K=1000
//! R2=19998
//! R1=0
//! P=1000
//! n=10
//! m=10
//! r=32
//! ```
//!
//! `n`, `m` and `r` are optional averages taken from the dataset.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Deployment, IndexStats};

const MAGIC: &str = "#mlix-stats v1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("stats dump line {line}: {message}")]
pub struct DumpError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatsDump {
    pub deployment: Deployment,
    pub stats: IndexStats,
    pub n: Option<f64>,
    pub m: Option<f64>,
    pub r: Option<f64>,
}

impl StatsDump {
    pub fn to_text(&self) -> String {
        let s = &self.stats;
        let mut out = format!(
            "{MAGIC}\ndeployment={}\nS={}\nK={}\nR2={}\nR1={}\nP={}\n",
            self.deployment, s.service_count, s.key_count, s.input_similar_count, s.similar_count, s.parameter_count
        );
        for (name, v) in [("n", self.n), ("m", self.m), ("r", self.r)] {
            if let Some(v) = v {
                writeln!(out, "{name}={v}").unwrap();
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<StatsDump, DumpError> {
        let err = |line, message: String| DumpError { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
        match lines.next() {
            Some((_, MAGIC)) => {}
            _ => return Err(err(1, format!("expected `{MAGIC}` header"))),
        }

        let mut deployment = None;
        let mut counts: [Option<usize>; 5] = [None; 5];
        let mut reals: [Option<f64>; 3] = [None; 3];
        for (no, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let (name, value) = line
                .split_once('=')
                .ok_or_else(|| err(no, format!("expected `name=value`, got `{line}`")))?;
            let count_slot = ["S", "K", "R2", "R1", "P"].iter().position(|&n| n == name);
            let real_slot = ["n", "m", "r"].iter().position(|&n| n == name);
            let fresh = if name == "deployment" {
                let d = value.parse::<Deployment>().map_err(|e| err(no, e))?;
                deployment.replace(d).is_none()
            } else if let Some(i) = count_slot {
                let v = value
                    .parse()
                    .map_err(|_| err(no, format!("`{name}` must be a non-negative integer")))?;
                counts[i].replace(v).is_none()
            } else if let Some(i) = real_slot {
                let v: f64 = value
                    .parse()
                    .map_err(|_| err(no, format!("`{name}` must be a number")))?;
                if !v.is_finite() || v < 0.0 {
                    return Err(err(no, format!("`{name}` must be finite and non-negative")));
                }
                reals[i].replace(v).is_none()
            } else {
                return Err(err(no, format!("unknown field `{name}`")));
            };
            if !fresh {
                return Err(err(no, format!("field `{name}` repeated")));
            }
        }

        let end = text.lines().count().max(1);
        let deployment = deployment.ok_or_else(|| err(end, "field `deployment` missing".into()))?;
        let get = |i: usize, name: &str| counts[i].ok_or_else(|| err(end, format!("field `{name}` missing")));
        let stats = IndexStats {
            service_count: get(0, "S")?,
            key_count: get(1, "K")?,
            input_similar_count: get(2, "R2")?,
            similar_count: get(3, "R1")?,
            parameter_count: get(4, "P")?,
        };
        Ok(StatsDump {
            deployment,
            stats,
            n: reals[0],
            m: reals[1],
            r: reals[2],
        })
    }
}
