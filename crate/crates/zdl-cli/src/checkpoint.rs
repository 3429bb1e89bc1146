//! Sweep checkpoints: one JSON line per finished panel block, keyed by
//! (cell id, sub-window, block index).  A resumed sweep reproduces the
//! uninterrupted output bit for bit because block sums are deterministic.

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize, Deserialize)]
struct Entry {
    cell: usize,
    sub: usize,
    block: usize,
    value: f64,
}

pub struct Checkpoint {
    path: PathBuf,
    pub done: HashMap<(usize, usize, usize), f64>,
}

impl Checkpoint {
    pub fn open(path: &Path) -> Result<Self> {
        let mut done = HashMap::new();
        if path.exists() {
            let f = std::fs::File::open(path)
                .with_context(|| format!("opening checkpoint {}", path.display()))?;
            for line in BufReader::new(f).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let e: Entry = serde_json::from_str(&line)
                    .with_context(|| format!("corrupt checkpoint line: {line}"))?;
                done.insert((e.cell, e.sub, e.block), e.value);
            }
        }
        Ok(Checkpoint {
            path: path.to_path_buf(),
            done,
        })
    }

    pub fn record(&mut self, cell: usize, sub: usize, block: usize, value: f64) -> Result<()> {
        self.done.insert((cell, sub, block), value);
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        let e = Entry {
            cell,
            sub,
            block,
            value,
        };
        writeln!(f, "{}", serde_json::to_string(&e)?)?;
        Ok(())
    }
}
