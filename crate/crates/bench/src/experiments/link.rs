use super::{mix_seed, realize};
use crate::config::ExperimentConfig;
use crate::error::{BenchError, BenchResult};
use crate::output::{num, Table};
use chanshort::channel::n0_from_snr_db;
use chanshort::rx::{run_iterative_receiver, IterationTrace, Link, ReceiverConfig, RxMethod};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

/// Aggregate of one (SNR, method, ν, iteration).
#[derive(Debug, Clone, PartialEq)]
pub struct LinkPoint {
    pub snr_db: f64,
    pub n0: f64,
    pub method: RxMethod,
    pub nu: usize,
    pub iteration: usize,
    pub blocks: usize,
    pub block_errors: usize,
    pub bit_errors: usize,
}

impl LinkPoint {
    pub fn bler(&self) -> f64 {
        self.block_errors as f64 / self.blocks as f64
    }
}

/// One line of the block trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceLine {
    pub snr_db: f64,
    pub method: RxMethod,
    pub nu: usize,
    pub block: usize,
    pub trace: IterationTrace,
}

pub fn trace_path(csv: &Path) -> PathBuf {
    csv.with_extension("trace.jsonl")
}

type Key = (u64, RxMethod, usize);

fn key(snr_db: f64, method: RxMethod, nu: usize) -> Key {
    (snr_db.to_bits(), method, nu)
}

/// Blocks already in the trace. A torn last line is ignored and rewritten
/// by the resumed run.
fn load_trace(path: &Path) -> BenchResult<HashMap<Key, BTreeMap<usize, IterationTrace>>> {
    let mut done: HashMap<Key, BTreeMap<usize, IterationTrace>> = HashMap::new();
    let Ok(f) = std::fs::File::open(path) else { return Ok(done) };
    for line in std::io::BufReader::new(f).lines() {
        let line = line?;
        if let Ok(t) = serde_json::from_str::<TraceLine>(&line) {
            done.entry(key(t.snr_db, t.method, t.nu)).or_default().insert(t.block, t.trace);
        }
    }
    Ok(done)
}

/// Block error rates per global iteration. Blocks are simulated in chunks;
/// a point stops after the first chunk that brings its final-iteration block
/// errors to `max_block_errors`, or at the block budget. With a trace path
/// every finished block is appended there and blocks already present are
/// reused instead of simulated again.
pub fn link_sim(cfg: &ExperimentConfig, trace: Option<&Path>) -> BenchResult<Vec<LinkPoint>> {
    let s = &cfg.link;
    let mut done = match trace {
        Some(p) => load_trace(p)?,
        None => HashMap::new(),
    };
    let mut writer = match trace {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            // Drop a torn last line so appended records start on a fresh line.
            if let Ok(text) = std::fs::read_to_string(p) {
                if !text.is_empty() && !text.ends_with('\n') {
                    let keep = text.rfind('\n').map_or(0, |i| i + 1);
                    std::fs::write(p, &text[..keep])?;
                }
            }
            Some(std::fs::OpenOptions::new().create(true).append(true).open(p)?)
        }
        None => None,
    };
    let real = realize(&cfg.channel, cfg.seed, 0);
    let mut points = Vec::new();
    for &snr in &cfg.snr_db {
        let n0 = n0_from_snr_db(snr);
        let link = Link::new(real.channel(n0), s.tx, cfg.design).map_err(|e| match e {
            chanshort::Error::InvalidInput(m) => BenchError::Config(m),
            e => e.into(),
        })?;
        for &method in &cfg.methods {
            for &nu in &cfg.nu {
                let rx = ReceiverConfig {
                    method,
                    nu,
                    global_iters: s.global_iters,
                    ext_scale: s.ext_scale,
                    scale_both: s.scale_both,
                    max_log: s.max_log,
                    freeze_after: s.freeze_after,
                };
                let mut results = done.remove(&key(snr, method, nu)).unwrap_or_default();
                results.retain(|&b, t| t.records.len() == s.global_iters && t.seed == mix_seed(cfg.seed, b as u64));
                let mut end = 0;
                while end < s.blocks {
                    let start = end;
                    end = (start + s.chunk).min(s.blocks);
                    let todo: Vec<usize> = (start..end).filter(|b| !results.contains_key(b)).collect();
                    let new: Vec<(usize, IterationTrace)> = todo
                        .par_iter()
                        .map(|&b| run_iterative_receiver(&link, &rx, mix_seed(cfg.seed, b as u64)).map(|t| (b, t)))
                        .collect::<chanshort::Result<_>>()?;
                    if let Some(w) = writer.as_mut() {
                        for (b, t) in &new {
                            let line = TraceLine { snr_db: snr, method, nu, block: *b, trace: t.clone() };
                            writeln!(w, "{}", serde_json::to_string(&line).expect("trace serializes"))?;
                        }
                        w.flush()?;
                    }
                    results.extend(new);
                    let errors = results.range(..end).filter(|(_, t)| t.records.last().is_some_and(|r| r.block_error)).count();
                    if errors >= s.max_block_errors {
                        break;
                    }
                }
                for it in 0..s.global_iters {
                    let mut p = LinkPoint { snr_db: snr, n0, method, nu, iteration: it + 1, blocks: 0, block_errors: 0, bit_errors: 0 };
                    for t in results.range(..end).map(|(_, t)| t) {
                        let r = &t.records[it];
                        p.blocks += 1;
                        p.block_errors += r.block_error as usize;
                        p.bit_errors += r.bit_errors;
                    }
                    points.push(p);
                }
            }
        }
    }
    Ok(points)
}

pub fn link_table(points: &[LinkPoint]) -> Table {
    let mut t = Table::new(&["snr_db", "n0", "method", "nu", "iteration", "blocks", "block_errors", "bler", "bit_errors"]);
    for p in points {
        t.push(vec![
            num(p.snr_db),
            num(p.n0),
            p.method.label().into(),
            p.nu.to_string(),
            p.iteration.to_string(),
            p.blocks.to_string(),
            p.block_errors.to_string(),
            num(p.bler()),
            p.bit_errors.to_string(),
        ]);
    }
    t
}
