//! The benchmark sweep: seeded random instances per (map, n, r) cell, every
//! requested algorithm on each, one [`RunRecord`] per run.

use std::collections::BTreeMap;

use anyhow::{Context, Result};
use rayon::prelude::*;
use riumapf::instance::sample_random_instance;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::load::LoadedGraph;
use crate::run::{run_algorithm, Algo, RunOptions, RunOutcome, RunRecord};

/// Per-instance seed: the first eight bytes of SHA-256 over the cell key, so
/// every cell reproduces on its own.
pub fn cell_seed(map: &str, n: usize, r: u32, index: usize) -> u64 {
    let digest = Sha256::digest(format!("{map}|{n}|{r}|{index}").as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub maps: Vec<LoadedGraph>,
    pub agents: Vec<usize>,
    pub radii: Vec<u32>,
    pub instances: usize,
    pub algos: Vec<Algo>,
    pub options: RunOptions,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BenchCell {
    pub map: usize,
    pub n: usize,
    pub r: u32,
    pub index: usize,
    pub algo: Algo,
}

/// Runs every cell and returns the records in sweep order (map, n, r,
/// instance index, algorithm) regardless of which thread ran them.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<RunRecord>> {
    let mut cells = Vec::new();
    for map in 0..config.maps.len() {
        for &n in &config.agents {
            for &r in &config.radii {
                for index in 0..config.instances {
                    for &algo in &config.algos {
                        cells.push(BenchCell { map, n, r, index, algo });
                    }
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .context("building worker pool")?;
    Ok(pool.install(|| cells.par_iter().map(|cell| run_cell(config, cell)).collect()))
}

fn run_cell(config: &SweepConfig, cell: &BenchCell) -> RunRecord {
    let map = &config.maps[cell.map];
    let seed = cell_seed(&map.name, cell.n, cell.r, cell.index);
    match sample_random_instance(map.graph.clone(), cell.n, cell.r, seed) {
        Ok(inst) => {
            let outcome: RunOutcome = run_algorithm(&inst, cell.algo, &config.options);
            RunRecord::new(&map.name, &inst, seed, cell.algo, &outcome)
        }
        // no instance to run on: recorded as an unsolved row
        Err(_) => RunRecord {
            map: map.name.clone(),
            n: cell.n,
            r: cell.r,
            seed,
            algo: cell.algo.tag().to_string(),
            solved: false,
            time_ms: 0.0,
            makespan: None,
            lower_bound: None,
            suboptimality: None,
        },
    }
}

/// Per (map, n, r, algo) aggregate. Times and makespans average over solved
/// runs only.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub map: String,
    pub n: usize,
    pub r: u32,
    pub algo: String,
    pub instances: usize,
    pub solved: usize,
    pub rate_percent: f64,
    pub mean_time_ms: Option<f64>,
    pub mean_makespan: Option<f64>,
    pub makespan_ci95: Option<f64>,
    pub mean_suboptimality: Option<f64>,
}

pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    // keep first-seen order of cells
    let mut order: Vec<(String, usize, u32, String)> = Vec::new();
    let mut groups: BTreeMap<(String, usize, u32, String), Vec<&RunRecord>> = BTreeMap::new();
    for rec in records {
        let key = (rec.map.clone(), rec.n, rec.r, rec.algo.clone());
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(rec);
    }
    order
        .into_iter()
        .map(|key| {
            let rows = &groups[&key];
            let solved: Vec<&&RunRecord> = rows.iter().filter(|r| r.solved).collect();
            let times: Vec<f64> = solved.iter().map(|r| r.time_ms).collect();
            let spans: Vec<f64> = solved.iter().filter_map(|r| r.makespan).map(|m| m as f64).collect();
            let subopt: Vec<f64> = solved
                .iter()
                .filter_map(|r| r.suboptimality)
                .filter(|s| s.is_finite())
                .collect();
            SummaryRow {
                map: key.0,
                n: key.1,
                r: key.2,
                algo: key.3,
                instances: rows.len(),
                solved: solved.len(),
                rate_percent: 100.0 * solved.len() as f64 / rows.len() as f64,
                mean_time_ms: mean(&times),
                mean_makespan: mean(&spans),
                makespan_ci95: ci95(&spans),
                mean_suboptimality: mean(&subopt),
            }
        })
        .collect()
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Normal-approximation half-width, `1.96 * s / sqrt(k)`.
fn ci95(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    Some(1.96 * var.sqrt() / (xs.len() as f64).sqrt())
}

pub fn write_records<W: std::io::Write>(sink: W, records: &[RunRecord]) -> Result<()> {
    write_csv(sink, records, RECORD_HEADER)
}

pub fn write_summary<W: std::io::Write>(sink: W, rows: &[SummaryRow]) -> Result<()> {
    write_csv(sink, rows, SUMMARY_HEADER)
}

pub const RECORD_HEADER: &[&str] = &[
    "map", "n", "r", "seed", "algo", "solved", "time_ms", "makespan", "lower_bound", "suboptimality",
];

pub const SUMMARY_HEADER: &[&str] = &[
    "map", "n", "r", "algo", "instances", "solved", "rate_percent", "mean_time_ms", "mean_makespan",
    "makespan_ci95", "mean_suboptimality",
];

/// Header written explicitly so an empty sweep still yields one.
fn write_csv<W: std::io::Write, T: Serialize>(sink: W, rows: &[T], header: &[&str]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_depend_on_every_key_part() {
        let base = cell_seed("empty-16-16", 10, 1, 0);
        assert_eq!(base, cell_seed("empty-16-16", 10, 1, 0));
        assert_ne!(base, cell_seed("empty-16-16", 10, 1, 1));
        assert_ne!(base, cell_seed("empty-16-16", 10, 2, 0));
        assert_ne!(base, cell_seed("empty-16-16", 20, 1, 0));
        assert_ne!(base, cell_seed("random-64-64-20", 10, 1, 0));
    }

    #[test]
    fn ci_and_mean() {
        assert_eq!(mean(&[]), None);
        assert_eq!(mean(&[2.0, 4.0]), Some(3.0));
        assert_eq!(ci95(&[1.0]), None);
        let hw = ci95(&[1.0, 3.0]).unwrap();
        assert!((hw - 1.96 * 2f64.sqrt() / 2f64.sqrt()).abs() < 1e-12);
    }
}
