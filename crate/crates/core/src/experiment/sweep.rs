use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use crate::analysis::{condition_counters_multi, giant_stats, PairMode};
use crate::error::{Error, Result};
use crate::generators::{GeneratorSpec, Model};
use crate::local::{census, simulate_limit_census, tv_distance, Census, Sample};
use crate::rng::replicate_seed;
use crate::scc::SccDecomposition;
use crate::theory::{giant_degree_mass, solve_limits, LimitValues};

/// Solver tolerance used for theory columns.
pub const THEORY_TOL: f64 = 1e-10;
/// Degrees `0..=DEGREE_WINDOW` enter `degree_mass_dev`.
pub const DEGREE_WINDOW: u32 = 4;

const COUNTER_STREAM: u64 = 0x100;
const CENSUS_STREAM: u64 = 0x200;
const LIMIT_STREAM: u64 = 1 << 40;

/// One replicate of the sweep. `z_frac`, `nk_frac` and `nk2_frac` follow the
/// config's sorted `k_list`; `census_tv` follows its sorted `radii`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub model: String,
    pub n: usize,
    /// Graph seed, usable with `dilab generate --seed`.
    pub seed: u64,
    pub lscc_frac: f64,
    pub second_frac: f64,
    pub kn_frac: f64,
    pub alpha1: f64,
    /// Edges with both endpoints in the giant, over `n`.
    pub giant_edge_frac: f64,
    /// Half the full-graph degree sum of giant vertices, over `n`.
    pub giant_half_degree_frac: f64,
    pub z_frac: Vec<f64>,
    pub nk_frac: Vec<f64>,
    pub nk2_frac: Vec<f64>,
    pub census_tv: Vec<Option<f64>>,
    pub degree_mass_dev: Option<f64>,
    pub theory_zeta: Option<f64>,
    pub theory_scc_density: Option<f64>,
    /// Seconds; written to the timings file, never to the results CSV.
    pub wall_time: f64,
}

/// Fixed column order of the results CSV.
pub fn csv_header(cfg: &ExperimentConfig) -> Vec<String> {
    let mut h: Vec<String> = [
        "model",
        "n",
        "seed",
        "lscc_frac",
        "second_frac",
        "kn_frac",
        "alpha1",
        "giant_edge_frac",
        "giant_half_degree_frac",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for prefix in ["z_frac", "nk_frac", "nk2_frac"] {
        h.extend(cfg.k_list.iter().map(|k| format!("{prefix}_k{k}")));
    }
    h.extend(cfg.radii.iter().map(|r| format!("census_tv_r{r}")));
    h.extend(
        ["degree_mass_dev", "theory_zeta", "theory_scc_density"]
            .iter()
            .map(|s| s.to_string()),
    );
    h
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

impl ResultRow {
    pub fn to_record(&self) -> Vec<String> {
        let mut rec = vec![
            self.model.clone(),
            self.n.to_string(),
            self.seed.to_string(),
        ];
        rec.extend(
            [
                self.lscc_frac,
                self.second_frac,
                self.kn_frac,
                self.alpha1,
                self.giant_edge_frac,
                self.giant_half_degree_frac,
            ]
            .iter()
            .map(f64::to_string),
        );
        for list in [&self.z_frac, &self.nk_frac, &self.nk2_frac] {
            rec.extend(list.iter().map(f64::to_string));
        }
        rec.extend(self.census_tv.iter().map(|&x| opt(x)));
        rec.extend([
            opt(self.degree_mass_dev),
            opt(self.theory_zeta),
            opt(self.theory_scc_density),
        ]);
        rec
    }

    /// Inverse of [`ResultRow::to_record`]; `wall_time` comes back as 0.
    pub fn from_record(rec: &csv::StringRecord, ks: usize, radii: usize) -> Result<Self> {
        let expected = 12 + 3 * ks + radii;
        if rec.len() != expected {
            return Err(Error::Parse {
                line: 0,
                msg: format!("expected {expected} fields, found {}", rec.len()),
            });
        }
        let field = |i: usize| rec.get(i).unwrap_or_default();
        let bad = |i: usize| Error::Parse {
            line: 0,
            msg: format!("bad value `{}` in column {i}", field(i)),
        };
        let num = |i: usize| field(i).parse::<f64>().map_err(|_| bad(i));
        let maybe = |i: usize| -> Result<Option<f64>> {
            if field(i).is_empty() {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        let list =
            |start: usize, len: usize| (start..start + len).map(num).collect::<Result<Vec<_>>>();
        let base = 9;
        let tail = base + 3 * ks + radii;
        Ok(ResultRow {
            model: field(0).to_string(),
            n: field(1).parse().map_err(|_| bad(1))?,
            seed: field(2).parse().map_err(|_| bad(2))?,
            lscc_frac: num(3)?,
            second_frac: num(4)?,
            kn_frac: num(5)?,
            alpha1: num(6)?,
            giant_edge_frac: num(7)?,
            giant_half_degree_frac: num(8)?,
            z_frac: list(base, ks)?,
            nk_frac: list(base + ks, ks)?,
            nk2_frac: list(base + 2 * ks, ks)?,
            census_tv: (base + 3 * ks..tail).map(maybe).collect::<Result<_>>()?,
            degree_mass_dev: maybe(tail)?,
            theory_zeta: maybe(tail + 1)?,
            theory_scc_density: maybe(tail + 2)?,
            wall_time: 0.0,
        })
    }
}

/// Per-model state shared by all its rows.
#[derive(Debug, Clone)]
pub struct ModelContext {
    pub label: String,
    pub model: Model,
    pub limits: Option<LimitValues>,
    /// Limit censuses aligned with the config's radii.
    pub limit_censuses: Vec<Option<Census>>,
    /// Vertex count of a fixture model; the ladder does not apply to it.
    pub fixture_n: Option<usize>,
}

impl ModelContext {
    /// `|offspring mean − 1| ≤ 1e−9`.
    pub fn is_critical(&self) -> bool {
        self.limits
            .as_ref()
            .is_some_and(|l| (l.offspring_mean - 1.0).abs() <= 1e-9)
    }
}

pub fn prepare_contexts(cfg: &ExperimentConfig) -> Result<Vec<ModelContext>> {
    cfg.models
        .iter()
        .enumerate()
        .map(|(i, entry)| {
            let law = entry.model.limit_law();
            let limits = law
                .as_ref()
                .map(|l| solve_limits(l, THEORY_TOL))
                .transpose()?;
            let limit_censuses = cfg
                .radii
                .iter()
                .map(|&r| match &law {
                    Some(l) => {
                        let seed = replicate_seed(
                            replicate_seed(cfg.base_seed, LIMIT_STREAM + i as u64),
                            r as u64,
                        );
                        simulate_limit_census(l, r, cfg.census_reps, seed).ok()
                    }
                    None => None,
                })
                .collect();
            let fixture_n = match &entry.model {
                Model::Fixture(fx) => Some(fx.build()?.n()),
                _ => None,
            };
            Ok(ModelContext {
                label: entry.label.clone(),
                model: entry.model.clone(),
                limits,
                limit_censuses,
                fixture_n,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Job {
    pub model: usize,
    pub n: usize,
    pub seed: u64,
}

/// All rows in output order: model, then n, then seed index.
pub fn jobs(cfg: &ExperimentConfig, contexts: &[ModelContext]) -> Vec<Job> {
    let mut out = Vec::new();
    for (m, ctx) in contexts.iter().enumerate() {
        let ladder = ctx
            .fixture_n
            .map_or_else(|| cfg.n_ladder.clone(), |n| vec![n]);
        for n in ladder {
            for s in 0..cfg.seeds {
                out.push(Job {
                    model: m,
                    n,
                    seed: replicate_seed(cfg.base_seed, s as u64),
                });
            }
        }
    }
    out
}

pub fn compute_row(cfg: &ExperimentConfig, ctx: &ModelContext, job: Job) -> Result<ResultRow> {
    let start = Instant::now();
    let g = GeneratorSpec {
        model: ctx.model.clone(),
        n: job.n,
        seed: job.seed,
    }
    .generate()?
    .graph;
    let nf = g.n() as f64;
    let scc = SccDecomposition::new(&g);
    let gs = giant_stats(&g, &scc);
    let counters = if cfg.k_list.is_empty() {
        Vec::new()
    } else {
        let mode = PairMode::Auto {
            samples: cfg.pair_budget,
        };
        condition_counters_multi(
            &g,
            &scc,
            &cfg.k_list,
            mode,
            replicate_seed(job.seed, COUNTER_STREAM),
        )?
    };
    let sample = cfg.census_sample.map_or(Sample::All, Sample::Count);
    let census_tv = cfg
        .radii
        .iter()
        .zip(&ctx.limit_censuses)
        .map(|(&r, limit)| match limit {
            Some(limit) => {
                let c = census(
                    &g,
                    r,
                    sample,
                    replicate_seed(job.seed, CENSUS_STREAM + r as u64),
                )?;
                tv_distance(&c, limit).map(Some)
            }
            None => Ok(None),
        })
        .collect::<Result<Vec<_>>>()?;
    let degree_mass_dev = ctx.limits.as_ref().map(|lim| {
        let mut worst: f64 = 0.0;
        for l in 0..=DEGREE_WINDOW {
            for m in 0..=DEGREE_WINDOW {
                let count = gs.degree_census_in_giant.get(&(l, m)).copied().unwrap_or(0);
                worst = worst.max((count as f64 / nf - giant_degree_mass(lim, l, m)).abs());
            }
        }
        worst
    });
    let n2 = nf * nf;
    Ok(ResultRow {
        model: ctx.label.clone(),
        n: g.n(),
        seed: job.seed,
        lscc_frac: gs.size_lscc as f64 / nf,
        second_frac: gs.size_second as f64 / nf,
        kn_frac: gs.k_n as f64 / nf,
        alpha1: gs.alpha1,
        giant_edge_frac: gs.giant_edge_count as f64 / nf,
        giant_half_degree_frac: gs.giant_degree_sum as f64 / (2.0 * nf),
        z_frac: counters.iter().map(|c| c.z_geq_k as f64 / nf).collect(),
        nk_frac: counters.iter().map(|c| c.n_k as f64 / n2).collect(),
        nk2_frac: counters.iter().map(|c| c.n_k_2.value() / n2).collect(),
        census_tv,
        degree_mass_dev,
        theory_zeta: ctx.limits.as_ref().map(|l| l.zeta),
        theory_scc_density: ctx.limits.as_ref().map(|l| l.scc_density_treelike),
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// A row that could not be computed or written.
#[derive(Debug)]
pub struct RowFailure {
    pub model: String,
    pub n: usize,
    pub seed: u64,
    pub error: Error,
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub contexts: Vec<ModelContext>,
    /// Rows in output order, including those kept from a resumed file.
    pub rows: Vec<ResultRow>,
    pub resumed: usize,
    pub failures: Vec<RowFailure>,
}

#[derive(Serialize)]
struct LimitsEntry<'a> {
    model: &'a str,
    limits: Option<&'a LimitValues>,
}

fn encode_line(fields: &[String]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(fields)?;
    w.into_inner().map_err(|e| Error::IoBare(e.into_error()))
}

/// Runs every row of `cfg`, appending each to `results.csv` as soon as its
/// chunk finishes. With `resume`, complete rows already on disk that match
/// the expected sequence are kept and a torn final line is discarded.
pub fn run_sweep(cfg: &ExperimentConfig, resume: bool) -> Result<SweepOutcome> {
    let threads = cfg.effective_threads()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| sweep_in_pool(cfg, resume, threads))
}

fn sweep_in_pool(cfg: &ExperimentConfig, resume: bool, threads: usize) -> Result<SweepOutcome> {
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;
    let contexts = prepare_contexts(cfg)?;
    let entries: Vec<LimitsEntry> = contexts
        .iter()
        .map(|c| LimitsEntry {
            model: &c.label,
            limits: c.limits.as_ref(),
        })
        .collect();
    let limits_path = cfg.limits_path();
    fs::write(&limits_path, serde_json::to_string_pretty(&entries)? + "\n")
        .map_err(|e| Error::io(&limits_path, e))?;

    let header = csv_header(cfg);
    let all_jobs = jobs(cfg, &contexts);
    let results_path = cfg.results_path();
    let timings_path = cfg.timings_path();
    let mut rows = if resume {
        resume_prefix(&results_path, &header, &all_jobs, &contexts, cfg)?
    } else {
        None
    }
    .unwrap_or_default();
    let resumed = rows.len();
    if resumed == 0 {
        fs::write(&results_path, encode_line(&header)?).map_err(|e| Error::io(&results_path, e))?;
        let timing_header = encode_line(&["model", "n", "seed", "wall_time_s"].map(String::from))?;
        fs::write(&timings_path, timing_header).map_err(|e| Error::io(&timings_path, e))?;
    }
    let open = |p: &Path| {
        OpenOptions::new()
            .append(true)
            .open(p)
            .map_err(|e| Error::io(p, e))
    };
    let mut results = open(&results_path)?;
    let mut timings = open(&timings_path)?;

    let mut failures = Vec::new();
    for chunk in all_jobs[resumed..].chunks(threads.max(1)) {
        let computed: Vec<Result<ResultRow>> = chunk
            .par_iter()
            .map(|&job| compute_row(cfg, &contexts[job.model], job))
            .collect();
        for (job, outcome) in chunk.iter().zip(computed) {
            let written = outcome.and_then(|row| {
                write_line(&mut results, &results_path, &row.to_record())?;
                let t = [
                    row.model.clone(),
                    row.n.to_string(),
                    row.seed.to_string(),
                    format!("{:.3}", row.wall_time),
                ];
                write_line(&mut timings, &timings_path, &t)?;
                Ok(row)
            });
            match written {
                Ok(row) => rows.push(row),
                Err(error) => failures.push(RowFailure {
                    model: contexts[job.model].label.clone(),
                    n: job.n,
                    seed: job.seed,
                    error,
                }),
            }
        }
    }
    Ok(SweepOutcome {
        contexts,
        rows,
        resumed,
        failures,
    })
}

fn write_line(file: &mut File, path: &Path, fields: &[String]) -> Result<()> {
    let bytes = encode_line(fields)?;
    file.write_all(&bytes)
        .and_then(|_| file.flush())
        .map_err(|e| Error::io(path, e))
}

/// Rows of an existing results file that match the start of `jobs`. The file
/// is truncated right after them. `None` when there is nothing to keep.
fn resume_prefix(
    path: &Path,
    header: &[String],
    jobs: &[Job],
    contexts: &[ModelContext],
    cfg: &ExperimentConfig,
) -> Result<Option<Vec<ResultRow>>> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(Error::io(path, e)),
    };
    let complete = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(&bytes[..complete]);
    let mut records = reader.records();
    match records.next() {
        Some(Ok(rec)) if rec.iter().eq(header.iter().map(String::as_str)) => {}
        None => return Ok(None),
        _ => {
            return Err(Error::Config(format!(
                "{} has a different header; remove it or run without --resume",
                path.display()
            )))
        }
    }
    let mut kept = Vec::new();
    let mut keep_bytes = next_line_start(&bytes, 0);
    for (job, rec) in jobs.iter().zip(records.by_ref()) {
        let Ok(rec) = rec else { break };
        let Ok(row) = ResultRow::from_record(&rec, cfg.k_list.len(), cfg.radii.len()) else {
            break;
        };
        if row.model != contexts[job.model].label || row.n != job.n || row.seed != job.seed {
            break;
        }
        kept.push(row);
        keep_bytes = rec.position().map_or(keep_bytes, |p| p.byte() as usize);
        keep_bytes = next_line_start(&bytes, keep_bytes);
    }
    let file = OpenOptions::new()
        .write(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    file.set_len(keep_bytes as u64)
        .map_err(|e| Error::io(path, e))?;
    if kept.is_empty() {
        return Ok(None);
    }
    Ok(Some(kept))
}

/// Byte offset just past the line starting at `from`, honoring quotes.
fn next_line_start(bytes: &[u8], from: usize) -> usize {
    let mut quoted = false;
    for (i, &b) in bytes.iter().enumerate().skip(from) {
        match b {
            b'"' => quoted = !quoted,
            b'\n' if !quoted => return i + 1,
            _ => {}
        }
    }
    bytes.len()
}
