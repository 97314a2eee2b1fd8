use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dilab::analysis::{analyze, PairMode};
use dilab::experiment::{run_sweep, verify, ExperimentConfig, THREADS_ENV};
use dilab::generators::{Fixture, GeneratorSpec, Model};
use dilab::local::{census, census_split, simulate_limit_census, Census, Sample};
use dilab::theory::{solve_limits, zeta_geq_k_proxy, Estimate, LimitValues};
use dilab::{DegreeLaw, Digraph, SccDecomposition};

#[derive(Parser)]
#[command(
    name = "dilab",
    version,
    about = "Strong connectivity of sparse random digraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Er,
    Cm,
    Fixture,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a digraph and write it as an edge list.
    Generate {
        #[arg(long, value_enum)]
        model: ModelKind,
        /// Vertex count; ignored by fixtures.
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Mean degree of the ER model.
        #[arg(long)]
        lambda: Option<f64>,
        /// Degree law of the configuration model: poisson:L, regular:D or a JSON file.
        #[arg(long)]
        law: Option<String>,
        /// Erase self-loops and repeated edges after matching.
        #[arg(long)]
        simple: bool,
        /// Fixture name, e.g. scc-chain.
        #[arg(long)]
        name: Option<String>,
        /// Fixture parameters, comma separated.
        #[arg(long, value_delimiter = ',')]
        params: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute giant, SCC-count, condition-counter, bow-tie and weak-component statistics.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        /// Thresholds for the condition counters.
        #[arg(long, value_delimiter = ',', default_value = "1,2,5,10")]
        k: Vec<usize>,
        /// exact, montecarlo:S, auto or auto:S.
        #[arg(long, default_value = "auto")]
        pairs: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Include per-vertex labels.
        #[arg(long)]
        detail: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Census of forward-backward ball types, or of the branching-process limit with --bp.
    Census {
        #[arg(long = "in", conflicts_with = "bp", required_unless_present = "bp")]
        input: Option<PathBuf>,
        /// Degree law of the limit to simulate.
        #[arg(long)]
        bp: Option<String>,
        #[arg(long, default_value_t = 2)]
        r: u32,
        /// `all` or a number of uniformly sampled roots.
        #[arg(long, default_value = "all")]
        sample: String,
        /// Write giant and complement censuses, both normalized by n.
        #[arg(long, conflicts_with = "bp")]
        split_giant: bool,
        #[arg(long, default_value_t = 100_000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file. With --split-giant, FILE.giant.json and FILE.complement.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the fixed points of the limit and report limiting values.
    Limits {
        #[arg(long)]
        law: String,
        /// Thresholds for the Monte Carlo zeta_{>=k} proxy.
        #[arg(long, value_delimiter = ',')]
        k_list: Vec<usize>,
        #[arg(long, default_value_t = 100_000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a configured sweep and write results.csv.
    #[command(after_help = format!("The thread budget can be overridden with {THREADS_ENV}."))]
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Keep matching rows from an earlier, interrupted run.
        #[arg(long)]
        resume: bool,
    },
    /// Run or resume a sweep and check it against the limit values.
    #[command(after_help = format!("The thread budget can be overridden with {THREADS_ENV}."))]
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate {
            model,
            n,
            lambda,
            law,
            simple,
            name,
            params,
            seed,
            out,
        } => {
            let model = match model {
                ModelKind::Er => Model::Er {
                    lambda: lambda.context("--model er needs --lambda")?,
                },
                ModelKind::Cm => Model::Cm {
                    law: DegreeLaw::parse(&law.context("--model cm needs --law")?)?,
                    simple,
                },
                ModelKind::Fixture => Model::Fixture(Fixture::parse(
                    &name.context("--model fixture needs --name")?,
                    &params,
                )?),
            };
            let generated = GeneratorSpec { model, n, seed }.generate()?;
            if generated.degree_repairs > 0 {
                eprintln!(
                    "note: degree sequence repaired by {} stub(s)",
                    generated.degree_repairs
                );
            }
            if generated.erased_edges > 0 {
                eprintln!(
                    "note: erased {} self-loop/repeated edge(s)",
                    generated.erased_edges
                );
            }
            with_output(out.as_deref(), |w| {
                Ok(generated.graph.write_edge_list(w)?)
            })?;
        }
        Command::Analyze {
            input,
            k,
            pairs,
            seed,
            detail,
            out,
        } => {
            let g = read_graph(&input)?;
            let report = analyze(&g, &k, PairMode::parse(&pairs)?, seed, detail)?;
            write_json(out.as_deref(), &report)?;
        }
        Command::Census {
            input,
            bp,
            r,
            sample,
            split_giant,
            reps,
            seed,
            out,
        } => {
            if let Some(law) = bp {
                let c = simulate_limit_census(&DegreeLaw::parse(&law)?, r, reps, seed)?;
                write_census(out.as_deref(), &c)?;
            } else {
                let g = read_graph(&input.context("--in is required")?)?;
                if split_giant {
                    let (giant, rest) = census_split(&g, &SccDecomposition::new(&g), r)?;
                    match out {
                        Some(path) => {
                            write_census(Some(&with_suffix(&path, "giant")), &giant)?;
                            write_census(Some(&with_suffix(&path, "complement")), &rest)?;
                        }
                        None => {
                            #[derive(Serialize)]
                            struct Split {
                                giant: Vec<dilab::local::CensusEntry>,
                                complement: Vec<dilab::local::CensusEntry>,
                            }
                            write_json(
                                None,
                                &Split {
                                    giant: giant.entries(),
                                    complement: rest.entries(),
                                },
                            )?;
                        }
                    }
                } else {
                    let c = census(&g, r, parse_sample(&sample)?, seed)?;
                    if c.clamped {
                        eprintln!("note: sample clamped to n = {}", g.n());
                    }
                    write_census(out.as_deref(), &c)?;
                }
            }
        }
        Command::Limits {
            law,
            k_list,
            reps,
            seed,
            tol,
            out,
        } => {
            let law = DegreeLaw::parse(&law)?;
            #[derive(Serialize)]
            struct Report {
                #[serde(flatten)]
                limits: LimitValues,
                zeta_geq_k: Vec<Estimate>,
            }
            let limits = solve_limits(&law, tol)?;
            let zeta_geq_k = k_list
                .iter()
                .map(|&k| zeta_geq_k_proxy(&law, k, reps, seed))
                .collect::<dilab::Result<_>>()?;
            write_json(out.as_deref(), &Report { limits, zeta_geq_k })?;
        }
        Command::Sweep { config, resume } => {
            let cfg = ExperimentConfig::load(&config)?;
            let outcome = run_sweep(&cfg, resume)?;
            eprintln!(
                "{} row(s) in {} ({} kept from an earlier run)",
                outcome.rows.len(),
                cfg.results_path().display(),
                outcome.resumed
            );
            for f in &outcome.failures {
                eprintln!(
                    "row failed [{} n={} seed={}]: {}",
                    f.model, f.n, f.seed, f.error
                );
            }
            if !outcome.failures.is_empty() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Verify { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = verify(&cfg)?;
            print!("{}", report.render());
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn read_graph(path: &Path) -> Result<Digraph> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Digraph::read_edge_list(BufReader::new(file))
        .with_context(|| format!("reading {}", path.display()))
}

fn parse_sample(s: &str) -> Result<Sample> {
    if s == "all" {
        return Ok(Sample::All);
    }
    match s.parse::<usize>() {
        Ok(k) if k > 0 => Ok(Sample::Count(k)),
        _ => bail!("--sample must be `all` or a positive count, got `{s}`"),
    }
}

/// `out.json` with tag `giant` becomes `out.giant.json`.
fn with_suffix(path: &Path, tag: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = path
        .extension()
        .map_or_else(|| "json".to_string(), |e| e.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}.{tag}.{ext}"))
}

fn with_output(out: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    with_output(out, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

fn write_census(out: Option<&Path>, c: &Census) -> Result<()> {
    write_json(out, &c.entries())
}
