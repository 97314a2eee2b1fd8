//! Large-component counters: `Z_{≥k}`, `N^k_n`, `N^k_n(2)`.
//!
//! `Z_{≥k}` counts vertices whose in- and out-components both have at least
//! `k` vertices. `N^k_n` counts ordered pairs of such vertices lying in
//! different SCCs; `N^k_n(2)` only those pairs `(x, y)` where `x` does not reach
//! `y`. Always `N^k_n(2) ≤ N^k_n ≤ 2 N^k_n(2)`.
//!
//! All vertices of an SCC share their in- and out-components, so the sizes are
//! measured once per component. Squaring `Z_{≥k} = Σ_i |C_i| 1{…}` splits into
//! a diagonal part and the cross terms, which are exactly `N^k_n`:
//! `N^k_n = Z_{≥k}² − Σ_i |C_i|² 1{…}`.

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::reach::{BfsScratch, CappedSize, ReachClosure, DEFAULT_CLOSURE_LIMIT};
use crate::rng::{replicate_seed, rng_from_seed};
use crate::scc::SccDecomposition;

/// Default Monte Carlo budget for `N^k_n(2)`.
pub const DEFAULT_PAIR_SAMPLES: u64 = 1_000_000;

/// How `N^k_n(2)` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairMode {
    /// Exact via [`ReachClosure`]; refused when the condensation is too large.
    Exact,
    /// Sampled ordered pairs.
    MonteCarlo { samples: u64 },
    /// Exact when the closure is permitted, else Monte Carlo.
    Auto { samples: u64 },
}

impl Default for PairMode {
    fn default() -> Self {
        PairMode::Auto {
            samples: DEFAULT_PAIR_SAMPLES,
        }
    }
}

impl PairMode {
    /// `exact`, `montecarlo:S`, or `auto:S`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parameter(format!("bad pair mode `{s}`"));
        if s == "exact" {
            return Ok(PairMode::Exact);
        }
        if let Some(rest) = s.strip_prefix("montecarlo:") {
            return Ok(PairMode::MonteCarlo {
                samples: rest.parse().map_err(|_| bad())?,
            });
        }
        if let Some(rest) = s.strip_prefix("auto:") {
            return Ok(PairMode::Auto {
                samples: rest.parse().map_err(|_| bad())?,
            });
        }
        if s == "auto" {
            return Ok(PairMode::default());
        }
        Err(bad())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum PairCount {
    Exact {
        value: u64,
    },
    Estimate {
        value: f64,
        std_err: f64,
        samples: u64,
    },
}

impl PairCount {
    pub fn value(&self) -> f64 {
        match *self {
            PairCount::Exact { value } => value as f64,
            PairCount::Estimate { value, .. } => value,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, PairCount::Exact { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionCounters {
    pub k: usize,
    pub z_geq_k: u64,
    pub n_k: u64,
    pub n_k_2: PairCount,
}

/// Per-component in- and out-component sizes, truncated at a common cap.
#[derive(Debug, Clone)]
pub struct ComponentReach {
    cap: usize,
    backward: Vec<CappedSize>,
    forward: Vec<CappedSize>,
}

impl ComponentReach {
    /// One capped backward and one capped forward BFS per SCC, from its
    /// smallest vertex.
    pub fn new(g: &Digraph, scc: &SccDecomposition, cap: usize) -> Self {
        let cap = cap.max(1);
        let sizes: Vec<(CappedSize, CappedSize)> = (0..scc.count())
            .into_par_iter()
            .map_init(
                || BfsScratch::new(g.n()),
                |scratch, c| {
                    let v = scc.representative(c);
                    (scratch.backward(g, v, cap), scratch.forward(g, v, cap))
                },
            )
            .collect();
        let (backward, forward) = sizes.into_iter().unzip();
        ComponentReach {
            cap,
            backward,
            forward,
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Whether component `c` has in- and out-components of size ≥ `k`.
    /// Requires `k ≤ cap`.
    pub fn qualifies(&self, c: usize, k: usize) -> bool {
        debug_assert!(k <= self.cap);
        self.backward[c].at_least(k) && self.forward[c].at_least(k)
    }

    pub fn backward(&self, c: usize) -> CappedSize {
        self.backward[c]
    }

    pub fn forward(&self, c: usize) -> CappedSize {
        self.forward[c]
    }
}

/// `Z_{≥k}` and the diagonal sum `Σ_i |C_i|² 1{…}`.
fn z_and_diagonal(scc: &SccDecomposition, reach: &ComponentReach, k: usize) -> (u64, u64) {
    let mut z = 0u64;
    let mut diag = 0u64;
    for c in 0..scc.count() {
        if reach.qualifies(c, k) {
            let s = scc.size(c) as u64;
            z += s;
            diag += s * s;
        }
    }
    (z, diag)
}

pub fn z_geq_k(g: &Digraph, scc: &SccDecomposition, k: usize) -> Result<u64> {
    check_k(k)?;
    let reach = ComponentReach::new(g, scc, k);
    Ok(z_and_diagonal(scc, &reach, k).0)
}

/// `Z_{≥k} / n`, the finite-graph estimate of `ζ_{≥k}`.
pub fn empirical_zeta_hat(g: &Digraph, scc: &SccDecomposition, k: usize) -> Result<f64> {
    Ok(z_geq_k(g, scc, k)? as f64 / g.n() as f64)
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::Parameter("k must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Counters for a single threshold.
pub fn condition_counters(
    g: &Digraph,
    scc: &SccDecomposition,
    k: usize,
    mode: PairMode,
    seed: u64,
) -> Result<ConditionCounters> {
    Ok(condition_counters_multi(g, scc, &[k], mode, seed)?.remove(0))
}

/// Counters for several thresholds, sharing one set of capped searches (cap =
/// largest `k`) and at most one closure.
pub fn condition_counters_multi(
    g: &Digraph,
    scc: &SccDecomposition,
    ks: &[usize],
    mode: PairMode,
    seed: u64,
) -> Result<Vec<ConditionCounters>> {
    for &k in ks {
        check_k(k)?;
    }
    let cap = ks.iter().copied().max().unwrap_or(1);
    let reach = ComponentReach::new(g, scc, cap);
    let closure = match mode {
        PairMode::Exact => Some(ReachClosure::new(scc)?),
        PairMode::Auto { .. } if scc.count() <= DEFAULT_CLOSURE_LIMIT => {
            Some(ReachClosure::new(scc)?)
        }
        _ => None,
    };
    let samples = match mode {
        PairMode::MonteCarlo { samples } | PairMode::Auto { samples } => samples,
        PairMode::Exact => 0,
    };
    let estimates = match closure {
        Some(_) => Vec::new(),
        None => estimate_nk2_multi(scc, &reach, ks, samples, seed),
    };
    Ok(ks
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let (z, diag) = z_and_diagonal(scc, &reach, k);
            let n_k_2 = match &closure {
                Some(cl) => PairCount::Exact {
                    value: exact_nk2(scc, &reach, cl, k),
                },
                None => estimates[i],
            };
            ConditionCounters {
                k,
                z_geq_k: z,
                n_k: z * z - diag,
                n_k_2,
            }
        })
        .collect())
}

/// `Σ_{c qualifying} |C_c| · (mass of qualifying components not reachable from c)`.
fn exact_nk2(
    scc: &SccDecomposition,
    reach: &ComponentReach,
    closure: &ReachClosure,
    k: usize,
) -> u64 {
    let count = scc.count();
    let qualifying: Vec<bool> = (0..count).map(|c| reach.qualifies(c, k)).collect();
    let total: u64 = (0..count)
        .filter(|&c| qualifying[c])
        .map(|c| scc.size(c) as u64)
        .sum();
    (0..count)
        .into_par_iter()
        .filter(|&c| qualifying[c])
        .map(|c| {
            let reached: u64 = closure
                .descendants(c)
                .iter()
                .filter(|&d| qualifying[d])
                .map(|d| scc.size(d) as u64)
                .sum();
            scc.size(c) as u64 * (total - reached)
        })
        .sum()
}

const PAIR_CHUNK: u64 = 1 << 16;

/// Unbiased estimates of `N^k_n(2)` for every `k` in `ks` from one set of
/// i.i.d. uniform ordered pairs.
///
/// Pairs are grouped by the source's SCC and each group is answered by a
/// single search in the condensation. That search does not expand the largest
/// component; its descendants are marked once up front instead. Pairs are
/// independent, so the standard error is the binomial one.
fn estimate_nk2_multi(
    scc: &SccDecomposition,
    reach: &ComponentReach,
    ks: &[usize],
    samples: u64,
    seed: u64,
) -> Vec<PairCount> {
    let n = scc.n();
    let samples = samples.max(1);
    let k_min = ks.iter().copied().min().unwrap_or(1);
    let mut pairs: Vec<(u32, u32)> = (0..samples.div_ceil(PAIR_CHUNK))
        .into_par_iter()
        .flat_map_iter(|chunk| {
            let mut rng = rng_from_seed(replicate_seed(seed, chunk));
            let len = PAIR_CHUNK.min(samples - chunk * PAIR_CHUNK);
            (0..len)
                .map(move |_| {
                    let x = scc.comp_of(rng.random_range(0..n));
                    let y = scc.comp_of(rng.random_range(0..n));
                    (x as u32, y as u32)
                })
                .filter(|&(x, y)| {
                    reach.qualifies(x as usize, k_min) && reach.qualifies(y as usize, k_min)
                })
        })
        .collect();
    pairs.par_sort_unstable();

    let giant = scc.largest();
    let mut below_giant = vec![0u32; scc.count()];
    if let Some(c) = giant {
        mark_descendants(scc, c, None, &mut below_giant, 1, &mut Vec::new());
    }
    let groups: Vec<&[(u32, u32)]> = pairs.chunk_by(|a, b| a.0 == b.0).collect();
    let hits = groups
        .par_iter()
        .map_init(
            || (vec![0u32; scc.count()], 0u32, Vec::new()),
            |(stamp, gen, stack), group| {
                let cx = group[0].0 as usize;
                *gen += 1;
                let via_giant = mark_descendants(scc, cx, giant, stamp, *gen, stack);
                let mut hits = vec![0u64; ks.len()];
                for &(_, cy) in group.iter() {
                    let cy = cy as usize;
                    if stamp[cy] == *gen || (via_giant && below_giant[cy] == 1) {
                        continue;
                    }
                    for (h, &k) in hits.iter_mut().zip(ks) {
                        if reach.qualifies(cx, k) && reach.qualifies(cy, k) {
                            *h += 1;
                        }
                    }
                }
                hits
            },
        )
        .reduce(
            || vec![0u64; ks.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let n2 = (n as f64).powi(2);
    let s = samples as f64;
    hits.into_iter()
        .map(|h| {
            let p = h as f64 / s;
            PairCount::Estimate {
                value: n2 * p,
                std_err: n2 * (p * (1.0 - p) / s).sqrt(),
                samples,
            }
        })
        .collect()
}

/// Stamps every component reachable from `start`, without expanding `stop`.
/// Returns whether `stop` was reached.
fn mark_descendants(
    scc: &SccDecomposition,
    start: usize,
    stop: Option<usize>,
    stamp: &mut [u32],
    gen: u32,
    stack: &mut Vec<u32>,
) -> bool {
    stack.clear();
    stamp[start] = gen;
    stack.push(start as u32);
    let mut hit = false;
    while let Some(c) = stack.pop() {
        if Some(c as usize) == stop {
            hit = true;
            continue;
        }
        for &d in scc.successors(c as usize) {
            if stamp[d as usize] != gen {
                stamp[d as usize] = gen;
                stack.push(d);
            }
        }
    }
    hit
}
