//! Limit values of the tree-like forward-backward branching process.
//!
//! With offspring generating functions
//! `G⁺(s) = Σ_{j,k} j p(j,k) s^k / E[D⁻]` (forward) and
//! `G⁻(s) = Σ_{j,k} k p(j,k) s^j / E[D⁺]` (backward), a forward stub dies out
//! with probability `q⁺`, the smallest fixed point of `G⁺` in `[0, 1]`, and
//! likewise `q⁻` for `G⁻`. Given the root degree `(j, k)` the two directions
//! are independent, so the root has infinite in- and out-components with
//! probability `(1 − q⁻^j)(1 − q⁺^k)` and
//! `ζ = Σ p(j,k) (1 − q⁻^j)(1 − q⁺^k)`. THEORY.md has the derivation.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::law::{DegreeLaw, LawKind};
use crate::local::{BranchingProcess, Growth};
use crate::rng::{replicate_seed, rng_from_seed};

/// Slack on the offspring mean below which the process is treated as
/// (sub)critical.
pub const CRITICAL_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitValues {
    #[serde(skip)]
    pub law: DegreeLaw,
    pub law_kind: LawKind,
    /// Largest degree kept when tabulating the law.
    pub truncation: u32,
    pub offspring_mean: f64,
    pub q_minus: f64,
    pub q_plus: f64,
    pub eta_minus: f64,
    pub eta_plus: f64,
    pub zeta: f64,
    pub scc_density_treelike: f64,
    /// Limit of `½ Σ_{v ∈ C_max} (d⁻(v) + d⁺(v)) / n`, see [`giant_edge_density`].
    pub giant_edge_density: f64,
    /// Limit of the number of edges with both endpoints in the giant over `n`:
    /// `E[D⁺] (1 − q⁻)(1 − q⁺)`.
    pub giant_induced_edge_density: f64,
    /// Largest `|G(q) − q|` over both directions.
    pub solver_residual: f64,
}

#[derive(Debug, Clone, Copy)]
enum Side {
    Forward,
    Backward,
}

/// Offspring generating function and its derivative.
struct Pgf<'a> {
    law: &'a DegreeLaw,
    table: Vec<f64>,
}

impl<'a> Pgf<'a> {
    fn new(law: &'a DegreeLaw, side: Side) -> Self {
        let table = match side {
            Side::Forward => law.forward_offspring(),
            Side::Backward => law.backward_offspring(),
        };
        Pgf { law, table }
    }

    fn value(&self, s: f64) -> f64 {
        if let LawKind::Poisson { lambda } = self.law.kind() {
            return (lambda * (s - 1.0)).exp();
        }
        horner(&self.table, s)
    }

    fn derivative(&self, s: f64) -> f64 {
        if let LawKind::Poisson { lambda } = self.law.kind() {
            return lambda * (lambda * (s - 1.0)).exp();
        }
        let deriv: Vec<f64> = self
            .table
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &p)| k as f64 * p)
            .collect();
        horner(&deriv, s)
    }
}

fn horner(coeffs: &[f64], s: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
}

/// Smallest root of `G(s) = s` in `[0, 1)`, for a supercritical `G`.
fn smallest_fixed_point(pgf: &Pgf<'_>, tol: f64) -> f64 {
    let f = |s: f64| pgf.value(s) - s;
    if f(0.0) <= 0.0 {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0 - tol;
    // Barely supercritical: the nontrivial root can sit above 1 − tol.
    while f(hi) >= 0.0 && hi < 1.0 {
        hi = 1.0 - (1.0 - hi) / 16.0;
        if 1.0 - hi < 1e-15 {
            return hi;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    let mut s = 0.5 * (lo + hi);
    for _ in 0..50 {
        let r = f(s);
        if r.abs() <= 1e-15 {
            break;
        }
        let d = pgf.derivative(s) - 1.0;
        if d == 0.0 {
            break;
        }
        let t = s - r / d;
        if !(0.0..1.0).contains(&t) || f(t).abs() >= r.abs() {
            break;
        }
        s = t;
    }
    s
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol <= 1e-6 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "tolerance must lie in (0, 1e-6], got {tol}"
        )))
    }
}

pub fn solve_limits(law: &DegreeLaw, tol: f64) -> Result<LimitValues> {
    check_tol(tol)?;
    let offspring_mean = law.offspring_mean();
    let forward = Pgf::new(law, Side::Forward);
    let backward = Pgf::new(law, Side::Backward);
    let (q_plus, q_minus) = if offspring_mean <= 1.0 + CRITICAL_SLACK {
        (1.0, 1.0)
    } else {
        (
            smallest_fixed_point(&forward, tol),
            smallest_fixed_point(&backward, tol),
        )
    };
    let solver_residual = (forward.value(q_plus) - q_plus)
        .abs()
        .max((backward.value(q_minus) - q_minus).abs());

    let (eta_minus, eta_plus, zeta) = match law.kind() {
        LawKind::Poisson { lambda } => {
            // Independent Poisson degrees: both survivals are 1 − e^{−λ(1−q)} = 1 − q.
            let em = 1.0 - (-lambda * (1.0 - q_minus)).exp();
            let ep = 1.0 - (-lambda * (1.0 - q_plus)).exp();
            (em, ep, em * ep)
        }
        _ => {
            let mut em = 0.0;
            let mut ep = 0.0;
            let mut z = 0.0;
            for &((j, k), p) in law.support() {
                let a = 1.0 - q_minus.powi(j as i32);
                let b = 1.0 - q_plus.powi(k as i32);
                em += p * a;
                ep += p * b;
                z += p * a * b;
            }
            (em, ep, z)
        }
    };
    let zeta = zeta.clamp(0.0, 1.0);
    let mut lim = LimitValues {
        law: law.clone(),
        law_kind: law.kind(),
        truncation: law.truncation(),
        offspring_mean,
        q_minus,
        q_plus,
        eta_minus,
        eta_plus,
        zeta,
        scc_density_treelike: 1.0 - zeta,
        giant_edge_density: 0.0,
        giant_induced_edge_density: law.mean_out() * (1.0 - q_minus) * (1.0 - q_plus),
        solver_residual,
    };
    lim.giant_edge_density = giant_edge_density(&lim);
    Ok(lim)
}

/// `p(l, m) (1 − q⁻^l)(1 − q⁺^m)`: the limiting fraction of vertices that lie
/// in the strong giant and have degree `(l, m)`.
pub fn giant_degree_mass(lim: &LimitValues, l: u32, m: u32) -> f64 {
    lim.law.mass(l, m) * (1.0 - lim.q_minus.powi(l as i32)) * (1.0 - lim.q_plus.powi(m as i32))
}

/// `½ Σ p(j, k) (j + k) (1 − q⁻^j)(1 − q⁺^k)`, evaluated over the tabulated
/// support (tail mass below 1e−14).
///
/// This is the limit of half the total degree of the giant, counting edges
/// that leave it. Edges with both endpoints in the giant have the smaller
/// limit [`LimitValues::giant_induced_edge_density`].
pub fn giant_edge_density(lim: &LimitValues) -> f64 {
    0.5 * lim
        .law
        .support()
        .iter()
        .map(|&((j, k), p)| {
            p * (j + k) as f64
                * (1.0 - lim.q_minus.powi(j as i32))
                * (1.0 - lim.q_plus.powi(k as i32))
        })
        .sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub k: usize,
    pub value: f64,
    pub std_err: f64,
    pub replicates: usize,
}

/// Monte Carlo estimate of `ζ_{≥k}`: the probability that the forward and the
/// backward tree of the limit both reach at least `k` nodes (root included).
///
/// Each replicate draws the root degree and the two trees from separate
/// streams, so for a fixed seed the event is monotone in `k`.
pub fn zeta_geq_k_proxy(
    law: &DegreeLaw,
    k: usize,
    replicates: usize,
    seed: u64,
) -> Result<Estimate> {
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    if replicates == 0 {
        return Err(Error::Parameter("replicates must be at least 1".into()));
    }
    let bp = BranchingProcess::new(law)?;
    let hits: usize = (0..replicates)
        .into_par_iter()
        .filter(|&i| {
            let base = replicate_seed(seed, i as u64);
            let (j, kk) = bp.root_degree(&mut rng_from_seed(replicate_seed(base, 0)));
            let fwd = bp.grow_until(&mut rng_from_seed(replicate_seed(base, 1)), kk, true, k);
            if !matches!(fwd, Growth::Reached(_)) {
                return false;
            }
            let bwd = bp.grow_until(&mut rng_from_seed(replicate_seed(base, 2)), j, false, k);
            matches!(bwd, Growth::Reached(_))
        })
        .count();
    let p = hits as f64 / replicates as f64;
    Ok(Estimate {
        k,
        value: p,
        std_err: (p * (1.0 - p) / replicates as f64).sqrt(),
        replicates,
    })
}
