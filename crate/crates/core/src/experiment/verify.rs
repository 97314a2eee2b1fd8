use std::fmt;

use super::config::ExperimentConfig;
use super::sweep::{run_sweep, ModelContext, ResultRow, RowFailure};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `|value − target| ≤ tolerance`.
    Within,
    /// `value < tolerance`.
    Below,
    /// `value ≤ 0`, where `value` is the largest step up along a sequence.
    Nonincreasing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub model: String,
    pub n: usize,
    pub relation: Relation,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
}

impl Check {
    /// Positive or zero when the check passes, except for [`Relation::Below`],
    /// which needs a strictly positive margin.
    pub fn margin(&self) -> f64 {
        match self.relation {
            Relation::Within => self.tolerance - (self.value - self.target).abs(),
            Relation::Below => self.tolerance - self.value,
            Relation::Nonincreasing => 0.0 - self.value,
        }
    }

    pub fn passed(&self) -> bool {
        let m = self.margin();
        match self.relation {
            Relation::Below => m > 0.0,
            _ => m >= 0.0,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {} [{} n={}] value={:.6} ",
            self.name, self.model, self.n, self.value
        )?;
        match self.relation {
            Relation::Within => write!(f, "target={:.6} tol={}", self.target, self.tolerance)?,
            Relation::Below => write!(f, "bound<{}", self.tolerance)?,
            Relation::Nonincreasing => write!(f, "max increase must be <= 0")?,
        }
        write!(f, " margin={:.6}", self.margin())
    }
}

#[derive(Debug)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    /// Criteria skipped, with the reason.
    pub notices: Vec<String>,
    pub row_failures: Vec<RowFailure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.row_failures.is_empty() && self.checks.iter().all(Check::passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("{c}\n"));
        }
        for n in &self.notices {
            out.push_str(&format!("SKIP {n}\n"));
        }
        for f in &self.row_failures {
            out.push_str(&format!(
                "FAIL row [{} n={} seed={}]: {}\n",
                f.model, f.n, f.seed, f.error
            ));
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count() + self.row_failures.len();
        out.push_str(&format!(
            "{} checks, {} failed\n",
            self.checks.len(),
            failed
        ));
        out
    }
}

/// Runs (or resumes) the sweep and checks its rows against theory.
pub fn verify(cfg: &ExperimentConfig) -> Result<VerifyReport> {
    let outcome = run_sweep(cfg, true)?;
    let mut report = evaluate(cfg, &outcome.contexts, &outcome.rows);
    report.row_failures = outcome.failures;
    Ok(report)
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

/// Criteria are evaluated at the largest `n` of each model; smaller sizes
/// are only reported in the CSV.
pub fn evaluate(
    cfg: &ExperimentConfig,
    contexts: &[ModelContext],
    rows: &[ResultRow],
) -> VerifyReport {
    let tol = &cfg.tolerances;
    let mut checks = Vec::new();
    let mut notices = Vec::new();
    for ctx in contexts {
        let Some(n) = rows
            .iter()
            .filter(|r| r.model == ctx.label)
            .map(|r| r.n)
            .max()
        else {
            notices.push(format!("{}: no rows", ctx.label));
            continue;
        };
        let Some(lim) = &ctx.limits else {
            notices.push(format!(
                "{}: no tree-like limit, theory criteria skipped",
                ctx.label
            ));
            continue;
        };
        let group: Vec<&ResultRow> = rows
            .iter()
            .filter(|r| r.model == ctx.label && r.n == n)
            .collect();
        let mut push = |name: &str, relation, value: f64, target: f64, tolerance: f64| {
            checks.push(Check {
                name: name.to_string(),
                model: ctx.label.clone(),
                n,
                relation,
                value,
                target,
                tolerance,
            });
        };
        let avg = |f: fn(&ResultRow) -> f64| mean(group.iter().map(|r| f(r)));
        let zeta = lim.zeta;

        if zeta > 0.0 {
            push(
                "giant-fraction",
                Relation::Within,
                avg(|r| r.lscc_frac),
                zeta,
                tol.lscc,
            );
            let worst_second = group.iter().map(|r| r.second_frac).fold(0.0, f64::max);
            push(
                "second-fraction",
                Relation::Below,
                worst_second,
                0.0,
                tol.second,
            );
            push(
                "alpha1",
                Relation::Within,
                avg(|r| r.alpha1),
                1.0 - zeta,
                tol.alpha1,
            );
            let worst_dev = group
                .iter()
                .filter_map(|r| r.degree_mass_dev)
                .fold(0.0, f64::max);
            push(
                "giant-degree-law",
                Relation::Below,
                worst_dev,
                0.0,
                tol.degree_mass,
            );
            let half_degree = avg(|r| r.giant_half_degree_frac);
            push(
                "giant-edge-density",
                Relation::Within,
                half_degree,
                lim.giant_edge_density,
                tol.edge_density,
            );
            let induced = avg(|r| r.giant_edge_frac);
            push(
                "giant-induced-edges",
                Relation::Within,
                induced,
                lim.giant_induced_edge_density,
                tol.edge_density,
            );
        } else {
            let (name, bound) = if ctx.is_critical() {
                ("giant-fraction-critical", tol.critical_lscc)
            } else {
                ("giant-fraction-subcritical", tol.subcritical_lscc)
            };
            push(name, Relation::Below, avg(|r| r.lscc_frac), 0.0, bound);
        }
        push(
            "scc-count",
            Relation::Within,
            avg(|r| r.kn_frac),
            1.0 - zeta,
            tol.kn,
        );

        if zeta > 0.0 && !cfg.k_list.is_empty() {
            let by_k: Vec<f64> = (0..cfg.k_list.len())
                .map(|i| mean(group.iter().map(|r| r.nk_frac[i])))
                .collect();
            let rise = by_k
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::NEG_INFINITY, f64::max);
            if by_k.len() > 1 {
                push(
                    "nk-decreasing",
                    Relation::Nonincreasing,
                    rise.max(0.0),
                    0.0,
                    0.0,
                );
            }
            let k_max = cfg.k_list[cfg.k_list.len() - 1];
            push(
                &format!("nk-at-k{k_max}"),
                Relation::Below,
                by_k[by_k.len() - 1],
                0.0,
                tol.nk_max,
            );
        }
        for (i, r) in cfg.radii.iter().enumerate() {
            let tvs: Vec<f64> = group.iter().filter_map(|row| row.census_tv[i]).collect();
            if tvs.is_empty() {
                notices.push(format!("{}: no limit census at r={r}", ctx.label));
            } else {
                push(
                    &format!("census-tv-r{r}"),
                    Relation::Below,
                    mean(tvs.into_iter()),
                    0.0,
                    tol.census_tv,
                );
            }
        }
    }
    VerifyReport {
        checks,
        notices,
        row_failures: Vec::new(),
    }
}
