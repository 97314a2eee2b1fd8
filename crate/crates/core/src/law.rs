//! Joint in/out degree laws.

use std::path::Path;

use rand::Rng as _;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Tail mass left out when tabulating an infinite-support law.
pub const TAIL_MASS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LawKind {
    Explicit,
    /// Independent Poisson(λ) in- and out-degrees; the directed ER limit.
    Poisson {
        lambda: f64,
    },
    Regular {
        d: u32,
    },
}

/// Law of `(in-degree, out-degree)` of a uniform vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeLaw {
    kind: LawKind,
    /// `((j, k), p(j, k))`, sorted by `(j, k)`. Truncated for Poisson laws.
    support: Vec<((u32, u32), f64)>,
    #[serde(skip)]
    cumulative: Vec<f64>,
}

impl DegreeLaw {
    pub fn poisson(lambda: f64) -> Result<Self> {
        if lambda <= 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidLaw(format!(
                "poisson rate must be positive, got {lambda}"
            )));
        }
        let marginal = poisson_table(lambda);
        let mut support = Vec::with_capacity(marginal.len() * marginal.len());
        for (j, &pj) in marginal.iter().enumerate() {
            for (k, &pk) in marginal.iter().enumerate() {
                support.push(((j as u32, k as u32), pj * pk));
            }
        }
        Ok(Self::assemble(LawKind::Poisson { lambda }, support))
    }

    pub fn regular(d: u32) -> Self {
        Self::assemble(LawKind::Regular { d }, vec![((d, d), 1.0)])
    }

    /// Explicit joint law. Entries with the same `(j, k)` are merged.
    pub fn explicit(entries: impl IntoIterator<Item = ((u32, u32), f64)>) -> Result<Self> {
        let mut support: Vec<((u32, u32), f64)> = entries.into_iter().collect();
        if let Some(bad) = support.iter().find(|(_, p)| *p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidLaw(format!(
                "negative or non-finite mass at {:?}",
                bad.0
            )));
        }
        support.sort_by_key(|&(jk, _)| jk);
        support.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        support.retain(|&(_, p)| p > 0.0);
        let total: f64 = support.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidLaw(format!(
                "masses sum to {total}, expected 1"
            )));
        }
        let law = Self::assemble(LawKind::Explicit, support);
        let (mi, mo) = (law.mean_in(), law.mean_out());
        if (mi - mo).abs() > 1e-9 {
            return Err(Error::InvalidLaw(format!(
                "mean in-degree {mi} differs from mean out-degree {mo}"
            )));
        }
        Ok(law)
    }

    fn assemble(kind: LawKind, support: Vec<((u32, u32), f64)>) -> Self {
        let mut acc = 0.0;
        let cumulative = support
            .iter()
            .map(|(_, p)| {
                acc += p;
                acc
            })
            .collect();
        DegreeLaw {
            kind,
            support,
            cumulative,
        }
    }

    /// Parses `poisson:L`, `regular:D`, or `file:PATH` (a JSON array of
    /// `[j, k, mass]` triples). A bare path is read as a law file.
    pub fn parse(spec: &str) -> Result<Self> {
        if let Some(l) = spec.strip_prefix("poisson:") {
            let lambda = l
                .parse()
                .map_err(|_| Error::InvalidLaw(format!("bad rate `{l}`")))?;
            return Self::poisson(lambda);
        }
        if let Some(d) = spec.strip_prefix("regular:") {
            let d = d
                .parse()
                .map_err(|_| Error::InvalidLaw(format!("bad degree `{d}`")))?;
            return Ok(Self::regular(d));
        }
        Self::from_file(spec.strip_prefix("file:").unwrap_or(spec))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let triples: Vec<(u32, u32, f64)> = serde_json::from_str(text)?;
        Self::explicit(triples.into_iter().map(|(j, k, p)| ((j, k), p)))
    }

    pub fn kind(&self) -> LawKind {
        self.kind
    }

    pub fn support(&self) -> &[((u32, u32), f64)] {
        &self.support
    }

    /// Largest degree in the tabulated support; for Poisson laws this is the
    /// truncation point.
    pub fn truncation(&self) -> u32 {
        self.support
            .iter()
            .map(|&((j, k), _)| j.max(k))
            .max()
            .unwrap_or(0)
    }

    pub fn mass(&self, j: u32, k: u32) -> f64 {
        match self.kind {
            LawKind::Poisson { lambda } => poisson_pmf(lambda, j) * poisson_pmf(lambda, k),
            _ => self
                .support
                .binary_search_by_key(&(j, k), |&(jk, _)| jk)
                .map_or(0.0, |i| self.support[i].1),
        }
    }

    pub fn mean_in(&self) -> f64 {
        match self.kind {
            LawKind::Poisson { lambda } => lambda,
            _ => self.support.iter().map(|&((j, _), p)| j as f64 * p).sum(),
        }
    }

    pub fn mean_out(&self) -> f64 {
        match self.kind {
            LawKind::Poisson { lambda } => lambda,
            _ => self.support.iter().map(|&((_, k), p)| k as f64 * p).sum(),
        }
    }

    /// Mean of the forward offspring law, `E[D⁻ D⁺] / E[D⁻]`. The backward
    /// offspring mean is the same number.
    pub fn offspring_mean(&self) -> f64 {
        match self.kind {
            LawKind::Poisson { lambda } => lambda,
            _ => {
                let mi = self.mean_in();
                if mi == 0.0 {
                    return 0.0;
                }
                self.support
                    .iter()
                    .map(|&((j, k), p)| j as f64 * k as f64 * p)
                    .sum::<f64>()
                    / mi
            }
        }
    }

    /// Out-degree of the head of a uniform in-stub:
    /// `P(k) = Σ_j j p(j, k) / E[D⁻]`. Indexed by `k`.
    pub fn forward_offspring(&self) -> Vec<f64> {
        self.size_biased(|(j, k)| (j, k))
    }

    /// In-degree of the tail of a uniform out-stub:
    /// `P(j) = Σ_k k p(j, k) / E[D⁺]`. Indexed by `j`.
    pub fn backward_offspring(&self) -> Vec<f64> {
        self.size_biased(|(j, k)| (k, j))
    }

    fn size_biased(&self, pick: impl Fn((u32, u32)) -> (u32, u32)) -> Vec<f64> {
        let len = self.truncation() as usize + 1;
        let mut out = vec![0.0; len];
        let mut total = 0.0;
        for &(jk, p) in &self.support {
            let (bias, value) = pick(jk);
            let w = bias as f64 * p;
            out[value as usize] += w;
            total += w;
        }
        if total > 0.0 {
            out.iter_mut().for_each(|x| *x /= total);
        }
        out
    }

    /// One draw of `(in-degree, out-degree)`.
    pub fn sample(&self, rng: &mut Rng) -> (u32, u32) {
        match self.kind {
            LawKind::Poisson { lambda } => {
                let pois = Poisson::new(lambda).expect("validated rate");
                (pois.sample(rng) as u32, pois.sample(rng) as u32)
            }
            LawKind::Regular { d } => (d, d),
            LawKind::Explicit => {
                let u: f64 = rng.random::<f64>() * self.cumulative.last().copied().unwrap_or(1.0);
                let i = self
                    .cumulative
                    .partition_point(|&c| c <= u)
                    .min(self.support.len() - 1);
                self.support[i].0
            }
        }
    }

    pub fn to_json_triples(&self) -> Vec<(u32, u32, f64)> {
        self.support.iter().map(|&((j, k), p)| (j, k, p)).collect()
    }
}

pub(crate) fn poisson_pmf(lambda: f64, k: u32) -> f64 {
    let mut log = -lambda + k as f64 * lambda.ln();
    for i in 2..=k {
        log -= (i as f64).ln();
    }
    log.exp()
}

/// Poisson(λ) pmf from 0 up to the first point where the remaining tail is
/// below half of [`TAIL_MASS`] (so the joint table misses at most `TAIL_MASS`).
fn poisson_table(lambda: f64) -> Vec<f64> {
    let mut table = Vec::new();
    let mut acc = 0.0;
    let mut k = 0u32;
    loop {
        let p = poisson_pmf(lambda, k);
        table.push(p);
        acc += p;
        if 1.0 - acc < TAIL_MASS / 2.0 && k as f64 > lambda {
            break;
        }
        // 1 - acc stalls at rounding level; stop once terms are negligible.
        if k as f64 > lambda && p < 1e-18 {
            break;
        }
        k += 1;
    }
    table
}

/// Draws from a finite pmf given as its cumulative sums.
#[derive(Debug, Clone)]
pub(crate) struct TableSampler {
    cumulative: Vec<f64>,
}

impl TableSampler {
    pub(crate) fn new(pmf: &[f64]) -> Self {
        let mut acc = 0.0;
        TableSampler {
            cumulative: pmf
                .iter()
                .map(|p| {
                    acc += p;
                    acc
                })
                .collect(),
        }
    }

    pub(crate) fn sample(&self, rng: &mut Rng) -> u32 {
        let total = self.cumulative.last().copied().unwrap_or(0.0);
        let u: f64 = rng.random::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len().saturating_sub(1)) as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn poisson_table_mass() {
        for lambda in [0.01, 0.5, 2.0, 10.0] {
            let law = DegreeLaw::poisson(lambda).unwrap();
            let total: f64 = law.support().iter().map(|(_, p)| p).sum();
            assert!((total - 1.0).abs() < 1e-12, "λ={lambda}: {total}");
        }
    }

    #[test]
    fn rejects_bad_laws() {
        assert!(DegreeLaw::poisson(0.0).is_err());
        assert!(DegreeLaw::explicit([((1, 1), 0.5)]).is_err());
        assert!(DegreeLaw::explicit([((1, 1), -0.5), ((0, 0), 1.5)]).is_err());
        // Means must balance.
        assert!(DegreeLaw::explicit([((2, 1), 1.0)]).is_err());
    }

    #[test]
    fn explicit_merges_duplicates() {
        let law = DegreeLaw::explicit([((1, 0), 0.25), ((0, 1), 0.5), ((1, 0), 0.25)]).unwrap();
        assert_eq!(law.support().len(), 2);
        assert_eq!(law.mass(1, 0), 0.5);
    }

    #[test]
    fn size_biased_regular() {
        let law = DegreeLaw::regular(2);
        assert_eq!(law.forward_offspring(), vec![0.0, 0.0, 1.0]);
        assert_eq!(law.offspring_mean(), 2.0);
    }

    #[test]
    fn explicit_sampling_hits_support() {
        let law = DegreeLaw::explicit([((1, 0), 0.5), ((0, 1), 0.5)]).unwrap();
        let mut rng = rng_from_seed(3);
        let mut ones = 0;
        for _ in 0..10_000 {
            let (j, k) = law.sample(&mut rng);
            assert!(matches!((j, k), (1, 0) | (0, 1)));
            ones += j;
        }
        assert!((ones as f64 / 10_000.0 - 0.5).abs() < 0.03);
    }

    #[test]
    fn parse_forms() {
        assert!(matches!(
            DegreeLaw::parse("poisson:1.5").unwrap().kind(),
            LawKind::Poisson { .. }
        ));
        assert_eq!(
            DegreeLaw::parse("regular:3").unwrap().kind(),
            LawKind::Regular { d: 3 }
        );
        let law = DegreeLaw::from_json("[[1,1,0.5],[0,0,0.25],[2,2,0.25]]").unwrap();
        assert_eq!(law.mean_in(), 1.0);
        assert!(DegreeLaw::parse("poisson:x").is_err());
    }
}
