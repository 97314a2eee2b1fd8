use std::collections::BTreeMap;

use base64::Engine as _;
use rand::seq::index;
use rayon::prelude::*;
use serde::Serialize;

use super::ball::extract_ball;
use super::signature::{canonical_signature, BallSignature};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::scc::SccDecomposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Population {
    All,
    Giant,
    Complement,
    BpLimit,
}

/// Which roots a census visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sample {
    All,
    /// Uniform sample of this many distinct vertices; clamped to `n`.
    Count(usize),
}

/// Empirical law of rooted ball isomorphism types.
///
/// Frequencies are counts divided by `normalizer`, which is the number of
/// roots except for giant/complement splits, where it is the graph size.
#[derive(Debug, Clone, PartialEq)]
pub struct Census {
    pub radius: u32,
    pub population: Population,
    pub sample_size: usize,
    pub normalizer: usize,
    pub counts: BTreeMap<BallSignature, u64>,
    /// Set when the requested sample was larger than the graph.
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusEntry {
    /// Base64 of the signature bytes.
    pub signature: String,
    pub freq: f64,
    pub exact: bool,
}

impl Census {
    pub fn from_signatures(
        radius: u32,
        population: Population,
        normalizer: usize,
        signatures: impl IntoIterator<Item = BallSignature>,
    ) -> Self {
        let mut counts = BTreeMap::new();
        let mut sample_size = 0;
        for s in signatures {
            *counts.entry(s).or_insert(0) += 1;
            sample_size += 1;
        }
        Census {
            radius,
            population,
            sample_size,
            normalizer,
            counts,
            clamped: false,
        }
    }

    pub fn freq(&self, sig: &BallSignature) -> f64 {
        self.counts
            .get(sig)
            .map_or(0.0, |&c| c as f64 / self.normalizer as f64)
    }

    /// Sum of all frequencies: 1 for plain censuses, the part's share of `n`
    /// for split censuses.
    pub fn total_mass(&self) -> f64 {
        if self.normalizer == 0 {
            return 0.0;
        }
        self.sample_size as f64 / self.normalizer as f64
    }

    /// Share of sampled balls whose signature is a refinement hash.
    pub fn non_exact_share(&self) -> f64 {
        if self.sample_size == 0 {
            return 0.0;
        }
        let inexact: u64 = self
            .counts
            .iter()
            .filter(|(s, _)| !s.exact)
            .map(|(_, &c)| c)
            .sum();
        inexact as f64 / self.sample_size as f64
    }

    /// Entries sorted by descending frequency, then signature bytes.
    pub fn entries(&self) -> Vec<CensusEntry> {
        let mut items: Vec<(&BallSignature, u64)> =
            self.counts.iter().map(|(s, &c)| (s, c)).collect();
        items.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.bytes.cmp(&b.0.bytes)));
        let engine = base64::engine::general_purpose::STANDARD;
        items
            .into_iter()
            .map(|(s, c)| CensusEntry {
                signature: engine.encode(&s.bytes),
                freq: c as f64 / self.normalizer as f64,
                exact: s.exact,
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(&self.entries())
    }

    fn merge_counts(parts: Vec<BTreeMap<BallSignature, u64>>) -> BTreeMap<BallSignature, u64> {
        let mut out = BTreeMap::new();
        for part in parts {
            for (s, c) in part {
                *out.entry(s).or_insert(0) += c;
            }
        }
        out
    }
}

fn signatures_of(g: &Digraph, roots: &[usize], r: u32) -> Result<BTreeMap<BallSignature, u64>> {
    let parts: Vec<BTreeMap<BallSignature, u64>> = roots
        .par_chunks(1024)
        .map(|chunk| {
            let mut counts = BTreeMap::new();
            for &v in chunk {
                let sig = canonical_signature(&extract_ball(g, v, r)?);
                *counts.entry(sig).or_insert(0) += 1;
            }
            Ok(counts)
        })
        .collect::<Result<_>>()?;
    Ok(Census::merge_counts(parts))
}

fn check_radius(r: u32) -> Result<()> {
    if r == 0 {
        Err(Error::Parameter("census radius must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Census over all vertices or a uniform sample without replacement.
pub fn census(g: &Digraph, r: u32, sample: Sample, seed: u64) -> Result<Census> {
    check_radius(r)?;
    let n = g.n();
    let (roots, clamped) = match sample {
        Sample::All => ((0..n).collect::<Vec<_>>(), false),
        Sample::Count(k) if k >= n => ((0..n).collect(), k > n),
        Sample::Count(k) => {
            let mut rng = rng_from_seed(seed);
            let mut picked = index::sample(&mut rng, n, k).into_vec();
            picked.sort_unstable();
            (picked, false)
        }
    };
    let counts = signatures_of(g, &roots, r)?;
    Ok(Census {
        radius: r,
        population: Population::All,
        sample_size: roots.len(),
        normalizer: roots.len(),
        counts,
        clamped,
    })
}

/// Censuses of the largest SCC and of its complement, both normalized by `n`,
/// so their signature-wise sum is the full census.
pub fn census_split(g: &Digraph, scc: &SccDecomposition, r: u32) -> Result<(Census, Census)> {
    check_radius(r)?;
    let n = g.n();
    let giant = scc.largest();
    let (inside, outside): (Vec<usize>, Vec<usize>) =
        (0..n).partition(|&v| Some(scc.comp_of(v)) == giant);
    let make = |roots: &[usize], population| -> Result<Census> {
        Ok(Census {
            radius: r,
            population,
            sample_size: roots.len(),
            normalizer: n,
            counts: signatures_of(g, roots, r)?,
            clamped: false,
        })
    };
    Ok((
        make(&inside, Population::Giant)?,
        make(&outside, Population::Complement)?,
    ))
}

/// Total variation distance `½ Σ_s |a(s) − b(s)|` over the union of
/// signatures.
pub fn tv_distance(a: &Census, b: &Census) -> Result<f64> {
    if a.radius != b.radius {
        return Err(Error::RadiusMismatch(a.radius, b.radius));
    }
    let mut sum = 0.0;
    for s in a.counts.keys() {
        sum += (a.freq(s) - b.freq(s)).abs();
    }
    for s in b.counts.keys() {
        if !a.counts.contains_key(s) {
            sum += b.freq(s);
        }
    }
    Ok(0.5 * sum)
}
