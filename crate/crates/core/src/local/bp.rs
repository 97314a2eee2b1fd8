//! Forward-backward branching process: the tree-like local limit of directed
//! ER and configuration-model digraphs.
//!
//! The root draws `(j, k)` from the degree law. Forward (out-edge) descendants
//! have out-degrees from the law of `D⁺` size-biased by `D⁻`; backward
//! descendants have in-degrees from the law of `D⁻` size-biased by `D⁺`. The
//! two trees share only the root.

use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use super::ball::RootedBall;
use super::census::{Census, Population};
use super::signature::{canonical_signature, saturated_signature};
use crate::error::{Error, Result};
use crate::law::{DegreeLaw, LawKind, TableSampler};
use crate::rng::{replicate_seed, rng_from_seed, Rng};

/// Node cap for a single simulated tree.
pub const MAX_TREE_NODES: usize = 1_000_000;

#[derive(Debug, Clone)]
enum Offspring {
    Poisson(Poisson<f64>),
    Fixed(u32),
    Table(TableSampler),
}

impl Offspring {
    fn sample(&self, rng: &mut Rng) -> u32 {
        match self {
            Offspring::Poisson(p) => p.sample(rng) as u32,
            Offspring::Fixed(d) => *d,
            Offspring::Table(t) => t.sample(rng),
        }
    }
}

/// Samplers for the root degree and both offspring laws.
#[derive(Debug, Clone)]
pub struct BranchingProcess {
    law: DegreeLaw,
    forward: Offspring,
    backward: Offspring,
}

/// Outcome of growing one side of the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Growth {
    /// Extinct with this many nodes, root included.
    Finite(usize),
    /// Reached the requested node count.
    Reached(usize),
}

impl BranchingProcess {
    pub fn new(law: &DegreeLaw) -> Result<Self> {
        if law.mean_in() <= 0.0 {
            return Err(Error::InvalidLaw(
                "mean degree is zero; no offspring law exists".into(),
            ));
        }
        let (forward, backward) = match law.kind() {
            LawKind::Poisson { lambda } => {
                let p = Poisson::new(lambda).map_err(|e| Error::InvalidLaw(e.to_string()))?;
                (Offspring::Poisson(p), Offspring::Poisson(p))
            }
            LawKind::Regular { d } => (Offspring::Fixed(d), Offspring::Fixed(d)),
            LawKind::Explicit => (
                Offspring::Table(TableSampler::new(&law.forward_offspring())),
                Offspring::Table(TableSampler::new(&law.backward_offspring())),
            ),
        };
        Ok(BranchingProcess {
            law: law.clone(),
            forward,
            backward,
        })
    }

    pub fn root_degree(&self, rng: &mut Rng) -> (u32, u32) {
        self.law.sample(rng)
    }

    /// Grows a tree from a root with `root_children` children until it dies
    /// out or holds `target` nodes (root included).
    pub fn grow_until(
        &self,
        rng: &mut Rng,
        root_children: u32,
        forward: bool,
        target: usize,
    ) -> Growth {
        let offspring = if forward {
            &self.forward
        } else {
            &self.backward
        };
        let mut total = 1usize;
        let mut pending = root_children as usize;
        while pending > 0 {
            if total >= target {
                return Growth::Reached(total);
            }
            pending -= 1;
            total += 1;
            pending += offspring.sample(rng) as usize;
        }
        if total >= target {
            Growth::Reached(total)
        } else {
            Growth::Finite(total)
        }
    }

    /// One forward-backward tree truncated at depth `r − 1`, as a rooted ball.
    /// `None` if it would exceed [`MAX_TREE_NODES`].
    pub fn sample_ball(&self, rng: &mut Rng, r: u32) -> Option<RootedBall> {
        let (j, k) = self.root_degree(rng);
        let mut edges: Vec<(u32, u32)> = Vec::new();
        let mut size = 1usize;
        for (forward, root_children) in [(true, k), (false, j)] {
            let offspring = if forward {
                &self.forward
            } else {
                &self.backward
            };
            // (node id, children count) at the current depth
            let mut frontier: Vec<(u32, u32)> = vec![(0, root_children)];
            for depth in 1..r {
                let mut next = Vec::new();
                for &(parent, children) in &frontier {
                    for _ in 0..children {
                        let id = size as u32;
                        size += 1;
                        if size > MAX_TREE_NODES {
                            return None;
                        }
                        edges.push(if forward { (parent, id) } else { (id, parent) });
                        // Children of the last layer are never expanded.
                        let grand = if depth + 1 < r {
                            offspring.sample(rng)
                        } else {
                            0
                        };
                        next.push((id, grand));
                    }
                }
                frontier = next;
            }
        }
        Some(RootedBall::from_parts(size, edges, r))
    }
}

/// Census of `replicates` independent forward-backward trees.
pub fn simulate_limit_census(
    law: &DegreeLaw,
    r: u32,
    replicates: usize,
    seed: u64,
) -> Result<Census> {
    if r == 0 {
        return Err(Error::Parameter("census radius must be at least 1".into()));
    }
    let bp = BranchingProcess::new(law)?;
    let signatures: Vec<_> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(replicate_seed(seed, i as u64));
            match bp.sample_ball(&mut rng, r) {
                Some(ball) => canonical_signature(&ball),
                None => saturated_signature(),
            }
        })
        .collect();
    let mut c = Census::from_signatures(r, Population::BpLimit, replicates, signatures);
    c.sample_size = replicates;
    Ok(c)
}
