use std::collections::HashMap;

use crate::digraph::Digraph;
use crate::error::{Error, Result};

/// Forward-backward ball of radius `r` around a root: the subgraph induced by
/// every vertex `u` with `min(d(u, root), d(root, u)) < r`.
///
/// With `r = 1` only the root qualifies, so the ball is the root and its
/// self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedBall {
    /// Host-graph ids by local id; local id 0 is the root. Empty for balls
    /// that do not come from a host graph.
    pub host_ids: Vec<usize>,
    /// Number of vertices.
    pub size: usize,
    /// Induced edges between local ids, with multiplicity, sorted.
    pub edges: Vec<(u32, u32)>,
    pub radius: u32,
}

impl RootedBall {
    /// A ball given directly by local structure (root = 0).
    pub fn from_parts(size: usize, mut edges: Vec<(u32, u32)>, radius: u32) -> Self {
        edges.sort_unstable();
        RootedBall {
            host_ids: Vec::new(),
            size,
            edges,
            radius,
        }
    }

    pub fn origin(&self) -> Option<usize> {
        self.host_ids.first().copied()
    }
}

pub fn extract_ball(g: &Digraph, v: usize, r: u32) -> Result<RootedBall> {
    g.check_vertex(v)?;
    if r == 0 {
        return Err(Error::Parameter("ball radius must be at least 1".into()));
    }
    let mut local: HashMap<u32, u32> = HashMap::new();
    let mut host_ids = vec![v];
    local.insert(v as u32, 0);
    for forward in [true, false] {
        let mut dist: HashMap<u32, u32> = HashMap::from([(v as u32, 0)]);
        let mut frontier = vec![v as u32];
        for depth in 1..r {
            let mut next = Vec::new();
            for &u in &frontier {
                let nbrs = if forward {
                    g.out_neighbors(u as usize)
                } else {
                    g.in_neighbors(u as usize)
                };
                for &w in nbrs {
                    if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                        e.insert(depth);
                        next.push(w);
                        let next_id = host_ids.len() as u32;
                        if let std::collections::hash_map::Entry::Vacant(slot) = local.entry(w) {
                            slot.insert(next_id);
                            host_ids.push(w as usize);
                        }
                    }
                }
            }
            frontier = next;
        }
    }
    // Fix local ids as root first, then ascending host id.
    host_ids[1..].sort_unstable();
    for (i, &h) in host_ids.iter().enumerate() {
        local.insert(h as u32, i as u32);
    }
    let mut edges = Vec::new();
    for (i, &h) in host_ids.iter().enumerate() {
        for &w in g.out_neighbors(h) {
            if let Some(&j) = local.get(&w) {
                edges.push((i as u32, j));
            }
        }
    }
    edges.sort_unstable();
    Ok(RootedBall {
        size: host_ids.len(),
        host_ids,
        edges,
        radius: r,
    })
}
