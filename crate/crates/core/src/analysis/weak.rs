//! Weak-component notions: largest in/out-components, components of the
//! underlying undirected graph, and Graham–Knuth–Motzkin classes.
//!
//! GKM classes are the transitive closure of `u ≈ v`, where `u ≈ v` holds when
//! `u` and `v` share an SCC or neither reaches the other.

use serde::Serialize;

use crate::digraph::Digraph;
use crate::error::Result;
use crate::reach::ReachClosure;
use crate::scc::SccDecomposition;

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] as usize != root {
            root = self.parent[root] as usize;
        }
        let mut cur = x;
        while self.parent[cur] as usize != root {
            let next = self.parent[cur] as usize;
            self.parent[cur] = root as u32;
            cur = next;
        }
        root
    }

    /// Returns false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb as u32,
            std::cmp::Ordering::Greater => self.parent[rb] = ra as u32,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra as u32;
                self.rank[ra] += 1;
            }
        }
        true
    }

    /// Class labels numbered by first appearance, so the vertex-0 class is 0.
    pub fn labels(&mut self) -> Vec<u32> {
        let n = self.parent.len();
        let mut label_of_root = vec![u32::MAX; n];
        let mut next = 0;
        (0..n)
            .map(|x| {
                let r = self.find(x);
                if label_of_root[r] == u32::MAX {
                    label_of_root[r] = next;
                    next += 1;
                }
                label_of_root[r]
            })
            .collect()
    }
}

/// A partition given as per-vertex labels `0..count`, labels numbered by
/// smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub label_of: Vec<u32>,
    pub sizes: Vec<usize>,
}

impl Partition {
    fn from_labels(label_of: Vec<u32>) -> Self {
        let count = label_of.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
        let mut sizes = vec![0; count];
        for &l in &label_of {
            sizes[l as usize] += 1;
        }
        Partition { label_of, sizes }
    }

    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn largest(&self) -> usize {
        self.sizes.iter().copied().max().unwrap_or(0)
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count()];
        for (v, &l) in self.label_of.iter().enumerate() {
            out[l as usize].push(v);
        }
        out
    }
}

/// Quantities that need the exact closure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectedWeak {
    /// Largest in-component size over all vertices.
    pub i_max: usize,
    /// Largest out-component size over all vertices.
    pub o_max: usize,
    pub gkm_partition: Partition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeakComponents {
    pub undirected_partition: Partition,
    /// `None` when the closure was refused; see `refusal`.
    pub directed: Option<DirectedWeak>,
    pub refusal: Option<String>,
}

impl WeakComponents {
    pub fn i_max(&self) -> Option<usize> {
        self.directed.as_ref().map(|d| d.i_max)
    }

    pub fn o_max(&self) -> Option<usize> {
        self.directed.as_ref().map(|d| d.o_max)
    }
}

pub fn undirected_partition(g: &Digraph) -> Partition {
    let mut uf = UnionFind::new(g.n());
    for (u, v) in g.edges() {
        uf.union(u, v);
    }
    Partition::from_labels(uf.labels())
}

/// GKM classes and `I_max`/`O_max` from an existing closure.
pub fn directed_weak(scc: &SccDecomposition, closure: &ReachClosure) -> DirectedWeak {
    let count = scc.count();
    let i_max = (0..count)
        .map(|c| closure.comp_in_size(c))
        .max()
        .unwrap_or(0);
    let o_max = (0..count)
        .map(|c| closure.comp_out_size(c))
        .max()
        .unwrap_or(0);

    // Join every pair of mutually unreachable condensation nodes.
    let mut uf = UnionFind::new(count);
    for c in 0..count {
        let down = closure.descendants(c).words();
        let up = closure.ancestors(c).words();
        for (wi, (&a, &b)) in down.iter().zip(up).enumerate() {
            let mut free = !(a | b);
            if wi == down.len() - 1 && !count.is_multiple_of(64) {
                free &= (1u64 << (count % 64)) - 1;
            }
            // Only d > c; pairs are symmetric.
            if (wi + 1) * 64 <= c + 1 {
                continue;
            }
            while free != 0 {
                let d = wi * 64 + free.trailing_zeros() as usize;
                free &= free - 1;
                if d > c {
                    uf.union(c, d);
                }
            }
        }
    }
    let comp_label = uf.labels();
    // Relabel per vertex so labels are numbered by smallest vertex.
    let mut remap = vec![u32::MAX; count];
    let mut next = 0;
    let label_of = (0..scc.n())
        .map(|v| {
            let l = comp_label[scc.comp_of(v)] as usize;
            if remap[l] == u32::MAX {
                remap[l] = next;
                next += 1;
            }
            remap[l]
        })
        .collect();
    DirectedWeak {
        i_max,
        o_max,
        gkm_partition: Partition::from_labels(label_of),
    }
}

/// Undirected components always; the closure-based parts when the
/// condensation fits under the closure limit.
pub fn weak_components(g: &Digraph, scc: &SccDecomposition) -> WeakComponents {
    let undirected_partition = undirected_partition(g);
    match ReachClosure::new(scc) {
        Ok(closure) => WeakComponents {
            undirected_partition,
            directed: Some(directed_weak(scc, &closure)),
            refusal: None,
        },
        Err(e) => WeakComponents {
            undirected_partition,
            directed: None,
            refusal: Some(e.to_string()),
        },
    }
}

/// As [`weak_components`], but failing instead of degrading.
pub fn weak_components_exact(g: &Digraph, scc: &SccDecomposition) -> Result<WeakComponents> {
    let closure = ReachClosure::new(scc)?;
    Ok(WeakComponents {
        undirected_partition: undirected_partition(g),
        directed: Some(directed_weak(scc, &closure)),
        refusal: None,
    })
}
