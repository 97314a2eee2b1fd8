//! Truncated BFS reach counts and the exact bitset transitive closure of the
//! condensation.

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::scc::SccDecomposition;

/// Default limit on condensation nodes for [`ReachClosure`]. Memory is
/// quadratic: 20 000 nodes take about 100 MB for both directions.
pub const DEFAULT_CLOSURE_LIMIT: usize = 20_000;

/// Result of a truncated BFS.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CappedSize {
    pub size: usize,
    /// BFS stopped once it had reached `cap` vertices; the true size is at
    /// least `size`.
    pub saturated: bool,
}

impl CappedSize {
    /// Whether the true component size is at least `k`.
    pub fn at_least(&self, k: usize) -> bool {
        self.size >= k
    }
}

#[derive(Debug, Clone, Copy)]
enum Direction {
    Forward,
    Backward,
}

/// Reusable BFS scratch space. Visit marks use generation stamps so repeated
/// searches on the same graph cost only what they touch.
#[derive(Debug, Clone)]
pub struct BfsScratch {
    stamp: Vec<u32>,
    generation: u32,
    queue: Vec<u32>,
}

impl BfsScratch {
    pub fn new(n: usize) -> Self {
        BfsScratch {
            stamp: vec![0; n],
            generation: 0,
            queue: Vec::new(),
        }
    }

    fn next_generation(&mut self) {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.fill(0);
            self.generation = 1;
        }
        self.queue.clear();
    }

    fn capped(&mut self, g: &Digraph, v: usize, cap: usize, dir: Direction) -> CappedSize {
        debug_assert!(cap >= 1);
        self.next_generation();
        let gen = self.generation;
        self.stamp[v] = gen;
        self.queue.push(v as u32);
        let mut head = 0;
        while head < self.queue.len() {
            // Stopped with unexplored frontier left: the true size may be larger.
            if self.queue.len() >= cap && head > 0 {
                return CappedSize {
                    size: self.queue.len(),
                    saturated: true,
                };
            }
            let u = self.queue[head] as usize;
            head += 1;
            let nbrs = match dir {
                Direction::Forward => g.out_neighbors(u),
                Direction::Backward => g.in_neighbors(u),
            };
            for &w in nbrs {
                if self.stamp[w as usize] != gen {
                    self.stamp[w as usize] = gen;
                    self.queue.push(w);
                }
            }
        }
        CappedSize {
            size: self.queue.len(),
            saturated: false,
        }
    }

    pub fn forward(&mut self, g: &Digraph, v: usize, cap: usize) -> CappedSize {
        self.capped(g, v, cap, Direction::Forward)
    }

    pub fn backward(&mut self, g: &Digraph, v: usize, cap: usize) -> CappedSize {
        self.capped(g, v, cap, Direction::Backward)
    }
}

/// Size of the out-component of `v`, with BFS stopped after `cap` vertices.
pub fn forward_size_capped(g: &Digraph, v: usize, cap: usize) -> Result<CappedSize> {
    check_capped_args(g, v, cap)?;
    Ok(BfsScratch::new(g.n()).forward(g, v, cap))
}

/// Mirror of [`forward_size_capped`] over in-edges.
pub fn backward_size_capped(g: &Digraph, v: usize, cap: usize) -> Result<CappedSize> {
    check_capped_args(g, v, cap)?;
    Ok(BfsScratch::new(g.n()).backward(g, v, cap))
}

fn check_capped_args(g: &Digraph, v: usize, cap: usize) -> Result<()> {
    g.check_vertex(v)?;
    if cap == 0 {
        return Err(Error::Parameter("cap must be at least 1".into()));
    }
    Ok(())
}

/// All vertices reachable from `sources` (sources included), as a mask.
pub fn reachable_mask(g: &Digraph, sources: &[usize], forward: bool) -> Vec<bool> {
    let mut seen = vec![false; g.n()];
    let mut queue: Vec<usize> = Vec::with_capacity(sources.len());
    for &s in sources {
        if !seen[s] {
            seen[s] = true;
            queue.push(s);
        }
    }
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        let nbrs = if forward {
            g.out_neighbors(u)
        } else {
            g.in_neighbors(u)
        };
        for &w in nbrs {
            if !seen[w as usize] {
                seen[w as usize] = true;
                queue.push(w as usize);
            }
        }
    }
    seen
}

/// Fixed-length packed bit set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

/// Exact descendant and ancestor sets of every condensation node.
#[derive(Debug, Clone)]
pub struct ReachClosure {
    descendants: Vec<BitSet>,
    ancestors: Vec<BitSet>,
    out_mass: Vec<usize>,
    in_mass: Vec<usize>,
    comp_of: Vec<u32>,
    valid_size_limit: usize,
}

impl ReachClosure {
    pub fn new(scc: &SccDecomposition) -> Result<Self> {
        Self::with_limit(scc, DEFAULT_CLOSURE_LIMIT)
    }

    /// Builds the closure unless the condensation has more than `limit` nodes.
    pub fn with_limit(scc: &SccDecomposition, limit: usize) -> Result<Self> {
        let k = scc.count();
        if k > limit {
            return Err(Error::ClosureTooLarge { nodes: k, limit });
        }
        // Component ids are topological, so a reverse sweep sees every
        // successor before its predecessors.
        let mut descendants = vec![BitSet::new(k); k];
        for c in (0..k).rev() {
            let mut set = std::mem::replace(&mut descendants[c], BitSet::new(0));
            set.insert(c);
            for &d in scc.successors(c) {
                set.union_with(&descendants[d as usize]);
            }
            descendants[c] = set;
        }
        let mut ancestors = vec![BitSet::new(k); k];
        for c in 0..k {
            for d in descendants[c].iter() {
                ancestors[d].insert(c);
            }
        }
        let mass = |s: &BitSet| s.iter().map(|d| scc.size(d)).sum::<usize>();
        let out_mass = descendants.iter().map(mass).collect();
        let in_mass = ancestors.iter().map(mass).collect();
        Ok(ReachClosure {
            descendants,
            ancestors,
            out_mass,
            in_mass,
            comp_of: scc.comp_of_all().to_vec(),
            valid_size_limit: limit,
        })
    }

    pub fn node_count(&self) -> usize {
        self.descendants.len()
    }

    pub fn valid_size_limit(&self) -> usize {
        self.valid_size_limit
    }

    pub fn descendants(&self, c: usize) -> &BitSet {
        &self.descendants[c]
    }

    pub fn ancestors(&self, c: usize) -> &BitSet {
        &self.ancestors[c]
    }

    /// Whether condensation node `c` reaches `d` (reflexive).
    pub fn comp_reaches(&self, c: usize, d: usize) -> bool {
        self.descendants[c].contains(d)
    }

    /// Whether vertex `u` reaches vertex `v` (reflexive).
    pub fn reaches(&self, u: usize, v: usize) -> bool {
        self.comp_reaches(self.comp_of[u] as usize, self.comp_of[v] as usize)
    }

    /// Exact |out-component| of vertex `v`.
    pub fn out_size(&self, v: usize) -> usize {
        self.out_mass[self.comp_of[v] as usize]
    }

    /// Exact |in-component| of vertex `v`.
    pub fn in_size(&self, v: usize) -> usize {
        self.in_mass[self.comp_of[v] as usize]
    }

    pub fn comp_out_size(&self, c: usize) -> usize {
        self.out_mass[c]
    }

    pub fn comp_in_size(&self, c: usize) -> usize {
        self.in_mass[c]
    }
}
