//! Isomorphism-invariant encodings of rooted balls.
//!
//! Balls with at most [`EXACT_CAP`] vertices get a true canonical form: the
//! lexicographically smallest relabeled edge list over all orderings reached by
//! individualization and refinement, starting from the stable directed color
//! refinement with the root distinguished. Branches are skipped when an
//! explored candidate is a twin of the current one, or when an automorphism
//! found earlier (fixing the individualized prefix) maps one onto the other.
//!
//! Larger balls, and the rare small ball whose search exceeds
//! [`LEAF_BUDGET`], get a hash of the complete refinement history instead.
//! Such signatures are flagged inexact: isomorphic balls always agree, but
//! distinct balls may collide.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::ball::RootedBall;

/// Largest ball (in vertices) that receives an exact canonical form.
pub const EXACT_CAP: usize = 24;

/// Leaves explored before the exact search gives up and falls back to the
/// refinement hash.
pub const LEAF_BUDGET: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BallSignature {
    pub bytes: Vec<u8>,
    pub exact: bool,
}

/// Reserved signature for branching-process samples that hit the node cap.
pub fn saturated_signature() -> BallSignature {
    BallSignature {
        bytes: b"SATURATED".to_vec(),
        exact: false,
    }
}

/// Adjacency of a ball with edge multiplicities.
struct Adjacency {
    n: usize,
    /// `(neighbor, multiplicity)`, excluding self-loops, sorted by neighbor.
    out: Vec<Vec<(u32, u32)>>,
    inc: Vec<Vec<(u32, u32)>>,
    loops: Vec<u32>,
    /// Distinct `(u, v, multiplicity)`.
    triples: Vec<(u32, u32, u32)>,
}

impl Adjacency {
    fn new(ball: &RootedBall) -> Self {
        let n = ball.size;
        let mut counts: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for &e in &ball.edges {
            *counts.entry(e).or_insert(0) += 1;
        }
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        let mut loops = vec![0; n];
        for (&(u, v), &m) in &counts {
            if u == v {
                loops[u as usize] = m;
            } else {
                out[u as usize].push((v, m));
                inc[v as usize].push((u, m));
            }
        }
        for l in inc.iter_mut() {
            l.sort_unstable();
        }
        let triples = counts.into_iter().map(|((u, v), m)| (u, v, m)).collect();
        Adjacency {
            n,
            out,
            inc,
            loops,
            triples,
        }
    }

    fn initial_colors(&self) -> Vec<u32> {
        let keys: Vec<(u32, u32)> = (0..self.n)
            .map(|v| (u32::from(v != 0), self.loops[v]))
            .collect();
        rank(&keys)
    }

    /// Refines `colors` to the coarsest stable partition below it. Colors stay
    /// canonical: a color is the rank of a label-free key. When `history` is
    /// given, every round's key table is appended to it.
    fn refine(&self, mut colors: Vec<u32>, mut history: Option<&mut Sha256>) -> Vec<u32> {
        let mut classes = distinct(&colors);
        loop {
            let keys: Vec<(u32, Vec<(u32, u32)>, Vec<(u32, u32)>)> = (0..self.n)
                .map(|v| {
                    let mut o: Vec<(u32, u32)> = self.out[v]
                        .iter()
                        .map(|&(w, m)| (colors[w as usize], m))
                        .collect();
                    let mut i: Vec<(u32, u32)> = self.inc[v]
                        .iter()
                        .map(|&(w, m)| (colors[w as usize], m))
                        .collect();
                    o.sort_unstable();
                    i.sort_unstable();
                    (colors[v], o, i)
                })
                .collect();
            if let Some(h) = history.as_deref_mut() {
                hash_round(h, &keys);
            }
            let next = rank(&keys);
            let next_classes = distinct(&next);
            colors = next;
            if next_classes == classes {
                return colors;
            }
            classes = next_classes;
        }
    }

    fn encode(&self, labels: &[u32]) -> Vec<(u32, u32, u32)> {
        let mut enc: Vec<(u32, u32, u32)> = self
            .triples
            .iter()
            .map(|&(u, v, m)| (labels[u as usize], labels[v as usize], m))
            .collect();
        enc.sort_unstable();
        enc
    }

    fn multiplicity(&self, u: usize, v: usize) -> u32 {
        if u == v {
            return self.loops[u];
        }
        self.out[u]
            .binary_search_by_key(&(v as u32), |&(w, _)| w)
            .map_or(0, |i| self.out[u][i].1)
    }

    /// Whether swapping `u` and `v` (same color) preserves the graph.
    fn twins(&self, u: usize, v: usize) -> bool {
        if self.loops[u] != self.loops[v] || self.multiplicity(u, v) != self.multiplicity(v, u) {
            return false;
        }
        (0..self.n).filter(|&x| x != u && x != v).all(|x| {
            self.multiplicity(u, x) == self.multiplicity(v, x)
                && self.multiplicity(x, u) == self.multiplicity(x, v)
        })
    }
}

fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<u32> {
    let mut sorted: Vec<&K> = keys.iter().collect();
    sorted.sort_unstable();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(&k).expect("present") as u32)
        .collect()
}

fn distinct(colors: &[u32]) -> usize {
    colors.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
}

fn hash_round(h: &mut Sha256, keys: &[(u32, Vec<(u32, u32)>, Vec<(u32, u32)>)]) {
    let mut table: BTreeMap<&(u32, Vec<(u32, u32)>, Vec<(u32, u32)>), u32> = BTreeMap::new();
    for k in keys {
        *table.entry(k).or_insert(0) += 1;
    }
    h.update((table.len() as u32).to_le_bytes());
    for ((c, o, i), count) in table {
        h.update(c.to_le_bytes());
        h.update(count.to_le_bytes());
        for list in [o, i] {
            h.update((list.len() as u32).to_le_bytes());
            for &(a, b) in list {
                h.update(a.to_le_bytes());
                h.update(b.to_le_bytes());
            }
        }
    }
}

struct Search<'a> {
    adj: &'a Adjacency,
    best: Option<(Vec<(u32, u32, u32)>, Vec<u32>)>,
    automorphisms: Vec<Vec<u32>>,
    leaves: usize,
    aborted: bool,
}

impl Search<'_> {
    fn run(&mut self, colors: Vec<u32>, prefix: &mut Vec<usize>) {
        if self.aborted {
            return;
        }
        let n = self.adj.n;
        if distinct(&colors) == n {
            self.leaf(colors);
            return;
        }
        let mut cell_size = vec![0usize; n];
        for &c in &colors {
            cell_size[c as usize] += 1;
        }
        let target = (0..n)
            .find(|&c| cell_size[c] > 1)
            .expect("non-discrete partition") as u32;
        let candidates: Vec<usize> = (0..n).filter(|&v| colors[v] == target).collect();
        let mut explored: Vec<usize> = Vec::new();
        for &w in &candidates {
            if explored.iter().any(|&u| self.adj.twins(u, w))
                || self.same_orbit(prefix, &explored, w)
            {
                continue;
            }
            let split: Vec<(u32, bool)> = (0..n).map(|x| (colors[x], x != w)).collect();
            let child = self.adj.refine(rank(&split), None);
            prefix.push(w);
            self.run(child, prefix);
            prefix.pop();
            explored.push(w);
            if self.aborted {
                return;
            }
        }
    }

    fn leaf(&mut self, labels: Vec<u32>) {
        self.leaves += 1;
        if self.leaves > LEAF_BUDGET {
            self.aborted = true;
            return;
        }
        let enc = self.adj.encode(&labels);
        match &self.best {
            Some((best_enc, best_labels)) if *best_enc == enc => {
                let mut vertex_of = vec![0u32; labels.len()];
                for (v, &l) in best_labels.iter().enumerate() {
                    vertex_of[l as usize] = v as u32;
                }
                let sigma: Vec<u32> = labels.iter().map(|&l| vertex_of[l as usize]).collect();
                if sigma.iter().enumerate().any(|(v, &s)| v as u32 != s) {
                    self.automorphisms.push(sigma);
                }
            }
            Some((best_enc, _)) if *best_enc < enc => {}
            _ => self.best = Some((enc, labels)),
        }
    }

    /// Whether `w` is in the orbit of an explored candidate under the known
    /// automorphisms that fix `prefix` pointwise.
    fn same_orbit(&self, prefix: &[usize], explored: &[usize], w: usize) -> bool {
        if explored.is_empty() {
            return false;
        }
        let gens: Vec<&Vec<u32>> = self
            .automorphisms
            .iter()
            .filter(|s| prefix.iter().all(|&p| s[p] as usize == p))
            .collect();
        if gens.is_empty() {
            return false;
        }
        let mut uf = crate::analysis::UnionFind::new(self.adj.n);
        for s in gens {
            for (x, &y) in s.iter().enumerate() {
                uf.union(x, y as usize);
            }
        }
        let rw = uf.find(w);
        explored.iter().any(|&u| uf.find(u) == rw)
    }
}

pub fn canonical_signature(ball: &RootedBall) -> BallSignature {
    let adj = Adjacency::new(ball);
    if adj.n <= EXACT_CAP && adj.n > 0 {
        let start = adj.refine(adj.initial_colors(), None);
        let mut search = Search {
            adj: &adj,
            best: None,
            automorphisms: Vec::new(),
            leaves: 0,
            aborted: false,
        };
        search.run(start, &mut Vec::new());
        if !search.aborted {
            let (enc, _) = search.best.expect("at least one leaf");
            let mut bytes = Vec::with_capacity(2 + enc.len() * 6);
            bytes.push(b'E');
            bytes.push(adj.n as u8);
            for (u, v, m) in enc {
                bytes.push(u as u8);
                bytes.push(v as u8);
                bytes.extend_from_slice(&m.to_le_bytes());
            }
            return BallSignature { bytes, exact: true };
        }
    }
    refinement_hash(&adj, ball.edges.len())
}

fn refinement_hash(adj: &Adjacency, m: usize) -> BallSignature {
    let mut h = Sha256::new();
    let initial = adj.initial_colors();
    // The initial key is (is-non-root, self-loop count).
    for v in 0..adj.n {
        h.update([u8::from(v != 0)]);
        h.update(adj.loops[v].to_le_bytes());
        h.update(initial[v].to_le_bytes());
    }
    adj.refine(initial, Some(&mut h));
    let mut bytes = vec![b'H'];
    bytes.extend_from_slice(&(adj.n as u32).to_le_bytes());
    bytes.extend_from_slice(&(m as u32).to_le_bytes());
    bytes.extend_from_slice(&h.finalize());
    BallSignature {
        bytes,
        exact: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::Digraph;
    use crate::local::ball::extract_ball;

    fn relabel(ball: &RootedBall, perm: &[u32]) -> RootedBall {
        RootedBall::from_parts(
            ball.size,
            ball.edges
                .iter()
                .map(|&(u, v)| (perm[u as usize], perm[v as usize]))
                .collect(),
            ball.radius,
        )
    }

    #[test]
    fn relabeling_invariance() {
        let ball = RootedBall::from_parts(
            5,
            vec![(0, 1), (1, 2), (2, 0), (3, 0), (0, 4), (4, 4), (3, 4)],
            3,
        );
        let other = relabel(&ball, &[0, 3, 1, 4, 2]);
        assert_eq!(canonical_signature(&ball), canonical_signature(&other));
        assert!(canonical_signature(&ball).exact);
    }

    #[test]
    fn root_position_matters() {
        let g = Digraph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let mid = extract_ball(&g, 1, 3).unwrap();
        let end = extract_ball(&g, 0, 3).unwrap();
        assert_eq!(mid.size, end.size);
        assert_ne!(canonical_signature(&mid), canonical_signature(&end));
    }

    #[test]
    fn multiplicity_matters() {
        let a = RootedBall::from_parts(2, vec![(0, 1)], 2);
        let b = RootedBall::from_parts(2, vec![(0, 1), (0, 1)], 2);
        assert_ne!(canonical_signature(&a), canonical_signature(&b));
    }

    #[test]
    fn large_symmetric_star_is_exact() {
        let edges: Vec<_> = (1..24).map(|i| (0, i)).collect();
        let s = canonical_signature(&RootedBall::from_parts(24, edges, 2));
        assert!(s.exact);
    }

    #[test]
    fn symmetric_trees_are_exact() {
        // Root with 3 children, each with 3 children: 13 vertices.
        let mut edges = Vec::new();
        let mut next = 1;
        for _ in 0..3 {
            let c = next;
            next += 1;
            edges.push((0, c));
            for _ in 0..3 {
                edges.push((c, next));
                next += 1;
            }
        }
        let ball = RootedBall::from_parts(next as usize, edges, 3);
        let s = canonical_signature(&ball);
        assert!(s.exact);
        let perm: Vec<u32> = (0..next)
            .map(|i| if i == 0 { 0 } else { next - i })
            .collect();
        assert_eq!(s, canonical_signature(&relabel(&ball, &perm)));
    }

    #[test]
    fn hash_for_large_balls() {
        let edges: Vec<_> = (1..30).map(|i| (i - 1, i)).collect();
        let ball = RootedBall::from_parts(30, edges.clone(), 40);
        let s = canonical_signature(&ball);
        assert!(!s.exact);
        let perm: Vec<u32> = (0..30).map(|i| if i == 0 { 0 } else { 30 - i }).collect();
        assert_eq!(s, canonical_signature(&relabel(&ball, &perm)));
        // Reversing the path changes the rooted structure.
        let rev = RootedBall::from_parts(30, edges.iter().map(|&(u, v)| (v, u)).collect(), 40);
        assert_ne!(s, canonical_signature(&rev));
    }
}
