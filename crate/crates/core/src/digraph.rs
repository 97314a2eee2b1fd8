//! Immutable digraph with forward and reverse adjacency.
//!
//! Vertices are `0..n`. Self-loops and repeated edges are kept as given: every
//! component notion in this crate is insensitive to them, while the directed
//! configuration model relies on them to realize its degree sequence exactly.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Compressed adjacency: `targets[offsets[v]..offsets[v + 1]]` are the
/// neighbors of `v`, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Csr {
    fn from_pairs(n: usize, pairs: impl Iterator<Item = (u32, u32)> + Clone) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for (u, _) in pairs.clone() {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[n]];
        for (u, v) in pairs {
            let slot = &mut fill[u as usize];
            targets[*slot] = v;
            *slot += 1;
        }
        for v in 0..n {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Csr { offsets, targets }
    }

    #[inline]
    fn row(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    out_adj: Csr,
    in_adj: Csr,
}

impl Digraph {
    /// Builds a digraph on `n` vertices. Neighbor lists come out sorted, so
    /// traversals are deterministic regardless of edge order.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::Parameter(format!(
                "n = {n} exceeds the u32 vertex range"
            )));
        }
        for (index, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::EdgeOutOfRange { index, u, v, n });
            }
        }
        let pairs = edges.iter().map(|&(u, v)| (u as u32, v as u32));
        Ok(Self::from_u32_unchecked(n, pairs))
    }

    pub(crate) fn from_u32_unchecked(
        n: usize,
        pairs: impl Iterator<Item = (u32, u32)> + Clone,
    ) -> Self {
        let out_adj = Csr::from_pairs(n, pairs.clone());
        let in_adj = Csr::from_pairs(n, pairs.map(|(u, v)| (v, u)));
        Digraph { n, out_adj, in_adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges, counting multiplicity.
    pub fn m(&self) -> usize {
        self.out_adj.targets.len()
    }

    #[inline]
    pub fn out_neighbors(&self, v: usize) -> &[u32] {
        self.out_adj.row(v)
    }

    #[inline]
    pub fn in_neighbors(&self, v: usize) -> &[u32] {
        self.in_adj.row(v)
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj.row(v).len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj.row(v).len()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { v, n: self.n })
        }
    }

    /// All edges, sorted by `(u, v)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.out_neighbors(u).iter().map(move |&v| (u, v as usize)))
    }

    /// The digraph with every edge reversed.
    pub fn transpose(&self) -> Digraph {
        Digraph {
            n: self.n,
            out_adj: self.in_adj.clone(),
            in_adj: self.out_adj.clone(),
        }
    }

    /// Same digraph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Digraph> {
        if perm.len() != self.n {
            return Err(Error::Parameter("permutation length differs from n".into()));
        }
        let edges: Vec<_> = self.edges().map(|(u, v)| (perm[u], perm[v])).collect();
        Digraph::new(self.n, &edges)
    }

    /// Drops self-loops and collapses repeated edges. Returns the simple digraph
    /// and the number of edges removed.
    pub fn simplify(&self) -> (Digraph, usize) {
        let mut kept = Vec::with_capacity(self.m());
        for u in 0..self.n {
            let mut last = None;
            for &v in self.out_neighbors(u) {
                if v as usize != u && last != Some(v) {
                    kept.push((u as u32, v));
                }
                last = Some(v);
            }
        }
        let removed = self.m() - kept.len();
        (
            Digraph::from_u32_unchecked(self.n, kept.iter().copied()),
            removed,
        )
    }

    /// Writes the shared edge-list format: a `n m` header, then one `u v` line
    /// per edge, sorted.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut buf = String::with_capacity(16 * (self.m() + 1));
        let _ = writeln!(buf, "{} {}", self.n, self.m());
        for (u, v) in self.edges() {
            let _ = writeln!(buf, "{u} {v}");
        }
        w.write_all(buf.as_bytes())
    }

    /// Parses the edge-list format. Blank lines and lines starting with `#` are
    /// skipped; the header edge count must match the number of edge lines.
    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Digraph> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let line_no = i + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let mut it = t.split_whitespace();
            let parse = |s: Option<&str>| -> Result<usize> {
                s.ok_or_else(|| Error::Parse {
                    line: line_no,
                    msg: "expected two integers".into(),
                })?
                .parse::<usize>()
                .map_err(|e| Error::Parse {
                    line: line_no,
                    msg: e.to_string(),
                })
            };
            let a = parse(it.next())?;
            let b = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "trailing tokens".into(),
                });
            }
            match header {
                None => header = Some((a, b)),
                Some(_) => edges.push((a, b)),
            }
        }
        let (n, m) = header.ok_or(Error::Parse {
            line: 0,
            msg: "missing `n m` header".into(),
        })?;
        if edges.len() != m {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Digraph::new(n, &edges)
    }
}
