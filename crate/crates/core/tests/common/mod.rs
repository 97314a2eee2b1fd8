#![allow(clippy::needless_range_loop)]
#![allow(dead_code)]

use dilab::rng::rng_from_seed;
use dilab::Digraph;
use rand::Rng;

/// Random multigraph with `n` in `1..=max_n` and about `density · n` edges,
/// self-loops and repeats allowed. The density itself is random so the
/// instances span sub- and supercritical shapes.
pub fn random_digraph(seed: u64, max_n: usize) -> Digraph {
    let mut rng = rng_from_seed(seed);
    let n = rng.random_range(1..=max_n);
    let density = rng.random_range(0.0..2.5);
    let m = (density * n as f64) as usize;
    let edges: Vec<(usize, usize)> = (0..m)
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
        .collect();
    Digraph::new(n, &edges).unwrap()
}

/// `reach[u][v]`: a directed path from `u` to `v` exists (`reach[v][v]` always).
pub fn floyd_warshall(g: &Digraph) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut r = vec![vec![false; n]; n];
    for (u, row) in r.iter_mut().enumerate() {
        row[u] = true;
        for &v in g.out_neighbors(u) {
            row[v as usize] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Reachability rows by one BFS per source; cheaper than Floyd–Warshall for sparse graphs.
pub fn bfs_reach(g: &Digraph) -> Vec<Vec<bool>> {
    (0..g.n())
        .map(|s| {
            let mut seen = vec![false; g.n()];
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in g.out_neighbors(u) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        stack.push(w as usize);
                    }
                }
            }
            seen
        })
        .collect()
}

pub fn out_sizes(reach: &[Vec<bool>]) -> Vec<usize> {
    reach
        .iter()
        .map(|row| row.iter().filter(|&&b| b).count())
        .collect()
}

pub fn in_sizes(reach: &[Vec<bool>]) -> Vec<usize> {
    let n = reach.len();
    (0..n)
        .map(|v| (0..n).filter(|&u| reach[u][v]).count())
        .collect()
}

/// Hop distances from `s` along out-edges (`forward`) or in-edges.
pub fn distances(g: &Digraph, s: usize, forward: bool) -> Vec<Option<u32>> {
    let mut d = vec![None; g.n()];
    d[s] = Some(0);
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        let nbrs = if forward {
            g.out_neighbors(u)
        } else {
            g.in_neighbors(u)
        };
        for &w in nbrs {
            if d[w as usize].is_none() {
                d[w as usize] = Some(d[u].unwrap() + 1);
                queue.push_back(w as usize);
            }
        }
    }
    d
}
