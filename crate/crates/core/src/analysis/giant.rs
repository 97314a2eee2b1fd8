use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::digraph::Digraph;
use crate::scc::SccDecomposition;

/// Exact SCC-level statistics of one digraph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GiantStats {
    pub n: usize,
    /// Size of the largest SCC.
    pub size_lscc: usize,
    /// Size of the second largest SCC; 0 when there is only one.
    pub size_second: usize,
    /// Number of SCCs.
    pub k_n: usize,
    /// Fraction of strongly isolated vertices (singleton SCCs). Some texts
    /// define this as a count; the count is `isolated_count`.
    pub alpha1: f64,
    pub isolated_count: usize,
    /// Edges with both endpoints in the largest SCC, with multiplicity.
    pub giant_edge_count: usize,
    /// `Σ (d⁻(v) + d⁺(v))` over largest-SCC vertices, with full-graph degrees.
    /// Half of it is `giant_edge_count` plus half the edges crossing the
    /// giant's boundary.
    pub giant_degree_sum: usize,
    /// Number of largest-SCC vertices with in-degree `l` and out-degree `m`.
    #[serde(serialize_with = "serialize_census")]
    pub degree_census_in_giant: BTreeMap<(u32, u32), usize>,
}

fn serialize_census<S: Serializer>(
    map: &BTreeMap<(u32, u32), usize>,
    s: S,
) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Entry {
        in_degree: u32,
        out_degree: u32,
        count: usize,
    }
    s.collect_seq(map.iter().map(|(&(l, m), &count)| Entry {
        in_degree: l,
        out_degree: m,
        count,
    }))
}

/// Degrees count every incident edge, including self-loops and edges leaving
/// the giant.
pub fn giant_stats(g: &Digraph, scc: &SccDecomposition) -> GiantStats {
    let n = g.n();
    let lscc = scc.largest();
    let size_lscc = lscc.map_or(0, |c| scc.size(c));
    let size_second = scc.ranked(1).map_or(0, |c| scc.size(c));
    let isolated_count = scc.sizes().iter().filter(|&&s| s == 1).count();
    let mut giant_edge_count = 0;
    let mut giant_degree_sum = 0;
    let mut degree_census_in_giant = BTreeMap::new();
    if let Some(c) = lscc {
        for v in 0..n {
            if scc.comp_of(v) != c {
                continue;
            }
            giant_edge_count += g
                .out_neighbors(v)
                .iter()
                .filter(|&&w| scc.comp_of(w as usize) == c)
                .count();
            giant_degree_sum += g.in_degree(v) + g.out_degree(v);
            *degree_census_in_giant
                .entry((g.in_degree(v) as u32, g.out_degree(v) as u32))
                .or_insert(0) += 1;
        }
    }
    GiantStats {
        n,
        size_lscc,
        size_second,
        k_n: scc.count(),
        alpha1: if n == 0 {
            0.0
        } else {
            isolated_count as f64 / n as f64
        },
        isolated_count,
        giant_edge_count,
        giant_degree_sum,
        degree_census_in_giant,
    }
}

/// `Σ_v 1 / |C_v|` in exact rational arithmetic. Equals the number of SCCs.
pub fn scc_count_as_rational(scc: &SccDecomposition) -> BigRational {
    // Group by component size so the running denominator stays small.
    let mut by_size: BTreeMap<usize, u64> = BTreeMap::new();
    for v in 0..scc.n() {
        *by_size.entry(scc.size_of_vertex(v)).or_insert(0) += 1;
    }
    by_size
        .into_iter()
        .fold(BigRational::zero(), |acc, (size, count)| {
            acc + BigRational::new(BigInt::from(count), BigInt::from(size))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Fixture;

    fn stats(f: Fixture) -> GiantStats {
        let g = f.build().unwrap();
        giant_stats(&g, &SccDecomposition::new(&g))
    }

    #[test]
    fn path_is_all_isolated() {
        let s = stats(Fixture::DirectedPath { n: 4 });
        assert_eq!((s.k_n, s.size_lscc, s.alpha1), (4, 1, 1.0));
    }

    #[test]
    fn cycle_is_one_giant() {
        let s = stats(Fixture::DirectedCycle { n: 5 });
        assert_eq!(
            (s.k_n, s.size_lscc, s.alpha1, s.giant_edge_count),
            (1, 5, 0.0, 5)
        );
        assert_eq!(s.size_second, 0);
        assert_eq!(s.degree_census_in_giant.get(&(1, 1)), Some(&5));
    }

    #[test]
    fn scc_chain_counts() {
        let s = stats(Fixture::SccChain { k: 3, blob: 2 });
        assert_eq!(
            (s.k_n, s.size_lscc, s.size_second, s.alpha1),
            (3, 2, 2, 0.0)
        );
    }

    #[test]
    fn self_loop_still_isolated() {
        let g = Digraph::new(2, &[(0, 0), (0, 1)]).unwrap();
        let s = giant_stats(&g, &SccDecomposition::new(&g));
        assert_eq!(s.isolated_count, 2);
    }

    #[test]
    fn rational_identity() {
        let g = Fixture::SccChain { k: 3, blob: 3 }.build().unwrap();
        let scc = SccDecomposition::new(&g);
        assert_eq!(
            scc_count_as_rational(&scc),
            BigRational::from_integer(BigInt::from(3))
        );
    }
}
