use serde::Serialize;

use crate::digraph::Digraph;
use crate::reach::reachable_mask;
use crate::scc::SccDecomposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BowTiePart {
    Lscc,
    In,
    Out,
    TendrilIn,
    TendrilOut,
    Tube,
    Other,
}

impl BowTiePart {
    pub const ALL: [BowTiePart; 7] = [
        BowTiePart::Lscc,
        BowTiePart::In,
        BowTiePart::Out,
        BowTiePart::TendrilIn,
        BowTiePart::TendrilOut,
        BowTiePart::Tube,
        BowTiePart::Other,
    ];
}

/// Bow-tie partition around the largest SCC.
///
/// Let `R` be the vertices outside `IN ∪ LSCC ∪ OUT`. Tendrils and tubes refine
/// `R`: `TUBE` is reachable from `IN` and reaches `OUT`, `TENDRIL_IN` is
/// reachable from `IN` only, `TENDRIL_OUT` reaches `OUT` only, `OTHER` is the
/// rest. Any path from `IN` into `R` stays inside `IN ∪ R`, so these sets are
/// found by searches restricted to `IN ∪ R` and `OUT ∪ R`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BowTie {
    pub part_of: Vec<BowTiePart>,
}

impl BowTie {
    pub fn members(&self, part: BowTiePart) -> Vec<usize> {
        (0..self.part_of.len())
            .filter(|&v| self.part_of[v] == part)
            .collect()
    }

    pub fn size(&self, part: BowTiePart) -> usize {
        self.part_of.iter().filter(|&&p| p == part).count()
    }

    pub fn sizes(&self) -> Vec<(BowTiePart, usize)> {
        BowTiePart::ALL.iter().map(|&p| (p, self.size(p))).collect()
    }
}

pub fn bowtie(g: &Digraph, scc: &SccDecomposition) -> BowTie {
    let n = g.n();
    let Some(lscc) = scc.largest() else {
        return BowTie {
            part_of: Vec::new(),
        };
    };
    let core: Vec<usize> = (0..n).filter(|&v| scc.comp_of(v) == lscc).collect();
    let down = reachable_mask(g, &core, true);
    let up = reachable_mask(g, &core, false);
    let mut part_of: Vec<BowTiePart> = (0..n)
        .map(|v| match (scc.comp_of(v) == lscc, up[v], down[v]) {
            (true, _, _) => BowTiePart::Lscc,
            (false, true, _) => BowTiePart::In,
            (false, false, true) => BowTiePart::Out,
            _ => BowTiePart::Other,
        })
        .collect();

    let from_in = restricted_search(g, &part_of, BowTiePart::In, true);
    let to_out = restricted_search(g, &part_of, BowTiePart::Out, false);
    for v in 0..n {
        if part_of[v] == BowTiePart::Other {
            part_of[v] = match (from_in[v], to_out[v]) {
                (true, true) => BowTiePart::Tube,
                (true, false) => BowTiePart::TendrilIn,
                (false, true) => BowTiePart::TendrilOut,
                (false, false) => BowTiePart::Other,
            };
        }
    }
    BowTie { part_of }
}

/// Vertices of the remainder reachable from (`forward`) or reaching the given
/// part, moving only through the remainder.
fn restricted_search(
    g: &Digraph,
    part_of: &[BowTiePart],
    seed: BowTiePart,
    forward: bool,
) -> Vec<bool> {
    let mut hit = vec![false; g.n()];
    let mut stack: Vec<usize> = (0..g.n()).filter(|&v| part_of[v] == seed).collect();
    while let Some(u) = stack.pop() {
        let nbrs = if forward {
            g.out_neighbors(u)
        } else {
            g.in_neighbors(u)
        };
        for &w in nbrs {
            let w = w as usize;
            if part_of[w] == BowTiePart::Other && !hit[w] {
                hit[w] = true;
                stack.push(w);
            }
        }
    }
    hit
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Fixture;

    fn bt(g: &Digraph) -> BowTie {
        bowtie(g, &SccDecomposition::new(g))
    }

    #[test]
    fn exemplar() {
        let g = Fixture::BowtieExemplar { a: 2, b: 3, c: 2 }
            .build()
            .unwrap();
        let b = bt(&g);
        assert_eq!(b.members(BowTiePart::In), vec![0, 1]);
        assert_eq!(b.members(BowTiePart::Lscc), vec![2, 3, 4]);
        assert_eq!(b.members(BowTiePart::Out), vec![5, 6]);
        for p in [
            BowTiePart::TendrilIn,
            BowTiePart::TendrilOut,
            BowTiePart::Tube,
            BowTiePart::Other,
        ] {
            assert_eq!(b.size(p), 0);
        }
    }

    #[test]
    fn cycle_is_all_core() {
        let g = Fixture::DirectedCycle { n: 5 }.build().unwrap();
        assert_eq!(bt(&g).size(BowTiePart::Lscc), 5);
    }

    #[test]
    fn tendrils_and_tube() {
        // core {0,1}; IN 2; OUT 3; 2 -> 4 (tendril in); 5 -> 3 (tendril out);
        // 2 -> 6 -> 3 (tube); 7 isolated.
        let edges = [
            (0, 1),
            (1, 0),
            (2, 0),
            (0, 3),
            (2, 4),
            (5, 3),
            (2, 6),
            (6, 3),
        ];
        let g = Digraph::new(8, &edges).unwrap();
        let b = bt(&g);
        assert_eq!(b.part_of[4], BowTiePart::TendrilIn);
        assert_eq!(b.part_of[5], BowTiePart::TendrilOut);
        assert_eq!(b.part_of[6], BowTiePart::Tube);
        assert_eq!(b.part_of[7], BowTiePart::Other);
    }
}
