//! Strongly connected components and the condensation DAG.

use crate::digraph::Digraph;

const UNVISITED: u32 = u32::MAX;

/// SCC partition of a digraph.
///
/// Component ids are a topological order of the condensation: every
/// condensation edge goes from a smaller id to a larger one.
#[derive(Debug, Clone)]
pub struct SccDecomposition {
    comp_of: Vec<u32>,
    comp_sizes: Vec<usize>,
    comp_min_vertex: Vec<u32>,
    comp_order: Vec<u32>,
    cond_offsets: Vec<usize>,
    cond_targets: Vec<u32>,
}

impl SccDecomposition {
    /// Iterative Tarjan; recursion depth does not depend on the graph.
    pub fn new(g: &Digraph) -> Self {
        let n = g.n();
        let mut index = vec![UNVISITED; n];
        let mut low = vec![0u32; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<u32> = Vec::new();
        // (vertex, position in its out-neighbor list)
        let mut call: Vec<(u32, usize)> = Vec::new();
        let mut finished = vec![UNVISITED; n];
        let mut emitted = 0u32;
        let mut next_index = 0u32;

        for root in 0..n {
            if index[root] != UNVISITED {
                continue;
            }
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root as u32);
            on_stack[root] = true;
            call.push((root as u32, 0));

            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                let vu = v as usize;
                let nbrs = g.out_neighbors(vu);
                if *pos < nbrs.len() {
                    let w = nbrs[*pos] as usize;
                    *pos += 1;
                    if index[w] == UNVISITED {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w as u32);
                        on_stack[w] = true;
                        call.push((w as u32, 0));
                    } else if on_stack[w] {
                        low[vu] = low[vu].min(index[w]);
                    }
                    continue;
                }
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    let p = parent as usize;
                    low[p] = low[p].min(low[vu]);
                }
                if low[vu] == index[vu] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow") as usize;
                        on_stack[w] = false;
                        finished[w] = emitted;
                        if w == vu {
                            break;
                        }
                    }
                    emitted += 1;
                }
            }
        }

        // Tarjan emits sinks first; reverse to get a topological numbering.
        let k = emitted as usize;
        let comp_of: Vec<u32> = finished.iter().map(|&e| emitted - 1 - e).collect();
        let mut comp_sizes = vec![0usize; k];
        let mut comp_min_vertex = vec![u32::MAX; k];
        for (v, &c) in comp_of.iter().enumerate() {
            comp_sizes[c as usize] += 1;
            let m = &mut comp_min_vertex[c as usize];
            *m = (*m).min(v as u32);
        }
        let mut comp_order: Vec<u32> = (0..k as u32).collect();
        comp_order.sort_by(|&a, &b| {
            comp_sizes[b as usize]
                .cmp(&comp_sizes[a as usize])
                .then(comp_min_vertex[a as usize].cmp(&comp_min_vertex[b as usize]))
        });

        let mut cond_edges: Vec<(u32, u32)> = g
            .edges()
            .filter_map(|(u, v)| {
                let (cu, cv) = (comp_of[u], comp_of[v]);
                (cu != cv).then_some((cu, cv))
            })
            .collect();
        cond_edges.sort_unstable();
        cond_edges.dedup();
        let mut cond_offsets = vec![0usize; k + 1];
        for &(c, _) in &cond_edges {
            cond_offsets[c as usize + 1] += 1;
        }
        for i in 0..k {
            cond_offsets[i + 1] += cond_offsets[i];
        }
        let cond_targets = cond_edges.iter().map(|&(_, d)| d).collect();

        SccDecomposition {
            comp_of,
            comp_sizes,
            comp_min_vertex,
            comp_order,
            cond_offsets,
            cond_targets,
        }
    }

    /// Number of strongly connected components.
    pub fn count(&self) -> usize {
        self.comp_sizes.len()
    }

    pub fn n(&self) -> usize {
        self.comp_of.len()
    }

    #[inline]
    pub fn comp_of(&self, v: usize) -> usize {
        self.comp_of[v] as usize
    }

    pub fn comp_of_all(&self) -> &[u32] {
        &self.comp_of
    }

    pub fn size(&self, c: usize) -> usize {
        self.comp_sizes[c]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.comp_sizes
    }

    /// Size of the SCC containing `v`.
    pub fn size_of_vertex(&self, v: usize) -> usize {
        self.comp_sizes[self.comp_of[v] as usize]
    }

    /// Smallest vertex id in component `c`; used as its representative.
    pub fn representative(&self, c: usize) -> usize {
        self.comp_min_vertex[c] as usize
    }

    /// Component ids by size descending, ties broken by smallest member vertex.
    pub fn order(&self) -> &[u32] {
        &self.comp_order
    }

    /// The `i`-th largest component (0-based), if it exists.
    pub fn ranked(&self, i: usize) -> Option<usize> {
        self.comp_order.get(i).map(|&c| c as usize)
    }

    pub fn largest(&self) -> Option<usize> {
        self.ranked(0)
    }

    /// Deduplicated condensation successors of component `c`, all `> c`.
    pub fn successors(&self, c: usize) -> &[u32] {
        &self.cond_targets[self.cond_offsets[c]..self.cond_offsets[c + 1]]
    }

    pub fn condensation_edge_count(&self) -> usize {
        self.cond_targets.len()
    }

    /// Vertices of component `c`, ascending.
    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.n())
            .filter(|&v| self.comp_of[v] as usize == c)
            .collect()
    }
}
