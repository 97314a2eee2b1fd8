//! Scalar statistics of one digraph: giant sizes, SCC counts, the large
//! component pair counters, the bow-tie and weak components.

mod bowtie;
mod counters;
mod giant;
mod weak;

use std::collections::BTreeMap;

use serde::Serialize;

pub use bowtie::{bowtie, BowTie, BowTiePart};
pub use counters::{
    condition_counters, condition_counters_multi, empirical_zeta_hat, z_geq_k, ComponentReach,
    ConditionCounters, PairCount, PairMode, DEFAULT_PAIR_SAMPLES,
};
pub use giant::{giant_stats, scc_count_as_rational, GiantStats};
pub use weak::{
    directed_weak, undirected_partition, weak_components, weak_components_exact, DirectedWeak,
    Partition, UnionFind, WeakComponents,
};

use crate::digraph::Digraph;
use crate::error::Result;
use crate::scc::SccDecomposition;

/// Structured single-graph report, as written by `analyze`.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub giant: GiantStats,
    pub counters: Vec<ConditionCounters>,
    pub bowtie_sizes: BTreeMap<String, usize>,
    pub undirected_components: usize,
    pub largest_undirected_component: usize,
    pub i_max: Option<usize>,
    pub o_max: Option<usize>,
    pub gkm_classes: Option<usize>,
    pub largest_gkm_class: Option<usize>,
    pub closure_refusal: Option<String>,
    /// Per-vertex detail, only when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<AnalysisDetail>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisDetail {
    pub scc_of: Vec<u32>,
    pub bowtie: BowTie,
    pub weak: WeakComponents,
}

pub fn analyze(
    g: &Digraph,
    ks: &[usize],
    mode: PairMode,
    seed: u64,
    detail: bool,
) -> Result<AnalysisReport> {
    let scc = SccDecomposition::new(g);
    let giant = giant_stats(g, &scc);
    let counters = if ks.is_empty() {
        Vec::new()
    } else {
        condition_counters_multi(g, &scc, ks, mode, seed)?
    };
    let bt = bowtie(g, &scc);
    let bowtie_sizes = bt
        .sizes()
        .into_iter()
        .map(|(p, s)| {
            (
                serde_json::to_value(p)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from))
                    .unwrap_or_default(),
                s,
            )
        })
        .collect();
    let weak = weak_components(g, &scc);
    Ok(AnalysisReport {
        giant,
        counters,
        bowtie_sizes,
        undirected_components: weak.undirected_partition.count(),
        largest_undirected_component: weak.undirected_partition.largest(),
        i_max: weak.i_max(),
        o_max: weak.o_max(),
        gkm_classes: weak.directed.as_ref().map(|d| d.gkm_partition.count()),
        largest_gkm_class: weak.directed.as_ref().map(|d| d.gkm_partition.largest()),
        closure_refusal: weak.refusal.clone(),
        detail: detail.then(|| AnalysisDetail {
            scc_of: scc.comp_of_all().to_vec(),
            bowtie: bt,
            weak,
        }),
    })
}
