use std::collections::HashSet;

use dilab::generators::{gen_directed_cm, gen_directed_er, sample_degree_sequence, Fixture};
use dilab::rng::replicate_seed;
use dilab::{DegreeLaw, SccDecomposition};

#[test]
fn er_edge_frequency() {
    let hits = (0..10_000u64)
        .filter(|&s| {
            gen_directed_er(2, 1.0, replicate_seed(1, s))
                .unwrap()
                .edges()
                .any(|e| e == (0, 1))
        })
        .count();
    let f = hits as f64 / 1e4;
    assert!((f - 0.5).abs() <= 0.02, "{f}");
}

#[test]
fn er_mean_degree_at_scale() {
    for s in 0..3 {
        let g = gen_directed_er(100_000, 2.0, replicate_seed(2, s)).unwrap();
        let ratio = g.m() as f64 / g.n() as f64;
        assert!((ratio - 2.0).abs() <= 0.05, "{ratio}");
    }
}

#[test]
fn er_edge_count_is_binomial() {
    let (n, lambda) = (30usize, 2.0);
    let trials = (n * (n - 1)) as f64;
    let p = lambda / n as f64;
    let counts: Vec<f64> = (0..1_000u64)
        .map(|s| {
            gen_directed_er(n, lambda, replicate_seed(3, s))
                .unwrap()
                .m() as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    let se = (trials * p * (1.0 - p) / counts.len() as f64).sqrt();
    assert!(
        (mean - trials * p).abs() <= 3.0 * se,
        "{mean} vs {}",
        trials * p
    );
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (counts.len() - 1) as f64;
    assert!(
        (var / (trials * p * (1.0 - p)) - 1.0).abs() < 0.15,
        "variance {var}"
    );
}

#[test]
fn er_has_no_self_loops_and_rejects_bad_lambda() {
    for s in 0..50 {
        let g = gen_directed_er(40, 5.0, s).unwrap();
        assert!(g.edges().all(|(u, v)| u != v));
    }
    assert_eq!(gen_directed_er(100, 0.0, 1).unwrap().m(), 0);
    assert!(gen_directed_er(3, 4.0, 1).is_err());
    assert!(gen_directed_er(3, -1.0, 1).is_err());
}

#[test]
fn distinct_seeds_give_distinct_graphs() {
    let mut seen = HashSet::new();
    for s in 0..1_000u64 {
        let g = gen_directed_er(100, 2.0, replicate_seed(4, s)).unwrap();
        assert!(
            seen.insert(g.edges().collect::<Vec<_>>()),
            "collision at replicate {s}"
        );
    }
}

#[test]
fn generation_ignores_thread_count() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let er = gen_directed_er(50_000, 2.0, 77).unwrap();
                let seq = sample_degree_sequence(&DegreeLaw::poisson(2.0).unwrap(), 50_000, 78);
                let cm = gen_directed_cm(&seq.in_degrees, &seq.out_degrees, 79).unwrap();
                (er, cm)
            })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn cm_conserves_degrees() {
    for s in 0..20 {
        let seq = sample_degree_sequence(&DegreeLaw::poisson(1.7).unwrap(), 2_000, s);
        let g = gen_directed_cm(&seq.in_degrees, &seq.out_degrees, s).unwrap();
        for v in 0..g.n() {
            assert_eq!(g.in_degree(v), seq.in_degrees[v] as usize);
            assert_eq!(g.out_degree(v), seq.out_degrees[v] as usize);
        }
    }
    let g = gen_directed_cm(&[2; 10_000], &[2; 10_000], 5).unwrap();
    assert!((0..g.n()).all(|v| g.in_degree(v) == 2 && g.out_degree(v) == 2));
    let two = gen_directed_cm(&[1, 1], &[1, 1], 9).unwrap();
    assert_eq!(two.m(), 2);
    let err = gen_directed_cm(&[1, 2], &[1, 1], 0)
        .unwrap_err()
        .to_string();
    assert!(err.contains('3') && err.contains('2'), "{err}");
}

#[test]
fn cm_matchings_are_uniform() {
    // in=[1,1], out=[1,1]: identity (two loops) or swap (a 2-cycle), each with probability ½.
    let loops = (0..4_000u64)
        .filter(|&s| {
            gen_directed_cm(&[1, 1], &[1, 1], replicate_seed(6, s))
                .unwrap()
                .edges()
                .any(|(u, v)| u == v)
        })
        .count();
    let f = loops as f64 / 4_000.0;
    assert!((f - 0.5).abs() < 0.03, "{f}");
}

#[test]
fn permutation_digraph_is_union_of_cycles() {
    for s in 0..20 {
        let g = gen_directed_cm(&[1; 100], &[1; 100], s).unwrap();
        let scc = SccDecomposition::new(&g);
        for c in 0..scc.count() {
            let members = scc.members(c);
            let internal = members
                .iter()
                .map(|&v| g.out_neighbors(v))
                .filter(|nb| scc.comp_of(nb[0] as usize) == c)
                .count();
            assert_eq!(internal, members.len());
        }
        assert!(scc.condensation_edge_count() == 0);
    }
}

#[test]
fn degree_sequences() {
    let reg = sample_degree_sequence(&DegreeLaw::regular(2), 1_000, 1);
    assert!(reg
        .in_degrees
        .iter()
        .chain(&reg.out_degrees)
        .all(|&d| d == 2));
    assert_eq!(reg.repairs, 0);

    let pois = sample_degree_sequence(&DegreeLaw::poisson(2.0).unwrap(), 100_000, 2);
    let mean = pois.in_degrees.iter().map(|&d| d as f64).sum::<f64>() / 1e5;
    assert!((mean - 2.0).abs() <= 0.03, "{mean}");
    let total_in: u64 = pois.in_degrees.iter().map(|&d| d as u64).sum();
    let total_out: u64 = pois.out_degrees.iter().map(|&d| d as u64).sum();
    assert_eq!(total_in, total_out);
}

#[test]
fn repairs_stay_small() {
    let law = DegreeLaw::explicit([((1, 0), 0.5), ((0, 1), 0.5)]).unwrap();
    let n = 10_000usize;
    let bound = ((n as f64).sqrt() * (n as f64).ln()) as u64;
    let within = (0..200u64)
        .filter(|&s| {
            let seq = sample_degree_sequence(&law, n, replicate_seed(8, s));
            let sum_in: u64 = seq.in_degrees.iter().map(|&d| d as u64).sum();
            let sum_out: u64 = seq.out_degrees.iter().map(|&d| d as u64).sum();
            assert_eq!(sum_in, sum_out);
            seq.repairs <= bound
        })
        .count();
    assert!(within >= 198, "{within} of 200");
}

#[test]
fn determinism() {
    assert_eq!(
        gen_directed_er(1_000, 1.5, 42).unwrap(),
        gen_directed_er(1_000, 1.5, 42).unwrap()
    );
    let law = DegreeLaw::poisson(1.5).unwrap();
    let a = sample_degree_sequence(&law, 1_000, 42);
    let b = sample_degree_sequence(&law, 1_000, 42);
    assert_eq!(
        (&a.in_degrees, &a.out_degrees, a.repairs),
        (&b.in_degrees, &b.out_degrees, b.repairs)
    );
    assert_eq!(
        gen_directed_cm(&a.in_degrees, &a.out_degrees, 3).unwrap(),
        gen_directed_cm(&b.in_degrees, &b.out_degrees, 3).unwrap()
    );
}

#[test]
fn fixture_examples() {
    let scc_of = |f: Fixture| SccDecomposition::new(&f.build().unwrap());
    let chain = scc_of(Fixture::SccChain { k: 3, blob: 2 });
    assert_eq!(
        (chain.count(), chain.size(chain.largest().unwrap())),
        (3, 2)
    );
    let cycle = scc_of(Fixture::DirectedCycle { n: 5 });
    assert_eq!(cycle.sizes(), vec![5]);
    assert_eq!(scc_of(Fixture::DirectedPath { n: 4 }).count(), 4);
    assert_eq!(scc_of(Fixture::DagComplete { n: 6 }).count(), 6);
    assert_eq!(Fixture::DagComplete { n: 6 }.build().unwrap().m(), 15);
    assert!(Fixture::parse("moebius", &[3]).is_err());
    assert!(Fixture::parse("scc-chain", &[3]).is_err());
    assert_eq!(
        Fixture::parse("bowtie-exemplar", &[1, 2, 3]).unwrap(),
        Fixture::BowtieExemplar { a: 1, b: 2, c: 3 }
    );
}
