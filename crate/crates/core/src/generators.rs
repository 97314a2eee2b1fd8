//! Seeded random digraph ensembles and deterministic fixtures.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::Serialize;

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::law::DegreeLaw;
use crate::rng::rng_from_seed;

/// Directed Erdős–Rényi digraph: each ordered pair `(u, v)`, `u != v`, is an
/// edge independently with probability `lambda / n`.
///
/// The `n(n-1)` ordered pairs are enumerated by index and the gaps between
/// successive edges are drawn from a geometric law, so the expected cost is
/// `O(n + lambda n)`.
pub fn gen_directed_er(n: usize, lambda: f64, seed: u64) -> Result<Digraph> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::Parameter(format!(
            "lambda must be nonnegative, got {lambda}"
        )));
    }
    let p = lambda / n as f64;
    if p > 1.0 {
        return Err(Error::Parameter(format!("lambda/n = {p} exceeds 1")));
    }
    let total = n as u64 * (n as u64 - 1);
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity((lambda * n as f64 * 1.1) as usize + 16);
    let decode = |idx: u64| {
        let u = idx / (n as u64 - 1);
        let w = idx % (n as u64 - 1);
        let v = if w >= u { w + 1 } else { w };
        (u as u32, v as u32)
    };
    if p == 0.0 || total == 0 {
        // no edges
    } else if p >= 1.0 {
        edges.extend((0..total).map(decode));
    } else {
        let mut rng = rng_from_seed(seed);
        let log_q = (-p).ln_1p();
        let mut idx: u64 = 0;
        loop {
            let u: f64 = rng.random();
            let skip = ((-u).ln_1p() / log_q).floor();
            if skip >= (total - idx) as f64 {
                break;
            }
            idx += skip as u64;
            edges.push(decode(idx));
            idx += 1;
            if idx >= total {
                break;
            }
        }
    }
    Ok(Digraph::from_u32_unchecked(n, edges.iter().copied()))
}

/// Directed configuration model: a uniform matching of out-stubs to in-stubs.
/// Self-loops and repeated edges are kept.
pub fn gen_directed_cm(in_degrees: &[u32], out_degrees: &[u32], seed: u64) -> Result<Digraph> {
    if in_degrees.len() != out_degrees.len() {
        return Err(Error::Parameter(format!(
            "degree lists differ in length: {} in, {} out",
            in_degrees.len(),
            out_degrees.len()
        )));
    }
    let in_sum: u64 = in_degrees.iter().map(|&d| d as u64).sum();
    let out_sum: u64 = out_degrees.iter().map(|&d| d as u64).sum();
    if in_sum != out_sum {
        return Err(Error::StubMismatch { in_sum, out_sum });
    }
    let mut in_stubs: Vec<u32> = Vec::with_capacity(in_sum as usize);
    for (v, &d) in in_degrees.iter().enumerate() {
        in_stubs.extend(std::iter::repeat_n(v as u32, d as usize));
    }
    let mut rng = rng_from_seed(seed);
    in_stubs.shuffle(&mut rng);
    let out_stubs = out_degrees
        .iter()
        .enumerate()
        .flat_map(|(u, &d)| std::iter::repeat_n(u as u32, d as usize));
    let edges: Vec<(u32, u32)> = out_stubs.zip(in_stubs).collect();
    Ok(Digraph::from_u32_unchecked(
        in_degrees.len(),
        edges.iter().copied(),
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeSequence {
    pub in_degrees: Vec<u32>,
    pub out_degrees: Vec<u32>,
    /// Unit increments applied to balance the stub counts.
    pub repairs: u64,
}

/// `n` i.i.d. draws from `law`. When the in- and out-stub totals disagree, the
/// smaller side is raised one unit at a time on uniformly chosen vertices.
pub fn sample_degree_sequence(law: &DegreeLaw, n: usize, seed: u64) -> DegreeSequence {
    let mut rng = rng_from_seed(seed);
    let mut in_degrees = Vec::with_capacity(n);
    let mut out_degrees = Vec::with_capacity(n);
    for _ in 0..n {
        let (j, k) = law.sample(&mut rng);
        in_degrees.push(j);
        out_degrees.push(k);
    }
    let in_sum: u64 = in_degrees.iter().map(|&d| d as u64).sum();
    let out_sum: u64 = out_degrees.iter().map(|&d| d as u64).sum();
    let (smaller, deficit) = if in_sum < out_sum {
        (&mut in_degrees, out_sum - in_sum)
    } else {
        (&mut out_degrees, in_sum - out_sum)
    };
    if n > 0 {
        for _ in 0..deficit {
            let v = rng.random_range(0..n);
            smaller[v] += 1;
        }
    }
    DegreeSequence {
        in_degrees,
        out_degrees,
        repairs: if n > 0 { deficit } else { 0 },
    }
}

/// Deterministic digraphs with hand-checkable structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Fixture {
    /// `k` directed cycles of `blob` vertices, blob `i` linked to blob `i+1`
    /// by one edge: a chain of SCCs with a linear in/out-component but no
    /// large SCC.
    SccChain {
        k: usize,
        blob: usize,
    },
    DirectedCycle {
        n: usize,
    },
    DirectedPath {
        n: usize,
    },
    /// Edges `i -> j` for all `i < j`.
    DagComplete {
        n: usize,
    },
    /// `a` IN vertices each pointing into a directed `b`-cycle, which points to
    /// `c` OUT vertices. Vertex order: IN, cycle, OUT.
    BowtieExemplar {
        a: usize,
        b: usize,
        c: usize,
    },
}

impl Fixture {
    /// `name` plus positional integer parameters, e.g. `("scc-chain", [3, 2])`.
    pub fn parse(name: &str, params: &[usize]) -> Result<Self> {
        let want = |count: usize| -> Result<()> {
            if params.len() == count {
                Ok(())
            } else {
                Err(Error::Parameter(format!(
                    "fixture `{name}` takes {count} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let f = match name {
            "scc-chain" => {
                want(2)?;
                Fixture::SccChain {
                    k: params[0],
                    blob: params[1],
                }
            }
            "directed-cycle" => {
                want(1)?;
                Fixture::DirectedCycle { n: params[0] }
            }
            "directed-path" => {
                want(1)?;
                Fixture::DirectedPath { n: params[0] }
            }
            "dag-complete" => {
                want(1)?;
                Fixture::DagComplete { n: params[0] }
            }
            "bowtie-exemplar" => {
                want(3)?;
                Fixture::BowtieExemplar {
                    a: params[0],
                    b: params[1],
                    c: params[2],
                }
            }
            other => return Err(Error::UnknownFixture(other.to_string())),
        };
        Ok(f)
    }

    pub fn build(&self) -> Result<Digraph> {
        let mut edges = Vec::new();
        let n = match *self {
            Fixture::SccChain { k, blob } => {
                positive(&[k, blob])?;
                for i in 0..k {
                    push_cycle(&mut edges, i * blob, blob);
                    if i + 1 < k {
                        edges.push((i * blob, (i + 1) * blob));
                    }
                }
                k * blob
            }
            Fixture::DirectedCycle { n } => {
                positive(&[n])?;
                push_cycle(&mut edges, 0, n);
                n
            }
            Fixture::DirectedPath { n } => {
                positive(&[n])?;
                edges.extend((1..n).map(|i| (i - 1, i)));
                n
            }
            Fixture::DagComplete { n } => {
                positive(&[n])?;
                for i in 0..n {
                    edges.extend((i + 1..n).map(|j| (i, j)));
                }
                n
            }
            Fixture::BowtieExemplar { a, b, c } => {
                positive(&[b])?;
                push_cycle(&mut edges, a, b);
                edges.extend((0..a).map(|i| (i, a + i % b)));
                edges.extend((0..c).map(|i| (a + i % b, a + b + i)));
                a + b + c
            }
        };
        Digraph::new(n, &edges)
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Fixture::SccChain { k, blob } => write!(f, "scc-chain({k},{blob})"),
            Fixture::DirectedCycle { n } => write!(f, "directed-cycle({n})"),
            Fixture::DirectedPath { n } => write!(f, "directed-path({n})"),
            Fixture::DagComplete { n } => write!(f, "dag-complete({n})"),
            Fixture::BowtieExemplar { a, b, c } => write!(f, "bowtie-exemplar({a},{b},{c})"),
        }
    }
}

fn positive(values: &[usize]) -> Result<()> {
    if values.iter().all(|&v| v >= 1) {
        Ok(())
    } else {
        Err(Error::Parameter("fixture sizes must be at least 1".into()))
    }
}

/// Directed cycle on `start..start+len`; a single vertex gets a self-loop.
fn push_cycle(edges: &mut Vec<(usize, usize)>, start: usize, len: usize) {
    for i in 0..len {
        edges.push((start + i, start + (i + 1) % len));
    }
}

/// Model half of a [`GeneratorSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Er {
        lambda: f64,
    },
    /// Configuration model on an i.i.d. degree sequence from `law`. With
    /// `simple`, self-loops and repeated edges are erased after matching.
    Cm {
        law: DegreeLaw,
        simple: bool,
    },
    Fixture(Fixture),
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Er { lambda } => write!(f, "er(lambda={lambda})"),
            Model::Cm { law, simple } => {
                let tag = if *simple { "cm-simple" } else { "cm" };
                match law.kind() {
                    crate::law::LawKind::Poisson { lambda } => write!(f, "{tag}(poisson:{lambda})"),
                    crate::law::LawKind::Regular { d } => write!(f, "{tag}(regular:{d})"),
                    crate::law::LawKind::Explicit => write!(f, "{tag}(explicit)"),
                }
            }
            Model::Fixture(fx) => write!(f, "{fx}"),
        }
    }
}

impl Model {
    /// `er:LAMBDA`, `cm:LAW`, `cm-simple:LAW` or `fixture:NAME[:P1[:P2...]]`,
    /// where `LAW` is anything [`DegreeLaw::parse`] accepts.
    pub fn parse(spec: &str) -> Result<Self> {
        let (tag, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::Parameter(format!("model `{spec}` needs the form TAG:ARGS")))?;
        match tag {
            "er" => {
                let lambda = rest
                    .parse()
                    .map_err(|_| Error::Parameter(format!("bad ER rate `{rest}`")))?;
                Ok(Model::Er { lambda })
            }
            "cm" | "cm-simple" => Ok(Model::Cm {
                law: DegreeLaw::parse(rest)?,
                simple: tag == "cm-simple",
            }),
            "fixture" => {
                let mut parts = rest.split(':');
                let name = parts.next().unwrap_or_default();
                let params = parts
                    .map(|p| {
                        p.parse()
                            .map_err(|_| Error::Parameter(format!("bad fixture parameter `{p}`")))
                    })
                    .collect::<Result<Vec<usize>>>()?;
                Ok(Model::Fixture(Fixture::parse(name, &params)?))
            }
            other => Err(Error::Parameter(format!("unknown model `{other}`"))),
        }
    }

    /// Degree law of the tree-like local limit, when the model has one.
    pub fn limit_law(&self) -> Option<DegreeLaw> {
        match self {
            Model::Er { lambda } if *lambda > 0.0 => DegreeLaw::poisson(*lambda).ok(),
            Model::Cm { law, .. } => Some(law.clone()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub model: Model,
    /// Ignored by fixtures, whose size follows from their parameters.
    pub n: usize,
    pub seed: u64,
}

/// A generated digraph plus what the generator had to adjust.
#[derive(Debug, Clone)]
pub struct Generated {
    pub graph: Digraph,
    pub degree_repairs: u64,
    pub erased_edges: usize,
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<Generated> {
        if self.n == 0 {
            return Err(Error::Parameter("n must be at least 1".into()));
        }
        match &self.model {
            Model::Er { lambda } => Ok(Generated {
                graph: gen_directed_er(self.n, *lambda, self.seed)?,
                degree_repairs: 0,
                erased_edges: 0,
            }),
            Model::Cm { law, simple } => {
                // Separate streams for the degree draws and the matching.
                let seq =
                    sample_degree_sequence(law, self.n, crate::rng::replicate_seed(self.seed, 0));
                let g = gen_directed_cm(
                    &seq.in_degrees,
                    &seq.out_degrees,
                    crate::rng::replicate_seed(self.seed, 1),
                )?;
                let (graph, erased_edges) = if *simple { g.simplify() } else { (g, 0) };
                Ok(Generated {
                    graph,
                    degree_repairs: seq.repairs,
                    erased_edges,
                })
            }
            Model::Fixture(fx) => Ok(Generated {
                graph: fx.build()?,
                degree_repairs: 0,
                erased_edges: 0,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scc::SccDecomposition;

    #[test]
    fn model_strings() {
        assert_eq!(Model::parse("er:2").unwrap(), Model::Er { lambda: 2.0 });
        assert!(matches!(
            Model::parse("cm-simple:regular:2").unwrap(),
            Model::Cm { simple: true, .. }
        ));
        assert_eq!(
            Model::parse("fixture:scc-chain:3:5").unwrap(),
            Model::Fixture(Fixture::SccChain { k: 3, blob: 5 })
        );
        assert!(Model::parse("er").is_err());
        assert!(Model::parse("ba:3").is_err());
        assert!(Model::parse("fixture:scc-chain:x").is_err());
        assert!(Model::parse("fixture:scc-chain:3:5")
            .unwrap()
            .limit_law()
            .is_none());
    }

    #[test]
    fn er_zero_lambda_is_empty() {
        let g = gen_directed_er(50, 0.0, 1).unwrap();
        assert_eq!(g.m(), 0);
    }

    #[test]
    fn er_rejects_dense() {
        assert!(gen_directed_er(3, 4.0, 1).is_err());
        assert!(gen_directed_er(3, -1.0, 1).is_err());
    }

    #[test]
    fn er_full_when_p_is_one() {
        let g = gen_directed_er(4, 4.0, 1).unwrap();
        assert_eq!(g.m(), 12);
        assert!(g.edges().all(|(u, v)| u != v));
    }

    #[test]
    fn er_never_self_loops() {
        let g = gen_directed_er(200, 20.0, 9).unwrap();
        assert!(g.edges().all(|(u, v)| u != v));
    }

    #[test]
    fn er_is_deterministic() {
        assert_eq!(
            gen_directed_er(1000, 2.0, 5).unwrap(),
            gen_directed_er(1000, 2.0, 5).unwrap()
        );
        assert_ne!(
            gen_directed_er(1000, 2.0, 5).unwrap(),
            gen_directed_er(1000, 2.0, 6).unwrap()
        );
    }

    #[test]
    fn cm_two_vertices() {
        let g = gen_directed_cm(&[1, 1], &[1, 1], 7).unwrap();
        for v in 0..2 {
            assert_eq!((g.in_degree(v), g.out_degree(v)), (1, 1));
        }
    }

    #[test]
    fn cm_stub_mismatch_reports_sums() {
        match gen_directed_cm(&[1, 2], &[1, 1], 0).unwrap_err() {
            Error::StubMismatch { in_sum, out_sum } => assert_eq!((in_sum, out_sum), (3, 2)),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn cm_permutation_is_union_of_cycles() {
        let ones = vec![1u32; 100];
        let g = gen_directed_cm(&ones, &ones, 11).unwrap();
        let scc = SccDecomposition::new(&g);
        assert_eq!(scc.sizes().iter().sum::<usize>(), 100);
        for v in 0..100 {
            assert_eq!((g.in_degree(v), g.out_degree(v)), (1, 1));
        }
    }

    #[test]
    fn regular_sequence_needs_no_repair() {
        let seq = sample_degree_sequence(&DegreeLaw::regular(2), 1000, 3);
        assert_eq!(seq.repairs, 0);
        assert!(seq
            .in_degrees
            .iter()
            .chain(&seq.out_degrees)
            .all(|&d| d == 2));
    }

    #[test]
    fn repaired_sequence_balances() {
        let law = DegreeLaw::explicit([((1, 0), 0.5), ((0, 1), 0.5)]).unwrap();
        let seq = sample_degree_sequence(&law, 10_000, 8);
        let si: u32 = seq.in_degrees.iter().sum();
        let so: u32 = seq.out_degrees.iter().sum();
        assert_eq!(si, so);
    }

    #[test]
    fn fixtures() {
        let g = Fixture::parse("scc-chain", &[3, 2])
            .unwrap()
            .build()
            .unwrap();
        assert_eq!((g.n(), g.m()), (6, 8));
        let s = SccDecomposition::new(&Fixture::DirectedCycle { n: 5 }.build().unwrap());
        assert_eq!(s.count(), 1);
        let s = SccDecomposition::new(&Fixture::DirectedPath { n: 4 }.build().unwrap());
        assert_eq!(s.count(), 4);
        let g = Fixture::DagComplete { n: 4 }.build().unwrap();
        assert_eq!(g.m(), 6);
        assert!(matches!(
            Fixture::parse("petersen", &[]),
            Err(Error::UnknownFixture(_))
        ));
        assert!(Fixture::parse("directed-cycle", &[1, 2]).is_err());
    }

    #[test]
    fn simple_cm_records_erasures() {
        let spec = GeneratorSpec {
            model: Model::Cm {
                law: DegreeLaw::regular(3),
                simple: true,
            },
            n: 50,
            seed: 2,
        };
        let out = spec.generate().unwrap();
        assert_eq!(out.graph.m() + out.erased_edges, 150);
        let (_, again) = out.graph.simplify();
        assert_eq!(again, 0);
    }
}
