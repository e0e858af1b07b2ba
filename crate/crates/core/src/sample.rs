//! Seeded random instances for verification suites and randomized probes.
//!
//! Everything here is deterministic given the caller's RNG, so test
//! failures reproduce from a seed.

use num_traits::{Signed, Zero};
use rand::Rng;

use crate::dominance::{feasibility_network, flow_from_edge_arcs};
use crate::flow::Flow;
use crate::graph::{Digraph, PartialOrderRelation};
use crate::measure::{Measure, SignedMeasure};
use crate::num::{rat, ratio, Rat};

pub fn vertex_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Random DAG on `n` labelled vertices: each forward pair becomes an edge
/// with probability `p`.
pub fn random_dag<R: Rng>(rng: &mut R, n: usize, p: f64) -> Digraph {
    let vs = vertex_labels(n);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(p) {
                edges.push((vs[i].clone(), vs[j].clone()));
            }
        }
    }
    Digraph::new(vs, edges).expect("generated edges are valid")
}

/// Random poset: the order induced by a random DAG.
pub fn random_poset<R: Rng>(rng: &mut R, n: usize, p: f64) -> PartialOrderRelation {
    PartialOrderRelation::from_digraph(&random_dag(rng, n, p)).expect("DAG induces a poset")
}

/// Random probability measure with small-denominator rational weights.
pub fn random_probability_measure<R: Rng>(rng: &mut R, domain: &[String]) -> Measure {
    let raw: Vec<i64> = (0..domain.len()).map(|_| rng.gen_range(0..=4)).collect();
    let mut total: i64 = raw.iter().sum();
    let mut raw = raw;
    if total == 0 {
        raw[rng.gen_range(0..domain.len())] = 1;
        total = 1;
    }
    Measure::new(
        domain
            .iter()
            .zip(raw)
            .map(|(v, w)| (v.clone(), ratio(w, total))),
    )
    .expect("weights are nonnegative")
}

/// Random acyclic flow with small rational edge values.
pub fn random_acyclic_flow<R: Rng>(rng: &mut R, n: usize, p: f64) -> Flow {
    let dg = random_dag(rng, n, p);
    let values: Vec<(String, String, Rat)> = dg
        .edges()
        .iter()
        .map(|&(i, j)| {
            (
                dg.vertex_name(i).to_owned(),
                dg.vertex_name(j).to_owned(),
                ratio(rng.gen_range(0..=5), rng.gen_range(1..=3)),
            )
        })
        .collect();
    Flow::new(dg, values).expect("generated values are nonnegative")
}

/// Random acyclic flow together with an admissible probability `mu1`
/// (so `mu2 = mu1 - div Q` is nonnegative); the flow is rescaled by the
/// same factor as the measure.
pub fn random_flow_with_admissible_mu1<R: Rng>(
    rng: &mut R,
    n: usize,
    p: f64,
) -> (Flow, Measure) {
    let q = random_acyclic_flow(rng, n, p);
    let div = q.divergence();
    let domain = q.digraph().vertices().to_vec();
    let mut weights: Vec<Rat> = domain
        .iter()
        .map(|v| {
            let base = if div.get(v).is_positive() {
                div.get(v)
            } else {
                Rat::zero()
            };
            base + rat(rng.gen_range(0..=3))
        })
        .collect();
    let mut total: Rat = weights.iter().sum();
    if total.is_zero() {
        weights[0] = rat(1);
        total = rat(1);
    }
    let mu1 = Measure::new(
        domain
            .iter()
            .cloned()
            .zip(weights.into_iter().map(|w| w / &total)),
    )
    .expect("weights are nonnegative");
    let scaled_values: Vec<(String, String, Rat)> = q
        .iter_named()
        .map(|(a, b, v)| (a.to_owned(), b.to_owned(), v / &total))
        .collect();
    let scaled = Flow::new(q.digraph().clone(), scaled_values).expect("scaled values nonnegative");
    (scaled, mu1)
}

/// A random flow on `hasse` with divergence `d`, or `None` when infeasible.
/// Different RNG states explore different feasible flows; occasionally two
/// independent solutions are mixed by a random rational convex combination.
pub fn random_feasible_flow<R: Rng>(
    hasse: &Digraph,
    d: &SignedMeasure,
    rng: &mut R,
) -> Option<Flow> {
    let one_sample = |rng: &mut R| -> Option<Flow> {
        let (mut net, s, t, supply, edge_arcs) = feasibility_network(hasse, d);
        net.shuffle_adjacency(rng);
        let value = net.max_flow(s, t);
        if value != supply {
            return None;
        }
        Some(flow_from_edge_arcs(hasse, &net, &edge_arcs))
    };
    let a = one_sample(rng)?;
    if rng.gen_bool(0.5) {
        return Some(a);
    }
    let b = one_sample(rng)?;
    let k = rat(rng.gen_range(1..=7));
    let lambda = k / rat(8);
    let complement = rat(1) - &lambda;
    let mixed_values: Vec<(String, String, Rat)> = a
        .iter_named()
        .map(|(x, y, w)| {
            (
                x.to_owned(),
                y.to_owned(),
                w * &lambda + b.value_named(x, y) * &complement,
            )
        })
        .collect();
    Some(Flow::new(hasse.clone(), mixed_values).expect("convex mix stays nonnegative"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::difference;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn probability_measures_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let domain = vertex_labels(6);
        for _ in 0..50 {
            let m = random_probability_measure(&mut rng, &domain);
            assert!(m.is_probability());
        }
    }

    #[test]
    fn admissible_pairs_have_nonnegative_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        for _ in 0..50 {
            let (q, mu1) = random_flow_with_admissible_mu1(&mut rng, 7, 0.4);
            assert!(mu1.is_probability());
            let div = q.divergence();
            for v in q.digraph().vertices() {
                assert!(!(mu1.get(v) - div.get(v)).is_negative());
            }
        }
    }

    #[test]
    fn feasible_flows_have_requested_divergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for _ in 0..40 {
            let dag = random_dag(&mut rng, 6, 0.45);
            let domain = dag.vertices().to_vec();
            let m1 = random_probability_measure(&mut rng, &domain);
            let m2 = random_probability_measure(&mut rng, &domain);
            let d = difference(&m1, &m2).unwrap();
            if let Some(q) = random_feasible_flow(&dag, &d, &mut rng) {
                let have = q.divergence();
                for v in &domain {
                    assert_eq!(have.get(v), d.get(v));
                }
            }
        }
    }
}
