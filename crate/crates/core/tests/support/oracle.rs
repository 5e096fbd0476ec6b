//! Brute-force reference for the postman tour, shared by test targets.
//!
//! The cheapest closed walk from home that uses every edge is a shortest
//! path in the product of vertices and covered-edge sets, found here with
//! Dijkstra. Exponential in the edge count, so only for tiny graphs.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use navtest::navgraph::{is_strongly_connected, Multidigraph};
use navtest::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn min_covering_walk_cost(g: &Multidigraph<Rational>) -> Option<Rational> {
    let m = g.edges().len();
    assert!(m <= 16, "oracle is exponential in the edge count");
    let ends = g.endpoints();
    let home = g.home_index();
    let full = (1u32 << m) - 1;
    let mut best: HashMap<(usize, u32), Rational> = HashMap::new();
    let mut heap = BinaryHeap::new();
    best.insert((home, 0), Rational::from_integer(0));
    heap.push(Reverse((Rational::from_integer(0), home, 0u32)));
    while let Some(Reverse((d, v, mask))) = heap.pop() {
        if best.get(&(v, mask)).is_some_and(|b| *b < d) {
            continue;
        }
        if v == home && mask == full {
            return Some(d);
        }
        for (k, &(from, to)) in ends.iter().enumerate() {
            if from != v {
                continue;
            }
            let nd = d + g.edges()[k].weight;
            let key = (to, mask | (1 << k));
            if best.get(&key).is_none_or(|b| nd < *b) {
                best.insert(key, nd);
                heap.push(Reverse((nd, key.0, key.1)));
            }
        }
    }
    None
}

/// `count` strongly connected multidigraphs with 1 to `max_edges` edges,
/// weights drawn from {0, 1/2, 1, 3/2, 2, 3}, loops and parallels allowed.
pub fn random_strong_graphs(seed: u64, count: usize, max_edges: usize) -> Vec<Multidigraph<Rational>> {
    let weights = [(0, 1), (1, 2), (1, 1), (3, 2), (2, 1), (3, 1)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.random_range(1..=4usize);
        let m = rng.random_range(1..=max_edges);
        let mut b = Multidigraph::<Rational>::builder("v0");
        for e in 0..m {
            let (num, den) = weights[rng.random_range(0..weights.len())];
            let from = rng.random_range(0..n);
            let to = rng.random_range(0..n);
            b = b.edge(format!("E{e}"), format!("v{from}"), format!("v{to}"), Rational::new(num, den));
        }
        let g = b.build().expect("fresh ids");
        if is_strongly_connected(&g) {
            out.push(g);
        }
    }
    out
}
