//! Directed Chinese Postman solver.
//!
//! The pipeline is the classic one for the directed case:
//!
//! 1. vertex imbalance `in-degree - out-degree`;
//! 2. all-pairs shortest paths (Floyd-Warshall, first-hop edge recorded);
//! 3. a min-cost transportation from vertices with surplus arrivals to
//!    vertices with surplus departures, solved by successive shortest paths;
//! 4. every shortest path chosen by the transportation is duplicated;
//! 5. the now Eulerian multigraph is walked from home by Hierholzer;
//! 6. the closed tour is cut at reset edges into test paths.
//!
//! Ties always go to the lowest edge index in declaration order, so the
//! same graph always yields the same tour.

use serde::Serialize;
use thiserror::Error;

use crate::navgraph::{is_strongly_connected, path_set_cost, EdgeId, GraphError, Multidigraph, Path};
use crate::scalar::Weight;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CppError {
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("edge `{0}` has a negative weight")]
    NegativeWeight(EdgeId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CppSolution<W> {
    /// Closed walk from home, reset edges included.
    pub tour: Vec<EdgeId>,
    /// Tour cut at reset edges, in order of first appearance.
    pub paths: Vec<Path<W>>,
    pub total_cost: W,
}

/// Floyd-Warshall distances plus the first edge of each shortest path.
struct ShortestPaths<W> {
    n: usize,
    dist: Vec<Option<W>>,
    first_hop: Vec<Option<usize>>,
}

impl<W: Weight> ShortestPaths<W> {
    fn compute(g: &Multidigraph<W>) -> Self {
        let n = g.vertex_count();
        let mut dist: Vec<Option<W>> = vec![None; n * n];
        let mut first_hop = vec![None; n * n];
        for v in 0..n {
            dist[v * n + v] = Some(W::zero());
        }
        for (e, (u, v)) in g.endpoints().into_iter().enumerate() {
            if u == v {
                continue;
            }
            let w = &g.edges()[e].weight;
            let better = match &dist[u * n + v] {
                None => true,
                Some(d) => w < d,
            };
            if better {
                dist[u * n + v] = Some(w.clone());
                first_hop[u * n + v] = Some(e);
            }
        }
        for k in 0..n {
            for i in 0..n {
                let Some(ik) = dist[i * n + k].clone() else { continue };
                for j in 0..n {
                    let Some(kj) = &dist[k * n + j] else { continue };
                    let cand = ik.clone() + kj.clone();
                    let better = match &dist[i * n + j] {
                        None => true,
                        Some(d) => cand < *d,
                    };
                    if better {
                        dist[i * n + j] = Some(cand);
                        first_hop[i * n + j] = first_hop[i * n + k];
                    }
                }
            }
        }
        Self { n, dist, first_hop }
    }

    fn cost(&self, u: usize, v: usize) -> Option<&W> {
        self.dist[u * self.n + v].as_ref()
    }

    /// Edge indices of the recorded shortest path `u -> v`.
    fn edges(&self, g: &Multidigraph<W>, ends: &[(usize, usize)], u: usize, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut at = u;
        while at != v {
            let e = self.first_hop[at * self.n + v].expect("target reachable");
            out.push(e);
            at = ends[e].1;
            assert!(out.len() <= g.vertex_count(), "shortest path reconstruction looped");
        }
        out
    }
}

#[derive(Debug, Clone)]
struct FlowArc<W> {
    to: usize,
    cap: i64,
    cost: W,
}

/// Successive-shortest-path min-cost flow with Bellman-Ford searches.
/// Networks here are tiny (one node per imbalanced vertex).
struct MinCostFlow<W> {
    arcs: Vec<FlowArc<W>>,
    adj: Vec<Vec<usize>>,
}

impl<W: Weight> MinCostFlow<W> {
    fn new(nodes: usize) -> Self {
        Self { arcs: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: i64, cost: W) -> usize {
        let id = self.arcs.len();
        self.arcs.push(FlowArc { to, cap, cost: cost.clone() });
        self.adj[from].push(id);
        self.arcs.push(FlowArc { to: from, cap: 0, cost: -cost });
        self.adj[to].push(id + 1);
        id
    }

    fn flow_on(&self, arc: usize) -> i64 {
        self.arcs[arc + 1].cap
    }

    fn run(&mut self, source: usize, sink: usize) -> i64 {
        let n = self.adj.len();
        let mut total = 0;
        loop {
            let mut dist: Vec<Option<W>> = vec![None; n];
            let mut via: Vec<Option<usize>> = vec![None; n];
            dist[source] = Some(W::zero());
            for _ in 0..n {
                let mut changed = false;
                for u in 0..n {
                    let Some(du) = dist[u].clone() else { continue };
                    for &a in &self.adj[u] {
                        let arc = &self.arcs[a];
                        if arc.cap <= 0 {
                            continue;
                        }
                        let cand = du.clone() + arc.cost.clone();
                        let better = match &dist[arc.to] {
                            None => true,
                            Some(d) => cand < *d,
                        };
                        if better {
                            dist[arc.to] = Some(cand);
                            via[arc.to] = Some(a);
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            if dist[sink].is_none() {
                return total;
            }
            let mut push = i64::MAX;
            let mut at = sink;
            while at != source {
                let a = via[at].unwrap();
                push = push.min(self.arcs[a].cap);
                at = self.arcs[a ^ 1].to;
            }
            let mut at = sink;
            while at != source {
                let a = via[at].unwrap();
                self.arcs[a].cap -= push;
                self.arcs[a ^ 1].cap += push;
                at = self.arcs[a ^ 1].to;
            }
            total += push;
        }
    }
}

/// Number of times each edge must be traversed by an optimal tour.
fn traversal_counts<W: Weight>(g: &Multidigraph<W>) -> Vec<usize> {
    let n = g.vertex_count();
    let ends = g.endpoints();
    let mut delta = vec![0i64; n];
    for &(u, v) in &ends {
        delta[v] += 1;
        delta[u] -= 1;
    }
    let mut counts = vec![1usize; ends.len()];

    let surplus: Vec<usize> = (0..n).filter(|&v| delta[v] > 0).collect();
    let deficit: Vec<usize> = (0..n).filter(|&v| delta[v] < 0).collect();
    if surplus.is_empty() {
        return counts;
    }

    let sp = ShortestPaths::compute(g);
    let source = 0;
    let sink = 1 + surplus.len() + deficit.len();
    let mut mcf = MinCostFlow::new(sink + 1);
    for (i, &s) in surplus.iter().enumerate() {
        mcf.add_arc(source, 1 + i, delta[s], W::zero());
    }
    let mut pairs = Vec::new();
    for (i, &s) in surplus.iter().enumerate() {
        for (j, &t) in deficit.iter().enumerate() {
            let cost = sp.cost(s, t).expect("strongly connected").clone();
            let arc = mcf.add_arc(1 + i, 1 + surplus.len() + j, i64::MAX / 4, cost);
            pairs.push((arc, s, t));
        }
    }
    for (j, &t) in deficit.iter().enumerate() {
        mcf.add_arc(1 + surplus.len() + j, sink, -delta[t], W::zero());
    }
    let shipped = mcf.run(source, sink);
    debug_assert_eq!(shipped, surplus.iter().map(|&s| delta[s]).sum::<i64>());

    for (arc, s, t) in pairs {
        let f = mcf.flow_on(arc);
        if f > 0 {
            for e in sp.edges(g, &ends, s, t) {
                counts[e] += f as usize;
            }
        }
    }
    counts
}

/// Hierholzer's algorithm over the multigraph where edge `e` occurs
/// `counts[e]` times. Out-edges are taken lowest index first.
fn euler_circuit<W: Weight>(g: &Multidigraph<W>, counts: &[usize]) -> Vec<usize> {
    let ends = g.endpoints();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    for (e, &(u, _)) in ends.iter().enumerate() {
        adj[u].extend(std::iter::repeat_n(e, counts[e]));
    }
    let mut next = vec![0usize; adj.len()];
    let mut stack: Vec<(usize, Option<usize>)> = vec![(g.home_index(), None)];
    let mut circuit = Vec::with_capacity(counts.iter().sum());
    while let Some(&(v, via)) = stack.last() {
        if next[v] < adj[v].len() {
            let e = adj[v][next[v]];
            next[v] += 1;
            stack.push((ends[e].1, Some(e)));
        } else {
            stack.pop();
            if let Some(e) = via {
                circuit.push(e);
            }
        }
    }
    circuit.reverse();
    circuit
}

/// Minimum-cost closed tour from home covering every edge at least once.
pub fn solve_cpp<W: Weight>(g: &Multidigraph<W>) -> Result<CppSolution<W>, CppError> {
    if let Some(e) = g.edges().iter().find(|e| e.weight.is_negative_weight()) {
        return Err(CppError::NegativeWeight(e.id.clone()));
    }
    if !is_strongly_connected(g) {
        return Err(CppError::NotStronglyConnected);
    }
    let counts = traversal_counts(g);
    let circuit = euler_circuit(g, &counts);
    assert_eq!(circuit.len(), counts.iter().sum::<usize>(), "multigraph was not Eulerian");

    let tour: Vec<EdgeId> = circuit.iter().map(|&e| g.edges()[e].id.clone()).collect();
    let paths = tour_to_paths(&tour, g)?;
    let total_cost = path_set_cost(&paths);
    Ok(CppSolution { tour, paths, total_cost })
}

/// Cuts a walk from home at every reset edge. Empty segments are dropped.
pub fn tour_to_paths<W: Weight>(tour: &[EdgeId], g: &Multidigraph<W>) -> Result<Vec<Path<W>>, GraphError> {
    let mut edges = Vec::with_capacity(tour.len());
    for id in tour {
        edges.push(g.edge(id.as_str()).ok_or_else(|| GraphError::UnknownEdge(id.clone()))?);
    }
    if let Some(first) = edges.first() {
        if &first.from != g.home() {
            return Err(GraphError::DoesNotStartAtHome(first.id.clone()));
        }
    }
    if let Some(k) = edges.windows(2).position(|w| w[0].to != w[1].from) {
        return Err(GraphError::NotAWalk { position: k });
    }

    let mut paths = Vec::new();
    let mut segment: Vec<EdgeId> = Vec::new();
    for e in edges {
        if e.is_reset() {
            if !segment.is_empty() {
                paths.push(g.path(std::mem::take(&mut segment))?);
            }
        } else {
            segment.push(e.id.clone());
        }
    }
    if !segment.is_empty() {
        paths.push(g.path(segment)?);
    }
    Ok(paths)
}
