//! Weighted multidigraphs of navigation models.
//!
//! Vertices are pages, edges are links. Parallel edges and self-loops are
//! allowed and edges are identified by their [`EdgeId`], never by their
//! endpoints. Reset edges are virtual zero-cost links from leaf pages back
//! to the home page; they make the graph strongly connected and act as
//! path separators in tours.

mod edgelist;

use std::borrow::Borrow;
use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{sum_weights, Weight};

pub use edgelist::{parse_edge_list, to_edge_list};

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }
    };
}

string_id!(
    /// Opaque, case-sensitive page identifier.
    VertexId
);
string_id!(
    /// Opaque, case-sensitive link label.
    EdgeId
);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Real,
    Reset,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge<W> {
    pub id: EdgeId,
    pub from: VertexId,
    pub to: VertexId,
    pub weight: W,
    pub kind: EdgeKind,
}

impl<W> Edge<W> {
    pub fn is_reset(&self) -> bool {
        self.kind == EdgeKind::Reset
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate edge id `{0}`")]
    DuplicateEdgeId(EdgeId),
    #[error("edge `{0}` has a negative weight")]
    NegativeWeight(EdgeId),
    #[error("reset edge `{0}` does not lead to the home vertex")]
    ResetNotToHome(EdgeId),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(VertexId),
    #[error("unknown edge `{0}`")]
    UnknownEdge(EdgeId),
    #[error("vertex `{0}` is not reachable from home")]
    NotReachableFromHome(VertexId),
    #[error("vertex `{0}` cannot reach home after adding reset edges")]
    NotStronglyConnectedAfterAugmentation(VertexId),
    #[error("edges at positions {position} and {next} are not incident", next = position + 1)]
    NotAWalk { position: usize },
    #[error("walk starts with `{0}`, which does not leave home")]
    DoesNotStartAtHome(EdgeId),
    #[error("reset edge `{0}` cannot be part of a path")]
    ResetInPath(EdgeId),
    #[error("edge list line {line}: {message}")]
    EdgeList { line: usize, message: String },
}

/// Directed graph allowing parallel edges and loops, with a designated
/// home vertex. Immutable once built; see [`GraphBuilder`].
#[derive(Clone, Debug, PartialEq)]
pub struct Multidigraph<W> {
    home: VertexId,
    vertices: Vec<VertexId>,
    vertex_index: HashMap<VertexId, usize>,
    edges: Vec<Edge<W>>,
    edge_index: HashMap<EdgeId, usize>,
}

impl<W: Weight> Multidigraph<W> {
    pub fn builder(home: impl Into<VertexId>) -> GraphBuilder<W> {
        GraphBuilder::new(home)
    }

    pub fn home(&self) -> &VertexId {
        &self.home
    }

    pub fn home_index(&self) -> usize {
        self.vertex_index[&self.home]
    }

    /// Vertices in declaration order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    /// Edges in declaration order. Position in this slice is the edge
    /// index used for every tie-break.
    pub fn edges(&self) -> &[Edge<W>] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge(&self, id: &str) -> Option<&Edge<W>> {
        self.edge_index.get(id).map(|&i| &self.edges[i])
    }

    pub fn edge_position(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    pub fn vertex_position(&self, id: &str) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn contains_vertex(&self, id: &str) -> bool {
        self.vertex_index.contains_key(id)
    }

    pub fn real_edges(&self) -> impl Iterator<Item = &Edge<W>> {
        self.edges.iter().filter(|e| !e.is_reset())
    }

    /// Vertex indices of each edge's endpoints, in edge order.
    pub fn endpoints(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .map(|e| (self.vertex_index[&e.from], self.vertex_index[&e.to]))
            .collect()
    }

    /// Out-edge indices per vertex, ascending.
    pub fn out_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (i, (from, _)) in self.endpoints().into_iter().enumerate() {
            adj[from].push(i);
        }
        adj
    }

    pub fn real_out_degree(&self, v: &str) -> usize {
        self.real_edges().filter(|e| e.from.as_str() == v).count()
    }

    /// Builds a [`Path`] from real edge ids, checking incidence and that it
    /// leaves home.
    pub fn path<I, E>(&self, edges: I) -> Result<Path<W>, GraphError>
    where
        I: IntoIterator<Item = E>,
        E: Into<EdgeId>,
    {
        let ids: Vec<EdgeId> = edges.into_iter().map(Into::into).collect();
        let mut prev: Option<&Edge<W>> = None;
        for (k, id) in ids.iter().enumerate() {
            let edge = self
                .edge(id.as_str())
                .ok_or_else(|| GraphError::UnknownEdge(id.clone()))?;
            if edge.is_reset() {
                return Err(GraphError::ResetInPath(id.clone()));
            }
            match prev {
                None if edge.from != self.home => {
                    return Err(GraphError::DoesNotStartAtHome(id.clone()))
                }
                Some(p) if p.to != edge.from => {
                    return Err(GraphError::NotAWalk { position: k - 1 })
                }
                _ => {}
            }
            prev = Some(edge);
        }
        let cost = sum_weights(ids.iter().map(|id| &self.edge(id.as_str()).unwrap().weight));
        Ok(Path { edges: ids, cost })
    }

    /// Vertices visited by a path, starting at home.
    pub fn vertex_sequence(&self, path: &Path<W>) -> Vec<VertexId> {
        let mut seq = vec![self.home.clone()];
        for id in &path.edges {
            if let Some(e) = self.edge(id.as_str()) {
                seq.push(e.to.clone());
            }
        }
        seq
    }

    fn reachable(&self, reverse: bool) -> Vec<bool> {
        let n = self.vertices.len();
        let mut adj = vec![Vec::new(); n];
        for (from, to) in self.endpoints() {
            if reverse {
                adj[to].push(from);
            } else {
                adj[from].push(to);
            }
        }
        let mut seen = vec![false; n];
        let start = self.home_index();
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Vertices reachable from home, as a mask over [`Self::vertices`].
    pub fn reachable_from_home(&self) -> Vec<bool> {
        self.reachable(false)
    }

    /// Vertices that can reach home, as a mask over [`Self::vertices`].
    pub fn reaching_home(&self) -> Vec<bool> {
        self.reachable(true)
    }
}

/// Incremental constructor for [`Multidigraph`]. Endpoints named by an edge
/// are declared implicitly, in first-mention order.
#[derive(Debug, Clone)]
pub struct GraphBuilder<W> {
    graph: Multidigraph<W>,
    error: Option<GraphError>,
}

impl<W: Weight> GraphBuilder<W> {
    pub fn new(home: impl Into<VertexId>) -> Self {
        let home = home.into();
        let mut graph = Multidigraph {
            home: home.clone(),
            vertices: Vec::new(),
            vertex_index: HashMap::new(),
            edges: Vec::new(),
            edge_index: HashMap::new(),
        };
        graph.vertex_index.insert(home.clone(), 0);
        graph.vertices.push(home);
        Self { graph, error: None }
    }

    pub fn vertex(mut self, id: impl Into<VertexId>) -> Self {
        self.add_vertex(id.into());
        self
    }

    fn add_vertex(&mut self, id: VertexId) {
        if !self.graph.vertex_index.contains_key(&id) {
            self.graph.vertex_index.insert(id.clone(), self.graph.vertices.len());
            self.graph.vertices.push(id);
        }
    }

    fn push(&mut self, edge: Edge<W>) {
        if self.error.is_some() {
            return;
        }
        if self.graph.edge_index.contains_key(&edge.id) {
            self.error = Some(GraphError::DuplicateEdgeId(edge.id));
            return;
        }
        if edge.weight.is_negative_weight() {
            self.error = Some(GraphError::NegativeWeight(edge.id));
            return;
        }
        if edge.is_reset() && edge.to != self.graph.home {
            self.error = Some(GraphError::ResetNotToHome(edge.id));
            return;
        }
        self.add_vertex(edge.from.clone());
        self.add_vertex(edge.to.clone());
        self.graph
            .edge_index
            .insert(edge.id.clone(), self.graph.edges.len());
        self.graph.edges.push(edge);
    }

    pub fn edge(
        mut self,
        id: impl Into<EdgeId>,
        from: impl Into<VertexId>,
        to: impl Into<VertexId>,
        weight: W,
    ) -> Self {
        self.push(Edge {
            id: id.into(),
            from: from.into(),
            to: to.into(),
            weight,
            kind: EdgeKind::Real,
        });
        self
    }

    /// Real edge with the unit weight.
    pub fn link(
        self,
        id: impl Into<EdgeId>,
        from: impl Into<VertexId>,
        to: impl Into<VertexId>,
    ) -> Self {
        self.edge(id, from, to, W::one())
    }

    /// Zero-weight reset edge from `from` back to home.
    pub fn reset_edge(mut self, id: impl Into<EdgeId>, from: impl Into<VertexId>) -> Self {
        let home = self.graph.home.clone();
        self.push(Edge {
            id: id.into(),
            from: from.into(),
            to: home,
            weight: W::zero(),
            kind: EdgeKind::Reset,
        });
        self
    }

    pub fn build(self) -> Result<Multidigraph<W>, GraphError> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(self.graph),
        }
    }
}

/// Walk from home over real edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path<W> {
    edges: Vec<EdgeId>,
    cost: W,
}

impl<W: Weight> Path<W> {
    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn cost(&self) -> &W {
        &self.cost
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.edges.iter().map(EdgeId::as_str).collect()
    }
}

impl<W> fmt::Display for Path<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            f.write_str(e.as_str())?;
        }
        Ok(())
    }
}

fn fresh_reset_id<W: Weight>(g: &Multidigraph<W>, leaf: &VertexId) -> EdgeId {
    let mut id = format!("R@{leaf}");
    while g.edge_index.contains_key(id.as_str()) {
        id.push('\'');
    }
    EdgeId(id)
}

/// Adds one zero-weight reset edge from every leaf (vertex without real
/// out-edges) back to home.
///
/// Leaves that already own a reset edge are left alone, so the operation is
/// idempotent. Fails instead of adding further edges when the result is
/// still not strongly connected.
pub fn make_strongly_connected<W: Weight>(
    g: &Multidigraph<W>,
) -> Result<Multidigraph<W>, GraphError> {
    let reach = g.reachable_from_home();
    if let Some(v) = reach.iter().position(|r| !r) {
        return Err(GraphError::NotReachableFromHome(g.vertices[v].clone()));
    }

    let mut out = g.clone();
    for v in &g.vertices {
        let has_real_out = g.real_edges().any(|e| &e.from == v);
        let has_reset = g.edges.iter().any(|e| e.is_reset() && &e.from == v);
        if has_real_out || has_reset {
            continue;
        }
        let id = fresh_reset_id(&out, v);
        out.edge_index.insert(id.clone(), out.edges.len());
        out.edges.push(Edge {
            id,
            from: v.clone(),
            to: out.home.clone(),
            weight: W::zero(),
            kind: EdgeKind::Reset,
        });
    }

    let back = out.reaching_home();
    if let Some(v) = back.iter().position(|r| !r) {
        return Err(GraphError::NotStronglyConnectedAfterAugmentation(
            out.vertices[v].clone(),
        ));
    }
    Ok(out)
}

/// True iff every vertex reaches every other one.
///
/// Two sweeps suffice: home reaches all vertices, and all vertices reach
/// home (a forward sweep over the transposed graph).
pub fn is_strongly_connected<W: Weight>(g: &Multidigraph<W>) -> bool {
    g.reachable_from_home().into_iter().all(|r| r) && g.reaching_home().into_iter().all(|r| r)
}

pub fn path_set_cost<W: Weight>(paths: &[Path<W>]) -> W {
    sum_weights(paths.iter().map(|p| &p.cost))
}

/// Real edges of `g` that no path traverses, in edge order.
pub fn uncovered_edges<'g, W: Weight>(g: &'g Multidigraph<W>, paths: &[Path<W>]) -> Vec<&'g EdgeId> {
    let used: std::collections::HashSet<&str> = paths
        .iter()
        .flat_map(|p| p.edges.iter().map(EdgeId::as_str))
        .collect();
    g.real_edges()
        .filter(|e| !used.contains(e.id.as_str()))
        .map(|e| &e.id)
        .collect()
}

/// Edge-coverage predicate: every real edge appears in at least one path.
pub fn covers<W: Weight>(g: &Multidigraph<W>, paths: &[Path<W>]) -> bool {
    uncovered_edges(g, paths).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::Rational;

    type G = Multidigraph<Rational>;

    fn one() -> Rational {
        Rational::from_integer(1)
    }

    fn two_cycle() -> G {
        G::builder("home")
            .link("E1", "home", "A")
            .link("E2", "A", "home")
            .build()
            .unwrap()
    }

    #[test]
    fn figure1_gains_four_resets_and_becomes_strong() {
        let g: G = fixtures::figure1();
        assert_eq!(g.edges().len(), 8);
        assert!(!is_strongly_connected(&g));
        let aug = make_strongly_connected(&g).unwrap();
        assert_eq!(aug.edges().len(), 12);
        let resets: Vec<_> = aug.edges().iter().filter(|e| e.is_reset()).collect();
        assert_eq!(resets.len(), 4);
        assert!(resets.iter().all(|e| &e.to == aug.home() && e.weight == Rational::from_integer(0)));
        assert!(is_strongly_connected(&aug));
    }

    #[test]
    fn single_vertex_gets_self_reset() {
        let g = G::builder("home").build().unwrap();
        let aug = make_strongly_connected(&g).unwrap();
        assert_eq!(aug.edges().len(), 1);
        assert_eq!(aug.edges()[0].from.as_str(), "home");
        assert!(is_strongly_connected(&aug));
    }

    #[test]
    fn already_strong_graph_unchanged() {
        let g = two_cycle();
        assert!(is_strongly_connected(&g));
        assert_eq!(make_strongly_connected(&g).unwrap(), g);
    }

    #[test]
    fn leaf_without_return_is_not_strong() {
        let g = G::builder("home").link("E1", "home", "A").build().unwrap();
        assert!(!is_strongly_connected(&g));
    }

    #[test]
    fn unreachable_vertex_is_reported() {
        let g = G::builder("home")
            .link("E1", "home", "A")
            .link("E2", "B", "A")
            .build()
            .unwrap();
        assert_eq!(
            make_strongly_connected(&g),
            Err(GraphError::NotReachableFromHome("B".into()))
        );
    }

    #[test]
    fn trapped_cycle_is_reported() {
        // A and B loop forever without any leaf to reset from.
        let g = G::builder("home")
            .link("E1", "home", "A")
            .link("E2", "A", "B")
            .link("E3", "B", "A")
            .build()
            .unwrap();
        assert_eq!(
            make_strongly_connected(&g),
            Err(GraphError::NotStronglyConnectedAfterAugmentation("A".into()))
        );
    }

    #[test]
    fn builder_rejects_bad_edges() {
        let dup = G::builder("h").link("E", "h", "a").link("E", "a", "h").build();
        assert_eq!(dup, Err(GraphError::DuplicateEdgeId("E".into())));
        let neg = G::builder("h").edge("E", "h", "a", Rational::from_integer(-1)).build();
        assert_eq!(neg, Err(GraphError::NegativeWeight("E".into())));
    }

    #[test]
    fn edge_ids_are_case_sensitive() {
        let g = G::builder("h").link("e1", "h", "a").link("E1", "a", "h").build();
        assert!(g.is_ok());
    }

    #[test]
    fn path_cost_accounting() {
        let g = two_cycle();
        assert_eq!(path_set_cost::<Rational>(&[]), Rational::from_integer(0));
        let p = g.path(["E1"]).unwrap();
        assert_eq!(path_set_cost(std::slice::from_ref(&p)), one());
        let q = g.path(["E1", "E2"]).unwrap();
        assert_eq!(*q.cost(), Rational::from_integer(2));
        assert_eq!(path_set_cost(&[p, q]), Rational::from_integer(3));
    }

    #[test]
    fn path_validation() {
        let g = two_cycle();
        assert_eq!(
            g.path(["E2"]).unwrap_err(),
            GraphError::DoesNotStartAtHome("E2".into())
        );
        assert_eq!(
            g.path(["E1", "E1"]).unwrap_err(),
            GraphError::NotAWalk { position: 0 }
        );
        assert_eq!(g.path(["X"]).unwrap_err(), GraphError::UnknownEdge("X".into()));
        let seq = g.vertex_sequence(&g.path(["E1", "E2"]).unwrap());
        assert_eq!(seq, vec![VertexId::from("home"), "A".into(), "home".into()]);
    }

    #[test]
    fn coverage_predicate() {
        let g = two_cycle();
        let p = g.path(["E1"]).unwrap();
        assert!(!covers(&g, std::slice::from_ref(&p)));
        assert_eq!(uncovered_edges(&g, &[p]), vec![&EdgeId::from("E2")]);
        assert!(covers(&g, &[g.path(["E1", "E2"]).unwrap()]));
    }

    #[test]
    fn works_with_float_weights() {
        let g = Multidigraph::<f64>::builder("h")
            .edge("a", "h", "x", 0.5)
            .edge("b", "x", "h", 0.25)
            .build()
            .unwrap();
        assert_eq!(*g.path(["a", "b"]).unwrap().cost(), 0.75);
    }
}
