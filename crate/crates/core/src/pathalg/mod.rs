//! Graph-matrix node reduction.
//!
//! The graph is written as a square matrix of path expressions, then every
//! vertex except home is eliminated: a self-loop at the eliminated vertex
//! is folded into its outgoing entries as a loop traversed once, and each
//! pair of entries `i -> k -> j` is replaced by the product added to
//! `i -> j`. What remains is the expression for all cycles at home. Reset
//! labels in the expanded terms separate individual test paths.

mod expr;

use std::collections::HashSet;

use thiserror::Error;

use crate::navgraph::{EdgeId, GraphError, Multidigraph, Path, VertexId};
use crate::scalar::Weight;

pub use expr::{Atom, ExpansionTooLarge, ExprKind, ParseExprError, PathExpression};

/// Default cap on the number of product terms an expansion may produce.
pub const DEFAULT_EXPANSION_CAP: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathAlgError {
    #[error(transparent)]
    ExpansionTooLarge(#[from] ExpansionTooLarge),
    #[error("home vertex `{0}` is not part of the matrix")]
    HomeEliminated(VertexId),
    #[error("expanded term is not a walk: {0}")]
    Graph(#[from] GraphError),
}

/// Square matrix of direct-link expressions, indexed by vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphMatrix {
    vertices: Vec<VertexId>,
    cells: Vec<Option<PathExpression>>,
}

impl GraphMatrix {
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn get(&self, from: usize, to: usize) -> Option<&PathExpression> {
        self.cells[from * self.size() + to].as_ref()
    }

    pub fn entry(&self, from: &str, to: &str) -> Option<&PathExpression> {
        let i = self.vertices.iter().position(|v| v.as_str() == from)?;
        let j = self.vertices.iter().position(|v| v.as_str() == to)?;
        self.get(i, j)
    }

    pub fn nonempty_entries(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    fn take(&mut self, from: usize, to: usize) -> Option<PathExpression> {
        let n = self.size();
        self.cells[from * n + to].take()
    }

    fn add(&mut self, from: usize, to: usize, e: PathExpression) {
        let n = self.size();
        let cell = &mut self.cells[from * n + to];
        *cell = Some(match cell.take() {
            None => e,
            Some(old) => old.or(&e),
        });
    }
}

/// Entry `(i, j)` is the sum of the labels of all edges `i -> j`, reset
/// edges labelled `R`.
pub fn build_matrix<W: Weight>(g: &Multidigraph<W>) -> GraphMatrix {
    let n = g.vertex_count();
    let mut m = GraphMatrix { vertices: g.vertices().to_vec(), cells: vec![None; n * n] };
    for (e, (u, v)) in g.edges().iter().zip(g.endpoints()) {
        let label = if e.is_reset() { PathExpression::reset() } else { PathExpression::edge(e.id.clone()) };
        m.add(u, v, label);
    }
    m
}

/// Eliminates every vertex except `home` in ascending matrix order and
/// returns the home-to-home expression.
pub fn node_reduce(m: &GraphMatrix, home: &VertexId) -> Result<PathExpression, PathAlgError> {
    node_reduce_within(m, home, u64::MAX)
}

/// As [`node_reduce`], but gives up as soon as any entry would expand to
/// more than `max_terms` product terms.
///
/// In a strongly connected graph every entry ends up as a factor of the
/// home-to-home expression, so an entry over the cap means the result is
/// over it as well.
pub fn node_reduce_within(m: &GraphMatrix, home: &VertexId, max_terms: u64) -> Result<PathExpression, PathAlgError> {
    let h = m
        .vertices
        .iter()
        .position(|v| v == home)
        .ok_or_else(|| PathAlgError::HomeEliminated(home.clone()))?;
    let n = m.size();
    let mut m = m.clone();
    let mut alive = vec![true; n];

    for k in (0..n).filter(|&k| k != h) {
        if let Some(lp) = m.take(k, k) {
            let lp = PathExpression::loop_once(lp);
            for j in (0..n).filter(|&j| alive[j] && j != k) {
                if let Some(out) = m.take(k, j) {
                    m.add(k, j, lp.then(&out));
                }
            }
        }
        let ins: Vec<(usize, PathExpression)> =
            (0..n).filter(|&i| alive[i] && i != k).filter_map(|i| m.take(i, k).map(|e| (i, e))).collect();
        let outs: Vec<(usize, PathExpression)> =
            (0..n).filter(|&j| alive[j] && j != k).filter_map(|j| m.take(k, j).map(|e| (j, e))).collect();
        for (i, a) in &ins {
            for (j, b) in &outs {
                m.add(*i, *j, a.then(b));
                let t = m.get(*i, *j).map_or(0, PathExpression::terms);
                if t > max_terms {
                    return Err(ExpansionTooLarge { terms: t, cap: max_terms }.into());
                }
            }
        }
        alive[k] = false;
    }
    if !alive[h] {
        return Err(PathAlgError::HomeEliminated(home.clone()));
    }
    Ok(m.get(h, h).cloned().unwrap_or_else(PathExpression::epsilon))
}

/// Splits a product term at its resets into label sequences, dropping
/// empty segments.
pub fn split_at_resets(term: &[Atom]) -> Vec<Vec<EdgeId>> {
    term.split(|a| *a == Atom::Reset)
        .filter(|seg| !seg.is_empty())
        .map(|seg| {
            seg.iter()
                .map(|a| match a {
                    Atom::Edge(id) => id.clone(),
                    Atom::Reset => unreachable!(),
                })
                .collect()
        })
        .collect()
}

/// Label sequences of an expansion: terms split at resets, duplicates
/// removed, and sequences that cover no new edge pruned greedily in
/// expansion order.
pub fn expand_to_sequences(e: &PathExpression, cap: u64) -> Result<Vec<Vec<EdgeId>>, ExpansionTooLarge> {
    let mut seen: HashSet<Vec<EdgeId>> = HashSet::new();
    let mut covered: HashSet<EdgeId> = HashSet::new();
    let mut kept = Vec::new();
    for term in e.expand(cap)? {
        for seg in split_at_resets(&term) {
            if !seen.insert(seg.clone()) {
                continue;
            }
            let fresh = seg.iter().any(|id| !covered.contains(id));
            if fresh {
                covered.extend(seg.iter().cloned());
                kept.push(seg);
            }
        }
    }
    Ok(kept)
}

/// Expands `e` into test paths of `g`. Every sequence is checked to be a
/// walk from home; costs come from the graph's weights.
pub fn expand_to_paths<W: Weight>(e: &PathExpression, g: &Multidigraph<W>, cap: u64) -> Result<Vec<Path<W>>, PathAlgError> {
    expand_to_sequences(e, cap)?
        .into_iter()
        .map(|seq| g.path(seq).map_err(PathAlgError::from))
        .collect()
}

/// Matrix, reduction and expansion in one call.
pub fn node_reduction_paths<W: Weight>(g: &Multidigraph<W>, cap: u64) -> Result<Vec<Path<W>>, PathAlgError> {
    let m = build_matrix(g);
    let e = node_reduce_within(&m, g.home(), cap)?;
    expand_to_paths(&e, g, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::navgraph::{covers, make_strongly_connected, path_set_cost};
    use crate::scalar::Rational;

    type G = Multidigraph<Rational>;

    fn ex(s: &str) -> PathExpression {
        PathExpression::parse(s).unwrap()
    }

    fn two_cycle() -> G {
        G::builder("home").link("E1", "home", "A").link("E2", "A", "home").build().unwrap()
    }

    #[test]
    fn matrix_of_two_cycle() {
        let m = build_matrix(&two_cycle());
        assert_eq!(m.size(), 2);
        assert_eq!(m.get(0, 0), None);
        assert_eq!(m.get(0, 1), Some(&ex("E1")));
        assert_eq!(m.get(1, 0), Some(&ex("E2")));
        assert_eq!(m.get(1, 1), None);
    }

    #[test]
    fn parallel_edges_sum() {
        let g = G::builder("home").link("E1", "home", "A").link("E2", "home", "A").build().unwrap();
        assert_eq!(build_matrix(&g).entry("home", "A"), Some(&ex("E1 + E2")));
    }

    #[test]
    fn figure1_matrix_shape() {
        let g = make_strongly_connected(&fixtures::figure1::<Rational>()).unwrap();
        let m = build_matrix(&g);
        assert_eq!(m.size(), 9);
        // 8 real links and 4 resets, no two sharing endpoints
        assert_eq!(m.nonempty_entries(), 12);
    }

    #[test]
    fn reduce_two_cycle() {
        let g = two_cycle();
        let e = node_reduce(&build_matrix(&g), g.home()).unwrap();
        assert_eq!(e, ex("E1·E2"));
    }

    #[test]
    fn self_loop_is_taken_once() {
        let g = G::builder("home")
            .link("E1", "home", "A")
            .link("L", "A", "A")
            .link("E2", "A", "home")
            .build()
            .unwrap();
        let e = node_reduce(&build_matrix(&g), g.home()).unwrap();
        assert_eq!(e, ex("E1·{L}·E2"));
        let paths = expand_to_paths(&e, &g, DEFAULT_EXPANSION_CAP).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].labels(), vec!["E1", "L", "E2"]);
    }

    #[test]
    fn expansion_splits_and_distributes() {
        let seqs = |s: &str| -> Vec<Vec<String>> {
            expand_to_sequences(&ex(s), 100)
                .unwrap()
                .into_iter()
                .map(|p| p.into_iter().map(|e| e.to_string()).collect())
                .collect()
        };
        assert_eq!(seqs("E1·E7·R + E0·R"), vec![vec!["E0"], vec!["E1", "E7"]]);
        assert_eq!(seqs("(E1+E2)·E3·R"), vec![vec!["E1", "E3"], vec!["E2", "E3"]]);
        // the second copy adds nothing new
        assert_eq!(seqs("E1·E2·R·E1·R"), vec![vec!["E1", "E2"]]);
    }

    #[test]
    fn figure1_reduction_covers_and_is_sound() {
        let g = make_strongly_connected(&fixtures::figure1::<Rational>()).unwrap();
        let e = node_reduce(&build_matrix(&g), g.home()).unwrap();
        let paths = expand_to_paths(&e, &g, DEFAULT_EXPANSION_CAP).unwrap();
        assert!(covers(&g, &paths));
        let cost = path_set_cost(&paths);
        assert!(cost >= Rational::from_integer(10), "cost {cost}");
    }

    #[test]
    fn unknown_home_is_rejected() {
        let m = build_matrix(&two_cycle());
        assert_eq!(
            node_reduce(&m, &"nowhere".into()),
            Err(PathAlgError::HomeEliminated("nowhere".into()))
        );
    }

    #[test]
    fn bounded_reduction_gives_up() {
        // three parallel pairs chained: 3 * 3 * 3 terms
        let g = G::builder("h")
            .link("a1", "h", "x")
            .link("a2", "h", "x")
            .link("a3", "h", "x")
            .link("b1", "x", "y")
            .link("b2", "x", "y")
            .link("b3", "x", "y")
            .link("c1", "y", "h")
            .link("c2", "y", "h")
            .link("c3", "y", "h")
            .build()
            .unwrap();
        let m = build_matrix(&g);
        assert_eq!(node_reduce(&m, g.home()).unwrap().terms(), 27);
        assert!(matches!(
            node_reduce_within(&m, g.home(), 20),
            Err(PathAlgError::ExpansionTooLarge(_))
        ));
    }
}
