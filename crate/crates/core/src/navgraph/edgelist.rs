//! Plain-text edge lists.
//!
//! ```text
//! # comment
//! home h          # optional, defaults to the first edge's source
//! vertex lonely   # optional, declares a vertex without edges
//! E1 h a 1        # id from to [weight], weight defaults to 1
//! ```
//!
//! Every listed edge is a real edge; reset edges are added by
//! [`make_strongly_connected`](super::make_strongly_connected).

use super::{GraphBuilder, GraphError, Multidigraph, VertexId};
use crate::scalar::Weight;

enum Line<'a> {
    Home(&'a str),
    Vertex(&'a str),
    Edge(&'a str, &'a str, &'a str, Option<&'a str>),
}

fn tokenize(line: &str) -> Vec<&str> {
    let content = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    content.split_whitespace().collect()
}

pub fn parse_edge_list<W: Weight>(text: &str) -> Result<Multidigraph<W>, GraphError> {
    let mut parsed = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let err = |message: String| GraphError::EdgeList { line, message };
        let toks = tokenize(raw);
        let item = match toks.as_slice() {
            [] => continue,
            ["home", v] => Line::Home(v),
            ["vertex", v] => Line::Vertex(v),
            [id, from, to] => Line::Edge(id, from, to, None),
            [id, from, to, w] => Line::Edge(id, from, to, Some(w)),
            _ => return Err(err(format!("expected `id from to [weight]`, got {} fields", toks.len()))),
        };
        parsed.push((line, item));
    }

    let home = parsed
        .iter()
        .find_map(|(_, l)| match l {
            Line::Home(h) => Some(*h),
            _ => None,
        })
        .or_else(|| {
            parsed.iter().find_map(|(_, l)| match l {
                Line::Edge(_, from, _, _) => Some(*from),
                _ => None,
            })
        })
        .ok_or(GraphError::EdgeList {
            line: 0,
            message: "no home vertex and no edges".into(),
        })?;

    let mut b = GraphBuilder::<W>::new(home);
    for (line, item) in parsed {
        b = match item {
            Line::Home(h) if h != home => {
                return Err(GraphError::EdgeList {
                    line,
                    message: format!("second home declaration `{h}`"),
                })
            }
            Line::Home(_) => b,
            Line::Vertex(v) => b.vertex(VertexId::from(v)),
            Line::Edge(id, from, to, w) => {
                let weight = match w {
                    None => W::one(),
                    Some(s) => s.parse::<W>().map_err(|_| GraphError::EdgeList {
                        line,
                        message: format!("invalid weight `{s}`"),
                    })?,
                };
                b.edge(id, from, to, weight)
            }
        };
    }
    b.build()
}

/// Writes the real edges of `g` in the format read by [`parse_edge_list`].
pub fn to_edge_list<W: Weight>(g: &Multidigraph<W>) -> String {
    let mut out = format!("home {}\n", g.home());
    let mentioned: std::collections::HashSet<&str> = g
        .real_edges()
        .flat_map(|e| [e.from.as_str(), e.to.as_str()])
        .collect();
    for v in g.vertices() {
        if v != g.home() && !mentioned.contains(v.as_str()) {
            out.push_str(&format!("vertex {v}\n"));
        }
    }
    for e in g.real_edges() {
        out.push_str(&format!("{} {} {} {}\n", e.id, e.from, e.to, e.weight));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn parses_comments_defaults_and_weights() {
        let g: Multidigraph<Rational> = parse_edge_list(
            "# demo\nE1 h a   # first\nE2 a h 3/2\n\nvertex z\n",
        )
        .unwrap();
        assert_eq!(g.home().as_str(), "h");
        assert_eq!(g.vertices().len(), 3);
        assert_eq!(g.edge("E1").unwrap().weight, Rational::from_integer(1));
        assert_eq!(g.edge("E2").unwrap().weight, Rational::new(3, 2));
    }

    #[test]
    fn explicit_home_wins_over_first_edge() {
        let g: Multidigraph<f64> = parse_edge_list("E1 a b\nhome b\nE2 b a 2.5\n").unwrap();
        assert_eq!(g.home().as_str(), "b");
        assert_eq!(g.edge("E2").unwrap().weight, 2.5);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_edge_list::<Rational>("E1 h a\nE2 a\n").unwrap_err();
        assert!(matches!(err, GraphError::EdgeList { line: 2, .. }));
        let err = parse_edge_list::<Rational>("E1 h a x\n").unwrap_err();
        assert!(matches!(err, GraphError::EdgeList { line: 1, .. }));
        let dup = parse_edge_list::<Rational>("E1 h a\nE1 a h\n").unwrap_err();
        assert_eq!(dup, GraphError::DuplicateEdgeId("E1".into()));
    }

    #[test]
    fn writer_output_reparses() {
        let text = "home h\nvertex z\nE1 h a 1\nE2 a h 1/3\n";
        let g: Multidigraph<Rational> = parse_edge_list(text).unwrap();
        assert_eq!(to_edge_list(&g), text);
        assert_eq!(parse_edge_list::<Rational>(&to_edge_list(&g)).unwrap(), g);
    }
}
