use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use crate::navgraph::EdgeId;

/// Shape of a [`PathExpression`] node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExprKind {
    /// Empty path, identity of the product.
    Epsilon,
    Edge(EdgeId),
    /// A reset link back to home, printed as `R`.
    Reset,
    /// Path product `a·b·...`.
    Concat(Vec<PathExpression>),
    /// Selection `a + b + ...`; children sorted and distinct.
    Sum(Vec<PathExpression>),
    /// A removed self-loop, traversed exactly once.
    LoopOnce(PathExpression),
}

#[derive(Debug)]
struct Node {
    kind: ExprKind,
    hash: u64,
    terms: u64,
}

/// Sum-of-products expression over edge labels.
///
/// Nodes are reference counted, so the clones made while eliminating
/// nodes from a graph matrix share structure. Construction goes through
/// the smart constructors, which keep every value normalized: products and
/// sums are flattened, `ε` is dropped from products, and sum children are
/// sorted and deduplicated. Structural equality therefore includes
/// associativity, commutativity and idempotence of `+`.
#[derive(Clone)]
pub struct PathExpression(Arc<Node>);

/// One element of an expanded product term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Edge(EdgeId),
    Reset,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("expansion has {terms} terms, more than the cap of {cap}")]
pub struct ExpansionTooLarge {
    pub terms: u64,
    pub cap: u64,
}

impl PathExpression {
    fn make(kind: ExprKind) -> Self {
        let mut h = DefaultHasher::new();
        let terms = match &kind {
            ExprKind::Epsilon => {
                0u8.hash(&mut h);
                1
            }
            ExprKind::Edge(id) => {
                1u8.hash(&mut h);
                id.hash(&mut h);
                1
            }
            ExprKind::Reset => {
                2u8.hash(&mut h);
                1
            }
            ExprKind::Concat(xs) => {
                3u8.hash(&mut h);
                xs.iter().for_each(|x| x.0.hash.hash(&mut h));
                xs.iter().fold(1u64, |acc, x| acc.saturating_mul(x.terms()))
            }
            ExprKind::Sum(xs) => {
                4u8.hash(&mut h);
                xs.iter().for_each(|x| x.0.hash.hash(&mut h));
                xs.iter().fold(0u64, |acc, x| acc.saturating_add(x.terms()))
            }
            ExprKind::LoopOnce(x) => {
                5u8.hash(&mut h);
                x.0.hash.hash(&mut h);
                x.terms()
            }
        };
        PathExpression(Arc::new(Node { kind, hash: h.finish(), terms }))
    }

    pub fn epsilon() -> Self {
        Self::make(ExprKind::Epsilon)
    }

    pub fn edge(id: impl Into<EdgeId>) -> Self {
        Self::make(ExprKind::Edge(id.into()))
    }

    pub fn reset() -> Self {
        Self::make(ExprKind::Reset)
    }

    /// Product of `parts` in order. An empty product is `ε`.
    pub fn concat<I: IntoIterator<Item = PathExpression>>(parts: I) -> Self {
        let mut flat = Vec::new();
        for p in parts {
            match p.kind() {
                ExprKind::Epsilon => {}
                ExprKind::Concat(xs) => flat.extend(xs.iter().cloned()),
                _ => flat.push(p),
            }
        }
        match flat.len() {
            0 => Self::epsilon(),
            1 => flat.pop().unwrap(),
            _ => Self::make(ExprKind::Concat(flat)),
        }
    }

    /// Selection over `parts`; `None` when `parts` is empty (no path).
    pub fn sum<I: IntoIterator<Item = PathExpression>>(parts: I) -> Option<Self> {
        let mut flat = Vec::new();
        for p in parts {
            match p.kind() {
                ExprKind::Sum(xs) => flat.extend(xs.iter().cloned()),
                _ => flat.push(p),
            }
        }
        flat.sort();
        flat.dedup();
        match flat.len() {
            0 => None,
            1 => flat.pop(),
            _ => Some(Self::make(ExprKind::Sum(flat))),
        }
    }

    pub fn loop_once(body: PathExpression) -> Self {
        match body.kind() {
            ExprKind::Epsilon | ExprKind::LoopOnce(_) => body,
            _ => Self::make(ExprKind::LoopOnce(body)),
        }
    }

    pub fn then(&self, next: &PathExpression) -> Self {
        Self::concat([self.clone(), next.clone()])
    }

    pub fn or(&self, other: &PathExpression) -> Self {
        Self::sum([self.clone(), other.clone()]).expect("two operands")
    }

    pub fn kind(&self) -> &ExprKind {
        &self.0.kind
    }

    /// Number of product terms in the full expansion, before deduplication.
    /// Saturates at `u64::MAX`.
    pub fn terms(&self) -> u64 {
        self.0.terms
    }

    /// Distributes products over sums. `LoopOnce(x)` contributes exactly one
    /// traversal of `x`.
    pub fn expand(&self, cap: u64) -> Result<Vec<Vec<Atom>>, ExpansionTooLarge> {
        if self.terms() > cap {
            return Err(ExpansionTooLarge { terms: self.terms(), cap });
        }
        Ok(self.expand_unchecked())
    }

    fn expand_unchecked(&self) -> Vec<Vec<Atom>> {
        match self.kind() {
            ExprKind::Epsilon => vec![Vec::new()],
            ExprKind::Edge(id) => vec![vec![Atom::Edge(id.clone())]],
            ExprKind::Reset => vec![vec![Atom::Reset]],
            ExprKind::LoopOnce(x) => x.expand_unchecked(),
            ExprKind::Sum(xs) => xs.iter().flat_map(|x| x.expand_unchecked()).collect(),
            ExprKind::Concat(xs) => {
                let mut acc = vec![Vec::new()];
                for x in xs {
                    let tails = x.expand_unchecked();
                    acc = acc
                        .iter()
                        .flat_map(|head| {
                            tails.iter().map(move |tail| {
                                let mut t = head.clone();
                                t.extend(tail.iter().cloned());
                                t
                            })
                        })
                        .collect();
                }
                acc
            }
        }
    }

    /// Parses the printed notation: `·` or `.` for products, `+` for
    /// sums, parentheses for grouping, `{x}` for a loop traversed once,
    /// `R` for a reset and `ε` for the empty path.
    pub fn parse(text: &str) -> Result<Self, ParseExprError> {
        let mut p = Parser { chars: text.char_indices().peekable(), text };
        let e = p.sum()?;
        p.skip_ws();
        match p.chars.peek() {
            None => Ok(e),
            Some(&(at, c)) => Err(ParseExprError { at, message: format!("unexpected `{c}`") }),
        }
    }
}

impl PartialEq for PathExpression {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.hash == other.0.hash && self.0.kind == other.0.kind)
    }
}

impl Eq for PathExpression {}

impl Hash for PathExpression {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash.hash(state);
    }
}

impl PartialOrd for PathExpression {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PathExpression {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.kind.cmp(&other.0.kind)
    }
}

impl fmt::Debug for PathExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PathExpression({self})")
    }
}

impl fmt::Display for PathExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            ExprKind::Epsilon => f.write_str("ε"),
            ExprKind::Edge(id) => f.write_str(id.as_str()),
            ExprKind::Reset => f.write_str("R"),
            ExprKind::LoopOnce(x) => write!(f, "{{{x}}}"),
            ExprKind::Sum(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
            ExprKind::Concat(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("·")?;
                    }
                    match x.kind() {
                        ExprKind::Sum(_) => write!(f, "({x})")?,
                        _ => write!(f, "{x}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("path expression, byte {at}: {message}")]
pub struct ParseExprError {
    pub at: usize,
    pub message: String,
}

impl FromStr for PathExpression {
    type Err = ParseExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    text: &'a str,
}

fn is_label_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '@' | '\'' | ':')
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.chars.next_if(|&(_, c)| c.is_whitespace()).is_some() {}
    }

    fn err(&mut self, message: &str) -> ParseExprError {
        let at = self.chars.peek().map_or(self.text.len(), |&(i, _)| i);
        ParseExprError { at, message: message.to_owned() }
    }

    fn sum(&mut self) -> Result<PathExpression, ParseExprError> {
        let mut parts = vec![self.product()?];
        loop {
            self.skip_ws();
            if self.chars.next_if(|&(_, c)| c == '+').is_none() {
                break;
            }
            parts.push(self.product()?);
        }
        Ok(PathExpression::sum(parts).expect("at least one operand"))
    }

    fn product(&mut self) -> Result<PathExpression, ParseExprError> {
        let mut parts = vec![self.atom()?];
        loop {
            self.skip_ws();
            if self.chars.next_if(|&(_, c)| c == '·' || c == '.').is_none() {
                break;
            }
            parts.push(self.atom()?);
        }
        Ok(PathExpression::concat(parts))
    }

    fn atom(&mut self) -> Result<PathExpression, ParseExprError> {
        self.skip_ws();
        let Some(&(start, c)) = self.chars.peek() else {
            return Err(self.err("unexpected end of expression"));
        };
        match c {
            '(' | '{' => {
                self.chars.next();
                let inner = self.sum()?;
                self.skip_ws();
                let close = if c == '(' { ')' } else { '}' };
                if self.chars.next_if(|&(_, d)| d == close).is_none() {
                    return Err(self.err(&format!("expected `{close}`")));
                }
                Ok(if c == '(' { inner } else { PathExpression::loop_once(inner) })
            }
            'ε' => {
                self.chars.next();
                Ok(PathExpression::epsilon())
            }
            c if is_label_char(c) => {
                let mut end = start;
                while let Some((i, c)) = self.chars.next_if(|&(_, c)| is_label_char(c)) {
                    end = i + c.len_utf8();
                }
                let label = &self.text[start..end];
                Ok(if label == "R" { PathExpression::reset() } else { PathExpression::edge(label) })
            }
            _ => Err(self.err(&format!("unexpected `{c}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(s: &str) -> PathExpression {
        PathExpression::parse(s).unwrap()
    }

    fn atoms(xs: &[&str]) -> Vec<Atom> {
        xs.iter()
            .map(|&x| if x == "R" { Atom::Reset } else { Atom::Edge(x.into()) })
            .collect()
    }

    #[test]
    fn printing_uses_dot_and_plus() {
        assert_eq!(e("(E1 + E2)·E3·R").to_string(), "(E1 + E2)·E3·R");
        assert_eq!(e("E1.E7.R + E0.R").to_string(), "E0·R + E1·E7·R");
        assert_eq!(e("E1·{L}·E2").to_string(), "E1·{L}·E2");
        assert_eq!(e("ε").to_string(), "ε");
    }

    #[test]
    fn expansion_distributes() {
        assert_eq!(
            e("(E1+E2)·E3·R").expand(100).unwrap(),
            vec![atoms(&["E1", "E3", "R"]), atoms(&["E2", "E3", "R"])]
        );
        assert_eq!(e("E1·{L + M}·E2").expand(100).unwrap().len(), 2);
        assert_eq!(e("(a+b)·(c+d)·(e+f)").terms(), 8);
    }

    #[test]
    fn expansion_cap() {
        let err = e("(a+b)·(c+d)·(e+f)").expand(7).unwrap_err();
        assert_eq!(err, ExpansionTooLarge { terms: 8, cap: 7 });
    }

    #[test]
    fn parse_errors() {
        assert!(PathExpression::parse("(a+b").is_err());
        assert!(PathExpression::parse("a+").is_err());
        assert!(PathExpression::parse("a b").is_err());
    }

    fn arb_expr() -> impl Strategy<Value = PathExpression> {
        let leaf = prop_oneof![
            Just(PathExpression::epsilon()),
            Just(PathExpression::reset()),
            "[a-e]".prop_map(PathExpression::edge),
        ];
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 1..4).prop_map(PathExpression::concat),
                prop::collection::vec(inner.clone(), 1..4)
                    .prop_map(|xs| PathExpression::sum(xs).unwrap()),
                inner.prop_map(PathExpression::loop_once),
            ]
        })
    }

    proptest! {
        #[test]
        fn concat_is_associative(a in arb_expr(), b in arb_expr(), c in arb_expr()) {
            prop_assert_eq!(a.then(&b).then(&c), a.then(&b.then(&c)));
        }

        #[test]
        fn sum_is_commutative_associative_idempotent(a in arb_expr(), b in arb_expr(), c in arb_expr()) {
            prop_assert_eq!(a.or(&b), b.or(&a));
            prop_assert_eq!(a.or(&b).or(&c), a.or(&b.or(&c)));
            prop_assert_eq!(a.or(&a), a.clone());
        }

        #[test]
        fn epsilon_is_product_identity(a in arb_expr()) {
            let eps = PathExpression::epsilon();
            prop_assert_eq!(eps.then(&a), a.clone());
            prop_assert_eq!(a.then(&eps), a);
        }

        #[test]
        fn printed_form_reparses(a in arb_expr()) {
            prop_assert_eq!(PathExpression::parse(&a.to_string()).unwrap(), a);
        }

        #[test]
        fn term_count_matches_expansion(a in arb_expr()) {
            prop_assert_eq!(a.expand(u64::MAX).unwrap().len() as u64, a.terms());
        }
    }
}
