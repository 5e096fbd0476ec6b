//! The XPath subset used by element targets.
//!
//! Supported: absolute `/a/b`, descendant `//a`, relative `a/b`, the `*`
//! wildcard, and chained predicates `[@attr='v']`, `[@attr]` and `[n]`
//! (1-based, counted among the siblings that passed the name test).

use std::collections::BTreeSet;

use super::{ElementRef, Frame, LocateError};
use crate::html::ElementNode;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Predicate {
    Position(usize),
    HasAttr(String),
    AttrEquals(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Step {
    descendant: bool,
    name: Option<String>,
    predicates: Vec<Predicate>,
}

/// Parsed XPath expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XPath {
    steps: Vec<Step>,
}

struct Cursor<'a> {
    expr: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.expr[self.pos..]
    }

    fn syntax(&self, message: impl Into<String>) -> LocateError {
        LocateError::XPathSyntax { expr: self.expr.to_owned(), message: format!("{} at byte {}", message.into(), self.pos) }
    }

    fn unsupported(&self, feature: &str) -> LocateError {
        LocateError::UnsupportedXPathFeature { expr: self.expr.to_owned(), feature: feature.to_owned() }
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn skip_ws(&mut self) {
        self.pos += self.rest().len() - self.rest().trim_start().len();
    }

    fn name(&mut self) -> &'a str {
        let len = self
            .rest()
            .find(|c: char| !(c.is_alphanumeric() || matches!(c, '-' | '_' | '.')))
            .unwrap_or(self.rest().len());
        let s = &self.rest()[..len];
        self.pos += len;
        s
    }
}

fn check_unsupported(cur: &Cursor<'_>) -> Result<(), LocateError> {
    let rest = cur.rest();
    let feature = if rest.starts_with('|') {
        "union"
    } else if rest.starts_with("..") {
        "parent step"
    } else if rest.starts_with('.') {
        "self step"
    } else if rest.starts_with('@') {
        "attribute step"
    } else if rest.starts_with('(') {
        "grouping"
    } else {
        return Ok(());
    };
    Err(cur.unsupported(feature))
}

impl XPath {
    pub fn parse(expr: &str) -> Result<Self, LocateError> {
        let mut cur = Cursor { expr, pos: 0 };
        let mut steps = Vec::new();
        let trimmed = expr.trim();
        if trimmed.is_empty() {
            return Err(cur.syntax("empty expression"));
        }
        cur.skip_ws();
        let mut first = true;
        loop {
            let descendant = if cur.eat("//") {
                true
            } else if cur.eat("/") || first {
                false
            } else if cur.rest().trim().is_empty() {
                break;
            } else {
                check_unsupported(&cur)?;
                return Err(cur.syntax(format!("unexpected `{}`", cur.rest().chars().next().unwrap())));
            };
            first = false;
            check_unsupported(&cur)?;
            let name = if cur.eat("*") {
                None
            } else {
                let n = cur.name();
                if n.is_empty() {
                    return Err(cur.syntax("expected a name test"));
                }
                if cur.rest().starts_with("::") {
                    return Err(cur.unsupported("axis"));
                }
                if cur.rest().starts_with('(') {
                    return Err(cur.unsupported("function call"));
                }
                Some(n.to_ascii_lowercase())
            };
            let mut predicates = Vec::new();
            while cur.eat("[") {
                predicates.push(parse_predicate(&mut cur)?);
            }
            steps.push(Step { descendant, name, predicates });
            cur.skip_ws();
            if cur.rest().is_empty() {
                break;
            }
        }
        Ok(XPath { steps })
    }

    /// Matches in document order.
    pub fn eval(&self, frame_index: usize, frame: &Frame) -> Vec<ElementRef> {
        let mut context: BTreeSet<Vec<usize>> = BTreeSet::from([Vec::new()]);
        for step in &self.steps {
            let mut next = BTreeSet::new();
            for node in &context {
                let bases = if step.descendant { descendants_or_self(frame, node) } else { vec![node.clone()] };
                for base in bases {
                    let kids = children(frame, &base);
                    let mut matched: Vec<usize> = (0..kids.len())
                        .filter(|&i| step.name.as_deref().is_none_or(|n| kids[i].tag == n))
                        .collect();
                    for p in &step.predicates {
                        matched = match p {
                            Predicate::Position(n) => matched.get(n - 1).copied().into_iter().collect(),
                            Predicate::HasAttr(a) => matched.into_iter().filter(|&i| kids[i].attrs.contains_key(a)).collect(),
                            Predicate::AttrEquals(a, v) => {
                                matched.into_iter().filter(|&i| kids[i].attr(a) == Some(v.as_str())).collect()
                            }
                        };
                    }
                    for i in matched {
                        let mut p = base.clone();
                        p.push(i);
                        next.insert(p);
                    }
                }
            }
            context = next;
        }
        context.into_iter().map(|path| ElementRef { frame: frame_index, path }).collect()
    }
}

fn parse_predicate(cur: &mut Cursor<'_>) -> Result<Predicate, LocateError> {
    cur.skip_ws();
    if !cur.rest().contains(']') {
        return Err(cur.syntax("unterminated predicate"));
    }
    let pred = if cur.rest().starts_with(|c: char| c.is_ascii_digit()) {
        let len = cur.rest().find(|c: char| !c.is_ascii_digit()).unwrap_or(cur.rest().len());
        let n: usize = cur.rest()[..len].parse().map_err(|_| cur.syntax("bad position"))?;
        cur.pos += len;
        if n == 0 {
            return Err(cur.syntax("positions start at 1"));
        }
        Predicate::Position(n)
    } else if cur.eat("@") {
        let name = cur.name().to_ascii_lowercase();
        if name.is_empty() {
            return Err(cur.syntax("expected an attribute name"));
        }
        cur.skip_ws();
        if cur.eat("=") {
            cur.skip_ws();
            let quote = match cur.rest().chars().next() {
                Some(q @ ('\'' | '"')) => q,
                _ => return Err(cur.syntax("expected a quoted literal")),
            };
            cur.pos += 1;
            let end = cur.rest().find(quote).ok_or_else(|| cur.syntax("unterminated literal"))?;
            let value = cur.rest()[..end].to_owned();
            cur.pos += end + 1;
            Predicate::AttrEquals(name, value)
        } else if cur.rest().starts_with("!=") {
            return Err(cur.unsupported("comparison other than ="));
        } else {
            Predicate::HasAttr(name)
        }
    } else {
        let word = cur.name();
        return Err(if cur.rest().starts_with('(') || word.is_empty() {
            cur.unsupported("predicate expression")
        } else {
            cur.unsupported("element-valued predicate")
        });
    };
    cur.skip_ws();
    if cur.rest().starts_with("and") || cur.rest().starts_with("or") {
        return Err(cur.unsupported("boolean operator"));
    }
    if !cur.eat("]") {
        return Err(cur.syntax("expected `]`"));
    }
    Ok(pred)
}

fn children<'f>(frame: &'f Frame, path: &[usize]) -> &'f [ElementNode] {
    let mut kids: &[ElementNode] = &frame.elements;
    for &i in path {
        kids = &kids[i].children;
    }
    kids
}

fn descendants_or_self(frame: &Frame, path: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![path.to_vec()];
    let mut i = 0;
    while i < out.len() {
        let p = out[i].clone();
        for k in 0..children(frame, &p).len() {
            let mut c = p.clone();
            c.push(k);
            out.push(c);
        }
        i += 1;
    }
    out
}
