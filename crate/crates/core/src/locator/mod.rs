//! Resolving action targets to elements of a rendered page.
//!
//! Within each frame, a target is first compared with the `id`, `name` and
//! `value` attributes of every element, then with every element's trimmed
//! text, and only then evaluated as an XPath expression. Frames are
//! searched in order and the first hit wins.

mod xpath;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::html::{parse_html, ElementNode, HtmlError};

pub use xpath::XPath;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocateError {
    #[error("XPath `{expr}`: {message}")]
    XPathSyntax { expr: String, message: String },
    #[error("XPath `{expr}` uses an unsupported feature: {feature}")]
    UnsupportedXPathFeature { expr: String, feature: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Frame {
    pub name: Option<String>,
    pub elements: Vec<ElementNode>,
}

/// Rendered page: one or more frames of element trees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageSnapshot {
    pub frames: Vec<Frame>,
}

/// Position of an element: frame index plus child indices from the frame
/// root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementRef {
    pub frame: usize,
    pub path: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchKind {
    Attribute,
    Text,
    XPath,
}

impl PageSnapshot {
    /// A frameless page is a single unnamed frame.
    pub fn single(elements: Vec<ElementNode>) -> Self {
        Self { frames: vec![Frame { name: None, elements }] }
    }

    pub fn from_html(html: &str) -> Result<Self, HtmlError> {
        Ok(Self::single(parse_html(html)?))
    }

    pub fn resolve(&self, r: &ElementRef) -> Option<&ElementNode> {
        let frame = self.frames.get(r.frame)?;
        let (&first, rest) = r.path.split_first()?;
        let mut el = frame.elements.get(first)?;
        for &i in rest {
            el = el.children.get(i)?;
        }
        Some(el)
    }

    /// Every element of a frame with its reference, in document order.
    pub fn elements(&self, frame: usize) -> Vec<(ElementRef, &ElementNode)> {
        fn walk<'a>(frame: usize, prefix: &mut Vec<usize>, els: &'a [ElementNode], out: &mut Vec<(ElementRef, &'a ElementNode)>) {
            for (i, el) in els.iter().enumerate() {
                prefix.push(i);
                out.push((ElementRef { frame, path: prefix.clone() }, el));
                walk(frame, prefix, &el.children, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if let Some(f) = self.frames.get(frame) {
            walk(frame, &mut Vec::new(), &f.elements, &mut out);
        }
        out
    }

    /// All element texts of the page, for page-wide text assertions.
    pub fn all_text(&self) -> impl Iterator<Item = &str> {
        self.frames.iter().flat_map(|f| f.elements.iter().map(|e| e.text.as_str()))
    }
}

fn attribute_match(el: &ElementNode, target: &str) -> bool {
    ["id", "name", "value"].iter().any(|a| el.attr(a) == Some(target))
}

/// Text equality with the innermost element carrying it: a wrapper whose
/// only text comes from a matching child does not match itself.
fn text_match(el: &ElementNode, target: &str) -> bool {
    el.text.trim() == target && !el.children.iter().any(|c| c.text.trim() == target)
}

fn looks_like_xpath(target: &str) -> bool {
    target.starts_with('/')
}

/// First element the target resolves to, with how it matched.
pub fn locate_with_kind(page: &PageSnapshot, target: &str) -> Result<Option<(ElementRef, MatchKind)>, LocateError> {
    let parsed = match XPath::parse(target) {
        Ok(x) => Some(x),
        Err(_) if !looks_like_xpath(target) => None,
        Err(e) => {
            if let Some(hit) = literal_match(page, target) {
                return Ok(Some(hit));
            }
            return Err(e);
        }
    };
    for f in 0..page.frames.len() {
        let els = page.elements(f);
        if let Some((r, _)) = els.iter().find(|(_, el)| attribute_match(el, target)) {
            return Ok(Some((r.clone(), MatchKind::Attribute)));
        }
        if let Some((r, _)) = els.iter().find(|(_, el)| text_match(el, target)) {
            return Ok(Some((r.clone(), MatchKind::Text)));
        }
        if let Some(x) = &parsed {
            if let Some(r) = x.eval(f, &page.frames[f]).into_iter().next() {
                return Ok(Some((r, MatchKind::XPath)));
            }
        }
    }
    Ok(None)
}

fn literal_match(page: &PageSnapshot, target: &str) -> Option<(ElementRef, MatchKind)> {
    (0..page.frames.len()).find_map(|f| {
        let els = page.elements(f);
        els.iter()
            .find(|(_, el)| attribute_match(el, target))
            .map(|(r, _)| (r.clone(), MatchKind::Attribute))
            .or_else(|| els.iter().find(|(_, el)| text_match(el, target)).map(|(r, _)| (r.clone(), MatchKind::Text)))
    })
}

/// Resolves `target` on `page`; `None` when nothing matches.
pub fn locate(page: &PageSnapshot, target: &str) -> Result<Option<ElementRef>, LocateError> {
    Ok(locate_with_kind(page, target)?.map(|(r, _)| r))
}

/// Evaluates an XPath expression against one frame.
pub fn eval_xpath(frame: &Frame, expr: &str) -> Result<Vec<ElementRef>, LocateError> {
    Ok(XPath::parse(expr)?.eval(0, frame))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn page(html: &str) -> PageSnapshot {
        PageSnapshot::from_html(html).unwrap()
    }

    fn tag_at<'a>(p: &'a PageSnapshot, r: &ElementRef) -> &'a str {
        &p.resolve(r).unwrap().tag
    }

    const LOGIN: &str = r#"<html><body><form>
        <input id="username" type="text"><input name="pw" type="password">
        <span>Welcome</span></form></body></html>"#;

    #[test]
    fn by_id_then_text_then_xpath() {
        let p = page(LOGIN);
        let (r, k) = locate_with_kind(&p, "username").unwrap().unwrap();
        assert_eq!((p.resolve(&r).unwrap().attr("id"), k), (Some("username"), MatchKind::Attribute));
        let (r, k) = locate_with_kind(&p, "Welcome").unwrap().unwrap();
        assert_eq!((tag_at(&p, &r), k), ("span", MatchKind::Text));
        let (r, k) = locate_with_kind(&p, "//input[@type='password']").unwrap().unwrap();
        assert_eq!((p.resolve(&r).unwrap().attr("name"), k), (Some("pw"), MatchKind::XPath));
        assert_eq!(locate(&p, "nothing here").unwrap(), None);
    }

    #[test]
    fn id_beats_earlier_text_match() {
        let p = page(r#"<p>go</p><button id="go">Submit</button>"#);
        let r = locate(&p, "go").unwrap().unwrap();
        assert_eq!(tag_at(&p, &r), "button");
    }

    #[test]
    fn xpath_errors_only_for_slash_targets() {
        let p = page(LOGIN);
        assert!(matches!(locate(&p, "//input["), Err(LocateError::XPathSyntax { .. })));
        assert!(matches!(locate(&p, "//a|//b"), Err(LocateError::UnsupportedXPathFeature { .. })));
        assert_eq!(locate(&p, "input[").unwrap(), None);
    }

    #[test]
    fn frames_are_searched_in_order() {
        let mut p = page("<div>a</div>");
        p.frames.push(Frame { name: Some("main".into()), elements: page("<b id='k'>x</b>").frames.remove(0).elements });
        let r = locate(&p, "k").unwrap().unwrap();
        assert_eq!(r.frame, 1);
    }

    #[test]
    fn xpath_document_order_and_positions() {
        let p = page(
            "<html><body><div>1</div><input id=a><div><input id=b></div><div>3</div><input id=c></body></html>",
        );
        let f = &p.frames[0];
        let ids: Vec<_> = eval_xpath(f, "//input").unwrap().iter().map(|r| p.resolve(r).unwrap().attr("id").unwrap()).collect();
        assert_eq!(ids, vec!["a", "b", "c"]);
        let second = eval_xpath(f, "/html/body/div[2]").unwrap();
        assert_eq!(second.len(), 1);
        assert_eq!(p.resolve(&second[0]).unwrap().children[0].attr("id"), Some("b"));
        assert_eq!(eval_xpath(f, "/body").unwrap(), vec![]);
        assert_eq!(eval_xpath(f, "//*[@id='c']").unwrap().len(), 1);
        assert_eq!(eval_xpath(f, "//div/input").unwrap().len(), 1);
    }

    #[test]
    fn union_is_rejected() {
        let p = page(LOGIN);
        assert!(matches!(
            eval_xpath(&p.frames[0], "//a[@href='x']|//b"),
            Err(LocateError::UnsupportedXPathFeature { .. })
        ));
    }
}
