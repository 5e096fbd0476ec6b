//! A small, forgiving HTML reader.
//!
//! Handles tags, quoted and bare attributes, text with the common
//! entities, void and self-closing tags, comments, and raw-text elements.
//! Mis-nested markup is repaired: a close tag pops everything opened after
//! its match, and a close tag without a match is ignored. Anything left
//! open at the end of input is closed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("HTML, byte {at}: {message}")]
pub struct HtmlError {
    pub at: usize,
    pub message: String,
}

/// An element with its concatenated descendant text.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ElementNode {
    pub tag: String,
    pub attrs: BTreeMap<String, String>,
    pub text: String,
    pub children: Vec<ElementNode>,
}

impl ElementNode {
    pub fn new(tag: impl Into<String>) -> Self {
        Self { tag: tag.into(), ..Self::default() }
    }

    pub fn with_attr(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.attrs.insert(name.into(), value.into());
        self
    }

    pub fn with_text(mut self, text: impl AsRef<str>) -> Self {
        self.text.push_str(text.as_ref());
        self
    }

    /// Appends a child; its text becomes part of this element's text.
    pub fn with_child(mut self, child: ElementNode) -> Self {
        self.text.push_str(&child.text);
        self.children.push(child);
        self
    }

    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs.get(name).map(String::as_str)
    }

    /// Pre-order traversal of this element and its descendants.
    pub fn descendants(&self) -> Vec<&ElementNode> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.descendants());
        }
        out
    }

    /// Serializes back to markup. Text that sits directly in an element with
    /// children is not tracked separately, so only leaf text is written.
    pub fn to_html(&self) -> String {
        let mut out = String::new();
        self.write_html(&mut out);
        out
    }

    fn write_html(&self, out: &mut String) {
        out.push('<');
        out.push_str(&self.tag);
        for (k, v) in &self.attrs {
            out.push_str(&format!(" {k}=\"{}\"", escape(v)));
        }
        if is_void(&self.tag) {
            out.push_str(" />");
            return;
        }
        out.push('>');
        if self.children.is_empty() {
            out.push_str(&escape(&self.text));
        }
        for c in &self.children {
            c.write_html(out);
        }
        out.push_str(&format!("</{}>", self.tag));
    }
}

pub fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn is_void(tag: &str) -> bool {
    matches!(
        tag,
        "area" | "base" | "br" | "col" | "embed" | "hr" | "img" | "input" | "link" | "meta" | "param" | "source" | "track" | "wbr"
    )
}

fn is_raw_text(tag: &str) -> bool {
    matches!(tag, "script" | "style" | "textarea" | "title")
}

/// Tags that implicitly close an open element of the listed kinds.
fn implicitly_closes(opening: &str, open: &str) -> bool {
    match opening {
        "td" | "th" => matches!(open, "td" | "th"),
        "tr" => matches!(open, "td" | "th" | "tr"),
        "li" => open == "li",
        "option" => open == "option",
        "p" => open == "p",
        _ => false,
    }
}

pub fn decode_entities(s: &str) -> String {
    if !s.contains('&') {
        return s.to_owned();
    }
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(i) = rest.find('&') {
        out.push_str(&rest[..i]);
        rest = &rest[i..];
        let decoded = rest.find(';').filter(|&end| end <= 10).and_then(|end| {
            let name = &rest[1..end];
            let c = match name {
                "amp" => Some('&'),
                "lt" => Some('<'),
                "gt" => Some('>'),
                "quot" => Some('"'),
                "apos" => Some('\''),
                "nbsp" => Some('\u{a0}'),
                _ if name.starts_with("#x") || name.starts_with("#X") => {
                    u32::from_str_radix(&name[2..], 16).ok().and_then(char::from_u32)
                }
                _ if name.starts_with('#') => name[1..].parse().ok().and_then(char::from_u32),
                _ => None,
            };
            c.map(|c| (c, end))
        });
        match decoded {
            Some((c, end)) => {
                out.push(c);
                rest = &rest[end + 1..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

enum Part {
    Text(String),
    Child(ElementNode),
}

struct Open {
    tag: String,
    attrs: BTreeMap<String, String>,
    parts: Vec<Part>,
}

impl Open {
    fn finish(self) -> ElementNode {
        let mut el = ElementNode { tag: self.tag, attrs: self.attrs, ..ElementNode::default() };
        for p in self.parts {
            match p {
                Part::Text(t) => el.text.push_str(&t),
                Part::Child(c) => el = el.with_child(c),
            }
        }
        el
    }
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
    stack: Vec<Open>,
}

impl<'a> Reader<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn err(&self, message: impl Into<String>) -> HtmlError {
        HtmlError { at: self.pos, message: message.into() }
    }

    fn push_part(&mut self, part: Part) {
        self.stack.last_mut().expect("document root").parts.push(part);
    }

    fn close_top(&mut self) {
        let top = self.stack.pop().expect("non-root element").finish();
        self.push_part(Part::Child(top));
    }

    fn skip_past(&mut self, needle: &str, what: &str) -> Result<(), HtmlError> {
        match self.rest().find(needle) {
            Some(i) => {
                self.pos += i + needle.len();
                Ok(())
            }
            None => Err(self.err(format!("unterminated {what}"))),
        }
    }

    fn name(&mut self) -> String {
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | ':' | '.')))
            .unwrap_or(self.rest().len());
        let name = self.rest()[..len].to_ascii_lowercase();
        self.pos += len;
        name
    }

    fn skip_ws(&mut self) {
        let len = self.rest().len() - self.rest().trim_start().len();
        self.pos += len;
    }

    fn start_tag(&mut self) -> Result<(), HtmlError> {
        let start = self.pos;
        self.pos += 1;
        let tag = self.name();
        let mut attrs = BTreeMap::new();
        let self_closing = loop {
            self.skip_ws();
            let rest = self.rest();
            if rest.is_empty() {
                self.pos = start;
                return Err(self.err(format!("unterminated <{tag}> tag")));
            }
            if rest.starts_with("/>") {
                self.pos += 2;
                break true;
            }
            if rest.starts_with('>') {
                self.pos += 1;
                break false;
            }
            if rest.starts_with('/') {
                self.pos += 1;
                continue;
            }
            let name = self.name();
            if name.is_empty() {
                return Err(self.err(format!("bad attribute in <{tag}>")));
            }
            self.skip_ws();
            let value = if self.rest().starts_with('=') {
                self.pos += 1;
                self.skip_ws();
                let rest = self.rest();
                match rest.chars().next() {
                    Some(q @ ('"' | '\'')) => {
                        let end = rest[1..].find(q).ok_or_else(|| self.err("unterminated attribute value"))?;
                        let v = decode_entities(&rest[1..1 + end]);
                        self.pos += end + 2;
                        v
                    }
                    _ => {
                        let len = rest.find(|c: char| c.is_whitespace() || c == '>').unwrap_or(rest.len());
                        let v = decode_entities(rest[..len].trim_end_matches('/'));
                        self.pos += len;
                        v
                    }
                }
            } else {
                String::new()
            };
            attrs.entry(name).or_insert(value);
        };

        while let Some(top) = self.stack.last() {
            if self.stack.len() > 1 && implicitly_closes(&tag, &top.tag) {
                self.close_top();
            } else {
                break;
            }
        }

        let open = Open { tag: tag.clone(), attrs, parts: Vec::new() };
        if self_closing || is_void(&tag) {
            self.push_part(Part::Child(open.finish()));
            return Ok(());
        }
        if is_raw_text(&tag) {
            let close = format!("</{tag}");
            let lower = self.rest().to_ascii_lowercase();
            let end = lower.find(&close).unwrap_or(lower.len());
            let body = &self.rest()[..end];
            let mut open = open;
            if tag != "script" && tag != "style" {
                open.parts.push(Part::Text(decode_entities(body)));
            }
            self.pos += end;
            if !self.rest().is_empty() {
                self.skip_past(">", "close tag")?;
            }
            self.push_part(Part::Child(open.finish()));
            return Ok(());
        }
        self.stack.push(open);
        Ok(())
    }

    fn end_tag(&mut self) -> Result<(), HtmlError> {
        self.pos += 2;
        let tag = self.name();
        self.skip_past(">", "close tag")?;
        if let Some(depth) = self.stack.iter().skip(1).rposition(|o| o.tag == tag) {
            while self.stack.len() > depth + 1 {
                self.close_top();
            }
        }
        Ok(())
    }

    fn run(mut self) -> Result<Vec<ElementNode>, HtmlError> {
        while !self.rest().is_empty() {
            let rest = self.rest();
            if rest.starts_with("<!--") {
                self.skip_past("-->", "comment")?;
            } else if rest.starts_with("<!") || rest.starts_with("<?") {
                self.skip_past(">", "declaration")?;
            } else if rest.starts_with("</") {
                self.end_tag()?;
            } else if rest.starts_with('<') && rest[1..].starts_with(|c: char| c.is_ascii_alphabetic()) {
                self.start_tag()?;
            } else {
                let len = rest[1..].find('<').map_or(rest.len(), |i| i + 1);
                let text = decode_entities(&rest[..len]);
                self.pos += len;
                self.push_part(Part::Text(text));
            }
        }
        while self.stack.len() > 1 {
            self.close_top();
        }
        let root = self.stack.pop().unwrap();
        Ok(root
            .parts
            .into_iter()
            .filter_map(|p| match p {
                Part::Child(c) => Some(c),
                Part::Text(_) => None,
            })
            .collect())
    }
}

/// Parses a document into its top-level elements.
pub fn parse_html(src: &str) -> Result<Vec<ElementNode>, HtmlError> {
    let root = Open { tag: String::new(), attrs: BTreeMap::new(), parts: Vec::new() };
    Reader { src, pos: 0, stack: vec![root] }.run()
}
