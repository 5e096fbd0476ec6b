//! XML navigation format and its canonical writer.

use std::fmt::Write as _;

use roxmltree::{Document, Node};

use super::{Action, DataField, DataType, ModelError, NavigationModel, OracleDef, StateDef, TransitionDef};
use crate::html::escape;

pub const DEFAULT_NAMESPACE: &str = "http://www.dit.upm.es/atp";
const XSI_NAMESPACE: &str = "http://www.w3.org/2001/XMLSchema-instance";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlOptions {
    /// Namespace accepted on elements (unqualified elements are accepted
    /// too) and written by [`to_xml`].
    pub namespace: String,
}

impl Default for XmlOptions {
    fn default() -> Self {
        Self { namespace: DEFAULT_NAMESPACE.to_owned() }
    }
}

pub fn parse_xml(doc: &str) -> Result<NavigationModel, ModelError> {
    parse_xml_with(doc, &XmlOptions::default())
}

/// Decodes a navigation file read as bytes. Files that are not UTF-8 are
/// read as ISO-8859-1, the encoding used by the format's published sample.
pub fn decode_xml_bytes(bytes: &[u8]) -> String {
    match std::str::from_utf8(bytes) {
        Ok(s) => s.to_owned(),
        Err(_) => bytes.iter().map(|&b| b as char).collect(),
    }
}

struct Reader<'a, 'input> {
    doc: &'a Document<'input>,
    ns: &'a str,
}

impl<'a, 'input> Reader<'a, 'input> {
    fn location(&self, node: Node<'_, '_>) -> String {
        let pos = self.doc.text_pos_at(node.range().start);
        format!("{}:{} <{}>", pos.row, pos.col, node.tag_name().name())
    }

    fn violation(&self, node: Node<'_, '_>, message: impl Into<String>) -> ModelError {
        ModelError::SchemaViolation { location: self.location(node), message: message.into() }
    }

    fn check_element(&self, node: Node<'_, '_>, name: &str, attrs: &[&str]) -> Result<(), ModelError> {
        let tag = node.tag_name();
        if tag.name() != name {
            return Err(self.violation(node, format!("expected <{name}>")));
        }
        if let Some(ns) = tag.namespace() {
            if ns != self.ns {
                return Err(self.violation(node, format!("unexpected namespace `{ns}`")));
            }
        }
        for a in node.attributes() {
            match a.namespace() {
                Some(XSI_NAMESPACE) => {}
                Some(other) => return Err(self.violation(node, format!("attribute `{}` in namespace `{other}`", a.name()))),
                None if attrs.contains(&a.name()) => {}
                None => return Err(self.violation(node, format!("unknown attribute `{}`", a.name()))),
            }
        }
        Ok(())
    }

    fn required<'n>(&self, node: Node<'n, '_>, attr: &str) -> Result<&'n str, ModelError> {
        node.attribute(attr).ok_or_else(|| self.violation(node, format!("missing attribute `{attr}`")))
    }

    /// Element children; stray non-blank text is a violation.
    fn children<'n>(&self, node: Node<'n, 'input>) -> Result<Vec<Node<'n, 'input>>, ModelError> {
        let mut out = Vec::new();
        for c in node.children() {
            if c.is_element() {
                out.push(c);
            } else if c.is_text() && !c.text().unwrap_or("").trim().is_empty() {
                return Err(self.violation(node, "unexpected text content"));
            }
        }
        Ok(out)
    }

    fn values(&self, node: Node<'_, 'input>) -> Result<Vec<String>, ModelError> {
        let mut values = Vec::new();
        for v in self.children(node)? {
            self.check_element(v, "value", &[])?;
            if v.children().any(|c| c.is_element()) {
                return Err(self.violation(v, "<value> holds text only"));
            }
            values.push(v.text().unwrap_or("").to_owned());
        }
        Ok(values)
    }

    fn parse_enum<T: std::str::FromStr<Err = super::UnknownLiteral>>(
        &self,
        node: Node<'_, '_>,
        attr: &str,
    ) -> Result<Option<T>, ModelError> {
        node.attribute(attr).map(|v| v.parse().map_err(|e: super::UnknownLiteral| self.violation(node, e.to_string()))).transpose()
    }

    fn data(&self, node: Node<'_, 'input>) -> Result<DataField, ModelError> {
        self.check_element(node, "data", &["id", "locator", "type", "required", "stereotype"])?;
        let locator = node.attribute("locator").map(str::to_owned);
        let id = match (node.attribute("id"), &locator) {
            (Some(id), _) => id.to_owned(),
            (None, Some(l)) => l.clone(),
            (None, None) => return Err(self.violation(node, "data field needs an `id` or a `locator`")),
        };
        let required = match node.attribute("required") {
            None | Some("false") | Some("0") => false,
            Some("true") | Some("1") => true,
            Some(other) => return Err(self.violation(node, format!("`required` must be a boolean, got `{other}`"))),
        };
        Ok(DataField {
            id,
            locator,
            kind: self.parse_enum(node, "type")?.unwrap_or(DataType::Text),
            required,
            values: self.values(node)?,
            stereotype: self.parse_enum(node, "stereotype")?,
        })
    }

    fn assert(&self, node: Node<'_, 'input>) -> Result<OracleDef, ModelError> {
        self.check_element(node, "assert", &["id", "locator", "type"])?;
        let kind = self
            .parse_enum(node, "type")?
            .ok_or_else(|| self.violation(node, "missing attribute `type`"))?;
        let o = OracleDef {
            id: node.attribute("id").map(str::to_owned),
            locator: node.attribute("locator").map(str::to_owned),
            kind,
            values: self.values(node)?,
        };
        if o.kind.is_locator_scoped() && o.locator.is_none() {
            return Err(self.violation(node, format!("`{}` assertion needs a locator", o.kind)));
        }
        Ok(o)
    }

    fn state(&self, node: Node<'_, 'input>, name: &str) -> Result<StateDef, ModelError> {
        self.check_element(node, name, &["id"])?;
        let mut s = StateDef::new(self.required(node, "id")?);
        for c in self.children(node)? {
            match c.tag_name().name() {
                "data" => s.data.push(self.data(c)?),
                "assert" => s.asserts.push(self.assert(c)?),
                other => return Err(self.violation(c, format!("<{other}> not allowed in <{name}>"))),
            }
        }
        Ok(s)
    }

    fn transition(&self, node: Node<'_, 'input>) -> Result<TransitionDef, ModelError> {
        self.check_element(node, "transition", &["from"])?;
        let mut t = TransitionDef { from: self.required(node, "from")?.to_owned(), actions: Vec::new(), targets: Vec::new() };
        for c in self.children(node)? {
            match c.tag_name().name() {
                "action" => {
                    self.check_element(c, "action", &["target", "event", "key"])?;
                    if !self.children(c)?.is_empty() {
                        return Err(self.violation(c, "<action> must be empty"));
                    }
                    let event = self
                        .parse_enum(c, "event")?
                        .ok_or_else(|| self.violation(c, "missing attribute `event`"))?;
                    t.actions.push(Action {
                        target: self.required(c, "target")?.to_owned(),
                        event,
                        key: c.attribute("key").map(str::to_owned),
                    });
                }
                "to" => {
                    self.check_element(c, "to", &["state"])?;
                    if !self.children(c)?.is_empty() {
                        return Err(self.violation(c, "<to> must be empty"));
                    }
                    t.targets.push(self.required(c, "state")?.to_owned());
                }
                other => return Err(self.violation(c, format!("<{other}> not allowed in <transition>"))),
            }
        }
        if t.targets.is_empty() {
            return Err(self.violation(node, "transition without <to>"));
        }
        Ok(t)
    }
}

pub fn parse_xml_with(doc: &str, opts: &XmlOptions) -> Result<NavigationModel, ModelError> {
    let parsed = Document::parse(doc).map_err(|e| ModelError::XmlSyntax(e.to_string()))?;
    let r = Reader { doc: &parsed, ns: &opts.namespace };
    let root = parsed.root_element();
    r.check_element(root, "website", &["base"])?;
    let base = r.required(root, "base")?.to_owned();
    let mut home = None;
    let mut states = Vec::new();
    let mut transitions = Vec::new();
    for c in r.children(root)? {
        match c.tag_name().name() {
            "home" if home.is_some() => return Err(r.violation(c, "more than one <home>")),
            "home" => home = Some(r.state(c, "home")?),
            "state" => states.push(r.state(c, "state")?),
            "transition" => transitions.push(r.transition(c)?),
            other => return Err(r.violation(c, format!("<{other}> not allowed in <website>"))),
        }
    }
    let home = home.ok_or_else(|| r.violation(root, "missing <home>"))?;
    let model = NavigationModel { base, home, states, transitions };
    model.validate()?;
    Ok(model)
}

fn attr(out: &mut String, name: &str, value: &str) {
    let _ = write!(out, " {}=\"{}\"", name, escape(value));
}

fn write_values(out: &mut String, indent: &str, values: &[String]) {
    for v in values {
        let _ = writeln!(out, "{indent}<value>{}</value>", escape(v));
    }
}

fn write_state(out: &mut String, tag: &str, s: &StateDef) {
    out.push_str("  <");
    out.push_str(tag);
    attr(out, "id", &s.id);
    if s.data.is_empty() && s.asserts.is_empty() {
        out.push_str("/>\n");
        return;
    }
    out.push_str(">\n");
    for d in &s.data {
        out.push_str("    <data");
        attr(out, "id", &d.id);
        if let Some(l) = &d.locator {
            attr(out, "locator", l);
        }
        attr(out, "type", d.kind.as_str());
        if d.required {
            attr(out, "required", "true");
        }
        if let Some(st) = d.stereotype {
            attr(out, "stereotype", st.as_str());
        }
        out.push_str(">\n");
        write_values(out, "      ", &d.values);
        out.push_str("    </data>\n");
    }
    for o in &s.asserts {
        out.push_str("    <assert");
        if let Some(id) = &o.id {
            attr(out, "id", id);
        }
        if let Some(l) = &o.locator {
            attr(out, "locator", l);
        }
        attr(out, "type", o.kind.as_str());
        out.push_str(">\n");
        write_values(out, "      ", &o.values);
        out.push_str("    </assert>\n");
    }
    let _ = writeln!(out, "  </{tag}>");
}

/// Canonical serialization: every attribute explicit, fixed element order
/// (home, states, transitions), two-space indentation.
pub fn to_xml(m: &NavigationModel, opts: &XmlOptions) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<website");
    attr(&mut out, "xmlns", &opts.namespace);
    attr(&mut out, "base", &m.base);
    out.push_str(">\n");
    write_state(&mut out, "home", &m.home);
    for s in &m.states {
        write_state(&mut out, "state", s);
    }
    for t in &m.transitions {
        out.push_str("  <transition");
        attr(&mut out, "from", &t.from);
        out.push_str(">\n");
        for a in &t.actions {
            out.push_str("    <action");
            attr(&mut out, "target", &a.target);
            attr(&mut out, "event", a.event.as_str());
            if let Some(k) = &a.key {
                attr(&mut out, "key", k);
            }
            out.push_str("/>\n");
        }
        for target in &t.targets {
            out.push_str("    <to");
            attr(&mut out, "state", target);
            out.push_str("/>\n");
        }
        out.push_str("  </transition>\n");
    }
    out.push_str("</website>\n");
    out
}
