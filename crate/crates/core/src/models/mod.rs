//! Navigation models and their three input notations.
//!
//! Every notation parses into the same [`NavigationModel`]: a home state,
//! further states with data fields and assertions, and transitions made
//! of UI actions leading to one or more target states. The model lowers to
//! a [`Multidigraph`] with one edge per (transition, target) pair.

mod dsl;
mod guard;
mod selenese;
mod xml;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::navgraph::{GraphBuilder, Multidigraph};
use crate::scalar::Weight;

pub use dsl::{parse_graph_dsl, to_graph_dsl};
pub use guard::{parse_guard, print_guard, GuardSyntax};
pub use selenese::{parse_rnp_script, parse_rnp_scripts};
pub use xml::{decode_xml_bytes, parse_xml, parse_xml_with, to_xml, XmlOptions, DEFAULT_NAMESPACE};

macro_rules! vocabulary {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

vocabulary!(
    /// HTML input kind of a data field.
    DataType {
        Text => "text",
        Textarea => "textarea",
        Password => "password",
        Checkbox => "checkbox",
        Radio => "radio",
        File => "file",
        SelectOne => "select-one",
        SelectMultiple => "select-multiple",
    }
);

vocabulary!(
    /// Semantic category of a data field, selecting a dictionary pool.
    Stereotype {
        Email => "email",
        Date => "date",
        Name => "name",
        Surname => "surname",
        Address => "address",
        String => "string",
        Integer => "integer",
    }
);

vocabulary!(
    OracleType {
        Text => "text",
        NotText => "notText",
        TextPresent => "textPresent",
        TextNotPresent => "textNotPresent",
        Value => "value",
        NotValue => "notValue",
    }
);

vocabulary!(
    /// DOM event names.
    Event {
        Click => "click",
        Dblclick => "dblclick",
        Keypress => "keypress",
        Keydown => "keydown",
        Keyup => "keyup",
        Mousedown => "mousedown",
        Mousemove => "mousemove",
        Mouseout => "mouseout",
        Mouseover => "mouseover",
        Mouseup => "mouseup",
    }
);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {kind} `{value}`")]
pub struct UnknownLiteral {
    pub kind: &'static str,
    pub value: String,
}

macro_rules! parse_vocabulary {
    ($name:ident, $kind:literal $(, $alias:literal => $variant:ident)*) => {
        impl FromStr for $name {
            type Err = UnknownLiteral;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                $(if s == $alias { return Ok($name::$variant); })*
                $name::ALL
                    .iter()
                    .copied()
                    .find(|v| v.as_str() == s)
                    .ok_or_else(|| UnknownLiteral { kind: $kind, value: s.to_owned() })
            }
        }
    };
}

parse_vocabulary!(DataType, "data type");
parse_vocabulary!(Stereotype, "stereotype");
parse_vocabulary!(OracleType, "oracle type");
// the misspelling appears in published guard examples
parse_vocabulary!(Event, "event", "dblclik" => Dblclick);

impl Event {
    pub fn is_key_event(self) -> bool {
        matches!(self, Event::Keypress | Event::Keydown | Event::Keyup)
    }
}

impl OracleType {
    /// Types that assert on one element and therefore need a locator.
    pub fn is_locator_scoped(self) -> bool {
        !matches!(self, OracleType::TextPresent | OracleType::TextNotPresent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataField {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locator: Option<String>,
    #[serde(rename = "type")]
    pub kind: DataType,
    #[serde(default)]
    pub required: bool,
    #[serde(default)]
    pub values: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stereotype: Option<Stereotype>,
}

impl DataField {
    pub fn new(id: impl Into<String>, kind: DataType) -> Self {
        Self { id: id.into(), locator: None, kind, required: false, values: Vec::new(), stereotype: None }
    }

    /// Element identifier on the page; the locator wins over the id.
    pub fn element_id(&self) -> &str {
        self.locator.as_deref().unwrap_or(&self.id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleDef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locator: Option<String>,
    #[serde(rename = "type")]
    pub kind: OracleType,
    #[serde(default)]
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDef {
    pub id: String,
    #[serde(default)]
    pub data: Vec<DataField>,
    #[serde(default)]
    pub asserts: Vec<OracleDef>,
}

impl StateDef {
    pub fn new(id: impl Into<String>) -> Self {
        Self { id: id.into(), data: Vec::new(), asserts: Vec::new() }
    }

    pub fn field(&self, id: &str) -> Option<&DataField> {
        self.data.iter().find(|d| d.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Action {
    pub target: String,
    pub event: Event,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
}

impl Action {
    pub fn click(target: impl Into<String>) -> Self {
        Self { target: target.into(), event: Event::Click, key: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionDef {
    pub from: String,
    #[serde(default)]
    pub actions: Vec<Action>,
    pub targets: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NavigationModel {
    /// Starting URL of the navigation.
    pub base: String,
    pub home: StateDef,
    #[serde(default)]
    pub states: Vec<StateDef>,
    #[serde(default)]
    pub transitions: Vec<TransitionDef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("XML syntax: {0}")]
    XmlSyntax(String),
    #[error("schema violation at {location}: {message}")]
    SchemaViolation { location: String, message: String },
    #[error("{location}: reference to undeclared state `{state}`")]
    UnknownStateRef { location: String, state: String },
    #[error("state id `{0}` declared more than once")]
    DuplicateStateId(String),
    #[error("line {line}: {message}")]
    DslSyntax {
        line: usize,
        message: String,
        #[source]
        guard: Option<GuardSyntax>,
    },
    #[error("HTML script: {0}")]
    HtmlSyntax(String),
    #[error("unsupported script command `{0}`")]
    UnsupportedCommand(String),
}

impl NavigationModel {
    pub fn new(base: impl Into<String>, home: StateDef) -> Self {
        Self { base: base.into(), home, states: Vec::new(), transitions: Vec::new() }
    }

    /// Home first, then the other states in declaration order.
    pub fn all_states(&self) -> impl Iterator<Item = &StateDef> {
        std::iter::once(&self.home).chain(self.states.iter())
    }

    pub fn state(&self, id: &str) -> Option<&StateDef> {
        self.all_states().find(|s| s.id == id)
    }

    pub fn state_mut(&mut self, id: &str) -> Option<&mut StateDef> {
        if self.home.id == id {
            return Some(&mut self.home);
        }
        self.states.iter_mut().find(|s| s.id == id)
    }

    pub fn outgoing(&self, state: &str) -> impl Iterator<Item = (usize, &TransitionDef)> {
        let state = state.to_owned();
        self.transitions.iter().enumerate().filter(move |(_, t)| t.from == state)
    }

    /// Checks the cross-reference and vocabulary invariants shared by all
    /// notations.
    pub fn validate(&self) -> Result<(), ModelError> {
        let mut ids = HashSet::new();
        for s in self.all_states() {
            if !ids.insert(s.id.as_str()) {
                return Err(ModelError::DuplicateStateId(s.id.clone()));
            }
            let mut locators = HashSet::new();
            for d in &s.data {
                if !locators.insert(d.element_id()) {
                    return Err(ModelError::SchemaViolation {
                        location: format!("state `{}`", s.id),
                        message: format!("data locator `{}` used twice", d.element_id()),
                    });
                }
            }
            for (k, o) in s.asserts.iter().enumerate() {
                if o.kind.is_locator_scoped() && o.locator.is_none() {
                    return Err(ModelError::SchemaViolation {
                        location: format!("state `{}`, assert {}", s.id, k + 1),
                        message: format!("`{}` assertion needs a locator", o.kind),
                    });
                }
            }
        }
        for (n, t) in self.transitions.iter().enumerate() {
            let location = format!("transition {} from `{}`", n + 1, t.from);
            if !ids.contains(t.from.as_str()) {
                return Err(ModelError::UnknownStateRef { location, state: t.from.clone() });
            }
            if t.targets.is_empty() {
                return Err(ModelError::SchemaViolation { location, message: "no target state".into() });
            }
            let mut seen = HashSet::new();
            for target in &t.targets {
                if !ids.contains(target.as_str()) {
                    return Err(ModelError::UnknownStateRef { location, state: target.clone() });
                }
                if !seen.insert(target) {
                    return Err(ModelError::SchemaViolation {
                        location,
                        message: format!("target `{target}` listed twice"),
                    });
                }
            }
            for a in &t.actions {
                if a.key.is_some() && !a.event.is_key_event() {
                    return Err(ModelError::SchemaViolation {
                        location,
                        message: format!("key given for non-key event `{}`", a.event),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Edge id for target `target` of transition `index` (0-based).
pub fn edge_id(index: usize, target: &str) -> String {
    format!("T{}_{}", index + 1, target)
}

/// Inverse of [`edge_id`]: transition index (0-based) and target state.
pub fn edge_origin(id: &str) -> Option<(usize, &str)> {
    let rest = id.strip_prefix('T')?;
    let (n, target) = rest.split_once('_')?;
    let n: usize = n.parse().ok()?;
    Some((n.checked_sub(1)?, target))
}

/// One vertex per state, one unit-weight edge per (transition, target).
pub fn lower_to_graph<W: Weight>(m: &NavigationModel) -> Multidigraph<W> {
    let mut b = GraphBuilder::<W>::new(m.home.id.as_str());
    for s in &m.states {
        b = b.vertex(s.id.as_str());
    }
    for (n, t) in m.transitions.iter().enumerate() {
        for target in &t.targets {
            b = b.link(edge_id(n, target), t.from.as_str(), target.as_str());
        }
    }
    b.build().expect("validated model lowers to a valid graph")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn vocabulary_round_trip_and_alias() {
        for t in DataType::ALL {
            assert_eq!(t.as_str().parse::<DataType>().unwrap(), *t);
        }
        assert_eq!("dblclik".parse::<Event>().unwrap(), Event::Dblclick);
        assert_eq!("textNotPresent".parse::<OracleType>().unwrap(), OracleType::TextNotPresent);
        assert!("hover".parse::<Event>().is_err());
        assert!("xmi".parse::<Stereotype>().is_err());
    }

    #[test]
    fn edge_ids_round_trip() {
        assert_eq!(edge_id(0, "init"), "T1_init");
        assert_eq!(edge_origin("T12_my_state"), Some((11, "my_state")));
        assert_eq!(edge_origin("T0_x"), None);
        assert_eq!(edge_origin("E1"), None);
    }

    #[test]
    fn lowering_chain() {
        let mut m = NavigationModel::new("u", StateDef::new("s0"));
        for i in 1..5 {
            m.states.push(StateDef::new(format!("s{i}")));
            m.transitions.push(TransitionDef {
                from: format!("s{}", i - 1),
                actions: vec![Action::click("next")],
                targets: vec![format!("s{i}")],
            });
        }
        m.validate().unwrap();
        let g = lower_to_graph::<Rational>(&m);
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edges().len(), 4);
    }

    #[test]
    fn lowering_without_transitions() {
        let m = NavigationModel::new("u", StateDef::new("h"));
        let g = lower_to_graph::<Rational>(&m);
        assert_eq!((g.vertex_count(), g.edges().len()), (1, 0));
    }

    #[test]
    fn validation_catches_bad_references() {
        let mut m = NavigationModel::new("u", StateDef::new("h"));
        m.transitions.push(TransitionDef { from: "h".into(), actions: vec![], targets: vec!["nowhere".into()] });
        assert!(matches!(m.validate(), Err(ModelError::UnknownStateRef { .. })));
        m.transitions[0].targets = vec!["h".into(), "h".into()];
        assert!(matches!(m.validate(), Err(ModelError::SchemaViolation { .. })));
        m.transitions.clear();
        m.states.push(StateDef::new("h"));
        assert_eq!(m.validate(), Err(ModelError::DuplicateStateId("h".into())));
    }
}
