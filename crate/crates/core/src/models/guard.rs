//! Guard notation for transitions:
//! `[target1,event1,<key1> ; target2,event2 ; ...]`.

use thiserror::Error;

use super::{Action, Event};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GuardSyntax {
    #[error("guard action `{0}` must be `target,event[,<key>]`")]
    BadArity(String),
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("key `{key}` given for non-key event `{event}`")]
    KeyOnNonKeyEvent { event: Event, key: String },
}

pub fn parse_guard(text: &str) -> Result<Vec<Action>, GuardSyntax> {
    let mut body = text.trim();
    if body.starts_with('[') && body.ends_with(']') {
        body = body[1..body.len() - 1].trim();
    }
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split(';').map(parse_action).collect()
}

fn parse_action(atom: &str) -> Result<Action, GuardSyntax> {
    let parts: Vec<&str> = atom.split(',').map(str::trim).collect();
    let (target, event, key) = match parts.as_slice() {
        [t, e] => (*t, *e, None),
        [t, e, k] => (*t, *e, Some(*k)),
        _ => return Err(GuardSyntax::BadArity(atom.trim().to_owned())),
    };
    if target.is_empty() {
        return Err(GuardSyntax::BadArity(atom.trim().to_owned()));
    }
    let event: Event = event.parse().map_err(|_| GuardSyntax::UnknownEvent(event.to_owned()))?;
    let key = key
        .map(|k| k.strip_prefix('<').and_then(|k| k.strip_suffix('>')).unwrap_or(k).to_owned())
        .filter(|k| !k.is_empty());
    if let Some(k) = &key {
        if !event.is_key_event() {
            return Err(GuardSyntax::KeyOnNonKeyEvent { event, key: k.clone() });
        }
    }
    Ok(Action { target: target.to_owned(), event, key })
}

pub fn print_guard(actions: &[Action]) -> String {
    let atoms: Vec<String> = actions
        .iter()
        .map(|a| match &a.key {
            Some(k) => format!("{},{},<{}>", a.target, a.event, k),
            None => format!("{},{}", a.target, a.event),
        })
        .collect();
    format!("[{}]", atoms.join(" ; "))
}
