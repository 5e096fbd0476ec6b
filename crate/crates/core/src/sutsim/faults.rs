//! Fault files, one fault per line:
//!
//! ```text
//! # transitions are numbered from 1 in model order
//! broken-link 3 login
//! text-mutation init texto-entrada Goodbye for now
//! missing-element login username
//! ```

use thiserror::Error;

use super::Fault;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("fault line {line}: {message}")]
pub struct FaultParseError {
    pub line: usize,
    pub message: String,
}

pub fn parse_faults(text: &str) -> Result<Vec<Fault>, FaultParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: &str| FaultParseError { line, message: message.to_owned() };
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut words = trimmed.splitn(4, char::is_whitespace).map(str::trim).filter(|w| !w.is_empty());
        let kind = words.next().unwrap_or_default();
        let fault = match kind {
            "broken-link" => {
                let n: usize = words
                    .next()
                    .and_then(|n| n.parse().ok())
                    .filter(|&n| n > 0)
                    .ok_or_else(|| err("expected a transition number from 1"))?;
                let target = words.next().ok_or_else(|| err("expected a target state"))?;
                Fault::BrokenLink { transition: n - 1, target: target.to_owned() }
            }
            "text-mutation" => {
                let (Some(state), Some(locator), Some(text)) = (words.next(), words.next(), words.next()) else {
                    return Err(err("expected state, locator and replacement text"));
                };
                Fault::TextMutation { state: state.to_owned(), locator: locator.to_owned(), text: text.to_owned() }
            }
            "missing-element" => {
                let (Some(state), Some(element)) = (words.next(), words.next()) else {
                    return Err(err("expected state and element"));
                };
                Fault::MissingElement { state: state.to_owned(), element: element.to_owned() }
            }
            other => return Err(err(&format!("unknown fault kind `{other}`"))),
        };
        if words.next().is_some() {
            return Err(err("trailing words"));
        }
        out.push(fault);
    }
    Ok(out)
}

pub fn print_faults(faults: &[Fault]) -> String {
    faults
        .iter()
        .map(|f| match f {
            Fault::BrokenLink { transition, target } => format!("broken-link {} {target}\n", transition + 1),
            Fault::TextMutation { state, locator, text } => format!("text-mutation {state} {locator} {text}\n"),
            Fault::MissingElement { state, element } => format!("missing-element {state} {element}\n"),
        })
        .collect()
}
