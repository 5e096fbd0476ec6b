//! Line-oriented graph notation.
//!
//! ```text
//! # comment
//! base http://localhost:8080/WebAdmin/
//! home login
//!   data username type=text required value=Administrador
//!   assert text locator=texto-entrada value=Welcome
//! state init
//! edge login -> init, login [frmDatos_0,click]
//! ```
//!
//! `data` and `assert` lines belong to the closest `home`/`state` line above
//! them. Edges may name states declared further down.

use std::fmt::Write as _;

use super::{
    parse_guard, print_guard, DataField, DataType, ModelError, NavigationModel, OracleDef, StateDef, TransitionDef,
};

fn syntax(line: usize, message: impl Into<String>) -> ModelError {
    ModelError::DslSyntax { line, message: message.into(), guard: None }
}

/// Whitespace-separated words; double quotes group, `\` escapes inside
/// quotes.
fn tokens(line: &str, no: usize) -> Result<Vec<String>, ModelError> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut in_word = false;
    let mut chars = line.chars();
    while let Some(c) = chars.next() {
        match c {
            '"' => {
                in_word = true;
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some('\\') => cur.push(chars.next().ok_or_else(|| syntax(no, "dangling escape"))?),
                        Some(c) => cur.push(c),
                        None => return Err(syntax(no, "unterminated quote")),
                    }
                }
            }
            c if c.is_whitespace() => {
                if in_word {
                    out.push(std::mem::take(&mut cur));
                    in_word = false;
                }
            }
            c => {
                in_word = true;
                cur.push(c);
            }
        }
    }
    if in_word {
        out.push(cur);
    }
    Ok(out)
}

fn quote(s: &str) -> String {
    if !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || matches!(c, '"' | '\\' | '#' | '=')) {
        return s.to_owned();
    }
    let mut q = String::from("\"");
    for c in s.chars() {
        if matches!(c, '"' | '\\') {
            q.push('\\');
        }
        q.push(c);
    }
    q.push('"');
    q
}

fn parse_vocab<T: std::str::FromStr<Err = super::UnknownLiteral>>(value: &str, no: usize) -> Result<T, ModelError> {
    value.parse().map_err(|e: super::UnknownLiteral| syntax(no, e.to_string()))
}

fn parse_data(words: &[String], no: usize) -> Result<DataField, ModelError> {
    let (id, opts) = words.split_first().ok_or_else(|| syntax(no, "data line needs an id"))?;
    let mut d = DataField::new(id.clone(), DataType::Text);
    for w in opts {
        match w.split_once('=') {
            None if w == "required" => d.required = true,
            Some(("required", v)) => {
                d.required = v.parse().map_err(|_| syntax(no, format!("`required` must be true or false, got `{v}`")))?
            }
            Some(("locator", v)) => d.locator = Some(v.to_owned()),
            Some(("type", v)) => d.kind = parse_vocab(v, no)?,
            Some(("stereotype", v)) => d.stereotype = Some(parse_vocab(v, no)?),
            Some(("value", v)) => d.values.push(v.to_owned()),
            _ => return Err(syntax(no, format!("unknown data option `{w}`"))),
        }
    }
    Ok(d)
}

fn parse_assert(words: &[String], no: usize) -> Result<OracleDef, ModelError> {
    let (kind, opts) = words.split_first().ok_or_else(|| syntax(no, "assert line needs a type"))?;
    let mut o = OracleDef { id: None, locator: None, kind: parse_vocab(kind, no)?, values: Vec::new() };
    for w in opts {
        match w.split_once('=') {
            Some(("id", v)) => o.id = Some(v.to_owned()),
            Some(("locator", v)) => o.locator = Some(v.to_owned()),
            Some(("value", v)) => o.values.push(v.to_owned()),
            _ => return Err(syntax(no, format!("unknown assert option `{w}`"))),
        }
    }
    if o.kind.is_locator_scoped() && o.locator.is_none() {
        return Err(syntax(no, format!("`{}` assertion needs a locator", o.kind)));
    }
    Ok(o)
}

fn parse_edge(rest: &str, no: usize) -> Result<TransitionDef, ModelError> {
    let (from, rest) = rest.split_once("->").ok_or_else(|| syntax(no, "edge needs `->`"))?;
    let from = from.trim();
    if from.is_empty() || from.contains(char::is_whitespace) {
        return Err(syntax(no, "edge needs exactly one source state"));
    }
    let (targets, guard) = match rest.find('[') {
        Some(i) => (&rest[..i], Some(rest[i..].trim())),
        None => (rest, None),
    };
    let targets: Vec<String> = targets.split(',').map(|t| t.trim().to_owned()).collect();
    if targets.iter().any(|t| t.is_empty() || t.contains(char::is_whitespace)) {
        return Err(syntax(no, "edge targets are a comma-separated list of state ids"));
    }
    let actions = match guard {
        None => Vec::new(),
        Some(g) if !g.ends_with(']') => return Err(syntax(no, "unterminated guard")),
        Some(g) => parse_guard(g).map_err(|e| ModelError::DslSyntax {
            line: no,
            message: format!("bad guard: {e}"),
            guard: Some(e),
        })?,
    };
    Ok(TransitionDef { from: from.to_owned(), actions, targets })
}

pub fn parse_graph_dsl(doc: &str) -> Result<NavigationModel, ModelError> {
    let mut base = None;
    let mut home: Option<(usize, StateDef)> = None;
    let mut states: Vec<(usize, StateDef)> = Vec::new();
    let mut edges: Vec<(usize, TransitionDef)> = Vec::new();
    // index into `states`, or None for home
    let mut current: Option<Option<usize>> = None;

    for (i, raw) in doc.lines().enumerate() {
        let no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match keyword {
            "base" => {
                let words = tokens(rest, no)?;
                match words.as_slice() {
                    [url] if base.is_none() => base = Some(url.clone()),
                    [_] => return Err(syntax(no, "base given twice")),
                    _ => return Err(syntax(no, "base needs one URL")),
                }
            }
            "home" | "state" => {
                let words = tokens(rest, no)?;
                let [id] = words.as_slice() else {
                    return Err(syntax(no, format!("{keyword} needs one id")));
                };
                let clash = home.iter().chain(states.iter()).find(|(_, s)| &s.id == id);
                if let Some((first, _)) = clash {
                    return Err(syntax(no, format!("state `{id}` already declared on line {first}")));
                }
                if keyword == "home" {
                    if let Some((first, _)) = &home {
                        return Err(syntax(no, format!("home already declared on line {first}")));
                    }
                    home = Some((no, StateDef::new(id.clone())));
                    current = Some(None);
                } else {
                    states.push((no, StateDef::new(id.clone())));
                    current = Some(Some(states.len() - 1));
                }
            }
            "data" | "assert" => {
                let target = match current {
                    Some(None) => &mut home.as_mut().expect("home declared").1,
                    Some(Some(k)) => &mut states[k].1,
                    None => return Err(syntax(no, format!("`{keyword}` before any state"))),
                };
                let words = tokens(rest, no)?;
                if keyword == "data" {
                    let d = parse_data(&words, no)?;
                    if target.data.iter().any(|o| o.element_id() == d.element_id()) {
                        return Err(syntax(no, format!("data locator `{}` used twice", d.element_id())));
                    }
                    target.data.push(d);
                } else {
                    target.asserts.push(parse_assert(&words, no)?);
                }
            }
            "edge" => {
                edges.push((no, parse_edge(rest, no)?));
                current = None;
            }
            other => return Err(syntax(no, format!("unknown keyword `{other}`"))),
        }
    }

    let (_, home) = home.ok_or_else(|| syntax(doc.lines().count().max(1), "no home state"))?;
    let states: Vec<StateDef> = states.into_iter().map(|(_, s)| s).collect();
    let known = |id: &str| home.id == id || states.iter().any(|s| s.id == id);
    for (no, t) in &edges {
        for name in std::iter::once(&t.from).chain(&t.targets) {
            if !known(name) {
                return Err(syntax(*no, format!("undeclared state `{name}`")));
            }
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = t.targets.iter().find(|t| !seen.insert(*t)) {
            return Err(syntax(*no, format!("target `{dup}` listed twice")));
        }
    }
    let model = NavigationModel {
        base: base.unwrap_or_else(|| "/".to_owned()),
        home,
        states,
        transitions: edges.into_iter().map(|(_, t)| t).collect(),
    };
    model.validate()?;
    Ok(model)
}

fn write_state(out: &mut String, keyword: &str, s: &StateDef) {
    let _ = writeln!(out, "{keyword} {}", quote(&s.id));
    for d in &s.data {
        let _ = write!(out, "  data {} type={}", quote(&d.id), d.kind);
        if let Some(l) = &d.locator {
            let _ = write!(out, " locator={}", quote(l));
        }
        if d.required {
            out.push_str(" required");
        }
        if let Some(st) = d.stereotype {
            let _ = write!(out, " stereotype={st}");
        }
        for v in &d.values {
            let _ = write!(out, " value={}", quote(v));
        }
        out.push('\n');
    }
    for o in &s.asserts {
        let _ = write!(out, "  assert {}", o.kind);
        if let Some(id) = &o.id {
            let _ = write!(out, " id={}", quote(id));
        }
        if let Some(l) = &o.locator {
            let _ = write!(out, " locator={}", quote(l));
        }
        for v in &o.values {
            let _ = write!(out, " value={}", quote(v));
        }
        out.push('\n');
    }
}

/// Writes a model in the line notation; [`parse_graph_dsl`] reads it back
/// unchanged.
pub fn to_graph_dsl(m: &NavigationModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "base {}", quote(&m.base));
    write_state(&mut out, "home", &m.home);
    for s in &m.states {
        write_state(&mut out, "state", s);
    }
    for t in &m.transitions {
        let _ = write!(out, "edge {} -> {}", t.from, t.targets.join(", "));
        if !t.actions.is_empty() {
            let _ = write!(out, " {}", print_guard(&t.actions));
        }
        out.push('\n');
    }
    out
}
