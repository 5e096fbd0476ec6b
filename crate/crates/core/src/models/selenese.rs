//! Record-and-playback scripts (Selenese HTML tables) as navigation models.
//!
//! A script is linear: `s0` is the page opened by the first row, and every
//! click row moves to a fresh state. Several scripts merge into one model:
//! states reached by the same sequence of rows are shared, so scripts
//! diverge into branches after their common prefix.

use std::collections::HashMap;

use super::{Action, DataField, DataType, ModelError, NavigationModel, OracleDef, OracleType, StateDef, TransitionDef};
use crate::html::{parse_html, ElementNode};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Row {
    command: String,
    target: String,
    value: String,
}

struct Script {
    base: Option<String>,
    rows: Vec<Row>,
}

fn find<'a>(roots: &'a [ElementNode], tag: &str) -> Vec<&'a ElementNode> {
    roots.iter().flat_map(|r| r.descendants()).filter(|e| e.tag == tag).collect()
}

fn read_script(doc: &str) -> Result<Script, ModelError> {
    let roots = parse_html(doc).map_err(|e| ModelError::HtmlSyntax(e.to_string()))?;
    let base = find(&roots, "link")
        .into_iter()
        .find(|l| l.attr("rel") == Some("selenium.base"))
        .and_then(|l| l.attr("href"))
        .map(str::to_owned);
    let table = *find(&roots, "table").first().ok_or_else(|| ModelError::HtmlSyntax("no <table> found".into()))?;
    let mut rows = Vec::new();
    for section in &table.children {
        let trs: Vec<&ElementNode> = match section.tag.as_str() {
            "thead" => continue,
            "tr" => vec![section],
            _ => section.children.iter().filter(|c| c.tag == "tr").collect(),
        };
        for tr in trs {
            let cells: Vec<&ElementNode> = tr.children.iter().filter(|c| c.tag == "td").collect();
            match cells.as_slice() {
                // title rows span the whole table
                [] | [_] => {}
                [c, t, v] => rows.push(Row {
                    command: c.text.trim().to_owned(),
                    target: t.text.trim().to_owned(),
                    value: v.text.trim().to_owned(),
                }),
                other => {
                    return Err(ModelError::HtmlSyntax(format!(
                        "row {} has {} cells, expected command, target and value",
                        rows.len() + 1,
                        other.len()
                    )))
                }
            }
        }
    }
    match rows.first() {
        None => return Err(ModelError::HtmlSyntax("script has no rows; expected an `open` command".into())),
        Some(r) if r.command != "open" => {
            return Err(ModelError::HtmlSyntax(format!("first command is `{}`, expected `open`", r.command)))
        }
        Some(_) => {}
    }
    Ok(Script { base, rows })
}

/// Strips Selenium locator prefixes that name the attribute or strategy.
fn element_target(locator: &str) -> String {
    for prefix in ["id=", "name=", "identifier=", "xpath=", "link="] {
        if let Some(rest) = locator.strip_prefix(prefix) {
            return rest.to_owned();
        }
    }
    locator.to_owned()
}

fn option_value(value: &str) -> String {
    for prefix in ["label=", "value="] {
        if let Some(rest) = value.strip_prefix(prefix) {
            return rest.to_owned();
        }
    }
    value.to_owned()
}

fn base_url(script: &Script) -> String {
    let open = &script.rows[0].target;
    match &script.base {
        Some(b) if !open.contains("://") => {
            format!("{}/{}", b.trim_end_matches('/'), open.trim_start_matches('/'))
        }
        _ => open.clone(),
    }
}

struct Merger {
    model: NavigationModel,
    by_prefix: HashMap<Vec<Row>, String>,
}

impl Merger {
    fn add_field(&mut self, state: &str, target: &str, value: &str, kind: DataType) {
        let s = self.model.state_mut(state).expect("state exists");
        let id = element_target(target);
        match s.data.iter_mut().find(|d| d.id == id) {
            Some(d) => {
                if !d.values.iter().any(|v| v == value) {
                    d.values.push(value.to_owned());
                }
            }
            None => {
                let mut d = DataField::new(id, kind);
                d.values.push(value.to_owned());
                s.data.push(d);
            }
        }
    }

    fn add_oracle(&mut self, state: &str, o: OracleDef) {
        let s = self.model.state_mut(state).expect("state exists");
        if !s.asserts.contains(&o) {
            s.asserts.push(o);
        }
    }

    fn step(&mut self, from: &str, prefix: &[Row], target: &str) -> String {
        let next = match self.by_prefix.get(prefix) {
            Some(id) => id.clone(),
            None => {
                let id = format!("s{}", self.model.states.len() + 1);
                self.model.states.push(StateDef::new(id.clone()));
                self.by_prefix.insert(prefix.to_vec(), id.clone());
                id
            }
        };
        let actions = vec![Action::click(element_target(target))];
        match self.model.transitions.iter_mut().find(|t| t.from == from && t.actions == actions) {
            Some(t) => {
                if !t.targets.contains(&next) {
                    t.targets.push(next.clone());
                }
            }
            None => self.model.transitions.push(TransitionDef { from: from.to_owned(), actions, targets: vec![next.clone()] }),
        }
        next
    }

    fn replay(&mut self, script: &Script) -> Result<(), ModelError> {
        let mut current = self.model.home.id.clone();
        let mut prefix = Vec::new();
        for row in &script.rows[1..] {
            prefix.push(row.clone());
            let locator = element_target(&row.target);
            match row.command.as_str() {
                "type" => {
                    let kind = if locator.to_ascii_lowercase().contains("pass") { DataType::Password } else { DataType::Text };
                    self.add_field(&current, &row.target, &row.value, kind);
                }
                "select" => self.add_field(&current, &row.target, &option_value(&row.value), DataType::SelectOne),
                "click" | "clickAndWait" => current = self.step(&current, &prefix, &row.target),
                "assertText" | "verifyText" => self.add_oracle(
                    &current,
                    OracleDef { id: None, locator: Some(locator), kind: OracleType::Text, values: vec![row.value.clone()] },
                ),
                "assertValue" => self.add_oracle(
                    &current,
                    OracleDef { id: None, locator: Some(locator), kind: OracleType::Value, values: vec![row.value.clone()] },
                ),
                "assertTextPresent" => {
                    let text = if row.target.is_empty() { &row.value } else { &row.target };
                    self.add_oracle(
                        &current,
                        OracleDef { id: None, locator: None, kind: OracleType::TextPresent, values: vec![text.clone()] },
                    );
                }
                other => return Err(ModelError::UnsupportedCommand(other.to_owned())),
            }
        }
        Ok(())
    }
}

pub fn parse_rnp_script(doc: &str) -> Result<NavigationModel, ModelError> {
    parse_rnp_scripts(&[doc])
}

/// Merges several recordings into one model sharing `s0` as home.
pub fn parse_rnp_scripts(docs: &[&str]) -> Result<NavigationModel, ModelError> {
    let scripts = docs.iter().map(|d| read_script(d)).collect::<Result<Vec<_>, _>>()?;
    let first = scripts.first().ok_or_else(|| ModelError::HtmlSyntax("no scripts given".into()))?;
    let mut merger =
        Merger { model: NavigationModel::new(base_url(first), StateDef::new("s0")), by_prefix: HashMap::new() };
    for s in &scripts {
        merger.replay(s)?;
    }
    merger.model.validate()?;
    Ok(merger.model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{SCRIPT_PROFILE_HTML, SCRIPT_SEARCH_HTML};

    fn script(rows: &[(&str, &str, &str)]) -> String {
        let mut s = String::from(
            "<html><head><link rel=\"selenium.base\" href=\"http://localhost:8080/\"></head><body>\
             <table><thead><tr><td colspan=\"3\">t</td></tr></thead><tbody>",
        );
        for (c, t, v) in rows {
            s.push_str(&format!("<tr><td>{c}</td><td>{t}</td><td>{v}</td></tr>"));
        }
        s.push_str("</tbody></table></body></html>");
        s
    }

    #[test]
    fn linear_script() {
        let m = parse_rnp_script(&script(&[
            ("open", "/", ""),
            ("type", "username", "Administrador"),
            ("click", "frmDatos_0", ""),
            ("assertTextPresent", "Welcome", ""),
        ]))
        .unwrap();
        assert_eq!(m.base, "http://localhost:8080/");
        assert_eq!(m.home.id, "s0");
        assert_eq!(m.states.len(), 1);
        assert_eq!(m.transitions.len(), 1);
        assert_eq!(m.home.data.len(), 1);
        assert_eq!(m.home.data[0].values, vec!["Administrador"]);
        let s1 = m.state("s1").unwrap();
        assert_eq!(s1.asserts[0].kind, OracleType::TextPresent);
        assert_eq!(s1.asserts[0].values, vec!["Welcome"]);
    }

    #[test]
    fn empty_table() {
        assert!(matches!(parse_rnp_script(&script(&[])), Err(ModelError::HtmlSyntax(_))));
        assert!(matches!(parse_rnp_script("<p>no table</p>"), Err(ModelError::HtmlSyntax(_))));
        assert!(matches!(parse_rnp_script(&script(&[("click", "x", "")])), Err(ModelError::HtmlSyntax(_))));
    }

    #[test]
    fn unsupported_command_is_named() {
        let err = parse_rnp_script(&script(&[("open", "/", ""), ("dragAndDrop", "a", "b")])).unwrap_err();
        assert_eq!(err, ModelError::UnsupportedCommand("dragAndDrop".into()));
    }

    #[test]
    fn locator_prefixes_and_select() {
        let m = parse_rnp_script(&script(&[
            ("open", "/", ""),
            ("select", "id=country", "label=Spain"),
            ("type", "name=password", "x"),
            ("clickAndWait", "id=go", ""),
            ("assertText", "id=msg", "ok"),
        ]))
        .unwrap();
        assert_eq!(m.home.data[0].kind, DataType::SelectOne);
        assert_eq!(m.home.data[0].values, vec!["Spain"]);
        assert_eq!(m.home.data[1].kind, DataType::Password);
        assert_eq!(m.transitions[0].actions[0].target, "go");
        assert_eq!(m.states[0].asserts[0].locator.as_deref(), Some("msg"));
    }

    #[test]
    fn shared_prefix_merges() {
        let m = parse_rnp_scripts(&[SCRIPT_SEARCH_HTML, SCRIPT_PROFILE_HTML]).unwrap();
        let branching: Vec<_> =
            m.all_states().filter(|s| m.outgoing(&s.id).map(|(_, t)| t.targets.len()).sum::<usize>() > 1).collect();
        assert_eq!(branching.len(), 1);
        assert_eq!(branching[0].id, "s1");
        assert_eq!(m.states.len(), 3);
        assert_eq!(m.transitions.len(), 3);
    }

    #[test]
    fn identical_scripts_merge_to_one() {
        let doc = script(&[("open", "/", ""), ("click", "a", ""), ("click", "b", "")]);
        assert_eq!(parse_rnp_scripts(&[&doc, &doc]).unwrap(), parse_rnp_script(&doc).unwrap());
    }
}
