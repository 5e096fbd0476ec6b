//! A simulated application under test.
//!
//! The simulator interprets a navigation model: it renders each state as a
//! page, resolves the actions of a step on that page, and follows the
//! matching transition. Faults can be injected to check that the
//! generated plans notice them. Verdicts come only from what the rendered
//! pages show, never from the simulator's own notion of the current state.

mod faults;
mod report;

use std::collections::BTreeMap;
use std::time::Instant;

use thiserror::Error;

use crate::html::ElementNode;
use crate::locator::{locate, LocateError, PageSnapshot};
use crate::models::{Action, DataType, NavigationModel, OracleDef, OracleType, StateDef};
use crate::testgen::{is_valid_input, TestPlan, VALUE_SEPARATOR};

pub use faults::{parse_faults, print_faults, FaultParseError};
pub use report::{CheckKind, RunReport, Status, Summary, Verdict};

/// Marker carrying the state id in the page head; only for humans reading
/// rendered pages.
pub const STATE_MARKER: &str = "navtest-state";

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Fault {
    /// Successful use of transition `transition` (0-based) lands on
    /// `target` instead of its first declared target.
    BrokenLink { transition: usize, target: String },
    /// The element `locator` on `state` shows `text` instead.
    TextMutation { state: String, locator: String, text: String },
    /// The element `element` is absent from `state`.
    MissingElement { state: String, element: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("no transition from `{state}` matches actions {actions}")]
    NoSuchTransition { state: String, actions: String },
    #[error("`{target}` not found on the page")]
    UnresolvedTarget { target: String },
    #[error(transparent)]
    Locate(#[from] LocateError),
    #[error("invalid fault: {0}")]
    InvalidFault(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimConfig {
    pub model: NavigationModel,
    pub faults: Vec<Fault>,
}

impl SimConfig {
    pub fn new(model: NavigationModel) -> Self {
        Self { model, faults: Vec::new() }
    }

    pub fn with_faults(model: NavigationModel, faults: Vec<Fault>) -> Result<Self, SimError> {
        let cfg = Self { model, faults };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Every fault must name entities of the model.
    pub fn validate(&self) -> Result<(), SimError> {
        let m = &self.model;
        let state = |id: &str| m.state(id).ok_or_else(|| SimError::InvalidFault(format!("unknown state `{id}`")));
        for f in &self.faults {
            match f {
                Fault::BrokenLink { transition, target } => {
                    if *transition >= m.transitions.len() {
                        return Err(SimError::InvalidFault(format!("no transition {}", transition + 1)));
                    }
                    state(target)?;
                }
                Fault::TextMutation { state: s, locator, .. } => {
                    let st = state(s)?;
                    if !st.asserts.iter().any(|o| o.locator.as_deref() == Some(locator.as_str())) {
                        return Err(SimError::InvalidFault(format!("state `{s}` asserts nothing on `{locator}`")));
                    }
                }
                Fault::MissingElement { state: s, element } => {
                    let st = state(s)?;
                    let known = st.data.iter().any(|d| d.element_id() == element)
                        || st.asserts.iter().any(|o| o.locator.as_deref() == Some(element.as_str()))
                        || m.outgoing(s).any(|(_, t)| t.actions.iter().any(|a| &a.target == element));
                    if !known {
                        return Err(SimError::InvalidFault(format!("state `{s}` has no element `{element}`")));
                    }
                }
            }
        }
        Ok(())
    }
}

fn field_element(id: &str, kind: DataType) -> ElementNode {
    let el = match kind {
        DataType::Textarea => ElementNode::new("textarea"),
        DataType::SelectOne => ElementNode::new("select"),
        DataType::SelectMultiple => ElementNode::new("select").with_attr("multiple", "multiple"),
        other => ElementNode::new("input").with_attr("type", other.as_str()),
    };
    el.with_attr("id", id).with_attr("name", id)
}

fn oracle_element(o: &OracleDef, existing: Option<ElementNode>) -> Option<ElementNode> {
    let loc = o.locator.as_deref()?;
    let first = o.values.first().cloned().unwrap_or_default();
    let el = match (o.kind, existing) {
        (OracleType::Text, Some(mut el)) => {
            el.text = first;
            el
        }
        (OracleType::Value, Some(el)) => el.with_attr("value", first),
        (OracleType::NotText | OracleType::NotValue, Some(el)) => el,
        (OracleType::Text, None) => ElementNode::new("span").with_attr("id", loc).with_text(first),
        (OracleType::NotText, None) => ElementNode::new("span").with_attr("id", loc),
        (OracleType::Value, None) => {
            ElementNode::new("input").with_attr("type", "text").with_attr("id", loc).with_attr("value", first)
        }
        (OracleType::NotValue, None) => ElementNode::new("input").with_attr("type", "text").with_attr("id", loc),
        (OracleType::TextPresent | OracleType::TextNotPresent, _) => return None,
    };
    Some(el)
}

fn body_elements(model: &NavigationModel, state: &StateDef) -> Vec<ElementNode> {
    let mut els: Vec<ElementNode> = Vec::new();
    let mut by_id: BTreeMap<String, usize> = BTreeMap::new();
    for d in &state.data {
        by_id.insert(d.element_id().to_owned(), els.len());
        els.push(field_element(d.element_id(), d.kind));
    }
    for o in &state.asserts {
        match (o.kind, o.locator.as_deref()) {
            (OracleType::TextPresent, _) => {
                els.extend(o.values.iter().map(|v| ElementNode::new("p").with_text(v)));
            }
            (_, Some(loc)) => match by_id.get(loc) {
                Some(&i) => {
                    let current = std::mem::take(&mut els[i]);
                    els[i] = oracle_element(o, Some(current)).expect("locator-scoped");
                }
                None => {
                    if let Some(el) = oracle_element(o, None) {
                        by_id.insert(loc.to_owned(), els.len());
                        els.push(el);
                    }
                }
            },
            _ => {}
        }
    }
    for (_, t) in model.outgoing(&state.id) {
        for a in &t.actions {
            if a.target.starts_with('/') || by_id.contains_key(&a.target) {
                continue;
            }
            by_id.insert(a.target.clone(), els.len());
            els.push(ElementNode::new("button").with_attr("id", a.target.as_str()));
        }
    }
    els
}

fn apply_faults(state: &str, faults: &[Fault], els: &mut Vec<ElementNode>) {
    for f in faults {
        match f {
            Fault::TextMutation { state: s, locator, text } if s == state => {
                for el in els.iter_mut().filter(|e| e.attr("id") == Some(locator)) {
                    if el.tag == "input" {
                        el.attrs.insert("value".into(), text.clone());
                    } else {
                        el.text = text.clone();
                    }
                }
            }
            Fault::MissingElement { state: s, element } if s == state => {
                els.retain(|e| e.attr("id") != Some(element) && e.attr("name") != Some(element));
            }
            _ => {}
        }
    }
}

fn render(model: &NavigationModel, faults: &[Fault], id: &str) -> Result<PageSnapshot, SimError> {
    let state = model.state(id).ok_or_else(|| SimError::UnknownState(id.to_owned()))?;
    let mut els = body_elements(model, state);
    apply_faults(id, faults, &mut els);
    let head = ElementNode::new("head").with_child(
        ElementNode::new("meta").with_attr("name", STATE_MARKER).with_attr("content", id),
    );
    let body = els.into_iter().fold(ElementNode::new("body"), ElementNode::with_child);
    Ok(PageSnapshot::single(vec![ElementNode::new("html").with_child(head).with_child(body)]))
}

/// The page a browser would show for `state`, without faults.
pub fn render_state(model: &NavigationModel, state: &str) -> Result<PageSnapshot, SimError> {
    render(model, &[], state)
}

/// Result of recognising the page a step landed on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Identification {
    Identified(String),
    NoMatch,
    Ambiguous(Vec<String>),
}

fn fingerprint(s: &StateDef) -> Vec<&str> {
    let mut fp: Vec<&str> = s.data.iter().map(|d| d.element_id()).collect();
    fp.extend(s.asserts.iter().filter(|o| o.kind.is_locator_scoped()).filter_map(|o| o.locator.as_deref()));
    fp.sort_unstable();
    fp.dedup();
    fp
}

/// The state whose fingerprint (field and assertion locators) resolves
/// completely on the page and is the largest such fingerprint.
pub fn identify_state(model: &NavigationModel, page: &PageSnapshot) -> Identification {
    let mut best: Vec<&str> = Vec::new();
    let mut best_size = 0;
    for s in model.all_states() {
        let fp = fingerprint(s);
        if !fp.iter().all(|l| matches!(locate(page, l), Ok(Some(_)))) {
            continue;
        }
        if best.is_empty() || fp.len() > best_size {
            best = vec![&s.id];
            best_size = fp.len();
        } else if fp.len() == best_size {
            best.push(&s.id);
        }
    }
    match best.as_slice() {
        [] => Identification::NoMatch,
        [one] => Identification::Identified((*one).to_owned()),
        many => Identification::Ambiguous(many.iter().map(|s| s.to_string()).collect()),
    }
}

/// Outcome of one assertion: whether it held and what the page showed.
pub fn evaluate_oracle(page: &PageSnapshot, oracle: &OracleDef, expected: &str) -> (bool, String) {
    let alternatives: Vec<&str> = expected.split(VALUE_SEPARATOR).collect();
    let element = |loc: &str| locate(page, loc).ok().flatten().and_then(|r| page.resolve(&r));
    let texts = || (0..page.frames.len()).flat_map(|f| page.elements(f)).map(|(_, e)| e.text.clone()).collect::<Vec<_>>();
    let loc = oracle.locator.as_deref().unwrap_or("");
    match oracle.kind {
        OracleType::Text | OracleType::NotText => {
            let shown = element(loc).map(|e| e.text.trim().to_owned());
            let equal = shown.as_deref().is_some_and(|t| alternatives.contains(&t));
            let ok = if oracle.kind == OracleType::Text { equal } else { !equal };
            (ok, shown.unwrap_or_else(|| format!("<no element {loc}>")))
        }
        OracleType::Value | OracleType::NotValue => {
            let el = element(loc);
            let shown = el.map(|e| e.attr("value").unwrap_or("").to_owned());
            let equal = shown.as_deref().is_some_and(|t| alternatives.contains(&t));
            let ok = if oracle.kind == OracleType::Value { equal } else { !equal };
            (ok, shown.unwrap_or_else(|| format!("<no element {loc}>")))
        }
        OracleType::TextPresent | OracleType::TextNotPresent => {
            let all = texts();
            let wanted: Vec<&str> = alternatives.into_iter().filter(|a| !a.is_empty()).collect();
            let present: Vec<&str> = wanted.iter().copied().filter(|w| all.iter().any(|t| t.contains(w))).collect();
            if oracle.kind == OracleType::TextPresent {
                let missing: Vec<&str> = wanted.iter().copied().filter(|w| !present.contains(w)).collect();
                let actual = if missing.is_empty() { expected.to_owned() } else { format!("<absent: {}>", missing.join(", ")) };
                (missing.is_empty(), actual)
            } else {
                let actual = if present.is_empty() { "<absent>".to_owned() } else { format!("<present: {}>", present.join(", ")) };
                (present.is_empty(), actual)
            }
        }
    }
}

/// One browsing session on the simulated application.
pub struct Simulator<'a> {
    cfg: &'a SimConfig,
    state: String,
    page: PageSnapshot,
}

impl<'a> Simulator<'a> {
    /// Opens the home page.
    pub fn new(cfg: &'a SimConfig) -> Result<Self, SimError> {
        let home = cfg.model.home.id.clone();
        let page = render(&cfg.model, &cfg.faults, &home)?;
        Ok(Self { cfg, state: home, page })
    }

    pub fn page(&self) -> &PageSnapshot {
        &self.page
    }

    /// Internal state id; test oracles must not use it.
    pub fn current_state(&self) -> &str {
        &self.state
    }

    fn find_transition(&self, actions: &[Action]) -> Result<usize, SimError> {
        let outgoing: Vec<_> = self.cfg.model.outgoing(&self.state).collect();
        outgoing
            .iter()
            .find(|(_, t)| t.actions == actions)
            .or_else(|| match actions.first() {
                Some(a) => outgoing.iter().find(|(_, t)| t.actions.first().is_some_and(|b| b.target == a.target)),
                None => None,
            })
            .map(|(i, _)| *i)
            .ok_or_else(|| SimError::NoSuchTransition {
                state: self.state.clone(),
                actions: crate::models::print_guard(actions),
            })
    }

    /// Fills `inputs` (field id to value) and performs `actions`.
    pub fn step(&mut self, actions: &[Action], inputs: &BTreeMap<String, String>) -> Result<&PageSnapshot, SimError> {
        let model = &self.cfg.model;
        let here = model.state(&self.state).ok_or_else(|| SimError::UnknownState(self.state.clone()))?;
        for field in here.data.iter().filter(|d| inputs.contains_key(&d.id)) {
            if locate(&self.page, field.element_id())?.is_none() {
                return Err(SimError::UnresolvedTarget { target: field.element_id().to_owned() });
            }
        }
        for a in actions {
            if locate(&self.page, &a.target)?.is_none() {
                return Err(SimError::UnresolvedTarget { target: a.target.clone() });
            }
        }
        let index = self.find_transition(actions)?;
        let t = &model.transitions[index];
        let valid = here.data.iter().all(|d| is_valid_input(d, inputs.get(&d.id).map(String::as_str)));
        let next = if valid {
            self.cfg
                .faults
                .iter()
                .find_map(|f| match f {
                    Fault::BrokenLink { transition, target } if *transition == index => Some(target.clone()),
                    _ => None,
                })
                .unwrap_or_else(|| t.targets[0].clone())
        } else if t.targets.contains(&self.state) {
            self.state.clone()
        } else {
            t.targets.get(1).cloned().unwrap_or_else(|| self.state.clone())
        };
        self.page = render(model, &self.cfg.faults, &next)?;
        self.state = next;
        Ok(&self.page)
    }
}

fn white_box(plan: &str, row: usize, step: usize, expected: &str, page: &PageSnapshot, model: &NavigationModel) -> Verdict {
    let (status, actual, detail) = match identify_state(model, page) {
        Identification::Identified(s) if s == expected => (Status::Pass, s, String::new()),
        Identification::Identified(s) => (Status::Fail, s, "landed on a different state".to_owned()),
        Identification::NoMatch => (Status::Fail, "<none>".to_owned(), "page matches no state".to_owned()),
        Identification::Ambiguous(v) => {
            (Status::Fail, format!("<ambiguous: {}>", v.join(", ")), "page matches several states equally".to_owned())
        }
    };
    Verdict { plan: plan.to_owned(), row, step, check: 0, kind: CheckKind::WhiteBox, status, expected: expected.to_owned(), actual, detail }
}

/// Replays every data row of `plan` from the home page.
pub fn run_plan(plan: &TestPlan, cfg: &SimConfig) -> RunReport {
    let started = Instant::now();
    let mut verdicts = Vec::new();
    let mut steps_run = 0;
    let home = &cfg.model.home.id;
    for (r, row) in plan.data_rows.iter().enumerate() {
        let row_no = r + 1;
        let mut sim = match Simulator::new(cfg) {
            Ok(s) => s,
            Err(e) => {
                verdicts.push(Verdict::error(&plan.id, row_no, 0, home, &e));
                continue;
            }
        };
        verdicts.push(white_box(&plan.id, row_no, 0, home, sim.page(), &cfg.model));
        for (s, step) in plan.steps.iter().enumerate() {
            let step_no = s + 1;
            steps_run += 1;
            let inputs: BTreeMap<String, String> = step
                .inputs
                .iter()
                .filter_map(|i| row.value(&i.column).map(|v| (i.field.clone(), v.to_owned())))
                .collect();
            match sim.step(&step.actions, &inputs) {
                Ok(page) => verdicts.push(white_box(&plan.id, row_no, step_no, &step.to_state_expected, page, &cfg.model)),
                Err(e) => verdicts.push(Verdict::error(&plan.id, row_no, step_no, &step.to_state_expected, &e)),
            }
            for (k, o) in step.oracles.iter().enumerate() {
                let expected = row.expected.get(&o.column).cloned().unwrap_or_else(|| o.oracle.values.join("|"));
                let (ok, actual) = evaluate_oracle(sim.page(), &o.oracle, &expected);
                verdicts.push(Verdict {
                    plan: plan.id.clone(),
                    row: row_no,
                    step: step_no,
                    check: k + 1,
                    kind: CheckKind::BlackBox,
                    status: if ok { Status::Pass } else { Status::Fail },
                    expected: if expected.is_empty() { "<empty>".to_owned() } else { expected },
                    actual: if actual.is_empty() { "<empty>".to_owned() } else { actual },
                    detail: format!("{} {}", o.oracle.kind, o.oracle.locator.as_deref().unwrap_or("page")),
                });
            }
        }
    }
    RunReport::new(1, steps_run, verdicts, started.elapsed())
}

pub fn run_plans(plans: &[TestPlan], cfg: &SimConfig) -> RunReport {
    plans.iter().map(|p| run_plan(p, cfg)).fold(RunReport::empty(), RunReport::merge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpp::solve_cpp;
    use crate::fixtures::WEBADMIN_XML;
    use crate::models::{lower_to_graph, parse_graph_dsl, parse_xml};
    use crate::navgraph::make_strongly_connected;
    use crate::scalar::Rational;
    use crate::testgen::{dictionary_default, generate_plans};

    fn paper() -> NavigationModel {
        parse_xml(WEBADMIN_XML).unwrap()
    }

    fn plans(m: &NavigationModel) -> Vec<TestPlan> {
        let g = make_strongly_connected(&lower_to_graph::<Rational>(m)).unwrap();
        generate_plans(m, &solve_cpp(&g).unwrap().paths, &dictionary_default(5)).unwrap()
    }

    fn login_inputs() -> BTreeMap<String, String> {
        BTreeMap::from([("username".into(), "Administrador".into()), ("password".into(), "admin".into())])
    }

    #[test]
    fn init_page_shows_welcome() {
        let page = render_state(&paper(), "init").unwrap();
        let r = locate(&page, "texto-entrada").unwrap().unwrap();
        assert_eq!(page.resolve(&r).unwrap().text, "Welcome");
    }

    #[test]
    fn bare_state_has_empty_body() {
        let m = parse_graph_dsl("home h\n").unwrap();
        let page = render_state(&m, "h").unwrap();
        let html = &page.frames[0].elements[0];
        assert_eq!(html.children[1].tag, "body");
        assert!(html.children[1].children.is_empty());
        assert_eq!(render_state(&m, "x"), Err(SimError::UnknownState("x".into())));
    }

    #[test]
    fn missing_element_fault() {
        let faults = vec![Fault::MissingElement { state: "login".into(), element: "username".into() }];
        let cfg = SimConfig::with_faults(paper(), faults).unwrap();
        let sim = Simulator::new(&cfg).unwrap();
        assert_eq!(locate(sim.page(), "username").unwrap(), None);
        assert_ne!(identify_state(&cfg.model, sim.page()), Identification::Identified("login".into()));
    }

    #[test]
    fn login_reaches_init() {
        let cfg = SimConfig::new(paper());
        let mut sim = Simulator::new(&cfg).unwrap();
        assert_eq!(identify_state(&cfg.model, sim.page()), Identification::Identified("login".into()));
        let page = sim.step(&[Action::click("frmDatos_0")], &login_inputs()).unwrap().clone();
        assert_eq!(identify_state(&cfg.model, &page), Identification::Identified("init".into()));
    }

    #[test]
    fn missing_required_input_stays() {
        let mut m = paper();
        m.home.data[1].required = true;
        m.home.data[1].values.clear();
        let cfg = SimConfig::new(m);
        let mut sim = Simulator::new(&cfg).unwrap();
        let mut inputs = login_inputs();
        inputs.remove("password");
        sim.step(&[Action::click("frmDatos_0")], &inputs).unwrap();
        assert_eq!(sim.current_state(), "login");
    }

    #[test]
    fn broken_link_redirects() {
        let faults = vec![Fault::BrokenLink { transition: 0, target: "login".into() }];
        let cfg = SimConfig::with_faults(paper(), faults).unwrap();
        let mut sim = Simulator::new(&cfg).unwrap();
        sim.step(&[Action::click("frmDatos_0")], &login_inputs()).unwrap();
        assert_eq!(sim.current_state(), "login");
        let report = run_plans(&plans(&cfg.model), &cfg);
        assert!(report.verdicts.iter().any(|v| v.kind == CheckKind::WhiteBox && v.status == Status::Fail && v.expected == "init"));
    }

    #[test]
    fn unknown_action() {
        let cfg = SimConfig::new(paper());
        let mut sim = Simulator::new(&cfg).unwrap();
        assert!(matches!(sim.step(&[Action::click("nope")], &login_inputs()), Err(SimError::UnresolvedTarget { .. })));
        assert!(matches!(sim.step(&[Action::click("username")], &login_inputs()), Err(SimError::NoSuchTransition { .. })));
    }

    #[test]
    fn clean_run_passes() {
        let m = paper();
        let report = run_plans(&plans(&m), &SimConfig::new(m));
        assert_eq!(report.summary.failed, 0, "{}", report.to_text());
        assert!(report.summary.passed > 0);
    }

    #[test]
    fn text_mutation_is_reported() {
        let faults = vec![Fault::TextMutation { state: "init".into(), locator: "texto-entrada".into(), text: "Goodbye".into() }];
        let cfg = SimConfig::with_faults(paper(), faults).unwrap();
        let report = run_plans(&plans(&cfg.model), &cfg);
        let fail = report.verdicts.iter().find(|v| v.status == Status::Fail).unwrap();
        assert_eq!((fail.kind, fail.expected.as_str(), fail.actual.as_str()), (CheckKind::BlackBox, "Welcome", "Goodbye"));
    }

    #[test]
    fn identical_fingerprints_are_ambiguous() {
        let m = parse_graph_dsl("home a\n  data q\nstate b\n  data q\nedge a -> b [go,click]\n").unwrap();
        let page = render_state(&m, "a").unwrap();
        assert_eq!(identify_state(&m, &page), Identification::Ambiguous(vec!["a".into(), "b".into()]));
    }

    #[test]
    fn oracle_semantics() {
        let page = PageSnapshot::from_html("<span id=m>Done</span><p>Total: 10</p><input id=v value=3>").unwrap();
        let o = |kind, loc: Option<&str>| OracleDef { id: None, locator: loc.map(Into::into), kind, values: vec![] };
        assert!(evaluate_oracle(&page, &o(OracleType::Text, Some("m")), "Done").0);
        assert!(evaluate_oracle(&page, &o(OracleType::Text, Some("m")), "Ok|Done").0);
        assert!(!evaluate_oracle(&page, &o(OracleType::NotText, Some("m")), "Done").0);
        assert!(evaluate_oracle(&page, &o(OracleType::TextPresent, None), "Total").0);
        assert!(!evaluate_oracle(&page, &o(OracleType::TextPresent, None), "Total|Missing").0);
        assert!(evaluate_oracle(&page, &o(OracleType::TextNotPresent, None), "Error").0);
        assert!(evaluate_oracle(&page, &o(OracleType::Value, Some("v")), "3").0);
        assert!(evaluate_oracle(&page, &o(OracleType::NotValue, Some("v")), "4").0);
        assert_eq!(evaluate_oracle(&page, &o(OracleType::Text, Some("zz")), "x"), (false, "<no element zz>".into()));
    }

    #[test]
    fn invalid_faults_are_rejected() {
        let bad = [
            Fault::BrokenLink { transition: 3, target: "init".into() },
            Fault::BrokenLink { transition: 0, target: "nowhere".into() },
            Fault::TextMutation { state: "login".into(), locator: "texto-entrada".into(), text: "x".into() },
            Fault::MissingElement { state: "init".into(), element: "username".into() },
        ];
        for f in bad {
            assert!(SimConfig::with_faults(paper(), vec![f.clone()]).is_err(), "{f:?}");
        }
    }
}
