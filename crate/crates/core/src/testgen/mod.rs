//! From covering paths to data-driven test plans.
//!
//! A plan replays one path from the home page. Each step carries the UI
//! actions of the transition it came from, the input columns for the
//! fields of the page it starts on, and the assertions of the page it is
//! expected to reach. Inputs and expected values live in data rows, one
//! row per execution of the plan.

mod dictionary;
mod tabular;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{edge_origin, Action, DataField, DataType, NavigationModel, OracleDef, Stereotype};
use crate::navgraph::Path;
use crate::scalar::Weight;

pub use dictionary::{dictionary_default, DataDictionary, Picker};
pub use tabular::{apply_rows, load_tabular, read_tabular, read_tabular_str, tabular_string, write_tabular};

pub const EXPECT_PREFIX: &str = "expect:";

/// Separator between alternative expected values in one cell.
pub const VALUE_SEPARATOR: char = '|';

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepInput {
    pub field: String,
    pub column: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepOracle {
    #[serde(flatten)]
    pub oracle: OracleDef,
    pub column: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestStep {
    /// Graph edge the step was generated from.
    pub edge: String,
    pub from_state: String,
    pub to_state_expected: String,
    pub actions: Vec<Action>,
    pub inputs: Vec<StepInput>,
    pub oracles: Vec<StepOracle>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataRow {
    pub header: Vec<String>,
    pub values: Vec<String>,
    /// `expect:<oracle>` column to expected value.
    pub expected: BTreeMap<String, String>,
}

impl DataRow {
    pub fn value(&self, column: &str) -> Option<&str> {
        self.header.iter().position(|h| h == column).map(|i| self.values[i].as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestPlan {
    pub id: String,
    pub steps: Vec<TestStep>,
    pub data_rows: Vec<DataRow>,
}

impl TestPlan {
    /// Home followed by the expected state after each step.
    pub fn state_sequence(&self) -> Vec<&str> {
        let mut seq: Vec<&str> = self.steps.first().map(|s| s.from_state.as_str()).into_iter().collect();
        seq.extend(self.steps.iter().map(|s| s.to_state_expected.as_str()));
        seq
    }
}

#[derive(Debug, Error)]
pub enum TestGenError {
    #[error("edge `{0}` does not come from the model")]
    UnknownEdge(String),
    #[error("plan {plan}: required field `{field}` has no value")]
    MissingRequiredField { plan: String, field: String },
    #[error("line {line}: {message}")]
    CsvSyntax { line: u64, message: String },
    #[error("header mismatch: expected [{expected}], found [{found}]")]
    HeaderMismatch { expected: String, found: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Whether `value` is accepted by the simulated application for `field`.
pub fn is_valid_input(field: &DataField, value: Option<&str>) -> bool {
    match value {
        None | Some("") => !field.required,
        Some(v) => field.values.is_empty() || field.values.iter().any(|d| d == v),
    }
}

fn fallback(field: &DataField, picker: &mut Picker<'_>) -> String {
    match field.kind {
        DataType::Checkbox | DataType::Radio => "on".to_owned(),
        _ => picker.pick(Stereotype::String),
    }
}

fn valid_value(field: &DataField, picker: &mut Picker<'_>) -> String {
    if let Some(v) = field.values.first() {
        return v.clone();
    }
    match field.stereotype {
        Some(st) => picker.pick(st),
        None => fallback(field, picker),
    }
}

/// A value the application rejects, if the field can reject anything.
fn invalid_value(field: &DataField, picker: &mut Picker<'_>) -> Option<String> {
    if !field.values.is_empty() {
        let mut v = match field.stereotype {
            Some(st) => picker.pick(st),
            None => picker.pick(Stereotype::String),
        };
        while field.values.contains(&v) || v.is_empty() {
            v.push('~');
        }
        return Some(v);
    }
    field.required.then(String::new)
}

fn oracle_key(o: &OracleDef, state: &str, index: usize) -> String {
    o.id.clone().or_else(|| o.locator.clone()).unwrap_or_else(|| format!("{state}.{}", index + 1))
}

/// Column name unique within the plan: repeats get the step number.
fn column(used: &mut BTreeMap<String, usize>, base: String, step: usize) -> String {
    let seen = used.entry(base.clone()).or_insert(0);
    *seen += 1;
    if *seen == 1 {
        base
    } else {
        format!("{base}@{step}")
    }
}

/// One plan per path, ids `path_1`, `path_2`, ...
pub fn generate_plans<W: Weight>(
    model: &NavigationModel,
    paths: &[Path<W>],
    dict: &DataDictionary,
) -> Result<Vec<TestPlan>, TestGenError> {
    let mut picker = dict.picker();
    let mut plans = Vec::with_capacity(paths.len());
    for (p, path) in paths.iter().enumerate() {
        let plan_id = format!("path_{}", p + 1);
        let mut steps = Vec::new();
        let mut header = Vec::new();
        let mut values = Vec::new();
        let mut expected = BTreeMap::new();
        let mut used_inputs = BTreeMap::new();
        let mut used_oracles = BTreeMap::new();
        for (s, edge) in path.edges().iter().enumerate() {
            let step_no = s + 1;
            let unknown = || TestGenError::UnknownEdge(edge.to_string());
            let (t, target) = edge_origin(edge.as_str()).ok_or_else(unknown)?;
            let transition = model.transitions.get(t).ok_or_else(unknown)?;
            let branch = transition.targets.iter().position(|x| x == target).ok_or_else(unknown)?;
            let from = model.state(&transition.from).ok_or_else(unknown)?;
            let to = model.state(target).ok_or_else(unknown)?;

            // alternative targets are reached by input the page rejects
            let mut break_with = None;
            if branch > 0 {
                break_with = from.data.iter().enumerate().find_map(|(i, f)| invalid_value(f, &mut picker).map(|v| (i, v)));
            }
            let mut inputs = Vec::new();
            for (i, field) in from.data.iter().enumerate() {
                let value = match &break_with {
                    Some((k, v)) if *k == i => v.clone(),
                    _ => valid_value(field, &mut picker),
                };
                if field.required && value.is_empty() && branch == 0 {
                    return Err(TestGenError::MissingRequiredField { plan: plan_id, field: field.id.clone() });
                }
                let col = column(&mut used_inputs, field.id.clone(), step_no);
                header.push(col.clone());
                values.push(value);
                inputs.push(StepInput { field: field.id.clone(), column: col });
            }
            let mut oracles = Vec::new();
            for (i, o) in to.asserts.iter().enumerate() {
                let col = column(&mut used_oracles, format!("{EXPECT_PREFIX}{}", oracle_key(o, &to.id, i)), step_no);
                expected.insert(col.clone(), o.values.join(&VALUE_SEPARATOR.to_string()));
                oracles.push(StepOracle { oracle: o.clone(), column: col });
            }
            steps.push(TestStep {
                edge: edge.to_string(),
                from_state: from.id.clone(),
                to_state_expected: to.id.clone(),
                actions: transition.actions.clone(),
                inputs,
                oracles,
            });
        }
        plans.push(TestPlan { id: plan_id, steps, data_rows: vec![DataRow { header, values, expected }] });
    }
    Ok(plans)
}

pub fn plans_to_json(plans: &[TestPlan]) -> String {
    serde_json::to_string_pretty(plans).expect("plans serialize")
}

pub fn plans_from_json(text: &str) -> serde_json::Result<Vec<TestPlan>> {
    serde_json::from_str(text)
}
