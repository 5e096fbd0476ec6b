//! Data rows as CSV: input columns first, then `expect:` columns.

use std::collections::BTreeMap;
use std::path::Path;

use super::{DataRow, TestGenError, TestPlan, EXPECT_PREFIX};

fn full_header(row: &DataRow) -> Vec<String> {
    row.header.iter().cloned().chain(row.expected.keys().cloned()).collect()
}

pub fn tabular_string(plan: &TestPlan) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    if let Some(first) = plan.data_rows.first() {
        w.write_record(full_header(first)).expect("write to memory");
    }
    for row in &plan.data_rows {
        w.write_record(row.values.iter().chain(row.expected.values())).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("CSV of UTF-8 strings")
}

pub fn write_tabular(plan: &TestPlan, path: &Path) -> Result<(), TestGenError> {
    std::fs::write(path, tabular_string(plan))?;
    Ok(())
}

pub fn read_tabular_str(text: &str) -> Result<Vec<DataRow>, TestGenError> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| TestGenError::CsvSyntax {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let cells: Vec<String> = rec.iter().map(str::to_owned).collect();
        let Some(h) = &header else {
            if let Some(k) = cells.iter().position(|c| c.starts_with(EXPECT_PREFIX)) {
                if cells[k..].iter().any(|c| !c.starts_with(EXPECT_PREFIX)) {
                    return Err(TestGenError::CsvSyntax {
                        line,
                        message: "input columns must precede expect columns".into(),
                    });
                }
            }
            header = Some(cells);
            continue;
        };
        if cells.len() != h.len() {
            return Err(TestGenError::CsvSyntax {
                line,
                message: format!("{} values under a {}-column header", cells.len(), h.len()),
            });
        }
        let split = h.iter().position(|c| c.starts_with(EXPECT_PREFIX)).unwrap_or(h.len());
        let expected: BTreeMap<String, String> = h[split..].iter().cloned().zip(cells[split..].iter().cloned()).collect();
        rows.push(DataRow { header: h[..split].to_vec(), values: cells[..split].to_vec(), expected });
    }
    Ok(rows)
}

pub fn read_tabular(path: &Path) -> Result<Vec<DataRow>, TestGenError> {
    read_tabular_str(&std::fs::read_to_string(path)?)
}

/// Replaces the plan's rows with `rows`, each one more execution of the
/// same steps. The columns must be the plan's own.
pub fn apply_rows(plan: &mut TestPlan, rows: Vec<DataRow>) -> Result<(), TestGenError> {
    let expected = plan.data_rows.first().map(full_header).unwrap_or_default();
    for row in &rows {
        let found = full_header(row);
        let same = found.len() == expected.len() && found.iter().all(|c| expected.contains(c));
        if !same {
            return Err(TestGenError::HeaderMismatch { expected: expected.join(","), found: found.join(",") });
        }
    }
    if !rows.is_empty() {
        plan.data_rows = rows;
    }
    Ok(())
}

pub fn load_tabular(plan: &mut TestPlan, path: &Path) -> Result<(), TestGenError> {
    apply_rows(plan, read_tabular(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testgen::{DataRow, TestPlan};

    fn plan() -> TestPlan {
        TestPlan {
            id: "path_1".into(),
            steps: vec![],
            data_rows: vec![DataRow {
                header: vec!["username".into(), "password".into()],
                values: vec!["Administrador".into(), "admin, really".into()],
                expected: BTreeMap::from([("expect:texto-entrada".into(), "Welcome".into())]),
            }],
        }
    }

    #[test]
    fn header_and_one_row() {
        let text = tabular_string(&plan());
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("username,password,expect:texto-entrada"));
        assert_eq!(lines.next(), Some("Administrador,\"admin, really\",Welcome"));
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn round_trip() {
        let p = plan();
        assert_eq!(read_tabular_str(&tabular_string(&p)).unwrap(), p.data_rows);
    }

    #[test]
    fn extra_rows_become_iterations() {
        let mut p = plan();
        let text = format!("{}u2,p2,Welcome\nu3,p3,Hello\n", tabular_string(&p));
        apply_rows(&mut p, read_tabular_str(&text).unwrap()).unwrap();
        assert_eq!(p.data_rows.len(), 3);
        assert_eq!(p.data_rows[2].value("username"), Some("u3"));
    }

    #[test]
    fn arity_error_names_the_line() {
        match read_tabular_str("username,password\nx,y\nonly\n") {
            Err(TestGenError::CsvSyntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn foreign_header_is_rejected() {
        let mut p = plan();
        let rows = read_tabular_str("user,password,expect:texto-entrada\na,b,c\n").unwrap();
        assert!(matches!(apply_rows(&mut p, rows), Err(TestGenError::HeaderMismatch { .. })));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("path_1.csv");
        let p = plan();
        write_tabular(&p, &path).unwrap();
        let mut q = plan();
        load_tabular(&mut q, &path).unwrap();
        assert_eq!(p, q);
    }
}
