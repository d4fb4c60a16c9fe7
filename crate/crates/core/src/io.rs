//! File formats.
//!
//! * graph JSON: `{"num_vertices": n, "edges": [[i, j], ...]}`, or a
//!   built-in name such as `builtin:w5`
//! * framework JSON: graph JSON plus `"dim"` and `"coordinates"`
//! * stress CSV: `n` rows of `n` comma separated values, no header
//! * load JSON: `{"forces": [[f_1..f_d], ...]}`

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::frameworks::{Framework, FrameworkFile};
use crate::graphs::{Graph, GraphFile};
use crate::statics::Load;
use crate::stresses::StressMatrix;
use crate::{Error, Real, Result};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

fn json_error(e: serde_json::Error) -> Error {
    Error::invalid(format!("malformed JSON: {e}"))
}

pub fn parse_graph_json(text: &str) -> Result<Graph> {
    let file: GraphFile = serde_json::from_str(text).map_err(json_error)?;
    Graph::try_from(file)
}

pub fn graph_to_json(g: &Graph) -> String {
    serde_json::to_string_pretty(&GraphFile::from(g)).expect("graph serializes")
}

/// A `builtin:` name or the path of a graph JSON file.
pub fn load_graph(source: &str) -> Result<Graph> {
    if source.starts_with("builtin:") {
        return Graph::builtin(source);
    }
    parse_graph_json(&read_text(Path::new(source))?)
}

pub fn parse_framework_json<T: Real>(text: &str) -> Result<Framework<T>> {
    let file: FrameworkFile = serde_json::from_str(text).map_err(json_error)?;
    file.into_framework()
}

pub fn framework_to_json<T: Real>(f: &Framework<T>) -> String {
    serde_json::to_string_pretty(&FrameworkFile::from(f)).expect("framework serializes")
}

pub fn load_framework<T: Real>(path: &Path) -> Result<Framework<T>> {
    parse_framework_json(&read_text(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadFile {
    pub forces: Vec<Vec<f64>>,
}

pub fn parse_load_json<T: Real>(text: &str, dim: usize) -> Result<Load<T>> {
    let file: LoadFile = serde_json::from_str(text).map_err(json_error)?;
    if let Some((i, row)) = file.forces.iter().enumerate().find(|(_, r)| r.len() != dim) {
        return Err(Error::invalid(format!("force {i} has {} components, expected {dim}", row.len())));
    }
    Load::new(DMatrix::from_fn(file.forces.len(), dim, |r, c| T::lit(file.forces[r][c])))
}

pub fn write_stress_csv<T: Real, W: Write>(omega: &StressMatrix<T>, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for row in omega.matrix().row_iter() {
        w.write_record(row.iter().map(|x| x.as_f64().to_string()))
            .map_err(|e| Error::invalid(format!("writing CSV: {e}")))?;
    }
    w.flush().map_err(|e| Error::invalid(format!("writing CSV: {e}")))
}

pub fn stress_to_csv<T: Real>(omega: &StressMatrix<T>) -> String {
    let mut buf = Vec::new();
    write_stress_csv(omega, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("CSV is UTF-8")
}

/// Parses and validates (square, symmetric, zero row sums) a stress CSV.
pub fn read_stress_csv<T: Real, R: Read>(input: R) -> Result<StressMatrix<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::invalid(format!("stress CSV row {i}: {e}")))?;
        let row = record
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| Error::invalid(format!("stress CSV row {i}: '{s}': {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::invalid(format!("stress CSV row {i} has {} values, expected {n}", r.len())));
    }
    let m = DMatrix::from_fn(n, n, |r, c| T::lit(rows[r][c]));
    let omega = StressMatrix::from_matrix(m)?;
    omega.check_row_sums(&Default::default())?;
    Ok(omega)
}

pub fn load_stress_csv<T: Real>(path: &Path) -> Result<StressMatrix<T>> {
    read_stress_csv(read_text(path)?.as_bytes())
}
