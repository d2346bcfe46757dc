//! CSV datasets with a header row and one class column.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use crate::classifier::{Dataset, MissingPolicy};
use crate::dd::Variable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetOptions {
    /// Class column name; the last column when `None`.
    pub class_column: Option<String>,
    /// Class value counted as positive; the lexicographically largest class
    /// value when `None`.
    pub positive: Option<String>,
    /// Raw cell text → value label, applied to feature cells (e.g. `y → +`).
    pub value_map: HashMap<String, String>,
    /// Cell text marking a missing value.
    pub missing: String,
    pub missing_policy: MissingPolicy,
}

impl Default for DatasetOptions {
    fn default() -> Self {
        DatasetOptions {
            class_column: None,
            positive: None,
            value_map: HashMap::new(),
            missing: "?".into(),
            missing_policy: MissingPolicy::Skip,
        }
    }
}

impl DatasetOptions {
    /// `y → +`, `n → -`, `?` missing: the encoding of roll-call vote data.
    pub fn votes() -> Self {
        DatasetOptions {
            value_map: [("y", "+"), ("n", "-")]
                .into_iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            ..DatasetOptions::default()
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    let (line, message) = match e.position() {
        Some(p) => (p.line() as usize, e.to_string()),
        None => (0, e.to_string()),
    };
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        _ => Error::parse(line, 1, message),
    }
}

/// Value labels in a canonical order: `-` before `+` when those are the only
/// labels, otherwise sorted.
fn label_order(seen: BTreeSet<String>) -> Vec<String> {
    let binary: BTreeSet<String> = ["-".to_string(), "+".to_string()].into();
    if !seen.is_empty() && seen.is_subset(&binary) {
        return vec!["-".into(), "+".into()];
    }
    seen.into_iter().collect()
}

pub fn parse_dataset(text: &str, opts: &DatasetOptions) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(String::from)
        .collect();
    if header.len() < 2 {
        return Err(Error::parse(
            1,
            1,
            "dataset needs a class column and at least one feature",
        ));
    }
    let class_idx = match &opts.class_column {
        None => header.len() - 1,
        Some(c) => header
            .iter()
            .position(|h| h == c)
            .ok_or_else(|| Error::parse(1, 1, format!("no column named {c:?}")))?,
    };
    let feature_cols: Vec<usize> = (0..header.len()).filter(|&i| i != class_idx).collect();
    let mut raw: Vec<(usize, Vec<Option<String>>, String)> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let cells: Vec<Option<String>> = feature_cols
            .iter()
            .map(|&i| {
                let cell = &rec[i];
                if cell == opts.missing && opts.missing_policy == MissingPolicy::Skip {
                    None
                } else {
                    Some(
                        opts.value_map
                            .get(cell)
                            .cloned()
                            .unwrap_or_else(|| cell.to_string()),
                    )
                }
            })
            .collect();
        raw.push((line, cells, rec[class_idx].to_string()));
    }
    if raw.is_empty() {
        return Err(Error::parse(1, 1, "dataset has no rows"));
    }
    let classes: BTreeSet<&str> = raw.iter().map(|(_, _, c)| c.as_str()).collect();
    if classes.len() > 2 {
        return Err(Error::parse(
            1,
            1,
            format!(
                "class column has {} distinct values, expected 2",
                classes.len()
            ),
        ));
    }
    let positive = match &opts.positive {
        Some(p) => p.clone(),
        None => classes.iter().next_back().expect("nonempty").to_string(),
    };
    if !classes.contains(positive.as_str()) && classes.len() == 2 {
        return Err(Error::Argument(format!(
            "positive class {positive:?} does not occur"
        )));
    }
    let mut labels: Vec<BTreeSet<String>> = vec![BTreeSet::new(); feature_cols.len()];
    for (_, cells, _) in &raw {
        for (j, c) in cells.iter().enumerate() {
            if let Some(c) = c {
                labels[j].insert(c.clone());
            }
        }
    }
    let mut features = Vec::with_capacity(feature_cols.len());
    let mut index: Vec<BTreeMap<String, usize>> = Vec::with_capacity(feature_cols.len());
    for (j, seen) in labels.into_iter().enumerate() {
        let name = &header[feature_cols[j]];
        let mut order = label_order(seen);
        // a feature must have two values to form a variable
        while order.len() < 2 {
            order.push(if order.first().map(String::as_str) == Some("-") {
                "+".into()
            } else {
                format!("v{}", order.len())
            });
        }
        index.push(
            order
                .iter()
                .cloned()
                .enumerate()
                .map(|(i, l)| (l, i))
                .collect(),
        );
        features.push(Variable::new(name.clone(), order));
    }
    let rows = raw
        .into_iter()
        .map(|(_, cells, class)| {
            let values = cells
                .into_iter()
                .enumerate()
                .map(|(j, c)| c.map(|c| index[j][&c]))
                .collect();
            (values, class == positive)
        })
        .collect();
    Ok(Dataset { features, rows })
}

pub fn load_dataset(path: impl AsRef<Path>, opts: &DatasetOptions) -> Result<Dataset> {
    parse_dataset(&std::fs::read_to_string(path)?, opts)
}
