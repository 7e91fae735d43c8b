//! Indicator tables: loading, validation, orientation metadata and min-max
//! normalization to the unit hypercube.
//!
//! Tables are validated once at construction. After that every column is
//! finite and has at least two distinct values, so normalization can never
//! divide by zero.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Whether larger raw values of an indicator are better or worse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    /// Maps a normalized value in `[0, 1]` so that larger is always better.
    pub fn orient(self, normalized: f64) -> f64 {
        match self {
            Orientation::Positive => normalized,
            Orientation::Negative => 1.0 - normalized,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("malformed csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed schema: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("missing value in row {row} (id {id:?}), column {column:?}")]
    MissingCell { row: usize, id: String, column: String },
    #[error("value {value:?} in row {row} (id {id:?}), column {column:?} is not a finite number")]
    NonNumericCell {
        row: usize,
        id: String,
        column: String,
        value: String,
    },
    #[error("column {column:?} has fewer than two distinct values")]
    ConstantColumn { column: String },
    #[error("indicator {name:?} is not declared on both the header and the schema")]
    UnknownIndicator { name: String },
    #[error("invalid table shape: {0}")]
    Shape(String),
}

/// Indicator name to orientation map, usually read from a JSON object such
/// as `{"GDP": "positive", "IMR": "negative"}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schema(BTreeMap<String, Orientation>);

impl Schema {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: impl Into<String>, orientation: Orientation) -> Self {
        self.0.insert(name.into(), orientation);
        self
    }

    pub fn from_json_str(s: &str) -> Result<Self, DataError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DataError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    pub fn get(&self, name: &str) -> Option<Orientation> {
        self.0.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Raw items × indicators matrix in natural units.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorTable {
    ids: Vec<String>,
    names: Vec<String>,
    orientations: Vec<Orientation>,
    values: Vec<Vec<f64>>,
}

impl IndicatorTable {
    pub fn new(
        ids: Vec<String>,
        names: Vec<String>,
        orientations: Vec<Orientation>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self, DataError> {
        let d = names.len();
        if d == 0 {
            return Err(DataError::Shape("at least one indicator is required".into()));
        }
        if orientations.len() != d {
            return Err(DataError::Shape(format!(
                "{} orientations for {d} indicators",
                orientations.len()
            )));
        }
        if ids.len() != values.len() {
            return Err(DataError::Shape(format!(
                "{} ids for {} rows",
                ids.len(),
                values.len()
            )));
        }
        if values.len() < 2 {
            return Err(DataError::Shape(format!(
                "at least two items are required, got {}",
                values.len()
            )));
        }
        for (i, row) in values.iter().enumerate() {
            if row.len() != d {
                return Err(DataError::Shape(format!(
                    "row {} has {} values, expected {d}",
                    i + 1,
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(DataError::NonNumericCell {
                        row: i + 1,
                        id: ids[i].clone(),
                        column: names[j].clone(),
                        value: v.to_string(),
                    });
                }
            }
        }
        for (j, name) in names.iter().enumerate() {
            let first = values[0][j];
            if values.iter().all(|r| r[j] == first) {
                return Err(DataError::ConstantColumn {
                    column: name.clone(),
                });
            }
        }
        Ok(Self {
            ids,
            names,
            orientations,
            values,
        })
    }

    /// Parses CSV text with header `id,<indicator1>,...,<indicatorD>`.
    pub fn from_csv_reader<R: io::Read>(reader: R, schema: &Schema) -> Result<Self, DataError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.len() < 2 {
            return Err(DataError::Shape(
                "header must contain an id column and at least one indicator".into(),
            ));
        }
        let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut orientations = Vec::with_capacity(names.len());
        for name in &names {
            let o = schema.get(name).ok_or_else(|| DataError::UnknownIndicator {
                name: name.clone(),
            })?;
            orientations.push(o);
        }
        if let Some(extra) = schema.0.keys().find(|k| !names.contains(k)) {
            return Err(DataError::UnknownIndicator {
                name: extra.clone(),
            });
        }

        let mut ids = Vec::new();
        let mut values = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            let row = i + 1;
            let id = record.get(0).unwrap_or_default().to_string();
            let mut parsed = Vec::with_capacity(names.len());
            for (j, name) in names.iter().enumerate() {
                let cell = record.get(j + 1).unwrap_or_default();
                if cell.is_empty() {
                    return Err(DataError::MissingCell {
                        row,
                        id,
                        column: name.clone(),
                    });
                }
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => parsed.push(v),
                    _ => {
                        return Err(DataError::NonNumericCell {
                            row,
                            id,
                            column: name.clone(),
                            value: cell.to_string(),
                        })
                    }
                }
            }
            ids.push(id);
            values.push(parsed);
        }
        Self::new(ids, names, orientations, values)
    }

    pub fn from_csv_str(text: &str, schema: &Schema) -> Result<Self, DataError> {
        Self::from_csv_reader(text.as_bytes(), schema)
    }

    pub fn n_items(&self) -> usize {
        self.values.len()
    }

    pub fn n_indicators(&self) -> usize {
        self.names.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn indicator_names(&self) -> &[String] {
        &self.names
    }

    pub fn orientations(&self) -> &[Orientation] {
        &self.orientations
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[j]).collect()
    }

    pub fn schema(&self) -> Schema {
        Schema(
            self.names
                .iter()
                .cloned()
                .zip(self.orientations.iter().copied())
                .collect(),
        )
    }

    /// Applies `f(column, value)` to every cell and revalidates.
    pub fn map_values(&self, f: impl Fn(usize, f64) -> f64) -> Result<Self, DataError> {
        let values = self
            .values
            .iter()
            .map(|r| r.iter().enumerate().map(|(j, &v)| f(j, v)).collect())
            .collect();
        Self::new(
            self.ids.clone(),
            self.names.clone(),
            self.orientations.clone(),
            values,
        )
    }

    /// Per-indicator multiplicative rescaling (a change of units).
    pub fn scaled(&self, factors: &[f64]) -> Result<Self, DataError> {
        self.check_len(factors)?;
        self.map_values(|j, v| v * factors[j])
    }

    /// Per-indicator additive shift (a change of origin).
    pub fn shifted(&self, offsets: &[f64]) -> Result<Self, DataError> {
        self.check_len(offsets)?;
        self.map_values(|j, v| v + offsets[j])
    }

    /// Keeps the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self, DataError> {
        Self::new(
            rows.iter().map(|&i| self.ids[i].clone()).collect(),
            self.names.clone(),
            self.orientations.clone(),
            rows.iter().map(|&i| self.values[i].clone()).collect(),
        )
    }

    /// Writes `id,<indicators...>` CSV that [`load_table`] reads back exactly.
    pub fn write_csv<W: io::Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["id".to_string()];
        header.extend(self.names.iter().cloned());
        wtr.write_record(&header)?;
        for (id, row) in self.ids.iter().zip(&self.values) {
            let mut rec = vec![id.clone()];
            rec.extend(row.iter().map(f64::to_string));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }

    fn check_len(&self, v: &[f64]) -> Result<(), DataError> {
        if v.len() != self.n_indicators() {
            return Err(DataError::Shape(format!(
                "perturbation has {} entries for {} indicators",
                v.len(),
                self.n_indicators()
            )));
        }
        Ok(())
    }
}

/// Reads and validates a CSV indicator table against `schema`.
pub fn load_table(path: impl AsRef<Path>, schema: &Schema) -> Result<IndicatorTable, DataError> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    IndicatorTable::from_csv_reader(io::BufReader::new(file), schema)
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("transform mismatch: {0}")]
pub struct TransformMismatch(pub String);

/// Per-indicator min-max record. Invertible, so curves fitted in normalized
/// space can be reported in raw units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transform {
    pub indicators: Vec<IndicatorRange>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorRange {
    pub name: String,
    pub orientation: Orientation,
    pub min: f64,
    pub max: f64,
}

impl Transform {
    pub fn dim(&self) -> usize {
        self.indicators.len()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.indicators.iter().map(|r| r.name.as_str())
    }

    pub fn orientations(&self) -> Vec<Orientation> {
        self.indicators.iter().map(|r| r.orientation).collect()
    }

    pub fn schema(&self) -> Schema {
        Schema(
            self.indicators
                .iter()
                .map(|r| (r.name.clone(), r.orientation))
                .collect(),
        )
    }

    pub fn normalize_point(&self, raw: &[f64]) -> Vec<f64> {
        raw.iter()
            .zip(&self.indicators)
            .map(|(&v, r)| (v - r.min) / (r.max - r.min))
            .collect()
    }

    pub fn denormalize_point(&self, p: &[f64]) -> Vec<f64> {
        p.iter()
            .zip(&self.indicators)
            .map(|(&v, r)| r.min + v * (r.max - r.min))
            .collect()
    }

    pub fn check_compatible(&self, table: &IndicatorTable) -> Result<(), TransformMismatch> {
        if table.n_indicators() != self.dim() {
            return Err(TransformMismatch(format!(
                "table has {} indicators, transform has {}",
                table.n_indicators(),
                self.dim()
            )));
        }
        for (name, r) in table.indicator_names().iter().zip(&self.indicators) {
            if *name != r.name {
                return Err(TransformMismatch(format!(
                    "indicator {name:?} where {:?} was expected",
                    r.name
                )));
            }
        }
        Ok(())
    }

    /// Normalizes every row of `table` with this (possibly foreign) transform.
    pub fn apply(&self, table: &IndicatorTable) -> Result<Vec<Vec<f64>>, TransformMismatch> {
        self.check_compatible(table)?;
        Ok(table
            .values()
            .iter()
            .map(|r| self.normalize_point(r))
            .collect())
    }
}

/// An indicator table mapped into `[0, 1]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedTable {
    source: IndicatorTable,
    values: Vec<Vec<f64>>,
    transform: Transform,
}

impl NormalizedTable {
    pub fn source(&self) -> &IndicatorTable {
        &self.source
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn transform(&self) -> &Transform {
        &self.transform
    }

    pub fn n_items(&self) -> usize {
        self.values.len()
    }

    pub fn dim(&self) -> usize {
        self.transform.dim()
    }

    pub fn orientations(&self) -> &[Orientation] {
        self.source.orientations()
    }

    /// Values flipped so that larger is better in every column.
    pub fn oriented_values(&self) -> Vec<Vec<f64>> {
        let o = self.orientations();
        self.values
            .iter()
            .map(|r| r.iter().zip(o).map(|(&v, o)| o.orient(v)).collect())
            .collect()
    }
}

/// Per-indicator min-max normalization.
pub fn normalize(table: &IndicatorTable) -> Result<NormalizedTable, DataError> {
    let mut indicators = Vec::with_capacity(table.n_indicators());
    for (j, name) in table.indicator_names().iter().enumerate() {
        let (min, max) = table
            .values()
            .iter()
            .map(|r| r[j])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        if max <= min {
            return Err(DataError::ConstantColumn {
                column: name.clone(),
            });
        }
        indicators.push(IndicatorRange {
            name: name.clone(),
            orientation: table.orientations()[j],
            min,
            max,
        });
    }
    let transform = Transform { indicators };
    let values = table
        .values()
        .iter()
        .map(|r| transform.normalize_point(r))
        .collect();
    Ok(NormalizedTable {
        source: table.clone(),
        values,
        transform,
    })
}

/// Exact affine inverse of [`normalize`] for a single point.
pub fn denormalize_point(p: &[f64], transform: &Transform) -> Vec<f64> {
    transform.denormalize_point(p)
}
