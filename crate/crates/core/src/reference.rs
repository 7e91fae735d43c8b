//! Bundled reference data for the 2005 quality-of-life ranking: the ten
//! published rows with their Elmap and RPC columns, the published control
//! points, the indicator schema, and a loader for the full 171-country table.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::baselines::ReferenceScores;
use crate::data::{load_table, DataError, IndicatorTable, Schema};

const FIG5_CSV: &str = include_str!("../data/fig5_reference.csv");
const CONTROL_POINTS_CSV: &str = include_str!("../data/fig5_control_points.csv");
const SCHEMA_JSON: &str = include_str!("../data/quality_of_life_2005.schema.json");

/// Environment variable naming the full 2005 table.
pub const QOL2005_ENV: &str = "RANKCURVE_QOL2005";

/// Expected number of countries in the full 2005 table.
pub const QOL2005_ROWS: usize = 171;

/// Provenance string declared by pipelines run on the 2005 table.
pub const QOL2005_PROVENANCE: &str =
    "2005 quality-of-life indicators (GDP per capita, life expectancy at birth, \
     infant mortality, tuberculosis rate) for 171 countries, public statistics";

#[derive(Debug, Error)]
pub enum ReferenceError {
    #[error(
        "the 2005 quality-of-life table was not found (looked in {searched:?}); \
         place it at data/quality_of_life_2005.csv or set {QOL2005_ENV}"
    )]
    Missing { searched: Vec<PathBuf> },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("expected {expected} rows, found {got}")]
    RowCount { expected: usize, got: usize },
    #[error("published row {id:?} does not match the table: {detail}")]
    PublishedRowMismatch { id: String, detail: String },
}

/// One published row: raw indicators plus the Elmap and RPC columns.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct PublishedRow {
    pub id: String,
    #[serde(rename = "GDP")]
    pub gdp: f64,
    #[serde(rename = "LEB")]
    pub leb: f64,
    #[serde(rename = "IMR")]
    pub imr: f64,
    #[serde(rename = "Tub")]
    pub tub: f64,
    pub elmap_score: f64,
    pub elmap_order: usize,
    pub rpc_score: f64,
    pub rpc_order: usize,
}

impl PublishedRow {
    pub fn raw(&self) -> [f64; 4] {
        [self.gdp, self.leb, self.imr, self.tub]
    }
}

pub fn published_rows() -> Vec<PublishedRow> {
    csv::Reader::from_reader(FIG5_CSV.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .expect("bundled reference table parses")
}

fn scores(name: &str, pick: impl Fn(&PublishedRow) -> (f64, usize)) -> ReferenceScores {
    let rows = published_rows();
    ReferenceScores {
        name: name.to_string(),
        scores: rows.iter().map(|r| (r.id.clone(), pick(r).0)).collect(),
        orders: rows.iter().map(|r| (r.id.clone(), pick(r).1)).collect(),
    }
}

/// Published Elmap scores, joined by `compare` as the `elmap-reference` column.
pub fn elmap_reference() -> ReferenceScores {
    scores("elmap-reference", |r| (r.elmap_score, r.elmap_order))
}

/// Published RPC scores and orders.
pub fn published_rpc() -> ReferenceScores {
    scores("rpc-published", |r| (r.rpc_score, r.rpc_order))
}

/// Published control points in raw units, `P0` first.
pub fn published_control_points_raw() -> [Vec<f64>; 4] {
    let mut rdr = csv::Reader::from_reader(CONTROL_POINTS_CSV.as_bytes());
    let rows: Vec<Vec<f64>> = rdr
        .records()
        .map(|r| {
            let r = r.expect("bundled control points parse");
            r.iter().skip(1).map(|v| v.parse().expect("numeric control point")).collect()
        })
        .collect();
    rows.try_into().expect("four control points")
}

pub fn schema_2005() -> Schema {
    Schema::from_json_str(SCHEMA_JSON).expect("bundled schema parses")
}

/// The ten published rows as an indicator table. Too small to reproduce the
/// full ranking, but enough to exercise every command.
pub fn published_excerpt_table() -> IndicatorTable {
    let rows = published_rows();
    let schema = schema_2005();
    let names: Vec<String> = ["GDP", "LEB", "IMR", "Tub"].map(String::from).to_vec();
    let orientations = names.iter().map(|n| schema.get(n).expect("schema entry")).collect();
    IndicatorTable::new(
        rows.iter().map(|r| r.id.clone()).collect(),
        names,
        orientations,
        rows.iter().map(|r| r.raw().to_vec()).collect(),
    )
    .expect("excerpt is a valid table")
}

/// Locations searched for the full table, in order.
pub fn quality_of_life_2005_candidates() -> Vec<PathBuf> {
    let mut paths = Vec::new();
    if let Some(p) = std::env::var_os(QOL2005_ENV) {
        paths.push(PathBuf::from(p));
    }
    paths.push(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/quality_of_life_2005.csv"));
    paths
}

/// Loads the full 2005 table and checks it against the published rows.
pub fn load_quality_of_life_2005() -> Result<IndicatorTable, ReferenceError> {
    let searched = quality_of_life_2005_candidates();
    let Some(path) = searched.iter().find(|p| p.is_file()) else {
        return Err(ReferenceError::Missing { searched });
    };
    let table = load_table(path, &schema_2005())?;
    validate_quality_of_life_2005(&table)?;
    Ok(table)
}

pub fn validate_quality_of_life_2005(table: &IndicatorTable) -> Result<(), ReferenceError> {
    if table.n_items() != QOL2005_ROWS {
        return Err(ReferenceError::RowCount {
            expected: QOL2005_ROWS,
            got: table.n_items(),
        });
    }
    let names = table.indicator_names();
    for row in published_rows() {
        let Some(i) = table.ids().iter().position(|id| *id == row.id) else {
            return Err(ReferenceError::PublishedRowMismatch {
                id: row.id,
                detail: "missing".into(),
            });
        };
        for (name, expect) in ["GDP", "LEB", "IMR", "Tub"].iter().zip(row.raw()) {
            let Some(j) = names.iter().position(|n| n == name) else {
                return Err(ReferenceError::PublishedRowMismatch {
                    id: row.id,
                    detail: format!("no {name} column"),
                });
            };
            let got = table.row(i)[j];
            if (got - expect).abs() > 1e-6 * expect.abs().max(1.0) {
                return Err(ReferenceError::PublishedRowMismatch {
                    id: row.id,
                    detail: format!("{name} is {got}, published {expect}"),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Orientation;

    #[test]
    fn bundled_rows_parse() {
        let rows = published_rows();
        assert_eq!(rows.len(), 10);
        assert_eq!(rows[0].id, "Luxembourg");
        assert_eq!(rows[0].rpc_order, 1);
        assert_eq!(rows[0].rpc_score, 1.0);
        assert_eq!(rows[8].id, "China");
        assert_eq!(rows[8].rpc_order, 78);
        assert_eq!(elmap_reference().scores["Norway"], 0.647);
        assert_eq!(published_rpc().orders["Samoa"], 79);
    }

    #[test]
    fn control_points_and_schema() {
        let p = published_control_points_raw();
        assert_eq!(p[0], vec![44713.0, 81.218, 2.0, 0.0]);
        assert_eq!(p[3], vec![1581.824, 41.68, 290.0, 151.0]);
        let s = schema_2005();
        assert_eq!(s.get("IMR"), Some(Orientation::Negative));
        assert_eq!(s.get("GDP"), Some(Orientation::Positive));
    }

    #[test]
    fn excerpt_table_and_validation() {
        let t = published_excerpt_table();
        assert_eq!((t.n_items(), t.n_indicators()), (10, 4));
        assert!(matches!(
            validate_quality_of_life_2005(&t),
            Err(ReferenceError::RowCount { expected: 171, got: 10 })
        ));
    }

    #[test]
    fn published_curve_monotonicity() {
        use crate::bezier::{BestEnd, Monotonicity, RankingCurve};
        let c = RankingCurve::new(published_control_points_raw(), BestEnd::AtT0).unwrap();
        let m: Vec<_> = (0..4).map(|j| c.is_monotone(j)).collect();
        // GDP falls from P0 to the data minimum and rises again toward P3
        assert_eq!(m[0], Monotonicity::NotMonotone);
        assert_eq!(m[1], Monotonicity::StrictlyDecreasing);
        assert_eq!(m[2], Monotonicity::StrictlyIncreasing);
        assert_eq!(m[3], Monotonicity::StrictlyIncreasing);
    }
}
