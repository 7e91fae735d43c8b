//! Classical composite-index methods used as reference points: weighted
//! arithmetic mean, geometric mean, first principal component and entropy
//! weights, plus side-by-side comparison of rankings.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::correlation::{kendall_tau, spearman};
use crate::data::{normalize, DataError, IndicatorTable, Orientation};
use crate::pca::{end_is_better, PrincipalAxis};
use crate::ranking::RankingResult;

/// Shift applied before taking logarithms or products of normalized values.
pub const DEFAULT_EPSILON: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("bad weights: {0}")]
    BadWeights(String),
    #[error("row {row} (id {id:?}), column {column:?} is not positive; the geometric mean needs positive values")]
    NonPositiveAfterShift { row: usize, id: String, column: String },
    #[error("need at least {needed} items, got {got}")]
    TooFewItems { needed: usize, got: usize },
    #[error("every indicator has entropy 1; entropy weights are undefined")]
    DegenerateEntropy,
    #[error("rankings cover different items: {0}")]
    LengthMismatch(String),
    #[error(transparent)]
    Data(#[from] DataError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMethod {
    ArithmeticMean,
    GeometricMean,
    PcaFirstComponent,
    EntropyWeight,
}

/// Which values a mean is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueScale {
    /// Min-max normalized, oriented so larger is better.
    Normalized,
    /// Raw indicator values. Negative indicators enter the arithmetic mean
    /// with a minus sign and the geometric mean as reciprocals, which keeps
    /// ratio-scale data ratio-scale.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineSpec {
    pub method: BaselineMethod,
    pub scale: ValueScale,
    /// Hand-set weights, arithmetic mean only. `None` means equal weights.
    pub weights: Option<Vec<f64>>,
    pub epsilon: f64,
}

impl BaselineSpec {
    pub fn new(method: BaselineMethod) -> Self {
        Self {
            method,
            scale: ValueScale::Normalized,
            weights: None,
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn raw(mut self) -> Self {
        self.scale = ValueScale::Raw;
        self
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        self.weights = Some(weights);
        self
    }

    pub fn name(&self) -> String {
        let base = match self.method {
            BaselineMethod::ArithmeticMean => "arithmetic",
            BaselineMethod::GeometricMean => "geometric",
            BaselineMethod::PcaFirstComponent => "pca",
            BaselineMethod::EntropyWeight => "entropy",
        };
        // the raw forms carry the plain names: they are the textbook
        // formulas the audit is meant to examine
        match (self.method, self.scale) {
            (BaselineMethod::ArithmeticMean | BaselineMethod::GeometricMean, ValueScale::Normalized) => {
                format!("{base}-normalized")
            }
            _ => base.to_string(),
        }
    }

    pub fn rank(&self, table: &IndicatorTable) -> Result<RankingResult, BaselineError> {
        let name = self.name();
        let scores = match (self.method, self.scale) {
            (BaselineMethod::ArithmeticMean, ValueScale::Normalized) => {
                let w = resolve_weights(self.weights.as_deref(), table.n_indicators())?;
                weighted_sum(&oriented_normalized(table)?, &w)
            }
            (BaselineMethod::ArithmeticMean, ValueScale::Raw) => {
                let w = resolve_weights(self.weights.as_deref(), table.n_indicators())?;
                let signed: Vec<Vec<f64>> = table
                    .values()
                    .iter()
                    .map(|r| r.iter().zip(table.orientations()).map(|(v, o)| v * o.sign()).collect())
                    .collect();
                weighted_sum(&signed, &w)
            }
            (BaselineMethod::GeometricMean, ValueScale::Normalized) => {
                let shifted = epsilon_shift(&oriented_normalized(table)?, self.epsilon);
                geometric_scores(table, &shifted)?
            }
            (BaselineMethod::GeometricMean, ValueScale::Raw) => {
                let ratio: Vec<Vec<f64>> = table
                    .values()
                    .iter()
                    .map(|r| {
                        r.iter()
                            .zip(table.orientations())
                            .map(|(&v, o)| match o {
                                Orientation::Positive => v,
                                Orientation::Negative => 1.0 / v,
                            })
                            .collect()
                    })
                    .collect();
                // check on raw values so that zeros are reported, not inverted
                check_positive(table, table.values())?;
                geometric_scores(table, &ratio)?
            }
            (BaselineMethod::PcaFirstComponent, _) => pca_scores(table)?,
            (BaselineMethod::EntropyWeight, _) => {
                let oriented = oriented_normalized(table)?;
                let w = entropy_weights(&epsilon_shift(&oriented, self.epsilon))?;
                weighted_sum(&oriented, &w)
            }
        };
        Ok(RankingResult::from_scores(name, table.ids(), &scores))
    }
}

fn oriented_normalized(table: &IndicatorTable) -> Result<Vec<Vec<f64>>, BaselineError> {
    Ok(normalize(table)?.oriented_values())
}

/// Maps `[0, 1]` onto `[epsilon, 1]`.
fn epsilon_shift(values: &[Vec<f64>], epsilon: f64) -> Vec<Vec<f64>> {
    values
        .iter()
        .map(|r| r.iter().map(|v| epsilon + (1.0 - epsilon) * v).collect())
        .collect()
}

fn resolve_weights(weights: Option<&[f64]>, d: usize) -> Result<Vec<f64>, BaselineError> {
    let Some(w) = weights else {
        return Ok(vec![1.0 / d as f64; d]);
    };
    if w.len() != d {
        return Err(BaselineError::BadWeights(format!(
            "{} weights for {d} indicators",
            w.len()
        )));
    }
    if w.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(BaselineError::BadWeights("weights must be positive".into()));
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(BaselineError::BadWeights(format!("weights sum to {sum}, not 1")));
    }
    Ok(w.to_vec())
}

fn weighted_sum(values: &[Vec<f64>], w: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|r| r.iter().zip(w).map(|(v, w)| v * w).sum())
        .collect()
}

fn check_positive(table: &IndicatorTable, values: &[Vec<f64>]) -> Result<(), BaselineError> {
    for (i, r) in values.iter().enumerate() {
        if let Some(j) = r.iter().position(|v| !(*v > 0.0)) {
            return Err(BaselineError::NonPositiveAfterShift {
                row: i + 1,
                id: table.ids()[i].clone(),
                column: table.indicator_names()[j].clone(),
            });
        }
    }
    Ok(())
}

fn geometric_scores(table: &IndicatorTable, values: &[Vec<f64>]) -> Result<Vec<f64>, BaselineError> {
    check_positive(table, values)?;
    let d = table.n_indicators() as f64;
    Ok(values
        .iter()
        .map(|r| (r.iter().map(|v| v.ln()).sum::<f64>() / d).exp())
        .collect())
}

/// Orientation-signed first principal component projection, mapped to `[0, 1]`.
fn pca_scores(table: &IndicatorTable) -> Result<Vec<f64>, BaselineError> {
    if table.n_items() < 2 {
        return Err(BaselineError::TooFewItems {
            needed: 2,
            got: table.n_items(),
        });
    }
    let norm = normalize(table)?;
    let axis = PrincipalAxis::fit(norm.values());
    let (lo, hi) = axis.extent();
    let span = hi - lo;
    let forward = end_is_better(&axis.point_at(lo), &axis.point_at(hi), table.orientations());
    Ok(axis
        .projections
        .iter()
        .map(|&s| if forward { (s - lo) / span } else { (hi - s) / span })
        .collect())
}

/// Entropy weights of the columns of a positive `n × d` matrix.
pub fn entropy_weights(values: &[Vec<f64>]) -> Result<Vec<f64>, BaselineError> {
    let n = values.len();
    if n < 2 {
        return Err(BaselineError::TooFewItems { needed: 2, got: n });
    }
    let d = values[0].len();
    let ln_n = (n as f64).ln();
    let divergence: Vec<f64> = (0..d)
        .map(|j| {
            let total: f64 = values.iter().map(|r| r[j]).sum();
            let h: f64 = values
                .iter()
                .map(|r| r[j] / total)
                .filter(|&p| p > 0.0)
                .map(|p| -p * p.ln())
                .sum();
            let div = 1.0 - h / ln_n;
            // uniform columns come out at rounding level rather than zero
            if div < 1e-12 {
                0.0
            } else {
                div
            }
        })
        .collect();
    let sum: f64 = divergence.iter().sum();
    if !(sum > 0.0) {
        return Err(BaselineError::DegenerateEntropy);
    }
    Ok(divergence.iter().map(|v| v / sum).collect())
}

/// Equal-weight (or weighted) arithmetic mean of oriented normalized values.
pub fn arithmetic_mean_rank(
    table: &IndicatorTable,
    weights: Option<&[f64]>,
) -> Result<RankingResult, BaselineError> {
    let mut spec = BaselineSpec::new(BaselineMethod::ArithmeticMean);
    spec.weights = weights.map(<[f64]>::to_vec);
    spec.rank(table)
}

/// Geometric mean of oriented normalized values shifted into `(0, 1]`.
pub fn geometric_mean_rank(table: &IndicatorTable) -> Result<RankingResult, BaselineError> {
    BaselineSpec::new(BaselineMethod::GeometricMean).rank(table)
}

/// Geometric mean of raw ratio-scale values (HDI style).
pub fn raw_geometric_mean_rank(table: &IndicatorTable) -> Result<RankingResult, BaselineError> {
    BaselineSpec::new(BaselineMethod::GeometricMean).raw().rank(table)
}

pub fn pca_rank(table: &IndicatorTable) -> Result<RankingResult, BaselineError> {
    BaselineSpec::new(BaselineMethod::PcaFirstComponent).rank(table)
}

pub fn entropy_weight_rank(table: &IndicatorTable) -> Result<RankingResult, BaselineError> {
    BaselineSpec::new(BaselineMethod::EntropyWeight).rank(table)
}

/// Published scores keyed by item id, e.g. a column of a paper's table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceScores {
    pub name: String,
    pub scores: BTreeMap<String, f64>,
    #[serde(default)]
    pub orders: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub id: String,
    /// `(score, order)` per method; `None` where a reference lacks the item.
    pub cells: Vec<Option<(f64, usize)>>,
}

/// Side-by-side scores and orders with pairwise rank correlations. Pairs
/// involving a reference column use only the items that reference covers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub methods: Vec<String>,
    pub rows: Vec<ComparisonRow>,
    pub spearman: Vec<Vec<f64>>,
    pub kendall: Vec<Vec<f64>>,
}

pub fn compare(
    results: &[RankingResult],
    reference: Option<&ReferenceScores>,
) -> Result<Comparison, BaselineError> {
    let Some(first) = results.first() else {
        return Err(BaselineError::LengthMismatch("no rankings given".into()));
    };
    for r in &results[1..] {
        let same = r.len() == first.len()
            && r.entries.iter().zip(&first.entries).all(|(a, b)| a.id == b.id);
        if !same {
            return Err(BaselineError::LengthMismatch(format!(
                "{:?} and {:?} rank different item lists",
                first.method, r.method
            )));
        }
    }

    let mut methods: Vec<String> = results.iter().map(|r| r.method.clone()).collect();
    let mut columns: Vec<Vec<Option<(f64, usize)>>> = results
        .iter()
        .map(|r| r.entries.iter().map(|e| Some((e.score, e.order))).collect())
        .collect();
    if let Some(reference) = reference {
        methods.push(reference.name.clone());
        columns.push(
            first
                .entries
                .iter()
                .map(|e| {
                    reference.scores.get(&e.id).map(|&s| {
                        (s, reference.orders.get(&e.id).copied().unwrap_or(0))
                    })
                })
                .collect(),
        );
    }

    let m = columns.len();
    let mut rho = vec![vec![f64::NAN; m]; m];
    let mut tau = vec![vec![f64::NAN; m]; m];
    for a in 0..m {
        for b in 0..m {
            let (x, y): (Vec<f64>, Vec<f64>) = columns[a]
                .iter()
                .zip(&columns[b])
                .filter_map(|(p, q)| Some((p.as_ref()?.0, q.as_ref()?.0)))
                .unzip();
            if x.len() >= 2 {
                rho[a][b] = spearman(&x, &y);
                tau[a][b] = kendall_tau(&x, &y);
            }
        }
    }

    let rows = first
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| ComparisonRow {
            id: e.id.clone(),
            cells: columns.iter().map(|c| c[i]).collect(),
        })
        .collect();
    Ok(Comparison {
        methods,
        rows,
        spearman: rho,
        kendall: tau,
    })
}

impl Comparison {
    /// `id,<m>_score,<m>_order,...`, rows ordered as the first method ranks them.
    pub fn write_csv<W: io::Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["id".to_string()];
        for m in &self.methods {
            header.push(format!("{m}_score"));
            header.push(format!("{m}_order"));
        }
        wtr.write_record(&header)?;
        let mut rows: Vec<&ComparisonRow> = self.rows.iter().collect();
        rows.sort_by_key(|r| r.cells[0].map(|c| c.1).unwrap_or(usize::MAX));
        for row in rows {
            let mut rec = vec![row.id.clone()];
            for c in &row.cells {
                match c {
                    Some((s, o)) => {
                        rec.push(s.to_string());
                        rec.push(if *o == 0 { String::new() } else { o.to_string() });
                    }
                    None => {
                        rec.push(String::new());
                        rec.push(String::new());
                    }
                }
            }
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// A square correlation matrix (`self.spearman` or `self.kendall`) with
    /// method names on both axes.
    pub fn write_correlations_csv<W: io::Write>(&self, w: W, matrix: &[Vec<f64>]) -> Result<(), csv::Error> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["method".to_string()];
        header.extend(self.methods.iter().cloned());
        wtr.write_record(&header)?;
        for (m, row) in self.methods.iter().zip(matrix) {
            let mut rec = vec![m.clone()];
            rec.extend(row.iter().map(|v| v.to_string()));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }
}
