//! Machine-checkable meta-criteria for ranking pipelines.
//!
//! A pipeline is anything that turns an [`IndicatorTable`] into a
//! [`RankingResult`], optionally through a fitted curve. [`audit`] runs every
//! criterion and never stops early; each `Fail` carries a witness that
//! [`replay`] can re-run.
//!
//! Perturbations are fixed sequences rather than random draws: trial `k`
//! scales (or shifts) dimension `j` by entry `(k + j) mod 4` of
//! [`SCALE_FACTORS`] (or [`SHIFTS`]).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{pca_rank, BaselineError, BaselineMethod, BaselineSpec, ValueScale};
use crate::bezier::{BestEnd, CurveFile, Monotonicity, RankingCurve};
use crate::data::{normalize, IndicatorTable, Orientation};
use crate::fitting::{rank_with, FitConfig, FitError, FittedModel};
use crate::ranking::RankingResult;
use crate::synthetic::collinear_table;

pub const SCALE_FACTORS: [f64; 4] = [0.5, 2.0, 6.8, 1000.0];
pub const SHIFTS: [f64; 4] = [10.0, 100.0, -0.5, 1000.0];
pub const DEFAULT_TRIALS: usize = 4;

/// Collinearity residual allowed for the straight-data fit, relative to the
/// chord length.
pub const LINEAR_RESIDUAL_TOLERANCE: f64 = 1e-6;

/// Finite-difference step and tolerance of the smoothness check.
pub const SMOOTHNESS_STEP: f64 = 1e-6;
pub const SMOOTHNESS_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error("{0}")]
    Other(String),
}

/// Output of one pipeline run.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub ranking: RankingResult,
    pub curve: Option<RankingCurve>,
    /// Every number the pipeline derived from the data, in a fixed order.
    pub parameters: Vec<f64>,
}

pub trait RankingPipeline: Sync {
    fn name(&self) -> String;

    fn run(&self, table: &IndicatorTable) -> Result<PipelineRun, PipelineError>;

    /// Settings a user chose by hand and that change the result.
    fn user_parameters(&self) -> Vec<String> {
        Vec::new()
    }

    /// Expected number of fitted parameters for `d` indicators, if the
    /// pipeline promises one.
    fn parameter_count(&self, _d: usize) -> Option<usize> {
        None
    }

    /// The same pipeline on a different number of worker threads.
    fn with_workers(&self, _workers: usize) -> Option<Box<dyn RankingPipeline>> {
        None
    }

    fn provenance(&self) -> Option<String> {
        None
    }
}

/// Fits a ranking curve and scores items by projection.
#[derive(Debug, Clone, Default)]
pub struct RpcPipeline {
    pub config: FitConfig,
    pub provenance: Option<String>,
}

impl RpcPipeline {
    pub fn new(config: FitConfig) -> Self {
        Self {
            config,
            provenance: None,
        }
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = Some(provenance.into());
        self
    }
}

impl RankingPipeline for RpcPipeline {
    fn name(&self) -> String {
        "rpc".into()
    }

    fn run(&self, table: &IndicatorTable) -> Result<PipelineRun, PipelineError> {
        let model = FittedModel::fit(table, &self.config)?;
        Ok(PipelineRun {
            parameters: model.curve.parameters(),
            ranking: model.ranking,
            curve: Some(model.curve),
        })
    }

    fn parameter_count(&self, d: usize) -> Option<usize> {
        Some(4 * d)
    }

    fn with_workers(&self, workers: usize) -> Option<Box<dyn RankingPipeline>> {
        let mut p = self.clone();
        p.config.workers = workers;
        Some(Box::new(p))
    }

    fn provenance(&self) -> Option<String> {
        self.provenance.clone()
    }
}

/// One of the classical composite-index methods.
#[derive(Debug, Clone)]
pub struct BaselinePipeline {
    pub spec: BaselineSpec,
    pub provenance: Option<String>,
}

impl BaselinePipeline {
    pub fn new(spec: BaselineSpec) -> Self {
        Self {
            spec,
            provenance: None,
        }
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = Some(provenance.into());
        self
    }
}

impl RankingPipeline for BaselinePipeline {
    fn name(&self) -> String {
        self.spec.name()
    }

    fn run(&self, table: &IndicatorTable) -> Result<PipelineRun, PipelineError> {
        let ranking = self.spec.rank(table)?;
        let parameters = match self.spec.method {
            BaselineMethod::ArithmeticMean => self.spec.weights.clone().unwrap_or_default(),
            BaselineMethod::GeometricMean => Vec::new(),
            BaselineMethod::PcaFirstComponent => {
                crate::pca::PrincipalAxis::fit(normalize(table).map_err(BaselineError::from)?.values())
                    .direction
            }
            BaselineMethod::EntropyWeight => {
                let oriented = normalize(table).map_err(BaselineError::from)?.oriented_values();
                let eps = self.spec.epsilon;
                let shifted: Vec<Vec<f64>> = oriented
                    .iter()
                    .map(|r| r.iter().map(|v| eps + (1.0 - eps) * v).collect())
                    .collect();
                crate::baselines::entropy_weights(&shifted)?
            }
        };
        Ok(PipelineRun {
            ranking,
            curve: None,
            parameters,
        })
    }

    fn user_parameters(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(w) = &self.spec.weights {
            out.push(format!("weights = {w:?}"));
        }
        let uses_epsilon = matches!(
            (self.spec.method, self.spec.scale),
            (BaselineMethod::GeometricMean, ValueScale::Normalized) | (BaselineMethod::EntropyWeight, _)
        );
        if uses_epsilon {
            out.push(format!("epsilon = {:e}", self.spec.epsilon));
        }
        out
    }

    fn provenance(&self) -> Option<String> {
        self.provenance.clone()
    }
}

/// Ranks by projection onto a curve given in advance, in the normalized
/// coordinates of whatever table it is applied to. Useful for scoring with
/// published control points, and as a negative control for the linear
/// compatibility check.
#[derive(Debug, Clone)]
pub struct FixedCurvePipeline {
    pub name: String,
    pub control_points: [Vec<f64>; 4],
    pub best_end: BestEnd,
    pub provenance: Option<String>,
}

impl RankingPipeline for FixedCurvePipeline {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn run(&self, table: &IndicatorTable) -> Result<PipelineRun, PipelineError> {
        let norm = normalize(table).map_err(FitError::from)?;
        let curve = RankingCurve::new(self.control_points.clone(), self.best_end)
            .and_then(|c| c.with_transform(norm.transform().clone()))
            .map_err(FitError::from)?;
        let mut ranking = rank_with(table, &curve, crate::projection::DEFAULT_GRID_SIZE)?;
        ranking.method = self.name.clone();
        Ok(PipelineRun {
            parameters: curve.parameters(),
            ranking,
            curve: Some(curve),
        })
    }

    fn user_parameters(&self) -> Vec<String> {
        vec![format!("control points fixed by hand: {:?}", self.control_points)]
    }

    fn parameter_count(&self, d: usize) -> Option<usize> {
        Some(4 * d)
    }

    fn provenance(&self) -> Option<String> {
        self.provenance.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CriterionId {
    ScaleInvariance,
    TranslationInvariance,
    StrictMonotonicity,
    LinearCompatibility,
    Smoothness,
    NoFreeParameters,
    Reproducibility,
    OpenDataDeclared,
}

impl CriterionId {
    pub const ALL: [CriterionId; 8] = [
        CriterionId::ScaleInvariance,
        CriterionId::TranslationInvariance,
        CriterionId::StrictMonotonicity,
        CriterionId::LinearCompatibility,
        CriterionId::Smoothness,
        CriterionId::NoFreeParameters,
        CriterionId::Reproducibility,
        CriterionId::OpenDataDeclared,
    ];
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum Perturbation {
    /// Per-dimension multiplicative factors.
    Scale(Vec<f64>),
    /// Per-dimension additive offsets.
    Shift(Vec<f64>),
}

impl Perturbation {
    pub fn apply(&self, table: &IndicatorTable) -> Result<IndicatorTable, PipelineError> {
        let r = match self {
            Perturbation::Scale(f) => table.scaled(f),
            Perturbation::Shift(s) => table.shifted(s),
        };
        r.map_err(|e| PipelineError::Other(format!("cannot perturb table: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// The order vector changed under a perturbation of the raw data.
    OrderChange {
        perturbation: Perturbation,
        trial: usize,
        /// First item, in input order, whose order changed.
        item: String,
        before: Vec<usize>,
        after: Vec<usize>,
    },
    /// The pipeline failed, on the original table or a perturbed one.
    PipelineError {
        perturbation: Option<Perturbation>,
        message: String,
    },
    /// Offending numbers, e.g. a residual or per-dimension monotonicity.
    Values { label: String, values: Vec<f64> },
    Text { text: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: CriterionId,
    pub verdict: Verdict,
    pub evidence: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl CriterionResult {
    fn pass(id: CriterionId, evidence: impl Into<String>) -> Self {
        Self {
            id,
            verdict: Verdict::Pass,
            evidence: evidence.into(),
            witness: None,
        }
    }

    fn fail(id: CriterionId, evidence: impl Into<String>, witness: Witness) -> Self {
        Self {
            id,
            verdict: Verdict::Fail,
            evidence: evidence.into(),
            witness: Some(witness),
        }
    }

    fn not_applicable(id: CriterionId, evidence: impl Into<String>) -> Self {
        Self {
            id,
            verdict: Verdict::NotApplicable,
            evidence: evidence.into(),
            witness: None,
        }
    }

    fn pipeline_failure(id: CriterionId, perturbation: Option<Perturbation>, e: PipelineError) -> Self {
        let context = match &perturbation {
            Some(p) => format!("pipeline failed on perturbed table {p:?}"),
            None => "pipeline failed".to_string(),
        };
        Self::fail(
            id,
            format!("{context}: {e}"),
            Witness::PipelineError {
                perturbation,
                message: e.to_string(),
            },
        )
    }
}

/// One verdict per criterion, in [`CriterionId::ALL`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaCriteriaReport {
    pub pipeline: String,
    pub n_items: usize,
    pub n_indicators: usize,
    pub results: Vec<CriterionResult>,
}

impl MetaCriteriaReport {
    pub fn get(&self, id: CriterionId) -> &CriterionResult {
        self.results.iter().find(|r| r.id == id).expect("every criterion is reported")
    }

    pub fn verdict(&self, id: CriterionId) -> Verdict {
        self.get(id).verdict
    }

    /// True when no criterion failed.
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for MetaCriteriaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "audit of {} on {} items x {} indicators",
            self.pipeline, self.n_items, self.n_indicators
        )?;
        for r in &self.results {
            let v = match r.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::NotApplicable => "n/a",
            };
            writeln!(f, "  {:<22} {:<4}  {}", r.id.to_string(), v, r.evidence)?;
            if let Some(w) = &r.witness {
                writeln!(f, "      witness: {}", serde_json::to_string(w).unwrap_or_default())?;
            }
        }
        let failed = self.results.iter().filter(|r| r.verdict == Verdict::Fail).count();
        if failed == 0 {
            write!(f, "all applicable criteria pass")
        } else if failed == 1 {
            write!(f, "1 criterion fails")
        } else {
            write!(f, "{failed} criteria fail")
        }
    }
}

fn scale_sequence(d: usize, trials: usize) -> Vec<Perturbation> {
    (0..trials)
        .map(|k| Perturbation::Scale((0..d).map(|j| SCALE_FACTORS[(k + j) % 4]).collect()))
        .collect()
}

fn shift_sequence(d: usize, trials: usize) -> Vec<Perturbation> {
    (0..trials)
        .map(|k| Perturbation::Shift((0..d).map(|j| SHIFTS[(k + j) % 4]).collect()))
        .collect()
}

fn first_difference(ids: &[String], a: &[usize], b: &[usize]) -> Option<String> {
    a.iter().zip(b).position(|(x, y)| x != y).map(|i| ids[i].clone())
}

fn check_invariance(
    id: CriterionId,
    pipeline: &dyn RankingPipeline,
    table: &IndicatorTable,
    base: Option<&RankingResult>,
    perturbations: &[Perturbation],
) -> CriterionResult {
    let computed;
    let base = match base {
        Some(b) => b,
        None => match pipeline.run(table) {
            Ok(run) => {
                computed = run.ranking;
                &computed
            }
            Err(e) => return CriterionResult::pipeline_failure(id, None, e),
        },
    };
    let before = base.orders();
    for (trial, p) in perturbations.iter().enumerate() {
        let after = match p.apply(table).and_then(|t| pipeline.run(&t)) {
            Ok(run) => run.ranking.orders(),
            Err(e) => return CriterionResult::pipeline_failure(id, Some(p.clone()), e),
        };
        if let Some(item) = first_difference(table.ids(), &before, &after) {
            return CriterionResult::fail(
                id,
                format!("order of {item:?} changed under trial {trial}: {p:?}"),
                Witness::OrderChange {
                    perturbation: p.clone(),
                    trial,
                    item,
                    before,
                    after,
                },
            );
        }
    }
    CriterionResult::pass(
        id,
        format!("order vector unchanged under {} perturbations", perturbations.len()),
    )
}

/// Rescales raw columns by the fixed factor sequence and compares order
/// vectors with the unperturbed run.
pub fn check_scale_invariance(
    pipeline: &dyn RankingPipeline,
    table: &IndicatorTable,
    trials: usize,
) -> CriterionResult {
    let seq = scale_sequence(table.n_indicators(), trials.max(1));
    check_invariance(CriterionId::ScaleInvariance, pipeline, table, None, &seq)
}

/// As [`check_scale_invariance`] with explicit per-trial factors.
pub fn check_scale_invariance_with(
    pipeline: &dyn RankingPipeline,
    table: &IndicatorTable,
    factors: &[Vec<f64>],
) -> CriterionResult {
    let seq: Vec<_> = factors.iter().cloned().map(Perturbation::Scale).collect();
    check_invariance(CriterionId::ScaleInvariance, pipeline, table, None, &seq)
}

pub fn check_translation_invariance(
    pipeline: &dyn RankingPipeline,
    table: &IndicatorTable,
    trials: usize,
) -> CriterionResult {
    let seq = shift_sequence(table.n_indicators(), trials.max(1));
    check_invariance(CriterionId::TranslationInvariance, pipeline, table, None, &seq)
}

pub fn check_translation_invariance_with(
    pipeline: &dyn RankingPipeline,
    table: &IndicatorTable,
    offsets: &[Vec<f64>],
) -> CriterionResult {
    let seq: Vec<_> = offsets.iter().cloned().map(Perturbation::Shift).collect();
    check_invariance(CriterionId::TranslationInvariance, pipeline, table, None, &seq)
}

/// Strict monotonicity in every dimension, in the direction its orientation
/// asks for: moving toward the best end, positive indicators rise and
/// negative ones fall.
pub fn check_monotonicity(curve: &RankingCurve, orientations: &[Orientation]) -> CriterionResult {
    let id = CriterionId::StrictMonotonicity;
    let mut bad = Vec::new();
    let mut notes = Vec::new();
    for (j, o) in orientations.iter().enumerate() {
        let m = curve.is_monotone(j);
        let rising_to_best = match (m, curve.best_end()) {
            (Monotonicity::NotMonotone, _) => None,
            (Monotonicity::StrictlyIncreasing, BestEnd::AtT1)
            | (Monotonicity::StrictlyDecreasing, BestEnd::AtT0) => Some(true),
            _ => Some(false),
        };
        let ok = match rising_to_best {
            None => false,
            Some(up) => up == (*o == Orientation::Positive),
        };
        if !ok {
            bad.push(j as f64);
            notes.push(format!("dimension {j}: {m:?} for a {o:?} indicator"));
        }
    }
    if bad.is_empty() {
        CriterionResult::pass(
            id,
            format!("strictly monotone in all {} dimensions, toward the best end", orientations.len()),
        )
    } else {
        CriterionResult::fail(
            id,
            notes.join("; "),
            Witness::Values {
                label: "offending dimensions".into(),
                values: bad,
            },
        )
    }
}

/// Largest distance of `P1`, `P2` from the line `P0 P3`, over the chord length.
pub fn collinearity_residual(curve: &RankingCurve) -> f64 {
    let [p0, p1, p2, p3] = curve.control_points();
    let chord: Vec<f64> = p3.iter().zip(p0).map(|(a, b)| a - b).collect();
    let len2: f64 = chord.iter().map(|v| v * v).sum();
    let off = |p: &[f64]| {
        let v: Vec<f64> = p.iter().zip(p0).map(|(a, b)| a - b).collect();
        let s = v.iter().zip(&chord).map(|(a, b)| a * b).sum::<f64>() / len2;
        v.iter()
            .zip(&chord)
            .map(|(a, c)| (a - s * c).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    off(p1).max(off(p2)) / len2.sqrt()
}

/// Fits the pipeline on [`collinear_table`] and requires a straight control
/// polygon and the first-principal-component order.
pub fn check_linear_compatibility(pipeline: &dyn RankingPipeline) -> CriterionResult {
    let id = CriterionId::LinearCompatibility;
    let table = collinear_table();
    let run = match pipeline.run(&table) {
        Ok(r) => r,
        Err(e) => return CriterionResult::pipeline_failure(id, None, e),
    };
    let Some(curve) = run.curve else {
        return CriterionResult::not_applicable(id, "pipeline has no evaluation curve");
    };
    let residual = collinearity_residual(&curve);
    if !(residual <= LINEAR_RESIDUAL_TOLERANCE) {
        return CriterionResult::fail(
            id,
            format!("control polygon residual {residual:e} of chord length on collinear data"),
            Witness::Values {
                label: "collinearity residual".into(),
                values: vec![residual],
            },
        );
    }
    let pca = match pca_rank(&table) {
        Ok(r) => r,
        Err(e) => return CriterionResult::pipeline_failure(id, None, e.into()),
    };
    if let Some(item) = first_difference(table.ids(), &pca.orders(), &run.ranking.orders()) {
        return CriterionResult::fail(
            id,
            format!("order differs from the principal-component order at {item:?}"),
            Witness::Text {
                text: format!(
                    "pca orders {:?}, pipeline orders {:?}",
                    pca.orders(),
                    run.ranking.orders()
                ),
            },
        );
    }
    CriterionResult::pass(
        id,
        format!("residual {residual:.3e} on collinear data, order equals principal-component order"),
    )
}

/// Largest relative disagreement between the analytic derivative and a
/// central difference at `t = k/100`, `k = 1..=99`. The relative error is
/// taken against `max(|C'(t)|, 1e-3)`.
pub fn smoothness_residual(curve: &RankingCurve) -> f64 {
    let h = SMOOTHNESS_STEP;
    (1..100)
        .map(|k| {
            let t = k as f64 / 100.0;
            derivative_fd_error(curve, t, h)
        })
        .fold(0.0, f64::max)
}

/// Relative error of the analytic derivative at `t` against a central
/// difference with step `h`, clipped to stay inside `[0, 1]`.
pub fn derivative_fd_error(curve: &RankingCurve, t: f64, h: f64) -> f64 {
    let (lo, hi) = ((t - h).max(0.0), (t + h).min(1.0));
    let a = curve.eval_unchecked(lo);
    let b = curve.eval_unchecked(hi);
    let d = curve.derivative(t).expect("t in [0, 1]");
    let mut err2 = 0.0;
    let mut norm2 = 0.0;
    for j in 0..d.len() {
        let fd = (b[j] - a[j]) / (hi - lo);
        err2 += (d[j] - fd).powi(2);
        norm2 += d[j] * d[j];
    }
    err2.sqrt() / norm2.sqrt().max(1e-3)
}

pub fn check_smoothness(curve: Option<&RankingCurve>) -> CriterionResult {
    let id = CriterionId::Smoothness;
    let Some(curve) = curve else {
        return CriterionResult::not_applicable(id, "score table without an evaluation curve");
    };
    let r = smoothness_residual(curve);
    if r <= SMOOTHNESS_TOLERANCE {
        CriterionResult::pass(id, format!("derivative matches finite differences, max relative error {r:.2e}"))
    } else {
        CriterionResult::fail(
            id,
            format!("derivative disagrees with finite differences by {r:e}"),
            Witness::Values {
                label: "max relative derivative error".into(),
                values: vec![r],
            },
        )
    }
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

fn same_run(a: &PipelineRun, b: &PipelineRun) -> bool {
    a.ranking.orders() == b.ranking.orders()
        && bits(&a.ranking.scores()) == bits(&b.ranking.scores())
        && bits(&a.parameters) == bits(&b.parameters)
}

/// No hand-set parameters; fitted parameters are bit-identical across runs
/// and worker counts, and their number depends on `d` alone.
pub fn check_no_free_parameters(pipeline: &dyn RankingPipeline, table: &IndicatorTable) -> CriterionResult {
    check_no_free_parameters_inner(pipeline, table, None)
}

fn check_no_free_parameters_inner(
    pipeline: &dyn RankingPipeline,
    table: &IndicatorTable,
    base: Option<&PipelineRun>,
) -> CriterionResult {
    let id = CriterionId::NoFreeParameters;
    let user = pipeline.user_parameters();
    if !user.is_empty() {
        return CriterionResult::fail(
            id,
            format!("declares {} hand-set parameter(s)", user.len()),
            Witness::Text { text: user.join("; ") },
        );
    }
    let computed;
    let first = match base {
        Some(b) => b,
        None => match pipeline.run(table) {
            Ok(r) => {
                computed = r;
                &computed
            }
            Err(e) => return CriterionResult::pipeline_failure(id, None, e),
        },
    };
    let second = match pipeline.run(table) {
        Ok(r) => r,
        Err(e) => return CriterionResult::pipeline_failure(id, None, e),
    };
    if !same_run(first, &second) {
        return CriterionResult::fail(
            id,
            "two runs on identical input differ",
            Witness::Values {
                label: "parameters of the second run".into(),
                values: second.parameters,
            },
        );
    }
    let mut notes = vec!["two runs bit-identical".to_string()];
    if let Some(parallel) = pipeline.with_workers(8) {
        match parallel.run(table) {
            Ok(r) if same_run(first, &r) => notes.push("8 workers bit-identical to 1".into()),
            Ok(r) => {
                return CriterionResult::fail(
                    id,
                    "result depends on the worker count",
                    Witness::Values {
                        label: "parameters with 8 workers".into(),
                        values: r.parameters,
                    },
                )
            }
            Err(e) => return CriterionResult::pipeline_failure(id, None, e),
        }
    }
    let d = table.n_indicators();
    if let Some(expected) = pipeline.parameter_count(d) {
        if first.parameters.len() != expected {
            return CriterionResult::fail(
                id,
                format!("{} fitted parameters, expected {expected}", first.parameters.len()),
                Witness::Values {
                    label: "parameter count".into(),
                    values: vec![first.parameters.len() as f64],
                },
            );
        }
        notes.push(format!("{expected} = 4 x {d} parameters"));
        // the count must not move with n
        let half: Vec<usize> = (0..table.n_items()).step_by(2).collect();
        if let Ok(sub) = table.select_rows(&half) {
            if let Ok(r) = pipeline.run(&sub) {
                if r.parameters.len() != expected {
                    return CriterionResult::fail(
                        id,
                        format!("{} parameters on {} rows", r.parameters.len(), sub.n_items()),
                        Witness::Values {
                            label: "parameter count on row subset".into(),
                            values: vec![r.parameters.len() as f64],
                        },
                    );
                }
                notes.push(format!("same count on {} rows", sub.n_items()));
            }
        }
    }
    CriterionResult::pass(id, notes.join(", "))
}

/// The published artifact reproduces the ranking: a curve written to JSON
/// and read back scores every item bit-identically. Curve-less pipelines
/// are rerun from scratch instead.
pub fn check_reproducibility(pipeline: &dyn RankingPipeline, table: &IndicatorTable) -> CriterionResult {
    check_reproducibility_inner(pipeline, table, None)
}

fn check_reproducibility_inner(
    pipeline: &dyn RankingPipeline,
    table: &IndicatorTable,
    base: Option<&PipelineRun>,
) -> CriterionResult {
    let id = CriterionId::Reproducibility;
    let computed;
    let run = match base {
        Some(b) => b,
        None => match pipeline.run(table) {
            Ok(r) => {
                computed = r;
                &computed
            }
            Err(e) => return CriterionResult::pipeline_failure(id, None, e),
        },
    };
    let (replayed, how) = match &run.curve {
        Some(curve) => {
            let json = curve.to_json();
            let back = serde_json::from_str::<CurveFile>(&json)
                .map_err(|e| PipelineError::Other(e.to_string()))
                .and_then(|f| f.into_curve().map_err(|e| PipelineError::Fit(e.into())))
                .and_then(|c| rank_with(table, &c, crate::projection::DEFAULT_GRID_SIZE).map_err(Into::into));
            (back, "curve re-read from JSON")
        }
        None => (pipeline.run(table).map(|r| r.ranking), "rerun from raw data"),
    };
    match replayed {
        Ok(r) if r.orders() == run.ranking.orders() && bits(&r.scores()) == bits(&run.ranking.scores()) => {
            CriterionResult::pass(id, format!("{how} reproduces every score bit for bit"))
        }
        Ok(r) => {
            let (a, b) = (run.ranking.scores(), r.scores());
            let i = (0..a.len()).find(|&i| a[i].to_bits() != b[i].to_bits()).unwrap_or(0);
            CriterionResult::fail(
                id,
                format!("{how} scores {:?} differently", table.ids()[i]),
                Witness::Values {
                    label: format!("item {i}: original score, replayed score"),
                    values: vec![a[i], b[i]],
                },
            )
        }
        Err(e) => CriterionResult::pipeline_failure(id, None, e),
    }
}

pub fn check_open_data(pipeline: &dyn RankingPipeline) -> CriterionResult {
    let id = CriterionId::OpenDataDeclared;
    match pipeline.provenance() {
        Some(p) if !p.trim().is_empty() => CriterionResult::pass(id, format!("data source: {p}")),
        _ => CriterionResult::fail(
            id,
            "no dataset provenance declared",
            Witness::Text {
                text: "provenance string is missing or empty".into(),
            },
        ),
    }
}

/// Runs every criterion. Failures of individual criteria, including pipeline
/// errors, are recorded in the report and never abort the audit.
pub fn audit(pipeline: &dyn RankingPipeline, table: &IndicatorTable) -> MetaCriteriaReport {
    audit_with_trials(pipeline, table, DEFAULT_TRIALS)
}

pub fn audit_with_trials(
    pipeline: &dyn RankingPipeline,
    table: &IndicatorTable,
    trials: usize,
) -> MetaCriteriaReport {
    let d = table.n_indicators();
    let base = pipeline.run(table);
    let mut results = Vec::with_capacity(CriterionId::ALL.len());
    match &base {
        Ok(run) => {
            results.push(check_invariance(
                CriterionId::ScaleInvariance,
                pipeline,
                table,
                Some(&run.ranking),
                &scale_sequence(d, trials.max(1)),
            ));
            results.push(check_invariance(
                CriterionId::TranslationInvariance,
                pipeline,
                table,
                Some(&run.ranking),
                &shift_sequence(d, trials.max(1)),
            ));
            results.push(match &run.curve {
                Some(c) => check_monotonicity(c, table.orientations()),
                None => CriterionResult::not_applicable(
                    CriterionId::StrictMonotonicity,
                    "score table without an evaluation curve",
                ),
            });
            results.push(check_linear_compatibility(pipeline));
            results.push(check_smoothness(run.curve.as_ref()));
            results.push(check_no_free_parameters_inner(pipeline, table, Some(run)));
            results.push(check_reproducibility_inner(pipeline, table, Some(run)));
        }
        Err(e) => {
            for id in &CriterionId::ALL[..7] {
                let r = match id {
                    CriterionId::LinearCompatibility => check_linear_compatibility(pipeline),
                    _ => CriterionResult::pipeline_failure(*id, None, PipelineError::Other(e.to_string())),
                };
                results.push(r);
            }
        }
    }
    results.push(check_open_data(pipeline));
    MetaCriteriaReport {
        pipeline: pipeline.name(),
        n_items: table.n_items(),
        n_indicators: d,
        results,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReplayOutcome {
    Reproduced,
    NotReproduced,
    /// The witness records a value or a note, not a run.
    NotReplayable,
}

/// Re-runs the perturbation a witness records and checks that the same
/// discrepancy appears.
pub fn replay(pipeline: &dyn RankingPipeline, table: &IndicatorTable, witness: &Witness) -> ReplayOutcome {
    match witness {
        Witness::OrderChange {
            perturbation,
            before,
            after,
            ..
        } => {
            let base = pipeline.run(table).map(|r| r.ranking.orders());
            let moved = perturbation
                .apply(table)
                .and_then(|t| pipeline.run(&t))
                .map(|r| r.ranking.orders());
            match (base, moved) {
                (Ok(b), Ok(a)) if b == *before && a == *after && a != b => ReplayOutcome::Reproduced,
                _ => ReplayOutcome::NotReproduced,
            }
        }
        Witness::PipelineError { perturbation, .. } => {
            let r = match perturbation {
                Some(p) => p.apply(table).and_then(|t| pipeline.run(&t)),
                None => pipeline.run(table),
            };
            if r.is_err() {
                ReplayOutcome::Reproduced
            } else {
                ReplayOutcome::NotReproduced
            }
        }
        Witness::Values { .. } | Witness::Text { .. } => ReplayOutcome::NotReplayable,
    }
}
