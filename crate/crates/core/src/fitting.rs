//! Fitting a ranking curve to a normalized table.
//!
//! The curve starts as the first principal component segment (a straight
//! cubic) and is improved by alternating two exact half-steps:
//!
//! 1. project every item onto the current curve, giving parameters `t_i`;
//! 2. with the `t_i` fixed, the total squared distance is linear least
//!    squares in the control points, solved through the 4×4 normal equations.
//!
//! Neither half-step can increase the objective, and there is no randomness
//! anywhere, so the same table always yields the same curve.

use nalgebra::{DMatrix, Matrix4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bezier::{BestEnd, CurveError, CurveFile, Monotonicity, RankingCurve};
use crate::data::{normalize, DataError, IndicatorTable, NormalizedTable, Orientation, TransformMismatch};
use crate::pca::{end_is_better, PrincipalAxis};
use crate::projection::{project_all, score, ProjectionError, ProjectionResult, DEFAULT_GRID_SIZE};
use crate::ranking::RankingResult;

/// Tikhonov damping added to the normal equations of the curve step.
pub const NORMAL_EQUATION_DAMPING: f64 = 1e-12;

/// Method tag carried by rankings produced from a fitted curve.
pub const RPC_METHOD: &str = "rpc";

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least 4 items to fit a cubic, got {0}")]
    TooFewItems(usize),
    #[error("all items project to the same curve parameter; the curve step is rank deficient")]
    DegenerateParameterSpread,
    #[error("invalid fit configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    TransformMismatch(#[from] TransformMismatch),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("cannot start worker pool: {0}")]
    Workers(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub max_iters: usize,
    /// Stop once the relative decrease of the total squared distance falls
    /// below this.
    pub rel_tol: f64,
    pub grid_size: usize,
    /// Threads used by the projection half-step. Results do not depend on it.
    pub workers: usize,
}

impl FitConfig {
    /// The fit has no stochastic elements and takes no seed.
    pub const SEED_FREE: bool = true;

    pub fn validate(&self) -> Result<(), FitError> {
        if self.max_iters < 1 {
            return Err(FitError::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(FitError::InvalidConfig("rel_tol must be positive".into()));
        }
        if self.grid_size < 2 {
            return Err(FitError::InvalidConfig("grid_size must be at least 2".into()));
        }
        if self.workers < 1 {
            return Err(FitError::InvalidConfig("workers must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            rel_tol: 1e-8,
            grid_size: DEFAULT_GRID_SIZE,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub iterations: usize,
    /// Total squared orthogonal distance after the initial projection and
    /// after every accepted iteration. Non-increasing.
    pub distances: Vec<f64>,
    pub monotonicity: Vec<Monotonicity>,
    pub converged: bool,
}

impl FitReport {
    pub fn all_strictly_monotone(&self) -> bool {
        self.monotonicity.iter().all(|m| m.is_strict())
    }

    pub fn final_distance(&self) -> f64 {
        *self.distances.last().expect("at least one distance")
    }
}

/// Straight cubic along the first principal component, spanning the extreme
/// projections of the data, with the better end at `t = 1`.
pub fn init_curve(
    data: &NormalizedTable,
    orientations: &[Orientation],
) -> Result<RankingCurve, FitError> {
    let n = data.n_items();
    if n < 4 {
        return Err(FitError::TooFewItems(n));
    }
    let axis = PrincipalAxis::fit(data.values());
    let (lo, hi) = axis.extent();
    let (a, b) = (axis.point_at(lo), axis.point_at(hi));
    let (start, end) = if end_is_better(&a, &b, orientations) {
        (a, b)
    } else {
        (b, a)
    };
    let at = |f: f64| -> Vec<f64> {
        start
            .iter()
            .zip(&end)
            .map(|(s, e)| s + f * (e - s))
            .collect()
    };
    let curve = RankingCurve::new([start.clone(), at(1.0 / 3.0), at(2.0 / 3.0), end.clone()], BestEnd::AtT1)
        .map_err(|e| match e {
            CurveError::DegenerateChord => FitError::DegenerateParameterSpread,
            e => e.into(),
        })?;
    Ok(curve.with_transform(data.transform().clone())?)
}

fn bernstein(t: f64) -> [f64; 4] {
    let s = 1.0 - t;
    [s * s * s, 3.0 * s * s * t, 3.0 * s * t * t, t * t * t]
}

/// Least-squares control points for fixed parameters, summing items in
/// index order.
fn curve_step(points: &[Vec<f64>], ts: &[f64]) -> Result<[Vec<f64>; 4], FitError> {
    let d = points[0].len();
    let mut normal = Matrix4::<f64>::identity() * NORMAL_EQUATION_DAMPING;
    let mut rhs = DMatrix::<f64>::zeros(4, d);
    for (x, &t) in points.iter().zip(ts) {
        let b = bernstein(t);
        for r in 0..4 {
            for c in 0..4 {
                normal[(r, c)] += b[r] * b[c];
            }
            for j in 0..d {
                rhs[(r, j)] += b[r] * x[j];
            }
        }
    }
    let chol = normal
        .cholesky()
        .ok_or(FitError::DegenerateParameterSpread)?;
    let l = chol.l();
    // forward/back substitution column by column
    let mut sol = [vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]];
    for j in 0..d {
        let mut y = [0.0; 4];
        for r in 0..4 {
            let mut s = rhs[(r, j)];
            for k in 0..r {
                s -= l[(r, k)] * y[k];
            }
            y[r] = s / l[(r, r)];
        }
        let mut x = [0.0; 4];
        for r in (0..4).rev() {
            let mut s = y[r];
            for k in r + 1..4 {
                s -= l[(k, r)] * x[k];
            }
            x[r] = s / l[(r, r)];
        }
        for r in 0..4 {
            sol[r][j] = x[r];
        }
    }
    Ok(sol)
}

fn total_sq_distance(proj: &[ProjectionResult]) -> f64 {
    proj.iter().map(|p| p.distance * p.distance).sum()
}

/// Fits the ranking curve by alternating projection and least squares.
pub fn fit(
    data: &NormalizedTable,
    orientations: &[Orientation],
    config: &FitConfig,
) -> Result<(RankingCurve, FitReport), FitError> {
    config.validate()?;
    if config.workers == 1 {
        return fit_inner(data, orientations, config, false);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| FitError::Workers(e.to_string()))?;
    pool.install(|| fit_inner(data, orientations, config, true))
}

fn fit_inner(
    data: &NormalizedTable,
    orientations: &[Orientation],
    config: &FitConfig,
    parallel: bool,
) -> Result<(RankingCurve, FitReport), FitError> {
    let points = data.values();
    let mut curve = init_curve(data, orientations)?;
    let mut proj = project_all(&curve, points, config.grid_size, parallel)?;
    let mut total = total_sq_distance(&proj);
    let mut distances = vec![total];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iters {
        if total == 0.0 {
            converged = true;
            break;
        }
        let ts: Vec<f64> = proj.iter().map(|p| p.t).collect();
        if ts.iter().all(|&t| t == ts[0]) {
            return Err(FitError::DegenerateParameterSpread);
        }
        iterations += 1;
        let next = match RankingCurve::new(curve_step(points, &ts)?, BestEnd::AtT1) {
            Ok(c) => c.with_transform(data.transform().clone())?,
            Err(CurveError::DegenerateChord) => return Err(FitError::DegenerateParameterSpread),
            Err(e) => return Err(e.into()),
        };
        let next_proj = project_all(&next, points, config.grid_size, parallel)?;
        let next_total = total_sq_distance(&next_proj);
        if next_total > total {
            // only rounding can get here; keep the better curve
            converged = true;
            break;
        }
        let decrease = (total - next_total) / total;
        curve = next;
        proj = next_proj;
        total = next_total;
        distances.push(total);
        if decrease < config.rel_tol {
            converged = true;
            break;
        }
    }

    let [p0, p1, p2, p3] = curve.control_points().clone();
    if !end_is_better(&p0, &p3, orientations) {
        curve = RankingCurve::new([p3, p2, p1, p0], BestEnd::AtT1)?
            .with_transform(data.transform().clone())?;
    }
    let monotonicity = (0..curve.dim()).map(|j| curve.is_monotone(j)).collect();
    Ok((
        curve,
        FitReport {
            iterations,
            distances,
            monotonicity,
            converged,
        },
    ))
}

/// Scores every item of `table` by projection onto `curve`, normalizing with
/// the transform the curve carries.
pub fn rank(table: &IndicatorTable, curve: &RankingCurve) -> Result<RankingResult, FitError> {
    rank_with(table, curve, DEFAULT_GRID_SIZE)
}

pub fn rank_with(
    table: &IndicatorTable,
    curve: &RankingCurve,
    grid_size: usize,
) -> Result<RankingResult, FitError> {
    let transform = curve.transform().ok_or_else(|| {
        TransformMismatch("curve carries no normalization record".to_string())
    })?;
    let rows = transform.apply(table)?;
    let proj = project_all(curve, &rows, grid_size, false)?;
    let scores: Vec<f64> = proj.iter().map(|p| score(p, curve.best_end())).collect();
    Ok(RankingResult::from_scores(RPC_METHOD, table.ids(), &scores))
}

/// Curve, report and ranking of one fit; the JSON written by `rankcurve fit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOutput {
    pub curve: CurveFile,
    pub report: FitReport,
    pub ranking: RankingResult,
}

/// Normalizes, fits and ranks a raw table in one go.
#[derive(Debug, Clone)]
pub struct FittedModel {
    pub normalized: NormalizedTable,
    pub curve: RankingCurve,
    pub report: FitReport,
    pub ranking: RankingResult,
}

impl FittedModel {
    pub fn fit(table: &IndicatorTable, config: &FitConfig) -> Result<Self, FitError> {
        let normalized = normalize(table)?;
        let (curve, report) = fit(&normalized, table.orientations(), config)?;
        let ranking = rank_with(table, &curve, config.grid_size)?;
        Ok(Self {
            normalized,
            curve,
            report,
            ranking,
        })
    }

    pub fn output(&self) -> FitOutput {
        FitOutput {
            curve: self.curve.to_file(),
            report: self.report.clone(),
            ranking: self.ranking.clone(),
        }
    }
}
