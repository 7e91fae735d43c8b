//! Cubic Bézier curves in `d` dimensions.
//!
//! A [`RankingCurve`] is the evaluation function of the ranking method: four
//! control points (so `4 × d` free parameters) plus the end of the curve that
//! represents the best items. Everything here is a pure function of the
//! control points.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Transform;

/// Pair deviations at or below this fraction of the chord count as straight.
pub const LINEAR_SHAPE_TOLERANCE: f64 = 1e-6;

const NVI_GRID: usize = 2048;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("parameter t = {0} is outside [0, 1]")]
    Domain(f64),
    #[error("control points have inconsistent or zero dimension")]
    DimensionMismatch,
    #[error("control point coordinates must be finite")]
    NonFinite,
    #[error("curve endpoints coincide; the chord is degenerate")]
    DegenerateChord,
    #[error("curve is not strictly monotone in dimensions ({0}, {1})")]
    NotMonotoneInPair(usize, usize),
    #[error("dimension index {0} out of range")]
    BadIndex(usize),
}

/// Which end of the curve carries the best items (score 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BestEnd {
    AtT0,
    AtT1,
}

impl BestEnd {
    pub fn flipped(self) -> Self {
        match self {
            BestEnd::AtT0 => BestEnd::AtT1,
            BestEnd::AtT1 => BestEnd::AtT0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    StrictlyIncreasing,
    StrictlyDecreasing,
    NotMonotone,
}

impl Monotonicity {
    pub fn is_strict(self) -> bool {
        self != Monotonicity::NotMonotone
    }
}

/// The simple nonlinear relationships a monotone cubic can express between
/// two indicators, read in order of increasing first indicator.
///
/// `C` lies above its chord, `ReverseC` below it. `S` starts below the chord
/// and crosses above it once; `ReverseS` does the opposite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shape {
    Linear,
    C,
    ReverseC,
    S,
    ReverseS,
}

/// Shape labels for every ordered pair of distinct dimensions. `None` marks a
/// pair where one of the coordinates is not strictly monotone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeClass {
    labels: Vec<Vec<Option<Shape>>>,
}

impl ShapeClass {
    pub fn get(&self, dim_x: usize, dim_y: usize) -> Option<Shape> {
        self.labels.get(dim_x)?.get(dim_y).copied().flatten()
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankingCurve {
    points: [Vec<f64>; 4],
    best_end: BestEnd,
    transform: Option<Transform>,
}

fn lerp_into(a: &[f64], b: &[f64], t: f64, out: &mut [f64]) {
    for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
        *o = (1.0 - t) * x + t * y;
    }
}

impl RankingCurve {
    pub fn new(points: [Vec<f64>; 4], best_end: BestEnd) -> Result<Self, CurveError> {
        let d = points[0].len();
        if d == 0 || points.iter().any(|p| p.len() != d) {
            return Err(CurveError::DimensionMismatch);
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(CurveError::NonFinite);
        }
        if points[0] == points[3] {
            return Err(CurveError::DegenerateChord);
        }
        Ok(Self {
            points,
            best_end,
            transform: None,
        })
    }

    /// Attaches the normalization record of the table the curve lives in.
    pub fn with_transform(mut self, transform: Transform) -> Result<Self, CurveError> {
        if transform.dim() != self.dim() {
            return Err(CurveError::DimensionMismatch);
        }
        self.transform = Some(transform);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn control_points(&self) -> &[Vec<f64>; 4] {
        &self.points
    }

    pub fn best_end(&self) -> BestEnd {
        self.best_end
    }

    pub fn transform(&self) -> Option<&Transform> {
        self.transform.as_ref()
    }

    /// Always `4 × d`.
    pub fn parameter_count(&self) -> usize {
        4 * self.dim()
    }

    /// Control point coordinates, `P0` first.
    pub fn parameters(&self) -> Vec<f64> {
        self.points.iter().flatten().copied().collect()
    }

    /// Control points mapped back to raw indicator units.
    pub fn control_points_raw(&self) -> Option<[Vec<f64>; 4]> {
        let tr = self.transform.as_ref()?;
        Some(self.points.clone().map(|p| tr.denormalize_point(&p)))
    }

    /// Same geometric curve traversed backwards; `t` becomes `1 - t`.
    pub fn reversed(&self) -> Self {
        let [p0, p1, p2, p3] = self.points.clone();
        Self {
            points: [p3, p2, p1, p0],
            best_end: self.best_end.flipped(),
            transform: self.transform.clone(),
        }
    }

    /// Point at `t` by de Casteljau's construction.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>, CurveError> {
        check_domain(t)?;
        Ok(self.eval_unchecked(t))
    }

    /// Like [`eval`](Self::eval) but extrapolates the polynomial outside
    /// `[0, 1]`.
    pub fn eval_unchecked(&self, t: f64) -> Vec<f64> {
        let d = self.dim();
        let [p0, p1, p2, p3] = &self.points;
        let mut a = vec![0.0; d];
        let mut b = vec![0.0; d];
        let mut c = vec![0.0; d];
        lerp_into(p0, p1, t, &mut a);
        lerp_into(p1, p2, t, &mut b);
        lerp_into(p2, p3, t, &mut c);
        let (ab, bc) = (a.clone(), b.clone());
        lerp_into(&ab, &b, t, &mut a);
        lerp_into(&bc, &c, t, &mut b);
        let mut out = vec![0.0; d];
        lerp_into(&a, &b, t, &mut out);
        out
    }

    /// First derivative `C'(t)`.
    pub fn derivative(&self, t: f64) -> Result<Vec<f64>, CurveError> {
        check_domain(t)?;
        let d = self.dim();
        let [p0, p1, p2, p3] = &self.points;
        let diff = |a: &[f64], b: &[f64]| -> Vec<f64> { b.iter().zip(a).map(|(y, x)| y - x).collect() };
        let (d0, d1, d2) = (diff(p0, p1), diff(p1, p2), diff(p2, p3));
        let mut a = vec![0.0; d];
        let mut b = vec![0.0; d];
        lerp_into(&d0, &d1, t, &mut a);
        lerp_into(&d1, &d2, t, &mut b);
        let mut out = vec![0.0; d];
        lerp_into(&a, &b, t, &mut out);
        out.iter_mut().for_each(|v| *v *= 3.0);
        Ok(out)
    }

    /// Exact monotonicity of one coordinate, decided from the real roots of
    /// the quadratic derivative rather than by sampling.
    pub fn is_monotone(&self, dim: usize) -> Monotonicity {
        if dim >= self.dim() {
            return Monotonicity::NotMonotone;
        }
        let c = self.points.each_ref().map(|p| p[dim]);
        monotonicity_of(c[1] - c[0], c[2] - c[1], c[3] - c[2])
    }

    /// Largest distance from the curve to its chord `P0 P3`, relative to the
    /// chord length. Zero exactly when the curve is the chord itself.
    ///
    /// This is a geometric proxy for the nonlinearity variation index: it is
    /// a ratio of lengths, so it does not change under uniform scaling,
    /// rotation or translation.
    pub fn nonlinearity_index(&self) -> Result<f64, CurveError> {
        let chord: Vec<f64> = self.points[3]
            .iter()
            .zip(&self.points[0])
            .map(|(b, a)| b - a)
            .collect();
        let len2: f64 = chord.iter().map(|v| v * v).sum();
        if len2 == 0.0 {
            return Err(CurveError::DegenerateChord);
        }
        let p0 = &self.points[0];
        let dist = |t: f64| -> f64 {
            let c = self.eval_unchecked(t);
            let rel: Vec<f64> = c.iter().zip(p0).map(|(x, a)| x - a).collect();
            let s = (rel.iter().zip(&chord).map(|(r, c)| r * c).sum::<f64>() / len2).clamp(0.0, 1.0);
            rel.iter()
                .zip(&chord)
                .map(|(r, c)| (r - s * c).powi(2))
                .sum::<f64>()
                .sqrt()
        };

        let h = 1.0 / NVI_GRID as f64;
        let samples: Vec<f64> = (0..=NVI_GRID).map(|k| dist(k as f64 * h)).collect();
        let mut best = samples.iter().cloned().fold(0.0, f64::max);
        for k in 1..NVI_GRID {
            if samples[k] >= samples[k - 1] && samples[k] >= samples[k + 1] && samples[k] > 0.0 {
                let (lo, hi) = ((k - 1) as f64 * h, (k + 1) as f64 * h);
                best = best.max(golden_max(&dist, lo, hi));
            }
        }
        Ok(best / len2.sqrt())
    }

    /// Classifies the relationship of coordinate `dim_y` against `dim_x`.
    pub fn classify_shape(&self, dim_x: usize, dim_y: usize) -> Result<Shape, CurveError> {
        let d = self.dim();
        if dim_x >= d {
            return Err(CurveError::BadIndex(dim_x));
        }
        if dim_y >= d {
            return Err(CurveError::BadIndex(dim_y));
        }
        let mx = self.is_monotone(dim_x);
        if dim_x == dim_y || !mx.is_strict() || !self.is_monotone(dim_y).is_strict() {
            return Err(CurveError::NotMonotoneInPair(dim_x, dim_y));
        }
        let x = self.points.each_ref().map(|p| p[dim_x]);
        let y = self.points.each_ref().map(|p| p[dim_y]);

        let planar = RankingCurve::new(
            [0, 1, 2, 3].map(|i| vec![x[i], y[i]]),
            BestEnd::AtT1,
        )?;
        if planar.nonlinearity_index()? <= LINEAR_SHAPE_TOLERANCE {
            return Ok(Shape::Linear);
        }

        // Vertical deviation from the chord is a cubic vanishing at both ends:
        // 3t(1-t)[(1-t)D1 + tD2], so its sign pattern is read off D1 and D2.
        let slope = (y[3] - y[0]) / (x[3] - x[0]);
        let dev = |i: usize| y[i] - y[0] - slope * (x[i] - x[0]);
        let (mut first, mut second) = (dev(1), dev(2));
        if mx == Monotonicity::StrictlyDecreasing {
            std::mem::swap(&mut first, &mut second);
        }
        Ok(if first >= 0.0 && second >= 0.0 {
            Shape::C
        } else if first <= 0.0 && second <= 0.0 {
            Shape::ReverseC
        } else if first < 0.0 {
            Shape::S
        } else {
            Shape::ReverseS
        })
    }

    pub fn shape_classes(&self) -> ShapeClass {
        let d = self.dim();
        let labels = (0..d)
            .map(|i| (0..d).map(|j| self.classify_shape(i, j).ok()).collect())
            .collect();
        ShapeClass { labels }
    }

    pub fn to_file(&self) -> CurveFile {
        CurveFile {
            dim: self.dim(),
            indicators: self.transform.as_ref().map(|t| t.indicators.clone()),
            control_points: self.points.to_vec(),
            control_points_raw: self.control_points_raw().map(|p| p.to_vec()),
            best_end: self.best_end,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("curve serializes")
    }
}

/// JSON form of a curve. `control_points_raw` is present when the curve
/// carries its normalization record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indicators: Option<Vec<crate::data::IndicatorRange>>,
    pub control_points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_points_raw: Option<Vec<Vec<f64>>>,
    pub best_end: BestEnd,
}

impl CurveFile {
    /// Number of raw-unit coordinates, or normalized ones if no raw block.
    pub fn parameter_count(&self) -> usize {
        self.control_points_raw
            .as_ref()
            .unwrap_or(&self.control_points)
            .iter()
            .map(Vec::len)
            .sum()
    }

    pub fn into_curve(self) -> Result<RankingCurve, CurveError> {
        let pts: [Vec<f64>; 4] = self
            .control_points
            .try_into()
            .map_err(|_| CurveError::DimensionMismatch)?;
        if pts[0].len() != self.dim {
            return Err(CurveError::DimensionMismatch);
        }
        let curve = RankingCurve::new(pts, self.best_end)?;
        match self.indicators {
            Some(indicators) => curve.with_transform(Transform { indicators }),
            None => Ok(curve),
        }
    }
}

fn check_domain(t: f64) -> Result<(), CurveError> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(CurveError::Domain(t))
    }
}

/// Sign analysis of `q(t) = (1-t)^2 d0 + 2t(1-t) d1 + t^2 d2`, a positive
/// multiple of the derivative of one Bézier coordinate.
fn monotonicity_of(d0: f64, d1: f64, d2: f64) -> Monotonicity {
    if d0 == 0.0 && d1 == 0.0 && d2 == 0.0 {
        return Monotonicity::NotMonotone;
    }
    // power basis: q(t) = a t^2 + b t + c
    let a = d0 - 2.0 * d1 + d2;
    let b = 2.0 * (d1 - d0);
    let c = d0;
    let inside = |r: f64| r > 0.0 && r < 1.0;
    let sign_change = if a == 0.0 {
        b != 0.0 && inside(-c / b)
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc <= 0.0 {
            false
        } else {
            let q = -0.5 * (b + b.signum() * disc.sqrt());
            let r1 = q / a;
            let r2 = if q != 0.0 { c / q } else { r1 };
            // two distinct simple roots; each interior one flips the sign
            inside(r1) || inside(r2)
        }
    };
    if sign_change {
        return Monotonicity::NotMonotone;
    }
    let q = |t: f64| a * t * t + b * t + c;
    let v = [0.5, 0.25, 0.75]
        .into_iter()
        .map(q)
        .find(|v| *v != 0.0)
        .unwrap_or(0.0);
    if v > 0.0 {
        Monotonicity::StrictlyIncreasing
    } else if v < 0.0 {
        Monotonicity::StrictlyDecreasing
    } else {
        Monotonicity::NotMonotone
    }
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if hi - lo < 1e-14 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn curve(points: [&[f64]; 4]) -> RankingCurve {
        RankingCurve::new(points.map(|p| p.to_vec()), BestEnd::AtT1).unwrap()
    }

    fn random_curve(rng: &mut ChaCha8Rng, d: usize) -> RankingCurve {
        loop {
            let pts = [0; 4].map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect());
            if let Ok(c) = RankingCurve::new(pts, BestEnd::AtT1) {
                return c;
            }
        }
    }

    // Bernstein-sum evaluation, independent of de Casteljau.
    fn bernstein(c: &RankingCurve, t: f64) -> Vec<f64> {
        let s = 1.0 - t;
        let w = [s * s * s, 3.0 * s * s * t, 3.0 * s * t * t, t * t * t];
        (0..c.dim())
            .map(|j| (0..4).map(|i| w[i] * c.control_points()[i][j]).sum())
            .collect()
    }

    #[test]
    fn endpoints_and_midpoint() {
        let c = curve([&[0.0, 1.0], &[0.3, 7.0], &[2.0, -1.0], &[5.0, 2.0]]);
        assert_eq!(c.eval(0.0).unwrap(), vec![0.0, 1.0]);
        assert_eq!(c.eval(1.0).unwrap(), vec![5.0, 2.0]);
        let mid = c.eval(0.5).unwrap();
        let expect = [(0.0 + 0.9 + 6.0 + 5.0) / 8.0, (1.0 + 21.0 - 3.0 + 2.0) / 8.0];
        for (a, b) in mid.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(c.eval(1.5), Err(CurveError::Domain(1.5)));
        assert!(c.derivative(-0.1).is_err());
    }

    #[test]
    fn derivative_at_ends() {
        let c = curve([&[0.0, 1.0], &[0.3, 7.0], &[2.0, -1.0], &[5.0, 2.0]]);
        let d0 = c.derivative(0.0).unwrap();
        let d1 = c.derivative(1.0).unwrap();
        assert!((d0[0] - 0.9).abs() < 1e-14 && (d0[1] - 18.0).abs() < 1e-14);
        assert!((d1[0] - 9.0).abs() < 1e-14 && (d1[1] - 9.0).abs() < 1e-14);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(
            RankingCurve::new([vec![0.0], vec![1.0], vec![2.0], vec![0.0]], BestEnd::AtT1),
            Err(CurveError::DegenerateChord)
        );
        assert_eq!(
            RankingCurve::new([vec![0.0], vec![1.0, 2.0], vec![2.0], vec![3.0]], BestEnd::AtT1),
            Err(CurveError::DimensionMismatch)
        );
        assert_eq!(
            RankingCurve::new([vec![0.0], vec![f64::NAN], vec![2.0], vec![3.0]], BestEnd::AtT1),
            Err(CurveError::NonFinite)
        );
    }

    #[test]
    fn de_casteljau_matches_bernstein_and_hull() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let d = rng.gen_range(1..5);
            let c = random_curve(&mut rng, d);
            let t: f64 = rng.gen();
            let p = c.eval(t).unwrap();
            let q = bernstein(&c, t);
            for j in 0..d {
                assert!((p[j] - q[j]).abs() < 1e-12);
                let lo = c.control_points().iter().map(|p| p[j]).fold(f64::INFINITY, f64::min);
                let hi = c.control_points().iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max);
                assert!(p[j] >= lo - 1e-12 && p[j] <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn affine_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let c = random_curve(&mut rng, 3);
            let m: Vec<Vec<f64>> = (0..3).map(|_| (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
            let shift: Vec<f64> = (0..3).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let map = |p: &[f64]| -> Vec<f64> {
                (0..3).map(|i| shift[i] + (0..3).map(|k| m[i][k] * p[k]).sum::<f64>()).collect()
            };
            let Ok(mapped) = RankingCurve::new(c.control_points().clone().map(|p| map(&p)), BestEnd::AtT1)
            else {
                continue;
            };
            for k in 0..=20 {
                let t = k as f64 / 20.0;
                let a = mapped.eval(t).unwrap();
                let b = map(&c.eval(t).unwrap());
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() <= 1e-10 * (1.0 + y.abs()));
                }
            }
        }
    }

    #[test]
    fn derivative_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = 1e-6;
        for _ in 0..1000 {
            let d = rng.gen_range(1..5);
            let c = random_curve(&mut rng, d);
            let t = rng.gen_range(h..1.0 - h);
            let a = c.derivative(t).unwrap();
            let (p, m) = (c.eval(t + h).unwrap(), c.eval(t - h).unwrap());
            let fd: Vec<f64> = p.iter().zip(&m).map(|(x, y)| (x - y) / (2.0 * h)).collect();
            let err = a.iter().zip(&fd).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(err <= 1e-6 * norm.max(1e-3), "err {err} norm {norm}");
        }
    }

    #[test]
    fn monotonicity_examples() {
        let inc = curve([&[0.0], &[1.0], &[2.0], &[3.0]]);
        assert_eq!(inc.is_monotone(0), Monotonicity::StrictlyIncreasing);
        let dec = curve([&[3.0], &[2.5], &[0.5], &[0.0]]);
        assert_eq!(dec.is_monotone(0), Monotonicity::StrictlyDecreasing);
        let wiggle = curve([&[0.0, 0.0], &[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(wiggle.is_monotone(0), Monotonicity::NotMonotone);
        // derivative vanishes only at t = 0
        assert_eq!(wiggle.is_monotone(1), Monotonicity::StrictlyIncreasing);
        let flat = curve([&[0.0, 2.0], &[1.0, 2.0], &[2.0, 2.0], &[3.0, 2.0]]);
        assert_eq!(flat.is_monotone(1), Monotonicity::NotMonotone);
        // derivative touches zero without changing sign: still strict
        let touch = curve([&[0.0], &[0.25], &[0.0], &[0.25]]);
        assert_eq!(touch.is_monotone(0), Monotonicity::StrictlyIncreasing);
        assert_eq!(touch.is_monotone(5), Monotonicity::NotMonotone);
    }

    #[test]
    fn sign_changing_example_confirmed_by_sampling() {
        let c = curve([&[0.0, 0.0], &[1.0, 1.0], &[-1.0, 2.0], &[0.0, 3.0]]);
        let mut pos = false;
        let mut neg = false;
        for k in 0..=10_000 {
            let v = c.derivative(k as f64 / 10_000.0).unwrap()[0];
            pos |= v > 0.0;
            neg |= v < 0.0;
        }
        assert!(pos && neg);
        assert_eq!(c.is_monotone(0), Monotonicity::NotMonotone);
    }

    #[test]
    fn monotonicity_agrees_with_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let c = random_curve(&mut rng, 1);
            let mut pos = false;
            let mut neg = false;
            for k in 0..10_000 {
                let t = (k as f64 + 0.5) / 10_000.0;
                let v = c.derivative(t).unwrap()[0];
                pos |= v > 0.0;
                neg |= v < 0.0;
            }
            let sampled = match (pos, neg) {
                (true, false) => Monotonicity::StrictlyIncreasing,
                (false, true) => Monotonicity::StrictlyDecreasing,
                _ => Monotonicity::NotMonotone,
            };
            assert_eq!(c.is_monotone(0), sampled, "{:?}", c.control_points());
        }
    }

    #[test]
    fn nonlinearity_of_line_is_zero() {
        let c = curve([&[0.0, 0.0], &[1.0, 2.0], &[2.0, 4.0], &[3.0, 6.0]]);
        assert!(c.nonlinearity_index().unwrap() < 1e-15);
    }

    #[test]
    fn nonlinearity_matches_dense_sampling() {
        let c = curve([&[0.0, 0.0], &[0.0, 1.0], &[1.0, 1.0], &[1.0, 0.0]]);
        // Oracle: 10^6 samples of distance to the chord (the x axis from 0 to 1).
        let n = 1_000_000;
        let mut best: f64 = 0.0;
        for k in 0..=n {
            let p = bernstein(&c, k as f64 / n as f64);
            let s = p[0].clamp(0.0, 1.0);
            best = best.max(((p[0] - s).powi(2) + p[1].powi(2)).sqrt());
        }
        let nvi = c.nonlinearity_index().unwrap();
        assert!((nvi - best).abs() < 1e-9, "{nvi} vs {best}");
        assert!((nvi - 0.75).abs() < 1e-9);
    }

    #[test]
    fn nonlinearity_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let c = random_curve(&mut rng, 3);
            let s = rng.gen_range(0.01..100.0);
            let scaled = RankingCurve::new(c.control_points().clone().map(|p| p.iter().map(|v| v * s).collect()), BestEnd::AtT1).unwrap();
            let (a, b) = (c.nonlinearity_index().unwrap(), scaled.nonlinearity_index().unwrap());
            assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }
    }

    #[test]
    fn shape_linear() {
        let c = curve([&[0.0, 0.0, 1.0], &[1.0, 2.0, 0.5], &[2.0, 4.0, 0.2], &[3.0, 6.0, 0.1]]);
        assert_eq!(c.classify_shape(0, 1), Ok(Shape::Linear));
        assert!(c.classify_shape(0, 2).unwrap() != Shape::Linear);
    }

    #[test]
    fn shape_c_quarter_circle() {
        let k = 0.552_284_749_8;
        let c = curve([&[0.0, 0.0], &[0.0, k], &[1.0 - k, 1.0], &[1.0, 1.0]]);
        // sampling oracle: every interior point lies above the chord y = x
        for i in 1..100 {
            let p = c.eval(i as f64 / 100.0).unwrap();
            assert!(p[1] - p[0] > 0.0);
        }
        assert_eq!(c.classify_shape(0, 1), Ok(Shape::C));
        let flipped = curve([&[0.0, 0.0], &[k, 0.0], &[1.0, 1.0 - k], &[1.0, 1.0]]);
        assert_eq!(flipped.classify_shape(0, 1), Ok(Shape::ReverseC));
        // traversing backwards does not change the geometric shape
        assert_eq!(c.reversed().classify_shape(0, 1), Ok(Shape::C));
    }

    #[test]
    fn shape_s_from_point_symmetric_polygon() {
        // symmetric under 180° rotation about the chord midpoint (0.5, 0.5)
        let c = curve([&[0.0, 0.0], &[0.5, 0.0], &[0.5, 1.0], &[1.0, 1.0]]);
        let dev = |t: f64| {
            let p = c.eval(t).unwrap();
            p[1] - p[0]
        };
        assert!(dev(0.2) < 0.0 && dev(0.8) > 0.0);
        assert_eq!(c.classify_shape(0, 1), Ok(Shape::S));
        let r = curve([&[0.0, 0.0], &[0.0, 0.5], &[1.0, 0.5], &[1.0, 1.0]]);
        assert_eq!(r.classify_shape(0, 1), Ok(Shape::ReverseS));
        assert_eq!(r.reversed().classify_shape(0, 1), Ok(Shape::ReverseS));
    }

    #[test]
    fn shape_requires_monotone_pair() {
        let c = curve([&[0.0, 0.0], &[1.0, 0.0], &[-1.0, 1.0], &[0.0, 2.0]]);
        assert_eq!(c.classify_shape(0, 1), Err(CurveError::NotMonotoneInPair(0, 1)));
        let classes = c.shape_classes();
        assert_eq!(classes.get(0, 1), None);
        assert_eq!(classes.get(1, 1), None);
    }

    #[test]
    fn json_round_trip_with_raw_block() {
        use crate::data::{IndicatorRange, Orientation};
        let tr = Transform {
            indicators: vec![
                IndicatorRange { name: "GDP".into(), orientation: Orientation::Positive, min: 330.0, max: 70014.0 },
                IndicatorRange { name: "IMR".into(), orientation: Orientation::Negative, min: 2.0, max: 290.0 },
            ],
        };
        let c = curve([&[0.0, 1.0], &[0.2, 0.6], &[0.6, 0.2], &[1.0, 0.0]])
            .with_transform(tr)
            .unwrap();
        let file = c.to_file();
        assert_eq!(file.parameter_count(), 8);
        assert_eq!(file.control_points_raw.as_ref().unwrap()[3], vec![70014.0, 2.0]);
        let back: CurveFile = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back.into_curve().unwrap(), c);
    }
}
