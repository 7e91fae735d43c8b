//! Orthogonal projection of points onto a [`RankingCurve`] and conversion of
//! the projection parameter into a score.
//!
//! The squared distance `|x - C(t)|^2` is a degree-6 polynomial in `t`, so it
//! has at most five stationary points. We sample it on a uniform grid, polish
//! every grid-local minimum with bracketed Newton steps on
//! `g(t) = <C(t) - x, C'(t)>`, and keep the best of those candidates and the
//! two endpoints.

use rayon::prelude::*;
use thiserror::Error;

use crate::bezier::{BestEnd, RankingCurve};

pub const DEFAULT_GRID_SIZE: usize = 1025;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectionError {
    #[error("point has {got} coordinates, curve has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("projection grid needs at least 2 samples, got {0}")]
    GridTooSmall(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionResult {
    /// Curve parameter of the nearest point.
    pub t: f64,
    /// Euclidean distance to `C(t)` in normalized space.
    pub distance: f64,
    /// The nearest point is an endpoint the unconstrained minimizer lies beyond.
    pub clamped: bool,
}

/// Power-basis form of a curve, precomputed for repeated projection.
#[derive(Debug, Clone)]
pub struct Projector<'a> {
    curve: &'a RankingCurve,
    // per dimension: C_j(t) = c0 + c1 t + c2 t^2 + c3 t^3
    coeffs: Vec<[f64; 4]>,
    grid_size: usize,
}

impl<'a> Projector<'a> {
    pub fn new(curve: &'a RankingCurve, grid_size: usize) -> Result<Self, ProjectionError> {
        if grid_size < 2 {
            return Err(ProjectionError::GridTooSmall(grid_size));
        }
        let [p0, p1, p2, p3] = curve.control_points();
        let coeffs = (0..curve.dim())
            .map(|j| {
                let (a, b, c, d) = (p0[j], p1[j], p2[j], p3[j]);
                [
                    a,
                    3.0 * (b - a),
                    3.0 * (c - 2.0 * b + a),
                    d - 3.0 * c + 3.0 * b - a,
                ]
            })
            .collect();
        Ok(Self {
            curve,
            coeffs,
            grid_size,
        })
    }

    fn sq_dist_poly(&self, x: &[f64], t: f64) -> f64 {
        self.coeffs
            .iter()
            .zip(x)
            .map(|(c, &xj)| {
                let v = c[0] + t * (c[1] + t * (c[2] + t * c[3])) - xj;
                v * v
            })
            .sum()
    }

    /// `g(t)` and `g'(t)`, half the first and second derivative of the
    /// squared distance.
    fn stationarity(&self, x: &[f64], t: f64) -> (f64, f64) {
        let mut g = 0.0;
        let mut dg = 0.0;
        for (c, &xj) in self.coeffs.iter().zip(x) {
            let r = c[0] + t * (c[1] + t * (c[2] + t * c[3])) - xj;
            let d1 = c[1] + t * (2.0 * c[2] + 3.0 * t * c[3]);
            let d2 = 2.0 * c[2] + 6.0 * t * c[3];
            g += r * d1;
            dg += d1 * d1 + r * d2;
        }
        (g, dg)
    }

    fn exact_sq_dist(&self, x: &[f64], t: f64) -> f64 {
        self.curve
            .eval_unchecked(t)
            .iter()
            .zip(x)
            .map(|(c, v)| (c - v) * (c - v))
            .sum()
    }

    /// Root of `g` inside `[lo, hi]` where `g(lo) < 0 < g(hi)`.
    fn newton_bracketed(&self, x: &[f64], mut lo: f64, mut hi: f64, start: f64) -> f64 {
        let mut t = if start > lo && start < hi {
            start
        } else {
            0.5 * (lo + hi)
        };
        for _ in 0..100 {
            let (g, dg) = self.stationarity(x, t);
            if g == 0.0 {
                return t;
            }
            if g < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let newton = t - g / dg;
            let next = if dg > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if next == t || hi - lo <= f64::EPSILON * hi.max(f64::MIN_POSITIVE) {
                return next;
            }
            t = next;
        }
        t
    }

    pub fn project(&self, x: &[f64]) -> Result<ProjectionResult, ProjectionError> {
        if x.len() != self.coeffs.len() {
            return Err(ProjectionError::DimensionMismatch {
                expected: self.coeffs.len(),
                got: x.len(),
            });
        }
        let m = self.grid_size - 1;
        let h = 1.0 / m as f64;
        let grid_t = |k: usize| if k == m { 1.0 } else { k as f64 * h };
        let samples: Vec<f64> = (0..=m).map(|k| self.sq_dist_poly(x, grid_t(k))).collect();

        let mut candidates = vec![0.0, 1.0];
        for k in 0..=m {
            let left_ok = k == 0 || samples[k] <= samples[k - 1];
            let right_ok = k == m || samples[k] <= samples[k + 1];
            if !(left_ok && right_ok) {
                continue;
            }
            candidates.push(grid_t(k));
            let lo = grid_t(k.saturating_sub(1));
            let hi = grid_t((k + 1).min(m));
            let (g_lo, _) = self.stationarity(x, lo);
            let (g_hi, _) = self.stationarity(x, hi);
            if g_lo < 0.0 && g_hi > 0.0 {
                candidates.push(self.newton_bracketed(x, lo, hi, grid_t(k)));
            }
        }
        candidates.sort_by(f64::total_cmp);

        let mut best_t = candidates[0];
        let mut best = self.exact_sq_dist(x, best_t);
        for &t in &candidates[1..] {
            let d = self.exact_sq_dist(x, t);
            if d < best {
                best = d;
                best_t = t;
            }
        }

        let clamped = if best_t == 0.0 {
            self.stationarity(x, 0.0).0 > 0.0
        } else if best_t == 1.0 {
            self.stationarity(x, 1.0).0 < 0.0
        } else {
            false
        };
        Ok(ProjectionResult {
            t: best_t,
            distance: best.sqrt(),
            clamped,
        })
    }
}

/// Nearest point on `curve` to `x`, using the default grid.
pub fn project_point(curve: &RankingCurve, x: &[f64]) -> Result<ProjectionResult, ProjectionError> {
    Projector::new(curve, DEFAULT_GRID_SIZE)?.project(x)
}

/// Projects every point. Each item is independent, so the output is the
/// same whatever rayon pool (if any) this runs in.
pub fn project_all(
    curve: &RankingCurve,
    points: &[Vec<f64>],
    grid_size: usize,
    parallel: bool,
) -> Result<Vec<ProjectionResult>, ProjectionError> {
    let projector = Projector::new(curve, grid_size)?;
    if parallel {
        points.par_iter().map(|p| projector.project(p)).collect()
    } else {
        points.iter().map(|p| projector.project(p)).collect()
    }
}

/// Orientation-adjusted projection parameter: larger is always better.
pub fn score(pr: &ProjectionResult, best_end: BestEnd) -> f64 {
    match best_end {
        BestEnd::AtT1 => pr.t,
        BestEnd::AtT0 => 1.0 - pr.t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn curve(points: [&[f64]; 4]) -> RankingCurve {
        RankingCurve::new(points.map(|p| p.to_vec()), BestEnd::AtT1).unwrap()
    }

    fn arc() -> RankingCurve {
        curve([&[0.0, 0.0], &[0.2, 0.6], &[0.6, 0.9], &[1.0, 1.0]])
    }

    #[test]
    fn point_on_curve_recovers_parameter() {
        let c = arc();
        let x = c.eval(0.37).unwrap();
        let pr = project_point(&c, &x).unwrap();
        assert!((pr.t - 0.37).abs() < 1e-6, "{}", pr.t);
        assert!(pr.distance <= 1e-8);
        assert!(!pr.clamped);
    }

    #[test]
    fn sweep_along_curve_has_zero_distance() {
        let c = arc();
        for k in 0..=100 {
            let x = c.eval(k as f64 / 100.0).unwrap();
            assert!(project_point(&c, &x).unwrap().distance <= 1e-8);
        }
    }

    #[test]
    fn beyond_start_is_clamped() {
        let c = arc();
        // outward along the reversed tangent at t = 0
        let d = c.derivative(0.0).unwrap();
        let x = vec![-0.3 * d[0], -0.3 * d[1]];
        let pr = project_point(&c, &x).unwrap();
        assert_eq!(pr.t, 0.0);
        assert!(pr.clamped);
        let far = vec![2.0, 1.2];
        let pr = project_point(&c, &far).unwrap();
        assert_eq!(pr.t, 1.0);
        assert!(pr.clamped);
    }

    #[test]
    fn distance_matches_eval_and_stationarity_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let d = rng.gen_range(2..5);
            let c = RankingCurve::new(
                [0; 4].map(|_| (0..d).map(|_| rng.gen_range(0.0..1.0)).collect()),
                BestEnd::AtT1,
            )
            .unwrap();
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.25..1.25)).collect();
            let pr = project_point(&c, &x).unwrap();
            let p = c.eval(pr.t).unwrap();
            let r: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a - b).collect();
            let dist = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert_eq!(dist, pr.distance);
            if !pr.clamped && pr.t > 0.0 && pr.t < 1.0 {
                let dc = c.derivative(pr.t).unwrap();
                let g: f64 = r.iter().zip(&dc).map(|(a, b)| a * b).sum();
                let dn = dc.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!(g.abs() <= 1e-8 * dist * dn + 1e-15, "g {g}");
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            project_point(&arc(), &[0.0]),
            Err(ProjectionError::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(Projector::new(&arc(), 1).is_err());
    }

    #[test]
    fn scores() {
        let pr = |t| ProjectionResult { t, distance: 0.0, clamped: false };
        assert_eq!(score(&pr(1.0), BestEnd::AtT1), 1.0);
        assert!((score(&pr(0.3), BestEnd::AtT0) - 0.7).abs() < 1e-15);
        assert_eq!(score(&pr(0.5), BestEnd::AtT0), 0.5);
        assert_eq!(score(&pr(0.5), BestEnd::AtT1), 0.5);
    }

    #[test]
    fn parallel_and_serial_agree_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts: Vec<Vec<f64>> = (0..200).map(|_| vec![rng.gen(), rng.gen()]).collect();
        let a = project_all(&arc(), &pts, DEFAULT_GRID_SIZE, false).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
        let b = pool.install(|| project_all(&arc(), &pts, DEFAULT_GRID_SIZE, true)).unwrap();
        assert_eq!(a, b);
    }
}
