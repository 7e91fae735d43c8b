//! First principal axis of a normalized table.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::data::Orientation;

/// Mean, unit direction and per-row projections onto the leading principal
/// component.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalAxis {
    pub mean: Vec<f64>,
    pub direction: Vec<f64>,
    pub projections: Vec<f64>,
}

impl PrincipalAxis {
    /// Uses the sample covariance of `rows`. The eigenvector sign is fixed so
    /// that its largest-magnitude loading is positive (first index wins ties).
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let d = rows[0].len();
        let mut mean = vec![0.0; d];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);

        let mut cov = DMatrix::<f64>::zeros(d, d);
        for r in rows {
            for a in 0..d {
                for b in 0..d {
                    cov[(a, b)] += (r[a] - mean[a]) * (r[b] - mean[b]);
                }
            }
        }
        cov /= (n.max(2) - 1) as f64;

        let eig = SymmetricEigen::new(cov);
        let mut best = 0;
        for k in 1..d {
            if eig.eigenvalues[k] > eig.eigenvalues[best] {
                best = k;
            }
        }
        let mut direction: Vec<f64> = eig.eigenvectors.column(best).iter().copied().collect();
        let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        direction.iter_mut().for_each(|v| *v /= norm);
        let mut lead = 0;
        for k in 1..d {
            if direction[k].abs() > direction[lead].abs() {
                lead = k;
            }
        }
        if direction[lead] < 0.0 {
            direction.iter_mut().for_each(|v| *v = -*v);
        }

        let projections = rows
            .iter()
            .map(|r| {
                r.iter()
                    .zip(&mean)
                    .zip(&direction)
                    .map(|((x, m), v)| (x - m) * v)
                    .sum()
            })
            .collect();
        Self {
            mean,
            direction,
            projections,
        }
    }

    pub fn point_at(&self, s: f64) -> Vec<f64> {
        self.mean
            .iter()
            .zip(&self.direction)
            .map(|(m, v)| m + s * v)
            .collect()
    }

    pub fn extent(&self) -> (f64, f64) {
        self.projections
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| {
                (lo.min(s), hi.max(s))
            })
    }
}

/// Mean of a normalized point's coordinates after flipping negative
/// indicators, the quantity used to decide which curve end is best.
pub fn oriented_mean(point: &[f64], orientations: &[Orientation]) -> f64 {
    point
        .iter()
        .zip(orientations)
        .map(|(&v, o)| o.orient(v))
        .sum::<f64>()
        / point.len() as f64
}

/// True when `end` should be the best end rather than `start`: it has the
/// larger oriented mean, or on a tie the larger first coordinate.
pub fn end_is_better(start: &[f64], end: &[f64], orientations: &[Orientation]) -> bool {
    let (a, b) = (
        oriented_mean(start, orientations),
        oriented_mean(end, orientations),
    );
    if a != b {
        b > a
    } else {
        end[0] >= start[0]
    }
}
