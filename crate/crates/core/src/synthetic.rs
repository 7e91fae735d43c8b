//! Deterministic synthetic tables. Nothing here draws random numbers: the
//! generators use fixed permutations and Weyl sequences, so the same call
//! always returns the same table.

use crate::bezier::{BestEnd, RankingCurve};
use crate::data::{IndicatorTable, Orientation};

const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn frac(x: f64) -> f64 {
    x - x.floor()
}

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("item{i:03}")).collect()
}

fn names4() -> Vec<String> {
    ["x1", "x2", "x3", "x4"].map(String::from).to_vec()
}

fn orientations4() -> Vec<Orientation> {
    use Orientation::*;
    vec![Positive, Positive, Negative, Negative]
}

/// 50 noiseless points on a line in 4 dimensions.
///
/// Item `i` sits at `s_i = (17 i mod 50) / 49` along the line
/// `base + s · slope` with `base = [1, 50, 200, 0.5]` and
/// `slope = [3, 20, -150, -0.4]`. The last two indicators are negative, so
/// larger `s` is better in every dimension and item order is scrambled.
pub fn collinear_table() -> IndicatorTable {
    const N: usize = 50;
    let base = [1.0, 50.0, 200.0, 0.5];
    let slope = [3.0, 20.0, -150.0, -0.4];
    let values = (0..N)
        .map(|i| {
            let s = ((17 * i) % N) as f64 / (N - 1) as f64;
            (0..4).map(|j| base[j] + s * slope[j]).collect()
        })
        .collect();
    IndicatorTable::new(ids(N), names4(), orientations4(), values).expect("valid table")
}

/// Normalized-space curve behind [`curved_table`]: each coordinate is
/// monotone, improving toward `t = 1`.
pub fn curved_generator() -> RankingCurve {
    RankingCurve::new(
        [
            vec![0.0, 0.1, 1.0, 1.0],
            vec![0.05, 0.7, 0.6, 0.5],
            vec![0.35, 0.95, 0.15, 0.2],
            vec![1.0, 1.0, 0.0, 0.0],
        ],
        BestEnd::AtT1,
    )
    .expect("valid generator")
}

/// `n` points scattered around [`curved_generator`] with noise of
/// half-width 0.02 per coordinate, mapped to raw units resembling
/// GDP, life expectancy, infant mortality and a disease rate.
pub fn curved_table(n: usize) -> IndicatorTable {
    let curve = curved_generator();
    let scale = [50_000.0, 45.0, 150.0, 300.0];
    let offset = [2000.0, 40.0, 5.0, 8.0];
    let values = (0..n)
        .map(|i| {
            let t = frac(0.5 + i as f64 * GOLDEN);
            let p = curve.eval_unchecked(t);
            (0..4)
                .map(|j| {
                    let u = frac((i + 1) as f64 * (j as f64 + 2.0).sqrt()) - 0.5;
                    offset[j] + scale[j] * (p[j] + 0.04 * u)
                })
                .collect()
        })
        .collect();
    IndicatorTable::new(ids(n), names4(), orientations4(), values).expect("valid table")
}

/// Points on a curve whose first two coordinates are affine in one another
/// (so that pair is linear) while the other coordinates bend. No noise.
pub fn partially_linear_table(n: usize) -> IndicatorTable {
    let curve = RankingCurve::new(
        [
            vec![0.0, 0.0, 1.0, 1.0],
            vec![1.0 / 3.0, 1.0 / 3.0, 0.3, 0.9],
            vec![2.0 / 3.0, 2.0 / 3.0, 0.1, 0.7],
            vec![1.0, 1.0, 0.0, 0.0],
        ],
        BestEnd::AtT1,
    )
    .expect("valid generator");
    let values = (0..n)
        .map(|i| curve.eval_unchecked(i as f64 / (n - 1) as f64))
        .collect();
    IndicatorTable::new(ids(n), names4(), orientations4(), values).expect("valid table")
}

/// The three-item, two-indicator table on which the raw arithmetic mean
/// changes its order when the first column is multiplied by 1000 and the
/// second halved, and on which the raw geometric mean changes its order when
/// both columns are shifted by `(10, 100)`.
pub fn fleming_wallace_table() -> IndicatorTable {
    use Orientation::Positive;
    IndicatorTable::new(
        vec!["A".into(), "B".into(), "C".into()],
        vec!["x1".into(), "x2".into()],
        vec![Positive, Positive],
        vec![vec![20.0, 20.0], vec![5.0, 100.0], vec![1.0, 1.0]],
    )
    .expect("valid table")
}
