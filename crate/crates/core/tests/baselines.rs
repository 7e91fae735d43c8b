use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rankcurve::baselines::{
    arithmetic_mean_rank, compare, entropy_weight_rank, geometric_mean_rank, pca_rank, raw_geometric_mean_rank,
};
use rankcurve::data::{IndicatorTable, Orientation};
use rankcurve::fitting::{FitConfig, FittedModel};
use rankcurve::reference::{elmap_reference, published_excerpt_table};
use rankcurve::synthetic::collinear_table;

fn random_table(rng: &mut ChaCha8Rng) -> IndicatorTable {
    let n = rng.gen_range(3..30);
    let d = rng.gen_range(1..6);
    IndicatorTable::new(
        (0..n).map(|i| i.to_string()).collect(),
        (0..d).map(|j| format!("c{j}")).collect(),
        (0..d)
            .map(|_| if rng.gen_bool(0.5) { Orientation::Positive } else { Orientation::Negative })
            .collect(),
        (0..n).map(|_| (0..d).map(|_| rng.gen_range(0.01..1000.0)).collect()).collect(),
    )
    .unwrap()
}

#[test]
fn raw_geometric_mean_order_ignores_units_on_100_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let t = random_table(&mut rng);
        let factors: Vec<f64> = (0..t.n_indicators()).map(|_| 10f64.powf(rng.gen_range(-3.0..3.0))).collect();
        let a = raw_geometric_mean_rank(&t).unwrap();
        let b = raw_geometric_mean_rank(&t.scaled(&factors).unwrap()).unwrap();
        let s = a.scores();
        // pairs closer than rounding can legitimately swap; none do here
        let min_gap = (0..s.len())
            .flat_map(|i| (0..s.len()).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| (s[i] / s[j] - 1.0).abs())
            .fold(f64::INFINITY, f64::min);
        if min_gap > 1e-9 {
            assert_eq!(a.orders(), b.orders());
        }
    }
}

#[test]
fn equal_rows_make_arithmetic_and_geometric_agree() {
    let t = IndicatorTable::new(
        (0..5).map(|i| i.to_string()).collect(),
        vec!["a".into(), "b".into(), "c".into()],
        vec![Orientation::Positive; 3],
        (0..5).map(|i| vec![(i * i) as f64; 3]).collect(),
    )
    .unwrap();
    assert_eq!(arithmetic_mean_rank(&t, None).unwrap().orders(), geometric_mean_rank(&t).unwrap().orders());
}

#[test]
fn baselines_are_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let t = random_table(&mut rng);
        assert_eq!(pca_rank(&t).unwrap(), pca_rank(&t).unwrap());
        assert_eq!(geometric_mean_rank(&t).unwrap(), geometric_mean_rank(&t).unwrap());
        if let Ok(r) = entropy_weight_rank(&t) {
            assert_eq!(r, entropy_weight_rank(&t).unwrap());
        }
    }
}

#[test]
fn pca_and_curve_agree_on_collinear_data() {
    let t = collinear_table();
    let rpc = FittedModel::fit(&t, &FitConfig::default()).unwrap().ranking;
    assert_eq!(pca_rank(&t).unwrap().orders(), rpc.orders());
    let c = compare(&[rpc, pca_rank(&t).unwrap()], None).unwrap();
    assert!((c.spearman[0][1] - 1.0).abs() < 1e-12);
    assert!((c.kendall[0][1] - 1.0).abs() < 1e-12);
}

#[test]
fn reference_column_joins_on_excerpt() {
    let t = published_excerpt_table();
    let r = arithmetic_mean_rank(&t, None).unwrap();
    let c = compare(&[r], Some(&elmap_reference())).unwrap();
    assert_eq!(c.methods.len(), 2);
    assert!(c.rows.iter().all(|row| row.cells[1].is_some()));
    // the published Elmap ordering and a plain mean broadly agree
    assert!(c.spearman[0][1] > 0.8, "{}", c.spearman[0][1]);
}
