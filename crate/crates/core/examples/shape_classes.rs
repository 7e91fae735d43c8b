// Monotonicity, nonlinearity and the pairwise shape labels of a few curves.

use rankcurve::bezier::{BestEnd, RankingCurve};

fn show(name: &str, points: [Vec<f64>; 4]) {
    let c = RankingCurve::new(points, BestEnd::AtT1).unwrap();
    let mono: Vec<_> = (0..c.dim()).map(|j| c.is_monotone(j)).collect();
    println!("{name}: nonlinearity {:.4}", c.nonlinearity_index().unwrap());
    println!("  monotonicity {mono:?}");
    let classes = c.shape_classes();
    for a in 0..c.dim() {
        for b in a + 1..c.dim() {
            println!("  ({a}, {b}) -> {:?}", classes.get(a, b));
        }
    }
}

fn main() {
    let k = 0.552_284_749_8;
    show("straight", [vec![0.0, 0.0], vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]]);
    show("quarter circle", [vec![0.0, 0.0], vec![0.0, k], vec![1.0 - k, 1.0], vec![1.0, 1.0]]);
    show("s-bend", [vec![0.0, 0.0], vec![0.6, 0.0], vec![0.4, 1.0], vec![1.0, 1.0]]);
    show(
        "mixed, 3-d",
        [vec![0.0, 0.0, 1.0], vec![0.3, 0.6, 0.9], vec![0.6, 0.9, 0.6], vec![1.0, 1.0, 0.0]],
    );
    show("not monotone", [vec![0.0, 0.0], vec![1.0, 1.0], vec![-1.0, 2.0], vec![0.0, 3.0]]);
}
