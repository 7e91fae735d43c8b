// Orthogonal projection onto a cubic: parameter, distance, and whether the
// nearest point is an endpoint reached by clamping.

use rankcurve::bezier::{BestEnd, RankingCurve};
use rankcurve::projection::{project_point, score};

fn main() {
    let curve = RankingCurve::new(
        [vec![0.0, 0.0], vec![0.1, 0.6], vec![0.4, 0.9], vec![1.0, 1.0]],
        BestEnd::AtT1,
    )
    .unwrap();
    let points = [[0.5, 0.5], [0.2, 0.8], [-0.3, -0.2], [1.4, 1.1], [0.0, 1.0]];
    println!("{:>12} {:>9} {:>9} {:>8} {:>6}", "point", "t", "distance", "clamped", "score");
    for p in points {
        let r = project_point(&curve, &p).unwrap();
        println!(
            "{:>12} {:>9.6} {:>9.6} {:>8} {:>6.3}",
            format!("{p:?}"),
            r.t,
            r.distance,
            r.clamped,
            score(&r, curve.best_end())
        );
    }
    // the same point scored against the reversed curve gets the same score
    let r = project_point(&curve.reversed(), &points[0]).unwrap();
    println!("reversed curve: t = {:.6}, score = {:.6}", r.t, score(&r, BestEnd::AtT0));
}
