// Fits the ranking curve to the 2005 quality-of-life table and prints the
// ranking next to the published orders.
//
// The full 171-country table is not bundled. Put it at
// data/quality_of_life_2005.csv (or point RANKCURVE_QOL2005 at it); without
// it this falls back to the ten published rows, which is enough to see the
// pipeline work but not to reproduce the published ranking.

use rankcurve::fitting::{FitConfig, FittedModel};
use rankcurve::reference::{
    load_quality_of_life_2005, published_control_points_raw, published_excerpt_table, published_rpc,
};

fn main() {
    let table = match load_quality_of_life_2005() {
        Ok(t) => t,
        Err(e) => {
            println!("{e}\nfalling back to the ten published rows\n");
            published_excerpt_table()
        }
    };
    let model = FittedModel::fit(&table, &FitConfig::default()).expect("fit");
    let r = &model.report;
    println!(
        "{} iterations, converged: {}, squared distance {:.6}",
        r.iterations,
        r.converged,
        r.final_distance()
    );
    println!("monotonicity: {:?}", r.monotonicity);

    let published = published_rpc();
    println!("\n{:<16} {:>7} {:>5}   published", "country", "score", "order");
    for e in model.ranking.sorted().into_iter().take(10) {
        let p = published.orders.get(&e.id).map(|o| o.to_string()).unwrap_or_default();
        println!("{:<16} {:>7.4} {:>5}   {p}", e.id, e.score, e.order);
    }
    for id in ["Turkey", "Iran", "Armenia", "China", "Samoa"] {
        if let Some(e) = model.ranking.get(id).filter(|e| e.order > 10) {
            println!("{:<16} {:>7.4} {:>5}   {}", e.id, e.score, e.order, published.orders[id]);
        }
    }

    println!("\ncontrol points (raw units), fitted vs published:");
    let fitted = model.curve.control_points_raw().expect("curve carries its transform");
    for (k, (f, p)) in fitted.iter().zip(published_control_points_raw()).enumerate() {
        println!("  P{k}  {f:>10.3?}\n      {p:>10.3?}");
    }
}
