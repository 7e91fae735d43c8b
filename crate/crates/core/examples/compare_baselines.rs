// Ranks a synthetic curved cloud with the curve fit and every baseline, then
// prints Spearman and Kendall correlations between the methods.

use rankcurve::baselines::{compare, BaselineMethod, BaselineSpec};
use rankcurve::fitting::{FitConfig, FittedModel};
use rankcurve::synthetic::curved_table;

fn main() {
    let table = curved_table(120);
    let mut results = vec![FittedModel::fit(&table, &FitConfig::default()).unwrap().ranking];
    for spec in [
        BaselineSpec::new(BaselineMethod::ArithmeticMean),
        BaselineSpec::new(BaselineMethod::GeometricMean),
        BaselineSpec::new(BaselineMethod::GeometricMean).raw(),
        BaselineSpec::new(BaselineMethod::PcaFirstComponent),
        BaselineSpec::new(BaselineMethod::EntropyWeight),
    ] {
        results.push(spec.rank(&table).unwrap());
    }
    let cmp = compare(&results, None).unwrap();

    for (title, m) in [("spearman", &cmp.spearman), ("kendall", &cmp.kendall)] {
        println!("{title}");
        print!("{:>22}", "");
        for name in &cmp.methods {
            print!("{:>22}", name);
        }
        println!();
        for (name, row) in cmp.methods.iter().zip(m) {
            print!("{name:>22}");
            for v in row {
                print!("{v:>22.4}");
            }
            println!();
        }
        println!();
    }

    let mut csv = Vec::new();
    cmp.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    println!("first rows of the side-by-side table:");
    for line in text.lines().take(6) {
        println!("  {line}");
    }
}
