// Changing units does not change the ranking: GDP converted at 6.8 and every
// indicator shifted by a constant give the same order vector.

use rankcurve::fitting::{FitConfig, FittedModel};
use rankcurve::reference::{load_quality_of_life_2005, published_excerpt_table};

fn main() {
    let table = load_quality_of_life_2005().unwrap_or_else(|_| published_excerpt_table());
    let config = FitConfig::default();
    let base = FittedModel::fit(&table, &config).unwrap().ranking.orders();

    let gdp = table.indicator_names().iter().position(|n| n == "GDP").unwrap();
    let mut factors = vec![1.0; table.n_indicators()];
    factors[gdp] = 6.8;
    let scaled = FittedModel::fit(&table.scaled(&factors).unwrap(), &config).unwrap();
    println!("GDP x 6.8: order vector identical = {}", scaled.ranking.orders() == base);

    let shifted = table.shifted(&vec![100.0; table.n_indicators()]).unwrap();
    let shifted = FittedModel::fit(&shifted, &config).unwrap();
    println!("all + 100: order vector identical = {}", shifted.ranking.orders() == base);
}
