// Writes histogram and pair-panel CSVs for a fitted curve. Pass an output
// directory, or the files go to a directory under the system temp dir.

use std::path::{Path, PathBuf};

use rankcurve::fitting::{FitConfig, FittedModel};
use rankcurve::plot::PlotBundle;
use rankcurve::synthetic::curved_table;

fn write_plots(out: &Path) -> usize {
    let table = curved_table(171);
    let model = FittedModel::fit(&table, &FitConfig::default()).unwrap();
    let bundle = PlotBundle::build(
        table.ids(),
        table.indicator_names(),
        model.normalized.values(),
        &model.curve,
    );
    let files = bundle.write_dir(out).unwrap();
    for h in &bundle.histograms {
        println!("{:>4} {:?}", h.indicator, h.counts);
    }
    println!("{} files in {}", files.len(), out.display());
    files.len()
}

fn main() {
    let out = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("rankcurve-plot-data"));
    write_plots(&out);
}
