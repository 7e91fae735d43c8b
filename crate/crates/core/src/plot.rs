//! Plot-ready data: one histogram per indicator and, for every pair of
//! indicators, the normalized scatter with the curve's projection onto that
//! pair. Written as plain CSV so any plotting tool can draw it.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bezier::RankingCurve;

pub const HISTOGRAM_BINS: usize = 20;
/// Curve samples per panel, at `t = k / (CURVE_SAMPLES - 1)`.
pub const CURVE_SAMPLES: usize = 201;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub indicator: String,
    /// Bin `k` covers `[k/20, (k+1)/20)`; the last bin also takes 1.0.
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairPanel {
    pub x: String,
    pub y: String,
    pub points: Vec<(String, f64, f64)>,
    pub curve: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotBundle {
    pub histograms: Vec<Histogram>,
    pub panels: Vec<PairPanel>,
}

fn bin(v: f64) -> usize {
    ((v * HISTOGRAM_BINS as f64).floor().max(0.0) as usize).min(HISTOGRAM_BINS - 1)
}

impl PlotBundle {
    /// `rows` are normalized values in the curve's coordinates.
    pub fn build(ids: &[String], names: &[String], rows: &[Vec<f64>], curve: &RankingCurve) -> Self {
        let d = names.len();
        let histograms = (0..d)
            .map(|j| {
                let mut counts = vec![0; HISTOGRAM_BINS];
                for r in rows {
                    counts[bin(r[j])] += 1;
                }
                Histogram {
                    indicator: names[j].clone(),
                    counts,
                }
            })
            .collect();
        let samples: Vec<(f64, Vec<f64>)> = (0..CURVE_SAMPLES)
            .map(|k| {
                let t = k as f64 / (CURVE_SAMPLES - 1) as f64;
                (t, curve.eval_unchecked(t))
            })
            .collect();
        let mut panels = Vec::new();
        for a in 0..d {
            for b in a + 1..d {
                panels.push(PairPanel {
                    x: names[a].clone(),
                    y: names[b].clone(),
                    points: ids.iter().zip(rows).map(|(id, r)| (id.clone(), r[a], r[b])).collect(),
                    curve: samples.iter().map(|(t, p)| (*t, p[a], p[b])).collect(),
                });
            }
        }
        Self { histograms, panels }
    }

    /// Writes `hist_<name>.csv` per indicator and `pair_<x>_<y>.csv` per
    /// pair, returning the paths in that order. Pair files hold the points
    /// (`kind = point`) followed by the curve polyline (`kind = curve`, the
    /// `id` column carrying `t`).
    pub fn write_dir(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for h in &self.histograms {
            let path = dir.join(format!("hist_{}.csv", file_stem(&h.indicator)));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["bin_lo", "bin_hi", "count"])?;
            for (k, c) in h.counts.iter().enumerate() {
                let lo = k as f64 / HISTOGRAM_BINS as f64;
                let hi = (k + 1) as f64 / HISTOGRAM_BINS as f64;
                w.write_record([lo.to_string(), hi.to_string(), c.to_string()])?;
            }
            w.flush()?;
            written.push(path);
        }
        for p in &self.panels {
            let path = dir.join(format!("pair_{}_{}.csv", file_stem(&p.x), file_stem(&p.y)));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["kind", "id", &p.x, &p.y])?;
            for (id, x, y) in &p.points {
                w.write_record(["point", id, &x.to_string(), &y.to_string()])?;
            }
            for (t, x, y) in &p.curve {
                w.write_record(["curve", &t.to_string(), &x.to_string(), &y.to_string()])?;
            }
            w.flush()?;
            written.push(path);
        }
        Ok(written)
    }
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bezier::BestEnd;

    fn line(d: usize) -> RankingCurve {
        let p = |s: f64| vec![s; d];
        RankingCurve::new([p(0.0), p(1.0 / 3.0), p(2.0 / 3.0), p(1.0)], BestEnd::AtT1).unwrap()
    }

    #[test]
    fn bins_cover_closed_interval() {
        assert_eq!(bin(0.0), 0);
        assert_eq!(bin(0.05), 1);
        assert_eq!(bin(0.999), 19);
        assert_eq!(bin(1.0), 19);
    }

    #[test]
    fn panel_counts() {
        let ids: Vec<String> = (0..7).map(|i| i.to_string()).collect();
        let names: Vec<String> = ["a", "b", "c", "d"].map(String::from).to_vec();
        let rows: Vec<Vec<f64>> = (0..7).map(|i| vec![i as f64 / 6.0; 4]).collect();
        let b = PlotBundle::build(&ids, &names, &rows, &line(4));
        assert_eq!(b.histograms.len(), 4);
        assert_eq!(b.panels.len(), 6);
        for h in &b.histograms {
            assert_eq!(h.counts.iter().sum::<usize>(), 7);
        }
        let c = &b.panels[0].curve;
        assert_eq!(c.len(), 201);
        assert_eq!(c[100].0, 0.5);
        assert!((c[100].1 - 0.5).abs() < 1e-15);

        let one = PlotBundle::build(&ids, &names[..1], &rows, &line(1));
        assert_eq!((one.histograms.len(), one.panels.len()), (1, 0));
    }

    #[test]
    fn writes_one_file_per_panel() {
        let dir = tempfile::tempdir().unwrap();
        let ids: Vec<String> = (0..3).map(|i| i.to_string()).collect();
        let names: Vec<String> = ["GDP", "life exp"].map(String::from).to_vec();
        let rows = vec![vec![0.0, 0.0], vec![0.5, 0.2], vec![1.0, 1.0]];
        let files = PlotBundle::build(&ids, &names, &rows, &line(2)).write_dir(dir.path()).unwrap();
        let names: Vec<String> = files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(names, vec!["hist_GDP.csv", "hist_life_exp.csv", "pair_GDP_life_exp.csv"]);
        let text = std::fs::read_to_string(&files[2]).unwrap();
        assert!(text.starts_with("kind,id,GDP,life exp\npoint,0,0,0\n"));
        assert_eq!(text.lines().count(), 1 + 3 + 201);
    }
}
