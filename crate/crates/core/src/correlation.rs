//! Spearman and Kendall rank correlation.

use std::cmp::Ordering;

/// Ranks starting at 1, ties receiving the average of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && values[idx[j]] == values[idx[i]] {
            j += 1;
        }
        let avg = (i + j + 1) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Spearman's rho with average ranks for ties. NaN if either input is
/// constant or shorter than two.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "spearman inputs differ in length");
    if x.len() < 2 {
        return f64::NAN;
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Kendall's tau-b.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "kendall inputs differ in length");
    let n = x.len();
    let (mut concordant, mut discordant) = (0i64, 0i64);
    let (mut ties_x, mut ties_y) = (0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let sx = x[i].partial_cmp(&x[j]);
            let sy = y[i].partial_cmp(&y[j]);
            match (sx, sy) {
                (Some(Ordering::Equal), Some(Ordering::Equal)) => {
                    ties_x += 1;
                    ties_y += 1;
                }
                (Some(Ordering::Equal), _) => ties_x += 1,
                (_, Some(Ordering::Equal)) => ties_y += 1,
                (a, b) if a == b => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let pairs = (n * n.saturating_sub(1) / 2) as i64;
    let denom = (((pairs - ties_x) * (pairs - ties_y)) as f64).sqrt();
    (concordant - discordant) as f64 / denom
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_reversed() {
        let x = [0.1, 0.5, 0.3, 0.9, 0.7];
        assert!((spearman(&x, &x) - 1.0).abs() < 1e-12);
        assert!((kendall_tau(&x, &x) - 1.0).abs() < 1e-12);
        let rev: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((spearman(&x, &rev) + 1.0).abs() < 1e-12);
        assert!((kendall_tau(&x, &rev) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn average_ranks_with_ties() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn brute_force_kendall_matches() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [1.0, 3.0, 2.0, 4.0];
        // 6 pairs, 5 concordant, 1 discordant
        assert!((kendall_tau(&x, &y) - 4.0 / 6.0).abs() < 1e-12);
        // rho = 1 - 6*sum(d^2)/(n(n^2-1)) = 1 - 6*2/60
        assert!((spearman(&x, &y) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn tau_b_with_ties() {
        let x = [1.0, 1.0, 2.0, 3.0];
        let y = [1.0, 2.0, 2.0, 3.0];
        // concordant 4, discordant 0, ties_x 1, ties_y 1 -> 4 / sqrt(5*5)
        assert!((kendall_tau(&x, &y) - 0.8).abs() < 1e-12);
    }
}
