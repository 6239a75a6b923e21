//! Statistical helpers for the experiment suites: chi-square and
//! Kolmogorov-Smirnov tests, bootstrap intervals, least squares.

use crate::error::{Error, Result};
use crate::rng::{stream_indexed, Domain};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n-1 denominator).
pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0);
    var.sqrt()
}

pub fn standard_error(xs: &[f64]) -> f64 {
    std_dev(xs) / (xs.len() as f64).sqrt()
}

/// Upper-tail p-value of a Pearson statistic against chi-square with the
/// given degrees of freedom.
pub fn chi_square_p(statistic: f64, df: f64) -> Result<f64> {
    let dist = ChiSquared::new(df)
        .map_err(|e| Error::invalid(format!("bad chi-square dof {df}: {e}")))?;
    Ok(1.0 - dist.cdf(statistic))
}

/// Goodness-of-fit test of observed counts against expected counts.
pub fn chi_square_gof_p(observed: &[u64], expected: &[f64]) -> Result<f64> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return Err(Error::invalid("need matching count vectors of length >= 2".to_string()));
    }
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    chi_square_p(stat, (observed.len() - 1) as f64)
}

/// Independence test on a 2x2 contingency table (df = 1).
pub fn chi_square_independence_2x2_p(table: [[u64; 2]; 2]) -> Result<f64> {
    let n: u64 = table.iter().flatten().sum();
    if n == 0 {
        return Err(Error::invalid("empty contingency table".to_string()));
    }
    let row: [f64; 2] = [
        (table[0][0] + table[0][1]) as f64,
        (table[1][0] + table[1][1]) as f64,
    ];
    let col: [f64; 2] = [
        (table[0][0] + table[1][0]) as f64,
        (table[0][1] + table[1][1]) as f64,
    ];
    let mut stat = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let e = row[i] * col[j] / n as f64;
            if e == 0.0 {
                return Err(Error::invalid("degenerate margin in contingency table".to_string()));
            }
            stat += (table[i][j] as f64 - e).powi(2) / e;
        }
    }
    chi_square_p(stat, 1.0)
}

/// Kolmogorov tail function `Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2)`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-9 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64).powi(2) * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-14 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample KS test with the asymptotic p-value. Conservative under ties,
/// which is acceptable for integer-valued growth counts.
pub fn ks_two_sample_p(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::invalid("KS needs non-empty samples".to_string()));
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    Ok(kolmogorov_q(lambda))
}

/// One-sample KS test against the uniform distribution on `[lo, hi)`.
pub fn ks_uniform_p(xs: &[f64], lo: f64, hi: f64) -> Result<f64> {
    if xs.is_empty() || !(hi > lo) {
        return Err(Error::invalid("KS-uniform needs samples and lo < hi".to_string()));
    }
    let mut a = xs.to_vec();
    a.sort_by(f64::total_cmp);
    let n = a.len() as f64;
    let mut d: f64 = 0.0;
    for (k, &x) in a.iter().enumerate() {
        let f = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
        d = d.max((f - k as f64 / n).abs());
        d = d.max(((k + 1) as f64 / n - f).abs());
    }
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    Ok(kolmogorov_q(lambda))
}

/// Percentile bootstrap confidence interval for the mean.
pub fn bootstrap_mean_ci(xs: &[f64], iters: usize, level: f64, seed: u64) -> (f64, f64) {
    let mut means = Vec::with_capacity(iters);
    for it in 0..iters {
        let mut rng = stream_indexed(seed, Domain::Bootstrap, it as u64);
        let m: f64 = (0..xs.len())
            .map(|_| xs[rng.gen_range(0..xs.len())])
            .sum::<f64>()
            / xs.len() as f64;
        means.push(m);
    }
    means.sort_by(f64::total_cmp);
    let alpha = (1.0 - level) / 2.0;
    let lo = means[((iters as f64 - 1.0) * alpha) as usize];
    let hi = means[((iters as f64 - 1.0) * (1.0 - alpha)) as usize];
    (lo, hi)
}

/// Least-squares slope and intercept of `y` on `x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let mx = mean(xs);
    let my = mean(ys);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let mx = mean(xs);
    let my = mean(ys);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}
