//! Small statistical helpers for the validation suites: binomial error
//! bars, two-sample Kolmogorov–Smirnov, chi-square uniformity, Spearman
//! rank correlation.

/// Standard deviation of an empirical frequency with success probability
/// `p` over `n` trials.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    let p = p.clamp(0.0, 1.0);
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Two-sample Kolmogorov–Smirnov statistic sup_x |F₁(x) − F₂(x)|.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(|p, q| p.partial_cmp(q).unwrap());
    xb.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Critical value for the two-sample KS test at level α ∈ {0.05, 0.01}.
pub fn ks_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = if alpha <= 0.01 { 1.628 } else { 1.358 };
    c * (((n + m) as f64) / ((n * m) as f64)).sqrt()
}

/// Pass/fail of the two-sample KS test: true = same distribution not
/// rejected at level α.
pub fn ks_two_sample_ok(a: &[f64], b: &[f64], alpha: f64) -> bool {
    ks_statistic(a, b) <= ks_critical(a.len(), b.len(), alpha)
}

/// Chi-square statistic of observed counts against the uniform
/// distribution.
pub fn chi2_uniform(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let k = counts.len() as f64;
    let expect = n as f64 / k;
    counts
        .iter()
        .map(|&c| (c as f64 - expect).powi(2) / expect)
        .sum()
}

/// Upper quantile of the chi-square distribution with `dof` degrees of
/// freedom (Wilson–Hilferty approximation, good for dof ≥ 3).
pub fn chi2_quantile(dof: usize, upper_tail: f64) -> f64 {
    let k = dof as f64;
    let z = normal_quantile(1.0 - upper_tail);
    let t = 1.0 - 2.0 / (9.0 * k) + z * (2.0 / (9.0 * k)).sqrt();
    k * t * t * t
}

/// Inverse standard normal CDF (Acklam's rational approximation,
/// |relative error| < 1.15e-9).
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let plow = 0.02425;
    if p < plow {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - plow {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -normal_quantile(1.0 - p)
    }
}

/// Spearman rank correlation of the values against their index order.
pub fn spearman_against_index(values: &[f64]) -> f64 {
    let n = values.len();
    assert!(n >= 2);
    let ranks = rank(values);
    let index_ranks: Vec<f64> = (0..n).map(|i| i as f64 + 1.0).collect();
    pearson(&index_ranks, &ranks)
}

fn rank(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for (a, b) in x.iter().zip(y) {
        num += (a - mx) * (b - my);
        dx += (a - mx).powi(2);
        dy += (b - my).powi(2);
    }
    num / (dx.sqrt() * dy.sqrt()).max(1e-300)
}

/// One-sided 5% critical value for Spearman's ρ with n observations
/// (normal approximation ρ_crit = z / √(n−1)).
pub fn spearman_critical_one_sided_5pct(n: usize) -> f64 {
    1.6448536269514722 / ((n as f64 - 1.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ks_identical_samples() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_abs_diff_eq!(ks_statistic(&a, &a), 0.0, epsilon = 1e-12);
        assert!(ks_two_sample_ok(&a, &a, 0.01));
    }

    #[test]
    fn ks_detects_shift() {
        let a: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let b: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0 + 0.5).collect();
        assert!(!ks_two_sample_ok(&a, &b, 0.01));
    }

    #[test]
    fn chi2_quantile_known_values() {
        // χ²_{0.01}(10) ≈ 23.209, χ²_{0.01}(100) ≈ 135.807.
        assert_abs_diff_eq!(chi2_quantile(10, 0.01), 23.209, epsilon = 0.2);
        assert_abs_diff_eq!(chi2_quantile(100, 0.01), 135.807, epsilon = 0.5);
    }

    #[test]
    fn normal_quantile_symmetry() {
        assert_abs_diff_eq!(normal_quantile(0.975), 1.959964, epsilon = 1e-5);
        assert_abs_diff_eq!(normal_quantile(0.5), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(normal_quantile(0.025), -1.959964, epsilon = 1e-5);
    }

    #[test]
    fn spearman_monotone_sequences() {
        let inc: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let dec: Vec<f64> = (0..20).map(|i| -(i as f64)).collect();
        assert_abs_diff_eq!(spearman_against_index(&inc), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spearman_against_index(&dec), -1.0, epsilon = 1e-12);
    }
}
