#![allow(dead_code)]

use piterbarg_core::rng::replication_stream;

/// eta(1/2) by the Cohen-Rodriguez Villegas-Zagier alternating-series
/// acceleration with `n` terms (error about 5.8^-n).
pub fn cvz_eta_half(n: usize) -> f64 {
    let nf = n as f64;
    let mut d = (3.0 + 8f64.sqrt()).powf(nf);
    d = 0.5 * (d + 1.0 / d);
    let mut b = -1.0;
    let mut c = -d;
    let mut s = 0.0;
    for k in 0..n {
        let kf = k as f64;
        c = b - c;
        s += c / (kf + 1.0).sqrt();
        b *= (kf + nf) * (kf - nf) / ((kf + 0.5) * (kf + 1.0));
    }
    s / d
}

/// Bracket for eta(1/2) from raw partial sums: for completely monotone terms
/// the limit lies between consecutive means of partial sums.
pub fn raw_eta_half_bracket(terms: usize) -> (f64, f64) {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut partial = Vec::with_capacity(3);
    for k in 1..=terms + 2 {
        let term = if k % 2 == 1 { 1.0 } else { -1.0 } / (k as f64).sqrt();
        // Kahan summation
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if k >= terms {
            partial.push(sum);
        }
    }
    let m0 = 0.5 * (partial[0] + partial[1]);
    let m1 = 0.5 * (partial[1] + partial[2]);
    (m0.min(m1), m0.max(m1))
}

/// Empirical covariance matrix of `draws` (rows are samples, zero mean
/// assumed) and the standard error of each entry.
pub fn covariance_with_se(draws: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = draws[0].len();
    let count = draws.len() as f64;
    let mut cov = vec![vec![0.0; n]; n];
    let mut se = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let prods: Vec<f64> = draws.iter().map(|x| x[i] * x[j]).collect();
            let mean = prods.iter().sum::<f64>() / count;
            let var = prods.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (count - 1.0);
            cov[i][j] = mean;
            se[i][j] = (var / count).sqrt();
        }
    }
    (cov, se)
}

/// Reproducible arbitrary (non-Gaussian) small path values for pathwise tests.
pub fn random_values(seed: u64, len: usize, scale: f64) -> Vec<f64> {
    use rand::Rng;
    let mut rng = replication_stream(seed, 0);
    (0..len).map(|_| scale * (2.0 * rng.random::<f64>() - 1.0)).collect()
}
