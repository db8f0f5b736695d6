//! Exact simulation of fractional Gaussian noise and two-sided fractional
//! Brownian motion on uniform grids.
//!
//! Sampling uses circulant embedding of the fGn autocovariance (Davies-Harte):
//! the Toeplitz covariance of `n` unit-spaced increments is embedded in an
//! `m x m` circulant matrix, `m` a power of two, which the FFT diagonalizes.
//! A direct Cholesky factorization of the Toeplitz matrix is kept as an
//! independent oracle for small `n`.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{check_alpha, Error, Result};

/// Largest size accepted by [`cholesky_sample`].
pub const CHOLESKY_LIMIT: usize = 4096;

/// Relative size below which negative eigenvalues are treated as round-off.
const NEGATIVE_EIGEN_TOLERANCE: f64 = 1e-9;

/// Parameters of a block of unit-spaced fGn increments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FgnSpec {
    pub alpha: f64,
    pub n: usize,
}

impl FgnSpec {
    pub fn new(alpha: f64, n: usize) -> Result<Self> {
        check_alpha(alpha)?;
        if n == 0 {
            return Err(Error::Domain("fGn length must be positive".into()));
        }
        Ok(Self { alpha, n })
    }
}

/// Autocovariance of unit-spaced fGn at lag `k`:
/// `(|k+1|^a - 2|k|^a + |k-1|^a) / 2`.
pub fn fgn_autocovariance(alpha: f64, k: u64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(autocovariance_unchecked(alpha, k))
}

fn autocovariance_unchecked(alpha: f64, k: u64) -> f64 {
    match k {
        0 => 1.0,
        _ if alpha == 1.0 => 0.0,
        1 => 0.5 * (2f64.powf(alpha) - 2.0),
        _ => {
            // Second difference of k^a written through expm1/ln_1p; the naive
            // form loses about log10(k^2) digits to cancellation.
            let kf = k as f64;
            let h = kf.recip();
            let up = (alpha * h.ln_1p()).exp_m1();
            let down = (alpha * (-h).ln_1p()).exp_m1();
            0.5 * kf.powf(alpha) * (up + down)
        }
    }
}

/// Eigenvalues of the circulant extension of the fGn autocovariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirculantSpectrum {
    pub alpha: f64,
    /// Number of increments the embedding was built for.
    pub n: usize,
    /// Embedding length.
    pub m: usize,
    pub eigenvalues: Vec<f64>,
}

impl CirculantSpectrum {
    /// First row of the circulant matrix, `gamma(min(k, m - k))`.
    pub fn periodized_autocovariance(alpha: f64, m: usize) -> Vec<f64> {
        (0..m)
            .map(|k| autocovariance_unchecked(alpha, k.min(m - k) as u64))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spectrum: Self = serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))?;
        check_alpha(spectrum.alpha)?;
        let valid = spectrum.m >= 2
            && spectrum.m.is_power_of_two()
            && spectrum.eigenvalues.len() == spectrum.m
            && spectrum.n >= 1
            && 2 * (spectrum.n - 1) <= spectrum.m
            && spectrum.eigenvalues.iter().all(|&l| l >= 0.0 && l.is_finite());
        if !valid {
            return Err(Error::Io("inconsistent spectrum record".into()));
        }
        Ok(spectrum)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
        Self::from_json(&text)
    }
}

/// Smallest power of two that is at least `2 (n - 1)`.
pub fn embedding_length(n: usize) -> usize {
    (2 * (n - 1)).max(2).next_power_of_two()
}

pub fn circulant_spectrum(alpha: f64, n: usize) -> Result<CirculantSpectrum> {
    check_alpha(alpha)?;
    if n < 2 {
        return Err(Error::Domain(format!("circulant embedding needs n >= 2, got {n}")));
    }
    let m = embedding_length(n);
    let mut buffer: Vec<Complex<f64>> = CirculantSpectrum::periodized_autocovariance(alpha, m)
        .into_iter()
        .map(|c| Complex::new(c, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buffer);

    let mut eigenvalues: Vec<f64> = buffer.iter().map(|c| c.re).collect();
    let max = eigenvalues.iter().cloned().fold(0.0, f64::max);
    for (index, value) in eigenvalues.iter_mut().enumerate() {
        if *value < 0.0 {
            if *value < -NEGATIVE_EIGEN_TOLERANCE * max {
                return Err(Error::EmbeddingFailure { index, value: *value, max });
            }
            *value = 0.0;
        }
    }
    Ok(CirculantSpectrum { alpha, n, m, eigenvalues })
}

type SpectrumKey = (u64, usize);

fn spectrum_cache() -> &'static Mutex<HashMap<SpectrumKey, Arc<CirculantSpectrum>>> {
    static CACHE: OnceLock<Mutex<HashMap<SpectrumKey, Arc<CirculantSpectrum>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Process-wide memoized [`circulant_spectrum`].
pub fn cached_spectrum(alpha: f64, n: usize) -> Result<Arc<CirculantSpectrum>> {
    let key = (alpha.to_bits(), n);
    if let Some(hit) = spectrum_cache().lock().unwrap().get(&key) {
        return Ok(Arc::clone(hit));
    }
    let spectrum = Arc::new(circulant_spectrum(alpha, n)?);
    spectrum_cache()
        .lock()
        .unwrap()
        .entry(key)
        .or_insert_with(|| Arc::clone(&spectrum));
    Ok(spectrum)
}

/// FFT-based fGn sampler bound to one spectrum. Cheap to share across threads.
#[derive(Clone)]
pub struct FgnSampler {
    spectrum: Arc<CirculantSpectrum>,
    scale: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FgnSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FgnSampler")
            .field("alpha", &self.spectrum.alpha)
            .field("n", &self.spectrum.n)
            .field("m", &self.spectrum.m)
            .finish()
    }
}

impl FgnSampler {
    pub fn new(spectrum: Arc<CirculantSpectrum>) -> Self {
        let m = spectrum.m;
        let half = m / 2;
        let scale = spectrum
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &l)| {
                if k == 0 || k == half {
                    (l / m as f64).sqrt()
                } else {
                    (l / (2 * m) as f64).sqrt()
                }
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(m);
        Self { spectrum, scale, fft }
    }

    pub fn spectrum(&self) -> &CirculantSpectrum {
        &self.spectrum
    }

    pub fn len(&self) -> usize {
        self.spectrum.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// One exact fGn draw of length `n`, consuming `m` standard normals.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut buffer = vec![Complex::new(0.0, 0.0); self.spectrum.m];
        self.sample_with(rng, &mut buffer);
        buffer[..self.spectrum.n].iter().map(|c| c.re).collect()
    }

    /// Fills `buffer` (length `m`) so that the real parts of its first `n`
    /// entries hold the draw.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, buffer: &mut [Complex<f64>]) {
        let m = self.spectrum.m;
        let half = m / 2;
        debug_assert_eq!(buffer.len(), m);

        // Hermitian-symmetric complex Gaussian weights: the transform is real.
        let z0: f64 = rng.sample(StandardNormal);
        buffer[0] = Complex::new(self.scale[0] * z0, 0.0);
        for k in 1..half {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let w = Complex::new(self.scale[k] * re, self.scale[k] * im);
            buffer[k] = w;
            buffer[m - k] = w.conj();
        }
        let zh: f64 = rng.sample(StandardNormal);
        buffer[half] = Complex::new(self.scale[half] * zh, 0.0);

        self.fft.process(buffer);
    }
}

/// One exact fGn draw from a precomputed spectrum.
pub fn sample_fgn<R: Rng + ?Sized>(spectrum: &CirculantSpectrum, rng: &mut R) -> Vec<f64> {
    FgnSampler::new(Arc::new(spectrum.clone())).sample(rng)
}

/// Toeplitz covariance `[gamma(|i - j|)]` of `n` increments.
pub fn fgn_covariance_matrix(alpha: f64, n: usize) -> Result<Vec<Vec<f64>>> {
    check_alpha(alpha)?;
    let gamma: Vec<f64> = (0..n as u64).map(|k| autocovariance_unchecked(alpha, k)).collect();
    Ok((0..n)
        .map(|i| (0..n).map(|j| gamma[i.abs_diff(j)]).collect())
        .collect())
}

fn cholesky_lower(matrix: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = matrix.len();
    let mut lower = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let dot: f64 = (0..j).map(|k| lower[i][k] * lower[j][k]).sum();
            if i == j {
                let pivot = matrix[i][i] - dot;
                if pivot <= 0.0 || !pivot.is_finite() {
                    return Err(Error::Factorization { pivot: i, value: pivot });
                }
                lower[i][i] = pivot.sqrt();
            } else {
                lower[i][j] = (matrix[i][j] - dot) / lower[j][j];
            }
        }
    }
    Ok(lower)
}

/// Exact fGn draw by Cholesky factorization of the Toeplitz covariance.
/// O(n^3); used to cross-check the circulant sampler.
pub fn cholesky_sample<R: Rng + ?Sized>(alpha: f64, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n > CHOLESKY_LIMIT {
        return Err(Error::SizeLimit { requested: n, limit: CHOLESKY_LIMIT });
    }
    let lower = cholesky_lower(&fgn_covariance_matrix(alpha, n)?)?;
    let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    Ok(lower
        .iter()
        .map(|row| row.iter().zip(&z).map(|(l, z)| l * z).sum())
        .collect())
}

/// Values of `B_alpha` at `t = k * delta` for `k = -neg_count ..= pos_count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathGrid {
    pub alpha: f64,
    pub delta: f64,
    pub neg_count: usize,
    pub pos_count: usize,
    pub values: Vec<f64>,
}

impl PathGrid {
    /// Value at grid index `k` (time `k * delta`).
    pub fn at(&self, k: isize) -> f64 {
        self.values[(k + self.neg_count as isize) as usize]
    }

    pub fn origin(&self) -> usize {
        self.neg_count
    }
}

/// Samples two-sided unit-spaced fBM paths of a fixed shape.
///
/// One stationary increment sequence `X_1..X_{neg+pos}` is cumulated outward
/// from the anchor between `X_neg` and `X_{neg+1}`, so both sides share the
/// dependence structure of a single fBM.
#[derive(Debug, Clone)]
pub struct PathSampler {
    alpha: f64,
    neg_count: usize,
    pos_count: usize,
    sampler: FgnSampler,
}

impl PathSampler {
    pub fn new(alpha: f64, neg_count: usize, pos_count: usize) -> Result<Self> {
        check_alpha(alpha)?;
        if pos_count < 1 {
            return Err(Error::Domain("pos_count must be at least 1".into()));
        }
        // n = 1 is served by the n = 2 embedding; its first entry is N(0, 1).
        let n = (neg_count + pos_count).max(2);
        let sampler = FgnSampler::new(cached_spectrum(alpha, n)?);
        Ok(Self { alpha, neg_count, pos_count, sampler })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PathGrid {
        let mut buffer = vec![Complex::new(0.0, 0.0); self.sampler.spectrum().m];
        self.sample_with(rng, &mut buffer)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, buffer: &mut [Complex<f64>]) -> PathGrid {
        self.sampler.sample_with(rng, buffer);
        let neg = self.neg_count;
        let total = neg + self.pos_count;
        let mut values = vec![0.0; total + 1];

        let mut acc = 0.0;
        for k in 1..=self.pos_count {
            acc += buffer[neg + k - 1].re;
            values[neg + k] = acc;
        }
        acc = 0.0;
        for k in 1..=neg {
            acc += buffer[neg - k].re;
            values[neg - k] = -acc;
        }
        PathGrid {
            alpha: self.alpha,
            delta: 1.0,
            neg_count: neg,
            pos_count: self.pos_count,
            values,
        }
    }

    pub fn embedding_length(&self) -> usize {
        self.sampler.spectrum().m
    }
}

pub fn sample_two_sided_path<R: Rng + ?Sized>(
    alpha: f64,
    neg_count: usize,
    pos_count: usize,
    rng: &mut R,
) -> Result<PathGrid> {
    Ok(PathSampler::new(alpha, neg_count, pos_count)?.sample(rng))
}

/// Maps a unit-spaced path to spacing `delta` via self-similarity,
/// `B(delta t) = delta^{alpha/2} B(t)` in law.
pub fn rescale_path(path: &PathGrid, delta: f64) -> Result<PathGrid> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("grid spacing must be positive, got {delta}")));
    }
    if path.delta != 1.0 {
        return Err(Error::Domain("rescale_path expects a unit-spaced path".into()));
    }
    let factor = delta.powf(path.alpha / 2.0);
    Ok(PathGrid {
        delta,
        values: path.values.iter().map(|v| v * factor).collect(),
        ..path.clone()
    })
}
