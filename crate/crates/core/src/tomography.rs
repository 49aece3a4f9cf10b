//! Quadrature sampling of Gaussian states and moment-based reconstruction.
//!
//! Samples are drawn in fixed-size chunks, chunk `k` from ChaCha stream `k`
//! of the seed, so results are identical for any thread count. Moments are
//! accumulated per batch of contiguous samples; statistical errors come from
//! a delete-one-batch jackknife.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::measures;

const CHUNK: usize = 1 << 15;

/// Default number of batches used for error estimation.
pub const DEFAULT_BATCHES: usize = 100;
/// Default Gaussianity threshold, in standard errors.
pub const DEFAULT_THRESHOLD: f64 = 4.0;
/// Below this many samples the Gaussianity verdict is inconclusive.
pub const MIN_CONCLUSIVE_SAMPLES: usize = 1000;

/// Row-major matrix of quadrature samples, one row per shot.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSamples {
    n_vars: usize,
    values: Vec<f64>,
}

impl QuadratureSamples {
    pub fn new(n_vars: usize, values: Vec<f64>) -> Result<Self> {
        if n_vars == 0 || !values.len().is_multiple_of(n_vars) {
            return Err(Error::Dimension(format!(
                "{} values do not form rows of {n_vars}",
                values.len()
            )));
        }
        Ok(Self { n_vars, values })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.n_vars
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_vars..(i + 1) * self.n_vars]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_vars)
    }

    /// Applies a linear map to every row.
    pub fn transformed(&self, map: &DMatrix<f64>) -> Result<Self> {
        if map.ncols() != self.n_vars || map.nrows() != self.n_vars {
            return Err(Error::Dimension("map does not match sample width".into()));
        }
        let mut out = Vec::with_capacity(self.values.len());
        for row in self.rows() {
            let v = map * DVector::from_column_slice(row);
            out.extend(v.iter());
        }
        Self::new(self.n_vars, out)
    }
}

struct Sampler {
    mean: DVector<f64>,
    chol: DMatrix<f64>,
    seed: u64,
}

impl Sampler {
    fn new(state: &GaussianState, seed: u64) -> Result<Self> {
        if !state.is_physical() {
            return Err(Error::Unphysical(state.min_symplectic_eigenvalue().unwrap_or(f64::NAN)));
        }
        let chol = state
            .cov()
            .clone()
            .cholesky()
            .ok_or(Error::NotPositiveDefinite)?
            .l();
        Ok(Self {
            mean: state.mean().clone(),
            chol,
            seed,
        })
    }

    /// Samples of chunk `k`, rows `k*CHUNK .. min((k+1)*CHUNK, n)`.
    fn chunk(&self, k: usize, n: usize) -> Vec<f64> {
        let d = self.mean.len();
        let rows = CHUNK.min(n - k * CHUNK);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k as u64);
        let mut out = Vec::with_capacity(rows * d);
        let mut z = vec![0.0; d];
        for _ in 0..rows {
            for v in z.iter_mut() {
                *v = StandardNormal.sample(&mut rng);
            }
            for i in 0..d {
                let mut x = self.mean[i];
                for (j, zj) in z.iter().enumerate().take(i + 1) {
                    x += self.chol[(i, j)] * zj;
                }
                out.push(x);
            }
        }
        out
    }
}

fn n_chunks(n: usize) -> usize {
    n.div_ceil(CHUNK)
}

/// Draws `n_samples` i.i.d. quadrature vectors from the state's distribution.
pub fn sample_state(state: &GaussianState, n_samples: usize, seed: u64) -> Result<QuadratureSamples> {
    if n_samples == 0 {
        return Err(Error::OutOfRange {
            name: "n_samples",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let sampler = Sampler::new(state, seed)?;
    let chunks: Vec<Vec<f64>> = (0..n_chunks(n_samples))
        .into_par_iter()
        .map(|k| sampler.chunk(k, n_samples))
        .collect();
    QuadratureSamples::new(state.mean().len(), chunks.concat())
}

/// All exponent vectors over `n_vars` variables with total degree up to
/// `max_order`, ordered by degree and then lexicographically (descending).
fn monomials(n_vars: usize, max_order: usize) -> Vec<Vec<u8>> {
    fn fill(prefix: &mut Vec<u8>, left: usize, remaining: usize, out: &mut Vec<Vec<u8>>) {
        if remaining == 1 {
            prefix.push(left as u8);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e as u8);
            fill(prefix, left - e, remaining - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for order in 0..=max_order {
        fill(&mut Vec::new(), order, n_vars, &mut out);
    }
    out
}

/// Empirical raw moments of quadrature samples, kept per batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSet {
    pub n_vars: usize,
    pub max_order: usize,
    pub exponents: Vec<Vec<u8>>,
    /// `batch_moments[b][m]` is the average of monomial `m` over batch `b`.
    pub batch_moments: Vec<Vec<f64>>,
    pub batch_sizes: Vec<usize>,
}

impl MomentSet {
    /// Assembles a moment set from per-batch averages, e.g. after loading.
    pub fn from_batches(
        n_vars: usize,
        max_order: usize,
        batch_moments: Vec<Vec<f64>>,
        batch_sizes: Vec<usize>,
    ) -> Result<Self> {
        let exponents = monomials(n_vars, max_order);
        if n_vars == 0 || !n_vars.is_multiple_of(2) {
            return Err(Error::Dimension(format!("{n_vars} quadratures do not form modes")));
        }
        if batch_moments.is_empty() || batch_moments.len() != batch_sizes.len() {
            return Err(Error::Dimension("batch moments and sizes disagree".into()));
        }
        if batch_moments.iter().any(|b| b.len() != exponents.len()) {
            return Err(Error::Dimension(format!(
                "expected {} moments per batch",
                exponents.len()
            )));
        }
        if batch_moments.iter().any(|b| (b[0] - 1.0).abs() > 1e-12) {
            return Err(Error::Dimension("order-0 moment must be 1".into()));
        }
        Ok(Self {
            n_vars,
            max_order,
            exponents,
            batch_moments,
            batch_sizes,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.batch_sizes.iter().sum()
    }

    pub fn n_batches(&self) -> usize {
        self.batch_sizes.len()
    }

    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.exponents.iter().position(|e| e.as_slice() == exps)
    }

    fn pooled_excluding(&self, skip: Option<usize>) -> Vec<f64> {
        let mut acc = vec![0.0; self.exponents.len()];
        let mut total = 0usize;
        for (b, (m, &size)) in self.batch_moments.iter().zip(&self.batch_sizes).enumerate() {
            if Some(b) == skip {
                continue;
            }
            total += size;
            for (a, v) in acc.iter_mut().zip(m) {
                *a += v * size as f64;
            }
        }
        acc.iter_mut().for_each(|a| *a /= total as f64);
        acc
    }

    /// Moments pooled over all batches.
    pub fn pooled(&self) -> Vec<f64> {
        self.pooled_excluding(None)
    }

    /// Estimate of `stat` on the pooled moments with its delete-one-batch
    /// jackknife standard error.
    pub fn jackknife<F>(&self, stat: F) -> Result<(f64, f64)>
    where
        F: Fn(&[f64]) -> Result<f64>,
    {
        let estimate = stat(&self.pooled())?;
        let b = self.n_batches();
        if b < 2 {
            return Ok((estimate, f64::INFINITY));
        }
        let loo = (0..b)
            .map(|k| stat(&self.pooled_excluding(Some(k))))
            .collect::<Result<Vec<f64>>>()?;
        let mean = loo.iter().sum::<f64>() / b as f64;
        let ss: f64 = loo.iter().map(|v| (v - mean).powi(2)).sum();
        Ok((estimate, ((b - 1) as f64 / b as f64 * ss).sqrt()))
    }

    fn raw(&self, pooled: &[f64], vars: &[usize]) -> f64 {
        let mut e = vec![0u8; self.n_vars];
        for &v in vars {
            e[v] += 1;
        }
        pooled[self.index_of(&e).expect("monomial within max order")]
    }

    /// Central moment `E[prod (x_v - m_v)]` for a multiset of variables.
    fn central(&self, pooled: &[f64], vars: &[usize]) -> f64 {
        let k = vars.len();
        let means: Vec<f64> = vars.iter().map(|&v| self.raw(pooled, &[v])).collect();
        let mut total = 0.0;
        for mask in 0u32..(1 << k) {
            let chosen: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| vars[i]).collect();
            let mut term = if chosen.is_empty() { 1.0 } else { self.raw(pooled, &chosen) };
            for i in 0..k {
                if mask & (1 << i) == 0 {
                    term *= -means[i];
                }
            }
            total += term;
        }
        total
    }

    /// Joint cumulant of order 3 or 4 for a multiset of variables.
    fn cumulant(&self, pooled: &[f64], vars: &[usize]) -> f64 {
        match vars {
            [_, _, _] => self.central(pooled, vars),
            [i, j, k, l] => {
                let c = |a: usize, b: usize| self.central(pooled, &[a, b]);
                self.central(pooled, vars) - c(*i, *j) * c(*k, *l) - c(*i, *k) * c(*j, *l) - c(*i, *l) * c(*j, *k)
            }
            _ => unreachable!("cumulants of order 3 and 4 only"),
        }
    }

    fn gaussian_from(&self, pooled: &[f64]) -> Result<GaussianState> {
        let d = self.n_vars;
        let mean = DVector::from_fn(d, |i, _| self.raw(pooled, &[i]));
        let cov = DMatrix::from_fn(d, d, |i, j| self.raw(pooled, &[i, j]) - mean[i] * mean[j]);
        GaussianState::new_unchecked_physicality(mean, cov)
    }
}

/// Per-segment monomial sums. Segments are the intersections of sampling
/// chunks with batches, summed in order so both accumulation paths agree
/// bit for bit.
fn segment_sums(rows: &[f64], n_vars: usize, exps: &[Vec<u8>], max_order: usize) -> Vec<f64> {
    let mut sums = vec![0.0; exps.len()];
    let mut pow = vec![1.0; n_vars * (max_order + 1)];
    for row in rows.chunks_exact(n_vars) {
        for (v, &x) in row.iter().enumerate() {
            let base = v * (max_order + 1);
            for o in 1..=max_order {
                pow[base + o] = pow[base + o - 1] * x;
            }
        }
        for (s, e) in sums.iter_mut().zip(exps) {
            let mut term = 1.0;
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    term *= pow[v * (max_order + 1) + k as usize];
                }
            }
            *s += term;
        }
    }
    sums
}

fn batch_bounds(n: usize, n_batches: usize) -> Vec<usize> {
    (0..=n_batches).map(|b| b * n / n_batches).collect()
}

/// Accumulates one chunk of rows starting at global row `start`.
fn chunk_contributions(
    rows: &[f64],
    start: usize,
    n_vars: usize,
    bounds: &[usize],
    exps: &[Vec<u8>],
    max_order: usize,
) -> Vec<(usize, Vec<f64>)> {
    let len = rows.len() / n_vars;
    let end = start + len;
    let mut out = Vec::new();
    let first = bounds.partition_point(|&b| b <= start) - 1;
    let mut b = first;
    while b + 1 < bounds.len() && bounds[b] < end {
        let lo = bounds[b].max(start);
        let hi = bounds[b + 1].min(end);
        if hi > lo {
            let seg = &rows[(lo - start) * n_vars..(hi - start) * n_vars];
            out.push((b, segment_sums(seg, n_vars, exps, max_order)));
        }
        b += 1;
    }
    out
}

fn finish(
    n_vars: usize,
    max_order: usize,
    exps: Vec<Vec<u8>>,
    bounds: &[usize],
    contributions: Vec<Vec<(usize, Vec<f64>)>>,
) -> MomentSet {
    let n_batches = bounds.len() - 1;
    let mut sums = vec![vec![0.0; exps.len()]; n_batches];
    for (b, s) in contributions.into_iter().flatten() {
        for (acc, v) in sums[b].iter_mut().zip(s) {
            *acc += v;
        }
    }
    let sizes: Vec<usize> = bounds.windows(2).map(|w| w[1] - w[0]).collect();
    let batch_moments = sums
        .into_iter()
        .zip(&sizes)
        .map(|(s, &n)| s.into_iter().map(|v| v / n as f64).collect())
        .collect();
    MomentSet {
        n_vars,
        max_order,
        exponents: exps,
        batch_moments,
        batch_sizes: sizes,
    }
}

fn check_moment_args(n: usize, max_order: usize, n_batches: usize) -> Result<()> {
    if !(2..=4).contains(&max_order) {
        return Err(Error::OutOfRange {
            name: "max_order",
            value: max_order as f64,
            range: "{2, 3, 4}",
        });
    }
    if n_batches == 0 || n < n_batches {
        return Err(Error::DegenerateData(format!(
            "{n} samples cannot fill {n_batches} batches"
        )));
    }
    Ok(())
}

/// Raw moments of all monomials up to `max_order`, per batch.
pub fn compute_moments(samples: &QuadratureSamples, max_order: usize, n_batches: usize) -> Result<MomentSet> {
    let n = samples.len();
    check_moment_args(n, max_order, n_batches)?;
    let d = samples.n_vars();
    if !d.is_multiple_of(2) {
        return Err(Error::Dimension(format!("{d} quadratures do not form modes")));
    }
    let exps = monomials(d, max_order);
    let bounds = batch_bounds(n, n_batches);
    let contributions: Vec<_> = (0..n_chunks(n))
        .into_par_iter()
        .map(|k| {
            let start = k * CHUNK;
            let stop = (start + CHUNK).min(n);
            let rows = &samples.values[start * d..stop * d];
            chunk_contributions(rows, start, d, &bounds, &exps, max_order)
        })
        .collect();
    Ok(finish(d, max_order, exps, &bounds, contributions))
}

/// `compute_moments(sample_state(..))` without holding the samples in memory.
pub fn sample_moments(
    state: &GaussianState,
    n_samples: usize,
    seed: u64,
    max_order: usize,
    n_batches: usize,
) -> Result<MomentSet> {
    check_moment_args(n_samples, max_order, n_batches)?;
    let sampler = Sampler::new(state, seed)?;
    let d = state.mean().len();
    let exps = monomials(d, max_order);
    let bounds = batch_bounds(n_samples, n_batches);
    let contributions: Vec<_> = (0..n_chunks(n_samples))
        .into_par_iter()
        .map(|k| {
            let rows = sampler.chunk(k, n_samples);
            chunk_contributions(&rows, k * CHUNK, d, &bounds, &exps, max_order)
        })
        .collect();
    Ok(finish(d, max_order, exps, &bounds, contributions))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulantStatistic {
    /// Variables (quadrature indices) of the joint cumulant.
    pub vars: Vec<usize>,
    pub value: f64,
    pub stderr: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianityReport {
    pub verdict: Verdict,
    pub max_abs_z: f64,
    pub threshold: f64,
    pub statistics: Vec<CumulantStatistic>,
}

fn multisets(n_vars: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n_vars, size, &mut Vec::new(), &mut out);
    out
}

/// Standardized joint third and fourth cumulants; a Gaussian has all of
/// them zero.
pub fn gaussianity_test(moments: &MomentSet, threshold: f64) -> Result<GaussianityReport> {
    let mut stats = Vec::new();
    for order in 3..=moments.max_order.min(4) {
        for vars in multisets(moments.n_vars, order) {
            let (value, stderr) = moments.jackknife(|p| Ok(moments.cumulant(p, &vars)))?;
            let z = if stderr > 0.0 { value / stderr } else { 0.0 };
            stats.push(CumulantStatistic { vars, value, stderr, z });
        }
    }
    let max_abs_z = stats.iter().map(|s| s.z.abs()).fold(0.0, f64::max);
    let conclusive = !stats.is_empty()
        && moments.n_samples() >= MIN_CONCLUSIVE_SAMPLES
        && moments.n_batches() >= 10
        && stats.iter().all(|s| s.stderr.is_finite());
    let verdict = if !conclusive {
        Verdict::Inconclusive
    } else if max_abs_z < threshold {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(GaussianityReport {
        verdict,
        max_abs_z,
        threshold,
        statistics: stats,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub state_estimate: GaussianState,
    pub mean_stderr: DVector<f64>,
    pub cov_stderr: DMatrix<f64>,
    /// Smallest symplectic eigenvalue of the estimate and its error.
    pub min_symplectic_eig: (f64, f64),
    pub physical_within_errors: bool,
    /// Absent when fewer than third-order moments were recorded.
    pub gaussianity: Option<GaussianityReport>,
}

impl ReconstructionResult {
    /// Negativity of a two-mode estimate with its jackknife error.
    pub fn negativity(&self, moments: &MomentSet) -> Result<(f64, f64)> {
        moments.jackknife(|p| measures::negativity(&moments.gaussian_from(p)?))
    }

    pub fn purity(&self, moments: &MomentSet) -> Result<(f64, f64)> {
        moments.jackknife(|p| measures::purity(&moments.gaussian_from(p)?))
    }
}

/// Gaussian state estimate from first and second moments.
pub fn reconstruct_gaussian(moments: &MomentSet) -> Result<ReconstructionResult> {
    if moments.max_order < 2 {
        return Err(Error::DegenerateData(
            "second-order moments are required for reconstruction".into(),
        ));
    }
    let estimate = moments.gaussian_from(&moments.pooled())?;
    if estimate.cov().clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    let d = moments.n_vars;
    let mut mean_stderr = DVector::zeros(d);
    let mut cov_stderr = DMatrix::zeros(d, d);
    for i in 0..d {
        mean_stderr[i] = moments.jackknife(|p| Ok(moments.raw(p, &[i])))?.1;
        for j in i..d {
            let se = moments.jackknife(|p| Ok(moments.central(p, &[i, j])))?.1;
            cov_stderr[(i, j)] = se;
            cov_stderr[(j, i)] = se;
        }
    }
    let nu = moments.jackknife(|p| moments.gaussian_from(p)?.min_symplectic_eigenvalue())?;
    let gaussianity = if moments.max_order >= 3 {
        Some(gaussianity_test(moments, DEFAULT_THRESHOLD)?)
    } else {
        None
    };
    Ok(ReconstructionResult {
        state_estimate: estimate,
        mean_stderr,
        cov_stderr,
        min_symplectic_eig: nu,
        physical_within_errors: nu.0 + 3.0 * nu.1 >= 1.0,
        gaussianity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Complex;

    #[test]
    fn monomial_table() {
        let m = monomials(2, 2);
        assert_eq!(m, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(monomials(4, 4).len(), 70);
    }

    #[test]
    fn sampling_is_deterministic() {
        let st = GaussianState::coherent(Complex::new(0.3, 0.1)).squeeze(0, 0.4, 0.2).unwrap();
        let a = sample_state(&st, 70_000, 9).unwrap();
        let b = sample_state(&st, 70_000, 9).unwrap();
        let c = sample_state(&st, 70_000, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 70_000);
        assert!(sample_state(&st, 0, 1).is_err());
    }

    #[test]
    fn streaming_moments_match_stored_samples() {
        let st = GaussianState::vacuum(2).squeeze(0, 0.3, 0.0).unwrap().beam_splitter(0, 1, 0.4, 0.2).unwrap();
        let n = 3 * CHUNK + 1234;
        let stored = compute_moments(&sample_state(&st, n, 5).unwrap(), 4, 7).unwrap();
        let streamed = sample_moments(&st, n, 5, 4, 7).unwrap();
        assert_eq!(stored, streamed);
        assert_eq!(stored.n_samples(), n);
        assert_eq!(stored.batch_sizes.iter().max().unwrap() - stored.batch_sizes.iter().min().unwrap(), 1);
    }

    #[test]
    fn constant_samples() {
        let s = QuadratureSamples::new(2, [1.5, -2.0].repeat(100)).unwrap();
        let m = compute_moments(&s, 4, 4).unwrap();
        let pooled = m.pooled();
        for (e, v) in m.exponents.iter().zip(&pooled) {
            let expected = 1.5f64.powi(e[0] as i32) * (-2.0f64).powi(e[1] as i32);
            assert!((v - expected).abs() < 1e-12, "{e:?}");
        }
    }

    #[test]
    fn moment_argument_checks() {
        let s = QuadratureSamples::new(2, vec![0.0; 20]).unwrap();
        assert!(compute_moments(&s, 4, 11).is_err());
        assert!(compute_moments(&s, 5, 2).is_err());
        assert!(compute_moments(&s, 1, 2).is_err());
        assert!(QuadratureSamples::new(2, vec![0.0; 3]).is_err());
        let odd = QuadratureSamples::new(3, vec![0.0; 30]).unwrap();
        assert!(compute_moments(&odd, 2, 2).is_err());
    }

    #[test]
    fn order_one_set_cannot_be_reconstructed() {
        let m = MomentSet::from_batches(2, 1, vec![vec![1.0, 0.1, 0.2]], vec![10]).unwrap();
        assert!(matches!(reconstruct_gaussian(&m), Err(Error::DegenerateData(_))));
        assert!(MomentSet::from_batches(2, 1, vec![vec![2.0, 0.1, 0.2]], vec![10]).is_err());
        assert!(MomentSet::from_batches(2, 1, vec![vec![1.0, 0.1]], vec![10]).is_err());
    }

    #[test]
    fn reconstruction_is_rotation_equivariant() {
        let st = GaussianState::coherent(Complex::new(1.0, -0.5)).squeeze(0, 0.5, 0.3).unwrap();
        let samples = sample_state(&st, 20_000, 3).unwrap();
        let theta: f64 = 0.8;
        let (s, c) = theta.sin_cos();
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let direct = reconstruct_gaussian(&compute_moments(&samples, 2, 20).unwrap()).unwrap();
        let rotated = reconstruct_gaussian(&compute_moments(&samples.transformed(&rot).unwrap(), 2, 20).unwrap()).unwrap();
        let m = &rot * direct.state_estimate.mean();
        let v = &rot * direct.state_estimate.cov() * rot.transpose();
        assert!((rotated.state_estimate.mean() - m).amax() < 1e-10);
        assert!((rotated.state_estimate.cov() - v).amax() < 1e-9);
    }

    #[test]
    fn tiny_samples_are_inconclusive() {
        let s = sample_state(&GaussianState::vacuum(1), 10, 1).unwrap();
        let m = compute_moments(&s, 4, 10).unwrap();
        assert_eq!(gaussianity_test(&m, DEFAULT_THRESHOLD).unwrap().verdict, Verdict::Inconclusive);
        let m2 = compute_moments(&s, 2, 2).unwrap();
        let report = gaussianity_test(&m2, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(report.verdict, Verdict::Inconclusive);
        assert!(report.statistics.is_empty());
    }

    #[test]
    fn unphysical_states_are_not_sampled() {
        let bad = GaussianState::new_unchecked_physicality(DVector::zeros(2), DMatrix::identity(2, 2) * 0.5).unwrap();
        assert!(matches!(sample_state(&bad, 10, 0), Err(Error::Unphysical(_))));
    }
}
