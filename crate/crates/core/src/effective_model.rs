//! Two-parameter effective model of coherent-state teleportation.
//!
//! A phase-insensitive Gaussian teleportation channel is characterized by its
//! amplitude transfer `sqrt(kappa)` and the noise `zeta` it adds on top of the
//! amplified input vacuum. For an input of `n_in` photons the fidelity is
//!
//! ```text
//! F = 2 / (zeta + kappa + 1) * exp(-2 (sqrt(kappa) - 1)^2 n_in / (zeta + kappa + 1))
//! ```
//!
//! and for a resource squeezed by `r` with device and thermal noise
//!
//! ```text
//! zeta = (1 + kappa) cosh 2r - 2 sqrt(kappa) sinh 2r + n_dev + n_th
//! ```

use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::gaussian::db_to_r;
use crate::simplex::{self, Bounds, SimplexOptions};

/// Planck constant, J s (exact SI value).
pub const PLANCK_H: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K (exact SI value).
pub const BOLTZMANN_K: f64 = 1.380_649e-23;

/// Asymptotic classical teleportation threshold.
pub const F_CLASSICAL: f64 = 0.5;
/// No-cloning threshold.
pub const F_NO_CLONING: f64 = 2.0 / 3.0;

const KAPPA_BOUNDS: (f64, f64) = (1e-4, 10.0);
const ZETA_BOUNDS: (f64, f64) = (0.0, 100.0);

/// Effective gain and added noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub kappa: f64,
    pub zeta: f64,
}

/// Split of `zeta` into its squeezing-limited part and extra noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseDecomposition {
    pub r: f64,
    pub n_dev: f64,
    pub n_th: f64,
}

impl ModelParams {
    pub fn new(kappa: f64, zeta: f64) -> Result<Self> {
        check_range("kappa", kappa, kappa > 0.0, "(0, inf)")?;
        check_range("zeta", zeta, zeta >= 0.0, "[0, inf)")?;
        Ok(Self { kappa, zeta })
    }

    pub fn from_decomposition(kappa: f64, noise: NoiseDecomposition) -> Result<Self> {
        let zeta = effective_noise(noise.r, kappa, noise.n_dev, noise.n_th)?;
        Self::new(kappa, zeta)
    }

    /// Attenuation implied by `kappa`, in dB.
    pub fn implied_attenuation_db(&self) -> f64 {
        -10.0 * self.kappa.log10()
    }
}

/// Teleported coherent-state fidelity for an input of `n_in` photons.
pub fn model_fidelity(n_in: f64, params: &ModelParams) -> Result<f64> {
    check_range("n_in", n_in, n_in >= 0.0, "[0, inf)")?;
    check_range("kappa", params.kappa, params.kappa > 0.0, "(0, inf)")?;
    Ok(fidelity_unchecked(n_in, params.kappa, params.zeta))
}

fn fidelity_unchecked(n_in: f64, kappa: f64, zeta: f64) -> f64 {
    let denom = zeta + kappa + 1.0;
    let mismatch = (kappa.sqrt() - 1.0).powi(2);
    2.0 / denom * (-2.0 * mismatch * n_in / denom).exp()
}

/// Added noise for resource squeezing `r`, gain `kappa` and extra noise photons.
pub fn effective_noise(r: f64, kappa: f64, n_dev: f64, n_th: f64) -> Result<f64> {
    check_range("r", r, r >= 0.0, "[0, inf)")?;
    check_range("kappa", kappa, kappa > 0.0, "(0, inf)")?;
    Ok(squeezing_noise(r, kappa) + n_dev + n_th)
}

fn squeezing_noise(r: f64, kappa: f64) -> f64 {
    (1.0 + kappa) * (2.0 * r).cosh() - 2.0 * kappa.sqrt() * (2.0 * r).sinh()
}

/// Bose-Einstein occupancy of a mode at `frequency` (Hz) and `temperature` (K).
///
/// Returns 0 at exactly zero temperature.
pub fn planck_occupancy(frequency: f64, temperature: f64) -> Result<f64> {
    check_range("frequency", frequency, frequency > 0.0, "(0, inf)")?;
    check_range("temperature", temperature, temperature >= 0.0, "[0, inf)")?;
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = PLANCK_H * frequency / (BOLTZMANN_K * temperature);
    Ok(1.0 / x.exp_m1())
}

/// Thermal photons coupled into a channel with loss `eps` from a bath of `n_env`.
pub fn coupled_noise(eps: f64, n_env: f64) -> Result<f64> {
    check_range("eps", eps, (0.0..=1.0).contains(&eps), "[0, 1]")?;
    check_range("n_env", n_env, n_env >= 0.0, "[0, inf)")?;
    Ok(eps * n_env)
}

/// Power loss fraction of a cable of `length_m` metres at `rate_db_per_km`.
pub fn loss_fraction(length_m: f64, rate_db_per_km: f64) -> Result<f64> {
    check_range("length", length_m, length_m >= 0.0, "[0, inf)")?;
    check_range("attenuation_rate", rate_db_per_km, rate_db_per_km >= 0.0, "[0, inf)")?;
    let db = length_m * rate_db_per_km / 1000.0;
    Ok(-(-db / 10.0 * std::f64::consts::LN_10).exp_m1())
}

/// One fidelity measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitPoint {
    pub n_in: f64,
    pub fidelity: f64,
    pub sigma: f64,
}

impl FitPoint {
    /// A point with unit weight.
    pub fn unweighted(n_in: f64, fidelity: f64) -> Self {
        Self {
            n_in,
            fidelity,
            sigma: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub params: ModelParams,
    /// Root-mean-square of the unweighted fidelity residuals.
    pub rms_residual: f64,
    /// Weighted sum of squared residuals at the optimum.
    pub chi_squared: f64,
    pub n_points: usize,
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
}

fn validate(data: &[FitPoint]) -> Result<()> {
    if data.len() < 3 {
        return Err(Error::DegenerateData(format!(
            "need at least 3 points, got {}",
            data.len()
        )));
    }
    for p in data {
        check_range("n_in", p.n_in, p.n_in >= 0.0, "[0, inf)")?;
        check_range("F", p.fidelity, p.fidelity > 0.0 && p.fidelity <= 1.0, "(0, 1]")?;
        check_range("sigma_F", p.sigma, p.sigma > 0.0, "(0, inf)")?;
    }
    let first = data[0].n_in;
    if data.iter().all(|p| p.n_in == first) {
        return Err(Error::DegenerateData("all n_in values are equal".into()));
    }
    Ok(())
}

fn chi_squared(data: &[FitPoint], kappa: f64, zeta: f64) -> f64 {
    data.iter()
        .map(|p| ((fidelity_unchecked(p.n_in, kappa, zeta) - p.fidelity) / p.sigma).powi(2))
        .sum()
}

fn rms(data: &[FitPoint], kappa: f64, zeta: f64) -> f64 {
    let ss: f64 = data
        .iter()
        .map(|p| (fidelity_unchecked(p.n_in, kappa, zeta) - p.fidelity).powi(2))
        .sum();
    (ss / data.len() as f64).sqrt()
}

/// Runs the simplex from each start and keeps the best optimum.
fn multi_start<F>(objective: F, starts: &[[f64; 2]], bounds: &Bounds) -> Result<(simplex::SimplexResult, usize)>
where
    F: Fn(&[f64]) -> f64,
{
    let opts = SimplexOptions::default();
    let mut best: Option<simplex::SimplexResult> = None;
    let mut iterations = 0;
    let mut evaluations = 0;
    for start in starts {
        let res = simplex::minimize(&objective, start, bounds, &opts);
        iterations += res.iterations;
        evaluations += res.evaluations;
        let better = match &best {
            None => true,
            Some(b) => (res.converged && !b.converged) || (res.converged == b.converged && res.value < b.value),
        };
        if better {
            best = Some(res);
        }
    }
    let mut best = best.expect("at least one start");
    if !best.converged {
        return Err(Error::NotConverged(evaluations));
    }
    best.evaluations = evaluations;
    Ok((best, iterations))
}

/// The fidelity depends on `kappa` only through `kappa + zeta` and
/// `(sqrt(kappa) - 1)^2`, so `(kappa, zeta)` and its mirror with
/// `sqrt(kappa') = 2 - sqrt(kappa)` fit any data equally well. Gains above one
/// are folded onto the attenuating branch whenever the mirror is admissible.
fn attenuating_branch(kappa: f64, zeta: f64) -> (f64, f64) {
    if kappa <= 1.0 || kappa.sqrt() >= 2.0 {
        return (kappa, zeta);
    }
    let mirror = (2.0 - kappa.sqrt()).powi(2);
    let mirror_zeta = zeta + kappa - mirror;
    if mirror >= KAPPA_BOUNDS.0 && mirror_zeta <= ZETA_BOUNDS.1 {
        (mirror, mirror_zeta)
    } else {
        (kappa, zeta)
    }
}

/// Weighted least-squares fit of `(kappa, zeta)` to fidelity data. Of the two
/// equivalent optima the one with `kappa <= 1` is returned.
pub fn fit_model(data: &[FitPoint]) -> Result<FitResult> {
    validate(data)?;
    let bounds = Bounds {
        lower: vec![KAPPA_BOUNDS.0, ZETA_BOUNDS.0],
        upper: vec![KAPPA_BOUNDS.1, ZETA_BOUNDS.1],
    };
    let starts = [[0.5, 0.5], [0.5, 2.0], [1.0, 0.5], [1.0, 2.0]];
    let (best, iterations) = multi_start(|x| chi_squared(data, x[0], x[1]), &starts, &bounds)?;
    let (kappa, zeta) = attenuating_branch(best.x[0], best.x[1]);
    Ok(FitResult {
        params: ModelParams { kappa, zeta },
        rms_residual: rms(data, kappa, zeta),
        chi_squared: best.value,
        n_points: data.len(),
        converged: best.converged,
        iterations,
        evaluations: best.evaluations,
    })
}

/// Fit with the resource squeezing fixed, solving for `kappa` and the
/// combined extra noise `n_dev + n_th`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionFit {
    pub fit: FitResult,
    pub r: f64,
    pub extra_noise: f64,
}

pub fn fit_with_fixed_squeezing(data: &[FitPoint], s_tms_db: f64) -> Result<DecompositionFit> {
    validate(data)?;
    check_range("s_tms_db", s_tms_db, s_tms_db >= 0.0, "[0, inf)")?;
    let r = db_to_r(s_tms_db);
    let bounds = Bounds {
        lower: vec![KAPPA_BOUNDS.0, 0.0],
        upper: vec![KAPPA_BOUNDS.1, ZETA_BOUNDS.1],
    };
    let objective = |x: &[f64]| chi_squared(data, x[0], squeezing_noise(r, x[0]) + x[1]);
    let starts = [[0.5, 0.5], [0.5, 2.0], [1.0, 0.5], [1.0, 2.0]];
    let (best, iterations) = multi_start(objective, &starts, &bounds)?;
    let (kappa, extra) = (best.x[0], best.x[1]);
    let zeta = squeezing_noise(r, kappa) + extra;
    Ok(DecompositionFit {
        fit: FitResult {
            params: ModelParams { kappa, zeta },
            rms_residual: rms(data, kappa, zeta),
            chi_squared: best.value,
            n_points: data.len(),
            converged: best.converged,
            iterations,
            evaluations: best.evaluations,
        },
        r,
        extra_noise: extra,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    const FITTED: ModelParams = ModelParams {
        kappa: 0.778,
        zeta: 1.015,
    };

    fn log_spaced(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn fidelity_values() {
        let classical = ModelParams::new(1.0, 2.0).unwrap();
        for n in [0.0, 1.0, 50.0] {
            assert_abs_diff_eq!(model_fidelity(n, &classical).unwrap(), 0.5, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(model_fidelity(0.0, &FITTED).unwrap(), 2.0 / 2.793, epsilon = 1e-15);
        assert_abs_diff_eq!(model_fidelity(0.0, &FITTED).unwrap(), 0.7160, epsilon = 1e-4);
        // exp(-2 (sqrt(0.778) - 1)^2 * 8.3 / 2.793) * 2 / 2.793, evaluated by hand
        assert_abs_diff_eq!(model_fidelity(8.3, &FITTED).unwrap(), 0.659_241_7, epsilon = 1e-6);
        assert!(model_fidelity(-1.0, &FITTED).is_err());
        assert!(model_fidelity(1.0, &ModelParams { kappa: 0.0, zeta: 1.0 }).is_err());
    }

    #[test]
    fn noise_values() {
        assert_abs_diff_eq!(effective_noise(0.0, 1.0, 0.0, 0.0).unwrap(), 2.0, epsilon = 1e-15);
        for r in [1.0, 2.0, 4.0] {
            let z = effective_noise(r, 1.0, 0.0, 0.0).unwrap();
            assert_abs_diff_eq!(z, 2.0 * (-2.0 * r).exp(), epsilon = 1e-9);
        }
        let z = effective_noise(0.5756, 0.778, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(z, 0.582, epsilon = 1e-3);
        assert_abs_diff_eq!(effective_noise(0.3, 0.9, 0.2, 0.1).unwrap(), effective_noise(0.3, 0.9, 0.0, 0.0).unwrap() + 0.3, epsilon = 1e-15);
        assert!(effective_noise(-0.1, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn noise_has_single_stationary_point_in_kappa() {
        for r in [0.1, 0.5756, 1.2] {
            // Derivative by central differences, scanned for sign changes.
            let d = |k: f64| {
                let h = 1e-6;
                (effective_noise(r, k + h, 0.0, 0.0).unwrap() - effective_noise(r, k - h, 0.0, 0.0).unwrap()) / (2.0 * h)
            };
            let grid: Vec<f64> = (1..4000).map(|i| i as f64 * 1e-3).collect();
            let changes: Vec<f64> = grid
                .windows(2)
                .filter(|w| d(w[0]).signum() != d(w[1]).signum())
                .map(|w| w[0])
                .collect();
            assert_eq!(changes.len(), 1, "r = {r}");
            assert!((changes[0] - (2.0 * r).tanh().powi(2)).abs() < 2e-3);
        }
    }

    #[test]
    fn planck_values() {
        // h f / k T = ln 2  =>  n = 1
        let f = 5e9;
        let t = PLANCK_H * f / (BOLTZMANN_K * LN_2);
        assert_abs_diff_eq!(planck_occupancy(f, t).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(planck_occupancy(5.35e9, 4.0).unwrap(), 15.084_129, epsilon = 1e-5);
        assert_abs_diff_eq!(planck_occupancy(5.35e9, 0.17).unwrap(), 0.283_421, epsilon = 1e-5);
        assert_eq!(planck_occupancy(5.35e9, 0.0).unwrap(), 0.0);
        assert!(planck_occupancy(0.0, 1.0).is_err());
        assert!(planck_occupancy(1e9, -1.0).is_err());
    }

    #[test]
    fn planck_monotonicity() {
        let mut prev = 0.0;
        for k in 1..100 {
            let n = planck_occupancy(5.35e9, 0.05 * k as f64).unwrap();
            assert!(n > prev);
            prev = n;
        }
        let mut prev = f64::INFINITY;
        for k in 1..100 {
            let n = planck_occupancy(1e8 * k as f64, 1.0).unwrap();
            assert!(n < prev);
            prev = n;
        }
    }

    #[test]
    fn thermal_coupling() {
        assert_eq!(coupled_noise(0.0, 10.0).unwrap(), 0.0);
        assert_abs_diff_eq!(coupled_noise(0.5, 2.0).unwrap(), 1.0, epsilon = 1e-15);
        let eps = loss_fraction(6.0, 1.0).unwrap();
        assert_abs_diff_eq!(eps, 1.0 - 10f64.powf(-0.0006), epsilon = 1e-15);
        assert_abs_diff_eq!(eps, 1.381e-3, epsilon = 1e-6);
        let n_th = coupled_noise(eps, planck_occupancy(5.35e9, 4.0).unwrap()).unwrap();
        assert_abs_diff_eq!(n_th, 0.021, epsilon = 0.002);
        assert!(coupled_noise(1.1, 1.0).is_err());
    }

    #[test]
    fn implied_attenuation() {
        assert_abs_diff_eq!(FITTED.implied_attenuation_db(), 1.09, epsilon = 0.01);
    }

    #[test]
    fn noiseless_round_trip() {
        let data: Vec<FitPoint> = log_spaced(20, 0.01, 100.0)
            .into_iter()
            .map(|n| FitPoint::unweighted(n, model_fidelity(n, &FITTED).unwrap()))
            .collect();
        let fit = fit_model(&data).unwrap();
        assert!(fit.converged);
        assert_abs_diff_eq!(fit.params.kappa, 0.778, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.params.zeta, 1.015, epsilon = 1e-6);
        assert!(fit.rms_residual < 1e-9);
        assert_eq!(fit.n_points, 20);
    }

    #[test]
    fn mirror_gain_is_folded() {
        let mirror = ModelParams { kappa: (2.0 - FITTED.kappa.sqrt()).powi(2), zeta: 0.0 };
        let mirror = ModelParams { zeta: FITTED.zeta + FITTED.kappa - mirror.kappa, ..mirror };
        for n in [0.0, 0.3, 7.0, 90.0] {
            assert_abs_diff_eq!(
                model_fidelity(n, &mirror).unwrap(),
                model_fidelity(n, &FITTED).unwrap(),
                epsilon = 1e-14
            );
        }
        let (k, z) = attenuating_branch(mirror.kappa, mirror.zeta);
        assert_abs_diff_eq!(k, FITTED.kappa, epsilon = 1e-12);
        assert_abs_diff_eq!(z, FITTED.zeta, epsilon = 1e-12);
        assert_eq!(attenuating_branch(0.5, 1.0), (0.5, 1.0));
        assert_eq!(attenuating_branch(5.0, 1.0), (5.0, 1.0));
    }

    #[test]
    fn sigma_scaling_keeps_argmin() {
        let data: Vec<FitPoint> = log_spaced(12, 0.05, 60.0)
            .into_iter()
            .enumerate()
            .map(|(i, n)| FitPoint {
                n_in: n,
                fidelity: model_fidelity(n, &FITTED).unwrap() * (1.0 + 0.01 * ((i * 7 % 5) as f64 - 2.0)),
                sigma: 0.01 + 0.002 * i as f64,
            })
            .collect();
        let scaled: Vec<FitPoint> = data
            .iter()
            .map(|p| FitPoint { sigma: p.sigma * 7.5, ..*p })
            .collect();
        let a = fit_model(&data).unwrap();
        let b = fit_model(&scaled).unwrap();
        assert_abs_diff_eq!(a.params.kappa, b.params.kappa, epsilon = 1e-8);
        assert_abs_diff_eq!(a.params.zeta, b.params.zeta, epsilon = 1e-8);
    }

    #[test]
    fn fit_rejects_bad_data() {
        let two = vec![FitPoint::unweighted(0.1, 0.7), FitPoint::unweighted(1.0, 0.6)];
        assert!(matches!(fit_model(&two), Err(Error::DegenerateData(_))));
        let same = vec![FitPoint::unweighted(1.0, 0.7); 5];
        assert!(matches!(fit_model(&same), Err(Error::DegenerateData(_))));
        let mut bad = vec![FitPoint::unweighted(0.1, 0.7), FitPoint::unweighted(1.0, 0.6), FitPoint::unweighted(2.0, 0.5)];
        bad[1].sigma = 0.0;
        assert!(fit_model(&bad).is_err());
        bad[1].sigma = 1.0;
        bad[2].fidelity = 1.2;
        assert!(fit_model(&bad).is_err());
    }

    #[test]
    fn decomposition_fit_recovers_extra_noise() {
        let r = db_to_r(5.0);
        let truth = ModelParams::from_decomposition(0.8, NoiseDecomposition { r, n_dev: 0.3, n_th: 0.05 }).unwrap();
        let data: Vec<FitPoint> = log_spaced(15, 0.01, 100.0)
            .into_iter()
            .map(|n| FitPoint::unweighted(n, model_fidelity(n, &truth).unwrap()))
            .collect();
        let fit = fit_with_fixed_squeezing(&data, 5.0).unwrap();
        assert_abs_diff_eq!(fit.fit.params.kappa, 0.8, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.extra_noise, 0.35, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.fit.params.zeta, truth.zeta, epsilon = 1e-6);
    }
}
