//! End-to-end acceptance checks with their tolerances and time budgets.
//!
//! Each check reports a verdict and a one-line detail. A check that returns an
//! error, misses its tolerance or exceeds its budget fails.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::effective_model::{
    coupled_noise, fit_model, loss_fraction, model_fidelity, planck_occupancy, FitPoint, ModelParams,
    F_CLASSICAL, F_NO_CLONING,
};
use crate::error::Result;
use crate::gaussian::GaussianState;
use crate::hybrid_qubit::{average_qubit_fidelity, fidelity_ground};
use crate::measures::negativity;
use crate::protocol::{
    build_tms, calibrate_gain, distributed_tms, sweep_photon_number, JpaNoise, ProtocolConfig, Teleporter,
};
use crate::tomography::{
    compute_moments, gaussianity_test, reconstruct_gaussian, sample_moments, sample_state, QuadratureSamples,
    Verdict, DEFAULT_BATCHES, DEFAULT_THRESHOLD,
};
use crate::Complex;

const FITTED_KAPPA: f64 = 0.778;
const FITTED_ZETA: f64 = 1.015;
const TMS_NEGATIVITY_5DB: f64 = 1.081;

/// Static description of one criterion.
#[derive(Debug, Clone, Copy)]
pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub budget_seconds: f64,
    check: fn() -> Result<(bool, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: f64,
}

pub const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, title: "coherent-state fidelity model", budget_seconds: 1.0, check: model_reproduction },
    Criterion { id: 2, title: "implied attenuation", budget_seconds: 1.0, check: implied_attenuation },
    Criterion { id: 3, title: "thermal coupling of the link", budget_seconds: 1.0, check: thermal_coupling },
    Criterion { id: 4, title: "circuit-model equivalence", budget_seconds: 10.0, check: circuit_model },
    Criterion { id: 5, title: "lossless gain calibration", budget_seconds: 1.0, check: gain_calibration },
    Criterion { id: 6, title: "qubit fidelities", budget_seconds: 1.0, check: qubit_formulas },
    Criterion { id: 7, title: "entanglement measures", budget_seconds: 5.0, check: entanglement },
    Criterion { id: 8, title: "fit round trip", budget_seconds: 30.0, check: fit_round_trip },
    Criterion { id: 9, title: "tomography end to end", budget_seconds: 120.0, check: tomography },
    Criterion { id: 10, title: "physicality of random pipelines", budget_seconds: 10.0, check: physicality },
];

impl Criterion {
    pub fn run(&self) -> Outcome {
        let start = Instant::now();
        let result = (self.check)();
        let seconds = start.elapsed().as_secs_f64();
        let (ok, mut detail) = match result {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = seconds <= self.budget_seconds;
        if !in_time {
            detail.push_str(&format!("; over budget {:.1} s", self.budget_seconds));
        }
        Outcome {
            id: self.id,
            title: self.title,
            passed: ok && in_time,
            detail,
            seconds,
            budget_seconds: self.budget_seconds,
        }
    }
}

pub fn criterion(id: u32) -> Option<&'static Criterion> {
    CRITERIA.iter().find(|c| c.id == id)
}

pub fn run_all() -> Vec<Outcome> {
    CRITERIA.iter().map(Criterion::run).collect()
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

/// Photon number at which the model fidelity falls to `level`.
fn crossing(params: &ModelParams, level: f64) -> Result<f64> {
    let (mut lo, mut hi) = (0.0, 1e4);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if model_fidelity(mid, params)? > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn model_reproduction() -> Result<(bool, String)> {
    let p = ModelParams::new(FITTED_KAPPA, FITTED_ZETA)?;
    let f0 = model_fidelity(0.0, &p)?;
    let n_nc = crossing(&p, F_NO_CLONING)?;
    let n_cl = crossing(&p, F_CLASSICAL)?;
    let ok = within(f0, 0.7160, 5e-4) && within(n_nc, 8.3, 0.5) && within(n_cl, 33.0, 2.0);
    Ok((
        ok,
        format!("F(0) = {f0:.5} (0.7160 +- 0.0005); F = 2/3 at n_in = {n_nc:.3} (8.3 +- 0.5); F = 1/2 at n_in = {n_cl:.3} (33 +- 2)"),
    ))
}

fn implied_attenuation() -> Result<(bool, String)> {
    let db = ModelParams::new(FITTED_KAPPA, FITTED_ZETA)?.implied_attenuation_db();
    Ok((within(db, 1.09, 0.01), format!("{db:.4} dB (1.09 +- 0.01)")))
}

fn thermal_coupling() -> Result<(bool, String)> {
    let eps = loss_fraction(6.0, 1.0)?;
    let n_env = planck_occupancy(5.35e9, 4.0)?;
    let n_th = coupled_noise(eps, n_env)?;
    Ok((
        within(n_th, 0.021, 0.002),
        format!("eps = {eps:.6}, n_env = {n_env:.4}, n_th = {n_th:.5} (0.021 +- 0.002)"),
    ))
}

fn circuit_model() -> Result<(bool, String)> {
    let config = ProtocolConfig::paper_calibrated();
    let sweep = sweep_photon_number(&config, &log_spaced(0.01, 100.0, 20), 4)?;
    let data: Vec<FitPoint> = sweep.iter().map(|p| FitPoint::unweighted(p.n_in, p.fidelity)).collect();
    let fit = fit_model(&data)?;

    let one = Complex::new(1.0, 0.0);
    let f_ideal = Teleporter::new(&ProtocolConfig::ideal(60.0, 60.0))?.run(one)?.fidelity;
    let classical = Teleporter::new(&ProtocolConfig::ideal(0.0, 60.0))?;
    let mut worst = 0.0f64;
    for n_in in [0.0, 1.0, 10.0] {
        let f = classical.run(Complex::new(f64::sqrt(n_in), 0.0))?.fidelity;
        worst = worst.max((f - 0.5).abs());
    }
    let ok = fit.rms_residual < 1e-3 && f_ideal >= 0.999 && worst <= 1e-6;
    Ok((
        ok,
        format!(
            "fit rms = {:.2e} at (kappa, zeta) = ({:.4}, {:.4}); F(60 dB) = {f_ideal:.6}; max |F(0 dB) - 0.5| = {worst:.1e}",
            fit.rms_residual, fit.params.kappa, fit.params.zeta
        ),
    ))
}

fn gain_calibration() -> Result<(bool, String)> {
    let g = calibrate_gain(&ProtocolConfig::ideal(5.0, 15.0))?;
    Ok((within(g, 15.0 + 6.02, 0.01), format!("G = {g:.4} dB (21.02 +- 0.01)")))
}

fn qubit_formulas() -> Result<(bool, String)> {
    let mut max_dev = 0.0f64;
    for i in 0..10 {
        let kappa = 0.1 + 0.2 * i as f64;
        for j in 0..10 {
            let zeta = (1.0 - kappa).abs() + 0.5 * j as f64;
            let a = fidelity_ground(kappa, zeta)?;
            let b = model_fidelity(0.0, &ModelParams::new(kappa, zeta)?)?;
            max_dev = max_dev.max((a - b).abs());
        }
    }
    let ideal = average_qubit_fidelity(1.0, 0.0)?;
    let fitted = average_qubit_fidelity(FITTED_KAPPA, FITTED_ZETA)?;
    let ok = max_dev <= 1e-12 && ideal == 1.0 && within(fitted, 0.601, 1e-3);
    Ok((
        ok,
        format!("max |F0 - F(alpha=0)| = {max_dev:.1e}; avg F(1, 0) = {ideal}; avg F(0.778, 1.015) = {fitted:.5} (0.601 +- 0.001)"),
    ))
}

fn entanglement() -> Result<(bool, String)> {
    let tms = build_tms(5.0, JpaNoise::NOISELESS)?;
    let n0 = negativity(&tms)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut max_dev = 0.0f64;
    for _ in 0..100 {
        let mut st = tms.clone();
        for mode in 0..2 {
            st = st
                .phase_rotation(mode, rng.random_range(0.0..TAU))?
                .squeeze(mode, rng.random_range(0.0..1.5), rng.random_range(0.0..TAU))?
                .phase_rotation(mode, rng.random_range(0.0..TAU))?;
        }
        max_dev = max_dev.max((negativity(&st)? - n0).abs());
    }
    let hot = distributed_tms(&ProtocolConfig::paper_calibrated().at_temperature(4.0))?;
    let n_hot = negativity(&hot)?;
    let ok = within(n0, TMS_NEGATIVITY_5DB, 1e-3) && max_dev <= 1e-8 && n_hot > 0.0;
    Ok((
        ok,
        format!("N(5 dB) = {n0:.5} (1.081 +- 0.001); max local change = {max_dev:.1e}; N after 4 K link = {n_hot:.4}"),
    ))
}

fn fit_round_trip() -> Result<(bool, String)> {
    let truth = ModelParams::new(FITTED_KAPPA, FITTED_ZETA)?;
    let grid = log_spaced(0.01, 100.0, 20);
    let clean: Vec<FitPoint> = grid
        .iter()
        .map(|&n| Ok(FitPoint::unweighted(n, model_fidelity(n, &truth)?)))
        .collect::<Result<_>>()?;
    let fit = fit_model(&clean)?;
    let clean_dev = (fit.params.kappa - truth.kappa).abs().max((fit.params.zeta - truth.zeta).abs());

    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noisy: Vec<FitPoint> = clean
            .iter()
            .map(|p| {
                let z: f64 = StandardNormal.sample(&mut rng);
                FitPoint::unweighted(p.n_in, p.fidelity * (1.0 + 0.005 * z))
            })
            .collect();
        let f = fit_model(&noisy)?;
        let rel = ((f.params.kappa - truth.kappa) / truth.kappa)
            .abs()
            .max(((f.params.zeta - truth.zeta) / truth.zeta).abs());
        worst = worst.max(rel);
    }
    let ok = clean_dev <= 1e-6 && worst <= 0.02;
    Ok((
        ok,
        format!("noiseless max error = {clean_dev:.1e}; 0.5% noise worst relative error over 100 seeds = {:.2}%", 100.0 * worst),
    ))
}

/// Equal mixture of coherent states `+alpha` and `-alpha` on one mode.
fn coherent_mixture_samples(alpha: f64, n: usize, seed: u64) -> Result<QuadratureSamples> {
    let vac = sample_state(&GaussianState::vacuum(1), n, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let values = vac
        .rows()
        .flat_map(|r| {
            let shift = if rng.random_bool(0.5) { 2.0 * alpha } else { -2.0 * alpha };
            [r[0] + shift, r[1]]
        })
        .collect();
    QuadratureSamples::new(2, values)
}

fn tomography() -> Result<(bool, String)> {
    let tms = build_tms(5.0, JpaNoise::NOISELESS)?;
    let moments = sample_moments(&tms, 10_000_000, 2024, 2, DEFAULT_BATCHES)?;
    let rec = reconstruct_gaussian(&moments)?;
    let (n_est, n_err) = rec.negativity(&moments)?;
    let exact = negativity(&tms)?;
    let z_neg = (n_est - exact) / n_err;

    let mut false_positives = 0;
    for seed in 0..100u64 {
        let m = sample_moments(&tms, 1_000_000, 10_000 + seed, 4, DEFAULT_BATCHES)?;
        if gaussianity_test(&m, DEFAULT_THRESHOLD)?.verdict != Verdict::Pass {
            false_positives += 1;
        }
    }
    let mix = compute_moments(&coherent_mixture_samples(3.0, 1_000_000, 99)?, 4, DEFAULT_BATCHES)?;
    let mix_report = gaussianity_test(&mix, DEFAULT_THRESHOLD)?;

    let ok = z_neg.abs() <= 3.0 && false_positives <= 1 && mix_report.verdict == Verdict::Fail;
    Ok((
        ok,
        format!(
            "N = {n_est:.5} +- {n_err:.5} ({z_neg:+.2} sigma from {exact:.5}); Gaussian rejections {false_positives}/100; mixture {:?} with max |z| = {:.0}",
            mix_report.verdict, mix_report.max_abs_z
        ),
    ))
}

fn random_state(rng: &mut ChaCha8Rng, n_modes: usize) -> Result<GaussianState> {
    let mut st = GaussianState::thermal(rng.random_range(0.0..2.0))?;
    for _ in 1..n_modes {
        st = st.tensor(&GaussianState::thermal(rng.random_range(0.0..2.0))?);
    }
    for m in 0..n_modes {
        st = st.squeeze(m, rng.random_range(0.0..1.0), rng.random_range(0.0..TAU))?;
    }
    Ok(st)
}

fn random_step(rng: &mut ChaCha8Rng, st: &GaussianState) -> Result<GaussianState> {
    let n = st.n_modes();
    let m = rng.random_range(0..n);
    match rng.random_range(0..6) {
        0 => st.squeeze(m, rng.random_range(0.0..1.2), rng.random_range(0.0..TAU)),
        1 if n > 1 => {
            let other = (m + rng.random_range(1..n)) % n;
            st.beam_splitter(m, other, rng.random_range(0.0..=1.0), rng.random_range(0.0..TAU))
        }
        2 => st.phase_rotation(m, rng.random_range(-PI..PI)),
        3 => st.phase_sensitive_amp(m, rng.random_range(0.0..20.0), rng.random_range(0.0..TAU)),
        4 => st.displace(m, Complex::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))),
        _ => st.loss_thermal_channel(m, rng.random_range(0.0..=1.0), rng.random_range(0.0..5.0)),
    }
}

fn physicality() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut worst = f64::INFINITY;
    let mut steps = 0;
    for _ in 0..1000 {
        let n_modes = rng.random_range(1..=3);
        let mut st = random_state(&mut rng, n_modes)?;
        for _ in 0..rng.random_range(1..=10) {
            st = random_step(&mut rng, &st)?;
            worst = worst.min(st.min_symplectic_eigenvalue()?);
            steps += 1;
        }
    }
    Ok((
        worst >= 1.0 - 1e-9,
        format!("min symplectic eigenvalue over {steps} steps = {worst:.12}"),
    ))
}
