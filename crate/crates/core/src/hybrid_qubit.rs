//! Qubit-state teleportation fidelities predicted from the effective
//! `(kappa, zeta)` parameters of the coherent-state channel.

use serde::Serialize;

use crate::effective_model::{effective_noise, ModelParams};
use crate::error::{check_range, Error, Result};
use crate::gaussian::db_to_r;

const RANGE_TOL: f64 = 1e-9;

/// Bloch angles of `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitParams {
    pub theta: f64,
    pub phi: f64,
}

impl QubitParams {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        check_range("theta", theta, (0.0..=std::f64::consts::PI).contains(&theta), "[0, pi]")?;
        check_range("phi", phi, (0.0..std::f64::consts::TAU).contains(&phi), "[0, 2 pi)")?;
        Ok(Self { theta, phi })
    }

    /// Fidelity for the two poles of the Bloch sphere. Intermediate polar
    /// angles are not modelled and return a domain error.
    pub fn pole_fidelity(&self, kappa: f64, zeta: f64) -> Result<f64> {
        if self.theta == 0.0 {
            fidelity_ground(kappa, zeta)
        } else if self.theta == std::f64::consts::PI {
            fidelity_excited(kappa, zeta)
        } else {
            Err(Error::ModelDomain(format!("polar angle {}", self.theta)))
        }
    }
}

fn check_params(kappa: f64, zeta: f64) -> Result<()> {
    check_range("kappa", kappa, kappa > 0.0, "(0, inf)")?;
    check_range("zeta", zeta, zeta >= 0.0, "[0, inf)")
}

fn in_unit_interval(name: &str, f: f64, kappa: f64, zeta: f64) -> Result<f64> {
    if (-RANGE_TOL..=1.0 + RANGE_TOL).contains(&f) {
        Ok(f.clamp(0.0, 1.0))
    } else {
        Err(Error::ModelDomain(format!(
            "{name} = {f} for (kappa, zeta) = ({kappa}, {zeta})"
        )))
    }
}

/// Vacuum (`|0>`) teleportation fidelity `2 / (zeta + kappa + 1)`.
pub fn fidelity_ground(kappa: f64, zeta: f64) -> Result<f64> {
    check_params(kappa, zeta)?;
    in_unit_interval("F(|0>)", 2.0 / (zeta + kappa + 1.0), kappa, zeta)
}

/// Single-photon (`|1>`) teleportation fidelity.
pub fn fidelity_excited(kappa: f64, zeta: f64) -> Result<f64> {
    check_params(kappa, zeta)?;
    let s = zeta + kappa + 1.0;
    let f = (2.0 * zeta * zeta - 2.0 * kappa * kappa + 12.0 * kappa - 2.0) / s.powi(3);
    in_unit_interval("F(|1>)", f, kappa, zeta)
}

/// Fidelity averaged uniformly over the Bloch sphere.
pub fn average_qubit_fidelity(kappa: f64, zeta: f64) -> Result<f64> {
    check_params(kappa, zeta)?;
    let s = zeta + kappa + 1.0;
    let f = (6.0 * zeta + 4.0 * kappa.sqrt()) / (3.0 * s * s) + 16.0 * kappa / (3.0 * s.powi(3));
    in_unit_interval("average fidelity", f, kappa, zeta)
}

/// Fitted channel parameters at one cryolink centre temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TemperatureFit {
    pub t_cen: f64,
    pub params: ModelParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitPrediction {
    pub t_cen: f64,
    pub s_tms_db: f64,
    pub kappa: f64,
    pub zeta: f64,
    pub fidelity_ground: f64,
    pub fidelity_excited: f64,
    pub average_fidelity: f64,
}

/// Maps each fitted `(kappa, zeta)` to qubit fidelities for a resource
/// squeezed to `target_s_db`.
///
/// The extra noise (everything in `zeta` beyond the squeezing-limited part at
/// `fitted_s_db`) is kept fixed while the squeezing-limited part is recomputed.
pub fn predict_vs_temperature(
    fits: &[TemperatureFit],
    fitted_s_db: f64,
    target_s_db: f64,
) -> Result<Vec<QubitPrediction>> {
    check_range("fitted_s_db", fitted_s_db, fitted_s_db >= 0.0, "[0, inf)")?;
    check_range("target_s_db", target_s_db, target_s_db >= 0.0, "[0, inf)")?;
    let (r_fit, r_new) = (db_to_r(fitted_s_db), db_to_r(target_s_db));
    fits.iter()
        .map(|fit| {
            let kappa = fit.params.kappa;
            let extra = fit.params.zeta - effective_noise(r_fit, kappa, 0.0, 0.0)?;
            if extra < -RANGE_TOL {
                return Err(Error::ModelDomain(format!(
                    "zeta = {} is below the squeezing limit at {fitted_s_db} dB",
                    fit.params.zeta
                )));
            }
            let zeta = effective_noise(r_new, kappa, extra.max(0.0), 0.0)?;
            Ok(QubitPrediction {
                t_cen: fit.t_cen,
                s_tms_db: target_s_db,
                kappa,
                zeta,
                fidelity_ground: fidelity_ground(kappa, zeta)?,
                fidelity_excited: fidelity_excited(kappa, zeta)?,
                average_fidelity: average_qubit_fidelity(kappa, zeta)?,
            })
        })
        .collect()
}
