//! Analog-feedforward teleportation of coherent states between two
//! cryogenic nodes joined by a lossy, thermally loaded link.
//!
//! Mode layout inside the circuit: `0` carries Alice's input, `1` the TMS arm
//! kept by Alice, `2` the TMS arm sent to Bob.
//!
//! 1. Two squeezers (optionally preceded by an input-referred noise stage)
//!    squeezed along orthogonal axes are mixed on a balanced splitter.
//! 2. Bob's arm crosses the entanglement channel and Bob's resource stages.
//! 3. Input and Alice's arm meet on a hybrid ring.
//! 4. The two ring outputs are amplified along orthogonal quadratures and
//!    recombined on a second balanced splitter (the Josephson interferometer).
//! 5. The feedforward crosses Alice's feedforward stages and its own channel.
//! 6. A directional coupler of power coupling `eta` adds it to Bob's arm.
//!
//! The interferometer gain `G` is the power gain of the input quadratures into
//! the feedforward, scaled so that the input reaches it with amplitude
//! `sqrt(G) / 2`. The single JPA gain `g` then satisfies
//! `sqrt(G) = sqrt(g) + 1/sqrt(g)`, and the lossless calibration is `G = 4 / eta`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::effective_model::{loss_fraction, planck_occupancy};
use crate::error::{check_range, Error, Result};
use crate::gaussian::{db_to_linear, db_to_r, GaussianState};
use crate::measures;

const MODE_INPUT: usize = 0;
const MODE_ALICE: usize = 1;
const MODE_BOB: usize = 2;

/// Smallest interferometer gain reachable with unit JPA gain.
pub const MIN_INTERFEROMETER_GAIN_DB: f64 = 6.020_599_913_279_624;

/// One cable segment of the cryolink.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    /// Metres.
    pub length: f64,
    /// dB/km.
    pub attenuation_rate: f64,
    /// Kelvin.
    pub t_cen: f64,
    /// Hz.
    pub carrier_frequency: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explicit_eps: Option<f64>,
}

impl ChannelConfig {
    pub fn eps(&self) -> Result<f64> {
        match self.explicit_eps {
            Some(eps) => {
                check_range("explicit_eps", eps, (0.0..1.0).contains(&eps), "[0, 1)")?;
                Ok(eps)
            }
            None => loss_fraction(self.length, self.attenuation_rate),
        }
    }

    /// Bath occupancy at the channel temperature.
    pub fn n_env(&self) -> Result<f64> {
        planck_occupancy(self.carrier_frequency, self.t_cen)
    }

    /// Noise photons the channel couples in, `eps * n_env`.
    pub fn n_th(&self) -> Result<f64> {
        Ok(self.eps()? * self.n_env()?)
    }

    fn validate(&self) -> Result<()> {
        check_range("length", self.length, self.length >= 0.0, "[0, inf)")?;
        check_range("attenuation_rate", self.attenuation_rate, self.attenuation_rate >= 0.0, "[0, inf)")?;
        check_range("t_cen", self.t_cen, self.t_cen >= 0.0, "[0, inf)")?;
        check_range("carrier_frequency", self.carrier_frequency, self.carrier_frequency > 0.0, "(0, inf)")?;
        self.eps().map(|_| ())
    }
}

/// Where a lossy component sits in the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Port {
    /// Alice: input path before the hybrid ring.
    Input,
    /// Either node: the local TMS arm (Alice before the ring, Bob after the channel).
    Resource,
    /// Alice: feedforward path between the interferometer and the channel.
    Feedforward,
    /// Bob: after the directional coupler.
    Output,
}

/// Insertion loss of a passive component, coupled to a bath.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentStage {
    pub eps: f64,
    /// Bath occupancy; when absent it follows the node's MC temperature.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_env: Option<f64>,
    pub port: Port,
}

/// Breakpoint of the centre-temperature to MC-temperature map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapPoint {
    pub t_cen: f64,
    pub t_alice: f64,
    pub t_bob: f64,
}

/// Piecewise-linear map from the link centre temperature to the MC
/// temperatures of both nodes, held constant outside the breakpoints.
///
/// Without breakpoints the MC temperature follows `t_cen` up to 0.2 K and
/// stays there.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperatureMap {
    #[serde(default)]
    pub breakpoints: Vec<MapPoint>,
}

impl TemperatureMap {
    const DEFAULT_CEILING: f64 = 0.2;

    /// `(t_alice, t_bob)` at centre temperature `t_cen`.
    pub fn eval(&self, t_cen: f64) -> (f64, f64) {
        let pts = &self.breakpoints;
        if pts.is_empty() {
            let t = t_cen.min(Self::DEFAULT_CEILING);
            return (t, t);
        }
        if t_cen <= pts[0].t_cen {
            return (pts[0].t_alice, pts[0].t_bob);
        }
        for w in pts.windows(2) {
            if t_cen <= w[1].t_cen {
                let u = (t_cen - w[0].t_cen) / (w[1].t_cen - w[0].t_cen);
                return (
                    w[0].t_alice + u * (w[1].t_alice - w[0].t_alice),
                    w[0].t_bob + u * (w[1].t_bob - w[0].t_bob),
                );
            }
        }
        let last = pts[pts.len() - 1];
        (last.t_alice, last.t_bob)
    }

    fn validate(&self) -> Result<()> {
        for p in &self.breakpoints {
            check_range("t_mc_map.t_cen", p.t_cen, p.t_cen >= 0.0, "[0, inf)")?;
            check_range("t_mc_map.t_alice", p.t_alice, p.t_alice >= 0.0, "[0, inf)")?;
            check_range("t_mc_map.t_bob", p.t_bob, p.t_bob >= 0.0, "[0, inf)")?;
        }
        if self.breakpoints.windows(2).any(|w| w[1].t_cen <= w[0].t_cen) {
            return Err(Error::OutOfRange {
                name: "t_mc_map.t_cen",
                value: f64::NAN,
                range: "strictly increasing",
            });
        }
        Ok(())
    }
}

fn default_jpa_noise_loss() -> f64 {
    0.01
}

/// Full description of one teleportation experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Squeezing of each entanglement JPA, dB below vacuum.
    pub s_tms_db: f64,
    /// Interferometer gain in dB; calibrated to unit displacement transfer
    /// when absent.
    #[serde(default)]
    pub gain_db: Option<f64>,
    /// Directional coupler coupling in dB (`eta = 10^(-coupler_db/10)`).
    pub coupler_db: f64,
    /// Input-referred added noise of each entanglement JPA, photons.
    #[serde(default)]
    pub n_dev: f64,
    /// Input-referred added noise of each measurement JPA, photons.
    #[serde(default)]
    pub measurement_n_dev: f64,
    /// Loss of the stage that injects JPA noise.
    #[serde(default = "default_jpa_noise_loss")]
    pub jpa_noise_loss: f64,
    pub entanglement_channel: ChannelConfig,
    pub feedforward_channel: ChannelConfig,
    #[serde(default)]
    pub alice_component_losses: Vec<ComponentStage>,
    #[serde(default)]
    pub bob_component_losses: Vec<ComponentStage>,
    #[serde(default)]
    pub t_mc_map: TemperatureMap,
    /// Input photon number at which the interferometer gain halves; no
    /// compression when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compression_n1db: Option<f64>,
}

impl ProtocolConfig {
    /// A lossless, noiseless link at zero temperature.
    pub fn ideal(s_tms_db: f64, coupler_db: f64) -> Self {
        let channel = ChannelConfig {
            length: 0.0,
            attenuation_rate: 0.0,
            t_cen: 0.0,
            carrier_frequency: 5.35e9,
            explicit_eps: None,
        };
        Self {
            s_tms_db,
            gain_db: None,
            coupler_db,
            n_dev: 0.0,
            measurement_n_dev: 0.0,
            jpa_noise_loss: default_jpa_noise_loss(),
            entanglement_channel: channel.clone(),
            feedforward_channel: channel,
            alice_component_losses: Vec::new(),
            bob_component_losses: Vec::new(),
            t_mc_map: TemperatureMap::default(),
            compression_n1db: None,
        }
    }

    /// 5 dB resource over the 6 m, 1 dB/km link at 170 mK, with component
    /// losses and device noise chosen so that the circuit reproduces
    /// `kappa = 0.778` and `zeta = 1.015`. The split between loss and noise
    /// stages is illustrative; only `(kappa, zeta)` are matched.
    pub fn paper_calibrated() -> Self {
        let channel = ChannelConfig {
            length: 6.0,
            attenuation_rate: 1.0,
            t_cen: 0.17,
            carrier_frequency: 5.35e9,
            explicit_eps: None,
        };
        let stage = |eps, port| ComponentStage { eps, n_env: None, port };
        Self {
            s_tms_db: 5.0,
            gain_db: Some(15.0 + MIN_INTERFEROMETER_GAIN_DB),
            coupler_db: 15.0,
            n_dev: 0.03,
            measurement_n_dev: 0.097_622_118_1,
            jpa_noise_loss: default_jpa_noise_loss(),
            entanglement_channel: channel.clone(),
            feedforward_channel: channel,
            alice_component_losses: vec![
                stage(0.05, Port::Input),
                stage(0.02, Port::Resource),
                stage(0.171_636_800_1, Port::Feedforward),
            ],
            bob_component_losses: vec![stage(0.03, Port::Resource)],
            t_mc_map: TemperatureMap {
                breakpoints: vec![
                    MapPoint { t_cen: 0.17, t_alice: 0.05, t_bob: 0.05 },
                    MapPoint { t_cen: 4.0, t_alice: 0.2, t_bob: 0.2 },
                ],
            },
            compression_n1db: None,
        }
    }

    pub fn eta(&self) -> f64 {
        db_to_linear(-self.coupler_db)
    }

    pub fn t_cen(&self) -> f64 {
        self.entanglement_channel.t_cen
    }

    pub fn carrier_frequency(&self) -> f64 {
        self.entanglement_channel.carrier_frequency
    }

    /// Copy with both link segments at centre temperature `t_cen`.
    pub fn at_temperature(&self, t_cen: f64) -> Self {
        let mut c = self.clone();
        c.entanglement_channel.t_cen = t_cen;
        c.feedforward_channel.t_cen = t_cen;
        c
    }

    pub fn validate(&self) -> Result<()> {
        check_range("s_tms_db", self.s_tms_db, self.s_tms_db >= 0.0, "[0, inf)")?;
        check_range("coupler_db", self.coupler_db, self.coupler_db > 0.0, "(0, inf)")?;
        if let Some(g) = self.gain_db {
            check_range("gain_db", g, g >= MIN_INTERFEROMETER_GAIN_DB, "[6.0206, inf)")?;
        }
        check_range("n_dev", self.n_dev, self.n_dev >= 0.0, "[0, inf)")?;
        check_range("measurement_n_dev", self.measurement_n_dev, self.measurement_n_dev >= 0.0, "[0, inf)")?;
        check_range("jpa_noise_loss", self.jpa_noise_loss, self.jpa_noise_loss > 0.0 && self.jpa_noise_loss <= 1.0, "(0, 1]")?;
        self.entanglement_channel.validate()?;
        self.feedforward_channel.validate()?;
        for stage in &self.alice_component_losses {
            validate_stage(stage, &[Port::Input, Port::Resource, Port::Feedforward])?;
        }
        for stage in &self.bob_component_losses {
            validate_stage(stage, &[Port::Resource, Port::Output])?;
        }
        self.t_mc_map.validate()?;
        if let Some(n) = self.compression_n1db {
            check_range("compression_n1db", n, n > 0.0, "(0, inf)")?;
        }
        Ok(())
    }

    fn node_occupancies(&self) -> Result<(f64, f64)> {
        let (ta, tb) = self.t_mc_map.eval(self.t_cen());
        let f = self.carrier_frequency();
        Ok((planck_occupancy(f, ta)?, planck_occupancy(f, tb)?))
    }
}

fn validate_stage(stage: &ComponentStage, allowed: &[Port]) -> Result<()> {
    check_range("component eps", stage.eps, (0.0..=1.0).contains(&stage.eps), "[0, 1]")?;
    if let Some(n) = stage.n_env {
        check_range("component n_env", n, n >= 0.0, "[0, inf)")?;
    }
    if !allowed.contains(&stage.port) {
        return Err(Error::OutOfRange {
            name: "component port",
            value: f64::NAN,
            range: "a port that exists on this node",
        });
    }
    Ok(())
}

/// Added noise of one JPA, injected by a lossy stage ahead of the ideal device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JpaNoise {
    /// Stage loss.
    pub loss: f64,
    /// Photons added, `loss * n_env` of the stage.
    pub n_dev: f64,
}

impl JpaNoise {
    pub const NOISELESS: JpaNoise = JpaNoise { loss: 0.01, n_dev: 0.0 };

    fn apply(&self, state: &GaussianState, mode: usize) -> Result<GaussianState> {
        if self.n_dev > 0.0 {
            state.loss_thermal_channel(mode, self.loss, self.n_dev / self.loss)
        } else {
            Ok(state.clone())
        }
    }
}

/// Balanced two-mode squeezed state from two orthogonally squeezed modes
/// mixed on a balanced splitter. Mode 0 goes to Alice, mode 1 to Bob.
pub fn build_tms(s_tms_db: f64, jpa_noise: JpaNoise) -> Result<GaussianState> {
    check_range("s_tms_db", s_tms_db, s_tms_db >= 0.0, "[0, inf)")?;
    let r = db_to_r(s_tms_db);
    let mut st = GaussianState::vacuum(2);
    st = jpa_noise.apply(&st, 0)?;
    st = jpa_noise.apply(&st, 1)?;
    st.squeeze(0, r, 0.0)?
        .squeeze(1, r, FRAC_PI_2)?
        .beam_splitter(0, 1, 0.5, 0.0)
}

fn apply_stages<'a>(
    mut state: GaussianState,
    mode: usize,
    stages: impl IntoIterator<Item = &'a ComponentStage>,
    port: Port,
    node_n_env: f64,
) -> Result<GaussianState> {
    for stage in stages.into_iter().filter(|s| s.port == port) {
        state = state.loss_thermal_channel(mode, stage.eps, stage.n_env.unwrap_or(node_n_env))?;
    }
    Ok(state)
}

/// JPA gain `g` (linear) that realizes interferometer gain `gain_db`.
fn jpa_gain(gain_db: f64) -> Result<f64> {
    let big = db_to_linear(gain_db);
    check_range("gain_db", gain_db, big >= 4.0 - 1e-12, "[6.0206, inf)")?;
    let root = (big.sqrt() + (big - 4.0).max(0.0).sqrt()) / 2.0;
    Ok(root * root)
}

/// Output of one teleportation run.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportResult {
    pub output_state: GaussianState,
    pub fidelity: f64,
    /// `|m_out - m_in|^2 / 4`, photons.
    pub displacement_mismatch: f64,
    /// Output variance above the vacuum-level input, photons.
    pub added_variance: f64,
    /// Interferometer gain used, dB.
    pub gain_db: f64,
}

/// The Alice/Bob TMS pair after all losses it meets before the hybrid ring.
pub fn distributed_tms(config: &ProtocolConfig) -> Result<GaussianState> {
    config.validate()?;
    let tms = build_tms(
        config.s_tms_db,
        JpaNoise {
            loss: config.jpa_noise_loss,
            n_dev: config.n_dev,
        },
    )?;
    distribute(config, tms)
}

fn distribute(config: &ProtocolConfig, tms: GaussianState) -> Result<GaussianState> {
    let (n_alice, n_bob) = config.node_occupancies()?;
    let ch = &config.entanglement_channel;
    let st = apply_stages(tms, 0, &config.alice_component_losses, Port::Resource, n_alice)?;
    let st = st.loss_thermal_channel(1, ch.eps()?, ch.n_env()?)?;
    apply_stages(st, 1, &config.bob_component_losses, Port::Resource, n_bob)
}

/// Runs the full circuit for input amplitude `alpha` at interferometer gain
/// `gain_db`, on a given two-mode resource (Alice first, Bob second).
fn circuit(
    config: &ProtocolConfig,
    resource: GaussianState,
    alpha: Complex<f64>,
    gain_db: f64,
) -> Result<GaussianState> {
    let (n_alice, n_bob) = config.node_occupancies()?;
    let pair = distribute(config, resource)?;
    let mut st = GaussianState::coherent(alpha).tensor(&pair);
    st = apply_stages(st, MODE_INPUT, &config.alice_component_losses, Port::Input, n_alice)?;

    // Hybrid ring: mode 1 -> (in + A)/sqrt2, mode 0 -> (in - A)/sqrt2.
    st = st.beam_splitter(MODE_ALICE, MODE_INPUT, 0.5, 0.0)?;

    let compressed_db = match config.compression_n1db {
        Some(n1) => gain_db - 10.0 * (1.0 + alpha.norm_sqr() / n1).log10(),
        None => gain_db,
    };
    let g_db = 10.0 * jpa_gain(compressed_db.max(MIN_INTERFEROMETER_GAIN_DB))?.log10();
    let meas = JpaNoise {
        loss: config.jpa_noise_loss,
        n_dev: config.measurement_n_dev,
    };
    st = meas.apply(&st, MODE_INPUT)?;
    st = meas.apply(&st, MODE_ALICE)?;
    st = st.phase_sensitive_amp(MODE_INPUT, g_db, 0.0)?;
    st = st.phase_sensitive_amp(MODE_ALICE, g_db, FRAC_PI_2)?;
    // Recombination: the feedforward leaves on mode 1.
    st = st.beam_splitter(MODE_ALICE, MODE_INPUT, 0.5, 0.0)?;

    st = apply_stages(st, MODE_ALICE, &config.alice_component_losses, Port::Feedforward, n_alice)?;
    let ff = &config.feedforward_channel;
    st = st.loss_thermal_channel(MODE_ALICE, ff.eps()?, ff.n_env()?)?;

    st = st.beam_splitter(MODE_BOB, MODE_ALICE, 1.0 - config.eta(), 0.0)?;
    st = apply_stages(st, MODE_BOB, &config.bob_component_losses, Port::Output, n_bob)?;
    st.partial_trace(&[MODE_BOB])
}

/// A validated configuration with its interferometer gain resolved.
#[derive(Debug, Clone)]
pub struct Teleporter {
    config: ProtocolConfig,
    resource: GaussianState,
    gain_db: f64,
}

impl Teleporter {
    pub fn new(config: &ProtocolConfig) -> Result<Self> {
        config.validate()?;
        let gain_db = match config.gain_db {
            Some(g) => g,
            None => calibrate_gain(config)?,
        };
        let resource = build_tms(
            config.s_tms_db,
            JpaNoise {
                loss: config.jpa_noise_loss,
                n_dev: config.n_dev,
            },
        )?;
        Ok(Self {
            config: config.clone(),
            resource,
            gain_db,
        })
    }

    pub fn gain_db(&self) -> f64 {
        self.gain_db
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    pub fn run(&self, alpha: Complex<f64>) -> Result<TeleportResult> {
        self.run_with_resource(self.resource.clone(), alpha)
    }

    fn run_with_resource(&self, resource: GaussianState, alpha: Complex<f64>) -> Result<TeleportResult> {
        let out = circuit(&self.config, resource, alpha, self.gain_db)?;
        let fidelity = measures::fidelity_to_coherent(alpha, &out)?;
        let m = out.mean();
        let dx = m[0] - 2.0 * alpha.re;
        let dp = m[1] - 2.0 * alpha.im;
        let tr = out.cov()[(0, 0)] + out.cov()[(1, 1)];
        Ok(TeleportResult {
            fidelity,
            displacement_mismatch: (dx * dx + dp * dp) / 4.0,
            added_variance: (tr - 2.0) / 4.0,
            gain_db: self.gain_db,
            output_state: out,
        })
    }

    /// Power transfer `kappa` of the input displacement to Bob's output.
    pub fn kappa(&self) -> Result<f64> {
        transfer(&self.config, self.gain_db)
    }
}

fn transfer(config: &ProtocolConfig, gain_db: f64) -> Result<f64> {
    let mut small = config.clone();
    small.compression_n1db = None;
    let out = circuit(&small, GaussianState::vacuum(2), Complex::new(1.0, 0.0), gain_db)?;
    let m = out.mean();
    Ok((m[0] * m[0] + m[1] * m[1]) / 4.0)
}

pub fn run_teleportation(config: &ProtocolConfig, alpha: Complex<f64>) -> Result<TeleportResult> {
    Teleporter::new(config)?.run(alpha)
}

/// Interferometer gain giving unit displacement transfer, by bisection over
/// `[coupler_db, coupler_db + 20]` dB.
pub fn calibrate_gain(config: &ProtocolConfig) -> Result<f64> {
    config.validate()?;
    let mut lo = config.coupler_db.max(MIN_INTERFEROMETER_GAIN_DB);
    let mut hi = config.coupler_db + 20.0;
    let excess = |g: f64| transfer(config, g).map(|k| k - 1.0);
    let (f_lo, f_hi) = (excess(lo)?, excess(hi)?);
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(Error::NoRoot("displacement transfer - 1"));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhotonSweepPoint {
    pub n_in: f64,
    pub fidelity: f64,
    pub stderr: f64,
}

/// Phase-averaged fidelity for each input photon number, using `n_phases`
/// equally spaced input phases.
pub fn sweep_photon_number(config: &ProtocolConfig, n_in_list: &[f64], n_phases: usize) -> Result<Vec<PhotonSweepPoint>> {
    if n_phases == 0 {
        return Err(Error::OutOfRange {
            name: "n_phases",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    for &n in n_in_list {
        check_range("n_in", n, n >= 0.0, "[0, inf)")?;
    }
    let tele = Teleporter::new(config)?;
    n_in_list
        .par_iter()
        .map(|&n_in| {
            let amp = n_in.sqrt();
            let values = (0..n_phases)
                .map(|k| {
                    let theta = std::f64::consts::TAU * k as f64 / n_phases as f64;
                    tele.run(Complex::from_polar(amp, theta)).map(|r| r.fidelity)
                })
                .collect::<Result<Vec<f64>>>()?;
            let mean = values.iter().sum::<f64>() / n_phases as f64;
            let stderr = if n_phases > 1 {
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n_phases - 1) as f64;
                (var / n_phases as f64).sqrt()
            } else {
                0.0
            };
            Ok(PhotonSweepPoint {
                n_in,
                fidelity: mean,
                stderr,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TemperaturePoint {
    pub t_cen: f64,
    pub fidelity: f64,
    pub negativity: f64,
    pub purity: f64,
    pub n_env: f64,
    pub n_th: f64,
}

/// Fidelity at fixed `n_in` and the distributed-resource diagnostics for each
/// link centre temperature.
pub fn sweep_temperature(config: &ProtocolConfig, t_cen_list: &[f64], n_in: f64) -> Result<Vec<TemperaturePoint>> {
    check_range("n_in", n_in, n_in >= 0.0, "[0, inf)")?;
    for &t in t_cen_list {
        check_range("t_cen", t, t >= 0.0, "[0, inf)")?;
    }
    // Thermal noise leaves the displacement transfer untouched, so the gain is
    // resolved once.
    let gain_db = Teleporter::new(config)?.gain_db();
    t_cen_list
        .par_iter()
        .map(|&t| {
            let mut cfg = config.at_temperature(t);
            cfg.gain_db = Some(gain_db);
            let tele = Teleporter::new(&cfg)?;
            let res = tele.run(Complex::new(n_in.sqrt(), 0.0))?;
            let pair = distributed_tms(&cfg)?;
            Ok(TemperaturePoint {
                t_cen: t,
                fidelity: res.fidelity,
                negativity: measures::negativity(&pair)?,
                purity: measures::purity(&pair)?,
                n_env: cfg.entanglement_channel.n_env()?,
                n_th: cfg.entanglement_channel.n_th()?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effective_model::{model_fidelity, ModelParams};
    use approx::assert_abs_diff_eq;

    #[test]
    fn tms_resource() {
        let vac = build_tms(0.0, JpaNoise::NOISELESS).unwrap();
        assert!((vac.cov() - GaussianState::vacuum(2).cov()).amax() < 1e-12);
        let five = build_tms(5.0, JpaNoise::NOISELESS).unwrap();
        assert_abs_diff_eq!(measures::negativity(&five).unwrap(), 1.0811, epsilon = 1e-4);
        assert_abs_diff_eq!(measures::purity(&five).unwrap(), 1.0, epsilon = 1e-10);
        // Balanced marginals.
        let a = five.partial_trace(&[0]).unwrap();
        let b = five.partial_trace(&[1]).unwrap();
        assert!((a.cov() - b.cov()).amax() < 1e-12);
        let noisy = build_tms(5.0, JpaNoise { loss: 0.01, n_dev: 0.1 }).unwrap();
        assert!(measures::purity(&noisy).unwrap() < 1.0);
        assert!(measures::negativity(&noisy).unwrap() < measures::negativity(&five).unwrap());
    }

    #[test]
    fn jpa_gain_inverts_interferometer_gain() {
        for g_db in [6.1, 15.0, 21.02, 40.0] {
            let g = jpa_gain(g_db).unwrap();
            let back = (g.sqrt() + 1.0 / g.sqrt()).powi(2);
            assert_abs_diff_eq!(10.0 * back.log10(), g_db, epsilon = 1e-9);
        }
        assert!(jpa_gain(3.0).is_err());
    }

    #[test]
    fn calibration_lossless() {
        for eta_db in [15.0, 20.0] {
            let g = calibrate_gain(&ProtocolConfig::ideal(5.0, eta_db)).unwrap();
            assert_abs_diff_eq!(g, eta_db + 10.0 * 4f64.log10(), epsilon = 1e-9);
        }
    }

    #[test]
    fn calibration_compensates_feedforward_loss() {
        let mut cfg = ProtocolConfig::ideal(5.0, 15.0);
        cfg.feedforward_channel.explicit_eps = Some(1.0 - 10f64.powf(-0.1));
        let g = calibrate_gain(&cfg).unwrap();
        assert_abs_diff_eq!(g, 15.0 + 10.0 * 4f64.log10() + 1.0, epsilon = 1e-9);
        let tele = Teleporter::new(&cfg).unwrap();
        assert_abs_diff_eq!(tele.kappa().unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn calibration_fails_without_root() {
        let mut cfg = ProtocolConfig::ideal(5.0, 15.0);
        cfg.feedforward_channel.explicit_eps = Some(0.999);
        assert!(matches!(calibrate_gain(&cfg), Err(Error::NoRoot(_))));
    }

    #[test]
    fn ideal_limits() {
        let quantum = ProtocolConfig::ideal(60.0, 60.0);
        for alpha in [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0), Complex::new(0.0, 3.0)] {
            let r = run_teleportation(&quantum, alpha).unwrap();
            assert!(r.fidelity >= 0.999, "{}", r.fidelity);
        }
        let classical = ProtocolConfig::ideal(0.0, 60.0);
        for alpha in [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0), Complex::new(0.0, 3.0)] {
            let r = run_teleportation(&classical, alpha).unwrap();
            assert_abs_diff_eq!(r.fidelity, 0.5, epsilon = 1e-6);
        }
    }

    #[test]
    fn finite_coupling_leaks_input() {
        // With eta = 15 dB the classical floor sits at 1 / (2 - eta).
        let cfg = ProtocolConfig::ideal(0.0, 15.0);
        let r = run_teleportation(&cfg, Complex::new(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(r.fidelity, 1.0 / (2.0 - cfg.eta()), epsilon = 1e-9);
    }

    #[test]
    fn circuit_is_an_isotropic_gaussian_channel() {
        let mut cfg = ProtocolConfig::ideal(5.0, 15.0);
        cfg.n_dev = 0.05;
        cfg.measurement_n_dev = 0.002;
        cfg.feedforward_channel.explicit_eps = Some(0.1);
        cfg.gain_db = Some(21.0);
        cfg.bob_component_losses.push(ComponentStage {
            eps: 0.05,
            n_env: Some(0.2),
            port: Port::Resource,
        });
        let tele = Teleporter::new(&cfg).unwrap();
        let kappa = tele.kappa().unwrap();
        let vac = tele.run(Complex::new(0.0, 0.0)).unwrap();
        let c = vac.output_state.cov();
        assert_abs_diff_eq!(c[(0, 0)], c[(1, 1)], epsilon = 1e-9);
        assert_abs_diff_eq!(c[(0, 1)], 0.0, epsilon = 1e-9);
        let params = ModelParams {
            kappa,
            zeta: c[(0, 0)] - kappa,
        };
        for (k, n) in [0.01f64, 0.5, 3.0, 20.0].into_iter().enumerate() {
            let alpha = Complex::from_polar(n.sqrt(), 0.7 * k as f64);
            let f = tele.run(alpha).unwrap().fidelity;
            assert_abs_diff_eq!(f, model_fidelity(n, &params).unwrap(), epsilon = 1e-10);
        }
    }

    #[test]
    fn swapping_resource_arms_changes_nothing() {
        let mut cfg = ProtocolConfig::ideal(5.0, 15.0);
        cfg.n_dev = 0.1;
        let tele = Teleporter::new(&cfg).unwrap();
        let swapped = tele.resource.partial_trace(&[1, 0]).unwrap();
        let alpha = Complex::new(0.8, -0.4);
        let a = tele.run(alpha).unwrap().fidelity;
        let b = tele.run_with_resource(swapped, alpha).unwrap().fidelity;
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn temperature_map() {
        let default = TemperatureMap::default();
        assert_eq!(default.eval(0.1), (0.1, 0.1));
        assert_eq!(default.eval(3.0), (0.2, 0.2));
        let map = TemperatureMap {
            breakpoints: vec![
                MapPoint { t_cen: 0.2, t_alice: 0.01, t_bob: 0.02 },
                MapPoint { t_cen: 2.2, t_alice: 0.11, t_bob: 0.04 },
            ],
        };
        assert_eq!(map.eval(0.0), (0.01, 0.02));
        let (a, b) = map.eval(1.2);
        assert_abs_diff_eq!(a, 0.06, epsilon = 1e-12);
        assert_abs_diff_eq!(b, 0.03, epsilon = 1e-12);
        assert_eq!(map.eval(5.0), (0.11, 0.04));
    }

    #[test]
    fn config_validation() {
        let mut cfg = ProtocolConfig::ideal(5.0, 15.0);
        cfg.validate().unwrap();
        cfg.coupler_db = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = ProtocolConfig::ideal(5.0, 15.0);
        cfg.bob_component_losses.push(ComponentStage {
            eps: 0.1,
            n_env: None,
            port: Port::Feedforward,
        });
        assert!(cfg.validate().is_err());
        let mut cfg = ProtocolConfig::ideal(5.0, 15.0);
        cfg.entanglement_channel.explicit_eps = Some(1.0);
        assert!(cfg.validate().is_err());
        let mut cfg = ProtocolConfig::ideal(5.0, 15.0);
        cfg.gain_db = Some(3.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn photon_sweep_phase_independent_at_vacuum() {
        let cfg = ProtocolConfig::ideal(5.0, 15.0);
        let pts = sweep_photon_number(&cfg, &[0.0, 2.0], 16).unwrap();
        assert!(pts[0].stderr < 1e-12);
        assert!(pts[1].fidelity < pts[0].fidelity + 1e-12);
        assert!(sweep_photon_number(&cfg, &[1.0], 0).is_err());
        assert!(sweep_photon_number(&cfg, &[-1.0], 4).is_err());
    }

    #[test]
    fn compression_reduces_high_power_fidelity() {
        let mut cfg = ProtocolConfig::ideal(5.0, 15.0);
        let plain = run_teleportation(&cfg, Complex::new(5.0, 0.0)).unwrap().fidelity;
        cfg.compression_n1db = Some(50.0);
        let squashed = run_teleportation(&cfg, Complex::new(5.0, 0.0)).unwrap().fidelity;
        assert!(squashed < plain);
        let small = run_teleportation(&cfg, Complex::new(0.0, 0.0)).unwrap().fidelity;
        cfg.compression_n1db = None;
        assert_abs_diff_eq!(small, run_teleportation(&cfg, Complex::new(0.0, 0.0)).unwrap().fidelity, epsilon = 1e-12);
    }
}
