use std::path::{Path, PathBuf};

use cvtele::effective_model::{
    fit_model, fit_with_fixed_squeezing, DecompositionFit, FitPoint, FitResult, ModelParams, F_CLASSICAL,
    F_NO_CLONING,
};
use cvtele::hybrid_qubit::{
    average_qubit_fidelity, fidelity_excited, fidelity_ground, predict_vs_temperature, QubitPrediction,
    TemperatureFit,
};
use cvtele::protocol::{build_tms, distributed_tms, sweep_photon_number, sweep_temperature, JpaNoise, Teleporter};
use cvtele::tomography::{
    compute_moments, gaussianity_test, reconstruct_gaussian, sample_moments, sample_state, GaussianityReport,
    MomentSet,
};
use cvtele::{Complex, DMatrix, GaussianState};
use serde::Serialize;

use crate::config::{ExperimentConfig, StateSpec};
use crate::error::CliError;
use crate::output::{fmt_float, write_json, CsvOut};

pub struct Context {
    pub config: ExperimentConfig,
    /// Directory of the config file, for relative paths.
    pub base: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
}

pub fn sweep_photon(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let protocol = ctx.config.protocol()?;
    let sweep = ctx.config.sweep()?;
    if sweep.n_in.is_empty() {
        return Err(CliError::Schema("sweep.n_in is empty".into()));
    }
    let points = sweep_photon_number(protocol, &sweep.n_in, sweep.n_phases)?;
    let mut csv = CsvOut::create(&ctx.out, "sweep_photon.csv", &["n_in", "fidelity", "stderr", "f_cl", "f_nc"])?;
    for p in points {
        csv.floats(&[p.n_in, p.fidelity, p.stderr, F_CLASSICAL, F_NO_CLONING])?;
    }
    Ok(vec![csv.finish()?])
}

pub fn sweep_temp(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let protocol = ctx.config.protocol()?;
    let sweep = ctx.config.sweep()?;
    if sweep.t_cen.is_empty() {
        return Err(CliError::Schema("sweep.t_cen is empty".into()));
    }
    let rows = sweep_temperature(protocol, &sweep.t_cen, sweep.temperature_n_in)?;
    let mut csv = CsvOut::create(
        &ctx.out,
        "sweep_temperature.csv",
        &["t_cen", "fidelity", "negativity", "purity", "n_env", "n_th"],
    )?;
    for r in rows {
        csv.floats(&[r.t_cen, r.fidelity, r.negativity, r.purity, r.n_env, r.n_th])?;
    }
    Ok(vec![csv.finish()?])
}

fn parse_field(value: &str, column: &str, line: u64) -> Result<f64, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Schema(format!("line {line}: `{value}` in column {column} is not a number")))
}

/// Reads `n_in,fidelity[,sigma]`.
pub fn read_fit_data(path: &Path) -> Result<Vec<FitPoint>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::io(path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_owned)
        .collect();
    let weighted = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["n_in", "fidelity"] => false,
        ["n_in", "fidelity", "sigma"] => true,
        _ => {
            return Err(CliError::Schema(format!(
                "{}: header must be `n_in,fidelity` or `n_in,fidelity,sigma`, found `{}`",
                path.display(),
                header.join(",")
            )))
        }
    };
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        let n_in = parse_field(&record[0], "n_in", line)?;
        let fidelity = parse_field(&record[1], "fidelity", line)?;
        points.push(if weighted {
            FitPoint {
                n_in,
                fidelity,
                sigma: parse_field(&record[2], "sigma", line)?,
            }
        } else {
            FitPoint::unweighted(n_in, fidelity)
        });
    }
    Ok(points)
}

#[derive(Serialize)]
struct QubitFidelities {
    ground: f64,
    excited: f64,
    average: f64,
}

impl QubitFidelities {
    fn of(p: &ModelParams) -> Result<Self, CliError> {
        Ok(Self {
            ground: fidelity_ground(p.kappa, p.zeta)?,
            excited: fidelity_excited(p.kappa, p.zeta)?,
            average: average_qubit_fidelity(p.kappa, p.zeta)?,
        })
    }
}

#[derive(Serialize)]
struct FitReport {
    data: String,
    fit: FitResult,
    implied_attenuation_db: f64,
    qubit: QubitFidelities,
    #[serde(skip_serializing_if = "Option::is_none")]
    decomposition: Option<DecompositionFit>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    qubit_predictions: Vec<QubitPrediction>,
}

pub fn fit(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let section = ctx.config.fit()?;
    let data = read_fit_data(&ctx.base.join(&section.data))?;
    let result = fit_model(&data)?;
    let decomposition = section
        .s_tms_db
        .map(|s| fit_with_fixed_squeezing(&data, s))
        .transpose()?;
    let mut predictions = Vec::new();
    if !section.predict_s_db.is_empty() {
        let fitted_s = section
            .s_tms_db
            .ok_or_else(|| CliError::Schema("fit.predict_s_db needs fit.s_tms_db".into()))?;
        let t_cen = ctx.config.protocol.as_ref().map_or(0.0, |p| p.t_cen());
        let fits = [TemperatureFit { t_cen, params: result.params }];
        for &target in &section.predict_s_db {
            predictions.extend(predict_vs_temperature(&fits, fitted_s, target)?);
        }
    }
    let report = FitReport {
        data: section.data.display().to_string(),
        implied_attenuation_db: result.params.implied_attenuation_db(),
        qubit: QubitFidelities::of(&result.params)?,
        fit: result,
        decomposition,
        qubit_predictions: predictions,
    };
    Ok(vec![write_json(&ctx.out, "fit_report.json", &report)?])
}

pub fn qubit_predict(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let section = ctx.config.qubit()?;
    if section.fits.is_empty() || section.target_s_db.is_empty() {
        return Err(CliError::Schema("qubit.fits and qubit.target_s_db must be non-empty".into()));
    }
    let fits = section
        .fits
        .iter()
        .map(|f| {
            Ok(TemperatureFit {
                t_cen: f.t_cen,
                params: ModelParams::new(f.kappa, f.zeta)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut csv = CsvOut::create(
        &ctx.out,
        "qubit_predictions.csv",
        &["t_cen", "s_tms_db", "kappa", "zeta", "fidelity_ground", "fidelity_excited", "average_fidelity"],
    )?;
    for &target in &section.target_s_db {
        for p in predict_vs_temperature(&fits, section.fitted_s_db, target)? {
            csv.floats(&[
                p.t_cen,
                p.s_tms_db,
                p.kappa,
                p.zeta,
                p.fidelity_ground,
                p.fidelity_excited,
                p.average_fidelity,
            ])?;
        }
    }
    Ok(vec![csv.finish()?])
}

fn build_state(ctx: &Context, spec: &StateSpec) -> Result<GaussianState, CliError> {
    Ok(match *spec {
        StateSpec::Vacuum { modes } => {
            if modes == 0 {
                return Err(CliError::Schema("tomography.state.modes must be positive".into()));
            }
            GaussianState::vacuum(modes)
        }
        StateSpec::Coherent { re, im } => GaussianState::coherent(Complex::new(re, im)),
        StateSpec::Thermal { n } => GaussianState::thermal(n)?,
        StateSpec::Tms { s_db } => build_tms(s_db, JpaNoise::NOISELESS)?,
        StateSpec::Distributed => distributed_tms(ctx.config.protocol()?)?,
        StateSpec::Teleported { n_in, phase } => {
            if !(n_in >= 0.0) {
                return Err(CliError::Schema("tomography.state.n_in must be non-negative".into()));
            }
            let tele = Teleporter::new(ctx.config.protocol()?)?;
            tele.run(Complex::from_polar(n_in.sqrt(), phase))?.output_state
        }
    })
}

fn quadrature_names(n_vars: usize) -> Vec<String> {
    (0..n_vars)
        .map(|i| format!("{}{}", if i % 2 == 0 { "x" } else { "p" }, i / 2 + 1))
        .collect()
}

fn write_moments(dir: &Path, moments: &MomentSet) -> Result<PathBuf, CliError> {
    let mut header = vec!["index".to_string(), "exponents".into(), "pooled".into()];
    header.extend((0..moments.n_batches()).map(|b| format!("batch_{b}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = CsvOut::create(dir, "moments.csv", &header)?;
    let pooled = moments.pooled();
    for (m, exps) in moments.exponents.iter().enumerate() {
        let mut row = vec![
            m.to_string(),
            exps.iter().map(u8::to_string).collect::<Vec<_>>().join(" "),
            fmt_float(pooled[m]),
        ];
        row.extend(moments.batch_moments.iter().map(|b| fmt_float(b[m])));
        csv.row(&row)?;
    }
    let sizes: Vec<String> = ["sizes".to_string(), String::new(), moments.n_samples().to_string()]
        .into_iter()
        .chain(moments.batch_sizes.iter().map(usize::to_string))
        .collect();
    csv.row(&sizes)?;
    csv.finish()
}

#[derive(Serialize)]
struct TomographyReport<'a> {
    state: &'a StateSpec,
    seed: u64,
    n_samples: usize,
    n_batches: usize,
    max_order: usize,
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
    mean_stderr: Vec<f64>,
    cov_stderr: Vec<Vec<f64>>,
    exact_mean: Vec<f64>,
    exact_cov: Vec<Vec<f64>>,
    min_symplectic_eig: [f64; 2],
    physical_within_errors: bool,
    purity: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    negativity: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gaussianity: Option<GaussianityReport>,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn tomography(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let section = ctx.config.tomography()?;
    let state = build_state(ctx, &section.state)?;
    let mut written = Vec::new();
    let moments = if section.write_samples {
        let samples = sample_state(&state, section.n_samples, ctx.seed)?;
        let names = quadrature_names(samples.n_vars());
        let header: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut csv = CsvOut::create(&ctx.out, "samples.csv", &header)?;
        for row in samples.rows() {
            csv.floats(row)?;
        }
        written.push(csv.finish()?);
        compute_moments(&samples, section.max_order, section.n_batches)?
    } else {
        sample_moments(&state, section.n_samples, ctx.seed, section.max_order, section.n_batches)?
    };
    let rec = reconstruct_gaussian(&moments)?;
    let gaussianity = if section.max_order >= 3 {
        Some(gaussianity_test(&moments, section.threshold)?)
    } else {
        None
    };
    let negativity = if state.n_modes() == 2 {
        let (v, e) = rec.negativity(&moments)?;
        Some([v, e])
    } else {
        None
    };
    let (pv, pe) = rec.purity(&moments)?;
    let report = TomographyReport {
        state: &section.state,
        seed: ctx.seed,
        n_samples: moments.n_samples(),
        n_batches: moments.n_batches(),
        max_order: moments.max_order,
        mean: rec.state_estimate.mean().iter().copied().collect(),
        cov: rows(rec.state_estimate.cov()),
        mean_stderr: rec.mean_stderr.iter().copied().collect(),
        cov_stderr: rows(&rec.cov_stderr),
        exact_mean: state.mean().iter().copied().collect(),
        exact_cov: rows(state.cov()),
        min_symplectic_eig: [rec.min_symplectic_eig.0, rec.min_symplectic_eig.1],
        physical_within_errors: rec.physical_within_errors,
        purity: [pv, pe],
        negativity,
        gaussianity,
    };
    written.push(write_moments(&ctx.out, &moments)?);
    written.push(write_json(&ctx.out, "tomography_report.json", &report)?);
    Ok(written)
}
