use cvtele::effective_model::{model_fidelity, ModelParams};
use cvtele::measures::negativity;
use cvtele::protocol::{distributed_tms, sweep_photon_number, sweep_temperature, ProtocolConfig, Teleporter};
use cvtele::tomography::{gaussianity_test, sample_moments, Verdict, DEFAULT_BATCHES, DEFAULT_THRESHOLD};
use cvtele::Complex;

#[test]
fn paper_calibrated_circuit_has_fitted_parameters() {
    let tele = Teleporter::new(&ProtocolConfig::paper_calibrated()).unwrap();
    let kappa = tele.kappa().unwrap();
    let f0 = tele.run(Complex::new(0.0, 0.0)).unwrap().fidelity;
    assert!((kappa - 0.778).abs() < 1e-6, "{kappa}");
    assert!((2.0 / f0 - kappa - 1.0 - 1.015).abs() < 1e-6);
    let params = ModelParams::new(kappa, 2.0 / f0 - kappa - 1.0).unwrap();
    for n in [0.5, 5.0, 50.0] {
        let f = tele.run(Complex::from_polar(f64::sqrt(n), 0.7)).unwrap().fidelity;
        assert!((f - model_fidelity(n, &params).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn temperature_sweep_is_consistent_and_monotone() {
    let config = ProtocolConfig::paper_calibrated();
    let temps: Vec<f64> = (0..=20).map(|i| 0.17 + (4.0 - 0.17) * i as f64 / 20.0).collect();
    let rows = sweep_temperature(&config, &temps, 1.0).unwrap();
    let photon = sweep_photon_number(&config, &[1.0], 8).unwrap();
    assert!((rows[0].fidelity - photon[0].fidelity).abs() < 1e-9);
    for w in rows.windows(2) {
        assert!(w[1].negativity <= w[0].negativity + 1e-12);
        assert!(w[1].n_th >= w[0].n_th);
    }
    let hot = rows.last().unwrap();
    assert!((hot.n_th - 0.0208).abs() < 1e-3);
    assert!(hot.negativity > 0.0);
}

#[test]
fn distributed_resource_stays_entangled_when_hot() {
    let cold = distributed_tms(&ProtocolConfig::paper_calibrated()).unwrap();
    let hot = distributed_tms(&ProtocolConfig::paper_calibrated().at_temperature(4.0)).unwrap();
    let (n_cold, n_hot) = (negativity(&cold).unwrap(), negativity(&hot).unwrap());
    assert!(n_hot > 0.0 && n_hot < n_cold);
}

#[test]
fn classical_sweep_sits_at_one_half() {
    let rows = sweep_photon_number(&ProtocolConfig::ideal(0.0, 60.0), &[0.01, 1.0, 30.0], 4).unwrap();
    for r in rows {
        assert!((r.fidelity - 0.5).abs() < 1e-6);
    }
}

#[test]
fn teleported_state_samples_look_gaussian() {
    let tele = Teleporter::new(&ProtocolConfig::paper_calibrated()).unwrap();
    let out = tele.run(Complex::new(1.5, -0.5)).unwrap().output_state;
    let moments = sample_moments(&out, 1_000_000, 11, 4, DEFAULT_BATCHES).unwrap();
    let report = gaussianity_test(&moments, DEFAULT_THRESHOLD).unwrap();
    assert_eq!(report.verdict, Verdict::Pass, "max |z| = {}", report.max_abs_z);
}
