use cvtele::protocol::{build_tms, JpaNoise};
use cvtele::tomography::{
    compute_moments, reconstruct_gaussian, sample_moments, sample_state, Verdict, DEFAULT_BATCHES,
};
use cvtele::{Complex, GaussianState};

#[test]
fn vacuum_and_coherent_moments() {
    let n = 1_000_000;
    let vac = sample_moments(&GaussianState::vacuum(1), n, 5, 4, DEFAULT_BATCHES).unwrap();
    let rec = reconstruct_gaussian(&vac).unwrap();
    let tol = 3.0 * (2.0 / n as f64).sqrt();
    assert!((rec.state_estimate.cov() - GaussianState::vacuum(1).cov()).amax() < tol);
    let x4 = vac.pooled()[vac.index_of(&[4, 0]).unwrap()];
    assert!((x4 - 3.0).abs() < 0.03, "{x4}");
    assert_eq!(rec.gaussianity.as_ref().unwrap().verdict, Verdict::Pass);

    let coh = sample_moments(&GaussianState::coherent(Complex::new(2.0, 0.0)), n, 6, 2, DEFAULT_BATCHES).unwrap();
    let m = reconstruct_gaussian(&coh).unwrap().state_estimate.mean().clone();
    assert!((m[0] - 4.0).abs() < 0.01 && m[1].abs() < 0.01);
}

fn rms_cov_error(state: &GaussianState, n: usize, seeds: std::ops::Range<u64>) -> (f64, f64) {
    let (mut err2, mut se, mut count) = (0.0, 0.0, 0);
    let len = seeds.end - seeds.start;
    for seed in seeds {
        let rec = reconstruct_gaussian(&sample_moments(state, n, seed, 2, DEFAULT_BATCHES).unwrap()).unwrap();
        let d = rec.state_estimate.cov() - state.cov();
        err2 += d.iter().map(|x| x * x).sum::<f64>();
        count += d.len();
        se += rec.cov_stderr[(0, 0)];
    }
    ((err2 / count as f64).sqrt(), se / len as f64)
}

#[test]
fn errors_shrink_as_one_over_root_n() {
    let tms = build_tms(5.0, JpaNoise::NOISELESS).unwrap();
    let (err_small, se_small) = rms_cov_error(&tms, 100_000, 100..120);
    let (err_large, se_large) = rms_cov_error(&tms, 200_000, 200..220);
    let sqrt2 = 2f64.sqrt();
    let err_ratio = err_small / err_large;
    let se_ratio = se_small / se_large;
    assert!(err_ratio > sqrt2 / 1.3 && err_ratio < sqrt2 * 1.3, "{err_ratio}");
    assert!(se_ratio > sqrt2 / 1.3 && se_ratio < sqrt2 * 1.3, "{se_ratio}");
    // Jackknife errors track the actual spread.
    assert!(se_small / err_small > 0.5 && se_small / err_small < 2.0);
}

#[test]
fn sampled_negativity_matches_exact() {
    let tms = build_tms(5.0, JpaNoise::NOISELESS).unwrap();
    let samples = sample_state(&tms, 400_000, 77).unwrap();
    let moments = compute_moments(&samples, 2, DEFAULT_BATCHES).unwrap();
    let rec = reconstruct_gaussian(&moments).unwrap();
    let (n, se) = rec.negativity(&moments).unwrap();
    let exact = cvtele::measures::negativity(&tms).unwrap();
    assert!((n - exact).abs() < 4.0 * se, "{n} +- {se} vs {exact}");
    assert!(rec.physical_within_errors);
}
