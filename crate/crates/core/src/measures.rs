//! Entanglement, purity, squeezing and fidelity diagnostics.

use nalgebra::{Complex, DMatrix, Matrix2, SymmetricEigen, Vector2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{max_asymmetry, omega, GaussianState, PHYSICALITY_TOL, SYMMETRY_TOL};

/// Negativity, purity and squeezing of a two-mode state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoModeDiagnostics {
    pub negativity: f64,
    pub purity: f64,
    pub squeezing_db: [f64; 2],
    pub min_ptranspose_eig: f64,
}

/// Symplectic spectrum of a positive-definite covariance matrix, ascending.
///
/// Computed from the symmetric matrix `V^{1/2} Omega V Omega^T V^{1/2}`, whose
/// eigenvalues are the squared symplectic eigenvalues, each twice.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = cov.nrows();
    if dim == 0 || !dim.is_multiple_of(2) || cov.ncols() != dim {
        return Err(Error::Dimension(format!(
            "covariance must be square with even dimension, got {}x{}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    let asym = max_asymmetry(cov);
    if asym > SYMMETRY_TOL * cov.amax().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let eig = SymmetricEigen::new(cov.clone());
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::NotPositiveDefinite);
    }
    let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let root = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.transpose();
    let w = omega(dim / 2);
    let a = &root * &w * &root;
    let m = &a * a.transpose();
    let m = (&m + m.transpose()) * 0.5;
    let mut sq: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    sq.sort_by(|x, y| x.total_cmp(y));
    Ok(sq.chunks(2).map(|pair| pair[0].max(0.0).sqrt()).collect())
}

fn require_modes(state: &GaussianState, expected: usize) -> Result<()> {
    if state.n_modes() == expected {
        Ok(())
    } else {
        Err(Error::ModeCount {
            expected,
            actual: state.n_modes(),
        })
    }
}

/// Smallest symplectic eigenvalue of the partially transposed covariance
/// (sign of `p2` flipped).
pub fn min_ptranspose_eigenvalue(state: &GaussianState) -> Result<f64> {
    require_modes(state, 2)?;
    let mut pt = state.cov().clone();
    for k in 0..4 {
        if k != 3 {
            pt[(k, 3)] = -pt[(k, 3)];
            pt[(3, k)] = -pt[(3, k)];
        }
    }
    Ok(symplectic_eigenvalues(&pt)?[0])
}

/// PPT negativity `max(0, (1 - nu) / (2 nu))` of a two-mode state.
pub fn negativity(state: &GaussianState) -> Result<f64> {
    let nu = min_ptranspose_eigenvalue(state)?;
    if nu >= 1.0 - PHYSICALITY_TOL {
        return Ok(0.0);
    }
    Ok((1.0 - nu) / (2.0 * nu))
}

/// `Tr rho^2 = 1 / sqrt(det V)`.
pub fn purity(state: &GaussianState) -> Result<f64> {
    let det = state.cov().determinant();
    if !(det > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(1.0 / det.sqrt())
}

fn mode_block(state: &GaussianState, mode: usize) -> Result<Matrix2<f64>> {
    let red = state.partial_trace(&[mode])?;
    let c = red.cov();
    Ok(Matrix2::new(c[(0, 0)], c[(0, 1)], c[(1, 0)], c[(1, 1)]))
}

/// Squeezing of one mode in dB below vacuum; negative when every quadrature is
/// above the vacuum level.
pub fn squeezing_db(state: &GaussianState, mode: usize) -> Result<f64> {
    let block = mode_block(state, mode)?;
    let min = block.symmetric_eigenvalues().min();
    if !(min > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(-10.0 * min.log10())
}

/// Overlap of a single-mode Gaussian state with the coherent state `target`.
pub fn fidelity_to_coherent(target: Complex<f64>, state: &GaussianState) -> Result<f64> {
    require_modes(state, 1)?;
    let c = state.cov();
    let y = Matrix2::new(c[(0, 0)] + 1.0, c[(0, 1)], c[(1, 0)], c[(1, 1)] + 1.0);
    let det = y.determinant();
    let inv = y
        .try_inverse()
        .filter(|_| det > 0.0)
        .ok_or(Error::NotPositiveDefinite)?;
    let m = state.mean();
    let delta = Vector2::new(m[0] - 2.0 * target.re, m[1] - 2.0 * target.im);
    let quad = (delta.transpose() * inv * delta)[(0, 0)];
    Ok((2.0 * (-0.5 * quad).exp() / det.sqrt()).min(1.0))
}

pub fn two_mode_diagnostics(state: &GaussianState) -> Result<TwoModeDiagnostics> {
    let nu = min_ptranspose_eigenvalue(state)?;
    Ok(TwoModeDiagnostics {
        negativity: negativity(state)?,
        purity: purity(state)?,
        squeezing_db: [squeezing_db(state, 0)?, squeezing_db(state, 1)?],
        min_ptranspose_eig: nu,
    })
}
