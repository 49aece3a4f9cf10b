//! Multimode Gaussian states and the symplectic and channel maps acting on them.
//!
//! Quadratures are ordered `x1, p1, x2, p2, ...` and normalized so that the
//! vacuum covariance is the identity. A coherent state with amplitude `alpha`
//! therefore has mean `(2 Re alpha, 2 Im alpha)` and photon number `|alpha|^2`.
//!
//! States are immutable values; every operation returns a new, re-symmetrized
//! state.

use nalgebra::{Complex, DMatrix, DVector, Matrix2};

use crate::error::{check_range, Error, Result};
use crate::measures;

/// Maximum tolerated asymmetry of a covariance matrix.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Slack allowed below 1 for the smallest symplectic eigenvalue.
pub const PHYSICALITY_TOL: f64 = 1e-9;
/// Tolerance on `S^T Omega S = Omega`.
pub const SYMPLECTIC_TOL: f64 = 1e-9;

/// Standard symplectic form on `n_modes` modes, built from `[[0, 1], [-1, 0]]` blocks.
pub fn omega(n_modes: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        w[(2 * k, 2 * k + 1)] = 1.0;
        w[(2 * k + 1, 2 * k)] = -1.0;
    }
    w
}

fn rotation2(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Symmetric part of a square matrix.
pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Converts a squeezing level in dB to the squeezing parameter `r`.
pub fn db_to_r(db: f64) -> f64 {
    db * std::f64::consts::LN_10 / 20.0
}

/// Converts a squeezing parameter `r` to dB below vacuum.
pub fn r_to_db(r: f64) -> f64 {
    20.0 * r / std::f64::consts::LN_10
}

/// Converts a power ratio in dB to a linear factor.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// A linear symplectic map on a fixed number of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOp {
    pub matrix: DMatrix<f64>,
    pub description: String,
}

impl SymplecticOp {
    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// Single-mode squeezer: the quadrature along angle `phi` gets variance
    /// `exp(-2r)` times its input value, the orthogonal one `exp(2r)`.
    pub fn squeezer(r: f64, phi: f64) -> Self {
        let rot = rotation2(phi);
        let s = rot * Matrix2::new((-r).exp(), 0.0, 0.0, r.exp()) * rot.transpose();
        Self {
            matrix: DMatrix::from_column_slice(2, 2, s.as_slice()),
            description: format!("squeeze(r={r}, phi={phi})"),
        }
    }

    /// Ideal degenerate amplifier: amplitude gain `sqrt(G)` along `phi`,
    /// `1/sqrt(G)` on the orthogonal quadrature.
    pub fn amplifier(gain_db: f64, phi: f64) -> Self {
        let g = db_to_linear(gain_db).sqrt();
        let rot = rotation2(phi);
        let s = rot * Matrix2::new(g, 0.0, 0.0, 1.0 / g) * rot.transpose();
        Self {
            matrix: DMatrix::from_column_slice(2, 2, s.as_slice()),
            description: format!("amplify(G={gain_db} dB, phi={phi})"),
        }
    }

    pub fn rotation(theta: f64) -> Self {
        let rot = rotation2(theta);
        Self {
            matrix: DMatrix::from_column_slice(2, 2, rot.as_slice()),
            description: format!("rotate(theta={theta})"),
        }
    }

    /// Two-mode mixer with power transmissivity `tau`.
    ///
    /// On `(x_i, p_i, x_j, p_j)` this is `[[t I, s R], [-s R^T, t I]]` with
    /// `t = sqrt(tau)`, `s = sqrt(1 - tau)` and `R` a rotation by `phase`.
    pub fn beam_splitter(tau: f64, phase: f64) -> Self {
        let t = tau.sqrt();
        let s = (1.0 - tau).max(0.0).sqrt();
        let rot = rotation2(phase);
        let mut m = DMatrix::zeros(4, 4);
        for a in 0..2 {
            m[(a, a)] = t;
            m[(a + 2, a + 2)] = t;
            for b in 0..2 {
                m[(a, b + 2)] = s * rot[(a, b)];
                m[(a + 2, b)] = -s * rot[(b, a)];
            }
        }
        Self {
            matrix: m,
            description: format!("beam_splitter(tau={tau}, phase={phase})"),
        }
    }

    /// Largest entry of `S^T Omega S - Omega`.
    pub fn symplectic_defect(&self) -> f64 {
        let w = omega(self.n_modes());
        (self.matrix.transpose() * &w * &self.matrix - &w).amax()
    }

    pub fn is_symplectic(&self) -> bool {
        self.matrix.is_square()
            && self.matrix.nrows().is_multiple_of(2)
            && self.symplectic_defect() < SYMPLECTIC_TOL
    }

    /// Lifts the map onto `n_modes` total modes acting on `modes`.
    pub fn embed(&self, modes: &[usize], n_modes: usize) -> DMatrix<f64> {
        let mut full = DMatrix::identity(2 * n_modes, 2 * n_modes);
        for (a, &ma) in modes.iter().enumerate() {
            for (b, &mb) in modes.iter().enumerate() {
                for qa in 0..2 {
                    for qb in 0..2 {
                        full[(2 * ma + qa, 2 * mb + qb)] = self.matrix[(2 * a + qa, 2 * b + qb)];
                    }
                }
            }
        }
        full
    }
}

/// Mean vector and covariance matrix of an n-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Validating constructor: checks shapes, symmetry and the uncertainty
    /// principle.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let state = Self::new_unchecked_physicality(mean, cov)?;
        let nu = state.min_symplectic_eigenvalue()?;
        if nu < 1.0 - PHYSICALITY_TOL {
            return Err(Error::Unphysical(nu));
        }
        Ok(state)
    }

    /// Like [`GaussianState::new`] but only checks shapes and symmetry.
    /// Used for statistical estimates that may be slightly unphysical.
    pub fn new_unchecked_physicality(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "mean vector must have positive even length, got {dim}"
            )));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::Dimension(format!(
                "covariance is {}x{}, expected {dim}x{dim}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Dimension("non-finite entries".into()));
        }
        let asym = max_asymmetry(&cov);
        if asym > SYMMETRY_TOL * cov.amax().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self {
            mean,
            cov: symmetrize(&cov),
        })
    }

    fn from_parts(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        Self {
            mean,
            cov: symmetrize(&cov),
        }
    }

    /// Vacuum on `n_modes` modes.
    ///
    /// # Panics
    /// If `n_modes` is zero.
    pub fn vacuum(n_modes: usize) -> Self {
        assert!(n_modes > 0, "a Gaussian state needs at least one mode");
        Self {
            mean: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    pub fn coherent(alpha: Complex<f64>) -> Self {
        Self {
            mean: DVector::from_vec(vec![2.0 * alpha.re, 2.0 * alpha.im]),
            cov: DMatrix::identity(2, 2),
        }
    }

    /// Single-mode thermal state with mean occupancy `n_occ`.
    pub fn thermal(n_occ: f64) -> Result<Self> {
        check_range("n_occ", n_occ, n_occ >= 0.0, "[0, inf)")?;
        Ok(Self {
            mean: DVector::zeros(2),
            cov: DMatrix::identity(2, 2) * (2.0 * n_occ + 1.0),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.n_modes() {
            Ok(())
        } else {
            Err(Error::InvalidMode {
                index: mode,
                n_modes: self.n_modes(),
            })
        }
    }

    pub fn min_symplectic_eigenvalue(&self) -> Result<f64> {
        let nu = measures::symplectic_eigenvalues(&self.cov)?;
        Ok(nu[0])
    }

    pub fn is_physical(&self) -> bool {
        self.min_symplectic_eigenvalue()
            .map(|nu| nu >= 1.0 - PHYSICALITY_TOL)
            .unwrap_or(false)
    }

    /// Applies a symplectic map to the listed modes (in the map's mode order).
    pub fn apply(&self, op: &SymplecticOp, modes: &[usize]) -> Result<Self> {
        if op.n_modes() != modes.len() {
            return Err(Error::Dimension(format!(
                "{} acts on {} modes, {} given",
                op.description,
                op.n_modes(),
                modes.len()
            )));
        }
        for (k, &m) in modes.iter().enumerate() {
            self.check_mode(m)?;
            if modes[..k].contains(&m) {
                return Err(Error::RepeatedMode(m));
            }
        }
        let s = op.embed(modes, self.n_modes());
        Ok(Self::from_parts(&s * &self.mean, &s * &self.cov * s.transpose()))
    }

    pub fn squeeze(&self, mode: usize, r: f64, phi: f64) -> Result<Self> {
        check_range("r", r, r >= 0.0, "[0, inf)")?;
        self.apply(&SymplecticOp::squeezer(r, phi), &[mode])
    }

    pub fn beam_splitter(&self, mode_i: usize, mode_j: usize, tau: f64, phase: f64) -> Result<Self> {
        check_range("tau", tau, (0.0..=1.0).contains(&tau), "[0, 1]")?;
        self.apply(&SymplecticOp::beam_splitter(tau, phase), &[mode_i, mode_j])
    }

    pub fn phase_rotation(&self, mode: usize, theta: f64) -> Result<Self> {
        self.apply(&SymplecticOp::rotation(theta), &[mode])
    }

    pub fn phase_sensitive_amp(&self, mode: usize, gain_db: f64, axis_phi: f64) -> Result<Self> {
        check_range("gain_db", gain_db, true, "finite")?;
        self.apply(&SymplecticOp::amplifier(gain_db, axis_phi), &[mode])
    }

    pub fn displace(&self, mode: usize, beta: Complex<f64>) -> Result<Self> {
        self.check_mode(mode)?;
        let mut mean = self.mean.clone();
        mean[2 * mode] += 2.0 * beta.re;
        mean[2 * mode + 1] += 2.0 * beta.im;
        Ok(Self {
            mean,
            cov: self.cov.clone(),
        })
    }

    /// Beam-splitter coupling of one mode to a thermal bath: a fraction `eps`
    /// of the power is exchanged with an environment holding `n_env` photons,
    /// so `eps * n_env` photons of noise are added.
    pub fn loss_thermal_channel(&self, mode: usize, eps: f64, n_env: f64) -> Result<Self> {
        self.check_mode(mode)?;
        check_range("eps", eps, (0.0..=1.0).contains(&eps), "[0, 1]")?;
        check_range("n_env", n_env, n_env >= 0.0, "[0, inf)")?;
        let t = (1.0 - eps).sqrt();
        let dim = self.mean.len();
        let mut scale = DVector::from_element(dim, 1.0);
        scale[2 * mode] = t;
        scale[2 * mode + 1] = t;
        let mean = self.mean.component_mul(&scale);
        let mut cov = self.cov.clone();
        for i in 0..dim {
            for j in 0..dim {
                cov[(i, j)] *= scale[i] * scale[j];
            }
        }
        let noise = eps * (2.0 * n_env + 1.0);
        cov[(2 * mode, 2 * mode)] += noise;
        cov[(2 * mode + 1, 2 * mode + 1)] += noise;
        Ok(Self::from_parts(mean, cov))
    }

    /// Product state `self ⊗ other`, with `other`'s modes appended.
    pub fn tensor(&self, other: &GaussianState) -> Self {
        let (da, db) = (self.mean.len(), other.mean.len());
        let mut mean = DVector::zeros(da + db);
        mean.rows_mut(0, da).copy_from(&self.mean);
        mean.rows_mut(da, db).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(da + db, da + db);
        cov.view_mut((0, 0), (da, da)).copy_from(&self.cov);
        cov.view_mut((da, da), (db, db)).copy_from(&other.cov);
        Self { mean, cov }
    }

    /// Reduced state on `keep`, in the listed order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::Dimension("partial trace must keep at least one mode".into()));
        }
        for (k, &m) in keep.iter().enumerate() {
            self.check_mode(m)?;
            if keep[..k].contains(&m) {
                return Err(Error::RepeatedMode(m));
            }
        }
        let idx: Vec<usize> = keep.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let mean = DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.mean[i]));
        let cov = DMatrix::from_fn(idx.len(), idx.len(), |a, b| self.cov[(idx[a], idx[b])]);
        Ok(Self { mean, cov })
    }

    /// Mean photon number of one mode.
    pub fn photon_number(&self, mode: usize) -> Result<f64> {
        self.check_mode(mode)?;
        let (x, p) = (self.mean[2 * mode], self.mean[2 * mode + 1]);
        let tr = self.cov[(2 * mode, 2 * mode)] + self.cov[(2 * mode + 1, 2 * mode + 1)];
        Ok((x * x + p * p + tr - 2.0) / 4.0)
    }

    pub fn total_photon_number(&self) -> f64 {
        (0..self.n_modes())
            .map(|m| self.photon_number(m).unwrap_or(0.0))
            .sum()
    }

    /// Coherent amplitude `alpha` of one mode's mean.
    pub fn amplitude(&self, mode: usize) -> Result<Complex<f64>> {
        self.check_mode(mode)?;
        Ok(Complex::new(self.mean[2 * mode] / 2.0, self.mean[2 * mode + 1] / 2.0))
    }
}
