//! Ordered Hermitian eigendecompositions with a fixed phase convention.
//!
//! Eigenvalues come back non-increasing and each eigenvector column has its
//! largest-modulus entry rotated onto the positive real axis (lowest row wins
//! ties), so two calls on the same matrix agree bit for bit and bases of
//! isomorphic Gram matrices differ only by the phases the alignment step
//! solves for.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{dims_mismatch, Error, Result};
use crate::tensor::{CMat, C64};

/// Default relative backward-error budget `‖GV − VΛ‖_F / ‖G‖_F`.
pub const TAU_EIG: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-10;
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
    /// Smallest adjacent gap; `+∞` for a 1×1 matrix. Gaps below the solver's
    /// resolution (`16·n·ε_mach·max|λ|`) are reported as exactly zero.
    pub min_gap: f64,
    pub simple: bool,
    /// Relative residual `‖GV − VΛ‖_F / ‖G‖_F`.
    pub backward_error: f64,
}

impl SpectralData {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.eigenvalues.windows(2).map(|w| w[0] - w[1]).collect()
    }

    pub fn digest(&self) -> SpectralDigest {
        SpectralDigest {
            eigenvalues: self.eigenvalues.clone(),
            min_gap: self.min_gap.is_finite().then_some(self.min_gap),
            simple: self.simple,
            backward_error: self.backward_error,
        }
    }
}

/// JSON view of a decomposition, without the eigenvectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralDigest {
    pub eigenvalues: Vec<f64>,
    pub min_gap: Option<f64>,
    pub simple: bool,
    pub backward_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMode {
    StrictSimple,
    Threshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapPolicy {
    pub delta_min: f64,
    pub mode: GapMode,
}

impl GapPolicy {
    pub fn strict() -> Self {
        Self {
            delta_min: 0.0,
            mode: GapMode::StrictSimple,
        }
    }

    pub fn threshold(delta_min: f64) -> Self {
        Self {
            delta_min: delta_min.max(0.0),
            mode: GapMode::Threshold,
        }
    }
}

impl Default for GapPolicy {
    fn default() -> Self {
        Self::strict()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapCheck {
    Pass,
    Fail(f64),
}

impl GapCheck {
    pub fn passed(self) -> bool {
        matches!(self, GapCheck::Pass)
    }
}

pub fn eig_hermitian(g: &CMat) -> Result<SpectralData> {
    if !g.is_square() {
        return Err(dims_mismatch("square matrix", g.shape()));
    }
    let n = g.nrows();
    let norm = g.norm();
    if norm > 0.0 {
        let deviation = (g - g.adjoint()).norm() / norm;
        if deviation > HERMITIAN_TOL {
            return Err(Error::NonHermitianInput {
                deviation,
                tolerance: HERMITIAN_TOL,
            });
        }
    }
    let h = (g + g.adjoint()) * C64::new(0.5, 0.0);
    let max_iter = 1000 * n.max(1);

    let (values, vectors): (Vec<f64>, CMat) = if h.iter().all(|z| z.im == 0.0) {
        let real = DMatrix::<f64>::from_fn(n, n, |r, c| h[(r, c)].re);
        let eig = SymmetricEigen::try_new(real, f64::EPSILON, max_iter)
            .ok_or(Error::ConvergenceFailure(n))?;
        (
            eig.eigenvalues.iter().copied().collect(),
            eig.eigenvectors.map(|x| C64::new(x, 0.0)),
        )
    } else {
        let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, max_iter)
            .ok_or(Error::ConvergenceFailure(n))?;
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut eigenvectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = vectors.column(src).clone_owned();
        fix_phase(col.as_mut_slice());
        eigenvectors.set_column(dst, &col);
    }

    let scale = eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let resolution = 16.0 * n as f64 * f64::EPSILON * scale;
    let min_gap = eigenvalues
        .windows(2)
        .map(|w| {
            let gap = w[0] - w[1];
            if gap <= resolution {
                0.0
            } else {
                gap
            }
        })
        .fold(f64::INFINITY, f64::min);

    let lambda = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        eigenvalues.iter().map(|&x| C64::new(x, 0.0)),
    ));
    let hnorm = h.norm();
    let backward_error = if hnorm > 0.0 {
        (&h * &eigenvectors - &eigenvectors * lambda).norm() / hnorm
    } else {
        0.0
    };
    if backward_error > TAU_EIG {
        return Err(Error::ConvergenceFailure(n));
    }

    Ok(SpectralData {
        eigenvalues,
        eigenvectors,
        simple: min_gap > 0.0,
        min_gap,
        backward_error,
    })
}

/// Rotates the column so its largest-modulus entry is real and positive.
fn fix_phase(col: &mut [C64]) {
    let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = col
        .iter()
        .position(|z| z.norm() >= max * (1.0 - TIE_TOL))
        .expect("a maximal entry exists");
    let z = col[pivot];
    let phase = z.conj() / z.norm();
    for x in col.iter_mut() {
        *x *= phase;
    }
    col[pivot] = C64::new(col[pivot].norm(), 0.0);
}

/// `max_i |λ_i(A) − λ_i(B)| ≤ tol` on the sorted sequences.
pub fn spectra_close(sa: &SpectralData, sb: &SpectralData, tol: f64) -> Result<bool> {
    Ok(max_eigenvalue_deviation(&sa.eigenvalues, &sb.eigenvalues)? <= tol)
}

pub fn max_eigenvalue_deviation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(dims_mismatch(a.len(), b.len()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// ℓ² distance between two sorted spectra.
pub fn sorted_spectrum_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(dims_mismatch(a.len(), b.len()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
}

pub fn min_gap_check(s: &SpectralData, policy: &GapPolicy) -> GapCheck {
    let gap = if s.min_gap.is_finite() { s.min_gap } else { f64::INFINITY };
    let ok = match policy.mode {
        GapMode::StrictSimple => s.simple,
        GapMode::Threshold => s.simple && gap >= policy.delta_min,
    };
    if ok {
        GapCheck::Pass
    } else {
        GapCheck::Fail(gap)
    }
}

/// Certified bound on how far the sorted spectra of two Hermitian matrices can
/// be apart: `min(‖G − G'‖_F, n · max_ij |G_ij − G'_ij|)`.
pub fn weyl_perturbation_bound(g: &CMat, gp: &CMat) -> Result<f64> {
    if g.shape() != gp.shape() {
        return Err(dims_mismatch(g.shape(), gp.shape()));
    }
    if !g.is_square() {
        return Err(dims_mismatch("square matrix", g.shape()));
    }
    let diff = g - gp;
    let max_entry = diff.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(diff.norm().min(g.nrows() as f64 * max_entry))
}
