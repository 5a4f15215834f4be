//! HOSVD core tensors and their entrywise comparison.
//!
//! For `A` with mode Gram decompositions `G_d(A) = U_d Λ_d U_d^*`, the core is
//! `S_A = (U_1^*, U_2^*, U_3^*) ↷ A`. When all three spectra are simple, two
//! tensors lie in the same orbit exactly when their cores differ by a
//! diagonal phase triple, which is what [`compare_cores`] sets up.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{dims_mismatch, Error, Result};
use crate::spectral::{eig_hermitian, min_gap_check, GapCheck, GapPolicy, SpectralData};
use crate::tensor::{apply_action, gram, Mode, Tensor3, TransformTriple};

#[derive(Debug, Clone)]
pub struct CoreTensor {
    pub core: Tensor3,
    /// The eigenbases `(U_1, U_2, U_3)`, not their adjoints.
    pub bases: TransformTriple,
    pub source_norm: f64,
    pub spectra: [SpectralData; 3],
}

/// Decomposes all three Gram matrices of `a`.
pub fn mode_spectra(a: &Tensor3) -> Result<[SpectralData; 3]> {
    let [s1, s2, s3] = Mode::ALL.map(|mode| eig_hermitian(&gram(a, mode)));
    Ok([s1?, s2?, s3?])
}

pub fn core_of(a: &Tensor3, policy: &GapPolicy) -> Result<CoreTensor> {
    core_from_spectra(a, mode_spectra(a)?, policy)
}

/// Builds the core from precomputed spectra; fails with
/// [`Error::CannotDecide`] on the first mode whose spectrum violates `policy`.
pub fn core_from_spectra(
    a: &Tensor3,
    spectra: [SpectralData; 3],
    policy: &GapPolicy,
) -> Result<CoreTensor> {
    for (mode, s) in Mode::ALL.iter().zip(&spectra) {
        if let GapCheck::Fail(gap) = min_gap_check(s, policy) {
            return Err(Error::CannotDecide {
                mode: mode.number(),
                gap,
            });
        }
    }
    let bases = TransformTriple::new(
        spectra[0].eigenvectors.clone(),
        spectra[1].eigenvectors.clone(),
        spectra[2].eigenvectors.clone(),
        a.kind(),
    )?;
    let core = apply_action(&bases.adjoint(), a)?;
    Ok(CoreTensor {
        core,
        bases,
        source_norm: a.frobenius_norm(),
        spectra,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseTarget {
    /// `arg(S_B / S_A)` in `[0, 2π)`.
    pub phi: f64,
    /// Admissible circular deviation, in `[0, π]`.
    pub slack: f64,
    /// `|S_A| · |S_B|`, used to rank constraints.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoreComparison {
    pub dims: [usize; 3],
    pub support_ok: bool,
    pub modulus_ok: bool,
    pub phase_targets: BTreeMap<(usize, usize, usize), PhaseTarget>,
    pub threshold_used: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseTargetEntry {
    pub index: [usize; 3],
    #[serde(flatten)]
    pub target: PhaseTarget,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoreComparisonJson {
    pub dims: [usize; 3],
    pub support_ok: bool,
    pub modulus_ok: bool,
    pub threshold_used: f64,
    pub radius: f64,
    pub phase_targets: Vec<PhaseTargetEntry>,
}

impl CoreComparison {
    pub fn to_json(&self) -> CoreComparisonJson {
        CoreComparisonJson {
            dims: self.dims,
            support_ok: self.support_ok,
            modulus_ok: self.modulus_ok,
            threshold_used: self.threshold_used,
            radius: self.radius,
            phase_targets: self
                .phase_targets
                .iter()
                .map(|(&(i, j, k), &target)| PhaseTargetEntry {
                    index: [i, j, k],
                    target,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoreOutcome {
    Compared(CoreComparison),
    /// Some entry's moduli differ by more than the threshold.
    RejectFar {
        index: (usize, usize, usize),
        modulus_gap: f64,
        threshold: f64,
    },
}

/// Threshold `2·ε·n²·K/δ` with `K = ‖A‖_F + ‖B‖_F` and `n` the largest
/// dimension.
pub fn gapped_threshold(dims: [usize; 3], eps: f64, delta: f64, norm_sum: f64) -> f64 {
    let n = dims.into_iter().max().unwrap_or(1) as f64;
    2.0 * eps * n * n * norm_sum / delta
}

/// Step-3 comparison of the gapped procedure: moduli must agree within
/// `t = 2εn²K/δ`; entries with `|S_A| + |S_B| > t` receive phase targets
/// whose slack is the arccos bound with radius² `2ε²n⁴K²/δ²`.
pub fn compare_cores(sa: &CoreTensor, sb: &CoreTensor, eps: f64, delta: f64) -> Result<CoreOutcome> {
    if !(eps > 0.0 && delta > 0.0) {
        return Err(Error::ConfigInvalid(format!(
            "eps and delta must be positive (eps = {eps}, delta = {delta})"
        )));
    }
    let t = gapped_threshold(sa.core.dims(), eps, delta, sa.source_norm + sb.source_norm);
    compare_cores_with(&sa.core, &sb.core, t, t / std::f64::consts::SQRT_2)
}

/// `arccos((a² + b² − r²) / (2ab))` evaluated through the half-angle form
/// `2·asin(√((r − d)(r + d) / (4ab)))`, `d = a − b`, which keeps full relative
/// accuracy when `r ≪ a, b`.
fn slack_angle(ma: f64, mb: f64, radius: f64) -> f64 {
    let d = ma - mb;
    let num = (radius - d) * (radius + d);
    if num <= 0.0 {
        return 0.0;
    }
    let s = (num / (4.0 * ma * mb)).sqrt();
    if s >= 1.0 {
        std::f64::consts::PI
    } else {
        2.0 * s.asin()
    }
}

/// Compares two cores at an explicit modulus threshold and constraint radius.
///
/// The slack for entry `(a, b)` is the largest angle `θ` with
/// `|a − b·e^{−iθ}| ≤ radius` on the circle of moduli, i.e.
/// `arccos((|a|² + |b|² − radius²) / (2|a||b|))` clamped to `[0, π]`.
pub fn compare_cores_with(
    sa: &Tensor3,
    sb: &Tensor3,
    threshold: f64,
    radius: f64,
) -> Result<CoreOutcome> {
    if sa.dims() != sb.dims() {
        return Err(dims_mismatch(sa.dims(), sb.dims()));
    }
    let mut worst: Option<((usize, usize, usize), f64)> = None;
    let mut support_ok = true;
    let mut phase_targets = BTreeMap::new();
    for ((idx, a), b) in sa.indexed_iter().zip(sb.data()) {
        let (ma, mb) = (a.norm(), b.norm());
        let gap = (ma - mb).abs();
        if gap > threshold && worst.is_none_or(|(_, g)| gap > g) {
            worst = Some((idx, gap));
        }
        if (ma > threshold) != (mb > threshold) {
            support_ok = false;
        }
        if ma + mb > threshold {
            let (phi, slack) = if ma > 0.0 && mb > 0.0 {
                let phi = (b / a).arg().rem_euclid(TAU);
                (phi, slack_angle(ma, mb, radius))
            } else {
                // one side vanishes: feasible only if the other fits the radius
                let slack = if ma.max(mb) <= radius { std::f64::consts::PI } else { 0.0 };
                (0.0, slack)
            };
            phase_targets.insert(
                idx,
                PhaseTarget {
                    phi: if phi >= TAU { 0.0 } else { phi },
                    slack,
                    weight: ma * mb,
                },
            );
        }
    }
    if let Some((index, modulus_gap)) = worst {
        return Ok(CoreOutcome::RejectFar {
            index,
            modulus_gap,
            threshold,
        });
    }
    Ok(CoreOutcome::Compared(CoreComparison {
        dims: sa.dims(),
        support_ok,
        modulus_ok: true,
        phase_targets,
        threshold_used: threshold,
        radius,
    }))
}
