//! End-to-end orbit decisions.
//!
//! [`decide_isomorphism`] is the fixed-precision test: truncate, compare the
//! six mode spectra, compare HOSVD cores, align by signs or phases, and only
//! answer YES after recomputing the residual of the assembled witness.
//! [`decide_orbit_distance`] is the gapped variant that separates
//! `dist(A, B) < ε` from `dist(A, B) > γε`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{dims_mismatch, Error, Result};
use crate::hosvd::{
    compare_cores, compare_cores_with, core_from_spectra, mode_spectra, CoreComparison,
    CoreOutcome, CoreTensor,
};
use crate::phase::{
    assemble_witness, circular_distance, solve_phases, solve_signs, within_slack, Alignment, Index3,
    PhaseOutcome, SignOutcome,
};
use crate::spectral::{max_eigenvalue_deviation, GapPolicy, SpectralData, SpectralDigest};
use crate::tensor::{apply_action, ScalarKind, Tensor3, TransformTriple, C64};

/// Default `C_γ` in `γ = C_γ · n^{7/2} · ‖A‖²_F / δ`.
pub const DEFAULT_C_GAMMA: f64 = 8.0;

/// Default truncation for the exact test, in bits after the binary point.
pub const DEFAULT_PRECISION_BITS: u32 = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionMode {
    ExactIso,
    GappedDistance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionConfig {
    pub eps: f64,
    pub delta_override: Option<f64>,
    /// `None` picks the mode default; the gapped mode never goes below
    /// `⌈log₂(1000·n⁷/ε)⌉`.
    pub precision_bits: Option<u32>,
    pub mode: DecisionMode,
    /// When set, both inputs must have this kind.
    pub scalar_kind: Option<ScalarKind>,
    pub c_gamma: f64,
}

impl DecisionConfig {
    pub fn exact() -> Self {
        Self {
            eps: 1e-8,
            delta_override: None,
            precision_bits: None,
            mode: DecisionMode::ExactIso,
            scalar_kind: None,
            c_gamma: DEFAULT_C_GAMMA,
        }
    }

    pub fn gapped(eps: f64) -> Self {
        Self {
            eps,
            mode: DecisionMode::GappedDistance,
            ..Self::exact()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    CannotDecide,
}

impl Verdict {
    /// Process exit code: 0 YES, 1 NO, 2 cannot decide.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Yes => 0,
            Verdict::No => 1,
            Verdict::CannotDecide => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepOutcome {
    Pass,
    Reject,
    CannotDecide,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: &'static str,
    pub outcome: StepOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignmentSummary {
    pub method: &'static str,
    pub constraints: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    pub free_gauges: usize,
    pub violated: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub mode: DecisionMode,
    pub kind: ScalarKind,
    pub dims: [usize; 3],
    pub precision_bits: u32,
    pub c_gamma: f64,
    pub norm_a: f64,
    pub norm_b: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Named numeric thresholds, in a stable order.
    pub thresholds: BTreeMap<&'static str, f64>,
    /// `C_γ · n^{7/2} · ‖A‖²_F / δ`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_local: Option<f64>,
    /// `n⁸`, the dimension-only form.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_global: Option<f64>,
    pub steps: Vec<StepRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejected_at: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alignment: Option<AlignmentSummary>,
    pub spectra_a: Vec<SpectralDigest>,
    pub spectra_b: Vec<SpectralDigest>,
}

impl Diagnostics {
    fn new(mode: DecisionMode, a: &Tensor3, b: &Tensor3, bits: u32, c_gamma: f64) -> Self {
        Self {
            mode,
            kind: a.kind(),
            dims: a.dims(),
            precision_bits: bits,
            c_gamma,
            norm_a: a.frobenius_norm(),
            norm_b: b.frobenius_norm(),
            eps: None,
            delta: None,
            thresholds: BTreeMap::new(),
            gamma_local: None,
            gamma_global: None,
            steps: Vec::new(),
            rejected_at: None,
            reason: None,
            alignment: None,
            spectra_a: Vec::new(),
            spectra_b: Vec::new(),
        }
    }

    fn pass(&mut self, step: &'static str, value: Option<f64>, threshold: Option<f64>) {
        self.steps.push(StepRecord {
            step,
            outcome: StepOutcome::Pass,
            value,
            threshold,
        });
    }

    fn stop(
        &mut self,
        step: &'static str,
        outcome: StepOutcome,
        value: Option<f64>,
        threshold: Option<f64>,
        reason: impl Into<String>,
    ) {
        self.steps.push(StepRecord {
            step,
            outcome,
            value,
            threshold,
        });
        self.rejected_at = Some(step);
        self.reason = Some(reason.into());
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Decision {
    pub verdict: Verdict,
    #[serde(skip)]
    pub witness: Option<TransformTriple>,
    pub residual: Option<f64>,
    pub gamma_bound: f64,
    pub diagnostics: Diagnostics,
}

impl Decision {
    fn halt(verdict: Verdict, gamma_bound: f64, diagnostics: Diagnostics) -> Self {
        Self {
            verdict,
            witness: None,
            residual: None,
            gamma_bound,
            diagnostics,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessCheck {
    pub residual: f64,
    pub unitarity_defect: f64,
    pub unitary_ok: bool,
}

/// Recomputes `‖g ↷ A − B‖_F` directly and checks each factor for
/// unitarity. Mixed real/complex inputs are compared over the complex
/// numbers.
pub fn verify_witness(a: &Tensor3, b: &Tensor3, g: &TransformTriple) -> Result<WitnessCheck> {
    if a.dims() != b.dims() {
        return Err(dims_mismatch(a.dims(), b.dims()));
    }
    if g.dims() != a.dims() {
        return Err(dims_mismatch(a.dims(), g.dims()));
    }
    let image = if g.kind() == a.kind() {
        apply_action(g, a)?
    } else {
        let [l, r, t] = g.factors().clone();
        let gc = TransformTriple::new(l, r, t, ScalarKind::Complex)?;
        apply_action(&gc, &as_complex(a)?)?
    };
    let residual = image.distance(b)?;
    let unitarity_defect = g.unitarity_defect();
    Ok(WitnessCheck {
        residual,
        unitarity_defect,
        unitary_ok: g.is_unitary(),
    })
}

fn as_complex(a: &Tensor3) -> Result<Tensor3> {
    Tensor3::from_complex(a.dims(), a.data().to_vec())
}

/// Rounds every real and imaginary part to the nearest multiple of `2^{-bits}`.
pub fn truncate(t: &Tensor3, bits: u32) -> Tensor3 {
    let scale = 2f64.powi(bits.min(1023) as i32);
    let round = |x: f64| {
        let y = x * scale;
        if !y.is_finite() || y.abs() >= 2f64.powi(52) {
            x
        } else {
            y.round() / scale
        }
    };
    t.map(|z| C64::new(round(z.re), round(z.im)))
        .expect("rounding keeps entries finite and real parts real")
}

/// `⌈log₂(1000 · n⁷ / ε)⌉`.
pub fn gapped_precision_bits(n: usize, eps: f64) -> u32 {
    let bits = (1000.0 * (n as f64).powi(7) / eps).log2().ceil();
    bits.clamp(1.0, 1023.0) as u32
}

fn check_inputs(a: &Tensor3, b: &Tensor3, cfg: &DecisionConfig) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(dims_mismatch(a.dims(), b.dims()));
    }
    if a.kind() != b.kind() {
        return Err(Error::ScalarKindMismatch {
            left: a.kind(),
            right: b.kind(),
        });
    }
    if let Some(kind) = cfg.scalar_kind {
        if kind != a.kind() {
            return Err(Error::ScalarKindMismatch {
                left: kind,
                right: a.kind(),
            });
        }
    }
    if !(cfg.c_gamma > 0.0 && cfg.c_gamma.is_finite()) {
        return Err(Error::ConfigInvalid(format!("c_gamma must be positive, got {}", cfg.c_gamma)));
    }
    if let Some(d) = cfg.delta_override {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::ConfigInvalid(format!("delta must be positive, got {d}")));
        }
    }
    Ok(())
}

fn min_gap_of(spectra: &[SpectralData]) -> f64 {
    spectra.iter().map(|s| s.min_gap).fold(f64::INFINITY, f64::min)
}

fn digests(spectra: &[SpectralData; 3]) -> Vec<SpectralDigest> {
    spectra.iter().map(SpectralData::digest).collect()
}

enum AlignResult {
    Aligned(Alignment, AlignmentSummary),
    Infeasible(AlignmentSummary),
}

/// Step 4/5: real inputs solve a sign system, complex inputs a phase system.
fn align(cmp: &CoreComparison, kind: ScalarKind) -> Result<AlignResult> {
    match kind {
        ScalarKind::Real => {
            let mut targets = BTreeMap::new();
            let mut blocked = Vec::new();
            for (&idx, t) in &cmp.phase_targets {
                if t.slack >= PI {
                    continue;
                }
                let plus = within_slack(circular_distance(t.phi, 0.0), t.slack);
                let minus = within_slack(circular_distance(t.phi, PI), t.slack);
                match (plus, minus) {
                    (true, true) => {}
                    (true, false) => {
                        targets.insert(idx, 1i8);
                    }
                    (false, true) => {
                        targets.insert(idx, -1i8);
                    }
                    (false, false) => blocked.push(idx),
                }
            }
            let summary = |violated: Vec<Index3>| AlignmentSummary {
                method: "signs",
                constraints: targets.len(),
                max_residual: None,
                free_gauges: 0,
                violated: violated.into_iter().map(|(i, j, k)| [i, j, k]).collect(),
            };
            if !blocked.is_empty() {
                return Ok(AlignResult::Infeasible(summary(blocked)));
            }
            match solve_signs(cmp.dims, &targets)? {
                SignOutcome::Solved(s) => {
                    let sum = summary(Vec::new());
                    Ok(AlignResult::Aligned(Alignment::Signs(s), sum))
                }
                SignOutcome::Infeasible { certificate } => {
                    Ok(AlignResult::Infeasible(summary(certificate)))
                }
            }
        }
        ScalarKind::Complex => {
            let constraints = cmp.phase_targets.len();
            match solve_phases(cmp) {
                PhaseOutcome::Solved(p) => {
                    let summary = AlignmentSummary {
                        method: "phases",
                        constraints,
                        max_residual: Some(p.max_residual),
                        free_gauges: p.free_gauges,
                        violated: Vec::new(),
                    };
                    Ok(AlignResult::Aligned(Alignment::Phases(p), summary))
                }
                PhaseOutcome::Infeasible { violated } => Ok(AlignResult::Infeasible(AlignmentSummary {
                    method: "phases",
                    constraints,
                    max_residual: None,
                    free_gauges: 0,
                    violated: violated.into_iter().map(|(i, j, k)| [i, j, k]).collect(),
                })),
            }
        }
    }
}

/// Assembles and independently verifies the witness; YES only if the
/// recomputed residual is within `gamma_bound`.
fn conclude(
    a: &Tensor3,
    b: &Tensor3,
    ca: &CoreTensor,
    cb: &CoreTensor,
    alignment: Alignment,
    gamma_bound: f64,
    mut diag: Diagnostics,
) -> Result<Decision> {
    let witness = assemble_witness(&ca.bases, &cb.bases, &alignment)?;
    let check = verify_witness(a, b, &witness)?;
    diag.thresholds.insert("unitarity_defect", check.unitarity_defect);
    let residual = Some(check.residual);
    if check.unitary_ok && check.residual <= gamma_bound {
        diag.pass("verify", Some(check.residual), Some(gamma_bound));
        return Ok(Decision {
            verdict: Verdict::Yes,
            witness: Some(witness),
            residual,
            gamma_bound,
            diagnostics: diag,
        });
    }
    let reason = if check.unitary_ok {
        "assembled witness failed residual verification"
    } else {
        "assembled witness is not unitary"
    };
    diag.stop(
        "verify",
        StepOutcome::CannotDecide,
        Some(check.residual),
        Some(gamma_bound),
        reason,
    );
    Ok(Decision {
        verdict: Verdict::CannotDecide,
        witness: None,
        residual,
        gamma_bound,
        diagnostics: diag,
    })
}

/// Fixed-precision isomorphism test.
///
/// With `ℓ` bits of truncation, `n` the largest dimension, `N` the number of
/// entries and `K = ‖Ã‖ + ‖B̃‖`, the pipeline uses
/// - eigenvalue tolerance `τ_λ = 8(2·K_max·η + η²) + 64·n·u·K_max²`, where
///   `η = √N · 2^{−ℓ−1}` bounds the truncation error and `u` is the unit
///   roundoff;
/// - spectra must have all gaps `≥ 2τ_λ` (else CANNOT DECIDE) and agree
///   within `τ_λ` (else NO);
/// - `κ = τ_λ/δ` with `δ` the smallest of the six gaps, core threshold and
///   constraint radius `4√n·κ·K + f`, and `gamma_bound = C_γ·(√n·κ·K + f)`,
///   where `f = 2η + 64·n·u·K` covers truncation and rounding in the core.
pub fn decide_isomorphism(a: &Tensor3, b: &Tensor3, cfg: &DecisionConfig) -> Result<Decision> {
    check_inputs(a, b, cfg)?;
    let bits = cfg.precision_bits.unwrap_or(DEFAULT_PRECISION_BITS);
    let mut diag = Diagnostics::new(DecisionMode::ExactIso, a, b, bits, cfg.c_gamma);
    let (at, bt) = (truncate(a, bits), truncate(b, bits));

    let n = a.max_dim() as f64;
    let entries = a.len() as f64;
    let (na, nb) = (at.frobenius_norm(), bt.frobenius_norm());
    let k_max = na.max(nb);
    let k_sum = na + nb;
    let trunc = entries.sqrt() * 2f64.powi(-(bits.min(1000) as i32) - 1);
    let tau_lambda =
        8.0 * (2.0 * k_max * trunc + trunc * trunc) + 64.0 * n * f64::EPSILON * k_max * k_max;
    diag.thresholds.insert("eigen_tolerance", tau_lambda);

    let spectra_a = mode_spectra(&at)?;
    let spectra_b = mode_spectra(&bt)?;
    diag.spectra_a = digests(&spectra_a);
    diag.spectra_b = digests(&spectra_b);

    let delta = min_gap_of(&spectra_a).min(min_gap_of(&spectra_b));
    let delta = cfg.delta_override.map_or(delta, |d| d.min(delta));
    diag.delta = Some(delta);
    let gap_floor = 2.0 * tau_lambda;
    if !(delta >= gap_floor) {
        diag.stop(
            "spectra",
            StepOutcome::CannotDecide,
            Some(delta),
            Some(gap_floor),
            "a mode spectrum is not simple at the working precision",
        );
        return Ok(Decision::halt(Verdict::CannotDecide, 0.0, diag));
    }
    diag.pass("spectra", Some(delta), Some(gap_floor));

    let mut deviation = 0.0f64;
    for (sa, sb) in spectra_a.iter().zip(&spectra_b) {
        deviation = deviation.max(max_eigenvalue_deviation(&sa.eigenvalues, &sb.eigenvalues)?);
    }
    if deviation > tau_lambda {
        diag.stop(
            "spectrum_match",
            StepOutcome::Reject,
            Some(deviation),
            Some(tau_lambda),
            "mode spectra differ",
        );
        return Ok(Decision::halt(Verdict::No, 0.0, diag));
    }
    diag.pass("spectrum_match", Some(deviation), Some(tau_lambda));

    let kappa = if delta.is_finite() { tau_lambda / delta } else { 0.0 };
    // entrywise truncation and rounding in the core products still apply
    // when no eigenvector can move (all modes of size one)
    let floor = 2.0 * trunc + 64.0 * n * f64::EPSILON * k_sum;
    let tau_core = 4.0 * n.sqrt() * kappa * k_sum + floor;
    let gamma_bound = cfg.c_gamma * (n.sqrt() * kappa * k_sum + floor);
    diag.thresholds.insert("core_threshold", tau_core);

    let policy = GapPolicy::threshold(gap_floor);
    let ca = core_from_spectra(&at, spectra_a, &policy)?;
    let cb = core_from_spectra(&bt, spectra_b, &policy)?;
    let cmp = match compare_cores_with(&ca.core, &cb.core, tau_core, tau_core)? {
        CoreOutcome::RejectFar {
            modulus_gap,
            threshold,
            ..
        } => {
            diag.stop(
                "core_modulus",
                StepOutcome::Reject,
                Some(modulus_gap),
                Some(threshold),
                "core moduli differ",
            );
            return Ok(Decision::halt(Verdict::No, gamma_bound, diag));
        }
        CoreOutcome::Compared(cmp) => cmp,
    };
    diag.pass("core_modulus", None, Some(tau_core));

    match align(&cmp, a.kind())? {
        AlignResult::Infeasible(summary) => {
            diag.alignment = Some(summary);
            diag.stop(
                "alignment",
                StepOutcome::Reject,
                None,
                None,
                "no diagonal sign/phase triple aligns the cores",
            );
            Ok(Decision::halt(Verdict::No, gamma_bound, diag))
        }
        AlignResult::Aligned(alignment, summary) => {
            diag.alignment = Some(summary);
            diag.pass("alignment", None, None);
            conclude(a, b, &ca, &cb, alignment, gamma_bound, diag)
        }
    }
}

/// Gapped orbit-distance decision.
///
/// Steps, in order: (1) reject if `|‖Ã‖ − ‖B̃‖| ≥ 2ε`; measure `δ` from
/// `Ã` (or take `delta_override`) and require `ε < δ/(4K)`; (2) reject if
/// `B̃`'s smallest Gram gap is below `δ/2`; (3) reject if core moduli differ
/// by more than `2εn²K/δ`; (5) solve the sign or phase system, assemble the
/// witness and verify its residual against
/// `gamma_bound = C_γ · n^{7/2} · ‖A‖² · ε/δ`.
///
/// The norm test runs before the range check on `ε`: a far-away `B` is
/// rejected outright even when its norm pushes `ε` outside the range.
pub fn decide_orbit_distance(a: &Tensor3, b: &Tensor3, cfg: &DecisionConfig) -> Result<Decision> {
    check_inputs(a, b, cfg)?;
    if !a.is_cubic() {
        return Err(dims_mismatch("cubic dimensions", a.dims()));
    }
    let eps = cfg.eps;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::ConfigInvalid(format!("eps must be positive, got {eps}")));
    }
    let dims = a.dims();
    let nn = dims[0];
    let n = nn as f64;
    let bits = gapped_precision_bits(nn, eps).max(cfg.precision_bits.unwrap_or(0));
    let mut diag = Diagnostics::new(DecisionMode::GappedDistance, a, b, bits, cfg.c_gamma);
    diag.eps = Some(eps);
    diag.gamma_global = Some(n.powi(8));
    let (at, bt) = (truncate(a, bits), truncate(b, bits));
    let (na, nb) = (at.frobenius_norm(), bt.frobenius_norm());
    let k_sum = na + nb;

    let norm_gap = (na - nb).abs();
    if norm_gap >= 2.0 * eps {
        diag.stop(
            "norm",
            StepOutcome::Reject,
            Some(norm_gap),
            Some(2.0 * eps),
            "Frobenius norms differ by at least 2·eps",
        );
        return Ok(Decision::halt(Verdict::No, 0.0, diag));
    }
    diag.pass("norm", Some(norm_gap), Some(2.0 * eps));

    let spectra_a = mode_spectra(&at)?;
    diag.spectra_a = digests(&spectra_a);
    let measured = min_gap_of(&spectra_a);
    let delta = cfg.delta_override.unwrap_or(measured);
    diag.delta = Some(delta);
    if !(measured > 0.0) || measured < delta || !delta.is_finite() {
        diag.stop(
            "gap_a",
            StepOutcome::CannotDecide,
            Some(measured),
            Some(delta),
            "A is not delta-gapped",
        );
        return Ok(Decision::halt(Verdict::CannotDecide, 0.0, diag));
    }
    let gamma_local = cfg.c_gamma * n.powf(3.5) * na * na / delta;
    let gamma_bound = gamma_local * eps;
    diag.gamma_local = Some(gamma_local);
    let limit = delta / (4.0 * k_sum);
    if eps >= limit {
        return Err(Error::EpsOutOfRange { eps, limit });
    }
    diag.pass("gap_a", Some(measured), Some(delta));

    let spectra_b = mode_spectra(&bt)?;
    diag.spectra_b = digests(&spectra_b);
    let gap_b = min_gap_of(&spectra_b);
    if !(gap_b >= delta / 2.0) {
        diag.stop(
            "gap_b",
            StepOutcome::Reject,
            Some(gap_b),
            Some(delta / 2.0),
            "B's Gram gap is below delta/2",
        );
        return Ok(Decision::halt(Verdict::No, gamma_bound, diag));
    }
    diag.pass("gap_b", Some(gap_b), Some(delta / 2.0));

    let policy = GapPolicy::threshold(0.0);
    let ca = core_from_spectra(&at, spectra_a, &policy)?;
    let cb = core_from_spectra(&bt, spectra_b, &policy)?;
    let cmp = match compare_cores(&ca, &cb, eps, delta)? {
        CoreOutcome::RejectFar {
            modulus_gap,
            threshold,
            ..
        } => {
            diag.thresholds.insert("core_threshold", threshold);
            diag.stop(
                "core_modulus",
                StepOutcome::Reject,
                Some(modulus_gap),
                Some(threshold),
                "core moduli differ beyond the threshold",
            );
            return Ok(Decision::halt(Verdict::No, gamma_bound, diag));
        }
        CoreOutcome::Compared(cmp) => cmp,
    };
    diag.thresholds.insert("core_threshold", cmp.threshold_used);
    diag.thresholds.insert("radius", cmp.radius);
    diag.pass("core_modulus", None, Some(cmp.threshold_used));

    match align(&cmp, a.kind())? {
        AlignResult::Infeasible(summary) => {
            diag.alignment = Some(summary);
            diag.stop(
                "alignment",
                StepOutcome::Reject,
                None,
                None,
                "phase constraints are infeasible",
            );
            Ok(Decision::halt(Verdict::No, gamma_bound, diag))
        }
        AlignResult::Aligned(alignment, summary) => {
            diag.alignment = Some(summary);
            diag.pass("alignment", None, None);
            conclude(a, b, &ca, &cb, alignment, gamma_bound, diag)
        }
    }
}

/// Dispatches on `cfg.mode`.
pub fn decide(a: &Tensor3, b: &Tensor3, cfg: &DecisionConfig) -> Result<Decision> {
    match cfg.mode {
        DecisionMode::ExactIso => decide_isomorphism(a, b, cfg),
        DecisionMode::GappedDistance => decide_orbit_distance(a, b, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{sample_haar_triple, sample_tensor, Distribution, RandomModel};

    fn gaussian(dims: [usize; 3], kind: ScalarKind, seed: u64) -> Tensor3 {
        sample_tensor(dims, &RandomModel::new(Distribution::Gaussian, kind, seed)).unwrap()
    }

    fn naive_action(g: &TransformTriple, a: &Tensor3) -> Tensor3 {
        let [l, m, n] = a.dims();
        let [lf, rf, tf] = g.factors();
        Tensor3::from_fn(a.dims(), ScalarKind::Complex, |i, j, k| {
            let mut acc = C64::new(0.0, 0.0);
            for p in 0..l {
                for q in 0..m {
                    for r in 0..n {
                        acc += lf[(i, p)] * rf[(j, q)] * tf[(k, r)] * a.get(p, q, r);
                    }
                }
            }
            acc
        })
        .unwrap()
    }

    #[test]
    fn identical_inputs_are_isomorphic() {
        for kind in [ScalarKind::Real, ScalarKind::Complex] {
            let a = gaussian([6, 6, 6], kind, 1);
            let d = decide_isomorphism(&a, &a, &DecisionConfig::exact()).unwrap();
            assert_eq!(d.verdict, Verdict::Yes, "{:?}", d.diagnostics);
            assert!(d.residual.unwrap() <= 1e-8 * a.frobenius_norm());
        }
    }

    #[test]
    fn haar_image_is_isomorphic() {
        for kind in [ScalarKind::Real, ScalarKind::Complex] {
            let a = gaussian([10, 10, 10], kind, 2);
            let g = sample_haar_triple([10, 10, 10], kind, 3);
            let b = apply_action(&g, &a).unwrap();
            let d = decide_isomorphism(&a, &b, &DecisionConfig::exact()).unwrap();
            assert_eq!(d.verdict, Verdict::Yes, "{kind}: {:?}", d.diagnostics);
            let w = d.witness.as_ref().unwrap();
            let check = verify_witness(&a, &b, w).unwrap();
            assert!(check.residual <= 1e-6 * a.frobenius_norm());
            assert!(check.residual <= d.gamma_bound);
            assert!(check.unitary_ok);
        }
    }

    #[test]
    fn non_cubic_haar_image() {
        let a = gaussian([4, 5, 6], ScalarKind::Complex, 9);
        let g = sample_haar_triple([4, 5, 6], ScalarKind::Complex, 10);
        let b = apply_action(&g, &a).unwrap();
        let d = decide_isomorphism(&a, &b, &DecisionConfig::exact()).unwrap();
        assert_eq!(d.verdict, Verdict::Yes, "{:?}", d.diagnostics);
    }

    #[test]
    fn independent_tensors_are_rejected() {
        let mut no = 0;
        for seed in 0..20 {
            let a = gaussian([6, 6, 6], ScalarKind::Real, 2 * seed);
            let b = gaussian([6, 6, 6], ScalarKind::Real, 2 * seed + 1);
            let d = decide_isomorphism(&a, &b, &DecisionConfig::exact()).unwrap();
            assert_ne!(d.verdict, Verdict::Yes);
            if d.verdict == Verdict::No {
                no += 1;
                assert_eq!(d.diagnostics.rejected_at, Some("spectrum_match"));
            }
        }
        assert!(no >= 19);
    }

    #[test]
    fn rank_one_tensor_matches_itself() {
        // a single dominant core entry leaves only a very narrow admissible arc
        let a = Tensor3::from_real([2, 2, 2], vec![1.0; 8]).unwrap();
        let d = decide_isomorphism(&a, &a, &DecisionConfig::exact()).unwrap();
        assert_eq!(d.verdict, Verdict::Yes);
        let c = Tensor3::from_complex_kind([2, 2, 2], ScalarKind::Complex, vec![C64::new(0.0, 1.0); 8]).unwrap();
        let d = decide_isomorphism(&c, &c, &DecisionConfig::exact()).unwrap();
        assert_eq!(d.verdict, Verdict::Yes);
    }

    #[test]
    fn degenerate_tensor_cannot_be_decided() {
        let a = Tensor3::from_real([3, 3, 3], vec![1.0; 27]).unwrap();
        let d = decide_isomorphism(&a, &a, &DecisionConfig::exact()).unwrap();
        assert_eq!(d.verdict, Verdict::CannotDecide);
        assert_eq!(d.diagnostics.rejected_at, Some("spectra"));
    }

    #[test]
    fn input_errors() {
        let a = gaussian([3, 3, 3], ScalarKind::Real, 0);
        let b = gaussian([3, 3, 4], ScalarKind::Real, 0);
        let c = gaussian([3, 3, 3], ScalarKind::Complex, 0);
        let cfg = DecisionConfig::exact();
        assert!(matches!(
            decide_isomorphism(&a, &b, &cfg),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            decide_isomorphism(&a, &c, &cfg),
            Err(Error::ScalarKindMismatch { .. })
        ));
        assert!(matches!(
            decide_orbit_distance(&b, &b, &DecisionConfig::gapped(1e-6)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gapped_identical_inputs() {
        let a = gaussian([5, 5, 5], ScalarKind::Real, 4);
        let d = decide_orbit_distance(&a, &a, &DecisionConfig::gapped(1e-9)).unwrap();
        assert_eq!(d.verdict, Verdict::Yes, "{:?}", d.diagnostics);
        assert!(d.residual.unwrap() < 1e-9);
    }

    #[test]
    fn gapped_scaled_input_rejected_at_norm_step() {
        let a = gaussian([5, 5, 5], ScalarKind::Complex, 4);
        let d = decide_orbit_distance(&a, &a.scaled(2.0), &DecisionConfig::gapped(1e-9)).unwrap();
        assert_eq!(d.verdict, Verdict::No);
        assert_eq!(d.diagnostics.rejected_at, Some("norm"));
    }

    #[test]
    fn gapped_eps_out_of_range() {
        let a = gaussian([4, 4, 4], ScalarKind::Real, 4);
        let r = decide_orbit_distance(&a, &a, &DecisionConfig::gapped(1.0));
        assert!(matches!(r, Err(Error::EpsOutOfRange { .. })));
    }

    #[test]
    fn collapsed_gap_rejected_at_step_two() {
        let a = gaussian([4, 4, 4], ScalarKind::Real, 8);
        let ones = Tensor3::from_real([4, 4, 4], vec![1.0; 64]).unwrap();
        let b = ones.scaled(a.frobenius_norm() / ones.frobenius_norm());
        let d = decide_orbit_distance(&a, &b, &DecisionConfig::gapped(1e-9)).unwrap();
        assert_eq!(d.verdict, Verdict::No);
        assert_eq!(d.diagnostics.rejected_at, Some("gap_b"));
    }

    #[test]
    fn norm_preserving_perturbation_rejected_at_core_step() {
        let a = gaussian([4, 4, 4], ScalarKind::Real, 21);
        let e = gaussian([4, 4, 4], ScalarKind::Real, 22);
        let dot: f64 = a.data().iter().zip(e.data()).map(|(x, y)| x.re * y.re).sum();
        let e = e.sub(&a.scaled(dot / a.frobenius_norm().powi(2))).unwrap();
        let b = a.add(&e.scaled(1e-2 / e.frobenius_norm())).unwrap();
        let b = b.scaled(a.frobenius_norm() / b.frobenius_norm());
        let d = decide_orbit_distance(&a, &b, &DecisionConfig::gapped(1e-6)).unwrap();
        assert_eq!(d.verdict, Verdict::No);
        assert_eq!(d.diagnostics.rejected_at, Some("core_modulus"));
    }

    #[test]
    fn witness_check_matches_naive_action() {
        let a = gaussian([3, 4, 2], ScalarKind::Complex, 12);
        let g = sample_haar_triple([3, 4, 2], ScalarKind::Complex, 13);
        let check = verify_witness(&a, &a, &g).unwrap();
        let naive = naive_action(&g, &a).distance(&a).unwrap();
        assert!(check.residual > 0.0);
        assert!((check.residual - naive).abs() <= 1e-10 * a.frobenius_norm());

        let id = TransformTriple::identity([3, 4, 2], ScalarKind::Complex);
        assert_eq!(verify_witness(&a, &a, &id).unwrap().residual, 0.0);

        let b = apply_action(&g, &a).unwrap();
        assert!(verify_witness(&a, &b, &g).unwrap().residual <= 1e-10 * a.frobenius_norm());
    }

    #[test]
    fn non_unitary_witness_is_flagged() {
        let a = gaussian([2, 2, 2], ScalarKind::Real, 1);
        let [l, r, t] = TransformTriple::identity([2, 2, 2], ScalarKind::Real).factors().clone();
        let g = TransformTriple::new(l * C64::new(2.0, 0.0), r, t, ScalarKind::Real).unwrap();
        let check = verify_witness(&a, &a, &g).unwrap();
        assert!(!check.unitary_ok);
        assert!(check.unitarity_defect > 1.0);
    }

    #[test]
    fn truncation_rounds_to_grid() {
        let t = Tensor3::from_real([1, 1, 2], vec![0.3, -1.0 / 3.0]).unwrap();
        let r = truncate(&t, 4);
        assert_eq!(r.get(0, 0, 0).re, 5.0 / 16.0);
        assert_eq!(r.get(0, 0, 1).re, -5.0 / 16.0);
        let same = truncate(&t, 1000);
        assert_eq!(same, t);
        for z in truncate(&t, 20).data() {
            assert!((z.re - (z.re * 2f64.powi(20)).round() / 2f64.powi(20)).abs() == 0.0);
        }
    }

    #[test]
    fn gapped_precision_formula() {
        // 1000 · 10⁷ / 1e-3 = 1e13, log₂ ≈ 43.2
        assert_eq!(gapped_precision_bits(10, 1e-3), 44);
    }

    #[test]
    fn decision_json_is_stable() {
        let a = gaussian([4, 4, 4], ScalarKind::Real, 5);
        let d = decide_isomorphism(&a, &a, &DecisionConfig::exact()).unwrap();
        let first = serde_json::to_string(&d).unwrap();
        let again = decide_isomorphism(&a, &a, &DecisionConfig::exact()).unwrap();
        assert_eq!(first, serde_json::to_string(&again).unwrap());
        let v: serde_json::Value = serde_json::from_str(&first).unwrap();
        assert_eq!(v["verdict"], "yes");
        assert!(v["diagnostics"]["steps"].is_array());
    }
}
