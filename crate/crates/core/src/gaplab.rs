//! Monte-Carlo experiments on eigenvalue repulsion.
//!
//! A matrix experiment samples tall `n × p` matrices `M` and records the
//! smallest adjacent gap of the spectrum of `M^*M`. A tensor experiment
//! samples `n × n × n` tensors (optionally `base + ηE`) and records the
//! smallest gap over the three mode Gram matrices. Trial `t` draws from
//! stream `t + 1` of the experiment seed, so results do not depend on how
//! trials are scheduled across threads.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{dims_mismatch, Error, Result};
use crate::spectral::eig_hermitian;
use crate::tensor::{
    flatten, gram, sample_tensor_with, stream_rng, CMat, Mode, RandomModel, Tensor3,
};

pub const CSV_HEADER: &str = "trial,seed,min_gap,simple,smin,smax";
pub const FOOTER_TAG: &str = "#aggregate";

/// Gap-scale constant fixed from the pilot sweep in `examples/gap_pilot.rs`:
/// at `n = 400`, `p = 20` the median Gaussian gap is about 18.5 times
/// `(n^{1/4} − 1)·n^{−β}` with `β = PILOT_BETA`.
pub const PILOT_C_TEST: f64 = 18.0;

/// Exponent `β` fixed from the same pilot for the `ζ = 1/2` slope check.
pub const PILOT_BETA: f64 = 0.51;

/// Constants multiplying the predicted gap scale and failure probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionConstants {
    pub c_test: f64,
    pub big_c_test: f64,
}

impl Default for PredictionConstants {
    fn default() -> Self {
        Self {
            c_test: 1.0,
            big_c_test: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub base: Tensor3,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapExperiment {
    pub n: usize,
    pub p: usize,
    pub zeta: Option<f64>,
    pub beta: f64,
    pub trials: usize,
    pub model: RandomModel,
    pub constants: PredictionConstants,
    /// When set, each trial's matrix is the transposed mode-1 flattening of
    /// `base + ηE`, and `n`, `p` follow the base shape.
    pub perturbation: Option<Perturbation>,
}

impl GapExperiment {
    /// `p = ⌊n^ζ⌋`.
    pub fn with_zeta(n: usize, zeta: f64, beta: f64, trials: usize, model: RandomModel) -> Result<Self> {
        if !(zeta > 0.0 && zeta < 1.0) {
            return Err(Error::ConfigInvalid(format!("zeta must lie in (0, 1), got {zeta}")));
        }
        if !(beta > zeta) {
            return Err(Error::ConfigInvalid(format!(
                "beta must exceed zeta (beta = {beta}, zeta = {zeta})"
            )));
        }
        let p = (n as f64).powf(zeta).floor() as usize;
        if p < 2 {
            return Err(Error::ConfigInvalid(format!("n^zeta = {p} gives fewer than 2 columns")));
        }
        let cfg = Self {
            n,
            p,
            zeta: Some(zeta),
            beta,
            trials,
            model,
            constants: PredictionConstants::default(),
            perturbation: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_p(n: usize, p: usize, beta: f64, trials: usize, model: RandomModel) -> Result<Self> {
        let cfg = Self {
            n,
            p,
            zeta: None,
            beta,
            trials,
            model,
            constants: PredictionConstants::default(),
            perturbation: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn perturbed(base: Tensor3, eta: f64, beta: f64, trials: usize, model: RandomModel) -> Result<Self> {
        let [a, b, c] = base.dims();
        let cfg = Self {
            n: b * c,
            p: a,
            zeta: None,
            beta,
            trials,
            model,
            constants: PredictionConstants::default(),
            perturbation: Some(Perturbation { base, eta }),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_constants(self, constants: PredictionConstants) -> Self {
        Self { constants, ..self }
    }

    /// `ζ` as given, or `ln p / ln n` for an explicit `p`.
    pub fn effective_zeta(&self) -> f64 {
        self.zeta
            .unwrap_or_else(|| (self.p as f64).ln() / (self.n as f64).ln())
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::ConfigInvalid("trials must be at least 1".into()));
        }
        if self.n == 0 || self.p == 0 {
            return Err(Error::ConfigInvalid(format!(
                "matrix shape must be positive, got {} x {}",
                self.n, self.p
            )));
        }
        if !self.beta.is_finite() {
            return Err(Error::ConfigInvalid("beta must be finite".into()));
        }
        if let Some(pert) = &self.perturbation {
            if !(pert.eta >= 0.0 && pert.eta.is_finite()) {
                return Err(Error::ConfigInvalid(format!("eta must be non-negative, got {}", pert.eta)));
            }
            if pert.base.kind() != self.model.kind {
                return Err(Error::ScalarKindMismatch {
                    left: pert.base.kind(),
                    right: self.model.kind,
                });
            }
        }
        Ok(())
    }

    /// `c_test · (n^{(1−ζ)/2} − 1) · n^{−β}`.
    pub fn target(&self) -> f64 {
        let n = self.n as f64;
        let zeta = self.effective_zeta();
        self.constants.c_test * (n.powf((1.0 - zeta) / 2.0) - 1.0) * n.powf(-self.beta)
    }

    /// `1 − C_test · n^{ζ−β}`, clamped to `[0, 1]`.
    pub fn bound_prob(&self) -> f64 {
        let n = self.n as f64;
        (1.0 - self.constants.big_c_test * n.powf(self.effective_zeta() - self.beta)).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    /// `+∞` when the spectrum has a single eigenvalue.
    pub min_gap: f64,
    pub simple: bool,
    pub smin: f64,
    pub smax: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: usize,
    pub simple_frequency: f64,
    pub median_min_gap: Option<f64>,
    pub target: Option<f64>,
    /// Fraction of trials with `min_gap ≥ target`.
    pub empirical_prob: Option<f64>,
    pub bound_prob: Option<f64>,
    pub degenerate: bool,
}

impl Aggregate {
    pub fn from_trials(
        trials: &[TrialRecord],
        target: Option<f64>,
        bound_prob: Option<f64>,
        degenerate: bool,
    ) -> Self {
        let count = trials.len();
        let frac = |k: usize| if count == 0 { 0.0 } else { k as f64 / count as f64 };
        let simple = trials.iter().filter(|t| t.simple).count();
        Self {
            trials: count,
            simple_frequency: frac(simple),
            median_min_gap: median(trials.iter().map(|t| t.min_gap).collect()),
            target,
            empirical_prob: target.map(|t| frac(trials.iter().filter(|r| r.min_gap >= t).count())),
            bound_prob,
            degenerate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub n: usize,
    pub p: usize,
    pub zeta: Option<f64>,
    pub beta: Option<f64>,
    pub eta: Option<f64>,
    pub model: RandomModel,
    pub trials: Vec<TrialRecord>,
    pub aggregate: Aggregate,
}

impl GapReport {
    pub fn min_gaps(&self) -> Vec<f64> {
        self.trials.iter().map(|t| t.min_gap).collect()
    }

    /// Empirical `P[min_gap ≥ t]` for each threshold.
    pub fn survival_curve(&self, thresholds: &[f64]) -> Vec<(f64, f64)> {
        let mut gaps = self.min_gaps();
        gaps.sort_by(f64::total_cmp);
        let count = gaps.len().max(1) as f64;
        thresholds
            .iter()
            .map(|&t| {
                let below = gaps.partition_point(|&g| g < t);
                (t, (gaps.len() - below) as f64 / count)
            })
            .collect()
    }
}

/// Median of the values (mean of the middle pair for even counts), computed
/// after sorting so the result is independent of input order.
pub fn median(mut values: Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        let (a, b) = (values[mid - 1], values[mid]);
        if a == b {
            a
        } else {
            (a + b) / 2.0
        }
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::ConfigInvalid(
            "log-log fit needs at least two points with positive coordinates".into(),
        ));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::ConfigInvalid("log-log fit needs distinct x values".into()));
    }
    Ok(sxy / sxx)
}

/// Log-log slope of `(n^{(1−ζ)/2} − 1) · n^{−β}` fitted over the given `n`.
pub fn predicted_slope(ns: &[usize], zeta: f64, beta: f64) -> Result<f64> {
    let points: Vec<(f64, f64)> = ns
        .iter()
        .map(|&n| {
            let n = n as f64;
            (n, (n.powf((1.0 - zeta) / 2.0) - 1.0) * n.powf(-beta))
        })
        .collect();
    loglog_slope(&points)
}

/// Gap statistics of `M^*M` for one matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGapStats {
    pub eigenvalues: Vec<f64>,
    pub min_gap: f64,
    pub simple: bool,
    pub smin: f64,
    pub smax: f64,
}

pub fn matrix_gap_stats(m: &CMat) -> Result<MatrixGapStats> {
    let mm = m.adjoint() * m;
    let spec = eig_hermitian(&mm)?;
    let smax = spec.eigenvalues.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    let smin = spec.eigenvalues.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    Ok(MatrixGapStats {
        min_gap: spec.min_gap,
        simple: spec.simple,
        smin,
        smax,
        eigenvalues: spec.eigenvalues,
    })
}

/// The matrix drawn for trial `t` of a matrix experiment.
pub fn sample_trial_matrix(cfg: &GapExperiment, trial: usize) -> Result<CMat> {
    let mut rng = stream_rng(cfg.model.seed, trial as u64 + 1);
    let dist = cfg.model.distribution;
    match &cfg.perturbation {
        None => {
            let kind = cfg.model.kind;
            Ok(CMat::from_fn(cfg.n, cfg.p, |_, _| dist.sample(kind, &mut rng)))
        }
        Some(pert) => {
            let t = perturb(&pert.base, pert.eta, cfg.model, trial)?;
            Ok(flatten(&t, Mode::One).transpose())
        }
    }
}

fn perturb(base: &Tensor3, eta: f64, model: RandomModel, trial: usize) -> Result<Tensor3> {
    let mut rng = stream_rng(model.seed, trial as u64 + 1);
    let e = sample_tensor_with(base.dims(), model.distribution, model.kind, &mut rng)?;
    base.add(&e.scaled(eta))
}

pub fn run_gap_experiment(cfg: &GapExperiment) -> Result<GapReport> {
    cfg.validate()?;
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let m = sample_trial_matrix(cfg, t)?;
            let stats = matrix_gap_stats(&m)?;
            Ok(TrialRecord {
                trial: t,
                seed: cfg.model.seed,
                min_gap: stats.min_gap,
                simple: stats.simple,
                smin: stats.smin,
                smax: stats.smax,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let degenerate = cfg.p < 2;
    let target = Some(cfg.target());
    let aggregate = Aggregate::from_trials(&trials, target, Some(cfg.bound_prob()), degenerate);
    Ok(GapReport {
        n: cfg.n,
        p: cfg.p,
        zeta: cfg.zeta,
        beta: Some(cfg.beta),
        eta: cfg.perturbation.as_ref().map(|p| p.eta),
        model: cfg.model,
        trials,
        aggregate,
    })
}

/// Tensor experiment over `n × n × n` samples, or `base + ηE` when a
/// perturbation is given (the base fixes the shape and `n` is ignored).
/// Each trial records the smallest gap over the three mode Gram matrices,
/// whether all three spectra are simple, and the extreme singular values
/// over all three flattenings.
pub fn run_tensor_gram_experiment(
    n: usize,
    model: RandomModel,
    trials: usize,
    perturbation: Option<&Perturbation>,
) -> Result<GapReport> {
    if trials == 0 {
        return Err(Error::ConfigInvalid("trials must be at least 1".into()));
    }
    let dims = match perturbation {
        Some(p) => {
            if !(p.eta >= 0.0 && p.eta.is_finite()) {
                return Err(Error::ConfigInvalid(format!("eta must be non-negative, got {}", p.eta)));
            }
            if p.base.kind() != model.kind {
                return Err(Error::ScalarKindMismatch {
                    left: p.base.kind(),
                    right: model.kind,
                });
            }
            p.base.dims()
        }
        None => {
            if n < 3 {
                return Err(Error::ConfigInvalid(format!("tensor experiments need n >= 3, got {n}")));
            }
            [n, n, n]
        }
    };
    if dims.iter().any(|&d| d < 1) {
        return Err(dims_mismatch("positive dimensions", dims));
    }
    let records = (0..trials)
        .into_par_iter()
        .map(|t| {
            let tensor = match perturbation {
                Some(p) => perturb(&p.base, p.eta, model, t)?,
                None => {
                    let mut rng = stream_rng(model.seed, t as u64 + 1);
                    sample_tensor_with(dims, model.distribution, model.kind, &mut rng)?
                }
            };
            tensor_trial(&tensor, t, model.seed)
        })
        .collect::<Result<Vec<_>>>()?;
    let aggregate = Aggregate::from_trials(&records, None, None, dims.iter().all(|&d| d < 2));
    Ok(GapReport {
        n: dims[0],
        p: dims[0],
        zeta: None,
        beta: None,
        eta: perturbation.map(|p| p.eta),
        model,
        trials: records,
        aggregate,
    })
}

fn tensor_trial(tensor: &Tensor3, trial: usize, seed: u64) -> Result<TrialRecord> {
    let mut rec = TrialRecord {
        trial,
        seed,
        min_gap: f64::INFINITY,
        simple: true,
        smin: f64::INFINITY,
        smax: 0.0,
    };
    for mode in Mode::ALL {
        let spec = eig_hermitian(&gram(tensor, mode))?;
        rec.min_gap = rec.min_gap.min(spec.min_gap);
        rec.simple &= spec.simple;
        let top = spec.eigenvalues.first().copied().unwrap_or(0.0).max(0.0).sqrt();
        let bottom = spec.eigenvalues.last().copied().unwrap_or(0.0).max(0.0).sqrt();
        rec.smax = rec.smax.max(top);
        rec.smin = rec.smin.min(bottom);
    }
    Ok(rec)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV text: header, one row per trial, and a `#aggregate,key=value,...`
/// footer. Floats use the shortest representation that parses back exactly.
pub fn csv_string(report: &GapReport) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for t in &report.trials {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            t.trial, t.seed, t.min_gap, t.simple, t.smin, t.smax
        );
    }
    let a = &report.aggregate;
    let _ = writeln!(
        out,
        "{FOOTER_TAG},trials={},simple_frequency={},median_min_gap={},target={},empirical_prob={},bound_prob={},degenerate={}",
        a.trials,
        a.simple_frequency,
        fmt_opt(a.median_min_gap),
        fmt_opt(a.target),
        fmt_opt(a.empirical_prob),
        fmt_opt(a.bound_prob),
        a.degenerate
    );
    out
}

pub fn emit_csv(report: &GapReport, path: &Path) -> Result<()> {
    fs::write(path, csv_string(report))?;
    Ok(())
}

/// Parses CSV text written by [`csv_string`].
pub fn parse_csv(text: &str) -> Result<(Vec<TrialRecord>, Aggregate)> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(Error::Format(format!("unexpected CSV header `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    let trials = reader
        .deserialize::<TrialRecord>()
        .collect::<std::result::Result<Vec<_>, _>>()?;

    let footer = text
        .lines()
        .find(|l| l.starts_with(FOOTER_TAG))
        .ok_or_else(|| Error::Format("missing aggregate footer".into()))?;
    let mut fields = std::collections::BTreeMap::new();
    for part in footer.split(',').skip(1) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("malformed footer field `{part}`")))?;
        fields.insert(k, v);
    }
    let get = |k: &str| {
        fields
            .get(k)
            .copied()
            .ok_or_else(|| Error::Format(format!("footer lacks `{k}`")))
    };
    let num = |k: &str| -> Result<f64> {
        get(k)?
            .parse::<f64>()
            .map_err(|e| Error::Format(format!("footer `{k}`: {e}")))
    };
    let opt = |k: &str| -> Result<Option<f64>> {
        let v = get(k)?;
        if v.is_empty() {
            Ok(None)
        } else {
            v.parse::<f64>()
                .map(Some)
                .map_err(|e| Error::Format(format!("footer `{k}`: {e}")))
        }
    };
    let aggregate = Aggregate {
        trials: get("trials")?
            .parse()
            .map_err(|e| Error::Format(format!("footer `trials`: {e}")))?,
        simple_frequency: num("simple_frequency")?,
        median_min_gap: opt("median_min_gap")?,
        target: opt("target")?,
        empirical_prob: opt("empirical_prob")?,
        bound_prob: opt("bound_prob")?,
        degenerate: get("degenerate")?
            .parse()
            .map_err(|e| Error::Format(format!("footer `degenerate`: {e}")))?,
    };
    Ok((trials, aggregate))
}

pub fn read_csv(path: &Path) -> Result<(Vec<TrialRecord>, Aggregate)> {
    parse_csv(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{Distribution, ScalarKind, C64};

    fn model(dist: Distribution, seed: u64) -> RandomModel {
        RandomModel::new(dist, ScalarKind::Real, seed)
    }

    #[test]
    fn hand_computed_gap() {
        let m = CMat::from_fn(4, 2, |r, c| {
            C64::new(if r == c { [3.0, 1.0][c] } else { 0.0 }, 0.0)
        });
        let s = matrix_gap_stats(&m).unwrap();
        assert_eq!(s.min_gap, 8.0);
        assert!(s.simple);
        assert_eq!((s.smin, s.smax), (1.0, 3.0));
    }

    #[test]
    fn single_column_is_degenerate() {
        let cfg = GapExperiment::with_p(4, 1, 0.6, 3, model(Distribution::Gaussian, 1)).unwrap();
        let r = run_gap_experiment(&cfg).unwrap();
        assert!(r.aggregate.degenerate);
        assert!(r.trials.iter().all(|t| t.min_gap == f64::INFINITY));
    }

    #[test]
    fn config_validation() {
        let m = model(Distribution::Gaussian, 1);
        assert!(GapExperiment::with_p(10, 3, 0.6, 0, m).is_err());
        assert!(GapExperiment::with_zeta(10, 0.5, 0.4, 5, m).is_err());
        assert!(GapExperiment::with_zeta(10, 1.5, 2.0, 5, m).is_err());
        assert!(GapExperiment::with_zeta(3, 0.5, 0.6, 5, m).is_err());
        assert_eq!(GapExperiment::with_zeta(400, 0.5, 0.6, 5, m).unwrap().p, 20);
        assert!(run_tensor_gram_experiment(2, m, 3, None).is_err());
    }

    #[test]
    fn all_ones_tensor_is_not_simple() {
        let ones = Tensor3::from_real([3, 3, 3], vec![1.0; 27]).unwrap();
        let pert = Perturbation { base: ones, eta: 0.0 };
        let r = run_tensor_gram_experiment(3, model(Distribution::Gaussian, 0), 4, Some(&pert)).unwrap();
        assert_eq!(r.aggregate.simple_frequency, 0.0);
    }

    #[test]
    fn trial_streams_are_deterministic() {
        let cfg = GapExperiment::with_zeta(50, 0.5, 0.6, 6, model(Distribution::Rademacher, 9)).unwrap();
        assert_eq!(run_gap_experiment(&cfg).unwrap(), run_gap_experiment(&cfg).unwrap());
        let m0 = sample_trial_matrix(&cfg, 0).unwrap();
        let m1 = sample_trial_matrix(&cfg, 1).unwrap();
        assert_ne!(m0, m1);
    }

    #[test]
    fn median_and_slopes() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(vec![]), None);
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(-0.7))).collect();
        assert!((loglog_slope(&pts).unwrap() + 0.7).abs() < 1e-12);
        assert!(loglog_slope(&pts[..1]).is_err());
        // pure power law when the "−1" is negligible
        let s = predicted_slope(&[1_000_000, 2_000_000], 0.0, 1.0).unwrap();
        assert!((s + 0.5).abs() < 1e-3);
    }

    #[test]
    fn csv_round_trip() {
        let cfg = GapExperiment::with_p(20, 3, 0.6, 3, model(Distribution::Gaussian, 4)).unwrap();
        let r = run_gap_experiment(&cfg).unwrap();
        let text = csv_string(&r);
        assert_eq!(text.lines().count(), 5);
        let (trials, agg) = parse_csv(&text).unwrap();
        assert_eq!(trials, r.trials);
        assert_eq!(agg, r.aggregate);
        let mean = trials.iter().filter(|t| t.simple).count() as f64 / trials.len() as f64;
        assert_eq!(agg.simple_frequency, mean);
    }

    #[test]
    fn empty_report_csv() {
        let report = GapReport {
            n: 4,
            p: 2,
            zeta: None,
            beta: None,
            eta: None,
            model: model(Distribution::Gaussian, 0),
            trials: Vec::new(),
            aggregate: Aggregate::from_trials(&[], None, None, false),
        };
        let text = csv_string(&report);
        assert_eq!(text.lines().count(), 2);
        let (trials, agg) = parse_csv(&text).unwrap();
        assert!(trials.is_empty());
        assert_eq!(agg.trials, 0);
    }

    #[test]
    fn survival_curve_is_monotone() {
        let cfg = GapExperiment::with_zeta(100, 0.5, 0.6, 20, model(Distribution::Gaussian, 2)).unwrap();
        let r = run_gap_experiment(&cfg).unwrap();
        let ts: Vec<f64> = (0..40).map(|i| i as f64 * 0.25).collect();
        let curve = r.survival_curve(&ts);
        assert_eq!(curve[0].1, 1.0);
        assert!(curve.windows(2).all(|w| w[1].1 <= w[0].1));
    }
}
