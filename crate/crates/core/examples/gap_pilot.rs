//! Pilot sweep for the gap-scaling check: median smallest eigenvalue gap of
//! `MᵀM` for Gaussian `n × ⌊√n⌋` matrices, and the log-log slope predicted by
//! `(n^{(1−ζ)/2} − 1)·n^{−β}` for a few values of `β`.
//!
//! Run with `cargo run --release -p tensor-iso --example gap_pilot`.

use tensor_iso::gaplab::{
    loglog_slope, predicted_slope, run_gap_experiment, GapExperiment, PILOT_BETA,
};
use tensor_iso::{Distribution, RandomModel, ScalarKind};

fn main() -> tensor_iso::Result<()> {
    let ns = [100usize, 200, 400, 800];
    let zeta = 0.5;
    let mut points = Vec::new();
    for (i, &n) in ns.iter().enumerate() {
        let model = RandomModel::new(Distribution::Gaussian, ScalarKind::Real, 1000 + i as u64);
        let cfg = GapExperiment::with_zeta(n, zeta, PILOT_BETA, 100, model)?;
        let report = run_gap_experiment(&cfg)?;
        let median = report.aggregate.median_min_gap.unwrap_or(f64::NAN);
        println!(
            "n = {n:4}  p = {:2}  median gap = {median:.4}  simple = {:.2}  median / scale = {:.2}",
            cfg.p,
            report.aggregate.simple_frequency,
            median / cfg.target()
        );
        points.push((n as f64, median));
    }
    println!("empirical slope = {:.4}", loglog_slope(&points)?);
    for beta in [0.51, 0.55, 0.6, 0.75] {
        println!("beta = {beta:.2}  predicted slope = {:.4}", predicted_slope(&ns, zeta, beta)?);
    }
    Ok(())
}
