//! Alignment of HOSVD cores by diagonal phase (or sign) triples.
//!
//! Over the reals the unknowns are signs with `s1(i)·s2(j)·s3(k) = t_ijk`,
//! a linear system over GF(2) solved exactly by elimination. Over the complex
//! numbers the unknowns are angles with
//! `|Φ_ijk − (α_i + β_j + γ_k)| mod 2π < θ_ijk`; the cyclic shift of each
//! constraint is fixed from a propagated estimate, after which the system is
//! linear and is solved by weighted least squares with a max-margin LP as
//! fallback. Every returned assignment is re-verified against all
//! constraints.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{dims_mismatch, Result};
use crate::hosvd::CoreComparison;
use crate::tensor::{CMat, ScalarKind, TransformTriple, C64};

pub type Index3 = (usize, usize, usize);

/// Slack is treated as satisfied when `residual < slack · (1 − BOUNDARY_TOL)`.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignAssignment {
    pub s1: Vec<i8>,
    pub s2: Vec<i8>,
    pub s3: Vec<i8>,
    pub consistent: bool,
}

impl SignAssignment {
    pub fn all_ones(dims: [usize; 3]) -> Self {
        Self {
            s1: vec![1; dims[0]],
            s2: vec![1; dims[1]],
            s3: vec![1; dims[2]],
            consistent: true,
        }
    }

    pub fn product(&self, (i, j, k): Index3) -> i8 {
        self.s1[i] * self.s2[j] * self.s3[k]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SignOutcome {
    Solved(SignAssignment),
    /// The listed constraints have every variable an even number of times
    /// but an odd number of `−1` targets.
    Infeasible { certificate: Vec<Index3> },
}

#[derive(Clone)]
struct Gf2Row {
    vars: Vec<u64>,
    rhs: bool,
    combo: Vec<u64>,
}

fn flip(bits: &mut [u64], pos: usize) {
    bits[pos / 64] ^= 1 << (pos % 64);
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= s);
}

fn lowest_bit(bits: &[u64]) -> Option<usize> {
    bits.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

fn bit(bits: &[u64], pos: usize) -> bool {
    bits[pos / 64] >> (pos % 64) & 1 == 1
}

/// Solves `s1(i)·s2(j)·s3(k) = target` for every constraint. Free variables
/// are set to `+1`.
pub fn solve_signs(dims: [usize; 3], targets: &BTreeMap<Index3, i8>) -> Result<SignOutcome> {
    let [l, m, n] = dims;
    let nvars = l + m + n;
    let var_words = nvars.div_ceil(64).max(1);
    let cons: Vec<(Index3, i8)> = targets.iter().map(|(&k, &v)| (k, v)).collect();
    let combo_words = cons.len().div_ceil(64).max(1);
    for &((i, j, k), t) in &cons {
        if i >= l || j >= m || k >= n {
            return Err(dims_mismatch(dims, (i, j, k)));
        }
        if t != 1 && t != -1 {
            return Err(crate::Error::ConfigInvalid(format!("sign target {t} is not ±1")));
        }
    }

    let mut pivots: Vec<Option<Gf2Row>> = vec![None; nvars];
    for (ci, &((i, j, k), t)) in cons.iter().enumerate() {
        let mut row = Gf2Row {
            vars: vec![0; var_words],
            rhs: t == -1,
            combo: vec![0; combo_words],
        };
        flip(&mut row.vars, i);
        flip(&mut row.vars, l + j);
        flip(&mut row.vars, l + m + k);
        flip(&mut row.combo, ci);
        loop {
            match lowest_bit(&row.vars) {
                None => {
                    if row.rhs {
                        let certificate = (0..cons.len())
                            .filter(|&c| bit(&row.combo, c))
                            .map(|c| cons[c].0)
                            .collect();
                        return Ok(SignOutcome::Infeasible { certificate });
                    }
                    break;
                }
                Some(lead) => match &pivots[lead] {
                    Some(p) => {
                        xor_into(&mut row.vars, &p.vars);
                        xor_into(&mut row.combo, &p.combo);
                        row.rhs ^= p.rhs;
                    }
                    None => {
                        pivots[lead] = Some(row);
                        break;
                    }
                },
            }
        }
    }

    // back substitution: pivot rows only involve variables above their lead
    let mut value = vec![false; nvars];
    for lead in (0..nvars).rev() {
        if let Some(p) = &pivots[lead] {
            let mut v = p.rhs;
            for b in lead + 1..nvars {
                if bit(&p.vars, b) {
                    v ^= value[b];
                }
            }
            value[lead] = v;
        }
    }
    let sign = |b: bool| if b { -1 } else { 1 };
    let assignment = SignAssignment {
        s1: value[..l].iter().map(|&b| sign(b)).collect(),
        s2: value[l..l + m].iter().map(|&b| sign(b)).collect(),
        s3: value[l + m..].iter().map(|&b| sign(b)).collect(),
        consistent: true,
    };
    debug_assert!(cons.iter().all(|&(idx, t)| assignment.product(idx) == t));
    Ok(SignOutcome::Solved(assignment))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseAssignment {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub max_residual: f64,
    /// Arbitrary gauge choices made beyond the two inherent to a connected
    /// constraint system (extra components, unconstrained variables).
    pub free_gauges: usize,
}

impl PhaseAssignment {
    pub fn sum(&self, (i, j, k): Index3) -> f64 {
        self.alpha[i] + self.beta[j] + self.gamma[k]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhaseOutcome {
    Solved(PhaseAssignment),
    Infeasible { violated: Vec<Index3> },
}

/// Distance on the circle, in `[0, π]`.
/// Strict test `residual < slack`, kept strict under rounding by a relative margin.
pub fn within_slack(residual: f64, slack: f64) -> bool {
    residual < slack * (1.0 - BOUNDARY_TOL)
}

pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

struct Constraint {
    vars: [usize; 3],
    phi: f64,
    slack: f64,
    weight: f64,
}

struct PhaseSystem {
    dims: [usize; 3],
    cons: Vec<Constraint>,
    incident: Vec<Vec<usize>>,
}

impl PhaseSystem {
    fn new(cmp: &CoreComparison) -> Self {
        let [l, m, n] = cmp.dims;
        let cons: Vec<Constraint> = cmp
            .phase_targets
            .iter()
            .map(|(&(i, j, k), t)| Constraint {
                vars: [i, l + j, l + m + k],
                phi: t.phi,
                slack: t.slack,
                weight: if t.weight > 0.0 { t.weight } else { 1.0 },
            })
            .collect();
        let mut incident = vec![Vec::new(); l + m + n];
        for (c, con) in cons.iter().enumerate() {
            for v in con.vars {
                incident[v].push(c);
            }
        }
        Self {
            dims: cmp.dims,
            cons,
            incident,
        }
    }

    fn nvars(&self) -> usize {
        self.incident.len()
    }

    fn sum(&self, x: &[f64], c: usize) -> f64 {
        self.cons[c].vars.iter().map(|&v| x[v]).sum()
    }

    fn residual(&self, x: &[f64], c: usize) -> f64 {
        circular_distance(self.cons[c].phi, self.sum(x, c))
    }

    fn violated(&self, x: &[f64]) -> Vec<usize> {
        (0..self.cons.len())
            .filter(|&c| {
                self.cons[c].slack < PI
                    && !within_slack(self.residual(x, c), self.cons[c].slack)
            })
            .collect()
    }

    /// Weighted circular mean of `Φ_c − (sum of the other two variables)`
    /// over the given constraints.
    fn circular_estimate(&self, x: &[f64], var: usize, cs: impl Iterator<Item = usize>) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for c in cs {
            let con = &self.cons[c];
            let others: f64 = con.vars.iter().filter(|&&v| v != var).map(|&v| x[v]).sum();
            acc += C64::from_polar(con.weight, con.phi - others);
        }
        if acc.norm() == 0.0 {
            0.0
        } else {
            acc.arg()
        }
    }

    /// Gauge-fix and propagate, then a few circular coordinate sweeps.
    fn propagate(&self) -> (Vec<f64>, usize) {
        let nv = self.nvars();
        let mut x = vec![0.0; nv];
        let mut known = vec![false; nv];
        let mut free_gauges = 0usize;
        let mut first_component = true;
        let agg = |v: usize| -> f64 { self.incident[v].iter().map(|&c| self.cons[c].weight).sum() };

        loop {
            // variable whose determined constraints carry the most weight
            let mut best: Option<(usize, f64)> = None;
            for v in 0..nv {
                if known[v] {
                    continue;
                }
                let score: f64 = self.incident[v]
                    .iter()
                    .filter(|&&c| self.cons[c].vars.iter().all(|&u| u == v || known[u]))
                    .map(|&c| self.cons[c].weight)
                    .sum();
                if score > 0.0 && best.is_none_or(|(_, s)| score > s) {
                    best = Some((v, score));
                }
            }
            if let Some((v, _)) = best {
                let ready: Vec<usize> = self.incident[v]
                    .iter()
                    .copied()
                    .filter(|&c| self.cons[c].vars.iter().all(|&u| u == v || known[u]))
                    .collect();
                x[v] = self.circular_estimate(&x, v, ready.into_iter());
                known[v] = true;
                continue;
            }
            // stuck: gauge one more variable. Prefer one touching a known
            // variable; otherwise start a new component at its heaviest
            // variable and its heaviest partner.
            let touching = (0..nv)
                .filter(|&v| !known[v] && !self.incident[v].is_empty())
                .filter(|&v| {
                    self.incident[v]
                        .iter()
                        .any(|&c| self.cons[c].vars.iter().any(|&u| known[u]))
                })
                .max_by(|&a, &b| agg(a).total_cmp(&agg(b)).then(b.cmp(&a)));
            if let Some(v) = touching {
                known[v] = true;
                free_gauges += 1;
                continue;
            }
            let fresh = (0..nv)
                .filter(|&v| !known[v] && !self.incident[v].is_empty())
                .max_by(|&a, &b| agg(a).total_cmp(&agg(b)).then(b.cmp(&a)));
            match fresh {
                Some(v) => {
                    known[v] = true;
                    let partner = self.incident[v]
                        .iter()
                        .flat_map(|&c| self.cons[c].vars)
                        .filter(|&u| u != v && !known[u])
                        .max_by(|&a, &b| agg(a).total_cmp(&agg(b)).then(b.cmp(&a)));
                    if let Some(u) = partner {
                        known[u] = true;
                    }
                    if !first_component {
                        free_gauges += 2;
                    }
                    first_component = false;
                }
                None => break,
            }
        }
        free_gauges += (0..nv).filter(|&v| self.incident[v].is_empty()).count();

        for _ in 0..8 {
            let mut moved = 0.0f64;
            for v in 0..nv {
                if self.incident[v].is_empty() {
                    continue;
                }
                let new = self.circular_estimate(&x, v, self.incident[v].iter().copied());
                moved = moved.max(circular_distance(new, x[v]));
                x[v] = new;
            }
            if moved < 1e-14 {
                break;
            }
        }
        (x, free_gauges)
    }

    /// Unwrapped targets `Φ_c − 2π·round((Φ_c − sum_c(x0)) / 2π)`.
    fn unwrapped_targets(&self, x0: &[f64]) -> Vec<f64> {
        (0..self.cons.len())
            .map(|c| {
                let phi = self.cons[c].phi;
                phi - TAU * ((phi - self.sum(x0, c)) / TAU).round()
            })
            .collect()
    }

    /// Weighted least squares `min Σ w_c (Φ'_c − a_c·x)²` near `x0`.
    fn least_squares(&self, x0: &[f64]) -> Option<Vec<f64>> {
        let nv = self.nvars();
        let targets = self.unwrapped_targets(x0);
        let mut normal = DMatrix::<f64>::zeros(nv, nv);
        let mut rhs = DVector::<f64>::zeros(nv);
        for (c, con) in self.cons.iter().enumerate() {
            if con.slack >= PI {
                continue;
            }
            let w = 1.0 / con.slack.max(1e-12).powi(2);
            let r = targets[c] - self.sum(x0, c);
            for &a in &con.vars {
                rhs[a] += w * r;
                for &b in &con.vars {
                    normal[(a, b)] += w;
                }
            }
        }
        let scale = (0..nv).map(|v| normal[(v, v)]).fold(0.0, f64::max).max(1.0);
        for v in 0..nv {
            normal[(v, v)] += 1e-12 * scale;
        }
        let delta = normal.cholesky()?.solve(&rhs);
        Some(x0.iter().zip(delta.iter()).map(|(a, d)| a + d).collect())
    }

    /// Max-margin LP: maximise `s` subject to
    /// `|Φ'_c − a_c·x| ≤ θ_c (1 − s)`, `s ≤ 1`.
    fn max_margin(&self, x0: &[f64]) -> Option<Vec<f64>> {
        let nv = self.nvars();
        let targets = self.unwrapped_targets(x0);
        let mut lp = Problem::new(OptimizationDirection::Maximize);
        let d: Vec<_> = (0..nv).map(|_| lp.add_var(0.0, (-TAU, TAU))).collect();
        let s = lp.add_var(1.0, (-1e6, 1.0));
        for (c, con) in self.cons.iter().enumerate() {
            if con.slack >= PI {
                continue;
            }
            let r = targets[c] - self.sum(x0, c);
            let mut up: Vec<_> = con.vars.iter().map(|&v| (d[v], 1.0)).collect();
            up.push((s, con.slack));
            lp.add_constraint(up.as_slice(), ComparisonOp::Le, con.slack - r);
            let mut down: Vec<_> = con.vars.iter().map(|&v| (d[v], -1.0)).collect();
            down.push((s, con.slack));
            lp.add_constraint(down.as_slice(), ComparisonOp::Le, con.slack + r);
        }
        let sol = lp.solve().ok()?;
        if sol[s] <= 0.0 {
            return None;
        }
        Some((0..nv).map(|v| x0[v] + sol[d[v]]).collect())
    }

    fn assignment(&self, x: &[f64], free_gauges: usize) -> PhaseAssignment {
        let [l, m, _] = self.dims;
        let wrap = |v: &f64| {
            let w = v.rem_euclid(TAU);
            if w >= TAU {
                0.0
            } else {
                w
            }
        };
        let max_residual = (0..self.cons.len())
            .map(|c| self.residual(x, c))
            .fold(0.0, f64::max);
        PhaseAssignment {
            alpha: x[..l].iter().map(wrap).collect(),
            beta: x[l..l + m].iter().map(wrap).collect(),
            gamma: x[l + m..].iter().map(wrap).collect(),
            max_residual,
            free_gauges,
        }
    }

    fn index_of(&self, c: usize) -> Index3 {
        let [l, m, _] = self.dims;
        let [i, j, k] = self.cons[c].vars;
        (i, j - l, k - l - m)
    }
}

/// Solves the cyclic phase system defined by `cmp.phase_targets`.
pub fn solve_phases(cmp: &CoreComparison) -> PhaseOutcome {
    let sys = PhaseSystem::new(cmp);
    let (x0, free_gauges) = sys.propagate();

    let mut base = x0.clone();
    for _ in 0..2 {
        if let Some(x) = sys.least_squares(&base) {
            if sys.violated(&x).is_empty() {
                return PhaseOutcome::Solved(sys.assignment(&x, free_gauges));
            }
        }
        if sys.violated(&base).is_empty() {
            return PhaseOutcome::Solved(sys.assignment(&base, free_gauges));
        }
        match sys.max_margin(&base) {
            Some(x) if sys.violated(&x).is_empty() => {
                return PhaseOutcome::Solved(sys.assignment(&x, free_gauges));
            }
            Some(x) => base = x,
            None => break,
        }
    }
    let violated = sys.violated(&x0);
    let violated = if violated.is_empty() {
        sys.violated(&base)
    } else {
        violated
    };
    PhaseOutcome::Infeasible {
        violated: violated.into_iter().map(|c| sys.index_of(c)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Alignment {
    Phases(PhaseAssignment),
    Signs(SignAssignment),
}

impl Alignment {
    fn diagonals(&self) -> [Vec<C64>; 3] {
        match self {
            Alignment::Phases(p) => [&p.alpha, &p.beta, &p.gamma]
                .map(|v| v.iter().map(|&a| C64::from_polar(1.0, a)).collect()),
            Alignment::Signs(s) => [&s.s1, &s.s2, &s.s3]
                .map(|v| v.iter().map(|&x| C64::new(f64::from(x), 0.0)).collect()),
        }
    }
}

/// Witness `(V₁D₁U₁^*, V₂D₂U₂^*, V₃D₃U₃^*)` with `D = diag(e^{iα}), diag(e^{iβ}),
/// diag(e^{iγ})` (or the sign diagonals), where `U` are the bases of the
/// source tensor and `V` those of the target.
pub fn assemble_witness(
    source_bases: &TransformTriple,
    target_bases: &TransformTriple,
    alignment: &Alignment,
) -> Result<TransformTriple> {
    let dims = source_bases.dims();
    if target_bases.dims() != dims {
        return Err(dims_mismatch(dims, target_bases.dims()));
    }
    let diags = alignment.diagonals();
    for (d, diag) in diags.iter().enumerate() {
        if diag.len() != dims[d] {
            return Err(dims_mismatch(dims, diags.each_ref().map(|x| x.len())));
        }
    }
    let kind = match alignment {
        Alignment::Signs(_) if source_bases.kind() == ScalarKind::Real
            && target_bases.kind() == ScalarKind::Real => ScalarKind::Real,
        _ => ScalarKind::Complex,
    };
    let factor = |d: usize| -> CMat {
        let u = &source_bases.factors()[d];
        let v = &target_bases.factors()[d];
        let mut vd = v.clone();
        for (c, &z) in diags[d].iter().enumerate() {
            vd.column_mut(c).iter_mut().for_each(|x| *x *= z);
        }
        let mut out = vd * u.adjoint();
        if kind == ScalarKind::Real {
            out.iter_mut().for_each(|z| z.im = 0.0);
        }
        out
    };
    TransformTriple::new(factor(0), factor(1), factor(2), kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hosvd::PhaseTarget;
    use crate::tensor::stream_rng;
    use rand::Rng;

    fn cmp_from(dims: [usize; 3], targets: Vec<(Index3, f64, f64)>) -> CoreComparison {
        CoreComparison {
            dims,
            support_ok: true,
            modulus_ok: true,
            phase_targets: targets
                .into_iter()
                .map(|(idx, phi, slack)| {
                    (
                        idx,
                        PhaseTarget {
                            phi: phi.rem_euclid(TAU),
                            slack,
                            weight: 1.0,
                        },
                    )
                })
                .collect(),
            threshold_used: 0.0,
            radius: 0.0,
        }
    }

    fn all_indices(dims: [usize; 3]) -> Vec<Index3> {
        let mut v = Vec::new();
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    v.push((i, j, k));
                }
            }
        }
        v
    }

    #[test]
    fn all_plus_targets() {
        let targets = all_indices([2, 3, 2]).into_iter().map(|i| (i, 1)).collect();
        match solve_signs([2, 3, 2], &targets).unwrap() {
            SignOutcome::Solved(s) => {
                assert_eq!(s, SignAssignment::all_ones([2, 3, 2]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn recovers_planted_signs() {
        let (s1, s2, s3) = ([1i8, -1], [1i8, 1], [1i8, -1]);
        let targets: BTreeMap<_, _> = all_indices([2, 2, 2])
            .into_iter()
            .map(|(i, j, k)| ((i, j, k), s1[i] * s2[j] * s3[k]))
            .collect();
        let SignOutcome::Solved(s) = solve_signs([2, 2, 2], &targets).unwrap() else {
            panic!("expected a solution");
        };
        for (&idx, &t) in &targets {
            assert_eq!(s.product(idx), t);
        }
    }

    #[test]
    fn four_cycle_certificate() {
        let targets: BTreeMap<_, _> = [
            ((0, 0, 0), 1),
            ((1, 0, 0), 1),
            ((0, 1, 0), 1),
            ((1, 1, 0), -1),
        ]
        .into_iter()
        .collect();
        let SignOutcome::Infeasible { certificate } = solve_signs([2, 2, 2], &targets).unwrap()
        else {
            panic!("expected infeasible");
        };
        assert_eq!(certificate, vec![(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 0)]);

        // with extra consistent constraints the certificate is still an odd cycle
        let mut more = targets.clone();
        more.insert((0, 0, 1), 1);
        more.insert((1, 1, 1), 1);
        let SignOutcome::Infeasible { certificate } = solve_signs([2, 2, 2], &more).unwrap() else {
            panic!("expected infeasible");
        };
        let mut counts = [0usize; 6];
        let mut negatives = 0;
        for &(i, j, k) in &certificate {
            counts[i] += 1;
            counts[2 + j] += 1;
            counts[4 + k] += 1;
            if more[&(i, j, k)] == -1 {
                negatives += 1;
            }
        }
        assert!(counts.iter().all(|c| c % 2 == 0));
        assert_eq!(negatives % 2, 1);
    }

    #[test]
    fn zero_phases() {
        let dims = [3, 3, 3];
        let cmp = cmp_from(dims, all_indices(dims).into_iter().map(|i| (i, 0.0, 0.1)).collect());
        let PhaseOutcome::Solved(p) = solve_phases(&cmp) else {
            panic!("expected solution");
        };
        assert!(p.max_residual < 1e-14);
        assert_eq!(p.free_gauges, 0);
        for idx in all_indices(dims) {
            assert!(circular_distance(p.sum(idx), 0.0) < 1e-14);
        }
    }

    fn planted(dims: [usize; 3], seed: u64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut rng = stream_rng(seed, 0);
        let mut draw = |n: usize| (0..n).map(|_| rng.random_range(0.0..TAU)).collect::<Vec<_>>();
        (draw(dims[0]), draw(dims[1]), draw(dims[2]))
    }

    #[test]
    fn recovers_planted_phases() {
        let dims = [4, 3, 5];
        let (a, b, g) = planted(dims, 3);
        let cmp = cmp_from(
            dims,
            all_indices(dims)
                .into_iter()
                .map(|(i, j, k)| ((i, j, k), a[i] + b[j] + g[k], 1e-3))
                .collect(),
        );
        let PhaseOutcome::Solved(p) = solve_phases(&cmp) else {
            panic!("expected solution");
        };
        for (i, j, k) in all_indices(dims) {
            assert!(circular_distance(p.sum((i, j, k)), a[i] + b[j] + g[k]) < 1e-8);
        }
        assert!(p.alpha.iter().chain(&p.beta).chain(&p.gamma).all(|x| (0.0..TAU).contains(x)));
    }

    #[test]
    fn corrupted_constraint_is_reported() {
        let dims = [3, 3, 3];
        for corrupt in [(0, 0, 0), (1, 2, 0), (2, 2, 2)] {
            let (a, b, g) = planted(dims, 11);
            let cmp = cmp_from(
                dims,
                all_indices(dims)
                    .into_iter()
                    .map(|(i, j, k)| {
                        let mut phi = a[i] + b[j] + g[k];
                        if (i, j, k) == corrupt {
                            phi += PI;
                        }
                        ((i, j, k), phi, 0.1)
                    })
                    .collect(),
            );
            match solve_phases(&cmp) {
                PhaseOutcome::Infeasible { violated } => assert_eq!(violated, vec![corrupt]),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn gauge_shift_preserves_residuals() {
        let dims = [3, 2, 2];
        let (a, b, g) = planted(dims, 5);
        let theta = 1.234;
        for idx @ (i, j, k) in all_indices(dims) {
            let before = a[i] + b[j] + g[k];
            let after = (a[i] + theta) + (b[j] - theta) + g[k];
            assert!(circular_distance(before, after) < 1e-14, "{idx:?}");
        }
    }

    #[test]
    fn disconnected_system_is_gauged() {
        // two constraints sharing nothing, plus an unconstrained variable
        let cmp = cmp_from(
            [3, 2, 2],
            vec![((0, 0, 0), 1.0, 0.01), ((1, 1, 1), 2.0, 0.01)],
        );
        let PhaseOutcome::Solved(p) = solve_phases(&cmp) else {
            panic!("expected solution");
        };
        assert!(circular_distance(p.sum((0, 0, 0)), 1.0) < 0.01);
        assert!(circular_distance(p.sum((1, 1, 1)), 2.0) < 0.01);
        assert_eq!(p.alpha[2], 0.0);
        assert!(p.free_gauges >= 3);
    }

    #[test]
    fn witness_from_identity_bases() {
        let dims = [2, 2, 2];
        let id = TransformTriple::identity(dims, ScalarKind::Real);
        let zero = Alignment::Phases(PhaseAssignment {
            alpha: vec![0.0; 2],
            beta: vec![0.0; 2],
            gamma: vec![0.0; 2],
            max_residual: 0.0,
            free_gauges: 0,
        });
        let w = assemble_witness(&id, &id, &zero).unwrap();
        assert!(w.factors().iter().all(|f| (f - CMat::identity(2, 2)).norm() == 0.0));

        let neg = Alignment::Signs(SignAssignment {
            s1: vec![-1; 2],
            s2: vec![-1; 2],
            s3: vec![-1; 2],
            consistent: true,
        });
        let w = assemble_witness(&id, &id, &neg).unwrap();
        assert_eq!(w.kind(), ScalarKind::Real);
        assert!(w.factors().iter().all(|f| (f + CMat::identity(2, 2)).norm() == 0.0));
        let a = crate::tensor::Tensor3::from_real([2, 2, 2], (1..=8).map(f64::from).collect())
            .unwrap();
        let out = crate::tensor::apply_action(&w, &a).unwrap();
        assert_eq!(out, a.scaled(-1.0));
    }
}
