//! Isomorphism of 3-uniform tripartite hypergraphs through ±1 adjacency
//! tensors.
//!
//! Relabelling the parts by permutations `(π₁, π₂, π₃)` acts on the adjacency
//! tensor by permutation matrices, so each mode Gram matrix of `H` is a
//! conjugate of the one of `G`. With simple spectra the eigenvectors agree up
//! to sign, which pins down every `π_d` from the rows of the eigenvector
//! matrices. A YES answer is always checked on the edge sets themselves.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::decision::Verdict;
use crate::error::{dims_mismatch, Error, Result};
use crate::spectral::{eig_hermitian, max_eigenvalue_deviation, SpectralData};
use crate::tensor::{gram, stream_rng, CMat, Mode, ScalarKind, Tensor3, C64};

pub type Edge = (usize, usize, usize);

/// Relative tolerance for comparing Gram spectra.
pub const SPECTRUM_TOL: f64 = 1e-8;
/// Tolerance for matching eigenvector rows and signs.
pub const MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripartiteHypergraph {
    sizes: [usize; 3],
    edges: BTreeSet<Edge>,
}

impl TripartiteHypergraph {
    /// Fails on out-of-range indices or repeated edges.
    pub fn new(sizes: [usize; 3], edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        if sizes.contains(&0) {
            return Err(Error::ConfigInvalid(format!("part sizes must be positive, got {sizes:?}")));
        }
        let mut set = BTreeSet::new();
        for e in edges {
            if e.0 >= sizes[0] || e.1 >= sizes[1] || e.2 >= sizes[2] {
                return Err(Error::Format(format!("edge {e:?} out of range for parts {sizes:?}")));
            }
            if !set.insert(e) {
                return Err(Error::Format(format!("duplicate edge {e:?}")));
            }
        }
        Ok(Self { sizes, edges: set })
    }

    /// Each of the `ℓ·m·n` possible edges is present independently with
    /// probability 1/2.
    pub fn random(sizes: [usize; 3], seed: u64) -> Result<Self> {
        let mut rng = stream_rng(seed, 0);
        let mut edges = Vec::new();
        for i in 0..sizes[0] {
            for j in 0..sizes[1] {
                for k in 0..sizes[2] {
                    if rng.random::<bool>() {
                        edges.push((i, j, k));
                    }
                }
            }
        }
        Self::new(sizes, edges)
    }

    pub fn sizes(&self) -> [usize; 3] {
        self.sizes
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.contains(&e)
    }

    /// Copy with edge `e` added if absent or removed if present.
    pub fn toggled(&self, e: Edge) -> Result<Self> {
        if e.0 >= self.sizes[0] || e.1 >= self.sizes[1] || e.2 >= self.sizes[2] {
            return Err(Error::Format(format!("edge {e:?} out of range for parts {:?}", self.sizes)));
        }
        let mut out = self.clone();
        if !out.edges.remove(&e) {
            out.edges.insert(e);
        }
        Ok(out)
    }

    /// Text format: a first line `ℓ m n`, then one 1-based edge `i j k` per
    /// line. Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Format("empty hypergraph file".into()))?;
        let sizes = parse_triple(header, 1)?;
        let mut edges = Vec::new();
        for (lineno, line) in lines {
            let [i, j, k] = parse_triple(line, lineno + 1)?;
            if i == 0 || j == 0 || k == 0 {
                return Err(Error::Format(format!("line {}: indices are 1-based", lineno + 1)));
            }
            edges.push((i - 1, j - 1, k - 1));
        }
        Self::new(sizes, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.sizes[0], self.sizes[1], self.sizes[2]);
        for &(i, j, k) in &self.edges {
            out.push_str(&format!("{} {} {}\n", i + 1, j + 1, k + 1));
        }
        out
    }
}

fn parse_triple(line: &str, lineno: usize) -> Result<[usize; 3]> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(Error::Format(format!("line {lineno}: expected three integers, got `{line}`")));
    }
    let mut out = [0usize; 3];
    for (slot, p) in out.iter_mut().zip(&parts) {
        *slot = p
            .parse()
            .map_err(|_| Error::Format(format!("line {lineno}: `{p}` is not a non-negative integer")))?;
    }
    Ok(out)
}

/// Three permutations; `perms[d][x]` is the new label of vertex `x` in part `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermTriple {
    perms: [Vec<usize>; 3],
}

impl PermTriple {
    pub fn new(p1: Vec<usize>, p2: Vec<usize>, p3: Vec<usize>) -> Result<Self> {
        for (d, p) in [&p1, &p2, &p3].into_iter().enumerate() {
            let mut seen = vec![false; p.len()];
            for &x in p {
                if x >= p.len() || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::ConfigInvalid(format!(
                        "part {} map is not a bijection",
                        d + 1
                    )));
                }
            }
        }
        Ok(Self {
            perms: [p1, p2, p3],
        })
    }

    pub fn identity(sizes: [usize; 3]) -> Self {
        Self {
            perms: sizes.map(|s| (0..s).collect()),
        }
    }

    pub fn random(sizes: [usize; 3], seed: u64) -> Self {
        let perms = [0usize, 1, 2].map(|d| {
            let mut rng = stream_rng(seed, d as u64 + 1);
            let mut p: Vec<usize> = (0..sizes[d]).collect();
            p.shuffle(&mut rng);
            p
        });
        Self { perms }
    }

    pub fn perms(&self) -> &[Vec<usize>; 3] {
        &self.perms
    }

    pub fn sizes(&self) -> [usize; 3] {
        [self.perms[0].len(), self.perms[1].len(), self.perms[2].len()]
    }

    pub fn apply(&self, (i, j, k): Edge) -> Edge {
        (self.perms[0][i], self.perms[1][j], self.perms[2][k])
    }

    pub fn inverse(&self) -> Self {
        let perms = self.perms.clone().map(|p| {
            let mut inv = vec![0; p.len()];
            for (x, &y) in p.iter().enumerate() {
                inv[y] = x;
            }
            inv
        });
        Self { perms }
    }

    /// The same maps written 1-based, for reports.
    pub fn one_based(&self) -> [Vec<usize>; 3] {
        self.perms.clone().map(|p| p.into_iter().map(|x| x + 1).collect())
    }
}

impl fmt::Display for PermTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (d, p) in self.one_based().iter().enumerate() {
            let items: Vec<String> = p.iter().map(ToString::to_string).collect();
            writeln!(f, "pi{}: {}", d + 1, items.join(" "))?;
        }
        Ok(())
    }
}

/// `π ↷ G`: vertex `x` of part `d` becomes `π_d(x)`.
pub fn relabel(g: &TripartiteHypergraph, pi: &PermTriple) -> Result<TripartiteHypergraph> {
    if pi.sizes() != g.sizes() {
        return Err(dims_mismatch(g.sizes(), pi.sizes()));
    }
    TripartiteHypergraph::new(g.sizes(), g.edges().iter().map(|&e| pi.apply(e)))
}

/// Real tensor with `+1` on edges and `−1` elsewhere.
pub fn adjacency_tensor(g: &TripartiteHypergraph) -> Tensor3 {
    Tensor3::from_fn(g.sizes(), ScalarKind::Real, |i, j, k| {
        C64::new(if g.contains((i, j, k)) { 1.0 } else { -1.0 }, 0.0)
    })
    .expect("hypergraph part sizes are positive")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperDecision {
    pub verdict: Verdict,
    #[serde(skip)]
    pub perms: Option<PermTriple>,
    /// 1-based maps when the verdict is YES.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutations: Option<[Vec<usize>; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub spectral_deviation: Vec<f64>,
    pub min_gaps: Vec<f64>,
}

impl HyperDecision {
    fn stop(verdict: Verdict, reason: impl Into<String>, dev: Vec<f64>, gaps: Vec<f64>) -> Self {
        Self {
            verdict,
            perms: None,
            permutations: None,
            reason: Some(reason.into()),
            spectral_deviation: dev,
            min_gaps: gaps,
        }
    }
}

enum ModeMatch {
    Perm(Vec<usize>),
    Ambiguous(String),
    Mismatch(String),
}

/// Finds `π` with `|V|[π(r), :] ≈ |U|[r, :]` and checks `V ≈ P U D` for a
/// diagonal sign matrix `D`.
fn match_mode(u: &CMat, v: &CMat) -> ModeMatch {
    let n = u.nrows();
    let dist = |r: usize, s: usize| {
        (0..n)
            .map(|c| (u[(r, c)].re.abs() - v[(s, c)].re.abs()).abs())
            .fold(0.0, f64::max)
    };
    let mut perm = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for r in 0..n {
        let candidates: Vec<usize> = (0..n).filter(|&s| dist(r, s) <= MATCH_TOL).collect();
        match candidates.as_slice() {
            [] => return ModeMatch::Mismatch(format!("eigenvector row {} has no partner", r + 1)),
            [s] => {
                if std::mem::replace(&mut taken[*s], true) {
                    return ModeMatch::Ambiguous(format!("eigenvector row {} matched twice", s + 1));
                }
                perm[r] = *s;
            }
            _ => {
                return ModeMatch::Ambiguous(format!(
                    "eigenvector row {} has {} candidate partners",
                    r + 1,
                    candidates.len()
                ))
            }
        }
    }
    // signs: column c of V must equal ±(column c of U) moved by π
    for c in 0..n {
        let dot: f64 = (0..n).map(|r| u[(r, c)].re * v[(perm[r], c)].re).sum();
        let sign = if dot >= 0.0 { 1.0 } else { -1.0 };
        let worst = (0..n)
            .map(|r| (v[(perm[r], c)].re - sign * u[(r, c)].re).abs())
            .fold(0.0, f64::max);
        if worst > MATCH_TOL {
            return ModeMatch::Mismatch(format!("eigenvector {} is not a signed permutation image", c + 1));
        }
    }
    ModeMatch::Perm(perm)
}

/// Spectral test; the YES answer carries permutations verified on edges.
pub fn decide_hypergraph_iso(g: &TripartiteHypergraph, h: &TripartiteHypergraph) -> Result<HyperDecision> {
    if g.sizes() != h.sizes() {
        return Err(dims_mismatch(g.sizes(), h.sizes()));
    }
    let (ag, ah) = (adjacency_tensor(g), adjacency_tensor(h));
    let mut spectra: Vec<(SpectralData, SpectralData, f64)> = Vec::with_capacity(3);
    let mut deviations = Vec::new();
    let mut gaps = Vec::new();
    for mode in Mode::ALL {
        let (gg, gh) = (gram(&ag, mode), gram(&ah, mode));
        let tol = SPECTRUM_TOL * gg.norm().max(1.0);
        let (sg, sh) = (eig_hermitian(&gg)?, eig_hermitian(&gh)?);
        deviations.push(max_eigenvalue_deviation(&sg.eigenvalues, &sh.eigenvalues)?);
        gaps.push(sg.min_gap.min(sh.min_gap));
        spectra.push((sg, sh, tol));
    }
    for (d, (_, _, tol)) in spectra.iter().enumerate() {
        if deviations[d] > *tol {
            return Ok(HyperDecision::stop(
                Verdict::No,
                format!("mode-{} spectra differ", d + 1),
                deviations,
                gaps,
            ));
        }
    }
    for (d, (_, _, tol)) in spectra.iter().enumerate() {
        if !(gaps[d] > 2.0 * tol) {
            return Ok(HyperDecision::stop(
                Verdict::CannotDecide,
                format!("mode-{} spectrum is not simple", d + 1),
                deviations,
                gaps,
            ));
        }
    }
    let mut perms: Vec<Vec<usize>> = Vec::with_capacity(3);
    for (d, (sg, sh, _)) in spectra.iter().enumerate() {
        match match_mode(&sg.eigenvectors, &sh.eigenvectors) {
            ModeMatch::Perm(p) => perms.push(p),
            ModeMatch::Ambiguous(why) => {
                return Ok(HyperDecision::stop(
                    Verdict::CannotDecide,
                    format!("mode {}: {why}", d + 1),
                    deviations,
                    gaps,
                ))
            }
            ModeMatch::Mismatch(why) => {
                return Ok(HyperDecision::stop(
                    Verdict::No,
                    format!("mode {}: {why}", d + 1),
                    deviations,
                    gaps,
                ))
            }
        }
    }
    let [p1, p2, p3]: [Vec<usize>; 3] = perms.try_into().expect("three modes");
    let pi = PermTriple::new(p1, p2, p3)?;
    if relabel(g, &pi)? != *h {
        return Ok(HyperDecision::stop(
            Verdict::No,
            "recovered relabelling does not map the edge sets onto each other",
            deviations,
            gaps,
        ));
    }
    Ok(HyperDecision {
        verdict: Verdict::Yes,
        permutations: Some(pi.one_based()),
        perms: Some(pi),
        reason: None,
        spectral_deviation: deviations,
        min_gaps: gaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_examples() {
        let empty = TripartiteHypergraph::new([2, 3, 2], []).unwrap();
        assert!(adjacency_tensor(&empty).data().iter().all(|z| z.re == -1.0));
        let mut all = Vec::new();
        for i in 0..2 {
            for j in 0..3 {
                for k in 0..2 {
                    all.push((i, j, k));
                }
            }
        }
        let full = TripartiteHypergraph::new([2, 3, 2], all).unwrap();
        assert!(adjacency_tensor(&full).data().iter().all(|z| z.re == 1.0));
        let one = TripartiteHypergraph::new([2, 2, 2], [(0, 0, 0)]).unwrap();
        let t = adjacency_tensor(&one);
        assert_eq!(t.data().iter().filter(|z| z.re == 1.0).count(), 1);
        assert_eq!(t.get(0, 0, 0).re, 1.0);
    }

    #[test]
    fn construction_errors() {
        assert!(TripartiteHypergraph::new([2, 2, 2], [(2, 0, 0)]).is_err());
        assert!(TripartiteHypergraph::new([2, 2, 2], [(1, 0, 0), (1, 0, 0)]).is_err());
        assert!(PermTriple::new(vec![0, 0], vec![0], vec![0]).is_err());
        assert!(PermTriple::new(vec![1, 0], vec![0], vec![0]).is_ok());
    }

    #[test]
    fn text_round_trip() {
        let g = TripartiteHypergraph::random([3, 4, 2], 5).unwrap();
        let back = TripartiteHypergraph::parse(&g.to_text()).unwrap();
        assert_eq!(back, g);
        let parsed = TripartiteHypergraph::parse("# comment\n2 2 2\n1 1 1\n\n2 2 1\n").unwrap();
        assert_eq!(parsed.edges().len(), 2);
        assert!(parsed.contains((1, 1, 0)));
        assert!(TripartiteHypergraph::parse("2 2 2\n0 1 1\n").is_err());
        assert!(TripartiteHypergraph::parse("2 2\n").is_err());
        assert!(TripartiteHypergraph::parse("").is_err());
    }

    #[test]
    fn inverse_undoes_relabel() {
        let g = TripartiteHypergraph::random([4, 5, 3], 1).unwrap();
        let pi = PermTriple::random([4, 5, 3], 2);
        let h = relabel(&g, &pi).unwrap();
        assert_eq!(relabel(&h, &pi.inverse()).unwrap(), g);
    }

    #[test]
    fn identical_graphs_give_identity() {
        let g = TripartiteHypergraph::random([6, 6, 6], 3).unwrap();
        let d = decide_hypergraph_iso(&g, &g).unwrap();
        assert_eq!(d.verdict, Verdict::Yes, "{:?}", d.reason);
        assert_eq!(d.perms.unwrap(), PermTriple::identity([6, 6, 6]));
    }

    #[test]
    fn relabelled_graph_is_recognised() {
        let g = TripartiteHypergraph::random([8, 8, 8], 11).unwrap();
        let pi = PermTriple::random([8, 8, 8], 12);
        let h = relabel(&g, &pi).unwrap();
        let d = decide_hypergraph_iso(&g, &h).unwrap();
        assert_eq!(d.verdict, Verdict::Yes, "{:?}", d.reason);
        assert_eq!(relabel(&g, d.perms.as_ref().unwrap()).unwrap(), h);
    }

    #[test]
    fn toggled_edge_is_rejected() {
        let g = TripartiteHypergraph::random([8, 8, 8], 21).unwrap();
        let h = g.toggled((3, 4, 5)).unwrap();
        let d = decide_hypergraph_iso(&g, &h).unwrap();
        assert_eq!(d.verdict, Verdict::No);
    }

    #[test]
    fn symmetric_graph_cannot_be_decided() {
        // the complete hypergraph has a Gram matrix with a repeated eigenvalue
        let mut all = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    all.push((i, j, k));
                }
            }
        }
        let g = TripartiteHypergraph::new([3, 3, 3], all).unwrap();
        let d = decide_hypergraph_iso(&g, &g).unwrap();
        assert_eq!(d.verdict, Verdict::CannotDecide);
    }
}
