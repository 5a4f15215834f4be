//! Dense order-3 tensors and the action of `U(ℓ) × U(m) × U(n)` on them.
//!
//! Entries are stored as complex doubles in lexicographic `(i, j, k)` order
//! regardless of [`ScalarKind`]; a real tensor is one whose imaginary parts
//! are all exactly zero, which every constructor enforces.

mod io;
mod random;

use std::fmt;
use std::ops::Index;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{dims_mismatch, Error, Result};

pub use io::{
    load_tensor, load_witness, read_t3b, read_witness_t3b, save_tensor, save_witness, write_t3b,
    write_witness_t3b, TensorJson, WitnessJson,
};
pub use random::{
    sample_haar_triple, sample_haar_unitary, sample_tensor, stream_rng, Distribution, RandomModel,
};
pub(crate) use random::sample_tensor_with;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Real,
    Complex,
}

impl ScalarKind {
    pub fn tag(self) -> u8 {
        match self {
            ScalarKind::Real => 0,
            ScalarKind::Complex => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(ScalarKind::Real),
            1 => Some(ScalarKind::Complex),
            _ => None,
        }
    }
}

impl fmt::Display for ScalarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarKind::Real => f.write_str("real"),
            ScalarKind::Complex => f.write_str("complex"),
        }
    }
}

/// Tensor mode, 1-based in the usual mathematical convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    One,
    Two,
    Three,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::One, Mode::Two, Mode::Three];

    pub fn index(self) -> usize {
        match self {
            Mode::One => 0,
            Mode::Two => 1,
            Mode::Three => 2,
        }
    }

    pub fn number(self) -> usize {
        self.index() + 1
    }
}

impl TryFrom<usize> for Mode {
    type Error = Error;

    fn try_from(value: usize) -> Result<Self> {
        match value {
            1 => Ok(Mode::One),
            2 => Ok(Mode::Two),
            3 => Ok(Mode::Three),
            other => Err(Error::InvalidMode(other)),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    dims: [usize; 3],
    kind: ScalarKind,
    data: Vec<C64>,
}

impl Tensor3 {
    pub fn zeros(dims: [usize; 3], kind: ScalarKind) -> Result<Self> {
        check_dims(dims)?;
        Ok(Self {
            dims,
            kind,
            data: vec![C64::new(0.0, 0.0); dims.iter().product()],
        })
    }

    pub fn from_real(dims: [usize; 3], entries: Vec<f64>) -> Result<Self> {
        Self::from_complex_kind(
            dims,
            ScalarKind::Real,
            entries.into_iter().map(|x| C64::new(x, 0.0)).collect(),
        )
    }

    pub fn from_complex(dims: [usize; 3], entries: Vec<C64>) -> Result<Self> {
        Self::from_complex_kind(dims, ScalarKind::Complex, entries)
    }

    /// Builds a tensor of the given kind, validating length, finiteness and
    /// (for real kind) vanishing imaginary parts.
    pub fn from_complex_kind(dims: [usize; 3], kind: ScalarKind, entries: Vec<C64>) -> Result<Self> {
        check_dims(dims)?;
        let len: usize = dims.iter().product();
        if entries.len() != len {
            return Err(dims_mismatch(len, entries.len()));
        }
        for (pos, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite(pos));
            }
            if kind == ScalarKind::Real && z.im != 0.0 {
                return Err(Error::ImaginaryInReal(pos));
            }
        }
        Ok(Self {
            dims,
            kind,
            data: entries,
        })
    }

    pub fn from_fn(
        dims: [usize; 3],
        kind: ScalarKind,
        mut f: impl FnMut(usize, usize, usize) -> C64,
    ) -> Result<Self> {
        check_dims(dims)?;
        let mut data = Vec::with_capacity(dims.iter().product());
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    data.push(f(i, j, k));
                }
            }
        }
        Self::from_complex_kind(dims, kind, data)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Largest of the three dimensions.
    pub fn max_dim(&self) -> usize {
        self.dims.into_iter().max().unwrap_or(0)
    }

    pub fn is_cubic(&self) -> bool {
        self.dims[0] == self.dims[1] && self.dims[1] == self.dims[2]
    }

    #[inline]
    pub fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> C64 {
        self.data[self.offset(i, j, k)]
    }

    /// Iterates `((i, j, k), value)` in storage order.
    pub fn indexed_iter(&self) -> impl Iterator<Item = ((usize, usize, usize), C64)> + '_ {
        let [_, m, n] = self.dims;
        self.data
            .iter()
            .enumerate()
            .map(move |(pos, &z)| ((pos / (m * n), (pos / n) % m, pos % n), z))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Tensor3 {
        Tensor3 {
            dims: self.dims,
            kind: self.kind,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Result<Tensor3> {
        Self::from_complex_kind(self.dims, self.kind, self.data.iter().map(|&z| f(z)).collect())
    }

    /// Entrywise sum; the result is complex if either operand is.
    pub fn add(&self, other: &Tensor3) -> Result<Tensor3> {
        if self.dims != other.dims {
            return Err(dims_mismatch(self.dims, other.dims));
        }
        Ok(Tensor3 {
            dims: self.dims,
            kind: promote(self.kind, other.kind),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Tensor3) -> Result<Tensor3> {
        self.add(&other.scaled(-1.0))
    }

    /// Frobenius distance `‖self − other‖_F`.
    pub fn distance(&self, other: &Tensor3) -> Result<f64> {
        if self.dims != other.dims {
            return Err(dims_mismatch(self.dims, other.dims));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Multiplies the given mode by `m` (an `r × dims[mode]` matrix).
    pub fn mode_product(&self, mode: Mode, m: &CMat) -> Result<Tensor3> {
        let d = mode.index();
        if m.ncols() != self.dims[d] {
            return Err(dims_mismatch(self.dims[d], m.ncols()));
        }
        let flat = flatten(self, mode);
        let prod = m * flat;
        let mut dims = self.dims;
        dims[d] = m.nrows();
        let out = unflatten(&prod, mode, dims, self.kind)?;
        Ok(out)
    }
}

impl Index<(usize, usize, usize)> for Tensor3 {
    type Output = C64;

    fn index(&self, (i, j, k): (usize, usize, usize)) -> &C64 {
        &self.data[self.offset(i, j, k)]
    }
}

fn promote(a: ScalarKind, b: ScalarKind) -> ScalarKind {
    if a == ScalarKind::Complex || b == ScalarKind::Complex {
        ScalarKind::Complex
    } else {
        ScalarKind::Real
    }
}

fn check_dims(dims: [usize; 3]) -> Result<()> {
    if dims.contains(&0) {
        return Err(Error::ConfigInvalid(format!(
            "tensor dimensions must be positive, got {dims:?}"
        )));
    }
    Ok(())
}

/// Ordered triple `(L, R, T)` of square matrices acting on modes 1, 2, 3.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformTriple {
    factors: [CMat; 3],
    kind: ScalarKind,
}

impl TransformTriple {
    pub fn new(l: CMat, r: CMat, t: CMat, kind: ScalarKind) -> Result<Self> {
        for (pos, f) in [&l, &r, &t].into_iter().enumerate() {
            if !f.is_square() {
                return Err(dims_mismatch(
                    format!("square factor {}", pos + 1),
                    (f.nrows(), f.ncols()),
                ));
            }
            if kind == ScalarKind::Real && f.iter().any(|z| z.im != 0.0) {
                return Err(Error::ImaginaryInReal(pos));
            }
        }
        Ok(Self {
            factors: [l, r, t],
            kind,
        })
    }

    pub fn identity(dims: [usize; 3], kind: ScalarKind) -> Self {
        Self {
            factors: dims.map(|d| CMat::identity(d, d)),
            kind,
        }
    }

    pub fn factors(&self) -> &[CMat; 3] {
        &self.factors
    }

    pub fn factor(&self, mode: Mode) -> &CMat {
        &self.factors[mode.index()]
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn dims(&self) -> [usize; 3] {
        [
            self.factors[0].nrows(),
            self.factors[1].nrows(),
            self.factors[2].nrows(),
        ]
    }

    /// Factorwise product `self · other`, so that
    /// `compose(g, h) ↷ A == g ↷ (h ↷ A)`.
    pub fn compose(&self, other: &TransformTriple) -> Result<TransformTriple> {
        if self.dims() != other.dims() {
            return Err(dims_mismatch(self.dims(), other.dims()));
        }
        let [a0, a1, a2] = &self.factors;
        let [b0, b1, b2] = &other.factors;
        Ok(TransformTriple {
            factors: [a0 * b0, a1 * b1, a2 * b2],
            kind: promote(self.kind, other.kind),
        })
    }

    /// Factorwise conjugate transpose.
    pub fn adjoint(&self) -> TransformTriple {
        TransformTriple {
            factors: [
                self.factors[0].adjoint(),
                self.factors[1].adjoint(),
                self.factors[2].adjoint(),
            ],
            kind: self.kind,
        }
    }

    /// Largest `‖X*X − I‖_F` over the three factors.
    pub fn unitarity_defect(&self) -> f64 {
        self.factors
            .iter()
            .map(|f| (f.adjoint() * f - CMat::identity(f.nrows(), f.ncols())).norm())
            .fold(0.0, f64::max)
    }

    /// Unitary to the default tolerance `1e-10 · dim` factor by factor.
    pub fn is_unitary(&self) -> bool {
        self.factors.iter().all(|f| {
            let defect = (f.adjoint() * f - CMat::identity(f.nrows(), f.ncols())).norm();
            defect <= unitary_tolerance(f.nrows())
        })
    }
}

pub fn unitary_tolerance(dim: usize) -> f64 {
    1e-10 * dim as f64
}

/// `((L,R,T) ↷ A)_{ijk} = Σ_{p,q,r} L_{ip} R_{jq} T_{kr} A_{pqr}`.
pub fn apply_action(g: &TransformTriple, a: &Tensor3) -> Result<Tensor3> {
    if g.dims() != a.dims() {
        return Err(dims_mismatch(a.dims(), g.dims()));
    }
    if g.kind() != a.kind() {
        return Err(Error::ScalarKindMismatch {
            left: g.kind(),
            right: a.kind(),
        });
    }
    let mut out = a.clone();
    for mode in Mode::ALL {
        out = out.mode_product(mode, g.factor(mode))?;
    }
    Ok(out)
}

/// Mode-`d` flattening: rows indexed by mode `d`, columns lexicographic over
/// the two remaining indices with the lower-numbered mode varying slowest.
pub fn flatten(a: &Tensor3, mode: Mode) -> CMat {
    let [l, m, n] = a.dims;
    match mode {
        Mode::One => CMat::from_fn(l, m * n, |i, c| a.data[i * m * n + c]),
        Mode::Two => CMat::from_fn(m, l * n, |j, c| {
            let (i, k) = (c / n, c % n);
            a.data[(i * m + j) * n + k]
        }),
        Mode::Three => CMat::from_fn(n, l * m, |k, c| {
            let (i, j) = (c / m, c % m);
            a.data[(i * m + j) * n + k]
        }),
    }
}

/// Inverse of [`flatten`] for a tensor of shape `dims`.
pub fn unflatten(mat: &CMat, mode: Mode, dims: [usize; 3], kind: ScalarKind) -> Result<Tensor3> {
    let [l, m, n] = dims;
    let expected = match mode {
        Mode::One => (l, m * n),
        Mode::Two => (m, l * n),
        Mode::Three => (n, l * m),
    };
    if mat.shape() != expected {
        return Err(dims_mismatch(expected, mat.shape()));
    }
    let mut data = vec![C64::new(0.0, 0.0); l * m * n];
    for i in 0..l {
        for j in 0..m {
            for k in 0..n {
                let (r, c) = match mode {
                    Mode::One => (i, j * n + k),
                    Mode::Two => (j, i * n + k),
                    Mode::Three => (k, i * m + j),
                };
                let z = mat[(r, c)];
                data[(i * m + j) * n + k] = match kind {
                    ScalarKind::Real => C64::new(z.re, 0.0),
                    ScalarKind::Complex => z,
                };
            }
        }
    }
    Tensor3::from_complex_kind(dims, kind, data)
}

/// Gram matrix `A_d A_d^*` of the mode-`d` flattening, symmetrised.
pub fn gram(a: &Tensor3, mode: Mode) -> CMat {
    let f = flatten(a, mode);
    let g = &f * f.adjoint();
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}
