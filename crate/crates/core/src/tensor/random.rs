use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{CMat, ScalarKind, Tensor3, TransformTriple, C64};
use crate::error::{Error, Result};

/// Mean-zero, unit-variance entry laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    Gaussian,
    Rademacher,
    /// Uniform on `[−√3, √3]`.
    UniformPm,
}

impl Distribution {
    pub fn sample_real<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Distribution::Gaussian => rng.sample(StandardNormal),
            Distribution::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Distribution::UniformPm => {
                let s = 3f64.sqrt();
                rng.random_range(-s..=s)
            }
        }
    }

    /// Complex draws use independent real and imaginary parts from the same law.
    pub fn sample<R: Rng + ?Sized>(self, kind: ScalarKind, rng: &mut R) -> C64 {
        match kind {
            ScalarKind::Real => C64::new(self.sample_real(rng), 0.0),
            ScalarKind::Complex => {
                let re = self.sample_real(rng);
                C64::new(re, self.sample_real(rng))
            }
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distribution::Gaussian => "gaussian",
            Distribution::Rademacher => "rademacher",
            Distribution::UniformPm => "uniform_pm",
        })
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Distribution::Gaussian),
            "rademacher" => Ok(Distribution::Rademacher),
            "uniform_pm" | "uniform" => Ok(Distribution::UniformPm),
            other => Err(Error::ConfigInvalid(format!("unknown distribution `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomModel {
    pub distribution: Distribution,
    pub kind: ScalarKind,
    pub seed: u64,
}

impl RandomModel {
    pub fn new(distribution: Distribution, kind: ScalarKind, seed: u64) -> Self {
        Self {
            distribution,
            kind,
            seed,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// ChaCha8 generator for `(seed, stream)`. Distinct streams of one seed are
/// independent, which is how parallel trials stay reproducible: trial `t`
/// always draws from stream `t + 1` of the experiment seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn sample_tensor(dims: [usize; 3], model: &RandomModel) -> Result<Tensor3> {
    let mut rng = stream_rng(model.seed, 0);
    sample_tensor_with(dims, model.distribution, model.kind, &mut rng)
}

pub(crate) fn sample_tensor_with<R: Rng + ?Sized>(
    dims: [usize; 3],
    distribution: Distribution,
    kind: ScalarKind,
    rng: &mut R,
) -> Result<Tensor3> {
    let len: usize = dims.iter().product();
    let data = (0..len).map(|_| distribution.sample(kind, rng)).collect();
    Tensor3::from_complex_kind(dims, kind, data)
}

/// Haar-distributed orthogonal (real) or unitary (complex) matrix: QR of a
/// Ginibre matrix with the diagonal of `R` rotated onto the positive reals.
pub fn sample_haar_unitary<R: Rng + ?Sized>(dim: usize, kind: ScalarKind, rng: &mut R) -> CMat {
    match kind {
        ScalarKind::Real => {
            let ginibre = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
            let qr = ginibre.qr();
            let (mut q, r) = (qr.q(), qr.r());
            for c in 0..dim {
                if r[(c, c)] < 0.0 {
                    q.column_mut(c).neg_mut();
                }
            }
            q.map(|x| C64::new(x, 0.0))
        }
        ScalarKind::Complex => {
            let ginibre = CMat::from_fn(dim, dim, |_, _| {
                Distribution::Gaussian.sample(ScalarKind::Complex, rng)
            });
            let qr = ginibre.qr();
            let (mut q, r) = (qr.q(), qr.r());
            for c in 0..dim {
                let d = r[(c, c)];
                if d.norm() > 0.0 {
                    let phase = d / d.norm();
                    q.column_mut(c).iter_mut().for_each(|z| *z *= phase);
                }
            }
            q
        }
    }
}

pub fn sample_haar_triple(dims: [usize; 3], kind: ScalarKind, seed: u64) -> TransformTriple {
    let [l, r, t] = [0u64, 1, 2].map(|s| {
        let mut rng = stream_rng(seed, s);
        sample_haar_unitary(dims[s as usize], kind, &mut rng)
    });
    TransformTriple::new(l, r, t, kind).expect("haar factors are square")
}
