//! Average-case isomorphism testing for order-3 tensors under orthogonal and
//! unitary group actions.
//!
//! The pipeline follows the higher-order SVD route: the three mode Gram
//! matrices of each tensor are diagonalised, their spectra compared, and the
//! resulting core tensors aligned by per-coordinate phases (signs over the
//! reals). A YES answer always carries an explicit witness triple whose
//! residual is recomputed from scratch.
//!
//! Modules:
//! - [`tensor`]: dense tensors, the triple action, flattenings, Gram matrices,
//!   random generators and file formats.
//! - [`spectral`]: ordered Hermitian eigendecompositions and gap checks.
//! - [`hosvd`]: core tensors and their entrywise comparison.
//! - [`phase`]: sign and phase alignment systems plus witness assembly.
//! - [`decision`]: the exact and gapped decision pipelines.
//! - [`gaplab`]: Monte-Carlo experiments on Wishart eigenvalue gaps.
//! - [`hypergraph`]: spectral isomorphism of tripartite 3-uniform hypergraphs.

pub mod decision;
pub mod error;
pub mod gaplab;
pub mod hosvd;
pub mod hypergraph;
pub mod phase;
pub mod spectral;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{
    apply_action, flatten, gram, sample_haar_triple, sample_tensor, unflatten, CMat, Distribution,
    Mode, RandomModel, ScalarKind, Tensor3, TransformTriple, C64,
};
