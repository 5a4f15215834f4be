//! File formats.
//!
//! `T3B1` binary layout: the four magic bytes `T3B1`, one byte scalar kind
//! (0 real, 1 complex), three little-endian `u32` dimensions, then the entries
//! in lexicographic `(i, j, k)` order as little-endian `f64` (real) or
//! `(re, im)` pairs of `f64` (complex).
//!
//! A witness triple is stored as three consecutive `T3B1` blocks, factor `X`
//! of size `d × d` being written as a `d × d × 1` tensor with `X[r, c]` at
//! position `(r, c, 0)`.
//!
//! The JSON mirrors use `{"kind", "dims", "re", "im"}`, with `im` omitted for
//! real data.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CMat, ScalarKind, Tensor3, TransformTriple, C64};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"T3B1";

pub fn write_t3b<W: Write>(t: &Tensor3, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&[t.kind().tag()])?;
    for d in t.dims() {
        let d = u32::try_from(d).map_err(|_| Error::Format(format!("dimension {d} exceeds u32")))?;
        w.write_all(&d.to_le_bytes())?;
    }
    for z in t.data() {
        w.write_all(&z.re.to_le_bytes())?;
        if t.kind() == ScalarKind::Complex {
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

pub fn read_t3b<R: Read>(mut r: R) -> Result<Tensor3> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("missing T3B1 magic".into()));
    }
    let mut tag = [0u8; 1];
    r.read_exact(&mut tag)?;
    let kind = ScalarKind::from_tag(tag[0])
        .ok_or_else(|| Error::Format(format!("unknown scalar kind tag {}", tag[0])))?;
    let mut dims = [0usize; 3];
    for d in &mut dims {
        let mut buf = [0u8; 4];
        r.read_exact(&mut buf)?;
        *d = u32::from_le_bytes(buf) as usize;
    }
    let len = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::Format("dimensions overflow".into()))?;
    let mut data = Vec::with_capacity(len.min(1 << 24));
    for _ in 0..len {
        let re = read_f64(&mut r)?;
        let im = match kind {
            ScalarKind::Real => 0.0,
            ScalarKind::Complex => read_f64(&mut r)?,
        };
        data.push(C64::new(re, im));
    }
    Tensor3::from_complex_kind(dims, kind, data)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorJson {
    pub kind: ScalarKind,
    pub dims: [usize; 3],
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

impl From<&Tensor3> for TensorJson {
    fn from(t: &Tensor3) -> Self {
        TensorJson {
            kind: t.kind(),
            dims: t.dims(),
            re: t.data().iter().map(|z| z.re).collect(),
            im: match t.kind() {
                ScalarKind::Real => None,
                ScalarKind::Complex => Some(t.data().iter().map(|z| z.im).collect()),
            },
        }
    }
}

impl TryFrom<TensorJson> for Tensor3 {
    type Error = Error;

    fn try_from(j: TensorJson) -> Result<Self> {
        let data = match (&j.kind, j.im) {
            (ScalarKind::Real, None) => j.re.into_iter().map(|x| C64::new(x, 0.0)).collect(),
            (_, Some(im)) => {
                if im.len() != j.re.len() {
                    return Err(Error::Format("re/im lengths differ".into()));
                }
                j.re.into_iter().zip(im).map(|(a, b)| C64::new(a, b)).collect()
            }
            (ScalarKind::Complex, None) => {
                return Err(Error::Format("complex tensor without `im`".into()))
            }
        };
        Tensor3::from_complex_kind(j.dims, j.kind, data)
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Writes `.json` paths as JSON and everything else as `T3B1`.
pub fn save_tensor(t: &Tensor3, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    if is_json(path) {
        serde_json::to_writer(&mut w, &TensorJson::from(t))?;
    } else {
        write_t3b(t, &mut w)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads either format, sniffing the magic bytes.
pub fn load_tensor(path: &Path) -> Result<Tensor3> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.starts_with(MAGIC) {
        read_t3b(bytes.as_slice())
    } else {
        let j: TensorJson = serde_json::from_slice(&bytes)?;
        Tensor3::try_from(j)
    }
}

fn matrix_as_tensor(m: &CMat, kind: ScalarKind) -> Result<Tensor3> {
    Tensor3::from_fn([m.nrows(), m.ncols(), 1], kind, |r, c, _| m[(r, c)])
}

fn tensor_as_matrix(t: &Tensor3) -> Result<CMat> {
    let [r, c, depth] = t.dims();
    if depth != 1 {
        return Err(Error::Format(format!("matrix block has depth {depth}")));
    }
    Ok(CMat::from_fn(r, c, |i, j| t.get(i, j, 0)))
}

pub fn write_witness_t3b<W: Write>(g: &TransformTriple, mut w: W) -> Result<()> {
    for f in g.factors() {
        write_t3b(&matrix_as_tensor(f, g.kind())?, &mut w)?;
    }
    Ok(())
}

pub fn read_witness_t3b<R: Read>(mut r: R) -> Result<TransformTriple> {
    let mut blocks = Vec::with_capacity(3);
    for _ in 0..3 {
        blocks.push(read_t3b(&mut r)?);
    }
    let kind = blocks[0].kind();
    if blocks.iter().any(|b| b.kind() != kind) {
        return Err(Error::Format("witness blocks disagree on scalar kind".into()));
    }
    let [l, rr, t] = [0, 1, 2].map(|i| tensor_as_matrix(&blocks[i]));
    TransformTriple::new(l?, rr?, t?, kind)
}

/// JSON witness: one row-major block per factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub kind: ScalarKind,
    pub factors: Vec<MatrixJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

impl From<&TransformTriple> for WitnessJson {
    fn from(g: &TransformTriple) -> Self {
        let factors = g
            .factors()
            .iter()
            .map(|f| {
                let n = f.nrows();
                let row_major: Vec<C64> = (0..n)
                    .flat_map(|r| (0..n).map(move |c| (r, c)))
                    .map(|rc| f[rc])
                    .collect();
                MatrixJson {
                    dim: n,
                    re: row_major.iter().map(|z| z.re).collect(),
                    im: (g.kind() == ScalarKind::Complex)
                        .then(|| row_major.iter().map(|z| z.im).collect()),
                }
            })
            .collect();
        WitnessJson {
            kind: g.kind(),
            factors,
        }
    }
}

impl TryFrom<WitnessJson> for TransformTriple {
    type Error = Error;

    fn try_from(w: WitnessJson) -> Result<Self> {
        if w.factors.len() != 3 {
            return Err(Error::Format(format!(
                "witness needs 3 factors, found {}",
                w.factors.len()
            )));
        }
        let mut mats = Vec::with_capacity(3);
        for m in w.factors {
            let n = m.dim;
            if m.re.len() != n * n || m.im.as_ref().is_some_and(|im| im.len() != n * n) {
                return Err(Error::Format("witness block has wrong length".into()));
            }
            let im = m.im.unwrap_or_else(|| vec![0.0; n * n]);
            mats.push(CMat::from_fn(n, n, |r, c| C64::new(m.re[r * n + c], im[r * n + c])));
        }
        let t = mats.pop().unwrap();
        let r = mats.pop().unwrap();
        let l = mats.pop().unwrap();
        TransformTriple::new(l, r, t, w.kind)
    }
}

pub fn save_witness(g: &TransformTriple, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    if is_json(path) {
        serde_json::to_writer(&mut w, &WitnessJson::from(g))?;
    } else {
        write_witness_t3b(g, &mut w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_witness(path: &Path) -> Result<TransformTriple> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    if bytes.starts_with(MAGIC) {
        read_witness_t3b(bytes.as_slice())
    } else {
        TransformTriple::try_from(serde_json::from_slice::<WitnessJson>(&bytes)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{sample_haar_triple, sample_tensor, Distribution, RandomModel};
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let t = Tensor3::from_real([1, 2, 1], vec![1.5, -2.0]).unwrap();
        let mut buf = Vec::new();
        write_t3b(&t, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"T3B1");
        assert_eq!(buf[4], 0);
        assert_eq!(&buf[5..9], &1u32.to_le_bytes());
        assert_eq!(&buf[9..13], &2u32.to_le_bytes());
        assert_eq!(&buf[13..17], &1u32.to_le_bytes());
        assert_eq!(&buf[17..25], &1.5f64.to_le_bytes());
        assert_eq!(buf.len(), 17 + 16);
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        assert!(matches!(read_t3b(&b"T3B2\x00"[..]), Err(Error::Format(_))));
        let t = Tensor3::from_real([2, 2, 2], vec![1.0; 8]).unwrap();
        let mut buf = Vec::new();
        write_t3b(&t, &mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(matches!(read_t3b(buf.as_slice()), Err(Error::Io(_))));
    }

    #[test]
    fn witness_blocks_round_trip() {
        let g = sample_haar_triple([3, 2, 4], ScalarKind::Complex, 8);
        let mut buf = Vec::new();
        write_witness_t3b(&g, &mut buf).unwrap();
        assert_eq!(read_witness_t3b(buf.as_slice()).unwrap(), g);
        let j = WitnessJson::from(&g);
        let text = serde_json::to_string(&j).unwrap();
        let back: WitnessJson = serde_json::from_str(&text).unwrap();
        assert_eq!(TransformTriple::try_from(back).unwrap(), g);
    }

    proptest! {
        #[test]
        fn binary_and_json_round_trip(l in 1usize..5, m in 1usize..5, n in 1usize..5, seed in any::<u64>(), complex in any::<bool>()) {
            let kind = if complex { ScalarKind::Complex } else { ScalarKind::Real };
            let t = sample_tensor([l, m, n], &RandomModel::new(Distribution::Gaussian, kind, seed)).unwrap();
            let mut buf = Vec::new();
            write_t3b(&t, &mut buf).unwrap();
            prop_assert_eq!(&read_t3b(buf.as_slice()).unwrap(), &t);
            let text = serde_json::to_string(&TensorJson::from(&t)).unwrap();
            let j: TensorJson = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(Tensor3::try_from(j).unwrap(), t);
        }
    }
}
