//! `EMVX` binary model container.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! b"EMVX" | u16 version | u8 kind | normaliser | classifier body
//! ```
//!
//! Vectors are a `u64` length followed by their elements. Floats are stored
//! as raw IEEE-754 bits, so a round trip reproduces every bit.

use std::path::Path;

use super::forest::{Node, Tree};
use super::{
    BinarySvm, Classifier, ForestModel, Kernel, KnnModel, KnnWeighting, MlpModel, ModelKind,
    MulticlassSvm, Normalizer, TrainedModel,
};
use crate::harness::Emotion;
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"EMVX";
pub const VERSION: u16 = 1;

fn kind_tag(kind: ModelKind) -> u8 {
    match kind {
        ModelKind::Svm => 1,
        ModelKind::Mlp => 2,
        ModelKind::Knn => 3,
        ModelKind::Forest => 4,
    }
}

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64s(&mut self, v: &[f64]) {
        self.usize(v.len());
        v.iter().for_each(|&x| self.f64(x));
    }
    fn label(&mut self, e: Emotion) {
        self.u8(e.index() as u8);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::ModelFormat(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    /// A length that must fit in the remaining bytes at `unit` bytes each.
    fn len(&mut self, unit: usize) -> Result<usize> {
        let n = self.u64()?;
        let remaining = (self.buf.len() - self.pos) as u64;
        if n.saturating_mul(unit as u64) > remaining {
            return Err(Error::ModelFormat(format!("length {n} exceeds remaining data")));
        }
        Ok(n as usize)
    }
    fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.len(8)?;
        (0..n).map(|_| self.f64()).collect()
    }
    fn label(&mut self) -> Result<Emotion> {
        let i = self.u8()?;
        Emotion::from_index(i as usize)
            .ok_or_else(|| Error::ModelFormat(format!("bad label index {i}")))
    }
}

fn write_kernel(w: &mut Writer, k: &Kernel) {
    match *k {
        Kernel::Linear => w.u8(0),
        Kernel::Rbf { sigma } => {
            w.u8(1);
            w.f64(sigma);
        }
    }
}

fn read_kernel(r: &mut Reader) -> Result<Kernel> {
    match r.u8()? {
        0 => Ok(Kernel::Linear),
        1 => Ok(Kernel::Rbf { sigma: r.f64()? }),
        t => Err(Error::ModelFormat(format!("bad kernel tag {t}"))),
    }
}

fn write_rows(w: &mut Writer, rows: &[Vec<f64>]) {
    w.usize(rows.len());
    rows.iter().for_each(|r| w.f64s(r));
}

fn read_rows(r: &mut Reader) -> Result<Vec<Vec<f64>>> {
    let n = r.len(8)?;
    (0..n).map(|_| r.f64s()).collect()
}

fn write_body(w: &mut Writer, c: &Classifier) {
    match c {
        Classifier::Svm(m) => {
            w.label(m.fallback);
            w.usize(m.machines.len());
            for (a, b, svm) in &m.machines {
                w.label(*a);
                w.label(*b);
                write_kernel(w, &svm.kernel);
                w.f64(svm.c);
                w.f64(svm.bias);
                w.f64s(&svm.dual_coef);
                write_rows(w, &svm.support_vectors);
            }
        }
        Classifier::Mlp(m) => {
            w.usize(m.input_dim);
            w.usize(m.hidden);
            w.f64s(&m.w1);
            w.f64s(&m.b1);
            w.f64s(&m.w2);
            w.f64s(&m.b2);
        }
        Classifier::Knn(m) => {
            w.usize(m.k);
            w.u8(match m.weighting {
                KnnWeighting::InverseDistance => 0,
                KnnWeighting::Uniform => 1,
            });
            write_rows(w, &m.points);
            w.usize(m.labels.len());
            m.labels.iter().for_each(|&l| w.label(l));
        }
        Classifier::Forest(m) => {
            w.u64(m.seed);
            w.u64(m.max_depth.map_or(u64::MAX, |d| d as u64));
            w.usize(m.trees.len());
            for t in &m.trees {
                w.usize(t.nodes.len());
                for n in &t.nodes {
                    match n {
                        Node::Leaf { counts } => {
                            w.u8(0);
                            counts.iter().for_each(|&c| w.u64(c));
                        }
                        Node::Split {
                            feature,
                            threshold,
                            left,
                            right,
                        } => {
                            w.u8(1);
                            w.usize(*feature);
                            w.f64(*threshold);
                            w.usize(*left);
                            w.usize(*right);
                        }
                    }
                }
            }
        }
    }
}

fn read_body(r: &mut Reader, kind: u8, dim: usize) -> Result<Classifier> {
    let check_dim = |d: usize| {
        if d != dim {
            Err(Error::ModelFormat(format!("row width {d} differs from normaliser width {dim}")))
        } else {
            Ok(())
        }
    };
    Ok(match kind {
        1 => {
            let fallback = r.label()?;
            let n = r.len(1)?;
            let mut machines = Vec::with_capacity(n);
            for _ in 0..n {
                let a = r.label()?;
                let b = r.label()?;
                let kernel = read_kernel(r)?;
                let c = r.f64()?;
                let bias = r.f64()?;
                let dual_coef = r.f64s()?;
                let support_vectors = read_rows(r)?;
                if dual_coef.len() != support_vectors.len() {
                    return Err(Error::ModelFormat("support vector count mismatch".into()));
                }
                for sv in &support_vectors {
                    check_dim(sv.len())?;
                }
                machines.push((a, b, BinarySvm { support_vectors, dual_coef, bias, kernel, c }));
            }
            Classifier::Svm(MulticlassSvm { machines, fallback })
        }
        2 => {
            let input_dim = r.len(0)?;
            let hidden = r.len(0)?;
            check_dim(input_dim)?;
            let m = MlpModel {
                input_dim,
                hidden,
                w1: r.f64s()?,
                b1: r.f64s()?,
                w2: r.f64s()?,
                b2: r.f64s()?,
            };
            let ok = m.w1.len() == input_dim * hidden
                && m.b1.len() == hidden
                && m.w2.len() == hidden * Emotion::COUNT
                && m.b2.len() == Emotion::COUNT;
            if !ok {
                return Err(Error::ModelFormat("MLP weight shapes inconsistent".into()));
            }
            Classifier::Mlp(m)
        }
        3 => {
            let k = r.len(0)?;
            let weighting = match r.u8()? {
                0 => KnnWeighting::InverseDistance,
                1 => KnnWeighting::Uniform,
                t => return Err(Error::ModelFormat(format!("bad weighting tag {t}"))),
            };
            let points = read_rows(r)?;
            let n = r.len(1)?;
            let labels = (0..n).map(|_| r.label()).collect::<Result<Vec<_>>>()?;
            if labels.len() != points.len() || points.is_empty() || k == 0 || k > points.len() {
                return Err(Error::ModelFormat("KNN tables inconsistent".into()));
            }
            for p in &points {
                check_dim(p.len())?;
            }
            Classifier::Knn(KnnModel { points, labels, k, weighting })
        }
        4 => {
            let seed = r.u64()?;
            let max_depth = match r.u64()? {
                u64::MAX => None,
                d => Some(d as usize),
            };
            let n = r.len(1)?;
            let mut trees = Vec::with_capacity(n);
            for _ in 0..n {
                let count = r.len(1)?;
                let mut nodes = Vec::with_capacity(count);
                for _ in 0..count {
                    nodes.push(match r.u8()? {
                        0 => {
                            let mut counts = [0u64; Emotion::COUNT];
                            for c in &mut counts {
                                *c = r.u64()?;
                            }
                            Node::Leaf { counts }
                        }
                        1 => Node::Split {
                            feature: r.u64()? as usize,
                            threshold: r.f64()?,
                            left: r.u64()? as usize,
                            right: r.u64()? as usize,
                        },
                        t => return Err(Error::ModelFormat(format!("bad node tag {t}"))),
                    });
                }
                // children must point forward so traversal terminates
                for (i, node) in nodes.iter().enumerate() {
                    if let Node::Split { feature, left, right, .. } = node {
                        if *feature >= dim || *left <= i || *right <= i || *left >= count || *right >= count {
                            return Err(Error::ModelFormat("tree node out of range".into()));
                        }
                    }
                }
                if nodes.is_empty() {
                    return Err(Error::ModelFormat("empty tree".into()));
                }
                trees.push(Tree { nodes });
            }
            if trees.is_empty() {
                return Err(Error::ModelFormat("forest has no trees".into()));
            }
            Classifier::Forest(ForestModel { trees, max_depth, seed })
        }
        t => return Err(Error::ModelFormat(format!("unknown model kind tag {t}"))),
    })
}

pub fn to_bytes(model: &TrainedModel) -> Vec<u8> {
    let mut w = Writer::default();
    w.0.extend_from_slice(MAGIC);
    w.0.extend_from_slice(&VERSION.to_le_bytes());
    w.u8(kind_tag(model.classifier.kind()));
    w.f64s(&model.normalizer.mean);
    w.f64s(&model.normalizer.std);
    write_body(&mut w, &model.classifier);
    w.0
}

pub fn from_bytes(bytes: &[u8]) -> Result<TrainedModel> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4).ok() != Some(MAGIC.as_slice()) {
        return Err(Error::ModelFormat("missing EMVX magic".into()));
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(Error::ModelFormat(format!("unsupported version {version}")));
    }
    let kind = r.u8()?;
    let mean = r.f64s()?;
    let std = r.f64s()?;
    if mean.len() != std.len() {
        return Err(Error::ModelFormat("normaliser vectors differ in length".into()));
    }
    let dim = mean.len();
    let classifier = read_body(&mut r, kind, dim)?;
    if r.pos != bytes.len() {
        return Err(Error::ModelFormat(format!(
            "{} trailing bytes",
            bytes.len() - r.pos
        )));
    }
    Ok(TrainedModel {
        normalizer: Normalizer { mean, std },
        classifier,
    })
}

pub fn write_model(path: &Path, model: &TrainedModel) -> Result<()> {
    std::fs::write(path, to_bytes(model)).map_err(|e| Error::io(path, e))
}

pub fn read_model(path: &Path) -> Result<TrainedModel> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    from_bytes(&bytes)
}
