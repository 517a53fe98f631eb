//! Binary model files. Layout, all little-endian:
//! magic `EDGESURR`, version u32, hidden/nodes/feature width as u64,
//! five normalisation constants as f64, corpus seed u64, label solver
//! (u64 length + UTF-8), training and validation curves (u64 length + f64s),
//! parameter count u64, then the parameters as f64.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{feature_width, Dims, Network, Normalization, SurrogateModel, TrainingMetadata};
use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::problem::{Scenario, Solution};
use crate::scengen::{load_corpus, save_corpus};

const MAGIC: &[u8; 8] = b"EDGESURR";
pub const MODEL_VERSION: u32 = 1;
const MAX_LEN: u64 = 1 << 28;

struct Writer<W: Write>(W);

impl<W: Write> Writer<W> {
    fn u64(&mut self, v: u64) -> Result<()> {
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }
    fn f64(&mut self, v: f64) -> Result<()> {
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }
    fn f64s(&mut self, vs: &[f64]) -> Result<()> {
        self.u64(vs.len() as u64)?;
        vs.iter().try_for_each(|&v| self.f64(v))
    }
}

struct Reader<R: Read>(R);

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.0.read_exact(&mut buf).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => Error::CorruptModel("file is truncated".into()),
            _ => Error::Io(e),
        })?;
        Ok(buf)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }
    fn len(&mut self) -> Result<usize> {
        let n = self.u64()?;
        if n > MAX_LEN {
            return Err(Error::CorruptModel(format!("implausible length {n}")));
        }
        Ok(n as usize)
    }
    fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.len()?;
        (0..n).map(|_| self.f64()).collect()
    }
}

pub fn write_model<T: Scalar, W: Write>(model: &SurrogateModel<T>, out: W) -> Result<()> {
    let mut w = Writer(out);
    let d = model.network.dims;
    w.0.write_all(MAGIC)?;
    w.0.write_all(&MODEL_VERSION.to_le_bytes())?;
    w.u64(d.hidden as u64)?;
    w.u64(d.nodes as u64)?;
    w.u64(d.input as u64)?;
    let n = &model.normalization;
    for v in [n.size, n.demand, n.distance, n.bandwidth, n.capacity] {
        w.f64(v)?;
    }
    w.u64(model.metadata.corpus_seed)?;
    let solver = model.metadata.label_solver.as_bytes();
    w.u64(solver.len() as u64)?;
    w.0.write_all(solver)?;
    w.f64s(&model.metadata.loss_curve)?;
    w.f64s(&model.metadata.validation_curve)?;
    let params: Vec<f64> = model.network.params.iter().map(|p| p.to_f64_lossy()).collect();
    w.f64s(&params)?;
    w.0.flush()?;
    Ok(())
}

pub fn read_model<T: Scalar, R: Read>(input: R) -> Result<SurrogateModel<T>> {
    let mut r = Reader(input);
    if &r.bytes::<8>()? != MAGIC {
        return Err(Error::CorruptModel("not a model file".into()));
    }
    let found = r.u32()?;
    if found != MODEL_VERSION {
        return Err(Error::ModelVersion {
            found,
            expected: MODEL_VERSION,
        });
    }
    let hidden = r.len()?;
    let nodes = r.len()?;
    let input = r.len()?;
    if hidden == 0 || nodes == 0 || input != feature_width(nodes) {
        return Err(Error::CorruptModel(format!(
            "inconsistent shape: hidden {hidden}, nodes {nodes}, features {input}"
        )));
    }
    let normalization = Normalization {
        size: r.f64()?,
        demand: r.f64()?,
        distance: r.f64()?,
        bandwidth: r.f64()?,
        capacity: r.f64()?,
    };
    normalization
        .validate()
        .map_err(|e| Error::CorruptModel(e.to_string()))?;
    let corpus_seed = r.u64()?;
    let len = r.len()?;
    let mut solver = vec![0u8; len];
    r.0.read_exact(&mut solver)
        .map_err(|_| Error::CorruptModel("file is truncated".into()))?;
    let label_solver =
        String::from_utf8(solver).map_err(|_| Error::CorruptModel("label solver is not UTF-8".into()))?;
    let loss_curve = r.f64s()?;
    let validation_curve = r.f64s()?;
    let params = r.f64s()?;
    let dims = Dims { input, hidden, nodes };
    if params.len() != dims.param_count() {
        return Err(Error::CorruptModel(format!(
            "expected {} parameters, found {}",
            dims.param_count(),
            params.len()
        )));
    }
    let mut rest = [0u8; 1];
    if r.0.read(&mut rest)? != 0 {
        return Err(Error::CorruptModel("trailing bytes".into()));
    }
    let network = Network::from_params(dims, params.into_iter().map(T::lit).collect())?;
    Ok(SurrogateModel {
        network,
        normalization,
        metadata: TrainingMetadata {
            corpus_seed,
            label_solver,
            loss_curve,
            validation_curve,
        },
    })
}

pub fn save_model<T: Scalar>(model: &SurrogateModel<T>, path: impl AsRef<Path>) -> Result<()> {
    write_model(model, BufWriter::new(File::create(path)?))
}

pub fn load_model<T: Scalar>(path: impl AsRef<Path>) -> Result<SurrogateModel<T>> {
    read_model(BufReader::new(File::open(path)?))
}

/// File name of the label for corpus member `index`.
pub fn label_file_name(index: usize) -> String {
    format!("label-{index:05}.json")
}

/// Writes a training set: the corpus files plus `label-00000.json`, ...
pub fn save_dataset<T: Scalar>(dir: &Path, corpus: &[Scenario<T>], labels: &[Solution]) -> Result<()> {
    if corpus.len() != labels.len() {
        return Err(Error::Config(format!(
            "{} scenarios but {} labels",
            corpus.len(),
            labels.len()
        )));
    }
    save_corpus(corpus, dir)?;
    for (i, l) in labels.iter().enumerate() {
        l.save(&dir.join(label_file_name(i)))?;
    }
    Ok(())
}

/// Reads a training set written by [`save_dataset`]. Every scenario needs
/// its label.
pub fn load_dataset<T: Scalar>(dir: &Path) -> Result<(Vec<Scenario<T>>, Vec<Solution>)> {
    let corpus = load_corpus(dir)?;
    let labels = (0..corpus.len())
        .map(|i| Solution::load(&dir.join(label_file_name(i))))
        .collect::<Result<Vec<_>>>()?;
    Ok((corpus, labels))
}
