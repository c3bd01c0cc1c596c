//! Binary model file.
//!
//! Layout, little-endian throughout:
//!
//! ```text
//! magic "DEIDCRF\0" | u16 version
//! config: u32 max_iterations, f64 c1, f64 c2, u8 all_transitions,
//!         f64 convergence_tol, u32 n, n × i32 window
//! labels: u32 n, n × (u32 len, utf-8 bytes)          categories in order
//! features: u32 n, n × (u32 len, utf-8 bytes)
//! state weights: u64 nnz, nnz × (u32 feature, u32 label, f64 weight)
//! transitions: L × L × f64
//! sha-256 of everything above
//! ```

use std::fs;
use std::io::{Cursor, Read};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use sha2::{Digest, Sha256};

use super::{CrfConfig, CrfModel, FeatureAlphabet};
use crate::corpus::LabelSet;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"DEIDCRF\0";
pub const FORMAT_VERSION: u16 = 1;

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.write_u32::<LittleEndian>(s.len() as u32).unwrap();
    out.extend_from_slice(s.as_bytes());
}

pub fn to_bytes(model: &CrfModel) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.write_u16::<LittleEndian>(FORMAT_VERSION).unwrap();
    let c = &model.config;
    out.write_u32::<LittleEndian>(c.max_iterations as u32).unwrap();
    out.write_f64::<LittleEndian>(c.c1).unwrap();
    out.write_f64::<LittleEndian>(c.c2).unwrap();
    out.write_u8(c.all_transitions as u8).unwrap();
    out.write_f64::<LittleEndian>(c.convergence_tol).unwrap();
    out.write_u32::<LittleEndian>(c.window.len() as u32).unwrap();
    for &o in &c.window {
        out.write_i32::<LittleEndian>(o).unwrap();
    }
    out.write_u32::<LittleEndian>(model.labels.len() as u32).unwrap();
    for cat in model.labels.categories() {
        put_str(&mut out, cat);
    }
    out.write_u32::<LittleEndian>(model.features.len() as u32).unwrap();
    for name in model.features.names() {
        put_str(&mut out, name);
    }
    let l = model.num_labels();
    let state = &model.weights[..model.transition_offset()];
    let nnz = state.iter().filter(|w| **w != 0.0).count();
    out.write_u64::<LittleEndian>(nnz as u64).unwrap();
    for (i, &w) in state.iter().enumerate() {
        if w != 0.0 {
            out.write_u32::<LittleEndian>((i / l) as u32).unwrap();
            out.write_u32::<LittleEndian>((i % l) as u32).unwrap();
            out.write_f64::<LittleEndian>(w).unwrap();
        }
    }
    for &w in model.transitions() {
        out.write_f64::<LittleEndian>(w).unwrap();
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

fn corrupt(e: impl std::fmt::Display) -> Error {
    Error::CorruptFile(e.to_string())
}

fn get_str(r: &mut Cursor<&[u8]>) -> Result<String> {
    let n = r.read_u32::<LittleEndian>().map_err(corrupt)? as usize;
    if n > r.get_ref().len() {
        return Err(corrupt("string length exceeds file size"));
    }
    let mut buf = vec![0; n];
    r.read_exact(&mut buf).map_err(corrupt)?;
    String::from_utf8(buf).map_err(corrupt)
}

fn get_count(r: &mut Cursor<&[u8]>) -> Result<usize> {
    let n = r.read_u32::<LittleEndian>().map_err(corrupt)? as usize;
    if n > r.get_ref().len() {
        return Err(corrupt("count exceeds file size"));
    }
    Ok(n)
}

pub fn from_bytes(bytes: &[u8]) -> Result<CrfModel> {
    if bytes.len() < MAGIC.len() + 2 || &bytes[..MAGIC.len()] != MAGIC {
        return Err(corrupt("missing magic bytes"));
    }
    let version = u16::from_le_bytes([bytes[8], bytes[9]]);
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    if bytes.len() < 10 + 32 {
        return Err(corrupt("file truncated"));
    }
    let (body, digest) = bytes.split_at(bytes.len() - 32);
    if Sha256::digest(body).as_slice() != digest {
        return Err(corrupt("checksum mismatch (file truncated or modified)"));
    }
    let mut r = Cursor::new(body);
    r.set_position(10);
    let max_iterations = r.read_u32::<LittleEndian>().map_err(corrupt)? as usize;
    let c1 = r.read_f64::<LittleEndian>().map_err(corrupt)?;
    let c2 = r.read_f64::<LittleEndian>().map_err(corrupt)?;
    let all_transitions = r.read_u8().map_err(corrupt)? != 0;
    let convergence_tol = r.read_f64::<LittleEndian>().map_err(corrupt)?;
    let nw = get_count(&mut r)?;
    let window = (0..nw)
        .map(|_| r.read_i32::<LittleEndian>().map_err(corrupt))
        .collect::<Result<_>>()?;
    let config = CrfConfig {
        max_iterations,
        c1,
        c2,
        all_transitions,
        window,
        convergence_tol,
    };
    let nc = get_count(&mut r)?;
    let cats = (0..nc).map(|_| get_str(&mut r)).collect::<Result<Vec<_>>>()?;
    let nf = get_count(&mut r)?;
    let mut features = FeatureAlphabet::new();
    for _ in 0..nf {
        features.intern(&get_str(&mut r)?);
    }
    if features.len() != nf {
        return Err(corrupt("duplicate feature names"));
    }
    let mut model = CrfModel::new(LabelSet::new(cats), features, config);
    let l = model.num_labels();
    let nnz = r.read_u64::<LittleEndian>().map_err(corrupt)? as usize;
    if nnz > model.transition_offset() {
        return Err(corrupt("too many state weights"));
    }
    for _ in 0..nnz {
        let f = r.read_u32::<LittleEndian>().map_err(corrupt)? as usize;
        let y = r.read_u32::<LittleEndian>().map_err(corrupt)? as usize;
        let w = r.read_f64::<LittleEndian>().map_err(corrupt)?;
        if f >= nf || y >= l {
            return Err(corrupt("state weight index out of range"));
        }
        model.weights[f * l + y] = w;
    }
    let off = model.transition_offset();
    for i in 0..l * l {
        model.weights[off + i] = r.read_f64::<LittleEndian>().map_err(corrupt)?;
    }
    if r.position() as usize != body.len() {
        return Err(corrupt("trailing bytes"));
    }
    if model.weights.iter().any(|w| !w.is_finite()) {
        return Err(corrupt("non-finite weight"));
    }
    Ok(model)
}

pub fn save_model(model: &CrfModel, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_bytes(model))?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<CrfModel> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::FileMissing(path.to_path_buf()));
    }
    from_bytes(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Sentence;

    fn model() -> CrfModel {
        let alphabet: FeatureAlphabet = ["bias", "suffix2=16", "len=4"].into_iter().collect();
        let mut m = CrfModel::new(LabelSet::new(["Date", "Age"]), alphabet, CrfConfig::default());
        let w: Vec<f64> = (0..m.num_parameters()).map(|i| if i % 3 == 0 { 0.0 } else { i as f64 * 0.1 - 2.0 }).collect();
        m.set_weights(w).unwrap();
        m
    }

    #[test]
    fn round_trip() {
        let m = model();
        let back = from_bytes(&to_bytes(&m)).unwrap();
        assert_eq!(back, m);
        let s = Sentence::from_words(&["el", "2016", "de", "12/01/2016"]);
        assert_eq!(back.viterbi(&s), m.viterbi(&s));
    }

    #[test]
    fn truncated_file_is_corrupt() {
        let bytes = to_bytes(&model());
        for cut in [5, 12, bytes.len() / 2, bytes.len() - 1] {
            assert!(matches!(from_bytes(&bytes[..cut]), Err(Error::CorruptFile(_))), "cut {cut}");
        }
    }

    #[test]
    fn future_version_is_rejected() {
        let mut bytes = to_bytes(&model());
        bytes[8] = 2;
        assert!(matches!(from_bytes(&bytes), Err(Error::VersionMismatch { found: 2, expected: 1 })));
    }

    #[test]
    fn flipped_byte_is_corrupt() {
        let mut bytes = to_bytes(&model());
        let i = bytes.len() / 2;
        bytes[i] ^= 0xff;
        assert!(matches!(from_bytes(&bytes), Err(Error::CorruptFile(_))));
    }
}
