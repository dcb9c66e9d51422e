//! Code files.
//!
//! Layout, all integers little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4 | magic `"BJLE"` |
//! | 4 | `u32` format version |
//! | 4 | `u32` manifest length `L` |
//! | L | manifest, UTF-8 JSON |
//! | 32 | SHA-256 of the manifest bytes |
//! | 8 | `u64` point count |
//! | ... | per point, `branches` codes of `ceil(m / 64)` `u64` words each |

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::manifest::{SketchKind, SketchManifest};
use super::FORMAT_VERSION;
use crate::bitcode::{BinaryCode, DualCode, WORD_BITS};
use crate::error::{Error, Result};

pub const CODE_MAGIC: &[u8; 4] = b"BJLE";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Codes {
    Single(Vec<BinaryCode>),
    Dual(Vec<DualCode>),
}

impl Codes {
    pub fn len(&self) -> usize {
        match self {
            Codes::Single(c) => c.len(),
            Codes::Dual(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn matches(&self, manifest: &SketchManifest) -> Result<()> {
        let ok = match (self, manifest.kind) {
            (Codes::Single(c), SketchKind::Gaussian) => c.iter().all(|c| c.len() == manifest.m),
            (Codes::Dual(c), SketchKind::Circulant) => c.iter().all(|c| c.len() == manifest.m),
            _ => false,
        };
        if !ok {
            return Err(Error::invalid("codes do not match the manifest kind or code length"));
        }
        Ok(())
    }
}

pub fn encode_codes(codes: &Codes, manifest: &SketchManifest) -> Result<Vec<u8>> {
    manifest.validate().map_err(|e| Error::invalid(e.to_string()))?;
    codes.matches(manifest)?;
    let json = manifest.to_json_bytes();
    let words = manifest.m.div_ceil(WORD_BITS);
    let mut out = Vec::with_capacity(52 + json.len() + codes.len() * manifest.branches() * words * 8);
    out.extend_from_slice(CODE_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    let json_len = u32::try_from(json.len()).map_err(|_| Error::invalid("manifest too large"))?;
    out.extend_from_slice(&json_len.to_le_bytes());
    out.extend_from_slice(&json);
    out.extend_from_slice(&Sha256::digest(&json));
    out.extend_from_slice(&(codes.len() as u64).to_le_bytes());
    let mut put = |code: &BinaryCode| {
        for w in code.words() {
            out.extend_from_slice(&w.to_le_bytes());
        }
    };
    match codes {
        Codes::Single(cs) => cs.iter().for_each(&mut put),
        Codes::Dual(cs) => cs.iter().for_each(|c| {
            put(c.first());
            put(c.second());
        }),
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() < len {
            return Err(Error::format(format!("truncated code file while reading {what}")));
        }
        let (head, tail) = self.bytes.split_at(len);
        self.bytes = tail;
        Ok(head)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().expect("8 bytes")))
    }
}

pub fn decode_codes(bytes: &[u8]) -> Result<(Codes, SketchManifest)> {
    let mut r = Reader { bytes };
    if r.take(4, "magic")? != CODE_MAGIC {
        return Err(Error::format("bad code file magic"));
    }
    let version = r.u32("version")?;
    if version != FORMAT_VERSION {
        return Err(Error::format(format!("unsupported code file version {version}")));
    }
    let json_len = r.u32("manifest length")? as usize;
    let json = r.take(json_len, "manifest")?;
    let digest = r.take(32, "manifest hash")?;
    if Sha256::digest(json).as_slice() != digest {
        return Err(Error::format("manifest hash mismatch"));
    }
    let manifest: SketchManifest = serde_json::from_slice(json)
        .map_err(|e| Error::format(format!("manifest is not valid JSON: {e}")))?;
    if manifest.to_json_bytes() != json {
        return Err(Error::format("manifest is not in canonical form"));
    }
    manifest.validate()?;
    let count = r.u64("count")?;
    let words = manifest.m.div_ceil(WORD_BITS);
    let per_point = manifest.branches() * words * 8;
    let expected = usize::try_from(count)
        .ok()
        .and_then(|c| c.checked_mul(per_point))
        .ok_or_else(|| Error::format("code count overflows"))?;
    if r.bytes.len() != expected {
        return Err(Error::format(format!(
            "code section has {} bytes, header implies {expected}",
            r.bytes.len()
        )));
    }
    let read_code = |r: &mut Reader<'_>| -> Result<BinaryCode> {
        let raw = r.take(words * 8, "code")?;
        let ws = raw
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        BinaryCode::from_words(manifest.m, ws).map_err(|e| Error::format(e.to_string()))
    };
    let count = count as usize;
    let codes = match manifest.kind {
        SketchKind::Gaussian => {
            Codes::Single((0..count).map(|_| read_code(&mut r)).collect::<Result<_>>()?)
        }
        SketchKind::Circulant => Codes::Dual(
            (0..count)
                .map(|_| DualCode::new(read_code(&mut r)?, read_code(&mut r)?))
                .collect::<Result<_>>()?,
        ),
    };
    Ok((codes, manifest))
}

pub fn save_codes(codes: &Codes, manifest: &SketchManifest, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_codes(codes, manifest)?)?;
    Ok(())
}

pub fn load_codes(path: impl AsRef<Path>) -> Result<(Codes, SketchManifest)> {
    decode_codes(&fs::read(path)?)
}
