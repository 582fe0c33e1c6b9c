//! Binary feature dump.
//!
//! ```text
//! header  : b"LFD1" | kind tag: u8 | dimension: u32 LE | record count: u64 LE
//! record  : keypoint index: u64 LE | kind tag: u8 | payload
//! payload : real kinds: dimension × f32 LE
//!           binary kinds: ⌈dimension / 8⌉ bytes, bit i at (byte i/8, bit i%8), zero padded
//! ```
//!
//! Storage accounting uses the payload size alone.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{BitVector, DescriptorKind, Feature, Payload};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"LFD1";

#[derive(Debug, Clone, PartialEq)]
pub struct DumpRecord {
    pub keypoint: u64,
    pub feature: Feature,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDump {
    pub kind: DescriptorKind,
    pub dimension: usize,
    pub records: Vec<DumpRecord>,
}

impl FeatureDump {
    pub fn new(kind: DescriptorKind, dimension: usize) -> Self {
        FeatureDump {
            kind,
            dimension,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, keypoint: u64, feature: Feature) -> Result<()> {
        if feature.kind != self.kind || feature.len() != self.dimension {
            return Err(Error::invalid(format!(
                "feature {} of length {} does not fit a {} dump of dimension {}",
                feature.kind,
                feature.len(),
                self.kind,
                self.dimension
            )));
        }
        self.records.push(DumpRecord { keypoint, feature });
        Ok(())
    }

    pub fn payload_bytes(&self) -> usize {
        if self.kind.is_binary() {
            self.dimension.div_ceil(8)
        } else {
            4 * self.dimension
        }
    }

    pub fn features(&self) -> Vec<Feature> {
        self.records.iter().map(|r| r.feature.clone()).collect()
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&[self.kind.tag()])?;
        w.write_all(&(self.dimension as u32).to_le_bytes())?;
        w.write_all(&(self.records.len() as u64).to_le_bytes())?;
        for rec in &self.records {
            w.write_all(&rec.keypoint.to_le_bytes())?;
            w.write_all(&[rec.feature.kind.tag()])?;
            match &rec.feature.payload {
                Payload::Real(v) => {
                    for x in v {
                        w.write_all(&x.to_le_bytes())?;
                    }
                }
                Payload::Bits(b) => w.write_all(&b.to_bytes())?,
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out)
            .expect("writing to a Vec cannot fail");
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor { bytes, pos: 0 };
        if cur.take(4)? != MAGIC {
            return Err(Error::parse(0, "not a feature dump (bad magic)"));
        }
        let tag_at = cur.pos;
        let kind = DescriptorKind::from_tag(cur.u8()?)
            .ok_or_else(|| Error::parse(tag_at as u64, "unknown descriptor tag"))?;
        let dimension = cur.u32()? as usize;
        let count = cur.u64()?;
        let mut dump = FeatureDump::new(kind, dimension);
        let payload = dump.payload_bytes();
        for _ in 0..count {
            let keypoint = cur.u64()?;
            let at = cur.pos;
            if cur.u8()? != kind.tag() {
                return Err(Error::parse(at as u64, "record kind differs from header"));
            }
            let at = cur.pos;
            let raw = cur.take(payload)?;
            let feature = if kind.is_binary() {
                let bits = BitVector::from_bytes(raw, dimension)
                    .ok_or_else(|| Error::parse(at as u64, "non-zero padding bits"))?;
                Feature::bits(kind, bits)
            } else {
                Feature {
                    kind,
                    payload: Payload::Real(
                        raw.chunks_exact(4)
                            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                            .collect(),
                    ),
                }
            };
            dump.records.push(DumpRecord { keypoint, feature });
        }
        if cur.pos != bytes.len() {
            return Err(Error::parse(
                cur.pos as u64,
                "trailing bytes after last record",
            ));
        }
        Ok(dump)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(f);
        self.write_to(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        File::open(path)
            .and_then(|f| BufReader::new(f).read_to_end(&mut bytes))
            .map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::parse(
                self.pos as u64,
                format!(
                    "truncated: need {n} bytes, {} left",
                    self.bytes.len() - self.pos
                ),
            ));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
