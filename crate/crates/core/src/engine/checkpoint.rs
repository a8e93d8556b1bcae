//! Barrier snapshot encoding.
//!
//! Layout, all little-endian:
//!
//! ```text
//! "PGLC" | u32 version (1) | u64 superstep | u64 N
//! then sections, each prefixed by its u64 byte length:
//!   values       N x f64
//!   halted       ceil(N/8) bytes, bit i = vertex i
//!   inbox        u64 count, count x (u64 target, u64 sender, f64 payload)
//!   aggregates   u64 count, count x (u32 name_len, name bytes, f64 value)
//!   edges        u64 count, count x (u64 src, u64 dst, f64 weight)
//!   live         ceil(N/8) bytes
//!   labels       u64 count (= N), count x (u32 len, utf-8 bytes)
//!   loaded       ceil(N/8) presence bytes, then N x f64
//! ```
//!
//! `N` is the slot capacity, which includes dead slots left by removals.

use thiserror::Error;

use crate::graph::{Edge, VertexId};

pub const MAGIC: &[u8; 4] = b"PGLC";
pub const VERSION: u32 = 1;
const SECTION_COUNT: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CheckpointError {
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported checkpoint version {0}")]
    UnsupportedVersion(u32),
    #[error("checkpoint truncated while reading {0}")]
    Truncated(&'static str),
    #[error("section `{section}` is malformed: {reason}")]
    Malformed {
        section: &'static str,
        reason: String,
    },
    #[error("{0} trailing bytes after last section")]
    TrailingBytes(usize),
    #[error("checkpoint aggregate `{0}` is not declared by the program")]
    UnknownAggregate(String),
}

/// Decoded engine state at a barrier.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    /// Index of the next superstep to execute.
    pub superstep: u64,
    pub values: Vec<f64>,
    pub halted: Vec<bool>,
    /// Undelivered messages as `(target, sender, payload)`, in inbox order.
    pub inbox: Vec<(VertexId, VertexId, f64)>,
    pub aggregates: Vec<(String, f64)>,
    pub edges: Vec<Edge>,
    pub live: Vec<bool>,
    pub labels: Vec<String>,
    pub loaded: Vec<Option<f64>>,
}

impl Snapshot {
    pub fn capacity(&self) -> usize {
        self.values.len()
    }

    pub fn encode(&self) -> Vec<u8> {
        let n = self.capacity();
        let mut out =
            Vec::with_capacity(64 + n * 16 + self.edges.len() * 24 + self.inbox.len() * 24);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.superstep.to_le_bytes());
        out.extend_from_slice(&(n as u64).to_le_bytes());

        section(&mut out, |buf| {
            for v in &self.values {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        });
        section(&mut out, |buf| {
            buf.extend_from_slice(&pack_bits(&self.halted))
        });
        section(&mut out, |buf| {
            buf.extend_from_slice(&(self.inbox.len() as u64).to_le_bytes());
            for (target, sender, payload) in &self.inbox {
                buf.extend_from_slice(&u64::from(target.0).to_le_bytes());
                buf.extend_from_slice(&u64::from(sender.0).to_le_bytes());
                buf.extend_from_slice(&payload.to_le_bytes());
            }
        });
        section(&mut out, |buf| {
            buf.extend_from_slice(&(self.aggregates.len() as u64).to_le_bytes());
            for (name, value) in &self.aggregates {
                buf.extend_from_slice(&(name.len() as u32).to_le_bytes());
                buf.extend_from_slice(name.as_bytes());
                buf.extend_from_slice(&value.to_le_bytes());
            }
        });
        section(&mut out, |buf| {
            buf.extend_from_slice(&(self.edges.len() as u64).to_le_bytes());
            for e in &self.edges {
                buf.extend_from_slice(&u64::from(e.src.0).to_le_bytes());
                buf.extend_from_slice(&u64::from(e.dst.0).to_le_bytes());
                buf.extend_from_slice(&e.weight.to_le_bytes());
            }
        });
        section(&mut out, |buf| {
            buf.extend_from_slice(&pack_bits(&self.live))
        });
        section(&mut out, |buf| {
            buf.extend_from_slice(&(self.labels.len() as u64).to_le_bytes());
            for label in &self.labels {
                buf.extend_from_slice(&(label.len() as u32).to_le_bytes());
                buf.extend_from_slice(label.as_bytes());
            }
        });
        section(&mut out, |buf| {
            let present: Vec<bool> = self.loaded.iter().map(Option::is_some).collect();
            buf.extend_from_slice(&pack_bits(&present));
            for v in &self.loaded {
                buf.extend_from_slice(&v.unwrap_or(0.0).to_le_bytes());
            }
        });
        out
    }

    pub fn decode(blob: &[u8]) -> Result<Snapshot, CheckpointError> {
        let mut r = Reader::new(blob, "header");
        if r.take(4)? != MAGIC {
            return Err(CheckpointError::BadMagic);
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(CheckpointError::UnsupportedVersion(version));
        }
        let superstep = r.u64()?;
        let n = r.u64()? as usize;

        let mut sections = Vec::with_capacity(SECTION_COUNT);
        for name in [
            "values",
            "halted",
            "inbox",
            "aggregates",
            "edges",
            "live",
            "labels",
            "loaded",
        ] {
            r.section = name;
            let len = r.u64()? as usize;
            sections.push(Reader::new(r.take(len)?, name));
        }
        if !r.rest().is_empty() {
            return Err(CheckpointError::TrailingBytes(r.rest().len()));
        }
        let [mut values_r, mut halted_r, mut inbox_r, mut agg_r, mut edges_r, mut live_r, mut labels_r, mut loaded_r]: [Reader; SECTION_COUNT] =
            sections.try_into().expect("fixed section count");

        let values = (0..n)
            .map(|_| values_r.f64())
            .collect::<Result<Vec<_>, _>>()?;
        values_r.finish()?;

        let halted = unpack_bits(halted_r.take(n.div_ceil(8))?, n);
        halted_r.finish()?;

        let count = inbox_r.u64()? as usize;
        let mut inbox = Vec::with_capacity(count.min(blob.len() / 24));
        for _ in 0..count {
            let target = inbox_r.vertex(n)?;
            let sender = inbox_r.vertex(u32::MAX as usize + 1)?;
            inbox.push((target, sender, inbox_r.f64()?));
        }
        inbox_r.finish()?;

        let count = agg_r.u64()? as usize;
        let mut aggregates = Vec::with_capacity(count.min(blob.len()));
        for _ in 0..count {
            let name = agg_r.string()?;
            aggregates.push((name, agg_r.f64()?));
        }
        agg_r.finish()?;

        let count = edges_r.u64()? as usize;
        let mut edges = Vec::with_capacity(count.min(blob.len() / 24));
        for _ in 0..count {
            let src = edges_r.vertex(n)?;
            let dst = edges_r.vertex(n)?;
            edges.push(Edge {
                src,
                dst,
                weight: edges_r.f64()?,
            });
        }
        edges_r.finish()?;

        let live = unpack_bits(live_r.take(n.div_ceil(8))?, n);
        live_r.finish()?;

        let count = labels_r.u64()? as usize;
        if count != n {
            return Err(labels_r.malformed(format!("{count} labels for {n} slots")));
        }
        let labels = (0..n)
            .map(|_| labels_r.string())
            .collect::<Result<Vec<_>, _>>()?;
        labels_r.finish()?;

        let present = unpack_bits(loaded_r.take(n.div_ceil(8))?, n);
        let mut loaded = Vec::with_capacity(n);
        for has in present {
            let v = loaded_r.f64()?;
            loaded.push(has.then_some(v));
        }
        loaded_r.finish()?;

        Ok(Snapshot {
            superstep,
            values,
            halted,
            inbox,
            aggregates,
            edges,
            live,
            labels,
            loaded,
        })
    }
}

fn section(out: &mut Vec<u8>, fill: impl FnOnce(&mut Vec<u8>)) {
    let at = out.len();
    out.extend_from_slice(&0u64.to_le_bytes());
    fill(out);
    let len = (out.len() - at - 8) as u64;
    out[at..at + 8].copy_from_slice(&len.to_le_bytes());
}

fn pack_bits(bits: &[bool]) -> Vec<u8> {
    let mut bytes = vec![0u8; bits.len().div_ceil(8)];
    for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
        bytes[i / 8] |= 1 << (i % 8);
    }
    bytes
}

fn unpack_bits(bytes: &[u8], n: usize) -> Vec<bool> {
    (0..n).map(|i| bytes[i / 8] & (1 << (i % 8)) != 0).collect()
}

#[derive(Debug)]
struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    section: &'static str,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8], section: &'static str) -> Self {
        Reader {
            buf,
            pos: 0,
            section,
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], CheckpointError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&end| end <= self.buf.len())
            .ok_or(CheckpointError::Truncated(self.section))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn rest(&self) -> &'a [u8] {
        &self.buf[self.pos..]
    }

    fn u32(&mut self) -> Result<u32, CheckpointError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, CheckpointError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, CheckpointError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn vertex(&mut self, bound: usize) -> Result<VertexId, CheckpointError> {
        let raw = self.u64()?;
        if raw as usize >= bound {
            return Err(self.malformed(format!("vertex id {raw} out of range")));
        }
        Ok(VertexId(raw as u32))
    }

    fn string(&mut self) -> Result<String, CheckpointError> {
        let len = self.u32()? as usize;
        let bytes = self.take(len)?;
        String::from_utf8(bytes.to_vec()).map_err(|e| self.malformed(e.to_string()))
    }

    fn malformed(&self, reason: String) -> CheckpointError {
        CheckpointError::Malformed {
            section: self.section,
            reason,
        }
    }

    fn finish(&self) -> Result<(), CheckpointError> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(self.malformed(format!("{} unread bytes", self.buf.len() - self.pos)))
        }
    }
}
