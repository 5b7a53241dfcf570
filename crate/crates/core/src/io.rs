//! Index file format.
//!
//! ```text
//! "BWTG" | version u8 = 1
//! n u64 | alphabet size u64 | sample rate u64          (little endian)
//! alphabet bytes | bwt bytes (n + 1)
//! locate sample count u64 | (row u64, pos u64)*
//! antilocate sample count u64 | (pos u64, row u64)*
//! crc32 u32 of everything above
//! ```

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::BwtIndex;

pub const INDEX_MAGIC: &[u8; 4] = b"BWTG";
pub const INDEX_VERSION: u8 = 1;

pub fn index_to_bytes(index: &BwtIndex) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(INDEX_MAGIC);
    out.push(INDEX_VERSION);
    put_u64(&mut out, index.len() as u64);
    put_u64(&mut out, index.alphabet().len() as u64);
    put_u64(&mut out, index.sample_rate() as u64);
    out.extend_from_slice(index.alphabet());
    out.extend_from_slice(&index.bwt());
    put_pairs(&mut out, index.locate_samples());
    put_pairs(&mut out, index.antilocate_samples());
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

pub fn index_from_bytes(bytes: &[u8]) -> Result<BwtIndex> {
    let mut r = open(bytes, INDEX_MAGIC, INDEX_VERSION, "index file")?;
    let n = r.len_u64()?;
    let sigma = r.len_u64()?;
    let rate = r.len_u64()?;
    let alphabet = r.take(sigma)?.to_vec();
    let bwt = r.take(n.checked_add(1).ok_or_else(|| r.err("n overflows"))?)?;
    let locate = r.pairs()?;
    let antilocate = r.pairs()?;
    verify_crc(bytes, r)?;
    BwtIndex::from_parts(n, alphabet, bwt, rate, locate, antilocate)
}

pub fn save_index(index: &BwtIndex, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, index_to_bytes(index))?;
    Ok(())
}

pub fn load_index(path: impl AsRef<Path>) -> Result<BwtIndex> {
    index_from_bytes(&fs::read(path)?)
}

pub(crate) fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_pairs(out: &mut Vec<u8>, pairs: &[(usize, usize)]) {
    put_u64(out, pairs.len() as u64);
    for &(a, b) in pairs {
        put_u64(out, a as u64);
        put_u64(out, b as u64);
    }
}

/// Checks magic and version; returns a reader positioned after the header.
pub(crate) fn open<'a>(
    bytes: &'a [u8],
    magic: &[u8; 4],
    version: u8,
    what: &'static str,
) -> Result<Reader<'a>> {
    if bytes.len() < magic.len() + 1 {
        return Err(Error::format(what, "truncated"));
    }
    if &bytes[..4] != magic {
        return Err(Error::format(what, "bad magic"));
    }
    if bytes[4] != version {
        return Err(Error::format(what, format!("unsupported version {}", bytes[4])));
    }
    Ok(Reader::new(&bytes[5..], what))
}

/// Expects exactly the 4-byte CRC to remain in `r` and checks it against all
/// preceding bytes of `bytes`.
pub(crate) fn verify_crc(bytes: &[u8], mut r: Reader<'_>) -> Result<()> {
    let tail = r.take(4)?;
    r.finish()?;
    let stored = u32::from_le_bytes(tail.try_into().unwrap());
    let computed = crc32fast::hash(&bytes[..bytes.len() - 4]);
    if stored != computed {
        return Err(Error::Checksum { stored, computed });
    }
    Ok(())
}

pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    what: &'static str,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8], what: &'static str) -> Self {
        Reader { buf, what }
    }

    pub(crate) fn err(&self, reason: &str) -> Error {
        Error::format(self.what, reason)
    }

    pub(crate) fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        if self.buf.len() < k {
            return Err(self.err("truncated"));
        }
        let (head, rest) = self.buf.split_at(k);
        self.buf = rest;
        Ok(head)
    }

    pub(crate) fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    /// A u64 that must fit in the remaining buffer as a count or length.
    pub(crate) fn len_u64(&mut self) -> Result<usize> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| self.err("length overflows usize"))
    }

    fn pairs(&mut self) -> Result<Vec<(usize, usize)>> {
        let count = self.len_u64()?;
        if count > self.buf.len() / 16 {
            return Err(self.err("truncated sample list"));
        }
        (0..count)
            .map(|_| Ok((self.len_u64()?, self.len_u64()?)))
            .collect()
    }

    pub(crate) fn finish(&self) -> Result<()> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(self.err("trailing bytes"))
        }
    }
}
