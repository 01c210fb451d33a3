//! Little-endian byte-level encoding helpers shared by the binary formats.
//!
//! Every reader tracks its absolute byte offset so malformed streams can be
//! rejected with the exact position at which decoding failed, and reads are
//! incremental: array lengths announced by a header are never trusted for
//! up-front allocation, so a truncated or hostile stream runs out of bytes
//! long before it can exhaust memory.

use std::io::{self, Read, Write};

use crate::error::{Error, Result};

/// A reader that knows how many bytes it has consumed.
pub(crate) struct CountingReader<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> CountingReader<R> {
    pub(crate) fn new(inner: R) -> Self {
        CountingReader { inner, offset: 0 }
    }

    /// Absolute offset of the next unread byte.
    pub(crate) fn offset(&self) -> u64 {
        self.offset
    }

    fn fill(&mut self, buf: &mut [u8]) -> Result<()> {
        let at = self.offset;
        match self.inner.read_exact(buf) {
            Ok(()) => {
                self.offset += buf.len() as u64;
                Ok(())
            }
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => Err(Error::format(
                at,
                format!("unexpected end of stream ({} more bytes needed)", buf.len()),
            )),
            Err(e) => Err(Error::Io(e)),
        }
    }

    pub(crate) fn u8(&mut self) -> Result<u8> {
        let mut b = [0u8; 1];
        self.fill(&mut b)?;
        Ok(b[0])
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        let mut b = [0u8; 4];
        self.fill(&mut b)?;
        Ok(u32::from_le_bytes(b))
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        let mut b = [0u8; 8];
        self.fill(&mut b)?;
        Ok(u64::from_le_bytes(b))
    }

    /// Consumes and checks an 8-byte magic tag at the current offset.
    pub(crate) fn magic(&mut self, expected: &[u8; 8]) -> Result<()> {
        let at = self.offset;
        let mut b = [0u8; 8];
        self.fill(&mut b)?;
        if &b != expected {
            return Err(Error::format(
                at,
                format!(
                    "bad magic: expected {:?}, found {:?}",
                    String::from_utf8_lossy(expected),
                    String::from_utf8_lossy(&b)
                ),
            ));
        }
        Ok(())
    }

    /// Rejects streams that continue past the structure they encode.
    pub(crate) fn expect_end(&mut self) -> Result<()> {
        let mut b = [0u8; 1];
        match self.inner.read_exact(&mut b) {
            Ok(()) => Err(Error::format(self.offset, "trailing bytes after structure")),
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => Ok(()),
            Err(e) => Err(Error::Io(e)),
        }
    }
}

pub(crate) fn put_u32<W: Write>(w: &mut W, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

pub(crate) fn put_u64<W: Write>(w: &mut W, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}
