//! Vector files.
//!
//! Text files hold one vector per line as whitespace-separated decimals;
//! `#` starts a comment and blank lines are skipped. Binary files are a
//! concatenation of records, each the magic `TBL1`, the dimension as a
//! little-endian `u32`, then that many little-endian `f64` values.

use std::io::{self, BufRead, Read, Write};

use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"TBL1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum VectorFormat {
    Text,
    Binary,
}

#[derive(Debug, Error)]
pub enum VectorIoError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: cannot parse {token:?} as a number")]
    Parse { line: usize, token: String },
    #[error("record {record}: bad magic (expected TBL1)")]
    BadMagic { record: usize },
    #[error("record {record}: truncated")]
    Truncated { record: usize },
    #[error("record {record}: zero-length vector")]
    Empty { record: usize },
}

/// Reads every vector of a text file.
pub fn read_text(reader: impl BufRead) -> Result<Vec<Vec<f64>>, VectorIoError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let v = body
            .split_whitespace()
            .map(|tok| tok.parse::<f64>().map_err(|_| VectorIoError::Parse { line: i + 1, token: tok.to_owned() }))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(v);
    }
    Ok(out)
}

/// Writes vectors as text, one per line, in shortest round-trip form.
pub fn write_text<'a>(mut w: impl Write, vectors: impl IntoIterator<Item = &'a [f64]>) -> io::Result<()> {
    for v in vectors {
        let mut first = true;
        for x in v {
            if !first {
                w.write_all(b" ")?;
            }
            write!(w, "{x:?}")?;
            first = false;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads every record of a binary file.
pub fn read_binary(mut reader: impl Read) -> Result<Vec<Vec<f64>>, VectorIoError> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let mut out = Vec::new();
    let mut rest = bytes.as_slice();
    while !rest.is_empty() {
        let record = out.len();
        if rest.len() < 8 {
            return Err(VectorIoError::Truncated { record });
        }
        if &rest[..4] != MAGIC {
            return Err(VectorIoError::BadMagic { record });
        }
        let n = u32::from_le_bytes(rest[4..8].try_into().unwrap()) as usize;
        if n == 0 {
            return Err(VectorIoError::Empty { record });
        }
        let body = n.checked_mul(8).and_then(|b| rest.get(8..8 + b)).ok_or(VectorIoError::Truncated { record })?;
        out.push(body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect());
        rest = &rest[8 + body.len()..];
    }
    Ok(out)
}

pub fn write_binary<'a>(mut w: impl Write, vectors: impl IntoIterator<Item = &'a [f64]>) -> io::Result<()> {
    for v in vectors {
        let n = u32::try_from(v.len()).map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "vector too long"))?;
        w.write_all(MAGIC)?;
        w.write_all(&n.to_le_bytes())?;
        for x in v {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Binary if the data starts with the magic, text otherwise.
pub fn detect(head: &[u8]) -> VectorFormat {
    if head.starts_with(MAGIC) {
        VectorFormat::Binary
    } else {
        VectorFormat::Text
    }
}

/// Reads a whole file in either format.
pub fn read_any(bytes: &[u8]) -> Result<(VectorFormat, Vec<Vec<f64>>), VectorIoError> {
    let format = detect(bytes);
    let vectors = match format {
        VectorFormat::Binary => read_binary(bytes)?,
        VectorFormat::Text => read_text(bytes)?,
    };
    Ok((format, vectors))
}

pub fn write(format: VectorFormat, w: impl Write, vectors: &[Vec<f64>]) -> io::Result<()> {
    let it = vectors.iter().map(Vec::as_slice);
    match format {
        VectorFormat::Text => write_text(w, it),
        VectorFormat::Binary => write_binary(w, it),
    }
}
