//! Matrix files.
//!
//! Text: one row per line, comma-separated decimal floats, no header. Floats
//! are written with Rust's shortest round-trip formatting, so a save/load
//! cycle is exact.
//!
//! Binary (`LSQ1`), all little-endian:
//!
//! | offset | size    | field                      |
//! |--------|---------|----------------------------|
//! | 0      | 4       | magic `b"LSQ1"`            |
//! | 4      | 4       | version, `u32` = 1         |
//! | 8      | 8       | `n`, `u64`                 |
//! | 16     | 8       | `d`, `u64`                 |
//! | 24     | 8·n·d   | entries, `f64`, row-major  |
//!
//! The row-major layout lets [`BinReader`] hand out one row at a time.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::stream::RowSource;

pub const MAGIC: [u8; 4] = *b"LSQ1";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: u64 = 24;

pub fn write_csv<W: Write>(mut w: W, a: &DenseMatrix) -> Result<()> {
    for row in a.rows() {
        let mut first = true;
        for x in row {
            if !first {
                w.write_all(b",")?;
            }
            first = false;
            write!(w, "{x}")?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: BufRead>(r: R) -> Result<DenseMatrix> {
    let mut data = Vec::new();
    let mut d = None;
    let mut n = 0;
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut width = 0;
        for field in line.split(',') {
            let x: f64 = field.trim().parse().map_err(|_| {
                Error::Format(format!("line {}: cannot parse '{}'", lineno + 1, field.trim()))
            })?;
            if !x.is_finite() {
                return Err(Error::Format(format!(
                    "line {}: non-finite value",
                    lineno + 1
                )));
            }
            data.push(x);
            width += 1;
        }
        match d {
            None => d = Some(width),
            Some(expected) if expected != width => {
                return Err(Error::Format(format!(
                    "line {}: {width} fields, expected {expected}",
                    lineno + 1
                )))
            }
            _ => {}
        }
        n += 1;
    }
    let d = d.ok_or_else(|| Error::Format("no rows".into()))?;
    DenseMatrix::new(n, d, data)
}

pub fn save_csv(path: impl AsRef<Path>, a: &DenseMatrix) -> Result<()> {
    write_csv(BufWriter::new(File::create(path)?), a)
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    read_csv(BufReader::new(File::open(path)?))
}

pub fn write_bin<W: Write>(mut w: W, a: &DenseMatrix) -> Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(a.nrows() as u64).to_le_bytes())?;
    w.write_all(&(a.ncols() as u64).to_le_bytes())?;
    for x in a.as_slice() {
        w.write_all(&x.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_bin(path: impl AsRef<Path>, a: &DenseMatrix) -> Result<()> {
    write_bin(BufWriter::new(File::create(path)?), a)
}

fn eof_as_format(err: io::Error, what: &str) -> Error {
    if err.kind() == io::ErrorKind::UnexpectedEof {
        Error::Format(format!("truncated file: {what}"))
    } else {
        Error::Io(err)
    }
}

/// Row-at-a-time reader over an `LSQ1` byte stream.
#[derive(Debug)]
pub struct BinReader<R> {
    inner: R,
    n: usize,
    d: usize,
    next_row: usize,
    bytes: Vec<u8>,
}

impl<R: Read> BinReader<R> {
    /// Reads and validates the header.
    pub fn new(mut inner: R) -> Result<Self> {
        let mut header = [0u8; HEADER_LEN as usize];
        inner
            .read_exact(&mut header)
            .map_err(|e| eof_as_format(e, "incomplete header"))?;
        if header[0..4] != MAGIC {
            return Err(Error::Format("bad magic bytes".into()));
        }
        let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let n = u64::from_le_bytes(header[8..16].try_into().unwrap());
        let d = u64::from_le_bytes(header[16..24].try_into().unwrap());
        let (n, d) = match (usize::try_from(n), usize::try_from(d)) {
            (Ok(n), Ok(d)) if n.checked_mul(d).and_then(|x| x.checked_mul(8)).is_some() => (n, d),
            _ => return Err(Error::Format(format!("shape {n}x{d} is too large"))),
        };
        if d == 0 && n > 0 {
            return Err(Error::Format("zero columns".into()));
        }
        Ok(Self {
            inner,
            n,
            d,
            next_row: 0,
            bytes: vec![0u8; d * 8],
        })
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.d
    }

    /// Fills `row` with the next row; `Ok(false)` once all rows are read.
    pub fn read_row_into(&mut self, row: &mut [f64]) -> Result<bool> {
        if self.next_row == self.n {
            return Ok(false);
        }
        if row.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: row.len(),
            });
        }
        let index = self.next_row;
        self.inner
            .read_exact(&mut self.bytes)
            .map_err(|e| eof_as_format(e, &format!("row {index} of {}", self.n)))?;
        for (x, chunk) in row.iter_mut().zip(self.bytes.chunks_exact(8)) {
            *x = f64::from_le_bytes(chunk.try_into().unwrap());
            if !x.is_finite() {
                return Err(Error::Format(format!("non-finite value in row {index}")));
            }
        }
        self.next_row += 1;
        Ok(true)
    }
}

impl<R: Read> Iterator for BinReader<R> {
    type Item = Result<Vec<f64>>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut row = vec![0.0; self.d];
        match self.read_row_into(&mut row) {
            Ok(true) => Some(Ok(row)),
            Ok(false) => None,
            Err(e) => {
                self.next_row = self.n;
                Some(Err(e))
            }
        }
    }
}

pub fn read_bin<R: Read>(r: R) -> Result<DenseMatrix> {
    let mut reader = BinReader::new(r)?;
    let (n, d) = (reader.nrows(), reader.ncols());
    let mut data = vec![0.0; n * d];
    for row in data.chunks_exact_mut(d.max(1)).take(n) {
        reader.read_row_into(row)?;
    }
    let mut probe = [0u8; 1];
    if reader.inner.read(&mut probe)? != 0 {
        return Err(Error::Format("trailing bytes after the last row".into()));
    }
    DenseMatrix::new(n, d, data)
}

pub fn load_bin(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let file = BinFile::open(path)?;
    read_bin(BufReader::new(File::open(&file.path)?))
}

/// An `LSQ1` file on disk that can be scanned any number of times without
/// loading it.
#[derive(Debug, Clone)]
pub struct BinFile {
    path: PathBuf,
    n: usize,
    d: usize,
}

impl BinFile {
    /// Validates the header and that the file length matches the shape.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = File::open(&path)?;
        let len = file.metadata()?.len();
        let reader = BinReader::new(BufReader::new(file))?;
        let expected = HEADER_LEN + 8 * (reader.nrows() as u64) * (reader.ncols() as u64);
        if len < expected {
            return Err(Error::Format(format!(
                "truncated file: {len} bytes, header promises {expected}"
            )));
        }
        if len > expected {
            return Err(Error::Format(format!(
                "{} trailing bytes after the last row",
                len - expected
            )));
        }
        Ok(Self {
            n: reader.nrows(),
            d: reader.ncols(),
            path,
        })
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.d
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn reader(&self) -> Result<BinReader<BufReader<File>>> {
        BinReader::new(BufReader::new(File::open(&self.path)?))
    }
}

impl RowSource for BinFile {
    fn ncols(&self) -> usize {
        self.d
    }

    fn scan(&mut self, visit: &mut dyn FnMut(usize, &[f64]) -> Result<()>) -> Result<usize> {
        let mut reader = self.reader()?;
        let mut row = vec![0.0; self.d];
        let mut i = 0;
        while reader.read_row_into(&mut row)? {
            visit(i, &row)?;
            i += 1;
        }
        Ok(i)
    }
}

/// `true` if the file starts with the `LSQ1` magic bytes.
pub fn is_bin_file(path: impl AsRef<Path>) -> Result<bool> {
    let mut magic = [0u8; 4];
    let mut file = File::open(path)?;
    let mut got = 0;
    while got < 4 {
        match file.read(&mut magic[got..])? {
            0 => return Ok(false),
            k => got += k,
        }
    }
    Ok(magic == MAGIC)
}

/// Loads either format, sniffing the magic bytes.
pub fn load_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    if is_bin_file(path)? {
        load_bin(path)
    } else {
        load_csv(path)
    }
}
