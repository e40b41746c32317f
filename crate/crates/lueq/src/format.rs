//! Matrix files and JSON output.
//!
//! A state file is a JSON object `{"m", "n", "re", "im"}` where `re` and
//! `im` are the row-major `mn x mn` real and imaginary parts. Row and
//! column `(i, j)` of the tensor basis, with `i < m` and `j < n`, sit at flat
//! index `i * n + j` (the 1-based `(i - 1) n + j`). Numbers are written with
//! 17 significant digits so files round-trip bit for bit.

use std::fs;
use std::io;
use std::path::Path;

use lueq_core::linalg::{ComplexMatrix, C64};
use lueq_core::states::LocalUnitary;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::Failure;

/// Real and imaginary parts of a complex matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parts {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl Parts {
    pub fn from_matrix(a: &ComplexMatrix) -> Self {
        let rows = |f: fn(&C64) -> f64| (0..a.rows()).map(|r| (0..a.cols()).map(|c| f(&a[(r, c)])).collect()).collect();
        Self { re: rows(|z| z.re), im: rows(|z| z.im) }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, String> {
        let rows = self.re.len();
        let cols = self.re.first().map_or(0, Vec::len);
        if self.im.len() != rows
            || self.re.iter().chain(&self.im).any(|r| r.len() != cols)
        {
            return Err("re and im must be rectangular arrays of equal shape".into());
        }
        let data = self
            .re
            .iter()
            .flatten()
            .zip(self.im.iter().flatten())
            .map(|(&x, &y)| C64::new(x, y))
            .collect();
        ComplexMatrix::new(rows, cols, data).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub m: usize,
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn new(m: usize, n: usize, a: &ComplexMatrix) -> Self {
        let Parts { re, im } = Parts::from_matrix(a);
        Self { m, n, re, im }
    }

    /// The matrix, after checking it is `mn x mn`.
    pub fn matrix(&self) -> Result<ComplexMatrix, String> {
        let d = self.m * self.n;
        let a = Parts { re: self.re.clone(), im: self.im.clone() }.to_matrix()?;
        if a.shape() != (d, d) {
            return Err(format!("expected a {d}x{d} matrix for m={}, n={}, found {}x{}", self.m, self.n, a.rows(), a.cols()));
        }
        Ok(a)
    }
}

/// `(U, V)` pair together with the residual it was verified at, if any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub m: usize,
    pub n: usize,
    pub u: Parts,
    pub v: Parts,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual: Option<f64>,
}

impl CertificateFile {
    pub fn new(lu: &LocalUnitary, residual: Option<f64>) -> Self {
        Self {
            m: lu.u.rows(),
            n: lu.v.rows(),
            u: Parts::from_matrix(&lu.u),
            v: Parts::from_matrix(&lu.v),
            residual,
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Serializes with one matrix row per line and 17 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, RowFormatter::default());
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<(), Failure> {
    let text = to_json(value);
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Default)]
struct RowFormatter {
    // One entry per open container: `Some(nested)` for arrays, `None` for
    // objects.
    stack: Vec<Option<bool>>,
}

impl RowFormatter {
    fn newline<W: ?Sized + io::Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.stack.len() {
            w.write_all(b"  ")?;
        }
        Ok(())
    }
}

impl Formatter for RowFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        if let Some(Some(nested)) = self.stack.last_mut() {
            *nested = true;
            self.newline(w)?;
        }
        self.stack.push(Some(false));
        w.write_all(b"[")
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        if let Some(Some(true)) = self.stack.pop() {
            self.newline(w)?;
        }
        w.write_all(b"]")
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        if let Some(Some(nested)) = self.stack.last_mut() {
            *nested = true;
            self.newline(w)?;
        }
        self.stack.push(None);
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.stack.pop();
        self.newline(w)?;
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }
}
