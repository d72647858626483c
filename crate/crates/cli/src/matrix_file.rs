//! `ses-matrix v1` text files.
//!
//! ```text
//! ses-matrix v1 <n> <units>
//! <n rows of n whitespace-separated decimals>
//! ```
//!
//! `units` is one of `2pi-MHz`, `rad-per-us`, `dimensionless`. Blank lines and
//! lines starting with `#` are skipped. The upper triangle is authoritative,
//! but the lower one must mirror it within the symmetry tolerance.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use sesim_core::compiler::{TargetHamiltonian, UnitTag};

use crate::error::CliError;

pub const MAGIC: &str = "ses-matrix";
pub const VERSION: &str = "v1";

/// Matrix as written in the file, before unit conversion.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFile {
    pub matrix: DMatrix<f64>,
    pub unit: UnitTag,
}

impl MatrixFile {
    pub fn new(matrix: DMatrix<f64>, unit: UnitTag) -> Self {
        MatrixFile { matrix, unit }
    }

    pub fn parse(text: &str, path: &str) -> Result<Self, CliError> {
        let err = |line: usize, message: String| CliError::Parse {
            path: path.to_string(),
            line,
            message,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (hline, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != MAGIC || fields[1] != VERSION {
            return Err(err(
                hline,
                format!("expected header `{MAGIC} {VERSION} <n> <units>`, found `{header}`"),
            ));
        }
        let n: usize = fields[2]
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| err(hline, format!("bad dimension `{}`", fields[2])))?;
        let unit: UnitTag = fields[3]
            .parse()
            .map_err(|_| err(hline, format!("unknown units tag `{}`", fields[3])))?;

        let mut m = DMatrix::zeros(n, n);
        let mut rows = 0;
        for (lno, line) in lines {
            if rows == n {
                return Err(err(lno, format!("more than {n} rows")));
            }
            let vals: Vec<&str> = line.split_whitespace().collect();
            if vals.len() != n {
                return Err(err(lno, format!("expected {n} values, found {}", vals.len())));
            }
            for (j, v) in vals.iter().enumerate() {
                let x: f64 = v
                    .parse()
                    .map_err(|_| err(lno, format!("column {}: not a number `{v}`", j + 1)))?;
                if !x.is_finite() {
                    return Err(err(lno, format!("column {}: non-finite value", j + 1)));
                }
                m[(rows, j)] = x;
            }
            rows += 1;
        }
        if rows < n {
            let last = text.lines().count();
            return Err(err(last.max(1), format!("expected {n} rows, found {rows}")));
        }
        Ok(MatrixFile { matrix: m, unit })
    }

    /// Parsed file plus its raw bytes (for hashing).
    pub fn read(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        let text = std::str::from_utf8(&bytes).map_err(|_| CliError::Parse {
            path: path.display().to_string(),
            line: 1,
            message: "not UTF-8 text".into(),
        })?;
        let parsed = Self::parse(text, &path.display().to_string())?;
        Ok((parsed, bytes))
    }

    /// Checks symmetry and converts to working units.
    pub fn target(&self) -> Result<TargetHamiltonian, CliError> {
        Ok(TargetHamiltonian::new(self.matrix.clone(), self.unit)?)
    }

    /// Shortest round-trip decimal form.
    pub fn to_text(&self) -> String {
        let n = self.matrix.nrows();
        let mut s = format!("{MAGIC} {VERSION} {n} {}\n", self.unit.as_str());
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| format!("{:?}", self.matrix[(i, j)])).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }
}
