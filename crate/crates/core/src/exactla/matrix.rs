use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows<T: Into<BigInt> + Copy>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&x| x.into()));
        }
        IntMatrix {
            rows: r,
            cols: c,
            data,
        }
    }

    /// `diag(d₁, …, d_n)`.
    pub fn diagonal(d: &[BigInt]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, x) in d.iter().enumerate() {
            m.data[i * n + i] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub(crate) fn data_mut(&mut self) -> &mut [BigInt] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<BigInt> {
        self.data
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        IntMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn neg(&self) -> Self {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::InvalidInput(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `M·v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::InvalidInput("vector length mismatch".into()));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Parses the text format: a header line `rows cols`, then one line of
    /// whitespace-separated signed integers per row. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header line \"rows cols\"".into(),
        })?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        let parse_dim = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: hline,
                msg: format!("bad dimension {s:?}"),
            })
        };
        let (rows, cols) = match dims.as_slice() {
            [r, c] => (parse_dim(r)?, parse_dim(c)?),
            _ => {
                return Err(Error::Parse {
                    line: hline,
                    msg: "header must be \"rows cols\"".into(),
                })
            }
        };
        if rows == 0 || cols == 0 {
            return Err(Error::Parse {
                line: hline,
                msg: "dimensions must be positive".into(),
            });
        }
        let mut data = Vec::with_capacity(rows * cols);
        let mut seen = 0;
        for (lno, line) in lines {
            if seen == rows {
                return Err(Error::Parse {
                    line: lno,
                    msg: format!("extra row beyond the declared {rows}"),
                });
            }
            let before = data.len();
            for tok in line.split_whitespace() {
                let v: BigInt = tok.parse().map_err(|_| Error::Parse {
                    line: lno,
                    msg: format!("bad integer {tok:?}"),
                })?;
                data.push(v);
            }
            if data.len() - before != cols {
                return Err(Error::Parse {
                    line: lno,
                    msg: format!("expected {cols} entries, found {}", data.len() - before),
                });
            }
            seen += 1;
        }
        if seen != rows {
            return Err(Error::Parse {
                line: text.lines().count() + 1,
                msg: format!("expected {rows} rows, found {seen}"),
            });
        }
        Ok(IntMatrix { rows, cols, data })
    }
}

impl fmt::Display for IntMatrix {
    /// Writes the text format accepted by [`IntMatrix::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}
