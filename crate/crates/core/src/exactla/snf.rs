use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::IntMatrix;

/// Which transforms to keep while diagonalizing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SnfOptions {
    pub keep_u: bool,
    pub keep_v: bool,
}

impl SnfOptions {
    pub const NONE: SnfOptions = SnfOptions {
        keep_u: false,
        keep_v: false,
    };
    pub const BOTH: SnfOptions = SnfOptions {
        keep_u: true,
        keep_v: true,
    };
}

/// Smith normal form `U·M·V = diag(d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    /// `min(rows, cols)` entries, nonnegative, nonzero ones ascending in a
    /// divisibility chain, zeros last.
    pub d: Vec<BigInt>,
    /// `det U`, which is ±1.
    pub u_det_sign: i32,
    /// `det V`, which is ±1.
    pub v_det_sign: i32,
    pub u: Option<IntMatrix>,
    pub v: Option<IntMatrix>,
    /// `U·w` for each vector `w` passed to [`snf_with`].
    pub tracked: Vec<Vec<BigInt>>,
}

impl SnfResult {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        self.d.iter().filter(|x| !x.is_zero()).count()
    }
}

/// Smith normal form, optionally keeping both transforms.
pub fn snf(m: &IntMatrix, keep_transforms: bool) -> SnfResult {
    let opts = if keep_transforms {
        SnfOptions::BOTH
    } else {
        SnfOptions::NONE
    };
    snf_with(m, opts, Vec::new())
}

/// Smith normal form, carrying extra column vectors through the row
/// operations so that `U·w` is available without materializing `U`.
///
/// Every tracked vector must have `m.rows()` entries.
pub fn snf_with(m: &IntMatrix, opts: SnfOptions, tracked: Vec<Vec<BigInt>>) -> SnfResult {
    for w in &tracked {
        assert_eq!(w.len(), m.rows(), "tracked vector length must equal row count");
    }
    let mut w = Work {
        rows: m.rows(),
        cols: m.cols(),
        a: m.clone().into_data(),
        u: opts.keep_u.then(|| IntMatrix::identity(m.rows()).into_data()),
        v: opts.keep_v.then(|| IntMatrix::identity(m.cols()).into_data()),
        tracked,
        u_sign: 1,
        v_sign: 1,
    };
    let n = w.rows.min(w.cols);
    let mut d = vec![BigInt::zero(); n];
    for t in 0..n {
        if !w.settle(t) {
            break;
        }
        d[t] = w.a[t * w.cols + t].clone();
    }
    let (rows, cols) = (w.rows, w.cols);
    SnfResult {
        d,
        u_det_sign: w.u_sign,
        v_det_sign: w.v_sign,
        u: w.u.map(|u| IntMatrix::new(rows, rows, u).expect("square")),
        v: w.v.map(|v| IntMatrix::new(cols, cols, v).expect("square")),
        tracked: w.tracked,
    }
}

struct Work {
    rows: usize,
    cols: usize,
    a: Vec<BigInt>,
    u: Option<Vec<BigInt>>,
    v: Option<Vec<BigInt>>,
    tracked: Vec<Vec<BigInt>>,
    u_sign: i32,
    v_sign: i32,
}

// dst += c * src
fn axpy(dst: &mut [BigInt], src: &[BigInt], c: &BigInt) {
    if c.is_one() {
        for (x, y) in dst.iter_mut().zip(src) {
            if !y.is_zero() {
                *x += y;
            }
        }
    } else if c == &BigInt::from(-1) {
        for (x, y) in dst.iter_mut().zip(src) {
            if !y.is_zero() {
                *x -= y;
            }
        }
    } else {
        for (x, y) in dst.iter_mut().zip(src) {
            if !y.is_zero() {
                *x += c * y;
            }
        }
    }
}

// Disjoint mutable row `i` and shared row `j` of a row-major buffer.
fn row_pair(data: &mut [BigInt], width: usize, i: usize, j: usize) -> (&mut [BigInt], &[BigInt]) {
    debug_assert_ne!(i, j);
    if i < j {
        let (lo, hi) = data.split_at_mut(j * width);
        (&mut lo[i * width..(i + 1) * width], &hi[..width])
    } else {
        let (lo, hi) = data.split_at_mut(i * width);
        (&mut hi[..width], &lo[j * width..(j + 1) * width])
    }
}

fn swap_rows(data: &mut [BigInt], width: usize, i: usize, j: usize) {
    if i == j {
        return;
    }
    let (lo, hi) = (i.min(j), i.max(j));
    let (a, b) = data.split_at_mut(hi * width);
    a[lo * width..(lo + 1) * width].swap_with_slice(&mut b[..width]);
}

impl Work {
    fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.a[i * self.cols + j]
    }

    // row_i += c * row_j, on a from column `from`, and on U and tracked.
    fn row_add(&mut self, i: usize, j: usize, c: &BigInt, from: usize) {
        let cols = self.cols;
        let (ri, rj) = row_pair(&mut self.a, cols, i, j);
        axpy(&mut ri[from..], &rj[from..], c);
        if let Some(u) = self.u.as_mut() {
            let (ui, uj) = row_pair(u, self.rows, i, j);
            axpy(ui, uj, c);
        }
        for w in &mut self.tracked {
            if !w[j].is_zero() {
                let add = c * &w[j];
                w[i] += add;
            }
        }
    }

    // col_i += c * col_j, on a from row `from`, and on V.
    fn col_add(&mut self, i: usize, j: usize, c: &BigInt, from: usize) {
        let cols = self.cols;
        for r in from..self.rows {
            let y = &self.a[r * cols + j];
            if !y.is_zero() {
                let add = c * y;
                self.a[r * cols + i] += add;
            }
        }
        if let Some(v) = self.v.as_mut() {
            for r in 0..cols {
                let y = &v[r * cols + j];
                if !y.is_zero() {
                    let add = c * y;
                    v[r * cols + i] += add;
                }
            }
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        swap_rows(&mut self.a, self.cols, i, j);
        if let Some(u) = self.u.as_mut() {
            swap_rows(u, self.rows, i, j);
        }
        for w in &mut self.tracked {
            w.swap(i, j);
        }
        self.u_sign = -self.u_sign;
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.a.swap(r * self.cols + i, r * self.cols + j);
        }
        if let Some(v) = self.v.as_mut() {
            for r in 0..self.cols {
                v.swap(r * self.cols + i, r * self.cols + j);
            }
        }
        self.v_sign = -self.v_sign;
    }

    fn negate_row(&mut self, i: usize) {
        let cols = self.cols;
        for x in &mut self.a[i * cols..(i + 1) * cols] {
            *x = -std::mem::take(x);
        }
        if let Some(u) = self.u.as_mut() {
            for x in &mut u[i * self.rows..(i + 1) * self.rows] {
                *x = -std::mem::take(x);
            }
        }
        for w in &mut self.tracked {
            w[i] = -std::mem::take(&mut w[i]);
        }
        self.u_sign = -self.u_sign;
    }

    // Smallest nonzero |entry| in the submatrix at (t, t); first in
    // row-major order on ties.
    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = self.at(i, j);
                if x.is_zero() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bi, bj)) => x.magnitude() < self.at(bi, bj).magnitude(),
                };
                if better {
                    best = Some((i, j));
                    if x.magnitude().is_one() {
                        return best;
                    }
                }
            }
        }
        best
    }

    // Brings a positive pivot dividing the whole remaining submatrix to
    // (t, t) with row t and column t cleared. Returns false when the
    // submatrix is zero.
    fn settle(&mut self, t: usize) -> bool {
        loop {
            let Some((pi, pj)) = self.find_pivot(t) else {
                return false;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            if self.at(t, t).sign() == Sign::Minus {
                self.negate_row(t);
            }
            let p = self.at(t, t).clone();
            let mut dirty = false;
            for i in t + 1..self.rows {
                let x = self.at(i, t);
                if x.is_zero() {
                    continue;
                }
                let q = x.div_floor(&p);
                if !q.is_zero() {
                    self.row_add(i, t, &-q, t);
                }
                dirty |= !self.at(i, t).is_zero();
            }
            for j in t + 1..self.cols {
                let x = self.at(t, j);
                if x.is_zero() {
                    continue;
                }
                let q = x.div_floor(&p);
                if !q.is_zero() {
                    self.col_add(j, t, &-q, t);
                }
                dirty |= !self.at(t, j).is_zero();
            }
            if dirty {
                continue;
            }
            if !p.is_one() {
                let bad = (t + 1..self.rows).find(|&i| {
                    (t + 1..self.cols).any(|j| !self.at(i, j).is_multiple_of(&p))
                });
                if let Some(i) = bad {
                    self.row_add(t, i, &BigInt::one(), t);
                    continue;
                }
            }
            return true;
        }
    }
}
