//! Directed multigraphs as adjacency matrices: random models with
//! reproducible per-sample seeding, Cuntz polygons, and structural
//! predicates.

mod model;
mod seed;

pub use model::{
    cuntz_polygon_adjacency, gen_bernoulli, gen_erdos_loops, gen_regular_matchings,
    gen_shifted_bernoulli, gen_uniform_counts, ModelSpec, Prob,
};
pub use seed::SeedSpec;

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{invalid, Result};
use crate::exactla::IntMatrix;

/// `a[i][j]` = number of edges `i → j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdjacencyMatrix {
    n: usize,
    a: Vec<u32>,
}

impl AdjacencyMatrix {
    pub fn zeros(n: usize) -> Self {
        AdjacencyMatrix {
            n,
            a: vec![0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return invalid("adjacency matrix must have at least one vertex");
        }
        if rows.iter().any(|r| r.len() != n) {
            return invalid("adjacency matrix must be square");
        }
        Ok(AdjacencyMatrix {
            n,
            a: rows.concat(),
        })
    }

    /// Accepts a square integer matrix with nonnegative entries that fit in `u32`.
    pub fn from_int_matrix(m: &IntMatrix) -> Result<Self> {
        if !m.is_square() {
            return invalid(format!(
                "adjacency matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            ));
        }
        let n = m.rows();
        let mut a = Vec::with_capacity(n * n);
        for i in 0..n {
            for x in m.row(i) {
                match u32::try_from(x) {
                    Ok(v) => a.push(v),
                    Err(_) => return invalid(format!("entry {x} is not an edge count")),
                }
            }
        }
        Ok(AdjacencyMatrix { n, a })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.a[i * self.n + j] = v;
    }

    pub(crate) fn bump(&mut self, i: usize, j: usize) {
        self.a[i * self.n + j] += 1;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        let data = self.a.iter().map(|&x| BigInt::from(x)).collect();
        IntMatrix::new(self.n, self.n, data).expect("square")
    }

    /// `Aᵗ − I`, whose cokernel and kernel give K₀ and K₁.
    pub fn transpose_minus_identity(&self) -> IntMatrix {
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let x = i64::from(self.get(j, i)) - i64::from(i == j);
                data.push(BigInt::from(x));
            }
        }
        IntMatrix::new(n, n, data).expect("square")
    }

    /// `I − A`, the Bowen–Franks matrix.
    pub fn identity_minus(&self) -> IntMatrix {
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let x = i64::from(i == j) - i64::from(self.get(i, j));
                data.push(BigInt::from(x));
            }
        }
        IntMatrix::new(n, n, data).expect("square")
    }

    fn reaches_all(&self, forward: bool) -> bool {
        let n = self.n;
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for w in 0..n {
                let edge = if forward { self.get(v, w) } else { self.get(w, v) };
                if edge > 0 && !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == n
    }

    /// Single strongly connected component containing every vertex.
    pub fn is_strongly_connected(&self) -> bool {
        self.reaches_all(true) && self.reaches_all(false)
    }

    /// Every row and column has exactly one 1 and zeros elsewhere.
    pub fn is_permutation_matrix(&self) -> bool {
        let n = self.n;
        let mut col_hits = vec![0u32; n];
        for i in 0..n {
            let mut row_hits = 0;
            for j in 0..n {
                match self.get(i, j) {
                    0 => {}
                    1 => {
                        row_hits += 1;
                        col_hits[j] += 1;
                    }
                    _ => return false,
                }
            }
            if row_hits != 1 {
                return false;
            }
        }
        col_hits.iter().all(|&c| c == 1)
    }

    /// Some vertex emits no edges.
    pub fn has_sink(&self) -> bool {
        (0..self.n).any(|i| self.row(i).iter().all(|&x| x == 0))
    }
}

impl fmt::Display for AdjacencyMatrix {
    /// Writes the shared matrix text format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}
