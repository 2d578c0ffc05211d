use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{AdjacencyMatrix, SeedSpec};
use crate::error::{invalid, Error, Result};

/// An exact probability `num/den` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Prob {
    num: u64,
    den: u64,
}

impl Prob {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return invalid("probability denominator is zero");
        }
        if num > den {
            return invalid(format!("probability {num}/{den} exceeds 1"));
        }
        let g = num.gcd(&den);
        Ok(Prob {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// One exact Bernoulli(num/den) draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        rng.random_range(0..self.den) < self.num
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Prob {
    type Err = Error;

    /// Accepts `a/b` or a plain decimal such as `0.25`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("cannot parse probability {s:?}"));
        if let Some((a, b)) = s.split_once('/') {
            let a = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim().parse().map_err(|_| bad())?;
            return Prob::new(a, b);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10u64.pow(frac.len() as u32);
        let frac: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let num = int
            .checked_mul(den)
            .and_then(|x| x.checked_add(frac))
            .ok_or_else(bad)?;
        Prob::new(num, den)
    }
}

impl Serialize for Prob {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Prob {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A random (or deterministic) graph model with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    /// Each of the `n²` possible edges, loops included, present with probability `q`.
    Bernoulli { n: usize, q: Prob },
    /// Symmetric Bernoulli graph with loops.
    ErdosLoops { n: usize, q: Prob },
    /// Union of `r` uniform perfect matchings, each edge doubled into both directions.
    RegularMatchings { n: usize, r: u32 },
    /// Bernoulli graph plus one extra loop at every vertex.
    ShiftedBernoulli { n: usize, q: Prob },
    /// Exactly `m1` forward and `m2` backward edges, fair-coin loops.
    UniformCounts { n: usize, m1: usize, m2: usize },
    /// The Cuntz polygon graph for `m̄`.
    CuntzPolygon { mbar: Vec<u32> },
}

impl ModelSpec {
    pub fn n(&self) -> usize {
        match self {
            ModelSpec::Bernoulli { n, .. }
            | ModelSpec::ErdosLoops { n, .. }
            | ModelSpec::RegularMatchings { n, .. }
            | ModelSpec::ShiftedBernoulli { n, .. }
            | ModelSpec::UniformCounts { n, .. } => *n,
            ModelSpec::CuntzPolygon { mbar } => mbar.len(),
        }
    }

    /// Short model name used on the command line.
    pub fn short_name(&self) -> &'static str {
        match self {
            ModelSpec::Bernoulli { .. } => "bernoulli",
            ModelSpec::ErdosLoops { .. } => "erdos",
            ModelSpec::RegularMatchings { .. } => "regular",
            ModelSpec::ShiftedBernoulli { .. } => "shifted",
            ModelSpec::UniformCounts { .. } => "uniform",
            ModelSpec::CuntzPolygon { .. } => "polygon",
        }
    }

    /// Whether every sample is the same graph.
    pub fn is_deterministic(&self) -> bool {
        matches!(self, ModelSpec::CuntzPolygon { .. })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n() == 0 {
            return invalid("graph must have at least one vertex");
        }
        match self {
            ModelSpec::RegularMatchings { n, r } => {
                if n % 2 != 0 {
                    return invalid(format!("perfect matchings need an even vertex count, got {n}"));
                }
                if *r == 0 {
                    return invalid("regularity r must be at least 1");
                }
            }
            ModelSpec::UniformCounts { n, m1, m2 } => {
                let max = n * (n - 1) / 2;
                if *m1 > max || *m2 > max {
                    return invalid(format!("edge counts must lie in [0, {max}]"));
                }
            }
            ModelSpec::CuntzPolygon { mbar }
                if mbar.contains(&0) => {
                    return invalid("polygon multiplicities must be positive");
                }
            _ => {}
        }
        Ok(())
    }

    /// Draws the sample at `seed`.
    pub fn generate(&self, seed: SeedSpec) -> Result<AdjacencyMatrix> {
        match self {
            ModelSpec::Bernoulli { n, q } => gen_bernoulli(*n, *q, seed),
            ModelSpec::ErdosLoops { n, q } => gen_erdos_loops(*n, *q, seed),
            ModelSpec::RegularMatchings { n, r } => gen_regular_matchings(*n, *r, seed),
            ModelSpec::ShiftedBernoulli { n, q } => gen_shifted_bernoulli(*n, *q, seed),
            ModelSpec::UniformCounts { n, m1, m2 } => gen_uniform_counts(*n, *m1, *m2, seed),
            ModelSpec::CuntzPolygon { mbar } => cuntz_polygon_adjacency(mbar),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Bernoulli { n, q } => write!(f, "D_{{{n},{q}}}"),
            ModelSpec::ErdosLoops { n, q } => write!(f, "E_{{{n},{q}}}"),
            ModelSpec::RegularMatchings { n, r } => write!(f, "G_{{{n},{r}}}"),
            ModelSpec::ShiftedBernoulli { n, q } => write!(f, "D_{{{n},{q}}}+I"),
            ModelSpec::UniformCounts { n, m1, m2 } => write!(f, "U_{{{n},{m1},{m2}}}"),
            ModelSpec::CuntzPolygon { mbar } => {
                let parts: Vec<String> = mbar.iter().map(|m| m.to_string()).collect();
                write!(f, "P_({})", parts.join(","))
            }
        }
    }
}

fn nonempty(n: usize) -> Result<()> {
    if n == 0 {
        return invalid("graph must have at least one vertex");
    }
    Ok(())
}

/// Bernoulli digraph: every entry independently 1 with probability `q`,
/// drawn in row-major order.
pub fn gen_bernoulli(n: usize, q: Prob, seed: SeedSpec) -> Result<AdjacencyMatrix> {
    nonempty(n)?;
    let mut rng = seed.rng();
    let mut a = AdjacencyMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if q.sample(&mut rng) {
                a.set(i, j, 1);
            }
        }
    }
    Ok(a)
}

/// Symmetric Bernoulli graph with loops: entries on and above the diagonal
/// are drawn row by row and mirrored below.
pub fn gen_erdos_loops(n: usize, q: Prob, seed: SeedSpec) -> Result<AdjacencyMatrix> {
    nonempty(n)?;
    let mut rng = seed.rng();
    let mut a = AdjacencyMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            if q.sample(&mut rng) {
                a.set(i, j, 1);
                a.set(j, i, 1);
            }
        }
    }
    Ok(a)
}

/// Sum of `r` independent uniform perfect matchings. Each matching shuffles
/// the vertex labels (Fisher–Yates) and pairs consecutive entries; each
/// matched pair contributes an edge in both directions.
pub fn gen_regular_matchings(n: usize, r: u32, seed: SeedSpec) -> Result<AdjacencyMatrix> {
    ModelSpec::RegularMatchings { n, r }.validate()?;
    let mut rng = seed.rng();
    let mut a = AdjacencyMatrix::zeros(n);
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..r {
        perm.shuffle(&mut rng);
        for pair in perm.chunks_exact(2) {
            a.bump(pair[0], pair[1]);
            a.bump(pair[1], pair[0]);
        }
    }
    Ok(a)
}

/// Bernoulli digraph plus the identity.
pub fn gen_shifted_bernoulli(n: usize, q: Prob, seed: SeedSpec) -> Result<AdjacencyMatrix> {
    let mut a = gen_bernoulli(n, q, seed)?;
    for i in 0..n {
        a.bump(i, i);
    }
    Ok(a)
}

// k-th position above the diagonal in row-major order.
fn upper_position(n: usize, mut k: usize) -> (usize, usize) {
    for i in 0..n {
        let len = n - 1 - i;
        if k < len {
            return (i, i + 1 + k);
        }
        k -= len;
    }
    unreachable!("index beyond the strict upper triangle")
}

/// Uniform digraph with exactly `m1` forward and `m2` backward edges.
/// The forward subset is drawn first, then the backward subset, then one
/// fair coin per loop in vertex order.
pub fn gen_uniform_counts(n: usize, m1: usize, m2: usize, seed: SeedSpec) -> Result<AdjacencyMatrix> {
    ModelSpec::UniformCounts { n, m1, m2 }.validate()?;
    let mut rng = seed.rng();
    let slots = n * (n - 1) / 2;
    let mut a = AdjacencyMatrix::zeros(n);
    for k in index::sample(&mut rng, slots, m1) {
        let (i, j) = upper_position(n, k);
        a.set(i, j, 1);
    }
    for k in index::sample(&mut rng, slots, m2) {
        let (i, j) = upper_position(n, k);
        a.set(j, i, 1);
    }
    for i in 0..n {
        if rng.random::<bool>() {
            a.set(i, i, 1);
        }
    }
    Ok(a)
}

/// The Cuntz polygon graph: vertices `v_0 … v_{n−1}` on a cycle, one loop
/// at each, and `m_i` edges from `v_{i−1}` to `v_i` (indices mod `n`).
pub fn cuntz_polygon_adjacency(mbar: &[u32]) -> Result<AdjacencyMatrix> {
    if mbar.is_empty() {
        return invalid("polygon needs at least one multiplicity");
    }
    ModelSpec::CuntzPolygon {
        mbar: mbar.to_vec(),
    }
    .validate()?;
    let n = mbar.len();
    let mut a = AdjacencyMatrix::identity(n);
    for (i, &m) in mbar.iter().enumerate() {
        let src = (i + n - 1) % n;
        a.set(src, i, a.get(src, i) + m);
    }
    Ok(a)
}
