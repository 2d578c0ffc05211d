//! Finite abelian groups in invariant-factor form.
//!
//! A [`FinAbGroup`] stores `ℤ/d₁ ⊕ … ⊕ ℤ/d_k` with `d₁ | d₂ | … | d_k`, each
//! `dᵢ ≥ 2`, plus a free rank carried alongside for K-theory bookkeeping.
//! Primary parts are derived on demand and cached.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith;
use crate::error::{invalid, Error, Result};

/// A partition `λ₁ ≥ λ₂ ≥ … ≥ λ_M ≥ 1`, read as `⊕ ℤ/p^{λᵢ}` for some prime.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Builds a partition from arbitrary positive parts, sorting them.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return invalid("partition parts must be positive");
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition(parts))
    }

    pub fn trivial() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }

    /// At most one part: the p-group is cyclic.
    pub fn is_cyclic(&self) -> bool {
        self.0.len() <= 1
    }

    /// Sum of the parts, i.e. `log_p |G_p|`.
    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Conjugate partition: `μᵢ = |{j : λⱼ ≥ i}|` for `i = 1..=λ₁`.
    pub fn conjugate(&self) -> Vec<u32> {
        let top = self.0.first().copied().unwrap_or(0);
        (1..=top)
            .map(|i| self.0.iter().filter(|&&l| l >= i).count() as u32)
            .collect()
    }

    /// `Some(N)` when this is `ℤ/p^N` with `N ≥ 1`.
    pub fn cyclic_exponent(&self) -> Option<u32> {
        match self.0.as_slice() {
            [n] => Some(*n),
            _ => None,
        }
    }

    /// `Some(N)` when this is `(ℤ/p)^N` with `N ≥ 1`.
    pub fn elementary_rank(&self) -> Option<u32> {
        if !self.0.is_empty() && self.0.iter().all(|&x| x == 1) {
            Some(self.0.len() as u32)
        } else {
            None
        }
    }

    /// All partitions of `n`, in reverse lexicographic order.
    pub fn all_of(n: u32) -> Vec<Partition> {
        fn rec(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if n == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for k in (1..=max.min(n)).rev() {
                cur.push(k);
                rec(n - k, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }

    /// Human-readable group label at prime `p`, e.g. `Z/4`, `(Z/2)^2`, `Z/2+Z/4`.
    pub fn group_label(&self, p: u64) -> String {
        if self.0.is_empty() {
            return "trivial".to_string();
        }
        let mut asc = self.0.clone();
        asc.reverse();
        let mut pieces: Vec<String> = Vec::new();
        let mut i = 0;
        while i < asc.len() {
            let mut j = i;
            while j < asc.len() && asc[j] == asc[i] {
                j += 1;
            }
            let order = BigUint::from(p).pow(asc[i]);
            let count = j - i;
            if count == 1 {
                pieces.push(format!("Z/{order}"));
            } else {
                pieces.push(format!("(Z/{order})^{count}"));
            }
            i = j;
        }
        pieces.join("+")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl std::str::FromStr for Partition {
    type Err = Error;

    /// Parses the display form, e.g. `(2,1)` or `()`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::InvalidInput(format!("bad partition {s:?}")))?;
        if inner.trim().is_empty() {
            return Ok(Partition::trivial());
        }
        let parts = inner
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidInput(format!("bad partition {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter())
    }
}

/// Sylow decomposition: prime → partition of exponents.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrimaryDecomposition {
    pub parts: BTreeMap<BigUint, Partition>,
}

impl PrimaryDecomposition {
    /// Merges the primary parts back into invariant factors (CRT).
    pub fn to_invariant_factors(&self) -> Vec<BigUint> {
        let width = self.parts.values().map(|p| p.0.len()).max().unwrap_or(0);
        let mut factors = vec![BigUint::one(); width];
        for (p, part) in &self.parts {
            // largest exponent goes to the last invariant factor
            for (k, &e) in part.0.iter().enumerate() {
                factors[width - 1 - k] *= p.pow(e);
            }
        }
        factors
    }
}

/// Height of a group element: the largest `k` with `x ∈ p^k G`, or infinite
/// for the zero element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Height {
    Finite(u32),
    Infinite,
}

/// Canonical Aut(G)-orbit label: for each prime dividing `|G|`, the height
/// sequence `h(x_p), h(p x_p), h(p² x_p), …` terminated by the first
/// infinite height.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrbitLabel(pub Vec<(BigUint, Vec<Height>)>);

/// An element of a [`FinAbGroup`], in invariant-factor coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    coords: Vec<BigUint>,
}

impl GroupElement {
    pub fn coords(&self) -> &[BigUint] {
        &self.coords
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.coords.iter().map(|c| c.to_string()))
    }
}

/// Finitely generated abelian group `ℤ^free_rank ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_k`.
#[derive(Debug, Clone, Default)]
pub struct FinAbGroup {
    factors: Vec<BigUint>,
    free_rank: usize,
    primary: OnceLock<PrimaryDecomposition>,
}

impl PartialEq for FinAbGroup {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors && self.free_rank == other.free_rank
    }
}

impl Eq for FinAbGroup {}

impl Serialize for FinAbGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("FinAbGroup", 2)?;
        let f: Vec<String> = self.factors.iter().map(|d| d.to_string()).collect();
        st.serialize_field("invariant_factors", &f)?;
        st.serialize_field("free_rank", &self.free_rank)?;
        st.end()
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pieces: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => pieces.push("Z".into()),
            r => pieces.push(format!("Z^{r}")),
        }
        pieces.extend(self.factors.iter().map(|d| format!("Z/{d}")));
        if pieces.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", pieces.join("+"))
        }
    }
}

impl FinAbGroup {
    /// The trivial group.
    pub fn trivial() -> Self {
        Self::default()
    }

    /// Builds a group from a ready-made divisibility chain of factors `≥ 2`.
    pub fn new(factors: Vec<BigUint>, free_rank: usize) -> Result<Self> {
        if factors.iter().any(|d| d < &BigUint::from(2u32)) {
            return invalid("invariant factors must be at least 2");
        }
        if factors.windows(2).any(|w| !(&w[1] % &w[0]).is_zero()) {
            return invalid("invariant factors must form a divisibility chain");
        }
        Ok(FinAbGroup {
            factors,
            free_rank,
            primary: OnceLock::new(),
        })
    }

    /// Convenience constructor for small torsion groups, e.g. `&[2, 6]`.
    /// The entries are normalized like [`FinAbGroup::from_diagonal`].
    pub fn from_u64s(diag: &[u64]) -> Self {
        let diag: Vec<BigInt> = diag.iter().map(|&d| BigInt::from(d)).collect();
        Self::from_diagonal(&diag).expect("nonnegative entries")
    }

    /// Cokernel of `diag(d₁,…,d_n)`: ones are dropped, zeros become free
    /// rank, and the rest is normalized into a divisibility chain by
    /// repeated `(a, b) ↦ (gcd, lcm)` exchange.
    pub fn from_diagonal(diag: &[BigInt]) -> Result<Self> {
        let mut free_rank = 0;
        let mut torsion: Vec<BigUint> = Vec::new();
        for d in diag {
            match d.sign() {
                Sign::Minus => return invalid(format!("negative diagonal entry {d}")),
                Sign::NoSign => free_rank += 1,
                Sign::Plus => {
                    let m = d.magnitude().clone();
                    if !m.is_one() {
                        torsion.push(m);
                    }
                }
            }
        }
        let is_chain = torsion.windows(2).all(|w| (&w[1] % &w[0]).is_zero());
        if !is_chain {
            let len = torsion.len();
            for i in 0..len {
                for j in i + 1..len {
                    let g = torsion[i].gcd(&torsion[j]);
                    let l = torsion[i].lcm(&torsion[j]);
                    torsion[i] = g;
                    torsion[j] = l;
                }
            }
            torsion.retain(|d| !d.is_one());
        }
        Ok(FinAbGroup {
            factors: torsion,
            free_rank,
            primary: OnceLock::new(),
        })
    }

    pub fn invariant_factors(&self) -> &[BigUint] {
        &self.factors
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    /// The torsion subgroup (free rank dropped).
    pub fn torsion(&self) -> FinAbGroup {
        FinAbGroup {
            factors: self.factors.clone(),
            free_rank: 0,
            primary: OnceLock::new(),
        }
    }

    /// Order of the torsion part.
    pub fn order(&self) -> BigUint {
        self.factors.iter().product()
    }

    /// Exponent of the torsion part (largest invariant factor, or 1).
    pub fn exponent(&self) -> BigUint {
        self.factors.last().cloned().unwrap_or_else(BigUint::one)
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty() && self.free_rank == 0
    }

    /// Torsion cyclicity: at most one invariant factor.
    pub fn is_cyclic(&self) -> bool {
        self.factors.len() <= 1
    }

    fn require_torsion(&self, what: &str) -> Result<()> {
        if self.free_rank > 0 {
            return Err(Error::Unsupported(format!(
                "{what} requires a finite group (free rank {})",
                self.free_rank
            )));
        }
        Ok(())
    }

    /// Exponent partition of the Sylow p-subgroup of the torsion part.
    pub fn sylow(&self, p: u64) -> Result<Partition> {
        if !arith::is_prime_u64(p) {
            return invalid(format!("{p} is not prime"));
        }
        let parts: Vec<u32> = self
            .factors
            .iter()
            .map(|d| arith::valuation(d, p))
            .filter(|&e| e > 0)
            .collect();
        Partition::new(parts)
    }

    pub fn is_p_cyclic(&self, p: u64) -> Result<bool> {
        Ok(self.sylow(p)?.is_cyclic())
    }

    /// Full primary decomposition of the torsion part (factorizes `|G|`).
    pub fn primary_decomposition(&self) -> &PrimaryDecomposition {
        self.primary.get_or_init(|| {
            let Some(top) = self.factors.last() else {
                return PrimaryDecomposition::default();
            };
            let mut parts = BTreeMap::new();
            for p in arith::factorize(top).into_keys() {
                let exps: Vec<u32> = self
                    .factors
                    .iter()
                    .map(|d| big_valuation(d, &p))
                    .filter(|&e| e > 0)
                    .collect();
                parts.insert(p, Partition::new(exps).expect("positive exponents"));
            }
            PrimaryDecomposition { parts }
        })
    }

    /// `|Aut(G)|`, as a product of the closed form for each primary part.
    ///
    /// For a p-group with exponents `e₁ ≤ … ≤ e_n`, set
    /// `d_k = max{l : e_l = e_k}` and `c_k = min{l : e_l = e_k}`; then
    /// `|Aut| = ∏ (p^{d_k} − p^{k−1}) · ∏ p^{e_j (n − d_j)} · ∏ p^{(e_i − 1)(n − c_i + 1)}`.
    pub fn aut_order(&self) -> Result<BigUint> {
        self.require_torsion("aut_order")?;
        let mut total = BigUint::one();
        for (p, part) in &self.primary_decomposition().parts {
            total *= p_group_aut_order(p, part);
        }
        Ok(total)
    }

    /// `N(G)`: the number of symmetric perfect pairings `G × G → ℂ*`
    /// divided by `|G|·|Aut(G)|`, evaluated per prime from the exponent
    /// partition and its conjugate.
    pub fn pairing_count_normalized(&self) -> Result<BigRational> {
        self.require_torsion("pairing_count_normalized")?;
        let mut total = BigRational::one();
        for (p, part) in &self.primary_decomposition().parts {
            total *= p_group_pairing_weight(p, part);
        }
        Ok(total)
    }

    /// Validates coordinates and reduces nothing: each `coords[i]` must be
    /// in `[0, dᵢ)`.
    pub fn element(&self, coords: Vec<BigUint>) -> Result<GroupElement> {
        if coords.len() != self.factors.len() {
            return invalid(format!(
                "element has {} coordinates, group has {} invariant factors",
                coords.len(),
                self.factors.len()
            ));
        }
        for (i, (x, d)) in coords.iter().zip(&self.factors).enumerate() {
            if x >= d {
                return invalid(format!("coordinate {i} = {x} out of range for Z/{d}"));
            }
        }
        Ok(GroupElement { coords })
    }

    pub fn element_u64(&self, coords: &[u64]) -> Result<GroupElement> {
        self.element(coords.iter().map(|&c| BigUint::from(c)).collect())
    }

    /// Reduces arbitrary integers into the torsion coordinates.
    pub fn reduce(&self, coords: &[BigInt]) -> Result<GroupElement> {
        if coords.len() != self.factors.len() {
            return invalid("coordinate count mismatch");
        }
        let coords = coords
            .iter()
            .zip(&self.factors)
            .map(|(x, d)| {
                let d = BigInt::from(d.clone());
                x.mod_floor(&d).magnitude().clone()
            })
            .collect();
        Ok(GroupElement { coords })
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            coords: vec![BigUint::zero(); self.factors.len()],
        }
    }

    /// `(1, …, 1)`: the unit class of the Cuntz polygon with these factors.
    pub fn all_ones(&self) -> GroupElement {
        GroupElement {
            coords: vec![BigUint::one(); self.factors.len()],
        }
    }

    fn check(&self, x: &GroupElement) -> Result<()> {
        self.element(x.coords.clone()).map(|_| ())
    }

    /// Order of `x`: `lcm dᵢ / gcd(xᵢ, dᵢ)`.
    pub fn order_of(&self, x: &GroupElement) -> Result<BigUint> {
        self.check(x)?;
        Ok(self
            .factors
            .iter()
            .zip(&x.coords)
            .fold(BigUint::one(), |acc, (d, c)| acc.lcm(&(d / d.gcd(c)))))
    }

    /// Canonical Aut(G)-orbit label of `x` (see [`OrbitLabel`]).
    pub fn orbit_invariant(&self, x: &GroupElement) -> Result<OrbitLabel> {
        self.require_torsion("orbit_invariant")?;
        self.check(x)?;
        let mut label = Vec::new();
        for p in self.primary_decomposition().parts.keys() {
            // per coordinate: (exponent e_i, valuation of x_i capped at e_i)
            let coords: Vec<(u32, u32)> = self
                .factors
                .iter()
                .zip(&x.coords)
                .filter_map(|(d, c)| {
                    let e = big_valuation(d, p);
                    if e == 0 {
                        return None;
                    }
                    let v = if c.is_zero() {
                        e
                    } else {
                        big_valuation(c, p).min(e)
                    };
                    Some((e, v))
                })
                .collect();
            let mut seq = Vec::new();
            for k in 0.. {
                let h = coords
                    .iter()
                    .filter(|(e, v)| k + v < *e)
                    .map(|(_, v)| k + v)
                    .min();
                match h {
                    Some(h) => seq.push(Height::Finite(h)),
                    None => {
                        seq.push(Height::Infinite);
                        break;
                    }
                }
            }
            label.push((p.clone(), seq));
        }
        Ok(OrbitLabel(label))
    }

    pub fn same_orbit(&self, x: &GroupElement, y: &GroupElement) -> Result<bool> {
        Ok(self.orbit_invariant(x)? == self.orbit_invariant(y)?)
    }

    /// Whether `x` lies in the orbit of `(1, …, 1)`. Equivalent to
    /// `same_orbit(x, all_ones())` but factorization-free: the orbit of
    /// `(1,…,1)` is exactly the set of elements whose order equals the
    /// exponent of the group.
    pub fn in_orbit_of_all_ones(&self, x: &GroupElement) -> Result<bool> {
        self.require_torsion("in_orbit_of_all_ones")?;
        Ok(self.order_of(x)? == self.exponent())
    }

    /// For cyclic `G`: whether `x` generates `G`.
    pub fn is_full_order_generator(&self, x: &GroupElement) -> Result<bool> {
        self.require_torsion("is_full_order_generator")?;
        if !self.is_cyclic() {
            return Err(Error::Unsupported(
                "is_full_order_generator requires a cyclic group".into(),
            ));
        }
        self.check(x)?;
        Ok(match (self.factors.first(), x.coords.first()) {
            (Some(d), Some(c)) => d.gcd(c).is_one(),
            _ => true,
        })
    }
}

fn big_valuation(n: &BigUint, p: &BigUint) -> u32 {
    if let Some(small) = p.to_u64() {
        return arith::valuation(n, small);
    }
    let mut v = 0;
    let mut rest = n.clone();
    if rest.is_zero() {
        return 0;
    }
    loop {
        let (q, r) = rest.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        rest = q;
        v += 1;
    }
}

fn p_group_aut_order(p: &BigUint, part: &Partition) -> BigUint {
    let mut e: Vec<u32> = part.parts().to_vec();
    e.reverse(); // ascending
    let n = e.len();
    // 1-based d_k and c_k
    let d: Vec<usize> = (0..n)
        .map(|k| (0..n).filter(|&l| e[l] == e[k]).max().unwrap() + 1)
        .collect();
    let c: Vec<usize> = (0..n)
        .map(|k| (0..n).filter(|&l| e[l] == e[k]).min().unwrap() + 1)
        .collect();
    let mut out = BigUint::one();
    for k in 0..n {
        out *= p.pow(d[k] as u32) - p.pow(k as u32);
    }
    for j in 0..n {
        out *= p.pow(e[j] * (n - d[j]) as u32);
    }
    for i in 0..n {
        out *= p.pow((e[i] - 1) * (n - c[i] + 1) as u32);
    }
    out
}

fn p_group_pairing_weight(p: &BigUint, part: &Partition) -> BigRational {
    let mu = part.conjugate();
    let p_int = BigInt::from(p.clone());
    let exponent: u32 = mu.iter().map(|&m| m * (m + 1) / 2).sum();
    let mut w = BigRational::new(BigInt::one(), p_int.clone().pow(exponent));
    for i in 0..mu.len() {
        let next = mu.get(i + 1).copied().unwrap_or(0);
        for j in 1..=((mu[i] - next) / 2) {
            // (1 - p^{-2j})^{-1} = p^{2j} / (p^{2j} - 1)
            let q = p_int.clone().pow(2 * j);
            w *= BigRational::new(q.clone(), q - BigInt::one());
        }
    }
    w
}

/// Rational as `f64`, for feeding exact weights into real-valued formulas.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let (n, d) = (r.numer(), r.denom());
    let shift = (n.bits().max(d.bits()) as i64 - 60).max(0) as u32;
    let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
    if d == 0.0 {
        return if r.is_positive() { f64::INFINITY } else { 0.0 };
    }
    n / d
}
