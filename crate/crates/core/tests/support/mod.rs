//! Brute-force oracles, written without the library's algorithms.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use kgraph::abelian::FinAbGroup;
use num_bigint::BigUint;
use num_traits::ToPrimitive;

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Every divisor chain `d₁ | d₂ | … | d_k`, `dᵢ ≥ 2`, with `∏dᵢ ≤ max_order`.
pub fn groups_up_to(max_order: u64) -> Vec<Vec<u64>> {
    fn rec(chain: &mut Vec<u64>, order: u64, max: u64, out: &mut Vec<Vec<u64>>) {
        out.push(chain.clone());
        let last = chain.last().copied().unwrap_or(1);
        let mut next = if last == 1 { 2 } else { last };
        while order * next <= max {
            if next % last == 0 {
                chain.push(next);
                rec(chain, order * next, max, out);
                chain.pop();
            }
            next += 1;
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), 1, max_order, &mut out);
    out
}

pub fn lib_group(d: &[u64]) -> FinAbGroup {
    FinAbGroup::from_u64s(d)
}

/// `⊕ ℤ/dᵢ` with at most 128 elements, elements as mixed-radix indices
/// (first coordinate fastest) and subsets as `u128` bitmasks.
pub struct SmallGroup {
    pub d: Vec<u64>,
    pub size: usize,
    add: Vec<u8>,
}

impl SmallGroup {
    pub fn new(d: &[u64]) -> Self {
        let size = d.iter().product::<u64>() as usize;
        assert!(size <= 128);
        let mut g = SmallGroup {
            d: d.to_vec(),
            size,
            add: vec![0; size * size],
        };
        for a in 0..size {
            for b in 0..size {
                let ca = g.coords(a);
                let cb = g.coords(b);
                let sum: Vec<u64> = ca.iter().zip(&cb).zip(d).map(|((x, y), m)| (x + y) % m).collect();
                g.add[a * size + b] = g.index(&sum) as u8;
            }
        }
        g
    }

    pub fn coords(&self, mut i: usize) -> Vec<u64> {
        self.d
            .iter()
            .map(|&m| {
                let c = i as u64 % m;
                i /= m as usize;
                c
            })
            .collect()
    }

    pub fn index(&self, c: &[u64]) -> usize {
        let mut i = 0usize;
        for (k, &m) in self.d.iter().enumerate().rev() {
            i = i * m as usize + (c[k] % m) as usize;
        }
        i
    }

    pub fn plus(&self, a: usize, b: usize) -> usize {
        self.add[a * self.size + b] as usize
    }

    pub fn times(&self, k: u64, a: usize) -> usize {
        let mut acc = 0;
        for _ in 0..k {
            acc = self.plus(acc, a);
        }
        acc
    }

    fn full(&self) -> u128 {
        if self.size == 128 {
            u128::MAX
        } else {
            (1u128 << self.size) - 1
        }
    }

    fn translate(&self, h: u128, t: usize) -> u128 {
        let mut out = 0u128;
        let mut bits = h;
        while bits != 0 {
            let e = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            out |= 1u128 << self.plus(e, t);
        }
        out
    }

    /// Subgroup generated by the subgroup `h` and `y`.
    fn join(&self, h: u128, y: usize) -> u128 {
        let mut s = h;
        let mut t = y;
        while h & (1u128 << t) == 0 {
            s |= self.translate(h, t);
            t = self.plus(t, y);
        }
        s
    }

    /// Elements killed by `m`.
    fn torsion(&self, m: u64) -> Vec<usize> {
        (0..self.size).filter(|&x| self.times(m, x) == 0).collect()
    }

    /// Whether a subgroup of size `h_size` can still grow into the whole
    /// group with generators of orders `rest`.
    fn reachable(&self, h_size: u32, rest: &[u64]) -> bool {
        let room: u128 = rest.iter().map(|&m| m as u128).product();
        h_size as u128 * room >= self.size as u128
    }

    /// `|Aut(G)|`: tuples `(y₁,…,y_k)` with `dᵢ·yᵢ = 0` generating `G`,
    /// counted by a dynamic program over the subgroup generated so far.
    pub fn aut_count(&self) -> u128 {
        let mut states: HashMap<u128, u128> = HashMap::from([(1u128, 1u128)]);
        for (i, &m) in self.d.iter().enumerate() {
            let cands = self.torsion(m);
            let mut next: HashMap<u128, u128> = HashMap::new();
            for (&h, &c) in &states {
                for &y in &cands {
                    let h2 = self.join(h, y);
                    if self.reachable(h2.count_ones(), &self.d[i + 1..]) {
                        *next.entry(h2).or_default() += c;
                    }
                }
            }
            states = next;
        }
        states.get(&self.full()).copied().unwrap_or(0)
    }

    /// `Aut(G)`-orbit of `x`, by the same dynamic program carrying the
    /// partial image `Σ cᵢ yᵢ`.
    pub fn orbit(&self, x: usize) -> u128 {
        let c = self.coords(x);
        let mut states: HashSet<(u128, u8)> = HashSet::from([(1u128, 0u8)]);
        for (i, &m) in self.d.iter().enumerate() {
            let cands = self.torsion(m);
            let mut next = HashSet::new();
            for &(h, s) in &states {
                for &y in &cands {
                    let h2 = self.join(h, y);
                    if self.reachable(h2.count_ones(), &self.d[i + 1..]) {
                        let s2 = self.plus(s as usize, self.times(c[i], y));
                        next.insert((h2, s2 as u8));
                    }
                }
            }
            states = next;
        }
        let full = self.full();
        states
            .iter()
            .filter(|(h, _)| *h == full)
            .fold(0u128, |acc, &(_, s)| acc | (1u128 << s))
    }

    /// Orbit id of every element.
    pub fn orbit_ids(&self) -> Vec<usize> {
        let mut ids = vec![usize::MAX; self.size];
        let mut next = 0;
        for x in 0..self.size {
            if ids[x] != usize::MAX {
                continue;
            }
            let orb = if x == 0 { 1 } else { self.orbit(x) };
            for (y, id) in ids.iter_mut().enumerate() {
                if orb & (1u128 << y) != 0 {
                    *id = next;
                }
            }
            next += 1;
        }
        ids
    }

    /// Number of symmetric bilinear perfect pairings `G × G → ℚ/ℤ`. A pairing
    /// is fixed by `b(gᵢ, gⱼ) = aᵢⱼ / gcd(dᵢ, dⱼ)`.
    pub fn pairing_count(&self) -> u64 {
        let k = self.d.len();
        if k == 0 {
            return 1;
        }
        let l = *self.d.last().unwrap();
        let slots: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
        let moduli: Vec<u64> = slots.iter().map(|&(i, j)| gcd(self.d[i], self.d[j])).collect();
        let total: u64 = moduli.iter().product();
        let elems: Vec<Vec<u64>> = (1..self.size).map(|x| self.coords(x)).collect();
        let mut count = 0;
        for code in 0..total {
            let mut a = vec![vec![0u64; k]; k];
            let mut rest = code;
            for (&(i, j), &m) in slots.iter().zip(&moduli) {
                let v = (rest % m) * (l / m);
                rest /= m;
                a[i][j] = v;
                a[j][i] = v;
            }
            let perfect = elems.iter().all(|x| {
                (0..k).any(|j| (0..k).map(|i| x[i] * a[i][j]).sum::<u64>() % l != 0)
            });
            count += u64::from(perfect);
        }
        count
    }
}

/// Determinant by cofactor expansion.
pub fn det_cofactor(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0] as i128;
    }
    let mut total = 0i128;
    for j in 0..n {
        if m[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> = m[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect())
            .collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        total += sign * m[0][j] as i128 * det_cofactor(&minor);
    }
    total
}

fn adjugate(m: &[Vec<i64>]) -> Vec<Vec<i128>> {
    let n = m.len();
    let mut adj = vec![vec![0i128; n]; n];
    if n == 1 {
        adj[0][0] = 1;
        return adj;
    }
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i64>> = m
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != j)
                .map(|(_, row)| row.iter().enumerate().filter(|&(c, _)| c != i).map(|(_, &v)| v).collect())
                .collect();
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[i][j] = sign * det_cofactor(&minor);
        }
    }
    adj
}

/// `k ↦ #{g ∈ coker M : k·g = 0}` for `k = 1..=|det M|`, by enumerating
/// `ℤⁿ/Mℤⁿ`. `x ↦ adj(M)·x mod |det M|` has kernel exactly `Mℤⁿ`, so the
/// cokernel is the subgroup of `(ℤ/|det|)ⁿ` spanned by the columns of
/// `adj(M)`. Requires `det M ≠ 0`.
pub fn coset_torsion_profile(m: &[Vec<i64>]) -> Vec<u64> {
    let n = m.len();
    let det = det_cofactor(m).unsigned_abs() as u64;
    assert!(det > 0);
    let adj = adjugate(m);
    let md = det as i128;
    let gens: Vec<Vec<u64>> = (0..n)
        .map(|j| (0..n).map(|i| adj[i][j].rem_euclid(md) as u64).collect())
        .collect();
    let mut seen: HashSet<Vec<u64>> = HashSet::from([vec![0; n]]);
    let mut frontier = vec![vec![0u64; n]];
    while let Some(x) = frontier.pop() {
        for g in &gens {
            let y: Vec<u64> = x.iter().zip(g).map(|(a, b)| (a + b) % det).collect();
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    assert_eq!(seen.len() as u64, det, "coset count must equal |det|");
    (1..=det)
        .map(|k| seen.iter().filter(|x| x.iter().all(|&c| (k * c) % det == 0)).count() as u64)
        .collect()
}

/// The same profile for a library group: `∏ gcd(k, dᵢ)`.
pub fn group_torsion_profile(g: &FinAbGroup, upto: u64) -> Vec<u64> {
    let d: Vec<u64> = g.invariant_factors().iter().map(|x| x.to_u64().unwrap()).collect();
    (1..=upto).map(|k| d.iter().map(|&di| gcd(k, di)).product()).collect()
}

pub fn big(x: u64) -> BigUint {
    BigUint::from(x)
}
