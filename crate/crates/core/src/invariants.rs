//! Per-graph classification records: K-theory with the unit class, the
//! signed Bowen–Franks data, and the Cuntz polygon / Cuntz algebra / full
//! shift predicates.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed};
use serde::Serialize;
use serde_json::{json, Value};

use crate::abelian::{FinAbGroup, GroupElement, Partition};
use crate::error::Result;
use crate::exactla::{cokernel_from_diagonal, det_signed, snf_with, SnfOptions};
use crate::graphgen::AdjacencyMatrix;

/// Why a predicate failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    NotStronglyConnected,
    PermutationMatrix,
    InfiniteK0,
    NotCyclic,
    UnitOutsideOrbit,
    UnitNotGenerator,
    DetNotNegative,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Reason::NotStronglyConnected => "not strongly connected",
            Reason::PermutationMatrix => "permutation matrix",
            Reason::InfiniteK0 => "K1 nonzero",
            Reason::NotCyclic => "K0 not cyclic",
            Reason::UnitOutsideOrbit => "unit class outside the orbit of (1,...,1)",
            Reason::UnitNotGenerator => "unit class does not generate K0",
            Reason::DetNotNegative => "det(I-A) not negative",
        };
        f.write_str(s)
    }
}

/// Outcome of a predicate, with the first failing condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub reason: Option<Reason>,
}

impl Verdict {
    const YES: Verdict = Verdict {
        holds: true,
        reason: None,
    };

    fn no(r: Reason) -> Verdict {
        Verdict {
            holds: false,
            reason: Some(r),
        }
    }
}

/// Classification data of one graph `E` with adjacency matrix `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KInvariant {
    pub n: usize,
    pub strongly_connected: bool,
    pub has_sink: bool,
    pub is_permutation: bool,
    /// Smith form diagonal of `Aᵗ − I`.
    pub snf_diagonal: Vec<BigInt>,
    /// `coker(Aᵗ − I)`, free part included.
    pub k0: FinAbGroup,
    /// `dim ker(Aᵗ − I)`.
    pub k1_rank: usize,
    /// `[U·(1,…,1)]` in the torsion coordinates of `k0`; absent when K₀ has
    /// a free part.
    pub unit_class: Option<GroupElement>,
    pub det_i_minus_a: BigInt,
}

/// Sylow data for one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SylowProfile {
    pub p: u64,
    pub partition: Partition,
    pub trivial: bool,
    pub cyclic: bool,
    /// `N` when the Sylow subgroup is `ℤ/p^N` with `1 ≤ N ≤ max_exp`.
    pub cyclic_of_exponent: Option<u32>,
    /// `N` when the Sylow subgroup is `(ℤ/p)^N` with `1 ≤ N ≤ max_exp`.
    pub elementary_of_rank: Option<u32>,
}

/// Computes K-theory, the unit class and the determinant of `I − A`.
pub fn compute_invariant(a: &AdjacencyMatrix) -> KInvariant {
    let n = a.n();
    let m = a.transpose_minus_identity();
    let r = snf_with(&m, SnfOptions::NONE, vec![vec![BigInt::one(); n]]);
    let k0 = cokernel_from_diagonal(&r.d, n);
    let k1_rank = k0.free_rank();
    let unit_class = if k1_rank == 0 {
        let coords: Vec<BigInt> = r
            .d
            .iter()
            .zip(&r.tracked[0])
            .filter(|(d, _)| d > &&BigInt::one())
            .map(|(_, u)| u.clone())
            .collect();
        Some(k0.reduce(&coords).expect("one coordinate per invariant factor"))
    } else {
        None
    };
    let det_i_minus_a = det_signed(&a.identity_minus()).expect("square");
    KInvariant {
        n,
        strongly_connected: a.is_strongly_connected(),
        has_sink: a.has_sink(),
        is_permutation: a.is_permutation_matrix(),
        snf_diagonal: r.d,
        k0,
        k1_rank,
        unit_class,
        det_i_minus_a,
    }
}

impl KInvariant {
    /// Sign of `det(I − A)` as −1, 0 or +1.
    pub fn det_sign(&self) -> i8 {
        match self.det_i_minus_a.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// K₀ may differ from `coker(Aᵗ − I)` when the graph has sinks.
    pub fn sinks_caveat(&self) -> bool {
        self.has_sink
    }

    pub fn k0_cyclic(&self) -> bool {
        self.k0.is_cyclic()
    }

    /// Internal consistency between the Smith form and the determinant.
    pub fn self_check(&self) -> std::result::Result<(), String> {
        let zeros = self.snf_diagonal.iter().filter(|d| d.sign() == Sign::NoSign).count();
        if zeros != self.k1_rank || self.k0.free_rank() != self.k1_rank {
            return Err(format!(
                "kernel rank {} disagrees with free rank {}",
                self.k1_rank,
                self.k0.free_rank()
            ));
        }
        if (self.det_sign() == 0) != (self.k1_rank > 0) {
            return Err(format!(
                "det(I-A) = {} but K1 rank is {}",
                self.det_i_minus_a, self.k1_rank
            ));
        }
        if self.k1_rank == 0 {
            let prod: BigInt = self.snf_diagonal.iter().product();
            if prod.magnitude() != self.det_i_minus_a.magnitude() {
                return Err(format!(
                    "|det(I-A)| = {} but the Smith diagonal multiplies to {prod}",
                    self.det_i_minus_a.abs()
                ));
            }
        }
        Ok(())
    }

    /// Strongly connected, not a permutation matrix, and `K₁ = 0`.
    pub fn stably_cuntz_polygon(&self) -> Verdict {
        if !self.strongly_connected {
            return Verdict::no(Reason::NotStronglyConnected);
        }
        if self.is_permutation {
            return Verdict::no(Reason::PermutationMatrix);
        }
        if self.k1_rank > 0 {
            return Verdict::no(Reason::InfiniteK0);
        }
        Verdict::YES
    }

    /// Stably a Cuntz polygon with cyclic K₀.
    pub fn stably_cuntz_algebra(&self) -> Verdict {
        let v = self.stably_cuntz_polygon();
        if !v.holds {
            return v;
        }
        if !self.k0_cyclic() {
            return Verdict::no(Reason::NotCyclic);
        }
        Verdict::YES
    }

    /// Stably a Cuntz polygon with the unit class in the Aut-orbit of
    /// `(1, …, 1)`.
    pub fn exactly_cuntz_polygon(&self) -> Verdict {
        let v = self.stably_cuntz_polygon();
        if !v.holds {
            return v;
        }
        let unit = self.unit_class.as_ref().expect("K1 = 0 implies a unit class");
        let in_orbit = self
            .k0
            .in_orbit_of_all_ones(unit)
            .expect("unit class lies in the torsion group");
        if !in_orbit {
            return Verdict::no(Reason::UnitOutsideOrbit);
        }
        Verdict::YES
    }

    /// Stably a Cuntz algebra with the unit class generating K₀.
    pub fn exactly_cuntz_algebra(&self) -> Verdict {
        let v = self.stably_cuntz_algebra();
        if !v.holds {
            return v;
        }
        let unit = self.unit_class.as_ref().expect("K1 = 0 implies a unit class");
        let generates = self
            .k0
            .is_full_order_generator(unit)
            .expect("cyclic torsion group");
        if !generates {
            return Verdict::no(Reason::UnitNotGenerator);
        }
        Verdict::YES
    }

    /// Flow equivalence to a full shift: `det(I − A) < 0`, cyclic
    /// `coker(I − A)` and `K₁ = 0`, for strongly connected graphs that are
    /// not a single cycle.
    pub fn flow_equiv_full_shift(&self) -> Verdict {
        if !self.strongly_connected {
            return Verdict::no(Reason::NotStronglyConnected);
        }
        if self.is_permutation {
            return Verdict::no(Reason::PermutationMatrix);
        }
        if self.k1_rank > 0 {
            return Verdict::no(Reason::InfiniteK0);
        }
        if self.det_sign() >= 0 {
            return Verdict::no(Reason::DetNotNegative);
        }
        if !self.k0_cyclic() {
            return Verdict::no(Reason::NotCyclic);
        }
        Verdict::YES
    }

    /// Sylow classification of the torsion of K₀ at each prime.
    pub fn sylow_profile(&self, primes: &[u64], max_exp: u32) -> Result<Vec<SylowProfile>> {
        primes
            .iter()
            .map(|&p| {
                let partition = self.k0.sylow(p)?;
                let within = |x: Option<u32>| x.filter(|&k| k <= max_exp);
                Ok(SylowProfile {
                    p,
                    trivial: partition.is_trivial(),
                    cyclic: partition.is_cyclic(),
                    cyclic_of_exponent: within(partition.cyclic_exponent()),
                    elementary_of_rank: within(partition.elementary_rank()),
                    partition,
                })
            })
            .collect()
    }

    /// The `𝒪_k` this graph algebra is isomorphic to, when it is one.
    pub fn cuntz_index(&self) -> Option<BigInt> {
        if self.exactly_cuntz_algebra().holds {
            Some(BigInt::from(self.k0.exponent()) + 1)
        } else {
            None
        }
    }

    pub fn to_json(&self) -> Value {
        let verdict = |v: Verdict| json!({ "holds": v.holds, "reason": v.reason });
        json!({
            "n": self.n,
            "strongly_connected": self.strongly_connected,
            "has_sink": self.has_sink,
            "sinks_caveat": self.sinks_caveat(),
            "is_permutation": self.is_permutation,
            "snf_diagonal": self.snf_diagonal.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "k0": self.k0,
            "k1_rank": self.k1_rank,
            "unit_class": self.unit_class,
            "det_i_minus_a": self.det_i_minus_a.to_string(),
            "det_sign": self.det_sign(),
            "stably_cuntz_polygon": verdict(self.stably_cuntz_polygon()),
            "stably_cuntz_algebra": verdict(self.stably_cuntz_algebra()),
            "exactly_cuntz_polygon": verdict(self.exactly_cuntz_polygon()),
            "exactly_cuntz_algebra": verdict(self.exactly_cuntz_algebra()),
            "flow_equiv_full_shift": verdict(self.flow_equiv_full_shift()),
        })
    }
}
