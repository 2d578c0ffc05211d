//! Closed-form limiting probabilities for cokernels of random integer
//! matrices, evaluated in double precision with certified truncation.
//!
//! Products over all primes are rewritten through Euler products as
//! products of zeta values, e.g. `∏_p ∏_{k≥2}(1 − p^{−k}) = ∏_{k≥2} ζ(k)^{−1}`,
//! which converge geometrically. Prime-by-prime evaluation up to
//! `prime_bound` is kept as an independent cross-check.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::abelian::{rational_to_f64, FinAbGroup};
use crate::arith;
use crate::error::{invalid, Error, Result};

/// Whether a limit is proved or conjectured (or not known at all).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Theorem,
    Conjecture,
    Open,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Theorem => "theorem",
            Status::Conjecture => "conjecture",
            Status::Open => "open",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryValue {
    pub value: f64,
    pub status: Status,
}

impl TheoryValue {
    fn theorem(value: f64) -> Self {
        TheoryValue {
            value,
            status: Status::Theorem,
        }
    }

    fn conjecture(value: f64) -> Self {
        TheoryValue {
            value,
            status: Status::Conjecture,
        }
    }
}

/// Truncation limits for infinite products.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationPolicy {
    pub abs_tol: f64,
    pub prime_bound: u64,
    pub factor_bound: u32,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            abs_tol: 1e-12,
            prime_bound: 10_000,
            factor_bound: 200,
        }
    }
}

/// A truncated product and a rigorous bound on its distance to the limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certified {
    pub value: f64,
    pub tail_bound: f64,
}

const BERNOULLI_2J: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// `ζ(s) − 1` for integer `s ≥ 2`, by Euler–Maclaurin summation from 2.
pub fn zeta_minus_one(s: u32) -> f64 {
    assert!(s >= 2, "zeta needs s >= 2");
    const N: u32 = 12;
    let s_f = f64::from(s);
    let n_f = f64::from(N);
    let mut sum = 0.0;
    for k in (2..N).rev() {
        sum += f64::from(k).powf(-s_f);
    }
    let mut tail = n_f.powf(1.0 - s_f) / (s_f - 1.0) + 0.5 * n_f.powf(-s_f);
    // B_{2j}/(2j)! · s(s+1)…(s+2j−2) · N^{−s−2j+1}
    let mut rising = s_f;
    let mut factorial = 2.0;
    let mut power = n_f.powf(-s_f - 1.0);
    for (j, b) in BERNOULLI_2J.iter().enumerate() {
        let j = j as f64 + 1.0;
        tail += b / factorial * rising * power;
        rising *= (s_f + 2.0 * j - 1.0) * (s_f + 2.0 * j);
        factorial *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
        power /= n_f * n_f;
    }
    sum + tail
}

pub fn zeta(s: u32) -> f64 {
    1.0 + zeta_minus_one(s)
}

// ∏_{k ≥ k0} ζ(a·k + b)^{−1}, using ζ(s) − 1 ≤ 3·2^{−s}.
fn inverse_zeta_product(a: u32, b: i32, k0: u32, policy: &TruncationPolicy) -> Certified {
    let mut log = 0.0f64;
    let mut k = k0;
    loop {
        let s = (a * k) as i32 + b;
        assert!(s >= 2);
        let s = s as u32;
        // tail of Σ_{j ≥ k} ln ζ(a j + b) ≤ Σ 3·2^{−(a j + b)}
        let tail = 3.0 * 2f64.powi(-(s as i32)) / (1.0 - 2f64.powi(-(a as i32)));
        if tail < policy.abs_tol * 1e-3 || k - k0 >= policy.factor_bound {
            assert!(tail <= policy.abs_tol, "zeta product tail {tail} above tolerance");
            return Certified {
                value: (-log).exp(),
                tail_bound: tail,
            };
        }
        log += zeta_minus_one(s).ln_1p();
        k += 1;
    }
}

// ∏_{k ≥ k0} (1 − p^{−(a·k + b)}) for a single prime, in log space.
// Tail: log(1 − x) ≥ −2x for x ≤ 1/2, summed as a geometric series.
fn prime_power_product(p: u64, a: i32, b: i32, k0: i32, policy: &TruncationPolicy) -> Certified {
    let pf = p as f64;
    let ratio = pf.powi(-a);
    let mut log = 0.0f64;
    let mut k = k0;
    loop {
        let x = pf.powi(-(a * k + b));
        let tail = 2.0 * x / (1.0 - ratio);
        if tail < policy.abs_tol * 1e-3 || (k - k0) as u32 >= policy.factor_bound {
            assert!(tail <= policy.abs_tol, "prime product tail {tail} above tolerance");
            return Certified {
                value: log.exp(),
                tail_bound: tail,
            };
        }
        log += (-x).ln_1p();
        k += 1;
    }
}

fn check_prime(p: u64) -> Result<()> {
    if !arith::is_prime_u64(p) {
        return invalid(format!("{p} is not prime"));
    }
    Ok(())
}

/// `∏_{k≥1}(1 − p^{−k})`.
pub fn iid_trivial_factor(p: u64) -> f64 {
    prime_power_product(p, 1, 0, 1, &TruncationPolicy::default()).value
}

/// `∏_{k≥1}(1 − p^{−2k+1})`.
pub fn symmetric_trivial_factor(p: u64) -> f64 {
    prime_power_product(p, 2, -1, 1, &TruncationPolicy::default()).value
}

fn support_within(g: &FinAbGroup, primes: &[u64]) -> Result<()> {
    if g.free_rank() > 0 {
        return Err(Error::Unsupported("group has a free part".into()));
    }
    for &p in primes {
        check_prime(p)?;
    }
    for q in g.primary_decomposition().parts.keys() {
        let inside = q.to_u64().is_some_and(|q| primes.contains(&q));
        if !inside {
            return invalid(format!("group has {q}-torsion outside the prime set"));
        }
    }
    Ok(())
}

/// Limiting probability that the `P`-part of a cokernel of an iid random
/// matrix is `G`: `|Aut G|^{−1} ∏_{p∈P} ∏_{k≥1}(1 − p^{−k})`.
pub fn p_sylow_iid(g: &FinAbGroup, primes: &[u64]) -> Result<f64> {
    support_within(g, primes)?;
    let aut = g.aut_order()?.to_f64().unwrap_or(f64::INFINITY);
    let prod: f64 = primes.iter().map(|&p| iid_trivial_factor(p)).product();
    Ok(prod / aut)
}

/// Limiting probability that the `P`-part of a cokernel of a symmetric
/// random matrix is `G`: `∏_{p∈P} N(G_p) ∏_{k≥1}(1 − p^{−2k+1})`.
pub fn p_sylow_symmetric(g: &FinAbGroup, primes: &[u64]) -> Result<f64> {
    support_within(g, primes)?;
    let n = rational_to_f64(&g.pairing_count_normalized()?);
    let prod: f64 = primes.iter().map(|&p| symmetric_trivial_factor(p)).product();
    Ok(n * prod)
}

/// Probability that the Sylow p-subgroup is cyclic, iid model:
/// `(1 + 1/(p² − p)) ∏_{k≥2}(1 − p^{−k})`.
pub fn p_cyclic_iid(p: u64) -> Result<f64> {
    check_prime(p)?;
    let pf = p as f64;
    let tail = prime_power_product(p, 1, 0, 2, &TruncationPolicy::default()).value;
    Ok((1.0 + 1.0 / (pf * pf - pf)) * tail)
}

/// Probability that the Sylow p-subgroup is cyclic, symmetric model:
/// `∏_{k≥2}(1 − p^{−2k+1})`.
pub fn p_cyclic_symmetric(p: u64) -> Result<f64> {
    check_prime(p)?;
    Ok(prime_power_product(p, 2, -1, 2, &TruncationPolicy::default()).value)
}

struct Memo {
    inv_zeta_from_2: Certified,
    inv_zeta_odd_from_3: Certified,
}

fn memo() -> &'static Memo {
    static MEMO: OnceLock<Memo> = OnceLock::new();
    MEMO.get_or_init(|| {
        let policy = TruncationPolicy::default();
        Memo {
            inv_zeta_from_2: inverse_zeta_product(1, 0, 2, &policy),
            inv_zeta_odd_from_3: inverse_zeta_product(2, -1, 2, &policy),
        }
    })
}

/// `∏_p ∏_{k≥2}(1 − p^{−k}) = ∏_{k≥2} ζ(k)^{−1}`.
pub fn inverse_zeta_product_all() -> f64 {
    memo().inv_zeta_from_2.value
}

/// All Sylow subgroups cyclic, symmetric model:
/// `∏_p ∏_{k≥2}(1 − p^{−2k+1}) = ∏_{k≥2} ζ(2k − 1)^{−1}`.
pub fn p_cyclic_symmetric_all() -> f64 {
    memo().inv_zeta_odd_from_3.value
}

/// `∏_p (1 + 1/(p² − p)) = ζ(2) ζ(3) / ζ(6)`.
pub fn totient_constant() -> f64 {
    zeta(2) * zeta(3) / zeta(6)
}

/// Cyclic cokernel, iid model: `∏_p (1 + 1/(p² − p)) ∏_{k≥2} ζ(k)^{−1}`.
pub fn p_cuntz_iid() -> f64 {
    totient_constant() * inverse_zeta_product_all()
}

/// `p_cuntz_iid` evaluated prime by prime up to `policy.prime_bound`.
/// The per-prime factor is `(1 + p^{−3}) ∏_{k≥3}(1 − p^{−k})`, whose log is
/// at most `2p^{−4}` in size, so the dropped tail is below
/// `2 Σ_{m>B} m^{−4} ≤ 2/(3B³)`.
pub fn p_cuntz_iid_by_primes(policy: &TruncationPolicy) -> Certified {
    let mut log = 0.0f64;
    for p in arith::primes_up_to(policy.prime_bound) {
        let pf = p as f64;
        log += (1.0 / (pf * pf - pf)).ln_1p();
        log += prime_power_product(p, 1, 0, 2, policy).value.ln();
    }
    let b = policy.prime_bound as f64;
    let tail_log = 2.0 / (3.0 * b * b * b);
    let value = log.exp();
    Certified {
        value,
        tail_bound: value * tail_log.exp_m1(),
    }
}

/// `∏_{p ≤ B}(1 − p^{−2})`.
pub fn inverse_zeta2_by_primes(bound: u64) -> f64 {
    arith::primes_up_to(bound)
        .into_iter()
        .map(|p| (-(p as f64).powi(-2)).ln_1p())
        .sum::<f64>()
        .exp()
}

fn odd_prime_divisors_and_two(r: u64) -> Vec<u64> {
    let mut m = 2 * (r - 1);
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            out.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Conjectured probability that the Sylow p-subgroup of the cokernel of a
/// random `r`-regular matching graph is cyclic: `∏_{k≥1}(1 − p^{−2k+1})`
/// when `p = 2` or `p | r − 1`, else `∏_{k≥2}(1 − p^{−2k+1})`.
pub fn pi_pr(p: u64, r: u64) -> Result<TheoryValue> {
    check_prime(p)?;
    if r < 3 {
        return invalid(format!("regularity r must be at least 3, got {r}"));
    }
    if p == 2 || (r - 1).is_multiple_of(p) {
        Ok(TheoryValue::conjecture(symmetric_trivial_factor(p)))
    } else {
        Ok(TheoryValue::theorem(p_cyclic_symmetric(p)?))
    }
}

/// Conjectured probability that the cokernel of a random `r`-regular
/// matching graph is cyclic:
/// `∏_{p | 2(r−1)}(1 − p^{−1}) ∏_p ∏_{k≥2}(1 − p^{−2k+1})`.
pub fn gamma_r(r: u64) -> Result<f64> {
    if r < 3 {
        return invalid(format!("regularity r must be at least 3, got {r}"));
    }
    let local: f64 = odd_prime_divisors_and_two(r)
        .into_iter()
        .map(|p| 1.0 - 1.0 / p as f64)
        .product();
    Ok(local * p_cyclic_symmetric_all())
}

/// The named conjectural constants.
pub fn conjecture_constants() -> BTreeMap<&'static str, TheoryValue> {
    let eexact = 1.0 / zeta(2);
    let mut m = BTreeMap::new();
    m.insert("dcuntz", TheoryValue::conjecture(inverse_zeta_product_all()));
    m.insert("dexact", TheoryValue::conjecture(1.0 / totient_constant()));
    m.insert("ecuntz", TheoryValue::conjecture(eexact * p_cyclic_symmetric_all()));
    m.insert("eexact", TheoryValue::conjecture(eexact));
    m.insert("pi2", TheoryValue::conjecture(symmetric_trivial_factor(2)));
    m.insert(
        "gamma_2j1",
        TheoryValue::conjecture(0.5 * p_cyclic_symmetric_all()),
    );
    m.insert("dfullshift", TheoryValue::conjecture(0.5 * p_cuntz_iid()));
    m
}

/// Parameters for [`named_constant`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantArgs {
    pub p: Option<u64>,
    pub r: Option<u64>,
}

/// Names accepted by [`named_constant`].
pub const CONSTANT_NAMES: [&str; 14] = [
    "p_cuntz_iid",
    "full_shift_iid",
    "dcuntz",
    "dexact",
    "ecuntz",
    "eexact",
    "p_cyclic_symmetric_all",
    "pi2",
    "gamma_2j1",
    "gamma_r",
    "pi_pr",
    "p_cyclic_symmetric",
    "p_cyclic_iid",
    "inverse_zeta2",
];

/// Looks up a constant by name; `gamma_r` needs `r`, `pi_pr` needs `p` and
/// `r`, the per-prime cyclicity constants need `p`.
pub fn named_constant(name: &str, args: ConstantArgs) -> Result<TheoryValue> {
    let need = |x: Option<u64>, what: &str| {
        x.ok_or_else(|| Error::InvalidInput(format!("{name} needs --{what}")))
    };
    let conj = conjecture_constants();
    Ok(match name {
        "p_cuntz_iid" => TheoryValue::theorem(p_cuntz_iid()),
        "full_shift_iid" => conj["dfullshift"],
        "dcuntz" | "dexact" | "ecuntz" | "eexact" | "pi2" | "gamma_2j1" => conj[name],
        "p_cyclic_symmetric_all" => TheoryValue::conjecture(p_cyclic_symmetric_all()),
        "gamma_r" => TheoryValue::conjecture(gamma_r(need(args.r, "r")?)?),
        "pi_pr" => pi_pr(need(args.p, "p")?, need(args.r, "r")?)?,
        "p_cyclic_symmetric" => TheoryValue::theorem(p_cyclic_symmetric(need(args.p, "p")?)?),
        "p_cyclic_iid" => TheoryValue::theorem(p_cyclic_iid(need(args.p, "p")?)?),
        "inverse_zeta2" => TheoryValue::theorem(1.0 / zeta(2)),
        _ => return invalid(format!("unknown constant {name:?}")),
    })
}
