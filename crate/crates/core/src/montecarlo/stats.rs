use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::TallySheet;
use crate::abelian::{FinAbGroup, Partition};
use crate::error::{invalid, Result};
use crate::graphgen::ModelSpec;
use crate::theory::{self, Status, TheoryValue};

/// `z_{0.005}`, for two-sided 99% intervals.
pub const Z99: f64 = 2.576;

/// Normal-approximation binomial interval at 99%, clamped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ci {
    pub count: u64,
    pub p_hat: f64,
    pub half_width: f64,
    pub lo: f64,
    pub hi: f64,
}

pub fn ci(count: u64, m: u64) -> Result<Ci> {
    if m == 0 {
        return invalid("confidence interval of an empty sample");
    }
    if count > m {
        return invalid(format!("count {count} exceeds sample size {m}"));
    }
    let p = count as f64 / m as f64;
    let half_width = Z99 * (p * (1.0 - p) / m as f64).sqrt();
    Ok(Ci {
        count,
        p_hat: p,
        half_width,
        lo: (p - half_width).max(0.0),
        hi: (p + half_width).min(1.0),
    })
}

/// Intervals for every named count of a tally.
pub type CiReport = BTreeMap<String, Ci>;

pub fn ci_report(t: &TallySheet) -> Result<CiReport> {
    t.named_counts()
        .into_iter()
        .map(|(k, c)| Ok((k, ci(c, t.m)?)))
        .collect()
}

/// Whether an estimate is consistent with a target: inside the 99%
/// interval widened by a 3.3σ binomial band around the target.
pub fn consistent(ci: &Ci, m: u64, target: f64) -> bool {
    let band = 3.3 * (target * (1.0 - target) / m as f64).sqrt();
    (ci.p_hat - target).abs() <= ci.half_width + band
}

/// One row of the comparison report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub stat: String,
    /// Symbol used for estimators of open limits, e.g. `delta`.
    pub symbol: Option<String>,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub theory: Option<f64>,
    pub status: Status,
    pub z_score: Option<f64>,
    pub pass: Option<bool>,
}

/// Limit values this model's statistics are compared with.
pub fn theory_map(model: &ModelSpec, primes: &[u64], max_exp: u32) -> BTreeMap<String, TheoryValue> {
    let mut m = BTreeMap::new();
    let mut put = |k: String, v: f64, s: Status| {
        m.insert(k, TheoryValue { value: v, status: s });
    };
    let iid = |p: u64, g: &FinAbGroup| theory::p_sylow_iid(g, &[p]).ok();
    let sym = |p: u64, g: &FinAbGroup| theory::p_sylow_symmetric(g, &[p]).ok();
    let cyc = |p: u64, n: u32| FinAbGroup::from_u64s(&[p.pow(n)]);
    let elem = |p: u64, n: u32| FinAbGroup::from_u64s(&vec![p; n as usize]);
    let conj = theory::conjecture_constants();
    match model {
        ModelSpec::Bernoulli { .. } | ModelSpec::ShiftedBernoulli { .. } => {
            let shifted = matches!(model, ModelSpec::ShiftedBernoulli { .. });
            put("connected".into(), 1.0, Status::Theorem);
            put("k1_nonzero".into(), 0.0, Status::Theorem);
            put("k0_cyclic".into(), theory::p_cuntz_iid(), Status::Theorem);
            let sign_status = if shifted { Status::Theorem } else { Status::Conjecture };
            put("det_negative".into(), 0.5, sign_status);
            put("full_shift".into(), conj["dfullshift"].value, sign_status);
            if !shifted {
                put("exact_polygon".into(), conj["dexact"].value, Status::Conjecture);
                put("exact_cuntz".into(), conj["dcuntz"].value, Status::Conjecture);
            }
            for &p in primes {
                if let Ok(v) = theory::p_cyclic_iid(p) {
                    put(format!("p{p}_cyclic"), v, Status::Theorem);
                }
                put(format!("p{p}_trivial"), theory::iid_trivial_factor(p), Status::Theorem);
                for n in 1..=max_exp {
                    if let Some(v) = iid(p, &cyc(p, n)) {
                        put(format!("p{p}_cyclic_exp{n}"), v, Status::Theorem);
                    }
                    if let Some(v) = iid(p, &elem(p, n)) {
                        put(format!("p{p}_elementary_rank{n}"), v, Status::Theorem);
                    }
                }
            }
        }
        ModelSpec::ErdosLoops { .. } => {
            put("connected".into(), 1.0, Status::Theorem);
            put("k1_nonzero".into(), 0.0, Status::Theorem);
            put("k0_cyclic".into(), theory::p_cyclic_symmetric_all(), Status::Conjecture);
            put("exact_polygon".into(), conj["eexact"].value, Status::Conjecture);
            put("exact_cuntz".into(), conj["ecuntz"].value, Status::Conjecture);
            for &p in primes {
                if let Ok(v) = theory::p_cyclic_symmetric(p) {
                    put(format!("p{p}_cyclic"), v, Status::Theorem);
                }
                put(format!("p{p}_trivial"), theory::symmetric_trivial_factor(p), Status::Theorem);
                for n in 1..=max_exp {
                    if let Some(v) = sym(p, &cyc(p, n)) {
                        put(format!("p{p}_cyclic_exp{n}"), v, Status::Theorem);
                    }
                    if let Some(v) = sym(p, &elem(p, n)) {
                        put(format!("p{p}_elementary_rank{n}"), v, Status::Theorem);
                    }
                }
            }
        }
        ModelSpec::RegularMatchings { r, .. } if *r >= 3 => {
            let r = u64::from(*r);
            put("connected".into(), 1.0, Status::Theorem);
            put("k1_nonzero".into(), 0.0, Status::Theorem);
            if let Ok(g) = theory::gamma_r(r) {
                put("k0_cyclic".into(), g, Status::Conjecture);
            }
            for &p in primes {
                let Ok(pi) = theory::pi_pr(p, r) else { continue };
                put(format!("p{p}_cyclic"), pi.value, pi.status);
                if pi.status == Status::Theorem {
                    put(format!("p{p}_trivial"), theory::symmetric_trivial_factor(p), Status::Theorem);
                    for n in 1..=max_exp {
                        if let Some(v) = sym(p, &cyc(p, n)) {
                            put(format!("p{p}_cyclic_exp{n}"), v, Status::Theorem);
                        }
                        if let Some(v) = sym(p, &elem(p, n)) {
                            put(format!("p{p}_elementary_rank{n}"), v, Status::Theorem);
                        }
                    }
                }
            }
        }
        _ => {}
    }
    m
}

/// Estimators for limits the theory leaves open, keyed by statistic.
fn open_symbols(model: &ModelSpec) -> BTreeMap<&'static str, &'static str> {
    match model {
        ModelSpec::ErdosLoops { .. } => {
            BTreeMap::from([("det_negative", "delta"), ("det_negative_and_cyclic", "sigma")])
        }
        ModelSpec::RegularMatchings { .. } => BTreeMap::from([
            ("det_negative", "epsilon"),
            ("det_negative_and_cyclic", "tau"),
            ("exact_polygon", "q2"),
        ]),
        _ => BTreeMap::new(),
    }
}

/// Annotates every statistic with its limit, if one is known.
pub fn compare(tally: &TallySheet, cis: &CiReport, model: &ModelSpec, max_exp: u32) -> Vec<Comparison> {
    let primes: Vec<u64> = tally.primes.keys().copied().collect();
    let theory = theory_map(model, &primes, max_exp);
    let open = open_symbols(model);
    let mut out = Vec::new();
    for (stat, c) in cis {
        let (theory_value, status) = match theory.get(stat) {
            Some(t) => (Some(t.value), t.status),
            None if open.contains_key(stat.as_str()) => (None, Status::Open),
            None => continue,
        };
        let (z_score, pass) = match theory_value {
            Some(t) => {
                let se = (t * (1.0 - t) / tally.m as f64).sqrt();
                let z = if se > 0.0 { Some((c.p_hat - t) / se) } else { None };
                (z, Some(consistent(c, tally.m, t)))
            }
            None => (None, None),
        };
        out.push(Comparison {
            stat: stat.clone(),
            symbol: open.get(stat.as_str()).map(|s| s.to_string()),
            estimate: c.p_hat,
            ci_lo: c.lo,
            ci_hi: c.hi,
            theory: theory_value,
            status,
            z_score,
            pass,
        });
    }
    out
}

/// Limit probability of a Sylow p-subgroup with the given partition under
/// the model's distribution, when the theory provides one.
pub fn sylow_theory(model: &ModelSpec, p: u64, partition: &Partition) -> Option<TheoryValue> {
    let mut factors = Vec::new();
    for &e in partition.parts().iter().rev() {
        factors.push(p.checked_pow(e)?);
    }
    let g = FinAbGroup::from_u64s(&factors);
    match model {
        ModelSpec::Bernoulli { .. } | ModelSpec::ShiftedBernoulli { .. } => theory::p_sylow_iid(&g, &[p])
            .ok()
            .map(|v| TheoryValue { value: v, status: Status::Theorem }),
        ModelSpec::ErdosLoops { .. } => theory::p_sylow_symmetric(&g, &[p])
            .ok()
            .map(|v| TheoryValue { value: v, status: Status::Theorem }),
        ModelSpec::RegularMatchings { r, .. } => {
            let r = u64::from(*r);
            if r >= 3 && p != 2 && (r - 1) % p != 0 {
                theory::p_sylow_symmetric(&g, &[p])
                    .ok()
                    .map(|v| TheoryValue { value: v, status: Status::Theorem })
            } else {
                None
            }
        }
        _ => None,
    }
}
