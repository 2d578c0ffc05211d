use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::invariants::{KInvariant, SylowProfile};

/// Everything the harness keeps about one sample.
#[derive(Debug, Clone)]
pub struct SampleRecord {
    pub index: u64,
    pub invariant: KInvariant,
    pub k0_cyclic: bool,
    pub stably_polygon: bool,
    pub stably_cuntz: bool,
    pub exact_polygon: bool,
    pub exact_cuntz: bool,
    pub full_shift: bool,
    pub sylow: Vec<SylowProfile>,
}

impl SampleRecord {
    pub fn new(index: u64, invariant: KInvariant, sylow: Vec<SylowProfile>) -> Self {
        SampleRecord {
            index,
            k0_cyclic: invariant.k0_cyclic(),
            stably_polygon: invariant.stably_cuntz_polygon().holds,
            stably_cuntz: invariant.stably_cuntz_algebra().holds,
            exact_polygon: invariant.exactly_cuntz_polygon().holds,
            exact_cuntz: invariant.exactly_cuntz_algebra().holds,
            full_shift: invariant.flow_equiv_full_shift().holds,
            invariant,
            sylow,
        }
    }

    /// Column names of [`SampleRecord::csv_row`].
    pub fn csv_header(primes: &[u64]) -> Vec<String> {
        let mut h: Vec<String> = [
            "sample_index",
            "connected",
            "sinks",
            "k1_rank",
            "k0_invariant_factors",
            "unit_class",
            "det_sign",
            "k0_cyclic",
            "stably_polygon",
            "stably_cuntz",
            "exact_polygon",
            "exact_cuntz",
            "full_shift",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        h.extend(primes.iter().map(|p| format!("sylow_{p}")));
        h
    }

    /// One raw CSV row. Lists are semicolon-joined; a Sylow partition is
    /// written as its parts, e.g. `2;1`, and is empty when trivial.
    pub fn csv_row(&self) -> Vec<String> {
        let inv = &self.invariant;
        let b = |x: bool| u8::from(x).to_string();
        let join = |it: Vec<String>| it.join(";");
        let mut row = vec![
            self.index.to_string(),
            b(inv.strongly_connected),
            b(inv.has_sink),
            inv.k1_rank.to_string(),
            join(inv.k0.invariant_factors().iter().map(|d| d.to_string()).collect()),
            inv.unit_class
                .as_ref()
                .map(|u| join(u.coords().iter().map(|c| c.to_string()).collect()))
                .unwrap_or_default(),
            inv.det_sign().to_string(),
            b(self.k0_cyclic),
            b(self.stably_polygon),
            b(self.stably_cuntz),
            b(self.exact_polygon),
            b(self.exact_cuntz),
            b(self.full_shift),
        ];
        row.extend(
            self.sylow
                .iter()
                .map(|s| join(s.partition.parts().iter().map(|x| x.to_string()).collect())),
        );
        row
    }
}

/// Per-prime Sylow counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeTally {
    pub cyclic: u64,
    pub trivial: u64,
    /// `N` → number of samples with Sylow subgroup `ℤ/p^N`.
    pub cyclic_of_exponent: BTreeMap<u32, u64>,
    /// `N` → number of samples with Sylow subgroup `(ℤ/p)^N`.
    pub elementary_of_rank: BTreeMap<u32, u64>,
    /// Partition label such as `(2,1)` (or `()` when trivial) → count.
    pub histogram: BTreeMap<String, u64>,
}

/// Counts over a run of `m` samples.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TallySheet {
    pub m: u64,
    pub connected: u64,
    pub sinks_present: u64,
    pub k1_nonzero: u64,
    pub k0_cyclic: u64,
    pub det_negative: u64,
    pub det_negative_and_cyclic: u64,
    pub full_shift: u64,
    pub stably_polygon: u64,
    pub stably_cuntz: u64,
    pub exact_polygon: u64,
    pub exact_cuntz: u64,
    pub primes: BTreeMap<u64, PrimeTally>,
}

impl TallySheet {
    pub fn new(primes: &[u64]) -> Self {
        TallySheet {
            primes: primes.iter().map(|&p| (p, PrimeTally::default())).collect(),
            ..Default::default()
        }
    }

    pub fn add(&mut self, r: &SampleRecord) {
        let inv = &r.invariant;
        let c = |x: bool| u64::from(x);
        self.m += 1;
        self.connected += c(inv.strongly_connected);
        self.sinks_present += c(inv.has_sink);
        self.k1_nonzero += c(inv.k1_rank > 0);
        self.k0_cyclic += c(r.k0_cyclic);
        self.det_negative += c(inv.det_sign() < 0);
        self.det_negative_and_cyclic += c(inv.det_sign() < 0 && r.k0_cyclic);
        self.full_shift += c(r.full_shift);
        self.stably_polygon += c(r.stably_polygon);
        self.stably_cuntz += c(r.stably_cuntz);
        self.exact_polygon += c(r.exact_polygon);
        self.exact_cuntz += c(r.exact_cuntz);
        for s in &r.sylow {
            let t = self.primes.entry(s.p).or_default();
            t.cyclic += c(s.cyclic);
            t.trivial += c(s.trivial);
            if let Some(n) = s.cyclic_of_exponent {
                *t.cyclic_of_exponent.entry(n).or_default() += 1;
            }
            if let Some(n) = s.elementary_of_rank {
                *t.elementary_of_rank.entry(n).or_default() += 1;
            }
            *t.histogram.entry(s.partition.to_string()).or_default() += 1;
        }
    }

    /// Every named count with its key, in a fixed order.
    pub fn named_counts(&self) -> Vec<(String, u64)> {
        let mut out: Vec<(String, u64)> = [
            ("connected", self.connected),
            ("sinks_present", self.sinks_present),
            ("k1_nonzero", self.k1_nonzero),
            ("k0_cyclic", self.k0_cyclic),
            ("det_negative", self.det_negative),
            ("det_negative_and_cyclic", self.det_negative_and_cyclic),
            ("full_shift", self.full_shift),
            ("stably_polygon", self.stably_polygon),
            ("stably_cuntz", self.stably_cuntz),
            ("exact_polygon", self.exact_polygon),
            ("exact_cuntz", self.exact_cuntz),
        ]
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect();
        for (p, t) in &self.primes {
            out.push((format!("p{p}_cyclic"), t.cyclic));
            out.push((format!("p{p}_trivial"), t.trivial));
            for (n, c) in &t.cyclic_of_exponent {
                out.push((format!("p{p}_cyclic_exp{n}"), *c));
            }
            for (n, c) in &t.elementary_of_rank {
                out.push((format!("p{p}_elementary_rank{n}"), *c));
            }
        }
        out
    }

    /// Sanity relations every run must satisfy.
    pub fn check_relations(&self) -> std::result::Result<(), String> {
        let checks = [
            (self.full_shift <= self.det_negative_and_cyclic, "full_shift <= det_negative_and_cyclic"),
            (self.det_negative_and_cyclic <= self.det_negative, "det_negative_and_cyclic <= det_negative"),
            (self.full_shift <= self.k0_cyclic, "full_shift <= k0_cyclic"),
            (self.exact_cuntz <= self.exact_polygon, "exact_cuntz <= exact_polygon"),
            (self.exact_polygon <= self.stably_polygon, "exact_polygon <= stably_polygon"),
            (self.stably_cuntz <= self.stably_polygon, "stably_cuntz <= stably_polygon"),
            (self.exact_cuntz <= self.stably_cuntz, "exact_cuntz <= stably_cuntz"),
            (self.k0_cyclic >= self.exact_cuntz, "k0_cyclic >= exact_cuntz"),
        ];
        for (ok, what) in checks {
            if !ok {
                return Err(format!("tally relation violated: {what}"));
            }
        }
        if self.named_counts().iter().any(|(_, c)| *c > self.m) {
            return Err("a count exceeds the sample size".into());
        }
        Ok(())
    }
}
