//! Acceptance gate. Every criterion prints one `PASS` or `FAIL` line to the
//! real stdout (not the captured one), so the lines show up in plain
//! `cargo test` output.

mod support;

use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;

use kgraph::abelian::FinAbGroup;
use kgraph::exactla::{cokernel, det_signed, snf, IntMatrix};
use kgraph::graphgen::{cuntz_polygon_adjacency, AdjacencyMatrix, ModelSpec};
use kgraph::invariants::compute_invariant;
use kgraph::montecarlo::{consistent, run, Ci, RunConfig, RunOutput, Workers};
use kgraph::theory::{self, Status};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const M: u64 = 10_000;

fn line(ok: bool, name: &str, detail: &str) -> bool {
    let tag = if ok { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{tag} {name}: {detail}");
    ok
}

/// Runs every check, then fails the test if any of them failed.
struct Gate(Vec<String>);

impl Gate {
    fn new() -> Self {
        Gate(Vec::new())
    }

    fn check(&mut self, ok: bool, name: &str, detail: String) {
        if !line(ok, name, &detail) {
            self.0.push(name.to_string());
        }
    }

    fn close(self) {
        assert!(self.0.is_empty(), "failed: {:?}", self.0);
    }
}

fn near(x: f64, target: f64, tol: f64) -> (bool, String) {
    ((x - target).abs() < tol, format!("{x:.6} vs {target} (tol {tol:e})"))
}

// ---- theory constants ----

fn conj(name: &str) -> f64 {
    theory::conjecture_constants()[name].value
}

#[test]
fn theory_constants() {
    let start = Instant::now();
    let mut g = Gate::new();
    let cases = [
        ("p_cuntz_iid = 0.84694", theory::p_cuntz_iid(), 0.84694),
        ("half of p_cuntz_iid = 0.42347", 0.5 * theory::p_cuntz_iid(), 0.42347),
        ("inverse zeta product = 0.43576", conj("dcuntz"), 0.43576),
        ("eexact = 0.60793", conj("eexact"), 0.60793),
        ("p_cyclic_symmetric_all = 0.79352", theory::p_cyclic_symmetric_all(), 0.79352),
    ];
    for (name, x, target) in cases {
        let (ok, d) = near(x, target, 1e-4);
        g.check(ok, name, d);
    }
    let six_over_pi2 = 6.0 / std::f64::consts::PI.powi(2);
    let (ok, d) = near(conj("eexact"), six_over_pi2, 1e-5);
    g.check(ok, "eexact = 6/pi^2", d);
    let (ok, d) = near(conj("pi2"), 0.419, 1e-3);
    g.check(ok, "pi_2 = 0.419", d);
    for j in 1..=4u32 {
        let r = (1u64 << j) + 1;
        let (ok, d) = near(theory::gamma_r(r).unwrap(), 0.397, 1e-3);
        g.check(ok, &format!("gamma_{r} = 0.397"), d);
    }
    let (ok, d) = near(conj("gamma_2j1"), 0.397, 1e-3);
    g.check(ok, "gamma_(2^j+1) = 0.397", d);

    let sylow13 = [
        (vec![], 0.92265),
        (vec![13], 0.07097),
        (vec![169], 0.00546),
        (vec![13, 13], 0.00042),
        (vec![2197], 0.00042),
    ];
    for (d, target) in sylow13 {
        let grp = FinAbGroup::from_u64s(&d);
        let x = theory::p_sylow_symmetric(&grp, &[13]).unwrap();
        let (ok, detail) = near(x, target, 1e-5);
        g.check(ok, &format!("p_sylow_symmetric({grp}) at p=13"), detail);
    }
    let secs = start.elapsed().as_secs_f64();
    g.check(secs < 1.0, "theory constants under 1 s", format!("{secs:.3} s"));
    g.close();
}

// Listed targets for the 𝔻 exact-polygon and 𝔼 exact-Cuntz limits. The
// formulas and the observed frequencies give them the other way round
// (0.51451 and 0.60793·0.79352 = 0.48240), so both fail.

#[test]
fn theory_dexact_listed_value() {
    let (ok, d) = near(conj("dexact"), 0.48240, 1e-4);
    assert!(line(ok, "dexact = 0.48240", &d), "{d}");
}

#[test]
fn theory_ecuntz_listed_value() {
    let (ok, d) = near(conj("ecuntz"), 0.51451, 1e-4);
    assert!(line(ok, "ecuntz = 0.51451", &d), "{d}");
}

// ---- Monte Carlo ----

fn half() -> kgraph::graphgen::Prob {
    "1/2".parse().unwrap()
}

fn timed_run(label: &str, cfg: RunConfig) -> RunOutput {
    let start = Instant::now();
    let out = run(&cfg).unwrap();
    let secs = start.elapsed().as_secs_f64();
    line(
        secs <= 900.0,
        &format!("{label} runtime"),
        &format!("{secs:.1} s for m = {}", cfg.samples),
    );
    out
}

fn bernoulli_run() -> &'static RunOutput {
    static R: OnceLock<RunOutput> = OnceLock::new();
    R.get_or_init(|| timed_run("D(50,1/2)", RunConfig::new(ModelSpec::Bernoulli { n: 50, q: half() }, M, 1)))
}

fn shifted_run() -> &'static RunOutput {
    static R: OnceLock<RunOutput> = OnceLock::new();
    R.get_or_init(|| {
        timed_run(
            "D(50,1/2)+I",
            RunConfig::new(ModelSpec::ShiftedBernoulli { n: 50, q: half() }, M, 2),
        )
    })
}

fn erdos_run() -> &'static RunOutput {
    static R: OnceLock<RunOutput> = OnceLock::new();
    R.get_or_init(|| timed_run("E(50,1/2)", RunConfig::new(ModelSpec::ErdosLoops { n: 50, q: half() }, M, 3)))
}

fn regular_run() -> &'static RunOutput {
    static R: OnceLock<RunOutput> = OnceLock::new();
    R.get_or_init(|| {
        let mut cfg = RunConfig::new(ModelSpec::RegularMatchings { n: 50, r: 3 }, M, 4);
        cfg.primes = vec![2, 3, 5, 7, 13];
        cfg.max_exp = 3;
        timed_run("G(50,3)", cfg)
    })
}

fn cis(out: &RunOutput, key: &str) -> Ci {
    out.cis[key]
}

fn describe(c: &Ci, target: f64) -> String {
    format!(
        "{:.5} [{:.5}, {:.5}] ({} of {}) vs {target}",
        c.p_hat, c.lo, c.hi, c.count, M
    )
}

/// Widened-interval rule.
fn banded(g: &mut Gate, out: &RunOutput, label: &str, key: &str, target: f64) {
    let c = cis(out, key);
    g.check(consistent(&c, out.tally.m, target), &format!("{label} {key}"), describe(&c, target));
}

/// Fixed-tolerance rule.
fn within(g: &mut Gate, out: &RunOutput, label: &str, key: &str, target: f64, tol: f64) {
    let c = cis(out, key);
    g.check(
        (c.p_hat - target).abs() <= tol,
        &format!("{label} {key} ±{tol}"),
        describe(&c, target),
    );
}

#[test]
fn bernoulli_reproduction() {
    let out = bernoulli_run();
    let t = &out.tally;
    let mut g = Gate::new();
    let label = "D(50,1/2)";
    g.check(t.connected == t.m, &format!("{label} connected fraction = 1"), format!("{} of {}", t.connected, t.m));
    g.check(t.k1_nonzero == 0, &format!("{label} K1 != 0 count = 0"), format!("{}", t.k1_nonzero));
    banded(&mut g, out, label, "k0_cyclic", 0.84694);
    for (p, target) in [(2, 0.86636), (3, 0.98022), (5, 0.99794), (7, 0.99951)] {
        banded(&mut g, out, label, &format!("p{p}_cyclic"), target);
    }
    banded(&mut g, out, label, "det_negative", 0.5);
    banded(&mut g, out, label, "full_shift", 0.42347);
    let c = cis(out, "exact_polygon");
    g.check(
        (0.47..=0.52).contains(&c.p_hat),
        &format!("{label} exact_polygon in [0.47, 0.52]"),
        format!(
            "{:.5} [{:.5}, {:.5}]; observed 0.50880, listed 0.48240, formula {:.5}",
            c.p_hat,
            c.lo,
            c.hi,
            conj("dexact")
        ),
    );
    within(&mut g, out, label, "exact_cuntz", 0.43576, 0.015);
    g.close();
}

#[test]
fn shifted_bernoulli_reproduction() {
    let out = shifted_run();
    let mut g = Gate::new();
    within(&mut g, out, "D(50,1/2)+I", "det_negative", 0.5, 0.015);
    within(&mut g, out, "D(50,1/2)+I", "full_shift", 0.42347, 0.015);
    g.close();
}

#[test]
fn erdos_reproduction() {
    let out = erdos_run();
    let mut g = Gate::new();
    let label = "E(50,1/2)";
    within(&mut g, out, label, "k0_cyclic", 0.79352, 0.012);
    within(&mut g, out, label, "p2_cyclic", 0.83884, 0.011);
    g.close();
}

/// Observed frequencies at n = 50 already sit 0.0136 below the limit, so
/// the ±0.015 band leaves little room for sampling error.
#[test]
fn erdos_exact_polygon() {
    let out = erdos_run();
    let mut g = Gate::new();
    within(&mut g, out, "E(50,1/2)", "exact_polygon", 0.60793, 0.015);
    let c = cis(out, "exact_polygon");
    line(
        consistent(&c, out.tally.m, 0.59431),
        "E(50,1/2) exact_polygon vs observed 0.59431 (ungated)",
        &describe(&c, 0.59431),
    );
    g.close();
}

/// Listed as 0.51451; the formula and the observed frequencies give 0.48240.
#[test]
fn erdos_exact_cuntz_listed_value() {
    let out = erdos_run();
    let mut g = Gate::new();
    within(&mut g, out, "E(50,1/2)", "exact_cuntz", 0.51451, 0.015);
    g.close();
}

#[test]
fn regular_reproduction() {
    let out = regular_run();
    let t = &out.tally;
    let mut g = Gate::new();
    let label = "G(50,3)";
    let table = [
        ("()", "0", 0.9225, 0.9268),
        ("(1)", "Z/13", 0.0672, 0.0713),
        ("(2)", "Z/169", 0.0048, 0.0060),
        ("(1,1)", "(Z/13)^2", 0.0003, 0.0006),
        ("(3)", "Z/2197", 0.0001, 0.0004),
    ];
    let hist = &t.primes[&13].histogram;
    for (key, name, lo, hi) in table {
        let count = hist.get(key).copied().unwrap_or(0);
        let f = count as f64 / t.m as f64;
        g.check(
            f >= lo - 0.005 && f <= hi + 0.005,
            &format!("{label} Sylow-13 = {name}"),
            format!("{f:.5} ({count}) vs [{lo}, {hi}] widened by 0.005"),
        );
    }
    g.check(t.exact_polygon <= 1, &format!("{label} exact_polygon count 0 or 1"), format!("{}", t.exact_polygon));
    g.close();
}

/// Singular `I − A` at n = 50 runs near 0.5%, an order of magnitude above
/// the n = 100 rate of 57–65 per 10⁵.
#[test]
fn regular_k1_nonzero_bound() {
    let t = &regular_run().tally;
    let ok = line(t.k1_nonzero <= 30, "G(50,3) K1 != 0 at most 30", &format!("{} of {}", t.k1_nonzero, t.m));
    assert!(ok);
}

#[test]
fn regular_large_cyclicity() {
    let out = timed_run("G(100,5)", RunConfig::new(ModelSpec::RegularMatchings { n: 100, r: 5 }, 1000, 5));
    let c = out.cis["k0_cyclic"];
    let ok = line(
        (c.p_hat - 0.395).abs() <= 0.05,
        "G(100,5) k0_cyclic ±0.05",
        &format!("{:.4} [{:.4}, {:.4}] vs 0.395", c.p_hat, c.lo, c.hi),
    );
    assert!(ok);
}

#[test]
fn open_estimators_reported() {
    let mut g = Gate::new();
    let runs = [
        ("E(50,1/2)", erdos_run(), [("det_negative", "delta"), ("det_negative_and_cyclic", "sigma")]),
        ("G(50,3)", regular_run(), [("det_negative", "epsilon"), ("det_negative_and_cyclic", "tau")]),
    ];
    for (label, out, stats) in runs {
        for (stat, symbol) in stats {
            let row = out.comparison.iter().find(|c| c.stat == stat).unwrap();
            let tagged = row.status == Status::Open && row.symbol.as_deref() == Some(symbol) && row.pass.is_none();
            g.check(
                tagged,
                &format!("{label} {symbol}-hat reported open"),
                format!("{:.5} [{:.5}, {:.5}] open", row.estimate, row.ci_lo, row.ci_hi),
            );
        }
    }
    // σ ≈ 0.79352·δ under independence, reported only
    let e = &erdos_run().tally;
    let ratio = e.det_negative_and_cyclic as f64 / e.det_negative.max(1) as f64;
    line(true, "E(50,1/2) sigma/delta (ungated)", &format!("{ratio:.4}"));
    g.close();
}

// ---- property suites, quick versions ----

#[test]
fn property_snf() {
    let start = Instant::now();
    let mut g = Gate::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut bad = 0;
    for _ in 0..10_000 {
        let n = rng.random_range(1..=8);
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(-5..=5)).collect()).collect();
        let m = IntMatrix::from_rows(&rows);
        let r = snf(&m, true);
        let (u, v) = (r.u.as_ref().unwrap(), r.v.as_ref().unwrap());
        let diag_ok = u.mul(&m).unwrap().mul(v).unwrap() == IntMatrix::diagonal(&r.d);
        let nz: Vec<&BigInt> = r.d.iter().filter(|x| !x.is_zero()).collect();
        let chain_ok = nz.windows(2).all(|w| (w[1] % w[0]).is_zero());
        let unimodular = det_signed(u).unwrap().magnitude() == &BigUint::from(1u32)
            && det_signed(v).unwrap().magnitude() == &BigUint::from(1u32);
        let invariant = snf(&m.transpose(), false).d == r.d && snf(&m.neg(), false).d == r.d;
        if !(diag_ok && chain_ok && unimodular && invariant) {
            bad += 1;
        }
    }
    g.check(bad == 0, "SNF U·M·V = D, chain, unimodular, transpose/negation", format!("{bad} bad of 10000"));

    let mut checked = 0;
    let mut bad = 0;
    while checked < 300 {
        let n = rng.random_range(1..=4);
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(-4..=4)).collect()).collect();
        let det = support::det_cofactor(&rows);
        if det == 0 || det.abs() > 200 {
            continue;
        }
        let oracle = support::coset_torsion_profile(&rows);
        let got = support::group_torsion_profile(&cokernel(&IntMatrix::from_rows(&rows)), oracle.len() as u64);
        if got != oracle {
            bad += 1;
        }
        checked += 1;
    }
    g.check(bad == 0, "cokernel vs coset enumeration", format!("{bad} bad of {checked}"));
    let secs = start.elapsed().as_secs_f64();
    g.check(secs < 300.0, "SNF suite under 5 min", format!("{secs:.1} s"));
    g.close();
}

#[test]
fn property_abelian() {
    let start = Instant::now();
    let mut g = Gate::new();
    let groups = support::groups_up_to(128);
    let mut aut_bad = 0;
    let mut orbit_bad = 0;
    for d in &groups {
        let grp = support::lib_group(d);
        let sg = support::SmallGroup::new(d);
        if grp.aut_order().unwrap() != BigUint::from(sg.aut_count()) {
            aut_bad += 1;
        }
        let ids = sg.orbit_ids();
        let labels: Vec<_> = (0..sg.size)
            .map(|x| grp.orbit_invariant(&grp.element_u64(&sg.coords(x)).unwrap()).unwrap())
            .collect();
        for x in 0..sg.size {
            for y in 0..sg.size {
                if (labels[x] == labels[y]) != (ids[x] == ids[y]) {
                    orbit_bad += 1;
                }
            }
        }
    }
    g.check(aut_bad == 0, "aut_order vs brute force, |G| <= 128", format!("{aut_bad} bad of {}", groups.len()));
    g.check(orbit_bad == 0, "same_orbit vs brute force, |G| <= 128", format!("{orbit_bad} bad pairs"));
    let mut pair_bad = 0;
    let small = support::groups_up_to(16);
    for d in &small {
        let sg = support::SmallGroup::new(d);
        let oracle = BigRational::new(
            BigInt::from(sg.pairing_count()),
            BigInt::from(sg.size as u128 * sg.aut_count()),
        );
        if support::lib_group(d).pairing_count_normalized().unwrap() != oracle {
            pair_bad += 1;
        }
    }
    g.check(pair_bad == 0, "N(G) vs brute force, |G| <= 16", format!("{pair_bad} bad of {}", small.len()));
    let secs = start.elapsed().as_secs_f64();
    g.check(secs < 300.0, "abelian suite under 5 min", format!("{secs:.1} s"));
    g.close();
}

#[test]
fn property_example_round_trip() {
    let a = AdjacencyMatrix::from_rows(&[
        vec![0, 3, 3, 1, 0, 1],
        vec![3, 0, 0, 2, 3, 0],
        vec![3, 0, 0, 2, 1, 2],
        vec![1, 2, 2, 0, 1, 2],
        vec![0, 3, 1, 1, 0, 3],
        vec![1, 0, 2, 2, 3, 0],
    ])
    .unwrap();
    let inv = compute_invariant(&a);
    let unit = inv.unit_class.clone().unwrap();
    let ok = inv.k0.to_string() == "Z/7"
        && unit.coords() == [BigUint::from(5u32)]
        && inv.k1_rank == 0
        && inv.exactly_cuntz_algebra().holds
        && inv.cuntz_index() == Some(BigInt::from(8));
    assert!(line(
        ok,
        "6x6 example is O_8",
        &format!("K0={}, unit={unit}, K1 rank {}", inv.k0, inv.k1_rank)
    ));
}

#[test]
fn property_polygon_round_trip() {
    let mut bad = Vec::new();
    let mut cases = 0;
    for len in 1..=4u32 {
        for code in 0..6u32.pow(len) {
            let mbar: Vec<u32> = (0..len).map(|k| code / 6u32.pow(k) % 6 + 1).collect();
            let inv = compute_invariant(&cuntz_polygon_adjacency(&mbar).unwrap());
            let nontrivial: Vec<u64> = mbar.iter().map(|&m| u64::from(m)).filter(|&m| m > 1).collect();
            let ok = inv.k0 == FinAbGroup::from_u64s(&nontrivial)
                && inv.k1_rank == 0
                && inv.k0.in_orbit_of_all_ones(inv.unit_class.as_ref().unwrap()).unwrap()
                && inv.exactly_cuntz_polygon().holds;
            if !ok {
                bad.push(mbar);
            }
            cases += 1;
        }
    }
    assert!(line(
        bad.is_empty(),
        "Cuntz polygon round-trip, entries <= 6, length <= 4",
        &format!("{} bad of {cases}", bad.len())
    ));
}

#[test]
fn property_determinism() {
    let mut tallies = Vec::new();
    for w in [1, 4, 8] {
        let mut cfg = RunConfig::new(ModelSpec::Bernoulli { n: 20, q: half() }, 2000, 17);
        cfg.workers = Workers::Count(w);
        tallies.push(serde_json::to_string(&run(&cfg).unwrap().tally).unwrap());
    }
    let ok = tallies[0] == tallies[1] && tallies[0] == tallies[2];
    assert!(line(ok, "identical tallies for workers 1, 4, 8", "D(20,1/2), m = 2000"));
}
