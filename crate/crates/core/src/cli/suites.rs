//! Verification suites: every acceptance check as a function of a
//! [`SuiteConfig`], each returning a [`Check`] with a status and details.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::adele::{
    self, conj_by_dlambda, enumerate_sl2, in_gamma_tilde, reciprocity_matrix, shape_rational,
    units, AdelicMatrix, LevelMatrix, RatMatrix, ShapeKind,
};
use crate::approx::{
    acts_trivially, approx_eq, d_minus_one_separator, faithfulness_check, lift_with, spanning_sample, table_of,
    ApproxPoint, RelationSolver,
};
use crate::error::{Error, Result};
use crate::galois::{
    branch_map, component_action, enumerate_shadows, equalize_dets, normalizer_elements, shadow_act, shadow_eq,
    shadow_mul, surjective_common_det, GaloisShadow,
};
use crate::numth::{self, gcd_u64, hilbert_symbol, inv_mod, mul_mod, rat, Place};
use crate::qforms::{self, QuadForm, QuadPoint, UnimodularMap};
use crate::shimura::{self, act_rational, act_unit, component, is_cm, is_fixed, point_eq, verify_witness, LevelPoint};
use crate::tori::{
    goursat, independent, minimal_subtorus_check, stable_saturation, verify_goursat, AbelianGroup, Elem, SignModule,
    Sublattice,
};

/// Names accepted by `cmcurve verify`.
pub const SUITES: &[&str] =
    &["numth", "qforms", "points", "fixedpoints", "shadows", "exactseq", "lattices", "relationR", "lift", "all"];

/// Instance counts of the randomized checks.
#[derive(Debug, Clone, Serialize)]
pub struct Counts {
    pub hilbert_pairs: usize,
    pub fixed_instances: usize,
    pub goursat_groups: usize,
    pub lattice_probes: usize,
    pub closure_instances: usize,
    pub relation_tuples: usize,
    pub functoriality: usize,
}

impl Default for Counts {
    fn default() -> Self {
        Counts {
            hilbert_pairs: 1000,
            fixed_instances: 200,
            goursat_groups: 1000,
            lattice_probes: 10_000,
            closure_instances: 1000,
            relation_tuples: 10_000,
            functoriality: 1000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[derive(Default)]
pub struct SuiteConfig {
    /// Overrides the level of level-dependent checks.
    pub level: Option<u64>,
    /// Overrides the orbit support of shadow checks.
    pub support: Option<Vec<u64>>,
    pub seed: u64,
    pub counts: Counts,
    /// Report every level-dependent check as obstructed at a bad level.
    pub strict_good_level: bool,
}


impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.level == Some(0) {
            return Err(Error::invalid("level must be at least 1"));
        }
        if let Some(s) = &self.support {
            if s.is_empty() {
                return Err(Error::invalid("empty support"));
            }
            for (i, &m) in s.iter().enumerate() {
                if m == 0 || !numth::is_squarefree_u64(m) || s[..i].contains(&m) {
                    return Err(Error::invalid(format!("support entry {m} is not a new square-free positive integer")));
                }
            }
        }
        let c = &self.counts;
        let all = [
            c.hilbert_pairs,
            c.fixed_instances,
            c.goursat_groups,
            c.lattice_probes,
            c.closure_instances,
            c.relation_tuples,
            c.functoriality,
        ];
        if all.contains(&0) {
            return Err(Error::invalid("instance counts must be at least 1"));
        }
        Ok(())
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    fn support_or(&self, default: &[u64]) -> Vec<u64> {
        self.support.clone().unwrap_or_else(|| default.to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Obstructed,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub criterion: Option<u8>,
    pub status: Status,
    pub instances: u64,
    /// Library operations exercised by the check.
    pub ops: Vec<&'static str>,
    pub detail: Value,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn line(&self) -> String {
        let label = match self.criterion {
            Some(c) => format!("criterion {c:>2}"),
            None => "supporting  ".to_string(),
        };
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Obstructed => "OBSTRUCTED",
        };
        format!("{label} {status:<10} {:<28} instances={:<7} {} ms", self.name, self.instances, self.elapsed_ms)
    }
}

/// Library operations exercised by each check.
pub const CHECK_OPS: &[(&str, &[&str])] = &[
    ("form-reduction-oracle", &["reduce", "form_of", "reduced_forms"]),
    ("class-number-anchors", &["reduced_forms", "class_number", "count_cm_points"]),
    ("cornacchia-and-rational-norms", &["cornacchia", "solve_form_rational", "hilbert_symbol"]),
    ("hilbert-reciprocity", &["hilbert_symbol", "factor", "squarefree_part"]),
    ("factor-jacobi-sqrt", &["factor", "squarefree_part", "jacobi", "sqrt_mod"]),
    ("fixed-point-classification", &["is_fixed", "is_cm"]),
    ("functoriality", &["project", "act_unit", "shadow_act", "component"]),
    ("point-equality-invariants", &["point_eq", "act_rational", "component", "same_orbit", "orbit_rep"]),
    ("adelic-arithmetic", &["mul", "reduce_level", "shape_test", "reciprocity_matrix", "in_gamma_tilde", "conj_by_dlambda"]),
    ("sigma-well-definedness", &["shadow_eq", "shape_test"]),
    ("exact-sequence", &["branch_map", "shadow_mul", "enumerate_shadows", "component_action"]),
    ("common-det-surjectivity", &["surjective_common_det"]),
    ("determinant-equalization", &["equalize_dets"]),
    ("goursat-and-subtori", &["goursat", "stable_saturation", "minimal_subtorus_check"]),
    ("independence", &["independent"]),
    ("relation-R-equivalence", &["relation_R", "approx_eq", "canonical_rep"]),
    ("lift-round-trip", &["lift_automorphism", "shadow_eq", "shadow_act"]),
    ("faithfulness", &["faithfulness_check"]),
];

struct Outcome {
    ok: bool,
    instances: u64,
    detail: Value,
}

fn outcome(ok: bool, instances: u64, detail: Value) -> Result<Outcome> {
    Ok(Outcome { ok, instances, detail })
}

fn run(name: &'static str, criterion: Option<u8>, f: impl FnOnce() -> Result<Outcome>) -> Check {
    let ops = CHECK_OPS.iter().find(|(n, _)| *n == name).map(|(_, o)| o.to_vec()).unwrap_or_default();
    let start = Instant::now();
    let res = f();
    let elapsed_ms = start.elapsed().as_millis();
    let (status, instances, detail) = match res {
        Ok(o) => (if o.ok { Status::Pass } else { Status::Fail }, o.instances, o.detail),
        Err(e) if e.is_obstruction() => (Status::Obstructed, 0, json!({"obstruction": e.to_string()})),
        Err(e) => (Status::Fail, 0, json!({"error": e.to_string()})),
    };
    Check { name, criterion, status, instances, ops, detail, elapsed_ms }
}

fn bad_level(n: u64, support: &[u64]) -> Option<u64> {
    let prod = support.iter().fold(2 % n.max(1), |acc, &m| mul_mod(acc, m % n, n));
    let g = gcd_u64(n, prod);
    (n > 1 && g != 1).then_some(g)
}

/// Level gate: an obstruction when the level is bad and the check needs a good
/// level (or strict mode is on).
fn gate(cfg: &SuiteConfig, n: u64, support: &[u64], needs_good: bool) -> Result<()> {
    if needs_good || cfg.strict_good_level {
        if let Some(g) = bad_level(n, support) {
            return Err(Error::LevelObstruction { level: n, gcd: g });
        }
    }
    Ok(())
}

fn random_word(rng: &mut ChaCha8Rng, len: usize, tmax: i64) -> UnimodularMap {
    let mut g = UnimodularMap::identity();
    for _ in 0..len {
        let k = rng.gen_range(-tmax..=tmax);
        g = g.mul(&UnimodularMap::translation(BigInt::from(k))).mul(&UnimodularMap::inversion());
    }
    g
}

fn random_unit(rng: &mut ChaCha8Rng, n: u64) -> LevelMatrix {
    loop {
        let e = [0; 4].map(|_: i64| rng.gen_range(0..n as i64));
        if let Ok(m) = LevelMatrix::new(e, n) {
            return m;
        }
    }
}

fn coprime_den(rng: &mut ChaCha8Rng, n: u64, max: i64) -> i64 {
    loop {
        let d = rng.gen_range(1..=max);
        if gcd_u64(d as u64, n) == 1 {
            return d;
        }
    }
}

fn random_tau(rng: &mut ChaCha8Rng, m: u64, n: u64) -> QuadPoint {
    let p = (rng.gen_range(-6..=6), coprime_den(rng, n, 4));
    let q = (rng.gen_range(1..=5), coprime_den(rng, n, 4));
    QuadPoint::from_ints(m, p, q).expect("q > 0")
}

/// As [`random_tau`] with the imaginary part a unit at N.
fn random_unit_tau(rng: &mut ChaCha8Rng, m: u64, n: u64) -> QuadPoint {
    let p = (rng.gen_range(-6..=6), coprime_den(rng, n, 4));
    let q = (coprime_den(rng, n, 5), coprime_den(rng, n, 4));
    QuadPoint::from_ints(m, p, q).expect("q > 0")
}

// ---------------------------------------------------------------- qforms

fn sl2_box(bound: i64) -> Vec<[i64; 4]> {
    let mut out = Vec::new();
    for a in -bound..=bound {
        for c in -bound..=bound {
            if a.gcd(&c) != 1 {
                continue;
            }
            // a·d − b·c = 1: one solution, then shift by (a, c)
            let (g, x, y) = {
                let e = a.extended_gcd(&c);
                (e.gcd, e.x, e.y)
            };
            debug_assert_eq!(g, 1);
            let (d0, b0) = (x, -y);
            for k in -2 * bound - 2..=2 * bound + 2 {
                let (b, d) = (b0 + k * a, d0 + k * c);
                if b.abs() <= bound && d.abs() <= bound {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out.sort_by_key(|e| (e.iter().map(|x| x.abs()).max().unwrap(), *e));
    out.dedup();
    out
}

fn reduced_i64(a: i64, b: i64, c: i64) -> bool {
    b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
}

fn compose_i64((a, b, c): (i64, i64, i64), [p, q, r, s]: [i64; 4]) -> (i64, i64, i64) {
    let ev = |x: i64, y: i64| a * x * x + b * x * y + c * y * y;
    (ev(p, r), 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s, ev(q, s))
}

fn c1_reduction(_cfg: &SuiteConfig) -> Check {
    run("form-reduction-oracle", Some(1), || {
        let boxm = sl2_box(50);
        let coef = 25i64;
        let mut forms = 0u64;
        let mut bad: Vec<Value> = Vec::new();
        for a in 1..=coef {
            for c in 1..=coef {
                for b in -coef..=coef {
                    let d = b * b - 4 * a * c;
                    if d >= 0 || -d > 400 || a.gcd(&b).gcd(&c) != 1 {
                        continue;
                    }
                    forms += 1;
                    let f = QuadForm::from_i64(a, b, c)?;
                    let (g, gamma) = qforms::reduce(&f);
                    let exact = f.compose(&gamma.inv()) == g && g.is_reduced() && g.disc() == f.disc();
                    let found = boxm.iter().map(|m| compose_i64((a, b, c), *m)).find(|&(x, y, z)| reduced_i64(x, y, z));
                    if !exact || found != Some(g.to_i64()) {
                        bad.push(json!({"form": [a, b, c], "reduce": g.to_i64(), "oracle": found}));
                    }
                }
            }
        }
        // the root of every form maps to the same reduced form
        for d in (3..=400).filter(|d| d % 4 == 0 || d % 4 == 3) {
            for g in qforms::reduced_forms(-d)? {
                if qforms::reduce(&qforms::form_of(&g.root())).0 != g {
                    bad.push(json!({"root_of": g.to_i64()}));
                }
            }
        }
        outcome(bad.is_empty(), forms, json!({"forms": forms, "box_matrices": boxm.len(), "disagreements": bad}))
    })
}

fn brute_class_number(d: i64) -> usize {
    let mut h = 0;
    let mut a = 1;
    while 3 * a * a <= d {
        for b in -a..=a {
            if (b * b + d) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b + d) / (4 * a);
            if c >= a && reduced_i64(a, b, c) && a.gcd(&b).gcd(&c) == 1 {
                h += 1;
            }
        }
        a += 1;
    }
    h
}

fn c2_class_numbers(_cfg: &SuiteConfig) -> Check {
    run("class-number-anchors", Some(2), || {
        let anchors = [(-4, 1), (-20, 2), (-23, 3)];
        let mut bad = Vec::new();
        for (d, h) in anchors {
            if qforms::class_number(d)? != h {
                bad.push(json!({"disc": d, "expected": h}));
            }
        }
        let mut count = 0;
        for d in (3..=400i64).filter(|d| d % 4 == 0 || d % 4 == 3) {
            let h = brute_class_number(d);
            let got = (qforms::reduced_forms(-d)?.len(), shimura::count_cm_points(-d, 1)?);
            if got != (h, h) {
                bad.push(json!({"disc": -d, "oracle": h, "reduced_forms": got.0, "cm_points": got.1}));
            }
            count += 1;
        }
        outcome(bad.is_empty(), count, json!({"anchors": anchors, "discriminants": count, "disagreements": bad}))
    })
}

// ---------------------------------------------------------------- numth

fn c3_cornacchia(_cfg: &SuiteConfig) -> Check {
    run("cornacchia-and-rational-norms", Some(3), || {
        let mut bad = Vec::new();
        let mut n = 0u64;
        for m in 1..=30u64 {
            for k in 1..=10_000u64 {
                let mut brute = Vec::new();
                let mut y = 0u64;
                while m * y * y <= k {
                    let r = k - m * y * y;
                    let x = r.sqrt();
                    if x * x == r && x.gcd(&y) == 1 {
                        brute.push((x, y));
                    }
                    y += 1;
                }
                brute.sort_by_key(|&(x, y)| (y, x));
                n += 1;
                if qforms::cornacchia_primitive(m, k) != brute {
                    bad.push(json!({"m": m, "k": k, "oracle": brute}));
                }
            }
        }
        let mut obstructed = 0u64;
        for m in (1..=30u64).filter(|&m| numth::is_squarefree_u64(m)) {
            for a in 1..=30i64 {
                for b in 1..=12i64 {
                    if a.gcd(&b) != 1 {
                        continue;
                    }
                    n += 1;
                    let k = rat(a, b);
                    // s = x/d, t = y/d with d ≤ 12: x² + m y² = a d² / b
                    let mut brute = None;
                    'search: for d in 1..=12i64 {
                        if (a * d * d) % b != 0 {
                            continue;
                        }
                        let t = (a * d * d / b) as u64;
                        let mut y = 0u64;
                        while m * y * y <= t {
                            let r = t - m * y * y;
                            if r.sqrt() * r.sqrt() == r {
                                brute = Some((r.sqrt(), y, d));
                                break 'search;
                            }
                            y += 1;
                        }
                    }
                    match qforms::solve_form_rational(m, &k)? {
                        qforms::NormSolution::Found { s, t } => {
                            if &s * &s + BigRational::from_integer(m.into()) * &t * &t != k {
                                bad.push(json!({"m": m, "k": [a, b], "invalid_solution": true}));
                            }
                        }
                        qforms::NormSolution::Obstructed { places, .. } => {
                            obstructed += 1;
                            let neg_m = BigRational::from_integer(-BigInt::from(m));
                            let certified = !places.is_empty()
                                && places.iter().all(|v| hilbert_symbol(&k, &neg_m, *v).map(|h| h == -1).unwrap_or(false));
                            if brute.is_some() || !certified {
                                bad.push(json!({"m": m, "k": [a, b], "oracle": brute}));
                            }
                        }
                    }
                }
            }
        }
        outcome(bad.is_empty(), n, json!({"instances": n, "obstructed": obstructed, "disagreements": bad}))
    })
}

fn squares_mod(q: u64) -> Vec<bool> {
    let mut s = vec![false; q as usize];
    for x in 0..q {
        s[(x * x % q) as usize] = true;
    }
    s
}

/// `a x² + b y² = z²` has a solution mod `p^k` with `(x, y)` not both divisible by `p`.
fn locally_solvable_brute(a: i64, b: i64, p: u64, k: u32) -> bool {
    let q = p.pow(k);
    let sq = squares_mod(q);
    let (a, b) = (numth::reduce_i64(a, q), numth::reduce_i64(b, q));
    for x in 0..q {
        for y in 0..q {
            if x % p == 0 && y % p == 0 {
                continue;
            }
            let v = (mul_mod(a, x * x % q, q) + mul_mod(b, y * y % q, q)) % q;
            if sq[v as usize] {
                return true;
            }
        }
    }
    false
}

fn square_class(x: &BigRational) -> i64 {
    // x·den² = num·den; its square-free part represents the class
    let v = x.numer() * x.denom();
    let (m, _) = numth::squarefree_part(&v.abs()).expect("nonzero, small");
    let m = m.to_i64().expect("small");
    if v.is_negative() {
        -m
    } else {
        m
    }
}

fn c4_hilbert(cfg: &SuiteConfig) -> Check {
    run("hilbert-reciprocity", Some(4), || {
        let mut rng = cfg.rng(4);
        let mut bad = Vec::new();
        let locals = [(2u64, 6u32), (3, 4), (5, 2), (7, 2)];
        for _ in 0..cfg.counts.hilbert_pairs {
            let draw = |rng: &mut ChaCha8Rng| {
                let s = if rng.gen_bool(0.5) { -1 } else { 1 };
                rat(s * rng.gen_range(1..=100), rng.gen_range(1..=100))
            };
            let (a, b) = (draw(&mut rng), draw(&mut rng));
            let mut prod = 1i8;
            for v in numth::relevant_places(&a, &b)? {
                prod *= hilbert_symbol(&a, &b, v)?;
            }
            if prod != 1 {
                bad.push(json!({"a": a.to_string(), "b": b.to_string(), "product": prod}));
            }
            let (sa, sb) = (square_class(&a), square_class(&b));
            for (p, k) in locals {
                let h = hilbert_symbol(&a, &b, Place::Finite(p))?;
                if (h == 1) != locally_solvable_brute(sa, sb, p, k) {
                    bad.push(json!({"a": a.to_string(), "b": b.to_string(), "p": p, "symbol": h}));
                }
            }
        }
        let n = cfg.counts.hilbert_pairs as u64;
        outcome(bad.is_empty(), n, json!({"pairs": n, "local_checks": locals, "disagreements": bad}))
    })
}

fn numth_basics(cfg: &SuiteConfig) -> Check {
    run("factor-jacobi-sqrt", None, || {
        let mut rng = cfg.rng(40);
        let mut bad = Vec::new();
        let mut n_inst = 0u64;
        for _ in 0..500 {
            let n: u64 = rng.gen_range(1..=10_000_000);
            let f = numth::factor(&BigInt::from(n))?;
            let (m, s) = numth::squarefree_part(&BigInt::from(n))?;
            let ok = f.value() == BigInt::from(n)
                && f.primes().all(numth::is_prime_u64)
                && &m * &s * &s == BigInt::from(n)
                && numth::is_squarefree_u64(m.to_u64().unwrap());
            if !ok {
                bad.push(json!({"n": n}));
            }
            n_inst += 1;
        }
        for p in (3..200u64).filter(|&p| numth::is_prime_u64(p)) {
            for a in 0..p {
                let euler = numth::pow_mod(a, (p - 1) / 2, p);
                let e = if a == 0 { 0 } else if euler == 1 { 1 } else { -1 };
                if numth::jacobi(&BigInt::from(a), &BigInt::from(p))? != e {
                    bad.push(json!({"jacobi": [a, p]}));
                }
                n_inst += 1;
            }
        }
        for (p, k) in [(2u64, 7u32), (3, 4), (5, 3), (7, 2), (11, 2), (13, 2), (101, 1), (197, 1)] {
            let q = p.pow(k);
            let sq = squares_mod(q);
            for a in 0..q {
                let got = numth::sqrt_mod(a, p, k);
                let ok = match got {
                    Some(r) => r * r % q == a && (0..r).all(|x| x * x % q != a),
                    None => !sq[a as usize],
                };
                if !ok {
                    bad.push(json!({"sqrt_mod": [a, p, k]}));
                }
                n_inst += 1;
            }
        }
        outcome(bad.is_empty(), n_inst, json!({"disagreements": bad}))
    })
}

// ---------------------------------------------------------------- points

fn c5_fixed(cfg: &SuiteConfig) -> Check {
    run("fixed-point-classification", Some(5), || {
        let levels = match cfg.level {
            Some(n) => vec![n],
            None => vec![5, 7],
        };
        let support = cfg.support_or(&[1, 2]);
        let mut rng = cfg.rng(5);
        let mut bad = Vec::new();
        let (mut fixed, mut total) = (0u64, 0u64);
        for &n in &levels {
            gate(cfg, n, &support, false)?;
            // residues of x/y with |x| ≤ 20, 1 ≤ y ≤ 20, y prime to N
            let res: BTreeSet<u64> = (-20i64..=20)
                .flat_map(|x| (1..=20u64).filter(move |&y| gcd_u64(y, n) == 1).map(move |y| (x, y)))
                .map(|(x, y)| mul_mod(numth::reduce_i64(x, n), inv_mod(y, n).unwrap(), n))
                .collect();
            for _ in 0..cfg.counts.fixed_instances {
                let m = support[rng.gen_range(0..support.len())];
                let tau = random_tau(&mut rng, m, n);
                let u = random_unit(&mut rng, n);
                let p = LevelPoint::with_unit(tau.clone(), &u);
                // J fixes τ: (2p, −(p² + m q²); 1, 0)
                let pr = tau.p().clone();
                let nrm = &pr * &pr + BigRational::from_integer(m.into()) * tau.q() * tau.q();
                let two_p = BigRational::from_integer(2.into()) * &pr;
                let je = [&two_p, &-nrm, &BigRational::one(), &BigRational::zero()]
                    .map(|x| adele::rational_mod(x, n).expect("denominators prime to N"));
                let stab = |x: u64, y: u64| -> [u64; 4] {
                    [
                        (x + mul_mod(y, je[0], n)) % n,
                        mul_mod(y, je[1], n),
                        mul_mod(y, je[2], n),
                        (x + mul_mod(y, je[3], n)) % n,
                    ]
                };
                let g = if rng.gen_bool(0.5) {
                    loop {
                        let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
                        let e = stab(x, y).map(|v| v as i64);
                        if let Ok(c) = LevelMatrix::new(e, n) {
                            break u.inv().mul(&c).mul(&u);
                        }
                    }
                } else {
                    random_unit(&mut rng, n)
                };
                let target = u.mul(&g).mul(&u.inv()).entries();
                let oracle = res.iter().any(|&x| res.iter().any(|&y| stab(x, y) == target));
                let got = is_fixed(&g, &p)? && is_cm(&p);
                total += 1;
                fixed += got as u64;
                if got != oracle {
                    bad.push(json!({"level": n, "tau": crate::cli::json::quad_point(&tau), "u": u.entries(), "g": g.entries(), "oracle": oracle}));
                }
            }
        }
        outcome(bad.is_empty(), total, json!({"levels": levels, "fixed": fixed, "disagreements": bad}))
    })
}

fn c13_functoriality(cfg: &SuiteConfig) -> Check {
    run("functoriality", Some(13), || {
        let (n, n2) = match cfg.level {
            Some(n) => {
                let d = (2..n).rev().find(|d| n % d == 0).unwrap_or(1);
                (n, d)
            }
            None => (15, 5),
        };
        let support = cfg.support_or(&[1, 2]);
        gate(cfg, n, &support, true)?;
        let mut rng = cfg.rng(13);
        let mut bad = Vec::new();
        for i in 0..cfg.counts.functoriality {
            let m = support[rng.gen_range(0..support.len())];
            let p = LevelPoint::with_unit(random_unit_tau(&mut rng, m, n), &random_unit(&mut rng, n));
            let g = random_unit(&mut rng, n);
            let branch = if rng.gen_bool(0.5) { 1 } else { -1 };
            let us = units(n);
            let det = us[rng.gen_range(0..us.len())];
            let comps: Vec<LevelMatrix> = support
                .iter()
                .map(|&m| {
                    let els = normalizer_elements(m, n, branch, det);
                    els[rng.gen_range(0..els.len())]
                })
                .collect();
            let sigma = GaloisShadow::new(n, support.clone(), comps, branch)?;
            let pp = shimura::project(&p, n2)?;
            let lhs = shimura::project(&act_unit(&g, &p)?, n2)?;
            let rhs = act_unit(&g.reduce_to(n2)?, &pp)?;
            let s_lhs = shimura::project(&shadow_act(&sigma, &p)?, n2)?;
            let s_rhs = shadow_act(&sigma.project(n2)?, &pp)?;
            let comp_ok = component(&pp).value() == component(&p).value() % n2;
            if point_eq(&lhs, &rhs)?.is_none() || point_eq(&s_lhs, &s_rhs)?.is_none() || !comp_ok {
                bad.push(json!({"instance": i, "point": crate::cli::json::point(&p), "g": g.entries(), "shadow": crate::cli::json::shadow(&sigma)}));
            }
        }
        let k = cfg.counts.functoriality as u64;
        outcome(bad.is_empty(), k, json!({"from": n, "to": n2, "failures": bad}))
    })
}

fn points_invariants(cfg: &SuiteConfig) -> Check {
    run("point-equality-invariants", None, || {
        let n = cfg.level.unwrap_or(12);
        let mut rng = cfg.rng(30);
        let mut bad = Vec::new();
        for i in 0..500 {
            let m = [1u64, 2, 3, 5, 7][rng.gen_range(0..5)];
            let p = LevelPoint::with_unit(random_tau(&mut rng, m, n), &random_unit(&mut rng, n));
            let gamma = random_word(&mut rng, 3, 2);
            let q = act_rational(&gamma, &p);
            let w = point_eq(&p, &q)?;
            let (mm, rho) = shimura::orbit_rep(q.tau());
            let back = QuadPoint::sqrt_neg(mm)?.mobius(rho.entries())?;
            let ok = w.as_ref().is_some_and(|w| verify_witness(&p, &q, w))
                && component(&p) == component(&q)
                && shimura::same_orbit(p.tau(), q.tau())
                && &back == q.tau();
            if !ok {
                bad.push(json!({"instance": i}));
            }
        }
        outcome(bad.is_empty(), 500, json!({"level": n, "failures": bad}))
    })
}

fn adelic_arithmetic(cfg: &SuiteConfig) -> Check {
    run("adelic-arithmetic", None,
        || {
            let (n, n2) = (15u64, 5u64);
            let mut rng = cfg.rng(31);
            let mut bad = Vec::new();
            let rand_adelic = |rng: &mut ChaCha8Rng| -> Result<AdelicMatrix> {
                let w = RatMatrix::from_unimodular(&random_word(rng, 2, 2));
                let dd = [1i64, 2, 4, 7][rng.gen_range(0..4)];
                let r = w.mul(&RatMatrix::from_ints(dd, 0, 0, 1));
                Ok(AdelicMatrix::with_unit(r, &random_unit(rng, n)))
            };
            for i in 0..300 {
                let (g1, g2) = (rand_adelic(&mut rng)?, rand_adelic(&mut rng)?);
                let prod = g1.mul(&g2)?;
                let hom = prod.reduce_level(n2)? == g1.reduce_level(n2)?.mul(&g2.reduce_level(n2)?);
                let e = AdelicMatrix::identity(n);
                let inv = e.mul(&g1)?.same_coset(&g1) && g1.mul(&e)?.same_coset(&g1) && g1.inv().is_ok();
                let (a, b) = (rat(rng.gen_range(-9..=9), rng.gen_range(1..=4)), rat(rng.gen_range(1..=9), 1));
                let m = [1u64, 2, 3][rng.gen_range(0..3)];
                let rm = reciprocity_matrix(&a, &b, m)?;
                let shape_ok = adele::shape_test_rational(&rm, ShapeKind::torus(m)).is_some()
                    && rm.det() == &a * &a + BigRational::from_integer(m.into()) * &b * &b;
                let h = random_unit(&mut rng, n);
                let lam = units(n)[rng.gen_range(0..units(n).len())];
                let c = conj_by_dlambda(&h, lam)?;
                let d = LevelMatrix::d(lam, n);
                let conj_ok = d.mul(&c) == h.mul(&d) && in_gamma_tilde(&conj_by_dlambda(&LevelMatrix::identity(n), lam)?);
                if !(hom && inv && shape_ok && conj_ok) {
                    bad.push(json!({"instance": i, "hom": hom, "inv": inv, "shape": shape_ok, "conj": conj_ok}));
                }
            }
            let lifted = enumerate_sl2(n2).iter().all(|g| g.lift_sl2().is_ok());
            outcome(bad.is_empty() && lifted, 300, json!({"failures": bad, "sl2_lifts": lifted}))
        },
    )
}

// ---------------------------------------------------------------- shadows

fn single(n: u64, m: u64, r: LevelMatrix, branch: i8) -> Result<GaloisShadow> {
    GaloisShadow::new(n, vec![m], vec![r], branch)
}

fn normalizer(m: u64, n: u64) -> Vec<(i8, LevelMatrix)> {
    let mut out = Vec::new();
    for branch in [1i8, -1] {
        for det in units(n) {
            out.extend(normalizer_elements(m, n, branch, det).into_iter().map(|r| (branch, r)));
        }
    }
    out
}

fn is_torus_shape(g: &LevelMatrix, m: u64) -> bool {
    let n = g.level();
    let [a, b, c, d] = g.entries();
    a == d && b == mul_mod(n - c % n, m % n, n) % n
}

fn c6_well_defined(cfg: &SuiteConfig) -> Check {
    run("sigma-well-definedness", Some(6), || {
        let n = cfg.level.unwrap_or(5);
        let m = cfg.support_or(&[1])[0];
        gate(cfg, n, &[m], false)?;
        let els = normalizer(m, n);
        let mut bad = Vec::new();
        let mut pairs = 0u64;
        for (b1, r1) in &els {
            let s1 = single(n, m, *r1, *b1)?;
            for (b2, r2) in &els {
                let s2 = single(n, m, *r2, *b2)?;
                let oracle = is_torus_shape(&r2.mul(&r1.inv()), m);
                pairs += 1;
                if shadow_eq(&s1, &s2)? != oracle {
                    bad.push(json!({"r1": r1.entries(), "r2": r2.entries()}));
                }
            }
        }
        outcome(bad.is_empty(), pairs, json!({"level": n, "m": m, "normalizer_size": els.len(), "disagreements": bad}))
    })
}

fn c7_exact_sequence(cfg: &SuiteConfig) -> Check {
    run("exact-sequence", Some(7), || {
        let n = cfg.level.unwrap_or(5);
        let support = cfg.support_or(&[1, 2]);
        gate(cfg, n, &support, true)?;
        let shadows = enumerate_shadows(&support, n)?;
        let id = GaloisShadow::identity(n, support.clone())?;
        let delta = GaloisShadow::all_d_minus_one(n, support.clone())?;
        let mut bad = Vec::new();
        let torus = |s: &GaloisShadow| s.support().iter().zip(s.components()).all(|(&m, c)| is_torus_shape(c, m));
        let mut table: BTreeMap<String, usize> = BTreeMap::new();
        for s in &shadows {
            *table.entry(format!("branch {:+}, det {}", s.branch(), s.det())).or_default() += 1;
            if (branch_map(s) == 1) != torus(s) {
                bad.push(json!({"kernel": crate::cli::json::shadow(s)}));
            }
            if branch_map(s) == -1 && !torus(&shadow_mul(&delta.inv(), s)?) {
                bad.push(json!({"coset": crate::cli::json::shadow(s)}));
            }
            if component_action(s).value() != s.det() {
                bad.push(json!({"component_action": crate::cli::json::shadow(s)}));
            }
        }
        let mut rng = cfg.rng(7);
        let mut products = 0u64;
        for _ in 0..4000 {
            let a = &shadows[rng.gen_range(0..shadows.len())];
            let b = &shadows[rng.gen_range(0..shadows.len())];
            let ab = shadow_mul(a, b)?;
            let valid = GaloisShadow::new(n, support.clone(), ab.components().to_vec(), ab.branch()).is_ok();
            if !valid || branch_map(&ab) != branch_map(a) * branch_map(b) {
                bad.push(json!({"product_of": [crate::cli::json::shadow(a), crate::cli::json::shadow(b)]}));
            }
            products += 1;
        }
        let d2 = shadow_mul(&delta, &delta)?;
        let order_two = shadow_eq(&d2, &id)? && !shadow_eq(&delta, &id)?;
        let onto = shadows.iter().any(|s| branch_map(s) == 1) && shadows.iter().any(|s| branch_map(s) == -1);
        outcome(
            bad.is_empty() && order_two && onto,
            shadows.len() as u64 + products,
            json!({"level": n, "support": support, "shadows": shadows.len(), "order_table": table,
                   "d_minus_one_order_two": order_two, "branch_onto": onto, "failures": bad}),
        )
    })
}

fn c8_surjectivity(cfg: &SuiteConfig) -> Check {
    run("common-det-surjectivity", Some(8), || {
        let levels = match cfg.level {
            Some(n) => vec![n],
            None => vec![7, 11, 13],
        };
        let pool = cfg.support_or(&[1, 2, 3, 5]);
        let mut bad = Vec::new();
        let mut count = 0u64;
        let mut skipped = Vec::new();
        for &n in &levels {
            for mask in 1u32..1 << pool.len() {
                let support: Vec<u64> = (0..pool.len()).filter(|i| mask >> i & 1 == 1).map(|i| pool[i]).collect();
                if bad_level(n, &support).is_some() {
                    if cfg.level.is_some() {
                        gate(cfg, n, &support, true)?;
                    }
                    skipped.push(json!({"level": n, "support": support}));
                    continue;
                }
                let res = surjective_common_det(&support, n)?;
                let lambdas: BTreeSet<u64> = res.iter().map(|(l, _, _)| *l).collect();
                if lambdas != units(n).into_iter().collect() {
                    bad.push(json!({"level": n, "support": support, "missing": true}));
                }
                for (lambda, sh, wits) in &res {
                    count += 1;
                    let ok = sh.det() == *lambda
                        && wits.len() == support.len()
                        && support.iter().zip(wits).all(|(&m, &(x, y))| {
                            (mul_mod(x, x, n) + mul_mod(m % n, mul_mod(y, y, n), n)) % n == *lambda
                        })
                        && GaloisShadow::new(n, support.clone(), sh.components().to_vec(), sh.branch()).is_ok();
                    if !ok {
                        bad.push(json!({"level": n, "support": support, "lambda": lambda}));
                    }
                }
            }
        }
        outcome(bad.is_empty(), count, json!({"levels": levels, "witnesses": count, "skipped_bad_levels": skipped, "failures": bad}))
    })
}

fn equalize_check(cfg: &SuiteConfig) -> Check {
    run("determinant-equalization", None, || {
        let n = cfg.level.unwrap_or(7);
        let support = cfg.support_or(&[1, 2, 3]);
        gate(cfg, n, &support, true)?;
        let mut rng = cfg.rng(80);
        let mut bad = Vec::new();
        for i in 0..100 {
            let branch = if rng.gen_bool(0.5) { 1 } else { -1 };
            let mut inputs = Vec::new();
            for &m in &support {
                let kind = ShapeKind::new(m, branch)?;
                loop {
                    let x = rat(rng.gen_range(-6..=6), 1);
                    let y = rat(rng.gen_range(-6..=6), 1);
                    let r = shape_rational(&x, &y, kind);
                    if r.obstruction_at(n).is_none() && !r.det().is_zero() {
                        inputs.push((m, r));
                        break;
                    }
                }
            }
            match equalize_dets(&inputs, None, n) {
                Ok((sh, cert)) => {
                    if !cert.verify(&inputs) || sh.branch() != branch {
                        bad.push(json!({"instance": i}));
                    }
                }
                Err(e) if e.is_obstruction() => {}
                Err(e) => return Err(e),
            }
        }
        outcome(bad.is_empty(), 100, json!({"level": n, "support": support, "failures": bad}))
    })
}

// ---------------------------------------------------------------- tori

fn random_group(rng: &mut ChaCha8Rng, max: u64) -> AbelianGroup {
    loop {
        let k = rng.gen_range(1..=2);
        let f: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=8)).collect();
        if f.iter().product::<u64>() <= max {
            return AbelianGroup::new(f).expect("positive factors");
        }
    }
}

fn lat(n: usize, vs: &[Vec<i64>]) -> Sublattice {
    Sublattice::span_i64(n, vs).expect("lengths match")
}

fn c9_goursat_lattices(cfg: &SuiteConfig) -> Check {
    run("goursat-and-subtori", Some(9), || {
        let mut rng = cfg.rng(9);
        let mut bad = Vec::new();
        for i in 0..cfg.counts.goursat_groups {
            let a = random_group(&mut rng, 8);
            let b = random_group(&mut rng, 64 / a.order());
            let rnd = |g: &AbelianGroup, rng: &mut ChaCha8Rng| -> Elem { g.factors().iter().map(|&d| rng.gen_range(0..d)).collect() };
            let mut gens: Vec<(Elem, Elem)> = (0..rng.gen_range(1..=3)).map(|_| (rnd(&a, &mut rng), rnd(&b, &mut rng))).collect();
            for j in 0..a.factors().len() {
                let mut e = a.zero();
                e[j] = 1 % a.factors()[j];
                gens.push((e, rnd(&b, &mut rng)));
            }
            for j in 0..b.factors().len() {
                let mut e = b.zero();
                e[j] = 1 % b.factors()[j];
                gens.push((rnd(&a, &mut rng), e));
            }
            let d = goursat(&a, &b, &gens)?;
            let ab = AbelianGroup::new([a.factors().to_vec(), b.factors().to_vec()].concat())?;
            let flat: Vec<Elem> = gens.iter().map(|(x, y)| [x.clone(), y.clone()].concat()).collect();
            let order_ok = ab.generated(&flat).len() as u64 == a.order() * d.k1.len() as u64;
            if !verify_goursat(&a, &b, &d) || !order_ok {
                bad.push(json!({"instance": i, "a": a.factors(), "b": b.factors()}));
            }
        }
        // exhaustive for n ≤ 3
        for n in 1..=3usize {
            let m = SignModule::independent_signs(n);
            let mut found = BTreeSet::new();
            for code in 0..7usize.pow(n as u32) {
                let mut c = code;
                let v: Vec<i64> = (0..n)
                    .map(|_| {
                        let d = (c % 7) as i64 - 3;
                        c /= 7;
                        d
                    })
                    .collect();
                found.insert(stable_saturation(&lat(n, &[v]), &m)?);
            }
            let base: Vec<Sublattice> = found.iter().cloned().collect();
            for x in &base {
                for y in &base {
                    found.insert(stable_saturation(&x.sum(y), &m)?);
                }
            }
            if found.len() != 1 << n || found.iter().any(|l| l.coordinate_support().is_none()) || !minimal_subtorus_check(&m) {
                bad.push(json!({"exhaustive_rank": n, "found": found.len()}));
            }
        }
        let m4 = SignModule::independent_signs(4);
        let mut seen = BTreeSet::new();
        for _ in 0..cfg.counts.lattice_probes {
            let k = rng.gen_range(0..=4);
            let vs: Vec<Vec<i64>> = (0..k).map(|_| (0..4).map(|_| rng.gen_range(-4..=4)).collect()).collect();
            let c = stable_saturation(&lat(4, &vs), &m4)?;
            if c.coordinate_support().is_none() {
                bad.push(json!({"probe": c.to_string()}));
            }
            seen.insert(c);
        }
        // closure-operator laws under random sign actions
        for _ in 0..cfg.counts.closure_instances {
            let n = rng.gen_range(1..=4);
            let g = rng.gen_range(1..=3);
            let gens = (0..g).map(|_| (0..n).map(|_| if rng.gen_bool(0.5) { -1 } else { 1 }).collect()).collect();
            let m = SignModule::new(n, gens)?;
            let rl = |rng: &mut ChaCha8Rng| {
                let k = rng.gen_range(0..=n);
                let vs: Vec<Vec<i64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(-4..=4)).collect()).collect();
                lat(n, &vs)
            };
            let l = rl(&mut rng);
            let l2 = l.sum(&rl(&mut rng));
            let c = stable_saturation(&l, &m)?;
            let ok = l.is_subset_of(&c)
                && c.is_stable(&m)
                && c.is_saturated()
                && stable_saturation(&c, &m)? == c
                && c.is_subset_of(&stable_saturation(&l2, &m)?);
            if !ok {
                bad.push(json!({"closure": l.to_string()}));
            }
        }
        let dependent = SignModule::new(2, vec![vec![-1, -1]])?;
        if minimal_subtorus_check(&dependent) {
            bad.push(json!({"dependent_signs_accepted": true}));
        }
        let inst = (cfg.counts.goursat_groups + cfg.counts.lattice_probes + cfg.counts.closure_instances) as u64;
        outcome(bad.is_empty(), inst, json!({"rank4_classes": seen.len(), "failures": bad}))
    })
}

fn c10_independence(_cfg: &SuiteConfig) -> Check {
    run("independence", Some(10), || {
        let mut bad = Vec::new();
        if !independent(&[1, 2, 3])? || independent(&[1, 2, 3, 6])? {
            bad.push(json!("anchors"));
        }
        let pool = [1u64, 2, 3, 5, 6, 7, 10];
        let mut n = 0;
        for mask in 1u32..1 << pool.len() {
            if mask.count_ones() > 4 {
                continue;
            }
            let ms: Vec<u64> = (0..pool.len()).filter(|i| mask >> i & 1 == 1).map(|i| pool[i]).collect();
            // dependent iff some nonempty subset has ∏(−m_i) a square
            let squareful = (1u32..1 << ms.len()).any(|sub| {
                let chosen: Vec<u64> = (0..ms.len()).filter(|i| sub >> i & 1 == 1).map(|i| ms[i]).collect();
                let prod: u64 = chosen.iter().product();
                chosen.len().is_multiple_of(2) && prod.sqrt() * prod.sqrt() == prod
            });
            n += 1;
            if independent(&ms)? == squareful {
                bad.push(json!(ms));
            }
        }
        outcome(bad.is_empty(), n, json!({"subsets": n, "disagreements": bad}))
    })
}

// ---------------------------------------------------------------- approx

struct ShadowWorld {
    n: u64,
    shadows: Vec<GaloisShadow>,
    sample: Vec<LevelPoint>,
    images: Vec<Vec<ApproxPoint>>,
}

fn shadow_world(n: u64, support: &[u64]) -> Result<ShadowWorld> {
    let shadows = enumerate_shadows(support, n)?;
    let sample = spanning_sample(support, n)?;
    let images = shadows
        .iter()
        .map(|s| sample.iter().map(|p| Ok(ApproxPoint::new(shadow_act(s, p)?))).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(ShadowWorld { n, shadows, sample, images })
}

fn c11_relation(cfg: &SuiteConfig) -> Check {
    run("relation-R-equivalence", Some(11), || {
        let n = cfg.level.unwrap_or(5);
        let support = cfg.support_or(&[1, 2]);
        gate(cfg, n, &support, true)?;
        let w = shadow_world(n, &support)?;
        // image pools per sample point's orbit
        let mut pools: BTreeMap<u64, Vec<ApproxPoint>> = BTreeMap::new();
        for (j, p) in w.sample.iter().enumerate() {
            let pool = pools.entry(p.tau().m()).or_default();
            for row in &w.images {
                if !pool.contains(&row[j]) {
                    pool.push(row[j].clone());
                }
            }
        }
        let mut rng = cfg.rng(11);
        let mut solver = RelationSolver::new();
        let (mut pos, mut neg) = (0u64, 0u64);
        let mut bad = Vec::new();
        let mut seen = HashMap::new();
        let target = cfg.counts.relation_tuples;
        let mut k = 0usize;
        while seen.len() < target && k < 20 * target {
            k += 1;
            let i = rng.gen_range(0..w.sample.len());
            let j = rng.gen_range(0..w.sample.len());
            let (t1, t2) = if k.is_multiple_of(2) {
                let s = rng.gen_range(0..w.shadows.len());
                (w.images[s][i].clone(), w.images[s][j].clone())
            } else {
                let p1 = &pools[&w.sample[i].tau().m()];
                let p2 = &pools[&w.sample[j].tau().m()];
                (p1[rng.gen_range(0..p1.len())].clone(), p2[rng.gen_range(0..p2.len())].clone())
            };
            let key = (i, j, t1.key().clone(), t2.key().clone());
            if seen.contains_key(&key) {
                continue;
            }
            let oracle = w.images.iter().any(|row| row[i] == t1 && row[j] == t2);
            let got = solver.relation(&w.sample[i], &w.sample[j], t1.point(), t2.point())?;
            if got.is_some() != oracle {
                bad.push(json!({"s1": i, "s2": j, "oracle": oracle}));
            }
            if let Some(wit) = &got {
                // the witness moves s_i onto t_i
                let comps = [(w.sample[i].tau().m(), wit.r1), (w.sample[j].tau().m(), wit.r2)];
                for (idx, (m, r), t) in [(i, comps[0], &t1), (j, comps[1], &t2)] {
                    let sh = single(w.n, m, r, wit.branch)?;
                    if !approx_eq(&shadow_act(&sh, &w.sample[idx])?, t.point()) || r.det() != wit.lambda {
                        bad.push(json!({"bad_witness": [i, j]}));
                    }
                }
            }
            if oracle {
                pos += 1
            } else {
                neg += 1
            }
            seen.insert(key, oracle);
        }
        let distinct = seen.len() as u64;
        outcome(
            bad.is_empty() && distinct >= target as u64,
            distinct,
            json!({"level": n, "support": support, "sample": w.sample.len(), "shadows": w.shadows.len(),
                   "distinct_tuples": distinct, "related": pos, "unrelated": neg, "disagreements": bad}),
        )
    })
}

fn c11_lift(cfg: &SuiteConfig) -> Check {
    run("lift-round-trip", Some(11), || {
        let n = cfg.level.unwrap_or(5);
        let support = cfg.support_or(&[1, 2]);
        gate(cfg, n, &support, true)?;
        let shadows = enumerate_shadows(&support, n)?;
        let sample = spanning_sample(&support, n)?;
        let mut solver = RelationSolver::new();
        let mut bad = Vec::new();
        for s in &shadows {
            let table = table_of(s, &sample)?;
            let lift = lift_with(&mut solver, &table)?;
            let agrees = table.iter().all(|(p, t)| shadow_act(&lift.shadow, p).map(|x| approx_eq(&x, t)).unwrap_or(false));
            if !shadow_eq(&lift.shadow, s)? || !agrees {
                bad.push(crate::cli::json::shadow(s));
            }
        }
        outcome(bad.is_empty(), shadows.len() as u64, json!({"level": n, "support": support, "shadows": shadows.len(), "failures": bad}))
    })
}

fn c12_faithfulness(cfg: &SuiteConfig) -> Check {
    run("faithfulness", Some(12), || {
        let n = cfg.level.unwrap_or(5);
        let support = cfg.support_or(&[1]);
        gate(cfg, n, &support, true)?;
        let sample = spanning_sample(&support, n)?;
        let id = GaloisShadow::identity(n, support.clone())?;
        let shadows = enumerate_shadows(&support, n)?;
        let mut bad = Vec::new();
        let mut trivial = 0u64;
        for s in &shadows {
            let t = acts_trivially(s, &sample)?;
            trivial += t as u64;
            if !faithfulness_check(s, &sample)? || (t && !shadow_eq(s, &id)?) {
                bad.push(crate::cli::json::shadow(s));
            }
        }
        let sep = d_minus_one_separator(n, &support, &sample)?;
        let ok = bad.is_empty() && sep.is_some();
        outcome(
            ok,
            shadows.len() as u64,
            json!({"level": n, "support": support, "shadows": shadows.len(), "acting_trivially": trivial,
                   "d_minus_one_separator": sep.as_ref().map(crate::cli::json::point), "failures": bad}),
        )
    })
}

// ---------------------------------------------------------------- registry

/// Criterion `k` (1..=13) as checks; criterion 11 has two parts.
pub fn criterion(k: u8, cfg: &SuiteConfig) -> Vec<Check> {
    match k {
        1 => vec![c1_reduction(cfg)],
        2 => vec![c2_class_numbers(cfg)],
        3 => vec![c3_cornacchia(cfg)],
        4 => vec![c4_hilbert(cfg)],
        5 => vec![c5_fixed(cfg)],
        6 => vec![c6_well_defined(cfg)],
        7 => vec![c7_exact_sequence(cfg)],
        8 => vec![c8_surjectivity(cfg)],
        9 => vec![c9_goursat_lattices(cfg)],
        10 => vec![c10_independence(cfg)],
        11 => vec![c11_relation(cfg), c11_lift(cfg)],
        12 => vec![c12_faithfulness(cfg)],
        13 => vec![c13_functoriality(cfg)],
        _ => vec![],
    }
}

/// Checks of a named suite, in a fixed order.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<Vec<Check>> {
    cfg.validate()?;
    let crit = |ks: &[u8]| ks.iter().flat_map(|&k| criterion(k, cfg)).collect::<Vec<_>>();
    Ok(match name {
        "numth" => [crit(&[3, 4]), vec![numth_basics(cfg)]].concat(),
        "qforms" => crit(&[1, 2]),
        "points" => [crit(&[13]), vec![points_invariants(cfg), adelic_arithmetic(cfg)]].concat(),
        "fixedpoints" => crit(&[5]),
        "shadows" => [crit(&[6, 8]), vec![equalize_check(cfg)]].concat(),
        "exactseq" => crit(&[7]),
        "lattices" => crit(&[9, 10]),
        "relationR" => vec![c11_relation(cfg)],
        "lift" => vec![c11_lift(cfg), c12_faithfulness(cfg)],
        "all" => {
            // suites run concurrently; assembly follows SUITES order
            let parts: Vec<Result<Vec<Check>>> = std::thread::scope(|scope| {
                let handles: Vec<_> = SUITES
                    .iter()
                    .filter(|&&s| s != "all")
                    .map(|s| scope.spawn(move || run_suite(s, cfg)))
                    .collect();
                handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
            });
            parts.into_iter().collect::<Result<Vec<_>>>()?.concat()
        }
        other => return Err(Error::invalid(format!("unknown suite {other:?}; expected one of {SUITES:?}"))),
    })
}

/// Every operation exercised by some check.
pub fn exercised_ops() -> BTreeSet<&'static str> {
    CHECK_OPS.iter().flat_map(|(_, ops)| ops.iter().copied()).collect()
}
