//! Points `[τ, a]` of the level-`N` model, their exact equality, component
//! labels, the left (rational) and right (unit) actions, fixed points, and
//! Hecke orbits.
//!
//! Equality is decided by moving the rational part of `a` into the ℍ
//! coordinate, reducing the resulting quadratic form, and comparing the
//! leftover unit parts up to the automorphs of the reduced form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::adele::{AdelicMatrix, LevelMatrix, RatMatrix};
use crate::error::{Error, Result};
use crate::numth::{self, Residue};
use crate::qforms::{self, automorphs, form_of, reduce, QuadForm, UnimodularMap};

pub use crate::qforms::QuadPoint;

/// `[τ, a]` modulo `GL2(ℚ)` on the left and `K(N)` on the right.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelPoint {
    tau: QuadPoint,
    a: AdelicMatrix,
}

impl LevelPoint {
    /// The rational part of `a` must be invertible at every prime of the level.
    pub fn new(tau: QuadPoint, a: AdelicMatrix) -> Result<Self> {
        if let Some(p) = a.r().obstruction_at(a.level()) {
            return Err(Error::PrecisionObstruction(p));
        }
        Ok(LevelPoint { tau, a })
    }

    /// `[τ, u]` with `u` a unit given mod N.
    pub fn with_unit(tau: QuadPoint, u: &LevelMatrix) -> Self {
        LevelPoint { tau, a: AdelicMatrix::from_unit(u) }
    }

    /// `[τ, 1]`.
    pub fn base(tau: QuadPoint, level: u64) -> Self {
        LevelPoint { tau, a: AdelicMatrix::identity(level) }
    }

    pub fn tau(&self) -> &QuadPoint {
        &self.tau
    }

    pub fn a(&self) -> &AdelicMatrix {
        &self.a
    }

    pub fn level(&self) -> u64 {
        self.a.level()
    }

    /// `ū = d̄_δ·s̄` mod N.
    pub fn unit(&self) -> LevelMatrix {
        self.a.unit_level()
    }

    fn replace_unit(&self, u: &LevelMatrix) -> LevelPoint {
        LevelPoint { tau: self.tau.clone(), a: AdelicMatrix::with_unit(self.a.r().clone(), u) }
    }
}

impl std::fmt::Display for LevelPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.tau, self.a)
    }
}

/// A point rewritten as `[root(g), w]` with `g` reduced and trivial rational part.
#[derive(Debug, Clone)]
pub struct Normalized {
    /// Reduced form of the ℍ coordinate.
    pub form: QuadForm,
    /// Unit part after normalization.
    pub w: LevelMatrix,
    /// `γ` with `root(form) = γ·σ`, σ the ℍ coordinate after removing `r`.
    pub gamma: UnimodularMap,
    /// Whether `r` had negative determinant (σ was conjugated back to ℍ).
    pub flipped: bool,
}

fn flip_matrix(n: u64) -> LevelMatrix {
    LevelMatrix::new([-1, 0, 0, 1], n).expect("unit")
}

/// `[τ, r·u] ~ [σ, u]` with `σ = r⁻¹τ`, then `γ` reduces `form_of(σ)`.
pub fn normalize(p: &LevelPoint) -> Normalized {
    let n = p.level();
    let rinv = p.a.r().inv().expect("invertible rational part");
    let (re, im) = p.tau.mobius_raw(rinv.entries());
    let mut u = p.unit();
    let flipped = im.is_negative();
    let sigma = if flipped {
        u = flip_matrix(n).mul(&u);
        QuadPoint::new(p.tau.m(), -re, -im)
    } else {
        QuadPoint::new(p.tau.m(), re, im)
    }
    .expect("image lies in the upper half-plane");
    let (form, gamma) = reduce(&form_of(&sigma));
    let w = LevelMatrix::from_unimodular(&gamma, n).mul(&u);
    Normalized { form, w, gamma, flipped }
}

/// Canonical key of a point's class: reduced form and the least unit part in
/// the orbit of the form's automorphs. Equal keys iff `point_eq`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    pub form: (BigInt, BigInt, BigInt),
    pub unit: LevelMatrix,
}

pub fn canonical_key(p: &LevelPoint) -> CanonicalKey {
    let nz = normalize(p);
    let n = p.level();
    let unit = automorphs(&nz.form)
        .iter()
        .map(|a| LevelMatrix::from_unimodular(a, n).mul(&nz.w))
        .min()
        .expect("automorphs contain the identity");
    let (a, b, c) = nz.form.coeffs();
    CanonicalKey { form: (a.clone(), b.clone(), c.clone()), unit }
}

/// The canonical representative `[root(g), w_min]` of a point's class.
pub fn canonical_point(p: &LevelPoint) -> LevelPoint {
    let key = canonical_key(p);
    let form = QuadForm::new(key.form.0, key.form.1, key.form.2).expect("reduced form");
    LevelPoint::with_unit(form.root(), &key.unit)
}

/// Certificate for `[τ1, a1] = [τ2, a2]`: `q·τ1 = τ2`, `det q > 0`, and
/// `m = r2⁻¹·q·r1` integral unimodular with `m ≡ ū2·ū1⁻¹ mod N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointEqWitness {
    pub q: RatMatrix,
    pub m: RatMatrix,
    /// The automorph of the common reduced form that realizes the congruence.
    pub automorph: UnimodularMap,
}

/// Exact equality of level-`N` points, with a witness when equal.
pub fn point_eq(p1: &LevelPoint, p2: &LevelPoint) -> Result<Option<PointEqWitness>> {
    if p1.level() != p2.level() {
        return Err(Error::invalid("points at different levels"));
    }
    let n = p1.level();
    let (n1, n2) = (normalize(p1), normalize(p2));
    if n1.form != n2.form {
        return Ok(None);
    }
    let target = n2.w.mul(&n1.w.inv());
    let Some(aut) = automorphs(&n1.form).into_iter().find(|a| LevelMatrix::from_unimodular(a, n) == target)
    else {
        return Ok(None);
    };
    // M·σ1' = σ2' with M = γ2⁻¹·A·γ1; undo the flips and rational parts.
    let mm = RatMatrix::from_unimodular(&n2.gamma.inv().mul(&aut).mul(&n1.gamma));
    let e = RatMatrix::from_ints(-1, 0, 0, 1);
    let e1 = if n1.flipped { e.clone() } else { RatMatrix::identity() };
    let e2 = if n2.flipped { e } else { RatMatrix::identity() };
    let m = e2.mul(&mm).mul(&e1);
    let q = p2.a.r().mul(&m).mul(&p1.a.r().inv().expect("invertible"));
    Ok(Some(PointEqWitness { q, m, automorph: aut }))
}

/// Independent check of a [`PointEqWitness`].
pub fn verify_witness(p1: &LevelPoint, p2: &LevelPoint, w: &PointEqWitness) -> bool {
    if w.q.det() <= BigRational::zero() {
        return false;
    }
    let (re, im) = p1.tau.mobius_raw(w.q.entries());
    if p2.tau.m() != p1.tau.m() || &re != p2.tau.p() || &im != p2.tau.q() {
        return false;
    }
    let Some(r2inv) = p2.a.r().inv() else { return false };
    let m = r2inv.mul(&w.q).mul(p1.a.r());
    if m != w.m || !m.is_integral() || !m.det().abs().is_one() {
        return false;
    }
    let n = p1.level();
    let Ok(mb) = m.to_level(n) else { return false };
    p2.unit().inv().mul(&mb).mul(&p1.unit()).is_identity()
}

/// Component label `μ = sign(det r)·det ū mod N`.
///
/// The positive rational `|det r|` is absorbed by `ℚ₊`; the sign survives
/// because the left action is by `GL2(ℚ)⁺` on ℍ.
pub fn component(p: &LevelPoint) -> Residue {
    let n = p.level();
    let sign = if p.a.r().det().is_negative() { -1 } else { 1 };
    Residue::new(sign * p.unit().det() as i64, n)
}

/// Right action `[τ, a] ↦ [τ, a·g⁻¹]`.
pub fn act_unit(g: &LevelMatrix, p: &LevelPoint) -> Result<LevelPoint> {
    if g.level() != p.level() {
        return Err(Error::invalid("level mismatch"));
    }
    Ok(p.replace_unit(&p.unit().mul(&g.inv())))
}

/// Renormalization by `γ ∈ SL2(ℤ)` on the left: `[γτ, γa]`, the same point.
pub fn act_rational(gamma: &UnimodularMap, p: &LevelPoint) -> LevelPoint {
    let tau = p.tau.act(gamma);
    let r = p.a.r();
    let gr = RatMatrix::from_unimodular(gamma);
    let c = r.inv().expect("invertible").mul(&gr).mul(r);
    if let Some(cu) = c.to_unimodular() {
        // r⁻¹γr is a unit everywhere, so it moves into the unit part
        let n = p.level();
        let u = LevelMatrix::from_unimodular(&cu, n).mul(&p.unit());
        return LevelPoint { tau, a: AdelicMatrix::with_unit(r.clone(), &u) };
    }
    let a = AdelicMatrix::new(gr.mul(r), p.a.delta(), p.a.s().clone(), p.level()).expect("invertible");
    LevelPoint { tau, a }
}

/// Left action by any `q ∈ GL2(ℚ)⁺`: `[qτ, q·a]`, the same point.
pub fn act_left(q: &RatMatrix, p: &LevelPoint) -> Result<LevelPoint> {
    if q.det() <= BigRational::zero() {
        return Err(Error::invalid("left action needs positive determinant"));
    }
    let tau = p.tau.mobius(q.entries())?;
    let r = q.mul(p.a.r());
    let a = AdelicMatrix::new(r, p.a.delta(), p.a.s().clone(), p.level())?;
    LevelPoint::new(tau, a)
}

/// Witness `(s, u)` mod N for `is_fixed`: with `(A, B, C)` the reduced form of
/// the normalized point, `w·ḡ·w⁻¹ = (s, −Cu; Au, s + Bu)`.
pub fn fixed_witness(g: &LevelMatrix, p: &LevelPoint) -> Result<Option<(u64, u64)>> {
    if g.level() != p.level() {
        return Err(Error::invalid("level mismatch"));
    }
    let n = p.level();
    let nz = normalize(p);
    let x = nz.w.mul(g).mul(&nz.w.inv());
    let [x11, x12, x21, x22] = x.entries();
    let (a, b, c) = nz.form.coeffs();
    let (a, b, c) = (numth::reduce_big(a, n), numth::reduce_big(b, n), numth::reduce_big(c, n));
    let diff = (x22 + n - x11) % n;
    let neg_c = (n - c) % n;
    for u in 0..n {
        if numth::mul_mod(a, u, n) == x21 && numth::mul_mod(neg_c, u, n) == x12 && numth::mul_mod(b, u, n) == diff {
            return Ok(Some((x11, u)));
        }
    }
    Ok(None)
}

/// Whether `g` fixes `P` at level N: the image of the rational stabilizer of the
/// normalized ℍ coordinate, which by weak approximation is every unit of the
/// local order `{(s, −Cu; Au, s + Bu)}` mod N, contains `w·ḡ·w⁻¹`.
pub fn is_fixed(g: &LevelMatrix, p: &LevelPoint) -> Result<bool> {
    Ok(fixed_witness(g, p)?.is_some())
}

/// Every point here has quadratic ℍ coordinate, hence is special.
pub fn is_cm(_p: &LevelPoint) -> bool {
    true
}

/// `τ = r·√−n` with `r = (q p; 0 1)`.
pub fn orbit_rep(tau: &QuadPoint) -> (u64, RatMatrix) {
    let (p, q) = (tau.p().clone(), tau.q().clone());
    (tau.m(), RatMatrix::new([q, p, BigRational::zero(), BigRational::one()]))
}

/// Same Hecke orbit iff same square-free part.
pub fn same_orbit(t1: &QuadPoint, t2: &QuadPoint) -> bool {
    t1.m() == t2.m()
}

/// Image under `S_{K(N)} → S_{K(N′)}` for `N′ | N`.
pub fn project(p: &LevelPoint, n2: u64) -> Result<LevelPoint> {
    let u = p.unit().reduce_to(n2)?;
    Ok(LevelPoint { tau: p.tau.clone(), a: AdelicMatrix::with_unit(p.a.r().clone(), &u) })
}

/// Number of distinct points `[root(f), u]` over reduced forms `f` of
/// discriminant `disc` and units `u` in `units` (all of `GL2(ℤ/N)` if empty).
pub fn count_cm_points(disc: i64, level: u64) -> Result<usize> {
    let forms = qforms::reduced_forms(disc)?;
    let units = crate::adele::enumerate_gl2(level);
    let mut keys = std::collections::BTreeSet::new();
    for f in &forms {
        for u in &units {
            keys.insert(canonical_key(&LevelPoint::with_unit(f.root(), u)));
        }
    }
    Ok(keys.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adele::{enumerate_gl2, enumerate_sl2, units};
    use crate::numth::rat;
    use proptest::prelude::*;
    use rand::{seq::SliceRandom, Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lm(e: [i64; 4], n: u64) -> LevelMatrix {
        LevelMatrix::new(e, n).unwrap()
    }

    fn qp(m: u64, p: (i64, i64), q: (i64, i64)) -> QuadPoint {
        QuadPoint::from_ints(m, p, q).unwrap()
    }

    fn eq(p1: &LevelPoint, p2: &LevelPoint) -> bool {
        point_eq(p1, p2).unwrap().is_some()
    }

    #[test]
    fn point_eq_examples() {
        let i = qp(1, (0, 1), (1, 1));
        let p1 = LevelPoint::base(i.clone(), 5);
        let p2 = LevelPoint::with_unit(qp(1, (1, 1), (1, 1)), &lm([1, 1, 0, 1], 5));
        let w = point_eq(&p1, &p2).unwrap().unwrap();
        assert_eq!(w.m, RatMatrix::from_ints(1, 1, 0, 1));
        assert!(verify_witness(&p1, &p2, &w));
        let p3 = LevelPoint::with_unit(i, &LevelMatrix::d(2, 5));
        assert!(!eq(&p1, &p3));
        // √−5 (form (1,0,5)) against a point of form class (2,2,3)
        let s5 = LevelPoint::base(QuadPoint::sqrt_neg(5).unwrap(), 1);
        let other = LevelPoint::base(qp(5, (-2, 3), (1, 3)), 1);
        assert_eq!(form_of(other.tau()), QuadForm::from_i64(3, 4, 3).unwrap());
        assert!(!eq(&s5, &other));
    }

    #[test]
    fn act_unit_examples() {
        let p = LevelPoint::with_unit(QuadPoint::sqrt_neg(2).unwrap(), &lm([2, 1, 1, 1], 7));
        assert_eq!(act_unit(&LevelMatrix::identity(7), &p).unwrap(), p);
        let q = act_unit(&LevelMatrix::d(3, 7), &p).unwrap();
        assert_eq!(q.unit(), p.unit().mul(&LevelMatrix::d(5, 7)));
        assert_eq!(component(&q).value(), component(&p).mul(&Residue::new(5, 7)).value());
        let q = act_unit(&lm([1, 7, 14, 1], 7), &p).unwrap();
        assert!(eq(&q, &p));
    }

    #[test]
    fn act_rational_examples() {
        let p = LevelPoint::base(QuadPoint::sqrt_neg(1).unwrap(), 5);
        assert_eq!(act_rational(&UnimodularMap::identity(), &p), p);
        let t = UnimodularMap::from_i64(1, 1, 0, 1).unwrap();
        let q = act_rational(&t, &p);
        assert_eq!(q.tau(), &qp(1, (1, 1), (1, 1)));
        assert_eq!(q.unit(), lm([1, 1, 0, 1], 5));
        assert!(eq(&q, &p));
        let s = UnimodularMap::inversion();
        let q = act_rational(&s, &p);
        assert_eq!(q.tau(), p.tau());
        assert_eq!(q.unit(), LevelMatrix::from_unimodular(&s, 5));
        assert!(eq(&q, &p));
        // rational part that does not commute with γ
        let r = AdelicMatrix::from_rational(RatMatrix::from_ints(2, 0, 0, 1), 5).unwrap();
        let p = LevelPoint::new(qp(1, (0, 1), (2, 1)), r).unwrap();
        let q = act_rational(&t, &p);
        assert!(eq(&q, &p));
    }

    #[test]
    fn component_examples() {
        let p = LevelPoint::base(QuadPoint::sqrt_neg(3).unwrap(), 7);
        assert_eq!(component(&p).value(), 1);
        let p = LevelPoint::with_unit(QuadPoint::sqrt_neg(3).unwrap(), &LevelMatrix::d(3, 7));
        assert_eq!(component(&p).value(), 3);
        let g = UnimodularMap::from_i64(2, 1, 1, 1).unwrap();
        assert_eq!(component(&act_rational(&g, &p)), component(&p));
    }

    #[test]
    fn is_fixed_examples() {
        let p = LevelPoint::base(QuadPoint::sqrt_neg(1).unwrap(), 5);
        let s = lm([0, -1, 1, 0], 5);
        assert!(is_fixed(&s, &p).unwrap());
        assert!(!is_fixed(&lm([1, 1, 0, 1], 5), &p).unwrap());
        let u = lm([2, 1, 1, 1], 5);
        let pu = LevelPoint::with_unit(QuadPoint::sqrt_neg(1).unwrap(), &u);
        assert!(is_fixed(&u.inv().mul(&s).mul(&u), &pu).unwrap());
        assert!(is_cm(&p));
    }

    #[test]
    fn orbit_examples() {
        let (n, r) = orbit_rep(&qp(5, (1, 1), (2, 1)));
        assert_eq!((n, r), (5, RatMatrix::from_ints(2, 1, 0, 1)));
        let (n, r) = orbit_rep(&QuadPoint::sqrt_neg(3).unwrap());
        assert_eq!((n, r.is_identity()), (3, true));
        let tau = qp(1, (1, 2), (3, 4));
        let (n, r) = orbit_rep(&tau);
        assert_eq!(n, 1);
        assert_eq!(r, RatMatrix::from_fracs([(3, 4), (1, 2), (0, 1), (1, 1)]));
        assert_eq!(QuadPoint::sqrt_neg(1).unwrap().mobius(r.entries()).unwrap(), tau);
        assert!(same_orbit(&QuadPoint::sqrt_neg(5).unwrap(), &qp(5, (1, 1), (2, 1))));
        assert!(!same_orbit(&QuadPoint::sqrt_neg(1).unwrap(), &QuadPoint::sqrt_neg(2).unwrap()));
    }

    #[test]
    fn project_examples() {
        let p = LevelPoint::with_unit(QuadPoint::sqrt_neg(2).unwrap(), &lm([7, 3, 2, 1], 15));
        let q = project(&p, 5).unwrap();
        assert_eq!(q.unit(), lm([2, 3, 2, 1], 5));
        assert_eq!(project(&p, 15).unwrap(), p);
        let g = lm([4, 1, 3, 1], 15);
        assert_eq!(
            project(&act_unit(&g, &p).unwrap(), 5).unwrap(),
            act_unit(&g.reduce_to(5).unwrap(), &q).unwrap()
        );
    }

    #[test]
    fn class_number_point_counts() {
        for (d, h) in [(-3, 1), (-4, 1), (-20, 2), (-23, 3), (-56, 4), (-71, 7)] {
            assert_eq!(count_cm_points(d, 1).unwrap(), h);
        }
    }

    // --- random points with non-trivial rational parts

    fn random_point(n: u64, rng: &mut ChaCha8Rng) -> LevelPoint {
        let m = *[1u64, 2, 3, 5, 6, 7].choose(rng).unwrap();
        let tau = qp(m, (rng.gen_range(-6..=6), rng.gen_range(1..=4)), (rng.gen_range(1..=6), rng.gen_range(1..=4)));
        loop {
            let mut fr = || (rng.gen_range(-4i64..=4), rng.gen_range(1i64..=3));
            let r = RatMatrix::from_fracs([fr(), fr(), fr(), fr()]);
            if r.det().is_zero() || r.obstruction_at(n).is_some() {
                continue;
            }
            let gl = enumerate_gl2(n);
            let u = *gl.choose(rng).unwrap();
            return LevelPoint::new(tau.clone(), AdelicMatrix::with_unit(r, &u)).unwrap();
        }
    }

    fn random_sl2z(rng: &mut ChaCha8Rng) -> UnimodularMap {
        random_word(rng, 5, 3)
    }

    fn random_word(rng: &mut ChaCha8Rng, len: usize, kmax: i64) -> UnimodularMap {
        let mut g = UnimodularMap::identity();
        for _ in 0..rng.gen_range(0..len) {
            let k = rng.gen_range(-kmax..=kmax);
            g = g.mul(&UnimodularMap::translation(BigInt::from(k))).mul(&UnimodularMap::inversion());
        }
        g
    }

    /// A point equal to `p` by construction: left-translate by a random
    /// `q ∈ GL2(ℚ)⁺` and right-multiply by an element of `K(N)`.
    fn random_equal(p: &LevelPoint, rng: &mut ChaCha8Rng) -> LevelPoint {
        let n = p.level();
        let q = loop {
            let mut fr = || (rng.gen_range(-4i64..=4), rng.gen_range(1i64..=3));
            let q = RatMatrix::from_fracs([fr(), fr(), fr(), fr()]);
            if q.det() > BigRational::zero() && q.mul(p.a().r()).obstruction_at(n).is_none() {
                break q;
            }
        };
        let moved = act_left(&q, p).unwrap();
        // right multiplication by k ∈ Γ(N) only changes the integral lift
        let k = UnimodularMap::from_i64(1, n as i64, 0, 1)
            .unwrap()
            .mul(&UnimodularMap::from_i64(1, 0, n as i64 * rng.gen_range(-2i64..=2), 1).unwrap());
        let a = moved.a();
        let moved = LevelPoint::new(
            moved.tau().clone(),
            AdelicMatrix::new(a.r().clone(), a.delta(), a.s().mul(&k), n).unwrap(),
        )
        .unwrap();
        act_rational(&random_sl2z(rng), &moved)
    }

    #[test]
    fn point_eq_is_an_equivalence_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in [1u64, 5, 7, 12] {
            let mut pts = Vec::new();
            for _ in 0..1000 {
                let p = random_point(n, &mut rng);
                let q = random_equal(&p, &mut rng);
                let w = point_eq(&p, &q).unwrap().expect("constructed equal");
                assert!(verify_witness(&p, &q, &w));
                let w = point_eq(&q, &p).unwrap().expect("symmetric");
                assert!(verify_witness(&q, &p, &w));
                assert!(eq(&p, &p));
                let r = random_equal(&q, &mut rng);
                assert!(eq(&p, &r), "transitive");
                assert_eq!(canonical_key(&p), canonical_key(&r));
                assert_eq!(component(&p), component(&r));
                pts.push(p);
            }
            for w in pts.windows(2) {
                let same = eq(&w[0], &w[1]);
                assert_eq!(same, canonical_key(&w[0]) == canonical_key(&w[1]));
                if let Some(wit) = point_eq(&w[0], &w[1]).unwrap() {
                    assert!(verify_witness(&w[0], &w[1], &wit));
                }
            }
        }
    }

    /// All M ∈ GL2(ℤ) with |entries| ≤ bound, det ±1, f2∘M = f1 (as integer forms).
    fn brute_equivalences(f1: (i64, i64, i64), f2: (i64, i64, i64), bound: i64) -> Vec<[i64; 4]> {
        let ev = |f: (i64, i64, i64), x: i64, y: i64| f.0 * x * x + f.1 * x * y + f.2 * y * y;
        let mut out = Vec::new();
        for a in -bound..=bound {
            for c in -bound..=bound {
                if ev(f2, a, c) != f1.0 {
                    continue;
                }
                for b in -bound..=bound {
                    for det in [1i64, -1] {
                        // a d − b c = det
                        let num = det + b * c;
                        let d = if a != 0 {
                            if num % a != 0 {
                                continue;
                            }
                            num / a
                        } else {
                            continue;
                        };
                        if d.abs() > bound {
                            continue;
                        }
                        if ev(f2, b, d) == f1.2 && 2 * f2.0 * a * b + f2.1 * (a * d + b * c) + 2 * f2.2 * c * d == f1.1 {
                            out.push([a, b, c, d]);
                        }
                    }
                }
                // a = 0: then b c = −det, d free
                if a == 0 {
                    for det in [1i64, -1] {
                        for b in [-1i64, 1] {
                            if b * c != -det {
                                continue;
                            }
                            for d in -bound..=bound {
                                if ev(f2, b, d) == f1.2
                                    && 2 * f2.0 * a * b + f2.1 * (a * d + b * c) + 2 * f2.2 * c * d == f1.1
                                {
                                    out.push([a, b, c, d]);
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Oracle: points `[σ1, u1]`, `[σ2, u2]` (trivial rational part, σ in ℍ) are
    /// equal iff some `M ∈ SL2(ℤ)` maps σ1 to σ2 with `M ≡ u2·u1⁻¹`.
    fn oracle_eq(s1: &QuadPoint, u1: &LevelMatrix, s2: &QuadPoint, u2: &LevelMatrix) -> bool {
        if s1.m() != s2.m() {
            return false;
        }
        let f1 = form_of(s1).to_i64();
        let f2 = form_of(s2).to_i64();
        if f1.1 * f1.1 - 4 * f1.0 * f1.2 != f2.1 * f2.1 - 4 * f2.0 * f2.2 {
            return false;
        }
        let n = u1.level();
        let target = u2.mul(&u1.inv());
        // M·σ1 = σ2 ⇔ f1 = f2∘M (primitive forms, root maps to root)
        brute_equivalences(f1, f2, 50).into_iter().any(|e| {
            let det = e[0] * e[3] - e[1] * e[2];
            det == 1 && LevelMatrix::new(e, n).unwrap() == target
        })
    }

    #[test]
    fn point_eq_matches_bounded_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let discs: Vec<i64> = (3..=40).filter(|d| d % 4 == 0 || d % 4 == 3).map(|d| -d).collect();
        let mut agree_true = 0;
        for n in [1u64, 2, 3, 5, 7] {
            let gl = enumerate_gl2(n);
            for &d in &discs {
                let forms = qforms::reduced_forms(d).unwrap();
                for _ in 0..4 {
                    let f1 = forms.choose(&mut rng).unwrap();
                    let f2 = forms.choose(&mut rng).unwrap();
                    let g1 = random_word(&mut rng, 3, 2);
                    let g2 = random_word(&mut rng, 3, 2);
                    let s1 = f1.root().act(&g1);
                    let s2 = f2.root().act(&g2);
                    let u1 = *gl.choose(&mut rng).unwrap();
                    // half the time pick u2 so that the points coincide
                    let u2 = if rng.gen_bool(0.5) {
                        LevelMatrix::from_unimodular(&g2.mul(&g1.inv()), n).mul(&u1)
                    } else {
                        *gl.choose(&mut rng).unwrap()
                    };
                    let p1 = LevelPoint::with_unit(s1.clone(), &u1);
                    let p2 = LevelPoint::with_unit(s2.clone(), &u2);
                    let fast = eq(&p1, &p2);
                    assert_eq!(fast, oracle_eq(&s1, &u1, &s2, &u2), "{p1} vs {p2}");
                    agree_true += fast as usize;
                }
            }
        }
        assert!(agree_true > 50);
    }

    #[test]
    fn scalars_pm_one_act_trivially() {
        for n in 1..=12u64 {
            let sample = enumerate_sl2(n);
            for tau in [QuadPoint::sqrt_neg(1).unwrap(), QuadPoint::sqrt_neg(2).unwrap(), qp(3, (1, 2), (1, 2))] {
                for u in sample.iter().step_by(7) {
                    let p = LevelPoint::with_unit(tau.clone(), u);
                    for lambda in [1 % n, (n - 1) % n] {
                        assert!(eq(&act_unit(&LevelMatrix::scalar(lambda, n), &p).unwrap(), &p));
                    }
                }
            }
        }
    }

    #[test]
    fn non_sign_scalars_move_the_component() {
        for n in [5u64, 7, 8, 12] {
            let p = LevelPoint::base(QuadPoint::sqrt_neg(1).unwrap(), n);
            for lambda in units(n) {
                let q = act_unit(&LevelMatrix::scalar(lambda, n), &p).unwrap();
                let trivial = lambda == 1 % n || lambda == n - 1;
                assert_eq!(eq(&q, &p), trivial, "n={n} λ={lambda}");
            }
        }
    }

    #[test]
    fn fixed_point_covariance_and_component_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [5u64, 7, 12] {
            let gl = enumerate_gl2(n);
            for _ in 0..300 {
                let p = random_point(n, &mut rng);
                let g = *gl.choose(&mut rng).unwrap();
                let u = *gl.choose(&mut rng).unwrap();
                let lhs = is_fixed(&g, &p).unwrap();
                let moved = act_unit(&u.inv(), &p).unwrap();
                let rhs = is_fixed(&u.inv().mul(&g).mul(&u), &moved).unwrap();
                assert_eq!(lhs, rhs);
                // exact fixed points are shadow-fixed
                let gp = act_unit(&g, &p).unwrap();
                if eq(&gp, &p) {
                    assert!(lhs);
                }
                let mu = component(&p);
                let expect = mu.mul(&Residue::new(g.det() as i64, n).inv().unwrap());
                assert_eq!(component(&gp), expect);
            }
        }
    }

    proptest! {
        #[test]
        fn orbit_rep_maps_sqrt(m in prop::sample::select(vec![1u64, 2, 3, 5, 6, 7, 10]),
                               pn in -20i64..20, pd in 1i64..10, qn in 1i64..20, qd in 1i64..10) {
            let tau = qp(m, (pn, pd), (qn, qd));
            let (n, r) = orbit_rep(&tau);
            prop_assert_eq!(n, m);
            prop_assert_eq!(QuadPoint::sqrt_neg(n).unwrap().mobius(r.entries()).unwrap(), tau);
        }

        #[test]
        fn act_rational_preserves_point(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = [1u64, 4, 5, 6][seed as usize % 4];
            let p = random_point(n, &mut rng);
            let g = random_sl2z(&mut rng);
            let q = act_rational(&g, &p);
            prop_assert!(eq(&p, &q));
            prop_assert_eq!(component(&p), component(&q));
        }
    }

    #[test]
    fn rational_left_action_keeps_determinant_sign() {
        let p = LevelPoint::base(QuadPoint::sqrt_neg(1).unwrap(), 5);
        assert!(act_left(&RatMatrix::from_ints(-1, 0, 0, 1), &p).is_err());
        let q = act_left(&RatMatrix::from_ints(-1, 0, 0, -1), &p).unwrap();
        assert!(eq(&p, &q));
        let r = RatMatrix::new([rat(-1, 1), rat(0, 1), rat(0, 1), rat(1, 1)]);
        let neg = LevelPoint::new(qp(1, (0, 1), (1, 1)), AdelicMatrix::from_rational(r, 5).unwrap()).unwrap();
        // [i, e] with e = diag(−1, 1) rational: the sign of det e survives
        assert_eq!(component(&neg).value(), 4);
        let i = QuadPoint::sqrt_neg(1).unwrap();
        assert!(!eq(&neg, &LevelPoint::base(i.clone(), 5)));
        assert!(eq(&neg, &LevelPoint::with_unit(i, &lm([-1, 0, 0, 1], 5))));
    }
}
