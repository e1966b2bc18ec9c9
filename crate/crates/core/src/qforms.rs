//! Positive-definite binary quadratic forms, quadratic points of the upper
//! half-plane, Gauss reduction, automorphs, class enumeration, Cornacchia and
//! the rational norm-equation solver.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numth::{self, hilbert_symbol, is_square, Place};

/// Largest |disc| accepted by [`QuadForm::new`].
pub const MAX_ABS_DISC: u64 = 100_000_000;

/// τ = p + q·√(−m) with q > 0 and m square-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadPoint {
    m: u64,
    p: BigRational,
    q: BigRational,
}

impl QuadPoint {
    pub fn new(m: u64, p: BigRational, q: BigRational) -> Result<Self> {
        if !numth::is_squarefree_u64(m) {
            return Err(Error::invalid(format!("m = {m} is not square-free and positive")));
        }
        if !q.is_positive() {
            return Err(Error::invalid("imaginary coefficient q must be positive"));
        }
        Ok(QuadPoint { m, p, q })
    }

    /// √(−m).
    pub fn sqrt_neg(m: u64) -> Result<Self> {
        Self::new(m, BigRational::zero(), BigRational::one())
    }

    /// Convenience constructor from small integer fractions.
    pub fn from_ints(m: u64, p: (i64, i64), q: (i64, i64)) -> Result<Self> {
        if p.1 == 0 || q.1 == 0 {
            return Err(Error::invalid("zero denominator"));
        }
        Self::new(m, numth::rat(p.0, p.1), numth::rat(q.0, q.1))
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn p(&self) -> &BigRational {
        &self.p
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    /// Möbius image under a rational matrix `(a b; c d)`. The imaginary
    /// coefficient of the result has the sign of the determinant.
    pub fn mobius_raw(&self, e: &[BigRational; 4]) -> (BigRational, BigRational) {
        let [a, b, c, d] = e;
        let m = BigRational::from_integer(BigInt::from(self.m));
        let cr = c * &self.p + d;
        let ci = c * &self.q;
        let norm = &cr * &cr + &m * &ci * &ci;
        let nr = a * &self.p + b;
        let real = (&nr * &cr + a * &self.q * &ci * &m) / &norm;
        let det = a * d - b * c;
        let imag = &self.q * det / norm;
        (real, imag)
    }

    /// Möbius image under a matrix of positive determinant.
    pub fn mobius(&self, e: &[BigRational; 4]) -> Result<QuadPoint> {
        let (p, q) = self.mobius_raw(e);
        QuadPoint::new(self.m, p, q)
    }

    /// Image under an integral matrix of determinant one.
    pub fn act(&self, g: &UnimodularMap) -> QuadPoint {
        self.mobius(&g.to_rational()).expect("SL2(Z) preserves the upper half-plane")
    }

    /// Negated real part: the image of the lower-half-plane conjugate under z ↦ −z.
    pub fn reflect(&self) -> QuadPoint {
        QuadPoint { m: self.m, p: -self.p.clone(), q: self.q.clone() }
    }

    /// `Re(τ)` and `|τ|²`, exactly.
    pub fn re_and_abs2(&self) -> (BigRational, BigRational) {
        let m = BigRational::from_integer(BigInt::from(self.m));
        (self.p.clone(), &self.p * &self.p + &m * &self.q * &self.q)
    }
}

impl std::fmt::Display for QuadPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} + {}*sqrt(-{})", self.p, self.q, self.m)
    }
}

/// Integral 2×2 matrix of determinant one, row-major `(a b; c d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnimodularMap {
    e: [BigInt; 4],
}

impl UnimodularMap {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        if &a * &d - &b * &c != BigInt::one() {
            return Err(Error::invalid("unimodular map must have determinant 1"));
        }
        Ok(UnimodularMap { e: [a, b, c, d] })
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        UnimodularMap { e: [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()] }
    }

    /// `(1 k; 0 1)`.
    pub fn translation(k: BigInt) -> Self {
        UnimodularMap { e: [BigInt::one(), k, BigInt::zero(), BigInt::one()] }
    }

    /// `(0 −1; 1 0)`.
    pub fn inversion() -> Self {
        UnimodularMap { e: [BigInt::zero(), -BigInt::one(), BigInt::one(), BigInt::zero()] }
    }

    pub fn entries(&self) -> &[BigInt; 4] {
        &self.e
    }

    pub fn mul(&self, o: &UnimodularMap) -> UnimodularMap {
        let [a, b, c, d] = &self.e;
        let [e, f, g, h] = &o.e;
        UnimodularMap { e: [a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h] }
    }

    pub fn inv(&self) -> UnimodularMap {
        let [a, b, c, d] = &self.e;
        UnimodularMap { e: [d.clone(), -b.clone(), -c.clone(), a.clone()] }
    }

    pub fn neg(&self) -> UnimodularMap {
        UnimodularMap { e: self.e.clone().map(|x| -x) }
    }

    pub fn to_rational(&self) -> [BigRational; 4] {
        self.e.clone().map(BigRational::from_integer)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

/// Primitive positive-definite form `A X² + B XY + C Y²`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl QuadForm {
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::invalid("leading coefficient must be positive"));
        }
        if !a.gcd(&b).gcd(&c).is_one() {
            return Err(Error::invalid("form is not primitive"));
        }
        let disc = &b * &b - BigInt::from(4) * &a * &c;
        if !disc.is_negative() {
            return Err(Error::invalid("form is not positive definite"));
        }
        if disc.abs() > BigInt::from(MAX_ABS_DISC) {
            return Err(Error::invalid("discriminant exceeds the desk-scale bound"));
        }
        Ok(QuadForm { a, b, c })
    }

    pub fn from_i64(a: i64, b: i64, c: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into())
    }

    pub fn coeffs(&self) -> (&BigInt, &BigInt, &BigInt) {
        (&self.a, &self.b, &self.c)
    }

    pub fn to_i64(&self) -> (i64, i64, i64) {
        (self.a.to_i64().unwrap(), self.b.to_i64().unwrap(), self.c.to_i64().unwrap())
    }

    pub fn disc(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    /// `f∘M`, i.e. `(x, y) ↦ f(M·(x, y)ᵀ)`.
    pub fn compose(&self, m: &UnimodularMap) -> QuadForm {
        let [p, q, r, s] = m.entries();
        let a = self.eval(p, r);
        let c = self.eval(q, s);
        let b = BigInt::from(2) * &self.a * p * q + &self.b * (p * s + q * r) + BigInt::from(2) * &self.c * r * s;
        QuadForm { a, b, c }
    }

    /// Root in the upper half-plane.
    pub fn root(&self) -> QuadPoint {
        let n = -self.disc();
        let (m, s) = numth::squarefree_part(&n).expect("bounded discriminant");
        let two_a = BigInt::from(2) * &self.a;
        QuadPoint {
            m: m.to_u64().unwrap(),
            p: BigRational::new(-self.b.clone(), two_a.clone()),
            q: BigRational::new(s, two_a),
        }
    }

    /// Gauss reducedness: `|B| ≤ A ≤ C`, and `B ≥ 0` when `|B| = A` or `A = C`.
    pub fn is_reduced(&self) -> bool {
        let absb = self.b.abs();
        if absb > self.a || self.a > self.c {
            return false;
        }
        if (absb == self.a || self.a == self.c) && self.b.is_negative() {
            return false;
        }
        true
    }
}

impl std::fmt::Display for QuadForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Primitive integral form whose upper-half-plane root is τ.
pub fn form_of(tau: &QuadPoint) -> QuadForm {
    // (x − p)² + m q² = 0, cleared of denominators.
    let m = BigRational::from_integer(BigInt::from(tau.m));
    let a = BigRational::one();
    let b = -BigRational::from_integer(BigInt::from(2)) * &tau.p;
    let c = &tau.p * &tau.p + &m * &tau.q * &tau.q;
    let l = a.denom().lcm(b.denom()).lcm(c.denom());
    let lr = BigRational::from_integer(l);
    let (a, b, c) = ((a * &lr).to_integer(), (b * &lr).to_integer(), (c * &lr).to_integer());
    let g = a.gcd(&b).gcd(&c);
    QuadForm { a: a / &g, b: b / &g, c: c / &g }
}

/// Gauss reduction. Returns `(g, γ)` with `g = f∘γ⁻¹` reduced and `root(g) = γ·root(f)`.
pub fn reduce(f: &QuadForm) -> (QuadForm, UnimodularMap) {
    let (mut a, mut b, mut c) = (f.a.clone(), f.b.clone(), f.c.clone());
    let mut gamma = UnimodularMap::identity();
    loop {
        // translate so that −A < B ≤ A
        let two_a = BigInt::from(2) * &a;
        let k = (&b - &a).div_ceil(&two_a);
        if !k.is_zero() {
            let nb = &b - &two_a * &k;
            let nc = &a * &k * &k - &b * &k + &c;
            b = nb;
            c = nc;
            gamma = UnimodularMap::translation(k).mul(&gamma);
        }
        if a > c || (a == c && b.is_negative()) {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            gamma = UnimodularMap::inversion().mul(&gamma);
            continue;
        }
        break;
    }
    (QuadForm { a, b, c }, gamma)
}

/// The stabilizer of `root(f)` in SL2(ℤ), sorted.
pub fn automorphs(f: &QuadForm) -> Vec<UnimodularMap> {
    let d = f.disc();
    let mut sols: Vec<(i64, i64)> = vec![(2, 0), (-2, 0)];
    if d == BigInt::from(-4) {
        sols.extend([(0, 1), (0, -1)]);
    } else if d == BigInt::from(-3) {
        sols.extend([(1, 1), (1, -1), (-1, 1), (-1, -1)]);
    }
    let two = BigInt::from(2);
    let mut out: Vec<UnimodularMap> = sols
        .into_iter()
        .map(|(t, u)| {
            let (t, u) = (BigInt::from(t), BigInt::from(u));
            UnimodularMap {
                e: [(&t - &f.b * &u) / &two, -(&f.c * &u), &f.a * &u, (&t + &f.b * &u) / &two],
            }
        })
        .collect();
    out.sort();
    out
}

/// All reduced primitive forms of discriminant `disc`, in lexicographic order.
pub fn reduced_forms(disc: i64) -> Result<Vec<QuadForm>> {
    if disc >= 0 || disc.rem_euclid(4) > 1 {
        return Err(Error::invalid("discriminant must be negative and ≡ 0, 1 mod 4"));
    }
    if disc.unsigned_abs() > MAX_ABS_DISC {
        return Err(Error::invalid("discriminant exceeds the desk-scale bound"));
    }
    let n = -disc;
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= n {
        for b in (-a + 1)..=a {
            if (b - disc).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            out.push(QuadForm::from_i64(a, b, c)?);
        }
        a += 1;
    }
    Ok(out)
}

/// Class number `h(disc)` by enumeration.
pub fn class_number(disc: i64) -> Result<usize> {
    Ok(reduced_forms(disc)?.len())
}

/// Primitive solutions `x² + m y² = k` with `x, y ≥ 0`, sorted by `y`.
pub fn cornacchia_primitive(m: u64, k: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    if k == 0 || m == 0 {
        return out;
    }
    if k == 1 {
        out.push((1, 0));
        if m == 1 {
            out.push((0, 1));
        }
        return out;
    }
    let target = (k - m % k) % k;
    let kk = k as u128;
    for r0 in numth::sqrt_mod_composite_all(target, k) {
        let (mut a, mut b) = (k as u128, r0 as u128);
        while b * b >= kk {
            let r = a % b;
            a = b;
            b = r;
        }
        let x = b;
        let rest = kk - x * x;
        if !rest.is_multiple_of(m as u128) {
            continue;
        }
        let y2 = BigInt::from(rest / m as u128);
        if !is_square(&y2) {
            continue;
        }
        let y = y2.sqrt().to_u64().unwrap();
        let x = x as u64;
        if x.gcd(&y) == 1 {
            out.push((x, y));
            if m == 1 {
                // x/y and y/x give the same pair of roots when m = 1
                out.push((y, x));
            }
        }
    }
    out.sort_by_key(|&(x, y)| (y, x));
    out.dedup();
    out
}

/// A solution of `x² + m y² = k` with `x, y ≥ 0` (smallest `y`), or `None`.
pub fn cornacchia(m: u64, k: u64) -> Option<(u64, u64)> {
    cornacchia_all(m, k).into_iter().next()
}

/// Every solution of `x² + m y² = k` with `x, y ≥ 0`, sorted by `y`.
pub fn cornacchia_all(m: u64, k: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut g = 1u64;
    while g * g <= k {
        if k.is_multiple_of(g * g) {
            for (x, y) in cornacchia_primitive(m, k / (g * g)) {
                out.push((x * g, y * g));
            }
        }
        g += 1;
    }
    out.sort_by_key(|&(x, y)| (y, x));
    out.dedup();
    out
}

/// Outcome of [`solve_form_rational`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormSolution {
    Found { s: BigRational, t: BigRational },
    /// `place` is the largest obstructing prime (0 for ∞); `places` lists all of them.
    Obstructed { place: Place, places: Vec<Place> },
}

impl NormSolution {
    pub fn solution(&self) -> Option<(&BigRational, &BigRational)> {
        match self {
            NormSolution::Found { s, t } => Some((s, t)),
            NormSolution::Obstructed { .. } => None,
        }
    }
}

/// Places where `(k, −m)_v = −1`; empty iff `k` is a norm from ℚ(√−m).
pub fn norm_obstructions(m: u64, k: &BigRational) -> Result<Vec<Place>> {
    let neg_m = BigRational::from_integer(-BigInt::from(m));
    let mut bad = Vec::new();
    for v in numth::relevant_places(k, &neg_m)? {
        if hilbert_symbol(k, &neg_m, v)? == -1 {
            bad.push(v);
        }
    }
    Ok(bad)
}

const RATIONAL_SEARCH_LIMIT: u64 = 1_000_000;

/// Solve `s² + m t² = k` over ℚ. Local conditions are checked first, so a
/// failure is certified by an obstructing place; a success is found by
/// increasing common denominator, then smallest `s ≥ 0`.
pub fn solve_form_rational(m: u64, k: &BigRational) -> Result<NormSolution> {
    if !numth::is_squarefree_u64(m) {
        return Err(Error::invalid("m must be square-free and positive"));
    }
    if !k.is_positive() {
        return Err(Error::invalid("k must be positive"));
    }
    let bad = norm_obstructions(m, k)?;
    if !bad.is_empty() {
        let place = bad.iter().copied().filter(|v| matches!(v, Place::Finite(_))).max().unwrap_or(Place::Infinity);
        return Ok(NormSolution::Obstructed { place, places: bad });
    }
    let (a, b) = (k.numer().clone(), k.denom().clone());
    let mb = BigInt::from(m);
    for d in 1..=RATIONAL_SEARCH_LIMIT {
        let d = BigInt::from(d);
        let dd = &d * &d;
        if !(&a * &dd).is_multiple_of(&b) {
            continue;
        }
        let n = &a * &dd / &b;
        let mut y = (&n / &mb).sqrt();
        loop {
            let rest = &n - &mb * &y * &y;
            if is_square(&rest) {
                let x = rest.sqrt();
                return Ok(NormSolution::Found {
                    s: BigRational::new(x, d.clone()),
                    t: BigRational::new(y, d.clone()),
                });
            }
            if y.is_zero() {
                break;
            }
            y -= 1;
        }
    }
    Err(Error::invalid("rational norm search exceeded its bound"))
}
