//! Exact rational matrices, matrices over ℤ/N, the adelic normal form
//! `r·d_δ·s`, the shape matrices of the CM tori and their normalizers, and
//! conjugation by `d_λ = diag(λ, 1)`.
//!
//! An [`AdelicMatrix`] denotes the coset `r·d_δ·s·K(N)` of the principal
//! congruence subgroup of its own level: `r` is exact, `d_δ` is `diag(δ, 1)`
//! at primes dividing `N` and trivial elsewhere, and `s ∈ SL2(ℤ)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numth::{self, factor_u64, gcd_u64, inv_mod, mul_mod, reduce_big};
use crate::qforms::UnimodularMap;

// ---------------------------------------------------------------- rational matrices

/// Exact 2×2 rational matrix, row-major `(a b; c d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    e: [BigRational; 4],
}

impl RatMatrix {
    pub fn new(e: [BigRational; 4]) -> Self {
        RatMatrix { e }
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        RatMatrix { e: [a, b, c, d].map(|x| BigRational::from_integer(BigInt::from(x))) }
    }

    pub fn from_fracs(f: [(i64, i64); 4]) -> Self {
        RatMatrix { e: f.map(|(n, d)| numth::rat(n, d)) }
    }

    pub fn identity() -> Self {
        Self::from_ints(1, 0, 0, 1)
    }

    pub fn scalar(x: BigRational) -> Self {
        RatMatrix { e: [x.clone(), BigRational::zero(), BigRational::zero(), x] }
    }

    pub fn from_unimodular(g: &UnimodularMap) -> Self {
        RatMatrix { e: g.to_rational() }
    }

    pub fn entries(&self) -> &[BigRational; 4] {
        &self.e
    }

    pub fn mul(&self, o: &RatMatrix) -> RatMatrix {
        let [a, b, c, d] = &self.e;
        let [e, f, g, h] = &o.e;
        RatMatrix { e: [a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h] }
    }

    pub fn det(&self) -> BigRational {
        let [a, b, c, d] = &self.e;
        a * d - b * c
    }

    pub fn inv(&self) -> Option<RatMatrix> {
        let det = self.det();
        if det.is_zero() {
            return None;
        }
        let [a, b, c, d] = &self.e;
        Some(RatMatrix { e: [d / &det, -b / &det, -c / &det, a / &det] })
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn is_integral(&self) -> bool {
        self.e.iter().all(|x| x.is_integer())
    }

    /// As an element of SL2(ℤ), when it is one.
    pub fn to_unimodular(&self) -> Option<UnimodularMap> {
        if !self.is_integral() {
            return None;
        }
        let [a, b, c, d] = self.e.clone().map(|x| x.to_integer());
        UnimodularMap::new(a, b, c, d).ok()
    }

    /// First prime dividing `n` at which the matrix is not in `GL2(ℤ_p)`.
    pub fn obstruction_at(&self, n: u64) -> Option<u64> {
        if n == 1 {
            return None;
        }
        let det = self.det();
        factor_u64(n).into_iter().map(|(p, _)| p).find(|&p| {
            let bp = BigInt::from(p);
            self.e.iter().any(|x| x.denom().is_multiple_of(&bp))
                || det.is_zero()
                || det.numer().is_multiple_of(&bp)
                || det.denom().is_multiple_of(&bp)
        })
    }

    /// Image in `GL2(ℤ/n)`; fails with the first prime of `n` meeting a
    /// denominator or the determinant.
    pub fn to_level(&self, n: u64) -> Result<LevelMatrix> {
        if let Some(p) = self.obstruction_at(n) {
            return Err(Error::PrecisionObstruction(p));
        }
        let red = |x: &BigRational| -> u64 {
            let num = reduce_big(x.numer(), n);
            let den = reduce_big(x.denom(), n);
            mul_mod(num, inv_mod(den, n).expect("checked above"), n)
        };
        Ok(LevelMatrix::from_residues([red(&self.e[0]), red(&self.e[1]), red(&self.e[2]), red(&self.e[3])], n))
    }
}

impl std::fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [a, b, c, d] = &self.e;
        write!(f, "({a} {b}; {c} {d})")
    }
}

// ---------------------------------------------------------------- level matrices

/// Element of `GL2(ℤ/N)`, entries in `[0, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LevelMatrix {
    e: [u64; 4],
    n: u64,
}

impl LevelMatrix {
    /// Checked constructor: the determinant must be a unit mod `n`.
    pub fn new(e: [i64; 4], n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("level must be positive"));
        }
        let m = Self::from_residues(e.map(|x| numth::reduce_i64(x, n)), n);
        if !m.det_is_unit() {
            return Err(Error::invalid(format!("determinant is not a unit mod {n}")));
        }
        Ok(m)
    }

    fn from_residues(e: [u64; 4], n: u64) -> Self {
        LevelMatrix { e: e.map(|x| x % n), n }
    }

    pub fn identity(n: u64) -> Self {
        Self::from_residues([1, 0, 0, 1], n)
    }

    pub fn scalar(lambda: u64, n: u64) -> Self {
        Self::from_residues([lambda, 0, 0, lambda], n)
    }

    /// `d_λ = diag(λ, 1)`.
    pub fn d(lambda: u64, n: u64) -> Self {
        Self::from_residues([lambda, 0, 0, 1], n)
    }

    pub fn from_unimodular(g: &UnimodularMap, n: u64) -> Self {
        Self::from_residues(g.entries().clone().map(|x| reduce_big(&x, n)), n)
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn entries(&self) -> [u64; 4] {
        self.e
    }

    /// Entries as representatives in `(−N/2, N/2]`.
    pub fn symmetric_entries(&self) -> [i64; 4] {
        self.e.map(|x| numth::Residue::new(x as i64, self.n).symmetric())
    }

    pub fn det(&self) -> u64 {
        let [a, b, c, d] = self.e;
        let n = self.n;
        (mul_mod(a, d, n) + n - mul_mod(b, c, n)) % n
    }

    fn det_is_unit(&self) -> bool {
        gcd_u64(self.det(), self.n) == 1
    }

    pub fn mul(&self, o: &LevelMatrix) -> LevelMatrix {
        assert_eq!(self.n, o.n, "level mismatch");
        let n = self.n;
        let [a, b, c, d] = self.e;
        let [e, f, g, h] = o.e;
        let ad = |x: u64, y: u64| (x + y) % n;
        Self::from_residues(
            [
                ad(mul_mod(a, e, n), mul_mod(b, g, n)),
                ad(mul_mod(a, f, n), mul_mod(b, h, n)),
                ad(mul_mod(c, e, n), mul_mod(d, g, n)),
                ad(mul_mod(c, f, n), mul_mod(d, h, n)),
            ],
            n,
        )
    }

    pub fn inv(&self) -> LevelMatrix {
        let n = self.n;
        let di = inv_mod(self.det(), n).expect("unit determinant");
        let [a, b, c, d] = self.e;
        Self::from_residues(
            [mul_mod(d, di, n), mul_mod((n - b) % n, di, n), mul_mod((n - c) % n, di, n), mul_mod(a, di, n)],
            n,
        )
    }

    pub fn pow(&self, mut k: u64) -> LevelMatrix {
        let mut base = *self;
        let mut acc = Self::identity(self.n);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Reduction to a divisor level.
    pub fn reduce_to(&self, n2: u64) -> Result<LevelMatrix> {
        if n2 == 0 || !self.n.is_multiple_of(n2) {
            return Err(Error::invalid(format!("{n2} does not divide {}", self.n)));
        }
        Ok(Self::from_residues(self.e, n2))
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    /// Exact integer matrix with these entries.
    pub fn to_rational(&self) -> RatMatrix {
        RatMatrix::from_ints(self.e[0] as i64, self.e[1] as i64, self.e[2] as i64, self.e[3] as i64)
    }

    /// A lift to `SL2(ℤ)`; requires determinant 1.
    pub fn lift_sl2(&self) -> Result<UnimodularMap> {
        if self.det() != 1 % self.n {
            return Err(Error::invalid("lift_sl2 needs determinant 1"));
        }
        let n = self.n as i128;
        if n == 1 {
            return Ok(UnimodularMap::identity());
        }
        let [sa, sb, sc, sd] = self.symmetric_entries();
        if sa as i128 * sd as i128 - sb as i128 * sc as i128 == 1 {
            return UnimodularMap::from_i64(sa, sb, sc, sd);
        }
        let [a0, b0, c0, d0] = self.e.map(|x| x as i128);
        let c = if c0 == 0 { n } else { c0 };
        let mut d = d0;
        while c.gcd(&d) != 1 {
            d += n;
        }
        let eg = c.extended_gcd(&d); // x c + y d = 1
        let (x, y) = (eg.x, eg.y);
        let (a1, b1) = (y, -x); // a1 d − b1 c = 1
        let t = ((a0 - a1) * x + (b0 - b1) * y).rem_euclid(n);
        let a = a1 + t * c;
        let b = b1 + t * d;
        UnimodularMap::new(BigInt::from(a), BigInt::from(b), BigInt::from(c), BigInt::from(d))
    }
}

impl std::fmt::Display for LevelMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [a, b, c, d] = self.e;
        write!(f, "({a} {b}; {c} {d}) mod {}", self.n)
    }
}

/// All of `GL2(ℤ/n)`, in lexicographic order. Intended for small `n`.
pub fn enumerate_gl2(n: u64) -> Vec<LevelMatrix> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let m = LevelMatrix::from_residues([a, b, c, d], n);
                    if m.det_is_unit() {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// `SL2(ℤ/n)`, in lexicographic order.
pub fn enumerate_sl2(n: u64) -> Vec<LevelMatrix> {
    enumerate_gl2(n).into_iter().filter(|m| m.det() == 1 % n).collect()
}

/// Units of ℤ/n in increasing order.
pub fn units(n: u64) -> Vec<u64> {
    if n == 1 {
        return vec![0];
    }
    (1..n).filter(|&x| gcd_u64(x, n) == 1).collect()
}

// ---------------------------------------------------------------- adelic normal form

/// `r·d_δ·s` modulo right multiplication by `K(N)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdelicMatrix {
    r: RatMatrix,
    delta: u64,
    s: UnimodularMap,
    level: u64,
}

impl AdelicMatrix {
    pub fn new(r: RatMatrix, delta: u64, s: UnimodularMap, level: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::invalid("level must be positive"));
        }
        if r.det().is_zero() {
            return Err(Error::invalid("rational part must be invertible"));
        }
        let delta = delta % level;
        if gcd_u64(delta, level) != 1 {
            return Err(Error::invalid(format!("delta = {delta} is not a unit mod {level}")));
        }
        Ok(AdelicMatrix { r, delta, s, level })
    }

    pub fn identity(level: u64) -> Self {
        AdelicMatrix { r: RatMatrix::identity(), delta: 1 % level, s: UnimodularMap::identity(), level }
    }

    pub fn from_rational(r: RatMatrix, level: u64) -> Result<Self> {
        Self::new(r, 1, UnimodularMap::identity(), level)
    }

    /// Unit part chosen canonically from its image mod `N`: `δ = det`, `s` a lift of `d_δ⁻¹·u`.
    pub fn from_unit(u: &LevelMatrix) -> Self {
        Self::with_unit(RatMatrix::identity(), u)
    }

    /// `r` times the canonical unit representing `u`.
    pub fn with_unit(r: RatMatrix, u: &LevelMatrix) -> Self {
        let n = u.level();
        let delta = u.det();
        let core = LevelMatrix::d(inv_mod(delta, n).expect("unit"), n).mul(u);
        let s = core.lift_sl2().expect("determinant one");
        AdelicMatrix { r, delta, s, level: n }
    }

    pub fn r(&self) -> &RatMatrix {
        &self.r
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn s(&self) -> &UnimodularMap {
        &self.s
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// `d̄_δ·s̄ ∈ GL2(ℤ/N)`.
    pub fn unit_level(&self) -> LevelMatrix {
        LevelMatrix::d(self.delta, self.level).mul(&LevelMatrix::from_unimodular(&self.s, self.level))
    }

    /// Image in `GL2(ℤ/N′)`: at primes of `N′` dividing `N` the unit part
    /// contributes `δ`, elsewhere only `s`.
    pub fn reduce_level(&self, n2: u64) -> Result<LevelMatrix> {
        if n2 == 0 {
            return Err(Error::invalid("level must be positive"));
        }
        if n2 == 1 {
            return Ok(LevelMatrix::identity(1));
        }
        let mut parts: Vec<(LevelMatrix, u64)> = Vec::new();
        for (p, k) in factor_u64(n2) {
            let q = p.pow(k);
            let rq = self.r.to_level(q)?;
            let mut vn = 0;
            let mut t = self.level;
            while t.is_multiple_of(p) {
                t /= p;
                vn += 1;
            }
            let delta = if vn == 0 {
                1
            } else if vn < k {
                return Err(Error::PrecisionObstruction(p));
            } else {
                self.delta % q
            };
            let u = LevelMatrix::d(delta, q).mul(&LevelMatrix::from_unimodular(&self.s, q));
            parts.push((rq.mul(&u), q));
        }
        let mut e = [0u64; 4];
        for (i, slot) in e.iter_mut().enumerate() {
            let pairs: Vec<(u64, u64)> = parts.iter().map(|(m, q)| (m.e[i], *q)).collect();
            *slot = numth::crt(&pairs).0;
        }
        Ok(LevelMatrix::from_residues(e, n2))
    }

    /// Product; the rational part of `g2` must be invertible at every prime of `N`.
    pub fn mul(&self, o: &AdelicMatrix) -> Result<AdelicMatrix> {
        if self.level != o.level {
            return Err(Error::invalid("level mismatch"));
        }
        let n = self.level;
        let s1 = RatMatrix::from_unimodular(&self.s);
        let s2 = RatMatrix::from_unimodular(&o.s);
        let t = s1.mul(&o.r).mul(&s2);
        let d1 = LevelMatrix::d(self.delta, n);
        let d2 = LevelMatrix::d(o.delta, n);
        if t.to_unimodular().is_some() {
            // everything right of r1 is a unit
            let u = d1
                .mul(&LevelMatrix::from_unimodular(&self.s, n))
                .mul(&o.r.to_level(n)?)
                .mul(&d2)
                .mul(&LevelMatrix::from_unimodular(&o.s, n));
            return Ok(Self::with_unit(self.r.clone(), &u));
        }
        let sr = s1.mul(&o.r);
        let sr_bar = sr.to_level(n)?;
        let s2_bar = LevelMatrix::from_unimodular(&o.s, n);
        let ts = sr_bar.mul(&s2_bar);
        let u = ts.inv().mul(&d1).mul(&sr_bar).mul(&d2).mul(&s2_bar);
        Ok(Self::with_unit(self.r.mul(&t), &u))
    }

    /// Inverse; `r` must be invertible at every prime of `N`.
    pub fn inv(&self) -> Result<AdelicMatrix> {
        let rinv = self.r.inv().expect("invertible rational part");
        let unit_inv = Self::from_unit(&self.unit_level().inv());
        unit_inv.mul(&Self::from_rational(rinv, self.level)?)
    }

    /// Same coset modulo `K(N)`: `(r₁u₁)⁻¹·r₂u₂ ∈ K(N)`.
    pub fn same_coset(&self, o: &AdelicMatrix) -> bool {
        if self.level != o.level {
            return false;
        }
        let Some(rinv) = self.r.inv() else { return false };
        let q = rinv.mul(&o.r);
        if !q.is_integral() || !q.det().abs().is_one() {
            return false;
        }
        let n = self.level;
        let Ok(qb) = q.to_level(n) else { return false };
        self.unit_level().inv().mul(&qb).mul(&o.unit_level()).is_identity()
    }
}

impl std::fmt::Display for AdelicMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [a, b, c, d] = self.s.entries();
        write!(f, "{}·d[{}]·({a} {b}; {c} {d}) @ N={}", self.r, self.delta, self.level)
    }
}

// ---------------------------------------------------------------- shapes

/// Which shape: `m` and the branch (+1: torus `(x, my; −y, x)`, −1: `(x, my; y, −x)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShapeKind {
    pub m: u64,
    pub branch: i8,
}

impl ShapeKind {
    pub fn new(m: u64, branch: i8) -> Result<Self> {
        if m == 0 || !(branch == 1 || branch == -1) {
            return Err(Error::invalid("shape needs m >= 1 and branch ±1"));
        }
        Ok(ShapeKind { m, branch })
    }

    pub fn torus(m: u64) -> Self {
        ShapeKind { m, branch: 1 }
    }
}

/// Shape matrix mod `n` with parameters `(x, y)`.
pub fn shape_level(x: i64, y: i64, kind: ShapeKind, n: u64) -> LevelMatrix {
    let m = numth::reduce_i64(kind.m as i64, n) as i64;
    let e = if kind.branch == 1 { [x, m * y, -y, x] } else { [x, m * y, y, -x] };
    LevelMatrix::from_residues(e.map(|v| numth::reduce_i64(v, n)), n)
}

/// Exact shape matrix with rational parameters.
pub fn shape_rational(x: &BigRational, y: &BigRational, kind: ShapeKind) -> RatMatrix {
    let m = BigRational::from_integer(BigInt::from(kind.m));
    let my = &m * y;
    if kind.branch == 1 {
        RatMatrix::new([x.clone(), my, -y.clone(), x.clone()])
    } else {
        RatMatrix::new([x.clone(), my, y.clone(), -x.clone()])
    }
}

/// Witness `(x, y)` (symmetric residues) if `g` has the given shape mod N.
pub fn shape_test_level(g: &LevelMatrix, kind: ShapeKind) -> Option<(i64, i64)> {
    let n = g.level();
    let [a, _, c, _] = g.entries();
    let x = numth::Residue::new(a as i64, n).symmetric();
    let y = if kind.branch == 1 {
        numth::Residue::new(-(c as i64), n).symmetric()
    } else {
        numth::Residue::new(c as i64, n).symmetric()
    };
    (shape_level(x, y, kind, n) == *g).then_some((x, y))
}

/// Witness `(x, y)` if `g` has the given shape exactly (and nonzero determinant).
pub fn shape_test_rational(g: &RatMatrix, kind: ShapeKind) -> Option<(BigRational, BigRational)> {
    if g.det().is_zero() {
        return None;
    }
    let [a, _, c, _] = g.entries();
    let x = a.clone();
    let y = if kind.branch == 1 { -c.clone() } else { c.clone() };
    (shape_rational(&x, &y, kind) == *g).then_some((x, y))
}

/// `(a, n·b; −b, a)`, of determinant `a² + n b²`.
pub fn reciprocity_matrix(a: &BigRational, b: &BigRational, n: u64) -> Result<RatMatrix> {
    let g = shape_rational(a, b, ShapeKind::torus(n));
    if g.det().is_zero() {
        return Err(Error::invalid("a² + n b² must be nonzero"));
    }
    Ok(g)
}

/// Membership in the image of `Γ̃(N)`: congruent to the identity.
pub fn in_gamma_tilde(g: &LevelMatrix) -> bool {
    g.is_identity()
}

/// `d_λ⁻¹·h·d_λ = (a, λ⁻¹b; λc, d)`.
pub fn conj_by_dlambda(h: &LevelMatrix, lambda: u64) -> Result<LevelMatrix> {
    let n = h.level();
    let li = inv_mod(lambda % n, n).ok_or_else(|| Error::invalid(format!("{lambda} is not a unit mod {n}")))?;
    let [a, b, c, d] = h.entries();
    Ok(LevelMatrix::from_residues([a, mul_mod(li, b, n), mul_mod(lambda % n, c, n), d], n))
}

/// Prime divisors of `n`.
pub fn primes_of(n: u64) -> Vec<u64> {
    if n <= 1 {
        return vec![];
    }
    factor_u64(n).into_iter().map(|(p, _)| p).collect()
}

/// Integer value of a residue as `BigInt`.
pub fn big_of(x: u64) -> BigInt {
    BigInt::from(x)
}

/// `true` if `x` is a rational with numerator and denominator prime to `n`.
pub fn is_unit_at(x: &BigRational, n: u64) -> bool {
    let bn = BigInt::from(n);
    !x.is_zero() && x.numer().gcd(&bn).is_one() && x.denom().gcd(&bn).is_one()
}

/// Residue of a rational that is integral at the primes of `n`.
pub fn rational_mod(x: &BigRational, n: u64) -> Option<u64> {
    let den = reduce_big(x.denom(), n);
    let di = inv_mod(den, n)?;
    Some(mul_mod(reduce_big(x.numer(), n), di, n))
}

/// Sign of a nonzero rational.
pub fn rational_sign(x: &BigRational) -> i8 {
    if x.is_negative() {
        -1
    } else {
        1
    }
}

/// Absolute value of a `BigInt` as `u64` (panics past 64 bits).
pub fn abs_u64(x: &BigInt) -> u64 {
    x.abs().to_u64().expect("fits in u64")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lm(e: [i64; 4], n: u64) -> LevelMatrix {
        LevelMatrix::new(e, n).unwrap()
    }

    #[test]
    fn reduce_level_examples() {
        assert!(AdelicMatrix::identity(7).reduce_level(7).unwrap().is_identity());
        let g = AdelicMatrix::new(RatMatrix::identity(), 3, UnimodularMap::identity(), 7).unwrap();
        assert_eq!(g.reduce_level(7).unwrap(), lm([3, 0, 0, 1], 7));
        let g = AdelicMatrix::from_rational(RatMatrix::from_fracs([(1, 3), (0, 1), (0, 1), (1, 1)]), 3).unwrap();
        assert_eq!(g.reduce_level(3), Err(Error::PrecisionObstruction(3)));
    }

    #[test]
    fn mul_examples() {
        let g = AdelicMatrix::new(RatMatrix::from_ints(2, 1, 0, 3), 2, UnimodularMap::from_i64(1, 1, 0, 1).unwrap(), 5)
            .unwrap();
        assert!(g.mul(&AdelicMatrix::identity(5)).unwrap().same_coset(&g));
        let a = AdelicMatrix::from_unit(&LevelMatrix::d(2, 5));
        let b = AdelicMatrix::from_unit(&LevelMatrix::d(3, 5));
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.delta(), 1);
        assert!(ab.reduce_level(5).unwrap().is_identity());
        let r1 = AdelicMatrix::from_rational(RatMatrix::from_ints(2, 0, 0, 1), 7).unwrap();
        let s = AdelicMatrix::from_unit(&lm([1, 1, 0, 1], 7));
        let prod = r1.mul(&s).unwrap();
        assert_eq!(prod.reduce_level(7).unwrap(), lm([2, 2, 0, 1], 7));
    }

    #[test]
    fn sl2_lift_is_exact() {
        for n in [1u64, 2, 3, 4, 6, 10, 12] {
            for m in enumerate_sl2(n) {
                let l = m.lift_sl2().unwrap();
                assert_eq!(LevelMatrix::from_unimodular(&l, n), m);
            }
        }
    }

    #[test]
    fn shape_examples() {
        let g = RatMatrix::from_ints(1, 5, -1, 1);
        assert_eq!(
            shape_test_rational(&g, ShapeKind::torus(5)),
            Some((numth::rat(1, 1), numth::rat(1, 1)))
        );
        assert_eq!(shape_test_level(&lm([0, 4, 1, 0], 5), ShapeKind::torus(1)), Some((0, -1)));
        for br in [1, -1] {
            assert_eq!(shape_test_level(&lm([1, 1, 0, 1], 5), ShapeKind::new(1, br).unwrap()), None);
        }
    }

    #[test]
    fn reciprocity_examples() {
        let r = reciprocity_matrix(&numth::rat(0, 1), &numth::rat(1, 1), 5).unwrap();
        assert_eq!(r, RatMatrix::from_ints(0, 5, -1, 0));
        assert!(reciprocity_matrix(&numth::rat(1, 1), &numth::rat(0, 1), 7).unwrap().is_identity());
        let r = reciprocity_matrix(&numth::rat(1, 1), &numth::rat(2, 1), 1).unwrap();
        assert_eq!((r.clone(), r.det()), (RatMatrix::from_ints(1, 2, -2, 1), numth::rat(5, 1)));
    }

    #[test]
    fn gamma_tilde_examples() {
        assert!(in_gamma_tilde(&LevelMatrix::identity(7)));
        assert!(!in_gamma_tilde(&LevelMatrix::d(3, 7)));
        assert!(in_gamma_tilde(&lm([1, 7, 0, 1], 7)));
    }

    #[test]
    fn conj_examples() {
        assert_eq!(conj_by_dlambda(&lm([1, 2, 3, 4], 11), 10).unwrap(), lm([1, -2, -3, 4], 11));
        assert_eq!(conj_by_dlambda(&lm([1, 1, 0, 1], 5), 2).unwrap(), lm([1, 3, 0, 1], 5));
        assert!(conj_by_dlambda(&LevelMatrix::identity(9), 4).unwrap().is_identity());
        // agrees with the defining product
        let h = lm([2, 3, 5, 7], 13);
        let d = LevelMatrix::d(6, 13);
        assert_eq!(conj_by_dlambda(&h, 6).unwrap(), d.inv().mul(&h).mul(&d));
    }

    #[test]
    fn torus_closure_and_branch_law_exhaustive() {
        for n in 2..=12u64 {
            for m in 1..=10u64 {
                let mut tor = Vec::new();
                let mut twist = Vec::new();
                for x in 0..n as i64 {
                    for y in 0..n as i64 {
                        for (br, bucket) in [(1i8, &mut tor), (-1, &mut twist)] {
                            let g = shape_level(x, y, ShapeKind { m, branch: br }, n);
                            if g.det_is_unit() {
                                bucket.push(g);
                            }
                        }
                    }
                }
                for g in &tor {
                    assert!(shape_test_level(&g.inv(), ShapeKind::torus(m)).is_some());
                    for h in &tor {
                        assert!(shape_test_level(&g.mul(h), ShapeKind::torus(m)).is_some());
                    }
                    for h in &twist {
                        assert!(shape_test_level(&g.mul(h), ShapeKind { m, branch: -1 }).is_some());
                    }
                }
                for g in twist.iter().take(6) {
                    for h in &twist {
                        assert!(shape_test_level(&g.mul(h), ShapeKind::torus(m)).is_some());
                    }
                }
            }
        }
    }

    #[test]
    fn torus_closure_sampled_large_levels() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let n = rng.gen_range(13..=50u64);
            let m = rng.gen_range(1..=10u64);
            let draw = |rng: &mut ChaCha8Rng| loop {
                let g = shape_level(rng.gen_range(0..n as i64), rng.gen_range(0..n as i64), ShapeKind::torus(m), n);
                if g.det_is_unit() {
                    return g;
                }
            };
            let (g, h) = (draw(&mut rng), draw(&mut rng));
            assert!(shape_test_level(&g.mul(&h), ShapeKind::torus(m)).is_some());
            assert!(shape_test_level(&g.inv(), ShapeKind::torus(m)).is_some());
        }
    }

    #[test]
    fn conj_preserves_det_exhaustive() {
        for n in 2..=24u64 {
            let gens = [lm([1, 1, 0, 1], n), lm([0, n as i64 - 1, 1, 0], n), lm([1, 0, 1, 1], n)];
            for lambda in units(n) {
                for g in &gens {
                    for h in &gens {
                        let lhs = conj_by_dlambda(&g.mul(h), lambda).unwrap();
                        let rhs = conj_by_dlambda(g, lambda).unwrap().mul(&conj_by_dlambda(h, lambda).unwrap());
                        assert_eq!(lhs, rhs);
                        assert_eq!(lhs.det(), g.mul(h).det());
                    }
                }
            }
        }
    }

    fn arb_adelic(n: u64, rng: &mut ChaCha8Rng) -> AdelicMatrix {
        loop {
            let mut fr = || {
                let num = rng.gen_range(-9i64..=9);
                let den = rng.gen_range(1i64..=9);
                (num, den)
            };
            let r = RatMatrix::from_fracs([fr(), fr(), fr(), fr()]);
            if r.obstruction_at(n).is_some() {
                continue;
            }
            let u = enumerate_units_sample(n, rng);
            return AdelicMatrix::with_unit(r, &u);
        }
    }

    fn enumerate_units_sample(n: u64, rng: &mut ChaCha8Rng) -> LevelMatrix {
        loop {
            let e = [0; 4].map(|_| rng.gen_range(0..n as i64));
            if let Ok(m) = LevelMatrix::new(e, n) {
                return m;
            }
        }
    }

    #[test]
    fn reduce_level_is_a_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let levels = [2u64, 3, 5, 6, 7, 10, 12, 30, 35, 42, 105, 210];
        for i in 0..1000 {
            let n = levels[i % levels.len()];
            let g1 = arb_adelic(n, &mut rng);
            let g2 = arb_adelic(n, &mut rng);
            let prod = g1.mul(&g2).unwrap();
            for d in (1..=n).filter(|d| n.is_multiple_of(*d)) {
                let lhs = prod.reduce_level(d).unwrap();
                let rhs = g1.reduce_level(d).unwrap().mul(&g2.reduce_level(d).unwrap());
                assert_eq!(lhs, rhs, "n={n} d={d}");
            }
        }
    }

    proptest! {
        #[test]
        fn reciprocity_det_is_norm(an in -50i64..50, ad in 1i64..50, bn in -50i64..50, bd in 1i64..50, n in 1u64..40) {
            prop_assume!(numth::is_squarefree_u64(n) && (an != 0 || bn != 0));
            let (a, b) = (numth::rat(an, ad), numth::rat(bn, bd));
            let r = reciprocity_matrix(&a, &b, n).unwrap();
            let nr = BigRational::from_integer(BigInt::from(n));
            prop_assert_eq!(r.det(), &a * &a + nr * &b * &b);
        }
    }
}
