//! Integer and residue kernel: factorization, Jacobi symbols, square roots
//! modulo prime powers, CRT and Hilbert symbols.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of ℤ/N, stored as its representative in `[0, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: i64, modulus: u64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        Residue { value: reduce_i64(value, modulus), modulus }
    }

    pub fn from_bigint(value: &BigInt, modulus: u64) -> Self {
        Residue { value: reduce_big(value, modulus), modulus }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Representative in `(-N/2, N/2]`.
    pub fn symmetric(&self) -> i64 {
        let v = self.value as i64;
        if 2 * self.value > self.modulus {
            v - self.modulus as i64
        } else {
            v
        }
    }

    pub fn is_unit(&self) -> bool {
        gcd_u64(self.value, self.modulus) == 1
    }

    pub fn add(&self, other: &Residue) -> Residue {
        debug_assert_eq!(self.modulus, other.modulus);
        Residue { value: add_mod(self.value, other.value, self.modulus), modulus: self.modulus }
    }

    pub fn neg(&self) -> Residue {
        Residue { value: (self.modulus - self.value) % self.modulus, modulus: self.modulus }
    }

    pub fn mul(&self, other: &Residue) -> Residue {
        debug_assert_eq!(self.modulus, other.modulus);
        Residue { value: mul_mod(self.value, other.value, self.modulus), modulus: self.modulus }
    }

    pub fn pow(&self, e: u64) -> Residue {
        Residue { value: pow_mod(self.value, e, self.modulus), modulus: self.modulus }
    }

    pub fn inv(&self) -> Option<Residue> {
        inv_mod(self.value, self.modulus).map(|v| Residue { value: v, modulus: self.modulus })
    }
}

pub fn reduce_i64(v: i64, m: u64) -> u64 {
    (v as i128).rem_euclid(m as i128) as u64
}

pub fn reduce_big(v: &BigInt, m: u64) -> u64 {
    v.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits in u64")
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists. Modulus 1 has the single unit 0.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// `p^k`, or `None` on overflow past 2^63.
pub fn checked_pow(p: u64, k: u32) -> Option<u64> {
    let v = p.checked_pow(k)?;
    if v > (1u64 << 63) {
        None
    } else {
        Some(v)
    }
}

/// Chinese remaindering of `x ≡ r_i mod m_i` for pairwise coprime moduli.
pub fn crt(pairs: &[(u64, u64)]) -> (u64, u64) {
    let mut x: u128 = 0;
    let mut m: u128 = 1;
    for &(r, mi) in pairs {
        let mi128 = mi as u128;
        // x + m*t ≡ r mod mi
        let inv = inv_mod((m % mi128) as u64, mi).expect("moduli must be coprime") as u128;
        let diff = ((r as u128 % mi128) + mi128 - x % mi128) % mi128;
        let t = diff * inv % mi128;
        x += m * t;
        m *= mi128;
        x %= m;
    }
    (x as u64, m as u64)
}

// ---------------------------------------------------------------- primality

/// Deterministic Miller–Rabin, valid for all 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| add_mod(mul_mod(x, x, n), c, n);
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut ys = 2u64;
        let mut r = 1u64;
        let m = 64u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

/// Prime factorization of a positive 64-bit integer, primes increasing.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    let mut primes = Vec::new();
    let mut n = n;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n.is_multiple_of(p) {
            primes.push(p);
            n /= p;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            primes.push(m);
            continue;
        }
        let d = pollard_brent(m);
        stack.push(d);
        stack.push(m / d);
    }
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Sign and prime powers of a nonzero integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub sign: i8,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn value(&self) -> BigInt {
        let mut v = BigInt::from(self.sign);
        for &(p, e) in &self.factors {
            v *= num_traits::pow(BigInt::from(p), e as usize);
        }
        v
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }
}

/// Factor a nonzero integer with `|n| ≤ 2^64`.
pub fn factor(n: &BigInt) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::invalid("cannot factor 0"));
    }
    let sign = if n.is_negative() { -1 } else { 1 };
    let a = n.abs();
    let two64 = BigInt::one() << 64;
    if a > two64 {
        return Err(Error::invalid("factor input exceeds 2^64"));
    }
    if a == two64 {
        return Ok(Factorization { sign, factors: vec![(2, 64)] });
    }
    Ok(Factorization { sign, factors: factor_u64(a.to_u64().unwrap()) })
}

/// `n = m·s²` with `m` square-free.
pub fn squarefree_part(n: &BigInt) -> Result<(BigInt, BigInt)> {
    if !n.is_positive() {
        return Err(Error::invalid("squarefree_part expects n >= 1"));
    }
    let f = factor(n)?;
    let mut m = BigInt::one();
    let mut s = BigInt::one();
    for (p, e) in f.factors {
        if e % 2 == 1 {
            m *= p;
        }
        s *= num_traits::pow(BigInt::from(p), (e / 2) as usize);
    }
    Ok((m, s))
}

pub fn squarefree_part_u64(n: u64) -> (u64, u64) {
    assert!(n >= 1);
    let mut m = 1u64;
    let mut s = 1u64;
    for (p, e) in factor_u64(n) {
        if e % 2 == 1 {
            m *= p;
        }
        s *= p.pow(e / 2);
    }
    (m, s)
}

pub fn is_squarefree_u64(n: u64) -> bool {
    n >= 1 && factor_u64(n).iter().all(|&(_, e)| e == 1)
}

pub fn isqrt(n: &BigInt) -> BigInt {
    n.sqrt()
}

pub fn is_square(n: &BigInt) -> bool {
    !n.is_negative() && {
        let r = n.sqrt();
        &r * &r == *n
    }
}

// ---------------------------------------------------------------- symbols

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: &BigInt, n: &BigInt) -> Result<i8> {
    if !n.is_positive() || n.is_even() {
        return Err(Error::invalid("jacobi expects an odd positive modulus"));
    }
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut t = 1i8;
    let three = BigInt::from(3);
    let five = BigInt::from(5);
    let eight = BigInt::from(8);
    let four = BigInt::from(4);
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = n.mod_floor(&eight);
            if r == three || r == five {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&four) == three && n.mod_floor(&four) == three {
            t = -t;
        }
        a = a.mod_floor(&n);
    }
    Ok(if n.is_one() { t } else { 0 })
}

fn jacobi_u64(a: u64, n: u64) -> i8 {
    jacobi(&BigInt::from(a), &BigInt::from(n)).expect("odd modulus")
}

fn tonelli_shanks(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// All square roots of a unit modulo `p^e`, sorted.
fn unit_roots(a: u64, p: u64, e: u32) -> Vec<u64> {
    let q = p.pow(e);
    if q == 1 {
        return vec![0];
    }
    if p == 2 {
        let a = a % q;
        let mut out = match e {
            1 => vec![1],
            2 => {
                if a % 4 == 1 {
                    vec![1, 3]
                } else {
                    vec![]
                }
            }
            _ => {
                if a % 8 != 1 {
                    return vec![];
                }
                let mut r = 1u64;
                for i in 3..e {
                    let modi = 1u64 << (i + 1);
                    if mul_mod(r, r, modi) != a % modi {
                        r += 1u64 << (i - 1);
                    }
                }
                let h = q / 2;
                vec![r, q - r, (r + h) % q, (q - r + h) % q]
            }
        };
        out.sort_unstable();
        out.dedup();
        return out;
    }
    let Some(mut r) = tonelli_shanks(a % p, p) else {
        return vec![];
    };
    let mut modk = p;
    for _ in 1..e {
        let next = modk * p;
        // r ← r − (r² − a)/(2r) mod next
        let f = (mul_mod(r, r, next) + next - a % next) % next;
        let inv2r = inv_mod(mul_mod(2, r, next), next).expect("unit root");
        r = (r + next - mul_mod(f, inv2r, next)) % next;
        modk = next;
    }
    let mut out = vec![r, (q - r) % q];
    out.sort_unstable();
    out.dedup();
    out
}

/// Canonical (smallest) square root of `a` modulo `p^k`, or `None`.
pub fn sqrt_mod(a: u64, p: u64, k: u32) -> Option<u64> {
    let q = checked_pow(p, k)?;
    let a = a % q;
    if a == 0 {
        return Some(0);
    }
    let mut v = 0u32;
    let mut u = a;
    while u.is_multiple_of(p) {
        u /= p;
        v += 1;
    }
    if v % 2 == 1 {
        return None;
    }
    let j = v / 2;
    let roots = unit_roots(u, p, k - v);
    roots.first().map(|&y| p.pow(j) * y)
}

/// Every square root of `a` modulo `p^k`, sorted. Intended for small moduli.
pub fn sqrt_mod_all(a: u64, p: u64, k: u32) -> Vec<u64> {
    let q = p.pow(k);
    let a = a % q;
    if a == 0 {
        let step = p.pow(k.div_ceil(2));
        return (0..q / step).map(|t| t * step).collect();
    }
    let mut v = 0u32;
    let mut u = a;
    while u.is_multiple_of(p) {
        u /= p;
        v += 1;
    }
    if v % 2 == 1 {
        return vec![];
    }
    let j = v / 2;
    let base = p.pow(k - 2 * j);
    let pj = p.pow(j);
    let mut out = Vec::new();
    for y0 in unit_roots(u, p, k - v) {
        for t in 0..pj {
            out.push(pj * (y0 + t * base) % q);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Every square root of `a` modulo an arbitrary `n ≥ 1`, sorted.
pub fn sqrt_mod_composite_all(a: u64, n: u64) -> Vec<u64> {
    if n == 1 {
        return vec![0];
    }
    let mut acc: Vec<(u64, u64)> = vec![(0, 1)];
    for (p, e) in factor_u64(n) {
        let q = p.pow(e);
        let roots = sqrt_mod_all(a % q, p, e);
        if roots.is_empty() {
            return vec![];
        }
        let mut next = Vec::with_capacity(acc.len() * roots.len());
        for &(x, m) in &acc {
            for &r in &roots {
                next.push(crt(&[(x, m), (r, q)]));
            }
        }
        acc = next;
    }
    let mut out: Vec<u64> = acc.into_iter().map(|(x, _)| x).collect();
    out.sort_unstable();
    out
}

// ---------------------------------------------------------------- Hilbert symbol

/// A place of ℚ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    Finite(u64),
    Infinity,
}

impl Place {
    /// Prime of a finite place, 0 for ∞.
    pub fn code(&self) -> u64 {
        match self {
            Place::Finite(p) => *p,
            Place::Infinity => 0,
        }
    }
}

impl std::fmt::Display for Place {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

/// `v_p(x)` and the p-adic unit part of a nonzero rational, reduced modulo `modulus`.
fn split_valuation(x: &BigRational, p: u64, modulus: u64) -> (i64, u64) {
    let bp = BigInt::from(p);
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    let mut v = 0i64;
    while num.is_multiple_of(&bp) {
        num /= &bp;
        v += 1;
    }
    while den.is_multiple_of(&bp) {
        den /= &bp;
        v -= 1;
    }
    let n = reduce_big(&num, modulus);
    let d = reduce_big(&den, modulus);
    let u = mul_mod(n, inv_mod(d, modulus).expect("p-adic unit"), modulus);
    (v, u)
}

/// Hilbert symbol `(a, b)_v` for nonzero rationals.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, place: Place) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::invalid("hilbert_symbol expects nonzero arguments"));
    }
    match place {
        Place::Infinity => Ok(if a.is_negative() && b.is_negative() { -1 } else { 1 }),
        Place::Finite(2) => {
            let (al, u) = split_valuation(a, 2, 8);
            let (be, w) = split_valuation(b, 2, 8);
            let eps = |x: u64| ((x - 1) / 2) % 2;
            let omega = |x: u64| ((x * x - 1) / 8) % 2;
            let e = eps(u) * eps(w) + (al.rem_euclid(2) as u64) * omega(w) + (be.rem_euclid(2) as u64) * omega(u);
            Ok(if e.is_multiple_of(2) { 1 } else { -1 })
        }
        Place::Finite(p) => {
            if !is_prime_u64(p) {
                return Err(Error::invalid(format!("{p} is not prime")));
            }
            let (al, u) = split_valuation(a, p, p);
            let (be, w) = split_valuation(b, p, p);
            let mut s = 1i8;
            if (al * be).rem_euclid(2) == 1 && (p - 1) / 2 % 2 == 1 {
                s = -s;
            }
            if be.rem_euclid(2) == 1 {
                s *= jacobi_u64(u, p);
            }
            if al.rem_euclid(2) == 1 {
                s *= jacobi_u64(w, p);
            }
            Ok(s)
        }
    }
}

/// Primes dividing the numerator or denominator of a nonzero rational.
pub fn rational_primes(x: &BigRational) -> Result<Vec<u64>> {
    let mut ps: Vec<u64> = factor(x.numer())?.primes().collect();
    ps.extend(factor(x.denom())?.primes());
    ps.sort_unstable();
    ps.dedup();
    Ok(ps)
}

/// Places where `(a, b)_v` can be −1: ∞, 2 and primes of `a` and `b`.
pub fn relevant_places(a: &BigRational, b: &BigRational) -> Result<Vec<Place>> {
    let mut ps = rational_primes(a)?;
    ps.extend(rational_primes(b)?);
    ps.push(2);
    ps.sort_unstable();
    ps.dedup();
    let mut out: Vec<Place> = ps.into_iter().map(Place::Finite).collect();
    out.push(Place::Infinity);
    Ok(out)
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn sign_of(x: &BigInt) -> i8 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_roots(a: u64, q: u64) -> Vec<u64> {
        (0..q).filter(|x| mul_mod(*x, *x, q) == a % q).collect()
    }

    #[test]
    fn factor_examples() {
        assert_eq!(factor(&big(1)).unwrap(), Factorization { sign: 1, factors: vec![] });
        assert_eq!(factor(&big(-12)).unwrap(), Factorization { sign: -1, factors: vec![(2, 2), (3, 1)] });
        assert_eq!(factor(&big(97)).unwrap().factors, vec![(97, 1)]);
        let two64 = BigInt::one() << 64;
        assert_eq!(factor(&two64).unwrap().factors, vec![(2, 64)]);
        assert!(factor(&(two64 + 1)).is_err());
    }

    #[test]
    fn factor_large_semiprime() {
        let p = 4_294_967_291u64;
        let q = 4_294_967_279u64;
        assert_eq!(factor_u64(p * q), vec![(q, 1), (p, 1)]);
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_part(&big(1)).unwrap(), (big(1), big(1)));
        assert_eq!(squarefree_part(&big(20)).unwrap(), (big(5), big(2)));
        assert_eq!(squarefree_part(&big(45)).unwrap(), (big(5), big(3)));
    }

    #[test]
    fn jacobi_examples_and_legendre_oracle() {
        assert_eq!(jacobi(&big(2), &big(15)).unwrap(), 1);
        assert_eq!(jacobi(&big(0), &big(9)).unwrap(), 0);
        for n in (1..200).step_by(2) {
            assert_eq!(jacobi(&big(1), &big(n)).unwrap(), 1);
        }
        for p in (3u64..200).filter(|&p| is_prime_u64(p)) {
            let squares: Vec<u64> = (1..p).map(|x| x * x % p).collect();
            for a in 0..p {
                let expect = if a == 0 {
                    0
                } else if squares.contains(&a) {
                    1
                } else {
                    -1
                };
                assert_eq!(jacobi(&big(a as i64), &big(p as i64)).unwrap(), expect, "({a}/{p})");
            }
        }
    }

    #[test]
    fn sqrt_mod_examples() {
        assert_eq!(sqrt_mod(2, 7, 1), Some(3));
        assert_eq!(sqrt_mod(3, 7, 1), None);
        for p in [3u64, 5, 7, 11] {
            for k in 1..4 {
                assert_eq!(sqrt_mod(1, p, k), Some(1));
            }
        }
    }

    #[test]
    fn sqrt_mod_exhaustive_small_prime_powers() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let mut k = 1;
            while p.pow(k) <= 2000 {
                let q = p.pow(k);
                for a in 0..q {
                    let brute = brute_roots(a, q);
                    assert_eq!(sqrt_mod(a, p, k), brute.first().copied(), "a={a} mod {p}^{k}");
                    assert_eq!(sqrt_mod_all(a, p, k), brute, "all roots a={a} mod {p}^{k}");
                }
                k += 1;
            }
        }
    }

    #[test]
    fn composite_roots_match_brute_force() {
        for n in 1u64..300 {
            for a in 0..n {
                assert_eq!(sqrt_mod_composite_all(a, n), brute_roots(a, n.max(1)), "a={a} n={n}");
            }
        }
    }

    #[test]
    fn hilbert_examples() {
        let m1 = rat(-1, 1);
        assert_eq!(hilbert_symbol(&m1, &m1, Place::Finite(2)).unwrap(), -1);
        assert_eq!(hilbert_symbol(&m1, &m1, Place::Infinity).unwrap(), -1);
        assert_eq!(hilbert_symbol(&rat(2, 1), &rat(3, 1), Place::Finite(3)).unwrap(), -1);
    }

    #[test]
    fn crt_combines() {
        assert_eq!(crt(&[(2, 3), (3, 5), (2, 7)]), (23, 105));
    }

    proptest! {
        #[test]
        fn factor_roundtrip(n in 1u64..(1u64 << 48)) {
            let f = factor(&BigInt::from(n)).unwrap();
            prop_assert_eq!(f.value(), BigInt::from(n));
            let mut last = 1;
            for &(p, e) in &f.factors {
                prop_assert!(p > last && is_prime_u64(p) && e >= 1);
                last = p;
            }
            let (m, s) = squarefree_part_u64(n);
            prop_assert_eq!(m * s * s, n);
            prop_assert!(is_squarefree_u64(m));
        }

        #[test]
        fn hilbert_reciprocity(a in -100i64..=100, b in -100i64..=100, c in 1i64..=100, d in 1i64..=100) {
            prop_assume!(a != 0 && b != 0);
            let x = rat(a, c);
            let y = rat(b, d);
            let prod: i8 = relevant_places(&x, &y).unwrap().into_iter()
                .map(|v| hilbert_symbol(&x, &y, v).unwrap()).product();
            prop_assert_eq!(prod, 1);
        }

        #[test]
        fn jacobi_multiplicative(a in -500i64..500, b in -500i64..500, n in 0i64..400) {
            let n = 2 * n + 1;
            let lhs = jacobi(&big(a * b), &big(n)).unwrap();
            let rhs = jacobi(&big(a), &big(n)).unwrap() * jacobi(&big(b), &big(n)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
