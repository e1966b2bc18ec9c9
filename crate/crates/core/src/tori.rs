//! Character lattices with sign actions, stable saturated sublattices,
//! Goursat decompositions of subdirect products of finite abelian groups, and
//! the ℚ-independence test for tuples of `√−m`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numth::{factor_u64, is_squarefree_u64};

// ---------------------------------------------------------------- F2 linear algebra

/// Rank over F2 of vectors given as sets of coordinates with a 1.
pub fn f2_rank(vectors: &[BTreeSet<u64>]) -> usize {
    let mut pivots: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
    let mut rank = 0;
    for v in vectors {
        let mut v = v.clone();
        while let Some(&lead) = v.iter().next_back() {
            match pivots.get(&lead) {
                Some(p) => v = v.symmetric_difference(p).copied().collect(),
                None => {
                    pivots.insert(lead, v);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

/// Class of `−m` in `ℚ^×/(ℚ^×)²`: coordinate 0 is the sign, `p` the parity at `p`.
fn square_class_of_neg(m: u64) -> BTreeSet<u64> {
    let mut v: BTreeSet<u64> = std::iter::once(0).collect();
    for (p, e) in factor_u64(m) {
        if e % 2 == 1 {
            v.insert(p);
        }
    }
    v
}

/// Whether `[ℚ(√−m_1, …, √−m_n) : ℚ] = 2ⁿ`.
pub fn independent(ms: &[u64]) -> Result<bool> {
    for (i, &m) in ms.iter().enumerate() {
        if m == 0 || !is_squarefree_u64(m) {
            return Err(Error::invalid(format!("{m} is not a square-free positive integer")));
        }
        if ms[..i].contains(&m) {
            return Err(Error::invalid(format!("{m} repeated")));
        }
    }
    let vs: Vec<_> = ms.iter().map(|&m| square_class_of_neg(m)).collect();
    Ok(f2_rank(&vs) == ms.len())
}

// ---------------------------------------------------------------- sign modules

/// `ℤⁿ` with a group of coordinatewise sign changes, given by generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignModule {
    n: usize,
    gens: Vec<Vec<i8>>,
}

impl SignModule {
    pub fn new(n: usize, gens: Vec<Vec<i8>>) -> Result<Self> {
        for g in &gens {
            if g.len() != n || g.iter().any(|&e| e != 1 && e != -1) {
                return Err(Error::invalid("sign generators must be ±1 vectors of length n"));
            }
        }
        Ok(SignModule { n, gens })
    }

    /// `n` coordinates with independent sign flips (generator j flips coordinate j).
    pub fn independent_signs(n: usize) -> Self {
        let gens = (0..n).map(|j| (0..n).map(|i| if i == j { -1 } else { 1 }).collect()).collect();
        SignModule { n, gens }
    }

    /// The sign module of the norm-one tori of `ℚ(√−m_i)`: one generator per
    /// prime of `∏ m_i` (and one for the sign), flipping coordinate i exactly
    /// when `√−m_i` is moved.
    pub fn for_fields(ms: &[u64]) -> Self {
        let classes: Vec<_> = ms.iter().map(|&m| square_class_of_neg(m)).collect();
        let coords: BTreeSet<u64> = classes.iter().flatten().copied().collect();
        let gens = coords
            .iter()
            .map(|c| classes.iter().map(|cl| if cl.contains(c) { -1 } else { 1 }).collect())
            .collect();
        SignModule { n: ms.len(), gens }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn gens(&self) -> &[Vec<i8>] {
        &self.gens
    }

    pub fn act(&self, j: usize, v: &[BigInt]) -> Vec<BigInt> {
        v.iter().zip(&self.gens[j]).map(|(x, &s)| if s < 0 { -x } else { x.clone() }).collect()
    }

    /// Coordinate characters as F2 vectors over the generators.
    pub fn characters(&self) -> Vec<BTreeSet<u64>> {
        (0..self.n)
            .map(|i| (0..self.gens.len()).filter(|&j| self.gens[j][i] < 0).map(|j| j as u64).collect())
            .collect()
    }

    /// Pairwise distinct coordinate characters.
    pub fn characters_distinct(&self) -> bool {
        let ch = self.characters();
        ch.iter().collect::<BTreeSet<_>>().len() == ch.len()
    }
}

// ---------------------------------------------------------------- sublattices

/// Sublattice of `ℤⁿ`, stored as its row Hermite normal form (a canonical basis).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sublattice {
    n: usize,
    basis: Vec<Vec<BigInt>>,
}

/// Row Hermite normal form: echelon, positive pivots, entries above each pivot in `[0, pivot)`.
pub fn hnf(rows: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut pr = 0;
    for c in 0..n {
        if pr >= a.len() {
            break;
        }
        loop {
            // smallest nonzero |entry| in column c at or below pr
            let Some(best) = (pr..a.len()).filter(|&i| !a[i][c].is_zero()).min_by_key(|&i| a[i][c].abs()) else {
                break;
            };
            a.swap(pr, best);
            let mut done = true;
            for i in pr + 1..a.len() {
                if !a[i][c].is_zero() {
                    let q = a[i][c].div_floor(&a[pr][c]);
                    let prow = a[pr].clone();
                    for (x, y) in a[i].iter_mut().zip(&prow) {
                        *x -= &q * y;
                    }
                    if !a[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if pr < a.len() && !a[pr][c].is_zero() {
            if a[pr][c].is_negative() {
                for x in a[pr].iter_mut() {
                    *x = -x.clone();
                }
            }
            for i in 0..pr {
                let q = a[i][c].div_floor(&a[pr][c]);
                if !q.is_zero() {
                    let prow = a[pr].clone();
                    for (x, y) in a[i].iter_mut().zip(&prow) {
                        *x -= &q * y;
                    }
                }
            }
            pr += 1;
        }
    }
    a.retain(|r| r.iter().any(|x| !x.is_zero()));
    a
}

/// Basis of the integer kernel `{x ∈ ℤⁿ : B·x = 0}` for `B` with the given rows.
pub fn integer_kernel(rows: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let k = rows.len();
    // augmented rows (column i of B | e_i); row-reduce on the first k columns
    let aug: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut r: Vec<BigInt> = rows.iter().map(|row| row[i].clone()).collect();
            r.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let red = hnf_prefix(aug, k);
    red.into_iter().filter(|r| r[..k].iter().all(|x| x.is_zero())).map(|r| r[k..].to_vec()).collect()
}

/// Unimodular row reduction making the first `k` columns echelon; keeps zero rows.
fn hnf_prefix(mut a: Vec<Vec<BigInt>>, k: usize) -> Vec<Vec<BigInt>> {
    let mut pr = 0;
    for c in 0..k {
        if pr >= a.len() {
            break;
        }
        loop {
            let Some(best) = (pr..a.len()).filter(|&i| !a[i][c].is_zero()).min_by_key(|&i| a[i][c].abs()) else {
                break;
            };
            a.swap(pr, best);
            let mut done = true;
            for i in pr + 1..a.len() {
                if !a[i][c].is_zero() {
                    let q = a[i][c].div_floor(&a[pr][c]);
                    let prow = a[pr].clone();
                    for (x, y) in a[i].iter_mut().zip(&prow) {
                        *x -= &q * y;
                    }
                    if !a[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if !a[pr][c].is_zero() {
            pr += 1;
        }
    }
    a
}

impl Sublattice {
    /// Lattice spanned by the given vectors.
    pub fn span(n: usize, vectors: &[Vec<BigInt>]) -> Result<Self> {
        if vectors.iter().any(|v| v.len() != n) {
            return Err(Error::invalid("vector length differs from ambient rank"));
        }
        Ok(Sublattice { n, basis: hnf(vectors, n) })
    }

    pub fn span_i64(n: usize, vectors: &[Vec<i64>]) -> Result<Self> {
        let vs: Vec<Vec<BigInt>> = vectors.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::span(n, &vs)
    }

    pub fn zero(n: usize) -> Self {
        Sublattice { n, basis: vec![] }
    }

    pub fn full(n: usize) -> Self {
        Self::coordinate(n, &(0..n).collect::<Vec<_>>())
    }

    /// `⊕_{i∈T} ℤe_i`.
    pub fn coordinate(n: usize, coords: &[usize]) -> Self {
        let vs: Vec<Vec<BigInt>> = coords
            .iter()
            .map(|&i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        Sublattice { n, basis: hnf(&vs, n) }
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Canonical (Hermite) basis, one vector per row.
    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        hnf(&rows, self.n) == self.basis
    }

    pub fn is_subset_of(&self, o: &Sublattice) -> bool {
        self.basis.iter().all(|v| o.contains(v))
    }

    pub fn sum(&self, o: &Sublattice) -> Sublattice {
        let mut rows = self.basis.clone();
        rows.extend(o.basis.iter().cloned());
        Sublattice { n: self.n, basis: hnf(&rows, self.n) }
    }

    /// `ℚL ∩ ℤⁿ`, computed as the double integer kernel.
    pub fn saturate(&self) -> Sublattice {
        let perp = integer_kernel(&self.basis, self.n);
        let sat = integer_kernel(&perp, self.n);
        Sublattice { n: self.n, basis: hnf(&sat, self.n) }
    }

    pub fn is_saturated(&self) -> bool {
        self.saturate() == *self
    }

    /// Coordinates `T` if the lattice is `⊕_{i∈T} ℤe_i`.
    pub fn coordinate_support(&self) -> Option<Vec<usize>> {
        let mut out = Vec::new();
        for row in &self.basis {
            let nz: Vec<usize> = (0..self.n).filter(|&j| !row[j].is_zero()).collect();
            if nz.len() != 1 || !row[nz[0]].is_one() {
                return None;
            }
            out.push(nz[0]);
        }
        Some(out)
    }

    pub fn is_stable(&self, m: &SignModule) -> bool {
        (0..m.gens.len()).all(|j| self.basis.iter().all(|v| self.contains(&m.act(j, v))))
    }

    /// Whether every coordinate projection of the lattice is nonzero.
    pub fn projections_nonzero(&self) -> bool {
        (0..self.n).all(|j| self.basis.iter().any(|v| !v[j].is_zero()))
    }
}

impl std::fmt::Display for Sublattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<String> = self
            .basis
            .iter()
            .map(|r| format!("({})", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "<{}>", rows.join(", "))
    }
}

/// Smallest saturated, action-stable sublattice containing `l`.
pub fn stable_saturation(l: &Sublattice, m: &SignModule) -> Result<Sublattice> {
    if l.n != m.n {
        return Err(Error::invalid("lattice and module ranks differ"));
    }
    let mut cur = l.saturate();
    loop {
        let mut rows = cur.basis.clone();
        for j in 0..m.gens.len() {
            rows.extend(cur.basis.iter().map(|v| m.act(j, v)));
        }
        let next = Sublattice { n: cur.n, basis: hnf(&rows, cur.n) }.saturate();
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
}

/// Every stable saturated sublattice is a coordinate sublattice. Exhaustive over
/// single generators with entries in `[−3, 3]` for rank ≤ 4 (a non-coordinate
/// stable saturated lattice always contains such a generator); by isotypic
/// decomposition (pairwise distinct coordinate characters) beyond that.
pub fn minimal_subtorus_check(m: &SignModule) -> bool {
    if m.n > 4 {
        return m.characters_distinct();
    }
    let n = m.n;
    let total = 7usize.pow(n as u32);
    for code in 1..total {
        let mut c = code;
        let v: Vec<BigInt> = (0..n)
            .map(|_| {
                let d = (c % 7) as i64 - 3;
                c /= 7;
                BigInt::from(d)
            })
            .collect();
        let l = Sublattice { n, basis: hnf(&[v], n) };
        let closed = stable_saturation(&l, m).expect("same rank");
        if closed.coordinate_support().is_none() {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------- Goursat

/// Finite abelian group `⊕ ℤ/d_i` given by its invariant factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    factors: Vec<u64>,
}

pub type Elem = Vec<u64>;

impl AbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if factors.contains(&0) {
            return Err(Error::invalid("invariant factors must be positive"));
        }
        Ok(AbelianGroup { factors })
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn zero(&self) -> Elem {
        vec![0; self.factors.len()]
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).zip(&self.factors).map(|((x, y), d)| (x + y) % d).collect()
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        a.iter().zip(&self.factors).map(|(x, d)| (d - x % d) % d).collect()
    }

    pub fn normalize(&self, a: &[u64]) -> Elem {
        a.iter().zip(&self.factors).map(|(x, d)| x % d).collect()
    }

    pub fn elements(&self) -> Vec<Elem> {
        let mut out = vec![vec![]];
        for &d in &self.factors {
            out = out.into_iter().flat_map(|e: Elem| (0..d).map(move |x| [e.clone(), vec![x]].concat())).collect();
        }
        out
    }

    /// Subgroup generated by `gens`, sorted.
    pub fn generated(&self, gens: &[Elem]) -> Vec<Elem> {
        let mut seen: BTreeSet<Elem> = std::iter::once(self.zero()).collect();
        let mut queue: VecDeque<Elem> = std::iter::once(self.zero()).collect();
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = self.add(&x, g);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().collect()
    }
}

/// Goursat data of a subdirect `M ⊂ A×B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoursatData {
    /// `{b : (0, b) ∈ M}`, the kernel of `M → A`.
    pub k1: Vec<Elem>,
    /// `{a : (a, 0) ∈ M}`, the kernel of `M → B`.
    pub k2: Vec<Elem>,
    /// `A/K2 → B/K1`, keyed by least coset representatives.
    pub table: Vec<(Elem, Elem)>,
}

fn coset_rep(g: &AbelianGroup, x: &Elem, k: &[Elem]) -> Elem {
    k.iter().map(|y| g.add(x, y)).min().expect("subgroup contains 0")
}

/// Goursat decomposition of the subgroup of `A×B` generated by `gens`.
pub fn goursat(a: &AbelianGroup, b: &AbelianGroup, gens: &[(Elem, Elem)]) -> Result<GoursatData> {
    let ab = AbelianGroup::new([a.factors.clone(), b.factors.clone()].concat())?;
    let la = a.factors.len();
    let gs: Vec<Elem> = gens
        .iter()
        .map(|(x, y)| {
            if x.len() != la || y.len() != b.factors.len() {
                Err(Error::invalid("generator does not match group shapes"))
            } else {
                Ok(ab.normalize(&[x.clone(), y.clone()].concat()))
            }
        })
        .collect::<Result<_>>()?;
    let m = ab.generated(&gs);
    let pa: BTreeSet<Elem> = m.iter().map(|e| e[..la].to_vec()).collect();
    let pb: BTreeSet<Elem> = m.iter().map(|e| e[la..].to_vec()).collect();
    if pa.len() as u64 != a.order() {
        return Err(Error::NotSubdirect("A"));
    }
    if pb.len() as u64 != b.order() {
        return Err(Error::NotSubdirect("B"));
    }
    let za = a.zero();
    let zb = b.zero();
    let k1: Vec<Elem> = m.iter().filter(|e| e[..la] == za[..]).map(|e| e[la..].to_vec()).collect();
    let k2: Vec<Elem> = m.iter().filter(|e| e[la..] == zb[..]).map(|e| e[..la].to_vec()).collect();
    let mut table: BTreeMap<Elem, Elem> = BTreeMap::new();
    for e in &m {
        let ra = coset_rep(a, &e[..la].to_vec(), &k2);
        let rb = coset_rep(b, &e[la..].to_vec(), &k1);
        if let Some(prev) = table.insert(ra, rb.clone()) {
            if prev != rb {
                return Err(Error::invalid("internal: image is not a graph"));
            }
        }
    }
    Ok(GoursatData { k1, k2, table: table.into_iter().collect() })
}

/// The table is a well-defined bijective homomorphism `A/K2 → B/K1`.
pub fn verify_goursat(a: &AbelianGroup, b: &AbelianGroup, d: &GoursatData) -> bool {
    let map: BTreeMap<&Elem, &Elem> = d.table.iter().map(|(x, y)| (x, y)).collect();
    let images: BTreeSet<&Elem> = map.values().copied().collect();
    let qa = a.order() as usize / d.k2.len();
    let qb = b.order() as usize / d.k1.len();
    if map.len() != qa || images.len() != qb || qa != qb {
        return false;
    }
    for (x, fx) in &d.table {
        for (y, fy) in &d.table {
            let s = coset_rep(a, &a.add(x, y), &d.k2);
            let t = coset_rep(b, &b.add(fx, fy), &d.k1);
            if map.get(&s) != Some(&&t) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lat(n: usize, vs: &[Vec<i64>]) -> Sublattice {
        Sublattice::span_i64(n, vs).unwrap()
    }

    #[test]
    fn independence_examples() {
        assert!(independent(&[1, 2, 3]).unwrap());
        assert!(!independent(&[1, 2, 3, 6]).unwrap());
        assert!(independent(&[5]).unwrap());
        assert!(independent(&[4]).is_err());
    }

    fn squareful_subset(ms: &[u64]) -> bool {
        // some nonempty subset has ∏(−m_i) a perfect square
        (1u32..1 << ms.len()).any(|mask| {
            let chosen: Vec<u64> = (0..ms.len()).filter(|i| mask >> i & 1 == 1).map(|i| ms[i]).collect();
            let neg = chosen.len() % 2 == 1;
            let prod: u128 = chosen.iter().map(|&m| m as u128).product();
            let r = (prod as f64).sqrt().round() as u128;
            !neg && r * r == prod
        })
    }

    #[test]
    fn independence_matches_subset_products() {
        let pool = [1u64, 2, 3, 5, 6, 7, 10];
        for mask in 1u32..1 << pool.len() {
            if mask.count_ones() > 4 {
                continue;
            }
            let ms: Vec<u64> = (0..pool.len()).filter(|i| mask >> i & 1 == 1).map(|i| pool[i]).collect();
            assert_eq!(independent(&ms).unwrap(), !squareful_subset(&ms), "{ms:?}");
            if independent(&ms).unwrap() {
                assert!(SignModule::for_fields(&ms).characters_distinct());
            }
        }
    }

    #[test]
    fn stable_saturation_examples() {
        let m = SignModule::independent_signs(2);
        assert_eq!(stable_saturation(&lat(2, &[vec![1, 1]]), &m).unwrap(), Sublattice::full(2));
        assert_eq!(stable_saturation(&lat(2, &[vec![1, 0]]), &m).unwrap(), Sublattice::coordinate(2, &[0]));
        assert_eq!(stable_saturation(&Sublattice::zero(2), &m).unwrap(), Sublattice::zero(2));
    }

    #[test]
    fn minimal_subtorus_examples() {
        assert!(minimal_subtorus_check(&SignModule::independent_signs(1)));
        assert!(minimal_subtorus_check(&SignModule::independent_signs(2)));
        let same = SignModule::new(2, vec![vec![-1, -1]]).unwrap();
        assert!(!minimal_subtorus_check(&same));
        let diag = lat(2, &[vec![1, 1]]);
        assert!(diag.is_stable(&same) && diag.is_saturated() && diag.projections_nonzero());
    }

    #[test]
    fn goursat_examples() {
        let z2 = AbelianGroup::new(vec![2]).unwrap();
        let d = goursat(&z2, &z2, &[(vec![1], vec![1])]).unwrap();
        assert_eq!((d.k1.len(), d.k2.len()), (1, 1));
        assert_eq!(d.table, vec![(vec![0], vec![0]), (vec![1], vec![1])]);
        let z4 = AbelianGroup::new(vec![4]).unwrap();
        let d = goursat(&z4, &z4, &[(vec![1], vec![3])]).unwrap();
        assert_eq!((d.k1.len(), d.k2.len()), (1, 1));
        assert_eq!(d.table, (0..4).map(|x| (vec![x], vec![3 * x % 4])).collect::<Vec<_>>());
        let z3 = AbelianGroup::new(vec![3]).unwrap();
        let d = goursat(&z2, &z3, &[(vec![1], vec![0]), (vec![0], vec![1])]).unwrap();
        assert_eq!(d.k1, z3.elements());
        assert_eq!(d.k2, z2.elements());
        assert_eq!(d.table, vec![(vec![0], vec![0])]);
        assert!(verify_goursat(&z2, &z3, &d));
        assert_eq!(goursat(&z2, &z3, &[(vec![1], vec![0])]).unwrap_err(), Error::NotSubdirect("B"));
        assert_eq!(goursat(&z2, &z3, &[(vec![0], vec![1])]).unwrap_err(), Error::NotSubdirect("A"));
    }

    fn random_lattice(n: usize, rng: &mut ChaCha8Rng) -> Sublattice {
        let k = rng.gen_range(0..=n);
        let vs: Vec<Vec<i64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(-4..=4)).collect()).collect();
        lat(n, &vs)
    }

    fn random_sign_module(n: usize, rng: &mut ChaCha8Rng) -> SignModule {
        let g = rng.gen_range(1..=3);
        let gens = (0..g).map(|_| (0..n).map(|_| if rng.gen_bool(0.5) { -1 } else { 1 }).collect()).collect();
        SignModule::new(n, gens).unwrap()
    }

    #[test]
    fn stable_saturation_is_a_closure_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=4);
            let m = random_sign_module(n, &mut rng);
            let l = random_lattice(n, &mut rng);
            let l2 = l.sum(&random_lattice(n, &mut rng));
            let c = stable_saturation(&l, &m).unwrap();
            assert!(l.is_subset_of(&c));
            assert!(c.is_stable(&m) && c.is_saturated());
            assert_eq!(stable_saturation(&c, &m).unwrap(), c);
            assert!(c.is_subset_of(&stable_saturation(&l2, &m).unwrap()));
        }
    }

    fn all_closures(m: &SignModule) -> BTreeSet<Sublattice> {
        let n = m.rank();
        let mut out = BTreeSet::new();
        for code in 0..7usize.pow(n as u32) {
            let mut c = code;
            let v: Vec<i64> = (0..n)
                .map(|_| {
                    let d = (c % 7) as i64 - 3;
                    c /= 7;
                    d
                })
                .collect();
            out.insert(stable_saturation(&lat(n, &[v]), m).unwrap());
        }
        // sums of closures are stable; close under saturation of sums
        let base: Vec<_> = out.iter().cloned().collect();
        for a in &base {
            for b in &base {
                out.insert(stable_saturation(&a.sum(b), m).unwrap());
            }
        }
        out
    }

    #[test]
    fn stable_saturated_sublattices_are_coordinate_exhaustive() {
        for n in 1..=3 {
            let m = SignModule::independent_signs(n);
            let found = all_closures(&m);
            assert_eq!(found.len(), 1 << n);
            assert!(found.iter().all(|l| l.coordinate_support().is_some()));
        }
    }

    #[test]
    fn stable_saturated_sublattices_are_coordinate_rank_four() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = SignModule::independent_signs(4);
        let mut seen = BTreeSet::new();
        for _ in 0..10_000 {
            let l = random_lattice(4, &mut rng);
            let c = stable_saturation(&l, &m).unwrap();
            assert!(c.coordinate_support().is_some());
            seen.insert(c);
        }
        assert!(seen.len() <= 16);
    }

    #[test]
    fn minimal_check_matches_character_criterion() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..60 {
            let n = rng.gen_range(1..=3);
            let m = random_sign_module(n, &mut rng);
            assert_eq!(minimal_subtorus_check(&m), m.characters_distinct(), "{m:?}");
        }
    }

    fn random_group(rng: &mut ChaCha8Rng, max: u64) -> AbelianGroup {
        loop {
            let k = rng.gen_range(1..=2);
            let f: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=8)).collect();
            if f.iter().product::<u64>() <= max {
                return AbelianGroup::new(f).unwrap();
            }
        }
    }

    #[test]
    fn goursat_on_random_subdirect_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut checked = 0;
        while checked < 1000 {
            let a = random_group(&mut rng, 8);
            let b = random_group(&mut rng, 64 / a.order());
            let rand_elem = |g: &AbelianGroup, rng: &mut ChaCha8Rng| -> Elem {
                g.factors().iter().map(|&d| rng.gen_range(0..d)).collect()
            };
            let mut gens: Vec<(Elem, Elem)> =
                (0..rng.gen_range(1..=3)).map(|_| (rand_elem(&a, &mut rng), rand_elem(&b, &mut rng))).collect();
            // make both projections onto by pairing each standard generator with a random partner
            for i in 0..a.factors().len() {
                let mut e = a.zero();
                e[i] = 1 % a.factors()[i];
                gens.push((e, rand_elem(&b, &mut rng)));
            }
            for i in 0..b.factors().len() {
                let mut e = b.zero();
                e[i] = 1 % b.factors()[i];
                gens.push((rand_elem(&a, &mut rng), e));
            }
            let d = goursat(&a, &b, &gens).unwrap();
            assert!(verify_goursat(&a, &b, &d));
            // |M| = |A|·|K1|
            let ab = AbelianGroup::new([a.factors().to_vec(), b.factors().to_vec()].concat()).unwrap();
            let flat: Vec<Elem> = gens.iter().map(|(x, y)| [x.clone(), y.clone()].concat()).collect();
            assert_eq!(ab.generated(&flat).len() as u64, a.order() * d.k1.len() as u64);
            checked += 1;
        }
    }

    proptest! {
        #[test]
        fn hnf_is_canonical(seed in 0u64..5000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..=4);
            let l = random_lattice(n, &mut rng);
            // a unimodular change of generators gives the same canonical basis
            let mut rows: Vec<Vec<BigInt>> = l.basis().to_vec();
            if rows.len() >= 2 {
                let k: i64 = rng.gen_range(-3..=3);
                let r1 = rows[1].clone();
                for (x, y) in rows[0].iter_mut().zip(&r1) {
                    *x += BigInt::from(k) * y;
                }
                rows.swap(0, 1);
            }
            rows.push(vec![BigInt::zero(); n]);
            prop_assert_eq!(Sublattice::span(n, &rows).unwrap(), l);
        }

        #[test]
        fn kernel_is_saturated_and_orthogonal(seed in 0u64..5000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..=4);
            let l = random_lattice(n, &mut rng);
            let ker = integer_kernel(l.basis(), n);
            prop_assert_eq!(ker.len() + l.rank(), n);
            for k in &ker {
                for b in l.basis() {
                    let dot: BigInt = k.iter().zip(b).map(|(x, y)| x * y).sum();
                    prop_assert!(dot.is_zero());
                }
            }
            prop_assert!(Sublattice::span(n, &ker).unwrap().is_saturated());
        }
    }
}
