//! Level-`N` shadows of the Galois action on CM points: tuples of normalizer
//! matrices `r_m ∈ N_{√−m}(ℤ/N)` with a common determinant and branch.
//!
//! A shadow acts as the adelic element whose component is `r̄_m` at primes
//! dividing `N` and `d_{−1}^ε` elsewhere (ε = 0 for branch +1, 1 for −1).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::adele::{self, shape_level, shape_rational, shape_test_level, shape_test_rational, AdelicMatrix, LevelMatrix, RatMatrix, ShapeKind};
use crate::error::{Error, Result};
use crate::numth::{self, crt, factor_u64, gcd_u64, inv_mod, mul_mod, Place, Residue};
use crate::qforms::{solve_form_rational, NormSolution};
use crate::shimura::{canonical_point, orbit_rep, LevelPoint};

/// `(r_m)_{m ∈ M}` with common determinant and branch, at level `N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaloisShadow {
    level: u64,
    support: Vec<u64>,
    components: Vec<LevelMatrix>,
    branch: i8,
    det: u64,
}

fn check_support(support: &[u64]) -> Result<()> {
    if support.is_empty() {
        return Err(Error::invalid("empty support"));
    }
    for (i, &m) in support.iter().enumerate() {
        if m == 0 || !numth::is_squarefree_u64(m) {
            return Err(Error::invalid(format!("{m} is not a square-free positive integer")));
        }
        if support[..i].contains(&m) {
            return Err(Error::invalid(format!("{m} repeated in support")));
        }
    }
    Ok(())
}

impl GaloisShadow {
    pub fn new(level: u64, support: Vec<u64>, components: Vec<LevelMatrix>, branch: i8) -> Result<Self> {
        check_support(&support)?;
        if components.len() != support.len() {
            return Err(Error::invalid("one component per support element"));
        }
        let kind = |m| ShapeKind::new(m, branch);
        let det = components[0].det();
        if gcd_u64(det, level) != 1 {
            return Err(Error::invalid("determinant is not a unit"));
        }
        for (&m, c) in support.iter().zip(&components) {
            if c.level() != level {
                return Err(Error::invalid("component level mismatch"));
            }
            if shape_test_level(c, kind(m)?).is_none() {
                return Err(Error::invalid(format!("component for m = {m} is not a branch {branch} shape matrix")));
            }
            if c.det() != det {
                return Err(Error::invalid("components have different determinants"));
            }
        }
        Ok(GaloisShadow { level, support, components, branch, det })
    }

    pub fn identity(level: u64, support: Vec<u64>) -> Result<Self> {
        let comps = vec![LevelMatrix::identity(level); support.len()];
        Self::new(level, support, comps, 1)
    }

    /// `(d_{−1}, …, d_{−1})`, the generator of the branch quotient.
    pub fn all_d_minus_one(level: u64, support: Vec<u64>) -> Result<Self> {
        let d = LevelMatrix::new([-1, 0, 0, 1], level)?;
        let comps = vec![d; support.len()];
        Self::new(level, support, comps, -1)
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn components(&self) -> &[LevelMatrix] {
        &self.components
    }

    pub fn branch(&self) -> i8 {
        self.branch
    }

    pub fn det(&self) -> u64 {
        self.det
    }

    pub fn component_for(&self, m: u64) -> Option<&LevelMatrix> {
        self.support.iter().position(|&x| x == m).map(|i| &self.components[i])
    }

    fn same_frame(&self, o: &GaloisShadow) -> Result<()> {
        if self.level != o.level || self.support != o.support {
            return Err(Error::invalid("shadows with different support or level"));
        }
        Ok(())
    }

    pub fn inv(&self) -> GaloisShadow {
        GaloisShadow {
            level: self.level,
            support: self.support.clone(),
            components: self.components.iter().map(|c| c.inv()).collect(),
            branch: self.branch,
            det: inv_mod(self.det, self.level).unwrap_or(0),
        }
    }

    /// Restriction to a sub-support.
    pub fn restrict(&self, support: &[u64]) -> Result<GaloisShadow> {
        let comps = support
            .iter()
            .map(|&m| self.component_for(m).copied().ok_or(Error::UnsupportedOrbit(m)))
            .collect::<Result<Vec<_>>>()?;
        GaloisShadow::new(self.level, support.to_vec(), comps, self.branch)
    }

    /// Reduction to a divisor level.
    pub fn project(&self, n2: u64) -> Result<GaloisShadow> {
        let comps = self.components.iter().map(|c| c.reduce_to(n2)).collect::<Result<Vec<_>>>()?;
        GaloisShadow::new(n2, self.support.clone(), comps, self.branch)
    }
}

impl std::fmt::Display for GaloisShadow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "shadow(N={}, branch={}, det={}", self.level, self.branch, self.det)?;
        for (m, c) in self.support.iter().zip(&self.components) {
            write!(f, ", m={m}: {c}")?;
        }
        write!(f, ")")
    }
}

pub fn shadow_mul(s1: &GaloisShadow, s2: &GaloisShadow) -> Result<GaloisShadow> {
    s1.same_frame(s2)?;
    Ok(GaloisShadow {
        level: s1.level,
        support: s1.support.clone(),
        components: s1.components.iter().zip(&s2.components).map(|(a, b)| a.mul(b)).collect(),
        branch: s1.branch * s2.branch,
        det: mul_mod(s1.det, s2.det, s1.level),
    })
}

/// `r′_m·r_m⁻¹` is a unit-determinant branch +1 shape matrix for every `m`.
pub fn shadow_eq(s1: &GaloisShadow, s2: &GaloisShadow) -> Result<bool> {
    s1.same_frame(s2)?;
    Ok(s1
        .support
        .iter()
        .zip(s1.components.iter().zip(&s2.components))
        .all(|(&m, (a, b))| shape_test_level(&b.mul(&a.inv()), ShapeKind::torus(m)).is_some()))
}

fn act_in_frame(sigma: &GaloisShadow, r_bar: &LevelMatrix, p: &LevelPoint) -> Result<LevelPoint> {
    let n = sigma.level;
    let (_, rho) = orbit_rep(p.tau());
    let r = p.a().r();
    let c = r.inv().expect("invertible").mul(&rho);
    let c_bar = c.to_level(n)?;
    let c_inv = c_bar.inv();
    let d = LevelMatrix::new([-1, 0, 0, 1], n)?;
    let (rational, k) = if sigma.branch == 1 {
        (r.clone(), *r_bar)
    } else {
        // r_m = d_{−1}·k with k a torus unit at N and trivial elsewhere;
        // the global d_{−1} moves into the rational part as ρ·d_{−1}·ρ⁻¹.
        let dr = RatMatrix::from_ints(-1, 0, 0, 1);
        let x = rho.mul(&dr).mul(&rho.inv().expect("invertible"));
        (x.mul(r), d.mul(r_bar))
    };
    let u = c_bar.mul(&k).mul(&c_inv).mul(&p.unit());
    LevelPoint::new(p.tau().clone(), AdelicMatrix::with_unit(rational, &u))
}

/// `[τ, a] ↦ [τ, ρ·r_m·ρ⁻¹·a]` with `ρ` the orbit representative of `τ`.
///
/// If the conjugator `r⁻¹·ρ` is not invertible mod N on the given
/// representative, the canonical representative is tried before giving up.
pub fn shadow_act(sigma: &GaloisShadow, p: &LevelPoint) -> Result<LevelPoint> {
    if p.level() != sigma.level {
        return Err(Error::invalid("level mismatch"));
    }
    let m = p.tau().m();
    let r_bar = *sigma.component_for(m).ok_or(Error::UnsupportedOrbit(m))?;
    match act_in_frame(sigma, &r_bar, p) {
        Err(Error::PrecisionObstruction(prime)) => {
            act_in_frame(sigma, &r_bar, &canonical_point(p)).map_err(|_| Error::PrecisionObstruction(prime))
        }
        other => other,
    }
}

pub fn branch_map(sigma: &GaloisShadow) -> i8 {
    sigma.branch
}

/// Membership in the torus part: branch +1.
pub fn torus_kernel_test(sigma: &GaloisShadow) -> bool {
    sigma.branch == 1
}

/// The factor `λ` by which the shadow moves component labels.
pub fn component_action(sigma: &GaloisShadow) -> Residue {
    Residue::new(sigma.det as i64, sigma.level)
}

// ---------------------------------------------------------------- common determinants

fn good_level(support: &[u64], n: u64) -> Result<()> {
    let prod = support.iter().fold(2 % n, |acc, &m| mul_mod(acc, m % n, n));
    let g = gcd_u64(n, prod);
    if g != 1 {
        return Err(Error::LevelObstruction { level: n, gcd: g });
    }
    Ok(())
}

/// `(x, y)` mod N with `x² + m·y² ≡ λ`, searched per prime power and combined
/// by CRT: the diagonal witness `(√λ, 0)` when λ is a square, else x ascending
/// with the least square root for y.
pub fn solve_norm_mod(m: u64, lambda: u64, n: u64) -> Option<(u64, u64)> {
    if n == 1 {
        return Some((0, 0));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (p, k) in factor_u64(n) {
        let q = p.pow(k);
        let l = lambda % q;
        let mi = inv_mod(m % q, q)?;
        let mut found = numth::sqrt_mod(l, p, k).map(|x| (x, 0));
        for x in 0..q {
            if found.is_some() {
                break;
            }
            let t = mul_mod((l + q - mul_mod(x, x, q)) % q, mi, q);
            if let Some(y) = numth::sqrt_mod(t, p, k) {
                found = Some((x, y));
                break;
            }
        }
        let (x, y) = found?;
        xs.push((x, q));
        ys.push((y, q));
    }
    Some((crt(&xs).0, crt(&ys).0))
}

/// Shadow of branch +1 with common determinant `λ` and its `(x, y)` witnesses.
pub fn common_det_witness(support: &[u64], n: u64, lambda: u64) -> Result<(GaloisShadow, Vec<(u64, u64)>)> {
    check_support(support)?;
    good_level(support, n)?;
    if gcd_u64(lambda % n, n) != 1 {
        return Err(Error::invalid(format!("{lambda} is not a unit mod {n}")));
    }
    let mut comps = Vec::new();
    let mut wits = Vec::new();
    for &m in support {
        let (x, y) = solve_norm_mod(m, lambda % n, n).ok_or_else(|| Error::invalid("no local solution"))?;
        comps.push(shape_level(x as i64, y as i64, ShapeKind::torus(m), n));
        wits.push((x, y));
    }
    Ok((GaloisShadow::new(n, support.to_vec(), comps, 1)?, wits))
}

/// For every unit `λ` mod N, a witness shadow with common determinant `λ`.
pub fn surjective_common_det(support: &[u64], n: u64) -> Result<Vec<(u64, GaloisShadow, Vec<(u64, u64)>)>> {
    check_support(support)?;
    good_level(support, n)?;
    adele::units(n)
        .into_iter()
        .map(|l| common_det_witness(support, n, l).map(|(s, w)| (l, s, w)))
        .collect()
}

// ---------------------------------------------------------------- determinant equalization

/// One adjuster `g⁰_m = (s, m·t; −t, s)` of norm `s² + m·t²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjuster {
    pub m: u64,
    pub s: BigRational,
    pub t: BigRational,
    pub norm: BigRational,
}

impl Adjuster {
    pub fn matrix(&self) -> RatMatrix {
        shape_rational(&self.s, &self.t, ShapeKind::torus(self.m))
    }
}

/// Rational torus adjusters bringing every determinant to `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationCertificate {
    pub target: BigRational,
    pub adjusters: Vec<Adjuster>,
}

impl NormalizationCertificate {
    /// Every claimed norm identity holds and every adjusted determinant is the target.
    pub fn verify(&self, inputs: &[(u64, RatMatrix)]) -> bool {
        if inputs.len() != self.adjusters.len() {
            return false;
        }
        inputs.iter().zip(&self.adjusters).all(|((m, r), a)| {
            let mr = BigRational::from_integer(BigInt::from(*m));
            *m == a.m
                && &a.s * &a.s + mr * &a.t * &a.t == a.norm
                && shape_test_rational(&a.matrix(), ShapeKind::torus(*m)).is_some()
                && a.matrix().mul(r).det() == self.target
        })
    }
}

/// Adjust exact normalizer matrices `r_m` by rational torus elements so that
/// all determinants equal `target` (default: the common determinant if the
/// inputs already agree, else ±1 with the sign of the first), and reduce the result mod N.
pub fn equalize_dets(
    inputs: &[(u64, RatMatrix)],
    target: Option<BigRational>,
    level: u64,
) -> Result<(GaloisShadow, NormalizationCertificate)> {
    if inputs.is_empty() {
        return Err(Error::invalid("no inputs"));
    }
    let support: Vec<u64> = inputs.iter().map(|(m, _)| *m).collect();
    check_support(&support)?;
    let branch = {
        let (m0, r0) = &inputs[0];
        if shape_test_rational(r0, ShapeKind::torus(*m0)).is_some() {
            1
        } else {
            -1
        }
    };
    for (m, r) in inputs {
        if shape_test_rational(r, ShapeKind::new(*m, branch)?).is_none() {
            return Err(Error::invalid(format!("input for m = {m} is not a branch {branch} normalizer matrix")));
        }
    }
    let dets: Vec<BigRational> = inputs.iter().map(|(_, r)| r.det()).collect();
    let target = target.unwrap_or_else(|| {
        if dets.iter().all(|d| *d == dets[0]) {
            dets[0].clone()
        } else if dets[0].is_negative() {
            -BigRational::one()
        } else {
            BigRational::one()
        }
    });
    if target.is_zero() {
        return Err(Error::invalid("target determinant must be nonzero"));
    }
    let mut adjusters = Vec::new();
    let mut comps = Vec::new();
    for ((m, r), d) in inputs.iter().zip(&dets) {
        let norm = &target / d;
        if norm.is_negative() {
            // a negative ratio is not a norm from an imaginary quadratic field
            return Err(Error::NormObstruction(Place::Infinity.code()));
        }
        let (s, t) = if norm.is_one() {
            (BigRational::one(), BigRational::zero())
        } else {
            match solve_form_rational(*m, &norm)? {
                NormSolution::Found { s, t } => (s, t),
                NormSolution::Obstructed { place, .. } => return Err(Error::NormObstruction(place.code())),
            }
        };
        let adj = Adjuster { m: *m, s, t, norm };
        comps.push(adj.matrix().mul(r).to_level(level)?);
        adjusters.push(adj);
    }
    let shadow = GaloisShadow::new(level, support, comps, branch)?;
    Ok((shadow, NormalizationCertificate { target, adjusters }))
}

// ---------------------------------------------------------------- enumeration

/// Elements of `N_{√−m}(ℤ/N)` of a branch and determinant.
pub fn normalizer_elements(m: u64, n: u64, branch: i8, det: u64) -> Vec<LevelMatrix> {
    let mut out = Vec::new();
    let kind = ShapeKind { m, branch };
    for x in 0..n as i64 {
        for y in 0..n as i64 {
            let g = shape_level(x, y, kind, n);
            if g.det() == det % n && gcd_u64(g.det(), n) == 1 {
                out.push(g);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Every shadow at level N over the support, sorted.
pub fn enumerate_shadows(support: &[u64], n: u64) -> Result<Vec<GaloisShadow>> {
    check_support(support)?;
    let mut out = Vec::new();
    for lambda in adele::units(n) {
        for branch in [1i8, -1] {
            let per: Vec<Vec<LevelMatrix>> =
                support.iter().map(|&m| normalizer_elements(m, n, branch, lambda)).collect();
            let mut idx = vec![0usize; support.len()];
            if per.iter().any(|v| v.is_empty()) {
                continue;
            }
            'outer: loop {
                let comps = idx.iter().zip(&per).map(|(&i, v)| v[i]).collect();
                out.push(GaloisShadow { level: n, support: support.to_vec(), components: comps, branch, det: lambda % n.max(1) });
                for j in (0..idx.len()).rev() {
                    idx[j] += 1;
                    if idx[j] < per[j].len() {
                        continue 'outer;
                    }
                    idx[j] = 0;
                }
                break;
            }
        }
    }
    out.sort();
    Ok(out)
}
