//! The quotient `S_≈` of level-`N` points by right multiplication with
//! `d_λ = diag(λ, 1)`: canonical representatives, the curves `C^μ_h`, the
//! four-point relation `R` on CM points, faithfulness of shadows, and the lift
//! of an `R`-consistent table to a Galois shadow.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::adele::{conj_by_dlambda, units, LevelMatrix};
use crate::error::{Error, Result};
use crate::galois::{normalizer_elements, shadow_act, shadow_eq, GaloisShadow};
use crate::numth::inv_mod;
use crate::qforms::QuadPoint;
use crate::shimura::{act_unit, canonical_key, component, point_eq, CanonicalKey, LevelPoint};

/// Class `[τ, a·Δ]` of a level-`N` point.
#[derive(Debug, Clone)]
pub struct ApproxPoint {
    point: LevelPoint,
    key: CanonicalKey,
}

impl ApproxPoint {
    pub fn new(point: LevelPoint) -> Self {
        let key = canonical_key(&canonical_rep(&point));
        ApproxPoint { point, key }
    }

    pub fn point(&self) -> &LevelPoint {
        &self.point
    }

    pub fn level(&self) -> u64 {
        self.point.level()
    }

    /// Canonical key of the canonical representative; equal iff `approx_eq`.
    pub fn key(&self) -> &CanonicalKey {
        &self.key
    }
}

impl PartialEq for ApproxPoint {
    fn eq(&self, o: &Self) -> bool {
        self.level() == o.level() && self.key == o.key
    }
}

impl Eq for ApproxPoint {}

impl std::hash::Hash for ApproxPoint {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.key.hash(h)
    }
}

/// `P·d_{μ⁻¹}` with `μ = component(P)`: the representative in component 1.
pub fn canonical_rep(p: &LevelPoint) -> LevelPoint {
    let n = p.level();
    let mu = component(p).value();
    act_unit(&LevelMatrix::d(mu, n), p).expect("same level")
}

pub fn approx_eq(p1: &LevelPoint, p2: &LevelPoint) -> bool {
    p1.level() == p2.level() && ApproxPoint::new(p1.clone()) == ApproxPoint::new(p2.clone())
}

/// Literal search for `λ` with `P1 = P2·d_λ`.
pub fn approx_eq_search(p1: &LevelPoint, p2: &LevelPoint) -> Result<Option<u64>> {
    let n = p1.level();
    for lambda in units(n) {
        let li = inv_mod(lambda, n).unwrap_or(0);
        if point_eq(p1, &act_unit(&LevelMatrix::d(li, n), p2)?)?.is_some() {
            return Ok(Some(lambda));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------- curves

/// Label of `C^μ_h`: the graph of `h` on component `μ⁻¹`, read on `S_≈`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CurveComponentLabel {
    h: LevelMatrix,
    mu: u64,
}

impl CurveComponentLabel {
    pub fn h(&self) -> &LevelMatrix {
        &self.h
    }

    pub fn mu(&self) -> u64 {
        self.mu
    }

    /// `d_μ⁻¹·h·d_μ`, the matrix applied to canonical representatives.
    pub fn acting_matrix(&self) -> LevelMatrix {
        conj_by_dlambda(&self.h, self.mu).expect("unit checked at construction")
    }
}

pub fn curve_component(h: &LevelMatrix, mu: u64) -> Result<CurveComponentLabel> {
    let n = h.level();
    if h.det() != 1 % n {
        return Err(Error::invalid("curve matrices must have determinant 1"));
    }
    let mu = mu % n;
    if inv_mod(mu, n).is_none() {
        return Err(Error::invalid(format!("{mu} is not a unit mod {n}")));
    }
    Ok(CurveComponentLabel { h: *h, mu })
}

pub fn eval_curve(label: &CurveComponentLabel, p: &LevelPoint) -> Result<ApproxPoint> {
    if p.level() != label.h.level() {
        return Err(Error::invalid("level mismatch"));
    }
    Ok(ApproxPoint::new(act_unit(&label.acting_matrix(), &canonical_rep(p))?))
}

// ---------------------------------------------------------------- relation R

/// Witness for `R(s1, s2, t1, t2)`: common determinant and branch, and the
/// normalizer matrices moving `s_i` to `t_i` in `S_≈`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationWitness {
    pub lambda: u64,
    pub branch: i8,
    pub r1: LevelMatrix,
    pub r2: LevelMatrix,
}

type Image = (i8, u64, LevelMatrix);

/// Memoized images of CM points under every single-orbit normalizer element.
#[derive(Debug, Default)]
pub struct RelationSolver {
    cache: HashMap<(u64, CanonicalKey), BTreeMap<Image, CanonicalKey>>,
}

impl RelationSolver {
    pub fn new() -> Self {
        Self::default()
    }

    /// `(branch, det, r) ↦ class of r·s` over all of `N̄_{√−m}(ℤ/N)`.
    pub fn images(&mut self, s: &LevelPoint) -> Result<&BTreeMap<Image, CanonicalKey>> {
        let n = s.level();
        let m = s.tau().m();
        let rep = canonical_rep(s);
        let ck = (m, canonical_key(&rep));
        if !self.cache.contains_key(&ck) {
            let mut out = BTreeMap::new();
            for branch in [1i8, -1] {
                for det in units(n) {
                    for r in normalizer_elements(m, n, branch, det) {
                        let sigma = GaloisShadow::new(n, vec![m], vec![r], branch)?;
                        let img = shadow_act(&sigma, &rep)?;
                        out.insert((branch, det, r), ApproxPoint::new(img).key);
                    }
                }
            }
            self.cache.insert(ck.clone(), out);
        }
        Ok(&self.cache[&ck])
    }

    fn matches(&mut self, s: &LevelPoint, t: &LevelPoint) -> Result<BTreeSet<Image>> {
        let target = ApproxPoint::new(t.clone()).key;
        Ok(self.images(s)?.iter().filter(|(_, k)| **k == target).map(|(i, _)| *i).collect())
    }

    /// `R(s1, s2, t1, t2)`: normalizer matrices of one branch and one
    /// determinant `λ` (the same matrix when both pairs lie in one orbit) with
    /// `t_i ≈ r_i·s_i`.
    pub fn relation(
        &mut self,
        s1: &LevelPoint,
        s2: &LevelPoint,
        t1: &LevelPoint,
        t2: &LevelPoint,
    ) -> Result<Option<RelationWitness>> {
        let n = s1.level();
        if [s2, t1, t2].iter().any(|p| p.level() != n) {
            return Err(Error::invalid("points at different levels"));
        }
        let (m1, m2) = (s1.tau().m(), s2.tau().m());
        if t1.tau().m() != m1 || t2.tau().m() != m2 {
            return Ok(None);
        }
        let c1 = self.matches(s1, t1)?;
        let c2 = self.matches(s2, t2)?;
        // order: λ ascending, branch +1 first, then matrices
        let key = |(b, d, _): &Image| (*d, -*b);
        let mut best: Option<RelationWitness> = None;
        for a in &c1 {
            for b in &c2 {
                if a.0 != b.0 || a.1 != b.1 || (m1 == m2 && a.2 != b.2) {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some(w) => (key(a), a.2, b.2) < ((w.lambda, -w.branch), w.r1, w.r2),
                };
                if better {
                    best = Some(RelationWitness { lambda: a.1, branch: a.0, r1: a.2, r2: b.2 });
                }
            }
        }
        Ok(best)
    }
}

pub fn relation_r(s1: &LevelPoint, s2: &LevelPoint, t1: &LevelPoint, t2: &LevelPoint) -> Result<Option<RelationWitness>> {
    RelationSolver::new().relation(s1, s2, t1, t2)
}

// ---------------------------------------------------------------- faithfulness

/// Points `[τ, u]` for `τ ∈ {√−m, 1 + √−m}` and `u ∈ {I, T, Tᵗ, S, T·Tᵗ}`.
pub fn spanning_sample(support: &[u64], n: u64) -> Result<Vec<LevelPoint>> {
    let us = [[1, 0, 0, 1], [1, 1, 0, 1], [1, 0, 1, 1], [0, -1, 1, 0], [2, 1, 1, 1]];
    let mut out = Vec::new();
    for &m in support {
        for p in [0, 1] {
            let tau = QuadPoint::from_ints(m, (p, 1), (1, 1))?;
            for u in us {
                out.push(LevelPoint::with_unit(tau.clone(), &LevelMatrix::new(u, n)?));
            }
        }
    }
    Ok(out)
}

/// Whether `σ` fixes every sampled point of `S_≈`.
pub fn acts_trivially(sigma: &GaloisShadow, sample: &[LevelPoint]) -> Result<bool> {
    for p in sample {
        if ApproxPoint::new(shadow_act(sigma, p)?) != ApproxPoint::new(p.clone()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A sampled point moved by the all-`d_{−1}` shadow, if any.
pub fn d_minus_one_separator(level: u64, support: &[u64], sample: &[LevelPoint]) -> Result<Option<LevelPoint>> {
    let d = GaloisShadow::all_d_minus_one(level, support.to_vec())?;
    for p in sample {
        if ApproxPoint::new(shadow_act(&d, p)?) != ApproxPoint::new(p.clone()) {
            return Ok(Some(p.clone()));
        }
    }
    Ok(None)
}

/// Trivial action on the sample forces `σ ≡ identity` modulo the torus shadow;
/// the branch −1 alternative is ruled out by a separating point for `d_{−1}`.
/// An empty sample is replaced by [`spanning_sample`].
pub fn faithfulness_check(sigma: &GaloisShadow, sample: &[LevelPoint]) -> Result<bool> {
    let owned;
    let sample = if sample.is_empty() {
        owned = spanning_sample(sigma.support(), sigma.level())?;
        &owned[..]
    } else {
        sample
    };
    if !acts_trivially(sigma, sample)? {
        return Ok(true);
    }
    let id = GaloisShadow::identity(sigma.level(), sigma.support().to_vec())?;
    if sigma.branch() == -1 && d_minus_one_separator(sigma.level(), sigma.support(), sample)?.is_none() {
        return Ok(false);
    }
    shadow_eq(sigma, &id)
}

// ---------------------------------------------------------------- lift

/// Shadow realizing an `R`-consistent table `s_i ↦ t_i`, with its component factor `λ`.
#[derive(Debug, Clone)]
pub struct Lift {
    pub shadow: GaloisShadow,
    pub lambda: u64,
}

/// Rows are scanned in order; the first row that breaks `R` against row 1,
/// or leaves no common shadow, is reported as `RViolation(k)` (1-based).
pub fn lift_automorphism(table: &[(LevelPoint, LevelPoint)]) -> Result<Lift> {
    let mut solver = RelationSolver::new();
    lift_with(&mut solver, table)
}

pub fn lift_with(solver: &mut RelationSolver, table: &[(LevelPoint, LevelPoint)]) -> Result<Lift> {
    let Some((s1, t1)) = table.first() else {
        return Err(Error::invalid("empty table"));
    };
    let n = s1.level();
    for (k, (s, t)) in table.iter().enumerate() {
        if solver.relation(s1, s, t1, t)?.is_none() {
            return Err(Error::RViolation(k + 1));
        }
    }
    let support: Vec<u64> = table.iter().map(|(s, _)| s.tau().m()).collect::<BTreeSet<_>>().into_iter().collect();
    // (det, branch) ↦ per-orbit surviving matrices
    let mut cands: BTreeMap<(u64, i8), BTreeMap<u64, BTreeSet<LevelMatrix>>> = BTreeMap::new();
    for det in units(n) {
        for branch in [1i8, -1] {
            let per: BTreeMap<u64, BTreeSet<LevelMatrix>> =
                support.iter().map(|&m| (m, normalizer_elements(m, n, branch, det).into_iter().collect())).collect();
            cands.insert((det, -branch), per);
        }
    }
    for (k, (s, t)) in table.iter().enumerate() {
        let m = s.tau().m();
        let ok = solver.matches(s, t)?;
        cands.retain(|&(det, nb), per| {
            let set = per.get_mut(&m).expect("support covers table");
            set.retain(|r| ok.contains(&(-nb, det, *r)));
            !set.is_empty()
        });
        if cands.is_empty() {
            return Err(Error::RViolation(k + 1));
        }
    }
    let (&(det, nb), per) = cands.iter().next().expect("nonempty");
    let comps = support.iter().map(|m| *per[m].iter().next().expect("nonempty")).collect();
    Ok(Lift { shadow: GaloisShadow::new(n, support, comps, -nb)?, lambda: det })
}

/// The table `s ↦ σ·s` over a sample.
pub fn table_of(sigma: &GaloisShadow, sample: &[LevelPoint]) -> Result<Vec<(LevelPoint, LevelPoint)>> {
    sample.iter().map(|s| Ok((s.clone(), shadow_act(sigma, s)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::enumerate_shadows;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lm(e: [i64; 4], n: u64) -> LevelMatrix {
        LevelMatrix::new(e, n).unwrap()
    }

    fn pt(m: u64, p: i64, u: [i64; 4], n: u64) -> LevelPoint {
        LevelPoint::with_unit(QuadPoint::from_ints(m, (p, 1), (1, 1)).unwrap(), &lm(u, n))
    }

    #[test]
    fn approx_eq_examples() {
        let p = pt(1, 0, [1, 1, 0, 1], 5);
        for l in 1..5 {
            let q = act_unit(&LevelMatrix::d(l, 5), &p).unwrap();
            assert!(approx_eq(&p, &q));
            assert!(approx_eq_search(&p, &q).unwrap().is_some());
        }
        assert!(!approx_eq(&pt(1, 0, [1, 0, 0, 1], 5), &pt(2, 0, [1, 0, 0, 1], 5)));
        assert!(approx_eq(&p, &p));
    }

    #[test]
    fn canonical_rep_examples() {
        let p = pt(5, 0, [3, 0, 0, 1], 7);
        let c = canonical_rep(&p);
        assert!(c.unit().is_identity());
        let q = pt(5, 0, [1, 1, 0, 1], 7);
        assert_eq!(canonical_rep(&q).unit(), q.unit());
        assert_eq!(canonical_rep(&c).unit(), c.unit());
    }

    fn all_points(support: &[u64], n: u64) -> Vec<LevelPoint> {
        let gl = crate::adele::enumerate_gl2(n);
        support
            .iter()
            .flat_map(|&m| {
                let tau = QuadPoint::from_ints(m, (0, 1), (1, 1)).unwrap();
                gl.iter().map(move |u| LevelPoint::with_unit(tau.clone(), u)).collect::<Vec<_>>()
            })
            .collect()
    }

    #[test]
    fn canonical_rep_picks_one_class_per_approx_class() {
        // exhaustive over [√−m, u] at N = 5, M = {1, 2}
        let pts = all_points(&[1, 2], 5);
        let mut by_class: HashMap<CanonicalKey, BTreeSet<CanonicalKey>> = HashMap::new();
        for p in &pts {
            let a = ApproxPoint::new(p.clone());
            assert_eq!(component(&canonical_rep(p)).value(), 1);
            by_class.entry(a.key().clone()).or_default().insert(canonical_key(p));
        }
        // each approx class is a union of exactly φ(5) = 4 point classes
        let sizes: BTreeSet<usize> = by_class.values().map(|s| s.len()).collect();
        assert_eq!(sizes, [4].into_iter().collect());
        // the literal λ-search agrees with the canonical comparison
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let p = &pts[rng.gen_range(0..pts.len())];
            let q = &pts[rng.gen_range(0..pts.len())];
            assert_eq!(approx_eq(p, q), approx_eq_search(p, q).unwrap().is_some());
        }
    }

    #[test]
    fn curve_examples() {
        let id = curve_component(&LevelMatrix::identity(5), 3).unwrap();
        let p = pt(1, 0, [1, 1, 0, 1], 5);
        assert_eq!(eval_curve(&id, &p).unwrap(), ApproxPoint::new(p.clone()));
        let c = curve_component(&lm([1, 1, 0, 1], 5), 2).unwrap();
        assert_eq!(c.acting_matrix(), lm([1, 3, 0, 1], 5));
        assert!(curve_component(&lm([2, 0, 0, 1], 5), 1).is_err());
    }

    #[test]
    fn curve_covariance_and_partition() {
        let n = 5;
        let hs: Vec<LevelMatrix> = crate::adele::enumerate_sl2(n).into_iter().step_by(7).collect();
        let pts = all_points(&[1], n);
        for h in &hs {
            for lambda in units(n) {
                for mu in units(n) {
                    let left = curve_component(&conj_by_dlambda(h, lambda).unwrap(), mu).unwrap();
                    let right = curve_component(h, mu * lambda % n).unwrap();
                    assert_eq!(left.acting_matrix(), right.acting_matrix());
                }
            }
            // the graph of h on S^ν lands in S^ν and reads as C^{ν⁻¹}_h on S_≈
            for p in pts.iter().step_by(3) {
                let img = act_unit(h, p).unwrap();
                let nu = component(p).value();
                assert_eq!(component(&img).value(), nu);
                let label = curve_component(h, inv_mod(nu, n).unwrap()).unwrap();
                assert_eq!(eval_curve(&label, p).unwrap(), ApproxPoint::new(img));
            }
        }
    }

    #[test]
    fn relation_examples() {
        let n = 5;
        let s1 = pt(1, 0, [1, 1, 0, 1], n);
        let s2 = pt(2, 0, [1, 0, 1, 1], n);
        let w = relation_r(&s1, &s2, &s1, &s2).unwrap().unwrap();
        assert_eq!((w.lambda, w.branch), (1, 1));
        // p ↦ −p on both coordinates
        let rs1 = LevelPoint::base(QuadPoint::from_ints(1, (1, 1), (1, 1)).unwrap(), n);
        let rs2 = LevelPoint::base(QuadPoint::from_ints(2, (2, 1), (1, 1)).unwrap(), n);
        let rt1 = LevelPoint::base(QuadPoint::from_ints(1, (-1, 1), (1, 1)).unwrap(), n);
        let rt2 = LevelPoint::base(QuadPoint::from_ints(2, (-2, 1), (1, 1)).unwrap(), n);
        let w = relation_r(&rs1, &rs2, &rt1, &rt2).unwrap().unwrap();
        assert_eq!(w.branch, -1);
        // fix s1, move s2 by a determinant-2 torus element only
        let r = normalizer_elements(2, n, 1, 2)[0];
        let sigma = GaloisShadow::new(n, vec![2], vec![r], 1).unwrap();
        let t2 = shadow_act(&sigma, &s2).unwrap();
        assert!(relation_r(&s1, &s2, &s1, &t2).unwrap().is_none());
        // orbit mismatch
        assert!(relation_r(&s1, &s2, &s2, &s1).unwrap().is_none());
    }

    fn oracle_images(shadows: &[GaloisShadow], sample: &[LevelPoint]) -> Vec<Vec<CanonicalKey>> {
        shadows
            .iter()
            .map(|s| sample.iter().map(|p| ApproxPoint::new(shadow_act(s, p).unwrap()).key).collect())
            .collect()
    }

    #[test]
    fn relation_matches_shadow_search_sampled() {
        let n = 5;
        let support = [1, 2];
        let shadows = enumerate_shadows(&support, n).unwrap();
        let sample = spanning_sample(&support, n).unwrap();
        let imgs = oracle_images(&shadows, &sample);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut solver = RelationSolver::new();
        let (mut pos, mut neg) = (0, 0);
        for _ in 0..400 {
            let i = rng.gen_range(0..sample.len());
            let j = rng.gen_range(0..sample.len());
            let (a, b) = (rng.gen_range(0..shadows.len()), rng.gen_range(0..shadows.len()));
            let t1 = shadow_act(&shadows[a], &sample[i]).unwrap();
            let t2 = shadow_act(&shadows[b], &sample[j]).unwrap();
            let k1 = ApproxPoint::new(t1.clone()).key;
            let k2 = ApproxPoint::new(t2.clone()).key;
            let oracle = imgs.iter().any(|row| row[i] == k1 && row[j] == k2);
            let got = solver.relation(&sample[i], &sample[j], &t1, &t2).unwrap().is_some();
            assert_eq!(got, oracle);
            if got { pos += 1 } else { neg += 1 }
        }
        assert!(pos > 0 && neg > 0);
    }

    #[test]
    fn relation_invariant_under_shadows() {
        let n = 5;
        let support = [1, 2];
        let shadows = enumerate_shadows(&support, n).unwrap();
        let sample = spanning_sample(&support, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let mut solver = RelationSolver::new();
        for _ in 0..200 {
            let pick = |rng: &mut ChaCha8Rng| sample[rng.gen_range(0..sample.len())].clone();
            let (s1, s2) = (pick(&mut rng), pick(&mut rng));
            let tau = &shadows[rng.gen_range(0..shadows.len())];
            let (t1, t2) = if rng.gen_bool(0.5) {
                (shadow_act(tau, &s1).unwrap(), shadow_act(tau, &s2).unwrap())
            } else {
                (shadow_act(tau, &s1).unwrap(), pick(&mut rng))
            };
            let t2 = if t2.tau().m() == s2.tau().m() { t2 } else { shadow_act(tau, &s2).unwrap() };
            let sigma = &shadows[rng.gen_range(0..shadows.len())];
            let moved: Vec<LevelPoint> = [&s1, &s2, &t1, &t2].iter().map(|p| shadow_act(sigma, p).unwrap()).collect();
            assert_eq!(
                solver.relation(&s1, &s2, &t1, &t2).unwrap().is_some(),
                solver.relation(&moved[0], &moved[1], &moved[2], &moved[3]).unwrap().is_some()
            );
        }
    }

    #[test]
    fn lift_round_trips_every_shadow() {
        let n = 5;
        let support = [1, 2];
        let sample = spanning_sample(&support, n).unwrap();
        let mut solver = RelationSolver::new();
        for sigma in enumerate_shadows(&support, n).unwrap() {
            let table = table_of(&sigma, &sample).unwrap();
            let lift = lift_with(&mut solver, &table).unwrap();
            assert!(shadow_eq(&lift.shadow, &sigma).unwrap(), "{sigma}");
            for (s, t) in &table {
                assert!(approx_eq(&shadow_act(&lift.shadow, s).unwrap(), t));
            }
        }
    }

    #[test]
    fn lift_examples() {
        let n = 5;
        let sample = spanning_sample(&[1, 2], n).unwrap();
        let id = GaloisShadow::identity(n, vec![1, 2]).unwrap();
        let lift = lift_automorphism(&table_of(&id, &sample).unwrap()).unwrap();
        assert!(shadow_eq(&lift.shadow, &id).unwrap());
        assert_eq!(lift.lambda, 1);
        let r = normalizer_elements(2, n, 1, 2)[0];
        let tw = GaloisShadow::new(n, vec![2], vec![r], 1).unwrap();
        let s1 = sample[0].clone();
        let s2 = sample[10].clone();
        let t2 = shadow_act(&tw, &s2).unwrap();
        let err = lift_automorphism(&[(s1.clone(), s1), (s2, t2)]).unwrap_err();
        assert_eq!(err, Error::RViolation(2));
    }

    #[test]
    fn faithfulness_examples() {
        let n = 5;
        let sample = spanning_sample(&[1], n).unwrap();
        let id = GaloisShadow::identity(n, vec![1]).unwrap();
        assert!(faithfulness_check(&id, &sample).unwrap());
        let d = GaloisShadow::all_d_minus_one(n, vec![1]).unwrap();
        assert!(!acts_trivially(&d, &sample).unwrap());
        assert!(d_minus_one_separator(n, &[1], &sample).unwrap().is_some());
        assert!(faithfulness_check(&d, &[]).unwrap());
        for sigma in enumerate_shadows(&[1], n).unwrap() {
            assert!(faithfulness_check(&sigma, &sample).unwrap());
            if acts_trivially(&sigma, &sample).unwrap() {
                assert!(shadow_eq(&sigma, &id).unwrap());
            }
        }
    }
}
