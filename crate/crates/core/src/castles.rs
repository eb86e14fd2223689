//! Castles, almost-finiteness certificates, castle order zero maps
//! `M_n → C(X) ⋊ G`, their decomposition, and tracial Z-stability
//! instance checks.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::algebra::rep::{float_blocks, min_eigenvalue};
use crate::algebra::{operator_norm, CrossedElement, Func, MatrixElement, NormMode};
use crate::comparison::{search_subequivalence, Witness};
use crate::dynsys::{DynSystem, FiniteGroup, GroupElem};
use crate::error::{AlgebraError, CastleError};
use crate::linalg::TOLERANCE;
use crate::normalizers::check_normalizer_preserving;
use crate::pointset::PointSet;
use crate::scalar::{int, rat, GaussQ, RadScalar, Rational};

/// A tower `(V, S)`: base set and ordered shape of distinct group elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tower {
    pub base: PointSet,
    pub shape: Vec<GroupElem>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Castle {
    pub towers: Vec<Tower>,
}

impl Castle {
    /// Union of all levels `s·V_t`.
    pub fn footprint(&self, sys: &DynSystem) -> PointSet {
        let mut out = PointSet::empty(sys.num_points());
        for t in &self.towers {
            for &s in &t.shape {
                out = out.union(&sys.translate(s, &t.base));
            }
        }
        out
    }
}

/// Shapes consist of distinct elements and all levels are pairwise disjoint.
pub fn validate_castle(sys: &DynSystem, c: &Castle) -> bool {
    let mut seen = PointSet::empty(sys.num_points());
    for t in &c.towers {
        if t.base.universe() != sys.num_points() || t.shape.iter().any(|&s| s >= sys.group().order()) {
            return false;
        }
        for (k, &s) in t.shape.iter().enumerate() {
            if t.shape[..k].contains(&s) {
                return false;
            }
            let level = sys.translate(s, &t.base);
            if !level.is_disjoint(&seen) {
                return false;
            }
            seen = seen.union(&level);
        }
    }
    true
}

/// One tower per orbit: base the least point, shape the whole group.
pub fn orbit_castle(sys: &DynSystem) -> Castle {
    let towers = sys
        .orbits()
        .iter()
        .map(|o| Tower {
            base: PointSet::from_points(sys.num_points(), o.iter().next()),
            shape: sys.group().elements().collect(),
        })
        .collect();
    Castle { towers }
}

/// `max_{g ∈ K} |gS △ S| / |S|`.
pub fn shape_invariance(group: &FiniteGroup, shape: &[GroupElem], k: &[GroupElem]) -> Result<Rational, CastleError> {
    if shape.is_empty() {
        return Err(CastleError::EmptyShape);
    }
    let as_set = |it: &mut dyn Iterator<Item = GroupElem>| PointSet::from_points(group.order(), it);
    let s = as_set(&mut shape.iter().copied());
    let mut worst = int(0);
    for &g in k {
        let gs = as_set(&mut shape.iter().map(|&x| group.mul(g, x)));
        let r = Rational::new((gs.symmetric_difference(&s).len() as i64).into(), (s.len() as i64).into());
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlmostFinitenessReport {
    /// Invariance of each shape against `K`.
    pub invariance: Vec<Rational>,
    /// (a) every invariance is below `δ`.
    pub invariant: bool,
    /// (b) `S'_t ⊆ S_t` and `|S'_t| < δ|S_t|` for every tower.
    pub small_subshapes: bool,
    /// `X ∖ ⋃ S_t V_t`.
    pub remainder: PointSet,
    /// `⋃ S'_t V_t`.
    pub target: PointSet,
    /// (c) witness for `remainder ≺ target`.
    pub remainder_witness: Option<Witness>,
    /// Singleton bases, evaluated only under the strict flag.
    pub strict_diameter: Option<bool>,
}

impl AlmostFinitenessReport {
    pub fn passes(&self) -> bool {
        self.invariant && self.small_subshapes && self.remainder_witness.is_some() && self.strict_diameter != Some(false)
    }
}

/// Checks one castle against the almost-finiteness conditions for `K` and
/// `δ`. On a discrete finite space the level diameter condition is empty;
/// `strict_diameter` replaces it by requiring singleton bases.
pub fn almost_finiteness_certificate(
    sys: &DynSystem,
    k: &[GroupElem],
    delta: &Rational,
    castle: &Castle,
    primes: &[Vec<GroupElem>],
    strict_diameter: bool,
) -> Result<AlmostFinitenessReport, CastleError> {
    if !validate_castle(sys, castle) {
        return Err(CastleError::InvalidCastle("levels overlap or shapes repeat elements"));
    }
    if primes.len() != castle.towers.len() {
        return Err(CastleError::InvalidCastle("one subshape per tower is required"));
    }
    let invariance = castle.towers.iter().map(|t| shape_invariance(sys.group(), &t.shape, k)).collect::<Result<Vec<_>, _>>()?;
    let invariant = invariance.iter().all(|r| r < delta);
    let small_subshapes = castle.towers.iter().zip(primes).all(|(t, p)| {
        let card = |n: usize| Rational::from_integer((n as i64).into());
        p.iter().all(|s| t.shape.contains(s)) && card(p.len()) < delta * card(t.shape.len())
    });
    let remainder = castle.footprint(sys).complement();
    let mut target = PointSet::empty(sys.num_points());
    for (t, p) in castle.towers.iter().zip(primes) {
        for &s in p {
            target = target.union(&sys.translate(s, &t.base));
        }
    }
    let remainder_witness = search_subequivalence(sys, core::slice::from_ref(&remainder), core::slice::from_ref(&target))?;
    let strict_diameter = strict_diameter.then(|| castle.towers.iter().all(|t| t.base.len() <= 1));
    Ok(AlmostFinitenessReport { invariance, invariant, small_subshapes, remainder, target, remainder_witness, strict_diameter })
}

/// Castle with weights `f_t` and phases `θ_{t,i}`; every shape has `n`
/// elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CastleOzmData {
    pub n: usize,
    pub castle: Castle,
    pub weights: Vec<Func>,
    /// `phases[t][i]`, relevant on `supp°(f_t)` only.
    pub phases: Vec<Vec<Func>>,
}

impl CastleOzmData {
    pub fn empty(n: usize) -> Self {
        CastleOzmData { n, castle: Castle::default(), weights: Vec::new(), phases: Vec::new() }
    }

    pub fn validate(&self, sys: &DynSystem) -> Result<(), CastleError> {
        let towers = &self.castle.towers;
        if !validate_castle(sys, &self.castle) {
            return Err(CastleError::InvalidCastleData("castle levels overlap"));
        }
        if towers.iter().any(|t| t.shape.len() != self.n) {
            return Err(CastleError::InvalidCastleData("every shape must have n elements"));
        }
        if self.weights.len() != towers.len() || self.phases.len() != towers.len() {
            return Err(CastleError::InvalidCastleData("one weight and one phase row per tower"));
        }
        for (t, (f, th)) in towers.iter().zip(self.weights.iter().zip(&self.phases)) {
            if f.len() != sys.num_points() || th.len() != self.n || th.iter().any(|p| p.len() != sys.num_points()) {
                return Err(CastleError::InvalidCastleData("functions live on the wrong number of points"));
            }
            if !f.is_positive() || !f.open_support().is_subset(&t.base) {
                return Err(CastleError::InvalidCastleData("weights must be positive and supported in the base"));
            }
            if f.values().iter().any(|v| v.cmp_rational(&int(1)) == Some(Ordering::Greater)) {
                return Err(CastleError::InvalidCastleData("weights must be contractions"));
            }
            for x in f.open_support().iter() {
                if th.iter().any(|p| p.value(x).norm_sqr() != int(1)) {
                    return Err(CastleError::InvalidCastleData("phases must have modulus one on the weight support"));
                }
            }
        }
        Ok(())
    }
}

/// A linear map `M_n → C(X) ⋊ G` given on matrix units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderZeroMap {
    sys: Arc<DynSystem>,
    n: usize,
    images: Vec<CrossedElement>,
}

impl OrderZeroMap {
    /// `images[i*n + j] = φ(e_ij)`.
    pub fn new(sys: &Arc<DynSystem>, n: usize, images: Vec<CrossedElement>) -> Result<Self, AlgebraError> {
        if images.len() != n * n {
            return Err(AlgebraError::DimensionMismatch { expected: n * n, found: images.len() });
        }
        if images.iter().any(|e| e.system() != sys) {
            return Err(AlgebraError::SystemMismatch);
        }
        Ok(OrderZeroMap { sys: sys.clone(), n, images })
    }

    pub fn zero(sys: &Arc<DynSystem>, n: usize) -> Self {
        OrderZeroMap { sys: sys.clone(), n, images: vec![CrossedElement::zero(sys); n * n] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn system(&self) -> &Arc<DynSystem> {
        &self.sys
    }

    pub fn image(&self, i: usize, j: usize) -> &CrossedElement {
        &self.images[i * self.n + j]
    }

    pub fn images(&self) -> &[CrossedElement] {
        &self.images
    }

    /// `φ(Σ c_ij e_ij)` for a row-major coefficient matrix.
    pub fn apply(&self, c: &[GaussQ]) -> Result<CrossedElement, AlgebraError> {
        let mut out = CrossedElement::zero(&self.sys);
        for (coeff, img) in c.iter().zip(&self.images) {
            if !coeff.is_zero() {
                out = out.try_add(&img.scale(&RadScalar::from_gauss(coeff.clone())))?;
            }
        }
        Ok(out)
    }

    /// `φ(1)`.
    pub fn unit_image(&self) -> Result<CrossedElement, AlgebraError> {
        let mut out = CrossedElement::zero(&self.sys);
        for i in 0..self.n {
            out = out.try_add(self.image(i, i))?;
        }
        Ok(out)
    }

    /// The Choi matrix `Σ e_ij ⊗ φ(e_ij)`.
    pub fn choi(&self) -> Result<MatrixElement, AlgebraError> {
        MatrixElement::from_entries(self.n, self.images.clone())
    }
}

/// `φ(e_ij) = Σ_t u_{s_{t,i}} θ_{t,i} θ̄_{t,j} f_t u_{s_{t,j}}*`.
pub fn build_castle_ozm(sys: &Arc<DynSystem>, data: &CastleOzmData) -> Result<OrderZeroMap, CastleError> {
    data.validate(sys)?;
    let n = data.n;
    let mut phi = OrderZeroMap::zero(sys, n);
    for (t, tower) in data.castle.towers.iter().enumerate() {
        let f = &data.weights[t];
        for i in 0..n {
            for j in 0..n {
                let inner = data.phases[t][i].mul(&data.phases[t][j].conj()).mul(f);
                let left = CrossedElement::u(sys, tower.shape[i]);
                let right = CrossedElement::u(sys, tower.shape[j]).adjoint();
                let term = left.try_mul(&CrossedElement::from_func(sys, inner))?.try_mul(&right)?;
                phi.images[i * n + j] = phi.images[i * n + j].try_add(&term)?;
            }
        }
    }
    Ok(phi)
}

fn unit_matrix(n: usize, entries: &[(usize, usize, GaussQ)]) -> Vec<GaussQ> {
    let mut c = vec![GaussQ::zero(); n * n];
    for (i, j, v) in entries {
        c[i * n + j] = &c[i * n + j] + v;
    }
    c
}

/// Exact order-zero test.
///
/// Checks `φ(p)φ(1-p) = 0` for every diagonal projection `p`, and
/// `φ(q₊)φ(q₋) = 0` for the rank-one projections onto `(e_i ± ω e_j)/√2`,
/// `ω ∈ {1, i}`. Then checks the relation `φ(e_ij)φ(e_kl) = δ_jk φ(1)φ(e_il)`
/// on all matrix units, which a completely positive map satisfies exactly
/// when it is order zero.
pub fn verify_order_zero(phi: &OrderZeroMap) -> Result<bool, AlgebraError> {
    let n = phi.size();
    if n > 16 {
        return Err(AlgebraError::DimensionMismatch { expected: 16, found: n });
    }
    let one = GaussQ::one();
    for mask in 0..(1u32 << n) {
        let p: Vec<_> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| (i, i, one.clone())).collect();
        let q: Vec<_> = (0..n).filter(|i| mask & (1 << i) == 0).map(|i| (i, i, one.clone())).collect();
        if !phi.apply(&unit_matrix(n, &p))?.try_mul(&phi.apply(&unit_matrix(n, &q))?)?.is_zero() {
            return Ok(false);
        }
    }
    let half = GaussQ::real(rat(1, 2));
    for i in 0..n {
        for j in i + 1..n {
            for omega in [GaussQ::one(), GaussQ::i()] {
                let rank_one = |sign: i64| {
                    let w = omega.scale(&rat(sign, 2));
                    unit_matrix(n, &[(i, i, half.clone()), (j, j, half.clone()), (j, i, w.clone()), (i, j, w.conj())])
                };
                if !phi.apply(&rank_one(1))?.try_mul(&phi.apply(&rank_one(-1))?)?.is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    let unit = phi.unit_image()?;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let lhs = phi.image(i, j).try_mul(phi.image(k, l))?;
                    let rhs = if j == k { unit.try_mul(phi.image(i, l))? } else { CrossedElement::zero(phi.system()) };
                    if lhs != rhs {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpcReport {
    /// Smallest eigenvalue of the Choi matrix in the representation;
    /// `None` when it is not Hermitian.
    pub min_choi_eigenvalue: Option<f64>,
    pub unit_norm: f64,
}

impl CpcReport {
    pub fn completely_positive(&self) -> bool {
        self.min_choi_eigenvalue.is_some_and(|m| m >= -TOLERANCE)
    }

    pub fn contractive(&self) -> bool {
        self.unit_norm <= 1.0 + TOLERANCE
    }

    pub fn passes(&self) -> bool {
        self.completely_positive() && self.contractive()
    }
}

/// Choi-matrix positivity and `‖φ(1)‖ ≤ 1`, tolerance 1e-9.
pub fn verify_cpc(phi: &OrderZeroMap) -> Result<CpcReport, AlgebraError> {
    let unit_norm = operator_norm(&phi.unit_image()?, NormMode::ExactFirst).value;
    if phi.size() == 0 {
        return Ok(CpcReport { min_choi_eigenvalue: Some(0.0), unit_norm });
    }
    let product = Arc::new(phi.system().product_with_cyclic(phi.size()));
    let choi = phi.choi()?.to_product_element(&product)?;
    Ok(CpcReport { min_choi_eigenvalue: min_eigenvalue(&choi), unit_norm })
}

/// Every `φ(e_ij)` is a normalizer of `C(X)`.
pub fn verify_normalizer_preserving(phi: &OrderZeroMap) -> Result<bool, AlgebraError> {
    Ok(check_normalizer_preserving(phi)?.preserving)
}

/// Recovers castle data from a normalizer-preserving order zero map.
///
/// With `f = φ(e_11)` and `φ(e_1i) = Σ_g h_{i,g} u_g*`, each point of
/// `supp°(f)` meets exactly one `supp°(h_{i,g})` per `i`; points are grouped
/// into towers by the resulting vector `(g_1, …, g_n)`, ordered by least
/// point. Phases are `θ_{t,i} = f / h_{i,g_i}`. The rebuilt map is compared
/// with `φ` exactly.
pub fn decompose_ozm(phi: &OrderZeroMap) -> Result<CastleOzmData, CastleError> {
    let sys = phi.system();
    if !sys.is_free() {
        return Err(CastleError::NotFree);
    }
    if !verify_normalizer_preserving(phi)? {
        return Err(CastleError::NotNormalizerPreserving);
    }
    if !verify_order_zero(phi)? || !verify_cpc(phi)?.passes() {
        return Err(CastleError::NotOrderZero);
    }
    let n = phi.size();
    if n == 0 {
        return Ok(CastleOzmData::empty(0));
    }
    let group = sys.group();
    let m = sys.num_points();
    let f = phi.image(0, 0).cond_expectation();
    let h = |i: usize, g: GroupElem| phi.image(0, i).coeff(group.inv(g));
    let mut profiles: BTreeMap<Vec<GroupElem>, PointSet> = BTreeMap::new();
    for x in f.open_support().iter() {
        let mut profile = Vec::with_capacity(n);
        for i in 0..n {
            let mut hits = group.elements().filter(|&g| !h(i, g).value(x).is_zero());
            let (Some(g), None) = (hits.next(), hits.next()) else {
                return Err(CastleError::DecompositionFailed("a point of supp f does not meet exactly one coefficient"));
            };
            profile.push(g);
        }
        profiles.entry(profile).or_insert_with(|| PointSet::empty(m)).insert(x);
    }
    let mut towers: Vec<(Vec<GroupElem>, PointSet)> = profiles.into_iter().collect();
    towers.sort_by_key(|a| a.1.iter().next());
    let mut data = CastleOzmData::empty(n);
    for (shape, base) in towers {
        let mut phases = Vec::with_capacity(n);
        for (i, &g) in shape.iter().enumerate() {
            let mut theta = Func::one(m);
            for x in base.iter() {
                let q = f.value(x).div(h(i, g).value(x)).ok_or(CastleError::DecompositionFailed("vanishing coefficient"))?;
                theta.set_value(x, q);
            }
            phases.push(theta);
        }
        data.weights.push(f.restrict(&base));
        data.phases.push(phases);
        data.castle.towers.push(Tower { base, shape });
    }
    if build_castle_ozm(sys, &data)? != *phi {
        return Err(CastleError::DecompositionFailed("rebuilt map differs"));
    }
    Ok(data)
}

/// `M_|G| ≅ C(X) ⋊ G` for a free transitive action: one tower with base
/// `{0}`, shape the whole group, weight `χ_{0}` and trivial phases.
pub fn identity_embedding(sys: &DynSystem) -> Result<CastleOzmData, CastleError> {
    if !sys.is_free() || !sys.is_minimal() {
        return Err(CastleError::InvalidCastleData("the identity embedding needs a free transitive action"));
    }
    let m = sys.num_points();
    let n = sys.group().order();
    let base = PointSet::from_points(m, [0]);
    Ok(CastleOzmData {
        n,
        castle: Castle { towers: vec![Tower { base: base.clone(), shape: sys.group().elements().collect() }] },
        weights: vec![Func::indicator(&base)],
        phases: vec![vec![Func::one(m); n]],
    })
}

/// Indicator weights and trivial phases on a castle.
pub fn indicator_data(sys: &DynSystem, castle: Castle, n: usize) -> CastleOzmData {
    let m = sys.num_points();
    let weights = castle.towers.iter().map(|t| Func::indicator(&t.base)).collect();
    let phases = castle.towers.iter().map(|_| vec![Func::one(m); n]).collect();
    CastleOzmData { n, castle, weights, phases }
}

/// One instance of the tracial Z-stability conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TzsInstance {
    pub n: usize,
    pub epsilon: Rational,
    pub family: Vec<CrossedElement>,
    pub h: Func,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TzsReport {
    /// (i) every `φ(e_ij)` is a normalizer.
    pub normalizer_preserving: bool,
    /// Support of `1 - φ(1)`, when (i) holds.
    pub remainder: Option<PointSet>,
    /// (ii) witness for `1 - φ(1) ≼ h`; evaluated only when (i) holds.
    pub remainder_witness: Option<Witness>,
    pub remainder_ok: Option<bool>,
    /// `max ‖[a, φ(e_ij)]‖` per element of the family.
    pub commutator_norms: Vec<f64>,
    pub max_commutator_norm: f64,
    /// `n²`: `‖[a, φ(x)]‖ ≤ n² max_ij ‖[a, φ(e_ij)]‖` for contractions `x`.
    pub bound_factor: usize,
    pub epsilon: f64,
}

impl TzsReport {
    /// `ε - n²·max`; positive when (iii) holds for every contraction.
    pub fn margin(&self) -> f64 {
        self.epsilon - self.bound_factor as f64 * self.max_commutator_norm
    }

    /// `ε - max`; positive when (iii) holds on matrix units.
    pub fn unit_margin(&self) -> f64 {
        self.epsilon - self.max_commutator_norm
    }

    pub fn commutators_ok(&self) -> bool {
        self.margin() > 0.0
    }

    pub fn passes(&self) -> bool {
        self.normalizer_preserving && self.remainder_ok == Some(true) && self.commutators_ok()
    }
}

/// Evaluates (i) normalizer preservation, (ii) `1 - φ(1) ≼ h` and (iii)
/// small commutators. (ii) is only meaningful once (i) puts `φ(1)` in
/// `C(X)`, so it is skipped otherwise.
pub fn check_tzs_instance(inst: &TzsInstance, phi: &OrderZeroMap) -> Result<TzsReport, CastleError> {
    let sys = phi.system();
    let n = phi.size();
    if inst.n != n {
        return Err(AlgebraError::DimensionMismatch { expected: inst.n, found: n }.into());
    }
    if inst.h.is_zero() || inst.epsilon <= int(0) {
        return Err(CastleError::InvalidCastleData("h must be nonzero and epsilon positive"));
    }
    let normalizer_preserving = verify_normalizer_preserving(phi)?;
    let (mut remainder, mut remainder_witness, mut remainder_ok) = (None, None, None);
    if normalizer_preserving {
        let unit = phi.unit_image()?.cond_expectation();
        let rem = PointSet::from_points(sys.num_points(), (0..sys.num_points()).filter(|&x| !unit.value(x).is_one()));
        let w = search_subequivalence(sys, core::slice::from_ref(&rem), &[inst.h.open_support()])?;
        remainder_ok = Some(w.is_some());
        remainder_witness = w;
        remainder = Some(rem);
    }
    let image_blocks: Vec<_> = phi.images().iter().map(float_blocks).collect();
    let mut commutator_norms = Vec::with_capacity(inst.family.len());
    for a in &inst.family {
        if a.system() != sys {
            return Err(AlgebraError::SystemMismatch.into());
        }
        let a_blocks = float_blocks(a);
        let mut worst: f64 = 0.0;
        for blocks in &image_blocks {
            for (x, y) in a_blocks.iter().zip(blocks) {
                worst = worst.max(x.matmul(y).sub(&y.matmul(x)).spectral_norm());
            }
        }
        commutator_norms.push(worst);
    }
    let max_commutator_norm = commutator_norms.iter().copied().fold(0.0, f64::max);
    Ok(TzsReport {
        normalizer_preserving,
        remainder,
        remainder_witness,
        remainder_ok,
        commutator_norms,
        max_commutator_norm,
        bound_factor: n * n,
        epsilon: crate::scalar::rat_to_f64(&inst.epsilon),
    })
}

/// Tries castle maps with indicator weights and trivial phases: shapes are
/// the ordered `n`-tuples of distinct group elements in lexicographic order,
/// and for each shape the nonempty bases with disjoint levels by increasing
/// bitmask. Returns the first map passing all three conditions, `None` once
/// the candidates run out, and `ResourceBound` when `budget` candidates were
/// tried without success.
pub fn search_tzs_map(sys: &Arc<DynSystem>, inst: &TzsInstance, budget: usize) -> Result<Option<(CastleOzmData, OrderZeroMap)>, CastleError> {
    if !sys.is_free() {
        return Err(CastleError::NotFree);
    }
    let n = inst.n;
    let m = sys.num_points();
    let order = sys.group().order();
    if n == 0 || n > order || m >= 64 {
        return Ok(None);
    }
    let mut tried = 0usize;
    let mut shape: Vec<GroupElem> = Vec::with_capacity(n);
    let mut found = None;
    permutations(order, n, &mut shape, &mut |shape| {
        for mask in 1..(1u64 << m) {
            let base = PointSet::from_mask(m, mask);
            let castle = Castle { towers: vec![Tower { base, shape: shape.to_vec() }] };
            if !validate_castle(sys, &castle) {
                continue;
            }
            if tried >= budget {
                return Err(CastleError::ResourceBound { budget });
            }
            tried += 1;
            let data = indicator_data(sys, castle, n);
            let phi = build_castle_ozm(sys, &data)?;
            if check_tzs_instance(inst, &phi)?.passes() {
                found = Some((data, phi));
                return Ok(true);
            }
        }
        Ok(false)
    })?;
    Ok(found)
}

/// Visits ordered `k`-tuples of distinct elements of `0..n` in lexicographic
/// order until the visitor returns `true`.
fn permutations(
    n: usize,
    k: usize,
    prefix: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> Result<bool, CastleError>,
) -> Result<bool, CastleError> {
    if prefix.len() == k {
        return visit(prefix);
    }
    for x in 0..n {
        if prefix.contains(&x) {
            continue;
        }
        prefix.push(x);
        let stop = permutations(n, k, prefix, visit)?;
        prefix.pop();
        if stop {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalizers::is_normalizer;

    fn sys(n: usize) -> Arc<DynSystem> {
        Arc::new(DynSystem::translation(FiniteGroup::cyclic(n)))
    }

    fn set(m: usize, pts: &[usize]) -> PointSet {
        PointSet::from_points(m, pts.iter().copied())
    }

    fn tower(m: usize, pts: &[usize], shape: &[usize]) -> Tower {
        Tower { base: set(m, pts), shape: shape.to_vec() }
    }

    fn all_verifiers(phi: &OrderZeroMap) -> bool {
        verify_cpc(phi).unwrap().passes() && verify_order_zero(phi).unwrap() && verify_normalizer_preserving(phi).unwrap()
    }

    #[test]
    fn castle_validation() {
        let s = sys(2);
        assert!(validate_castle(&s, &Castle { towers: vec![tower(2, &[0], &[0])] }));
        assert!(validate_castle(&s, &Castle { towers: vec![tower(2, &[0], &[0, 1])] }));
        assert!(!validate_castle(&s, &Castle { towers: vec![tower(2, &[0, 1], &[0, 1])] }));
        assert!(validate_castle(&s, &orbit_castle(&s)));
    }

    #[test]
    fn invariance_examples() {
        let g = FiniteGroup::cyclic(4);
        let all: Vec<_> = g.elements().collect();
        assert_eq!(shape_invariance(&g, &all, &[1, 2]).unwrap(), int(0));
        assert_eq!(shape_invariance(&g, &[0, 1], &[1]).unwrap(), int(1));
        assert_eq!(shape_invariance(&g, &[0, 1], &[0]).unwrap(), int(0));
        assert_eq!(shape_invariance(&g, &[], &[0]), Err(CastleError::EmptyShape));
    }

    #[test]
    fn almost_finiteness_examples() {
        let s = sys(3);
        let all: Vec<_> = s.group().elements().collect();
        let c = orbit_castle(&s);
        for delta in [rat(1, 2), rat(1, 100)] {
            let r = almost_finiteness_certificate(&s, &all, &delta, &c, &[Vec::new()], true).unwrap();
            assert!(r.passes());
            assert!(r.remainder.is_empty());
        }
        let half = Castle { towers: vec![tower(3, &[0], &[0])] };
        let r = almost_finiteness_certificate(&s, &[0], &rat(1, 2), &half, &[Vec::new()], false).unwrap();
        assert!(r.remainder_witness.is_none() && !r.passes());
    }

    fn z2_data() -> CastleOzmData {
        CastleOzmData {
            n: 2,
            castle: Castle { towers: vec![tower(2, &[0], &[0, 1])] },
            weights: vec![Func::indicator(&set(2, &[0]))],
            phases: vec![vec![Func::one(2); 2]],
        }
    }

    #[test]
    fn build_z2_tower() {
        let s = sys(2);
        let phi = build_castle_ozm(&s, &z2_data()).unwrap();
        assert_eq!(phi.image(0, 0), &CrossedElement::indicator(&s, &set(2, &[0])));
        assert_eq!(phi.image(1, 1), &CrossedElement::indicator(&s, &set(2, &[1])));
        assert_eq!(phi.unit_image().unwrap(), CrossedElement::unit(&s));
        assert!(all_verifiers(&phi));
    }

    #[test]
    fn empty_and_scaled_castles() {
        let s = sys(2);
        let phi = build_castle_ozm(&s, &CastleOzmData::empty(2)).unwrap();
        assert_eq!(phi, OrderZeroMap::zero(&s, 2));
        assert!(all_verifiers(&phi));
        let mut data = z2_data();
        data.weights[0] = data.weights[0].scale(&RadScalar::from_rational(rat(1, 2)));
        let phi = build_castle_ozm(&s, &data).unwrap();
        assert_eq!(phi.unit_image().unwrap(), CrossedElement::from_func(&s, Func::from_rationals([rat(1, 2), rat(1, 2)])));
        assert!(verify_cpc(&phi).unwrap().contractive());
        assert!(all_verifiers(&phi));
    }

    #[test]
    fn invalid_data_is_rejected() {
        let s = sys(2);
        let mut data = z2_data();
        data.weights[0] = data.weights[0].scale(&RadScalar::from_rational(int(2)));
        assert!(matches!(build_castle_ozm(&s, &data), Err(CastleError::InvalidCastleData(_))));
        let mut data = z2_data();
        data.phases[0][1] = data.phases[0][1].scale(&RadScalar::from_rational(rat(1, 2)));
        assert!(matches!(build_castle_ozm(&s, &data), Err(CastleError::InvalidCastleData(_))));
    }

    #[test]
    fn verifier_examples() {
        let s = sys(3);
        let id = build_castle_ozm(&s, &identity_embedding(&s).unwrap()).unwrap();
        assert!(all_verifiers(&id));
        let zero = OrderZeroMap::zero(&s, 3);
        assert!(all_verifiers(&zero));
        let third = CrossedElement::unit(&s).scale(&RadScalar::from_rational(rat(1, 3)));
        let flat = OrderZeroMap::new(&s, 3, vec![third; 9]).unwrap();
        assert!(!verify_order_zero(&flat).unwrap());
    }

    #[test]
    fn identity_embedding_is_unital() {
        let s = sys(3);
        let id = build_castle_ozm(&s, &identity_embedding(&s).unwrap()).unwrap();
        assert_eq!(id.unit_image().unwrap(), CrossedElement::unit(&s));
        // the images of matrix units multiply like matrix units
        for (i, j, k, l) in [(0, 1, 1, 2), (2, 0, 0, 0), (1, 2, 0, 1)] {
            let prod = id.image(i, j).try_mul(id.image(k, l)).unwrap();
            let expected = if j == k { id.image(i, l).clone() } else { CrossedElement::zero(&s) };
            assert_eq!(prod, expected);
        }
    }

    #[test]
    fn non_normalizer_images() {
        let s = sys(3);
        let bad = CrossedElement::indicator(&s, &set(3, &[0]))
            .try_add(&CrossedElement::monomial(&s, Func::indicator(&set(3, &[0])), 1))
            .unwrap()
            .scale(&RadScalar::from_rational(rat(1, 2)));
        assert!(!is_normalizer(&bad).unwrap());
        let phi = OrderZeroMap::new(&s, 2, vec![bad; 4]).unwrap();
        assert!(!verify_normalizer_preserving(&phi).unwrap());
        assert_eq!(decompose_ozm(&phi), Err(CastleError::NotNormalizerPreserving));
    }

    #[test]
    fn decompose_examples() {
        let s = sys(2);
        let phi = build_castle_ozm(&s, &z2_data()).unwrap();
        let data = decompose_ozm(&phi).unwrap();
        assert_eq!(data, z2_data());
        let zero = decompose_ozm(&OrderZeroMap::zero(&s, 2)).unwrap();
        assert!(zero.castle.towers.is_empty());
    }

    #[test]
    fn decompose_with_phases() {
        let s = Arc::new(DynSystem::translation_copies(FiniteGroup::cyclic(2), 2));
        let m = s.num_points();
        let minus = Func::constant(m, RadScalar::from_rational(int(-1)));
        let i = Func::constant(m, RadScalar::from_gauss(GaussQ::i()));
        let data = CastleOzmData {
            n: 2,
            castle: Castle { towers: vec![tower(m, &[0], &[1, 0]), tower(m, &[2], &[0, 1])] },
            weights: vec![Func::indicator(&set(m, &[0])).scale(&RadScalar::from_rational(rat(2, 3))), Func::indicator(&set(m, &[2]))],
            phases: vec![vec![minus, i.clone()], vec![Func::one(m), i]],
        };
        let phi = build_castle_ozm(&s, &data).unwrap();
        assert!(all_verifiers(&phi));
        let back = decompose_ozm(&phi).unwrap();
        assert_eq!(build_castle_ozm(&s, &back).unwrap(), phi);
    }

    #[test]
    fn tzs_examples() {
        let s = sys(3);
        let id = build_castle_ozm(&s, &identity_embedding(&s).unwrap()).unwrap();
        let inst = TzsInstance { n: 3, epsilon: rat(1, 10), family: vec![CrossedElement::unit(&s)], h: Func::indicator(&set(3, &[0])) };
        let r = check_tzs_instance(&inst, &id).unwrap();
        assert!(r.passes());
        assert_eq!(r.remainder, Some(PointSet::empty(3)));

        let two = OrderZeroMap::new(&s, 1, vec![CrossedElement::indicator(&s, &set(3, &[0, 1]))]).unwrap();
        let inst = TzsInstance { n: 1, epsilon: rat(1, 10), family: Vec::new(), h: Func::indicator(&set(3, &[2])) };
        let r = check_tzs_instance(&inst, &two).unwrap();
        assert_eq!(r.remainder_ok, Some(true));

        let tower_map = build_castle_ozm(&s, &indicator_data(&s, Castle { towers: vec![tower(3, &[0], &[0])] }, 1)).unwrap();
        let inst = TzsInstance { n: 1, epsilon: rat(1, 10), family: vec![CrossedElement::u(&s, 1)], h: Func::one(3) };
        let r = check_tzs_instance(&inst, &tower_map).unwrap();
        assert!((r.max_commutator_norm - 1.0).abs() < 1e-9);
        assert!(!r.commutators_ok());
    }

    #[test]
    fn tzs_search_examples() {
        let s = sys(3);
        let inst = TzsInstance { n: 3, epsilon: rat(1, 10), family: vec![CrossedElement::unit(&s)], h: Func::indicator(&set(3, &[0])) };
        let (data, _) = search_tzs_map(&s, &inst, 1000).unwrap().unwrap();
        assert_eq!(data.castle.towers[0].shape, vec![0, 1, 2]);
        let hard = TzsInstance { n: 2, epsilon: rat(1, 1000), family: vec![CrossedElement::u(&s, 1)], h: Func::indicator(&set(3, &[0])) };
        assert_eq!(search_tzs_map(&s, &hard, 1000).unwrap(), None);
        assert!(matches!(search_tzs_map(&s, &hard, 2), Err(CastleError::ResourceBound { .. })));
        let full = TzsInstance { n: 1, epsilon: rat(1, 10), family: vec![CrossedElement::unit(&s)], h: Func::one(3) };
        assert!(search_tzs_map(&s, &full, 1000).unwrap().is_some());
    }
}
