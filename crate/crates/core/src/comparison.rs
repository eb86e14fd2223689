//! Dynamical subequivalence of tuples of sets and of diagonal positive
//! tuples, witness search, `d_τ`, dynamical comparison, the type semigroup
//! and a finite-dimensional Cuntz comparison oracle.
//!
//! On a finite space every subset is clopen, so `a ≼ b` reduces to a
//! subequivalence between the open supports of the entries.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::rep::{block_at_exact, block_rank, min_eigenvalue, orbit_representatives};
use crate::algebra::{CrossedElement, Func};
use crate::dynsys::{DynSystem, GroupElem, InvariantMeasure, Point};
use crate::error::{AlgebraError, ComparisonError};
use crate::linalg::TOLERANCE;
use crate::pointset::PointSet;
use crate::scalar::Rational;

/// One piece `(U, s, k)` of a witness: `U` is moved by `s` into target `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WitnessPiece {
    pub set: PointSet,
    pub shift: GroupElem,
    pub target: usize,
}

/// Pieces for each source index `i`. Missing trailing rows count as empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Witness {
    pub rows: Vec<Vec<WitnessPiece>>,
}

impl Witness {
    pub fn empty(rows: usize) -> Self {
        Witness { rows: vec![Vec::new(); rows] }
    }

    pub fn pieces(&self) -> impl Iterator<Item = (usize, &WitnessPiece)> {
        self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |p| (i, p)))
    }
}

/// `diag(a_1, …, a_n)` with every entry a positive function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagTuple {
    entries: Vec<Func>,
}

impl DiagTuple {
    pub fn new(entries: Vec<Func>) -> Result<Self, ComparisonError> {
        if let Some(first) = entries.first() {
            for f in &entries {
                if f.len() != first.len() {
                    return Err(ComparisonError::UniverseMismatch { expected: first.len(), found: f.len() });
                }
            }
        }
        for f in &entries {
            if let Some(point) = (0..f.len()).find(|&x| !f.value(x).is_nonneg_real()) {
                return Err(ComparisonError::NotPositive(AlgebraError::NotPositive { point }));
            }
        }
        Ok(DiagTuple { entries })
    }

    pub fn indicators(sets: &[PointSet]) -> Self {
        DiagTuple { entries: sets.iter().map(Func::indicator).collect() }
    }

    pub fn entries(&self) -> &[Func] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn supports(&self) -> Vec<PointSet> {
        self.entries.iter().map(Func::open_support).collect()
    }

    /// `a ⊕ b`.
    pub fn direct_sum(&self, other: &DiagTuple) -> DiagTuple {
        DiagTuple { entries: self.entries.iter().chain(&other.entries).cloned().collect() }
    }
}

fn check_universe(sys: &DynSystem, sets: &[PointSet]) -> Result<(), ComparisonError> {
    match sets.iter().find(|s| s.universe() != sys.num_points()) {
        Some(s) => Err(ComparisonError::UniverseMismatch { expected: sys.num_points(), found: s.universe() }),
        None => Ok(()),
    }
}

/// Cover condition `F_i ⊆ ⋃_j U_ij` and disjointness of the tagged
/// translates `s_ij U_ij × {k_ij}` inside `V_k × {k}`. Empty pieces are
/// rejected.
pub fn check_witness(sys: &DynSystem, f: &[PointSet], v: &[PointSet], w: &Witness) -> Result<bool, ComparisonError> {
    check_universe(sys, f)?;
    check_universe(sys, v)?;
    if w.rows.len() > f.len() {
        return Err(ComparisonError::IndexOutOfRange { what: "row", index: w.rows.len() - 1, limit: f.len() });
    }
    for (_, p) in w.pieces() {
        if p.target >= v.len() {
            return Err(ComparisonError::IndexOutOfRange { what: "target", index: p.target, limit: v.len() });
        }
        if p.shift >= sys.group().order() {
            return Err(ComparisonError::IndexOutOfRange { what: "group element", index: p.shift, limit: sys.group().order() });
        }
        if p.set.universe() != sys.num_points() {
            return Err(ComparisonError::UniverseMismatch { expected: sys.num_points(), found: p.set.universe() });
        }
    }
    let mut used: Vec<PointSet> = v.iter().map(|s| PointSet::empty(s.universe())).collect();
    for (_, p) in w.pieces() {
        if p.set.is_empty() {
            return Ok(false);
        }
        let image = sys.translate(p.shift, &p.set);
        if !image.is_subset(&v[p.target]) || !image.is_disjoint(&used[p.target]) {
            return Ok(false);
        }
        used[p.target] = used[p.target].union(&image);
    }
    for (i, fi) in f.iter().enumerate() {
        let covered = w.rows.get(i).map_or(PointSet::empty(fi.universe()), |row| {
            row.iter().fold(PointSet::empty(fi.universe()), |acc, p| acc.union(&p.set))
        });
        if !fi.is_subset(&covered) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exhaustive search for a witness of `(F_1, …, F_n) ≼ (V_1, …, V_m)`.
///
/// Each source point `(i, x)` is assigned a pair `(s, k)` with `s·x ∈ V_k`
/// and all tagged images distinct; sources are visited in `(i, x)` order and
/// choices tried in `(s, k)` order, so the first witness found is the
/// lexicographically least. A branch is cut when some orbit has more
/// unassigned sources than free tagged targets, which no completion can fix.
pub fn search_subequivalence(sys: &DynSystem, f: &[PointSet], v: &[PointSet]) -> Result<Option<Witness>, ComparisonError> {
    check_universe(sys, f)?;
    check_universe(sys, v)?;
    let orbit = sys.orbit_index();
    let num_orbits = orbit.iter().copied().max().map_or(0, |m| m + 1);
    let sources: Vec<(usize, Point)> = f.iter().enumerate().flat_map(|(i, s)| s.iter().map(move |x| (i, x))).collect();
    let mut demand = vec![0usize; num_orbits];
    let mut supply = vec![0usize; num_orbits];
    for &(_, x) in &sources {
        demand[orbit[x]] += 1;
    }
    for vk in v {
        for y in vk.iter() {
            supply[orbit[y]] += 1;
        }
    }
    let mut state = Search {
        sys,
        v,
        orbit: &orbit,
        sources: &sources,
        used: v.iter().map(|s| PointSet::empty(s.universe())).collect(),
        demand,
        supply,
        choice: Vec::with_capacity(sources.len()),
    };
    if !state.feasible() || !state.run(0) {
        return Ok(None);
    }
    let mut rows: Vec<BTreeMap<(GroupElem, usize), PointSet>> = vec![BTreeMap::new(); f.len()];
    for (&(i, x), &(s, k)) in sources.iter().zip(&state.choice) {
        rows[i].entry((s, k)).or_insert_with(|| PointSet::empty(sys.num_points())).insert(x);
    }
    let rows = rows
        .into_iter()
        .map(|r| r.into_iter().map(|((shift, target), set)| WitnessPiece { set, shift, target }).collect())
        .collect();
    Ok(Some(Witness { rows }))
}

struct Search<'a> {
    sys: &'a DynSystem,
    v: &'a [PointSet],
    orbit: &'a [usize],
    sources: &'a [(usize, Point)],
    used: Vec<PointSet>,
    demand: Vec<usize>,
    supply: Vec<usize>,
    choice: Vec<(GroupElem, usize)>,
}

impl Search<'_> {
    fn feasible(&self) -> bool {
        self.demand.iter().zip(&self.supply).all(|(d, s)| d <= s)
    }

    fn run(&mut self, idx: usize) -> bool {
        let Some(&(_, x)) = self.sources.get(idx) else { return true };
        let o = self.orbit[x];
        for s in self.sys.group().elements() {
            let y = self.sys.act(s, x);
            for k in 0..self.v.len() {
                if !self.v[k].contains(y) || self.used[k].contains(y) {
                    continue;
                }
                self.used[k].insert(y);
                self.demand[o] -= 1;
                self.supply[o] -= 1;
                self.choice.push((s, k));
                if self.feasible() && self.run(idx + 1) {
                    return true;
                }
                self.choice.pop();
                self.demand[o] += 1;
                self.supply[o] += 1;
                self.used[k].remove(y);
            }
        }
        false
    }
}

/// `a ≼ b`: the supports of `a` against the supports of `b`.
pub fn diag_subequivalent(sys: &DynSystem, a: &DiagTuple, b: &DiagTuple) -> Result<Option<Witness>, ComparisonError> {
    search_subequivalence(sys, &a.supports(), &b.supports())
}

/// `d_τ(f) = μ(supp° f)`.
pub fn d_tau(f: &Func, mu: &InvariantMeasure) -> Result<Rational, ComparisonError> {
    if let Some(point) = (0..f.len()).find(|&x| !f.value(x).is_nonneg_real()) {
        return Err(ComparisonError::NotPositive(AlgebraError::NotPositive { point }));
    }
    Ok(mu.measure(&f.open_support()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonReport {
    pub holds: bool,
    pub counterexample: Option<(PointSet, PointSet)>,
    /// Pairs `(O, V)` that met the measure hypothesis and were searched.
    pub pairs_searched: usize,
}

/// Every pair `O, V` with `μ(O) < μ(V)` for all extreme invariant measures
/// satisfies `O ≺ V`. Exhaustive over `4^|X|` pairs; `bound` caps that.
pub fn dynamical_comparison_check(sys: &DynSystem, bound: usize) -> Result<ComparisonReport, ComparisonError> {
    let m = sys.num_points();
    let total = 1usize.checked_shl(2 * m as u32).filter(|&t| m < 32 && t <= bound);
    let Some(_) = total else { return Err(ComparisonError::ResourceBound { budget: bound }) };
    let measures = sys.extreme_invariant_measures();
    let mut pairs_searched = 0;
    for o_mask in 0..(1u64 << m) {
        let o = PointSet::from_mask(m, o_mask);
        let mu_o: Vec<Rational> = measures.iter().map(|mu| mu.measure(&o)).collect();
        for v_mask in 0..(1u64 << m) {
            let v = PointSet::from_mask(m, v_mask);
            if !measures.iter().zip(&mu_o).all(|(mu, mo)| mo < &mu.measure(&v)) {
                continue;
            }
            pairs_searched += 1;
            if search_subequivalence(sys, core::slice::from_ref(&o), core::slice::from_ref(&v))?.is_none() {
                return Ok(ComparisonReport { holds: false, counterexample: Some((o, v)), pairs_searched });
            }
        }
    }
    Ok(ComparisonReport { holds: true, counterexample: None, pairs_searched })
}

/// Classes of indicator tuples under mutual `≼`, truncated at `max_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeSemigroup {
    /// Canonical representative of each class.
    pub classes: Vec<Vec<PointSet>>,
    /// `order[x][y]` is `x ≤ y`.
    pub order: Vec<Vec<bool>>,
    /// `add[x][y]` is `x + y`, or `None` past the size bound.
    pub add: Vec<Vec<Option<usize>>>,
    pub max_n: usize,
}

impl TypeSemigroup {
    /// Assembles a semigroup from precomputed tables.
    pub fn from_tables(classes: Vec<Vec<PointSet>>, order: Vec<Vec<bool>>, add: Vec<Vec<Option<usize>>>, max_n: usize) -> Self {
        TypeSemigroup { classes, order, add, max_n }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// `k·x` for `k ≥ 1`, if representable.
    pub fn multiple(&self, x: usize, k: usize) -> Option<usize> {
        let mut acc = x;
        for _ in 1..k {
            acc = self.add[acc][x]?;
        }
        Some(acc)
    }
}

/// Shortlex order on tuples: length first, then entrywise by bitmask value.
fn shortlex(a: &[PointSet], b: &[PointSet]) -> core::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Per-orbit point counts summed over the tuple; equal for mutually
/// subequivalent tuples.
fn orbit_profile(orbit: &[usize], num_orbits: usize, tuple: &[PointSet]) -> Vec<usize> {
    let mut out = vec![0; num_orbits];
    for s in tuple {
        for x in s.iter() {
            out[orbit[x]] += 1;
        }
    }
    out
}

/// Builds `W(X, G)` restricted to indicator tuples of length `1..=max_n`.
///
/// Tuples are bucketed by a necessary invariant (per-orbit counts) and then
/// split into classes by searching both directions against each class
/// representative, so the classes are exactly the mutual-`≼` classes.
/// `budget` caps the number of enumerated tuples.
pub fn type_semigroup(sys: &DynSystem, max_n: usize, budget: usize) -> Result<TypeSemigroup, ComparisonError> {
    let m = sys.num_points();
    if m >= 32 {
        return Err(ComparisonError::ResourceBound { budget });
    }
    let subsets = 1usize << m;
    let mut total = 0usize;
    for n in 1..=max_n {
        let count = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(subsets));
        total = count.and_then(|c| total.checked_add(c)).filter(|&t| t <= budget).ok_or(ComparisonError::ResourceBound { budget })?;
    }
    let orbit = sys.orbit_index();
    let num_orbits = orbit.iter().copied().max().map_or(0, |x| x + 1);
    let mut buckets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    let mut classes: Vec<Vec<PointSet>> = Vec::new();
    // enumeration runs in shortlex order, so the first member seen is the
    // canonical representative
    for n in 1..=max_n {
        let mut digits = vec![0u64; n];
        loop {
            let tuple: Vec<PointSet> = digits.iter().map(|&d| PointSet::from_mask(m, d)).collect();
            let key = orbit_profile(&orbit, num_orbits, &tuple);
            let bucket = buckets.entry(key).or_default();
            let mut found = false;
            for &c in bucket.iter() {
                if mutually_subequivalent(sys, &tuple, &classes[c])? {
                    found = true;
                    break;
                }
            }
            if !found {
                bucket.push(classes.len());
                classes.push(tuple);
            }
            if !increment(&mut digits, subsets as u64) {
                break;
            }
        }
    }
    debug_assert!(classes.windows(2).all(|w| shortlex(&w[0], &w[1]).is_lt()));
    let k = classes.len();
    let mut order = vec![vec![false; k]; k];
    for x in 0..k {
        for y in 0..k {
            order[x][y] = search_subequivalence(sys, &classes[x], &classes[y])?.is_some();
        }
    }
    let mut add = vec![vec![None; k]; k];
    for x in 0..k {
        for y in 0..k {
            if classes[x].len() + classes[y].len() > max_n {
                continue;
            }
            let sum: Vec<PointSet> = classes[x].iter().chain(&classes[y]).cloned().collect();
            let bucket = &buckets[&orbit_profile(&orbit, num_orbits, &sum)];
            for &c in bucket {
                if mutually_subequivalent(sys, &sum, &classes[c])? {
                    add[x][y] = Some(c);
                    break;
                }
            }
            debug_assert!(add[x][y].is_some(), "every tuple of length <= max_n was enumerated");
        }
    }
    Ok(TypeSemigroup { classes, order, add, max_n })
}

fn mutually_subequivalent(sys: &DynSystem, a: &[PointSet], b: &[PointSet]) -> Result<bool, ComparisonError> {
    Ok(search_subequivalence(sys, a, b)?.is_some() && search_subequivalence(sys, b, a)?.is_some())
}

fn increment(digits: &mut [u64], base: u64) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// A failure of almost unperforation: `(n+1)x ≤ ny` but not `x ≤ y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Perforation {
    pub x: usize,
    pub y: usize,
    pub n: usize,
}

/// Checks `(n+1)x ≤ ny ⟹ x ≤ y` for every pair of classes and every `n`
/// for which both multiples are in the table. Returns the first violation.
pub fn almost_unperforation_check(w: &TypeSemigroup) -> Option<Perforation> {
    for x in 0..w.len() {
        for y in 0..w.len() {
            if w.order[x][y] {
                continue;
            }
            let mut n = 1;
            while let (Some(lhs), Some(rhs)) = (w.multiple(x, n + 1), w.multiple(y, n)) {
                if w.order[lhs][rhs] {
                    return Some(Perforation { x, y, n });
                }
                n += 1;
            }
        }
    }
    None
}

/// Finite-dimensional Cuntz comparison of positive crossed elements: the
/// rank of every orbit block of `a` is at most that of `b`.
pub fn cuntz_oracle_elements(a: &CrossedElement, b: &CrossedElement) -> Result<bool, ComparisonError> {
    cuntz_oracle_lists(core::slice::from_ref(a), core::slice::from_ref(b))
}

/// Cuntz comparison of `diag(a_1, …, a_n)` and `diag(b_1, …, b_m)`; a
/// diagonal block's rank is the sum of the ranks of its entries.
pub fn cuntz_oracle(sys: &alloc::sync::Arc<DynSystem>, a: &DiagTuple, b: &DiagTuple) -> Result<bool, ComparisonError> {
    let lift = |t: &DiagTuple| -> Vec<CrossedElement> { t.entries().iter().map(|f| CrossedElement::from_func(sys, f.clone())).collect() };
    if !sys.is_free() {
        return Err(ComparisonError::NotFree);
    }
    cuntz_oracle_lists(&lift(a), &lift(b))
}

fn cuntz_oracle_lists(a: &[CrossedElement], b: &[CrossedElement]) -> Result<bool, ComparisonError> {
    let Some(sys) = a.iter().chain(b).map(CrossedElement::system).next() else { return Ok(true) };
    if !sys.is_free() {
        return Err(ComparisonError::NotFree);
    }
    for e in a.iter().chain(b) {
        match min_eigenvalue(e) {
            Some(min) if min >= -TOLERANCE => {}
            Some(min) => return Err(ComparisonError::NotPositive(AlgebraError::NotPositiveElement { min_eigenvalue: min })),
            None => return Err(ComparisonError::NotPositive(AlgebraError::NotPositiveElement { min_eigenvalue: f64::NAN })),
        }
    }
    for x0 in orbit_representatives(sys) {
        let rank = |list: &[CrossedElement]| -> usize { list.iter().map(|e| block_rank(&block_at_exact(e, x0))).sum() };
        if rank(a) > rank(b) {
            return Ok(false);
        }
    }
    Ok(true)
}
