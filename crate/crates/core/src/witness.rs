//! Translation between combinatorial witnesses of `a ≼ b` and matrix
//! r-normalizers `t` with `t*(b-δ)_+ t = (a-ε)_+`.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{matrix_operator_norm, CrossedElement, Func, MatrixElement};
use crate::comparison::{check_witness, diag_subequivalent, search_subequivalence, DiagTuple, Witness, WitnessPiece};
use crate::dynsys::{DynSystem, GroupElem};
use crate::error::{ComparisonError, WitnessError};
use crate::linalg::TOLERANCE;
use crate::normalizers::matrix_is_r_normalizer;
use crate::pointset::PointSet;
use crate::scalar::{int, rat, RadScalar, Rational};

/// The functions used to assemble `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    /// `h[i][j]` for piece `j` of row `i`; `Σ_j h_ij² = (a_i - ε)_+`.
    pub h: Vec<Vec<Func>>,
    /// `b̂_l = (b_l - δ)^{-1/2}` on the footprint of target `l`, zero elsewhere.
    pub b_hat: Vec<Func>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledWitness {
    pub t: MatrixElement,
    pub delta: Rational,
    pub epsilon: Rational,
    pub certificate: Certificate,
}

fn rational_entries(t: &DiagTuple) -> bool {
    t.entries().iter().all(|f| f.values().iter().all(|v| v.as_rational().is_some()))
}

fn padded(t: &DiagTuple, size: usize, points: usize) -> Vec<Func> {
    let mut out = t.entries().to_vec();
    out.resize(size, Func::zero(points));
    out
}

fn cutdown_all(funcs: &[Func], eps: &Rational) -> Result<Vec<Func>, WitnessError> {
    Ok(funcs.iter().map(|f| f.pos_cutdown(eps)).collect::<Result<_, _>>()?)
}

/// Smallest positive value over all entries, if any.
fn min_positive(funcs: &[Func]) -> Option<Rational> {
    funcs.iter().flat_map(|f| f.values()).filter_map(|v| v.as_rational()).filter(|q| q > &&int(0)).min().cloned()
}

/// Builds `t` from a witness for `supp°((a_i - ε)_+) ≼ supp°(b_l)`.
///
/// Each point of `supp°((a_i - ε)_+)` goes to the first piece covering it,
/// so the `h_ij` have disjoint supports and every sum below adds like
/// radicals. `δ` is half the least value of `b` over the translated
/// footprint. The result is verified exactly before it is returned.
pub fn compile(sys: &Arc<DynSystem>, a: &DiagTuple, b: &DiagTuple, eps: &Rational, w: &Witness) -> Result<CompiledWitness, WitnessError> {
    if eps <= &int(0) {
        return Err(WitnessError::NonPositiveParameter);
    }
    if !rational_entries(a) || !rational_entries(b) {
        return Err(WitnessError::PreconditionFailed("tuple entries must be rational valued"));
    }
    let m = sys.num_points();
    let size = a.len().max(b.len());
    let a_pad = padded(a, size, m);
    let b_pad = padded(b, size, m);
    let cut = cutdown_all(&a_pad, eps)?;
    let sources: Vec<PointSet> = cut[..a.len()].iter().map(Func::open_support).collect();
    if !check_witness(sys, &sources, &b.supports(), w)? {
        return Err(WitnessError::InvalidWitness("pieces do not cover supp((a - eps)_+) disjointly inside supp(b)"));
    }

    let mut h: Vec<Vec<Func>> = Vec::with_capacity(a.len());
    let mut footprint = vec![PointSet::empty(m); size];
    for i in 0..a.len() {
        let row: &[WitnessPiece] = w.rows.get(i).map_or(&[], Vec::as_slice);
        let root = cut[i].sqrt()?;
        let mut left = sources[i].clone();
        let mut hrow = Vec::with_capacity(row.len());
        for p in row {
            let assigned = left.intersection(&p.set);
            left = left.difference(&assigned);
            footprint[p.target] = footprint[p.target].union(&sys.translate(p.shift, &assigned));
            hrow.push(root.restrict(&assigned));
        }
        h.push(hrow);
    }

    let footprint_values: Vec<Rational> = (0..size)
        .flat_map(|l| footprint[l].iter().map(move |y| (l, y)))
        .map(|(l, y)| b_pad[l].value(y).as_rational().cloned().expect("rational entries"))
        .collect();
    let delta = match footprint_values.iter().min() {
        Some(v) => v * rat(1, 2),
        None => min_positive(&b_pad).map_or(rat(1, 2), |v| v * rat(1, 2)),
    };

    let mut b_hat = Vec::with_capacity(size);
    for l in 0..size {
        let mut f = Func::zero(m);
        for y in footprint[l].iter() {
            let q = b_pad[l].value(y).as_rational().expect("rational entries") - &delta;
            f.set_value(y, RadScalar::inv_sqrt_of(&q)?);
        }
        b_hat.push(f);
    }

    let mut t = MatrixElement::zero(sys, size);
    for (i, row) in h.iter().enumerate() {
        for (p, hij) in w.rows.get(i).map_or(&[][..], Vec::as_slice).iter().zip(row) {
            let l = p.target;
            // b̂_l u_s h = b̂_l (h ∘ α_{s⁻¹}) u_s
            let moved = hij.compose_act(sys, sys.group().inv(p.shift));
            let term = CrossedElement::monomial(sys, b_hat[l].mul(&moved), p.shift);
            let entry = t.entry(l, i).try_add(&term).map_err(|_| WitnessError::InternalInvariant("unlike radicals in t"))?;
            t.set_entry(l, i, entry);
        }
    }

    let compiled = CompiledWitness { t, delta, epsilon: eps.clone(), certificate: Certificate { h, b_hat } };
    if !matrix_is_r_normalizer(&compiled.t).map_err(|_| WitnessError::InternalInvariant("unlike radicals in t*Dt"))? {
        return Err(WitnessError::InternalInvariant("compiled t is not a matrix r-normalizer"));
    }
    if !identity_holds(sys, &compiled.t, &a_pad, &b_pad, eps, &compiled.delta)? {
        return Err(WitnessError::InternalInvariant("t*(b - delta)_+ t differs from (a - eps)_+"));
    }
    Ok(compiled)
}

/// `t*(b - δ)_+ t = (a - ε)_+` exactly, for tuples already padded to the
/// size of `t`.
fn identity_holds(sys: &Arc<DynSystem>, t: &MatrixElement, a: &[Func], b: &[Func], eps: &Rational, delta: &Rational) -> Result<bool, WitnessError> {
    let lhs = t.adjoint().try_mul(&MatrixElement::diag(sys, &cutdown_all(b, delta)?))?.try_mul(t)?;
    Ok(lhs == MatrixElement::diag(sys, &cutdown_all(a, eps)?))
}

/// Verifies `t*(b - δ)_+ t = (a - ε)_+`, padding both tuples to the size of `t`.
pub fn check_identity(sys: &Arc<DynSystem>, a: &DiagTuple, b: &DiagTuple, eps: &Rational, delta: &Rational, t: &MatrixElement) -> Result<bool, WitnessError> {
    let n = t.size();
    if a.len() > n || b.len() > n {
        return Ok(false);
    }
    let m = sys.num_points();
    identity_holds(sys, t, &padded(a, n, m), &padded(b, n, m), eps, delta)
}

/// Reads a witness off an r-normalizer `t` with `t*(b-δ)_+ t = (a-ε)_+`:
/// for row `i`, target `k` and group element `s`, the piece is
/// `s⁻¹·(supp°(t_{k,i,s}) ∩ supp°(b_k))`.
pub fn extract(sys: &Arc<DynSystem>, a: &DiagTuple, b: &DiagTuple, eps: &Rational, delta: &Rational, t: &MatrixElement) -> Result<Witness, WitnessError> {
    if eps <= &int(0) || delta <= &int(0) {
        return Err(WitnessError::NonPositiveParameter);
    }
    if t.size() != a.len().max(b.len()) {
        return Err(WitnessError::PreconditionFailed("t must have size max(len a, len b)"));
    }
    if t.system().is_some_and(|s| !Arc::ptr_eq(s, sys) && **s != **sys) {
        return Err(WitnessError::PreconditionFailed("t lives over a different system"));
    }
    if !matrix_is_r_normalizer(t)? {
        return Err(WitnessError::PreconditionFailed("t is not a matrix r-normalizer"));
    }
    if !check_identity(sys, a, b, eps, delta, t)? {
        return Err(WitnessError::PreconditionFailed("t*(b - delta)_+ t differs from (a - eps)_+"));
    }
    let supp_b = b.supports();
    let mut rows = Vec::with_capacity(a.len());
    for i in 0..a.len() {
        let mut row = Vec::new();
        for (k, vk) in supp_b.iter().enumerate() {
            for s in sys.group().elements() {
                let image = t.entry(k, i).coeff(s).open_support().intersection(vk);
                if !image.is_empty() {
                    row.push(WitnessPiece { set: sys.translate(sys.group().inv(s), &image), shift: s, target: k });
                }
            }
        }
        rows.push(row);
    }
    let w = Witness { rows };
    let sources: Vec<PointSet> = a.entries().iter().map(|f| f.pos_cutdown(eps).map(|c| c.open_support())).collect::<Result<_, _>>()?;
    if !check_witness(sys, &sources, &supp_b, &w)? {
        return Err(WitnessError::InternalInvariant("extracted witness fails the witness check"));
    }
    Ok(w)
}

/// `v = Σ_i ((f h_i)^{1/2} ∘ α_{s_i}^{-1}) u_{s_i}` for translated supports
/// `s_i·supp°(f h_i)` that are pairwise disjoint.
pub fn single_row_rnormalizer(sys: &Arc<DynSystem>, f: &Func, h: &[Func], s: &[GroupElem]) -> Result<CrossedElement, WitnessError> {
    if h.len() != s.len() {
        return Err(WitnessError::PreconditionFailed("one group element per function"));
    }
    let translated: Vec<PointSet> = h.iter().zip(s).map(|(hi, &si)| sys.translate(si, &f.mul(hi).open_support())).collect();
    for i in 0..translated.len() {
        for j in i + 1..translated.len() {
            if !translated[i].is_disjoint(&translated[j]) {
                return Err(WitnessError::SupportOverlap { i, j });
            }
        }
    }
    let mut v = CrossedElement::zero(sys);
    for (hi, &si) in h.iter().zip(s) {
        let root = f.mul(hi).sqrt()?;
        let term = CrossedElement::monomial(sys, root.compose_act(sys, sys.group().inv(si)), si);
        v = v.try_add(&term)?;
    }
    Ok(v)
}

/// One point of the ε grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub epsilon: Rational,
    pub delta: Option<Rational>,
    pub compiled: bool,
    /// `‖t'* b t' - a‖` for the rescaled `t'`, when compiled.
    pub approx_norm: Option<f64>,
}

/// Outcome of the bounded search for `t` when no witness exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refutation {
    pub candidates: usize,
    /// The whole bounded space was searched without hitting the budget.
    pub exhausted: bool,
    pub found: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub subequivalent: bool,
    pub witness: Option<Witness>,
    pub grid: Vec<GridPoint>,
    pub refutation: Option<Refutation>,
    pub inconsistencies: Vec<String>,
}

impl EquivalenceReport {
    pub fn consistent(&self) -> bool {
        self.inconsistencies.is_empty()
    }
}

/// Note carried by every report: the sequence condition is replaced by a
/// finite ε grid with float norms.
pub const GRID_SURROGATE_NOTE: &str = "approximate subequivalence checked on a finite epsilon grid with float norms";

/// Cross-checks the three characterizations of `a ≼ b` on a grid of ε:
/// the combinatorial search, exact compilation of `t`, and the float bound
/// `‖t'* b t' - a‖ ≤ ε` for `t' = c·t` with `c = ((b-δ)_+/b)^{1/2}` on
/// `supp°(b)`, so that `t'* b t' = (a-ε)_+`.
pub fn prop_equivalence_suite(sys: &Arc<DynSystem>, a: &DiagTuple, b: &DiagTuple, budget: usize) -> Result<EquivalenceReport, WitnessError> {
    if !sys.is_free() {
        return Err(ComparisonError::NotFree.into());
    }
    let witness = diag_subequivalent(sys, a, b)?;
    let subequivalent = witness.is_some();
    let base = min_positive(a.entries()).unwrap_or_else(|| int(1));
    let eps_grid = [rat(1, 2), rat(1, 4), rat(1, 10)].map(|q| &base * q);
    let size = a.len().max(b.len());
    let m = sys.num_points();
    let a_pad = padded(a, size, m);
    let b_pad = padded(b, size, m);
    let mut grid = Vec::new();
    let mut inconsistencies = Vec::new();
    for eps in eps_grid {
        let sources: Vec<PointSet> = cutdown_all(a.entries(), &eps)?.iter().map(Func::open_support).collect();
        let compiled = match search_subequivalence(sys, &sources, &b.supports())? {
            Some(w) => Some(compile(sys, a, b, &eps, &w)?),
            None => None,
        };
        let mut point = GridPoint { epsilon: eps.clone(), delta: None, compiled: compiled.is_some(), approx_norm: None };
        if let Some(c) = &compiled {
            point.delta = Some(c.delta.clone());
            let t2 = rescale(sys, &c.t, &b_pad, &c.delta)?;
            let lhs = t2.adjoint().try_mul(&MatrixElement::diag(sys, &b_pad))?.try_mul(&t2)?;
            let diff = lhs.try_sub(&MatrixElement::diag(sys, &a_pad))?;
            let norm = matrix_operator_norm(&diff)?;
            point.approx_norm = Some(norm);
            if norm > rat_to_f64(&eps) + TOLERANCE {
                inconsistencies.push(alloc::format!("norm {norm} exceeds epsilon {eps}"));
            }
        }
        if point.compiled != subequivalent {
            inconsistencies.push(alloc::format!("compilation at epsilon {eps} disagrees with the search"));
        }
        grid.push(point);
    }
    let refutation = if subequivalent {
        None
    } else {
        let eps = eps_grid_last(&base);
        let delta = min_positive(b.entries()).map_or(rat(1, 2), |v| v * rat(1, 2));
        let r = bounded_refutation(sys, a, b, &eps, &delta, budget)?;
        if r.found {
            inconsistencies.push("bounded search found t although no witness exists".into());
        }
        Some(r)
    };
    Ok(EquivalenceReport { subequivalent, witness, grid, refutation, inconsistencies })
}

fn eps_grid_last(base: &Rational) -> Rational {
    base * rat(1, 10)
}

fn rat_to_f64(q: &Rational) -> f64 {
    crate::scalar::rat_to_f64(q)
}

/// `t'_{l,i} = c_l · t_{l,i}` with `c_l = ((b_l-δ)_+ / b_l)^{1/2}` on `supp°(b_l)`.
fn rescale(sys: &Arc<DynSystem>, t: &MatrixElement, b: &[Func], delta: &Rational) -> Result<MatrixElement, WitnessError> {
    let n = t.size();
    let mut out = t.clone();
    for l in 0..n {
        let mut c = Func::zero(sys.num_points());
        for y in 0..sys.num_points() {
            let bl = b[l].value(y).as_rational().expect("rational entries");
            if bl > &int(0) {
                let ratio = if bl > delta { (bl - delta) / bl } else { int(0) };
                c.set_value(y, RadScalar::sqrt_of(&ratio)?);
            }
        }
        for i in 0..n {
            out.set_entry(l, i, t.entry(l, i).left_mul_func(&c));
        }
    }
    Ok(out)
}

/// Searches `t` whose coefficients are supported on single tagged points:
/// each source point `(i, x)` is left out or sent to some `(s, k)` with
/// `s·x ∈ supp°(b_k)`, carrying a value from a small grid. Candidates are
/// tested against the r-normalizer predicate and the exact identity.
pub fn bounded_refutation(sys: &Arc<DynSystem>, a: &DiagTuple, b: &DiagTuple, eps: &Rational, delta: &Rational, budget: usize) -> Result<Refutation, WitnessError> {
    let size = a.len().max(b.len());
    let m = sys.num_points();
    let a_pad = padded(a, size, m);
    let b_pad = padded(b, size, m);
    let cut_a = cutdown_all(&a_pad, eps)?;
    let cut_b = cutdown_all(&b_pad, delta)?;
    let supp_b = b.supports();
    let sources: Vec<(usize, usize)> = (0..a.len()).flat_map(|i| cut_a[i].open_support().iter().map(move |x| (i, x)).collect::<Vec<_>>()).collect();
    // per source: None, or (s, k, value)
    let mut options: Vec<Vec<Option<(GroupElem, usize, RadScalar)>>> = Vec::new();
    for &(i, x) in &sources {
        let mut opts = vec![None];
        for s in sys.group().elements() {
            let y = sys.act(s, x);
            for (k, vk) in supp_b.iter().enumerate() {
                if !vk.contains(y) {
                    continue;
                }
                let mut values = vec![RadScalar::one(), RadScalar::from_rational(rat(1, 2))];
                // the value that balances the identity at x
                if let (Some(num), Some(den)) = (cut_a[i].value(x).as_rational(), cut_b[k].value(y).as_rational()) {
                    if den > &int(0) {
                        let v = RadScalar::sqrt_of(&(num / den))?;
                        if !values.contains(&v) {
                            values.insert(0, v);
                        }
                    }
                }
                opts.extend(values.into_iter().map(|v| Some((s, k, v))));
            }
        }
        options.push(opts);
    }
    let mut idx = vec![0usize; sources.len()];
    let mut candidates = 0;
    loop {
        if candidates >= budget {
            return Ok(Refutation { candidates, exhausted: false, found: false });
        }
        candidates += 1;
        let mut t = MatrixElement::zero(sys, size);
        for (n, &(i, x)) in sources.iter().enumerate() {
            if let Some((s, k, v)) = &options[n][idx[n]] {
                let y = sys.act(*s, x);
                let mut f = Func::zero(m);
                f.set_value(y, v.clone());
                let entry = t.entry(*k, i).try_add(&CrossedElement::monomial(sys, f, *s))?;
                t.set_entry(*k, i, entry);
            }
        }
        let passes = matrix_is_r_normalizer(&t).unwrap_or(false) && identity_holds(sys, &t, &a_pad, &b_pad, eps, delta).unwrap_or(false);
        if passes {
            return Ok(Refutation { candidates, exhausted: false, found: true });
        }
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return Ok(Refutation { candidates, exhausted: true, found: false });
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < options[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::FiniteGroup;
    use crate::normalizers::{is_r_normalizer, is_r_normalizer_by_support, matrix_is_r_normalizer_by_support};

    fn sys(n: usize) -> Arc<DynSystem> {
        Arc::new(DynSystem::translation(FiniteGroup::cyclic(n)))
    }

    fn set(m: usize, pts: &[usize]) -> PointSet {
        PointSet::from_points(m, pts.iter().copied())
    }

    fn standard() -> (Arc<DynSystem>, DiagTuple, DiagTuple, Witness) {
        let s = sys(3);
        let a = DiagTuple::indicators(&[set(3, &[0])]);
        let b = DiagTuple::indicators(&[set(3, &[1, 2])]);
        let w = Witness { rows: vec![vec![WitnessPiece { set: set(3, &[0]), shift: 1, target: 0 }]] };
        (s, a, b, w)
    }

    #[test]
    fn compile_standard_instance() {
        let (s, a, b, w) = standard();
        let c = compile(&s, &a, &b, &rat(1, 2), &w).unwrap();
        assert_eq!(c.delta, rat(1, 2));
        // t = (1/√(1-δ))·√(1/2) at point 1 on u_1, which is 1
        let coeff = c.t.entry(0, 0).coeff(1);
        assert!(coeff.value(1).is_one());
        assert!(coeff.value(0).is_zero() && coeff.value(2).is_zero());
        assert!(matrix_is_r_normalizer(&c.t).unwrap());
        assert!(matrix_is_r_normalizer_by_support(&c.t).unwrap());
        let back = extract(&s, &a, &b, &rat(1, 2), &c.delta, &c.t).unwrap();
        assert!(check_witness(&s, &[set(3, &[0])], &b.supports(), &back).unwrap());
    }

    #[test]
    fn radical_values_appear_for_other_epsilon() {
        let (s, a, b, w) = standard();
        let c = compile(&s, &a, &b, &rat(1, 3), &w).unwrap();
        // √(2/3) / √(1/2) = (2/3)√3
        let v = c.t.entry(0, 0).coeff(1).value(1).clone();
        assert_eq!(v, RadScalar::sqrt_of(&rat(4, 3)).unwrap());
        assert!(check_identity(&s, &a, &b, &rat(1, 3), &c.delta, &c.t).unwrap());
    }

    #[test]
    fn large_epsilon_gives_zero() {
        let (s, a, b, _) = standard();
        let c = compile(&s, &a, &b, &int(1), &Witness::default()).unwrap();
        assert!(c.t.is_zero());
        let back = extract(&s, &a, &b, &int(1), &c.delta, &c.t).unwrap();
        assert!(back.pieces().next().is_none());
    }

    #[test]
    fn split_support_partitions_exactly() {
        let s = sys(4);
        let a = DiagTuple::new(vec![Func::from_rationals([int(1), rat(3, 4), int(0), int(0)])]).unwrap();
        let b = DiagTuple::indicators(&[set(4, &[2, 3])]);
        let w = Witness {
            rows: vec![vec![
                WitnessPiece { set: set(4, &[0]), shift: 2, target: 0 },
                WitnessPiece { set: set(4, &[0, 1]), shift: 1, target: 0 },
            ]],
        };
        assert!(compile(&s, &a, &b, &rat(1, 4), &w).is_err());
        let w = Witness {
            rows: vec![vec![
                WitnessPiece { set: set(4, &[0]), shift: 2, target: 0 },
                WitnessPiece { set: set(4, &[1]), shift: 2, target: 0 },
            ]],
        };
        let c = compile(&s, &a, &b, &rat(1, 4), &w).unwrap();
        let mut total = Func::zero(4);
        for h in &c.certificate.h[0] {
            total = total.try_add(&h.mul(h)).unwrap();
        }
        assert_eq!(total, Func::from_rationals([rat(3, 4), rat(1, 2), int(0), int(0)]));
    }

    #[test]
    fn invalid_witness_is_rejected() {
        let (s, a, b, _) = standard();
        let w = Witness { rows: vec![vec![WitnessPiece { set: set(3, &[0]), shift: 0, target: 0 }]] };
        assert!(matches!(compile(&s, &a, &b, &rat(1, 2), &w), Err(WitnessError::InvalidWitness(_))));
    }

    #[test]
    fn extract_rejects_corrupted_t() {
        let (s, a, b, w) = standard();
        let c = compile(&s, &a, &b, &rat(1, 2), &w).unwrap();
        let mut t = c.t.clone();
        t.set_entry(0, 0, t.entry(0, 0).scale(&RadScalar::from_rational(int(2))));
        assert!(matches!(extract(&s, &a, &b, &rat(1, 2), &c.delta, &t), Err(WitnessError::PreconditionFailed(_))));
    }

    #[test]
    fn hand_built_t_on_z4() {
        // two sources moved into two targets by different shifts
        let s = sys(4);
        let a = DiagTuple::indicators(&[set(4, &[0]), set(4, &[1])]);
        let b = DiagTuple::indicators(&[set(4, &[2]), set(4, &[0])]);
        let r2 = RadScalar::sqrt_of(&int(2)).unwrap();
        let mut t = MatrixElement::zero(&s, 2);
        // t_00 = √2 χ_2 u_2 sends 0 to 2; t_11 = √2 χ_0 u_3 sends 1 to 0
        t.set_entry(0, 0, CrossedElement::monomial(&s, Func::indicator(&set(4, &[2])).scale(&r2), 2));
        t.set_entry(1, 1, CrossedElement::monomial(&s, Func::indicator(&set(4, &[0])).scale(&r2), 3));
        let w = extract(&s, &a, &b, &rat(1, 2), &rat(3, 4), &t).unwrap();
        assert_eq!(w.rows.len(), 2);
        assert_eq!(w.rows[0], vec![WitnessPiece { set: set(4, &[0]), shift: 2, target: 0 }]);
        assert_eq!(w.rows[1], vec![WitnessPiece { set: set(4, &[1]), shift: 3, target: 1 }]);
    }

    #[test]
    fn single_row_examples() {
        let s = sys(4);
        let chi0 = Func::indicator(&set(4, &[0]));
        let v = single_row_rnormalizer(&s, &chi0, core::slice::from_ref(&chi0), &[0]).unwrap();
        assert_eq!(v, CrossedElement::from_func(&s, chi0.clone()));
        assert!(is_r_normalizer(&v).unwrap());
        let f = Func::indicator(&set(4, &[0, 1]));
        let h = [Func::indicator(&set(4, &[0])), Func::indicator(&set(4, &[1]))];
        let v = single_row_rnormalizer(&s, &f, &h, &[0, 0]).unwrap();
        assert!(is_r_normalizer(&v).unwrap() && is_r_normalizer_by_support(&v).unwrap());
        let v = single_row_rnormalizer(&s, &f, &h, &[2, 2]).unwrap();
        assert!(is_r_normalizer(&v).unwrap());
        assert_eq!(single_row_rnormalizer(&s, &f, &h, &[1, 0]), Err(WitnessError::SupportOverlap { i: 0, j: 1 }));
    }

    #[test]
    fn suite_examples() {
        let (s, a, b, _) = standard();
        let r = prop_equivalence_suite(&s, &a, &b, 10_000).unwrap();
        assert!(r.subequivalent && r.consistent());
        assert!(r.grid.iter().all(|p| p.compiled && p.approx_norm.unwrap() <= crate::scalar::rat_to_f64(&p.epsilon) + 1e-9));
        let r = prop_equivalence_suite(&s, &b, &a, 10_000).unwrap();
        assert!(!r.subequivalent && r.consistent());
        let refutation = r.refutation.unwrap();
        assert!(!refutation.found && refutation.exhausted);
        let r = prop_equivalence_suite(&s, &a, &a, 10_000).unwrap();
        let w = r.witness.unwrap();
        assert!(w.pieces().all(|(i, p)| p.shift == 0 && p.target == i));
    }
}
