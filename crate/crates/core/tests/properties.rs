use std::sync::Arc;

use proptest::prelude::*;
use xprod_core::algebra::rep::{float_blocks, regular_rep};
use xprod_core::algebra::{operator_norm, NormMode};
use xprod_core::castles::{build_castle_ozm, decompose_ozm, verify_cpc, verify_normalizer_preserving, verify_order_zero};
use xprod_core::comparison::{cuntz_oracle, d_tau, diag_subequivalent, search_subequivalence};
use xprod_core::normalizers::{
    is_normalizer, is_r_normalizer, is_r_normalizer_by_support, is_s_normalizer, matrix_is_r_normalizer,
    matrix_is_r_normalizer_by_support, matrix_is_r_normalizer_via_product,
};
use xprod_core::scalar::{int, rat};
use xprod_core::witness::{check_identity, compile, extract, single_row_rnormalizer};
use xprod_core::{
    CastleOzmData, CrossedElement, DiagTuple, DynSystem, FiniteGroup, Func, GaussQ, MatrixElement, PointSet,
    RadScalar, Tower,
};

fn groups() -> Vec<FiniteGroup> {
    let z2 = FiniteGroup::cyclic(2);
    vec![z2.clone(), FiniteGroup::cyclic(3), FiniteGroup::cyclic(4), FiniteGroup::product(&z2, &z2)]
}

/// Free systems with at most 8 points: disjoint copies of the translation
/// action.
fn free_system() -> impl Strategy<Value = Arc<DynSystem>> {
    (0..4usize, 1..=2usize).prop_filter_map("too many points", |(g, copies)| {
        let group = groups().swap_remove(g);
        (group.order() * copies <= 8).then(|| Arc::new(DynSystem::translation_copies(group, copies)))
    })
}

fn small_system() -> impl Strategy<Value = Arc<DynSystem>> {
    (0..2usize, 1..=2usize).prop_map(|(g, copies)| {
        Arc::new(DynSystem::translation_copies(FiniteGroup::cyclic(g + 2), copies))
    })
}

fn scalar() -> impl Strategy<Value = RadScalar> {
    prop_oneof![
        4 => Just(RadScalar::zero()),
        1 => (-3i64..=3, 1i64..=3).prop_map(|(n, d)| RadScalar::from_rational(rat(n, d))),
        1 => (-2i64..=2, -2i64..=2).prop_map(|(a, b)| RadScalar::from_gauss(GaussQ::new(int(a), int(b)))),
    ]
}

fn func(m: usize) -> impl Strategy<Value = Func> {
    prop::collection::vec(scalar(), m).prop_map(Func::from_values)
}

fn element_on(sys: Arc<DynSystem>) -> impl Strategy<Value = CrossedElement> {
    let (n, m) = (sys.group().order(), sys.num_points());
    prop::collection::vec(func(m), n)
        .prop_map(move |coeffs| CrossedElement::from_coeffs(&sys, coeffs).expect("sizes match"))
}

/// Sums of monomials `χ_U u_g`; these hit both normalizers and
/// non-normalizers often.
fn indicator_monomials(sys: Arc<DynSystem>) -> impl Strategy<Value = CrossedElement> {
    let (n, m) = (sys.group().order(), sys.num_points());
    prop::collection::vec((0..n, 0..(1u64 << m)), 1..=3).prop_map(move |terms| {
        terms.into_iter().fold(CrossedElement::zero(&sys), |acc, (g, mask)| {
            let mono = CrossedElement::monomial(&sys, Func::indicator(&PointSet::from_mask(sys.num_points(), mask)), g);
            acc.try_add(&mono).expect("rational")
        })
    })
}

fn positive_func(m: usize) -> impl Strategy<Value = Func> {
    prop::collection::vec(prop_oneof![2 => Just(0i64), 3 => 1i64..=4], m)
        .prop_map(|v| Func::from_rationals(v.into_iter().map(|k| rat(k, 4))))
}

fn diag_tuple(m: usize) -> impl Strategy<Value = DiagTuple> {
    prop::collection::vec(positive_func(m), 1..=2).prop_map(|e| DiagTuple::new(e).expect("positive"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms((a, b, c) in free_system().prop_flat_map(|s| (element_on(s.clone()), element_on(s.clone()), element_on(s)))) {
        let Ok(ab) = a.try_mul(&b) else { return Ok(()) };
        let Ok(bc) = b.try_mul(&c) else { return Ok(()) };
        if let (Ok(l), Ok(r)) = (ab.try_mul(&c), a.try_mul(&bc)) {
            prop_assert_eq!(l, r);
        }
        if let (Ok(l), Ok(ac)) = (b.try_add(&c).and_then(|s| a.try_mul(&s)), a.try_mul(&c)) {
            prop_assert_eq!(l, ab.try_add(&ac).unwrap());
        }
        prop_assert_eq!(ab.adjoint(), b.adjoint().try_mul(&a.adjoint()).unwrap());
        prop_assert_eq!(a.adjoint().adjoint(), a.clone());
    }

    #[test]
    fn representation_is_a_star_homomorphism((a, b) in free_system().prop_flat_map(|s| (element_on(s.clone()), element_on(s)))) {
        let ab = a.try_mul(&b).unwrap();
        let prod = regular_rep(&a).matmul(&regular_rep(&b));
        prop_assert!(regular_rep(&ab).max_abs_diff(&prod) < 1e-9);
        prop_assert!(regular_rep(&a.adjoint()).max_abs_diff(&regular_rep(&a).adjoint()) < 1e-9);
    }

    #[test]
    fn conditional_expectation(a in free_system().prop_flat_map(element_on)) {
        let sys = a.system().clone();
        let e = CrossedElement::from_func(&sys, a.cond_expectation());
        prop_assert_eq!(CrossedElement::from_func(&sys, e.cond_expectation()), e.clone());
        let (ne, na) = (operator_norm(&e, NormMode::Float).value, operator_norm(&a, NormMode::Float).value);
        prop_assert!(ne <= na + 1e-9);
        let ata = a.adjoint().try_mul(&a);
        if let Ok(ata) = ata {
            prop_assert_eq!(ata.cond_expectation().is_zero(), a.is_zero());
        }
    }

    #[test]
    fn support_of_products_and_cutdowns((f, g) in (1..=8usize).prop_flat_map(|m| (func(m), func(m))), k in 1i64..4) {
        let fg = f.mul(&g);
        prop_assert!(fg.open_support().is_subset(&f.open_support().intersection(&g.open_support())));
        let p = Func::from_values(f.values().iter().map(|v| RadScalar::from_rational(v.norm_sqr())).collect());
        prop_assert!(p.pos_cutdown(&rat(k, 2)).unwrap().open_support().is_subset(&p.open_support()));
    }

    #[test]
    fn radical_products_are_canonical(p in 1i64..40, q in 1i64..40, a in -5i64..=5, b in -5i64..=5) {
        let x = RadScalar::sqrt_of(&rat(p, 7)).unwrap().scale(&int(a));
        let y = RadScalar::sqrt_of(&rat(q, 3)).unwrap().scale(&int(b));
        let direct = RadScalar::sqrt_of(&(rat(p, 7) * rat(q, 3))).unwrap().scale(&int(a * b));
        prop_assert_eq!(&x * &y, direct.clone());
        if !direct.is_zero() {
            let radicand = direct.norm_sqr() / direct.coeff().norm_sqr();
            prop_assert_eq!(RadScalar::new(direct.coeff().clone(), &radicand).unwrap(), direct);
        }
    }

    #[test]
    fn support_characterization(a in free_system().prop_flat_map(|s| prop_oneof![element_on(s.clone()), indicator_monomials(s)])) {
        prop_assert_eq!(is_r_normalizer(&a).unwrap(), is_r_normalizer_by_support(&a).unwrap());
    }

    #[test]
    fn normalizer_closure((a, b) in free_system().prop_flat_map(|s| (indicator_monomials(s.clone()), indicator_monomials(s)))) {
        let ab = a.try_mul(&b).unwrap();
        if is_r_normalizer(&a).unwrap() && is_r_normalizer(&b).unwrap() {
            prop_assert!(is_r_normalizer(&ab).unwrap());
        }
        prop_assert_eq!(is_r_normalizer(&a.adjoint()).unwrap(), is_s_normalizer(&a).unwrap());
        prop_assert_eq!(is_normalizer(&a).unwrap(), is_r_normalizer(&a).unwrap() && is_s_normalizer(&a).unwrap());
        if is_normalizer(&a).unwrap() {
            prop_assert!(a.adjoint().try_mul(&a).unwrap().in_diagonal());
            prop_assert!(a.try_mul(&a.adjoint()).unwrap().in_diagonal());
        }
    }

    #[test]
    fn matrix_criteria_agree(x in small_system().prop_flat_map(|s| (1..=2usize).prop_flat_map(move |n| {
        let s = s.clone();
        prop::collection::vec(indicator_monomials(s.clone()), n * n)
            .prop_map(move |e| MatrixElement::from_entries(n, e).unwrap())
    }))) {
        let entrywise = matrix_is_r_normalizer(&x).unwrap();
        prop_assert_eq!(entrywise, matrix_is_r_normalizer_by_support(&x).unwrap());
        prop_assert_eq!(entrywise, matrix_is_r_normalizer_via_product(&x).unwrap());
    }

    #[test]
    fn single_row_is_r_normalizer(s in free_system(), seed in any::<u64>()) {
        let (m, n) = (s.num_points(), s.group().order());
        let f = Func::from_rationals((0..m).map(|x| rat(((seed >> x) & 3) as i64, 1)));
        let shifts: Vec<usize> = (0..n).map(|k| ((seed >> (16 + 2 * k)) as usize) % n).collect();
        // a partition of unity by residue class
        let h: Vec<Func> = (0..n)
            .map(|k| Func::indicator(&PointSet::from_points(m, (0..m).filter(|x| x % n == k))))
            .collect();
        let Ok(v) = single_row_rnormalizer(&s, &f, &h, &shifts) else {
            let moved: Vec<PointSet> = h.iter().zip(&shifts).map(|(hk, &g)| s.translate(g, &f.mul(hk).open_support())).collect();
            prop_assert!((0..n).any(|i| (i + 1..n).any(|j| !moved[i].is_disjoint(&moved[j]))));
            return Ok(());
        };
        prop_assert!(is_r_normalizer_by_support(&v).unwrap());
    }

    #[test]
    fn subequivalence_is_a_preorder((s, a, b, c) in small_system().prop_flat_map(|s| {
        let m = s.num_points();
        (Just(s), diag_tuple(m), diag_tuple(m), diag_tuple(m))
    })) {
        prop_assert!(diag_subequivalent(&s, &a, &a).unwrap().is_some());
        let ab = diag_subequivalent(&s, &a, &b).unwrap().is_some();
        let bc = diag_subequivalent(&s, &b, &c).unwrap().is_some();
        if ab && bc {
            prop_assert!(diag_subequivalent(&s, &a, &c).unwrap().is_some());
        }
        if ab {
            prop_assert!(cuntz_oracle(&s, &a, &b).unwrap());
            for mu in s.extreme_invariant_measures() {
                let total = |t: &DiagTuple| t.entries().iter().map(|f| d_tau(f, &mu).unwrap()).fold(int(0), |x, y| x + y);
                prop_assert!(total(&a) <= total(&b));
            }
        }
    }

    #[test]
    fn compile_extract_round_trip((s, a, b) in small_system().prop_flat_map(|s| {
        let m = s.num_points();
        (Just(s), diag_tuple(m), diag_tuple(m))
    }), k in 1i64..4) {
        let eps = rat(k, 8);
        let cut: Vec<PointSet> = a.entries().iter().map(|f| f.pos_cutdown(&eps).unwrap().open_support()).collect();
        let Some(w) = search_subequivalence(&s, &cut, &b.supports()).unwrap() else { return Ok(()) };
        let c = compile(&s, &a, &b, &eps, &w).unwrap();
        prop_assert!(matrix_is_r_normalizer(&c.t).unwrap());
        prop_assert!(matrix_is_r_normalizer_by_support(&c.t).unwrap());
        prop_assert!(check_identity(&s, &a, &b, &eps, &c.delta, &c.t).unwrap());
        extract(&s, &a, &b, &eps, &c.delta, &c.t).unwrap();
    }

    #[test]
    fn castle_maps_round_trip((s, data) in free_system().prop_flat_map(castle_data)) {
        let phi = build_castle_ozm(&s, &data).unwrap();
        prop_assert!(verify_cpc(&phi).unwrap().passes());
        prop_assert!(verify_order_zero(&phi).unwrap());
        prop_assert!(verify_normalizer_preserving(&phi).unwrap());
        let back = decompose_ozm(&phi).unwrap();
        prop_assert_eq!(build_castle_ozm(&s, &back).unwrap(), phi);
        // levels of the recovered castle are disjoint
        let mut seen = PointSet::empty(s.num_points());
        for (t, f) in back.castle.towers.iter().zip(&back.weights) {
            for &g in &t.shape {
                let level = s.translate(g, &f.open_support());
                prop_assert!(level.is_disjoint(&seen));
                seen = seen.union(&level);
            }
        }
    }

    #[test]
    fn measures_are_invariant_and_independent(s in free_system()) {
        let ms = s.extreme_invariant_measures();
        prop_assert_eq!(ms.len(), s.orbits().len());
        for (i, mu) in ms.iter().enumerate() {
            prop_assert!(mu.is_invariant(&s));
            // disjoint supports make the family independent
            for nu in &ms[i + 1..] {
                prop_assert!(mu.weights.iter().zip(&nu.weights).all(|(a, b)| *a == int(0) || *b == int(0)));
            }
        }
    }

    #[test]
    fn products_with_cyclic_groups(s in free_system(), n in 1usize..=3) {
        let p = s.product_with_cyclic(n);
        prop_assert!(p.is_free());
        prop_assert_eq!(p.orbits().len(), s.orbits().len());
    }

    #[test]
    fn action_is_a_homomorphism(s in free_system()) {
        let g = s.group();
        for a in g.elements() {
            for b in g.elements() {
                for x in 0..s.num_points() {
                    prop_assert_eq!(s.act(a, s.act(b, x)), s.act(g.mul(a, b), x));
                }
            }
        }
        prop_assert!((0..s.num_points()).all(|x| s.act(g.identity(), x) == x));
    }

    #[test]
    fn float_blocks_match_representation(a in free_system().prop_flat_map(element_on)) {
        let norm = operator_norm(&a, NormMode::Float).value;
        let blocks = float_blocks(&a).iter().map(|b| b.spectral_norm()).fold(0.0, f64::max);
        prop_assert!((norm - blocks).abs() < 1e-9);
    }
}

/// Random castle data: towers from disjoint point classes, shapes drawn
/// as distinct group elements, weights in (0, 1], phases in {±1, ±i}.
fn castle_data(s: Arc<DynSystem>) -> impl Strategy<Value = (Arc<DynSystem>, CastleOzmData)> {
    let (m, order) = (s.num_points(), s.group().order());
    (1..=order.min(3), prop::collection::vec(any::<u32>(), 3), prop::collection::vec(1i64..=4, m), prop::collection::vec(0usize..4, 3 * order))
        .prop_map(move |(n, seeds, weights, phases)| {
            let sys = s.clone();
            let mut taken = PointSet::empty(m);
            let mut data = CastleOzmData::empty(n);
            for (t, seed) in seeds.iter().enumerate() {
                let mut shape: Vec<usize> = (0..order).collect();
                let rot = (*seed as usize) % order;
                shape.rotate_left(rot);
                if seed & 1 == 1 {
                    shape.reverse();
                }
                shape.truncate(n);
                let mut base = PointSet::empty(m);
                for x in 0..m {
                    if (seed >> (x % 16)) & 2 == 0 {
                        continue;
                    }
                    let levels: Vec<usize> = shape.iter().map(|&g| sys.act(g, x)).collect();
                    if levels.iter().all(|&y| !taken.contains(y)) {
                        levels.iter().for_each(|&y| taken.insert(y));
                        base.insert(x);
                    }
                }
                if base.is_empty() {
                    continue;
                }
                let w = Func::from_rationals((0..m).map(|x| if base.contains(x) { rat(weights[x], 4) } else { int(0) }));
                let units = [GaussQ::one(), GaussQ::i(), -&GaussQ::one(), -&GaussQ::i()];
                let ph = (0..n)
                    .map(|i| Func::constant(m, RadScalar::from_gauss(units[phases[t * order + i]].clone())))
                    .collect();
                data.castle.towers.push(Tower { base, shape });
                data.weights.push(w);
                data.phases.push(ph);
            }
            (sys, data)
        })
}
