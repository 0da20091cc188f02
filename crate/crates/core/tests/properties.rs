//! Randomized invariants for the whole stack, from monomial orders up to
//! the certificate engine. Case counts shrink as the per-case cost grows.

use std::cmp::Ordering;

use proptest::prelude::*;

use keller_core::criteria::{
    cmw_decompose_2d, exchange_tag, recover_coordinate_cubic_special, recover_coordinate_quadratic,
    AnnihilatorInput, SymmetryTag,
};
use keller_core::endo::{compose, generic_linear_compose, invert, make_monic_in_last, PolyMap};
use keller_core::extension::{
    coordinate_minpoly, extension_degree, root_closure_check, tower_degree, RootClosure,
};
use keller_core::families::generate_family;
use keller_core::groebner::{
    buchberger_with_budget, elimination_ideal_with_budget, minpoly_in_quotient, quotient_dimension,
    Budget, GroebnerBasis, GroebnerError, QuotientDim,
};
use keller_core::root::poly_nth_root;
use keller_core::text::parse_polynomial;
use keller_core::{Family, GeneratorSpec, Monomial, MonomialOrder, Polynomial, Rational};

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn monomials_up_to(nvars: usize, maxdeg: u32) -> Vec<Monomial> {
    let mut stems: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..nvars {
        let mut next = Vec::new();
        for stem in &stems {
            let used: u32 = stem.iter().sum();
            for e in 0..=(maxdeg - used) {
                let mut v = stem.clone();
                v.push(e);
                next.push(v);
            }
        }
        stems = next;
    }
    stems.into_iter().map(Monomial::new).collect()
}

fn arb_monomial(nvars: usize, maxdeg: u32) -> impl Strategy<Value = Monomial> {
    proptest::sample::select(monomials_up_to(nvars, maxdeg))
}

fn arb_coeff() -> impl Strategy<Value = Rational> {
    (-3i64..=3).prop_map(q)
}

fn nonzero_coeff() -> impl Strategy<Value = Rational> {
    proptest::sample::select(vec![q(-3), q(-2), q(-1), q(1), q(2), q(3)])
}

fn arb_poly(nvars: usize, maxdeg: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    proptest::collection::vec((arb_monomial(nvars, maxdeg), arb_coeff()), 0..=max_terms)
        .prop_map(move |terms| Polynomial::from_terms(nvars, terms))
}

fn arb_nonzero_poly(
    nvars: usize,
    maxdeg: u32,
    max_terms: usize,
) -> impl Strategy<Value = Polynomial> {
    proptest::collection::vec((arb_monomial(nvars, maxdeg), nonzero_coeff()), 1..=max_terms)
        .prop_map(move |terms| Polynomial::from_terms(nvars, terms))
        .prop_filter("cancelled to zero", |p| !p.is_zero())
}

/// Every coordinate nonzero, so degree bookkeeping never sees -1.
fn arb_map(nvars: usize, maxdeg: u32) -> impl Strategy<Value = PolyMap> {
    proptest::collection::vec(arb_nonzero_poly(nvars, maxdeg, 3), nvars)
        .prop_map(|coords| PolyMap::new(coords).expect("matching rings"))
}

fn arb_order() -> impl Strategy<Value = MonomialOrder> {
    prop_oneof![
        Just(MonomialOrder::Lex),
        Just(MonomialOrder::GrevLex),
        Just(MonomialOrder::eliminating(vec![0])),
        Just(MonomialOrder::eliminating(vec![0, 2])),
    ]
}

fn triangular(n: usize, seed: u64) -> PolyMap {
    generate_family(&GeneratorSpec::new(Family::Triangular, seed, n)).expect("triangular generator")
}

/// {x1^a - p(x2), x2^b - c}: leading terms are coprime, so the quotient is
/// a free tower of dimension a*b no matter what p is.
fn zero_dim_gens(a: u32, b: u32, p: &Polynomial, c: &Rational) -> Vec<Polynomial> {
    let g1 = &Polynomial::term(2, Monomial::var(2, 0).pow(a), q(1)) - p;
    let g2 = &Polynomial::term(2, Monomial::var(2, 1).pow(b), q(1)) - &Polynomial::constant(2, c.clone());
    vec![g1, g2]
}

/// Univariate in x2 with degree below `cap`, as a 2-variable polynomial.
fn arb_x2_poly(cap: u32) -> impl Strategy<Value = Polynomial> {
    proptest::collection::vec(arb_coeff(), 1..=cap as usize)
        .prop_map(|cs| {
            Polynomial::from_terms(
                2,
                cs.into_iter().enumerate().map(|(k, c)| (Monomial::var(2, 1).pow(k as u32), c)),
            )
        })
}

const TEST_BUDGET: Budget = Budget { max_pairs: 4_000, max_terms: 200_000 };

fn gb_within_budget(gens: &[Polynomial], order: MonomialOrder) -> Option<GroebnerBasis> {
    match buchberger_with_budget(gens, order, &TEST_BUDGET) {
        Ok(gb) => Some(gb),
        Err(GroebnerError::PairBudget { .. }) | Err(GroebnerError::TermBudget { .. }) => None,
        Err(e) => panic!("unexpected groebner failure: {e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn order_is_total_and_antisymmetric(
        ord in arb_order(),
        a in arb_monomial(3, 4),
        b in arb_monomial(3, 4),
    ) {
        prop_assert_eq!(ord.cmp(&a, &b) == Ordering::Equal, a == b);
        prop_assert_eq!(ord.cmp(&a, &b), ord.cmp(&b, &a).reverse());
    }

    #[test]
    fn order_is_transitive(
        ord in arb_order(),
        a in arb_monomial(3, 4),
        b in arb_monomial(3, 4),
        c in arb_monomial(3, 4),
    ) {
        if ord.cmp(&a, &b) != Ordering::Greater && ord.cmp(&b, &c) != Ordering::Greater {
            prop_assert_ne!(ord.cmp(&a, &c), Ordering::Greater);
        }
    }

    #[test]
    fn order_respects_multiplication(
        ord in arb_order(),
        a in arb_monomial(3, 4),
        b in arb_monomial(3, 4),
        c in arb_monomial(3, 4),
    ) {
        prop_assert_eq!(ord.cmp(&a, &b), ord.cmp(&a.mul(&c), &b.mul(&c)));
    }

    #[test]
    fn order_puts_the_unit_first(ord in arb_order(), a in arb_monomial(3, 4)) {
        prop_assert_ne!(ord.cmp(&Monomial::unit(3), &a), Ordering::Greater);
    }

    #[test]
    fn print_then_parse_is_identity(p in arb_poly(3, 4, 6)) {
        let printed = p.to_string();
        prop_assert_eq!(parse_polynomial(&printed, 3).expect("own output reparses"), p);
    }

    #[test]
    fn degrees_add_under_multiplication(
        p in arb_nonzero_poly(3, 3, 4),
        q in arb_nonzero_poly(3, 3, 4),
    ) {
        let prod = &p * &q;
        // no zero divisors over Q
        prop_assert!(!prod.is_zero());
        prop_assert_eq!(prod.total_degree(), p.total_degree() + q.total_degree());
    }

    #[test]
    fn transpositions_are_involutions(
        p in arb_poly(3, 3, 5),
        i in 0usize..3,
        j in 0usize..3,
    ) {
        let mut perm = vec![0, 1, 2];
        perm.swap(i, j);
        let once = p.permute_variables(&perm).expect("valid permutation");
        prop_assert_eq!(once.permute_variables(&perm).expect("valid permutation"), p);
    }

    #[test]
    fn exchange_tags_match_the_direct_swap(p in arb_poly(2, 3, 5)) {
        let swapped = p.permute_variables(&[1, 0]).expect("transposition");
        let expected = if swapped == p {
            SymmetryTag::Symmetric
        } else if swapped == -&p {
            SymmetryTag::Skew
        } else {
            SymmetryTag::Neither
        };
        prop_assert_eq!(exchange_tag(&p), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn substitution_associates_with_composition(
        p in arb_poly(2, 2, 4),
        f in arb_map(2, 2),
        g in arb_map(2, 2),
    ) {
        let fg = compose(&f, &g).expect("same ring");
        let step = p.substitute(f.coords()).expect("arity").substitute(g.coords()).expect("arity");
        prop_assert_eq!(step, p.substitute(fg.coords()).expect("arity"));
    }

    #[test]
    fn jacobians_obey_the_chain_rule(f in arb_map(2, 2), g in arb_map(2, 2)) {
        let fg = compose(&f, &g).expect("same ring");
        let pulled = f.jacobian_det().substitute(g.coords()).expect("arity");
        prop_assert_eq!(fg.jacobian_det(), &pulled * &g.jacobian_det());
    }

    #[test]
    fn composition_degree_is_bounded_by_the_product(f in arb_map(2, 2), g in arb_map(2, 2)) {
        let fg = compose(&f, &g).expect("same ring");
        prop_assert!(fg.max_degree() <= f.max_degree().max(0) * g.max_degree().max(0));
    }

    #[test]
    fn nth_roots_invert_powers(r in arb_nonzero_poly(2, 2, 3), k in 1u32..=3) {
        let p = r.pow(k);
        let root = poly_nth_root(&p, k).expect("constructed power has a root");
        prop_assert_eq!(root.pow(k), p);
        if k % 2 == 0 {
            // even roots are normalized to a positive leading coefficient
            prop_assert!(root.leading().expect("nonzero").1 > &q(0));
        } else {
            prop_assert_eq!(root, r);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn normal_forms_respect_ideal_congruence(
        gens in proptest::collection::vec(arb_nonzero_poly(3, 3, 3), 1..=3),
        p in arb_poly(3, 2, 3),
        m in arb_poly(3, 2, 3),
        r in arb_poly(3, 2, 3),
    ) {
        let gb = gb_within_budget(&gens, MonomialOrder::GrevLex);
        prop_assume!(gb.is_some());
        let gb = gb.unwrap();
        let direct = gb.normal_form(&(&(&p * &m) + &r)).expect("term budget");
        let nf_p = gb.normal_form(&p).expect("term budget");
        let staged = gb.normal_form(&(&(&nf_p * &m) + &r)).expect("term budget");
        prop_assert_eq!(direct, staged);
    }

    #[test]
    fn reduced_bases_ignore_the_presentation(
        gens in proptest::collection::vec(arb_nonzero_poly(3, 3, 3), 1..=3),
        scales in proptest::collection::vec(nonzero_coeff(), 3),
        pad in arb_monomial(3, 2),
    ) {
        let gb = gb_within_budget(&gens, MonomialOrder::GrevLex);
        prop_assume!(gb.is_some());
        let gb = gb.unwrap();
        // scaled, reversed, and with a redundant multiple of the first gen
        let mut other: Vec<Polynomial> =
            gens.iter().zip(scales.iter().cycle()).map(|(g, s)| g.scale(s)).collect();
        other.reverse();
        other.push(gens[0].mul_term(&pad, &q(2)));
        let gb2 = gb_within_budget(&other, MonomialOrder::GrevLex);
        prop_assume!(gb2.is_some());
        let gb2 = gb2.unwrap();
        prop_assert_eq!(gb.gens(), gb2.gens());
    }

    #[test]
    fn elimination_drops_variables_but_stays_inside(
        gens in proptest::collection::vec(arb_nonzero_poly(3, 2, 3), 1..=3),
    ) {
        let elim = match elimination_ideal_with_budget(&gens, &[0], &TEST_BUDGET) {
            Ok(e) => e,
            Err(GroebnerError::PairBudget { .. }) | Err(GroebnerError::TermBudget { .. }) => {
                prop_assume!(false);
                unreachable!()
            }
            Err(e) => panic!("unexpected groebner failure: {e}"),
        };
        let gb = gb_within_budget(&gens, MonomialOrder::GrevLex);
        prop_assume!(gb.is_some());
        let gb = gb.unwrap();
        for g in &elim {
            prop_assert_eq!(g.degree_in(0), 0);
            // cross-order membership: the grevlex basis must absorb it
            prop_assert!(gb.contains(g).expect("term budget"));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quotient_dimension_is_order_invariant(
        a in 1u32..=3,
        b in 1u32..=3,
        p in arb_x2_poly(3),
        c in arb_coeff(),
    ) {
        let gens = zero_dim_gens(a, b, &p, &c);
        for order in [MonomialOrder::Lex, MonomialOrder::GrevLex] {
            let gb = gb_within_budget(&gens, order).expect("tiny tower ideal");
            let dim = quotient_dimension(&gb).expect("finite staircase");
            prop_assert_eq!(dim, QuotientDim::Finite((a * b) as usize));
        }
    }

    #[test]
    fn quotient_minimal_polynomials_annihilate(
        a in 1u32..=3,
        b in 1u32..=2,
        p in arb_x2_poly(3),
        c in arb_coeff(),
        e in arb_poly(2, 2, 3),
    ) {
        let gb = gb_within_budget(&zero_dim_gens(a, b, &p, &c), MonomialOrder::GrevLex)
            .expect("tiny tower ideal");
        let mp = minpoly_in_quotient(&gb, &e).expect("finite quotient");
        prop_assert!(mp.is_monic());
        prop_assert!(mp.degree() <= (a * b) as i64);
        let plugged = mp.eval_poly(&e);
        prop_assert!(gb.normal_form(&plugged).expect("term budget").is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn power_map_extension_degrees_multiply(a in 1u32..=3, b in 1u32..=3, seed in any::<u64>()) {
        let f = PolyMap::new(vec![
            Polynomial::term(2, Monomial::var(2, 0).pow(a), q(1)),
            Polynomial::term(2, Monomial::var(2, 1).pow(b), q(1)),
        ])
        .expect("power map");
        let d = extension_degree(&f, seed).expect("dominant");
        prop_assert_eq!(d, a * b);
        let expect = [a, b];
        for i in 0..2 {
            let (di, _) = coordinate_minpoly(&f, i, seed.wrapping_add(1 + i as u64)).expect("dominant");
            let ti = tower_degree(&f, i, seed.wrapping_add(11 + i as u64)).expect("dominant");
            prop_assert_eq!(di, expect[i]);
            // D = d_i * [C(x) : C(F)(x_i)] coordinate by coordinate
            prop_assert_eq!(d, di * ti);
        }
    }

    #[test]
    fn trivial_towers_force_equal_coordinate_degrees(f in arb_map(2, 2), seed in any::<u64>()) {
        prop_assume!(f.is_dominant());
        let towers: Vec<u32> = (0..2)
            .map(|i| tower_degree(&f, i, seed.wrapping_add(21 + i as u64)))
            .collect::<Result<_, _>>()
            .expect("dominant");
        if towers == [1, 1] {
            let d0 = coordinate_minpoly(&f, 0, seed.wrapping_add(1)).expect("dominant").0;
            let d1 = coordinate_minpoly(&f, 1, seed.wrapping_add(2)).expect("dominant").0;
            prop_assert_eq!(d0, d1);
        }
    }

    #[test]
    fn root_closure_never_violates_on_keller_maps(
        seed in any::<u64>(),
        g in arb_nonzero_poly(2, 2, 3),
        m in 2u32..=3,
    ) {
        let f = triangular(2, seed);
        let verdict = root_closure_check(&g, m, &f).expect("keller by construction");
        prop_assert_ne!(verdict, RootClosure::Violation);
    }

    #[test]
    fn triangular_inverses_round_trip(seed in any::<u64>(), n in 2usize..=3) {
        let f = triangular(n, seed);
        let g = invert(&f).expect("within budget").expect("triangular maps are automorphisms");
        prop_assert!(compose(&f, &g).expect("same ring").is_identity());
        prop_assert!(compose(&g, &f).expect("same ring").is_identity());
        // inversion is an involution on automorphisms
        prop_assert_eq!(invert(&g).expect("within budget"), Some(f));
    }

    #[test]
    fn generated_families_are_keller_and_invert(
        family in proptest::sample::select(Family::ALL.to_vec()),
        seed in any::<u64>(),
    ) {
        let f = generate_family(&GeneratorSpec::new(family, seed, 2)).expect("generator");
        prop_assert!(f.is_keller());
        prop_assert!(invert(&f).expect("within budget").is_some());
    }

    #[test]
    fn monic_normalization_survives_recombination(seed in any::<u64>(), n in 2usize..=3) {
        let f = triangular(n, seed);
        let (monic, _) = make_monic_in_last(&f).expect("dominant");
        let (recombined, _) = generic_linear_compose(&monic, seed ^ 0x5ca1ab1e).expect("monic input");
        for stage in [&monic, &recombined] {
            for coord in stage.coords() {
                let (d, lead) = coord.leading_in_var(n - 1);
                prop_assert!(d >= 1);
                prop_assert!(lead.is_constant() && !lead.is_zero());
            }
        }
    }

    #[test]
    fn classification_is_sound_on_generated_automorphisms(
        family in proptest::sample::select(vec![Family::Triangular, Family::Affine, Family::Composed]),
        seed in any::<u64>(),
    ) {
        let f = generate_family(&GeneratorSpec::new(family, seed, 2)).expect("generator");
        let cert = keller_core::criteria::classify(&f, seed).expect("keller corpus");
        prop_assert!(cert.verified_by_inversion);
        prop_assert_ne!(cert.rule, keller_core::CertificateRule::None);
    }

    #[test]
    fn perfect_power_relations_recover_inverse_coordinates(seed in any::<u64>(), j in 0usize..2) {
        let f = triangular(2, seed);
        let g = invert(&f).expect("within budget").expect("automorphism");
        let h = g.coord(j).clone();

        // (x_j - h(F))^2 = 0, presented as a quadratic over the tags
        let square = AnnihilatorInput {
            j,
            m: 1,
            a: Polynomial::one(2),
            b: h.scale(&q(-2)),
            c: &h * &h,
            d: None,
        };
        let rec = recover_coordinate_quadratic(&f, &square)
            .expect("relation holds")
            .expect("coordinate of an automorphism");
        prop_assert_eq!(&rec.power.expression, &h);
        prop_assert_eq!(rec.coordinate.as_ref().map(|w| &w.expression), Some(&h));

        // same shape one power up: annihilates x_j^2, witness is h^2
        let square_m2 = AnnihilatorInput {
            j,
            m: 2,
            a: Polynomial::one(2),
            b: (&h * &h).scale(&q(-2)),
            c: (&h * &h).pow(2),
            d: None,
        };
        let rec2 = recover_coordinate_quadratic(&f, &square_m2)
            .expect("relation holds")
            .expect("coordinate of an automorphism");
        prop_assert_eq!(rec2.power.expression, &h * &h);
        prop_assert_eq!(rec2.coordinate.map(|w| w.expression), Some(h.clone()));

        // (x_j - h(F))^3 = 0 exercises the special cubic path
        let cube = AnnihilatorInput {
            j,
            m: 1,
            a: Polynomial::one(2),
            b: h.scale(&q(-3)),
            c: (&h * &h).scale(&q(3)),
            d: Some(-&(&(&h * &h) * &h)),
        };
        let rec3 = recover_coordinate_cubic_special(&f, &cube)
            .expect("epsilon vanishes for a perfect cube")
            .expect("coordinate of an automorphism");
        prop_assert_eq!(rec3.power.expression, h);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cmw_decomposition_round_trips(
        alpha in -3i64..=3,
        beta in -3i64..=3,
        e in -2i64..=2,
        jac in proptest::sample::select(vec![-3i64, -2, -1, 1, 2, 3]),
        cs in proptest::collection::vec(-2i64..=2, 0..=4),
    ) {
        prop_assume!(alpha != 0 || beta != 0);
        let f1 = Polynomial::from_terms(
            2,
            vec![
                (Monomial::var(2, 0), q(alpha)),
                (Monomial::var(2, 1), q(beta)),
                (Monomial::unit(2), q(e)),
            ],
        );
        // canonical complement line: the one cmw_decompose_2d reports
        let (gamma, delta) =
            if alpha != 0 { (q(0), &q(jac) / &q(alpha)) } else { (-(&q(jac) / &q(beta)), q(0)) };
        let w = &Polynomial::var(2, 0).scale(&gamma) + &Polynomial::var(2, 1).scale(&delta);
        let mut f2 = w.clone();
        for (k, ck) in cs.iter().enumerate() {
            f2 = &f2 + &f1.pow(k as u32).scale(&q(*ck));
        }
        let f = PolyMap::new(vec![f1.clone(), f2]).expect("same ring");
        prop_assert!(f.is_keller());

        let (g, coeffs) = cmw_decompose_2d(&f).expect("affine-first keller map");
        prop_assert_eq!(g.coord(0), &f1);
        prop_assert_eq!(g.coord(1), &w);
        let mut expected = cs.clone();
        while expected.last() == Some(&0) {
            expected.pop();
        }
        prop_assert_eq!(coeffs, expected.into_iter().map(q).collect::<Vec<_>>());
    }
}
