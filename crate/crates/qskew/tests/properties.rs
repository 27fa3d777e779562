//! Randomized property tests for the algebraic core: field axioms,
//! torus and PBW arithmetic, serialization, and the expression grammar.

use num::BigInt;
use proptest::prelude::*;

use qskew::expr::{parse_expr, render, Ast, Symbol};
use qskew::field::{rat, LaurentPoly, QElem, Rat};
use qskew::model::{AlgebraElement, Level, UqModel};
use qskew::ore::PBWElement;
use qskew::torus::TorusElement;

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-40i64..=40, 1i64..=9).prop_map(|(n, d)| rat(n, d))
}

fn arb_big_rat() -> impl Strategy<Value = Rat> {
    (any::<i64>(), 1u32..=6).prop_map(|(n, scale)| {
        let big = BigInt::from(n) * BigInt::from(10u64).pow(scale * 3);
        Rat::new(big, BigInt::from(7))
    })
}

fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec(((-3i64..=3), arb_rat()), 0..4)
        .prop_map(LaurentPoly::from_terms)
}

fn arb_qelem() -> impl Strategy<Value = QElem> {
    (arb_poly(), arb_poly())
        .prop_filter("denominator must be nonzero", |(_, d)| !d.is_zero())
        .prop_map(|(n, d)| QElem::new(n, d).expect("nonzero denominator"))
}

fn arb_exponent() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-2i64..=2, 6)
}

fn arb_torus_element() -> impl Strategy<Value = TorusElement> {
    prop::collection::vec((arb_exponent(), arb_qelem()), 0..4).prop_map(|terms| {
        let mut out = TorusElement::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    })
}

fn arb_x_element() -> impl Strategy<Value = AlgebraElement> {
    let exponent = prop::collection::vec(0i64..=2, 6).prop_filter(
        "bounded total degree",
        |e| {
            e.iter()
                .zip([1i64, 2, 3, 1, 2, 1])
                .map(|(a, d)| a * d)
                .sum::<i64>()
                <= 5
        },
    );
    prop::collection::vec((exponent, arb_qelem()), 1..4).prop_map(
        |terms| {
            let model = UqModel::shared();
            let p = model.presentation(Level::X);
            let mut out = PBWElement::zero(p);
            for (e, c) in terms {
                out = out
                    .add(&PBWElement::monomial(p, e, c).unwrap())
                    .unwrap();
            }
            AlgebraElement {
                level: Level::X,
                pbw: out,
            }
        },
    )
}

fn arb_z_element() -> impl Strategy<Value = AlgebraElement> {
    // level 5: negative exponents allowed on the invertible tail 4..6
    (
        prop::collection::vec(0i64..=2, 3),
        prop::collection::vec(-2i64..=2, 3),
        arb_big_rat(),
    )
        .prop_map(|(head, tail, c)| {
            let model = UqModel::shared();
            let p = model.presentation(Level::Z);
            let exp: Vec<i64> = head.into_iter().chain(tail).collect();
            AlgebraElement {
                level: Level::Z,
                pbw: PBWElement::monomial(p, exp, QElem::from_rat(c).add(&QElem::q()))
                    .unwrap(),
            }
        })
}

fn arb_word() -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((1usize..=6, 1i64..=2), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // ----------------------------------------------------------------
    // coefficient field

    #[test]
    fn field_ring_axioms(a in arb_qelem(), b in arb_qelem(), c in arb_qelem()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.sub(&a), QElem::zero());
    }

    #[test]
    fn field_inverses(a in arb_qelem()) {
        if !a.is_zero() {
            prop_assert_eq!(a.mul(&a.inv().unwrap()), QElem::one());
            prop_assert_eq!(a.div(&a).unwrap(), QElem::one());
        } else {
            prop_assert!(a.inv().is_err());
        }
    }

    #[test]
    fn field_canonical_form(a in arb_qelem()) {
        // rebuilding from the stored numerator and denominator is stable
        let again = QElem::new(a.numerator().clone(), a.denominator().clone()).unwrap();
        prop_assert_eq!(&again, &a);
        // denominator is normalized: lowest exponent 0, monic leading term
        prop_assert_eq!(a.denominator().min_exp(), Some(0));
        prop_assert_eq!(a.denominator().leading_coeff(), Some(&rat(1, 1)));
    }

    // ----------------------------------------------------------------
    // quantum torus

    #[test]
    fn torus_ring_axioms(a in arb_torus_element(), b in arb_torus_element(), c in arb_torus_element()) {
        let t = UqModel::shared().torus();
        prop_assert_eq!(t.mul(&t.mul(&a, &b), &c), t.mul(&a, &t.mul(&b, &c)));
        prop_assert_eq!(
            t.mul(&a.add(&b), &c),
            t.mul(&a, &c).add(&t.mul(&b, &c))
        );
    }

    #[test]
    fn torus_exchange_scalar(g in arb_exponent(), d in arb_exponent()) {
        // T^g T^d and T^d T^g differ by the exact antisymmetric scalar
        let t = UqModel::shared().torus();
        let lambda = t.lambda();
        let a = TorusElement::monomial(g.clone(), QElem::one());
        let b = TorusElement::monomial(d.clone(), QElem::one());
        let mut m = 0i64;
        for k in 0..6 {
            for l in 0..k {
                m += lambda.rows()[k][l] * (g[k] * d[l] - d[k] * g[l]);
            }
        }
        prop_assert_eq!(t.mul(&a, &b), t.mul(&b, &a).scale(&QElem::q_power(m)));
    }

    // ----------------------------------------------------------------
    // PBW arithmetic

    #[test]
    fn pbw_mul_associative(u in arb_word(), v in arb_word(), w in arb_word()) {
        let p = UqModel::shared().presentation(Level::X);
        let a = PBWElement::normal_form(p, &u).unwrap();
        let b = PBWElement::normal_form(p, &v).unwrap();
        let c = PBWElement::normal_form(p, &w).unwrap();
        prop_assert_eq!(
            a.mul(&b).unwrap().mul(&c).unwrap(),
            a.mul(&b.mul(&c).unwrap()).unwrap()
        );
    }

    #[test]
    fn pbw_word_concatenation(u in arb_word(), v in arb_word()) {
        // normalizing a concatenation equals multiplying the parts
        let p = UqModel::shared().presentation(Level::X);
        let joined: Vec<(usize, i64)> = u.iter().chain(v.iter()).copied().collect();
        let whole = PBWElement::normal_form(p, &joined).unwrap();
        let parts = PBWElement::normal_form(p, &u)
            .unwrap()
            .mul(&PBWElement::normal_form(p, &v).unwrap())
            .unwrap();
        prop_assert_eq!(whole, parts);
    }

    // ----------------------------------------------------------------
    // serialization

    #[test]
    fn element_document_round_trip(u in arb_x_element()) {
        let m = UqModel::shared();
        let doc = qskew::doc::save_element(&u);
        prop_assert_eq!(qskew::doc::load_element(m, &doc).unwrap(), u);
    }

    #[test]
    fn localized_element_round_trip(u in arb_z_element()) {
        let m = UqModel::shared();
        let doc = qskew::doc::save_element(&u);
        prop_assert_eq!(qskew::doc::load_element(m, &doc).unwrap(), u);
    }

    #[test]
    fn torus_document_round_trip(t in arb_torus_element()) {
        let doc = qskew::doc::save_torus(&t);
        prop_assert_eq!(qskew::doc::load_torus(&doc).unwrap(), t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn embedding_is_multiplicative(u in arb_x_element(), v in arb_x_element()) {
        let m = UqModel::shared();
        prop_assert_eq!(
            m.embed(&u.mul(&v).unwrap()),
            m.torus().mul(&m.embed(&u), &m.embed(&v))
        );
    }
}

// --------------------------------------------------------------------
// expression grammar

fn arb_symbol() -> impl Strategy<Value = Symbol> {
    prop_oneof![
        (1u8..=3).prop_map(Symbol::Serre),
        (1u8..=6).prop_map(|i| Symbol::Basis(Level::X, i)),
        (1u8..=6).prop_map(|i| Symbol::Basis(Level::T, i)),
        (1u8..=3).prop_map(Symbol::Delta),
        (1u8..=2).prop_map(Symbol::Central),
    ]
}

fn arb_ast() -> impl Strategy<Value = Ast> {
    let leaf = prop_oneof![
        arb_symbol().prop_map(Ast::Gen),
        // negative literals arise as Neg nodes, never as raw rationals
        (0i64..=30, 1i64..=9)
            .prop_map(|(n, d)| Ast::Rational(BigInt::from(n), BigInt::from(d))),
        Just(Ast::Q),
        Just(Ast::QHat),
        (1u32..=4).prop_map(Ast::QInt),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Ast::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Ast::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Ast::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), -3i64..=3).prop_map(|(a, k)| Ast::Pow(Box::new(a), k)),
            inner.prop_map(|a| Ast::Neg(Box::new(a))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn grammar_round_trip(ast in arb_ast()) {
        let text = render(&ast);
        let parsed = parse_expr(&text)
            .unwrap_or_else(|e| panic!("rendered {text:?} failed to parse: {e}"));
        prop_assert_eq!(parsed, ast, "through {}", text);
    }
}
