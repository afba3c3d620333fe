//! Randomized property suites for the kernel: field axioms on the scalar
//! coefficients, the torus word-rewriting oracle, series inversion, and the
//! substitution homomorphism.

use std::sync::Arc;

use proptest::prelude::*;

use qcv_core::matrix::{kron, RingMatrix};
use qcv_core::scalar::{BigRational, LaurentPoly, QScalar};
use qcv_core::series::{SeriesContext, SkewSeries};
use qcv_core::torus::{torus_substitute, TorusContext, TorusElement, TorusMonomial};

fn rational() -> impl Strategy<Value = BigRational> {
    (-9i64..=9, 1i64..=9).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn laurent() -> impl Strategy<Value = LaurentPoly> {
    proptest::collection::vec((-6i64..=6, rational()), 0..4)
        .prop_map(LaurentPoly::from_terms)
}

fn qscalar() -> impl Strategy<Value = QScalar> {
    (laurent(), laurent()).prop_map(|(num, den)| {
        if den.is_zero() {
            QScalar::from_poly(num)
        } else {
            QScalar::new(num, den)
        }
    })
}

fn nonzero_qscalar() -> impl Strategy<Value = QScalar> {
    qscalar().prop_filter("nonzero", |s| !s.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn field_axioms(a in qscalar(), b in qscalar(), c in qscalar()) {
        // Associativity and commutativity of both operations.
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        // Distributivity.
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        // Units.
        prop_assert_eq!(&a + &QScalar::zero(), a.clone());
        prop_assert_eq!(&a * &QScalar::one(), a.clone());
        prop_assert_eq!(&a + &(-&a), QScalar::zero());
    }

    #[test]
    fn multiplicative_inverses(a in nonzero_qscalar()) {
        prop_assert_eq!(&a * &a.inv(), QScalar::one());
    }
}

proptest! {
    #[test]
    fn evaluate_is_a_ring_homomorphism(a in qscalar(), b in qscalar(), p in 1i64..=5, q in 1i64..=5) {
        let v0 = BigRational::new(p.into(), q.into());
        let eval = |s: &QScalar| s.evaluate(&v0);
        // Poles of either operand (or of the product's cancelled form) simply
        // discard the case.
        if let (Ok(ea), Ok(eb)) = (eval(&a), eval(&b)) {
            if let Ok(eab) = eval(&(&a * &b)) {
                prop_assert_eq!(eab, &ea * &eb);
            }
            if let Ok(eab) = eval(&(&a + &b)) {
                prop_assert_eq!(eab, &ea + &eb);
            }
        }
    }
}

/// Four-variable context with an assortment of even skew entries.
fn test_context() -> Arc<TorusContext> {
    TorusContext::new(
        vec!["a".into(), "b".into(), "c".into(), "d".into()],
        vec![
            vec![0, 2, -2, 0],
            vec![-2, 0, 4, 2],
            vec![2, -4, 0, -2],
            vec![0, -2, 2, 0],
        ],
    )
}

fn monomial(ctx: &Arc<TorusContext>) -> impl Strategy<Value = TorusMonomial> {
    let n = ctx.num_vars();
    (
        proptest::collection::vec(-4i64..=4, n..=n),
        (-4i64..=4, -2i64..=2),
    )
        .prop_map(|(exps, (num, vexp))| {
            let coeff = if num == 0 {
                QScalar::one()
            } else {
                &QScalar::from_int(num) * &QScalar::v_pow(vexp)
            };
            TorusMonomial::new(coeff, exps)
        })
}

fn torus_element(ctx: &Arc<TorusContext>) -> impl Strategy<Value = TorusElement> {
    let ctx = ctx.clone();
    proptest::collection::vec(monomial(&ctx), 0..4).prop_map(move |monos| {
        let mut acc = TorusElement::zero(ctx.clone());
        for m in monos {
            acc = acc.add(&TorusElement::from_monomial(ctx.clone(), m));
        }
        acc
    })
}

/// Independent normal-ordering oracle: sort the letters of a word by
/// adjacent transpositions, accumulating the phase `v^{w_ab e f / 2}` for
/// each swap of single letters `z_a^{e/2} z_b^{f/2}`.
fn normal_order_by_swaps(ctx: &TorusContext, word: &[(usize, i64)]) -> (i64, Vec<i64>) {
    let mut letters: Vec<(usize, i64)> = word.to_vec();
    let mut v_exp = 0i64;
    loop {
        let mut swapped = false;
        for i in 0..letters.len().saturating_sub(1) {
            let (a, e) = letters[i];
            let (b, f) = letters[i + 1];
            if a > b {
                // z_a^{e/2} z_b^{f/2} = q^{w_ab (e/2)(f/2)} z_b^{f/2} z_a^{e/2}
                let num = ctx.omega(a, b) * e * f;
                assert_eq!(num % 2, 0, "non-integral phase in oracle");
                v_exp += num / 2;
                letters.swap(i, i + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    let mut exps = vec![0i64; ctx.num_vars()];
    for (var, e) in letters {
        exps[var] += e;
    }
    (v_exp, exps)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn torus_mul_is_associative(
        x in torus_element(&test_context()),
        y in torus_element(&test_context()),
        z in torus_element(&test_context()),
    ) {
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
    }
}

proptest! {
    #[test]
    fn word_rewriting_oracle_matches_torus_mul(
        word in proptest::collection::vec((0usize..4, prop_oneof![Just(-2i64), Just(-1), Just(1), Just(2)]), 1..=6),
    ) {
        let ctx = test_context();
        let (v_exp, exps) = normal_order_by_swaps(&ctx, &word);
        let mut product = TorusElement::one(ctx.clone());
        for &(var, e) in &word {
            product = product.mul(&TorusElement::var_pow(ctx.clone(), var, e));
        }
        let expected = TorusElement::from_monomial(
            ctx.clone(),
            TorusMonomial::new(QScalar::v_pow(v_exp), exps),
        );
        prop_assert_eq!(product, expected);
    }

    #[test]
    fn monomials_are_invertible(m in monomial(&test_context())) {
        let ctx = test_context();
        prop_assume!(!m.coeff.is_zero());
        let elem = TorusElement::from_monomial(ctx.clone(), m);
        let inv = elem.invert_monomial().unwrap();
        let one = TorusElement::one(ctx.clone());
        prop_assert_eq!(elem.mul(&inv), one.clone());
        prop_assert_eq!(inv.mul(&elem), one);
    }
}

/// MV and FG contexts for one block, with the standard substitution map.
fn mv_fg_pair() -> (Arc<TorusContext>, Arc<TorusContext>, Vec<TorusMonomial>) {
    let mv = TorusContext::new(
        vec!["psi".into(), "qphi".into(), "chi".into()],
        vec![vec![0, -2, 0], vec![2, 0, 2], vec![0, -2, 0]],
    );
    let fg = TorusContext::new(
        vec!["w".into(), "x".into(), "y".into()],
        vec![vec![0, -2, 0], vec![2, 0, 2], vec![0, -2, 0]],
    );
    let images = vec![
        TorusMonomial::var_pow(&fg, 0, 2),
        TorusMonomial::new(QScalar::one(), vec![2, 2, 2]),
        TorusMonomial::var_pow(&fg, 2, 2),
    ];
    (mv, fg, images)
}

fn mv_element() -> impl Strategy<Value = TorusElement> {
    let (mv, _, _) = mv_fg_pair();
    proptest::collection::vec(
        (
            proptest::collection::vec(-3i64..=3, 3usize..=3),
            -4i64..=4,
        ),
        0..4,
    )
    .prop_map(move |monos| {
        let mut acc = TorusElement::zero(mv.clone());
        for (exps, c) in monos {
            if c == 0 {
                continue;
            }
            acc = acc.add(&TorusElement::from_monomial(
                mv.clone(),
                TorusMonomial::new(QScalar::from_int(c), exps),
            ));
        }
        acc
    })
}

proptest! {
    #[test]
    fn substitution_is_an_algebra_homomorphism(a in mv_element(), b in mv_element()) {
        let (mv, fg, images) = mv_fg_pair();
        let sub = |e: &TorusElement| torus_substitute(&mv, &fg, &images, e).unwrap();
        prop_assert_eq!(sub(&a.mul(&b)), sub(&a).mul(&sub(&b)));
    }
}

fn skew_series(ctx: &Arc<SeriesContext>) -> impl Strategy<Value = SkewSeries> {
    let ctx = ctx.clone();
    proptest::collection::vec((0u32..3, -3i64..=3, 0u32..3, -5i64..=5), 0..5).prop_map(
        move |terms| {
            let mut acc = SkewSeries::zero(ctx.clone());
            for (a, m, b, c) in terms {
                if c == 0 {
                    continue;
                }
                acc = acc.add(&SkewSeries::term(ctx.clone(), a, m, b, QScalar::from_int(c)));
            }
            acc
        },
    )
}

proptest! {
    #[test]
    fn series_inversion_is_two_sided(
        m0 in -3i64..=3,
        c0 in prop_oneof![Just(1i64), Just(-1), Just(2), Just(3)],
        tail in skew_series(&SeriesContext::new(6)),
    ) {
        // Build u (1 + N): a monomial unit plus whatever positive-degree part
        // the strategy produced.
        let ctx = SeriesContext::new(6);
        let unit = SkewSeries::term(ctx.clone(), 0, m0, 0, QScalar::from_int(c0));
        let positive: SkewSeries = {
            // Strip any degree-zero content from the tail.
            let mut acc = SkewSeries::zero(ctx.clone());
            for (&(a, m, b), c) in tail.terms() {
                if a + b > 0 {
                    acc = acc.add(&SkewSeries::term(ctx.clone(), a, m, b, c.clone()));
                }
            }
            acc
        };
        let elem = unit.add(&positive);
        let inv = elem.invert().unwrap();
        let one = SkewSeries::one(ctx.clone());
        prop_assert_eq!(elem.mul(&inv), one.clone());
        prop_assert_eq!(inv.mul(&elem), one);
    }
}

#[test]
fn kron_entry_order_for_group_element() {
    // (g (x) g)[(1,1),(1,2)] = g_11 * g_12, in that order.
    let rep = qcv_core::repr::fundamental_rep(2);
    let ctx = qcv_core::group::mv_context_scaled(1, 2);
    let g = qcv_core::group::group_element(1, qcv_core::group::BlockForm::Mv, &rep, &ctx)
        .unwrap()
        .matrix;
    let square = kron(&g, &g);
    assert_eq!(square.get(0, 1), &g.get(0, 0).mul(g.get(0, 1)));
    // And the mixed-product law holds when the entries commute (scalars).
    let id = RingMatrix::identity(2, &QScalar::one());
    let a = RingMatrix::from_rows(vec![
        vec![QScalar::from_int(1), QScalar::from_int(2)],
        vec![QScalar::from_int(3), QScalar::from_int(4)],
    ]);
    let b = RingMatrix::from_rows(vec![
        vec![QScalar::from_int(5), QScalar::from_int(6)],
        vec![QScalar::from_int(7), QScalar::from_int(8)],
    ]);
    assert_eq!(kron(&a, &id).mul(&kron(&id, &b)), kron(&a, &b));
}

#[test]
fn q_int_is_odd_in_n() {
    for n in -8i64..=8 {
        assert_eq!(qcv_core::scalar::q_int(-n), -&qcv_core::scalar::q_int(n));
    }
}
