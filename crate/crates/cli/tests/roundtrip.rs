use foliage_cli::{lower_to_semantics, parse_expression, Expr, Semantic};
use foliage_core::{QPoly, Rat, VarSet};
use num_bigint::BigInt;
use proptest::prelude::*;

fn vars() -> VarSet {
    VarSet::xyz()
}

/// Non-negative terminating decimals: n / 10^k.
fn arb_num() -> impl Strategy<Value = Expr> {
    (0i64..10_000, 0u32..4).prop_map(|(n, k)| Expr::Num(Rat::new(BigInt::from(n), BigInt::from(10i64.pow(k)))))
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![arb_num(), prop::sample::select(vec!["x", "y", "z"]).prop_map(|v| Expr::Var(v.into()))];
    leaf.prop_recursive(6, 48, 2, |inner| {
        let b = |e: Expr| Box::new(e);
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(move |(l, r)| Expr::Add(b(l), b(r))),
            (inner.clone(), inner.clone()).prop_map(move |(l, r)| Expr::Sub(b(l), b(r))),
            (inner.clone(), inner.clone()).prop_map(move |(l, r)| Expr::Mul(b(l), b(r))),
            (inner.clone(), inner.clone()).prop_map(move |(l, r)| Expr::Div(b(l), b(r))),
            inner.clone().prop_map(move |e| Expr::Neg(b(e))),
            (inner.clone(), 1u32..5).prop_map(move |(e, n)| Expr::Pow(b(e), n)),
            inner.prop_map(move |e| Expr::Exp(b(e))),
        ]
    })
}

fn arb_poly() -> impl Strategy<Value = QPoly> {
    prop::collection::vec(((0u32..4, 0u32..4, 0u32..4), -20i64..20, 1i64..5), 0..6).prop_map(|terms| {
        QPoly::from_terms(
            vars(),
            terms.into_iter().map(|((a, b, c), n, d)| (vec![a, b, c], Rat::new(n.into(), d.into()))),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn print_then_parse_is_identity(e in arb_expr()) {
        let printed = e.to_string();
        let back = parse_expression(&printed, &vars());
        prop_assert_eq!(back, Ok(e), "printed as {}", printed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn polynomials_survive_the_text_form(p in arb_poly()) {
        let text = p.to_string();
        let ast = parse_expression(&text, &vars()).unwrap();
        prop_assert_eq!(lower_to_semantics(&ast, &vars()).unwrap(), Semantic::Poly(p));
    }
}

#[test]
fn whitespace_is_insignificant() {
    let a = parse_expression("( y ^ 2 - x^3 ) * z^2", &vars()).unwrap();
    let b = parse_expression("(y^2-x^3)*z^2", &vars()).unwrap();
    assert_eq!(a, b);
}
