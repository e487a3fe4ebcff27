use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use two_tower::arith::{is_prime, jacobi, squarefree_part};
use two_tower::iwasawa::{genus_growth, splitting};
use two_tower::kuroda::{kuroda_h2, solve_q_index, subfield_classes, KurodaInput};
use two_tower::quadratic::{class_data, fundamental_unit};
use two_tower::tower::predict;
use two_tower::unit_lattice::{MultiQuadField, SquareTest};

fn squarefree(max: i64) -> impl Strategy<Value = i64> {
    (2..max).prop_filter_map("squarefree", |n| {
        let s = squarefree_part(n).ok()?;
        (s == n).then_some(n)
    })
}

fn odd_prime(max: u64) -> impl Strategy<Value = u64> {
    (3..max).prop_filter("odd prime", |&p| p % 2 == 1 && is_prime(p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_is_multiplicative(a in -500i64..500, b in -500i64..500, n in (1i64..400).prop_map(|k| 2 * k + 1)) {
        let ab = jacobi(a * b, n).unwrap();
        prop_assert_eq!(ab, jacobi(a, n).unwrap() * jacobi(b, n).unwrap());
    }

    #[test]
    fn pell_solves_its_norm_equation(d in squarefree(3000)) {
        let e = fundamental_unit(d as u64).unwrap();
        prop_assert!(e.satisfies_norm_equation());
        prop_assert!(e.norm == 1 || e.norm == -1);
    }

    #[test]
    fn narrow_is_wide_or_double(d in squarefree(2000)) {
        let c = class_data(d).unwrap();
        let e = fundamental_unit(d as u64).unwrap();
        let want = if e.norm == -1 { c.h_wide } else { 2 * c.h_wide };
        prop_assert_eq!(c.h_narrow, want);
        prop_assert_eq!(c.h2, 1u64 << c.m);
        prop_assert_eq!(c.h_wide % c.h2, 0);
        prop_assert!((c.h_wide / c.h2) % 2 == 1);
    }

    #[test]
    fn squares_are_recognised(
        gens in prop::sample::subsequence(vec![-1i64, 2, 3, 5, 7, 11], 2..=3),
        coeffs in prop::collection::vec(-20i64..20, 8),
    ) {
        let field = MultiQuadField::new(&gens).unwrap();
        let classes: Vec<i64> = (0..field.degree()).map(|m| field.class(m)).collect();
        let x = field
            .from_terms(classes.iter().zip(&coeffs).map(|(&m, &c)| (m, BigRational::from_integer(BigInt::from(c)))))
            .unwrap();
        prop_assume!(!x.is_zero());
        let sq = field.square(&x);
        match field.square_test(&sq).unwrap() {
            SquareTest::Square(r) => prop_assert!(r == x || r == field.neg(&x)),
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn kuroda_round_trip(gens in prop::sample::subsequence(vec![-1i64, 2, 3, 5, 7, 11, 13], 2..=3), t in 0u32..8) {
        let field = MultiQuadField::new(&gens).unwrap();
        let classes = subfield_classes(&field).unwrap();
        if let Ok(q) = solve_q_index(&field, &classes, 1 << t) {
            let input = KurodaInput::new(field, q, classes).unwrap();
            prop_assert_eq!(kuroda_h2(&input).unwrap(), 1 << t);
        }
    }

    #[test]
    fn splitting_counts_divide_phi(q in odd_prime(2000), n in 1u32..12) {
        let s = splitting(q, n).unwrap();
        let phi = s.modulus / 2;
        prop_assert_eq!(s.count_full * s.order_full, phi);
        prop_assert_eq!(s.count_real * s.order_real * 2, phi);
        prop_assert!(s.count_full >= s.count_real);
    }

    #[test]
    fn genus_growth_doubles(m in 2u32..20, n in 1u32..30) {
        prop_assert_eq!(genus_growth(m, n + 1).unwrap(), 2 * genus_growth(m, n).unwrap());
    }

    #[test]
    fn prediction_order_is_twice_genus(d in prop::sample::select(vec![33u64, 57, 129, 209, 393, 473, 73, 89, 233]), n in 1u32..8) {
        if let Ok(p) = predict(d, n) {
            prop_assert_eq!(p.cl2_order, 2 * p.h2_genus);
            prop_assert_eq!(p.cl2_type[0] * p.cl2_type[1], p.cl2_order);
        }
    }
}
