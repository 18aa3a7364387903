use eudoxus::multidim::{multi_certificate_audit, MultiAH, RatMatrix};
use eudoxus::numeric::rat;
use eudoxus::{BigInt, Budget, Rat};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = RatMatrix> {
    matrix_with(rows, cols, 12)
}

fn matrix_with(rows: usize, cols: usize, max_den: i64) -> impl Strategy<Value = RatMatrix> {
    prop::collection::vec(
        prop::collection::vec((-30i64..=30, 1i64..=max_den), cols),
        rows,
    )
    .prop_map(|rows| {
        RatMatrix::new(
            rows.into_iter()
                .map(|r| r.into_iter().map(|(n, d)| rat(n, d)).collect())
                .collect(),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn noisy_lift_recovers_every_entry(m in matrix(2, 3), k in 0u64..=6, seed in any::<u64>()) {
        let f = MultiAH::from_matrix_noisy(&m, k, seed);
        let rec = f.recover_matrix(&rat(1, 100), Budget::default()).unwrap();
        prop_assert!(rec.is_complete());
        prop_assert!(rec.matrix.contains(&m));
        prop_assert!(rec.matrix.max_width() <= rat(1, 100));
    }

    #[test]
    fn noisy_lift_respects_its_certificate(m in matrix(3, 2), k in 0u64..=6, seed in any::<u64>()) {
        let f = MultiAH::from_matrix_noisy(&m, k, seed);
        let report = multi_certificate_audit(&f, 500, 400, seed).unwrap();
        prop_assert!(!report.violated, "{}", report);
    }

    #[test]
    fn linear_post_composition_recovers_product(m in matrix(2, 2), l in matrix_with(3, 2, 1), seed in any::<u64>()) {
        let f = MultiAH::from_matrix_noisy(&m, 3, seed).post_compose(&l).unwrap();
        let want = l.mul(&m).unwrap();
        let rec = f.recover_matrix(&rat(1, 100), Budget::default()).unwrap();
        prop_assert!(rec.matrix.contains(&want));
    }

    #[test]
    fn direct_sum_halves_recover_their_blocks(m in matrix(2, 4), seed in any::<u64>()) {
        let f = MultiAH::from_matrix_noisy(&m, 2, seed);
        let (f1, f2, worst) = f.split_direct_sum(2, 200, 300, seed).unwrap();
        prop_assert!(&worst <= f.cert());
        let r1 = f1.recover_matrix(&rat(1, 50), Budget::default()).unwrap();
        let r2 = f2.recover_matrix(&rat(1, 50), Budget::default()).unwrap();
        let glued = r1.matrix.hconcat(&r2.matrix).unwrap();
        prop_assert!(glued.contains(&m));
    }
}

#[test]
fn exact_integer_lift_evaluates_linearly() {
    let m = RatMatrix::parse_grid("2 2\n2/1 0/1\n1/1 3/1\n").unwrap();
    let f = MultiAH::from_matrix_noisy(&m, 0, 0);
    let v = [BigInt::from(5), BigInt::from(-7)];
    assert_eq!(
        f.eval(&v).unwrap(),
        vec![BigInt::from(10), BigInt::from(-16)]
    );
    assert_eq!(f.cert(), &BigInt::from(0));
    let rec = f
        .recover_matrix(&Rat::new(1.into(), 1000.into()), Budget::default())
        .unwrap();
    assert!(rec.matrix.contains(&m));
}
