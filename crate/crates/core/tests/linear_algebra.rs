use num_traits::{One, Zero};
use proptest::prelude::*;
use stringar::{Field, Fp, Matrix, Rational, Subspace};

fn rat(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix<Rational>> {
    proptest::collection::vec(-3i64..=3, rows * cols).prop_map(move |v| Matrix::from_rows(rows, cols, v.into_iter().map(rat).collect()))
}

proptest! {
    #[test]
    fn rank_plus_nullity(m in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| matrix(r, c))) {
        prop_assert_eq!(m.rank() + m.kernel().len(), m.cols());
        for v in m.kernel() {
            prop_assert!(m.apply(&v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn rank_of_transpose(m in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| matrix(r, c))) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn solve_recovers_image(m in matrix(3, 4), x in proptest::collection::vec(-3i64..=3, 4)) {
        let x: Vec<Rational> = x.into_iter().map(rat).collect();
        let b = m.apply(&x);
        let y = m.solve(&b).expect("b lies in the image");
        prop_assert_eq!(m.apply(&y), b);
    }

    #[test]
    fn span_contains_generators(vs in proptest::collection::vec(proptest::collection::vec(-2i64..=2, 4), 0..5)) {
        let vs: Vec<Vec<Rational>> = vs.into_iter().map(|v| v.into_iter().map(rat).collect()).collect();
        let s = Subspace::span(4, vs.clone());
        prop_assert!(s.dim() <= vs.len());
        for v in &vs {
            prop_assert!(s.contains(v));
        }
        prop_assert!(s.is_subspace_of(&s.sum(&Subspace::zero(4))));
    }

    #[test]
    fn prime_field_inverses(a in 1u64..101) {
        let x = Fp::<101>::new(a);
        prop_assert_eq!(x * (Fp::<101>::one() / x), Fp::<101>::one());
    }
}

#[test]
fn characteristics() {
    assert_eq!(<Rational as Field>::CHARACTERISTIC, 0);
    assert_eq!(<Fp<7> as Field>::CHARACTERISTIC, 7);
    let m: Matrix<Fp<2>> = Matrix::from_rows(2, 2, vec![Fp::new(1), Fp::new(1), Fp::new(1), Fp::new(1)]);
    assert_eq!(m.rank(), 1);
}
