use proptest::prelude::*;

use polylift_core::circulation::{
    find_circulation, hoffman_feasible_flow, hoffman_feasible_subsets, violates_hoffman, CapacityBounds,
};
use polylift_core::exactnum::{affine_dimension, rank};
use polylift_core::{Digraph, ExtendedRational, RatMatrix, Rational};

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=12).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

fn matrix() -> impl Strategy<Value = RatMatrix> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
        // Small entries make rank deficiency common.
        prop::collection::vec(prop::collection::vec((-2i64..=2).prop_map(Rational::from_int), c), r)
            .prop_map(move |rows| RatMatrix::from_rows(c, rows).unwrap())
    })
}

fn capacity() -> impl Strategy<Value = (ExtendedRational, ExtendedRational)> {
    (0u8..10, -4i64..=4, 0i64..=4, 1i64..=3).prop_map(|(kind, a, w, d)| {
        let lo = Rational::new(a, d).unwrap();
        let hi = &lo + &Rational::new(w, d).unwrap();
        match kind {
            0 => (ExtendedRational::NegInf, ExtendedRational::Finite(hi)),
            1 => (ExtendedRational::Finite(lo), ExtendedRational::PosInf),
            2 => (ExtendedRational::NegInf, ExtendedRational::PosInf),
            _ => (ExtendedRational::Finite(lo), ExtendedRational::Finite(hi)),
        }
    })
}

fn circulation_instance() -> impl Strategy<Value = (Digraph, CapacityBounds)> {
    (2usize..=6)
        .prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 1..=10)))
        .prop_flat_map(|(n, pairs)| {
            let mut arcs: Vec<(usize, usize)> = pairs.into_iter().filter(|(u, v)| u != v).collect();
            arcs.sort_unstable();
            arcs.dedup();
            let m = arcs.len();
            (Just(n), Just(arcs), prop::collection::vec(capacity(), m))
        })
        .prop_map(|(n, arcs, caps)| {
            let d = Digraph::new(n, arcs).unwrap();
            let (lower, upper) = caps.into_iter().unzip();
            (d, CapacityBounds::new(lower, upper).unwrap())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn field_axioms(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Rational::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.recip().unwrap(), Rational::one());
        }
        prop_assert_eq!(a < b, &b - &a > Rational::zero());
    }

    #[test]
    fn display_parse_round_trip(a in rational()) {
        let text = a.to_string();
        prop_assert!(text.contains('/'));
        prop_assert_eq!(text.parse::<Rational>().unwrap(), a);
    }

    #[test]
    fn rank_of_transpose(m in matrix()) {
        let r = rank(&m);
        prop_assert_eq!(r, rank(&m.transpose()));
        prop_assert!(r <= m.rows().min(m.cols()));
    }

    #[test]
    fn affine_dimension_is_rank_of_differences(m in matrix()) {
        let points: Vec<Vec<Rational>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
        let diffs: Vec<Vec<Rational>> =
            points[1..].iter().map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect()).collect();
        let expected = if diffs.is_empty() { 0 } else { rank(&RatMatrix::from_rows(m.cols(), diffs).unwrap()) };
        prop_assert_eq!(affine_dimension(&points).unwrap(), expected as isize);
        let mut shifted = points.clone();
        for p in &mut shifted {
            p[0] += Rational::from_int(3);
        }
        prop_assert_eq!(affine_dimension(&shifted).unwrap(), expected as isize);
    }

    #[test]
    fn hoffman_oracles_agree((d, cb) in circulation_instance()) {
        let subsets = hoffman_feasible_subsets(&d, &cb).unwrap();
        let flow = hoffman_feasible_flow(&d, &cb).unwrap();
        prop_assert_eq!(subsets.is_feasible(), flow.is_feasible());
        if let polylift_core::circulation::HoffmanVerdict::Infeasible { witness } = &flow {
            prop_assert!(violates_hoffman(&d, &cb, witness).unwrap());
        }
        match find_circulation(&d, &cb).unwrap() {
            Some(c) => prop_assert!(subsets.is_feasible() && c.is_valid(&d, &cb)),
            None => prop_assert!(!subsets.is_feasible()),
        }
    }
}
