mod common;

use common::*;
use polymat::polymatroid::VALIDATION_TOL;
use polymat::{linear_combine, AnyRankVector, Polymatroid, RankVector};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dual_laws_integer(seed in any::<u64>(), n in 1usize..=5) {
        let p = random_int_polymatroid(&mut rng(seed), n);
        prop_assert_eq!(check_dual_laws(&p, 0.0), Ok(()));
    }

    #[test]
    fn dual_laws_float(seed in any::<u64>(), n in 1usize..=5) {
        let p = random_float_polymatroid(&mut rng(seed), n);
        prop_assert_eq!(check_dual_laws(&p, 1e-9), Ok(()));
    }

    #[test]
    fn tighten_is_order_independent(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let p = random_int_polymatroid(&mut r, n);
        prop_assert_eq!(check_tighten_order(&p, &mut r), Ok(()));
    }

    #[test]
    fn split_laws(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let p = random_int_polymatroid(&mut r, n);
        let a = r.gen_range(0..n);
        let alpha = r.gen_range(0..=p.singleton(a));
        prop_assert_eq!(check_split_laws(&p, a, alpha), Ok(()));
    }

    #[test]
    fn principal_extension_is_valid(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let p = random_int_polymatroid(&mut r, n);
        let a = r.gen_range(0..n);
        let alpha = r.gen_range(0..=p.singleton(a) + 1);
        prop_assert_eq!(check_principal_extension(&p, a, alpha), Ok(()));
    }

    #[test]
    fn nonnegative_combinations_stay_polymatroids(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let parts: Vec<Polymatroid<f64>> = (0..3).map(|_| random_float_polymatroid(&mut r, n)).collect();
        let terms: Vec<(f64, &Polymatroid<f64>)> = parts.iter().map(|p| (r.gen_range(0.0..2.0), p)).collect();
        let combined = linear_combine(&terms).unwrap();
        prop_assert!(Polymatroid::validate(combined, VALIDATION_TOL).is_ok());
    }

    #[test]
    fn rank_files_round_trip(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let p = random_int_polymatroid(&mut r, n);
        let text = p.rank_vector().to_json_string();
        let back = AnyRankVector::from_json_str(&text).unwrap().into_int().unwrap();
        prop_assert_eq!(&back, p.rank_vector());
        let f = random_float_polymatroid(&mut r, n);
        let back = AnyRankVector::from_json_str(&f.rank_vector().to_json_string()).unwrap().to_float();
        prop_assert_eq!(&back, f.rank_vector());
    }

    #[test]
    fn validation_rejects_perturbed_vectors(seed in any::<u64>(), n in 2usize..=5) {
        // Raising h(M - i) above h(M) breaks monotonicity.
        let mut r = rng(seed);
        let p = random_int_polymatroid(&mut r, n);
        let i = r.gen_range(0..n);
        let full = p.ground().full();
        let mut values = p.rank_vector().values().to_vec();
        values[full.without(i).index()] = p.full_rank() + 1;
        let bad = RankVector::from_values(p.ground().clone(), values).unwrap();
        prop_assert!(Polymatroid::validate(bad, 0.0).is_err());
    }
}
