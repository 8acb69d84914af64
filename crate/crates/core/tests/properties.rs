//! Randomized invariants: reflection and affine covariance, bound sandwiches,
//! minimality of the Chebyshev polynomial, and enclosure by the preimage K_n.

use proptest::prelude::*;

use widomlab::chebyshev::{enclosing_preimage, remez_with, sup_bounds, RemezOptions, WeightSpec};
use widomlab::orthopoly::{stieltjes, JacobiOnEq};
use widomlab::poly::Poly;
use widomlab::potential::{equilibrium, DEFAULT_QUAD_POINTS};
use widomlab::{affine_map, IntervalSet};

fn interval_set() -> impl Strategy<Value = IntervalSet> {
    (1usize..=3).prop_flat_map(|bands| prop::collection::vec(-1.0f64..1.0, 2 * bands)).prop_filter_map(
        "bands and gaps of width >= 0.05",
        |mut pts| {
            pts.sort_by(f64::total_cmp);
            if pts.windows(2).any(|w| w[1] - w[0] < 0.05) {
                return None;
            }
            let pairs: Vec<(f64, f64)> = pts.chunks(2).map(|c| (c[0], c[1])).collect();
            IntervalSet::new(&pairs).ok()
        },
    )
}

fn opts() -> RemezOptions {
    RemezOptions::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn reflection_swaps_sqrt_weights(set in interval_set(), n in 1usize..=4) {
        let eq = equilibrium(&set, DEFAULT_QUAD_POINTS).unwrap();
        let eq_r = equilibrium(&set.reflect(), DEFAULT_QUAD_POINTS).unwrap();
        prop_assert!((eq.capacity() - eq_r.capacity()).abs() <= 1e-12);
        let a = remez_with(&eq, WeightSpec::SqrtOnePlus, n, &opts()).unwrap();
        let b = remez_with(&eq_r, WeightSpec::SqrtOneMinus, n, &opts()).unwrap();
        prop_assert!((a.widom_inf - b.widom_inf).abs() <= 1e-9 * a.widom_inf);
    }

    #[test]
    fn capacity_scales_under_affine_maps(set in interval_set(), lo in -5.0f64..5.0, width in 0.5f64..6.0) {
        let target = (lo, lo + width);
        let mapped = affine_map(&set, (-1.0, 1.0), target).unwrap();
        let cap = equilibrium(&set, DEFAULT_QUAD_POINTS).unwrap().capacity();
        let cap_m = equilibrium(&mapped, DEFAULT_QUAD_POINTS).unwrap().capacity();
        prop_assert!((cap_m - cap * width / 2.0).abs() <= 1e-10 * cap_m);
    }

    #[test]
    fn sup_widom_factor_lies_between_its_bounds(set in interval_set(), n in 1usize..=5, minus in any::<bool>()) {
        let weight = if minus { WeightSpec::SqrtOneMinus } else { WeightSpec::SqrtOnePlus };
        let eq = equilibrium(&set, DEFAULT_QUAD_POINTS).unwrap();
        let bounds = sup_bounds(&eq, weight).unwrap();
        let w = remez_with(&eq, weight, n, &opts()).unwrap().widom_inf;
        prop_assert!(bounds.lower <= w + 1e-8, "{} > {}", bounds.lower, w);
        prop_assert!(w <= bounds.upper.unwrap() + 1e-8, "{} > {:?}", w, bounds.upper);
    }

    #[test]
    fn chebyshev_polynomial_is_minimal(
        set in interval_set(),
        n in 1usize..=5,
        delta in prop::collection::vec(-1e-2f64..1e-2, 5),
    ) {
        // Adding any lower-degree q cannot lower |w·(T + q)| at every
        // alternation point, since q cannot match n + 1 alternating signs.
        let eq = equilibrium(&set, DEFAULT_QUAD_POINTS).unwrap();
        let sol = remez_with(&eq, WeightSpec::SqrtOnePlus, n, &opts()).unwrap();
        let q = Poly::new(delta[..n].to_vec());
        let worst = sol
            .alternation_points
            .iter()
            .map(|&x| (WeightSpec::SqrtOnePlus.eval(x) * (sol.eval(x) + q.eval(x))).abs())
            .fold(0.0f64, f64::max);
        prop_assert!(worst >= sol.norm * (1.0 - 1e-9), "{} < {}", worst, sol.norm);
    }

    #[test]
    fn enclosing_preimage_contains_the_set(set in interval_set(), n in 1usize..=4) {
        let eq = equilibrium(&set, DEFAULT_QUAD_POINTS).unwrap();
        let sol = remez_with(&eq, WeightSpec::SqrtOnePlus, n, &opts()).unwrap();
        let kn = enclosing_preimage(&set, WeightSpec::SqrtOnePlus, &sol).unwrap();
        prop_assert!(set.is_subset_of(&kn, 1e-9));
        prop_assert!(kn.hull().0 >= -1.0 - 1e-12 && kn.hull().1 <= 1.0 + 1e-12);
    }

    #[test]
    fn l2_widom_factor_is_at_least_the_entropy(set in interval_set(), alpha in 0u32..=2, beta in 0u32..=2) {
        let eq = equilibrium(&set, DEFAULT_QUAD_POINTS).unwrap();
        let d = stieltjes(&JacobiOnEq::new(&eq, alpha, beta).unwrap(), 6).unwrap();
        for n in 1..=6 {
            prop_assert!(d.widom2_sq[n] >= d.entropy - 1e-9);
        }
    }
}
