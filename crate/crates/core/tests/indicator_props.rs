use normsynth::indicators::{
    self, hypervolume_exact, igd_plus, kruskal_wallis, nondominated_filter,
};
use normsynth::moea::pareto::dominates_max;
use proptest::prelude::*;

fn points(m: usize, max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.0..1.0f64, m), 1..max)
}

fn cloud() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
    (2usize..=4).prop_flat_map(|m| (points(m, 15), prop::collection::vec(0.0..1.0f64, m)))
}

const ORIGIN: [f64; 4] = [0.0; 4];
const ORIGIN_5: [f64; 5] = [0.0; 5];

fn weakly_dominated(z: &[f64], front: &[Vec<f64>]) -> bool {
    front.iter().any(|a| a.iter().zip(z).all(|(x, y)| x >= y))
}

/// Union volume by inclusion-exclusion over every subset of boxes.
fn inclusion_exclusion(front: &[Vec<f64>]) -> f64 {
    let m = front[0].len();
    (1u32..1 << front.len())
        .map(|mask| {
            let mut corner = vec![f64::INFINITY; m];
            for (_, p) in front.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1) {
                for k in 0..m {
                    corner[k] = corner[k].min(p[k]);
                }
            }
            let volume: f64 = corner.iter().product();
            if mask.count_ones() % 2 == 1 {
                volume
            } else {
                -volume
            }
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn hypervolume_equals_inclusion_exclusion(
        front in (2usize..=5).prop_flat_map(|m| points(m, 11)),
    ) {
        let m = front[0].len();
        let exact = hypervolume_exact(&front, &ORIGIN_5[..m]).unwrap();
        prop_assert!((exact - inclusion_exclusion(&front)).abs() <= 1e-12, "{exact}");
    }

    #[test]
    fn adding_a_point_never_shrinks_hypervolume((front, extra) in cloud()) {
        let m = extra.len();
        let before = hypervolume_exact(&front, &ORIGIN[..m]).unwrap();
        let mut grown = front.clone();
        grown.push(extra);
        let after = hypervolume_exact(&grown, &ORIGIN[..m]).unwrap();
        prop_assert!(after >= before - 1e-12, "{before} -> {after}");
    }

    #[test]
    fn dominated_points_contribute_nothing((front, _) in cloud()) {
        let m = front[0].len();
        let all = hypervolume_exact(&front, &ORIGIN[..m]).unwrap();
        let kept = hypervolume_exact(&nondominated_filter(&front).unwrap(), &ORIGIN[..m]).unwrap();
        prop_assert!((all - kept).abs() <= 1e-12 * all.max(1.0));
    }

    #[test]
    fn filter_output_is_mutually_nondominated((front, _) in cloud()) {
        let kept = nondominated_filter(&front).unwrap();
        for a in &kept {
            for b in &kept {
                prop_assert!(!dominates_max(a, b));
            }
            prop_assert!(front.contains(a));
        }
        for p in &front {
            prop_assert!(weakly_dominated(p, &kept));
        }
    }

    #[test]
    fn igd_plus_is_zero_exactly_when_reference_is_covered(
        (front, _) in cloud(),
        reference_seed in points(4, 8),
    ) {
        let m = front[0].len();
        let reference: Vec<Vec<f64>> = reference_seed.iter().map(|z| z[..m].to_vec()).collect();
        let d = igd_plus(&front, &reference).unwrap();
        let covered = reference.iter().all(|z| weakly_dominated(z, &front));
        prop_assert_eq!(d == 0.0, covered, "igd+ {}", d);
    }

    #[test]
    fn igd_plus_of_a_front_against_itself_is_zero((front, _) in cloud()) {
        prop_assert_eq!(igd_plus(&front, &front).unwrap(), 0.0);
    }

    #[test]
    fn indicators_ignore_input_order((front, _) in cloud(), shift in 0usize..15) {
        let m = front[0].len();
        let mut permuted = front.clone();
        permuted.rotate_left(shift % front.len());
        permuted.reverse();
        let hv = |p: &[Vec<f64>]| hypervolume_exact(p, &ORIGIN[..m]).unwrap();
        prop_assert!((hv(&front) - hv(&permuted)).abs() <= 1e-12);
        let reference = vec![vec![0.5; m]];
        prop_assert!((igd_plus(&front, &reference).unwrap() - igd_plus(&permuted, &reference).unwrap()).abs() <= 1e-15);
        let mut a = nondominated_filter(&front).unwrap();
        let mut b = nondominated_filter(&permuted).unwrap();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        prop_assert_eq!(a, b);
        prop_assert_eq!(indicators::nadir_point(&front).unwrap(), indicators::nadir_point(&permuted).unwrap());
    }

    #[test]
    fn kruskal_wallis_ignores_monotone_transforms(
        groups in prop::collection::vec(prop::collection::vec(-10.0..10.0f64, 2..8), 2..5),
        scale in 0.1..10.0f64,
    ) {
        let before = kruskal_wallis(&groups).unwrap();
        let transformed: Vec<Vec<f64>> = groups
            .iter()
            .map(|g| g.iter().map(|x| (x * scale).exp() + 3.0 * x).collect())
            .collect();
        let after = kruskal_wallis(&transformed).unwrap();
        prop_assert!((before.h - after.h).abs() < 1e-9);
        prop_assert!((before.p_value - after.p_value).abs() < 1e-9);
    }

    #[test]
    fn kruskal_wallis_ignores_group_order(
        groups in prop::collection::vec(prop::collection::vec(-10.0..10.0f64, 2..8), 2..5),
    ) {
        let mut reversed = groups.clone();
        reversed.reverse();
        let a = kruskal_wallis(&groups).unwrap();
        let b = kruskal_wallis(&reversed).unwrap();
        prop_assert!((a.h - b.h).abs() < 1e-9);
    }
}
