use dmp_core::apartment::{breakpoints, convexity_check, lattice_bounds, ApartmentPoint, ShapeSet};
use dmp_core::orbits::{all_orbits, dominance_leq, OrbitLabel};
use dmp_core::rational::{format_ratio, parse_q, q, Q};
use dmp_core::refine::{fork, PowerOfQ};
use dmp_core::selftest::{quotient_dim, refine_instances, SelftestConfig};
use proptest::prelude::*;

fn rational(max_den: i64, lo: i64, hi: i64) -> impl Strategy<Value = Q> {
    (1..=max_den).prop_flat_map(move |d| (lo * d..hi * d).prop_map(move |n| q(n, d)))
}

fn point(n: usize) -> impl Strategy<Value = ApartmentPoint> {
    proptest::collection::vec(rational(4, 0, 1), n - 1).prop_map(|mut c| {
        c.push(q(0, 1));
        ApartmentPoint::new(c)
    })
}

proptest! {
    #[test]
    fn strict_bounds_dominate(x in (2usize..=3).prop_flat_map(point), s in rational(4, -2, 2)) {
        let ge = lattice_bounds(&x, s, false);
        let gt = lattice_bounds(&x, s, true);
        let n = x.dim();
        for i in 0..n {
            for j in 0..n {
                let v = s + x.coord(j) - x.coord(i);
                // equal exactly where the level is not an integer
                prop_assert_eq!(gt[i][j] == ge[i][j], *v.denom() != 1);
                prop_assert!(gt[i][j] >= ge[i][j]);
            }
        }
    }

    #[test]
    fn filtration_decreases(x in (2usize..=3).prop_flat_map(point), s in rational(4, -2, 2), ds in rational(4, 0, 2)) {
        prop_assume!(ds > q(0, 1));
        let hi = lattice_bounds(&x, s + ds, false);
        let gt = lattice_bounds(&x, s, true);
        let ge = lattice_bounds(&x, s, false);
        let n = x.dim();
        for i in 0..n {
            for j in 0..n {
                prop_assert!(hi[i][j] >= gt[i][j] && gt[i][j] >= ge[i][j]);
            }
        }
    }

    #[test]
    fn geodesic_plans_verify(
        (x0, x1) in (2usize..=3).prop_flat_map(|n| (point(n), point(n))),
        s0 in rational(8, -1, 2),
        s1 in rational(8, -1, 2),
    ) {
        let plan = breakpoints(&x0, s0, &x1, s1).unwrap();
        prop_assert_eq!(plan.breakpoints.first().copied(), Some(q(0, 1)));
        prop_assert_eq!(plan.breakpoints.last().copied(), Some(q(1, 1)));
        for iv in &plan.intervals {
            let (x, s) = plan.point(iv.sample);
            prop_assert_eq!(&ShapeSet::at(&x, s), &iv.shapes);
            prop_assert!(convexity_check(&x0, s0, &x1, s1, iv.sample));
        }
    }

    #[test]
    fn rational_text_round_trips(x in rational(50, -20, 20)) {
        prop_assert_eq!(parse_q(&format_ratio(&x)), Some(x));
    }

    #[test]
    fn power_of_q_round_trips(e in -20i64..20) {
        let c = PowerOfQ { q: 5, e };
        let text = serde_json::to_string(&c).unwrap();
        prop_assert_eq!(serde_json::from_str::<PowerOfQ>(&text).unwrap(), c);
        prop_assert_eq!(c.times(c.inverse()).e, 0);
    }

    #[test]
    fn dominance_reverses_under_transpose(n in 1usize..=6) {
        let orbits = all_orbits(n);
        for a in &orbits {
            for b in &orbits {
                let ta = OrbitLabel::new(a.transpose()).unwrap();
                let tb = OrbitLabel::new(b.transpose()).unwrap();
                prop_assert_eq!(dominance_leq(a, b).unwrap(), dominance_leq(&tb, &ta).unwrap());
                if dominance_leq(a, b).unwrap() && a != b {
                    prop_assert!(a.dim() < b.dim());
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn fork_size_is_a_power_of_q(seed in any::<u64>()) {
        let cfg = SelftestConfig { seed, ..SelftestConfig::default() };
        for (coarse, x, s) in refine_instances(&cfg).unwrap() {
            let f = fork(&coarse, &x, s).unwrap();
            prop_assert_eq!(f.size(cfg.q), (cfg.q as u64).pow(quotient_dim(&coarse, &x, s) as u32));
        }
    }
}
