mod common;

use std::cmp::Ordering;

use cerfmorse::algebra::snf::rank;
use cerfmorse::algebra::{homology, SparseMatrix, Z2};
use cerfmorse::bifurcation::evolve;
use cerfmorse::escape::{budget_from_heights, cmp_exp, GrowthBound, IntegralValue};
use cerfmorse::scenario::{parse_str, random_scenario, GeneratorConfig};
use cerfmorse::tracker::{Chain, Window};
use cerfmorse::{BigInt, Rational};
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-400i64..400, 1i64..40).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn positive_rational() -> impl Strategy<Value = Rational> {
    (1i64..400, 1i64..40).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn rf(x: &Rational) -> f64 {
    cerfmorse::algebra::ring::rational_to_f64(x)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn cmp_exp_agrees_with_floats(x in positive_rational(), c in (-40i64..40, 1i64..8)) {
        let c = Rational::new(c.0.into(), c.1.into());
        let (xf, ef) = (rf(&x), rf(&c).exp());
        prop_assume!(((xf - ef) / ef).abs() > 1e-9);
        let want = if xf > ef { Ordering::Greater } else { Ordering::Less };
        prop_assert_eq!(cmp_exp(&x, &c), want);
    }

    #[test]
    fn square_budget_is_additive(mut hs in prop::collection::vec(positive_rational(), 3..8), c in positive_rational()) {
        hs.sort();
        hs.dedup();
        prop_assume!(hs.len() >= 3);
        let phi = GrowthBound::square(c);
        let whole = budget_from_heights(&hs, &phi).unwrap();
        let k = hs.len() / 2;
        let left = budget_from_heights(&hs[..=k], &phi).unwrap();
        let right = budget_from_heights(&hs[k..], &phi).unwrap();
        match (&whole.cumulative, &left.cumulative, &right.cumulative) {
            (IntegralValue::Exact(w), IntegralValue::Exact(l), IntegralValue::Exact(r)) => prop_assert_eq!(w, &(l + r)),
            other => prop_assert!(false, "inexact: {:?}", other),
        }
        // only the endpoints matter
        let ends = budget_from_heights(&[hs[0].clone(), hs[hs.len() - 1].clone()], &phi).unwrap();
        prop_assert_eq!(&ends.cumulative, &whole.cumulative);
        prop_assert_eq!(ends.verdict, whole.verdict);
    }

    #[test]
    fn linear_budget_depends_only_on_endpoints(mut hs in prop::collection::vec(positive_rational(), 2..8), c in positive_rational()) {
        hs.sort();
        hs.dedup();
        prop_assume!(hs.len() >= 2);
        let phi = GrowthBound::linear(c.clone());
        let whole = budget_from_heights(&hs, &phi).unwrap();
        let ends = budget_from_heights(&[hs[0].clone(), hs[hs.len() - 1].clone()], &phi).unwrap();
        prop_assert_eq!(whole.verdict, ends.verdict);
        let want = (rf(&hs[hs.len() - 1]) / rf(&hs[0])).ln() / rf(&c);
        prop_assert!((whole.cumulative.to_f64() - want).abs() <= 1e-9 * want.max(1.0));
    }

    #[test]
    fn downward_traces_mirror_upward_ones(mut hs in prop::collection::vec(positive_rational(), 2..6)) {
        hs.sort();
        hs.dedup();
        prop_assume!(hs.len() >= 2);
        let phi = GrowthBound::square(Rational::from_integer(2.into()));
        let up = budget_from_heights(&hs, &phi).unwrap();
        let down: Vec<Rational> = hs.iter().map(|h| -h).collect();
        let down = budget_from_heights(&down, &phi).unwrap();
        prop_assert_eq!(up.cumulative, down.cumulative);
    }

    #[test]
    fn snf_rank_matches_z2_enumeration(bits in prop::collection::vec(any::<bool>(), 64), rows in 1usize..8, cols in 1usize..8) {
        let mut m = SparseMatrix::<Z2>::zeros(rows, cols);
        let mut masks = vec![0u32; cols];
        for i in 0..rows {
            for j in 0..cols {
                if bits[i * 8 + j] {
                    m.set(i, j, Z2::new(true));
                    masks[j] |= 1 << i;
                }
            }
        }
        let (_, image) = z2_kernel_image(&masks);
        prop_assert_eq!(rank(&m), image);
    }

    #[test]
    fn scenarios_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_scenario::<BigInt>(&mut rng, &GeneratorConfig::default()).unwrap();
        let text = s.to_string();
        let back = parse_str(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn integer_free_rank_matches_rational_rank(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_scenario::<BigInt>(&mut rng, &GeneratorConfig::default()).unwrap();
        let inst = s.instantiate::<BigInt>().unwrap();
        let log = evolve(&inst.gamma0, &inst.events, &inst.tuple).unwrap();
        for iv in &log.intervals {
            let d = dense_boundary(&iv.counter);
            let dq: Vec<Vec<Rational>> = d.iter().map(|row| row.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect();
            let h = homology(&iv.counter.boundary()).unwrap();
            prop_assert_eq!(h.free_rank, d.len() - 2 * rank_q(&dq));
            prop_assert!(squares_to_zero(&iv.counter));
        }
    }

    #[test]
    fn windows_round_trip(a in small_rational(), gap in positive_rational()) {
        let w = Window::constant(a.clone(), &a + &gap).unwrap();
        prop_assert_eq!(Window::parse(&w.to_string()).unwrap(), w);
    }

    #[test]
    fn chains_round_trip(coeffs in prop::collection::vec(-5i64..5, 1..6)) {
        let c = Chain::<BigInt>::from_terms(coeffs.iter().enumerate().map(|(k, v)| (format!("c{k}").into(), BigInt::from(*v))));
        prop_assert_eq!(Chain::<BigInt>::parse(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn growth_bounds_round_trip(c in positive_rational(), a in positive_rational(), depth in 1u32..4) {
        for phi in [
            GrowthBound::linear(c.clone()),
            GrowthBound::square(c.clone()).with_gap(-a.clone(), a.clone()),
            GrowthBound::iterlog(c.clone(), depth),
        ] {
            let back: GrowthBound = phi.to_string().parse().unwrap();
            prop_assert_eq!(back, phi);
        }
    }
}
