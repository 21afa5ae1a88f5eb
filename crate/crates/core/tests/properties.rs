use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use fsdim_core::digits::{comp, real_value, seq_digits};
use fsdim_core::dimension::{default_window_frac, dim_point_estimate, dim_set_estimate};
use fsdim_core::fst::{make_identity, make_periodic_decoder, NamedFst};
use fsdim_core::infocontent::{enumerate_all, kt};
use fsdim_core::precision::{kdelta, kdelta_oracle, Caps, Delta, PrecisionQuery};
use fsdim_core::separator::{ktf_delta, KtfCaps, SeparatorEnumerator};
use fsdim_core::{Base, DigitStream, Fst, RealSpec, Status};

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

fn arb_base() -> impl Strategy<Value = Base> {
    (2u32..=10).prop_map(|b| Base::new(b).unwrap())
}

fn arb_unit_rational() -> impl Strategy<Value = BigRational> {
    (2i64..200).prop_flat_map(|q| (0..q, Just(q))).prop_map(|(p, q)| rat(p, q))
}

fn arb_binary_fst() -> impl Strategy<Value = Fst> {
    (1usize..=3).prop_flat_map(|states| {
        let cells = states * 2;
        (
            prop::collection::vec(0..states, cells),
            prop::collection::vec(prop::collection::vec(0u8..2, 0..=2), cells),
        )
            .prop_map(|(next, out)| Fst::from_tables(Base::BINARY, 0, next, out).unwrap())
    })
}

fn stream(x: &BigRational) -> DigitStream {
    DigitStream::from_rational(x.clone(), Base::BINARY).unwrap()
}

fn query(x: &BigRational, n: u32, cap: usize) -> PrecisionQuery {
    PrecisionQuery::new(stream(x), Delta::InversePower(n)).with_caps(Caps::with_input(cap))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prefixes_bracket_the_value(x in arb_unit_rational(), base in arb_base(), m in 0usize..40) {
        let spec = RealSpec::Rational(x.clone());
        let v = real_value(&seq_digits(&spec, base, m).unwrap(), base).unwrap();
        prop_assert!(v <= x);
        prop_assert!(x < v + base.inverse_power(m as u32));
    }

    #[test]
    fn comp_is_an_involution(base in arb_base(), raw in prop::collection::vec(0u8..10, 0..20)) {
        let w: Vec<u8> = raw.iter().map(|d| d % base.get()).collect();
        prop_assert_eq!(comp(&comp(&w, base).unwrap(), base).unwrap(), w.clone());
        let sum = real_value(&w, base).unwrap() + real_value(&comp(&w, base).unwrap(), base).unwrap();
        prop_assert_eq!(sum, BigRational::one() - base.inverse_power(w.len() as u32));
    }

    #[test]
    fn rational_expansions_are_eventually_periodic(x in arb_unit_rational(), base in arb_base()) {
        // the preperiod is at most log2(q) digits and the period divides phi(q') < q
        let q: i64 = x.denom().try_into().unwrap();
        let d = seq_digits(&RealSpec::Rational(x.clone()), base, 3 * q as usize + 16).unwrap();
        let pre = 8;
        let period = (1..=q as usize)
            .find(|&p| (pre..d.len() - p).all(|i| d[i] == d[i + p]));
        prop_assert!(period.is_some());
    }

    #[test]
    fn kdelta_matches_oracle(t in arb_binary_fst(), x in arb_unit_rational(), n in 1u32..=6) {
        let fast = kdelta(&t, &query(&x, n, 10)).unwrap();
        let slow = kdelta_oracle(&t, &query(&x, n, 10), 10).unwrap();
        prop_assert_eq!(fast.cost(), slow.cost());
        if fast.is_found() {
            prop_assert_eq!(&fast, &slow);
        }
    }

    #[test]
    fn kdelta_witness_is_within_delta(t in arb_binary_fst(), x in arb_unit_rational(), n in 1u32..=12) {
        let r = kdelta(&t, &PrecisionQuery::new(stream(&x), Delta::InversePower(n))).unwrap();
        if r.is_found() {
            prop_assert_eq!(t.run(&r.witness_input).unwrap(), r.witness_output.clone());
            let d = (real_value(&r.witness_output, Base::BINARY).unwrap() - &x).abs();
            prop_assert!(d < Base::BINARY.inverse_power(n));
        }
    }

    #[test]
    fn finer_precision_never_costs_less(t in arb_binary_fst(), x in arb_unit_rational(), n in 1u32..=10) {
        let coarse = kdelta(&t, &query(&x, n, 30)).unwrap();
        let fine = kdelta(&t, &query(&x, n + 1, 30)).unwrap();
        if let Some(f) = fine.cost() {
            prop_assert!(coarse.cost().is_some_and(|c| c <= f));
        }
    }

    #[test]
    fn arbitrary_delta_is_monotone(t in arb_binary_fst(), x in arb_unit_rational(), a in 1i64..50, b in 1i64..50) {
        let (small, large) = (rat(a.min(b), 64), rat(a.max(b), 64));
        let caps = Caps::with_input(16);
        let at = |d: &BigRational| {
            kdelta(&t, &PrecisionQuery::new(stream(&x), Delta::exact(d.clone()).unwrap()).with_caps(caps)).unwrap()
        };
        if let Some(f) = at(&small).cost() {
            prop_assert!(at(&large).cost().is_some_and(|c| c <= f));
        }
    }

    #[test]
    fn precision_cost_bounded_by_prefix_cost(t in arb_binary_fst(), x in arb_unit_rational(), n in 1u32..=10) {
        let digits = stream(&x).prefix(n as usize + 1).unwrap();
        let cap = 4 * (n as usize + 3);
        if let Some(c) = kt(&t, &digits, cap).unwrap().cost() {
            prop_assert!(kdelta(&t, &query(&x, n, cap)).unwrap().cost().is_some_and(|k| k <= c));
        }
    }

    #[test]
    fn identity_needs_at_most_n_plus_one(x in arb_unit_rational(), n in 1u32..=40) {
        let id = make_identity(Base::BINARY);
        let r = kdelta(&id, &PrecisionQuery::new(stream(&x), Delta::InversePower(n))).unwrap();
        prop_assert!(r.cost().is_some_and(|c| c <= n as usize + 1));
    }

    #[test]
    fn canonical_enumerator_coincides(t in arb_binary_fst(), x in arb_unit_rational(), n in 1u32..=5) {
        let f = SeparatorEnumerator::canonical(Base::BINARY);
        let a = ktf_delta(&t, &f, &stream(&x), &Delta::InversePower(n), KtfCaps::with_input(10)).unwrap();
        let b = kdelta(&t, &query(&x, n, 10)).unwrap();
        prop_assert_eq!(a.cost(), b.cost());
        if a.is_found() {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn enumerator_cost_monotone_in_precision(x in arb_unit_rational(), n in 1u32..=8) {
        let f = SeparatorEnumerator::targeted(&RealSpec::Rational(x.clone()), Base::BINARY).unwrap();
        let id = make_identity(Base::BINARY);
        let coarse = ktf_delta(&id, &f, &stream(&x), &Delta::InversePower(n), KtfCaps::with_input(12)).unwrap();
        let fine = ktf_delta(&id, &f, &stream(&x), &Delta::InversePower(n + 1), KtfCaps::with_input(12)).unwrap();
        if let Some(c) = fine.cost() {
            prop_assert!(coarse.cost().is_some_and(|k| k <= c));
        }
    }
}

fn small_family() -> Vec<NamedFst> {
    vec![
        NamedFst::new("p01", make_periodic_decoder(&[0, 1], 2, Base::BINARY).unwrap()),
        NamedFst::new("p001", make_periodic_decoder(&[0, 0, 1], 2, Base::BINARY).unwrap()),
        NamedFst::new("id", make_identity(Base::BINARY)),
    ]
}

fn test_points() -> Vec<DigitStream> {
    [(1, 3), (1, 7), (2, 7), (5, 8), (0, 1), (11, 13)]
        .iter()
        .map(|&(p, q)| stream(&rat(p, q)))
        .collect()
}

#[test]
fn enlarging_the_family_never_raises_an_estimate() {
    let full = small_family();
    for x in test_points() {
        let mut previous: Option<BigRational> = None;
        for k in 1..=full.len() {
            // families grow by prefix; some prefixes may witness nothing
            let Ok(r) = dim_point_estimate(&full[..k], &x, 24, &default_window_frac(), Caps::default()) else {
                continue;
            };
            if let Some(p) = &previous {
                assert!(r.estimate <= *p);
            }
            previous = Some(r.estimate);
        }
    }
}

#[test]
fn singleton_set_equals_point() {
    let fam = small_family();
    for x in test_points() {
        let point = dim_point_estimate(&fam, &x, 24, &default_window_frac(), Caps::default()).unwrap();
        let set = dim_set_estimate(&fam, std::slice::from_ref(&x), 24, &default_window_frac(), Caps::default()).unwrap();
        assert_eq!(point.estimate, set.estimate);
    }
}

#[test]
fn set_estimate_dominates_every_point() {
    let fam = small_family();
    let xs = test_points();
    for i in 0..xs.len() {
        for j in i..xs.len() {
            let pair = [xs[i].clone(), xs[j].clone()];
            let set = dim_set_estimate(&fam, &pair, 24, &default_window_frac(), Caps::default()).unwrap();
            for x in &pair {
                let p = dim_point_estimate(&fam, x, 24, &default_window_frac(), Caps::default()).unwrap();
                assert!(set.estimate >= p.estimate);
            }
        }
    }
}

#[test]
fn periodic_proxies_converge_as_the_window_moves() {
    // for "01"×k on 1/3 the proxy is within 1/lo of 1/(2k) for every nMax
    let third = stream(&rat(1, 3));
    for k in [1usize, 2, 4] {
        let fam = [NamedFst::new("p", make_periodic_decoder(&[0, 1], k, Base::BINARY).unwrap())];
        for n_max in [16usize, 32, 64, 128] {
            let r = dim_point_estimate(&fam, &third, n_max, &default_window_frac(), Caps::default()).unwrap();
            let limit = rat(1, 2 * k as i64);
            let gap = (&r.estimate - &limit).abs();
            assert!(gap <= BigRational::new(BigInt::one(), r.window.lo.into()), "k={k} nmax={n_max}");
        }
    }
}

#[test]
fn estimates_with_identity_stay_at_most_one() {
    let fam = small_family();
    for x in test_points() {
        let r = dim_point_estimate(&fam, &x, 30, &default_window_frac(), Caps::default()).unwrap();
        assert!(r.estimate >= BigRational::zero());
        assert!(r.estimate <= BigRational::one() + rat(1, r.window.lo as i64));
    }
}

#[test]
fn kt_of_empty_word_is_free_for_every_small_machine() {
    let mut count = 0;
    enumerate_all(Base::BINARY, 4, |outs| {
        // a one-state machine whose outputs are read off `outs`
        let split = outs.len() / 2;
        let (a, b) = (outs[..split].to_vec(), outs[split..].to_vec());
        let t = Fst::from_tables(Base::BINARY, 0, vec![0, 0], vec![a, b]).unwrap();
        let r = kt(&t, &[], 0).unwrap();
        assert_eq!((r.status, r.cost), (Status::Found, 0));
        count += 1;
    });
    assert_eq!(count, 31);
}
