use causal_lab::conditions::{
    check_a1, check_ce_at_k, check_ns, evaluate_conditions, find_ns_witness, make_abc_scenario, validate,
};
use causal_lab::measure::combine;
use causal_lab::protocol::{abc_lattice, construct_protocol, simulate_signalling, single_senders};
use causal_lab::transport::{check_ce, Method};
use causal_lab::{Exact, Region, SliceMeasure};
use proptest::prelude::*;

fn fraction() -> impl Strategy<Value = Exact> {
    (1i128..=12).prop_flat_map(|d| (0..=d).prop_map(move |n| Exact::new(n, d)))
}

fn atoms(max: usize, time: f64) -> impl Strategy<Value = SliceMeasure> {
    prop::collection::btree_map(-20i32..20, 1u32..50, 1..=max).prop_map(move |m| {
        let total: u32 = m.values().sum();
        let atoms = m
            .into_iter()
            .map(|(x, w)| (vec![x as f64 * 0.25], w as f64 / total as f64))
            .collect();
        SliceMeasure::from_atoms(time, atoms).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn abc_checkers_match_the_algebra(a in fraction(), b in fraction(), c in fraction()) {
        let sc = make_abc_scenario(a, b, c).unwrap();
        let r = evaluate_conditions(&sc, Method::Maxflow).unwrap();
        let two = Exact::from_integer(2);
        let one = Exact::from_integer(1);
        prop_assert_eq!(r.ns, two * a == b + c);
        prop_assert_eq!(r.a1, b == one);
        prop_assert_eq!(r.a2, two * a == one + c);
        prop_assert_eq!(r.ce, two * a >= one);
        prop_assert!(r.diagnostics.is_empty());
    }

    #[test]
    fn a1_without_ce_breaks_ns(a in fraction(), b in fraction(), c in fraction()) {
        let sc = make_abc_scenario(a, b, c).unwrap();
        if check_a1(&sc).unwrap() && !check_ce_at_k(&sc).unwrap() {
            prop_assert!(!check_ns(&sc).unwrap());
            let w = find_ns_witness(&sc).unwrap().expect("witness");
            prop_assert!(sc.nu1.mass(&w).unwrap() < sc.nu0.mass(&w).unwrap());
        }
    }

    #[test]
    fn total_probability_is_rebuilt(a in fraction(), b in fraction(), c in fraction()) {
        let sc = make_abc_scenario(a, b, c).unwrap();
        let q = Exact::from_integer(1) - sc.p_plus;
        let mix = combine(sc.p_plus, &sc.nu_plus, q, &sc.nu_minus).unwrap();
        prop_assert_eq!(mix, sc.nu1.clone());
        prop_assert!(validate(&sc).is_empty());
    }

    #[test]
    fn identical_slices_always_hold(m in atoms(12, 0.0)) {
        for method in [Method::Maxflow, Method::Bruteforce] {
            let v = check_ce(&m, &m, &causal_lab::CausalStructure::natural(1), method).unwrap();
            prop_assert!(v.holds);
            prop_assert!(v.deficit.abs() <= 1e-9);
        }
    }

    #[test]
    fn mass_is_monotone(m in atoms(12, 0.0), lo in -6.0..6.0f64, w in 0.0..4.0f64, grow in 0.0..2.0f64) {
        let inner = Region::interval(lo, lo + w);
        let outer = Region::interval(lo - grow, lo + w + grow);
        prop_assert!(m.mass(&inner).unwrap() <= m.mass(&outer).unwrap() + 1e-15);
    }

    #[test]
    fn mass_is_additive(m in atoms(12, 0.0), cut in -6.0..6.0f64) {
        // split at a point between atoms so the pieces are disjoint
        let cut = (cut * 4.0).floor() / 4.0 + 0.125;
        let left = m.mass(&Region::interval(-10.0, cut)).unwrap();
        let right = m.mass(&Region::interval(cut, 10.0)).unwrap();
        prop_assert!((left + right - m.mass(&Region::interval(-10.0, 10.0)).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn renormalised_restriction_is_idempotent(m in atoms(12, 0.0), lo in -6.0..2.0f64, w in 0.5..6.0f64) {
        let k = Region::interval(lo, lo + w);
        if let Ok(once) = m.restrict_and_renormalize(&k) {
            let twice = once.restrict_and_renormalize(&k).unwrap();
            for (a, b) in once.units().iter().zip(twice.units()) {
                prop_assert!((a.weight - b.weight).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn a_single_covering_sender_is_found() {
    let sc = make_abc_scenario(Exact::from_integer(0), Exact::from_integer(1), Exact::from_integer(1)).unwrap();
    let w = find_ns_witness(&sc).unwrap().unwrap();
    let lattice = abc_lattice();
    let proto = construct_protocol(&sc, &w, &lattice).unwrap();
    let singles = single_senders(&sc.k, &proto.q, proto.s, &lattice, &sc.cs).unwrap();
    assert!(!singles.is_empty());
    assert_eq!(proto.k_count(), 1);
    assert!(singles.contains(&proto.senders[0]));
}

#[test]
fn signalling_error_within_hoeffding_envelope() {
    let sc = make_abc_scenario(Exact::from_integer(0), Exact::from_integer(1), Exact::from_integer(1)).unwrap();
    let w = find_ns_witness(&sc).unwrap().unwrap();
    let base = construct_protocol(&sc, &w, &abc_lattice()).unwrap();
    for (p0, p1) in [(0.6, 0.4), (0.55, 0.45), (0.9, 0.3)] {
        let mut proto = base.clone();
        proto.nu0_c = p0;
        proto.nu1_c = p1;
        proto.channel_gap = p0 - p1;
        for n in [1, 4, 16, 64] {
            let s = simulate_signalling(&proto, 20_000, n, 9).unwrap();
            let g: f64 = p0 - p1;
            let bound = (-(n as f64) * g * g / 2.0).exp();
            assert!(s.error_rate <= bound + 3.0 * s.stderr, "gap {g} n {n}: {} > {bound}", s.error_rate);
        }
    }
}
