mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;

use subset_currents::currents::{
    area, boundary_of, boundary_projection, length_gc, length_sc, Multicurve,
};
use subset_currents::geometry::{classify, geodesic_length, holonomy_trace, HolonomyClass};
use subset_currents::graphs::{
    canonical_key, contains, finite_index_subgroups, fold, index, spanning_generators,
    subgroups_of_index, Index,
};
use subset_currents::mcg::{act_on_current, act_on_multicurve, orbit_ball, MappingClass};
use subset_currents::ribbon::{boundary_cycles, classify_boundary, BoundaryKind, RibbonOrder};
use subset_currents::words::{is_peripheral, reduce, Automorphism, Letter};
use subset_currents::{conj_class, Functional, OrbitConfig, RationalSubsetCurrent, SubgroupClass, Word};

fn word_strategy(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..2 * rank, 1..=max_len).prop_filter_map("trivial word", move |slots| {
        let w = reduce(slots.into_iter().map(Letter::from_slot), rank).ok()?;
        (!w.is_empty()).then_some(w)
    })
}

fn gens_strategy(rank: usize, max_gens: usize, max_len: usize) -> impl Strategy<Value = Vec<Word>> {
    prop::collection::vec(word_strategy(rank, max_len), 1..=max_gens)
}

fn auto_strategy() -> impl Strategy<Value = MappingClass> {
    any::<u64>().prop_map(|seed| random_mapping_class(&mut rng(seed), &torus(), 6))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reduce_is_idempotent(slots in prop::collection::vec(0usize..6, 0..30)) {
        let once = reduce(slots.iter().map(|&s| Letter::from_slot(s)), 3).unwrap();
        let twice = reduce(once.letters().iter().copied(), 3).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert!(once.letters().windows(2).all(|p| p[0] != p[1].inverse()));
    }

    #[test]
    fn conj_class_ignores_rotation_and_inversion(w in word_strategy(3, 16), k in 0usize..16) {
        let core = Word::from_letters(w.cyclic_core().iter().copied());
        let c = conj_class(&w).unwrap();
        prop_assert_eq!(&conj_class(&core.rotated(k)).unwrap(), &c);
        prop_assert_eq!(&conj_class(&w.inverse()).unwrap(), &c);
    }

    #[test]
    fn primitive_root_round_trip(w in word_strategy(2, 8), m in 1usize..4) {
        let c = conj_class(&w.pow(m)).unwrap();
        let (root, k) = c.primitive_root();
        prop_assert_eq!(conj_class(&root.word().pow(k)).unwrap(), c);
        prop_assert!(!root.is_primitive_power() || root.primitive_root().1 == 1);
        prop_assert_eq!(root.primitive_root().1, 1);
    }

    #[test]
    fn apply_is_a_homomorphism(
        u in word_strategy(2, 10),
        v in word_strategy(2, 10),
        phi in auto_strategy(),
        psi in auto_strategy(),
    ) {
        prop_assert_eq!(phi.apply(&u.mul(&v)), phi.apply(&u).mul(&phi.apply(&v)));
        prop_assert_eq!(phi.compose(&psi).apply(&u), phi.apply(&psi.apply(&u)));
        prop_assert_eq!(phi.apply(&u.inverse()), phi.apply(&u).inverse());
    }

    #[test]
    fn folding_is_confluent(mut gens in gens_strategy(3, 4, 8), seed in any::<u64>()) {
        let g = fold(3, &gens).unwrap();
        for w in &gens {
            prop_assert!(contains(&g, w));
        }
        let mut r = rng(seed);
        for i in (1..gens.len()).rev() {
            gens.swap(i, r.gen_range(0..=i));
        }
        let h = fold(3, &gens).unwrap();
        prop_assert_eq!(canonical_key(&g.core()), canonical_key(&h.core()));
        prop_assert!(g.is_folded());
    }

    #[test]
    fn key_invariant_under_relabeling(gens in gens_strategy(2, 3, 10), seed in any::<u64>()) {
        let g = fold(2, &gens).unwrap().core();
        let mut perm: Vec<usize> = (0..g.vertex_count()).collect();
        let mut r = rng(seed);
        for i in (1..perm.len()).rev() {
            perm.swap(i, r.gen_range(0..=i));
        }
        prop_assert_eq!(canonical_key(&g), canonical_key(&g.relabel(&perm)));
    }

    #[test]
    fn spanning_generators_refold(gens in gens_strategy(2, 3, 10)) {
        let g = fold(2, &gens).unwrap();
        let basis = spanning_generators(&g);
        prop_assert_eq!(basis.len(), g.subgroup_rank());
        let h = fold(2, &basis).unwrap();
        prop_assert_eq!(canonical_key(&g.core()), canonical_key(&h.core()));
    }

    #[test]
    fn ribbon_boundary_is_consistent(rank in 2usize..=4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let gens = random_gens(&mut r, rank, 3, 12);
        let g = fold(rank, &gens).unwrap().core();
        let cycles = boundary_cycles(&g, &RibbonOrder::standard(rank));
        prop_assert_eq!(cycles.iter().map(Word::len).sum::<usize>(), 2 * g.edge_count());
        let twice_genus = 2 - cycles.len() as i64 - g.euler_characteristic();
        prop_assert!(twice_genus >= 0 && twice_genus % 2 == 0);
    }

    #[test]
    fn cyclic_subgroups_bound_annuli(w in word_strategy(3, 12)) {
        let g = fold(3, &[w]).unwrap().core();
        let cycles = boundary_cycles(&g, &RibbonOrder::standard(3));
        prop_assert_eq!(cycles.len(), 2);
        prop_assert_eq!(conj_class(&cycles[0]).unwrap(), conj_class(&cycles[1]).unwrap());
        // Mutually inverse as oriented cyclic words.
        let inv = cycles[1].inverse();
        let n = inv.len();
        prop_assert!((0..n).any(|k| inv.rotated(k) == cycles[0]));
    }

    #[test]
    fn trace_is_a_class_function(w in word_strategy(2, 20), u in word_strategy(2, 8)) {
        let s = torus();
        let conj = u.mul(&w).mul(&u.inverse());
        prop_assert_eq!(holonomy_trace(&conj, &s), holonomy_trace(&w, &s));
        prop_assert_eq!(holonomy_trace(&w.inverse(), &s), holonomy_trace(&w, &s));
    }

    #[test]
    fn length_is_linear_in_powers(w in word_strategy(2, 10), m in 1usize..5) {
        let s = torus();
        let c = conj_class(&w).unwrap();
        if is_peripheral(&c, &s).is_none() {
            let (root, k) = c.primitive_root();
            let base = geodesic_length(&root, &s).unwrap();
            let l = geodesic_length(&c.pow(m), &s).unwrap();
            prop_assert!((l - (k * m) as f64 * base).abs() <= 1e-9 * l.max(1.0));
        }
    }

    #[test]
    fn boundary_projection_is_linear(
        seed in any::<u64>(),
        p in 1i64..7, q in 1i64..7,
    ) {
        let s = torus();
        let mut r = rng(seed);
        let e1 = RationalSubsetCurrent::single(random_subgroup(&mut r, &s, 3, 8));
        let e2 = RationalSubsetCurrent::single(random_subgroup(&mut r, &s, 3, 8));
        let (p, q) = (subset_currents::Weight::from_integer(p.into()), subset_currents::Weight::new(q.into(), 3.into()));
        let lhs = boundary_projection(&e1.scale(&p).plus(&e2.scale(&q)), &s).unwrap();
        let rhs = boundary_projection(&e1, &s).unwrap().scale(&p)
            .plus(&boundary_projection(&e2, &s).unwrap().scale(&q));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn area_vanishes_exactly_on_geodesic_currents(seed in any::<u64>()) {
        let s = torus();
        let mut r = rng(seed);
        let mut eta = RationalSubsetCurrent::zero();
        for _ in 0..r.gen_range(1..=3) {
            eta.add(random_subgroup(&mut r, &s, 2, 6), random_weight(&mut r));
        }
        let a = area(&eta);
        prop_assert_eq!(a.exact_chi == subset_currents::Weight::from_integer(0.into()), eta.is_geodesic_current());
        prop_assert_eq!(a.value == 0.0, eta.is_geodesic_current());
    }

    #[test]
    fn lsc_factors_through_b(seed in any::<u64>()) {
        let s = torus();
        let mut r = rng(seed);
        let eta = RationalSubsetCurrent::single(random_subgroup(&mut r, &s, 3, 8));
        let two_step = length_gc(&boundary_projection(&eta, &s).unwrap(), &s).unwrap();
        prop_assert_eq!(length_sc(&eta, &s).unwrap().to_bits(), two_step.to_bits());
    }

    #[test]
    fn action_laws(seed in any::<u64>(), phi in auto_strategy(), psi in auto_strategy()) {
        let s = torus();
        let mut r = rng(seed);
        let eta = RationalSubsetCurrent::single(random_subgroup(&mut r, &s, 3, 8));
        let lhs = act_on_current(&phi.compose(&psi), &eta).unwrap();
        let rhs = act_on_current(&phi, &act_on_current(&psi, &eta).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(act_on_current(&MappingClass::identity(2), &eta).unwrap(), eta);
    }
}

#[test]
fn classify_agrees_with_peripherality() {
    let s = torus();
    let mut r = rng(11);
    for _ in 0..500 {
        let w = random_word(&mut r, 2, 20);
        let c = conj_class(&w).unwrap();
        let parabolic = classify(&w, &s).unwrap() == HolonomyClass::Parabolic;
        assert_eq!(parabolic, is_peripheral(&c, &s).is_some(), "{w}");
    }
    for p in ["abAB", "BAba", "abABabAB", "bABa"] {
        let w = Word::parse(p, 2).unwrap();
        assert_eq!(classify(&w, &s).unwrap(), HolonomyClass::Parabolic);
    }
}

#[test]
fn length_monotone_in_trace() {
    let s = torus();
    let mut r = rng(12);
    let mut pts = Vec::new();
    while pts.len() < 300 {
        let c = conj_class(&random_word(&mut r, 2, 14)).unwrap();
        if let Ok(l) = geodesic_length(&c, &s) {
            pts.push((holonomy_trace(c.word(), &s).to_f64().abs(), l));
        }
    }
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    assert!(pts.windows(2).all(|p| p[0].1 <= p[1].1 + 1e-12));
}

#[test]
fn index_determines_shape() {
    for n in 1..=3usize {
        for k in 1..=4 {
            for g in subgroups_of_index(n, k).unwrap() {
                assert_eq!(index(&g), Index::Finite(k));
                assert_eq!(g.vertex_count(), k);
                assert_eq!(g.subgroup_rank(), k * (n - 1) + 1);
            }
        }
    }
}

#[test]
fn low_index_matches_hall() {
    for n in 1..=3u32 {
        for k in 1..=4usize {
            assert_eq!(
                subgroups_of_index(n as usize, k).unwrap().len() as u128,
                hall_count(n, k),
                "n={n} k={k}"
            );
        }
    }
}

#[test]
fn covers_scale_vertices_and_edges() {
    let s = torus();
    let mut r = rng(13);
    for _ in 0..30 {
        let h = random_subgroup(&mut r, &s, 2, 6);
        let k = r.gen_range(1..=3);
        for c in finite_index_subgroups(&h, k).unwrap() {
            assert_eq!(c.graph().vertex_count(), k * h.graph().vertex_count());
            assert_eq!(c.graph().edge_count(), k * h.graph().edge_count());
        }
    }
}

#[test]
fn canonical_key_is_complete() {
    let mut r = rng(14);
    for i in 0..200 {
        let g = fold(2, &random_gens(&mut r, 2, 3, 6)).unwrap().core();
        let h = if i % 2 == 0 {
            let mut perm: Vec<usize> = (0..g.vertex_count()).collect();
            for j in (1..perm.len()).rev() {
                perm.swap(j, r.gen_range(0..=j));
            }
            g.relabel(&perm)
        } else {
            fold(2, &random_gens(&mut r, 2, 3, 6)).unwrap().core()
        };
        assert_eq!(
            canonical_key(&g) == canonical_key(&h),
            brute_isomorphic(&g, &h),
            "pair {i}"
        );
    }
}

#[test]
fn complete_covers_have_cusp_boundary() {
    let s = torus();
    for k in 1..=4 {
        for g in subgroups_of_index(2, k).unwrap() {
            let rep = classify_boundary(&g.core(), &s.ribbon, &s).unwrap();
            assert!(rep.all_cusps());
            assert_eq!(rep.cycles.iter().map(|c| c.power).sum::<usize>(), k * s.cusps);
        }
    }
}

#[test]
fn cover_boundaries_project_with_degree_k() {
    let s = torus();
    let mut r = rng(15);
    for _ in 0..20 {
        let h = random_subgroup(&mut r, &s, 2, 6);
        let k = r.gen_range(2..=3);
        let base = boundary_of(&h, &s).unwrap();
        for c in finite_index_subgroups(&h, k).unwrap() {
            let rep = boundary_of(&c, &s).unwrap();
            for cyc in base.cycles.iter() {
                let degree: usize = rep
                    .cycles
                    .iter()
                    .filter(|x| x.class == cyc.class)
                    .map(|x| x.power)
                    .sum();
                let copies = base.cycles.iter().filter(|x| x.class == cyc.class).map(|x| x.power).sum::<usize>();
                assert_eq!(degree, k * copies);
            }
        }
    }
}

#[test]
fn b_fixes_multicurves() {
    let s = torus();
    let mut r = rng(16);
    for _ in 0..50 {
        let mut m = Multicurve::zero();
        for _ in 0..r.gen_range(1..=4) {
            let c = conj_class(&random_word(&mut r, 2, 10)).unwrap();
            if is_peripheral(&c, &s).is_none() {
                m.add(&c, &random_weight(&mut r));
            }
        }
        let eta = RationalSubsetCurrent::from_multicurve(&m, &s).unwrap();
        assert_eq!(boundary_projection(&eta, &s).unwrap(), m);
    }
}

#[test]
fn equivariance_and_area_invariance() {
    let s = torus();
    let mut r = rng(17);
    for _ in 0..60 {
        let phi = random_mapping_class(&mut r, &s, 6);
        let eta = RationalSubsetCurrent::single(random_subgroup(&mut r, &s, 3, 8));
        let moved = act_on_current(&phi, &eta).unwrap();
        assert_eq!(
            boundary_projection(&moved, &s).unwrap(),
            act_on_multicurve(&phi, &boundary_projection(&eta, &s).unwrap())
        );
        assert_eq!(area(&moved).exact_chi, area(&eta).exact_chi);
    }
}

#[test]
fn automorphism_check() {
    let swap = Automorphism::new(vec![Word::parse("b", 2).unwrap(), Word::parse("a", 2).unwrap()], "swap");
    assert!(swap.is_automorphism());
    let square = Automorphism::new(vec![Word::parse("aa", 2).unwrap(), Word::parse("b", 2).unwrap()], "sq");
    assert!(!square.is_automorphism());
}

#[test]
fn balls_are_monotone_and_margin_stable() {
    let s = torus();
    let seed = RationalSubsetCurrent::single(
        SubgroupClass::from_generators(&[w("aa"), w("b")], &s).unwrap(),
    );
    let small = orbit_ball(&seed, &OrbitConfig::new(Functional::LSC, 12.0), &s).unwrap();
    let big = orbit_ball(&seed, &OrbitConfig::new(Functional::LSC, 20.0), &s).unwrap();
    assert!(small.frontier_exhausted && big.frontier_exhausted);
    assert!(small.keys().is_subset(&big.keys()));
    let wide = orbit_ball(&seed, &OrbitConfig::new(Functional::LSC, 20.0).margin(2.0), &s).unwrap();
    assert_eq!(big.keys(), wide.keys());
}

#[test]
fn fibers_are_saturated() {
    let s = torus();
    let seed = RationalSubsetCurrent::single(
        SubgroupClass::from_generators(&[w("aa"), w("b")], &s).unwrap(),
    );
    let ball = orbit_ball(&seed, &OrbitConfig::new(Functional::LSC, 20.0), &s).unwrap();
    let hist = subset_currents::census::fiber_histogram(&ball).unwrap();
    assert_eq!(hist.len(), 1, "{hist:?}");

    let cyclic = RationalSubsetCurrent::single(SubgroupClass::from_generators(&[w("a")], &s).unwrap());
    let ball = orbit_ball(&cyclic, &OrbitConfig::new(Functional::LSC, 8.0), &s).unwrap();
    let hist = subset_currents::census::fiber_histogram(&ball).unwrap();
    assert_eq!(hist.keys().copied().collect::<Vec<_>>(), vec![1]);

    let cover = RationalSubsetCurrent::single(
        SubgroupClass::from_generators(&[w("a"), w("bb"), w("baB")], &s).unwrap(),
    );
    let ball = orbit_ball(&cover, &OrbitConfig::new(Functional::AREA, 20.0), &s).unwrap();
    assert!(matches!(
        subset_currents::census::fiber_histogram(&ball),
        Err(subset_currents::Error::LemmaHypothesis(_))
    ));
}

#[test]
fn census_counts_are_monotone() {
    let s = torus();
    let t = subset_currents::census::scc_census(&s, 12.0, &subset_currents::census::uniform_grid(12.0, 24)).unwrap();
    assert!(t.is_monotone());
    let t = subset_currents::census::mlz_census(&s, 12.0, &subset_currents::census::uniform_grid(12.0, 24)).unwrap();
    assert!(t.is_monotone());
}

#[test]
fn cusp_kinds_follow_peripherality() {
    let s = torus();
    let mut r = rng(18);
    for _ in 0..100 {
        let h = random_subgroup(&mut r, &s, 3, 8);
        for c in boundary_of(&h, &s).unwrap().cycles {
            let peripheral = is_peripheral(&c.class, &s).is_some();
            assert_eq!(c.kind == BoundaryKind::Cusp, peripheral);
        }
    }
}
