mod common;

use std::collections::BTreeSet;

use genv::action::{ergodicity_of_maps, ergodicity_report, koopman};
use genv::constructions::build_construction;
use genv::discretize::SystemSpec;
use genv::envelope::{close, pseudoisometry_certificate, transition_maps, CloseOptions, FiberMap, MetricConstruction};
use genv::fourier::{characters, decompose_report, invariant_sections, project, Component};
use genv::groupoid::{group_bundle, isotropy, orbit_relation, transitive, validate_groupoid};
use genv::io::to_canonical_string;
use genv::measures::{construct_rim, construct_rim_from, validate_rim};
use genv::sample::{mutate_product, random_group, random_groupoid};
use genv::{Error, FiberedFunction, FiberedSpace, FiniteGroup};
use num::Complex;
use proptest::prelude::*;
use rand::Rng;
use serde_json::json;

use common::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cfg(128))]

    #[test]
    fn sampled_groupoids_validate_and_mutations_are_caught(seed in any::<u64>(), size in 3usize..=30) {
        let mut r = rng(seed);
        let g = random_groupoid(&mut r, size);
        prop_assert!(validate_groupoid(g.table()).unwrap().is_valid());
        let (bad, at) = mutate_product(&mut r, &g);
        let flagged = validate_groupoid(&bad).map(|rep| !rep.is_valid()).unwrap_or(true);
        prop_assert!(flagged, "mutation at {:?} slipped through", at);
    }

    #[test]
    fn orbit_counts_of_transitive_groupoids_and_bundles(seed in any::<u64>(), n in 1usize..=4, k in 1usize..=4) {
        let mut r = rng(seed);
        prop_assert_eq!(orbit_relation(&transitive(n, &random_group(&mut r, 6))).class_count(), 1);
        let groups: Vec<FiniteGroup> = (0..k).map(|_| random_group(&mut r, 6)).collect();
        prop_assert_eq!(orbit_relation(&group_bundle(&groups)).class_count(), k);
    }

    #[test]
    fn isotropy_is_closed_under_conjugation(seed in any::<u64>(), size in 3usize..=30) {
        let g = random_groupoid(&mut rng(seed), size);
        let iso: BTreeSet<usize> = isotropy(&g).original.into_iter().collect();
        for a in g.elements() {
            for &h in iso.iter().filter(|&&h| g.src(h) == g.rng(a)) {
                let c = g.product(g.inverse(a), g.product(h, a).unwrap()).unwrap();
                prop_assert!(iso.contains(&c));
                prop_assert_eq!(g.src(c), g.src(a));
            }
        }
    }

    #[test]
    fn koopman_is_multiplicative(seed in any::<u64>()) {
        let a = action(seed, 20, 40);
        let g = a.groupoid();
        for x in g.elements() {
            for y in g.elements() {
                if let Some(xy) = g.product(x, y) {
                    let (kx, ky, kxy) = (koopman(&a, x), koopman(&a, y), koopman(&a, xy));
                    prop_assert_eq!(&kx.matrix * &ky.matrix, kxy.matrix);
                }
            }
        }
    }

    #[test]
    fn fixed_space_matches_orbit_components(seed in any::<u64>()) {
        let a = action(seed, 20, 40);
        let space = a.space();
        let labels = components(space.point_count(), point_edges(space, &transition_maps(&a)));
        let rep = ergodicity_report(&a);
        prop_assert_eq!(rep.fixed_space_dim, count(&labels));
        let mut ours = rep.point_classes.clone();
        ours.sort();
        prop_assert_eq!(ours, classes_of(&labels));
    }

    #[test]
    fn class_indicators_are_fixed(seed in any::<u64>()) {
        let a = action(seed, 20, 40);
        let space = a.space();
        let rep = ergodicity_report(&a);
        for class in &rep.point_classes {
            let ind = |b: usize| -> Vec<i64> {
                space.fiber(b).iter().map(|x| class.contains(x) as i64).collect()
            };
            for g in a.groupoid().elements() {
                let k = koopman(&a, g);
                let v = ind(k.src_base);
                let moved: Vec<i64> = (0..k.matrix.nrows())
                    .map(|i| (0..v.len()).map(|j| k.matrix[(i, j)] * v[j]).sum())
                    .collect();
                prop_assert_eq!(moved, ind(k.dst_base));
            }
        }
    }

    #[test]
    fn relative_ergodicity_iff_invariant_sets_saturated(seed in any::<u64>()) {
        let a = action(seed, 12, 30);
        let space = a.space();
        let nk = space.point_count();
        let maps = transition_maps(&a);
        let mut all_saturated = true;
        for s in 0u32..(1 << nk) {
            let inside = |x: usize| s >> x & 1 == 1;
            let invariant = maps.iter().all(|m| {
                space.fiber(m.src()).iter().zip(m.image()).all(|(&x, &y)| !inside(x) || inside(y))
            });
            if !invariant {
                continue;
            }
            let hit: BTreeSet<usize> = (0..nk).filter(|&x| inside(x)).map(|x| space.q(x)).collect();
            if (0..nk).any(|x| hit.contains(&space.q(x)) && !inside(x)) {
                all_saturated = false;
                break;
            }
        }
        prop_assert_eq!(ergodicity_report(&a).relatively_topologically_ergodic, all_saturated);
    }

    #[test]
    fn closing_transitions_changes_nothing(seed in any::<u64>()) {
        let a = action(seed, 20, 40);
        let t = transition_maps(&a);
        let env = close(&t, a.space(), CloseOptions::default()).unwrap();
        prop_assert_eq!(env.maps(), t.as_slice());
        prop_assert!(env.classification().is_groupoid);
        let mut from_env = env.classification().orbit_classes.clone();
        from_env.sort();
        let mut from_action = ergodicity_report(&a).point_classes;
        from_action.sort();
        prop_assert_eq!(from_env, from_action);
        let cert = pseudoisometry_certificate(&env, a.space());
        prop_assert_eq!(cert.verdict, env.classification().all_injective);
    }
}

/// Small random actions with a few generators taken from the transition
/// set, so that ε-closure stays small.
fn eps_instance(seed: u64) -> (FiberedSpace, Vec<FiberMap>, f64, f64) {
    let a = action(seed, 9, 24);
    let t = transition_maps(&a);
    let mut r = rng(seed ^ 0x5eed);
    let k = r.random_range(1..=t.len().min(4));
    let gens: Vec<FiberMap> = (0..k).map(|_| t[r.random_range(0..t.len())].clone()).collect();
    let (e1, e2): (f64, f64) = (r.random_range(0.0..4.0), r.random_range(0.0..6.0));
    (a.space().clone(), gens, e1.min(e2), e1.max(e2))
}

fn close_capped(gens: &[FiberMap], space: &FiberedSpace, epsilon: f64) -> Option<genv::Envelope> {
    match close(gens, space, CloseOptions { epsilon, cap: 20_000 }) {
        Ok(e) => Some(e),
        Err(Error::CapExceeded { .. }) => None,
        Err(e) => panic!("{e}"),
    }
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn closure_is_idempotent_and_monotone_in_epsilon(seed in any::<u64>()) {
        let (space, gens, lo, hi) = eps_instance(seed);
        let (Some(small), Some(big)) = (close_capped(&gens, &space, lo), close_capped(&gens, &space, hi)) else {
            return Ok(());
        };
        prop_assert!(small.is_subset_of(&big));
        let again = close(big.maps(), &space, CloseOptions { epsilon: hi, cap: 20_000 }).unwrap();
        prop_assert_eq!(again.maps(), big.maps());
    }

    #[test]
    fn certificate_tracks_injectivity(seed in any::<u64>()) {
        let (space, gens, _, eps) = eps_instance(seed);
        let Some(env) = close_capped(&gens, &space, eps) else {
            return Ok(());
        };
        let c = env.classification();
        let cert = pseudoisometry_certificate(&env, &space);
        prop_assert_eq!(cert.verdict, c.all_injective);
        if c.is_groupoid {
            prop_assert_eq!(cert.construction, Some(MetricConstruction::Sup));
        }
        if c.is_transitive {
            prop_assert_eq!(c.is_groupoid, cert.verdict);
        }
        if cert.verdict {
            for m in env.maps() {
                for (&x, &mx) in space.fiber(m.src()).iter().zip(m.image()) {
                    for (&y, &my) in space.fiber(m.src()).iter().zip(m.image()) {
                        prop_assert_eq!(cert.value(&space, mx, my), cert.value(&space, x, y));
                    }
                }
            }
        }
    }

    #[test]
    fn rims_are_base_point_independent_and_valid(seed in any::<u64>()) {
        let a = action(seed, 20, 40);
        let space = a.space();
        let env = close(&transition_maps(&a), space, CloseOptions::default()).unwrap();
        let mut r = rng(seed);
        for c in 0..env.classification().orbit_classes.len() {
            let rim = construct_rim(&env, space, c).unwrap();
            let other = construct_rim_from(&env, space, c, |pts| pts[r.random_range(0..pts.len())]).unwrap();
            prop_assert_eq!(&rim, &other);
            let rep = validate_rim(&rim, &env, space);
            prop_assert!(rep.is_valid(), "{:?}", rep.violations);
            prop_assert!(rep.full_support);
        }
    }

    #[test]
    fn projections_commute_with_the_envelope(seed in any::<u64>()) {
        let a = action(seed, 20, 40);
        let space = a.space();
        let env = close(&transition_maps(&a), space, CloseOptions::default()).unwrap();
        let mut r = rng(seed);
        let nk = space.point_count();
        let random_fn = |r: &mut rand_chacha::ChaCha8Rng| {
            FiberedFunction::new((0..nk).map(|_| Complex::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect())
        };
        for c in 0..env.classification().orbit_classes.len() {
            let comp = Component::new(&env, space, c).unwrap();
            if characters(comp.isotropy_group()).is_err() {
                continue;
            }
            let sections = invariant_sections(&comp, space, None).unwrap();
            let rim = construct_rim(&env, space, c).unwrap();
            let sigma = random_fn(&mut r);
            let res = decompose_report(&comp, &sections, space, &rim, &sigma).unwrap();
            prop_assert!(res.within(1e-9), "{:?}", res);
            prop_assert!(res.orthogonality < 1e-12);

            let h: Vec<f64> = (0..space.base_count()).map(|_| r.random_range(-2.0..2.0)).collect();
            let scaled = FiberedFunction::new((0..nk).map(|x| sigma.values[x] * h[space.q(x)]).collect());
            for s in &sections {
                let p = project(&comp, s, space, &sigma).unwrap();
                prop_assert!((project(&comp, s, space, &p).unwrap().sup_distance(&p)) < 1e-12);
                let ph = project(&comp, s, space, &scaled).unwrap();
                let hp = FiberedFunction::new((0..nk).map(|x| p.values[x] * h[space.q(x)]).collect());
                prop_assert!(ph.sup_distance(&hp) < 1e-12);
                for theta in comp.arrows() {
                    let push = |f: &FiberedFunction| {
                        let mut out = FiberedFunction::zeros(nk);
                        for (&x, &y) in space.fiber(theta.src()).iter().zip(theta.image()) {
                            out.values[y] = f.values[x];
                        }
                        out
                    };
                    let lhs = project(&comp, s, space, &push(&sigma)).unwrap();
                    let rhs = push(&p);
                    let slot = comp.bases().iter().position(|&b| b == theta.dst()).unwrap();
                    for &x in comp.trace(slot) {
                        prop_assert!((lhs.values[x] - rhs.values[x]).norm() < 1e-12);
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(cfg(32))]

    #[test]
    fn systems_build_deterministically_with_bijective_fiber_maps(
        n in 3usize..=16,
        steps in proptest::collection::vec(0usize..16, 1..=4),
        q in 2usize..=12,
        p in 0usize..=12,
        points in 3usize..=15,
    ) {
        for spec in [
            json!({"kind": "disc", "steps": steps, "n": n}),
            json!({"kind": "rotation", "q": q, "p": p}),
            json!({"kind": "two_x_squared", "points": points}),
        ] {
            let spec = SystemSpec::from_value(&spec).unwrap();
            let sys = spec.build().unwrap();
            for g in &sys.generators {
                let checked = FiberMap::new(&sys.space, g.src(), g.dst(), g.image().to_vec()).unwrap();
                prop_assert!(checked.is_bijective(&sys.space), "{} in {}", g, sys.kind);
            }
            let again = spec.build().unwrap();
            prop_assert_eq!(
                to_canonical_string(&genv::io::system_json(&sys)),
                to_canonical_string(&genv::io::system_json(&again))
            );
        }
    }
}

#[test]
fn constructions_validate() {
    for v in [
        json!({"construction": "trivial", "units": 4}),
        json!({"construction": "pair", "n": 3}),
        json!({"construction": "group_bundle", "groups": [{"cyclic": 3}, {"symmetric": 3}]}),
        json!({"construction": "from_group_action", "group": {"cyclic": 4}, "action": [[0, 1, 2, 3], [1, 2, 3, 0], [2, 3, 0, 1], [3, 0, 1, 2]]}),
    ] {
        let g = build_construction(&v).unwrap();
        assert!(validate_groupoid(g.table()).unwrap().is_valid(), "{v}");
    }
}

#[test]
fn ergodicity_of_transition_maps_agrees_with_koopman_route() {
    for seed in 0..40 {
        let a = action(seed, 20, 40);
        let from_maps = ergodicity_of_maps(a.space(), &transition_maps(&a));
        assert_eq!(from_maps, ergodicity_report(&a));
    }
}
