use std::collections::{BTreeSet, HashSet};

use mlix_core::{
    brute_force_retrieve, select_designated, select_maximum, select_minimum, select_original, Deployment, IndexModel,
    InputSimilarMembers, KeyMembers, KeySelector, KeyStrategy, ParamSet, ParameterId, Service,
};
use proptest::prelude::*;

const UNIVERSE: u32 = 12;

fn service_sets() -> impl Strategy<Value = Vec<(Vec<u32>, Vec<u32>)>> {
    let one = (
        prop::collection::btree_set(0..UNIVERSE, 1..4),
        prop::collection::btree_set(0..UNIVERSE, 0..3),
    )
        .prop_map(|(i, o)| (i.into_iter().collect(), o.into_iter().collect()));
    prop::collection::vec(one, 0..60)
}

fn services(sets: &[(Vec<u32>, Vec<u32>)]) -> Vec<Service> {
    sets.iter()
        .enumerate()
        .map(|(i, (ins, outs))| Service::new(i as u64, ins.iter().copied(), outs.iter().copied()).unwrap())
        .collect()
}

fn build(deployment: Deployment, strategy: KeyStrategy, seed: u64, services: &[Service]) -> IndexModel {
    let mut idx = IndexModel::new(deployment, UNIVERSE as usize);
    let mut sel = KeySelector::new(strategy, seed);
    for s in services {
        idx.add_service(s.clone(), &mut sel).unwrap();
    }
    idx
}

fn request() -> impl Strategy<Value = ParamSet> {
    prop::collection::btree_set(0..UNIVERSE, 0..8).prop_map(ParamSet::from_unsorted)
}

/// Walks the whole structure, checks the quotient and key-membership
/// properties, and returns recomputed (|S|, |R2|, |R1|, |K|).
fn walk(idx: &IndexModel) -> (usize, usize, usize, usize) {
    let mut seen = HashSet::new();
    let mut input_sets = HashSet::new();
    let mut pairs = HashSet::new();
    let (mut r2, mut r1) = (0, 0);
    let mut last_key = None;
    for class in idx.directory().iter() {
        assert!(last_key < Some(class.key()), "directory out of order");
        last_key = Some(class.key());
        assert!(!class.is_empty());
        match class.members() {
            KeyMembers::Services(ids) => {
                assert_eq!(idx.deployment(), Deployment::Primary);
                for id in ids {
                    assert!(idx.service(*id).unwrap().inputs().contains(class.key()));
                    assert!(seen.insert(*id), "service {id} reachable twice");
                }
            }
            KeyMembers::InputSimilar(iscs) => {
                assert_ne!(idx.deployment(), Deployment::Primary);
                for isc in iscs {
                    r2 += 1;
                    assert!(isc.inputs().contains(class.key()));
                    assert!(
                        input_sets.insert(isc.inputs().clone()),
                        "input set repeated across classes"
                    );
                    let mut count = 0;
                    match isc.members() {
                        InputSimilarMembers::Services(ids) => {
                            assert_eq!(idx.deployment(), Deployment::Partial);
                            for id in ids {
                                assert_eq!(idx.service(*id).unwrap().inputs(), isc.inputs());
                                assert!(seen.insert(*id));
                                count += 1;
                            }
                        }
                        InputSimilarMembers::Similar(scs) => {
                            assert_eq!(idx.deployment(), Deployment::Full);
                            for sc in scs {
                                r1 += 1;
                                assert!(!sc.members().is_empty());
                                assert!(pairs.insert((isc.inputs().clone(), sc.outputs().clone())));
                                for id in sc.members() {
                                    let s = idx.service(*id).unwrap();
                                    assert_eq!(s.inputs(), isc.inputs());
                                    assert_eq!(s.outputs(), sc.outputs());
                                    assert!(seen.insert(*id));
                                    count += 1;
                                }
                            }
                        }
                    }
                    assert_eq!(count, isc.service_count());
                }
            }
        }
    }
    assert_eq!(seen.len(), idx.services().len());
    (seen.len(), r2, r1, idx.directory().len())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn structure_and_counts(sets in service_sets(), seed in any::<u64>()) {
        let services = services(&sets);
        for d in Deployment::ALL {
            for k in KeyStrategy::ALL {
                let mut idx = IndexModel::new(d, UNIVERSE as usize);
                let mut sel = KeySelector::new(k, seed);
                let mut prev = idx.stats();
                for s in &services {
                    let report = idx.add_service(s.clone(), &mut sel).unwrap();
                    prop_assert!(report.key_directory_comparisons <= report.parameter_comparisons);
                    prop_assert!(s.inputs().contains(report.key));
                    let now = idx.stats();
                    prop_assert_eq!(now.service_count, prev.service_count + 1);
                    prop_assert!(now.key_count - prev.key_count <= 1);
                    prop_assert!(now.input_similar_count - prev.input_similar_count <= 1);
                    prop_assert!(now.similar_count - prev.similar_count <= 1);
                    prop_assert_eq!(now.key_count > prev.key_count, report.created.key_class);
                    prev = now;
                }
                let stats = idx.stats();
                let (s, r2, r1, keys) = walk(&idx);
                prop_assert_eq!(stats.service_count, s);
                prop_assert_eq!(stats.input_similar_count, r2);
                prop_assert_eq!(stats.similar_count, r1);
                prop_assert_eq!(stats.key_count, keys);
                prop_assert!(stats.key_count <= stats.parameter_count);
                if d != Deployment::Primary {
                    prop_assert!(stats.key_count <= stats.input_similar_count);
                    prop_assert!(stats.input_similar_count <= stats.service_count);
                }
                if d == Deployment::Full {
                    prop_assert!(stats.input_similar_count <= stats.similar_count);
                    prop_assert!(stats.similar_count <= stats.service_count);
                }
            }
        }
    }

    #[test]
    fn retrieval_matches_oracle(sets in service_sets(), requests in prop::collection::vec(request(), 1..6), seed in any::<u64>()) {
        let services = services(&sets);
        for d in Deployment::ALL {
            let mut per_method = Vec::new();
            for k in KeyStrategy::ALL {
                let idx = build(d, k, seed, &services);
                let mut results = Vec::new();
                for req in &requests {
                    let (found, report) = idx.retrieve(req.as_slice());
                    prop_assert_eq!(&found, &brute_force_retrieve(&services, req.as_slice()));
                    prop_assert!(report.results <= report.traversed_services);
                    prop_assert_eq!(report.results as usize, found.len());

                    let shadow: usize = req
                        .iter()
                        .filter_map(|p| idx.directory().get(*p))
                        .map(|c| c.service_count())
                        .sum();
                    prop_assert_eq!(report.traversed_services, shadow as u64);
                    let shadow_classes: usize = if d == Deployment::Primary {
                        0
                    } else {
                        req.iter().filter_map(|p| idx.directory().get(*p)).map(|c| c.len()).sum()
                    };
                    prop_assert_eq!(report.traversed_classes, shadow_classes as u64);
                    results.push(found);
                }
                per_method.push(results);
            }
            prop_assert!(per_method.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn scan_and_designated_build_the_same_partition(sets in service_sets()) {
        let services = services(&sets);
        for d in [Deployment::Partial, Deployment::Full] {
            let mut scan = IndexModel::new(d, UNIVERSE as usize);
            let mut direct = IndexModel::new(d, UNIVERSE as usize);
            let mut sel = KeySelector::designated();
            for s in &services {
                let a = scan.add_service_scan(s.clone(), &mut sel).unwrap();
                let b = direct.add_service_designated(s.clone()).unwrap();
                prop_assert!(b.parameter_comparisons <= a.parameter_comparisons);
                prop_assert_eq!(a.key, b.key);
                prop_assert_eq!(a.created, b.created);
            }
            prop_assert_eq!(scan.stats(), direct.stats());
            prop_assert_eq!(scan.partition(), direct.partition());
        }
    }

    #[test]
    fn selectors_return_an_input(inputs in prop::collection::btree_set(0..200u32, 1..12), seed in any::<u64>(), sets in service_sets()) {
        let inputs: Vec<ParameterId> = inputs.into_iter().map(ParameterId).collect();
        let services = services(&sets);
        for d in Deployment::ALL {
            let idx = build(d, KeyStrategy::Designated, seed, &services);
            for k in [
                select_designated(&inputs).unwrap(),
                select_original(&inputs, &idx).unwrap(),
                select_maximum(&inputs, &idx).unwrap(),
                select_minimum(&inputs, &idx).unwrap(),
                KeySelector::random(seed).select_random(&inputs).unwrap(),
            ] {
                prop_assert!(inputs.contains(&k));
            }
        }
    }

    #[test]
    fn designated_depends_only_on_the_set(raw in prop::collection::vec(0..500u32, 1..15)) {
        let forward = ParamSet::from_unsorted(raw.iter().copied());
        let backward = ParamSet::from_unsorted(raw.iter().rev().copied());
        prop_assert_eq!(select_designated(forward.as_slice()), select_designated(backward.as_slice()));
    }

    #[test]
    fn maximum_grows_keys_at_least_as_fast_as_minimum(sets in service_sets()) {
        let services = services(&sets);
        for d in Deployment::ALL {
            let max = build(d, KeyStrategy::Maximum, 0, &services);
            let min = build(d, KeyStrategy::Minimum, 0, &services);
            prop_assert!(max.stats().key_count >= min.stats().key_count);
        }
    }
}

#[test]
fn duplicate_ids_rejected_but_duplicate_content_clusters() {
    for d in Deployment::ALL {
        let mut idx = IndexModel::new(d, 20);
        let mut sel = KeySelector::designated();
        idx.add_service(Service::new(1, [1u32, 2], [3u32]).unwrap(), &mut sel)
            .unwrap();
        assert!(idx
            .add_service(Service::new(1, [4u32], [3u32]).unwrap(), &mut sel)
            .is_err());
        idx.add_service(Service::new(2, [1u32, 2], [3u32]).unwrap(), &mut sel)
            .unwrap();
        let s = idx.stats();
        assert_eq!(s.service_count, 2);
        assert_eq!(s.key_count, 1);
        if d != Deployment::Primary {
            assert_eq!(s.input_similar_count, 1);
        }
        if d == Deployment::Full {
            assert_eq!(s.similar_count, 1);
        }
    }
}

#[test]
fn attributes_do_not_affect_clustering() {
    let mut idx = IndexModel::new(Deployment::Full, 20);
    let mut sel = KeySelector::designated();
    let a = Service::new(1, [1u32, 2], [3u32])
        .unwrap()
        .with_attribute("qos", "gold");
    let b = Service::new(2, [1u32, 2], [3u32])
        .unwrap()
        .with_attribute("qos", "bronze");
    idx.add_service(a, &mut sel).unwrap();
    idx.add_service(b, &mut sel).unwrap();
    assert_eq!(idx.stats().similar_count, 1);
    assert_eq!(idx.service(1).unwrap().attributes["qos"], "gold");
}

#[test]
fn designated_position_is_near_uniform() {
    use rand::seq::index::sample;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    let c = 10;
    let mut counts = [0usize; 10];
    for _ in 0..20_000 {
        let set = ParamSet::from_unsorted(sample(&mut rng, 1000, c).into_iter().map(|i| i as u32));
        let key = select_designated(set.as_slice()).unwrap();
        let pos = set.iter().position(|&p| p == key).unwrap();
        counts[pos] += 1;
    }
    let max = *counts.iter().max().unwrap() as f64;
    let min = *counts.iter().min().unwrap() as f64;
    assert!(max / min <= 1.3, "{counts:?}");
}

#[test]
fn designated_join_scans_fewer_parameters_than_scan() {
    // 1,000 services, n = 10: the designated route should cost about a tenth
    // of the scanning route with the same selector.
    let spec = mlix_core::DatasetSpec {
        parameter_count: 1000,
        service_count: 1000,
        inputs_per_service: 10,
        outputs_per_service: 10,
        request_count: 0,
        request_size: 1,
        seed: 11,
    };
    let data = mlix_core::generate(&spec).unwrap();
    let mut scan = IndexModel::new(Deployment::Partial, 1000);
    let mut direct = IndexModel::new(Deployment::Partial, 1000);
    let mut sel = KeySelector::designated();
    let (mut scan_total, mut direct_total) = (0u64, 0u64);
    for s in &data.services {
        scan_total += scan
            .add_service_scan(s.clone(), &mut sel)
            .unwrap()
            .parameter_comparisons;
        direct_total += direct.add_service_designated(s.clone()).unwrap().parameter_comparisons;
    }
    let predicted = scan_total as f64 / 10.0;
    let rel = (direct_total as f64 - predicted).abs() / predicted;
    assert!(rel <= 0.30, "designated {direct_total}, scan {scan_total}");
}

#[test]
fn retrieval_of_unknown_parameters_is_empty() {
    let mut idx = IndexModel::new(Deployment::Partial, 20);
    idx.add_service(
        Service::new(1, [1u32, 2], [3u32]).unwrap(),
        &mut KeySelector::designated(),
    )
    .unwrap();
    let req: BTreeSet<u32> = [15, 16, 17].into();
    let req = ParamSet::from_unsorted(req);
    let (found, report) = idx.retrieve(req.as_slice());
    assert!(found.is_empty());
    assert_eq!(report.traversed_classes, 0);
}
