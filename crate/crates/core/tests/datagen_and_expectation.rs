use mlix_core::{
    expected_addition, expected_retrieval, generate, AdditionMethod, Dataset, DatasetSpec, Deployment,
    ExpectationInputs, IndexModel, KeySelector,
};
use proptest::prelude::*;

#[test]
fn input_frequencies_are_binomial() {
    let spec = DatasetSpec {
        request_count: 0,
        ..DatasetSpec::reference(3)
    };
    let data = generate(&spec).unwrap();
    let mut counts = vec![0usize; spec.parameter_count];
    for s in &data.services {
        for p in s.inputs() {
            counts[p.index()] += 1;
        }
    }
    let trials = (spec.service_count * spec.inputs_per_service) as f64;
    let prob = 1.0 / spec.parameter_count as f64;
    let mean = trials * prob;
    let sigma = (trials * prob * (1.0 - prob)).sqrt();
    assert_eq!(mean, 200.0);
    for (id, &c) in counts.iter().enumerate() {
        assert!((c as f64 - mean).abs() <= 4.0 * sigma, "parameter {id} drawn {c} times");
    }
    let outside = counts
        .iter()
        .filter(|&&c| (c as f64 - mean).abs() > 3.0 * sigma)
        .count();
    // about 0.27% of 1000 parameters fall outside 3 sigma
    assert!(outside <= 10, "{outside} parameters outside 3 sigma");
}

#[test]
fn reference_scale_input_sets_rarely_collide() {
    let data = generate(&DatasetSpec::reference(7)).unwrap();
    let mut idx = IndexModel::new(Deployment::Partial, 1000);
    let mut sel = KeySelector::designated();
    for s in &data.services {
        idx.add_service(s.clone(), &mut sel).unwrap();
    }
    let stats = idx.stats();
    assert_eq!(stats.service_count, 20_000);
    // C(1000, 10) is about 2.6e23, so the birthday bound over 2e8 pairs is
    // far below one expected collision.
    assert!(stats.input_similar_count >= 19_999, "{stats:?}");
    assert_eq!(data.spec.request_count, 100);
    assert!(data.requests.iter().all(|r| r.len() == 32));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn text_round_trip(p in 1usize..40, s in 0usize..30, n in 1usize..5, m in 1usize..5, rq in 0usize..5, r in 1usize..5, seed in any::<u64>()) {
        let spec = DatasetSpec {
            parameter_count: p.max(n).max(m).max(r),
            service_count: s,
            inputs_per_service: n,
            outputs_per_service: m,
            request_count: rq,
            request_size: r,
            seed,
        };
        let data = generate(&spec).unwrap();
        let text = data.to_text();
        let back = Dataset::parse(&text).unwrap();
        prop_assert_eq!(&back, &data);
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn expectation_identities(
        r in 0.0f64..100.0, n in 0.5f64..30.0, m in 0.0f64..30.0,
        p in 1.0f64..1e5, k in 1.0f64..1e5, r2 in 1.0f64..1e6, r1 in 0.0f64..1e6, s in 0.0f64..1e6,
    ) {
        let x = ExpectationInputs { r, n, m, parameters: p, services: s, keys: k, input_similar: r2, similar: r1 };
        let random = expected_addition(Deployment::Partial, AdditionMethod::Random, &x).unwrap();
        let designated = expected_addition(Deployment::Partial, AdditionMethod::Designated, &x).unwrap();
        prop_assert!((designated - random / n).abs() <= 1e-9 * designated.abs().max(1e-300));
        for method in [AdditionMethod::Random, AdditionMethod::Designated] {
            let full = expected_addition(Deployment::Full, method, &x).unwrap();
            let partial = expected_addition(Deployment::Partial, method, &x).unwrap();
            let want = r1 / r2 * m;
            prop_assert!((full - (partial + want)).abs() <= 1e-9 * full.abs());
        }
        // linear in r, independent of |K|
        let double = ExpectationInputs { r: 2.0 * r, keys: k + 17.0, ..x };
        for d in Deployment::ALL {
            let one = expected_retrieval(d, &x).unwrap();
            let two = expected_retrieval(d, &double).unwrap();
            prop_assert!((two - 2.0 * one).abs() <= 1e-9 * two.abs().max(1.0));
        }
    }
}
