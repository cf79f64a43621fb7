#![no_main]

//! Decodes bytes into a small service sequence plus requests, builds every
//! deployment with every key method and checks retrieval against the
//! exhaustive oracle.

use libfuzzer_sys::fuzz_target;
use mlix_core::{brute_force_retrieve, Deployment, IndexModel, KeySelector, KeyStrategy, ParamSet, Service};

const UNIVERSE: u32 = 16;

fn set(mask: u16) -> ParamSet {
    ParamSet::from_unsorted((0..UNIVERSE).filter(|b| mask & (1 << b) != 0))
}

fuzz_target!(|data: &[u8]| {
    let Some((&seed, rest)) = data.split_first() else {
        return;
    };
    let words: Vec<u16> = rest.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect();
    let (service_words, request_words) = words.split_at(words.len() * 3 / 4);

    let services: Vec<Service> = service_words
        .chunks_exact(2)
        .enumerate()
        .filter_map(|(i, w)| Service::from_sets(i as u64, set(w[0]), set(w[1])).ok())
        .collect();
    let requests: Vec<ParamSet> = request_words.iter().map(|&w| set(w)).collect();

    for deployment in Deployment::ALL {
        for strategy in KeyStrategy::ALL {
            let mut index = IndexModel::new(deployment, UNIVERSE as usize);
            let mut selector = KeySelector::new(strategy, u64::from(seed));
            for s in &services {
                let report = index.add_service(s.clone(), &mut selector).unwrap();
                assert!(s.inputs().contains(report.key));
                assert!(report.key_directory_comparisons <= report.parameter_comparisons);
            }
            assert_eq!(index.stats().service_count, services.len());
            for r in &requests {
                let (found, report) = index.retrieve(r.as_slice());
                assert_eq!(found, brute_force_retrieve(&services, r.as_slice()));
                assert!(report.results <= report.traversed_services);
            }
        }
    }
});
