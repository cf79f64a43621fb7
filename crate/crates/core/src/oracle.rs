//! Reference retrieval by exhaustive scan.

use std::collections::HashSet;

use crate::model::{ParameterId, Service, ServiceId};

/// Ids of every service whose input set is contained in `request`, in
/// ascending order. Checks each service directly; no index involved.
pub fn brute_force_retrieve(services: &[Service], request: &[ParameterId]) -> Vec<ServiceId> {
    let available: HashSet<ParameterId> = request.iter().copied().collect();
    let mut ids: Vec<ServiceId> = services
        .iter()
        .filter(|s| s.inputs().iter().all(|p| available.contains(p)))
        .map(|s| s.id)
        .collect();
    ids.sort_unstable();
    ids
}
