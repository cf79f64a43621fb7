//! Domain types: parameters, services, the class hierarchy and the three
//! index deployments.
//!
//! An index is organised in up to four levels:
//!
//! * a *similar class* groups services with identical input and output sets,
//! * an *input-similar class* groups services (or similar classes) with
//!   identical input sets,
//! * a *key class* groups everything filed under one chosen input parameter,
//! * the *key directory* maps each key parameter to its key class.
//!
//! The primary deployment uses only the key levels, the partial deployment
//! adds input-similar classes and the full deployment adds similar classes
//! beneath those.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::IndexError;
use crate::setops::Cost;

/// Dense interned identifier of a parameter. Ascending numeric order is the
/// canonical parameter order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParameterId(pub u32);

impl ParameterId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ParameterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u32> for ParameterId {
    fn from(id: u32) -> Self {
        ParameterId(id)
    }
}

pub type ServiceId = u64;

/// Bidirectional mapping between parameter names and dense ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParameterTable {
    names: Vec<String>,
    ids: HashMap<String, ParameterId>,
}

impl ParameterTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Table holding `p0 .. p{count-1}` interned in order.
    pub fn generated(count: usize) -> Self {
        let mut table = Self::new();
        for i in 0..count {
            table.intern(&format!("p{i}"));
        }
        table
    }

    /// Returns the id of `name`, assigning the next dense id if unseen.
    pub fn intern(&mut self, name: &str) -> ParameterId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = ParameterId(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), id);
        id
    }

    pub fn lookup(&self, name: &str) -> Option<ParameterId> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: ParameterId) -> Option<&str> {
        self.names.get(id.index()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// A duplicate-free parameter set kept in ascending id order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamSet(Vec<ParameterId>);

impl ParamSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sorts and deduplicates arbitrary ids into canonical order.
    pub fn from_unsorted<I>(ids: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<ParameterId>,
    {
        let mut v: Vec<ParameterId> = ids.into_iter().map(Into::into).collect();
        v.sort_unstable();
        v.dedup();
        ParamSet(v)
    }

    /// Accepts `ids` only if already strictly ascending.
    pub fn from_sorted(ids: Vec<ParameterId>) -> Option<Self> {
        if ids.windows(2).all(|w| w[0] < w[1]) {
            Some(ParamSet(ids))
        } else {
            None
        }
    }

    pub fn as_slice(&self) -> &[ParameterId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: ParameterId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ParameterId> {
        self.0.iter()
    }
}

impl<'a> IntoIterator for &'a ParamSet {
    type Item = &'a ParameterId;
    type IntoIter = std::slice::Iter<'a, ParameterId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A service: input set, output set and opaque attributes. Attributes never
/// take part in clustering or retrieval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Service {
    pub id: ServiceId,
    inputs: ParamSet,
    outputs: ParamSet,
    pub attributes: BTreeMap<String, String>,
}

impl Service {
    /// Builds a service, canonicalising both parameter sets. Fails when the
    /// input set is empty.
    pub fn new<I, O>(id: ServiceId, inputs: I, outputs: O) -> Result<Self, IndexError>
    where
        I: IntoIterator,
        I::Item: Into<ParameterId>,
        O: IntoIterator,
        O::Item: Into<ParameterId>,
    {
        Self::from_sets(id, ParamSet::from_unsorted(inputs), ParamSet::from_unsorted(outputs))
    }

    pub fn from_sets(id: ServiceId, inputs: ParamSet, outputs: ParamSet) -> Result<Self, IndexError> {
        if inputs.is_empty() {
            return Err(IndexError::EmptyInputs(id));
        }
        Ok(Service {
            id,
            inputs,
            outputs,
            attributes: BTreeMap::new(),
        })
    }

    pub fn with_attribute(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.attributes.insert(key.into(), value.into());
        self
    }

    pub fn inputs(&self) -> &ParamSet {
        &self.inputs
    }

    pub fn outputs(&self) -> &ParamSet {
        &self.outputs
    }
}

/// Services sharing both the input set and the output set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarClass {
    pub(crate) outputs: ParamSet,
    pub(crate) members: Vec<ServiceId>,
}

impl SimilarClass {
    pub fn outputs(&self) -> &ParamSet {
        &self.outputs
    }

    pub fn members(&self) -> &[ServiceId] {
        &self.members
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputSimilarMembers {
    /// Partial deployment.
    Services(Vec<ServiceId>),
    /// Full deployment; output sets are pairwise distinct.
    Similar(Vec<SimilarClass>),
}

/// Services (or similar classes) sharing the input set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputSimilarClass {
    pub(crate) inputs: ParamSet,
    pub(crate) members: InputSimilarMembers,
    pub(crate) service_count: usize,
}

impl InputSimilarClass {
    pub fn inputs(&self) -> &ParamSet {
        &self.inputs
    }

    pub fn members(&self) -> &InputSimilarMembers {
        &self.members
    }

    pub fn service_count(&self) -> usize {
        self.service_count
    }

    pub fn service_ids(&self) -> Vec<ServiceId> {
        match &self.members {
            InputSimilarMembers::Services(ids) => ids.clone(),
            InputSimilarMembers::Similar(classes) => classes.iter().flat_map(|c| c.members.iter().copied()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeyMembers {
    /// Primary deployment.
    Services(Vec<ServiceId>),
    /// Partial and full deployments; input sets are pairwise distinct.
    InputSimilar(Vec<InputSimilarClass>),
}

/// Everything filed under one key parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyClass {
    pub(crate) key: ParameterId,
    pub(crate) members: KeyMembers,
}

impl KeyClass {
    pub fn key(&self) -> ParameterId {
        self.key
    }

    pub fn members(&self) -> &KeyMembers {
        &self.members
    }

    /// Number of direct members: services in a primary index, input-similar
    /// classes otherwise. This is the class size the original key selection
    /// method balances.
    pub fn len(&self) -> usize {
        match &self.members {
            KeyMembers::Services(s) => s.len(),
            KeyMembers::InputSimilar(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn service_count(&self) -> usize {
        match &self.members {
            KeyMembers::Services(s) => s.len(),
            KeyMembers::InputSimilar(c) => c.iter().map(|isc| isc.service_count).sum(),
        }
    }
}

/// Key classes ordered by key, searched by binary descent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyDirectory {
    classes: Vec<KeyClass>,
}

impl KeyDirectory {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Binary descent charging one comparison per probed key. `Ok` holds the
    /// slot of `key`, `Err` the slot where it would be inserted.
    pub fn search(&self, key: ParameterId, cost: &mut Cost) -> Result<usize, usize> {
        let (mut lo, mut hi) = (0, self.classes.len());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            cost.directory += 1;
            match key.cmp(&self.classes[mid].key) {
                std::cmp::Ordering::Equal => return Ok(mid),
                std::cmp::Ordering::Less => hi = mid,
                std::cmp::Ordering::Greater => lo = mid + 1,
            }
        }
        Err(lo)
    }

    /// Uncharged lookup.
    pub fn get(&self, key: ParameterId) -> Option<&KeyClass> {
        self.classes
            .binary_search_by_key(&key, |c| c.key)
            .ok()
            .map(|slot| &self.classes[slot])
    }

    pub fn contains(&self, key: ParameterId) -> bool {
        self.get(key).is_some()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, KeyClass> {
        self.classes.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = ParameterId> + '_ {
        self.classes.iter().map(|c| c.key)
    }

    pub(crate) fn slot_mut(&mut self, slot: usize) -> &mut KeyClass {
        &mut self.classes[slot]
    }

    pub(crate) fn slot(&self, slot: usize) -> &KeyClass {
        &self.classes[slot]
    }

    pub(crate) fn insert_at(&mut self, slot: usize, class: KeyClass) {
        debug_assert!(slot == 0 || self.classes[slot - 1].key < class.key);
        debug_assert!(slot == self.classes.len() || class.key < self.classes[slot].key);
        self.classes.insert(slot, class);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Deployment {
    /// Key directory over services.
    Primary,
    /// Key directory over input-similar classes of services.
    Partial,
    /// Key directory over input-similar classes of similar classes.
    Full,
}

impl Deployment {
    pub const ALL: [Deployment; 3] = [Deployment::Primary, Deployment::Partial, Deployment::Full];

    pub fn name(self) -> &'static str {
        match self {
            Deployment::Primary => "primary",
            Deployment::Partial => "partial",
            Deployment::Full => "full",
        }
    }
}

impl fmt::Display for Deployment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Deployment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "primary" => Ok(Deployment::Primary),
            "partial" => Ok(Deployment::Partial),
            "full" => Ok(Deployment::Full),
            other => Err(format!(
                "unknown deployment `{other}` (expected primary | partial | full)"
            )),
        }
    }
}

/// Structural counts: |S|, |R2| (input-similar classes), |R1| (similar
/// classes), |K| and |P|.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IndexStats {
    pub service_count: usize,
    pub input_similar_count: usize,
    pub similar_count: usize,
    pub key_count: usize,
    pub parameter_count: usize,
}

/// The multilevel index. The deployment is fixed at construction.
#[derive(Debug, Clone)]
pub struct IndexModel {
    pub(crate) deployment: Deployment,
    pub(crate) directory: KeyDirectory,
    pub(crate) services: Vec<Service>,
    pub(crate) positions: HashMap<ServiceId, usize>,
    pub(crate) input_similar_count: usize,
    pub(crate) similar_count: usize,
    parameter_count: usize,
}

impl IndexModel {
    /// Empty index over a universe of `parameter_count` parameters.
    pub fn new(deployment: Deployment, parameter_count: usize) -> Self {
        IndexModel {
            deployment,
            directory: KeyDirectory::default(),
            services: Vec::new(),
            positions: HashMap::new(),
            input_similar_count: 0,
            similar_count: 0,
            parameter_count,
        }
    }

    pub fn for_table(deployment: Deployment, table: &ParameterTable) -> Self {
        Self::new(deployment, table.len())
    }

    pub fn deployment(&self) -> Deployment {
        self.deployment
    }

    pub fn directory(&self) -> &KeyDirectory {
        &self.directory
    }

    pub fn stats(&self) -> IndexStats {
        IndexStats {
            service_count: self.services.len(),
            input_similar_count: self.input_similar_count,
            similar_count: self.similar_count,
            key_count: self.directory.len(),
            parameter_count: self.parameter_count,
        }
    }

    pub fn service(&self, id: ServiceId) -> Option<&Service> {
        self.positions.get(&id).map(|&pos| &self.services[pos])
    }

    pub fn contains_service(&self, id: ServiceId) -> bool {
        self.positions.contains_key(&id)
    }

    /// Services in insertion order.
    pub fn services(&self) -> &[Service] {
        &self.services
    }

    /// Member count of the key class for `key`, zero if `key` is not a key.
    /// Charges the directory descent to `cost`.
    pub(crate) fn class_size_counted(&self, key: ParameterId, cost: &mut Cost) -> Option<usize> {
        self.directory
            .search(key, cost)
            .ok()
            .map(|slot| self.directory.slot(slot).len())
    }

    /// Canonical description of how services are grouped, independent of
    /// insertion order inside classes.
    pub fn partition(&self) -> Partition {
        let mut partition = Partition::default();
        for class in self.directory.iter() {
            let mut under_key = BTreeSet::new();
            match &class.members {
                KeyMembers::Services(ids) => under_key.extend(ids.iter().copied()),
                KeyMembers::InputSimilar(iscs) => {
                    for isc in iscs {
                        let mut ids = isc.service_ids();
                        ids.sort_unstable();
                        under_key.extend(ids.iter().copied());
                        partition.input_similar.insert(ids);
                        if let InputSimilarMembers::Similar(scs) = &isc.members {
                            for sc in scs {
                                let mut ids = sc.members.clone();
                                ids.sort_unstable();
                                partition.similar.insert(ids);
                            }
                        }
                    }
                }
            }
            partition.key_classes.insert(class.key, under_key);
        }
        partition
    }
}

/// Grouping of service ids at every level of an index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Partition {
    pub key_classes: BTreeMap<ParameterId, BTreeSet<ServiceId>>,
    pub input_similar: BTreeSet<Vec<ServiceId>>,
    pub similar: BTreeSet<Vec<ServiceId>>,
}
