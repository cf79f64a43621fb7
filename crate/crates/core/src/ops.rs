//! Service addition and retrieval with exact comparison accounting.

use crate::error::IndexError;
use crate::model::{
    Deployment, IndexModel, InputSimilarClass, InputSimilarMembers, KeyClass, KeyMembers, ParameterId, Service,
    ServiceId, SimilarClass,
};
use crate::select::{select_designated, KeySelector, KeyStrategy};
use crate::setops::{equal_counted, subset_counted, Cost};

/// Which addition procedure handled a service.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdditionRoute {
    /// Select a key, then file the service under it.
    Primary,
    /// Probe every input for a matching input-similar class before selecting.
    Scan,
    /// Compute the designated key and inspect only its key class.
    Designated,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Created {
    pub key_class: bool,
    pub input_similar: bool,
    pub similar: bool,
}

/// Work done by one addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdditionReport {
    pub route: AdditionRoute,
    /// Key the service ended up under.
    pub key: ParameterId,
    /// All id tests, directory probes included.
    pub parameter_comparisons: u64,
    /// Directory probes only.
    pub key_directory_comparisons: u64,
    /// Input-similar and similar classes whose sets were compared.
    pub classes_scanned: u64,
    pub created: Created,
}

impl AdditionReport {
    fn new(route: AdditionRoute, key: ParameterId, cost: Cost, classes_scanned: u64, created: Created) -> Self {
        AdditionReport {
            route,
            key,
            parameter_comparisons: cost.total(),
            key_directory_comparisons: cost.directory,
            classes_scanned,
            created,
        }
    }
}

/// Work done by one retrieval.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TraversalReport {
    /// Services examined (primary) or reachable through examined classes.
    pub traversed_services: u64,
    /// Input-similar classes examined; zero for a primary index.
    pub traversed_classes: u64,
    /// Id tests spent on subset checks.
    pub parameter_comparisons: u64,
    pub results: u64,
}

impl IndexModel {
    /// Adds `service`, routing primary indexes to the plain procedure and
    /// partial/full indexes to the designated procedure when the selector is
    /// designated, otherwise to the scanning procedure.
    pub fn add_service(&mut self, service: Service, selector: &mut KeySelector) -> Result<AdditionReport, IndexError> {
        match self.deployment {
            Deployment::Primary => self.add_service_primary(service, selector),
            Deployment::Partial | Deployment::Full => {
                if selector.strategy() == KeyStrategy::Designated {
                    self.add_service_designated(service)
                } else {
                    self.add_service_scan(service, selector)
                }
            }
        }
    }

    pub fn add_service_primary(
        &mut self,
        service: Service,
        selector: &mut KeySelector,
    ) -> Result<AdditionReport, IndexError> {
        if self.deployment != Deployment::Primary {
            return Err(IndexError::WrongDeployment {
                expected: "primary",
                found: self.deployment,
            });
        }
        self.check_fresh(&service)?;

        let mut cost = Cost::default();
        let key = selector
            .select(service.inputs().as_slice(), self, &mut cost)
            .map_err(|_| IndexError::EmptyInputs(service.id))?;
        let mut created = Created::default();
        match self.directory.search(key, &mut cost) {
            Ok(slot) => match &mut self.directory.slot_mut(slot).members {
                KeyMembers::Services(ids) => ids.push(service.id),
                KeyMembers::InputSimilar(_) => unreachable!("primary key class holds services"),
            },
            Err(slot) => {
                created.key_class = true;
                self.directory.insert_at(
                    slot,
                    KeyClass {
                        key,
                        members: KeyMembers::Services(vec![service.id]),
                    },
                );
            }
        }
        self.record(service);
        Ok(AdditionReport::new(AdditionRoute::Primary, key, cost, 0, created))
    }

    /// Probes every input parameter (ascending) that is a key for an
    /// input-similar class equal to the service's input set. Only when none
    /// exists is `selector` consulted and a new class created.
    pub fn add_service_scan(
        &mut self,
        service: Service,
        selector: &mut KeySelector,
    ) -> Result<AdditionReport, IndexError> {
        self.check_layered()?;
        self.check_fresh(&service)?;

        let mut cost = Cost::default();
        let mut scanned = 0;
        let inputs = service.inputs().as_slice();
        let mut probes = Vec::with_capacity(inputs.len());
        for &p in inputs {
            let probe = self.directory.search(p, &mut cost);
            if let Ok(slot) = probe {
                if let Some(pos) = find_input_class(self.directory.slot(slot), inputs, &mut cost, &mut scanned) {
                    let (created, key) = self.join_input_class(slot, pos, &service, &mut cost, &mut scanned);
                    self.record(service);
                    return Ok(AdditionReport::new(AdditionRoute::Scan, key, cost, scanned, created));
                }
            }
            probes.push(probe);
        }

        let key = selector
            .select(inputs, self, &mut cost)
            .map_err(|_| IndexError::EmptyInputs(service.id))?;
        let at = inputs
            .iter()
            .position(|&p| p == key)
            .expect("selected key is one of the inputs");
        let created = self.create_input_class(probes[at], key, &service);
        self.record(service);
        Ok(AdditionReport::new(AdditionRoute::Scan, key, cost, scanned, created))
    }

    /// Files the service under its designated key, inspecting only that key
    /// class. Produces the same grouping as [`Self::add_service_scan`] with a
    /// designated selector because equal input sets always yield equal keys.
    pub fn add_service_designated(&mut self, service: Service) -> Result<AdditionReport, IndexError> {
        self.check_layered()?;
        self.check_fresh(&service)?;

        let mut cost = Cost::default();
        let mut scanned = 0;
        let inputs = service.inputs().as_slice();
        let key = select_designated(inputs).map_err(|_| IndexError::EmptyInputs(service.id))?;
        let probe = self.directory.search(key, &mut cost);
        if let Ok(slot) = probe {
            if let Some(pos) = find_input_class(self.directory.slot(slot), inputs, &mut cost, &mut scanned) {
                let (created, key) = self.join_input_class(slot, pos, &service, &mut cost, &mut scanned);
                self.record(service);
                return Ok(AdditionReport::new(
                    AdditionRoute::Designated,
                    key,
                    cost,
                    scanned,
                    created,
                ));
            }
        }
        let created = self.create_input_class(probe, key, &service);
        self.record(service);
        Ok(AdditionReport::new(
            AdditionRoute::Designated,
            key,
            cost,
            scanned,
            created,
        ))
    }

    /// Returns every service whose input set is contained in `request`, in
    /// ascending id order. `request` must be sorted and duplicate-free.
    pub fn retrieve(&self, request: &[ParameterId]) -> (Vec<ServiceId>, TraversalReport) {
        let mut report = TraversalReport::default();
        let mut found = Vec::new();
        for &p in request {
            let Some(class) = self.directory.get(p) else {
                continue;
            };
            match &class.members {
                KeyMembers::Services(ids) => {
                    for id in ids {
                        report.traversed_services += 1;
                        let svc = &self.services[self.positions[id]];
                        if subset_counted(svc.inputs().as_slice(), request, &mut report.parameter_comparisons) {
                            found.push(*id);
                        }
                    }
                }
                KeyMembers::InputSimilar(iscs) => {
                    for isc in iscs {
                        report.traversed_classes += 1;
                        report.traversed_services += isc.service_count as u64;
                        if subset_counted(isc.inputs.as_slice(), request, &mut report.parameter_comparisons) {
                            match &isc.members {
                                InputSimilarMembers::Services(ids) => found.extend_from_slice(ids),
                                InputSimilarMembers::Similar(scs) => {
                                    for sc in scs {
                                        found.extend_from_slice(&sc.members);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        report.results = found.len() as u64;
        found.sort_unstable();
        debug_assert!(found.windows(2).all(|w| w[0] != w[1]), "service emitted twice");
        (found, report)
    }

    fn check_fresh(&self, service: &Service) -> Result<(), IndexError> {
        if self.positions.contains_key(&service.id) {
            return Err(IndexError::DuplicateService(service.id));
        }
        if service.inputs().is_empty() {
            return Err(IndexError::EmptyInputs(service.id));
        }
        Ok(())
    }

    fn check_layered(&self) -> Result<(), IndexError> {
        match self.deployment {
            Deployment::Partial | Deployment::Full => Ok(()),
            Deployment::Primary => Err(IndexError::WrongDeployment {
                expected: "partial or full",
                found: self.deployment,
            }),
        }
    }

    fn record(&mut self, service: Service) {
        self.positions.insert(service.id, self.services.len());
        self.services.push(service);
    }

    fn new_input_class(&mut self, service: &Service) -> InputSimilarClass {
        self.input_similar_count += 1;
        let members = match self.deployment {
            Deployment::Full => {
                self.similar_count += 1;
                InputSimilarMembers::Similar(vec![SimilarClass {
                    outputs: service.outputs().clone(),
                    members: vec![service.id],
                }])
            }
            _ => InputSimilarMembers::Services(vec![service.id]),
        };
        InputSimilarClass {
            inputs: service.inputs().clone(),
            members,
            service_count: 1,
        }
    }

    /// Creates a new input-similar class under `key`, given the directory
    /// probe result for `key`.
    fn create_input_class(&mut self, probe: Result<usize, usize>, key: ParameterId, service: &Service) -> Created {
        let isc = self.new_input_class(service);
        let mut created = Created {
            key_class: false,
            input_similar: true,
            similar: self.deployment == Deployment::Full,
        };
        match probe {
            Ok(slot) => match &mut self.directory.slot_mut(slot).members {
                KeyMembers::InputSimilar(iscs) => iscs.push(isc),
                KeyMembers::Services(_) => unreachable!("layered key class holds input-similar classes"),
            },
            Err(slot) => {
                created.key_class = true;
                self.directory.insert_at(
                    slot,
                    KeyClass {
                        key,
                        members: KeyMembers::InputSimilar(vec![isc]),
                    },
                );
            }
        }
        created
    }

    /// Adds the service to an existing input-similar class; in a full index
    /// also locates or creates its similar class by output set.
    fn join_input_class(
        &mut self,
        slot: usize,
        pos: usize,
        service: &Service,
        cost: &mut Cost,
        scanned: &mut u64,
    ) -> (Created, ParameterId) {
        let mut created = Created::default();
        let class = self.directory.slot_mut(slot);
        let key = class.key;
        let KeyMembers::InputSimilar(iscs) = &mut class.members else {
            unreachable!("layered key class holds input-similar classes")
        };
        let isc = &mut iscs[pos];
        isc.service_count += 1;
        match &mut isc.members {
            InputSimilarMembers::Services(ids) => ids.push(service.id),
            InputSimilarMembers::Similar(scs) => {
                let outputs = service.outputs().as_slice();
                let mut hit = None;
                for (i, sc) in scs.iter().enumerate() {
                    *scanned += 1;
                    if equal_counted(sc.outputs.as_slice(), outputs, cost) {
                        hit = Some(i);
                        break;
                    }
                }
                match hit {
                    Some(i) => scs[i].members.push(service.id),
                    None => {
                        created.similar = true;
                        scs.push(SimilarClass {
                            outputs: service.outputs().clone(),
                            members: vec![service.id],
                        });
                    }
                }
            }
        }
        if created.similar {
            self.similar_count += 1;
        }
        (created, key)
    }
}

/// Position of the input-similar class in `class` whose input set equals
/// `inputs`, scanning in insertion order.
fn find_input_class(class: &KeyClass, inputs: &[ParameterId], cost: &mut Cost, scanned: &mut u64) -> Option<usize> {
    let KeyMembers::InputSimilar(iscs) = &class.members else {
        return None;
    };
    iscs.iter().position(|isc| {
        *scanned += 1;
        equal_counted(isc.inputs.as_slice(), inputs, cost)
    })
}
