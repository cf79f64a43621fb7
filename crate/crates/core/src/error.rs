use thiserror::Error;

use crate::model::{Deployment, ServiceId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IndexError {
    #[error("service {0} is already present in the index")]
    DuplicateService(ServiceId),

    #[error("service {0} has an empty input set; no key can be selected")]
    EmptyInputs(ServiceId),

    #[error("operation requires a {expected} index, found {found}")]
    WrongDeployment { expected: &'static str, found: Deployment },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot select a key from an empty input set")]
pub struct EmptyInputSet;
