//! In-memory multilevel index for large service repositories.
//!
//! Services are filed under one key parameter chosen from their inputs.
//! Depending on the [`Deployment`], key classes hold services directly or
//! hold input-similar classes (and, in the full deployment, similar classes
//! beneath those). Retrieval returns every service whose inputs are covered
//! by a request.
//!
//! All additions and retrievals report the exact number of parameter
//! comparisons they performed, so their cost can be checked against the
//! closed forms in [`expectation`].

pub mod datagen;
pub mod dump;
mod error;
pub mod expectation;
pub mod model;
mod ops;
pub mod oracle;
pub mod select;
pub mod setops;

pub use datagen::{generate, read_dataset, write_dataset, Dataset, DatasetError, DatasetSpec};
pub use dump::{DumpError, StatsDump};
pub use error::{EmptyInputSet, IndexError};
pub use expectation::{expected_addition, expected_retrieval, AdditionMethod, ExpectationError, ExpectationInputs};
pub use model::{
    Deployment, IndexModel, IndexStats, InputSimilarClass, InputSimilarMembers, KeyClass, KeyDirectory, KeyMembers,
    ParamSet, ParameterId, ParameterTable, Partition, Service, ServiceId, SimilarClass,
};
pub use ops::{AdditionReport, AdditionRoute, Created, TraversalReport};
pub use oracle::brute_force_retrieve;
pub use select::{select_designated, select_maximum, select_minimum, select_original, KeySelector, KeyStrategy};
