//! Closed-form expectations for retrieval traversal and addition cost.
//!
//! Retrieval: the expected number of entities traversed per request is
//! `r/|P|·|S|` for a primary index and `r/|P|·|R2|` for partial and full
//! indexes.
//!
//! Addition, counted in compared parameters:
//!
//! | deployment | random / scanning                         | designated                      |
//! |------------|-------------------------------------------|---------------------------------|
//! | primary    | `log2|K|`                                 | `log2|K|`                       |
//! | partial    | `n·log2|K| + |K|/|P|·n·|R2|/|K|·n`        | `log2|K| + |K|/|P|·1·|R2|/|K|·n` |
//! | full       | partial value `+ |R1|/|R2|·m`             | partial value `+ |R1|/|R2|·m`    |
//!
//! Note that the full-index expression is the larger one: it adds the cost
//! of locating a similar class by output set on top of the partial cost.

use thiserror::Error;

use crate::model::{Deployment, IndexStats};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpectationError {
    #[error("`{0}` must be positive")]
    NonPositive(&'static str),
    #[error("`{0}` must be a finite non-negative number")]
    Invalid(&'static str),
}

/// Symbols the formulas are written in. Counts are real-valued so averages
/// can be supplied directly.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ExpectationInputs {
    /// Average parameters per retrieval request.
    pub r: f64,
    /// Average input parameters per service.
    pub n: f64,
    /// Average output parameters per service.
    pub m: f64,
    /// |P|
    pub parameters: f64,
    /// |S|
    pub services: f64,
    /// |K|
    pub keys: f64,
    /// |R2|, input-similar classes.
    pub input_similar: f64,
    /// |R1|, similar classes.
    pub similar: f64,
}

impl ExpectationInputs {
    /// Structural counts from a built index; `r`, `n`, `m` are left at zero.
    pub fn from_stats(stats: &IndexStats) -> Self {
        ExpectationInputs {
            parameters: stats.parameter_count as f64,
            services: stats.service_count as f64,
            keys: stats.key_count as f64,
            input_similar: stats.input_similar_count as f64,
            similar: stats.similar_count as f64,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdditionMethod {
    Random,
    Designated,
}

fn non_negative(v: f64, name: &'static str) -> Result<f64, ExpectationError> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(ExpectationError::Invalid(name))
    }
}

fn positive(v: f64, name: &'static str) -> Result<f64, ExpectationError> {
    if non_negative(v, name)? > 0.0 {
        Ok(v)
    } else {
        Err(ExpectationError::NonPositive(name))
    }
}

pub fn expected_retrieval(deployment: Deployment, x: &ExpectationInputs) -> Result<f64, ExpectationError> {
    let p = positive(x.parameters, "P")?;
    let r = non_negative(x.r, "r")?;
    let population = match deployment {
        Deployment::Primary => non_negative(x.services, "S")?,
        Deployment::Partial | Deployment::Full => non_negative(x.input_similar, "R2")?,
    };
    Ok(r / p * population)
}

pub fn expected_addition(
    deployment: Deployment,
    method: AdditionMethod,
    x: &ExpectationInputs,
) -> Result<f64, ExpectationError> {
    let k = positive(x.keys, "K")?;
    let lookup = k.log2();
    if deployment == Deployment::Primary {
        return Ok(lookup);
    }

    let p = positive(x.parameters, "P")?;
    let n = non_negative(x.n, "n")?;
    let r2 = non_negative(x.input_similar, "R2")?;
    let partial = match method {
        AdditionMethod::Random => n * lookup + (k / p) * n * (r2 / k) * n,
        AdditionMethod::Designated => lookup + (k / p) * 1.0 * (r2 / k) * n,
    };
    if deployment == Deployment::Partial {
        return Ok(partial);
    }

    let r2 = positive(x.input_similar, "R2")?;
    let r1 = non_negative(x.similar, "R1")?;
    let m = non_negative(x.m, "m")?;
    Ok(partial + (r1 / r2) * m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn retrieval_at_experiment_scale() {
        let x = ExpectationInputs {
            r: 32.0,
            parameters: 1000.0,
            services: 20000.0,
            ..Default::default()
        };
        assert_eq!(expected_retrieval(Deployment::Primary, &x), Ok(640.0));
    }

    #[test]
    fn retrieval_zero_request_and_layered_equality() {
        let x = ExpectationInputs {
            r: 0.0,
            parameters: 10.0,
            services: 5.0,
            input_similar: 4.0,
            ..Default::default()
        };
        for d in Deployment::ALL {
            assert_eq!(expected_retrieval(d, &x), Ok(0.0));
        }
        let x = ExpectationInputs { r: 7.0, ..x };
        assert_eq!(
            expected_retrieval(Deployment::Partial, &x),
            expected_retrieval(Deployment::Full, &x)
        );
        let zero_p = ExpectationInputs { parameters: 0.0, ..x };
        assert_eq!(
            expected_retrieval(Deployment::Primary, &zero_p),
            Err(ExpectationError::NonPositive("P"))
        );
    }

    #[test]
    fn addition_values() {
        let x = ExpectationInputs {
            keys: 1024.0,
            ..Default::default()
        };
        for m in [AdditionMethod::Random, AdditionMethod::Designated] {
            assert_eq!(expected_addition(Deployment::Primary, m, &x), Ok(10.0));
        }

        let x = ExpectationInputs {
            n: 10.0,
            m: 10.0,
            keys: 1000.0,
            parameters: 1000.0,
            input_similar: 2000.0,
            similar: 4000.0,
            ..Default::default()
        };
        let random = expected_addition(Deployment::Partial, AdditionMethod::Random, &x).unwrap();
        let designated = expected_addition(Deployment::Partial, AdditionMethod::Designated, &x).unwrap();
        // 10·log2(1000) + 200 and log2(1000) + 20
        assert!(close(random, 299.657_842_846_620_9, 1e-9), "{random}");
        assert!(close(designated, 29.965_784_284_662_09, 1e-9), "{designated}");

        let full_r = expected_addition(Deployment::Full, AdditionMethod::Random, &x).unwrap();
        let full_d = expected_addition(Deployment::Full, AdditionMethod::Designated, &x).unwrap();
        assert!(close(full_r - random, 20.0, 1e-9));
        assert!(close(full_d - designated, 20.0, 1e-9));
    }

    #[test]
    fn addition_guards() {
        let x = ExpectationInputs::default();
        assert_eq!(
            expected_addition(Deployment::Primary, AdditionMethod::Random, &x),
            Err(ExpectationError::NonPositive("K"))
        );
        let x = ExpectationInputs {
            keys: 4.0,
            parameters: 10.0,
            n: 2.0,
            ..Default::default()
        };
        assert!(expected_addition(Deployment::Partial, AdditionMethod::Random, &x).is_ok());
        assert_eq!(
            expected_addition(Deployment::Full, AdditionMethod::Random, &x),
            Err(ExpectationError::NonPositive("R2"))
        );
        let bad = ExpectationInputs { n: f64::NAN, ..x };
        assert_eq!(
            expected_addition(Deployment::Partial, AdditionMethod::Random, &bad),
            Err(ExpectationError::Invalid("n"))
        );
    }
}
