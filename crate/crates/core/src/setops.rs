//! Set comparisons that charge one unit per parameter id test.

use crate::model::ParameterId;

/// Parameter comparisons spent by one operation, split by where they were
/// spent.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Cost {
    /// Probes made while descending the key directory.
    pub directory: u64,
    /// Element tests made while comparing parameter sets.
    pub sets: u64,
}

impl Cost {
    pub fn total(&self) -> u64 {
        self.directory + self.sets
    }
}

/// Equality of two sorted sets. A length mismatch costs one test; otherwise
/// elements are compared pairwise until the first mismatch.
pub fn equal_counted(a: &[ParameterId], b: &[ParameterId], cost: &mut Cost) -> bool {
    if a.len() != b.len() {
        cost.sets += 1;
        return false;
    }
    for (x, y) in a.iter().zip(b) {
        cost.sets += 1;
        if x != y {
            return false;
        }
    }
    true
}

/// `sub ⊆ sup` over sorted sets by linear merge, one test per merge step.
pub fn subset_counted(sub: &[ParameterId], sup: &[ParameterId], cost: &mut u64) -> bool {
    let mut j = 0;
    for &x in sub {
        loop {
            let Some(&y) = sup.get(j) else {
                return false;
            };
            *cost += 1;
            match x.cmp(&y) {
                std::cmp::Ordering::Less => return false,
                std::cmp::Ordering::Equal => {
                    j += 1;
                    break;
                }
                std::cmp::Ordering::Greater => j += 1,
            }
        }
    }
    true
}
