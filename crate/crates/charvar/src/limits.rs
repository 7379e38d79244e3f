use crate::error::{Error, Result};

/// Iteration budgets for the enumeration kernels.
///
/// `enumeration` bounds single passes over a matrix space (group listing,
/// class table construction), `brute_force` bounds nested tuple enumeration
/// in the oracle counters and the representation-space scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub enumeration: u128,
    pub brute_force: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration: 100_000_000,
            brute_force: 1_000_000_000,
        }
    }
}

impl Limits {
    pub fn with_max(max: u128) -> Self {
        Limits {
            enumeration: max,
            brute_force: max,
        }
    }

    pub fn check_enumeration(&self, required: u128) -> Result<()> {
        if required > self.enumeration {
            return Err(Error::EnumerationTooLarge {
                required,
                limit: self.enumeration,
            });
        }
        Ok(())
    }

    pub fn check_brute_force(&self, required: u128) -> Result<()> {
        if required > self.brute_force {
            return Err(Error::EnumerationTooLarge {
                required,
                limit: self.brute_force,
            });
        }
        Ok(())
    }
}
