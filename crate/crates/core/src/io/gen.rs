//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Instance, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub num_baths: usize,
    pub num_jobs: usize,
    pub duration_low: Time,
    pub duration_high: Time,
    /// Added to the largest total processing time to form the deadline.
    pub slack: Time,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_baths == 0 || self.num_jobs == 0 {
            return Err(Error::GenSpec("bath and job counts must be positive".into()));
        }
        if self.duration_low == 0 || self.duration_low > self.duration_high {
            return Err(Error::GenSpec(format!(
                "need 1 <= low <= high, got [{}, {}]",
                self.duration_low, self.duration_high
            )));
        }
        if self.slack == 0 {
            return Err(Error::GenSpec("slack must be at least 1".into()));
        }
        Ok(())
    }
}

/// Durations uniform in `[low, high]`, drawn job by job; deadline is the
/// largest total processing time plus `slack`.
pub fn generate(spec: &GenSpec) -> Result<Instance> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let rows: Vec<Vec<Time>> = (0..spec.num_jobs)
        .map(|_| {
            (0..spec.num_baths)
                .map(|_| rng.gen_range(spec.duration_low..=spec.duration_high))
                .collect()
        })
        .collect();
    let lambda = rows
        .iter()
        .map(|r| r.iter().sum::<Time>())
        .max()
        .expect("at least one job");
    Instance::new(rows, lambda + spec.slack)
}
