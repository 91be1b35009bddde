//! Shared test support: random model generators and reference checkers
//! that do not reuse the library's own algorithms.

pub mod conformance_oracle;
pub mod gen;
pub mod ocl_oracle;
pub mod sql_check;

pub use conformance_oracle::conformance_codes;
pub use ocl_oracle::{ocl_outcome, Outcome};
pub use sql_check::{check_sql, forward_references, SqlError, Table};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic generator for a given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
