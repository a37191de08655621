pub mod region;
pub mod simulate;
pub mod verify;
pub mod wave;

use rayon::ThreadPool;

use crate::error::{CliError, CliResult};

pub(crate) fn pool(jobs: usize) -> CliResult<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} workers: {e}")))
}
