//! Parallel drivers. Work items are independent and results are
//! collected by index, so output does not depend on the worker count.

use rayon::prelude::*;
use ssh2d_core::experiment::{
    aggregate_ensemble, ensemble_reference, run_realization, sweep_row, EnsembleResult, EnsembleSpec, SweepRow,
    SweepSpec,
};
use ssh2d_core::Result;

/// `None` uses one worker per available core.
pub fn thread_pool(workers: Option<usize>) -> std::result::Result<rayon::ThreadPool, rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
}

pub fn parallel_sweep(pool: &rayon::ThreadPool, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    pool.install(|| {
        (0..spec.j_values.len())
            .into_par_iter()
            .map(|i| sweep_row(spec, i))
            .collect()
    })
}

pub fn parallel_ensemble(pool: &rayon::ThreadPool, spec: &EnsembleSpec) -> Result<EnsembleResult> {
    spec.validate()?;
    let reference = ensemble_reference(spec)?;
    let realizations = pool.install(|| {
        (0..spec.realizations)
            .into_par_iter()
            .map(|i| run_realization(spec, &reference, i))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(aggregate_ensemble(reference, realizations))
}
