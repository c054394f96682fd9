use polvar_core::background::BackgroundEnsemble;
use polvar_core::bell::{
    reduce_partials, CorrelationEstimate, CorrelationProblem, Partial, PolarizerSetting,
    SamplingBox,
};
use rayon::prelude::*;

/// Evaluates the chunks of `problem` on the rayon pool. The result is
/// bit-identical to [`CorrelationProblem::estimate`] for any worker count.
pub fn estimate_parallel(problem: &CorrelationProblem) -> CorrelationEstimate {
    let partials: Vec<Partial> = (0..problem.n_chunks())
        .into_par_iter()
        .map(|c| problem.chunk(c))
        .collect();
    problem.finish(&reduce_partials(&partials))
}

/// Parallel counterpart of [`polvar_core::bell::correlation_mc`].
pub fn correlation_mc_parallel(
    ensemble: &BackgroundEnsemble,
    a: PolarizerSetting,
    b: PolarizerSetting,
    n_trials: usize,
    seed: u64,
    sampling_box: SamplingBox,
) -> polvar_core::Result<CorrelationEstimate> {
    let problem = CorrelationProblem::new(ensemble, a, b, n_trials, seed, sampling_box)?;
    Ok(estimate_parallel(&problem))
}
