//! Firefly algorithm with constant randomization.
//!
//! Every firefly drifts toward each brighter one with attractiveness
//! decaying in the squared distance (normalized by the box diagonal), plus a
//! uniform randomization step of fixed half-width. Brightness comparisons use
//! a snapshot of the previous iteration, so moves are independent of update
//! order within a sweep.

use rand::Rng;

use super::{Evaluator, FireflyParams, OptimizerConfig};
use crate::error::Result;

pub(super) fn run<F>(
    evaluator: &mut Evaluator<'_, F>,
    params: &FireflyParams,
    config: &OptimizerConfig,
    trace: &mut Vec<f64>,
) -> Result<()>
where
    F: FnMut(f64, f64) -> f64,
{
    let bounds = &config.search_box;
    let mut rng = config.seed.rng();
    let n = config.agents;
    let diag_sq = bounds.span_a().powi(2) + bounds.span_b().powi(2);

    let mut position = Vec::with_capacity(n);
    for _ in 0..n {
        let a = rng.random_range(bounds.a_min..=bounds.a_max);
        let b = rng.random_range(bounds.b_min..=bounds.b_max);
        position.push((a, b));
    }
    let mut brightness = Vec::with_capacity(n);
    for &(a, b) in &position {
        brightness.push(evaluator.eval(a, b)?);
    }

    for _ in 0..config.iterations {
        let snapshot_pos = position.clone();
        let snapshot_val = brightness.clone();
        for i in 0..n {
            let mut current = snapshot_pos[i];
            for j in 0..n {
                if snapshot_val[j] < snapshot_val[i] {
                    let r_sq = (current.0 - snapshot_pos[j].0).powi(2)
                        + (current.1 - snapshot_pos[j].1).powi(2);
                    let beta = params.base_attractiveness * (-params.absorption * r_sq / diag_sq).exp();
                    let step_a = params.randomization_step * (rng.random::<f64>() - 0.5);
                    let step_b = params.randomization_step * (rng.random::<f64>() - 0.5);
                    current = bounds.clamp(
                        current.0 + beta * (snapshot_pos[j].0 - current.0) + step_a,
                        current.1 + beta * (snapshot_pos[j].1 - current.1) + step_b,
                    );
                }
            }
            position[i] = current;
            brightness[i] = evaluator.eval(current.0, current.1)?;
        }
        trace.push(evaluator.best_value());
    }
    Ok(())
}
