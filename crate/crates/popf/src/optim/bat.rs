//! Bat algorithm with loudness and pulse-rate control.
//!
//! Each bat carries a velocity driven by a random frequency toward (and past)
//! the incumbent best, with a pulse-rate-gated local walk around the best
//! solution scaled by the mean loudness. Improving candidates are accepted
//! with probability equal to the bat's loudness; acceptance decays loudness
//! and regrows the pulse rate. The incumbent used for steering is refreshed
//! once per iteration.

use rand::Rng;

use super::{BatParams, Evaluator, OptimizerConfig};
use crate::error::Result;

const INITIAL_LOUDNESS: f64 = 1.0;
const INITIAL_PULSE_RATE: f64 = 0.5;

pub(super) fn run<F>(
    evaluator: &mut Evaluator<'_, F>,
    params: &BatParams,
    config: &OptimizerConfig,
    trace: &mut Vec<f64>,
) -> Result<()>
where
    F: FnMut(f64, f64) -> f64,
{
    let bounds = &config.search_box;
    let mut rng = config.seed.rng();
    let n = config.agents;
    let v_max = (0.5 * bounds.span_a(), 0.5 * bounds.span_b());

    let mut position = Vec::with_capacity(n);
    for _ in 0..n {
        let a = rng.random_range(bounds.a_min..=bounds.a_max);
        let b = rng.random_range(bounds.b_min..=bounds.b_max);
        position.push((a, b));
    }
    let mut velocity = vec![(0.0, 0.0); n];
    let mut fitness = Vec::with_capacity(n);
    for &(a, b) in &position {
        fitness.push(evaluator.eval(a, b)?);
    }
    let mut loudness = vec![INITIAL_LOUDNESS; n];
    let mut pulse_rate = vec![INITIAL_PULSE_RATE; n];

    let mut best = {
        let mut idx = 0;
        for i in 1..n {
            if fitness[i] < fitness[idx] {
                idx = i;
            }
        }
        (position[idx], fitness[idx])
    };

    for t in 0..config.iterations {
        let mean_loudness = loudness.iter().sum::<f64>() / n as f64;
        for i in 0..n {
            let frequency = params.frequency_min
                + (params.frequency_max - params.frequency_min) * rng.random::<f64>();
            velocity[i].0 =
                (velocity[i].0 + (position[i].0 - best.0 .0) * frequency).clamp(-v_max.0, v_max.0);
            velocity[i].1 =
                (velocity[i].1 + (position[i].1 - best.0 .1) * frequency).clamp(-v_max.1, v_max.1);
            let mut candidate =
                bounds.clamp(position[i].0 + velocity[i].0, position[i].1 + velocity[i].1);

            if rng.random::<f64>() > pulse_rate[i] {
                // local walk around the incumbent best
                let ea = rng.random_range(-1.0..1.0);
                let eb = rng.random_range(-1.0..1.0);
                candidate = bounds.clamp(
                    best.0 .0 + ea * mean_loudness,
                    best.0 .1 + eb * mean_loudness,
                );
            }

            let value = evaluator.eval(candidate.0, candidate.1)?;
            if value <= fitness[i] && rng.random::<f64>() < loudness[i] {
                position[i] = candidate;
                fitness[i] = value;
                loudness[i] *= params.loudness_decay;
                pulse_rate[i] = INITIAL_PULSE_RATE
                    * (1.0 - (-params.pulse_growth * (t + 1) as f64).exp());
            }
        }
        // refresh the incumbent after the full sweep
        for i in 0..n {
            if fitness[i] < best.1 {
                best = (position[i], fitness[i]);
            }
        }
        trace.push(evaluator.best_value());
    }
    Ok(())
}
