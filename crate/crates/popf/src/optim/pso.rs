//! Global-best particle swarm optimization.
//!
//! Positions start uniform over the box with zero velocities. Velocities are
//! clamped to half the box span per axis and positions to the box. The
//! global best is refreshed once per iteration, after every particle has
//! moved, so results do not depend on evaluation order within a sweep.

use rand::Rng;

use super::{Evaluator, OptimizerConfig, ParticleSwarmParams};
use crate::error::Result;

pub(super) fn run<F>(
    evaluator: &mut Evaluator<'_, F>,
    params: &ParticleSwarmParams,
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
    let mut velocity = vec![(0.0, 0.0); n];
    for _ in 0..n {
        let a = rng.random_range(bounds.a_min..=bounds.a_max);
        let b = rng.random_range(bounds.b_min..=bounds.b_max);
        position.push((a, b));
    }

    let mut personal_best = Vec::with_capacity(n);
    for &(a, b) in &position {
        let value = evaluator.eval(a, b)?;
        personal_best.push(((a, b), value));
    }
    let mut global_best = personal_best
        .iter()
        .copied()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap();

    for _ in 0..config.iterations {
        for i in 0..n {
            let (px, pv) = (&mut position[i], &mut velocity[i]);
            let (pb, _) = personal_best[i];

            let r1a: f64 = rng.random();
            let r2a: f64 = rng.random();
            let r1b: f64 = rng.random();
            let r2b: f64 = rng.random();

            pv.0 = params.inertia * pv.0
                + params.cognitive * r1a * (pb.0 - px.0)
                + params.social * r2a * (global_best.0 .0 - px.0);
            pv.1 = params.inertia * pv.1
                + params.cognitive * r1b * (pb.1 - px.1)
                + params.social * r2b * (global_best.0 .1 - px.1);
            pv.0 = pv.0.clamp(-v_max.0, v_max.0);
            pv.1 = pv.1.clamp(-v_max.1, v_max.1);

            *px = bounds.clamp(px.0 + pv.0, px.1 + pv.1);
            let value = evaluator.eval(px.0, px.1)?;
            if value < personal_best[i].1 {
                personal_best[i] = (*px, value);
            }
        }
        // synchronous global-best refresh in fixed index order
        for &pb in &personal_best {
            if pb.1 < global_best.1 {
                global_best = pb;
            }
        }
        trace.push(evaluator.best_value());
    }
    Ok(())
}
