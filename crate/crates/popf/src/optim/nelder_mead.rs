//! Nelder-Mead simplex search in two dimensions.
//!
//! Standard reflection/expansion/contraction/shrink coefficients (1, 2, 0.5,
//! 0.5). The initial simplex sits at the box center with two vertices offset
//! by 10% of the box span along each axis. Iteration stops when the simplex
//! diameter collapses below the tolerance or at the iteration cap; constant
//! stretches shrink the simplex, so flat objectives also terminate on the
//! diameter rule.

use super::{Evaluator, NelderMeadParams, SearchBox};
use crate::error::Result;

const REFLECTION: f64 = 1.0;
const EXPANSION: f64 = 2.0;
const CONTRACTION: f64 = 0.5;
const SHRINK: f64 = 0.5;

type Point = (f64, f64);

fn dist(p: Point, q: Point) -> f64 {
    ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt()
}

pub(super) fn run<F>(
    evaluator: &mut Evaluator<'_, F>,
    params: &NelderMeadParams,
    bounds: &SearchBox,
    trace: &mut Vec<f64>,
) -> Result<()>
where
    F: FnMut(f64, f64) -> f64,
{
    let center = bounds.center();
    let mut simplex: Vec<(Point, f64)> = Vec::with_capacity(3);
    for point in [
        center,
        bounds.clamp(center.0 + 0.1 * bounds.span_a(), center.1),
        bounds.clamp(center.0, center.1 + 0.1 * bounds.span_b()),
    ] {
        let value = evaluator.eval(point.0, point.1)?;
        simplex.push((point, value));
    }

    for _ in 0..params.max_iterations {
        simplex.sort_by(|x, y| x.1.total_cmp(&y.1));
        trace.push(evaluator.best_value());

        let (best, f_best) = simplex[0];
        let (second, f_second) = simplex[1];
        let (worst, f_worst) = simplex[2];

        let diameter = dist(best, second).max(dist(best, worst)).max(dist(second, worst));
        let spread = 2.0 * (f_worst - f_best).abs()
            / (f_worst.abs() + f_best.abs()).max(f64::MIN_POSITIVE);
        if diameter < params.tolerance || spread < params.tolerance {
            break;
        }

        let centroid = ((best.0 + second.0) / 2.0, (best.1 + second.1) / 2.0);
        let reflected = bounds.clamp(
            centroid.0 + REFLECTION * (centroid.0 - worst.0),
            centroid.1 + REFLECTION * (centroid.1 - worst.1),
        );
        let f_reflected = evaluator.eval(reflected.0, reflected.1)?;

        let replacement = if f_reflected < f_best {
            let expanded = bounds.clamp(
                centroid.0 + EXPANSION * (reflected.0 - centroid.0),
                centroid.1 + EXPANSION * (reflected.1 - centroid.1),
            );
            let f_expanded = evaluator.eval(expanded.0, expanded.1)?;
            if f_expanded < f_reflected {
                Some((expanded, f_expanded))
            } else {
                Some((reflected, f_reflected))
            }
        } else if f_reflected < f_second {
            Some((reflected, f_reflected))
        } else if f_reflected < f_worst {
            // outside contraction
            let contracted = bounds.clamp(
                centroid.0 + CONTRACTION * (reflected.0 - centroid.0),
                centroid.1 + CONTRACTION * (reflected.1 - centroid.1),
            );
            let f_contracted = evaluator.eval(contracted.0, contracted.1)?;
            (f_contracted <= f_reflected).then_some((contracted, f_contracted))
        } else {
            // inside contraction
            let contracted = bounds.clamp(
                centroid.0 + CONTRACTION * (worst.0 - centroid.0),
                centroid.1 + CONTRACTION * (worst.1 - centroid.1),
            );
            let f_contracted = evaluator.eval(contracted.0, contracted.1)?;
            (f_contracted < f_worst).then_some((contracted, f_contracted))
        };

        match replacement {
            Some(entry) => simplex[2] = entry,
            None => {
                // shrink toward the best vertex
                for k in 1..3 {
                    let p = simplex[k].0;
                    let shrunk = bounds.clamp(
                        best.0 + SHRINK * (p.0 - best.0),
                        best.1 + SHRINK * (p.1 - best.1),
                    );
                    let value = evaluator.eval(shrunk.0, shrunk.1)?;
                    simplex[k] = (shrunk, value);
                }
            }
        }
    }
    trace.push(evaluator.best_value());
    Ok(())
}
