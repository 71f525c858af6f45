//! Derivative-free minimizers over a two-dimensional box.
//!
//! Four algorithms share one entry point, [`minimize`]: Nelder-Mead simplex,
//! particle swarm, bat and firefly search. All are deterministic under the
//! configured seed, clamp every candidate to the search box, and abort if the
//! objective ever returns a non-finite value. [`grid_evaluate`] rasterizes an
//! objective over the same box for landscape emission.

mod bat;
mod firefly;
mod nelder_mead;
mod pso;

use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::dataset::RngSeed;
use crate::error::{Error, Result};

/// Rectangular search domain for the two calibration parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub a_min: f64,
    pub a_max: f64,
    pub b_min: f64,
    pub b_max: f64,
}

impl SearchBox {
    pub fn new(a_min: f64, a_max: f64, b_min: f64, b_max: f64) -> Result<SearchBox> {
        if !(a_min < a_max && b_min < b_max) {
            return Err(Error::InvalidInput(format!(
                "degenerate search box [{a_min}, {a_max}] x [{b_min}, {b_max}]"
            )));
        }
        Ok(SearchBox { a_min, a_max, b_min, b_max })
    }

    pub fn contains(&self, a: f64, b: f64) -> bool {
        (self.a_min..=self.a_max).contains(&a) && (self.b_min..=self.b_max).contains(&b)
    }

    pub fn clamp(&self, a: f64, b: f64) -> (f64, f64) {
        (a.clamp(self.a_min, self.a_max), b.clamp(self.b_min, self.b_max))
    }

    pub fn span_a(&self) -> f64 {
        self.a_max - self.a_min
    }

    pub fn span_b(&self) -> f64 {
        self.b_max - self.b_min
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.a_min + self.a_max) / 2.0, (self.b_min + self.b_max) / 2.0)
    }
}

impl Default for SearchBox {
    fn default() -> Self {
        SearchBox { a_min: -10.0, a_max: 10.0, b_min: -10.0, b_max: 10.0 }
    }
}

/// Nelder-Mead stopping parameters. `tolerance` bounds both the simplex
/// diameter and the relative spread of vertex values, whichever collapses
/// first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadParams {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for NelderMeadParams {
    fn default() -> Self {
        NelderMeadParams { tolerance: 0.001, max_iterations: 1000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleSwarmParams {
    pub cognitive: f64,
    pub social: f64,
    pub inertia: f64,
}

impl Default for ParticleSwarmParams {
    fn default() -> Self {
        ParticleSwarmParams { cognitive: 2.0, social: 2.0, inertia: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatParams {
    pub frequency_min: f64,
    pub frequency_max: f64,
    /// Loudness decay per accepted move.
    pub loudness_decay: f64,
    /// Pulse-rate growth exponent.
    pub pulse_growth: f64,
}

impl Default for BatParams {
    fn default() -> Self {
        BatParams {
            frequency_min: 0.0,
            frequency_max: 1.0,
            loudness_decay: 1.0,
            pulse_growth: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FireflyParams {
    /// Light absorption; distances are normalized by the box diagonal in the
    /// attractiveness term so this stays meaningful on any box scale.
    pub absorption: f64,
    /// Attractiveness at distance zero.
    pub base_attractiveness: f64,
    /// Half-width of the uniform randomization step, held constant.
    pub randomization_step: f64,
}

impl Default for FireflyParams {
    fn default() -> Self {
        FireflyParams { absorption: 1.0, base_attractiveness: 0.9, randomization_step: 0.7 }
    }
}

/// Algorithm choice with its parameter record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algorithm {
    NelderMead(NelderMeadParams),
    ParticleSwarm(ParticleSwarmParams),
    Bat(BatParams),
    Firefly(FireflyParams),
}

impl Algorithm {
    /// Short tag used in reports and on the command line.
    pub fn tag(&self) -> &'static str {
        match self {
            Algorithm::NelderMead(_) => "nm",
            Algorithm::ParticleSwarm(_) => "pso",
            Algorithm::Bat(_) => "ba",
            Algorithm::Firefly(_) => "ffa",
        }
    }

    /// Algorithm with default parameters from its tag.
    pub fn from_tag(tag: &str) -> Result<Algorithm> {
        match tag {
            "nm" => Ok(Algorithm::NelderMead(NelderMeadParams::default())),
            "pso" => Ok(Algorithm::ParticleSwarm(ParticleSwarmParams::default())),
            "ba" => Ok(Algorithm::Bat(BatParams::default())),
            "ffa" => Ok(Algorithm::Firefly(FireflyParams::default())),
            other => Err(Error::InvalidInput(format!("unknown optimizer {other:?}"))),
        }
    }
}

/// Full optimizer configuration: algorithm, population size, iteration
/// budget, search box and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    /// Population size for the swarm methods; ignored by Nelder-Mead.
    pub agents: usize,
    /// Iteration budget for the swarm methods; Nelder-Mead uses its own
    /// `max_iterations`.
    pub iterations: usize,
    pub search_box: SearchBox,
    pub seed: RngSeed,
}

impl OptimizerConfig {
    pub fn new(algorithm: Algorithm, seed: RngSeed) -> OptimizerConfig {
        OptimizerConfig {
            algorithm,
            agents: 20,
            iterations: 400,
            search_box: SearchBox::default(),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.agents == 0 {
            return Err(Error::InvalidInput("agents must be positive".into()));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidInput("iterations must be positive".into()));
        }
        Ok(())
    }
}

/// Result of one minimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub point: (f64, f64),
    pub value: f64,
    pub evaluations: usize,
    /// Best value seen up to and including each iteration; non-increasing.
    pub trace: Vec<f64>,
}

/// Counts evaluations, enforces finiteness and tracks the best point seen.
pub(crate) struct Evaluator<'a, F: FnMut(f64, f64) -> f64> {
    objective: F,
    bounds: &'a SearchBox,
    evaluations: usize,
    best_point: (f64, f64),
    best_value: f64,
}

impl<'a, F: FnMut(f64, f64) -> f64> Evaluator<'a, F> {
    fn new(objective: F, bounds: &'a SearchBox) -> Self {
        Evaluator {
            objective,
            bounds,
            evaluations: 0,
            best_point: (f64::NAN, f64::NAN),
            best_value: f64::INFINITY,
        }
    }

    pub(crate) fn eval(&mut self, a: f64, b: f64) -> Result<f64> {
        debug_assert!(self.bounds.contains(a, b), "evaluated point outside the box");
        let value = (self.objective)(a, b);
        if !value.is_finite() {
            return Err(Error::Optimization(format!(
                "objective returned {value} at ({a}, {b})"
            )));
        }
        self.evaluations += 1;
        if value < self.best_value {
            self.best_value = value;
            self.best_point = (a, b);
        }
        Ok(value)
    }

    pub(crate) fn best_value(&self) -> f64 {
        self.best_value
    }
}

/// Minimizes the objective over the configured box.
///
/// The returned point is the best point ever evaluated, which always lies
/// inside the box. Identical config and seed reproduce identical results.
pub fn minimize<F>(objective: F, config: &OptimizerConfig) -> Result<OptimResult>
where
    F: FnMut(f64, f64) -> f64,
{
    config.validate()?;
    let mut evaluator = Evaluator::new(objective, &config.search_box);
    let mut trace = Vec::new();
    match &config.algorithm {
        Algorithm::NelderMead(params) => {
            nelder_mead::run(&mut evaluator, params, &config.search_box, &mut trace)?
        }
        Algorithm::ParticleSwarm(params) => pso::run(&mut evaluator, params, config, &mut trace)?,
        Algorithm::Bat(params) => bat::run(&mut evaluator, params, config, &mut trace)?,
        Algorithm::Firefly(params) => firefly::run(&mut evaluator, params, config, &mut trace)?,
    }
    Ok(OptimResult {
        point: evaluator.best_point,
        value: evaluator.best_value,
        evaluations: evaluator.evaluations,
        trace,
    })
}

/// Objective values over a uniform `steps x steps` lattice spanning the box,
/// corners included. `values[i][j]` pairs `a_values[i]` with `b_values[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEvaluation {
    pub a_values: Vec<f64>,
    pub b_values: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl GridEvaluation {
    /// Lattice minimum as `(a, b, value)`; ties resolve to the first cell in
    /// row-major order.
    pub fn min(&self) -> (f64, f64, f64) {
        let mut best = (self.a_values[0], self.b_values[0], self.values[0][0]);
        for (i, row) in self.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v < best.2 {
                    best = (self.a_values[i], self.b_values[j], v);
                }
            }
        }
        best
    }

    /// Emits `A,B,F` rows, one per lattice point, in row-major order.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writeln!(writer, "A,B,F")?;
        for (i, row) in self.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                writeln!(writer, "{},{},{}", self.a_values[i], self.b_values[j], v)?;
            }
        }
        Ok(())
    }
}

fn lattice(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let h = (hi - lo) / (steps - 1) as f64;
    (0..steps)
        .map(|i| if i == steps - 1 { hi } else { lo + h * i as f64 })
        .collect()
}

/// Evaluates the objective over the lattice. `steps` must be at least 2.
pub fn grid_evaluate<F>(mut objective: F, bounds: &SearchBox, steps: usize) -> Result<GridEvaluation>
where
    F: FnMut(f64, f64) -> f64,
{
    if steps < 2 {
        return Err(Error::InvalidInput("grid needs at least 2 steps per axis".into()));
    }
    let a_values = lattice(bounds.a_min, bounds.a_max, steps);
    let b_values = lattice(bounds.b_min, bounds.b_max, steps);
    let mut values = Vec::with_capacity(steps);
    for &a in &a_values {
        let mut row = Vec::with_capacity(steps);
        for &b in &b_values {
            let v = objective(a, b);
            if !v.is_finite() {
                return Err(Error::Optimization(format!(
                    "objective returned {v} at ({a}, {b})"
                )));
            }
            row.push(v);
        }
        values.push(row);
    }
    Ok(GridEvaluation { a_values, b_values, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(a: f64, b: f64) -> f64 {
        (a - 1.0) * (a - 1.0) + (b + 2.0) * (b + 2.0)
    }

    fn all_algorithms() -> Vec<Algorithm> {
        vec![
            Algorithm::NelderMead(NelderMeadParams::default()),
            Algorithm::ParticleSwarm(ParticleSwarmParams::default()),
            Algorithm::Bat(BatParams::default()),
            Algorithm::Firefly(FireflyParams::default()),
        ]
    }

    #[test]
    fn nelder_mead_finds_sphere_minimum() {
        let config = OptimizerConfig::new(
            Algorithm::NelderMead(NelderMeadParams::default()),
            RngSeed(1),
        );
        let result = minimize(sphere, &config).unwrap();
        assert!((result.point.0 - 1.0).abs() < 1e-3, "A* = {}", result.point.0);
        assert!((result.point.1 + 2.0).abs() < 1e-3, "B* = {}", result.point.1);
        assert!(result.value < 1e-6, "value = {}", result.value);
    }

    #[test]
    fn swarm_methods_converge_on_sphere() {
        for algorithm in [
            Algorithm::ParticleSwarm(ParticleSwarmParams::default()),
            Algorithm::Bat(BatParams::default()),
            Algorithm::Firefly(FireflyParams::default()),
        ] {
            let config = OptimizerConfig::new(algorithm, RngSeed(7));
            let result = minimize(sphere, &config).unwrap();
            assert!(
                result.value < 1e-2,
                "{} stalled at {}",
                algorithm.tag(),
                result.value
            );
        }
    }

    #[test]
    fn constant_objective_returns_constant() {
        for algorithm in all_algorithms() {
            let config = OptimizerConfig::new(algorithm, RngSeed(3));
            let result = minimize(|_, _| 7.0, &config).unwrap();
            assert_eq!(result.value, 7.0);
            assert!(config.search_box.contains(result.point.0, result.point.1));
        }
    }

    #[test]
    fn identical_seed_identical_result() {
        for algorithm in all_algorithms() {
            let config = OptimizerConfig::new(algorithm, RngSeed(99));
            let first = minimize(sphere, &config).unwrap();
            let second = minimize(sphere, &config).unwrap();
            assert_eq!(first, second, "{} not deterministic", algorithm.tag());
        }
    }

    #[test]
    fn every_evaluated_point_stays_in_the_box() {
        for algorithm in all_algorithms() {
            let config = OptimizerConfig::new(algorithm, RngSeed(5));
            let bounds = config.search_box;
            let mut outside = 0usize;
            minimize(
                |a, b| {
                    if !bounds.contains(a, b) {
                        outside += 1;
                    }
                    sphere(a, b)
                },
                &config,
            )
            .unwrap();
            assert_eq!(outside, 0, "{} escaped the box", algorithm.tag());
        }
    }

    #[test]
    fn trace_is_monotone_non_increasing() {
        for algorithm in all_algorithms() {
            let config = OptimizerConfig::new(algorithm, RngSeed(11));
            let result = minimize(sphere, &config).unwrap();
            assert!(!result.trace.is_empty());
            for pair in result.trace.windows(2) {
                assert!(pair[1] <= pair[0], "{} trace increased", algorithm.tag());
            }
        }
    }

    #[test]
    fn non_finite_objective_aborts() {
        for algorithm in all_algorithms() {
            let config = OptimizerConfig::new(algorithm, RngSeed(2));
            let result = minimize(|a, b| if a > 0.0 { f64::NAN } else { a + b }, &config);
            assert!(matches!(result, Err(Error::Optimization(_))));
        }
    }

    #[test]
    fn grid_two_steps_hits_corners() {
        let bounds = SearchBox::default();
        let grid = grid_evaluate(|a, b| a + b, &bounds, 2).unwrap();
        assert_eq!(grid.a_values, vec![-10.0, 10.0]);
        assert_eq!(grid.b_values, vec![-10.0, 10.0]);
        assert_eq!(grid.values, vec![vec![-20.0, 0.0], vec![0.0, 20.0]]);
    }

    #[test]
    fn grid_rows_follow_the_a_axis() {
        let grid = grid_evaluate(|a, _| a, &SearchBox::default(), 3).unwrap();
        for (i, row) in grid.values.iter().enumerate() {
            for &v in row {
                assert_eq!(v, grid.a_values[i]);
            }
        }
        assert_eq!(grid.a_values, vec![-10.0, 0.0, 10.0]);
    }

    #[test]
    fn grid_rejects_single_step() {
        assert!(matches!(
            grid_evaluate(|a, b| a + b, &SearchBox::default(), 1),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn grid_csv_has_header_and_rows() {
        let grid = grid_evaluate(|a, b| a * b, &SearchBox::default(), 2).unwrap();
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "A,B,F");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn nelder_mead_matches_its_own_grid_on_sphere() {
        let config = OptimizerConfig::new(
            Algorithm::NelderMead(NelderMeadParams::default()),
            RngSeed(1),
        );
        let result = minimize(sphere, &config).unwrap();
        let grid = grid_evaluate(sphere, &config.search_box, 21).unwrap();
        assert!(result.value <= grid.min().2 + 1e-6);
    }
}
