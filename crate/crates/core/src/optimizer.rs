//! Limited-memory quasi-Newton minimization with optional box constraints.
//!
//! Each iteration fixes the active set (variables at a bound whose gradient
//! pushes outward), builds an L-BFGS direction on the free variables with the
//! two-loop recursion, and runs a projected backtracking line search with the
//! Armijo sufficient-decrease test. Only iterates that lower the objective are
//! accepted, so the recorded loss sequence is nonincreasing.

use std::collections::VecDeque;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HebmError, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientMode {
    #[default]
    FiniteDifference,
    ParameterShift,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Zero skips optimization and reports the starting point.
    pub max_iterations: usize,
    /// Stop when the accepted loss decrease falls below this fraction of the loss.
    pub convergence_tol: f64,
    /// Stop when the projected-gradient infinity norm falls below this.
    pub gradient_tol: f64,
    pub gradient_mode: GradientMode,
    pub fd_step: f64,
    pub bounds: Option<Vec<(f64, f64)>>,
    pub history_size: usize,
    pub rng_seed: u64,
    pub max_line_search_steps: usize,
    /// Stop as soon as the loss drops below this value.
    pub target_loss: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            convergence_tol: 1e-12,
            gradient_tol: 1e-10,
            gradient_mode: GradientMode::FiniteDifference,
            fd_step: 1e-6,
            bounds: None,
            history_size: 10,
            rng_seed: 0,
            max_line_search_steps: 40,
            target_loss: None,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.fd_step > 0.0) {
            return Err(HebmError::InvalidConfig("fd_step must be positive".into()));
        }
        if self.history_size == 0 {
            return Err(HebmError::InvalidConfig("history_size must be at least 1".into()));
        }
        if self.max_line_search_steps == 0 {
            return Err(HebmError::InvalidConfig(
                "max_line_search_steps must be at least 1".into(),
            ));
        }
        if !(self.convergence_tol >= 0.0) || !(self.gradient_tol >= 0.0) {
            return Err(HebmError::InvalidConfig("tolerances must be nonnegative".into()));
        }
        if let Some(bounds) = &self.bounds {
            if bounds.len() != dim {
                return Err(HebmError::DimensionMismatch {
                    expected: dim,
                    found: bounds.len(),
                });
            }
            if let Some((lo, hi)) = bounds.iter().find(|(lo, hi)| !(lo <= hi)) {
                return Err(HebmError::InvalidConfig(format!("empty bound [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

/// A differentiable scalar objective.
pub trait Objective: Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> Result<f64>;

    /// Defaults to central finite differences; parameter shift must be
    /// provided by the implementor.
    fn gradient(&self, x: &[f64], mode: GradientMode, fd_step: f64) -> Result<Vec<f64>> {
        match mode {
            GradientMode::FiniteDifference => central_difference(|p| self.value(p), x, fd_step),
            GradientMode::ParameterShift => Err(HebmError::Unsupported(
                "parameter-shift gradient for this objective".into(),
            )),
        }
    }
}

/// Central differences `(f(x + h e_i) - f(x - h e_i)) / 2h`, components
/// evaluated in parallel.
pub fn central_difference<F>(f: F, x: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    (0..x.len())
        .into_par_iter()
        .map(|i| {
            let mut p = x.to_vec();
            p[i] = x[i] + h;
            let up = f(&p)?;
            p[i] = x[i] - h;
            let down = f(&p)?;
            if !up.is_finite() || !down.is_finite() {
                return Err(HebmError::NonFiniteLoss(p));
            }
            Ok((up - down) / (2.0 * h))
        })
        .collect()
}

/// Uniform in `[-0.1, 0.1]`, deterministic per seed.
pub fn random_initial_parameters(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random_range(-0.1..=0.1)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    MaxIterations,
    LossChange,
    GradientNorm,
    LineSearchFailed,
    TargetLoss,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimization {
    pub parameters: Vec<f64>,
    /// Loss at the start followed by the loss of every accepted iterate.
    pub losses: Vec<f64>,
    /// Parameters matching each entry of `losses`.
    pub parameter_history: Vec<Vec<f64>>,
    pub iterations: usize,
    pub termination: Termination,
    pub wall_time_seconds: f64,
}

impl Minimization {
    pub fn final_loss(&self) -> f64 {
        *self.losses.last().expect("losses always holds the starting loss")
    }

    pub fn converged(&self) -> bool {
        matches!(
            self.termination,
            Termination::LossChange | Termination::GradientNorm | Termination::TargetLoss
        )
    }
}

struct Feasible<'a> {
    bounds: Option<&'a [(f64, f64)]>,
}

impl Feasible<'_> {
    fn project(&self, x: &mut [f64]) {
        if let Some(b) = self.bounds {
            for (xi, &(lo, hi)) in x.iter_mut().zip(b) {
                *xi = xi.clamp(lo, hi);
            }
        }
    }

    /// `max_i |P(x - g)_i - x_i|`.
    fn projected_gradient_norm(&self, x: &[f64], g: &[f64]) -> f64 {
        let mut step: Vec<f64> = x.iter().zip(g).map(|(a, b)| a - b).collect();
        self.project(&mut step);
        step.iter().zip(x).map(|(s, a)| (s - a).abs()).fold(0.0, f64::max)
    }

    fn active(&self, x: &[f64], g: &[f64]) -> Vec<bool> {
        match self.bounds {
            None => vec![false; x.len()],
            Some(b) => x
                .iter()
                .zip(g)
                .zip(b)
                .map(|((&xi, &gi), &(lo, hi))| (xi <= lo && gi > 0.0) || (xi >= hi && gi < 0.0))
                .collect(),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Two-loop recursion: returns `-H g` restricted to the free variables.
fn lbfgs_direction(g: &[f64], active: &[bool], memory: &VecDeque<(Vec<f64>, Vec<f64>)>) -> Vec<f64> {
    let mask = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .zip(active)
            .map(|(&x, &a)| if a { 0.0 } else { x })
            .collect()
    };
    let mut q = mask(g);
    let mut alphas = Vec::with_capacity(memory.len());
    let masked: Vec<(Vec<f64>, Vec<f64>)> = memory.iter().map(|(s, y)| (mask(s), mask(y))).collect();
    for (s, y) in masked.iter().rev() {
        let sy = dot(s, y);
        if sy <= 0.0 {
            alphas.push(0.0);
            continue;
        }
        let a = dot(s, &q) / sy;
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    if let Some((s, y)) = masked.last() {
        let (sy, yy) = (dot(s, y), dot(y, y));
        if sy > 0.0 && yy > 0.0 {
            let gamma = sy / yy;
            q.iter_mut().for_each(|qi| *qi *= gamma);
        }
    }
    for ((s, y), a) in masked.iter().zip(alphas.iter().rev()) {
        let sy = dot(s, y);
        if sy <= 0.0 {
            continue;
        }
        let b = dot(y, &q) / sy;
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter().map(|v| -v).collect()
}

/// Minimizes `objective` from `x0`.
pub fn minimize<O: Objective + ?Sized>(
    objective: &O,
    x0: &[f64],
    config: &OptimizerConfig,
) -> Result<Minimization> {
    let start = Instant::now();
    let n = objective.dim();
    if x0.len() != n {
        return Err(HebmError::DimensionMismatch {
            expected: n,
            found: x0.len(),
        });
    }
    config.validate(n)?;
    let bx = Feasible {
        bounds: config.bounds.as_deref(),
    };

    let mut x = x0.to_vec();
    bx.project(&mut x);
    let mut f = objective.value(&x)?;
    if !f.is_finite() {
        return Err(HebmError::NonFiniteLoss(x));
    }
    let mut losses = vec![f];
    let mut parameter_history = vec![x.clone()];
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>)> = VecDeque::with_capacity(config.history_size);
    let mut termination = Termination::MaxIterations;
    let reached = |f: f64| config.target_loss.is_some_and(|t| f < t);
    if reached(f) {
        termination = Termination::TargetLoss;
    }

    if config.max_iterations == 0 || termination == Termination::TargetLoss {
        return Ok(Minimization {
            parameters: x,
            losses,
            parameter_history,
            iterations: 0,
            termination,
            wall_time_seconds: start.elapsed().as_secs_f64(),
        });
    }

    let mut g = objective.gradient(&x, config.gradient_mode, config.fd_step)?;
    let mut iterations = 0;
    const ARMIJO_C1: f64 = 1e-4;

    while iterations < config.max_iterations {
        if bx.projected_gradient_norm(&x, &g) <= config.gradient_tol {
            termination = Termination::GradientNorm;
            break;
        }
        let active = bx.active(&x, &g);

        let mut accepted = None;
        // Try the quasi-Newton direction first; on failure retry once along
        // the steepest-descent direction with a cleared memory.
        for attempt in 0..2 {
            let steepest = attempt == 1 || memory.is_empty();
            let mut d = if steepest {
                g.iter()
                    .zip(&active)
                    .map(|(&gi, &a)| if a { 0.0 } else { -gi })
                    .collect()
            } else {
                lbfgs_direction(&g, &active, &memory)
            };
            let mut gd = dot(&g, &d);
            if !steepest && !(gd < 0.0) {
                memory.clear();
                d = g
                    .iter()
                    .zip(&active)
                    .map(|(&gi, &a)| if a { 0.0 } else { -gi })
                    .collect();
                gd = dot(&g, &d);
            }
            if !(gd < 0.0) {
                break;
            }
            let mut alpha = if steepest {
                let dmax = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                (1.0f64).min(1.0 / dmax.max(f64::MIN_POSITIVE))
            } else {
                1.0
            };
            for _ in 0..config.max_line_search_steps {
                let mut xn: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + alpha * di).collect();
                bx.project(&mut xn);
                let step: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
                let decrease = dot(&g, &step);
                let fnew = objective.value(&xn)?;
                if fnew.is_finite() && decrease < 0.0 && fnew <= f + ARMIJO_C1 * decrease && fnew <= f {
                    accepted = Some((xn, fnew));
                    break;
                }
                // quadratic interpolation along the ray, safeguarded
                let next = if fnew.is_finite() {
                    let denom = 2.0 * (fnew - f - gd * alpha);
                    if denom > 0.0 {
                        -gd * alpha * alpha / denom
                    } else {
                        0.5 * alpha
                    }
                } else {
                    0.1 * alpha
                };
                alpha = next.clamp(0.1 * alpha, 0.5 * alpha);
            }
            if accepted.is_some() || steepest {
                break;
            }
            memory.clear();
        }

        let Some((xn, fnew)) = accepted else {
            termination = Termination::LineSearchFailed;
            break;
        };
        let gn = objective.gradient(&xn, config.gradient_mode, config.fd_step)?;
        if let Some(bad) = gn.iter().find(|v| !v.is_finite()) {
            return Err(HebmError::InvalidConfig(format!(
                "non-finite gradient component {bad}"
            )));
        }
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() && sy > 0.0 {
            if memory.len() == config.history_size {
                memory.pop_front();
            }
            memory.push_back((s, y));
        }

        let previous = f;
        x = xn;
        f = fnew;
        g = gn;
        iterations += 1;
        losses.push(f);
        parameter_history.push(x.clone());

        if reached(f) {
            termination = Termination::TargetLoss;
            break;
        }
        if previous - f <= config.convergence_tol * previous.abs().max(f.abs()) {
            termination = Termination::LossChange;
            break;
        }
    }

    Ok(Minimization {
        parameters: x,
        losses,
        parameter_history,
        iterations,
        termination,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Quadratic {
        target: Vec<f64>,
    }

    impl Objective for Quadratic {
        fn dim(&self) -> usize {
            self.target.len()
        }
        fn value(&self, x: &[f64]) -> Result<f64> {
            Ok(x.iter().zip(&self.target).map(|(a, b)| (a - b) * (a - b)).sum())
        }
    }

    struct Rosenbrock;

    impl Objective for Rosenbrock {
        fn dim(&self) -> usize {
            2
        }
        fn value(&self, x: &[f64]) -> Result<f64> {
            Ok((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2))
        }
        fn gradient(&self, x: &[f64], _: GradientMode, _: f64) -> Result<Vec<f64>> {
            Ok(vec![
                -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]),
                200.0 * (x[1] - x[0] * x[0]),
            ])
        }
    }

    #[test]
    fn fd_gradient_of_sum_of_squares() {
        let x = [0.3, -1.2, 2.5];
        let g = central_difference(|p| Ok(p.iter().map(|v| v * v).sum()), &x, 1e-5).unwrap();
        for (gi, xi) in g.iter().zip(x) {
            assert!((gi - 2.0 * xi).abs() < 1e-8);
        }
    }

    #[test]
    fn convex_quadratic_converges_fast() {
        let obj = Quadratic { target: vec![1.0; 6] };
        let res = minimize(&obj, &[0.0; 6], &OptimizerConfig::default()).unwrap();
        assert!(res.final_loss() < 1e-12);
        assert!(res.iterations <= 25, "took {} iterations", res.iterations);
        for p in &res.parameters {
            assert!((p - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn rosenbrock_minimum() {
        let res = minimize(&Rosenbrock, &[-1.2, 1.0], &OptimizerConfig::default()).unwrap();
        assert!((res.parameters[0] - 1.0).abs() < 1e-5, "{:?}", res);
        assert!((res.parameters[1] - 1.0).abs() < 1e-5, "{:?}", res);
    }

    #[test]
    fn active_lower_bound() {
        let obj = Quadratic { target: vec![0.0] };
        let cfg = OptimizerConfig {
            bounds: Some(vec![(1.0, 2.0)]),
            ..Default::default()
        };
        let res = minimize(&obj, &[1.7], &cfg).unwrap();
        assert_eq!(res.parameters[0], 1.0);
        assert!((res.final_loss() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn losses_are_monotone() {
        let res = minimize(&Rosenbrock, &[-1.2, 1.0], &OptimizerConfig::default()).unwrap();
        for w in res.losses.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        assert_eq!(res.losses.len(), res.parameter_history.len());
    }

    #[test]
    fn zero_iterations_reports_start() {
        let obj = Quadratic { target: vec![1.0; 2] };
        let cfg = OptimizerConfig {
            max_iterations: 0,
            ..Default::default()
        };
        let res = minimize(&obj, &[0.0, 0.0], &cfg).unwrap();
        assert_eq!(res.iterations, 0);
        assert_eq!(res.losses, vec![2.0]);
    }

    #[test]
    fn target_loss_stops_early() {
        let cfg = OptimizerConfig {
            target_loss: Some(1e-2),
            ..Default::default()
        };
        let res = minimize(&Rosenbrock, &[-1.2, 1.0], &cfg).unwrap();
        assert_eq!(res.termination, Termination::TargetLoss);
        assert!(res.final_loss() < 1e-2);
        assert!(res.losses[res.losses.len() - 2] >= 1e-2);
        let res = minimize(&Rosenbrock, &[1.0, 1.0], &cfg).unwrap();
        assert_eq!((res.iterations, res.termination), (0, Termination::TargetLoss));
    }

    #[test]
    fn config_validation() {
        let obj = Quadratic { target: vec![1.0; 2] };
        for cfg in [
            OptimizerConfig {
                fd_step: 0.0,
                ..Default::default()
            },
            OptimizerConfig {
                history_size: 0,
                ..Default::default()
            },
            OptimizerConfig {
                bounds: Some(vec![(0.0, 1.0)]),
                ..Default::default()
            },
            OptimizerConfig {
                bounds: Some(vec![(1.0, 0.0); 2]),
                ..Default::default()
            },
        ] {
            assert!(minimize(&obj, &[0.0, 0.0], &cfg).is_err());
        }
        assert!(minimize(&obj, &[0.0], &OptimizerConfig::default()).is_err());
    }

    #[test]
    fn parameter_shift_needs_an_override() {
        let obj = Quadratic { target: vec![1.0] };
        assert!(matches!(
            obj.gradient(&[0.0], GradientMode::ParameterShift, 1e-6),
            Err(HebmError::Unsupported(_))
        ));
    }

    #[test]
    fn initial_parameters() {
        let a = random_initial_parameters(16, 7);
        assert_eq!(a, random_initial_parameters(16, 7));
        assert_ne!(a, random_initial_parameters(16, 8));
        assert!(a.iter().all(|v| (-0.1..=0.1).contains(v)));
    }
}
