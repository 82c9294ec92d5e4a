//! PALM and accelerated PALM with adaptive momentum.
//!
//! Both solvers alternate a projected gradient step on `W` (onto the
//! row-sparse nonnegative set) with one on `H` (onto the nonnegative
//! orthant), using inverse step sizes `c_k = γ·L_W` and `d_k = γ·L_H`.
//!
//! The accelerated variant first extrapolates both blocks,
//! `W̃ = W + β(W − W_prev)`, takes the two projected steps from there, and
//! keeps the result only if
//!
//! ```text
//! F(W', H') ≤ F(W, H) − ρ₀ ‖(W' − W̃, H' − H̃)‖²
//! ```
//!
//! On success `β` grows by `t` (capped at `β_max`); otherwise the step is
//! redone from the non-extrapolated point and `β` shrinks by `t`. Either way
//! the objective never increases.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::objective::{self, ProblemSpec};
use crate::prox;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Algorithm {
    Palm,
    #[default]
    AccPalm,
}

/// Source of the sufficient-decrease constant ρ₀.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Rho0 {
    /// `min{½(c_k − L_W), ½(d_k − L_H)}` from the current step sizes.
    #[default]
    Derived,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BetaSchedule {
    /// Multiply by `t` on acceptance, divide on rejection.
    #[default]
    Adaptive,
    /// Keep `β₀` for the whole run.
    Fixed,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub max_iter: usize,
    /// Stop once the relative change of `(W, H)` drops below this.
    pub epsilon: f64,
    pub beta0: f64,
    pub beta_max: f64,
    pub t_factor: f64,
    pub beta_schedule: BetaSchedule,
    /// Step-size inflation over the Lipschitz moduli. Must exceed 1 so that
    /// ρ₀ is strictly positive.
    pub gamma_step: f64,
    pub rho0: Rho0,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::AccPalm,
            max_iter: 1000,
            epsilon: 1e-3,
            beta0: 0.5,
            beta_max: 0.99,
            t_factor: 1.1,
            beta_schedule: BetaSchedule::Adaptive,
            gamma_step: 1.01,
            rho0: Rho0::Derived,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn palm() -> Self {
        Self {
            algorithm: Algorithm::Palm,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter", "must be positive"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::invalid("epsilon", "must be positive"));
        }
        if !(0.0..1.0).contains(&self.beta_max) {
            return Err(Error::invalid("beta_max", "must be in [0, 1)"));
        }
        if !(self.beta0 >= 0.0 && self.beta0 <= self.beta_max) {
            return Err(Error::invalid("beta0", "must be in [0, beta_max]"));
        }
        if !(self.t_factor > 1.0 && self.t_factor.is_finite()) {
            return Err(Error::invalid("t_factor", "must be greater than 1"));
        }
        if !(self.gamma_step > 1.0 && self.gamma_step.is_finite()) {
            return Err(Error::invalid("gamma_step", "must be greater than 1"));
        }
        if let Rho0::Fixed(v) = self.rho0 {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid("rho0", "fixed value must be nonnegative"));
            }
        }
        Ok(())
    }
}

/// Iterate pair plus what the next step needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub w: DenseMatrix,
    pub h: DenseMatrix,
    pub w_prev: DenseMatrix,
    pub h_prev: DenseMatrix,
    pub beta: f64,
    pub iter: usize,
    pub c_k: f64,
    pub d_k: f64,
    /// `F(w, h)`.
    pub objective: f64,
}

impl SolverState {
    /// State at iteration 0 with `(W⁻¹, H⁻¹) = (W⁰, H⁰)`.
    pub fn new(w: DenseMatrix, h: DenseMatrix, spec: &ProblemSpec, beta0: f64) -> Result<Self> {
        let objective = objective::smooth_objective(&w, &h, spec)?;
        Ok(Self {
            w_prev: w.clone(),
            h_prev: h.clone(),
            w,
            h,
            beta: beta0,
            iter: 0,
            c_k: 0.0,
            d_k: 0.0,
            objective,
        })
    }

    /// `W ≥ 0` with at most `k` nonzero rows, and `H ≥ 0`.
    pub fn is_feasible(&self, sparsity_k: usize) -> bool {
        is_feasible(&self.w, &self.h, sparsity_k)
    }
}

/// One row of the convergence trace.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationRecord {
    /// Index of the iterate this step produced (first step is 1).
    pub iter: usize,
    /// `F` at the new iterate.
    pub objective: f64,
    /// `F` at the iterate the step started from.
    pub objective_prev: f64,
    pub rel_change: f64,
    /// Momentum used for this step (0 for plain PALM).
    pub beta: f64,
    /// The extrapolated step was kept. Always false for plain PALM.
    pub accepted: bool,
    pub c_k: f64,
    pub d_k: f64,
    pub rho0: f64,
    /// `‖(W' − W̃, H' − H̃)‖²` for the step that was kept.
    pub step_norm_sq: f64,
    /// `F(W̃, H̃)` when the extrapolated point is feasible; otherwise the
    /// composite objective there is +∞ and nothing is recorded.
    pub extrapolated_objective: Option<f64>,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConvergenceTrace {
    pub initial_objective: f64,
    pub records: Vec<IterationRecord>,
    pub converged: bool,
}

impl ConvergenceTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn final_objective(&self) -> f64 {
        self.records
            .last()
            .map_or(self.initial_objective, |r| r.objective)
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub w: DenseMatrix,
    pub h: DenseMatrix,
    pub trace: ConvergenceTrace,
}

/// Hooks into a running solve. The core crate has no clock, so elapsed time
/// comes from here.
pub trait Monitor {
    fn elapsed_seconds(&mut self) -> f64 {
        0.0
    }

    fn observe(&mut self, _state: &SolverState, _record: &IterationRecord) {}
}

impl Monitor for () {}

/// Random nonnegative start.
///
/// Entries are uniform on `[0, s]` with `s = 2·sqrt(mean(X)/r)`, which makes
/// `E[(W⁰H⁰)_ij] = mean(X)`. `W⁰` is then projected onto the row budget.
pub fn init_factors(spec: &ProblemSpec, seed: u64) -> Result<(DenseMatrix, DenseMatrix)> {
    let (p, n) = spec.x().shape();
    let r = spec.rank();
    let scale = 2.0 * libm::sqrt(spec.x().mean() / r as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = DenseMatrix::from_fn(p, r, |_, _| scale * rng.random::<f64>());
    let h = DenseMatrix::from_fn(r, n, |_, _| scale * rng.random::<f64>());
    let (w, _) = prox::project_row_sparse(&w, spec.sparsity_k())?;
    Ok((w, h))
}

struct Pass {
    w: DenseMatrix,
    h: DenseMatrix,
    c_k: f64,
    d_k: f64,
    rho0: f64,
}

/// One W step then one H step. The W gradient is taken at `(w_from, h_grad)`
/// and the H gradient at `(W', h_from)`.
fn proximal_pass(
    w_from: &DenseMatrix,
    h_grad: &DenseMatrix,
    h_from: &DenseMatrix,
    spec: &ProblemSpec,
    config: &SolverConfig,
    iter: usize,
) -> Result<Pass> {
    let gamma = config.gamma_step;

    let lw = objective::lipschitz_w(h_grad);
    let c_k = gamma * lw;
    let gw = objective::grad_w(w_from, h_grad, spec)?;
    if !gw.is_finite() {
        return Err(Error::NonFiniteIterate { iter });
    }
    let (w, _) = prox::project_row_sparse(&w_from.add_scaled(-1.0 / c_k, &gw)?, spec.sparsity_k())?;

    let lh = objective::lipschitz_h(&w, spec);
    let d_k = gamma * lh;
    let gh = objective::grad_h(&w, h_from, spec)?;
    if !gh.is_finite() {
        return Err(Error::NonFiniteIterate { iter });
    }
    let h = prox::project_nonneg(&h_from.add_scaled(-1.0 / d_k, &gh)?);

    let rho0 = match config.rho0 {
        Rho0::Derived => 0.5 * (c_k - lw).min(d_k - lh),
        Rho0::Fixed(v) => v,
    };
    Ok(Pass {
        w,
        h,
        c_k,
        d_k,
        rho0,
    })
}

/// Result of one solver step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: SolverState,
    pub record: IterationRecord,
}

/// One PALM iteration from `state`.
pub fn palm_step(
    state: &SolverState,
    spec: &ProblemSpec,
    config: &SolverConfig,
) -> Result<StepOutcome> {
    let iter = state.iter + 1;
    let pass = proximal_pass(&state.w, &state.h, &state.h, spec, config, iter)?;
    let objective = objective::smooth_objective(&pass.w, &pass.h, spec)?;
    if !objective.is_finite() {
        return Err(Error::NonFiniteIterate { iter });
    }
    let step_norm_sq = pass.w.distance_sq(&state.w)? + pass.h.distance_sq(&state.h)?;
    debug_assert!(
        objective
            <= state.objective - pass.rho0 * step_norm_sq + 1e-9 * state.objective.abs().max(1.0),
        "sufficient decrease violated at iteration {iter}"
    );
    let record = IterationRecord {
        iter,
        objective,
        objective_prev: state.objective,
        rel_change: relative_change(&pass.w, &pass.h, &state.w, &state.h)?,
        beta: 0.0,
        accepted: false,
        c_k: pass.c_k,
        d_k: pass.d_k,
        rho0: pass.rho0,
        step_norm_sq,
        extrapolated_objective: Some(state.objective),
        elapsed_s: 0.0,
    };
    let next = SolverState {
        w_prev: state.w.clone(),
        h_prev: state.h.clone(),
        w: pass.w,
        h: pass.h,
        beta: state.beta,
        iter,
        c_k: pass.c_k,
        d_k: pass.d_k,
        objective,
    };
    Ok(StepOutcome {
        state: next,
        record,
    })
}

/// One accelerated iteration from `state`.
pub fn acc_palm_step(
    state: &SolverState,
    spec: &ProblemSpec,
    config: &SolverConfig,
) -> Result<StepOutcome> {
    let iter = state.iter + 1;
    let beta = state.beta;
    let (w_ex, h_ex) = if beta == 0.0 {
        (state.w.clone(), state.h.clone())
    } else {
        (
            state.w.add_scaled(beta, &state.w.sub(&state.w_prev)?)?,
            state.h.add_scaled(beta, &state.h.sub(&state.h_prev)?)?,
        )
    };

    let pass = proximal_pass(&w_ex, &state.h, &h_ex, spec, config, iter)?;
    let candidate = objective::smooth_objective(&pass.w, &pass.h, spec)?;
    let step_norm_sq = pass.w.distance_sq(&w_ex)? + pass.h.distance_sq(&h_ex)?;
    let accepted = candidate.is_finite() && candidate <= state.objective - pass.rho0 * step_norm_sq;

    let adaptive = config.beta_schedule == BetaSchedule::Adaptive;
    let (pass, objective, step_norm_sq, extrapolated_objective, next_beta) = if accepted {
        let extrapolated = if is_feasible(&w_ex, &h_ex, spec.sparsity_k()) {
            Some(objective::smooth_objective(&w_ex, &h_ex, spec)?)
        } else {
            None
        };
        let next_beta = if adaptive {
            (config.t_factor * beta).min(config.beta_max)
        } else {
            beta
        };
        (pass, candidate, step_norm_sq, extrapolated, next_beta)
    } else {
        let plain = proximal_pass(&state.w, &state.h, &state.h, spec, config, iter)?;
        let objective = objective::smooth_objective(&plain.w, &plain.h, spec)?;
        if !objective.is_finite() {
            return Err(Error::NonFiniteIterate { iter });
        }
        let step_norm_sq = plain.w.distance_sq(&state.w)? + plain.h.distance_sq(&state.h)?;
        let next_beta = if adaptive {
            beta / config.t_factor
        } else {
            beta
        };
        (
            plain,
            objective,
            step_norm_sq,
            Some(state.objective),
            next_beta,
        )
    };

    let record = IterationRecord {
        iter,
        objective,
        objective_prev: state.objective,
        rel_change: relative_change(&pass.w, &pass.h, &state.w, &state.h)?,
        beta,
        accepted,
        c_k: pass.c_k,
        d_k: pass.d_k,
        rho0: pass.rho0,
        step_norm_sq,
        extrapolated_objective,
        elapsed_s: 0.0,
    };
    let next = SolverState {
        w_prev: state.w.clone(),
        h_prev: state.h.clone(),
        w: pass.w,
        h: pass.h,
        beta: next_beta,
        iter,
        c_k: pass.c_k,
        d_k: pass.d_k,
        objective,
    };
    Ok(StepOutcome {
        state: next,
        record,
    })
}

/// Runs the configured algorithm from a seeded random start.
pub fn solve(spec: &ProblemSpec, config: &SolverConfig) -> Result<SolveOutput> {
    solve_monitored(spec, config, &mut ())
}

pub fn solve_monitored<M: Monitor + ?Sized>(
    spec: &ProblemSpec,
    config: &SolverConfig,
    monitor: &mut M,
) -> Result<SolveOutput> {
    config.validate()?;
    let (w0, h0) = init_factors(spec, config.seed)?;
    solve_from(spec, config, w0, h0, monitor)
}

/// Runs the configured algorithm from a caller-supplied start. `W⁰` is
/// projected onto the feasible set first.
pub fn solve_from<M: Monitor + ?Sized>(
    spec: &ProblemSpec,
    config: &SolverConfig,
    w0: DenseMatrix,
    h0: DenseMatrix,
    monitor: &mut M,
) -> Result<SolveOutput> {
    config.validate()?;
    let (w0, _) = prox::project_row_sparse(&w0, spec.sparsity_k())?;
    let h0 = prox::project_nonneg(&h0);
    let beta0 = match config.algorithm {
        Algorithm::Palm => 0.0,
        Algorithm::AccPalm => config.beta0,
    };
    let mut state = SolverState::new(w0, h0, spec, beta0)?;
    let mut trace = ConvergenceTrace {
        initial_objective: state.objective,
        records: Vec::new(),
        converged: false,
    };
    for _ in 0..config.max_iter {
        let StepOutcome {
            state: next,
            mut record,
        } = match config.algorithm {
            Algorithm::Palm => palm_step(&state, spec, config)?,
            Algorithm::AccPalm => acc_palm_step(&state, spec, config)?,
        };
        record.elapsed_s = monitor.elapsed_seconds();
        monitor.observe(&next, &record);
        let done = record.rel_change < config.epsilon;
        trace.records.push(record);
        state = next;
        if done {
            trace.converged = true;
            break;
        }
    }
    Ok(SolveOutput {
        w: state.w,
        h: state.h,
        trace,
    })
}

/// `‖(W' − W, H' − H)‖ / ‖(W, H)‖` with the joint Frobenius norm.
pub fn relative_change(
    w_next: &DenseMatrix,
    h_next: &DenseMatrix,
    w: &DenseMatrix,
    h: &DenseMatrix,
) -> Result<f64> {
    let num = w_next.distance_sq(w)? + h_next.distance_sq(h)?;
    let den = w.frobenius_norm_sq() + h.frobenius_norm_sq();
    Ok(if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        libm::sqrt(num / den)
    })
}

pub fn is_feasible(w: &DenseMatrix, h: &DenseMatrix, sparsity_k: usize) -> bool {
    w.min_value() >= 0.0 && h.min_value() >= 0.0 && prox::nonzero_rows(w) <= sparsity_k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphModel;

    fn uniform(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(0.0..1.0))
    }

    fn random_spec(p: usize, n: usize, r: usize, k: usize, lambda: f64, seed: u64) -> ProblemSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = uniform(p, n, &mut rng);
        let mut a = DenseMatrix::zeros(n, n);
        for j in 0..n {
            for l in (j + 1)..n {
                if rng.random_bool(0.3) {
                    a.set(j, l, 1.0);
                    a.set(l, j, 1.0);
                }
            }
        }
        ProblemSpec::new(x, r, k, lambda, GraphModel::from_adjacency(a).unwrap()).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = [
            SolverConfig {
                beta_max: 1.0,
                ..Default::default()
            },
            SolverConfig {
                beta0: 0.995,
                ..Default::default()
            },
            SolverConfig {
                t_factor: 1.0,
                ..Default::default()
            },
            SolverConfig {
                gamma_step: 1.0,
                ..Default::default()
            },
            SolverConfig {
                epsilon: 0.0,
                ..Default::default()
            },
            SolverConfig {
                max_iter: 0,
                ..Default::default()
            },
            SolverConfig {
                rho0: Rho0::Fixed(-1.0),
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn init_is_seeded_and_feasible() {
        let spec = random_spec(8, 10, 3, 4, 0.1, 1);
        let (w1, h1) = init_factors(&spec, 42).unwrap();
        let (w2, h2) = init_factors(&spec, 42).unwrap();
        assert_eq!(w1, w2);
        assert_eq!(h1, h2);
        assert!(prox::nonzero_rows(&w1) <= 4);
        assert!(is_feasible(&w1, &h1, 4));
        let (w3, _) = init_factors(&spec, 43).unwrap();
        assert_ne!(w1, w3);
    }

    #[test]
    fn init_matches_data_scale() {
        for (seed, k) in [(2u64, 12usize), (3, 6)] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = DenseMatrix::from_fn(12, 40, |_, _| rng.random_range(0.0..5.0));
            let spec = ProblemSpec::new(x, 3, k, 0.0, GraphModel::empty(40)).unwrap();
            let (w, h) = init_factors(&spec, seed).unwrap();
            let ratio = w.matmul(&h).unwrap().mean() / spec.x().mean();
            assert!((1.0 / 3.0..=3.0).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn fixed_point_has_zero_change() {
        // X = W H with W, H chosen so both gradients vanish
        let w = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]).unwrap();
        let h = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 1.0]]).unwrap();
        let x = w.matmul(&h).unwrap();
        let spec = ProblemSpec::new(x, 2, 2, 0.0, GraphModel::empty(2)).unwrap();
        let state = SolverState::new(w.clone(), h.clone(), &spec, 0.0).unwrap();
        let out = palm_step(&state, &spec, &SolverConfig::palm()).unwrap();
        assert_eq!(out.record.rel_change, 0.0);
        assert_eq!(out.state.w, w);
        assert_eq!(out.state.h, h);
    }

    #[test]
    fn step_from_zero_does_not_increase_objective() {
        let spec = random_spec(5, 6, 2, 5, 0.3, 4);
        let state = SolverState::new(
            DenseMatrix::zeros(5, 2),
            DenseMatrix::zeros(2, 6),
            &spec,
            0.0,
        )
        .unwrap();
        let out = palm_step(&state, &spec, &SolverConfig::palm()).unwrap();
        // with H = 0 the W gradient vanishes, so W stays 0
        assert_eq!(out.state.w, DenseMatrix::zeros(5, 2));
        assert!(out.record.objective <= out.record.objective_prev);
    }

    #[test]
    fn zero_beta_matches_palm() {
        let spec = random_spec(7, 9, 3, 4, 0.5, 5);
        let (w, h) = init_factors(&spec, 9).unwrap();
        let config = SolverConfig::default();
        let mut a = SolverState::new(w.clone(), h.clone(), &spec, 0.0).unwrap();
        let mut b = a.clone();
        for _ in 0..5 {
            let pa = palm_step(&a, &spec, &config).unwrap();
            let pb = acc_palm_step(&b, &spec, &config).unwrap();
            assert_eq!(pa.state.w, pb.state.w);
            assert_eq!(pa.state.h, pb.state.h);
            assert_eq!(pa.record.objective, pb.record.objective);
            a = pa.state;
            b = pb.state;
            b.beta = 0.0;
        }
    }

    #[test]
    fn first_extrapolation_is_a_no_op() {
        let spec = random_spec(6, 8, 2, 3, 0.2, 6);
        let (w, h) = init_factors(&spec, 1).unwrap();
        let state = SolverState::new(w, h, &spec, 0.5).unwrap();
        let config = SolverConfig::default();
        let acc = acc_palm_step(&state, &spec, &config).unwrap();
        let plain = palm_step(&state, &spec, &config).unwrap();
        assert!(acc.record.accepted);
        assert_eq!(acc.state.w, plain.state.w);
        assert_eq!(acc.state.h, plain.state.h);
        assert!((acc.state.beta - 0.55).abs() < 1e-15);
    }

    #[test]
    fn huge_epsilon_stops_after_one_iteration() {
        let spec = random_spec(6, 8, 2, 3, 0.2, 7);
        for algorithm in [Algorithm::Palm, Algorithm::AccPalm] {
            let config = SolverConfig {
                algorithm,
                epsilon: 1e300,
                ..Default::default()
            };
            let out = solve(&spec, &config).unwrap();
            assert_eq!(out.trace.iterations(), 1);
            assert!(out.trace.converged);
        }
    }

    #[test]
    fn max_iter_flags_non_convergence() {
        let spec = random_spec(6, 8, 2, 3, 0.2, 8);
        let config = SolverConfig {
            max_iter: 3,
            epsilon: 1e-14,
            ..Default::default()
        };
        let out = solve(&spec, &config).unwrap();
        assert_eq!(out.trace.iterations(), 3);
        assert!(!out.trace.converged);
    }

    #[test]
    fn rank_one_recovery_with_palm() {
        let w: Vec<f64> = (0..6).map(|i| 0.5 + i as f64 * 0.3).collect();
        let h: Vec<f64> = (0..8).map(|j| 1.0 + (j % 3) as f64).collect();
        let x = DenseMatrix::from_fn(6, 8, |i, j| w[i] * h[j]);
        let spec = ProblemSpec::new(x, 1, 6, 0.0, GraphModel::empty(8)).unwrap();
        let config = SolverConfig {
            max_iter: 500,
            epsilon: 1e-300,
            ..SolverConfig::palm()
        };
        let out = solve(&spec, &config).unwrap();
        assert!(
            out.trace.final_objective() < 1e-6,
            "{}",
            out.trace.final_objective()
        );
    }

    #[test]
    fn solver_is_monotone_feasible_and_bounded() {
        struct Check {
            k: usize,
            beta_max: f64,
            last: f64,
        }
        impl Monitor for Check {
            fn observe(&mut self, state: &SolverState, record: &IterationRecord) {
                assert!(state.is_feasible(self.k));
                assert!(state.beta >= 0.0 && state.beta <= self.beta_max);
                assert!(record.objective <= self.last + 1e-10);
                assert!(record.rho0 > 0.0);
                self.last = record.objective;
            }
        }
        let spec = random_spec(10, 12, 3, 5, 0.4, 9);
        for algorithm in [Algorithm::Palm, Algorithm::AccPalm] {
            let config = SolverConfig {
                algorithm,
                epsilon: 1e-8,
                ..Default::default()
            };
            let mut check = Check {
                k: 5,
                beta_max: config.beta_max,
                last: f64::INFINITY,
            };
            let out = solve_monitored(&spec, &config, &mut check).unwrap();
            assert!(out.trace.iterations() > 1);
        }
    }

    #[test]
    fn fixed_beta_schedule_keeps_beta() {
        let spec = random_spec(6, 8, 2, 3, 0.2, 10);
        let config = SolverConfig {
            beta_schedule: BetaSchedule::Fixed,
            beta0: 0.3,
            max_iter: 30,
            epsilon: 1e-12,
            ..Default::default()
        };
        let out = solve(&spec, &config).unwrap();
        assert!(out.trace.records.iter().all(|r| r.beta == 0.3));
    }

    #[test]
    fn runs_are_deterministic() {
        let spec = random_spec(8, 10, 3, 4, 0.5, 11);
        let config = SolverConfig {
            seed: 5,
            ..Default::default()
        };
        let a = solve(&spec, &config).unwrap();
        let b = solve(&spec, &config).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.w, b.w);
    }

    #[test]
    fn zero_lambda_ignores_the_graph() {
        let spec = random_spec(8, 10, 3, 8, 0.0, 12);
        let plain = ProblemSpec::new(spec.x().clone(), 3, 8, 0.0, GraphModel::empty(10)).unwrap();
        let config = SolverConfig::default();
        let a = solve(&spec, &config).unwrap();
        let b = solve(&plain, &config).unwrap();
        assert_eq!(a.trace, b.trace);
    }
}
