//! Continuous-time ES and its weak-limit averaged flow.
//!
//! For `ẋ_i = √(α·ω_i)·cos(ω_i·t + k·J(x, t))` the averaged system is
//! `ẋ = −(kα/2)·∇J(x, t)`. Both are integrated here with classical
//! fourth-order Runge-Kutta on the same time grid so their sup-norm gap can
//! be measured directly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::EsError;

/// Time-stamped samples of an `n`-dimensional trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.points.last().map(Vec::as_slice)
    }
}

fn axpy(x: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    x.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

fn rk4<F>(mut f: F, x0: &[f64], horizon: f64, dt: f64) -> Result<Trajectory, EsError>
where
    F: FnMut(&[f64], f64) -> Result<Vec<f64>, EsError>,
{
    let steps = (horizon / dt).round() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    let mut x = x0.to_vec();
    times.push(0.0);
    points.push(x.clone());
    for n in 0..steps {
        let t = n as f64 * dt;
        let k1 = f(&x, t)?;
        let k2 = f(&axpy(&x, 0.5 * dt, &k1), t + 0.5 * dt)?;
        let k3 = f(&axpy(&x, 0.5 * dt, &k2), t + 0.5 * dt)?;
        let k4 = f(&axpy(&x, dt, &k3), t + dt)?;
        for i in 0..x.len() {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        times.push((n + 1) as f64 * dt);
        points.push(x.clone());
    }
    Ok(Trajectory { times, points })
}

fn check_grid(horizon: f64, dt: f64) -> Result<(), EsError> {
    if !(horizon >= 0.0 && dt > 0.0 && horizon.is_finite()) {
        return Err(EsError::InvalidParams(format!(
            "integration grid needs horizon >= 0 and dt > 0, got {horizon} and {dt}"
        )));
    }
    Ok(())
}

/// Integrates `ẋ = −(kα/2)·∇J(x, t)` from `x0` over `[0, horizon]`.
pub fn averaged_flow<G>(mut grad_j: G, kalpha: f64, x0: &[f64], horizon: f64, dt: f64) -> Result<Trajectory, EsError>
where
    G: FnMut(&[f64], f64) -> Vec<f64>,
{
    check_grid(horizon, dt)?;
    if !(kalpha >= 0.0) {
        return Err(EsError::InvalidParams(format!("kalpha must be non-negative, got {kalpha}")));
    }
    rk4(
        |x, t| {
            let g = grad_j(x, t);
            if g.len() != x.len() || g.iter().any(|v| !v.is_finite()) {
                return Err(EsError::NonFiniteGradient {
                    t,
                    detail: format!("∇J({x:?}) = {g:?}"),
                });
            }
            Ok(g.iter().map(|v| -0.5 * kalpha * v).collect())
        },
        x0,
        horizon,
        dt,
    )
}

/// Continuous-time bounded ES on a static-map plant `ẋ_i = u_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EsFlow {
    pub alpha: f64,
    pub k: f64,
    pub omega: f64,
    pub ratios: Vec<f64>,
    /// Standard deviation of additive Gaussian noise on the measured cost.
    pub noise_std: f64,
    pub seed: u64,
}

impl EsFlow {
    /// Integrates the dithered system with the measured cost
    /// `y = J(x, t) + n`. Noise is drawn once per integration step.
    pub fn integrate<C>(&self, mut cost: C, x0: &[f64], horizon: f64, dt: f64) -> Result<Trajectory, EsError>
    where
        C: FnMut(&[f64], f64) -> f64,
    {
        check_grid(horizon, dt)?;
        if x0.len() > self.ratios.len() {
            return Err(EsError::InvalidParams(format!(
                "{} channels need {} frequency ratios",
                x0.len(),
                x0.len()
            )));
        }
        if !(self.alpha >= 0.0 && self.k >= 0.0 && self.omega > 0.0 && self.noise_std >= 0.0) {
            return Err(EsError::InvalidParams("ES flow needs alpha, k, noise >= 0 and omega > 0".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let normal = Normal::new(0.0, self.noise_std.max(f64::MIN_POSITIVE)).expect("valid std");
        let mut noise = 0.0;
        let mut last_step_time = f64::NEG_INFINITY;
        rk4(
            |x, t| {
                let step_start = (t / dt).floor() * dt;
                if self.noise_std > 0.0 && step_start > last_step_time {
                    noise = normal.sample(&mut rng);
                    last_step_time = step_start;
                }
                let y = cost(x, t) + noise;
                if !y.is_finite() {
                    return Err(EsError::NonFiniteCost(y));
                }
                Ok((0..x.len())
                    .map(|i| {
                        let w = self.ratios[i] * self.omega;
                        (self.alpha * w).sqrt() * (w * t + self.k * y).cos()
                    })
                    .collect())
            },
            x0,
            horizon,
            dt,
        )
    }
}

/// Largest Euclidean distance between time-aligned samples.
pub fn averaging_gap(es: &Trajectory, averaged: &Trajectory) -> Result<f64, EsError> {
    if es.len() != averaged.len() {
        return Err(EsError::LengthMismatch(es.len(), averaged.len()));
    }
    if es.times.iter().zip(&averaged.times).any(|(a, b)| (a - b).abs() > 1e-9) {
        return Err(EsError::InvalidParams("trajectories are not time-aligned".into()));
    }
    let mut gap: f64 = 0.0;
    for (a, b) in es.points.iter().zip(&averaged.points) {
        if a.len() != b.len() {
            return Err(EsError::LengthMismatch(a.len(), b.len()));
        }
        let d = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        gap = gap.max(d);
    }
    Ok(gap)
}

/// `J(x) = ‖x‖²` benchmark comparing the dithered system with its
/// averaged flow `ẋ = −kα·x`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticBenchmark {
    pub x0: Vec<f64>,
    pub k: f64,
    pub alpha: f64,
    pub ratios: Vec<f64>,
    pub horizon: f64,
    pub dt: f64,
    pub noise_std: f64,
    pub seed: u64,
}

impl Default for QuadraticBenchmark {
    fn default() -> Self {
        Self {
            x0: vec![1.0, 1.0],
            k: 5.0,
            alpha: 0.2,
            ratios: vec![1.0, 2.9],
            horizon: 5.0,
            dt: 1e-4,
            noise_std: 0.0,
            seed: 0,
        }
    }
}

/// Outcome of one benchmark run at a single base frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRun {
    pub omega: f64,
    pub es: Trajectory,
    pub averaged: Trajectory,
    pub gap: f64,
}

impl QuadraticBenchmark {
    pub fn run(&self, omega: f64) -> Result<BenchmarkRun, EsError> {
        let flow = EsFlow {
            alpha: self.alpha,
            k: self.k,
            omega,
            ratios: self.ratios.clone(),
            noise_std: self.noise_std,
            seed: self.seed,
        };
        let es = flow.integrate(|x, _| x.iter().map(|v| v * v).sum(), &self.x0, self.horizon, self.dt)?;
        let averaged = averaged_flow(
            |x, _| x.iter().map(|v| 2.0 * v).collect(),
            self.k * self.alpha,
            &self.x0,
            self.horizon,
            self.dt,
        )?;
        let gap = averaging_gap(&es, &averaged)?;
        Ok(BenchmarkRun {
            omega,
            es,
            averaged,
            gap,
        })
    }
}
