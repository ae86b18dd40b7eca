//! Seed-reproducible Langevin ensembles for the momentum process
//! dp = −γp dt + √(2D) dW per Cartesian component.
//!
//! Determinism contract: every trajectory owns an RNG stream derived only
//! from (seed, trajectory index), and reduction runs over fixed-size blocks
//! combined in index order, so results are bit-identical for any worker
//! thread count.
//!
//! An optional constant drift velocity u models a lab frame moving relative
//! to the background (force −γ(p + Mu)), and an optional constant external
//! force supports the compensating-force experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::Histogram;
use crate::transport::TransportCoefficients;

/// Trajectories per parallel work unit. Fixed: the reduction order (and so
/// the floating-point result) must not depend on thread count.
const BLOCK_TRAJECTORIES: usize = 4096;

/// Warn when γ·dt exceeds this; Euler–Maruyama accuracy degrades.
pub const GAMMA_DT_GUARD: f64 = 0.1;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialMomentum {
    /// Every trajectory starts at exactly p₀.
    Delta { p0: [f64; 3] },
    /// Zero-mean isotropic Gaussian with the given per-component variance.
    IsotropicGaussian { variance: f64 },
}

impl InitialMomentum {
    pub fn mean(&self) -> [f64; 3] {
        match self {
            InitialMomentum::Delta { p0 } => *p0,
            InitialMomentum::IsotropicGaussian { .. } => [0.0; 3],
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stepper {
    /// p′ = p(1 − γdt) + √(2D·dt)·ξ; weak order 1.
    EulerMaruyama,
    /// Exact Ornstein–Uhlenbeck transition density; any dt.
    ExactOu,
}

/// Which step indices to record. Step 0 and the final step are always
/// included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SampleSchedule {
    /// Evenly spaced in step index.
    Linear { n_samples: usize },
    /// Log-spaced step indices starting at `first_step`.
    Geometric { n_samples: usize, first_step: usize },
    /// Union of a linear and a geometric grid.
    Hybrid {
        n_linear: usize,
        n_geometric: usize,
        first_step: usize,
    },
}

impl SampleSchedule {
    pub fn sample_steps(&self, n_steps: usize) -> Vec<usize> {
        let mut steps = vec![0, n_steps];
        match self {
            SampleSchedule::Linear { n_samples } => {
                linear_steps(&mut steps, *n_samples, n_steps);
            }
            SampleSchedule::Geometric {
                n_samples,
                first_step,
            } => {
                geometric_steps(&mut steps, *n_samples, *first_step, n_steps);
            }
            SampleSchedule::Hybrid {
                n_linear,
                n_geometric,
                first_step,
            } => {
                linear_steps(&mut steps, *n_linear, n_steps);
                geometric_steps(&mut steps, *n_geometric, *first_step, n_steps);
            }
        }
        steps.sort_unstable();
        steps.dedup();
        steps
    }
}

fn linear_steps(out: &mut Vec<usize>, n_samples: usize, n_steps: usize) {
    for i in 1..n_samples {
        out.push(i * n_steps / n_samples.max(1));
    }
}

fn geometric_steps(out: &mut Vec<usize>, n_samples: usize, first_step: usize, n_steps: usize) {
    let first = first_step.max(1).min(n_steps) as f64;
    let last = n_steps as f64;
    if n_samples < 2 || first >= last {
        return;
    }
    let ratio = (last / first).powf(1.0 / (n_samples - 1) as f64);
    let mut s = first;
    for _ in 0..n_samples {
        out.push((s.round() as usize).min(n_steps));
        s *= ratio;
    }
}

/// Full description of an ensemble run; serialized into run manifests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub n_trajectories: usize,
    pub seed: u64,
    pub initial: InitialMomentum,
    pub coefficients: TransportCoefficients,
    pub mass: f64,
    /// Lab velocity u relative to the background; adds drift −γMu.
    #[serde(default)]
    pub drift_velocity: Option<[f64; 3]>,
    /// Constant applied force (e.g. the compensating force γMu).
    #[serde(default)]
    pub external_force: Option<[f64; 3]>,
    pub stepper: Stepper,
    pub schedule: SampleSchedule,
    pub histogram_bins: usize,
}

impl SimConfig {
    /// Checks hard preconditions; returns soft accuracy warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::domain(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.n_steps == 0 {
            return Err(Error::domain("n_steps must be >= 1"));
        }
        if self.n_trajectories == 0 {
            return Err(Error::domain("n_trajectories must be >= 1"));
        }
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::domain(format!(
                "mass must be > 0, got {}",
                self.mass
            )));
        }
        if self.histogram_bins == 0 {
            return Err(Error::domain("histogram_bins must be >= 1"));
        }
        if let InitialMomentum::IsotropicGaussian { variance } = self.initial {
            if !(variance >= 0.0) || !variance.is_finite() {
                return Err(Error::domain(format!(
                    "initial variance must be >= 0, got {variance}"
                )));
            }
        }
        let mut warnings = Vec::new();
        let gamma_dt = self.coefficients.gamma * self.dt;
        if gamma_dt >= GAMMA_DT_GUARD && self.stepper == Stepper::EulerMaruyama {
            warnings.push(format!(
                "gamma*dt = {gamma_dt:.3} exceeds the accuracy guard {GAMMA_DT_GUARD}; \
                 reduce dt or switch to the exact-ou stepper"
            ));
        }
        Ok(warnings)
    }

    pub fn sample_steps(&self) -> Vec<usize> {
        self.schedule.sample_steps(self.n_steps)
    }
}

/// One Euler–Maruyama update, all three components:
/// p′_α = p_α(1 − γdt) + √(2D·dt)·ξ_α.
pub fn euler_maruyama_step(
    p: [f64; 3],
    gamma: f64,
    diffusion: f64,
    dt: f64,
    noise: [f64; 3],
) -> [f64; 3] {
    let decay = 1.0 - gamma * dt;
    let kick = (2.0 * diffusion * dt).sqrt();
    [
        p[0] * decay + kick * noise[0],
        p[1] * decay + kick * noise[1],
        p[2] * decay + kick * noise[2],
    ]
}

/// One exact Ornstein–Uhlenbeck transition:
/// p′ = p·e^{−γdt} + √((D/γ)(1 − e^{−2γdt}))·ξ, reducing to pure diffusion
/// at γ = 0.
pub fn exact_ou_step(
    p: [f64; 3],
    gamma: f64,
    diffusion: f64,
    dt: f64,
    noise: [f64; 3],
) -> [f64; 3] {
    let (decay, kick) = if gamma == 0.0 {
        (1.0, (2.0 * diffusion * dt).sqrt())
    } else {
        (
            (-gamma * dt).exp(),
            (diffusion / gamma * (-f64::exp_m1(-2.0 * gamma * dt))).sqrt(),
        )
    };
    [
        p[0] * decay + kick * noise[0],
        p[1] * decay + kick * noise[1],
        p[2] * decay + kick * noise[2],
    ]
}

/// Per-step constants of the configured update rule.
#[derive(Copy, Clone, Debug)]
struct StepParams {
    decay: f64,
    kick: f64,
    /// Constant added each step: drift and external-force contribution.
    offset: [f64; 3],
}

impl StepParams {
    fn from_config(cfg: &SimConfig) -> Self {
        let gamma = cfg.coefficients.gamma;
        let diffusion = cfg.coefficients.diffusion;
        let dt = cfg.dt;
        let u = cfg.drift_velocity.unwrap_or([0.0; 3]);
        let f_ext = cfg.external_force.unwrap_or([0.0; 3]);
        match cfg.stepper {
            Stepper::EulerMaruyama => {
                // p′ = p(1−γdt) + (−γMu + F_ext)dt + kick·ξ
                let decay = 1.0 - gamma * dt;
                let kick = (2.0 * diffusion * dt).sqrt();
                let offset = [
                    (-gamma * cfg.mass * u[0] + f_ext[0]) * dt,
                    (-gamma * cfg.mass * u[1] + f_ext[1]) * dt,
                    (-gamma * cfg.mass * u[2] + f_ext[2]) * dt,
                ];
                StepParams {
                    decay,
                    kick,
                    offset,
                }
            }
            Stepper::ExactOu => {
                if gamma == 0.0 {
                    let kick = (2.0 * diffusion * dt).sqrt();
                    let offset = [f_ext[0] * dt, f_ext[1] * dt, f_ext[2] * dt];
                    StepParams {
                        decay: 1.0,
                        kick,
                        offset,
                    }
                } else {
                    // Fixed point p∞ = −Mu + F_ext/γ; exact relaxation onto it.
                    let decay = (-gamma * dt).exp();
                    let one_minus_decay = -f64::exp_m1(-gamma * dt);
                    let kick =
                        (diffusion / gamma * (-f64::exp_m1(-2.0 * gamma * dt))).sqrt();
                    let offset = [
                        (-cfg.mass * u[0] + f_ext[0] / gamma) * one_minus_decay,
                        (-cfg.mass * u[1] + f_ext[1] / gamma) * one_minus_decay,
                        (-cfg.mass * u[2] + f_ext[2] / gamma) * one_minus_decay,
                    ];
                    StepParams {
                        decay,
                        kick,
                        offset,
                    }
                }
            }
        }
    }

    #[inline]
    fn advance(&self, p: [f64; 3], noise: [f64; 3]) -> [f64; 3] {
        [
            p[0] * self.decay + self.offset[0] + self.kick * noise[0],
            p[1] * self.decay + self.offset[1] + self.kick * noise[1],
            p[2] * self.decay + self.offset[2] + self.kick * noise[2],
        ]
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for one trajectory, a pure function of
/// (seed, index): scheduling can never change which numbers a trajectory
/// sees.
fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut state = seed ^ (index.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Ensemble moments at the sampled times plus final-state material.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryStats {
    pub times: Vec<f64>,
    pub n_trajectories: usize,
    /// ⟨p_α⟩ at each sample time.
    pub mean_momentum: Vec<[f64; 3]>,
    /// Per-component population variance at each sample time.
    pub variance: Vec<[f64; 3]>,
    /// ⟨|p|²⟩ at each sample time.
    pub mean_p_squared: Vec<f64>,
    /// ⟨p_α(t_{k+1}) − p_α(t_k)⟩ between consecutive sample times.
    pub mean_increment: Vec<[f64; 3]>,
    /// Standard error of `mean_increment`.
    pub sem_increment: Vec<[f64; 3]>,
    /// ⟨p_α²(t_{k+1}) − p_α²(t_k)⟩ between consecutive sample times.
    pub mean_sq_increment: Vec<[f64; 3]>,
    /// Standard error of `mean_sq_increment`.
    pub sem_sq_increment: Vec<[f64; 3]>,
    /// Final momentum of every trajectory, in trajectory order.
    pub final_momenta: Vec<[f64; 3]>,
    /// Per-component histogram of the final momenta.
    pub histograms: Vec<Histogram>,
}

impl TrajectoryStats {
    /// Standard error of ⟨p_α⟩ at sample index k.
    pub fn sem_mean(&self, k: usize, component: usize) -> f64 {
        (self.variance[k][component] / self.n_trajectories as f64).sqrt()
    }
}

/// Raw sums for one block of trajectories.
struct BlockAccum {
    n: usize,
    sum_d: Vec<[f64; 3]>,
    sum_d2: Vec<[f64; 3]>,
    sum_incr: Vec<[f64; 3]>,
    sum_incr2: Vec<[f64; 3]>,
    sum_sq_incr: Vec<[f64; 3]>,
    sum_sq_incr2: Vec<[f64; 3]>,
    finals: Vec<[f64; 3]>,
}

impl BlockAccum {
    fn new(n_samples: usize) -> Self {
        BlockAccum {
            n: 0,
            sum_d: vec![[0.0; 3]; n_samples],
            sum_d2: vec![[0.0; 3]; n_samples],
            sum_incr: vec![[0.0; 3]; n_samples.saturating_sub(1)],
            sum_incr2: vec![[0.0; 3]; n_samples.saturating_sub(1)],
            sum_sq_incr: vec![[0.0; 3]; n_samples.saturating_sub(1)],
            sum_sq_incr2: vec![[0.0; 3]; n_samples.saturating_sub(1)],
            finals: Vec::new(),
        }
    }

    fn merge(&mut self, other: &BlockAccum) {
        self.n += other.n;
        for (a, b) in self.sum_d.iter_mut().zip(&other.sum_d) {
            for c in 0..3 {
                a[c] += b[c];
            }
        }
        for (a, b) in self.sum_d2.iter_mut().zip(&other.sum_d2) {
            for c in 0..3 {
                a[c] += b[c];
            }
        }
        for (a, b) in self.sum_incr.iter_mut().zip(&other.sum_incr) {
            for c in 0..3 {
                a[c] += b[c];
            }
        }
        for (a, b) in self.sum_incr2.iter_mut().zip(&other.sum_incr2) {
            for c in 0..3 {
                a[c] += b[c];
            }
        }
        for (a, b) in self.sum_sq_incr.iter_mut().zip(&other.sum_sq_incr) {
            for c in 0..3 {
                a[c] += b[c];
            }
        }
        for (a, b) in self.sum_sq_incr2.iter_mut().zip(&other.sum_sq_incr2) {
            for c in 0..3 {
                a[c] += b[c];
            }
        }
        self.finals.extend_from_slice(&other.finals);
    }
}

fn run_block(
    cfg: &SimConfig,
    params: &StepParams,
    sample_steps: &[usize],
    shift: [f64; 3],
    first_traj: usize,
    count: usize,
) -> Result<BlockAccum> {
    let mut acc = BlockAccum::new(sample_steps.len());
    acc.finals.reserve(count);
    let mut samples = vec![[0.0f64; 3]; sample_steps.len()];

    for traj in first_traj..first_traj + count {
        let mut rng = trajectory_rng(cfg.seed, traj as u64);
        let mut p = match cfg.initial {
            InitialMomentum::Delta { p0 } => p0,
            InitialMomentum::IsotropicGaussian { variance } => {
                let sd = variance.sqrt();
                [
                    sd * rng.sample::<f64, _>(StandardNormal),
                    sd * rng.sample::<f64, _>(StandardNormal),
                    sd * rng.sample::<f64, _>(StandardNormal),
                ]
            }
        };

        let mut next_sample = 0;
        if sample_steps[0] == 0 {
            samples[0] = p;
            next_sample = 1;
        }
        for step in 1..=cfg.n_steps {
            let noise = [
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            ];
            p = params.advance(p, noise);
            if next_sample < sample_steps.len() && sample_steps[next_sample] == step {
                if !(p[0].is_finite() && p[1].is_finite() && p[2].is_finite()) {
                    return Err(Error::NonFiniteTrajectory {
                        trajectory: traj,
                        step,
                    });
                }
                samples[next_sample] = p;
                next_sample += 1;
            }
        }

        for (k, s) in samples.iter().enumerate() {
            for c in 0..3 {
                let d = s[c] - shift[c];
                acc.sum_d[k][c] += d;
                acc.sum_d2[k][c] += d * d;
            }
        }
        for k in 0..samples.len().saturating_sub(1) {
            for c in 0..3 {
                let incr = samples[k + 1][c] - samples[k][c];
                acc.sum_incr[k][c] += incr;
                acc.sum_incr2[k][c] += incr * incr;
                let sq_incr =
                    samples[k + 1][c] * samples[k + 1][c] - samples[k][c] * samples[k][c];
                acc.sum_sq_incr[k][c] += sq_incr;
                acc.sum_sq_incr2[k][c] += sq_incr * sq_incr;
            }
        }
        acc.finals.push(*samples.last().expect("nonempty samples"));
        acc.n += 1;
    }
    Ok(acc)
}

/// Integrate the configured ensemble and aggregate its moments.
///
/// Bit-identical for identical (config, seed) at any thread count.
pub fn run_ensemble(config: &SimConfig) -> Result<TrajectoryStats> {
    config.validate()?;
    let sample_steps = config.sample_steps();
    let params = StepParams::from_config(config);
    let shift = config.initial.mean();

    let n_blocks = config.n_trajectories.div_ceil(BLOCK_TRAJECTORIES);
    let blocks: Vec<BlockAccum> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let first = b * BLOCK_TRAJECTORIES;
            let count = BLOCK_TRAJECTORIES.min(config.n_trajectories - first);
            run_block(config, &params, &sample_steps, shift, first, count)
        })
        .collect::<Result<Vec<_>>>()?;

    // Sequential merge in block order: the summation order is fixed.
    let mut total = BlockAccum::new(sample_steps.len());
    for block in &blocks {
        total.merge(block);
    }
    drop(blocks);

    let n = total.n as f64;
    let n_samples = sample_steps.len();
    let mut mean_momentum = Vec::with_capacity(n_samples);
    let mut variance = Vec::with_capacity(n_samples);
    let mut mean_p_squared = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let mut mean = [0.0; 3];
        let mut var = [0.0; 3];
        let mut p_sq = 0.0;
        for c in 0..3 {
            let m_d = total.sum_d[k][c] / n;
            mean[c] = shift[c] + m_d;
            var[c] = (total.sum_d2[k][c] / n - m_d * m_d).max(0.0);
            p_sq += var[c] + mean[c] * mean[c];
        }
        mean_momentum.push(mean);
        variance.push(var);
        mean_p_squared.push(p_sq);
    }

    let n_intervals = n_samples.saturating_sub(1);
    let mut mean_increment = Vec::with_capacity(n_intervals);
    let mut sem_increment = Vec::with_capacity(n_intervals);
    let mut mean_sq_increment = Vec::with_capacity(n_intervals);
    let mut sem_sq_increment = Vec::with_capacity(n_intervals);
    for k in 0..n_intervals {
        let mut m_i = [0.0; 3];
        let mut s_i = [0.0; 3];
        let mut m_q = [0.0; 3];
        let mut s_q = [0.0; 3];
        for c in 0..3 {
            m_i[c] = total.sum_incr[k][c] / n;
            s_i[c] = ((total.sum_incr2[k][c] / n - m_i[c] * m_i[c]).max(0.0) / n).sqrt();
            m_q[c] = total.sum_sq_incr[k][c] / n;
            s_q[c] = ((total.sum_sq_incr2[k][c] / n - m_q[c] * m_q[c]).max(0.0) / n).sqrt();
        }
        mean_increment.push(m_i);
        sem_increment.push(s_i);
        mean_sq_increment.push(m_q);
        sem_sq_increment.push(s_q);
    }

    let histograms = (0..3)
        .map(|c| {
            let comp: Vec<f64> = total.finals.iter().map(|p| p[c]).collect();
            let (mean, var) = crate::stats::mean_variance(&comp);
            let spread = (6.0 * var.sqrt()).max(1e-300);
            Histogram::from_samples(
                comp.iter().cloned(),
                mean - spread,
                mean + spread,
                config.histogram_bins,
            )
        })
        .collect();

    Ok(TrajectoryStats {
        times: sample_steps.iter().map(|&s| s as f64 * config.dt).collect(),
        n_trajectories: total.n,
        mean_momentum,
        variance,
        mean_p_squared,
        mean_increment,
        sem_increment,
        mean_sq_increment,
        sem_sq_increment,
        final_momenta: total.finals,
        histograms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::UnitSystem;
    use crate::transport::CoefficientSource;
    use approx::assert_relative_eq;

    fn coeffs(gamma: f64, diffusion: f64) -> TransportCoefficients {
        TransportCoefficients::new(
            gamma,
            diffusion,
            UnitSystem::Natural,
            CoefficientSource::External,
        )
        .unwrap()
    }

    fn base_config() -> SimConfig {
        SimConfig {
            dt: 0.01,
            n_steps: 100,
            n_trajectories: 1000,
            seed: 42,
            initial: InitialMomentum::Delta { p0: [0.0; 3] },
            coefficients: coeffs(1.0, 1.0),
            mass: 1.0,
            drift_velocity: None,
            external_force: None,
            stepper: Stepper::EulerMaruyama,
            schedule: SampleSchedule::Linear { n_samples: 10 },
            histogram_bins: 50,
        }
    }

    #[test]
    fn euler_step_matches_formula() {
        let p = euler_maruyama_step([1.0, -2.0, 0.5], 0.1, 0.3, 0.01, [0.2, -0.4, 1.0]);
        let kick = (2.0f64 * 0.3 * 0.01).sqrt();
        assert_relative_eq!(p[0], 1.0 * 0.999 + kick * 0.2, max_relative = 1e-15);
        assert_relative_eq!(p[1], -2.0 * 0.999 - kick * 0.4, max_relative = 1e-15);
        assert_relative_eq!(p[2], 0.5 * 0.999 + kick * 1.0, max_relative = 1e-15);
    }

    #[test]
    fn deterministic_decay_without_noise() {
        // D = 0: EM follows (1−γdt)^k exactly, the exact stepper e^{−γt}.
        let mut cfg = base_config();
        cfg.coefficients = coeffs(0.5, 0.0);
        cfg.initial = InitialMomentum::Delta {
            p0: [0.0, 0.0, 3.0],
        };
        cfg.n_trajectories = 4;

        let em = run_ensemble(&cfg).unwrap();
        for (k, &t) in em.times.iter().enumerate() {
            let steps = (t / cfg.dt).round();
            let expected = 3.0 * (1.0 - 0.5 * cfg.dt).powf(steps);
            assert_relative_eq!(em.mean_momentum[k][2], expected, max_relative = 1e-12);
        }

        cfg.stepper = Stepper::ExactOu;
        let exact = run_ensemble(&cfg).unwrap();
        for (k, &t) in exact.times.iter().enumerate() {
            let expected = 3.0 * (-0.5 * t).exp();
            assert_relative_eq!(exact.mean_momentum[k][2], expected, max_relative = 1e-10);
            assert!(exact.variance[k][2] < 1e-25);
        }
    }

    #[test]
    fn pure_diffusion_variance_grows_linearly() {
        let mut cfg = base_config();
        cfg.coefficients = coeffs(0.0, 0.7);
        cfg.n_trajectories = 20_000;
        cfg.n_steps = 200;
        cfg.dt = 0.005;
        let stats = run_ensemble(&cfg).unwrap();
        let t_end = *stats.times.last().unwrap();
        let expected = 2.0 * 0.7 * t_end;
        let band = 3.0 * expected * (2.0 / cfg.n_trajectories as f64).sqrt();
        for c in 0..3 {
            let var = stats.variance.last().unwrap()[c];
            assert!(
                (var - expected).abs() < band,
                "component {c}: var {var} vs {expected} ± {band}"
            );
        }
    }

    #[test]
    fn ou_relaxes_to_stationary_variance() {
        // Var → D/γ = MkBT; run long (γt = 8) from a delta at the origin.
        let mut cfg = base_config();
        cfg.coefficients = coeffs(2.0, 3.0);
        cfg.n_trajectories = 20_000;
        cfg.dt = 0.004;
        cfg.n_steps = 1000;
        let stats = run_ensemble(&cfg).unwrap();
        let expected = 3.0 / 2.0;
        let band = 3.0 * expected * (2.0 / cfg.n_trajectories as f64).sqrt();
        for c in 0..3 {
            let var = stats.variance.last().unwrap()[c];
            assert!((var - expected).abs() < band);
        }
    }

    #[test]
    fn full_relaxation_curve_of_second_moment() {
        // ⟨p²⟩(t) = 3(D/γ)(1 − e^{−2γt}) from p₀ = 0, within 3σ bands.
        let mut cfg = base_config();
        cfg.coefficients = coeffs(1.0, 1.0);
        cfg.n_trajectories = 40_000;
        cfg.dt = 0.002;
        cfg.n_steps = 1500;
        cfg.schedule = SampleSchedule::Linear { n_samples: 12 };
        let stats = run_ensemble(&cfg).unwrap();
        for (k, &t) in stats.times.iter().enumerate() {
            if t == 0.0 {
                continue;
            }
            let expected = 3.0 * (1.0 - (-2.0 * t).exp());
            // Var of the ⟨p²⟩ estimator: per-component 2·var² summed.
            let per_comp = expected / 3.0;
            let est_sd =
                (3.0 * 2.0 * per_comp * per_comp / cfg.n_trajectories as f64).sqrt();
            assert!(
                (stats.mean_p_squared[k] - expected).abs() < 3.0 * est_sd + 0.01 * expected,
                "t = {t}: ⟨p²⟩ = {} vs {expected}",
                stats.mean_p_squared[k]
            );
        }
    }

    #[test]
    fn zero_coefficients_preserve_momenta_exactly() {
        let mut cfg = base_config();
        cfg.coefficients = coeffs(0.0, 0.0);
        cfg.initial = InitialMomentum::Delta {
            p0: [1.25, -0.5, 2.0],
        };
        cfg.n_trajectories = 16;
        let stats = run_ensemble(&cfg).unwrap();
        for p in &stats.final_momenta {
            assert_eq!(*p, [1.25, -0.5, 2.0]);
        }
    }

    #[test]
    fn identical_seed_is_bit_identical_across_thread_counts() {
        let mut cfg = base_config();
        cfg.n_trajectories = 10_000;
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_ensemble(&cfg).unwrap());
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| run_ensemble(&cfg).unwrap());
        assert_eq!(single.mean_momentum, many.mean_momentum);
        assert_eq!(single.variance, many.variance);
        assert_eq!(single.final_momenta, many.final_momenta);
        assert_eq!(single.mean_increment, many.mean_increment);
    }

    #[test]
    fn different_seeds_differ() {
        let mut cfg = base_config();
        let a = run_ensemble(&cfg).unwrap();
        cfg.seed = 43;
        let b = run_ensemble(&cfg).unwrap();
        assert_ne!(a.final_momenta, b.final_momenta);
    }

    #[test]
    fn gamma_dt_guard_warns() {
        let mut cfg = base_config();
        cfg.dt = 0.2;
        let warnings = cfg.validate().unwrap();
        assert_eq!(warnings.len(), 1);
        cfg.stepper = Stepper::ExactOu;
        assert!(cfg.validate().unwrap().is_empty());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = base_config();
        cfg.dt = 0.0;
        assert!(run_ensemble(&cfg).is_err());
        let mut cfg = base_config();
        cfg.n_trajectories = 0;
        assert!(run_ensemble(&cfg).is_err());
        let mut cfg = base_config();
        cfg.mass = -1.0;
        assert!(run_ensemble(&cfg).is_err());
    }

    #[test]
    fn schedule_includes_endpoints_and_is_sorted() {
        let schedules = [
            SampleSchedule::Linear { n_samples: 7 },
            SampleSchedule::Geometric {
                n_samples: 9,
                first_step: 2,
            },
            SampleSchedule::Hybrid {
                n_linear: 5,
                n_geometric: 6,
                first_step: 1,
            },
        ];
        for s in schedules {
            let steps = s.sample_steps(1000);
            assert_eq!(steps[0], 0);
            assert_eq!(*steps.last().unwrap(), 1000);
            assert!(steps.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn gaussian_initial_condition_has_requested_variance() {
        let mut cfg = base_config();
        cfg.coefficients = coeffs(0.0, 0.0);
        cfg.initial = InitialMomentum::IsotropicGaussian { variance: 2.5 };
        cfg.n_trajectories = 40_000;
        cfg.n_steps = 1;
        let stats = run_ensemble(&cfg).unwrap();
        let band = 3.0 * 2.5 * (2.0 / cfg.n_trajectories as f64).sqrt();
        for c in 0..3 {
            assert!((stats.variance[0][c] - 2.5).abs() < band);
        }
    }
}
