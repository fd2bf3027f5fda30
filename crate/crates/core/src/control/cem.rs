//! Cross-entropy method over policy parameters.
//!
//! Each iteration samples `population` parameter vectors from a diagonal
//! Gaussian, scores each by its mean return over `eval_episodes` episodes and
//! refits the Gaussian to the best `ceil(population · elite_frac)` of them.
//! Episode seeds depend only on `(seed, iteration, member, episode)`, so any
//! evaluation order gives the same result.

use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::policy::{PolicyController, PolicyParams};
use crate::env::reward::discounted_return;
use crate::env::Env;
use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct CemConfig {
    pub population: usize,
    /// Fraction of the population kept as elites, in `(0, 1]`.
    pub elite_frac: f64,
    pub iterations: usize,
    pub init_std: f64,
    /// Floor applied to the refit standard deviation.
    pub min_std: f64,
    pub eval_episodes: usize,
    pub seed: u64,
    /// Discount for the training objective; `None` scores undiscounted returns.
    pub gamma: Option<f64>,
}

impl Default for CemConfig {
    fn default() -> Self {
        Self {
            population: 32,
            elite_frac: 0.25,
            iterations: 30,
            init_std: 0.5,
            min_std: 0.02,
            eval_episodes: 2,
            seed: 0,
            gamma: None,
        }
    }
}

impl CemConfig {
    pub fn elite_count(&self) -> usize {
        // Guard against products like 0.1 · 30 = 3.0000000000000004.
        math::ceil(self.population as f64 * self.elite_frac - 1e-9) as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("cem: {m}")));
        if !(self.elite_frac > 0.0 && self.elite_frac <= 1.0) {
            return bad(&format!("elite_frac must be in (0, 1], got {}", self.elite_frac));
        }
        if (self.population as f64) * self.elite_frac < 2.0 {
            return bad(&format!(
                "population * elite_frac must be >= 2, got {} * {}",
                self.population, self.elite_frac
            ));
        }
        if self.iterations == 0 {
            return bad("iterations must be >= 1");
        }
        if self.eval_episodes == 0 {
            return bad("eval_episodes must be >= 1");
        }
        if !(self.init_std.is_finite() && self.init_std > 0.0) {
            return bad(&format!("init_std must be > 0, got {}", self.init_std));
        }
        if !(self.min_std.is_finite() && self.min_std >= 0.0) {
            return bad(&format!("min_std must be >= 0, got {}", self.min_std));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g <= 1.0) {
                return bad(&format!("gamma must be in (0, 1], got {g}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationStats {
    pub iteration: usize,
    pub mean_return: f64,
    pub max_return: f64,
    pub elite_mean_return: f64,
}

/// Ask/tell CEM state.
#[derive(Debug, Clone)]
pub struct CrossEntropy {
    config: CemConfig,
    mean: Vec<f64>,
    std: Vec<f64>,
    rng: ChaCha8Rng,
    iteration: usize,
    best: Option<(Vec<f64>, f64)>,
    curve: Vec<IterationStats>,
}

impl CrossEntropy {
    pub fn new(config: CemConfig, init_mean: Vec<f64>) -> Result<Self> {
        config.validate()?;
        if init_mean.is_empty() {
            return Err(Error::InvalidConfig("cem: empty parameter vector".into()));
        }
        let std = alloc::vec![config.init_std; init_mean.len()];
        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            mean: init_mean,
            std,
            iteration: 0,
            best: None,
            curve: Vec::new(),
        })
    }

    pub fn config(&self) -> &CemConfig {
        &self.config
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std(&self) -> &[f64] {
        &self.std
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn is_done(&self) -> bool {
        self.iteration >= self.config.iterations
    }

    /// Best parameters seen so far and their return.
    pub fn best(&self) -> Option<(&[f64], f64)> {
        self.best.as_ref().map(|(t, r)| (t.as_slice(), *r))
    }

    pub fn curve(&self) -> &[IterationStats] {
        &self.curve
    }

    /// Draws this iteration's population.
    pub fn ask(&mut self) -> Vec<Vec<f64>> {
        (0..self.config.population)
            .map(|_| {
                self.mean
                    .iter()
                    .zip(&self.std)
                    .map(|(m, s)| {
                        let z: f64 = StandardNormal.sample(&mut self.rng);
                        m + s * z
                    })
                    .collect()
            })
            .collect()
    }

    /// Feeds back the returns of the population from the last [`ask`](Self::ask).
    pub fn tell(&mut self, samples: &[Vec<f64>], returns: &[f64]) -> Result<IterationStats> {
        if samples.len() != self.config.population || returns.len() != samples.len() {
            return Err(Error::Dimension {
                expected: self.config.population,
                actual: returns.len().min(samples.len()),
            });
        }
        if let Some(r) = returns.iter().find(|r| !r.is_finite()) {
            return Err(Error::NonFinite {
                field: "return",
                value: *r,
            });
        }
        let mut order: Vec<usize> = (0..returns.len()).collect();
        order.sort_by(|&a, &b| returns[b].total_cmp(&returns[a]));
        let elites = &order[..self.config.elite_count()];

        let n = elites.len() as f64;
        let dim = self.mean.len();
        let mut mean = alloc::vec![0.0; dim];
        for &e in elites {
            for (m, x) in mean.iter_mut().zip(&samples[e]) {
                *m += x;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut std = alloc::vec![0.0; dim];
        for &e in elites {
            for ((s, x), m) in std.iter_mut().zip(&samples[e]).zip(&mean) {
                *s += (x - m) * (x - m);
            }
        }
        for s in &mut std {
            *s = math::sqrt(*s / n).max(self.config.min_std);
        }
        self.mean = mean;
        self.std = std;

        let top = order[0];
        if self.best.as_ref().is_none_or(|(_, r)| returns[top] > *r) {
            self.best = Some((samples[top].clone(), returns[top]));
        }
        let stats = IterationStats {
            iteration: self.iteration,
            mean_return: returns.iter().sum::<f64>() / returns.len() as f64,
            max_return: returns[top],
            elite_mean_return: elites.iter().map(|&e| returns[e]).sum::<f64>() / n,
        };
        self.curve.push(stats);
        self.iteration += 1;
        Ok(stats)
    }
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Episode seed for one evaluation rollout.
pub fn eval_seed(seed: u64, iteration: usize, member: usize, episode: usize) -> u64 {
    let mut h = splitmix64(seed);
    for v in [iteration, member, episode] {
        h = splitmix64(h ^ v as u64);
    }
    h
}

/// Mean return of `policy` over episodes started with `seeds`.
pub fn evaluate_policy(env: &mut Env, policy: &PolicyParams, seeds: &[u64], gamma: Option<f64>) -> Result<f64> {
    let mut ctrl = PolicyController::new(policy.clone());
    let mut total = 0.0;
    let mut rewards = Vec::new();
    for &s in seeds {
        rewards.clear();
        let m = env.run_episode(&mut ctrl, s, |r| {
            if gamma.is_some() {
                rewards.push(r.reward);
            }
        })?;
        total += match gamma {
            Some(g) => discounted_return(&rewards, g),
            None => m.cum_reward,
        };
    }
    Ok(total / seeds.len() as f64)
}

/// Score of population member `member` at `iteration`.
pub fn evaluate_member(
    env: &mut Env,
    template: &PolicyParams,
    theta: &[f64],
    config: &CemConfig,
    iteration: usize,
    member: usize,
) -> Result<f64> {
    let policy = template.with_theta(theta.to_vec())?;
    let seeds: Vec<u64> = (0..config.eval_episodes)
        .map(|e| eval_seed(config.seed, iteration, member, e))
        .collect();
    evaluate_policy(env, &policy, &seeds, config.gamma)
}

#[derive(Debug, Clone)]
pub struct CemOutcome {
    pub best: PolicyParams,
    pub best_return: f64,
    /// Final sampling mean.
    pub mean: PolicyParams,
    pub curve: Vec<IterationStats>,
}

/// Trains with a caller-supplied population evaluator
/// `(population, iteration) -> returns`, e.g. a parallel one.
pub fn cem_train_with<F>(env: &Env, config: &CemConfig, mut evaluate: F) -> Result<CemOutcome>
where
    F: FnMut(&[Vec<f64>], usize) -> Result<Vec<f64>>,
{
    let template = PolicyParams::zeros(&env.config().observation);
    let mut cem = CrossEntropy::new(*config, template.theta().to_vec())?;
    while !cem.is_done() {
        let it = cem.iteration();
        let pop = cem.ask();
        let returns = evaluate(&pop, it)?;
        cem.tell(&pop, &returns)?;
    }
    let (best, best_return) = cem.best().expect("at least one iteration ran");
    Ok(CemOutcome {
        best: template.with_theta(best.to_vec())?,
        best_return,
        mean: template.with_theta(cem.mean().to_vec())?,
        curve: cem.curve().to_vec(),
    })
}

/// Sequential training on clones of `env`.
pub fn cem_train(env: &Env, config: &CemConfig) -> Result<CemOutcome> {
    let template = PolicyParams::zeros(&env.config().observation);
    let mut e = env.clone();
    cem_train_with(env, config, |pop, it| {
        pop.iter()
            .enumerate()
            .map(|(m, theta)| evaluate_member(&mut e, &template, theta, config, it, m))
            .collect()
    })
}
