//! The NES training loop over a sketch's holes, argmax extraction and the
//! exhaustive enumeration oracle for token holes.
//!
//! One iteration samples a population of assignments from the current
//! search distributions, scores each instantiated program by spec MSE,
//! z-scores the negated losses and moves every hole's parameters along its
//! search-gradient estimate. All holes are updated from the same population.

use std::cmp::Ordering;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::TrainConfig;
use crate::dist::{
    accumulate_categorical, sample_from_probs, standardize_fitness, CategoricalScore, HoleTheta,
    Thetas,
};
use crate::error::{Error, Result};
use crate::interp::{check_spec_for, spec_loss_assigned, DEFAULT_PENALTY};
use crate::optim::Optimizer;
use crate::scalar::Scalar;
use crate::sketch::{Assignment, ConcreteProgram, HoleKind, HoleValue, Sketch};
use crate::specset::SpecSet;

/// Default upper bound on the number of token combinations enumerated.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// Independent random streams keyed by (iteration, candidate, hole).
///
/// Every draw depends only on its key and the master seed, so candidates can
/// be sampled in any order or in parallel with identical results.
#[derive(Debug, Clone)]
pub struct SeedStreams {
    key: [u8; 32],
}

impl SeedStreams {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        let mut expand = ChaCha8Rng::seed_from_u64(seed);
        rand::RngCore::fill_bytes(&mut expand, &mut key);
        SeedStreams { key }
    }

    /// `candidate` and `hole` must fit in 16 bits, `iteration` in 32.
    pub fn rng(&self, iteration: u64, candidate: usize, hole: usize) -> ChaCha8Rng {
        debug_assert!(iteration < 1 << 32 && candidate < 1 << 16 && hole < 1 << 16);
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream((iteration << 32) | ((candidate as u64) << 16) | hole as u64);
        rng
    }
}

/// Raw draw for one hole: a category, or the standard-normal `eps` behind a
/// real value `mu + sigma * eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HoleDraw<T> {
    Category(usize),
    Normal(T),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSample<T> {
    pub draws: Vec<HoleDraw<T>>,
    /// Standardized fitness; zero until the population is scored.
    pub fitness: T,
}

/// Cached per-hole probabilities so sampling does not recompute softmax.
fn hole_probs<T: Scalar>(thetas: &Thetas<T>) -> Vec<Option<Vec<T>>> {
    thetas
        .0
        .iter()
        .map(|t| match t {
            HoleTheta::Categorical(c) => Some(c.probs()),
            HoleTheta::Gaussian(_) => None,
        })
        .collect()
}

fn sample_candidate<T: Scalar>(
    thetas: &Thetas<T>,
    probs: &[Option<Vec<T>>],
    streams: &SeedStreams,
    iteration: u64,
    candidate: usize,
) -> (Assignment<T>, PopulationSample<T>) {
    let mut values = Vec::with_capacity(thetas.len());
    let mut draws = Vec::with_capacity(thetas.len());
    for (hole, (theta, p)) in thetas.0.iter().zip(probs).enumerate() {
        let mut rng = streams.rng(iteration, candidate, hole);
        match (theta, p) {
            (HoleTheta::Categorical(_), Some(p)) => {
                let c = sample_from_probs(p, &mut rng);
                values.push(HoleValue::Category(c));
                draws.push(HoleDraw::Category(c));
            }
            (HoleTheta::Gaussian(g), _) => {
                let eps = T::standard_normal(&mut rng);
                values.push(HoleValue::Real(g.mu + g.sigma * eps));
                draws.push(HoleDraw::Normal(eps));
            }
            (HoleTheta::Categorical(_), None) => unreachable!("probabilities cached per hole"),
        }
    }
    (
        Assignment(values),
        PopulationSample {
            draws,
            fitness: T::zero(),
        },
    )
}

/// Draws `lambda` candidates for `iteration`.
pub fn sample_population<T: Scalar>(
    thetas: &Thetas<T>,
    lambda: usize,
    streams: &SeedStreams,
    iteration: u64,
) -> Vec<(Assignment<T>, PopulationSample<T>)> {
    let probs = hole_probs(thetas);
    (0..lambda)
        .map(|c| sample_candidate(thetas, &probs, streams, iteration, c))
        .collect()
}

/// Search-gradient estimate for every parameter, flattened in the layout
/// of [`flatten`]. Fitness must already be standardized.
pub fn estimate_gradients<T: Scalar>(
    thetas: &Thetas<T>,
    population: &[PopulationSample<T>],
    score: CategoricalScore,
) -> Result<Vec<T>> {
    if population.is_empty() {
        return Err(Error::NoSamples);
    }
    let n = T::from_usize(population.len()).unwrap();
    let inv_n = T::one() / n;
    let mut grad = Vec::with_capacity(param_count(thetas));
    for (hole, theta) in thetas.0.iter().enumerate() {
        match theta {
            HoleTheta::Categorical(c) => {
                let probs = c.probs();
                let start = grad.len();
                grad.resize(start + probs.len(), T::zero());
                let samples = population.iter().map(|s| match s.draws[hole] {
                    HoleDraw::Category(e) => (e, s.fitness),
                    HoleDraw::Normal(_) => unreachable!("categorical hole drew a real"),
                });
                accumulate_categorical(&probs, samples, inv_n, score, &mut grad[start..]);
            }
            HoleTheta::Gaussian(g) => {
                let weighted: T = population
                    .iter()
                    .map(|s| match s.draws[hole] {
                        HoleDraw::Normal(eps) => s.fitness * eps,
                        HoleDraw::Category(_) => unreachable!("real hole drew a category"),
                    })
                    .sum();
                grad.push(weighted / (n * g.sigma));
            }
        }
    }
    Ok(grad)
}

fn param_count<T: Scalar>(thetas: &Thetas<T>) -> usize {
    thetas
        .0
        .iter()
        .map(|t| match t {
            HoleTheta::Categorical(c) => c.logits.len(),
            HoleTheta::Gaussian(_) => 1,
        })
        .sum()
}

/// Learned parameters in hole order: each hole's logits, or its `mu`.
/// `sigma` is fixed and not part of the vector.
pub fn flatten<T: Scalar>(thetas: &Thetas<T>) -> Vec<T> {
    let mut out = Vec::with_capacity(param_count(thetas));
    for t in &thetas.0 {
        match t {
            HoleTheta::Categorical(c) => out.extend_from_slice(&c.logits),
            HoleTheta::Gaussian(g) => out.push(g.mu),
        }
    }
    out
}

fn unflatten<T: Scalar>(thetas: &mut Thetas<T>, params: &[T]) {
    let mut rest = params;
    for t in thetas.0.iter_mut() {
        match t {
            HoleTheta::Categorical(c) => {
                let (head, tail) = rest.split_at(c.logits.len());
                c.logits.copy_from_slice(head);
                rest = tail;
            }
            HoleTheta::Gaussian(g) => {
                g.mu = rest[0];
                rest = &rest[1..];
            }
        }
    }
}

/// Most probable token for categorical holes (lowest index on ties) and
/// the mean for real holes.
pub fn argmax_assignment<T: Scalar>(thetas: &Thetas<T>) -> Assignment<T> {
    Assignment(
        thetas
            .0
            .iter()
            .map(|t| match t {
                HoleTheta::Categorical(c) => HoleValue::Category(c.argmax()),
                HoleTheta::Gaussian(g) => HoleValue::Real(g.mu),
            })
            .collect(),
    )
}

pub fn argmax_program<T: Scalar>(sketch: &Sketch<T>, thetas: &Thetas<T>) -> Result<ConcreteProgram<T>> {
    thetas.check_against(sketch)?;
    sketch.instantiate(&argmax_assignment(thetas))
}

/// Loss telemetry after one update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainRecord<T> {
    /// 1-based.
    pub iteration: u64,
    /// Mean raw loss of the population sampled this iteration.
    pub mean_population_loss: T,
    /// Loss of the argmax program after the update.
    pub argmax_loss: T,
    pub best_so_far_loss: T,
}

pub const LOSS_CSV_HEADER: &str = "iteration,mean_population_loss,argmax_loss,best_so_far_loss";

/// Writes the loss log: the first iteration, every `log_every`-th, and the last.
pub fn write_loss_csv<T: Scalar, W: Write>(
    records: &[TrainRecord<T>],
    log_every: usize,
    mut w: W,
) -> std::io::Result<()> {
    writeln!(w, "{LOSS_CSV_HEADER}")?;
    let last = records.last().map(|r| r.iteration);
    for r in records {
        if r.iteration == 1 || r.iteration % log_every as u64 == 0 || Some(r.iteration) == last {
            writeln!(
                w,
                "{},{:?},{:?},{:?}",
                r.iteration, r.mean_population_loss, r.argmax_loss, r.best_so_far_loss
            )?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct TrainResult<T> {
    pub final_thetas: Thetas<T>,
    pub final_program: ConcreteProgram<T>,
    pub final_loss: T,
    pub best_thetas: Thetas<T>,
    pub best_assignment: Assignment<T>,
    pub best_program: ConcreteProgram<T>,
    pub best_loss: T,
    /// 0 when the initial distributions were never improved upon.
    pub best_iteration: u64,
    pub records: Vec<TrainRecord<T>>,
}

/// Stateful NES trainer: current distributions, optimizer moments and the
/// best argmax program seen so far.
pub struct Trainer<'a, T: Scalar> {
    sketch: &'a Sketch<T>,
    spec: &'a SpecSet<T>,
    config: TrainConfig,
    thetas: Thetas<T>,
    optimizer: Optimizer<T>,
    streams: SeedStreams,
    penalty: T,
    iteration: u64,
    best: (T, Thetas<T>, u64),
}

impl<'a, T: Scalar> Trainer<'a, T> {
    /// Starts from uniform logits and `N(mu_init, sigma^2)` for every real hole.
    pub fn new(sketch: &'a Sketch<T>, spec: &'a SpecSet<T>, config: &TrainConfig) -> Result<Self> {
        let thetas = Thetas::init(sketch, T::of(config.mu_init), T::of(config.sigma));
        Self::with_thetas(sketch, spec, config, thetas)
    }

    pub fn with_thetas(
        sketch: &'a Sketch<T>,
        spec: &'a SpecSet<T>,
        config: &TrainConfig,
        thetas: Thetas<T>,
    ) -> Result<Self> {
        config.validate()?;
        check_spec_for(sketch, spec)?;
        thetas.check_against(sketch)?;
        if sketch.hole_count() > u16::MAX as usize {
            return Err(Error::Config(format!(
                "sketch has {} holes; at most {} are supported",
                sketch.hole_count(),
                u16::MAX
            )));
        }
        let penalty = T::of(config.penalty);
        let initial = spec_loss_assigned(sketch, &argmax_assignment(&thetas), spec, penalty);
        Ok(Trainer {
            sketch,
            spec,
            optimizer: Optimizer::from_config(config, param_count(&thetas)),
            streams: SeedStreams::new(config.seed),
            config: config.clone(),
            penalty,
            iteration: 0,
            best: (initial, thetas.clone(), 0),
            thetas,
        })
    }

    pub fn thetas(&self) -> &Thetas<T> {
        &self.thetas
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn best_loss(&self) -> T {
        self.best.0
    }

    fn loss(&self, a: &Assignment<T>) -> T {
        spec_loss_assigned(self.sketch, a, self.spec, self.penalty)
    }

    /// Samples and scores one population; returns it with standardized
    /// fitness filled in, plus the raw losses.
    pub fn score_population(
        &self,
        iteration: u64,
    ) -> Result<(Vec<(Assignment<T>, PopulationSample<T>)>, Vec<T>)> {
        let probs = hole_probs(&self.thetas);
        let eval = |c: usize| {
            let (a, s) = sample_candidate(&self.thetas, &probs, &self.streams, iteration, c);
            let loss = self.loss(&a);
            ((a, s), loss)
        };
        let scored: Vec<_> = if self.config.parallel {
            (0..self.config.population).into_par_iter().map(eval).collect()
        } else {
            (0..self.config.population).map(eval).collect()
        };
        let (mut population, losses): (Vec<_>, Vec<T>) = scored.into_iter().unzip();
        let fitness = standardize_fitness(&losses)?;
        for ((_, s), f) in population.iter_mut().zip(fitness) {
            s.fitness = f;
        }
        Ok((population, losses))
    }

    /// One full NES iteration.
    pub fn step(&mut self) -> Result<TrainRecord<T>> {
        let iteration = self.iteration + 1;
        let (population, losses) = self.score_population(iteration)?;
        let samples: Vec<PopulationSample<T>> = population.into_iter().map(|(_, s)| s).collect();
        let grad = estimate_gradients(&self.thetas, &samples, self.config.categorical_score)?;

        let mut params = flatten(&self.thetas);
        self.optimizer.ascend(&mut params, &grad);
        unflatten(&mut self.thetas, &params);
        self.iteration = iteration;

        let mean = losses.iter().copied().sum::<T>() / T::from_usize(losses.len()).unwrap();
        let argmax_loss = self.loss(&argmax_assignment(&self.thetas));
        if argmax_loss < self.best.0 {
            self.best = (argmax_loss, self.thetas.clone(), iteration);
        }
        Ok(TrainRecord {
            iteration,
            mean_population_loss: mean,
            argmax_loss,
            best_so_far_loss: self.best.0,
        })
    }

    /// Runs the remaining configured iterations and packages the result.
    pub fn run(mut self) -> Result<TrainResult<T>> {
        let todo = (self.config.iterations as u64).saturating_sub(self.iteration);
        let mut records = Vec::with_capacity(todo as usize);
        for _ in 0..todo {
            records.push(self.step()?);
        }
        let final_assignment = argmax_assignment(&self.thetas);
        let final_program = self.sketch.instantiate(&final_assignment)?;
        let final_loss = self.loss(&final_assignment);
        let (best_loss, best_thetas, best_iteration) = self.best;
        let best_assignment = argmax_assignment(&best_thetas);
        Ok(TrainResult {
            final_thetas: self.thetas,
            final_program,
            final_loss,
            best_program: self.sketch.instantiate(&best_assignment)?,
            best_assignment,
            best_thetas,
            best_loss,
            best_iteration,
            records,
        })
    }
}

/// Trains `sketch` against `spec` from default initial distributions.
pub fn train<T: Scalar>(sketch: &Sketch<T>, spec: &SpecSet<T>, config: &TrainConfig) -> Result<TrainResult<T>> {
    Trainer::new(sketch, spec, config)?.run()
}

/// Evaluates every token combination with the `[Real]` holes pinned to
/// `reals` (in hole order). Sorted by ascending loss; ties keep
/// lexicographic order of the token indices.
pub fn enumerate_discrete<T: Scalar>(
    sketch: &Sketch<T>,
    reals: &[T],
    spec: &SpecSet<T>,
    cap: u128,
) -> Result<Vec<(Assignment<T>, T)>> {
    check_spec_for(sketch, spec)?;
    let real_count = sketch.real_holes().count();
    if reals.len() != real_count {
        return Err(Error::RealCount {
            expected: real_count,
            count: reals.len(),
        });
    }
    let arities: Vec<usize> = sketch.categorical_holes().map(|h| h.kind.arity().unwrap()).collect();
    let size: u128 = arities.iter().map(|&k| k as u128).product();
    if size > cap {
        return Err(Error::EnumerationCap { size, cap });
    }

    let penalty = T::of(DEFAULT_PENALTY);
    let mut digits = vec![0usize; arities.len()];
    let mut out = Vec::with_capacity(size as usize);
    loop {
        let (mut d, mut r) = (digits.iter(), reals.iter());
        let values = sketch
            .holes
            .iter()
            .map(|h| match h.kind {
                HoleKind::Real => HoleValue::Real(*r.next().unwrap()),
                _ => HoleValue::Category(*d.next().unwrap()),
            })
            .collect();
        let a = Assignment(values);
        let loss = spec_loss_assigned(sketch, &a, spec, penalty);
        out.push((a, loss));

        // odometer, last categorical hole fastest
        let mut i = digits.len();
        loop {
            if i == 0 {
                out.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(Ordering::Equal));
                return Ok(out);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < arities[i] {
                break;
            }
            digits[i] = 0;
        }
    }
}
