//! Per-hole search distributions and their search-gradient estimators.
//!
//! Categorical holes carry a logit vector and follow the categorical NES
//! accumulator; `[Real]` holes carry a Gaussian with learned mean and fixed
//! standard deviation and use the closed-form estimator
//! `(1 / (n * sigma)) * sum_i F_i * eps_i`.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sketch::Sketch;

/// Added to the population standard deviation before dividing.
pub const STANDARDIZE_EPS: f64 = 1e-8;

/// Numerically stable softmax.
pub fn softmax<T: Scalar>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|&l| (l - max).exp()).collect();
    let total: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / total).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CategoricalTheta<T> {
    pub logits: Vec<T>,
}

impl<T: Scalar> CategoricalTheta<T> {
    pub fn uniform(k: usize) -> Self {
        CategoricalTheta {
            logits: vec![T::zero(); k],
        }
    }

    pub fn probs(&self) -> Vec<T> {
        softmax(&self.logits)
    }

    /// Highest-logit category; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &l) in self.logits.iter().enumerate().skip(1) {
            if l > self.logits[best] {
                best = i;
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GaussianTheta<T> {
    pub mu: T,
    pub sigma: T,
}

/// Search distribution of one hole. Serialized as
/// `{"kind":"cat","logits":[...]}` or `{"kind":"real","mu":m,"sigma":s}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", bound = "T: Scalar")]
pub enum HoleTheta<T> {
    #[serde(rename = "cat")]
    Categorical(CategoricalTheta<T>),
    #[serde(rename = "real")]
    Gaussian(GaussianTheta<T>),
}

/// Search-distribution parameters for every hole of a sketch, in hole order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent, bound = "T: Scalar")]
pub struct Thetas<T>(pub Vec<HoleTheta<T>>);

impl<T: Scalar> Thetas<T> {
    /// Uniform logits for token holes and N(mu, sigma^2) for real holes.
    pub fn init(sketch: &Sketch<T>, mu: T, sigma: T) -> Self {
        Thetas(
            sketch
                .holes
                .iter()
                .map(|h| match h.kind.arity() {
                    Some(k) => HoleTheta::Categorical(CategoricalTheta::uniform(k)),
                    None => HoleTheta::Gaussian(GaussianTheta { mu, sigma }),
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Finite logits, finite mu, finite positive sigma.
    pub fn validate(&self) -> Result<()> {
        for (i, t) in self.0.iter().enumerate() {
            match t {
                HoleTheta::Categorical(c) => {
                    if c.logits.is_empty() || !c.logits.iter().all(|l| l.is_finite()) {
                        return Err(Error::Theta(format!(
                            "hole {i}: logits must be non-empty and finite"
                        )));
                    }
                }
                HoleTheta::Gaussian(g) => {
                    if !g.mu.is_finite() {
                        return Err(Error::Theta(format!("hole {i}: mu must be finite")));
                    }
                    if !(g.sigma.is_finite() && g.sigma > T::zero()) {
                        return Err(Error::Theta(format!(
                            "hole {i}: sigma must be finite and positive"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks one entry per hole with matching kind and categorical arity.
    pub fn check_against(&self, sketch: &Sketch<T>) -> Result<()> {
        if self.0.len() != sketch.hole_count() {
            return Err(Error::Theta(format!(
                "{} theta entries for {} holes",
                self.0.len(),
                sketch.hole_count()
            )));
        }
        for (hole, theta) in sketch.holes.iter().zip(&self.0) {
            match (hole.kind.arity(), theta) {
                (Some(k), HoleTheta::Categorical(c)) if c.logits.len() == k => {}
                (Some(k), HoleTheta::Categorical(c)) => {
                    return Err(Error::Theta(format!(
                        "hole {}: {} logits for a {} hole of arity {k}",
                        hole.index,
                        c.logits.len(),
                        hole.kind
                    )))
                }
                (None, HoleTheta::Gaussian(_)) => {}
                (_, theta) => {
                    let got = match theta {
                        HoleTheta::Categorical(_) => "categorical (\"cat\")",
                        HoleTheta::Gaussian(_) => "gaussian (\"real\")",
                    };
                    return Err(Error::Theta(format!(
                        "hole {} is a {} hole but the document gives a {got} entry",
                        hole.index, hole.kind
                    )));
                }
            }
        }
        self.validate()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("thetas serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: Thetas<T> =
            serde_json::from_str(text).map_err(|e| Error::Theta(format!("malformed document: {e}")))?;
        t.validate()?;
        Ok(t)
    }
}

pub fn save_thetas<T: Scalar>(thetas: &Thetas<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, thetas.to_json()).map_err(|e| Error::io(path, e))
}

/// Loads a theta document; pass `sketch` to also check hole kinds and arities.
pub fn load_thetas<T: Scalar>(
    path: impl AsRef<Path>,
    sketch: Option<&Sketch<T>>,
) -> Result<Thetas<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let thetas = Thetas::from_json(&text)?;
    if let Some(s) = sketch {
        thetas.check_against(s)?;
    }
    Ok(thetas)
}

/// Draws a category with probability `softmax(logits)`.
pub fn sample_categorical<T: Scalar, R: Rng + ?Sized>(theta: &CategoricalTheta<T>, rng: &mut R) -> usize {
    sample_from_probs(&theta.probs(), rng)
}

pub(crate) fn sample_from_probs<T: Scalar, R: Rng + ?Sized>(probs: &[T], rng: &mut R) -> usize {
    let u = T::unit(rng);
    let mut acc = T::zero();
    for (i, &p) in probs.iter().enumerate() {
        acc = acc + p;
        if u < acc {
            return i;
        }
    }
    // rounding left u above the final partial sum
    probs.iter().rposition(|&p| p > T::zero()).unwrap_or(probs.len() - 1)
}

/// Which per-sample weight the categorical accumulator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CategoricalScore {
    /// Gradient of the sampled token's softmax probability:
    /// `P_i (1 - P_i)` on the sampled logit, `-P_i p_j` elsewhere.
    #[default]
    SoftmaxGrad,
    /// Gradient of the log-probability: `1 - p_j` on the sampled logit,
    /// `-p_j` elsewhere.
    LogSoftmaxGrad,
}

/// Categorical accumulator with the default (softmax-gradient) weights.
pub fn categorical_gradient<T: Scalar>(
    theta: &CategoricalTheta<T>,
    samples: &[(usize, T)],
) -> Result<Vec<T>> {
    categorical_gradient_with(theta, samples, CategoricalScore::SoftmaxGrad)
}

/// Accumulates `T_j += (1/n) * L_ij` over samples `(eps_i, F_i)` and logits `j`.
pub fn categorical_gradient_with<T: Scalar>(
    theta: &CategoricalTheta<T>,
    samples: &[(usize, T)],
    score: CategoricalScore,
) -> Result<Vec<T>> {
    if samples.is_empty() {
        return Err(Error::NoSamples);
    }
    let probs = theta.probs();
    let inv_n = T::one() / T::from_usize(samples.len()).unwrap();
    let mut grad = vec![T::zero(); probs.len()];
    accumulate_categorical(&probs, samples.iter().copied(), inv_n, score, &mut grad);
    Ok(grad)
}

pub(crate) fn accumulate_categorical<T: Scalar>(
    probs: &[T],
    samples: impl Iterator<Item = (usize, T)>,
    inv_n: T,
    score: CategoricalScore,
    grad: &mut [T],
) {
    for (eps, fitness) in samples {
        let p_i = probs[eps];
        for (j, (g, &p_j)) in grad.iter_mut().zip(probs).enumerate() {
            let l = match score {
                CategoricalScore::SoftmaxGrad if eps == j => p_i * (T::one() - p_i) * fitness,
                CategoricalScore::SoftmaxGrad => -p_i * p_j * fitness,
                CategoricalScore::LogSoftmaxGrad if eps == j => (T::one() - p_j) * fitness,
                CategoricalScore::LogSoftmaxGrad => -p_j * fitness,
            };
            *g = *g + inv_n * l;
        }
    }
}

/// Closed-form Gaussian search gradient with respect to `mu`, from samples
/// `(eps_i, F_i)` where the candidate value was `mu + sigma * eps_i`.
pub fn gaussian_gradient<T: Scalar>(theta: &GaussianTheta<T>, samples: &[(T, T)]) -> Result<T> {
    if samples.is_empty() {
        return Err(Error::NoSamples);
    }
    let n = T::from_usize(samples.len()).unwrap();
    let weighted: T = samples.iter().map(|&(eps, f)| f * eps).sum();
    Ok(weighted / (n * theta.sigma))
}

/// Z-scores negated losses: `(-l - mean(-l)) / (popstd(-l) + 1e-8)`.
pub fn standardize_fitness<T: Scalar>(losses: &[T]) -> Result<Vec<T>> {
    if losses.len() < 2 {
        return Err(Error::TooFewLosses(losses.len()));
    }
    let n = T::from_usize(losses.len()).unwrap();
    // centred on the first value so a constant population gives exact zeros
    let pivot = -losses[0];
    let centred: Vec<T> = losses.iter().map(|&l| -l - pivot).collect();
    let shift = centred.iter().copied().sum::<T>() / n;
    let devs: Vec<T> = centred.iter().map(|&c| c - shift).collect();
    let var = devs.iter().map(|&d| d * d).sum::<T>() / n;
    let denom = var.sqrt() + T::of(STANDARDIZE_EPS);
    Ok(devs.into_iter().map(|d| d / denom).collect())
}
