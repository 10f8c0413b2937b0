//! Program induction over sketches with natural evolution strategies.
//!
//! A sketch is a small program with holes: `[COND]` (one of `==`, `>`, `<`),
//! `[OP]` (one of `+`, `-`, `*`, `/`) and `[Real]` (a constant). Every hole
//! gets a search distribution, categorical logits or a Gaussian with learned
//! mean, and training moves those distributions along search-gradient
//! estimates so that sampled programs fit a set of input-output examples.
//!
//! The core types are generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` / `*32` aliases below fix the precision.
//!
//! ```
//! use sketchnes::{parse_sketch, train, SpecSet, TrainConfig};
//!
//! let sketch = parse_sketch::<f64>("fn f(x: f32) -> f32 { return x [OP] [Real]; }").unwrap();
//! let spec = SpecSet::new(vec![vec![1.0], vec![2.0]], vec![3.0, 6.0]).unwrap();
//! let cfg = TrainConfig { iterations: 200, ..TrainConfig::default() };
//! let result = train(&sketch, &spec, &cfg).unwrap();
//! println!("{}", result.best_program);
//! ```

pub mod cli;
pub mod config;
pub mod dist;
pub mod engine;
pub mod error;
pub mod interp;
pub mod optim;
pub mod parser;
pub mod printer;
pub mod scalar;
pub mod sketch;
pub mod specset;

pub use config::{load_config, OptimizerKind, TrainConfig};
pub use dist::{
    categorical_gradient, categorical_gradient_with, gaussian_gradient, load_thetas,
    sample_categorical, save_thetas, softmax, standardize_fitness, CategoricalScore,
    CategoricalTheta, GaussianTheta, HoleTheta, Thetas,
};
pub use engine::{
    argmax_assignment, argmax_program, enumerate_discrete, estimate_gradients, sample_population,
    train, write_loss_csv, HoleDraw, PopulationSample, SeedStreams, TrainRecord, TrainResult,
    Trainer, DEFAULT_ENUMERATION_CAP,
};
pub use error::{Error, Result};
pub use interp::{eval_program, eval_spec_loss, eval_spec_loss_with_penalty, DEFAULT_PENALTY};
pub use parser::parse_sketch;
pub use printer::print_program;
pub use scalar::Scalar;
pub use sketch::{
    Assignment, BinOp, CmpOp, ConcreteProgram, HoleKind, HoleSpec, HoleValue, Sketch,
};
pub use specset::{load_inputs, load_spec, save_spec, SpecSet};

pub type Sketch64 = Sketch<f64>;
pub type Program64 = ConcreteProgram<f64>;
pub type Assignment64 = Assignment<f64>;
pub type Thetas64 = Thetas<f64>;
pub type SpecSet64 = SpecSet<f64>;
pub type TrainResult64 = TrainResult<f64>;

pub type Sketch32 = Sketch<f32>;
pub type Program32 = ConcreteProgram<f32>;
pub type Assignment32 = Assignment<f32>;
pub type Thetas32 = Thetas<f32>;
pub type SpecSet32 = SpecSet<f32>;
pub type TrainResult32 = TrainResult<f32>;
