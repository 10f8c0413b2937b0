//! `sketchnes` command-line interface.
//!
//! Errors print as `CATEGORY: message`, with exit code 2 for invalid input
//! (PARSE, SPEC, CONFIG) and 3 for failures while running (IO, RUNTIME).

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{load_config, TrainConfig};
use crate::dist::{load_thetas, save_thetas, HoleTheta, Thetas};
use crate::engine::{argmax_program, enumerate_discrete, write_loss_csv, Trainer, DEFAULT_ENUMERATION_CAP};
use crate::error::Error;
use crate::interp::{eval_program, eval_spec_loss};
use crate::parser::parse_sketch;
use crate::sketch::{ConcreteProgram, HoleKind, HoleValue, Sketch};
use crate::specset::{load_inputs, load_spec, SpecSet};

#[derive(Debug, Parser)]
#[command(name = "sketchnes", version, about = "Induce programs from input-output examples by searching over sketch holes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train search distributions for a sketch against a spec.
    Train {
        #[arg(long)]
        sketch: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the argmax program and per-hole distributions of a theta file.
    Show {
        #[arg(long)]
        sketch: PathBuf,
        #[arg(long)]
        theta: PathBuf,
    },
    /// Evaluate a hole-free program on a spec.
    Eval {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        spec: PathBuf,
    },
    /// Rank every token assignment with the real holes pinned.
    Enumerate {
        #[arg(long)]
        sketch: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        /// Values for the [Real] holes, in source order.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        reals: Vec<f64>,
        #[arg(long)]
        top: Option<usize>,
    },
    /// Write a spec by running a hole-free program on an input table.
    GenSpec {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        inputs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Parse,
    Spec,
    Config,
    Io,
    Runtime,
}

impl Category {
    fn label(self) -> &'static str {
        match self {
            Category::Parse => "PARSE",
            Category::Spec => "SPEC",
            Category::Config => "CONFIG",
            Category::Io => "IO",
            Category::Runtime => "RUNTIME",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub category: Category,
    pub message: String,
}

impl CliError {
    fn new(category: Category, message: impl fmt::Display) -> Self {
        CliError {
            category,
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.category {
            Category::Parse | Category::Spec | Category::Config => 2,
            Category::Io | Category::Runtime => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.category.label(), self.message)
    }
}

impl std::error::Error for CliError {}

type CliResult<T> = std::result::Result<T, CliError>;

fn tag(category: Category) -> impl Fn(Error) -> CliError {
    move |e| CliError::new(category, e)
}

fn write_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::new(Category::Io, format!("{}: {e}", path.display()))
}

fn read_sketch(path: &Path) -> CliResult<Sketch<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::new(Category::Parse, format!("{}: {e}", path.display())))?;
    parse_sketch(&text).map_err(|e| CliError::new(Category::Parse, format!("{}: {e}", path.display())))
}

fn read_program(path: &Path) -> CliResult<ConcreteProgram<f64>> {
    let sketch = read_sketch(path)?;
    ConcreteProgram::try_from(sketch)
        .map_err(|e| CliError::new(Category::Parse, format!("{}: {e}", path.display())))
}

fn read_spec(path: &Path) -> CliResult<SpecSet<f64>> {
    load_spec(path).map_err(tag(Category::Spec))
}

pub fn run<W: Write>(cli: Cli, out: &mut W) -> CliResult<()> {
    match cli.command {
        Command::Train {
            sketch,
            spec,
            config,
            out: dir,
            seed,
        } => cmd_train(&sketch, &spec, &config, &dir, seed, out),
        Command::Show { sketch, theta } => cmd_show(&sketch, &theta, out),
        Command::Eval { program, spec } => cmd_eval(&program, &spec, out),
        Command::Enumerate {
            sketch,
            spec,
            reals,
            top,
        } => cmd_enumerate(&sketch, &spec, &reals, top, out),
        Command::GenSpec {
            program,
            inputs,
            out: path,
        } => cmd_gen_spec(&program, &inputs, &path, out),
    }
}

fn cmd_train<W: Write>(
    sketch_path: &Path,
    spec_path: &Path,
    config_path: &Path,
    dir: &Path,
    seed: Option<u64>,
    out: &mut W,
) -> CliResult<()> {
    let sketch = read_sketch(sketch_path)?;
    let spec = read_spec(spec_path)?;
    let mut config: TrainConfig = load_config(config_path).map_err(tag(Category::Config))?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let trainer = Trainer::new(&sketch, &spec, &config).map_err(|e| match e {
        Error::ArityMismatch { .. } | Error::EmptySpec => CliError::new(Category::Spec, e),
        other => CliError::new(Category::Config, other),
    })?;
    let result = trainer.run().map_err(tag(Category::Runtime))?;

    fs::create_dir_all(dir).map_err(write_err(dir))?;
    let loss_path = dir.join("loss.csv");
    let file = fs::File::create(&loss_path).map_err(write_err(&loss_path))?;
    let mut writer = std::io::BufWriter::new(file);
    write_loss_csv(&result.records, config.log_every, &mut writer).map_err(write_err(&loss_path))?;
    writer.flush().map_err(write_err(&loss_path))?;

    let io = tag(Category::Io);
    save_thetas(&result.final_thetas, dir.join("theta_final.json")).map_err(&io)?;
    save_thetas(&result.best_thetas, dir.join("theta_best.json")).map_err(&io)?;
    for (name, program) in [
        ("program_final.txt", &result.final_program),
        ("program_best.txt", &result.best_program),
    ] {
        let path = dir.join(name);
        fs::write(&path, program.to_string()).map_err(write_err(&path))?;
    }

    let stdout_err = |e: std::io::Error| CliError::new(Category::Io, e);
    writeln!(out, "{}", result.best_program).map_err(stdout_err)?;
    writeln!(out, "best iteration: {}", result.best_iteration).map_err(stdout_err)?;
    writeln!(out, "final spec-MSE: {:?}", result.final_loss).map_err(stdout_err)?;
    writeln!(out, "best spec-MSE: {:?}", result.best_loss).map_err(stdout_err)?;
    Ok(())
}

/// Per-hole distribution summary lines.
pub fn describe_thetas(sketch: &Sketch<f64>, thetas: &Thetas<f64>) -> Vec<String> {
    sketch
        .holes
        .iter()
        .zip(&thetas.0)
        .map(|(hole, theta)| match theta {
            HoleTheta::Categorical(c) => {
                let probs: Vec<String> = c
                    .probs()
                    .iter()
                    .enumerate()
                    .map(|(i, p)| format!("{} {:.3}", hole.kind.category_token(i).unwrap_or("?"), p))
                    .collect();
                format!("hole {} {}: {}", hole.index, hole.kind.token(), probs.join("  "))
            }
            HoleTheta::Gaussian(g) => format!(
                "hole {} {}: mu {:?}  sigma {:?}",
                hole.index,
                hole.kind.token(),
                g.mu,
                g.sigma
            ),
        })
        .collect()
}

fn cmd_show<W: Write>(sketch_path: &Path, theta_path: &Path, out: &mut W) -> CliResult<()> {
    let sketch = read_sketch(sketch_path)?;
    let thetas = load_thetas(theta_path, Some(&sketch)).map_err(tag(Category::Parse))?;
    let program = argmax_program(&sketch, &thetas).map_err(tag(Category::Parse))?;
    let e = |e: std::io::Error| CliError::new(Category::Io, e);
    writeln!(out, "{program}").map_err(e)?;
    for line in describe_thetas(&sketch, &thetas) {
        writeln!(out, "{line}").map_err(e)?;
    }
    Ok(())
}

fn cmd_eval<W: Write>(program_path: &Path, spec_path: &Path, out: &mut W) -> CliResult<()> {
    let program = read_program(program_path)?;
    let spec = read_spec(spec_path)?;
    if spec.arity() != program.arity() {
        return Err(CliError::new(
            Category::Spec,
            format!(
                "spec has {} input column(s) but the program takes {}",
                spec.arity(),
                program.arity()
            ),
        ));
    }
    let e = |e: std::io::Error| CliError::new(Category::Io, e);
    writeln!(out, "input\tprediction\ttarget\tsquared_error").map_err(e)?;
    for (x, target) in spec.pairs() {
        let y = eval_program(&program, x).map_err(tag(Category::Spec))?;
        let xs: Vec<String> = x.iter().map(|v| format!("{v:?}")).collect();
        writeln!(out, "({})\t{y:?}\t{target:?}\t{:?}", xs.join(", "), (y - target) * (y - target))
            .map_err(e)?;
    }
    let mse = eval_spec_loss(&program, &spec).map_err(tag(Category::Spec))?;
    writeln!(out, "MSE: {mse:?}").map_err(e)?;
    Ok(())
}

fn cmd_enumerate<W: Write>(
    sketch_path: &Path,
    spec_path: &Path,
    reals: &[f64],
    top: Option<usize>,
    out: &mut W,
) -> CliResult<()> {
    let sketch = read_sketch(sketch_path)?;
    let spec = read_spec(spec_path)?;
    let ranked = enumerate_discrete(&sketch, reals, &spec, DEFAULT_ENUMERATION_CAP).map_err(|e| match e {
        Error::ArityMismatch { .. } | Error::EmptySpec => CliError::new(Category::Spec, e),
        other => CliError::new(Category::Config, other),
    })?;
    let e = |e: std::io::Error| CliError::new(Category::Io, e);
    writeln!(out, "rank\tloss\ttokens").map_err(e)?;
    for (rank, (a, loss)) in ranked.iter().take(top.unwrap_or(usize::MAX)).enumerate() {
        let tokens: Vec<&str> = sketch
            .holes
            .iter()
            .zip(&a.0)
            .filter_map(|(h, v)| match (h.kind, v) {
                (HoleKind::Real, _) => None,
                (kind, HoleValue::Category(c)) => kind.category_token(*c),
                _ => None,
            })
            .collect();
        writeln!(out, "{}\t{loss:?}\t{}", rank + 1, tokens.join(" ")).map_err(e)?;
    }
    Ok(())
}

fn cmd_gen_spec<W: Write>(
    program_path: &Path,
    inputs_path: &Path,
    out_path: &Path,
    out: &mut W,
) -> CliResult<()> {
    let program = read_program(program_path)?;
    let inputs: Vec<Vec<f64>> = load_inputs(inputs_path).map_err(tag(Category::Spec))?;
    let outputs = inputs
        .iter()
        .map(|x| eval_program(&program, x))
        .collect::<Result<Vec<f64>, Error>>()
        .map_err(tag(Category::Spec))?;
    let spec = SpecSet::new(inputs, outputs).map_err(tag(Category::Spec))?;
    let file = fs::File::create(out_path).map_err(write_err(out_path))?;
    spec.write_csv(file).map_err(tag(Category::Io))?;
    writeln!(out, "wrote {} example(s) to {}", spec.len(), out_path.display())
        .map_err(|e| CliError::new(Category::Io, e))?;
    Ok(())
}
