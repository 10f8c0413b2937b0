//! End-to-end checks against the printed experiment programs.

use std::fs;
use std::path::{Path, PathBuf};

use sketchnes::*;

fn exp(name: &str, file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("experiments").join(name).join(file)
}

fn read(name: &str, file: &str) -> String {
    fs::read_to_string(exp(name, file)).unwrap()
}

fn exp1_values(cond: usize, r: [f64; 3], ops: [usize; 2]) -> Assignment64 {
    Assignment(vec![
        HoleValue::Category(cond),
        HoleValue::Real(r[0]),
        HoleValue::Real(r[1]),
        HoleValue::Category(ops[0]),
        HoleValue::Category(ops[1]),
        HoleValue::Real(r[2]),
    ])
}

const GT: usize = 1; // `>`
const LT: usize = 2; // `<`
const MUL: usize = 2;

#[test]
fn instantiating_ground_truth_values_reproduces_ground_truth() {
    let sketch: Sketch64 = parse_sketch(&read("exp1", "sketch.txt")).unwrap();
    let program = sketch.instantiate(&exp1_values(GT, [3.5, 4.2, 2.1], [MUL, MUL])).unwrap();
    let mut expected: Sketch64 = parse_sketch(&read("exp1", "ground_truth.txt")).unwrap();
    expected.name = program.sketch().name.clone();
    assert_eq!(program.sketch(), &expected);
    assert_eq!(
        program.to_string().replace("synth_prog", "ground_truth_prog"),
        read("exp1", "ground_truth.txt")
    );
}

#[test]
fn instantiating_learned_values_prints_learned_listing() {
    let sketch: Sketch64 = parse_sketch(&read("exp1", "sketch.txt")).unwrap();
    let program = sketch
        .instantiate(&exp1_values(LT, [2.2305248, 2.4594104, 4.0324993], [MUL, MUL]))
        .unwrap();
    assert_eq!(program.to_string(), read("exp1", "learned.txt"));
}

#[test]
fn hole_free_sketch_instantiates_to_itself() {
    let sketch: Sketch64 = parse_sketch(&read("exp2", "ground_truth.txt")).unwrap();
    let program = sketch.instantiate(&Assignment(vec![])).unwrap();
    assert_eq!(program.sketch(), &sketch);
}

#[test]
fn argmax_of_learned_thetas_is_learned_listing() {
    let sketch: Sketch64 = parse_sketch(&read("exp1", "sketch.txt")).unwrap();
    let cat = |hot: usize, k: usize| {
        let mut logits = vec![0.0; k];
        logits[hot] = 3.0;
        HoleTheta::Categorical(CategoricalTheta { logits })
    };
    let real = |mu| HoleTheta::Gaussian(GaussianTheta { mu, sigma: 0.5 });
    let thetas = Thetas(vec![
        cat(LT, 3),
        real(2.2305248),
        real(2.4594104),
        cat(MUL, 4),
        cat(MUL, 4),
        real(4.0324993),
    ]);
    let program = argmax_program(&sketch, &thetas).unwrap();
    assert_eq!(program.to_string(), read("exp1", "learned.txt"));
}

#[test]
fn spec_files_hold_the_experiment_data() {
    let s1: SpecSet64 = load_spec(exp("exp1", "spec.csv")).unwrap();
    assert_eq!(s1.arity(), 1);
    assert_eq!(s1.inputs(), &[vec![1.0], vec![2.0], vec![4.0], vec![5.0]]);
    assert_eq!(s1.outputs(), &[2.1, 4.2, 16.8, 21.0]);

    // the outputs are what the ground truth computes
    let gt = ConcreteProgram::try_from(parse_sketch::<f64>(&read("exp1", "ground_truth.txt")).unwrap()).unwrap();
    for (x, y) in s1.pairs() {
        assert_eq!(eval_program(&gt, x).unwrap(), *y);
    }
    assert_eq!(eval_spec_loss(&gt, &s1).unwrap(), 0.0);

    let s2: SpecSet64 = load_spec(exp("exp2", "spec.csv")).unwrap();
    assert_eq!(s2.arity(), 2);
    let gt2 = ConcreteProgram::try_from(parse_sketch::<f64>(&read("exp2", "ground_truth.txt")).unwrap()).unwrap();
    for (x, y) in s2.pairs() {
        assert!((eval_program(&gt2, x).unwrap() - y).abs() < 1e-6);
    }
}

#[test]
fn exp2_learned_listing_outputs() {
    let learned = ConcreteProgram::try_from(parse_sketch::<f64>(&read("exp2", "learned.txt")).unwrap()).unwrap();
    // (x1, x2) -> x1 < x2 ? (14.287576 / x1) - x2 : (8.472884 * x2) / x1
    let by_hand = |x1: f64, x2: f64| {
        if x1 < x2 {
            14.287576 / x1 - x2
        } else {
            8.472884 * x2 / x1
        }
    };
    let spec: SpecSet64 = load_spec(exp("exp2", "spec.csv")).unwrap();
    for (x, _) in spec.pairs() {
        assert_eq!(eval_program(&learned, x).unwrap(), by_hand(x[0], x[1]));
    }
}

#[test]
fn thetas_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("theta.json");
    let thetas = Thetas(vec![
        HoleTheta::Categorical(CategoricalTheta { logits: vec![0.1 + 0.2, -1e-300, 7.0 / 3.0] }),
        HoleTheta::Gaussian(GaussianTheta { mu: 2.2305248, sigma: 0.5 }),
        HoleTheta::Gaussian(GaussianTheta { mu: -f64::MIN_POSITIVE, sigma: f64::EPSILON }),
    ]);
    save_thetas(&thetas, &path).unwrap();
    let back: Thetas64 = load_thetas(&path, None).unwrap();
    assert_eq!(back, thetas);
    match &back.0[1] {
        HoleTheta::Gaussian(g) => assert_eq!(g.mu.to_bits(), 2.2305248f64.to_bits()),
        _ => unreachable!(),
    }
}

#[test]
fn logits_on_a_real_hole_is_a_kind_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("theta.json");
    let sketch: Sketch64 = parse_sketch("fn f(x: f32) -> f32 { return x [OP] [Real]; }").unwrap();
    fs::write(
        &path,
        r#"[{"kind":"cat","logits":[0,0,0,0]},{"kind":"real","logits":[0,0]}]"#,
    )
    .unwrap();
    assert!(load_thetas::<f64>(&path, Some(&sketch)).is_err());
    fs::write(
        &path,
        r#"[{"kind":"cat","logits":[0,0,0,0]},{"kind":"cat","logits":[0,0,0,0]}]"#,
    )
    .unwrap();
    assert!(matches!(load_thetas::<f64>(&path, Some(&sketch)), Err(Error::Theta(_))));
}

#[test]
fn discrete_only_training_agrees_with_enumeration() {
    // Exp-1 with the reals pinned to the ground-truth constants
    let sketch: Sketch64 = parse_sketch(
        "fn synth_prog(x: f32) -> f32 { if x [COND] 3.5 { return 4.2 [OP] x; } return x [OP] 2.1; }",
    )
    .unwrap();
    let spec: SpecSet64 = load_spec(exp("exp1", "spec.csv")).unwrap();
    let ranked = enumerate_discrete(&sketch, &[], &spec, DEFAULT_ENUMERATION_CAP).unwrap();
    assert_eq!(ranked.len(), 48);
    for seed in 0..3 {
        let cfg = TrainConfig { iterations: 2000, seed, ..TrainConfig::default() };
        let r = train(&sketch, &spec, &cfg).unwrap();
        assert_eq!(eval_spec_loss(&r.final_program, &spec).unwrap(), ranked[0].1, "seed {seed}");
    }
}

#[test]
fn same_seed_same_result() {
    let sketch: Sketch64 = parse_sketch(&read("exp2", "sketch.txt")).unwrap();
    let spec: SpecSet64 = load_spec(exp("exp2", "spec.csv")).unwrap();
    let cfg = TrainConfig { iterations: 500, learning_rate: 0.0995, seed: 11, ..TrainConfig::default() };
    let (a, b) = (train(&sketch, &spec, &cfg).unwrap(), train(&sketch, &spec, &cfg).unwrap());
    assert_eq!(a.final_thetas, b.final_thetas);
    assert_eq!(a.records, b.records);
    assert_eq!(a.best_thetas, b.best_thetas);
}

#[test]
fn single_precision_training_runs() {
    let sketch: Sketch32 = parse_sketch(&read("exp1", "sketch.txt")).unwrap();
    let spec: SpecSet32 = load_spec(exp("exp1", "spec.csv")).unwrap();
    let cfg = TrainConfig { iterations: 10000, seed: 0, ..TrainConfig::default() };
    let r: TrainResult32 = train(&sketch, &spec, &cfg).unwrap();
    assert!(r.best_loss < 0.1, "{}", r.best_loss);
    let text = r.best_program.to_string();
    let back: Sketch32 = parse_sketch(&text).unwrap();
    assert_eq!(&back, r.best_program.sketch());
}
