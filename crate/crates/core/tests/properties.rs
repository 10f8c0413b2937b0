use proptest::prelude::*;
use sketchnes::interp::eval_assigned;
use sketchnes::*;

const EXP1: &str = "fn synth_prog(x: f32) -> f32 { if x [COND] [Real] { return [Real] [OP] x; } return x [OP] [Real]; }";

fn logits(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-20.0f64..20.0, k)
}

fn cat_samples(k: usize) -> impl Strategy<Value = Vec<(usize, f64)>> {
    prop::collection::vec((0..k, -5.0f64..5.0), 1..40)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn softmax_is_a_distribution(l in (2usize..6).prop_flat_map(logits)) {
        let p = softmax(&l);
        prop_assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
        prop_assert!(close(p.iter().sum(), 1.0, 1e-12));
    }

    #[test]
    fn softmax_ignores_a_common_shift(l in logits(4), c in -50.0f64..50.0) {
        let shifted: Vec<f64> = l.iter().map(|v| v + c).collect();
        for (a, b) in softmax(&l).iter().zip(softmax(&shifted)) {
            prop_assert!(close(*a, b, 1e-9));
        }
    }

    #[test]
    fn accumulator_components_sum_to_zero(l in logits(4), s in cat_samples(4)) {
        let theta = CategoricalTheta { logits: l };
        for score in [CategoricalScore::SoftmaxGrad, CategoricalScore::LogSoftmaxGrad] {
            let g = categorical_gradient_with(&theta, &s, score).unwrap();
            let scale: f64 = s.iter().map(|(_, f)| f.abs()).sum::<f64>() + 1.0;
            prop_assert!(g.iter().sum::<f64>().abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn accumulator_ignores_a_logit_shift(l in logits(3), c in -10.0f64..10.0, s in cat_samples(3)) {
        let a = categorical_gradient(&CategoricalTheta { logits: l.clone() }, &s).unwrap();
        let shifted = CategoricalTheta { logits: l.iter().map(|v| v + c).collect() };
        let b = categorical_gradient(&shifted, &s).unwrap();
        for (x, y) in a.iter().zip(b) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn gaussian_gradient_is_linear_in_fitness(
        mu in -5.0f64..5.0,
        sigma in 0.1f64..3.0,
        s in prop::collection::vec((-3.0f64..3.0, -5.0f64..5.0), 1..30),
        k in -4.0f64..4.0,
    ) {
        let theta = GaussianTheta { mu, sigma };
        let g = gaussian_gradient(&theta, &s).unwrap();
        let scaled: Vec<(f64, f64)> = s.iter().map(|&(e, f)| (e, k * f)).collect();
        prop_assert!(close(gaussian_gradient(&theta, &scaled).unwrap(), k * g, 1e-9));
    }

    #[test]
    fn standardized_fitness_is_centred_and_order_reversing(
        losses in prop::collection::vec(-1e3f64..1e3, 2..60),
        shift in -1e3f64..1e3,
    ) {
        let f = standardize_fitness(&losses).unwrap();
        prop_assert!(f.iter().sum::<f64>().abs() <= 1e-8 * f.len() as f64);
        for i in 0..losses.len() {
            for j in 0..losses.len() {
                if losses[i] < losses[j] {
                    prop_assert!(f[i] >= f[j]);
                }
            }
        }
        let moved: Vec<f64> = losses.iter().map(|l| l + shift).collect();
        for (a, b) in f.iter().zip(standardize_fitness(&moved).unwrap()) {
            prop_assert!((a - b).abs() <= 1e-6);
        }
    }

    #[test]
    fn literals_survive_print_and_parse(v in prop::num::f64::NORMAL | prop::num::f64::ZERO | prop::num::f64::SUBNORMAL) {
        let src = format!("fn f(x: f32) -> f32 {{ return x + {v:?}; }}");
        let once: Sketch64 = parse_sketch(&src).unwrap();
        let again: Sketch64 = parse_sketch(&once.to_string()).unwrap();
        prop_assert_eq!(&once, &again);
        let y = eval_program(&ConcreteProgram::try_from(again).unwrap(), &[0.0]).unwrap();
        prop_assert_eq!(y.to_bits(), (0.0 + v).to_bits());
    }

    #[test]
    fn instantiation_fills_every_hole(
        cond in 0usize..3,
        ops in (0usize..4, 0usize..4),
        reals in prop::collection::vec(-10.0f64..10.0, 3),
        x in -10.0f64..10.0,
    ) {
        let sketch: Sketch64 = parse_sketch(EXP1).unwrap();
        let a = Assignment(vec![
            HoleValue::Category(cond),
            HoleValue::Real(reals[0]),
            HoleValue::Real(reals[1]),
            HoleValue::Category(ops.0),
            HoleValue::Category(ops.1),
            HoleValue::Real(reals[2]),
        ]);
        let program = sketch.instantiate(&a).unwrap();
        prop_assert_eq!(program.sketch().hole_count(), 0);
        let lhs = eval_assigned(&sketch, &a, &[x]);
        let rhs = eval_program(&program, &[x]).unwrap();
        prop_assert!(lhs.to_bits() == rhs.to_bits() || (lhs.is_nan() && rhs.is_nan()));
        // the printed program reads back to the same thing
        let back: Sketch64 = parse_sketch(&program.to_string()).unwrap();
        prop_assert_eq!(&back, program.sketch());
    }

    #[test]
    fn thetas_json_is_bit_exact(
        l in logits(3),
        ops in logits(4),
        mu in prop::num::f64::NORMAL,
        sigma in 1e-6f64..1e6,
    ) {
        let thetas = Thetas(vec![
            HoleTheta::Categorical(CategoricalTheta { logits: l }),
            HoleTheta::Gaussian(GaussianTheta { mu, sigma }),
            HoleTheta::Categorical(CategoricalTheta { logits: ops }),
        ]);
        let back = Thetas64::from_json(&thetas.to_json()).unwrap();
        prop_assert_eq!(back, thetas);
    }
}
