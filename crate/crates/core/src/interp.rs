//! Total IEEE evaluation of programs and the mean-squared-error objective.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sketch::{Assignment, BinOp, Chain, CmpOp, CmpSlot, ConcreteProgram, OpSlot, Operand, Sketch};
use crate::specset::SpecSet;

/// Loss assigned to a candidate whose predictions are not all finite.
pub const DEFAULT_PENALTY: f64 = 1e12;

/// Resolves holes through `a` while evaluating; `a` must already be checked
/// against the sketch's hole table.
struct Frame<'a, T> {
    holes: &'a Assignment<T>,
    x: &'a [T],
}

impl<T: Scalar> Frame<'_, T> {
    #[inline]
    fn operand(&self, o: &Operand<T>) -> T {
        match *o {
            Operand::Var(i) => self.x[i],
            Operand::Lit(v) => v,
            Operand::Hole(h) => self.holes.real(h),
        }
    }

    #[inline]
    fn chain(&self, c: &Chain<T>) -> T {
        c.rest.iter().fold(self.operand(&c.first), |acc, (op, rhs)| {
            let op = match *op {
                OpSlot::Fixed(b) => b,
                OpSlot::Hole(h) => BinOp::ALL[self.holes.category(h)],
            };
            op.apply(acc, self.operand(rhs))
        })
    }

    fn program(&self, s: &Sketch<T>) -> T {
        if let Some(g) = &s.guard {
            let cmp = match g.cmp {
                CmpSlot::Fixed(c) => c,
                CmpSlot::Hole(h) => CmpOp::ALL[self.holes.category(h)],
            };
            if cmp.apply(self.operand(&g.lhs), self.operand(&g.rhs)) {
                return self.chain(&g.body);
            }
        }
        self.chain(&s.ret)
    }
}

/// Evaluates `sketch` with its holes filled by `a`, without building the
/// instantiated AST. Panics if `a` or `x` do not fit the sketch; use
/// [`Sketch::check_assignment`] first.
pub fn eval_assigned<T: Scalar>(sketch: &Sketch<T>, a: &Assignment<T>, x: &[T]) -> T {
    debug_assert_eq!(x.len(), sketch.arity());
    Frame { holes: a, x }.program(sketch)
}

pub fn eval_program<T: Scalar>(p: &ConcreteProgram<T>, x: &[T]) -> Result<T> {
    if x.len() != p.arity() {
        return Err(Error::ArityMismatch {
            expected: p.arity(),
            got: x.len(),
        });
    }
    Ok(eval_assigned(p.sketch(), &Assignment(Vec::new()), x))
}

/// Mean squared error of `sketch` under `a` over the spec pairs.
///
/// Any non-finite prediction, or a non-finite mean, yields `penalty`; the
/// result is also capped at `penalty`.
pub fn spec_loss_assigned<T: Scalar>(
    sketch: &Sketch<T>,
    a: &Assignment<T>,
    spec: &SpecSet<T>,
    penalty: T,
) -> T {
    let mut total = T::zero();
    for (x, target) in spec.pairs() {
        let y = eval_assigned(sketch, a, x);
        if !y.is_finite() {
            return penalty;
        }
        let d = y - *target;
        total = total + d * d;
    }
    let mse = total / T::from_usize(spec.len()).unwrap();
    if mse.is_finite() {
        mse.min(penalty)
    } else {
        penalty
    }
}

fn check_spec<T: Scalar>(arity: usize, spec: &SpecSet<T>) -> Result<()> {
    if spec.is_empty() {
        return Err(Error::EmptySpec);
    }
    if spec.arity() != arity {
        return Err(Error::ArityMismatch {
            expected: arity,
            got: spec.arity(),
        });
    }
    Ok(())
}

pub fn eval_spec_loss_with_penalty<T: Scalar>(
    p: &ConcreteProgram<T>,
    spec: &SpecSet<T>,
    penalty: T,
) -> Result<T> {
    check_spec(p.arity(), spec)?;
    Ok(spec_loss_assigned(p.sketch(), &Assignment(Vec::new()), spec, penalty))
}

/// Spec MSE of a concrete program with the default non-finite penalty.
pub fn eval_spec_loss<T: Scalar>(p: &ConcreteProgram<T>, spec: &SpecSet<T>) -> Result<T> {
    eval_spec_loss_with_penalty(p, spec, T::of(DEFAULT_PENALTY))
}

/// Validates that `spec` fits `sketch` before a run of [`spec_loss_assigned`].
pub fn check_spec_for<T: Scalar>(sketch: &Sketch<T>, spec: &SpecSet<T>) -> Result<()> {
    check_spec(sketch.arity(), spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_sketch;

    const GT1: &str = "fn ground_truth_prog(x: f32) -> f32 { if x > 3.5 { return 4.2 * x; } return x * 2.1; }";

    fn program(src: &str) -> ConcreteProgram<f64> {
        ConcreteProgram::try_from(parse_sketch::<f64>(src).unwrap()).unwrap()
    }

    #[test]
    fn exp1_ground_truth_points() {
        let p = program(GT1);
        assert_eq!(eval_program(&p, &[4.0]).unwrap(), 4.2 * 4.0);
        assert_eq!(eval_program(&p, &[4.0]).unwrap(), 16.8);
        // guard is strict
        assert_eq!(eval_program(&p, &[3.5]).unwrap(), 3.5 * 2.1);
        assert!((eval_program(&p, &[3.5]).unwrap() - 7.35).abs() < 1e-12);
    }

    #[test]
    fn chains_fold_left_without_precedence() {
        let p = program("fn f(a: f32, b: f32) -> f32 { return 2.0 + a * b; }");
        // (2 + 3) * 4, not 2 + 12
        assert_eq!(eval_program(&p, &[3.0, 4.0]).unwrap(), 20.0);
    }

    #[test]
    fn division_by_zero_flows_through() {
        let p = program("fn f(x1: f32, x2: f32) -> f32 { return 2.0 / x2 - x1; }");
        assert_eq!(eval_program(&p, &[0.0, 0.0]).unwrap(), f64::INFINITY);
        assert_eq!(eval_program(&p, &[0.0, -0.0]).unwrap(), f64::NEG_INFINITY);
        let q = program("fn f(x: f32) -> f32 { return 0.0 / x; }");
        assert!(eval_program(&q, &[0.0]).unwrap().is_nan());
    }

    #[test]
    fn equality_is_exact() {
        let p = program("fn f(x: f32) -> f32 { if x == 0.3 { return 1.0; } return 0.0; }");
        assert_eq!(eval_program(&p, &[0.3]).unwrap(), 1.0);
        assert_eq!(eval_program(&p, &[0.1 + 0.2]).unwrap(), 0.0);
    }

    #[test]
    fn arity_mismatch() {
        let p = program(GT1);
        assert!(matches!(
            eval_program(&p, &[1.0, 2.0]),
            Err(Error::ArityMismatch { expected: 1, got: 2 })
        ));
    }

    fn exp1_spec() -> SpecSet<f64> {
        SpecSet::new(
            vec![vec![1.0], vec![2.0], vec![4.0], vec![5.0]],
            vec![2.1, 4.2, 16.8, 21.0],
        )
        .unwrap()
    }

    #[test]
    fn ground_truth_loss_is_zero() {
        assert_eq!(eval_spec_loss(&program(GT1), &exp1_spec()).unwrap(), 0.0);
    }

    #[test]
    fn learned_listing_loss() {
        let learned = program(
            "fn synth_prog(x: f32) -> f32 { if x < 2.2305248 { return 2.4594104 * x; } return x * 4.0324993; }",
        );
        // independent recomputation from the listing's constants
        let preds = [2.4594104 * 1.0, 2.4594104 * 2.0, 4.0 * 4.0324993, 5.0 * 4.0324993];
        let targets = [2.1, 4.2, 16.8, 21.0];
        let want: f64 = preds
            .iter()
            .zip(targets)
            .map(|(p, t)| (p - t) * (p - t))
            .sum::<f64>()
            / 4.0;
        let got = eval_spec_loss(&learned, &exp1_spec()).unwrap();
        assert!((got - want).abs() < 1e-12);
        assert!(got > 0.0);
    }

    #[test]
    fn nan_prediction_gets_penalty() {
        let p = program("fn f(x: f32) -> f32 { return x * 0.0 / 0.0; }");
        assert_eq!(eval_spec_loss(&p, &exp1_spec()).unwrap(), 1e12);
    }

    #[test]
    fn spec_arity_checked() {
        let p = program("fn f(a: f32, b: f32) -> f32 { return a; }");
        assert!(matches!(
            eval_spec_loss(&p, &exp1_spec()),
            Err(Error::ArityMismatch { .. })
        ));
    }
}
