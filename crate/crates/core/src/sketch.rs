//! Sketch AST, hole taxonomy and hole substitution.
//!
//! A sketch is a tiny Rust-flavored function: an optional guarded return
//! followed by a mandatory return. Expressions are flat operand/operator
//! chains evaluated left to right without precedence, so `a op1 b op2 c`
//! always means `(a op1 b) op2 c` whatever tokens the holes end up with.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Comparison tokens, in hole-category order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Gt,
    Lt,
}

impl CmpOp {
    pub const ALL: [CmpOp; 3] = [CmpOp::Eq, CmpOp::Gt, CmpOp::Lt];

    pub fn token(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Gt => ">",
            CmpOp::Lt => "<",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn apply<T: Scalar>(self, lhs: T, rhs: T) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Lt => lhs < rhs,
        }
    }
}

/// Arithmetic tokens, in hole-category order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub const ALL: [BinOp; 4] = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div];

    pub fn token(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// IEEE arithmetic; division by zero yields ±inf or NaN.
    pub fn apply<T: Scalar>(self, lhs: T, rhs: T) -> T {
        match self {
            BinOp::Add => lhs + rhs,
            BinOp::Sub => lhs - rhs,
            BinOp::Mul => lhs * rhs,
            BinOp::Div => lhs / rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HoleKind {
    Cond,
    Op,
    Real,
}

impl HoleKind {
    /// Number of tokens for categorical holes, `None` for `Real`.
    pub fn arity(self) -> Option<usize> {
        match self {
            HoleKind::Cond => Some(CmpOp::ALL.len()),
            HoleKind::Op => Some(BinOp::ALL.len()),
            HoleKind::Real => None,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            HoleKind::Cond => "[COND]",
            HoleKind::Op => "[OP]",
            HoleKind::Real => "[Real]",
        }
    }

    /// Printed form of category `index` for a categorical hole.
    pub fn category_token(self, index: usize) -> Option<&'static str> {
        match self {
            HoleKind::Cond => CmpOp::ALL.get(index).map(|c| c.token()),
            HoleKind::Op => BinOp::ALL.get(index).map(|o| o.token()),
            HoleKind::Real => None,
        }
    }
}

impl fmt::Display for HoleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HoleKind::Cond => "Cond",
            HoleKind::Op => "Op",
            HoleKind::Real => "Real",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HoleSpec {
    pub index: usize,
    pub kind: HoleKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Operand<T> {
    /// Input parameter by position.
    Var(usize),
    Lit(T),
    /// `[Real]` hole, by hole-table index.
    Hole(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpSlot {
    Fixed(CmpOp),
    Hole(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpSlot {
    Fixed(BinOp),
    Hole(usize),
}

/// `first op1 second op2 third ...`, folded from the left.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain<T> {
    pub first: Operand<T>,
    pub rest: Vec<(OpSlot, Operand<T>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Guard<T> {
    pub lhs: Operand<T>,
    pub cmp: CmpSlot,
    pub rhs: Operand<T>,
    pub body: Chain<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sketch<T> {
    pub name: String,
    pub params: Vec<String>,
    pub guard: Option<Guard<T>>,
    pub ret: Chain<T>,
    pub holes: Vec<HoleSpec>,
}

/// Value chosen for one hole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HoleValue<T> {
    Category(usize),
    Real(T),
}

impl<T> HoleValue<T> {
    fn describe(&self) -> &'static str {
        match self {
            HoleValue::Category(_) => "category",
            HoleValue::Real(_) => "real",
        }
    }
}

/// One value per hole, in hole-table order.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<T>(pub Vec<HoleValue<T>>);

impl<T: Copy> Assignment<T> {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn category(&self, hole: usize) -> usize {
        match self.0[hole] {
            HoleValue::Category(c) => c,
            HoleValue::Real(_) => panic!("hole {hole} holds a real, not a category"),
        }
    }

    pub fn real(&self, hole: usize) -> T {
        match self.0[hole] {
            HoleValue::Real(v) => v,
            HoleValue::Category(_) => panic!("hole {hole} holds a category, not a real"),
        }
    }
}

impl<T: Scalar> Sketch<T> {
    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn hole_count(&self) -> usize {
        self.holes.len()
    }

    pub fn is_concrete(&self) -> bool {
        self.holes.is_empty()
    }

    /// Checks that `a` supplies one value of the right kind for every hole.
    pub fn check_assignment(&self, a: &Assignment<T>) -> Result<()> {
        if a.len() != self.holes.len() {
            return Err(Error::AssignmentLength {
                expected: self.holes.len(),
                got: a.len(),
            });
        }
        for (hole, value) in self.holes.iter().zip(&a.0) {
            match (hole.kind.arity(), value) {
                (Some(arity), HoleValue::Category(c)) => {
                    if *c >= arity {
                        return Err(Error::CategoryOutOfRange {
                            index: hole.index,
                            kind: hole.kind,
                            category: *c,
                            arity,
                        });
                    }
                }
                (None, HoleValue::Real(_)) => {}
                _ => {
                    return Err(Error::AssignmentKind {
                        index: hole.index,
                        kind: hole.kind,
                        got: value.describe(),
                    })
                }
            }
        }
        Ok(())
    }

    /// Substitutes every hole, producing a hole-free program.
    pub fn instantiate(&self, a: &Assignment<T>) -> Result<ConcreteProgram<T>> {
        self.check_assignment(a)?;
        let operand = |o: &Operand<T>| match *o {
            Operand::Hole(h) => Operand::Lit(a.real(h)),
            other => other,
        };
        let op = |s: &OpSlot| match *s {
            OpSlot::Hole(h) => OpSlot::Fixed(BinOp::ALL[a.category(h)]),
            other => other,
        };
        let chain = |c: &Chain<T>| Chain {
            first: operand(&c.first),
            rest: c.rest.iter().map(|(s, o)| (op(s), operand(o))).collect(),
        };
        let guard = self.guard.as_ref().map(|g| Guard {
            lhs: operand(&g.lhs),
            cmp: match g.cmp {
                CmpSlot::Hole(h) => CmpSlot::Fixed(CmpOp::ALL[a.category(h)]),
                other => other,
            },
            rhs: operand(&g.rhs),
            body: chain(&g.body),
        });
        Ok(ConcreteProgram(Sketch {
            name: self.name.clone(),
            params: self.params.clone(),
            guard,
            ret: chain(&self.ret),
            holes: Vec::new(),
        }))
    }

    /// Indices of the categorical holes, in hole-table order.
    pub fn categorical_holes(&self) -> impl Iterator<Item = &HoleSpec> {
        self.holes.iter().filter(|h| h.kind != HoleKind::Real)
    }

    /// Indices of the `[Real]` holes, in hole-table order.
    pub fn real_holes(&self) -> impl Iterator<Item = &HoleSpec> {
        self.holes.iter().filter(|h| h.kind == HoleKind::Real)
    }
}

/// A sketch with every hole filled.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcreteProgram<T>(Sketch<T>);

impl<T: Scalar> ConcreteProgram<T> {
    pub fn sketch(&self) -> &Sketch<T> {
        &self.0
    }

    pub fn into_sketch(self) -> Sketch<T> {
        self.0
    }

    pub fn arity(&self) -> usize {
        self.0.arity()
    }
}

impl<T: Scalar> TryFrom<Sketch<T>> for ConcreteProgram<T> {
    type Error = Error;

    fn try_from(sketch: Sketch<T>) -> Result<Self> {
        if sketch.is_concrete() {
            Ok(ConcreteProgram(sketch))
        } else {
            Err(Error::RemainingHoles(sketch.hole_count()))
        }
    }
}
