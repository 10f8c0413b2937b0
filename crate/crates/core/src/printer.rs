//! Canonical source formatting for sketches and concrete programs.

use std::fmt::{self, Write};

use crate::scalar::Scalar;
use crate::sketch::{Chain, CmpSlot, HoleKind, OpSlot, Operand, Sketch};

impl<T: Scalar> Sketch<T> {
    fn write_operand(&self, out: &mut impl Write, o: &Operand<T>) -> fmt::Result {
        match o {
            Operand::Var(i) => out.write_str(&self.params[*i]),
            // Debug gives the shortest decimal that reads back to the same value.
            Operand::Lit(v) => write!(out, "{v:?}"),
            Operand::Hole(_) => out.write_str(HoleKind::Real.token()),
        }
    }

    fn write_chain(&self, out: &mut impl Write, c: &Chain<T>) -> fmt::Result {
        self.write_operand(out, &c.first)?;
        for (op, operand) in &c.rest {
            let tok = match op {
                OpSlot::Fixed(b) => b.token(),
                OpSlot::Hole(_) => HoleKind::Op.token(),
            };
            write!(out, " {tok} ")?;
            self.write_operand(out, operand)?;
        }
        Ok(())
    }
}

impl<T: Scalar> fmt::Display for Sketch<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(|p| format!("{p}: f32")).collect();
        writeln!(f, "fn {}({}) -> f32", self.name, params.join(", "))?;
        writeln!(f, "{{")?;
        if let Some(g) = &self.guard {
            f.write_str("    if ")?;
            self.write_operand(f, &g.lhs)?;
            let cmp = match g.cmp {
                CmpSlot::Fixed(c) => c.token(),
                CmpSlot::Hole(_) => HoleKind::Cond.token(),
            };
            write!(f, " {cmp} ")?;
            self.write_operand(f, &g.rhs)?;
            f.write_str("\n    {\n        return ")?;
            self.write_chain(f, &g.body)?;
            f.write_str(";\n    }\n\n")?;
        }
        f.write_str("    return ")?;
        self.write_chain(f, &self.ret)?;
        f.write_str(";\n}\n")
    }
}

impl<T: Scalar> fmt::Display for crate::sketch::ConcreteProgram<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.sketch().fmt(f)
    }
}

/// Canonical source text of a sketch or program.
pub fn print_program<T: Scalar>(s: &Sketch<T>) -> String {
    s.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_sketch;

    #[test]
    fn hole_and_literal_tokens() {
        let s = parse_sketch::<f64>(
            "fn f(x: f32) -> f32 { if x [COND] 3.5 { return [Real] [OP] x; } return x - -2.0; }",
        )
        .unwrap();
        let text = print_program(&s);
        assert!(text.contains("if x [COND] 3.5"), "{text}");
        assert!(text.contains("return [Real] [OP] x;"), "{text}");
        assert!(text.contains("return x - -2.0;"), "{text}");
    }

    #[test]
    fn print_is_a_fixed_point_after_one_pass() {
        let src = "fn   synth_prog ( x : f32 )->f32{if x [COND] [Real]{return [Real] [OP] x;}return x [OP] [Real];}";
        let once = print_program(&parse_sketch::<f64>(src).unwrap());
        let twice = print_program(&parse_sketch::<f64>(&once).unwrap());
        assert_eq!(once, twice);
    }
}
