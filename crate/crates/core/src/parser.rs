//! Hand-written lexer and recursive-descent parser for sketch files.
//!
//! ```text
//! program  := "fn" IDENT "(" paramlist ")" "->" "f32" "{" [ifstmt] retstmt "}"
//! paramlist:= IDENT ":" "f32" { "," IDENT ":" "f32" }
//! ifstmt   := "if" operand cmptok operand "{" retstmt "}"
//! retstmt  := "return" chain ";"
//! chain    := operand { optok operand }
//! operand  := IDENT | FLOAT | "[Real]"
//! cmptok   := "==" | ">" | "<" | "[COND]"
//! optok    := "+" | "-" | "*" | "/" | "[OP]"
//! ```
//!
//! A `-` directly in operand position is read as the sign of a literal, which
//! is how negative constants are printed.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sketch::{
    BinOp, Chain, CmpOp, CmpSlot, Guard, HoleKind, HoleSpec, OpSlot, Operand, Sketch,
};

const KEYWORDS: [&str; 3] = ["fn", "if", "return"];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Hole(HoleKind),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Colon,
    Comma,
    Arrow,
    Semi,
    EqEq,
    Gt,
    Lt,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Hole(k) => format!("hole `{}`", k.token()),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Colon => ":",
            Tok::Comma => ",",
            Tok::Arrow => "->",
            Tok::Semi => ";",
            Tok::EqEq => "==",
            Tok::Gt => ">",
            Tok::Lt => "<",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            _ => "",
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let peek = chars.get(i + 1).copied();

        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && peek == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }

        let mut push = |tok: Tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned {
                tok,
                line: start_line,
                col: start_col,
            });
            *i += len;
            *col += len;
        };

        match c {
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '{' => push(Tok::LBrace, 1, &mut i, &mut col),
            '}' => push(Tok::RBrace, 1, &mut i, &mut col),
            ':' => push(Tok::Colon, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            ';' => push(Tok::Semi, 1, &mut i, &mut col),
            '>' => push(Tok::Gt, 1, &mut i, &mut col),
            '<' => push(Tok::Lt, 1, &mut i, &mut col),
            '+' => push(Tok::Plus, 1, &mut i, &mut col),
            '*' => push(Tok::Star, 1, &mut i, &mut col),
            '/' => push(Tok::Slash, 1, &mut i, &mut col),
            '-' if peek == Some('>') => push(Tok::Arrow, 2, &mut i, &mut col),
            '-' => push(Tok::Minus, 1, &mut i, &mut col),
            '=' if peek == Some('=') => push(Tok::EqEq, 2, &mut i, &mut col),
            '[' => {
                let end = chars[i..]
                    .iter()
                    .position(|&ch| ch == ']' || ch == '\n')
                    .map(|p| i + p)
                    .filter(|&p| chars[p] == ']')
                    .ok_or_else(|| syntax(line, col, "unterminated hole token"))?;
                let name: String = chars[i + 1..end].iter().collect();
                let kind = match name.as_str() {
                    "COND" => HoleKind::Cond,
                    "OP" => HoleKind::Op,
                    "Real" => HoleKind::Real,
                    _ => {
                        return Err(syntax(
                            line,
                            col,
                            format!("unknown hole `[{name}]`; expected [COND], [OP] or [Real]"),
                        ))
                    }
                };
                push(Tok::Hole(kind), end + 1 - i, &mut i, &mut col);
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j < chars.len() && chars[j] == '.' {
                    j += 1;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                    let mut k = j + 1;
                    if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        while k < chars.len() && chars[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let text: String = chars[i..j].iter().collect();
                push(Tok::Number(text), j - i, &mut i, &mut col);
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let text: String = chars[i..j].iter().collect();
                push(Tok::Ident(text), j - i, &mut i, &mut col);
            }
            other => return Err(syntax(line, col, format!("unexpected character `{other}`"))),
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser<T> {
    toks: Vec<Spanned>,
    pos: usize,
    params: Vec<String>,
    holes: Vec<HoleSpec>,
    _scalar: std::marker::PhantomData<T>,
}

impl<T: Scalar> Parser<T> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, t: &Spanned, wanted: &str) -> Error {
        syntax(
            t.line,
            t.col,
            format!("expected {wanted}, found {}", t.tok.describe()),
        )
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        let t = self.next();
        if t.tok == tok {
            Ok(())
        } else {
            Err(self.unexpected(&t, &format!("`{}`", tok.symbol())))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(()),
            _ => Err(self.unexpected(&t, &format!("`{kw}`"))),
        }
    }

    fn ident(&mut self) -> Result<String> {
        let t = self.next();
        match t.tok {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => Ok(s),
            _ => Err(self.unexpected(&t, "identifier")),
        }
    }

    fn new_hole(&mut self, kind: HoleKind) -> usize {
        let index = self.holes.len();
        self.holes.push(HoleSpec { index, kind });
        index
    }

    fn program(mut self) -> Result<Sketch<T>> {
        self.expect_keyword("fn")?;
        let name = self.ident()?;
        self.expect(Tok::LParen)?;
        if self.peek().tok == Tok::RParen {
            return Err(Error::ZeroArity(name));
        }
        loop {
            let param_tok = self.peek().clone();
            let param = self.ident()?;
            if self.params.contains(&param) {
                return Err(syntax(
                    param_tok.line,
                    param_tok.col,
                    format!("duplicate parameter `{param}`"),
                ));
            }
            self.expect(Tok::Colon)?;
            self.expect_keyword("f32")?;
            self.params.push(param);
            if self.peek().tok == Tok::Comma {
                self.next();
            } else {
                break;
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Arrow)?;
        self.expect_keyword("f32")?;
        self.expect(Tok::LBrace)?;

        let guard = match &self.peek().tok {
            Tok::Ident(s) if s == "if" => Some(self.if_stmt()?),
            _ => None,
        };
        let ret = self.ret_stmt()?;
        self.expect(Tok::RBrace)?;
        let t = self.next();
        if t.tok != Tok::Eof {
            return Err(self.unexpected(&t, "end of input"));
        }

        Ok(Sketch {
            name,
            params: self.params,
            guard,
            ret,
            holes: self.holes,
        })
    }

    fn if_stmt(&mut self) -> Result<Guard<T>> {
        self.expect_keyword("if")?;
        let lhs = self.operand()?;
        let t = self.next();
        let cmp = match t.tok {
            Tok::EqEq => CmpSlot::Fixed(CmpOp::Eq),
            Tok::Gt => CmpSlot::Fixed(CmpOp::Gt),
            Tok::Lt => CmpSlot::Fixed(CmpOp::Lt),
            Tok::Hole(HoleKind::Cond) => CmpSlot::Hole(self.new_hole(HoleKind::Cond)),
            Tok::Hole(found) => {
                return Err(Error::HolePosition {
                    line: t.line,
                    col: t.col,
                    found,
                    expected: "a comparison",
                })
            }
            _ => return Err(self.unexpected(&t, "comparison")),
        };
        let rhs = self.operand()?;
        self.expect(Tok::LBrace)?;
        let body = self.ret_stmt()?;
        self.expect(Tok::RBrace)?;
        Ok(Guard {
            lhs,
            cmp,
            rhs,
            body,
        })
    }

    fn ret_stmt(&mut self) -> Result<Chain<T>> {
        self.expect_keyword("return")?;
        let first = self.operand()?;
        let mut rest = Vec::new();
        loop {
            let t = self.peek().clone();
            let op = match t.tok {
                Tok::Plus => OpSlot::Fixed(BinOp::Add),
                Tok::Minus => OpSlot::Fixed(BinOp::Sub),
                Tok::Star => OpSlot::Fixed(BinOp::Mul),
                Tok::Slash => OpSlot::Fixed(BinOp::Div),
                Tok::Hole(HoleKind::Op) => {
                    self.next();
                    rest.push((OpSlot::Hole(self.new_hole(HoleKind::Op)), self.operand()?));
                    continue;
                }
                Tok::Hole(found) => {
                    return Err(Error::HolePosition {
                        line: t.line,
                        col: t.col,
                        found,
                        expected: "an operator or `;`",
                    })
                }
                _ => break,
            };
            self.next();
            rest.push((op, self.operand()?));
        }
        self.expect(Tok::Semi)?;
        Ok(Chain { first, rest })
    }

    fn number(&self, t: &Spanned, text: &str, negative: bool) -> Result<T> {
        let v: T = text
            .parse()
            .map_err(|_| syntax(t.line, t.col, format!("invalid number `{text}`")))?;
        Ok(if negative { -v } else { v })
    }

    fn operand(&mut self) -> Result<Operand<T>> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(name) => match self.params.iter().position(|p| p == name) {
                Some(i) => Ok(Operand::Var(i)),
                None => Err(syntax(t.line, t.col, format!("unknown variable `{name}`"))),
            },
            Tok::Number(text) => Ok(Operand::Lit(self.number(&t, text, false)?)),
            Tok::Minus => {
                let n = self.next();
                match &n.tok {
                    Tok::Number(text) => Ok(Operand::Lit(self.number(&n, text, true)?)),
                    _ => Err(self.unexpected(&n, "number after unary `-`")),
                }
            }
            Tok::Hole(HoleKind::Real) => Ok(Operand::Hole(self.new_hole(HoleKind::Real))),
            Tok::Hole(found) => Err(Error::HolePosition {
                line: t.line,
                col: t.col,
                found: *found,
                expected: "an operand",
            }),
            _ => Err(self.unexpected(&t, "operand")),
        }
    }
}

/// Parses sketch (or hole-free program) source text.
///
/// Holes are numbered left to right, top to bottom.
pub fn parse_sketch<T: Scalar>(text: &str) -> Result<Sketch<T>> {
    let parser = Parser {
        toks: lex(text)?,
        pos: 0,
        params: Vec::new(),
        holes: Vec::new(),
        _scalar: std::marker::PhantomData,
    };
    parser.program()
}
