use std::fmt;

use thiserror::Error;

use super::{FoFormula, PropFormula};

/// A syntax error: where parsing stopped and what would have been accepted.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    /// Byte offset into the input.
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at byte {}: expected one of {}, found {}",
            self.offset,
            self.expected.join(" "),
            self.found
        )
    }
}

/// `[a-z][a-z0-9_]*`, excluding the keywords `true`, `false` and `in`.
pub fn is_atom_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        && !matches!(s, "true" | "false" | "in")
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Iff,
    Implies,
    Or,
    And,
    Not,
    Box,
    Diamond,
    LParen,
    RParen,
    True,
    False,
    Ident(String),
    Forall,
    Exists,
    Dot,
    In,
    Eq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Iff => "\"<->\"".into(),
            Tok::Implies => "\"->\"".into(),
            Tok::Or => "\"|\"".into(),
            Tok::And => "\"&\"".into(),
            Tok::Not => "\"~\"".into(),
            Tok::Box => "\"[]\"".into(),
            Tok::Diamond => "\"<>\"".into(),
            Tok::LParen => "\"(\"".into(),
            Tok::RParen => "\")\"".into(),
            Tok::True => "\"true\"".into(),
            Tok::False => "\"false\"".into(),
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Forall => "\"A\"".into(),
            Tok::Exists => "\"E\"".into(),
            Tok::Dot => "\".\"".into(),
            Tok::In => "\"in\"".into(),
            Tok::Eq => "\"=\"".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |i: usize, found: String| ParseError {
        offset: i,
        expected: vec!["a token"],
        found,
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let rest = &text[i..];
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Implies, 2)
        } else if rest.starts_with("<>") {
            (Tok::Diamond, 2)
        } else if rest.starts_with("[]") {
            (Tok::Box, 2)
        } else {
            match c {
                b'|' => (Tok::Or, 1),
                b'&' => (Tok::And, 1),
                b'~' => (Tok::Not, 1),
                b'(' => (Tok::LParen, 1),
                b')' => (Tok::RParen, 1),
                b'.' => (Tok::Dot, 1),
                b'=' => (Tok::Eq, 1),
                b'A' => (Tok::Forall, 1),
                b'E' => (Tok::Exists, 1),
                b'a'..=b'z' => {
                    let len = rest
                        .bytes()
                        .take_while(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || *b == b'_')
                        .count();
                    let word = &rest[..len];
                    let tok = match word {
                        "true" => Tok::True,
                        "false" => Tok::False,
                        "in" => Tok::In,
                        _ => Tok::Ident(word.to_string()),
                    };
                    (tok, len)
                }
                _ => {
                    let ch = rest.chars().next().unwrap_or('?');
                    return Err(err(i, format!("{ch:?}")));
                }
            }
        };
        out.push((i, tok));
        i += len;
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

const BINARY_CONTINUATIONS: [&str; 4] = ["\"&\"", "\"|\"", "\"->\"", "\"<->\""];

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    first_order: bool,
}

/// Shared precedence-climbing skeleton; the two languages differ only in
/// their unary level.
trait Lang: Sized {
    fn iff(a: Self, b: Self) -> Self;
    fn implies(a: Self, b: Self) -> Self;
    fn or(a: Self, b: Self) -> Self;
    fn and(a: Self, b: Self) -> Self;
    fn unary(p: &mut Parser) -> Result<Self, ParseError>;
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected,
            found: self.peek().describe(),
        }
    }

    fn unary_starts(&self) -> Vec<&'static str> {
        let mut v = vec!["\"~\"", "\"[]\"", "\"<>\"", "\"true\"", "\"false\""];
        if self.first_order {
            v.extend(["\"A\"", "\"E\"", "variable"]);
        } else {
            v.push("atom");
        }
        v.push("\"(\"");
        v
    }

    fn formula<L: Lang>(&mut self) -> Result<L, ParseError> {
        let mut lhs = self.imp::<L>()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.imp::<L>()?;
            lhs = L::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp<L: Lang>(&mut self) -> Result<L, ParseError> {
        let lhs = self.or::<L>()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.imp::<L>()?;
            return Ok(L::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or<L: Lang>(&mut self) -> Result<L, ParseError> {
        let mut lhs = self.and::<L>()?;
        while self.eat(&Tok::Or) {
            let rhs = self.and::<L>()?;
            lhs = L::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and<L: Lang>(&mut self) -> Result<L, ParseError> {
        let mut lhs = L::unary(self)?;
        while self.eat(&Tok::And) {
            let rhs = L::unary(self)?;
            lhs = L::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn close_paren(&mut self) -> Result<(), ParseError> {
        if self.eat(&Tok::RParen) {
            Ok(())
        } else {
            let mut expected = BINARY_CONTINUATIONS.to_vec();
            expected.push("\")\"");
            Err(self.error(expected))
        }
    }

    fn ident(&mut self, what: &'static str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.error(vec![what])),
        }
    }

    fn finish<L: Lang>(mut self) -> Result<L, ParseError> {
        let f = self.formula::<L>()?;
        if *self.peek() != Tok::Eof {
            let mut expected = BINARY_CONTINUATIONS.to_vec();
            expected.push("end of input");
            return Err(self.error(expected));
        }
        Ok(f)
    }
}

impl Lang for PropFormula {
    fn iff(a: Self, b: Self) -> Self {
        PropFormula::iff(a, b)
    }
    fn implies(a: Self, b: Self) -> Self {
        PropFormula::implies(a, b)
    }
    fn or(a: Self, b: Self) -> Self {
        PropFormula::or(a, b)
    }
    fn and(a: Self, b: Self) -> Self {
        PropFormula::and(a, b)
    }

    fn unary(p: &mut Parser) -> Result<Self, ParseError> {
        match p.peek().clone() {
            Tok::Not => {
                p.bump();
                Ok(PropFormula::not(Self::unary(p)?))
            }
            Tok::Box => {
                p.bump();
                Ok(PropFormula::necessarily(Self::unary(p)?))
            }
            Tok::Diamond => {
                p.bump();
                Ok(PropFormula::diamond(Self::unary(p)?))
            }
            Tok::True => {
                p.bump();
                Ok(PropFormula::True)
            }
            Tok::False => {
                p.bump();
                Ok(PropFormula::False)
            }
            Tok::Ident(name) => {
                p.bump();
                Ok(PropFormula::Atom(name))
            }
            Tok::LParen => {
                p.bump();
                let f = p.formula::<PropFormula>()?;
                p.close_paren()?;
                Ok(f)
            }
            _ => Err(p.error(p.unary_starts())),
        }
    }
}

impl Lang for FoFormula {
    fn iff(a: Self, b: Self) -> Self {
        FoFormula::Iff(Box::new(a), Box::new(b))
    }
    fn implies(a: Self, b: Self) -> Self {
        FoFormula::Implies(Box::new(a), Box::new(b))
    }
    fn or(a: Self, b: Self) -> Self {
        FoFormula::Or(Box::new(a), Box::new(b))
    }
    fn and(a: Self, b: Self) -> Self {
        FoFormula::And(Box::new(a), Box::new(b))
    }

    fn unary(p: &mut Parser) -> Result<Self, ParseError> {
        match p.peek().clone() {
            Tok::Not => {
                p.bump();
                Ok(FoFormula::Not(Box::new(Self::unary(p)?)))
            }
            Tok::Box => {
                p.bump();
                Ok(FoFormula::Box(Box::new(Self::unary(p)?)))
            }
            Tok::Diamond => {
                p.bump();
                Ok(FoFormula::Diamond(Box::new(Self::unary(p)?)))
            }
            Tok::True => {
                p.bump();
                Ok(FoFormula::True)
            }
            Tok::False => {
                p.bump();
                Ok(FoFormula::False)
            }
            q @ (Tok::Forall | Tok::Exists) => {
                p.bump();
                let var = p.ident("variable")?;
                if !p.eat(&Tok::Dot) {
                    return Err(p.error(vec!["\".\""]));
                }
                let body = Box::new(Self::unary(p)?);
                Ok(if q == Tok::Forall {
                    FoFormula::Forall(var, body)
                } else {
                    FoFormula::Exists(var, body)
                })
            }
            Tok::Ident(x) => {
                p.bump();
                let member = match p.peek() {
                    Tok::In => true,
                    Tok::Eq => false,
                    _ => return Err(p.error(vec!["\"in\"", "\"=\""])),
                };
                p.bump();
                let y = p.ident("variable")?;
                Ok(if member {
                    FoFormula::Member(x, y)
                } else {
                    FoFormula::Equal(x, y)
                })
            }
            Tok::LParen => {
                p.bump();
                let f = p.formula::<FoFormula>()?;
                p.close_paren()?;
                Ok(f)
            }
            _ => Err(p.error(p.unary_starts())),
        }
    }
}

/// Parses a propositional modal formula.
///
/// Precedence, tightest first: `~ [] <>`, `&`, `|`, `->` (right
/// associative), `<->`.
pub fn parse_prop(text: &str) -> Result<PropFormula, ParseError> {
    let toks = lex(text)?;
    if let Some((offset, t)) = toks
        .iter()
        .find(|(_, t)| matches!(t, Tok::Forall | Tok::Exists | Tok::Dot | Tok::In | Tok::Eq))
    {
        return Err(ParseError {
            offset: *offset,
            expected: vec!["propositional token"],
            found: t.describe(),
        });
    }
    Parser {
        toks,
        pos: 0,
        first_order: false,
    }
    .finish()
}

/// Parses a first-order modal formula. Quantifiers `A x .` and `E x .` are
/// prefix operators binding as tightly as `~`. Variables bound twice on one
/// branch are renamed apart.
pub fn parse_fo(text: &str) -> Result<FoFormula, ParseError> {
    let toks = lex(text)?;
    let f: FoFormula = Parser {
        toks,
        pos: 0,
        first_order: true,
    }
    .finish()?;
    Ok(f.rename_apart())
}

// Precedence levels used by both renderers.
const IFF: u8 = 1;
const IMP: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;

enum Shape<'a, T> {
    Leaf(String),
    Prefix(String, &'a T),
    Binary(u8, &'static str, &'a T, &'a T),
}

trait Render: Sized {
    fn shape(&self) -> Shape<'_, Self>;

    fn prec(&self) -> u8 {
        match self.shape() {
            Shape::Leaf(_) | Shape::Prefix(..) => UNARY,
            Shape::Binary(p, ..) => p,
        }
    }

    fn write(&self, out: &mut String) {
        match self.shape() {
            Shape::Leaf(s) => out.push_str(&s),
            Shape::Prefix(op, body) => {
                out.push_str(&op);
                body.write_wrapped(out, body.prec() < UNARY);
            }
            Shape::Binary(p, op, l, r) => {
                // `->` is right associative, the others left associative.
                let (lp, rp) = if p == IMP {
                    (l.prec() <= p, r.prec() < p)
                } else {
                    (l.prec() < p, r.prec() <= p)
                };
                l.write_wrapped(out, lp);
                out.push(' ');
                out.push_str(op);
                out.push(' ');
                r.write_wrapped(out, rp);
            }
        }
    }

    fn write_wrapped(&self, out: &mut String, parens: bool) {
        if parens {
            out.push('(');
            self.write(out);
            out.push(')');
        } else {
            self.write(out);
        }
    }
}

impl Render for PropFormula {
    fn shape(&self) -> Shape<'_, Self> {
        match self {
            PropFormula::Atom(a) => Shape::Leaf(a.clone()),
            PropFormula::True => Shape::Leaf("true".into()),
            PropFormula::False => Shape::Leaf("false".into()),
            PropFormula::Not(f) => Shape::Prefix("~".into(), f),
            PropFormula::Box(f) => Shape::Prefix("[]".into(), f),
            PropFormula::Diamond(f) => Shape::Prefix("<>".into(), f),
            PropFormula::And(f, g) => Shape::Binary(AND, "&", f, g),
            PropFormula::Or(f, g) => Shape::Binary(OR, "|", f, g),
            PropFormula::Implies(f, g) => Shape::Binary(IMP, "->", f, g),
            PropFormula::Iff(f, g) => Shape::Binary(IFF, "<->", f, g),
        }
    }
}

impl Render for FoFormula {
    fn shape(&self) -> Shape<'_, Self> {
        match self {
            FoFormula::Member(x, y) => Shape::Leaf(format!("{x} in {y}")),
            FoFormula::Equal(x, y) => Shape::Leaf(format!("{x} = {y}")),
            FoFormula::True => Shape::Leaf("true".into()),
            FoFormula::False => Shape::Leaf("false".into()),
            FoFormula::Not(f) => Shape::Prefix("~".into(), f),
            FoFormula::Box(f) => Shape::Prefix("[]".into(), f),
            FoFormula::Diamond(f) => Shape::Prefix("<>".into(), f),
            FoFormula::Forall(x, f) => Shape::Prefix(format!("A {x} . "), f),
            FoFormula::Exists(x, f) => Shape::Prefix(format!("E {x} . "), f),
            FoFormula::And(f, g) => Shape::Binary(AND, "&", f, g),
            FoFormula::Or(f, g) => Shape::Binary(OR, "|", f, g),
            FoFormula::Implies(f, g) => Shape::Binary(IMP, "->", f, g),
            FoFormula::Iff(f, g) => Shape::Binary(IFF, "<->", f, g),
        }
    }
}

pub(super) fn render_prop(f: &PropFormula) -> String {
    let mut s = String::new();
    f.write(&mut s);
    s
}

pub(super) fn render_fo(f: &FoFormula) -> String {
    let mut s = String::new();
    f.write(&mut s);
    s
}
