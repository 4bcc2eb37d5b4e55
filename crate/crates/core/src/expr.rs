//! Closed-form function expressions in one complex variable.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' ['-'] integer)?
//! atom    := number ['i'] | 'i' | 'z' | 'zeta' | 'pi' | '(' expr ')'
//!          | 'exp' '(' expr ')'
//!          | 'recip' '(' expr ')'
//!          | 'log' '(' expr [',' theta] ')'
//!          | 'pow' '(' expr ',' s [',' theta] ')'
//! ```
//!
//! `pow(w, s, theta)` is `exp(s Log_theta w)` with the argument taken in
//! `[theta, theta + 2pi)`; `theta` defaults to `-pi`, which agrees with the
//! principal branch off the negative real axis. `s` and `theta` must be
//! constant. Subtrees with constant operands are folded at parse time.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::branches::{log_branch, BranchCut};
use crate::error::{Error, Result};
use crate::function::{ComplexFunction, CutRay};

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(Complex64),
    Var,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Powi(Box<Node>, i32),
    Exp(Box<Node>),
    Recip(Box<Node>),
    Log(Box<Node>, f64),
    Pow(Box<Node>, Complex64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PoleSet {
    Known(Vec<Complex64>),
    Unknown,
}

#[derive(Debug, Clone)]
pub struct FunctionExpr {
    root: Node,
    poles: PoleSet,
    cuts: Vec<CutRay>,
    unknown_cuts: bool,
    entire: bool,
}

impl PartialEq for FunctionExpr {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn is_zero(z: Complex64) -> bool {
    z.re == 0.0 && z.im == 0.0
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

fn integer_exponent(s: Complex64) -> Option<i32> {
    (s.im == 0.0 && s.re.fract() == 0.0 && s.re.abs() <= 1e6).then_some(s.re as i32)
}

impl Node {
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let v = match self {
            Node::Const(k) => *k,
            Node::Var => z,
            Node::Neg(a) => -a.eval(z)?,
            Node::Add(a, b) => a.eval(z)? + b.eval(z)?,
            Node::Sub(a, b) => a.eval(z)? - b.eval(z)?,
            Node::Mul(a, b) => a.eval(z)? * b.eval(z)?,
            Node::Div(a, b) => {
                let d = b.eval(z)?;
                if is_zero(d) {
                    return Err(Error::eval(z, "division by zero"));
                }
                a.eval(z)? / d
            }
            Node::Powi(a, k) => {
                let base = a.eval(z)?;
                if *k < 0 && is_zero(base) {
                    return Err(Error::eval(z, "negative power of zero"));
                }
                base.powi(*k)
            }
            Node::Exp(a) => a.eval(z)?.exp(),
            Node::Recip(a) => {
                let d = a.eval(z)?;
                if is_zero(d) {
                    return Err(Error::eval(z, "reciprocal of zero"));
                }
                d.inv()
            }
            Node::Log(a, theta) => {
                let w = a.eval(z)?;
                log_branch(w, BranchCut::new(*theta)?).map_err(|_| Error::eval(z, "log of zero"))?
            }
            Node::Pow(a, s, theta) => {
                let w = a.eval(z)?;
                match integer_exponent(*s) {
                    Some(k) if k >= 0 => w.powi(k),
                    _ => {
                        let l = log_branch(w, BranchCut::new(*theta)?)
                            .map_err(|_| Error::eval(z, "power of zero"))?;
                        (s * l).exp()
                    }
                }
            }
        };
        if !finite(v) {
            return Err(Error::eval(z, "non-finite value"));
        }
        Ok(v)
    }

    /// Complex logarithm of the value (any branch), computed without forming
    /// the value itself where possible. Zeros give a real part of `-inf`.
    pub fn eval_log(&self, z: Complex64) -> Result<Complex64> {
        let neg_inf = c(f64::NEG_INFINITY, 0.0);
        let log_of = |v: Complex64| if is_zero(v) { neg_inf } else { v.ln() };
        Ok(match self {
            Node::Const(k) => log_of(*k),
            Node::Var => log_of(z),
            Node::Neg(a) => a.eval_log(z)? + c(0.0, PI),
            Node::Add(a, b) => log_sum(a.eval_log(z)?, b.eval_log(z)?),
            Node::Sub(a, b) => log_sum(a.eval_log(z)?, b.eval_log(z)? + c(0.0, PI)),
            Node::Mul(a, b) => a.eval_log(z)? + b.eval_log(z)?,
            Node::Div(a, b) => {
                let d = b.eval_log(z)?;
                if d.re == f64::NEG_INFINITY {
                    return Err(Error::eval(z, "division by zero"));
                }
                a.eval_log(z)? - d
            }
            Node::Recip(a) => {
                let d = a.eval_log(z)?;
                if d.re == f64::NEG_INFINITY {
                    return Err(Error::eval(z, "reciprocal of zero"));
                }
                -d
            }
            Node::Powi(a, k) => {
                let l = a.eval_log(z)?;
                if *k < 0 && l.re == f64::NEG_INFINITY {
                    return Err(Error::eval(z, "negative power of zero"));
                }
                if *k == 0 {
                    c(0.0, 0.0)
                } else {
                    l * *k as f64
                }
            }
            Node::Exp(a) => a.eval(z)?,
            Node::Log(..) => log_of(self.eval(z)?),
            Node::Pow(a, s, theta) => match integer_exponent(*s) {
                Some(0) => c(0.0, 0.0),
                Some(k) if k > 0 => a.eval_log(z)? * k as f64,
                _ => {
                    let w = a.eval(z)?;
                    let l = log_branch(w, BranchCut::new(*theta)?)
                        .map_err(|_| Error::eval(z, "power of zero"))?;
                    s * l
                }
            },
        })
    }

    fn is_const(&self) -> Option<Complex64> {
        match self {
            Node::Const(k) => Some(*k),
            _ => None,
        }
    }

    fn children(&self) -> Vec<&Node> {
        match self {
            Node::Const(_) | Node::Var => vec![],
            Node::Neg(a) | Node::Powi(a, _) | Node::Exp(a) | Node::Recip(a) | Node::Log(a, _) | Node::Pow(a, _, _) => {
                vec![a]
            }
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => vec![a, b],
        }
    }

    /// Replace the node by a constant when all operands are constant.
    fn fold(self) -> Node {
        if matches!(self, Node::Const(_) | Node::Var) {
            return self;
        }
        if self.children().iter().all(|ch| ch.is_const().is_some()) {
            if let Ok(v) = self.eval(c(0.0, 0.0)) {
                return Node::Const(v);
            }
        }
        self
    }

    /// Coefficients (lowest degree first) when the node is a polynomial in z.
    fn as_polynomial(&self) -> Option<Vec<Complex64>> {
        match self {
            Node::Const(k) => Some(vec![*k]),
            Node::Var => Some(vec![c(0.0, 0.0), c(1.0, 0.0)]),
            Node::Neg(a) => Some(a.as_polynomial()?.into_iter().map(|x| -x).collect()),
            Node::Add(a, b) | Node::Sub(a, b) => {
                let p = a.as_polynomial()?;
                let q = b.as_polynomial()?;
                let sign = if matches!(self, Node::Sub(..)) { -1.0 } else { 1.0 };
                let n = p.len().max(q.len());
                Some(
                    (0..n)
                        .map(|k| {
                            p.get(k).copied().unwrap_or_default()
                                + q.get(k).copied().unwrap_or_default() * sign
                        })
                        .collect(),
                )
            }
            Node::Mul(a, b) => {
                let p = a.as_polynomial()?;
                let q = b.as_polynomial()?;
                Some(poly_mul(&p, &q))
            }
            Node::Powi(a, k) if *k >= 0 && *k <= 32 => {
                let p = a.as_polynomial()?;
                let mut out = vec![c(1.0, 0.0)];
                for _ in 0..*k {
                    out = poly_mul(&out, &p);
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Zeros of the node; `None` when they cannot be determined.
    fn zeros(&self) -> Option<Vec<Complex64>> {
        if let Some(p) = self.as_polynomial() {
            return polynomial_roots(&p);
        }
        match self {
            Node::Exp(_) | Node::Recip(_) => Some(vec![]),
            Node::Pow(_, s, _) if integer_exponent(*s).is_none_or(|k| k < 0) => Some(vec![]),
            Node::Pow(a, _, _) => a.zeros(),
            Node::Powi(a, k) if *k < 0 => {
                let _ = a;
                Some(vec![])
            }
            Node::Powi(a, _) | Node::Neg(a) => a.zeros(),
            Node::Mul(a, b) => {
                let mut z = a.zeros()?;
                z.extend(b.zeros()?);
                Some(z)
            }
            Node::Div(a, _) => a.zeros(),
            _ => None,
        }
    }

    fn collect_poles(&self, out: &mut PoleSet) {
        for ch in self.children() {
            ch.collect_poles(out);
        }
        let denominator = match self {
            Node::Div(_, b) => Some(&**b),
            Node::Recip(a) => Some(&**a),
            Node::Powi(a, k) if *k < 0 => Some(&**a),
            _ => None,
        };
        if let (Some(d), PoleSet::Known(list)) = (denominator, &mut *out) {
            match d.zeros() {
                Some(zs) => {
                    for p in zs {
                        if !list.iter().any(|q| (*q - p).norm() < 1e-12) {
                            list.push(p);
                        }
                    }
                }
                None => *out = PoleSet::Unknown,
            }
        }
    }

    fn collect_cuts(&self, cuts: &mut Vec<CutRay>, unknown: &mut bool) {
        for ch in self.children() {
            ch.collect_cuts(cuts, unknown);
        }
        let (arg, theta) = match self {
            Node::Log(a, theta) => (a, *theta),
            Node::Pow(a, s, theta) if integer_exponent(*s).is_none_or(|k| k < 0) => (a, *theta),
            _ => return,
        };
        match arg.as_polynomial() {
            Some(p) if p.len() == 2 && !is_zero(p[1]) => cuts.push(CutRay {
                origin: -p[0] / p[1],
                angle: theta - p[1].arg(),
            }),
            Some(p) if p.len() == 1 => {}
            _ => *unknown = true,
        }
    }

    fn contains_log(&self) -> bool {
        matches!(self, Node::Log(..)) || self.children().iter().any(|ch| ch.contains_log())
    }
}

fn log_sum(a: Complex64, b: Complex64) -> Complex64 {
    let (big, small) = if a.re >= b.re { (a, b) } else { (b, a) };
    if small.re == f64::NEG_INFINITY {
        return big;
    }
    let s = c(1.0, 0.0) + (small - big).exp();
    if is_zero(s) {
        return c(f64::NEG_INFINITY, 0.0);
    }
    big + s.ln()
}

fn poly_mul(p: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![c(0.0, 0.0); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Roots of a polynomial given lowest-degree-first; `None` for the zero
/// polynomial.
fn polynomial_roots(coeffs: &[Complex64]) -> Option<Vec<Complex64>> {
    let mut p: Vec<Complex64> = coeffs.to_vec();
    while p.last().is_some_and(|x| is_zero(*x)) {
        p.pop();
    }
    match p.len() {
        0 => None,
        1 => Some(vec![]),
        2 => Some(vec![-p[0] / p[1]]),
        n => {
            let degree = n - 1;
            let lead = p[degree];
            let monic: Vec<Complex64> = p.iter().map(|x| x / lead).collect();
            let eval = |x: Complex64| monic.iter().rev().fold(c(0.0, 0.0), |acc, k| acc * x + k);
            // Durand-Kerner iteration.
            let radius = 1.0 + monic[..degree].iter().map(|x| x.norm()).fold(0.0, f64::max);
            let mut roots: Vec<Complex64> = (0..degree)
                .map(|k| Complex64::from_polar(radius, 0.4 + std::f64::consts::TAU * k as f64 / degree as f64))
                .collect();
            for _ in 0..500 {
                let mut shift = 0.0f64;
                for i in 0..degree {
                    let mut denom = c(1.0, 0.0);
                    for j in 0..degree {
                        if i != j {
                            denom *= roots[i] - roots[j];
                        }
                    }
                    let step = eval(roots[i]) / denom;
                    roots[i] -= step;
                    shift = shift.max(step.norm());
                }
                if shift < 1e-15 * radius {
                    break;
                }
            }
            Some(roots)
        }
    }
}

impl FunctionExpr {
    pub fn from_node(root: Node) -> Self {
        let mut poles = PoleSet::Known(vec![]);
        root.collect_poles(&mut poles);
        let mut cuts = Vec::new();
        let mut unknown_cuts = false;
        root.collect_cuts(&mut cuts, &mut unknown_cuts);
        let entire = matches!(&poles, PoleSet::Known(p) if p.is_empty())
            && cuts.is_empty()
            && !unknown_cuts
            && !root.contains_log();
        FunctionExpr {
            root,
            poles,
            cuts,
            unknown_cuts,
            entire,
        }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn pole_set(&self) -> &PoleSet {
        &self.poles
    }

    pub fn cuts(&self) -> &[CutRay] {
        &self.cuts
    }

    /// True when some branch cut could not be located.
    pub fn has_unknown_cuts(&self) -> bool {
        self.unknown_cuts
    }

    pub fn entire(&self) -> bool {
        self.entire
    }

    pub fn render(&self) -> String {
        render(&self.root)
    }
}

impl ComplexFunction for FunctionExpr {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.root.eval(z)
    }

    fn log_abs(&self, z: Complex64) -> Result<f64> {
        Ok(self.root.eval_log(z)?.re)
    }

    fn is_entire(&self) -> bool {
        self.entire
    }

    fn poles(&self) -> Vec<Complex64> {
        match &self.poles {
            PoleSet::Known(p) => p.clone(),
            PoleSet::Unknown => vec![],
        }
    }

    fn cut_rays(&self) -> Vec<CutRay> {
        self.cuts.clone()
    }

    fn describe(&self) -> String {
        self.render()
    }
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl std::str::FromStr for FunctionExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_expr(s)
    }
}

impl Serialize for FunctionExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for FunctionExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_expr(&text).map_err(serde::de::Error::custom)
    }
}

fn render_complex(k: Complex64) -> String {
    if k.im == 0.0 {
        if k.re.is_sign_negative() {
            format!("({})", k.re)
        } else {
            format!("{}", k.re)
        }
    } else if k.im.is_sign_negative() {
        format!("({}-{}i)", k.re, -k.im)
    } else {
        format!("({}+{}i)", k.re, k.im)
    }
}

fn render(node: &Node) -> String {
    match node {
        Node::Const(k) => render_complex(*k),
        Node::Var => "z".into(),
        Node::Neg(a) => format!("(-{})", render(a)),
        Node::Add(a, b) => format!("({}+{})", render(a), render(b)),
        Node::Sub(a, b) => format!("({}-{})", render(a), render(b)),
        Node::Mul(a, b) => format!("({}*{})", render(a), render(b)),
        Node::Div(a, b) => format!("({}/{})", render(a), render(b)),
        Node::Powi(a, k) => format!("({}^{})", render(a), k),
        Node::Exp(a) => format!("exp({})", render(a)),
        Node::Recip(a) => format!("recip({})", render(a)),
        Node::Log(a, theta) => format!("log({},{})", render(a), render_complex(c(*theta, 0.0))),
        Node::Pow(a, s, theta) => format!(
            "pow({},{},{})",
            render(a),
            render_complex(*s),
            render_complex(c(*theta, 0.0))
        ),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let (pos, ch) = chars[k];
        if ch.is_whitespace() {
            k += 1;
        } else if ch.is_ascii_digit() || (ch == '.' && chars.get(k + 1).is_some_and(|(_, d)| d.is_ascii_digit())) {
            let start = k;
            while k < chars.len() && (chars[k].1.is_ascii_digit() || chars[k].1 == '.') {
                k += 1;
            }
            if k < chars.len() && (chars[k].1 == 'e' || chars[k].1 == 'E') {
                let mut j = k + 1;
                if j < chars.len() && (chars[j].1 == '+' || chars[j].1 == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].1.is_ascii_digit() {
                    k = j;
                    while k < chars.len() && chars[k].1.is_ascii_digit() {
                        k += 1;
                    }
                }
            }
            let end = chars.get(k).map_or(text.len(), |(p, _)| *p);
            let literal = &text[pos..end];
            let value: f64 = literal.parse().map_err(|_| Error::Parse {
                pos: chars[start].0,
                msg: format!("malformed number '{literal}'"),
            })?;
            let imaginary = chars.get(k).is_some_and(|(_, ch)| *ch == 'i')
                && !chars.get(k + 1).is_some_and(|(_, ch)| ch.is_alphanumeric() || *ch == '_');
            if imaginary {
                k += 1;
                out.push((pos, Tok::Imag(value)));
            } else {
                out.push((pos, Tok::Num(value)));
            }
        } else if ch.is_alphabetic() || ch == '_' {
            let start = k;
            while k < chars.len() && (chars[k].1.is_alphanumeric() || chars[k].1 == '_') {
                k += 1;
            }
            let ident: String = chars[start..k].iter().map(|(_, ch)| *ch).collect();
            out.push((pos, Tok::Ident(ident)));
        } else if "+-*/^(),".contains(ch) {
            out.push((pos, Tok::Op(ch)));
            k += 1;
        } else {
            return Err(Error::Parse {
                pos,
                msg: format!("unexpected character '{ch}'"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    at: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.at).map_or(self.len, |(p, _)| *p)
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            self.error(format!("expected '{op}'"))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?)).fold();
            } else if self.eat('-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?)).fold();
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?)).fold();
            } else if self.peek() == Some(&Tok::Op('/')) {
                let pos = self.pos();
                self.at += 1;
                let rhs = self.unary()?;
                if rhs.is_const().is_some_and(is_zero) {
                    return Err(Error::Parse {
                        pos,
                        msg: "division by constant zero".into(),
                    });
                }
                lhs = Node::Div(Box::new(lhs), Box::new(rhs)).fold();
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat('-') {
            return Ok(Node::Neg(Box::new(self.unary()?)).fold());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let negative = self.eat('-');
        match self.peek() {
            Some(Tok::Num(v)) if v.fract() == 0.0 && v.abs() <= 1e6 => {
                let k = *v as i32;
                self.at += 1;
                Ok(Node::Powi(Box::new(base), if negative { -k } else { k }).fold())
            }
            _ => self.error("exponent after '^' must be an integer literal; use pow(w, s, theta)"),
        }
    }

    fn constant(&mut self, what: &str) -> Result<Complex64> {
        let pos = self.pos();
        match self.expr()?.is_const() {
            Some(k) => Ok(k),
            None => Err(Error::Parse {
                pos,
                msg: format!("{what} must be a constant"),
            }),
        }
    }

    fn branch_angle(&mut self) -> Result<f64> {
        if !self.eat(',') {
            return Ok(-PI);
        }
        let pos = self.pos();
        let theta = self.constant("branch angle")?;
        if theta.im != 0.0 || !(-PI..PI).contains(&theta.re) {
            return Err(Error::Parse {
                pos,
                msg: format!("branch angle {theta} must be real and in [-pi, pi)"),
            });
        }
        Ok(theta.re)
    }

    fn atom(&mut self) -> Result<Node> {
        let Some((pos, tok)) = self.tokens.get(self.at).cloned() else {
            return self.error("unexpected end of input");
        };
        self.at += 1;
        match tok {
            Tok::Num(v) => Ok(Node::Const(c(v, 0.0))),
            Tok::Imag(v) => Ok(Node::Const(c(0.0, v))),
            Tok::Op('(') => {
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "z" | "zeta" | "ζ" => Ok(Node::Var),
                "i" => Ok(Node::Const(c(0.0, 1.0))),
                "pi" | "π" => Ok(Node::Const(c(PI, 0.0))),
                "exp" | "recip" | "log" | "pow" => {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    let node = match name.as_str() {
                        "exp" => Node::Exp(Box::new(arg)),
                        "recip" => Node::Recip(Box::new(arg)),
                        "log" => {
                            let theta = self.branch_angle()?;
                            Node::Log(Box::new(arg), theta)
                        }
                        _ => {
                            self.expect(',')?;
                            let s = self.constant("exponent")?;
                            let theta = self.branch_angle()?;
                            Node::Pow(Box::new(arg), s, theta)
                        }
                    };
                    self.expect(')')?;
                    Ok(node.fold())
                }
                _ => Err(Error::Parse {
                    pos,
                    msg: format!("unknown identifier '{name}'"),
                }),
            },
            Tok::Op(op) => Err(Error::Parse {
                pos,
                msg: format!("unexpected '{op}'"),
            }),
        }
    }
}

/// Parse an expression in the variable `z`.
pub fn parse_expr(text: &str) -> Result<FunctionExpr> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        at: 0,
        len: text.len(),
    };
    let root = parser.expr()?;
    if parser.at != parser.tokens.len() {
        return parser.error("trailing input");
    }
    Ok(FunctionExpr::from_node(root))
}
