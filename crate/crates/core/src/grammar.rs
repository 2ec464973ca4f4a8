//! Text form of distribution and joint specs.
//!
//! ```text
//! spec   = term ;
//! term   = name [ ":" name ] [ "(" [ arg { "," arg } ] ")" ] ;
//! arg    = [ name "=" ] value ;
//! value  = number | list | term ;
//! list   = "[" [ value { "," value } ] "]" ;
//! number = decimal [ "/" decimal ] ;
//! decimal= [ "+" | "-" ] digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
//! name   = letter { letter | digit | "-" | "_" } ;
//! ```
//!
//! Whitespace between tokens is ignored. Recognised terms:
//!
//! | term | law |
//! |------|-----|
//! | `cauchy`, `standard-cauchy` | standard Cauchy |
//! | `cauchy(mu, sigma)` | Cauchy with location and scale |
//! | `corr-normal-ratio(rho)` | X/Y for a unit-variance bivariate normal |
//! | `f-ratio(n)` | F(n, n) |
//! | `laha` | density `sqrt(2)/(pi (1+x^4))` |
//! | `log-uniform`, `log-rademacher` | `exp(U)`, `U ~ U(-1,1)` or `U = ±1` |
//! | `exponential[(rate)]`, `normal[(mu, sigma)]`, `constant(c)` | |
//! | `product(x, y)` | independent pair |
//! | `bivariate-normal(rho)` | unit-variance bivariate normal |
//! | `discrete-table:paper`, `discrete-table(x=[..], y=[..], p=[[..], ..])` | exact pmf table |
//! | `region-uniform:paper`, `region-uniform([x0,x1,y0,y1,density], ..)` | constant density on rectangles |
//! | `constructed(z=<dist>[, w=<dist>])` | `(W Z^I, W Z^(1-I))`, `w` defaults to `constant(1)` |
//!
//! Malformed text is a [`Error::Syntax`]; well-formed text with an
//! out-of-range parameter is a [`Error::Domain`].

use std::fmt;

use num_rational::Rational64;
use num_traits::CheckedDiv;

use crate::construction::build_pair;
use crate::dist::DistSpec;
use crate::error::{Error, Result};
use crate::joint::{DiscreteTable, JointSpec, Rect, RegionUniform};

const MAX_DEPTH: usize = 32;

pub const DIST_NAMES: &[&str] = &[
    "cauchy",
    "standard-cauchy",
    "corr-normal-ratio",
    "f-ratio",
    "laha",
    "log-uniform",
    "log-rademacher",
    "exponential",
    "constant",
    "normal",
];

pub const JOINT_NAMES: &[&str] = &[
    "product",
    "bivariate-normal",
    "discrete-table",
    "region-uniform",
    "constructed",
];

/// A parsed spec: either a scalar law or a joint law.
#[derive(Debug, Clone, PartialEq)]
pub enum Spec {
    Dist(DistSpec),
    Joint(JointSpec),
}

impl fmt::Display for Spec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spec::Dist(d) => d.fmt(f),
            Spec::Joint(j) => j.fmt(f),
        }
    }
}

pub fn parse_spec(text: &str) -> Result<Spec> {
    let mut p = Parser::new(text)?;
    if p.tokens.len() == 1 {
        return Err(p.syntax_error(0, "empty spec", "a distribution name"));
    }
    let term = p.term(0)?;
    p.expect_end()?;
    to_spec(&term)
}

pub fn parse_dist(text: &str) -> Result<DistSpec> {
    match parse_spec(text)? {
        Spec::Dist(d) => Ok(d),
        Spec::Joint(j) => Err(Error::Syntax {
            position: 0,
            message: format!("'{j}' is a joint law"),
            expected: format!("one of {}", DIST_NAMES.join(", ")),
        }),
    }
}

pub fn parse_joint(text: &str) -> Result<JointSpec> {
    match parse_spec(text)? {
        Spec::Joint(j) => Ok(j),
        Spec::Dist(d) => Err(Error::Syntax {
            position: 0,
            message: format!("'{d}' is a scalar law"),
            expected: format!("one of {}", JOINT_NAMES.join(", ")),
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Num(f64, Option<Rational64>, String),
    Punct(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

#[derive(Debug, Clone)]
struct Number {
    value: f64,
    exact: Option<Rational64>,
    text: String,
    pos: usize,
}

#[derive(Debug, Clone)]
enum Value {
    Num(Number),
    List(Vec<Value>, usize),
    Term(Term),
}

impl Value {
    fn pos(&self) -> usize {
        match self {
            Value::Num(n) => n.pos,
            Value::List(_, p) => *p,
            Value::Term(t) => t.pos,
        }
    }
}

#[derive(Debug, Clone)]
struct Arg {
    key: Option<String>,
    value: Value,
    pos: usize,
}

#[derive(Debug, Clone)]
struct Term {
    name: String,
    variant: Option<String>,
    args: Option<Vec<Arg>>,
    pos: usize,
}

/// Exact value of a decimal literal, when it fits in 64-bit rationals.
fn exact_decimal(text: &str) -> Option<Rational64> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (neg, mantissa) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let mut digits: i64 = 0;
    for c in int.chars().chain(frac.chars()) {
        digits = digits.checked_mul(10)?.checked_add(c.to_digit(10)? as i64)?;
    }
    let scale = exponent.checked_sub(frac.len() as i32)?;
    let pow = |e: u32| 10i64.checked_pow(e);
    let r = if scale >= 0 {
        Rational64::from_integer(digits.checked_mul(pow(scale as u32)?)?)
    } else {
        Rational64::new(digits, pow(scale.unsigned_abs())?)
    };
    Some(if neg { -r } else { r })
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '-' || chars[i] == '_')
            {
                i += 1;
            }
            tokens.push(Token {
                tok: Tok::Name(chars[start..i].iter().collect()),
                pos: start,
            });
        } else if c.is_ascii_digit() || c == '.' || c == '+' || c == '-' {
            let start = i;
            if c == '+' || c == '-' {
                i += 1;
            }
            let digits_start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let mut saw_digit = i > digits_start;
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                let frac_start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                saw_digit |= i > frac_start;
            }
            if !saw_digit {
                return Err(Error::Syntax {
                    position: start,
                    message: format!("malformed number starting with '{c}'"),
                    expected: "digits".into(),
                });
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                let exp_start = j;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j == exp_start {
                    return Err(Error::Syntax {
                        position: j,
                        message: "malformed exponent".into(),
                        expected: "exponent digits".into(),
                    });
                }
                i = j;
            }
            let literal: String = chars[start..i].iter().collect();
            let value = literal.parse::<f64>().map_err(|_| Error::Syntax {
                position: start,
                message: format!("malformed number '{literal}'"),
                expected: "a decimal number".into(),
            })?;
            let exact = exact_decimal(&literal);
            tokens.push(Token {
                tok: Tok::Num(value, exact, literal),
                pos: start,
            });
        } else if "()[],=:/".contains(c) {
            tokens.push(Token {
                tok: Tok::Punct(c),
                pos: i,
            });
            i += 1;
        } else {
            return Err(Error::Syntax {
                position: i,
                message: format!("unexpected character '{c}'"),
                expected: "a name, a number, or one of ( ) [ ] , = : /".into(),
            });
        }
    }
    tokens.push(Token {
        tok: Tok::End,
        pos: chars.len(),
    });
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            tokens: lex(text)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn syntax_error(&self, position: usize, message: &str, expected: &str) -> Error {
        Error::Syntax {
            position,
            message: message.into(),
            expected: expected.into(),
        }
    }

    fn unexpected(&self, expected: &str) -> Error {
        let t = self.peek();
        let found = match &t.tok {
            Tok::Name(n) => format!("found '{n}'"),
            Tok::Num(_, _, s) => format!("found number '{s}'"),
            Tok::Punct(c) => format!("found '{c}'"),
            Tok::End => "found end of input".into(),
        };
        self.syntax_error(t.pos, &found, expected)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Punct(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char, expected: &str) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expect_end(&mut self) -> Result<()> {
        if self.peek().tok == Tok::End {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn name(&mut self, expected: &str) -> Result<(String, usize)> {
        match self.peek().tok.clone() {
            Tok::Name(n) => {
                let pos = self.bump().pos;
                Ok((n, pos))
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    fn term(&mut self, depth: usize) -> Result<Term> {
        if depth > MAX_DEPTH {
            return Err(self.syntax_error(self.peek().pos, "nesting too deep", "a shallower spec"));
        }
        let (name, pos) = self.name("a distribution name")?;
        let variant = if self.eat(':') {
            Some(self.name("a built-in name such as 'paper'")?.0)
        } else {
            None
        };
        let args = if self.eat('(') {
            let mut args = Vec::new();
            if !self.eat(')') {
                loop {
                    args.push(self.arg(depth + 1)?);
                    if self.eat(')') {
                        break;
                    }
                    self.expect(',', "',' or ')'")?;
                }
            }
            Some(args)
        } else {
            None
        };
        Ok(Term {
            name,
            variant,
            args,
            pos,
        })
    }

    fn arg(&mut self, depth: usize) -> Result<Arg> {
        let pos = self.peek().pos;
        if let Tok::Name(n) = &self.peek().tok {
            if self.tokens.get(self.at + 1).map(|t| &t.tok) == Some(&Tok::Punct('=')) {
                let key = n.clone();
                self.bump();
                self.bump();
                let value = self.value(depth)?;
                return Ok(Arg {
                    key: Some(key),
                    value,
                    pos,
                });
            }
        }
        Ok(Arg {
            key: None,
            value: self.value(depth)?,
            pos,
        })
    }

    fn value(&mut self, depth: usize) -> Result<Value> {
        if depth > MAX_DEPTH {
            return Err(self.syntax_error(self.peek().pos, "nesting too deep", "a shallower spec"));
        }
        let t = self.peek().clone();
        match t.tok {
            Tok::Num(value, exact, text) => {
                self.bump();
                if self.eat('/') {
                    let d = self.peek().clone();
                    let Tok::Num(dv, dexact, dtext) = d.tok else {
                        return Err(self.unexpected("a denominator"));
                    };
                    self.bump();
                    let exact = match (exact, dexact) {
                        (Some(n), Some(d)) if *d.numer() != 0 => n.checked_div(&d),
                        _ => None,
                    };
                    return Ok(Value::Num(Number {
                        value: value / dv,
                        exact,
                        text: format!("{text}/{dtext}"),
                        pos: t.pos,
                    }));
                }
                Ok(Value::Num(Number {
                    value,
                    exact,
                    text,
                    pos: t.pos,
                }))
            }
            Tok::Punct('[') => {
                self.bump();
                let mut items = Vec::new();
                if !self.eat(']') {
                    loop {
                        items.push(self.value(depth + 1)?);
                        if self.eat(']') {
                            break;
                        }
                        self.expect(',', "',' or ']'")?;
                    }
                }
                Ok(Value::List(items, t.pos))
            }
            Tok::Name(_) => Ok(Value::Term(self.term(depth + 1)?)),
            _ => Err(self.unexpected("a number, a list, or a distribution")),
        }
    }
}

fn syntax(pos: usize, message: impl Into<String>, expected: impl Into<String>) -> Error {
    Error::Syntax {
        position: pos,
        message: message.into(),
        expected: expected.into(),
    }
}

/// Binds positional and keyword arguments to parameter names.
fn bind<'a>(term: &'a Term, params: &[&str], required: usize) -> Result<Vec<Option<&'a Value>>> {
    let args: &[Arg] = term.args.as_deref().unwrap_or(&[]);
    let mut out: Vec<Option<&Value>> = vec![None; params.len()];
    let mut next = 0;
    for a in args {
        let slot = match &a.key {
            Some(k) => params.iter().position(|p| p == k).ok_or_else(|| {
                syntax(
                    a.pos,
                    format!("'{}' has no parameter '{k}'", term.name),
                    format!("one of {}", params.join(", ")),
                )
            })?,
            None => {
                while next < params.len() && out[next].is_some() {
                    next += 1;
                }
                if next >= params.len() {
                    return Err(syntax(
                        a.pos,
                        format!("too many arguments to '{}'", term.name),
                        format!("at most {} argument(s)", params.len()),
                    ));
                }
                next
            }
        };
        if out[slot].is_some() {
            return Err(syntax(
                a.pos,
                format!("parameter '{}' given twice", params[slot]),
                "each parameter once",
            ));
        }
        out[slot] = Some(&a.value);
    }
    if let Some(missing) = out[..required].iter().position(Option::is_none) {
        let pos = term.pos + term.name.chars().count();
        return Err(syntax(
            pos,
            format!("'{}' is missing parameter '{}'", term.name, params[missing]),
            format!("'(' {} ')'", params[..required].join(", ")),
        ));
    }
    Ok(out)
}

fn number(v: &Value, what: &str) -> Result<f64> {
    match v {
        Value::Num(n) => Ok(n.value),
        _ => Err(syntax(v.pos(), format!("{what} must be a number"), "a number")),
    }
}

fn exact(v: &Value, what: &str) -> Result<Rational64> {
    match v {
        Value::Num(n) => n.exact.ok_or_else(|| {
            Error::domain(what, &n.text, "exact rationals with 64-bit numerator and denominator")
        }),
        _ => Err(syntax(v.pos(), format!("{what} must be a number"), "a number")),
    }
}

fn list<'a>(v: &'a Value, what: &str) -> Result<&'a [Value]> {
    match v {
        Value::List(items, _) => Ok(items),
        _ => Err(syntax(v.pos(), format!("{what} must be a list"), "'['")),
    }
}

fn positive_integer(v: &Value, what: &str) -> Result<u32> {
    let x = number(v, what)?;
    if x.fract() != 0.0 || x < 1.0 || x > u32::MAX as f64 {
        return Err(Error::domain(what, x, "positive integers"));
    }
    Ok(x as u32)
}

fn no_args(term: &Term) -> Result<()> {
    match &term.args {
        Some(a) if !a.is_empty() => Err(syntax(
            a[0].pos,
            format!("'{}' takes no arguments", term.name),
            "')'",
        )),
        _ => Ok(()),
    }
}

fn to_spec(term: &Term) -> Result<Spec> {
    if DIST_NAMES.contains(&term.name.as_str()) {
        return to_dist_term(term).map(Spec::Dist);
    }
    if JOINT_NAMES.contains(&term.name.as_str()) {
        return to_joint_term(term).map(Spec::Joint);
    }
    Err(syntax(
        term.pos,
        format!("unknown distribution '{}'", term.name),
        format!("one of {}, {}", DIST_NAMES.join(", "), JOINT_NAMES.join(", ")),
    ))
}

fn to_dist(v: &Value) -> Result<DistSpec> {
    match v {
        Value::Term(t) if DIST_NAMES.contains(&t.name.as_str()) => to_dist_term(t),
        _ => Err(syntax(
            v.pos(),
            "expected a scalar distribution",
            format!("one of {}", DIST_NAMES.join(", ")),
        )),
    }
}

fn to_dist_term(t: &Term) -> Result<DistSpec> {
    if t.variant.is_some() {
        return Err(syntax(t.pos, format!("'{}' has no built-in variants", t.name), "'(' or end"));
    }
    match t.name.as_str() {
        "cauchy" | "standard-cauchy" if t.args.as_ref().map_or(true, Vec::is_empty) => {
            Ok(DistSpec::standard_cauchy())
        }
        "cauchy" => {
            let a = bind(t, &["mu", "sigma"], 2)?;
            DistSpec::cauchy(number(a[0].unwrap(), "mu")?, number(a[1].unwrap(), "sigma")?)
        }
        "standard-cauchy" => no_args(t).map(|_| DistSpec::standard_cauchy()),
        "corr-normal-ratio" => {
            let a = bind(t, &["rho"], 1)?;
            DistSpec::corr_normal_ratio(number(a[0].unwrap(), "rho")?)
        }
        "f-ratio" => {
            let a = bind(t, &["n"], 1)?;
            DistSpec::f_ratio(positive_integer(a[0].unwrap(), "n")?)
        }
        "laha" => no_args(t).map(|_| DistSpec::laha()),
        "log-uniform" => no_args(t).map(|_| DistSpec::log_uniform()),
        "log-rademacher" => no_args(t).map(|_| DistSpec::log_rademacher()),
        "exponential" => {
            let a = bind(t, &["rate"], 0)?;
            DistSpec::exponential(a[0].map(|v| number(v, "rate")).transpose()?.unwrap_or(1.0))
        }
        "constant" => {
            let a = bind(t, &["c"], 1)?;
            DistSpec::constant(number(a[0].unwrap(), "c")?)
        }
        "normal" => {
            let a = bind(t, &["mu", "sigma"], 0)?;
            let mu = a[0].map(|v| number(v, "mu")).transpose()?.unwrap_or(0.0);
            let sigma = a[1].map(|v| number(v, "sigma")).transpose()?.unwrap_or(1.0);
            DistSpec::normal(mu, sigma)
        }
        other => unreachable!("{other} is listed in DIST_NAMES"),
    }
}

fn to_joint_term(t: &Term) -> Result<JointSpec> {
    let builtin = |t: &Term| -> Result<bool> {
        match t.variant.as_deref() {
            None => Ok(false),
            Some("paper") => no_args(t).map(|_| true),
            Some(v) => Err(syntax(t.pos, format!("unknown built-in '{}:{v}'", t.name), "'paper'")),
        }
    };
    match t.name.as_str() {
        "discrete-table" if builtin(t)? => Ok(JointSpec::discrete_paper()),
        "region-uniform" if builtin(t)? => Ok(JointSpec::region_paper()),
        _ if t.variant.is_some() => Err(syntax(
            t.pos,
            format!("'{}' has no built-in variants", t.name),
            "'(' or end",
        )),
        "product" => {
            let a = bind(t, &["x", "y"], 2)?;
            JointSpec::product(to_dist(a[0].unwrap())?, to_dist(a[1].unwrap())?)
        }
        "bivariate-normal" => {
            let a = bind(t, &["rho"], 1)?;
            JointSpec::bivariate_normal(number(a[0].unwrap(), "rho")?)
        }
        "constructed" => {
            let a = bind(t, &["z", "w"], 1)?;
            let z = to_dist(a[0].unwrap())?;
            let w = match a[1] {
                Some(v) => to_dist(v)?,
                None => DistSpec::constant(1.0)?,
            };
            Ok(JointSpec::Constructed(build_pair(z, w)?))
        }
        "discrete-table" => {
            let a = bind(t, &["x", "y", "p"], 3)?;
            let support = |v: &Value, what: &str| -> Result<Vec<Rational64>> {
                list(v, what)?.iter().map(|e| exact(e, what)).collect()
            };
            let xs = support(a[0].unwrap(), "x")?;
            let ys = support(a[1].unwrap(), "y")?;
            let probs = list(a[2].unwrap(), "p")?
                .iter()
                .map(|row| support(row, "p"))
                .collect::<Result<Vec<_>>>()?;
            DiscreteTable::new(xs, ys, probs).map(JointSpec::DiscreteTable)
        }
        "region-uniform" => {
            let args = t.args.as_deref().unwrap_or(&[]);
            if args.is_empty() {
                return Err(syntax(
                    t.pos + t.name.chars().count(),
                    "'region-uniform' needs rectangles or ':paper'",
                    "'(' [x0, x1, y0, y1, density] ... ')' or ':paper'",
                ));
            }
            let rects = args
                .iter()
                .map(|arg| {
                    if arg.key.is_some() {
                        return Err(syntax(arg.pos, "rectangles are positional", "'['"));
                    }
                    let items = list(&arg.value, "rectangle")?;
                    if items.len() != 5 {
                        return Err(syntax(
                            arg.value.pos(),
                            format!("rectangle has {} entries", items.len()),
                            "[x0, x1, y0, y1, density]",
                        ));
                    }
                    let e: Vec<Rational64> = items
                        .iter()
                        .map(|v| exact(v, "rectangle entry"))
                        .collect::<Result<_>>()?;
                    Ok(Rect {
                        x0: e[0],
                        x1: e[1],
                        y0: e[2],
                        y1: e[3],
                        density: e[4],
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            RegionUniform::new(rects).map(JointSpec::RegionUniform)
        }
        other => unreachable!("{other} is listed in JOINT_NAMES"),
    }
}

/// Renders a syntax error as the input line with a caret under the failing position.
pub fn caret_diagnostic(text: &str, err: &Error) -> String {
    match err {
        Error::Syntax { position, .. } => {
            let width = (*position).min(text.chars().count());
            format!("{err}\n  {text}\n  {}^", " ".repeat(width))
        }
        _ => err.to_string(),
    }
}
