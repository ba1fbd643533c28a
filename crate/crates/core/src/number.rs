//! Parameter values with a declared symbolic form: exact rationals, real
//! quadratic surds `a + b√d`, continued fractions, and plain floats.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;
use crate::scalar::{Rational, Scalar};

/// `a + b√d` with `d > 1` squarefree, or a rational when `b = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticSurd {
    pub a: Rational,
    pub b: Rational,
    pub d: u64,
}

fn squarefree_split(d: u64) -> (u64, u64) {
    // d = k² · r with r squarefree
    let (mut k, mut r) = (1u64, d);
    let mut f = 2u64;
    while f * f <= r {
        while r % (f * f) == 0 {
            r /= f * f;
            k *= f;
        }
        f += 1;
    }
    (k, r)
}

impl QuadraticSurd {
    pub fn rational(a: Rational) -> Self {
        QuadraticSurd {
            a,
            b: Rational::zero(),
            d: 1,
        }
    }

    /// `b√d` normalized so that `d` is squarefree.
    pub fn sqrt(d: u64) -> Self {
        let (k, r) = squarefree_split(d);
        if r == 1 {
            return QuadraticSurd::rational(Rational::from_integer(BigInt::from(k)));
        }
        QuadraticSurd {
            a: Rational::zero(),
            b: Rational::from_integer(BigInt::from(k)),
            d: r,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn value(&self) -> f64 {
        self.a.as_f64() + self.b.as_f64() * (self.d as f64).sqrt()
    }

    fn common_d(&self, o: &Self) -> Option<u64> {
        match (self.is_rational(), o.is_rational()) {
            (true, true) => Some(1),
            (true, false) => Some(o.d),
            (false, true) => Some(self.d),
            (false, false) => (self.d == o.d).then_some(self.d),
        }
    }

    fn tidy(mut self) -> Self {
        if self.b.is_zero() {
            self.d = 1;
        }
        self
    }

    pub fn add(&self, o: &Self) -> Option<Self> {
        let d = self.common_d(o)?;
        Some(
            QuadraticSurd {
                a: &self.a + &o.a,
                b: &self.b + &o.b,
                d,
            }
            .tidy(),
        )
    }

    pub fn neg(&self) -> Self {
        QuadraticSurd {
            a: -self.a.clone(),
            b: -self.b.clone(),
            d: self.d,
        }
    }

    pub fn mul(&self, o: &Self) -> Option<Self> {
        let d = self.common_d(o)?;
        let dd = Rational::from_integer(BigInt::from(d));
        Some(
            QuadraticSurd {
                a: &self.a * &o.a + &self.b * &o.b * dd,
                b: &self.a * &o.b + &self.b * &o.a,
                d,
            }
            .tidy(),
        )
    }

    pub fn recip(&self) -> Option<Self> {
        let dd = Rational::from_integer(BigInt::from(self.d));
        let norm = &self.a * &self.a - &self.b * &self.b * dd;
        if norm.is_zero() {
            return None;
        }
        Some(
            QuadraticSurd {
                a: &self.a / &norm,
                b: -&self.b / &norm,
                d: self.d,
            }
            .tidy(),
        )
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
    }
}

/// `[0; a₁, a₂, …]`; when `periodic`, the listed coefficients repeat forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    pub coeffs: Vec<u64>,
    pub periodic: bool,
}

impl ContinuedFraction {
    pub fn max_coefficient(&self) -> u64 {
        self.coeffs.iter().copied().max().unwrap_or(0)
    }

    /// Convergents `p_k/q_k` up to denominators ≤ `max_den` (at most `max_terms`).
    pub fn convergents(&self, max_den: u64, max_terms: usize) -> Vec<(u64, u64)> {
        let (mut p0, mut p1) = (1u128, 0u128);
        let (mut q0, mut q1) = (0u128, 1u128);
        let mut out = Vec::new();
        for i in 0..max_terms {
            let a = if self.periodic {
                self.coeffs[i % self.coeffs.len()]
            } else if i < self.coeffs.len() {
                self.coeffs[i]
            } else {
                break;
            } as u128;
            let (p2, q2) = (a * p1 + p0, a * q1 + q0);
            if q2 > max_den as u128 {
                break;
            }
            out.push((p2 as u64, q2 as u64));
            (p0, p1, q0, q1) = (p1, p2, q1, q2);
        }
        out
    }

    pub fn value(&self) -> f64 {
        match self.convergents(1 << 40, 200).last() {
            Some(&(p, q)) => p as f64 / q as f64,
            None => 0.0,
        }
    }

    /// Exact value: a rational for finite expansions, a surd for periodic ones.
    pub fn to_surd(&self) -> QuadraticSurd {
        let big = |v: u64| Rational::from_integer(BigInt::from(v));
        if !self.periodic {
            // fold from the back: x = 1/(a + x)
            let mut x = Rational::zero();
            for &a in self.coeffs.iter().rev() {
                x = (big(a) + x).recip();
            }
            return QuadraticSurd::rational(x);
        }
        // purely periodic: the tail after a_k is again [a₁; a₂, …] = 1/α, so with
        // P/Q, P'/Q' the last two convergents of [0; a₁, …, a_k],
        // α = (P/α + P')/(Q/α + Q'), i.e. Q'α² + (Q − P')α − P = 0
        let (mut p0, mut p1) = (BigInt::one(), BigInt::zero());
        let (mut q0, mut q1) = (BigInt::zero(), BigInt::one());
        for &a in &self.coeffs {
            let a = BigInt::from(a);
            let p2 = &a * &p1 + &p0;
            let q2 = &a * &q1 + &q0;
            (p0, p1, q0, q1) = (p1, p2, q1, q2);
        }
        let (p, q, pp, qp) = (p1, q1, p0, q0);
        let disc = (&q - &pp) * (&q - &pp) + BigInt::from(4) * &qp * &p;
        let disc = disc.to_u64().expect("discriminant fits in u64");
        let inv_two_qp = Rational::new(BigInt::one(), BigInt::from(2) * &qp);
        QuadraticSurd::sqrt(disc)
            .add(&QuadraticSurd::rational(Rational::from_integer(&pp - &q)))
            .expect("single radical")
            .mul(&QuadraticSurd::rational(inv_two_qp))
            .expect("single radical")
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(
            f,
            "cf:{}{}",
            body.join(","),
            if self.periodic { ",..." } else { "" }
        )
    }
}

/// True iff every supplied coefficient is at most `bound`.
pub fn bounded_partial_quotients(cf: &[u64], bound: u64) -> bool {
    cf.iter().all(|&a| a <= bound)
}

/// A real parameter together with the form it was given in.
#[derive(Clone, Debug, PartialEq)]
pub enum Number {
    Rational(Rational),
    Surd(QuadraticSurd),
    ContFrac(ContinuedFraction),
    Float(f64),
}

impl Number {
    pub fn value(&self) -> f64 {
        match self {
            Number::Rational(r) => r.as_f64(),
            Number::Surd(s) => s.value(),
            Number::ContFrac(c) => c.value(),
            Number::Float(x) => *x,
        }
    }

    /// Exact symbolic value when the form allows one.
    pub fn exact(&self) -> Option<QuadraticSurd> {
        match self {
            Number::Rational(r) => Some(QuadraticSurd::rational(r.clone())),
            Number::Surd(s) => Some(s.clone()),
            Number::ContFrac(c) => Some(c.to_surd()),
            Number::Float(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.exact().filter(|s| s.is_rational()).map(|s| s.a)
    }

    /// `Some(true)` if known rational, `Some(false)` if known irrational.
    pub fn is_rational(&self) -> Option<bool> {
        self.exact().map(|s| s.is_rational())
    }

    pub fn from_f64(x: f64) -> Self {
        Number::Float(x)
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Rational(r) => write!(f, "{r}"),
            Number::Surd(s) => write!(f, "{s}"),
            Number::ContFrac(c) => write!(f, "{c}"),
            Number::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Outcome of a decision that is exact only for symbolic inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Holds,
    Fails,
    Assumed,
}

/// Whether `{1, α, θ}` is linearly independent over ℚ.
pub fn rationally_independent(alpha: &Number, theta: &Number) -> Decision {
    let (Some(a), Some(t)) = (alpha.exact(), theta.exact()) else {
        return Decision::Assumed;
    };
    if a.is_rational() || t.is_rational() || a.d == t.d {
        // a rational entry, or both inside the same quadratic field ℚ(√d)
        Decision::Fails
    } else {
        Decision::Holds
    }
}

/// Whether `θ/(θ+1) ∉ ℚ + ℚα`.
pub fn ratio_outside_span(theta: &Number, alpha: &Number) -> Decision {
    let (Some(a), Some(t)) = (alpha.exact(), theta.exact()) else {
        return Decision::Assumed;
    };
    if t.is_rational() {
        return Decision::Fails;
    }
    // θ/(θ+1) is an irrational element of ℚ(√d_θ); ℚ + ℚα = ℚ(√d_α) when α is irrational
    if !a.is_rational() && a.d == t.d {
        Decision::Fails
    } else {
        Decision::Holds
    }
}

fn parse_decimal(tok: &str) -> Option<Rational> {
    let (int, frac) = tok.split_once('.').unwrap_or((tok, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let den = BigInt::from(10).pow(frac.len() as u32);
    Some(Rational::new(digits, den))
}

struct SurdParser<'a> {
    src: &'a str,
    pos: usize,
    input: &'a str,
}

impl<'a> SurdParser<'a> {
    fn err(&self, m: &str) -> ParseError {
        ParseError::new("number", self.input, m)
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<QuadraticSurd, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                let t = self.term()?;
                acc = acc.add(&t).ok_or_else(|| self.err("mixed radicals"))?;
            } else if self.eat('-') {
                let t = self.term()?;
                acc = acc
                    .add(&t.neg())
                    .ok_or_else(|| self.err("mixed radicals"))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<QuadraticSurd, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                let f = self.factor()?;
                acc = acc.mul(&f).ok_or_else(|| self.err("mixed radicals"))?;
            } else if self.eat('/') {
                let f = self.factor()?;
                let inv = f.recip().ok_or_else(|| self.err("division by zero"))?;
                acc = acc.mul(&inv).ok_or_else(|| self.err("mixed radicals"))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<QuadraticSurd, ParseError> {
        if self.eat('-') {
            return Ok(self.factor()?.neg());
        }
        if self.eat('(') {
            let e = self.expr()?;
            if !self.eat(')') {
                return Err(self.err("expected ')'"));
            }
            return Ok(e);
        }
        if self.src[self.pos..].starts_with("sqrt(") {
            self.pos += 5;
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let d: u64 = self.src[start..self.pos]
                .parse()
                .map_err(|_| self.err("sqrt needs an integer"))?;
            if !self.eat(')') {
                return Err(self.err("expected ')' after sqrt"));
            }
            return Ok(QuadraticSurd::sqrt(d));
        }
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        let tok = &self.src[start..self.pos];
        parse_decimal(tok)
            .map(QuadraticSurd::rational)
            .ok_or_else(|| self.err("expected a number"))
    }
}

impl FromStr for Number {
    type Err = ParseError;

    /// `p/q`, decimals, surd expressions such as `sqrt(2)-1` or `(sqrt(5)-1)/2`,
    /// continued fractions `cf:1,2,2,...` (a trailing `...` repeats the list),
    /// `pi`, or any float literal.
    fn from_str(input: &str) -> Result<Self, ParseError> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(body) = s.strip_prefix("cf:") {
            let (body, periodic) = match body.strip_suffix("...") {
                Some(b) => (b.trim_end_matches(','), true),
                None => (body, false),
            };
            let coeffs: Result<Vec<u64>, _> = body.split(',').map(|c| c.parse::<u64>()).collect();
            let coeffs = coeffs.map_err(|_| {
                ParseError::new(
                    "continued fraction",
                    input,
                    "coefficients must be positive integers",
                )
            })?;
            if coeffs.is_empty() || coeffs.contains(&0) {
                return Err(ParseError::new(
                    "continued fraction",
                    input,
                    "coefficients must be positive integers",
                ));
            }
            return Ok(Number::ContFrac(ContinuedFraction { coeffs, periodic }));
        }
        if s == "pi" {
            return Ok(Number::Float(std::f64::consts::PI));
        }
        let mut p = SurdParser {
            src: &s,
            pos: 0,
            input,
        };
        if let Ok(v) = p.expr() {
            if p.pos == s.len() {
                return Ok(if v.is_rational() {
                    Number::Rational(v.a)
                } else {
                    Number::Surd(v)
                });
            }
        }
        s.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(Number::Float)
            .ok_or_else(|| {
                ParseError::new(
                    "number",
                    input,
                    "not a rational, surd, continued fraction or float",
                )
            })
    }
}

/// `gcd`-reduced `(p, q)` for a positive rational.
pub fn rational_parts(r: &Rational) -> Option<(i64, i64)> {
    if !r.is_positive() {
        return None;
    }
    let g = r.numer().gcd(r.denom());
    Some(((r.numer() / &g).to_i64()?, (r.denom() / &g).to_i64()?))
}
