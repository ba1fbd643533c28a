use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use super::function::{Constraints, CylinderFunction};
use super::Coeff;
use crate::error::ParseError;
use crate::lattice::{GroupElement, Potential};

/// Finite sum `Σ f_s · w_s`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<C> {
    summands: BTreeMap<GroupElement, CylinderFunction<C>>,
}

impl<C: Coeff> AlgebraElement<C> {
    pub fn zero() -> Self {
        AlgebraElement {
            summands: BTreeMap::new(),
        }
    }

    pub fn identity() -> Self {
        Self::spanning(CylinderFunction::one(), GroupElement::ZERO)
    }

    /// `1 · w_s`
    pub fn w(s: GroupElement) -> Self {
        Self::spanning(CylinderFunction::one(), s)
    }

    /// `f · w_s`
    pub fn spanning(f: CylinderFunction<C>, s: GroupElement) -> Self {
        let mut a = Self::zero();
        a.push(s, f);
        a
    }

    /// Stores `f·ε_s`, which is what `f·w_s` sees anyway.
    fn push(&mut self, s: GroupElement, f: CylinderFunction<C>) {
        let f = f.mul(&CylinderFunction::epsilon(s));
        if f.is_zero() {
            return;
        }
        let sum = match self.summands.remove(&s) {
            Some(g) => g.add(&f),
            None => f,
        };
        if !sum.is_zero() {
            self.summands.insert(s, sum);
        }
    }

    pub fn summands(&self) -> impl Iterator<Item = (&GroupElement, &CylinderFunction<C>)> {
        self.summands.iter()
    }

    pub fn summand(&self, s: GroupElement) -> Option<&CylinderFunction<C>> {
        self.summands.get(&s)
    }

    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&s, f) in &other.summands {
            out.push(s, f.clone());
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero();
        for (&s, f) in &self.summands {
            out.push(s, f.scale(c));
        }
        out
    }

    /// Bilinear extension of `(f w_s)(g w_t) = f·R_s(g) · w_{s+t}`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&s, f) in &self.summands {
            for (&t, g) in &other.summands {
                out.push(s + t, f.mul(&g.r_shift(s)));
            }
        }
        out
    }

    /// `(f w_s)* = R_{−s}(f̄) · w_{−s}`.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (&s, f) in &self.summands {
            out.push(-s, f.conj().r_shift(-s));
        }
        out
    }

    /// Multiplies the `w_s` summand by `factor(s)`.
    pub fn scale_summands(&self, factor: impl Fn(GroupElement) -> C) -> Self {
        let mut out = Self::zero();
        for (&s, f) in &self.summands {
            out.push(s, f.scale(&factor(s)));
        }
        out
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> AlgebraElement<D> {
        let mut out = AlgebraElement::zero();
        for (&s, g) in &self.summands {
            out.push(s, g.map_coeffs(&f));
        }
        out
    }

    pub fn to_c64(&self) -> AlgebraElement<Complex64> {
        self.map_coeffs(|c| c.to_c64())
    }

    /// Total number of constrained coordinates across all summands.
    pub fn depth(&self) -> usize {
        self.summands.values().map(|f| f.depth()).sum()
    }

    /// Sum of `|coeff|` over every term.
    pub fn l1_coefficients(&self) -> f64 {
        self.summands
            .values()
            .flat_map(|f| f.terms().map(|(_, c)| c.to_c64().norm()))
            .sum()
    }
}

impl AlgebraElement<Complex64> {
    /// `σ_{iβ}`: the `w_s` summand picks up `e^{−βc(s)}`.
    pub fn sigma_ibeta(&self, pot: &Potential<f64>) -> Self {
        self.scale_summands(|s| Complex64::new((-pot.beta * pot.c(s)).exp(), 0.0))
    }
}

/// Random element with 1–2 summands `s ∈ [−2,2]²`, 1–2 terms each, at most
/// 3 constraints per term inside `[−4,4]²` and 6 in total, coefficients in
/// `{±1, ±i, ±½}`.
pub fn random_element<C: Coeff, R: Rng + ?Sized>(rng: &mut R) -> AlgebraElement<C> {
    const COEFFS: [(i64, i64, i64); 6] = [
        (1, 0, 1),
        (-1, 0, 1),
        (0, 1, 1),
        (0, -1, 1),
        (1, 0, 2),
        (-1, 0, 2),
    ];
    let mut budget = 6usize;
    let mut out = AlgebraElement::zero();
    for _ in 0..rng.random_range(1..=2) {
        let s = GroupElement::new(rng.random_range(-2..=2), rng.random_range(-2..=2));
        let mut f = CylinderFunction::zero();
        for _ in 0..rng.random_range(1..=2) {
            let n = rng.random_range(0..=3usize).min(budget);
            budget -= n;
            let k: Constraints = (0..n)
                .map(|_| {
                    (
                        GroupElement::new(rng.random_range(-4..=4), rng.random_range(-4..=4)),
                        rng.random(),
                    )
                })
                .collect();
            let (re, im, den) = COEFFS[rng.random_range(0..COEFFS.len())];
            f = f.add(&CylinderFunction::term(C::small(re, im, den), k));
        }
        out.push(s, f);
    }
    out
}

impl<C: Coeff> fmt::Display for AlgebraElement<C> {
    /// `coeff * [(a,b):1, (c,d):0] w(a,b) + …`, or `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (s, g) in &self.summands {
            for (k, c) in g.terms() {
                let cons: Vec<String> =
                    k.iter().map(|(u, &b)| format!("{u}:{}", b as u8)).collect();
                parts.push(format!(
                    "{} * [{}] w({},{})",
                    c.render(),
                    cons.join(", "),
                    s.a,
                    s.b
                ));
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_real(s: &str, input: &str) -> Result<f64, ParseError> {
    let bad = || ParseError::new("AlgebraElement", input, format!("bad number {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            Ok(n.parse::<f64>().map_err(|_| bad())? / d.parse::<f64>().map_err(|_| bad())?)
        }
        None => s.parse().map_err(|_| bad()),
    }
}

fn parse_coeff(s: &str, input: &str) -> Result<Complex64, ParseError> {
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        // (re±imi)
        let body = inner.strip_suffix('i').ok_or_else(|| {
            ParseError::new(
                "AlgebraElement",
                input,
                "complex literal needs a trailing i",
            )
        })?;
        let cut = body
            .char_indices()
            .skip(1)
            .filter(|&(i, c)| (c == '+' || c == '-') && !body[..i].ends_with(['e', 'E']))
            .map(|(i, _)| i)
            .last()
            .ok_or_else(|| {
                ParseError::new("AlgebraElement", input, "complex literal needs re+imi")
            })?;
        return Ok(Complex64::new(
            parse_real(&body[..cut], input)?,
            parse_real(body[cut..].trim_start_matches('+'), input)?,
        ));
    }
    match s.strip_suffix('i') {
        Some("") | Some("+") => Ok(Complex64::new(0.0, 1.0)),
        Some("-") => Ok(Complex64::new(0.0, -1.0)),
        Some(im) => Ok(Complex64::new(0.0, parse_real(im, input)?)),
        None => Ok(Complex64::new(parse_real(s, input)?, 0.0)),
    }
}

fn parse_pair(s: &str, input: &str) -> Result<GroupElement, ParseError> {
    let err = || ParseError::new("AlgebraElement", input, format!("bad lattice point {s:?}"));
    let inner = s
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(err)?;
    let (a, b) = inner.split_once(',').ok_or_else(err)?;
    Ok(GroupElement::new(
        a.parse().map_err(|_| err())?,
        b.parse().map_err(|_| err())?,
    ))
}

fn parse_term(
    term: &str,
    input: &str,
) -> Result<(GroupElement, Complex64, Constraints), ParseError> {
    let err = |m: String| ParseError::new("AlgebraElement", input, m);
    let mut rest = term;
    let mut s = GroupElement::ZERO;
    if let Some(pos) = rest.rfind("w(") {
        s = parse_pair(&rest[pos + 1..], input)?;
        rest = &rest[..pos];
    }
    let mut cons = Constraints::new();
    if let Some(open) = rest.find('[') {
        let body = rest[open..]
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| err(format!("unbalanced brackets in {term:?}")))?;
        for item in split_top_level(body, ',')
            .into_iter()
            .filter(|x| !x.is_empty())
        {
            let (u, bit) = item
                .rsplit_once(':')
                .ok_or_else(|| err(format!("constraint {item:?} needs ':0' or ':1'")))?;
            let bit = match bit {
                "0" => false,
                "1" => true,
                other => return Err(err(format!("bit must be 0 or 1, got {other:?}"))),
            };
            let u = parse_pair(u, input)?;
            if cons.insert(u, bit).is_some_and(|old| old != bit) {
                return Err(err(format!("contradictory constraints at {u}")));
            }
        }
        rest = &rest[..open];
    }
    let rest = rest.trim_end_matches('*');
    let c = if rest.is_empty() {
        Complex64::new(1.0, 0.0)
    } else {
        parse_coeff(rest, input)?
    };
    Ok((s, c, cons))
}

impl FromStr for AlgebraElement<Complex64> {
    type Err = ParseError;

    fn from_str(input: &str) -> Result<Self, ParseError> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(ParseError::new("AlgebraElement", input, "empty input"));
        }
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut out = Self::zero();
        for term in split_top_level(&s, '+') {
            if term.is_empty() {
                return Err(ParseError::new("AlgebraElement", input, "empty summand"));
            }
            let (g, c, cons) = parse_term(term, input)?;
            out.push(g, CylinderFunction::term(c, cons));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kms::ExactCoeff;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type E = AlgebraElement<Complex64>;
    fn g(a: i64, b: i64) -> GroupElement {
        GroupElement::new(a, b)
    }

    #[test]
    fn partial_isometry_relations() {
        let s = g(2, 1);
        assert_eq!(
            E::w(s).mul(&E::w(-s)),
            E::spanning(CylinderFunction::epsilon(s), GroupElement::ZERO)
        );
        // isometry for s ∈ ℕ²
        assert_eq!(E::w(-s).mul(&E::w(s)), E::identity());
        assert_eq!(E::w(s).adjoint(), E::w(-s));
        assert_eq!(
            E::w(-s).adjoint(),
            E::spanning(CylinderFunction::epsilon(s), s)
        );
    }

    #[test]
    fn projections_are_self_adjoint() {
        let p = E::spanning(CylinderFunction::epsilon(g(3, -1)), GroupElement::ZERO);
        assert_eq!(p.adjoint(), p);
    }

    #[test]
    fn sigma_scales_by_c() {
        let pot = Potential::new(0.7, 0.4);
        let a = E::w(GroupElement::E1).add(&E::identity());
        let s = a.sigma_ibeta(&pot);
        assert_eq!(s.summand(GroupElement::ZERO), a.summand(GroupElement::ZERO));
        assert_eq!(
            s.summand(GroupElement::E1),
            Some(
                &CylinderFunction::epsilon(GroupElement::E1)
                    .scale(&Complex64::new((-0.7f64).exp(), 0.0))
            )
        );
        // (σ(f w_s))* carries e^{−βc(s)} on w_{−s}
        let b = E::w(g(1, 2));
        let lhs = b.sigma_ibeta(&pot).adjoint();
        let rhs = b
            .adjoint()
            .scale(&Complex64::new((-0.7f64 * 1.8).exp(), 0.0));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn text_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a: E = random_element(&mut rng);
            let back: E = a.to_string().parse().unwrap();
            assert_eq!(back, a, "{a}");
        }
        let a: E = "(0.5-2i) * [(1,0):1, (0,2):0] w(1,-1) + -i * [] w(0,0) + 3"
            .parse()
            .unwrap();
        assert_eq!(
            a.summand(g(0, 0)).unwrap().at_full_set(),
            Complex64::new(3.0, -1.0)
        );
        assert_eq!(a.summand(g(1, -1)).unwrap().len(), 1);
        assert!("1 * [(1,0):2]".parse::<E>().is_err());
        assert!("".parse::<E>().is_err());
        assert_eq!("0".parse::<E>().unwrap(), E::zero());
    }

    #[test]
    fn exact_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a: AlgebraElement<ExactCoeff> = random_element(&mut rng);
        assert_eq!(a.adjoint().adjoint(), a);
        let half = ExactCoeff::small(1, 0, 2);
        assert_eq!(a.scale(&half).scale(&ExactCoeff::small(2, 0, 1)), a);
    }
}
