use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::ParseError;

/// Eventually periodic point of Ω = {0,1}^ℤ.
///
/// Bits below `lo` repeat `left` (so `bit(lo-1)` is the last letter of
/// `left`), bits in `[lo, hi)` come from `core`, and bits from `hi` on repeat
/// `right` starting with its first letter. Always `lo ≤ 0 ≤ hi`. Values are
/// kept canonical: primitive periods and a core as short as those bounds allow,
/// so structural equality is equality of sequences.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BiSeq {
    left: Vec<bool>,
    lo: i64,
    core: Vec<bool>,
    right: Vec<bool>,
}

fn primitive_root(word: &[bool]) -> Vec<bool> {
    let n = word.len();
    for d in 1..=n {
        if n.is_multiple_of(d) && (0..n).all(|i| word[i] == word[i % d]) {
            return word[..d].to_vec();
        }
    }
    word.to_vec()
}

fn count_cyclic(word: &[bool], start: usize, len: u64) -> i64 {
    let p = word.len() as u64;
    let per_period = word.iter().filter(|&&b| b).count() as u64;
    let full = len / p;
    let rest = len % p;
    let mut total = full * per_period;
    for i in 0..rest {
        if word[((start as u64 + i) % p) as usize] {
            total += 1;
        }
    }
    total as i64
}

impl BiSeq {
    /// Builds and canonicalizes; `lo ≤ 0 ≤ lo + core.len()` and nonempty periods are required.
    pub fn new(
        left: Vec<bool>,
        lo: i64,
        core: Vec<bool>,
        right: Vec<bool>,
    ) -> Result<Self, ParseError> {
        let hi = lo + core.len() as i64;
        if left.is_empty() || right.is_empty() {
            return Err(ParseError::new("BiSeq", "", "periods must be nonempty"));
        }
        if lo > 0 || hi < 0 {
            return Err(ParseError::new(
                "BiSeq",
                "",
                format!("core window [{lo},{hi}) must contain 0"),
            ));
        }
        let mut x = BiSeq {
            left: primitive_root(&left),
            lo,
            core,
            right: primitive_root(&right),
        };
        x.canonicalize();
        Ok(x)
    }

    /// Constant sequence.
    pub fn constant(bit: bool) -> Self {
        BiSeq {
            left: vec![bit],
            lo: 0,
            core: vec![],
            right: vec![bit],
        }
    }

    /// `bit(k) = word[k mod |word|]` for all k.
    pub fn periodic(word: &[bool]) -> Self {
        assert!(!word.is_empty(), "period must be nonempty");
        let root = primitive_root(word);
        BiSeq {
            left: root.clone(),
            lo: 0,
            core: vec![],
            right: root,
        }
    }

    /// `bit(k) = 1` iff `k ≥ 0`.
    pub fn step() -> Self {
        BiSeq {
            left: vec![false],
            lo: 0,
            core: vec![],
            right: vec![true],
        }
    }

    /// Sequence with `bit(k) = f(k)` on `[lo, hi)`, `left` below and `right` above.
    pub fn from_window(
        left: &[bool],
        lo: i64,
        hi: i64,
        right: &[bool],
        f: impl Fn(i64) -> bool,
    ) -> Result<Self, ParseError> {
        let core = (lo..hi).map(f).collect();
        BiSeq::new(left.to_vec(), lo, core, right.to_vec())
    }

    fn canonicalize(&mut self) {
        while self.lo < 0 && !self.core.is_empty() && self.core[0] == self.left[0] {
            self.core.remove(0);
            self.lo += 1;
            self.left.rotate_left(1);
        }
        while self.hi() > 0 && self.core.last() == self.right.last() {
            self.core.pop();
            self.right.rotate_right(1);
        }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.core.len() as i64
    }

    /// Left period, written in reading order (its last letter sits at `lo-1`).
    pub fn left_period(&self) -> &[bool] {
        &self.left
    }

    pub fn right_period(&self) -> &[bool] {
        &self.right
    }

    pub fn core(&self) -> &[bool] {
        &self.core
    }

    pub fn description_len(&self) -> usize {
        self.left.len() + self.core.len() + self.right.len()
    }

    pub fn bit(&self, k: i64) -> bool {
        if k < self.lo {
            let p = self.left.len() as i64;
            self.left[(k - self.lo).rem_euclid(p) as usize]
        } else if k >= self.hi() {
            let p = self.right.len() as i64;
            self.right[(k - self.hi()).rem_euclid(p) as usize]
        } else {
            self.core[(k - self.lo) as usize]
        }
    }

    /// Number of ones among positions `[from, to)`; `O(period)` for any range.
    pub fn ones(&self, from: i64, to: i64) -> i64 {
        if from >= to {
            return 0;
        }
        let (lo, hi) = (self.lo, self.hi());
        let mut total = 0;
        if from < lo {
            let end = to.min(lo);
            let p = self.left.len() as i64;
            let start = (from - lo).rem_euclid(p) as usize;
            total += count_cyclic(&self.left, start, (end - from) as u64);
        }
        let (a, b) = (from.max(lo), to.min(hi));
        if a < b {
            total += self.core[(a - lo) as usize..(b - lo) as usize]
                .iter()
                .filter(|&&x| x)
                .count() as i64;
        }
        if to > hi {
            let start_pos = from.max(hi);
            let p = self.right.len() as i64;
            let start = (start_pos - hi).rem_euclid(p) as usize;
            total += count_cyclic(&self.right, start, (to - start_pos) as u64);
        }
        total
    }

    /// τᵏx, i.e. `bit(j)` of the result is `bit(j-k)` of `self`.
    pub fn shift(&self, k: i64) -> BiSeq {
        let lo = (self.lo + k).min(0);
        let hi = (self.hi() + k).max(0);
        let pl = self.left.len() as i64;
        let pr = self.right.len() as i64;
        let left: Vec<bool> = (0..pl).map(|i| self.bit(lo - pl + i - k)).collect();
        let right: Vec<bool> = (0..pr).map(|i| self.bit(hi + i - k)).collect();
        BiSeq::from_window(&left, lo, hi, &right, |j| self.bit(j - k)).expect("window contains 0")
    }

    /// Minimal global period, if the sequence is periodic.
    pub fn is_periodic(&self) -> Option<usize> {
        let p = self.left.len();
        if p != self.right.len() {
            return None;
        }
        let pi = p as i64;
        ((self.lo - pi)..=self.hi())
            .all(|k| self.bit(k) == self.bit(k + pi))
            .then_some(p)
    }

    /// Random sequence with periods of length ≤ `max_period` and a core of
    /// length ≤ `max_core` around 0.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_period: usize, max_core: usize) -> Self {
        let pl = rng.random_range(1..=max_period);
        let pr = rng.random_range(1..=max_period);
        let left: Vec<bool> = (0..pl).map(|_| rng.random()).collect();
        let right: Vec<bool> = (0..pr).map(|_| rng.random()).collect();
        let neg = rng.random_range(0..=max_core);
        let pos = rng.random_range(0..=max_core);
        let core: Vec<bool> = (0..neg + pos).map(|_| rng.random()).collect();
        BiSeq::new(left, -(neg as i64), core, right).expect("valid by construction")
    }
}

fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn parse_bits(word: &str, input: &str) -> Result<Vec<bool>, ParseError> {
    word.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(ParseError::new(
                "BiSeq",
                input,
                format!("unexpected character {other:?}"),
            )),
        })
        .collect()
}

impl FromStr for BiSeq {
    type Err = ParseError;

    /// `"(w_left)* core . core (w_right)*"`, with `.` in front of position 0.
    fn from_str(input: &str) -> Result<Self, ParseError> {
        let err = |m: &str| ParseError::new("BiSeq", input, m);
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let s = s
            .strip_prefix('(')
            .ok_or_else(|| err("expected leading \"(w)*\""))?;
        let (left, rest) = s
            .split_once(")*")
            .ok_or_else(|| err("unterminated left period"))?;
        let (middle, right) = rest
            .rsplit_once('(')
            .ok_or_else(|| err("expected trailing \"(w)*\""))?;
        let right = right
            .strip_suffix(")*")
            .ok_or_else(|| err("unterminated right period"))?;
        let (cl, cr) = middle
            .split_once('.')
            .ok_or_else(|| err("missing '.' before position 0"))?;
        if cr.contains('.') {
            return Err(err("more than one '.'"));
        }
        let left = parse_bits(left, input)?;
        let right = parse_bits(right, input)?;
        let mut core = parse_bits(cl, input)?;
        let lo = -(core.len() as i64);
        core.extend(parse_bits(cr, input)?);
        if left.is_empty() || right.is_empty() {
            return Err(err("periods must be nonempty"));
        }
        BiSeq::new(left, lo, core, right)
    }
}

impl fmt::Display for BiSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let split = (-self.lo) as usize;
        let mut parts = vec![format!("({})*", bits_to_string(&self.left))];
        if split > 0 {
            parts.push(bits_to_string(&self.core[..split]));
        }
        parts.push(".".to_string());
        if split < self.core.len() {
            parts.push(bits_to_string(&self.core[split..]));
        }
        parts.push(format!("({})*", bits_to_string(&self.right)));
        write!(f, "{}", parts.join(" "))
    }
}
