use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::symbolic::BiSeq;

/// Finite set of coordinate constraints on Ω, optionally pinned to a level of Ω×ℤ.
///
/// A cylinder with `level = None` inside Ω×ℤ stands for `E × ℕ`, the part
/// lying in the unit space.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cylinder {
    constraints: BTreeMap<i64, bool>,
    level: Option<i64>,
    empty: bool,
}

impl Cylinder {
    pub fn new(constraints: impl IntoIterator<Item = (i64, bool)>) -> Self {
        let mut c = Cylinder::default();
        for (k, b) in constraints {
            c = c.and(k, b);
        }
        c
    }

    pub fn whole() -> Self {
        Cylinder::default()
    }

    pub fn empty() -> Self {
        Cylinder {
            empty: true,
            ..Cylinder::default()
        }
    }

    /// All coordinates in `[lo, lo + width)` fixed by the low bits of `pattern`.
    pub fn full(lo: i64, width: usize, pattern: u64) -> Self {
        Cylinder::new((0..width).map(|i| (lo + i as i64, (pattern >> i) & 1 == 1)))
    }

    pub fn at_level(mut self, level: i64) -> Self {
        self.level = Some(level);
        self
    }

    pub fn level(&self) -> Option<i64> {
        self.level
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn constraints(&self) -> &BTreeMap<i64, bool> {
        &self.constraints
    }

    pub fn get(&self, k: i64) -> Option<bool> {
        self.constraints.get(&k).copied()
    }

    /// Adds `x_k = bit`; a conflict makes the cylinder empty.
    pub fn and(mut self, k: i64, bit: bool) -> Self {
        if self.empty {
            return self;
        }
        match self.constraints.insert(k, bit) {
            Some(old) if old != bit => Cylinder::empty(),
            _ => self,
        }
    }

    /// `τᵏ(C)`: every constraint index moves by `k`.
    pub fn shifted(&self, k: i64) -> Self {
        Cylinder {
            constraints: self.constraints.iter().map(|(&i, &b)| (i + k, b)).collect(),
            level: self.level,
            empty: self.empty,
        }
    }

    /// Smallest and largest constrained index.
    pub fn window(&self) -> Option<(i64, i64)> {
        let lo = *self.constraints.keys().next()?;
        let hi = *self.constraints.keys().next_back()?;
        Some((lo, hi))
    }

    pub fn contains(&self, x: &BiSeq) -> bool {
        !self.empty && self.constraints.iter().all(|(&k, &b)| x.bit(k) == b)
    }

    /// Membership of `τⁿx` computed from `x`.
    pub fn contains_shift(&self, x: &BiSeq, n: i64) -> bool {
        !self.empty && self.constraints.iter().all(|(&k, &b)| x.bit(k - n) == b)
    }
}

impl fmt::Display for Cylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.empty {
            return write!(f, "∅");
        }
        let body: Vec<String> = self
            .constraints
            .iter()
            .map(|(k, b)| format!("{}:{}", k, *b as u8))
            .collect();
        write!(f, "{{{}}}", body.join(","))?;
        if let Some(l) = self.level {
            write!(f, "@{l}")?;
        }
        Ok(())
    }
}
