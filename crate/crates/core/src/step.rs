//! Piecewise-constant functions on the circle [0,1).

use serde::Serialize;

/// `f(x) = values[i]` for `x ∈ [breaks[i], breaks[i+1])`, with `breaks[0] = 0`
/// and the last break `1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepFunction {
    breaks: Vec<f64>,
    values: Vec<f64>,
    #[serde(skip)]
    cumulative: Vec<f64>,
}

impl StepFunction {
    /// Panics unless breaks run strictly increasing from 0 to 1 with one
    /// value per piece.
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(breaks.len(), values.len() + 1, "one value per piece");
        assert!(
            breaks[0] == 0.0 && *breaks.last().unwrap() == 1.0,
            "breaks must span [0,1]"
        );
        assert!(
            breaks.windows(2).all(|w| w[0] < w[1]),
            "breaks must increase"
        );
        let mut cumulative = Vec::with_capacity(breaks.len());
        cumulative.push(0.0);
        let mut acc = 0.0;
        for (i, v) in values.iter().enumerate() {
            acc += v * (breaks[i + 1] - breaks[i]);
            cumulative.push(acc);
        }
        StepFunction {
            breaks,
            values,
            cumulative,
        }
    }

    pub fn constant(v: f64) -> Self {
        StepFunction::new(vec![0.0, 1.0], vec![v])
    }

    /// Values on the uniform grid of `values.len()` cells.
    pub fn uniform(values: Vec<f64>) -> Self {
        let n = values.len();
        let breaks = (0..=n).map(|i| i as f64 / n as f64).collect();
        StepFunction::new(breaks, values)
    }

    /// `a` on `[0, split)`, `b` on `[split, 1)`.
    pub fn two_valued(split: f64, a: f64, b: f64) -> Self {
        if split <= 0.0 {
            StepFunction::constant(b)
        } else if split >= 1.0 {
            StepFunction::constant(a)
        } else {
            StepFunction::new(vec![0.0, split, 1.0], vec![a, b])
        }
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn piece(&self, x: f64) -> usize {
        let x = x.rem_euclid(1.0);
        match self.breaks.binary_search_by(|b| b.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.values.len() - 1),
            Err(i) => i - 1,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.values[self.piece(x)]
    }

    fn primitive(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return *self.cumulative.last().unwrap();
        }
        let i = self.piece(x);
        self.cumulative[i] + self.values[i] * (x - self.breaks[i])
    }

    /// `∫_a^b f` over the arc from `a` to `b` (taken mod 1, counterclockwise).
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let len = b - a;
        if len <= 0.0 {
            return 0.0;
        }
        if len >= 1.0 {
            let whole = len.floor();
            return whole * self.total() + self.integral(a, a + (len - whole));
        }
        let a = a.rem_euclid(1.0);
        let b = a + len;
        if b <= 1.0 {
            self.primitive(b) - self.primitive(a)
        } else {
            self.primitive(1.0) - self.primitive(a) + self.primitive(b - 1.0)
        }
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Pointwise combination on the common refinement.
    pub fn combine(&self, other: &StepFunction, op: impl Fn(f64, f64) -> f64) -> StepFunction {
        let mut breaks: Vec<f64> = self
            .breaks
            .iter()
            .chain(other.breaks.iter())
            .copied()
            .collect();
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let values = breaks
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                op(self.eval(mid), other.eval(mid))
            })
            .collect();
        StepFunction::new(breaks, values)
    }

    pub fn map(&self, op: impl Fn(f64) -> f64) -> StepFunction {
        StepFunction::new(
            self.breaks.clone(),
            self.values.iter().map(|&v| op(v)).collect(),
        )
    }

    /// `x ↦ f(x + shift)`
    pub fn rotate(&self, shift: f64) -> StepFunction {
        let s = shift.rem_euclid(1.0);
        let mut breaks: Vec<f64> = self
            .breaks
            .iter()
            .map(|b| (b - s).rem_euclid(1.0))
            .collect();
        breaks.push(0.0);
        breaks.push(1.0);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let values = breaks
            .windows(2)
            .map(|w| self.eval(0.5 * (w[0] + w[1]) + s))
            .collect();
        StepFunction::new(breaks, values)
    }
}
