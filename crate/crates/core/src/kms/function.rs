use std::collections::BTreeMap;

use super::Coeff;
use crate::lattice::GroupElement;

/// Required membership bits `u ↦ [u ∈ A]`.
pub type Constraints = BTreeMap<GroupElement, bool>;

/// `A ↦ Σ coeff · ∏_{u} [1_A(u) = bit]` on the unit space of hereditary sets
/// containing 0.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderFunction<C> {
    terms: BTreeMap<Constraints, C>,
}

/// Reduces a constraint set against the facts that hold on every unit:
/// `−ℕ² ⊆ A`, and `u ∈ A` forces `w ∈ A` for all `w ≤ u`. `None` means the
/// set is empty.
pub(crate) fn normalize(c: Constraints) -> Option<Constraints> {
    let mut c = c;
    for (&u, &bit) in &c {
        if u.in_negative_cone() && !bit {
            return None;
        }
    }
    c.retain(|u, &mut bit| !(bit && u.in_negative_cone()));
    let ones: Vec<GroupElement> = c.iter().filter(|(_, &b)| b).map(|(&u, _)| u).collect();
    let zeros: Vec<GroupElement> = c.iter().filter(|(_, &b)| !b).map(|(&u, _)| u).collect();
    if ones.iter().any(|&u| zeros.iter().any(|&w| w.le_cone(u))) {
        return None;
    }
    let keep_one = |w: &GroupElement| !ones.iter().any(|&u| u != *w && w.le_cone(u));
    let keep_zero = |w: &GroupElement| !zeros.iter().any(|&u| u != *w && u.le_cone(*w));
    c.retain(|w, &mut bit| if bit { keep_one(w) } else { keep_zero(w) });
    Some(c)
}

fn merge(a: &Constraints, b: &Constraints) -> Option<Constraints> {
    let mut out = a.clone();
    for (&u, &bit) in b {
        if *out.entry(u).or_insert(bit) != bit {
            return None;
        }
    }
    normalize(out)
}

impl<C: Coeff> CylinderFunction<C> {
    pub fn zero() -> Self {
        CylinderFunction {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: C) -> Self {
        Self::term(c, Constraints::new())
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    /// `ε_s = 1_{s ∈ A}`, the range projection of `w_s`.
    pub fn epsilon(s: GroupElement) -> Self {
        Self::term(C::one(), Constraints::from([(s, true)]))
    }

    pub fn term(c: C, constraints: Constraints) -> Self {
        let mut f = Self::zero();
        f.add_term(c, constraints);
        f
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (C, Constraints)>) -> Self {
        let mut f = Self::zero();
        for (c, k) in terms {
            f.add_term(c, k);
        }
        f
    }

    fn add_term(&mut self, c: C, constraints: Constraints) {
        let Some(k) = normalize(constraints) else {
            return;
        };
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(k.clone()).or_insert_with(C::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Constraints, &C)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of distinct constrained coordinates.
    pub fn depth(&self) -> usize {
        let mut keys: Vec<GroupElement> =
            self.terms.keys().flat_map(|k| k.keys().copied()).collect();
        keys.sort();
        keys.dedup();
        keys.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(c.clone(), k.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                if let Some(k) = merge(ka, kb) {
                    out.add_term(ca.clone() * cb.clone(), k);
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(k, v)| (v.clone() * c.clone(), k.clone())),
        )
    }

    pub fn conj(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (v.conj(), k.clone())))
    }

    /// `R_s(f)(A) = f(A − s)` on `{A : s ∈ A}`, zero elsewhere.
    pub fn r_shift(&self, s: GroupElement) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| {
            let mut moved: Constraints = k.iter().map(|(&u, &b)| (u + s, b)).collect();
            // agrees with an existing key only if consistent; otherwise the term dies in normalize
            match moved.get(&s) {
                Some(false) => (C::zero(), moved),
                _ => {
                    moved.insert(s, true);
                    (v.clone(), moved)
                }
            }
        }))
    }

    /// Value at the set with membership predicate `member`.
    pub fn eval(&self, member: impl Fn(GroupElement) -> bool) -> C {
        self.terms
            .iter()
            .filter(|(k, _)| k.iter().all(|(&u, &b)| member(u) == b))
            .fold(C::zero(), |acc, (_, c)| acc + c.clone())
    }

    /// Value at the full set `A = ℤ²`.
    pub fn at_full_set(&self) -> C {
        self.eval(|_| true)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> CylinderFunction<D> {
        CylinderFunction::from_terms(self.terms.iter().map(|(k, v)| (f(v), k.clone())))
    }
}
