//! Differential forms over all phase-space coordinates with polynomial
//! coefficients. A basis element is a bitmask of coordinate differentials
//! wedged in increasing coordinate order.

use std::collections::BTreeMap;

use super::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExteriorForm {
    terms: BTreeMap<u64, Poly>,
}

fn parity_below(mask: u64, c: usize) -> bool {
    (mask & ((1u64 << c) - 1)).count_ones() % 2 == 1
}

impl ExteriorForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(mask: u64, coeff: Poly) -> Self {
        let mut f = Self::zero();
        f.add_term(mask, coeff);
        f
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u64, &Poly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mask: u64) -> Poly {
        self.terms.get(&mask).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mask: u64, coeff: Poly) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(mask).or_default();
        *slot += &coeff;
        if slot.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, p: &Poly) -> Self {
        self.map_coeffs(|c| c * p)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }

    /// `∂_c ⌟ α` with the left-contraction sign convention.
    pub fn interior(&self, c: usize) -> Self {
        let bit = 1u64 << c;
        let mut out = Self::zero();
        for (m, coeff) in &self.terms {
            if m & bit == 0 {
                continue;
            }
            let term = if parity_below(*m, c) {
                -coeff
            } else {
                coeff.clone()
            };
            out.add_term(m & !bit, term);
        }
        out
    }

    /// `dz^c ∧ α`.
    pub fn wedge_left(&self, c: usize) -> Self {
        let bit = 1u64 << c;
        let mut out = Self::zero();
        for (m, coeff) in &self.terms {
            if m & bit != 0 {
                continue;
            }
            let term = if parity_below(*m, c) {
                -coeff
            } else {
                coeff.clone()
            };
            out.add_term(m | bit, term);
        }
        out
    }

    /// Degree of every term, or `None` for mixed/zero forms.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut degrees = self.terms.keys().map(|m| m.count_ones() as usize);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    /// True when no basis element touches coordinates outside `allowed`.
    pub fn supported_on(&self, allowed: u64) -> bool {
        self.terms.keys().all(|m| m & !allowed == 0)
    }

    pub fn eval_coeffs(&self, values: &[f64]) -> BTreeMap<u64, f64> {
        self.terms
            .iter()
            .map(|(m, c)| (*m, c.eval(values)))
            .collect()
    }
}
