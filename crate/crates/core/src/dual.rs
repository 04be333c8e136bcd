//! Elements of the dual Hopf algebra `S*`, a polynomial ring over Q in
//! generators `s*_k` of weight `k`. Monomials are indexed by multi-indices:
//! the monomial `s*_{k_1} ⋯ s*_{k_l}` is keyed by `(k_1, …, k_l)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;
use crate::error::{AlgebraError, Result};
use crate::multiindex::MultiIndex;
use crate::rational::{parse_fraction, Rational};

#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct DualElement {
    terms: BTreeMap<MultiIndex, Rational>,
}

impl DualElement {
    pub fn constant(r: Rational) -> Self {
        Self::monomial(MultiIndex::empty(), r)
    }

    /// The generator `s*_k`.
    pub fn generator(k: u32) -> Self {
        Self::monomial(MultiIndex::single(k), Rational::one())
    }

    pub fn monomial(m: MultiIndex, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        DualElement { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, Rational)>>(it: I) -> Self {
        let mut out = DualElement::default();
        for (m, c) in it {
            out.add_term(m, &c);
        }
        out
    }

    pub fn add_term(&mut self, m: MultiIndex, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Rational> {
        &self.terms
    }

    pub fn coeff(&self, m: &MultiIndex) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = <Self as Coeff>::one_value();
        for _ in 0..n {
            acc = acc.mul_ref(self);
        }
        acc
    }

    /// Component of the given weight.
    pub fn homogeneous(&self, weight: u32) -> Self {
        DualElement {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.weight() == weight)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Weights that occur, ascending.
    pub fn weights(&self) -> Vec<u32> {
        let mut w: Vec<u32> = self.terms.keys().map(|m| m.weight()).collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    /// The common weight of a nonzero homogeneous element.
    pub fn homogeneous_weight(&self) -> Result<u32> {
        match self.weights().as_slice() {
            [w] => Ok(*w),
            [] => Err(AlgebraError::Precondition("zero element has no weight".into())),
            _ => Err(AlgebraError::NotHomogeneous),
        }
    }

    pub fn max_weight(&self) -> u32 {
        self.terms.keys().map(|m| m.weight()).max().unwrap_or(0)
    }

    /// Exact quotient in the polynomial ring, by division with respect to
    /// the graded order on monomials; a nonzero remainder is an error.
    pub fn exact_div(&self, divisor: &DualElement) -> Result<DualElement> {
        let (lead_m, lead_c) = divisor.terms.iter().next_back().ok_or(AlgebraError::DivisionByZero)?;
        let lead_inv = lead_c.recip();
        let mut rest = self.clone();
        let mut quotient = DualElement::default();
        while let Some((m, c)) = rest.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = m.difference(lead_m).ok_or(AlgebraError::NotDivisible { weight: m.weight() })?;
            let qc = c * &lead_inv;
            for (dm, dc) in &divisor.terms {
                rest.add_term(qm.union(dm), &-(dc * &qc));
            }
            quotient.add_term(qm, &qc);
        }
        Ok(quotient)
    }

    /// Replaces every monomial by an arbitrary image and sums (a ring map
    /// when `image` is multiplicative on monomials).
    pub fn map_monomials<C: Coeff>(&self, mut image: impl FnMut(&MultiIndex) -> C) -> C {
        let mut acc = C::zero_value();
        for (m, c) in &self.terms {
            acc.add_assign_ref(&image(m).scale(c));
        }
        acc
    }

    /// JSON-friendly term list, ascending graded order.
    pub fn to_poly_terms(&self) -> Vec<PolyTerm> {
        self.terms
            .iter()
            .map(|(m, c)| PolyTerm {
                mono: m.clone(),
                coef: format_rational(c),
            })
            .collect()
    }

    pub fn from_poly_terms(terms: &[PolyTerm]) -> Result<Self> {
        let mut out = DualElement::default();
        for t in terms {
            out.add_term(t.mono.clone(), &parse_fraction(&t.coef)?);
        }
        Ok(out)
    }
}

/// One monomial `coef · Π s*_k` in serialized form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub mono: MultiIndex,
    pub coef: String,
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Coeff for DualElement {
    fn zero_value() -> Self {
        DualElement::default()
    }
    fn one_value() -> Self {
        DualElement::constant(Rational::one())
    }
    fn from_rational(r: Rational) -> Self {
        DualElement::constant(r)
    }
    fn is_zero_value(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c);
        }
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), &-c);
        }
    }
    fn neg(&self) -> Self {
        DualElement {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
    fn mul_ref(&self, other: &Self) -> Self {
        let mut out = DualElement::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.union(m2), &(c1 * c2));
            }
        }
        out
    }
    fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return DualElement::default();
        }
        DualElement {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * r)).collect(),
        }
    }
    fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_empty().then(|| c.clone())
            }
            _ => None,
        }
    }
    fn denominators(&self) -> Vec<BigInt> {
        let mut d: Vec<BigInt> = self
            .terms
            .values()
            .filter(|c| !c.denom().is_one())
            .map(|c| c.denom().clone())
            .collect();
        d.sort();
        d.dedup();
        d
    }
}

impl std::ops::Add for &DualElement {
    type Output = DualElement;
    fn add(self, rhs: &DualElement) -> DualElement {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl std::ops::Sub for &DualElement {
    type Output = DualElement;
    fn sub(self, rhs: &DualElement) -> DualElement {
        let mut out = self.clone();
        out.sub_assign_ref(rhs);
        out
    }
}

impl std::ops::Mul for &DualElement {
    type Output = DualElement;
    fn mul(self, rhs: &DualElement) -> DualElement {
        self.mul_ref(rhs)
    }
}

impl fmt::Debug for DualElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DualElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|a, b| a.0.weight().cmp(&b.0.weight()).then(b.0.parts().cmp(a.0.parts())));
        for (i, (m, c)) in ordered.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let unit = abs.is_one();
            if !unit || m.is_empty() {
                write!(f, "{}", format_rational(&abs))?;
            }
            for (k, e) in m.multiplicities().into_iter().rev() {
                write!(f, "s*_{k}")?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}
