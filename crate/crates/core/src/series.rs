//! Truncated multivariate power series over weighted variables.
//!
//! Truncation is by total weight: a series with truncation `T` is known
//! exactly in every monomial of weight `≤ T` and nothing is stored above.
//! Arithmetic results carry the minimum truncation of their operands, and
//! exact division lowers it by the valuation of the divisor, so the stored
//! truncation is always the honest precision of the value.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;
use crate::error::{AlgebraError, Result};
use crate::rational::{binomial, parse_rational, q, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub weight: u32,
}

impl Variable {
    pub fn new(name: impl Into<String>, weight: u32) -> Self {
        assert!(weight >= 1, "variable weights are positive");
        Variable {
            name: name.into(),
            weight,
        }
    }
}

pub type Vars = Arc<Vec<Variable>>;

/// Weight-1 variables with the given names.
pub fn vars(names: &[&str]) -> Vars {
    Arc::new(names.iter().map(|n| Variable::new(*n, 1)).collect())
}

pub type Exponent = Vec<u32>;

#[derive(Clone)]
pub struct Series<C> {
    vars: Vars,
    trunc: u32,
    terms: BTreeMap<Exponent, C>,
}

impl<C: Coeff> PartialEq for Series<C> {
    fn eq(&self, other: &Self) -> bool {
        self.trunc == other.trunc && *self.vars == *other.vars && self.terms == other.terms
    }
}

/// Graded lexicographic order: weighted degree first, then exponents
/// compared lexicographically with larger leading exponents first.
pub fn grlex_cmp(vars: &[Variable], a: &[u32], b: &[u32]) -> Ordering {
    weight_of(vars, a)
        .cmp(&weight_of(vars, b))
        .then_with(|| b.cmp(a))
}

fn weight_of(vars: &[Variable], exp: &[u32]) -> u32 {
    exp.iter().zip(vars).map(|(e, v)| e * v.weight).sum()
}

fn add_exp(a: &[u32], b: &[u32]) -> Exponent {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl<C: Coeff> Series<C> {
    pub fn zero(vars: &Vars, trunc: u32) -> Self {
        Series {
            vars: vars.clone(),
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Vars, trunc: u32, c: C) -> Self {
        let mut s = Self::zero(vars, trunc);
        s.add_term(vec![0; vars.len()], &c);
        s
    }

    pub fn one(vars: &Vars, trunc: u32) -> Self {
        Self::constant(vars, trunc, C::one_value())
    }

    /// The `i`-th variable as a series.
    pub fn var(vars: &Vars, trunc: u32, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, trunc, e, C::one_value())
    }

    pub fn monomial(vars: &Vars, trunc: u32, exp: Exponent, c: C) -> Self {
        let mut s = Self::zero(vars, trunc);
        s.add_term(exp, &c);
        s
    }

    /// `Σ coeffs[k] · var^k` in a single variable.
    pub fn univariate(var: Variable, trunc: u32, coeffs: &[C]) -> Self {
        let vars: Vars = Arc::new(vec![var]);
        let mut s = Self::zero(&vars, trunc);
        for (k, c) in coeffs.iter().enumerate() {
            s.add_term(vec![k as u32], c);
        }
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, C)>>(vars: &Vars, trunc: u32, it: I) -> Self {
        let mut s = Self::zero(vars, trunc);
        for (e, c) in it {
            s.add_term(e, &c);
        }
        s
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn truncation(&self) -> u32 {
        self.trunc
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, C> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weight(&self, exp: &[u32]) -> u32 {
        weight_of(&self.vars, exp)
    }

    /// Adds `c · x^exp`, silently dropping terms above the truncation.
    pub fn add_term(&mut self, exp: Exponent, c: &C) {
        assert_eq!(exp.len(), self.vars.len(), "exponent length mismatch");
        if c.is_zero_value() || self.weight(&exp) > self.trunc {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(v) => {
                v.add_assign_ref(c);
                if v.is_zero_value() {
                    self.terms.remove(&exp);
                }
            }
            None => {
                self.terms.insert(exp, c.clone());
            }
        }
    }

    pub fn coeff(&self, exp: &[u32]) -> C {
        self.terms.get(exp).cloned().unwrap_or_else(C::zero_value)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&vec![0; self.vars.len()])
    }

    /// Lowest weight of a stored term.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(|e| self.weight(e)).min()
    }

    pub fn homogeneous(&self, d: u32) -> Self {
        Series {
            vars: self.vars.clone(),
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| self.weight(e) == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Lowers the truncation to `min(self, w)`.
    pub fn truncate(&self, w: u32) -> Self {
        let trunc = self.trunc.min(w);
        Series {
            vars: self.vars.clone(),
            trunc,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| self.weight(e) <= trunc)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Raises the recorded truncation without adding terms. Only valid for
    /// values known to be exact (polynomials computed without loss).
    pub fn assume_exact_to(mut self, w: u32) -> Self {
        self.trunc = self.trunc.max(w);
        self
    }

    /// Terms in graded lexicographic order.
    pub fn sorted_terms(&self) -> Vec<(&Exponent, &C)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| grlex_cmp(&self.vars, a.0, b.0));
        v
    }

    /// True when both values are known through weight `w` and agree there.
    pub fn eq_through(&self, other: &Self, w: u32) -> bool {
        if self.trunc < w || other.trunc < w {
            return false;
        }
        self.first_difference(other, w).is_none()
    }

    /// First exponent (graded order) of weight `≤ w` where the two differ.
    pub fn first_difference(&self, other: &Self, w: u32) -> Option<Exponent> {
        let (a, b) = match align(self, other) {
            Ok(p) => p,
            Err(_) => return Some(Vec::new()),
        };
        let mut keys: Vec<&Exponent> = a.terms.keys().chain(b.terms.keys()).collect();
        keys.sort_by(|x, y| grlex_cmp(&a.vars, x, y));
        keys.dedup();
        keys.into_iter()
            .filter(|e| a.weight(e) <= w)
            .find(|e| a.coeff(e) != b.coeff(e))
            .cloned()
    }

    pub fn map_coeffs<D: Coeff>(&self, mut f: impl FnMut(&C) -> D) -> Series<D> {
        let mut out = Series::zero(&self.vars, self.trunc);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &f(c));
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        self.map_coeffs(|c| c.scale(r))
    }

    pub fn mul_coeff(&self, k: &C) -> Self {
        self.map_coeffs(|c| c.mul_ref(k))
    }

    /// Same terms over a positionally matching list of variables (new names,
    /// equal weights).
    pub fn renamed(&self, target: &Vars) -> Result<Self> {
        if target.len() != self.vars.len() {
            return Err(AlgebraError::Precondition("rename needs the same number of variables".into()));
        }
        for (a, b) in self.vars.iter().zip(target.iter()) {
            if a.weight != b.weight {
                return Err(AlgebraError::WeightMismatch { name: b.name.clone(), left: a.weight, right: b.weight });
            }
        }
        let mut s = self.clone();
        s.vars = target.clone();
        Ok(s)
    }

    /// Expresses the series over a variable list containing all of its own variables.
    pub fn reindexed(&self, target: &Vars) -> Result<Self> {
        if Arc::ptr_eq(&self.vars, target) || *self.vars == **target {
            let mut s = self.clone();
            s.vars = target.clone();
            return Ok(s);
        }
        let mut pos = Vec::with_capacity(self.vars.len());
        for v in self.vars.iter() {
            match target.iter().position(|t| t.name == v.name) {
                Some(p) if target[p].weight == v.weight => pos.push(p),
                Some(p) => {
                    return Err(AlgebraError::WeightMismatch {
                        name: v.name.clone(),
                        left: v.weight,
                        right: target[p].weight,
                    })
                }
                None => {
                    return Err(AlgebraError::Precondition(format!(
                        "variable `{}` missing from target",
                        v.name
                    )))
                }
            }
        }
        let mut out = Series::zero(target, self.trunc);
        for (e, c) in &self.terms {
            let mut ne = vec![0; target.len()];
            for (i, &p) in pos.iter().enumerate() {
                ne[p] = e[i];
            }
            out.add_term(ne, c);
        }
        Ok(out)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let (a, b) = align(self, other)?;
        let mut out = a.into_owned();
        out.trunc = out.trunc.min(b.trunc);
        out.terms.retain(|e, _| weight_of(&b.vars, e) <= b.trunc);
        for (e, c) in &b.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = align(self, other)?;
        let trunc = a.trunc.min(b.trunc);
        Ok(mul_aligned(&a, &b, trunc))
    }

    /// Product computed only through weight `w` (and the operands' precision).
    pub fn mul_truncated(&self, other: &Self, w: u32) -> Result<Self> {
        let (a, b) = align(self, other)?;
        let trunc = a.trunc.min(b.trunc).min(w);
        Ok(mul_aligned(&a, &b, trunc))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Series::one(&self.vars, self.trunc);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let w = self.vars[i].weight;
        let mut out = Series::zero(&self.vars, self.trunc.saturating_sub(w));
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut ne = e.clone();
                ne[i] -= 1;
                out.add_term(ne, &c.scale(&q(e[i] as i64)));
            }
        }
        out
    }

    /// Permutes variables: variable `i` of the result carries the exponent of
    /// variable `perm[i]` of `self`. Variables must share a weight.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.vars.len());
        let mut out = Series::zero(&self.vars, self.trunc);
        for (e, c) in &self.terms {
            let ne: Exponent = perm.iter().map(|&p| e[p]).collect();
            out.add_term(ne, c);
        }
        out
    }

    /// Substitutes `inners[i]` for variable `i`. All inner series must share
    /// their variables; none may have a constant term, and the valuation of
    /// each nonzero inner must be at least the weight of the variable it replaces.
    pub fn compose(&self, inners: &[Series<C>]) -> Result<Series<C>> {
        if inners.len() != self.vars.len() {
            return Err(AlgebraError::Precondition(format!(
                "compose expects {} inner series, got {}",
                self.vars.len(),
                inners.len()
            )));
        }
        let target = common_vars(inners.iter())?;
        let mut aligned = Vec::with_capacity(inners.len());
        let mut trunc = self.trunc;
        for (i, s) in inners.iter().enumerate() {
            let s = s.reindexed(&target)?;
            if !s.constant_term().is_zero_value() {
                return Err(AlgebraError::NonzeroConstant);
            }
            if let Some(v) = s.valuation() {
                if v < self.vars[i].weight {
                    return Err(AlgebraError::LowValuation {
                        name: self.vars[i].name.clone(),
                        valuation: v,
                        weight: self.vars[i].weight,
                    });
                }
            }
            trunc = trunc.min(s.trunc);
            aligned.push(s.truncate(trunc));
        }
        let aligned: Vec<Series<C>> = aligned.into_iter().map(|s| s.truncate(trunc)).collect();
        let mut powers: Vec<Vec<Series<C>>> = aligned
            .iter()
            .map(|s| vec![Series::one(&target, trunc), s.clone()])
            .collect();
        let mut out = Series::zero(&target, trunc);
        for (e, c) in &self.terms {
            if self.weight(e) > trunc {
                continue;
            }
            let mut prod = Series::constant(&target, trunc, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = &powers[i][powers[i].len() - 1] * &aligned[i];
                    powers[i].push(next);
                }
                prod = &prod * &powers[i][k as usize];
                if prod.is_zero() {
                    break;
                }
            }
            for (pe, pc) in prod.terms {
                out.add_term(pe, &pc);
            }
        }
        Ok(out)
    }

    /// Univariate substitution `outer(inner)`.
    pub fn substitute(&self, inner: &Series<C>) -> Result<Series<C>> {
        self.require_univariate()?;
        self.compose(std::slice::from_ref(inner))
    }

    fn require_univariate(&self) -> Result<()> {
        if self.vars.len() != 1 {
            return Err(AlgebraError::NotUnivariate(self.vars.len()));
        }
        Ok(())
    }

    /// Compositional inverse of `t + …` in one variable.
    pub fn revert(&self) -> Result<Series<C>> {
        self.require_univariate()?;
        if !self.constant_term().is_zero_value() || self.coeff(&[1]) != C::one_value() {
            return Err(AlgebraError::NotReversible);
        }
        let w = self.vars[0].weight;
        let t = Series::var(&self.vars, self.trunc, 0);
        let mut r = t.clone();
        for n in 2..=(self.trunc / w) {
            let err = self.substitute(&r)?;
            let c = err.coeff(&[n]);
            if !c.is_zero_value() {
                r.add_term(vec![n], &c.neg());
            }
        }
        Ok(r)
    }

    /// `n`-th root of a series with constant term 1, by the binomial series.
    pub fn nth_root(&self, n: u32) -> Result<Series<C>> {
        if n == 0 {
            return Err(AlgebraError::Precondition("root index must be positive".into()));
        }
        match self.constant_term().as_rational() {
            Some(c) if c.is_one() => {}
            _ => {
                return Err(AlgebraError::BadConstantTerm(format!(
                    "{:?}",
                    self.constant_term()
                )))
            }
        }
        let exponent = Rational::new(1.into(), n.into());
        self.binomial_power(&exponent)
    }

    /// `(1 + h)^r` for rational `r`, requiring constant term 1.
    pub fn binomial_power(&self, r: &Rational) -> Result<Series<C>> {
        let one = Series::one(&self.vars, self.trunc);
        let h = self.checked_sub(&one)?;
        if !h.constant_term().is_zero_value() {
            return Err(AlgebraError::BadConstantTerm(format!("{:?}", self.constant_term())));
        }
        let mut out = one.clone();
        let mut hp = one;
        for k in 1..=self.trunc {
            hp = &hp * &h;
            if hp.is_zero() {
                break;
            }
            out = out.checked_add(&hp.scale(&binomial(r, k)))?;
        }
        Ok(out)
    }

    /// Multiplicative inverse of a series whose constant term is a nonzero rational.
    pub fn inverse(&self) -> Result<Series<C>> {
        let c = match self.constant_term().as_rational() {
            Some(c) if !c.is_zero() => c,
            _ => return Err(AlgebraError::NotInvertible),
        };
        let inv_c = c.recip();
        let normalized = self.scale(&inv_c);
        let one = Series::one(&self.vars, self.trunc);
        let h = normalized.checked_sub(&one)?;
        let mut out = one.clone();
        let mut hp = one;
        for k in 1..=self.trunc {
            hp = &hp * &h;
            if hp.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { -Rational::one() } else { Rational::one() };
            out = out.checked_add(&hp.scale(&sign))?;
        }
        Ok(out.scale(&inv_c))
    }

    /// Exact quotient `self / divisor`. The lowest homogeneous form of the
    /// divisor must have a rational leading coefficient (in lexicographic
    /// order); any remainder is reported as an error. The quotient is known
    /// through `min(truncations) - valuation(divisor)`.
    pub fn exact_div(&self, divisor: &Series<C>) -> Result<Series<C>> {
        let (num, den) = align(self, divisor)?;
        let v = den.valuation().ok_or(AlgebraError::DivisionByZero)?;
        let base_trunc = num.trunc.min(den.trunc);
        if base_trunc < v {
            return Err(AlgebraError::Precondition(
                "divisor valuation exceeds known precision".into(),
            ));
        }
        let qtrunc = base_trunc - v;
        let lead_form = den.homogeneous(v);
        let (lead_exp, lead_c) = lead_form.terms.iter().next_back().unwrap();
        let lead_c = lead_c.as_rational().ok_or(AlgebraError::NotInvertible)?;
        let lead_inv = lead_c.recip();
        let vars = num.vars.clone();
        let mut quotient = Series::zero(&vars, qtrunc);
        let mut residual = num.truncate(base_trunc);
        let den_full = den.truncate(base_trunc);
        for d in 0..=qtrunc {
            let mut r = residual.homogeneous(d + v);
            r.trunc = base_trunc;
            let mut qd = Series::zero(&vars, qtrunc);
            while let Some((e, c)) = r.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
                if e.iter().zip(lead_exp.iter()).any(|(a, b)| a < b) {
                    return Err(AlgebraError::NotDivisible { weight: d + v });
                }
                let qe: Exponent = e.iter().zip(lead_exp.iter()).map(|(a, b)| a - b).collect();
                let qc = c.scale(&lead_inv);
                for (le, lc) in &lead_form.terms {
                    r.add_term(add_exp(&qe, le), &lc.mul_ref(&qc).neg());
                }
                qd.add_term(qe, &qc);
            }
            if qd.is_zero() {
                continue;
            }
            let mut qd_full = qd.clone();
            qd_full.trunc = base_trunc;
            let sub = mul_aligned(&qd_full, &den_full, base_trunc);
            residual = residual.checked_sub(&sub)?;
            for (e, c) in qd.terms {
                quotient.add_term(e, &c);
            }
        }
        let rest = residual.truncate(base_trunc);
        if let Some(w) = rest.valuation() {
            if w <= base_trunc && w < v + qtrunc + 1 {
                return Err(AlgebraError::NotDivisible { weight: w });
            }
        }
        Ok(quotient)
    }

    /// Distinct denominators over all coefficients.
    pub fn denominators(&self) -> Vec<num_bigint::BigInt> {
        let mut d: Vec<_> = self.terms.values().flat_map(|c| c.denominators()).collect();
        d.sort();
        d.dedup();
        d
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integral())
    }
}

fn mul_aligned<C: Coeff>(a: &Series<C>, b: &Series<C>, trunc: u32) -> Series<C> {
    let mut bt: Vec<(u32, &Exponent, &C)> =
        b.terms.iter().map(|(e, c)| (b.weight(e), e, c)).collect();
    bt.sort_by_key(|t| t.0);
    let mut out = Series::zero(&a.vars, trunc);
    for (ea, ca) in &a.terms {
        let wa = a.weight(ea);
        if wa > trunc {
            continue;
        }
        for &(wb, eb, cb) in &bt {
            if wa + wb > trunc {
                break;
            }
            out.add_term(add_exp(ea, eb), &ca.mul_ref(cb));
        }
    }
    out
}

/// Union of the variable lists (first-seen order), checking weights agree.
fn common_vars<'a, C: Coeff + 'a>(it: impl Iterator<Item = &'a Series<C>>) -> Result<Vars> {
    let mut out: Option<Vars> = None;
    for s in it {
        out = Some(match out {
            None => s.vars.clone(),
            Some(acc) if Arc::ptr_eq(&acc, &s.vars) || *acc == *s.vars => acc,
            Some(acc) => {
                let mut merged = (*acc).clone();
                for v in s.vars.iter() {
                    match merged.iter().find(|m| m.name == v.name) {
                        Some(m) if m.weight != v.weight => {
                            return Err(AlgebraError::WeightMismatch {
                                name: v.name.clone(),
                                left: m.weight,
                                right: v.weight,
                            })
                        }
                        Some(_) => {}
                        None => merged.push(v.clone()),
                    }
                }
                Arc::new(merged)
            }
        });
    }
    Ok(out.unwrap_or_else(|| Arc::new(Vec::new())))
}

fn align<'a, C: Coeff>(a: &'a Series<C>, b: &'a Series<C>) -> Result<(Cow<'a, Series<C>>, Cow<'a, Series<C>>)> {
    if Arc::ptr_eq(&a.vars, &b.vars) || *a.vars == *b.vars {
        return Ok((Cow::Borrowed(a), Cow::Borrowed(b)));
    }
    let target = common_vars([a, b].into_iter())?;
    Ok((Cow::Owned(a.reindexed(&target)?), Cow::Owned(b.reindexed(&target)?)))
}

impl<C: Coeff> std::ops::Add for &Series<C> {
    type Output = Series<C>;
    fn add(self, rhs: &Series<C>) -> Series<C> {
        self.checked_add(rhs).expect("incompatible series operands")
    }
}

impl<C: Coeff> std::ops::Sub for &Series<C> {
    type Output = Series<C>;
    fn sub(self, rhs: &Series<C>) -> Series<C> {
        self.checked_sub(rhs).expect("incompatible series operands")
    }
}

impl<C: Coeff> std::ops::Mul for &Series<C> {
    type Output = Series<C>;
    fn mul(self, rhs: &Series<C>) -> Series<C> {
        self.checked_mul(rhs).expect("incompatible series operands")
    }
}

impl<C: Coeff> std::ops::Neg for &Series<C> {
    type Output = Series<C>;
    fn neg(self) -> Series<C> {
        Series::neg(self)
    }
}

impl<C: Coeff + fmt::Display> Series<C> {
    fn write_terms(&self, f: &mut impl fmt::Write) -> fmt::Result {
        let terms = self.sorted_terms();
        if terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (e, c)) in terms.into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (k, v) in e.iter().zip(self.vars.iter()) {
                match k {
                    0 => {}
                    1 => write!(f, "{}", v.name)?,
                    _ => write!(f, "{}^{}", v.name, k)?,
                }
            }
        }
        Ok(())
    }

    /// The stored terms without the truncation marker.
    pub fn polynomial_string(&self) -> String {
        let mut out = String::new();
        self.write_terms(&mut out).expect("writing to a String");
        out
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_terms(f)?;
        write!(f, " + O(w>{})", self.trunc)
    }
}

impl<C: Coeff> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Series")
            .field("vars", &self.vars.iter().map(|v| (&v.name, v.weight)).collect::<Vec<_>>())
            .field("trunc", &self.trunc)
            .field("terms", &self.sorted_terms())
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub variables: Vec<Variable>,
    pub truncation: u32,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub num: String,
    pub den: String,
}

impl Series<Rational> {
    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            variables: (*self.vars).clone(),
            truncation: self.trunc,
            terms: self
                .sorted_terms()
                .into_iter()
                .map(|(e, c)| TermJson {
                    exp: e.clone(),
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Self> {
        if j.variables.iter().any(|v| v.weight == 0) {
            return Err(AlgebraError::Parse("variable weights must be positive".into()));
        }
        let vars: Vars = Arc::new(j.variables.clone());
        let mut s = Series::zero(&vars, j.truncation);
        for t in &j.terms {
            if t.exp.len() != vars.len() {
                return Err(AlgebraError::Parse("exponent length mismatch".into()));
            }
            s.add_term(t.exp.clone(), &parse_rational(&t.num, &t.den)?);
        }
        Ok(s)
    }
}

impl<C: Coeff> Series<C> {
    /// Lifts a rational series into another coefficient ring.
    pub fn from_rational_series(s: &Series<Rational>) -> Self {
        s.map_coeffs(|c| C::from_rational(c.clone()))
    }
}
