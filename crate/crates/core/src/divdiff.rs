//! Divided difference operators: linear `∂` with
//! `∂(xy) = ∂x·y + x·∂y − α·∂x·∂y`, the companion `π = 1 − α∂`, the
//! predicates relating them, and a catalogue of concrete operators.
//!
//! Every predicate is decided on a finite test set: the monomials of the
//! carrier up to its check weight. Products of test monomials are only
//! formed when their combined weight stays within the check weight.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use parking_lot::RwLock;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::coeff::Coeff;
use crate::dual::DualElement;
use crate::error::{AlgebraError, Result};
use crate::fgl::FormalGroup;
use crate::hopf::SElement;
use crate::lattice::LambdaLattice;
use crate::linalg::{nullspace, QMatrix};
use crate::milnor::{r_star, MultiplicativeOp};
use crate::multiindex::{partitions, MultiIndex};
use crate::rational::{binomial, is_power_supported, Rational};
use crate::series::{vars, Exponent, Series, Vars};

/// Carrier elements: series with `S*⊗Q` coefficients. Rational carriers
/// simply use constant coefficients.
pub type Elem = Series<DualElement>;

pub type LinearMap = Arc<dyn Fn(&Elem) -> Result<Elem> + Send + Sync>;

/// Degrees kept above the check weight. Division by a series `α` of
/// valuation `v` costs `v` degrees of precision.
const MARGIN: u32 = 4;

/// A ring `K[x_1..x_k]` or `S*⊗Q[[x_1..x_k]]` with a truncation and a
/// test set of monomials.
#[derive(Clone, Debug)]
pub struct Carrier {
    vars: Vars,
    truncation: u32,
    check_weight: u32,
    dual_monomials: bool,
}

/// A test monomial together with its weight (geometric degree plus the
/// weight of its `s*`-part).
#[derive(Clone, Debug)]
pub struct TestMonomial {
    pub weight: u32,
    pub elem: Elem,
}

fn exponents(k: usize, d: u32) -> Vec<Exponent> {
    if k == 0 {
        return if d == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in exponents(k - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl Carrier {
    /// Polynomials in the named variables; test monomials are the
    /// geometric monomials of degree at most `check_weight`.
    pub fn polynomial(names: &[&str], check_weight: u32) -> Self {
        Carrier { vars: vars(names), truncation: check_weight + MARGIN, check_weight, dual_monomials: false }
    }

    /// Series with `S*⊗Q` coefficients; test monomials also carry
    /// `s*`-monomials.
    pub fn milnor(names: &[&str], check_weight: u32) -> Self {
        Carrier { vars: vars(names), truncation: check_weight + MARGIN, check_weight, dual_monomials: true }
    }

    pub fn with_truncation(mut self, truncation: u32) -> Self {
        self.truncation = truncation.max(self.check_weight);
        self
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn check_weight(&self) -> u32 {
        self.check_weight
    }

    pub fn has_dual_monomials(&self) -> bool {
        self.dual_monomials
    }

    pub fn var(&self, i: usize) -> Elem {
        Series::var(&self.vars, self.truncation, i)
    }

    pub fn constant(&self, c: DualElement) -> Elem {
        Series::constant(&self.vars, self.truncation, c)
    }

    pub fn rational(&self, r: Rational) -> Elem {
        self.constant(DualElement::constant(r))
    }

    pub fn one(&self) -> Elem {
        Series::one(&self.vars, self.truncation)
    }

    pub fn zero(&self) -> Elem {
        Series::zero(&self.vars, self.truncation)
    }

    /// Monomials of weight `≤ check_weight`, in graded order.
    pub fn test_set(&self) -> Vec<TestMonomial> {
        let mut out = Vec::new();
        for w in 0..=self.check_weight {
            for d in (0..=w).rev() {
                let coeffs = if self.dual_monomials {
                    partitions(w - d)
                } else if d == w {
                    vec![MultiIndex::empty()]
                } else {
                    Vec::new()
                };
                for e in exponents(self.vars.len(), d) {
                    for m in &coeffs {
                        let c = DualElement::monomial(m.clone(), Rational::one());
                        out.push(TestMonomial {
                            weight: w,
                            elem: Series::monomial(&self.vars, self.truncation, e.clone(), c),
                        });
                    }
                }
            }
        }
        out
    }

    /// Index pairs `(i, j)` of test monomials with combined weight
    /// `≤ check_weight`.
    fn pairs(&self, set: &[TestMonomial]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, a) in set.iter().enumerate() {
            for (j, b) in set.iter().enumerate() {
                if a.weight + b.weight <= self.check_weight {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn same_ring(&self, other: &Carrier) -> bool {
        self.vars == other.vars && self.dual_monomials == other.dual_monomials
    }
}

/// Equality through the common precision of both sides.
pub fn agree(a: &Elem, b: &Elem) -> bool {
    let t = a.truncation().min(b.truncation());
    a.eq_through(b, t)
}

fn is_scalar(e: &Elem) -> bool {
    e.terms().keys().all(|exp| exp.iter().all(|&k| k == 0))
}

/// `num / α`, exact. Scalar `α ∈ S*` divides coefficientwise; otherwise
/// series division, which needs a rational leading coefficient.
pub fn divide(num: &Elem, alpha: &Elem) -> Result<Elem> {
    if is_scalar(alpha) {
        let a = alpha.constant_term();
        if a.is_zero_value() {
            return Err(AlgebraError::DivisionByZero);
        }
        if let Some(r) = a.as_rational() {
            return Ok(num.scale(&r.recip()));
        }
        let mut out = Series::zero(num.vars(), num.truncation());
        for (e, c) in num.terms() {
            out.add_term(e.clone(), &c.exact_div(&a)?);
        }
        return Ok(out);
    }
    num.exact_div(alpha)
}

/// Extra identities a constructor advertises for its operator.
#[derive(Clone, Debug)]
pub enum Law {
    /// `∂(α) = 1`.
    Division,
    /// `∂² = 0`.
    SquareZero,
    /// `∂² = γ∂` for the given `γ`.
    SquareGamma(Elem),
    /// `π² = 1`.
    Involution,
    /// `π² = π`.
    Projector,
}

/// A divided difference operator on a carrier, with its element `α`.
/// `π = 1 − α∂` is always derived from `∂`.
#[derive(Clone)]
pub struct DividedDifferenceOp {
    constructor: String,
    params: Value,
    carrier: Carrier,
    alpha: Elem,
    partial: LinearMap,
    localization: Option<BigInt>,
    laws: Vec<Law>,
}

impl fmt::Debug for DividedDifferenceOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DividedDifferenceOp")
            .field("constructor", &self.constructor)
            .field("params", &self.params)
            .field("alpha", &self.alpha)
            .finish()
    }
}

impl DividedDifferenceOp {
    /// Wraps a linear map. `α` must be nonzero and without a constant
    /// rational part (so it is not invertible).
    pub fn from_partial(
        constructor: impl Into<String>,
        params: Value,
        carrier: Carrier,
        alpha: Elem,
        partial: LinearMap,
    ) -> Result<Self> {
        let alpha = alpha.truncate(carrier.truncation);
        if alpha.is_zero() {
            return Err(AlgebraError::Precondition("α must be nonzero".into()));
        }
        if !alpha.constant_term().coeff(&MultiIndex::empty()).is_zero() {
            return Err(AlgebraError::Precondition("α must not be invertible".into()));
        }
        Ok(DividedDifferenceOp {
            constructor: constructor.into(),
            params,
            carrier,
            alpha,
            partial,
            localization: None,
            laws: Vec::new(),
        })
    }

    /// The operator `∂ = (1 − π)/α` of a given `π`.
    pub fn from_projector(
        constructor: impl Into<String>,
        params: Value,
        carrier: Carrier,
        alpha: Elem,
        pi: LinearMap,
    ) -> Result<Self> {
        let a = alpha.truncate(carrier.truncation);
        let partial: LinearMap = Arc::new(move |e: &Elem| {
            let moved = pi(e)?;
            divide(&(e - &moved), &a)
        });
        Self::from_partial(constructor, params, carrier, alpha, partial)
    }

    pub fn with_laws(mut self, laws: Vec<Law>) -> Self {
        self.laws = laws;
        self
    }

    /// Denominators of `∂` on the test set must be supported on the primes
    /// of `m`.
    pub fn with_localization(mut self, m: BigInt) -> Self {
        self.localization = Some(m);
        self
    }

    pub fn constructor(&self) -> &str {
        &self.constructor
    }

    pub fn params(&self) -> &Value {
        &self.params
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn alpha(&self) -> &Elem {
        &self.alpha
    }

    pub fn laws(&self) -> &[Law] {
        &self.laws
    }

    pub fn localization(&self) -> Option<&BigInt> {
        self.localization.as_ref()
    }

    pub fn partial(&self, e: &Elem) -> Result<Elem> {
        (self.partial)(e)
    }

    pub fn partial_map(&self) -> LinearMap {
        self.partial.clone()
    }

    /// `π(e) = e − α·∂(e)`.
    pub fn pi(&self, e: &Elem) -> Result<Elem> {
        let d = self.partial(e)?;
        Ok(e - &(&self.alpha * &d))
    }

    pub fn pi_map(&self) -> LinearMap {
        let op = self.clone();
        Arc::new(move |e: &Elem| op.pi(e))
    }

    fn values(&self, f: impl Fn(&Elem) -> Result<Elem> + Sync) -> Result<(Vec<TestMonomial>, Vec<Elem>)> {
        let set = self.carrier.test_set();
        let vals = set.par_iter().map(|m| f(&m.elem)).collect::<Result<Vec<_>>>()?;
        Ok((set, vals))
    }
}

fn all_ok(results: Vec<Result<bool>>) -> Result<bool> {
    let mut pass = true;
    for r in results {
        pass &= r?;
    }
    Ok(pass)
}

/// The defining identity on all test pairs, plus `∂(1) = 0`.
pub fn check_divdiff(op: &DividedDifferenceOp) -> Result<bool> {
    if !op.partial(&op.carrier.one())?.is_zero() {
        return Ok(false);
    }
    let (set, d) = op.values(|e| op.partial(e))?;
    let pairs = op.carrier.pairs(&set);
    all_ok(
        pairs
            .par_iter()
            .map(|&(i, j)| {
                let (a, b) = (&set[i].elem, &set[j].elem);
                let lhs = op.partial(&(a * b))?;
                let rhs = &(&(&d[i] * b) + &(a * &d[j])) - &(&op.alpha * &(&d[i] * &d[j]));
                Ok(agree(&lhs, &rhs))
            })
            .collect(),
    )
}

/// `∂` vanishes on the whole test set.
pub fn is_trivial(op: &DividedDifferenceOp) -> Result<bool> {
    let (_, d) = op.values(|e| op.partial(e))?;
    Ok(d.iter().all(Series::is_zero))
}

/// `π(1) = 1` and `π(ab) = π(a)π(b)` on all test pairs.
pub fn pi_multiplicativity(op: &DividedDifferenceOp) -> Result<bool> {
    if !agree(&op.pi(&op.carrier.one())?, &op.carrier.one()) {
        return Ok(false);
    }
    let (set, p) = op.values(|e| op.pi(e))?;
    let pairs = op.carrier.pairs(&set);
    all_ok(
        pairs
            .par_iter()
            .map(|&(i, j)| {
                let prod = &set[i].elem * &set[j].elem;
                Ok(agree(&op.pi(&prod)?, &(&p[i] * &p[j])))
            })
            .collect(),
    )
}

/// `∂(α) = 1`, cross-checked against `∂(α·m) = m` on the test set.
pub fn is_division(op: &DividedDifferenceOp) -> Result<bool> {
    let direct = agree(&op.partial(&op.alpha)?, &op.carrier.one());
    let (set, d) = op.values(|e| op.partial(&(&op.alpha * e)))?;
    let on_set = set.iter().zip(&d).all(|(m, v)| agree(v, &m.elem));
    if direct != on_set {
        return Err(AlgebraError::Inconsistent(format!(
            "∂(α) = 1 is {direct} but ∂(α·m) = m on the test set is {on_set}"
        )));
    }
    Ok(direct)
}

/// Checks `∂(∂(m)) = γ·∂(m)` on the test set.
pub fn square_is_gamma(op: &DividedDifferenceOp, gamma: &Elem) -> Result<bool> {
    let (_, d) = op.values(|e| op.partial(e))?;
    all_ok(d.par_iter().map(|v| Ok(agree(&op.partial(v)?, &(gamma * v)))).collect())
}

/// Outcome of the predicates that hold when `∂² = γ∂`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaReport {
    /// `(1 − αγ)∂(α) = 2 − αγ`.
    pub partial_alpha: bool,
    /// `π² = 1` on the test set.
    pub involution: bool,
    /// `π(α)(1 − αγ) = −α`.
    pub pi_alpha: bool,
}

impl GammaReport {
    pub fn all(&self) -> bool {
        self.partial_alpha && self.involution && self.pi_alpha
    }
}

/// The identities implied by `∂² = γ∂`; an error when that hypothesis
/// fails on the test set.
pub fn gamma_predicates(op: &DividedDifferenceOp, gamma: &Elem) -> Result<GammaReport> {
    if !square_is_gamma(op, gamma)? {
        return Err(AlgebraError::Precondition(format!(
            "∂² ≠ γ∂ on monomials of weight ≤ {}",
            op.carrier.check_weight
        )));
    }
    let one = op.carrier.one();
    let a = &op.alpha;
    let one_minus = &one - &(a * gamma);
    let two_minus = &one_minus + &one;
    let partial_alpha = agree(&(&one_minus * &op.partial(a)?), &two_minus);
    let pi_alpha = agree(&(&op.pi(a)? * &one_minus), &a.neg());
    Ok(GammaReport { partial_alpha, involution: involution(op)?, pi_alpha })
}

/// `π² = 1` on the test set.
pub fn involution(op: &DividedDifferenceOp) -> Result<bool> {
    let (set, p) = op.values(|e| op.pi(&op.pi(e)?))?;
    Ok(set.iter().zip(&p).all(|(m, v)| agree(v, &m.elem)))
}

/// `π² = π` on the test set.
pub fn projector(op: &DividedDifferenceOp) -> Result<bool> {
    let (_, p) = op.values(|e| op.pi(e))?;
    all_ok(p.par_iter().map(|v| Ok(agree(&op.pi(v)?, v))).collect())
}

/// `γ = ∂²(x)/∂(x)` for the first carrier variable.
pub fn gamma_from_square(op: &DividedDifferenceOp) -> Result<Elem> {
    let d1 = op.partial(&op.carrier.var(0))?;
    let d2 = op.partial(&d1)?;
    divide(&d2, &d1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReport {
    /// Dimension of `ker π` on the span of the test set.
    pub kernel_dimension: usize,
    pub division: bool,
    pub projector: bool,
    /// The three properties agree.
    pub consistent: bool,
    pub check_weight: u32,
}

/// `ker π ≠ 0` versus `∂(α) = 1` versus `π² = π`, with the kernel computed
/// by exact linear algebra on the span of the test monomials.
pub fn kernel_division_equivalence(op: &DividedDifferenceOp) -> Result<KernelReport> {
    let (_, images) = op.values(|e| op.pi(e))?;
    let precision = images.iter().map(Series::truncation).min().unwrap_or(0);
    let mut rows: BTreeMap<(Exponent, MultiIndex), Vec<Rational>> = BTreeMap::new();
    let cols = images.len();
    for (j, img) in images.iter().enumerate() {
        for (e, c) in img.truncate(precision).terms() {
            for (m, r) in c.terms() {
                rows.entry((e.clone(), m.clone())).or_insert_with(|| vec![Rational::zero(); cols])[j] = r.clone();
            }
        }
    }
    let matrix: QMatrix = rows.into_values().collect();
    let kernel_dimension = if matrix.is_empty() { cols } else { nullspace(&matrix, cols).len() };
    let division = is_division(op)?;
    let projector = projector(op)?;
    Ok(KernelReport {
        kernel_dimension,
        division,
        projector,
        consistent: (kernel_dimension > 0) == division && division == projector,
        check_weight: op.carrier.check_weight,
    })
}

/// The operator induced by `π_1∘π_2` together with its certificate
/// `α·∂(m) = m − π_1(π_2(m))` on the test set.
#[derive(Clone, Debug)]
pub struct Composition {
    pub op: DividedDifferenceOp,
    pub certificate: bool,
}

/// `∂ = ∂_1 + ∂_2 − ∂_1(α∂_2)`, whose companion is `π_1π_2`.
pub fn compose_divdiff(op1: &DividedDifferenceOp, op2: &DividedDifferenceOp) -> Result<Composition> {
    if !op1.carrier.same_ring(&op2.carrier) {
        return Err(AlgebraError::Precondition("operators live on different carriers".into()));
    }
    if !agree(&op1.alpha, &op2.alpha) {
        return Err(AlgebraError::Precondition(format!(
            "α mismatch: {} vs {}",
            op1.alpha, op2.alpha
        )));
    }
    let alpha = op1.alpha.clone();
    let (d1, d2) = (op1.partial.clone(), op2.partial.clone());
    let a = alpha.clone();
    let partial: LinearMap = Arc::new(move |e: &Elem| {
        let q2 = d2(e)?;
        let inner = d1(&(&a * &q2))?;
        Ok(&(&d1(e)? + &q2) - &inner)
    });
    let op = DividedDifferenceOp::from_partial(
        "composite",
        json!({ "left": op1.constructor, "right": op2.constructor }),
        op1.carrier.clone(),
        alpha,
        partial,
    )?;
    let (set, lhs) = op.values(|e| Ok(&op.alpha * &op.partial(e)?))?;
    let certificate = all_ok(
        set.par_iter()
            .zip(&lhs)
            .map(|(m, l)| {
                let moved = op1.pi(&op2.pi(&m.elem)?)?;
                Ok(agree(l, &(&m.elem - &moved)))
            })
            .collect(),
    )?;
    Ok(Composition { op, certificate })
}

/// The twisted Leibniz rule `δ(ab) = φ(a)δ(b) + δ(a)b` on all test pairs.
pub fn ore_check(
    carrier: &Carrier,
    delta: &(dyn Fn(&Elem) -> Result<Elem> + Sync),
    phi: &(dyn Fn(&Elem) -> Result<Elem> + Sync),
) -> Result<bool> {
    let set = carrier.test_set();
    let d = set.par_iter().map(|m| delta(&m.elem)).collect::<Result<Vec<_>>>()?;
    let p = set.par_iter().map(|m| phi(&m.elem)).collect::<Result<Vec<_>>>()?;
    let pairs = carrier.pairs(&set);
    all_ok(
        pairs
            .par_iter()
            .map(|&(i, j)| {
                let lhs = delta(&(&set[i].elem * &set[j].elem))?;
                let rhs = &(&p[i] * &d[j]) + &(&d[i] * &set[j].elem);
                Ok(agree(&lhs, &rhs))
            })
            .collect(),
    )
}

/// Distinct denominators of `∂` on the test set.
pub fn localization_denominators(op: &DividedDifferenceOp) -> Result<Vec<BigInt>> {
    let (_, d) = op.values(|e| op.partial(e))?;
    let mut out: Vec<BigInt> = d.iter().flat_map(Series::denominators).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub weight: u32,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorReport {
    pub constructor: String,
    pub params: Value,
    pub checks: Vec<CheckRecord>,
    pub localization_denominators: Vec<String>,
}

impl OperatorReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Runs the defining checks and every advertised law.
pub fn report(op: &DividedDifferenceOp) -> Result<OperatorReport> {
    let w = op.carrier.check_weight;
    let mut checks = Vec::new();
    let mut record = |name: &str, pass: bool| checks.push(CheckRecord { name: name.into(), weight: w, pass });
    let divdiff = check_divdiff(op)?;
    record("divided_difference", divdiff);
    record("pi_multiplicative", pi_multiplicativity(op)? == divdiff && divdiff);
    record("nontrivial", !is_trivial(op)?);
    for law in &op.laws {
        match law {
            Law::Division => record("division", is_division(op)?),
            Law::SquareZero => record("square_zero", square_is_gamma(op, &op.carrier.zero())?),
            Law::SquareGamma(g) => record("square_gamma", square_is_gamma(op, g)?),
            Law::Involution => record("pi_involution", involution(op)?),
            Law::Projector => record("pi_projector", projector(op)?),
        }
    }
    let dens = localization_denominators(op)?;
    if let Some(m) = &op.localization {
        record("localization", dens.iter().all(|d| is_power_supported(d, m)));
    }
    Ok(OperatorReport {
        constructor: op.constructor.clone(),
        params: op.params.clone(),
        checks,
        localization_denominators: dens.iter().map(ToString::to_string).collect(),
    })
}

// ---------------------------------------------------------------------------
// Catalogue

/// `π p(x) = p(x − α(x)ψ(x))`, `∂ = (p − πp)/α`, for `α(0) = 0`.
pub fn translation(
    constructor: &str,
    params: Value,
    carrier: Carrier,
    alpha: Elem,
    psi: Vec<Elem>,
) -> Result<DividedDifferenceOp> {
    if psi.len() != carrier.vars.len() {
        return Err(AlgebraError::Precondition(format!(
            "ψ needs {} components, got {}",
            carrier.vars.len(),
            psi.len()
        )));
    }
    if !alpha.constant_term().is_zero_value() {
        return Err(AlgebraError::Precondition("translation needs α(0) = 0".into()));
    }
    let inners: Vec<Elem> = psi
        .iter()
        .enumerate()
        .map(|(i, p)| &carrier.var(i) - &(&alpha * p))
        .collect();
    let pi: LinearMap = Arc::new(move |e: &Elem| e.compose(&inners));
    DividedDifferenceOp::from_projector(constructor, params, carrier, alpha, pi)
}

/// `∂p = (p(a) − p(0))/a` on `K[a]`: a division operator, `π` evaluation at 0.
pub fn evaluation_op(check_weight: u32) -> Result<DividedDifferenceOp> {
    let c = Carrier::polynomial(&["a"], check_weight);
    let a = c.var(0);
    let one = c.one();
    Ok(translation("evaluation", json!({}), c, a, vec![one])?.with_laws(vec![Law::Division, Law::Projector]))
}

/// `π p(a) = p(a/2)` with `α = a`; `∂(a) = 1/2`.
pub fn shifted_translation_op(check_weight: u32) -> Result<DividedDifferenceOp> {
    let c = Carrier::polynomial(&["a"], check_weight);
    let a = c.var(0);
    let half = c.rational(Rational::new(1.into(), 2.into()));
    translation("shifted_translation", json!({ "psi": "1/2" }), c, a, vec![half])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reflection {
    /// `ψ = ξ/⟨ξ,ξ⟩`: projection onto `ξ^⊥`, a division operator.
    Projection,
    /// `ψ = 2ξ/⟨ξ,ξ⟩`: the reflection, with `π² = 1` and `∂² = 0`.
    Involution,
}

/// The operator of `α = ⟨x, ξ⟩` on `K[x_1..x_k]`, `k = ξ.len()`.
pub fn reflection_op(xi: &[Rational], kind: Reflection, check_weight: u32) -> Result<DividedDifferenceOp> {
    let norm: Rational = xi.iter().map(|c| c * c).sum();
    if norm.is_zero() {
        return Err(AlgebraError::Precondition("⟨ξ,ξ⟩ must be nonzero".into()));
    }
    let names: Vec<String> = (1..=xi.len()).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let c = Carrier::polynomial(&refs, check_weight);
    let mut alpha = c.zero();
    for (i, x) in xi.iter().enumerate() {
        alpha = &alpha + &c.var(i).scale(x);
    }
    let factor = match kind {
        Reflection::Projection => norm.recip(),
        Reflection::Involution => Rational::from_integer(2.into()) / norm,
    };
    let psi = xi.iter().map(|x| c.rational(x * &factor)).collect();
    let params = json!({
        "xi": xi.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "kind": kind,
    });
    let laws = match kind {
        Reflection::Projection => vec![Law::Division, Law::Projector],
        Reflection::Involution => vec![Law::SquareZero, Law::Involution],
    };
    Ok(translation("reflection", params, c, alpha, psi)?.with_laws(laws))
}

/// `(p(x,y) − p(y,x))/α` on a two-variable carrier, for `α` with
/// `α(y,x)` the companion of `α(x,y)` under the swap.
fn swap_op(constructor: &str, params: Value, carrier: Carrier, alpha: Elem) -> Result<DividedDifferenceOp> {
    let pi: LinearMap = Arc::new(|e: &Elem| Ok(e.permute(&[1, 0])));
    DividedDifferenceOp::from_projector(constructor, params, carrier, alpha, pi)
}

/// `∂p = (p(x,y) − p(y,x))/(x − y)`.
pub fn newton_op(check_weight: u32) -> Result<DividedDifferenceOp> {
    let c = Carrier::polynomial(&["x", "y"], check_weight);
    let alpha = &c.var(0) - &c.var(1);
    Ok(swap_op("newton", json!({}), c, alpha)?.with_laws(vec![Law::SquareZero, Law::Involution]))
}

/// `∂p = (p(x,y) − p(y,x))/f(x, ι(y))` for a formal group law `f`.
pub fn fgl_op(group: &FormalGroup, constructor: &str, params: Value, check_weight: u32) -> Result<DividedDifferenceOp> {
    let c = Carrier::polynomial(&["x", "y"], check_weight);
    if group.truncation() < c.truncation {
        return Err(AlgebraError::WeightOutOfRange { requested: c.truncation, available: group.truncation() });
    }
    let alpha = group.difference_kernel()?.renamed(&c.vars)?.truncate(c.truncation);
    swap_op(constructor, params, c, alpha)
}

/// The formal-group operator over `x + y − a·xy`, with `∂² = a∂`.
pub fn multiplicative_fgl_op(a: &DualElement, check_weight: u32) -> Result<DividedDifferenceOp> {
    let group = FormalGroup::multiplicative(a, check_weight + MARGIN);
    let op = fgl_op(&group, "multiplicative_fgl", json!({ "a": a.to_string() }), check_weight)?;
    let gamma = op.carrier.constant(a.clone());
    Ok(op.with_laws(vec![Law::SquareGamma(gamma), Law::Involution]))
}

/// The formal-group operator over the universal law; `γ` is read off from
/// `∂²(x)/∂(x)` and recorded as the advertised law.
pub fn universal_fgl_op(check_weight: u32) -> Result<DividedDifferenceOp> {
    let group = FormalGroup::universal(check_weight + MARGIN)?;
    let op = fgl_op(&group, "universal_fgl", json!({}), check_weight)?;
    let gamma = gamma_from_square(&op)?;
    Ok(op.with_laws(vec![Law::SquareGamma(gamma), Law::Involution]))
}

/// `d/dx` on `K[x]` with `α = x`. Not a divided difference operator.
pub fn derivative_op(check_weight: u32) -> Result<DividedDifferenceOp> {
    let c = Carrier::polynomial(&["x"], check_weight);
    let alpha = c.var(0);
    let partial: LinearMap = Arc::new(|e: &Elem| Ok(e.derivative(0)));
    DividedDifferenceOp::from_partial("derivative", json!({}), c, alpha, partial)
}

/// `∂ = 0`, `π = 1`.
pub fn zero_op(carrier: Carrier, alpha: Elem) -> Result<DividedDifferenceOp> {
    let partial: LinearMap = Arc::new(|e: &Elem| Ok(Series::zero(e.vars(), e.truncation())));
    DividedDifferenceOp::from_partial("zero", json!({}), carrier, alpha, partial)
}

/// A multiplicative operator on Milnor carriers that caches its values on
/// `s*`-monomials and on powers of the variables.
struct CachedMultiplicative {
    op: MultiplicativeOp,
    coefficients: RwLock<HashMap<MultiIndex, DualElement>>,
    /// `(variable, truncation) ↦ [π(x)^0, π(x)^1, …]`.
    powers: RwLock<HashMap<(usize, u32), Vec<Elem>>>,
}

impl CachedMultiplicative {
    fn new(op: MultiplicativeOp) -> Self {
        CachedMultiplicative { op, coefficients: RwLock::new(HashMap::new()), powers: RwLock::new(HashMap::new()) }
    }

    fn on_coefficient(&self, c: &DualElement) -> DualElement {
        let mut out = DualElement::default();
        for (m, r) in c.terms() {
            let cached = self.coefficients.read().get(m).cloned();
            let img = match cached {
                Some(img) => img,
                None => {
                    let img = self.op.apply_dual(&DualElement::monomial(m.clone(), Rational::one()));
                    self.coefficients.write().insert(m.clone(), img.clone());
                    img
                }
            };
            out.add_assign_ref(&img.scale(r));
        }
        out
    }

    fn power(&self, v: &Vars, t: u32, i: usize, k: u32) -> Elem {
        let key = (i, t);
        if let Some(p) = self.powers.read().get(&key).and_then(|row| row.get(k as usize)) {
            return p.clone();
        }
        let mut cache = self.powers.write();
        let row = cache.entry(key).or_insert_with(|| vec![Series::one(v, t)]);
        let image = self.op.on_variable(v, t, i);
        while row.len() <= k as usize {
            let next = &row[row.len() - 1] * &image;
            row.push(next);
        }
        row[k as usize].clone()
    }

    fn apply(&self, e: &Elem) -> Elem {
        let v = e.vars().clone();
        let t = e.truncation();
        let mut out = Series::zero(&v, t);
        for (exp, c) in e.terms() {
            let c = self.on_coefficient(c);
            if c.is_zero_value() {
                continue;
            }
            let mut term = Series::constant(&v, t, c);
            for (i, &k) in exp.iter().enumerate() {
                if k > 0 {
                    term = &term * &self.power(&v, t, i, k);
                }
            }
            out = &out + &term;
        }
        out
    }
}

fn milnor_op(
    constructor: &str,
    params: Value,
    alpha: &DualElement,
    phi: Vec<DualElement>,
    check_weight: u32,
) -> Result<DividedDifferenceOp> {
    let c = Carrier::milnor(&["x"], check_weight);
    let a = c.constant(alpha.clone());
    let cached = Arc::new(CachedMultiplicative::new(MultiplicativeOp::new(phi)));
    let pi: LinearMap = Arc::new(move |e: &Elem| Ok(cached.apply(e)));
    DividedDifferenceOp::from_projector(constructor, params, c, a, pi)
}

/// `r_star(s_(n), α)` as a rational, or an error naming what it is.
fn leading_action(n: u32, alpha: &DualElement) -> Result<Rational> {
    let v = r_star(&SElement::single(n), alpha);
    v.as_rational()
        .ok_or_else(|| AlgebraError::Precondition(format!("s_({n})(α) = {v} is not a rational number")))
}

fn check_homogeneous(name: &str, d: &DualElement, weight: u32) -> Result<()> {
    if d.is_zero_value() {
        return Ok(());
    }
    let w = d.homogeneous_weight()?;
    if w != weight {
        return Err(AlgebraError::WeightMismatch { name: name.into(), left: w, right: weight });
    }
    Ok(())
}

/// The division operator with `∂x = (1/m)x^(n+1) + Σ a_i x^(n+i+1)`, where
/// `m = s_(n)(α)` must be a nonzero rational and `a_i` has weight `i`:
/// `π(x) = x − α∂x`, so `φ_n = −α/m`, `φ_(n+i) = −α·a_i`.
pub fn lemma12_op(n: u32, alpha: &DualElement, a: &[DualElement], check_weight: u32) -> Result<DividedDifferenceOp> {
    if n == 0 {
        return Err(AlgebraError::Precondition("n must be positive".into()));
    }
    check_homogeneous("α", alpha, n)?;
    let m = leading_action(n, alpha)?;
    if m.is_zero() {
        return Err(AlgebraError::Precondition(format!("s_({n})(α) must be nonzero")));
    }
    for (i, ai) in a.iter().enumerate() {
        check_homogeneous(&format!("a_{}", i + 1), ai, i as u32 + 1)?;
    }
    let mut phi = vec![DualElement::default(); n as usize - 1];
    phi.push(alpha.scale(&(-m.recip())));
    phi.extend(a.iter().map(|ai| alpha.mul_ref(ai).neg()));
    let params = json!({
        "n": n,
        "m": m.to_string(),
        "alpha": alpha.to_string(),
        "a": a.iter().map(ToString::to_string).collect::<Vec<_>>(),
    });
    let localization = m.numer().clone();
    Ok(milnor_op("lemma12", params, alpha, phi, check_weight)?
        .with_laws(vec![Law::Division, Law::Projector])
        .with_localization(localization))
}

/// `π(x) = x(1 + αx^n)^(−1/n)`, for `s_(n)(α) = 2n`: `∂² = 0`, `π² = 1`.
pub fn lemma13_op(n: u32, alpha: &DualElement, check_weight: u32) -> Result<DividedDifferenceOp> {
    if n == 0 {
        return Err(AlgebraError::Precondition("n must be positive".into()));
    }
    check_homogeneous("α", alpha, n)?;
    let m = leading_action(n, alpha)?;
    if m != Rational::from_integer((2 * n).into()) {
        return Err(AlgebraError::Precondition(format!("s_({n})(α) = {m}, expected {}", 2 * n)));
    }
    let t = check_weight + MARGIN;
    let exponent = -Rational::new(1.into(), n.into());
    let mut phi = vec![DualElement::default(); t as usize];
    for j in 1..=(t / n) {
        phi[(j * n - 1) as usize] = alpha.pow(j).scale(&binomial(&exponent, j));
    }
    let params = json!({ "n": n, "alpha": alpha.to_string() });
    Ok(milnor_op("lemma13", params, alpha, phi, check_weight)?
        .with_laws(vec![Law::SquareZero, Law::Involution])
        .with_localization(BigInt::from(n)))
}

/// Integer combinations (entries in `-3..=3`) of the lattice basis of `Λ`
/// in weights `1..=count`, drawn from a seeded generator.
pub fn random_lambda_coefficients(seed: u64, count: u32) -> Result<Vec<DualElement>> {
    let lattice = LambdaLattice::new(count)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((1..=count)
        .map(|i| {
            let mut out = DualElement::default();
            for b in lattice.basis(i) {
                let k: i64 = rng.gen_range(-3..=3);
                out.add_assign_ref(&b.scale(&Rational::from_integer(k.into())));
            }
            out
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgl::universal_fgl;
    use crate::rational::{q, qf};

    fn poly(c: &Carrier, terms: &[(&[u32], i64)]) -> Elem {
        let mut s = c.zero();
        for (e, k) in terms {
            s.add_term(e.to_vec(), &DualElement::constant(q(*k)));
        }
        s
    }

    #[test]
    fn newton_examples() {
        let op = newton_op(5).unwrap();
        let c = op.carrier().clone();
        let x2 = poly(&c, &[(&[2, 0], 1)]);
        assert!(agree(&op.partial(&x2).unwrap(), &poly(&c, &[(&[1, 0], 1), (&[0, 1], 1)])));
        assert!(agree(&op.partial(op.alpha()).unwrap(), &c.rational(q(2))));
        assert!(check_divdiff(&op).unwrap());
        assert!(pi_multiplicativity(&op).unwrap());
        assert!(!is_division(&op).unwrap());
        let g = gamma_predicates(&op, &c.zero()).unwrap();
        assert!(g.all());
        let k = kernel_division_equivalence(&op).unwrap();
        assert_eq!(k.kernel_dimension, 0);
        assert!(k.consistent && !k.projector);
        assert!(report(&op).unwrap().passed());
    }

    #[test]
    fn derivative_is_not_a_divided_difference() {
        let op = derivative_op(4).unwrap();
        assert!(!check_divdiff(&op).unwrap());
        assert!(!pi_multiplicativity(&op).unwrap());
        let c = op.carrier().clone();
        let d = op.partial_map();
        assert!(ore_check(&c, &*d, &|e: &Elem| Ok(e.clone())).unwrap());
        assert!(zero_op(c.clone(), c.var(0)).map(|z| is_trivial(&z).unwrap()).unwrap());
    }

    #[test]
    fn evaluation_and_shift() {
        let ev = evaluation_op(6).unwrap();
        assert!(is_division(&ev).unwrap());
        assert!(report(&ev).unwrap().passed());
        let k = kernel_division_equivalence(&ev).unwrap();
        assert_eq!(k.kernel_dimension, 6);
        assert!(k.consistent);
        // ∂²(a) = 0 but ∂²(a²) = 1, so no γ works
        let gamma = gamma_from_square(&ev).unwrap();
        assert!(matches!(gamma_predicates(&ev, &gamma), Err(AlgebraError::Precondition(_))));

        let sh = shifted_translation_op(6).unwrap();
        let c = sh.carrier().clone();
        assert!(agree(&sh.partial(&c.var(0)).unwrap(), &c.rational(qf(1, 2))));
        assert!(check_divdiff(&sh).unwrap());
        assert!(!is_division(&sh).unwrap());
        assert!(kernel_division_equivalence(&sh).unwrap().consistent);
    }

    #[test]
    fn reflections() {
        let p = reflection_op(&[q(1), q(-1)], Reflection::Projection, 4).unwrap();
        assert!(report(&p).unwrap().passed());
        assert!(kernel_division_equivalence(&p).unwrap().consistent);
        let r = reflection_op(&[q(1), q(0)], Reflection::Involution, 4).unwrap();
        let c = r.carrier().clone();
        let x1x2 = poly(&c, &[(&[2, 1], 1)]);
        assert!(agree(&r.pi(&x1x2).unwrap(), &x1x2));
        let x1 = poly(&c, &[(&[1, 0], 1)]);
        assert!(agree(&r.pi(&x1).unwrap(), &x1.neg()));
        assert!(report(&r).unwrap().passed());
        assert!(matches!(
            reflection_op(&[q(0), q(0)], Reflection::Projection, 2),
            Err(AlgebraError::Precondition(_))
        ));
    }

    #[test]
    fn multiplicative_fgl_square() {
        let a = DualElement::generator(1);
        let op = multiplicative_fgl_op(&a, 4).unwrap();
        assert!(report(&op).unwrap().passed());
        let g = op.carrier().constant(a);
        assert!(gamma_predicates(&op, &g).unwrap().all());
    }

    /// `γ = 1/α + 1/ι(α)` as a series in `α`, composed with `α`.
    fn gamma_oracle(op: &DividedDifferenceOp, trunc: u32) -> Elem {
        let group = FormalGroup::universal(trunc).unwrap();
        let iota = group.inverse_series().unwrap();
        let t = Series::var(iota.vars(), trunc, 0);
        let num = &iota + &t;
        let den = &t * &iota;
        let g = num.exact_div(&den).unwrap();
        let mut out = op.carrier().zero();
        let mut power = op.carrier().one();
        for k in 0..=g.truncation() {
            out = &out + &power.mul_coeff(&g.coeff(&[k]));
            power = &power * op.alpha();
        }
        out
    }

    #[test]
    fn universal_fgl_gamma() {
        let op = universal_fgl_op(3).unwrap();
        assert!(report(&op).unwrap().passed());
        let Law::SquareGamma(g) = &op.laws()[0] else { panic!() };
        let oracle = gamma_oracle(&op, op.carrier().truncation());
        assert!(agree(g, &oracle));
        assert!(gamma_predicates(&op, g).unwrap().all());
    }

    #[test]
    fn localized_division_family() {
        let table = universal_fgl(3).unwrap();
        let cases = [
            (1, DualElement::generator(1)),
            (1, table.entry(1, 1)),
            (2, table.entry(1, 2)),
        ];
        for (n, alpha) in cases {
            for seed in 0..3u64 {
                let a = random_lambda_coefficients(seed, 2).unwrap();
                let op = lemma12_op(n, &alpha, &a, 3).unwrap();
                let r = report(&op).unwrap();
                assert!(r.passed(), "{r:?}");
                assert!(agree(&op.pi(op.alpha()).unwrap(), &op.carrier().zero()));
            }
        }
    }

    #[test]
    fn square_zero_involution_family() {
        let table = universal_fgl(2).unwrap();
        let op = lemma13_op(1, &table.entry(1, 1), 4).unwrap();
        let c = op.carrier().clone();
        // π(x) = x(1 + α x)^(-1)
        let x = c.var(0);
        let alpha = op.alpha().clone();
        let expected = (&c.one() + &(&alpha * &x)).inverse().unwrap();
        assert!(agree(&op.pi(&x).unwrap(), &(&x * &expected)));
        assert!(report(&op).unwrap().passed());
        let op2 = lemma13_op(2, &DualElement::generator(2).scale(&q(4)), 3).unwrap();
        assert!(report(&op2).unwrap().passed());
        assert!(lemma13_op(2, &table.entry(1, 2), 3).is_err());
    }

    #[test]
    fn composition() {
        let n = newton_op(3).unwrap();
        let comp = compose_divdiff(&n, &n).unwrap();
        assert!(comp.certificate);
        assert!(is_trivial(&comp.op).unwrap());
        let ev = evaluation_op(4).unwrap();
        let sh = shifted_translation_op(4).unwrap();
        let comp = compose_divdiff(&ev, &sh).unwrap();
        assert!(comp.certificate);
        assert!(check_divdiff(&comp.op).unwrap());
        assert!(compose_divdiff(&ev, &n).is_err());
    }

    #[test]
    fn ore_rules() {
        for op in [newton_op(3).unwrap(), evaluation_op(4).unwrap()] {
            let d = op.partial_map();
            let p = op.pi_map();
            assert!(ore_check(op.carrier(), &*d, &*p).unwrap());
        }
    }
}
