//! Deformed products built from divided difference operators and
//! projector pairs, with exhaustive associativity sweeps over test
//! monomials and certificates for the hypotheses behind each construction.

use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::RwLock;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::coeff::Coeff;
use crate::divdiff::{
    agree, divide, evaluation_op, is_division, lemma12_op, lemma13_op, multiplicative_fgl_op, newton_op,
    random_lambda_coefficients, reflection_op, shifted_translation_op, Carrier, DividedDifferenceOp, Elem, LinearMap,
    Reflection, TestMonomial,
};
use crate::dual::{DualElement, PolyTerm};
use crate::error::{AlgebraError, Result};
use crate::fgl::{log_pair, universal_fgl};
use crate::milnor::{stable_product_eval, PhiSeries, PhiSeriesJson};
use crate::rational::{parse_fraction, Rational};
use crate::series::{Exponent, Series};

pub type Bilinear = Arc<dyn Fn(&Elem, &Elem) -> Result<Elem> + Send + Sync>;

/// A bilinear product on a carrier, with where it came from.
#[derive(Clone)]
pub struct ProductStructure {
    construction: String,
    params: Value,
    carrier: Carrier,
    eval: Bilinear,
}

impl std::fmt::Debug for ProductStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProductStructure")
            .field("construction", &self.construction)
            .field("params", &self.params)
            .finish()
    }
}

impl ProductStructure {
    pub fn new(construction: impl Into<String>, params: Value, carrier: Carrier, eval: Bilinear) -> Self {
        ProductStructure { construction: construction.into(), params, carrier, eval }
    }

    /// The ring's own multiplication.
    pub fn ordinary(carrier: Carrier) -> Self {
        Self::new("ordinary", json!({}), carrier, Arc::new(|x: &Elem, y: &Elem| Ok(x * y)))
    }

    pub fn apply(&self, x: &Elem, y: &Elem) -> Result<Elem> {
        (self.eval)(x, y)
    }

    pub fn construction(&self) -> &str {
        &self.construction
    }

    pub fn params(&self) -> &Value {
        &self.params
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssociativityReport {
    pub associative: bool,
    pub weight: u32,
    pub triples: usize,
    /// The first failing triple in graded order.
    pub witness: Option<[String; 3]>,
}

fn restricted_set(carrier: &Carrier, w: u32) -> Vec<TestMonomial> {
    carrier.test_set().into_iter().filter(|m| m.weight <= w).collect()
}

/// `(x∘y)∘z = x∘(y∘z)` on all test triples of combined weight `≤ w`.
pub fn associativity_check(mu: &ProductStructure, w: u32) -> Result<AssociativityReport> {
    let set = restricted_set(&mu.carrier, w);
    let n = set.len();
    let mut triples = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if set[i].weight + set[j].weight + set[k].weight <= w {
                    triples.push((i, j, k));
                }
            }
        }
    }
    let cache: RwLock<HashMap<(usize, usize), Elem>> = RwLock::new(HashMap::new());
    let pair = |i: usize, j: usize| -> Result<Elem> {
        if let Some(v) = cache.read().get(&(i, j)) {
            return Ok(v.clone());
        }
        let v = mu.apply(&set[i].elem, &set[j].elem)?;
        cache.write().insert((i, j), v.clone());
        Ok(v)
    };
    let verdicts = triples
        .par_iter()
        .map(|&(i, j, k)| {
            let left = mu.apply(&pair(i, j)?, &set[k].elem)?;
            let right = mu.apply(&set[i].elem, &pair(j, k)?)?;
            Ok(agree(&left, &right))
        })
        .collect::<Result<Vec<bool>>>()?;
    let witness = verdicts.iter().position(|ok| !ok).map(|p| {
        let (i, j, k) = triples[p];
        [set[i].elem.polynomial_string(), set[j].elem.polynomial_string(), set[k].elem.polynomial_string()]
    });
    Ok(AssociativityReport { associative: witness.is_none(), weight: w, triples: triples.len(), witness })
}

/// Additivity in each slot and compatibility with rational scalars, on
/// test pairs of combined weight `≤ w`.
pub fn bilinearity_check(mu: &ProductStructure, w: u32) -> Result<bool> {
    let set = restricted_set(&mu.carrier, w);
    let two = Rational::from_integer(2.into());
    for a in &set {
        for b in &set {
            for c in &set {
                if a.weight + b.weight > w || a.weight + c.weight > w || b.weight + c.weight > w {
                    continue;
                }
                let (x, y, z) = (&a.elem, &b.elem, &c.elem);
                let left = mu.apply(&(x + y), z)?;
                let split = &mu.apply(x, z)? + &mu.apply(y, z)?;
                let right = mu.apply(z, &(x + y))?;
                let split_r = &mu.apply(z, x)? + &mu.apply(z, y)?;
                if !agree(&left, &split) || !agree(&right, &split_r) {
                    return Ok(false);
                }
            }
            let scaled = mu.apply(&a.elem.scale(&two), &b.elem)?;
            if !agree(&scaled, &mu.apply(&a.elem, &b.elem)?.scale(&two)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn same_ring(a: &Carrier, b: &Carrier) -> bool {
    a.vars() == b.vars() && a.has_dual_monomials() == b.has_dual_monomials()
}

fn pairs_upto(set: &[TestMonomial], w: u32) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..set.len() {
        for j in 0..set.len() {
            if set[i].weight + set[j].weight <= w {
                out.push((i, j));
            }
        }
    }
    out
}

/// `μ_1(x, y) = π_1(x)π_2(y)` together with the check that the expanded
/// four-term form `xy − α_1∂_1(x)y − α_2∂_2(y)x + α_1α_2∂_1(x)∂_2(y)`
/// agrees with it.
#[derive(Clone, Debug)]
pub struct Mu1 {
    pub product: ProductStructure,
    pub expansion_matches: bool,
}

pub fn mu1(op1: &DividedDifferenceOp, op2: &DividedDifferenceOp) -> Result<Mu1> {
    if !same_ring(op1.carrier(), op2.carrier()) {
        return Err(AlgebraError::Precondition("π_1 and π_2 act on different carriers".into()));
    }
    let (p1, p2) = (op1.pi_map(), op2.pi_map());
    let eval: Bilinear = Arc::new(move |x: &Elem, y: &Elem| Ok(&p1(x)? * &p2(y)?));
    let product = ProductStructure::new(
        "mu1",
        json!({ "pi1": op1.constructor(), "pi2": op2.constructor() }),
        op1.carrier().clone(),
        eval,
    );
    let set = op1.carrier().test_set();
    let w = op1.carrier().check_weight();
    let (a1, a2) = (op1.alpha(), op2.alpha());
    let checks = pairs_upto(&set, w)
        .par_iter()
        .map(|&(i, j)| {
            let (x, y) = (&set[i].elem, &set[j].elem);
            let d1 = op1.partial(x)?;
            let d2 = op2.partial(y)?;
            let expanded = &(&(&(x * y) - &(&(a1 * &d1) * y)) - &(&(a2 * &d2) * x)) + &(&(a1 * a2) * &(&d1 * &d2));
            Ok(agree(&expanded, &product.apply(x, y)?))
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(Mu1 { product, expansion_matches: checks.into_iter().all(|b| b) })
}

fn maps_agree(set: &[TestMonomial], f: &LinearMap, g: &LinearMap) -> Result<bool> {
    let verdicts = set
        .par_iter()
        .map(|m| Ok(agree(&f(&m.elem)?, &g(&m.elem)?)))
        .collect::<Result<Vec<bool>>>()?;
    Ok(verdicts.into_iter().all(|b| b))
}

fn commutativity(mu: &ProductStructure, w: u32) -> Result<bool> {
    let set = restricted_set(&mu.carrier, w);
    for (i, j) in pairs_upto(&set, w) {
        if i < j && !agree(&mu.apply(&set[i].elem, &set[j].elem)?, &mu.apply(&set[j].elem, &set[i].elem)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mu1Report {
    pub division: [bool; 2],
    pub commute: bool,
    pub expansion_matches: bool,
    pub associativity: AssociativityReport,
    pub pi_equal: bool,
    pub commutative: bool,
    /// Both operators are division operators and `π_1π_2 = π_2π_1`.
    pub hypotheses: bool,
    /// `hypotheses ⟺ associative`.
    pub biconditional: bool,
    /// `commutative ⟺ π_1 = π_2`.
    pub commutativity_clause: bool,
}

pub fn theorem1_certificate(op1: &DividedDifferenceOp, op2: &DividedDifferenceOp, w: u32) -> Result<Mu1Report> {
    let m = mu1(op1, op2)?;
    let division = [is_division(op1)?, is_division(op2)?];
    let (p1, p2) = (op1.pi_map(), op2.pi_map());
    let (q1, q2) = (p1.clone(), p2.clone());
    let p12: LinearMap = Arc::new(move |e: &Elem| p1(&p2(e)?));
    let p21: LinearMap = Arc::new(move |e: &Elem| q2(&q1(e)?));
    let set = restricted_set(op1.carrier(), w);
    let commute = maps_agree(&set, &p12, &p21)?;
    let pi_equal = maps_agree(&set, &op1.pi_map(), &op2.pi_map())?;
    let associativity = associativity_check(&m.product, w)?;
    let commutative = commutativity(&m.product, w)?;
    let hypotheses = division[0] && division[1] && commute;
    Ok(Mu1Report {
        division,
        commute,
        expansion_matches: m.expansion_matches,
        biconditional: hypotheses == associativity.associative,
        associativity,
        pi_equal,
        commutative,
        hypotheses,
        commutativity_clause: commutative == pi_equal,
    })
}

/// `μ_2(x, y) = xy + β∂(x)∂(y)`.
pub fn mu2(op: &DividedDifferenceOp, beta: &Elem) -> ProductStructure {
    let d = op.partial_map();
    let b = beta.clone();
    let eval: Bilinear = Arc::new(move |x: &Elem, y: &Elem| Ok(&(x * y) + &(&b * &(&d(x)? * &d(y)?))));
    ProductStructure::new(
        "mu2",
        json!({ "op": op.constructor(), "beta": beta.to_string() }),
        op.carrier().clone(),
        eval,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Division operator with `π(β) = 0`.
    DivisionKillsBeta,
    /// Not a division operator, `∂²x·∂y = ∂x·∂²y`.
    SymmetricSquare,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mu2Report {
    pub division: bool,
    pub pi_beta_zero: bool,
    pub symmetric_square: bool,
    pub branch: Branch,
    pub associativity: AssociativityReport,
    /// `branch ≠ Neither ⟺ associative`.
    pub consistent: bool,
}

/// `∂²x·∂y = ∂x·∂²y` on test pairs.
pub fn symmetric_square(op: &DividedDifferenceOp, w: u32) -> Result<bool> {
    let set = restricted_set(op.carrier(), w);
    let d1 = set.par_iter().map(|m| op.partial(&m.elem)).collect::<Result<Vec<_>>>()?;
    let d2 = d1.par_iter().map(|v| op.partial(v)).collect::<Result<Vec<_>>>()?;
    Ok(pairs_upto(&set, w)
        .iter()
        .all(|&(i, j)| agree(&(&d2[i] * &d1[j]), &(&d1[i] * &d2[j]))))
}

pub fn mu2_report(op: &DividedDifferenceOp, beta: &Elem, w: u32) -> Result<Mu2Report> {
    let division = is_division(op)?;
    let pi_beta_zero = op.pi(beta)?.is_zero();
    let symmetric_square = symmetric_square(op, w)?;
    let branch = match (division, pi_beta_zero, symmetric_square) {
        (true, true, _) => Branch::DivisionKillsBeta,
        (false, _, true) => Branch::SymmetricSquare,
        _ => Branch::Neither,
    };
    let associativity = associativity_check(&mu2(op, beta), w)?;
    Ok(Mu2Report {
        division,
        pi_beta_zero,
        symmetric_square,
        branch,
        consistent: (branch != Branch::Neither) == associativity.associative,
        associativity,
    })
}

/// Linear operators `(Π, δ)` on a carrier.
#[derive(Clone)]
pub struct ProjectorPair {
    pub name: String,
    pub carrier: Carrier,
    pub pi: LinearMap,
    pub delta: LinearMap,
}

impl std::fmt::Debug for ProjectorPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProjectorPair").field("name", &self.name).finish()
    }
}

impl ProjectorPair {
    /// `Π` the companion of a divided difference operator, `δ = 0`.
    pub fn multiplicative(op: &DividedDifferenceOp) -> Self {
        ProjectorPair {
            name: format!("{}_with_zero_delta", op.constructor()),
            carrier: op.carrier().clone(),
            pi: op.pi_map(),
            delta: Arc::new(|e: &Elem| Ok(Series::zero(e.vars(), e.truncation()))),
        }
    }

    /// `Π = 1` and `δ = ∂` of the given operator.
    pub fn identity_with(op: &DividedDifferenceOp) -> Self {
        ProjectorPair {
            name: format!("identity_with_{}", op.constructor()),
            carrier: op.carrier().clone(),
            pi: Arc::new(|e: &Elem| Ok(e.clone())),
            delta: op.partial_map(),
        }
    }

    /// On `K[a]`, `Π = δ =` truncation to degree `≤ 1`. Condition (1)
    /// holds, but `Π(ΠxΠy) − ΠxΠy` is not a multiple of `δxδy`.
    pub fn linear_truncation(check_weight: u32) -> Self {
        let carrier = Carrier::polynomial(&["a"], check_weight);
        let cut: LinearMap = Arc::new(|e: &Elem| {
            let mut out = Series::zero(e.vars(), e.truncation());
            for (exp, c) in e.terms() {
                if exp[0] <= 1 {
                    out.add_term(exp.clone(), c);
                }
            }
            Ok(out)
        });
        ProjectorPair { name: "linear_truncation".into(), carrier, pi: cut.clone(), delta: cut }
    }
}

/// One of the three hypotheses, with the first failing input if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionOutcome {
    pub pass: bool,
    pub witness: Option<Vec<String>>,
}

impl ConditionOutcome {
    fn from_first_failure(failure: Option<Vec<String>>) -> Self {
        ConditionOutcome { pass: failure.is_none(), witness: failure }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesesReport {
    pub weight: u32,
    /// `Π² = Π` and `δΠ = δ`.
    pub condition1: ConditionOutcome,
    /// `δ(ΠxΠy) = δx·Πy + Πx·δy − α·δx·δy`.
    pub condition2: ConditionOutcome,
    /// `Π(ΠxΠy) = ΠxΠy + β·δx·δy`.
    pub condition3: ConditionOutcome,
}

impl HypothesesReport {
    pub fn all(&self) -> bool {
        self.condition1.pass && self.condition2.pass && self.condition3.pass
    }
}

struct PairValues {
    set: Vec<TestMonomial>,
    pi: Vec<Elem>,
    delta: Vec<Elem>,
    pairs: Vec<(usize, usize)>,
}

fn pair_values(pair: &ProjectorPair, w: u32) -> Result<PairValues> {
    let set = restricted_set(&pair.carrier, w);
    let pi = set.par_iter().map(|m| (pair.pi)(&m.elem)).collect::<Result<Vec<_>>>()?;
    let delta = set.par_iter().map(|m| (pair.delta)(&m.elem)).collect::<Result<Vec<_>>>()?;
    let pairs = pairs_upto(&set, w);
    Ok(PairValues { set, pi, delta, pairs })
}

/// `Π² = Π` and `δΠ = δ`, scanned in graded order up to the first failure.
fn condition1(pair: &ProjectorPair, v: &PairValues) -> Result<Option<Vec<String>>> {
    for i in 0..v.set.len() {
        let twice = (pair.pi)(&v.pi[i])?;
        let dpi = (pair.delta)(&v.pi[i])?;
        if !agree(&twice, &v.pi[i]) || !agree(&dpi, &v.delta[i]) {
            return Ok(Some(vec![v.set[i].elem.polynomial_string()]));
        }
    }
    Ok(None)
}

/// The first test monomial violating `Π² = Π` or `δΠ = δ`.
pub fn condition1_witness(pair: &ProjectorPair, w: u32) -> Result<Option<String>> {
    let v = pair_values(pair, w)?;
    Ok(condition1(pair, &v)?.map(|mut x| x.remove(0)))
}

fn first_failing_pair(
    v: &PairValues,
    test: impl Fn(usize, usize) -> Result<bool> + Sync,
) -> Result<Option<Vec<String>>> {
    let verdicts = v.pairs.par_iter().map(|&(i, j)| test(i, j)).collect::<Result<Vec<bool>>>()?;
    Ok(verdicts
        .iter()
        .position(|ok| !ok)
        .map(|p| vec![v.set[v.pairs[p].0].elem.polynomial_string(), v.set[v.pairs[p].1].elem.polynomial_string()]))
}

pub fn theorem3_hypotheses(pair: &ProjectorPair, alpha: &Elem, beta: &Elem, w: u32) -> Result<HypothesesReport> {
    let v = pair_values(pair, w)?;
    let c1 = condition1(pair, &v)?;
    let c2 = first_failing_pair(&v, |i, j| {
        let lhs = (pair.delta)(&(&v.pi[i] * &v.pi[j]))?;
        let dd = &v.delta[i] * &v.delta[j];
        let rhs = &(&(&v.delta[i] * &v.pi[j]) + &(&v.pi[i] * &v.delta[j])) - &(alpha * &dd);
        Ok(agree(&lhs, &rhs))
    })?;
    let c3 = first_failing_pair(&v, |i, j| {
        let pp = &v.pi[i] * &v.pi[j];
        let lhs = (pair.pi)(&pp)?;
        let rhs = &pp + &(beta * &(&v.delta[i] * &v.delta[j]));
        Ok(agree(&lhs, &rhs))
    })?;
    Ok(HypothesesReport {
        weight: w,
        condition1: ConditionOutcome::from_first_failure(c1),
        condition2: ConditionOutcome::from_first_failure(c2),
        condition3: ConditionOutcome::from_first_failure(c3),
    })
}

/// `x * y = Π(Πx·Πy)`, refused unless all three hypotheses hold through `w`.
pub fn mu3(pair: &ProjectorPair, alpha: &Elem, beta: &Elem, w: u32) -> Result<(ProductStructure, HypothesesReport)> {
    let report = theorem3_hypotheses(pair, alpha, beta, w)?;
    for (name, c) in [("(1)", &report.condition1), ("(2)", &report.condition2), ("(3)", &report.condition3)] {
        if !c.pass {
            return Err(AlgebraError::Precondition(format!(
                "hypothesis {name} fails on {}",
                c.witness.as_deref().unwrap_or_default().join(", ")
            )));
        }
    }
    Ok((projector_product(pair, alpha, beta), report))
}

/// `Π(Πx·Πy)` without checking any hypothesis.
pub fn projector_product(pair: &ProjectorPair, alpha: &Elem, beta: &Elem) -> ProductStructure {
    let pi = pair.pi.clone();
    let eval: Bilinear = Arc::new(move |x: &Elem, y: &Elem| pi(&(&pi(x)? * &pi(y)?)));
    ProductStructure::new(
        "mu3",
        json!({ "model": pair.name, "alpha": alpha.to_string(), "beta": beta.to_string() }),
        pair.carrier.clone(),
        eval,
    )
}

/// A coefficient solved from `N(x,y) = c·D(x,y)` over the test pairs.
#[derive(Clone, Debug)]
pub enum Solution {
    Solved {
        value: Elem,
        /// False when `D` vanished on every pair, leaving `c` free (0 is returned).
        determined: bool,
        /// The pair the value was read off from.
        spanning_pair: Option<[String; 2]>,
        verified_pairs: usize,
    },
    /// No single `c` fits; the first pair contradicting the candidate.
    Inconsistent { witness: [String; 2] },
}

impl Solution {
    pub fn value(&self) -> Option<&Elem> {
        match self {
            Solution::Solved { value, .. } => Some(value),
            Solution::Inconsistent { .. } => None,
        }
    }
}

fn solve_coefficient(
    v: &PairValues,
    carrier: &Carrier,
    numer: impl Fn(usize, usize) -> Result<Elem> + Sync,
) -> Result<Solution> {
    let nd = v
        .pairs
        .par_iter()
        .map(|&(i, j)| Ok((numer(i, j)?, &v.delta[i] * &v.delta[j])))
        .collect::<Result<Vec<_>>>()?;
    let label = |p: usize| [v.set[v.pairs[p].0].elem.polynomial_string(), v.set[v.pairs[p].1].elem.polynomial_string()];
    let mut candidate = None;
    for (p, (n, d)) in nd.iter().enumerate() {
        if d.is_zero() {
            continue;
        }
        match divide(n, d) {
            Ok(c) => {
                candidate = Some((c, p));
                break;
            }
            Err(AlgebraError::NotDivisible { .. }) => return Ok(Solution::Inconsistent { witness: label(p) }),
            Err(_) => continue,
        }
    }
    let (value, spanning) = match candidate {
        Some((c, p)) => (c, Some(p)),
        None => (carrier.zero(), None),
    };
    for (p, (n, d)) in nd.iter().enumerate() {
        if !agree(n, &(&value * d)) {
            return Ok(Solution::Inconsistent { witness: label(p) });
        }
    }
    Ok(Solution::Solved {
        value,
        determined: spanning.is_some(),
        spanning_pair: spanning.map(label),
        verified_pairs: nd.len(),
    })
}

fn require_condition1(pair: &ProjectorPair, v: &PairValues) -> Result<()> {
    if let Some(w) = condition1(pair, v)? {
        return Err(AlgebraError::Precondition(format!("Π² = Π or δΠ = δ fails on {}", w[0])));
    }
    Ok(())
}

/// `β` with `Π(ΠxΠy) − ΠxΠy = β·δx·δy`, read off from the first pair with
/// `δxδy ≠ 0` and verified on every test pair.
pub fn solve_beta(pair: &ProjectorPair, w: u32) -> Result<Solution> {
    let v = pair_values(pair, w)?;
    require_condition1(pair, &v)?;
    solve_coefficient(&v, &pair.carrier, |i, j| {
        let pp = &v.pi[i] * &v.pi[j];
        Ok(&(pair.pi)(&pp)? - &pp)
    })
}

/// `α` with `δx·Πy + Πx·δy − δ(ΠxΠy) = α·δx·δy`.
pub fn solve_alpha(pair: &ProjectorPair, w: u32) -> Result<Solution> {
    let v = pair_values(pair, w)?;
    require_condition1(pair, &v)?;
    solve_coefficient(&v, &pair.carrier, |i, j| {
        let lin = &(&v.delta[i] * &v.pi[j]) + &(&v.pi[i] * &v.delta[j]);
        Ok(&lin - &(pair.delta)(&(&v.pi[i] * &v.pi[j]))?)
    })
}

/// The Conner-Floyd pair on Thom monomials `M = x_1^(a_1)⋯x_k^(a_k)`:
/// with `c(M)` the formal sum of the variables (with multiplicity) and
/// `ē(M) = ι(c(M))`, `δ(M) = M·ē(M)` and
/// `Π(M) = M·(1 + Σ_(i≥2) α_(i1)·ē(M)^i)`, extended linearly over `S*`.
pub fn conner_floyd_model(k: usize, check_weight: u32) -> Result<ProjectorPair> {
    if k == 0 {
        return Err(AlgebraError::Precondition("need at least one line factor".into()));
    }
    let names: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let carrier = Carrier::polynomial(&refs, check_weight);
    let model = Arc::new(ConnerFloyd::new(&carrier)?);
    let (m1, m2) = (model.clone(), model);
    let pi: LinearMap = Arc::new(move |e: &Elem| m1.apply(e, true));
    let delta: LinearMap = Arc::new(move |e: &Elem| m2.apply(e, false));
    Ok(ProjectorPair { name: format!("conner_floyd_k{k}"), carrier, pi, delta })
}

struct ConnerFloyd {
    carrier: Carrier,
    exp: Series<DualElement>,
    /// `log x_j` in the carrier variables.
    logs: Vec<Elem>,
    /// `α_(i1)` for `i ≥ 2`, index `i - 2`.
    alphas: Vec<DualElement>,
    /// Exponent `a` ↦ `(δ(M), Π(M))`.
    cache: RwLock<HashMap<Exponent, (Elem, Elem)>>,
}

impl ConnerFloyd {
    fn new(carrier: &Carrier) -> Result<Self> {
        let t = carrier.truncation();
        let table = universal_fgl(t)?;
        let lp = log_pair(t)?;
        let logs = (0..carrier.vars().len())
            .map(|j| lp.log.compose(&[carrier.var(j)]))
            .collect::<Result<Vec<_>>>()?;
        let alphas = (2..=t).map(|i| table.entry(i, 1)).collect();
        Ok(ConnerFloyd { carrier: carrier.clone(), exp: lp.exp.truncate(t), logs, alphas, cache: RwLock::new(HashMap::new()) })
    }

    /// `ι(F(x_1, …)) = exp(−Σ a_j log x_j)`.
    fn ebar(&self, exp: &Exponent) -> Result<Elem> {
        let c = &self.carrier;
        let mut arg = c.zero();
        for (l, &a) in self.logs.iter().zip(exp) {
            if a > 0 {
                arg = &arg - &l.scale(&Rational::from_integer(a.into()));
            }
        }
        if arg.is_zero() {
            return Ok(arg);
        }
        self.exp.compose(&[arg])
    }

    fn images(&self, exp: &Exponent) -> Result<(Elem, Elem)> {
        if let Some(v) = self.cache.read().get(exp) {
            return Ok(v.clone());
        }
        let c = &self.carrier;
        let m = Series::monomial(c.vars(), c.truncation(), exp.clone(), DualElement::one_value());
        let ebar = self.ebar(exp)?;
        let delta = &m * &ebar;
        let mut factor = c.one();
        let mut power = &ebar * &ebar;
        for a in &self.alphas {
            if power.is_zero() {
                break;
            }
            factor = &factor + &power.mul_coeff(a);
            power = &power * &ebar;
        }
        let pi = &m * &factor;
        self.cache.write().insert(exp.clone(), (delta.clone(), pi.clone()));
        Ok((delta, pi))
    }

    fn apply(&self, e: &Elem, pi: bool) -> Result<Elem> {
        let mut out = Series::zero(e.vars(), e.truncation());
        for (exp, c) in e.terms() {
            let (d, p) = self.images(exp)?;
            let img = if pi { p } else { d };
            out = &out + &img.mul_coeff(c).truncate(e.truncation());
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Declarative product specifications

/// A catalogue operator named in a product spec.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum OperatorSpec {
    Newton,
    Evaluation,
    ShiftedTranslation,
    Reflection {
        xi: Vec<String>,
        kind: Reflection,
    },
    MultiplicativeFgl {
        a: Vec<PolyTerm>,
    },
    Lemma12 {
        n: u32,
        alpha: Vec<PolyTerm>,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        coefficients: Option<u32>,
    },
    Lemma13 {
        n: u32,
        alpha: Vec<PolyTerm>,
    },
}

impl OperatorSpec {
    pub fn build(&self, check_weight: u32) -> Result<DividedDifferenceOp> {
        match self {
            OperatorSpec::Newton => newton_op(check_weight),
            OperatorSpec::Evaluation => evaluation_op(check_weight),
            OperatorSpec::ShiftedTranslation => shifted_translation_op(check_weight),
            OperatorSpec::Reflection { xi, kind } => {
                let xi = xi.iter().map(|s| parse_fraction(s)).collect::<Result<Vec<_>>>()?;
                reflection_op(&xi, *kind, check_weight)
            }
            OperatorSpec::MultiplicativeFgl { a } => {
                multiplicative_fgl_op(&DualElement::from_poly_terms(a)?, check_weight)
            }
            OperatorSpec::Lemma12 { n, alpha, seed, coefficients } => {
                let a = match seed {
                    Some(s) => random_lambda_coefficients(*s, coefficients.unwrap_or(2))?,
                    None => Vec::new(),
                };
                lemma12_op(*n, &DualElement::from_poly_terms(alpha)?, &a, check_weight)
            }
            OperatorSpec::Lemma13 { n, alpha } => lemma13_op(*n, &DualElement::from_poly_terms(alpha)?, check_weight),
        }
    }
}

/// `coef · x^exp` with a rational coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementTerm {
    pub exp: Vec<u32>,
    pub coef: String,
}

fn build_element(carrier: &Carrier, terms: &[ElementTerm]) -> Result<Elem> {
    let mut out = carrier.zero();
    for t in terms {
        if t.exp.len() != carrier.vars().len() {
            return Err(AlgebraError::Parse(format!(
                "exponent {:?} does not fit {} variables",
                t.exp,
                carrier.vars().len()
            )));
        }
        out.add_term(t.exp.clone(), &DualElement::constant(parse_fraction(&t.coef)?));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    ConnerFloyd { k: usize },
    /// `Π` the companion of a catalogue operator, `δ = 0`.
    Multiplicative { operator: OperatorSpec },
    LinearTruncation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Mu1,
    Mu2,
    Mu3,
    Phi,
}

/// Input of `product-check`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductSpec {
    pub construction: Construction,
    /// Descriptive; the operators fix the actual carrier. For `phi`, the
    /// geometric variable names: `{"vars": ["x"]}`.
    #[serde(default)]
    pub carrier: Value,
    pub params: Value,
    pub check_weight: u32,
}

/// Output of `product-check`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductCheckOutput {
    pub certificate: Value,
    pub associative: bool,
    pub witness: Option<[String; 3]>,
}

#[derive(Deserialize)]
struct Mu1Params {
    pi1: OperatorSpec,
    pi2: OperatorSpec,
}

#[derive(Deserialize)]
struct Mu2Params {
    op: OperatorSpec,
    beta: Vec<ElementTerm>,
}

#[derive(Deserialize)]
struct Mu3Params {
    #[serde(flatten)]
    model: ModelSpec,
}

#[derive(Deserialize)]
struct PhiParams {
    phi: PhiSeriesJson,
}

fn parse<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| AlgebraError::Parse(e.to_string()))
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

pub fn run_product_spec(spec: &ProductSpec) -> Result<ProductCheckOutput> {
    let w = spec.check_weight;
    match spec.construction {
        Construction::Mu1 => {
            let p: Mu1Params = parse(&spec.params)?;
            let r = theorem1_certificate(&p.pi1.build(w)?, &p.pi2.build(w)?, w)?;
            Ok(ProductCheckOutput {
                associative: r.associativity.associative,
                witness: r.associativity.witness.clone(),
                certificate: to_value(&r),
            })
        }
        Construction::Mu2 => {
            let p: Mu2Params = parse(&spec.params)?;
            let op = p.op.build(w)?;
            let beta = build_element(op.carrier(), &p.beta)?;
            let r = mu2_report(&op, &beta, w)?;
            Ok(ProductCheckOutput {
                associative: r.associativity.associative,
                witness: r.associativity.witness.clone(),
                certificate: to_value(&r),
            })
        }
        Construction::Mu3 => {
            let p: Mu3Params = parse(&spec.params)?;
            let pair = match p.model {
                ModelSpec::ConnerFloyd { k } => conner_floyd_model(k, w)?,
                ModelSpec::Multiplicative { operator } => ProjectorPair::multiplicative(&operator.build(w)?),
                ModelSpec::LinearTruncation => ProjectorPair::linear_truncation(w),
            };
            mu3_run(&pair, w)
        }
        Construction::Phi => {
            let p: PhiParams = parse(&spec.params)?;
            let phi = PhiSeries::from_json(&p.phi)?;
            let names: Vec<String> = match spec.carrier.get("vars") {
                Some(v) => parse(v)?,
                None => vec!["x".into()],
            };
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let carrier = Carrier::milnor(&refs, w);
            let eval: Bilinear = Arc::new(move |x: &Elem, y: &Elem| stable_product_eval(&phi, x, y));
            let product = ProductStructure::new("phi", spec.params.clone(), carrier, eval);
            let r = associativity_check(&product, w)?;
            Ok(ProductCheckOutput {
                associative: r.associative,
                witness: r.witness.clone(),
                certificate: json!({ "bilinear": bilinearity_check(&product, w)?, "triples": r.triples }),
            })
        }
    }
}

/// Checks the hypotheses (solving `α` and `β` when `Π` and `δ` allow it)
/// and sweeps `Π(ΠxΠy)` for associativity either way.
fn mu3_run(pair: &ProjectorPair, w: u32) -> Result<ProductCheckOutput> {
    let describe = |s: &Solution| match s {
        Solution::Solved { value, determined, .. } => json!({ "value": value.to_string(), "determined": determined }),
        Solution::Inconsistent { witness } => json!({ "inconsistent": witness }),
    };
    let zero = pair.carrier.zero();
    let mut certificate = json!({ "model": pair.name });
    let mut hypotheses_hold = false;
    let (mut alpha, mut beta) = (zero.clone(), zero.clone());
    match condition1_witness(pair, w)? {
        Some(at) => certificate["condition1"] = json!({ "pass": false, "witness": [at] }),
        None => {
            let a = solve_alpha(pair, w)?;
            let b = solve_beta(pair, w)?;
            certificate["alpha"] = describe(&a);
            certificate["beta"] = describe(&b);
            if let (Some(a), Some(b)) = (a.value(), b.value()) {
                let hyp = theorem3_hypotheses(pair, a, b, w)?;
                hypotheses_hold = hyp.all();
                certificate["hypotheses"] = to_value(&hyp);
                (alpha, beta) = (a.clone(), b.clone());
            }
        }
    }
    certificate["hypotheses_hold"] = json!(hypotheses_hold);
    let r = associativity_check(&projector_product(pair, &alpha, &beta), w)?;
    certificate["triples"] = json!(r.triples);
    Ok(ProductCheckOutput { certificate, associative: r.associative, witness: r.witness })
}
