//! Carriers `S*[[x_1..x_k]]` with the full action of `S`: parts of `s_w` are
//! spread over the coefficient (through `R*`) and over the geometric
//! variables. Also multiplicative operator series, the one-dimensional
//! representation on `Q[u]`, and bilinear Φ-series.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;
use crate::dual::{DualElement, PolyTerm};
use crate::error::{AlgebraError, Result};
use crate::hopf::{act_basis_on_monomial, distributions, multiply, SElement};
use crate::multiindex::{basis_up_to, MultiIndex};
use crate::rational::{factorial, Rational};
use crate::series::{Series, Variable, Vars};

/// A series in geometric variables (weight 1 each) with coefficients in `S*`.
/// Truncation counts the geometric degree only; coefficients are exact.
pub type ModuleElement = Series<DualElement>;

/// The carrier with no geometric variables, holding a bare element of `S*`.
pub fn scalar(lambda: &DualElement, trunc: u32) -> ModuleElement {
    Series::constant(&no_vars(), trunc, lambda.clone())
}

pub fn no_vars() -> Vars {
    static EMPTY: OnceLock<Vars> = OnceLock::new();
    EMPTY.get_or_init(|| Arc::new(Vec::new())).clone()
}

type GammaCache = RwLock<HashMap<u32, Arc<Vec<DualElement>>>>;

/// Row `n` of the table `γ_{n,k} = [t^(n+1)] γ(t)^(k+1)`, `k = 0..=n`, where
/// `γ(t) = t + Σ s*_n t^(n+1)`. `S_t(s*_n) = Σ_k t_k γ_{n,k}` with `t_0 = 1`.
pub fn gamma_row(n: u32) -> Arc<Vec<DualElement>> {
    static CACHE: OnceLock<GammaCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(row) = cache.read().get(&n) {
        return row.clone();
    }
    let mut coeffs = vec![DualElement::default(), DualElement::one_value()];
    coeffs.extend((1..=n).map(DualElement::generator));
    let g = Series::univariate(Variable::new("t", 1), n + 1, &coeffs);
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut power = g.clone();
    for _ in 0..=n {
        row.push(power.coeff(&[n + 1]));
        power = &power * &g;
    }
    let row = Arc::new(row);
    cache.write().insert(n, row.clone());
    row
}

pub fn gamma(n: u32, k: u32) -> DualElement {
    gamma_row(n).get(k as usize).cloned().unwrap_or_default()
}

/// `R*_(s_a)` on a monomial `s*_(n_1)⋯s*_(n_l)`: the parts of `a` go to
/// distinct factors, a factor `s*_n` receiving `(k)` contributes `γ_{n,k}`.
fn r_star_basis_monomial(a: &MultiIndex, m: &MultiIndex) -> DualElement {
    if a.is_empty() {
        return DualElement::monomial(m.clone(), Rational::one());
    }
    if a.len() > m.len() || a.weight() > m.weight() {
        return DualElement::default();
    }
    let mut out = DualElement::default();
    for dist in distributions(a, m.len()) {
        if dist.iter().any(|v| v.len() > 1) {
            continue;
        }
        let mut term = DualElement::one_value();
        for (slot, &n) in dist.iter().zip(m.parts()) {
            let k = slot.parts().first().copied().unwrap_or(0);
            if k > n {
                term = DualElement::default();
                break;
            }
            term = term.mul_ref(&gamma(n, k));
        }
        out.add_assign_ref(&term);
    }
    out
}

/// `R*_a(λ)` by the Milnor rule; agrees with the definition
/// `s' ↦ ⟨λ, s'·a⟩` (see `hopf::r_star_definitional`).
pub fn r_star(a: &SElement, lambda: &DualElement) -> DualElement {
    let mut out = DualElement::default();
    for (w, c) in a.terms() {
        for (m, lc) in lambda.terms() {
            out.add_assign_ref(&r_star_basis_monomial(w, m).scale(&(c * lc)));
        }
    }
    out
}

/// `s_w(e)` on a carrier element.
pub fn act_basis(w: &MultiIndex, e: &ModuleElement) -> ModuleElement {
    let mut out = Series::zero(e.vars(), e.truncation());
    let splits = w.splittings();
    for (exp, coef) in e.terms() {
        let deg: u32 = exp.iter().sum();
        for (a, b) in &splits {
            if deg + b.weight() > e.truncation() {
                continue;
            }
            let c = r_star_basis_on(a, coef);
            if c.is_zero_value() {
                continue;
            }
            for (new_exp, k) in act_basis_on_monomial(b, exp) {
                out.add_term(new_exp, &c.scale(&k));
            }
        }
    }
    out
}

fn r_star_basis_on(a: &MultiIndex, lambda: &DualElement) -> DualElement {
    let mut out = DualElement::default();
    for (m, c) in lambda.terms() {
        out.add_assign_ref(&r_star_basis_monomial(a, m).scale(c));
    }
    out
}

/// The action of an element of `S` on a carrier element.
pub fn act(a: &SElement, e: &ModuleElement) -> ModuleElement {
    let mut out = Series::zero(e.vars(), e.truncation());
    for (w, c) in a.terms() {
        out = &out + &act_basis(w, e).scale(c);
    }
    out
}

/// `Σ λ_w s_w` with coefficients in `S*`: an element of the completed
/// algebra acting on carriers.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OperatorSeries {
    pub terms: BTreeMap<MultiIndex, DualElement>,
    pub truncation: u32,
}

impl OperatorSeries {
    pub fn identity(truncation: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(MultiIndex::empty(), DualElement::one_value());
        OperatorSeries { terms, truncation }
    }

    pub fn add_term(&mut self, w: MultiIndex, c: &DualElement) {
        if w.weight() > self.truncation || c.is_zero_value() {
            return;
        }
        let slot = self.terms.entry(w.clone()).or_default();
        slot.add_assign_ref(c);
        if slot.is_zero_value() {
            self.terms.remove(&w);
        }
    }

    pub fn act(&self, e: &ModuleElement) -> ModuleElement {
        let mut out = Series::zero(e.vars(), e.truncation());
        for (w, lam) in &self.terms {
            out = &out + &act_basis(w, e).mul_coeff(lam);
        }
        out
    }
}

/// A multiplicative operator `φ = Σ φ_w s_w`, `φ_w = Π φ_(k_i)`, given by
/// its values `φ(x) = x + Σ φ_k x^(k+1)` on a geometric element.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicativeOp {
    /// `phi[k-1] = φ_k`.
    phi: Vec<DualElement>,
}

impl MultiplicativeOp {
    pub fn new(phi: Vec<DualElement>) -> Self {
        MultiplicativeOp { phi }
    }

    pub fn identity() -> Self {
        MultiplicativeOp { phi: Vec::new() }
    }

    pub fn coeffs(&self) -> &[DualElement] {
        &self.phi
    }

    /// `φ_k`, with `φ_0 = 1`.
    pub fn phi(&self, k: u32) -> DualElement {
        if k == 0 {
            DualElement::one_value()
        } else {
            self.phi.get(k as usize - 1).cloned().unwrap_or_default()
        }
    }

    /// `φ(s*_n) = Σ_k φ_k γ_{n,k}`.
    fn on_generator(&self, n: u32) -> DualElement {
        let row = gamma_row(n);
        let mut out = DualElement::default();
        for (k, g) in row.iter().enumerate() {
            let p = self.phi(k as u32);
            if !p.is_zero_value() {
                out.add_assign_ref(&p.mul_ref(g));
            }
        }
        out
    }

    pub fn apply_dual(&self, lambda: &DualElement) -> DualElement {
        let mut gens: HashMap<u32, DualElement> = HashMap::new();
        lambda.map_monomials(|m| {
            let mut acc = DualElement::one_value();
            for &n in m.parts() {
                let g = gens.entry(n).or_insert_with(|| self.on_generator(n));
                acc = acc.mul_ref(g);
            }
            acc
        })
    }

    /// `φ(x_i)` inside the carrier of `vars`.
    pub fn on_variable(&self, vars: &Vars, trunc: u32, i: usize) -> ModuleElement {
        let mut s = Series::var(vars, trunc, i);
        for (k, p) in self.phi.iter().enumerate() {
            let mut e = vec![0; vars.len()];
            e[i] = k as u32 + 2;
            s.add_term(e, p);
        }
        s
    }

    pub fn apply(&self, e: &ModuleElement) -> ModuleElement {
        let vars = e.vars().clone();
        let trunc = e.truncation();
        let images: Vec<ModuleElement> = (0..vars.len()).map(|i| self.on_variable(&vars, trunc, i)).collect();
        let mut powers: Vec<Vec<ModuleElement>> = images.iter().map(|_| vec![Series::one(&vars, trunc)]).collect();
        let mut coeff_cache: HashMap<MultiIndex, DualElement> = HashMap::new();
        let mut out = Series::zero(&vars, trunc);
        for (exp, coef) in e.terms() {
            let mut c = DualElement::default();
            for (m, r) in coef.terms() {
                let img = coeff_cache
                    .entry(m.clone())
                    .or_insert_with(|| self.apply_dual(&DualElement::monomial(m.clone(), Rational::one())));
                c.add_assign_ref(&img.scale(r));
            }
            if c.is_zero_value() {
                continue;
            }
            let mut term = Series::constant(&vars, trunc, c);
            for (i, &p) in exp.iter().enumerate() {
                while powers[i].len() <= p as usize {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                term = &term * &powers[i][p as usize];
            }
            out = &out + &term;
        }
        out
    }

    /// Expansion as `Σ φ_w s_w` through the given weight.
    pub fn to_operator_series(&self, truncation: u32) -> OperatorSeries {
        let mut op = OperatorSeries { terms: BTreeMap::new(), truncation };
        for w in basis_up_to(truncation) {
            let mut c = DualElement::one_value();
            for &k in w.parts() {
                c = c.mul_ref(&self.phi(k));
            }
            op.add_term(w, &c);
        }
        op
    }
}

/// Builds the multiplicative operator with `φ(x) = x + Σ φ_k x^(k+1)`,
/// requiring each nonzero `φ_k` to be homogeneous of weight `k`.
pub fn operator_from_series(phi: &[DualElement], truncation: u32) -> Result<OperatorSeries> {
    for (i, p) in phi.iter().enumerate() {
        let k = i as u32 + 1;
        if p.is_zero_value() {
            continue;
        }
        let w = p.homogeneous_weight()?;
        if w != k {
            return Err(AlgebraError::WeightMismatch { name: format!("phi_{k}"), left: w, right: k });
        }
    }
    Ok(MultiplicativeOp::new(phi.to_vec()).to_operator_series(truncation))
}

/// `φ² = φ` for a multiplicative `φ` iff `φ(φ_i) = 0` for every `i`.
pub fn is_multiplicative_projector(phi: &[DualElement]) -> bool {
    let op = MultiplicativeOp::new(phi.to_vec());
    phi.iter().all(|p| op.apply_dual(p).is_zero_value())
}

/// `D = u² d/du` applied to a univariate polynomial.
fn u2_derivative(p: &Series<Rational>) -> Series<Rational> {
    let mut out = Series::zero(p.vars(), p.truncation());
    for (e, c) in p.terms() {
        if e[0] > 0 {
            out.add_term(vec![e[0] + 1], &(c * Rational::from_integer(e[0].into())));
        }
    }
    out
}

/// The representation `s_(1) ↦ u² d/du`, `s_(n) ↦ 0` for `n ≥ 2`, on the
/// image generators: `s_(1^j) ↦ D^j / j!`, every other `s_w ↦ 0`.
fn rep_differential(w: &MultiIndex, p: &Series<Rational>) -> Series<Rational> {
    if w.parts().iter().any(|&k| k != 1) {
        return Series::zero(p.vars(), p.truncation());
    }
    let j = w.len() as u32;
    let mut out = p.clone();
    for _ in 0..j {
        out = u2_derivative(&out);
    }
    out.scale(&Rational::new(1.into(), factorial(j)))
}

/// The same representation reached through structure constants:
/// `s_(k)·s_w' = c·s_w + (terms with fewer parts)` for `w = w' ⊎ (k)`.
fn rep_structural(w: &MultiIndex, p: &Series<Rational>) -> Result<Series<Rational>> {
    let Some(&k) = w.parts().last() else {
        return Ok(p.clone());
    };
    let rest = w.remove_part(k).expect("part present");
    let prod = multiply(&SElement::single(k), &SElement::basis(rest.clone()))?;
    let lead = prod.coeff(w);
    if lead.is_zero() {
        return Err(AlgebraError::Inconsistent(format!("s_({k}) s_{rest} has no s_{w} term")));
    }
    let inner = rep_structural(&rest, p)?;
    let mut acc = if k == 1 { u2_derivative(&inner) } else { Series::zero(p.vars(), p.truncation()) };
    for (u, c) in prod.terms() {
        if u == w {
            continue;
        }
        if u.len() >= w.len() {
            return Err(AlgebraError::Inconsistent(format!("s_({k}) s_{rest} contains s_{u}")));
        }
        acc = &acc - &rep_structural(u, p)?.scale(c);
    }
    Ok(acc.scale(&(Rational::one() / lead)))
}

/// Action of `a` on `p ∈ Q[u]` in the one-dimensional representation,
/// computed by both routes; a disagreement is an error.
pub fn one_dim_rep_eq11(a: &SElement, p: &Series<Rational>) -> Result<Series<Rational>> {
    if p.vars().len() != 1 {
        return Err(AlgebraError::NotUnivariate(p.vars().len()));
    }
    let mut out = Series::zero(p.vars(), p.truncation());
    for (w, c) in a.terms() {
        let d = rep_differential(w, p);
        let s = rep_structural(w, p)?;
        if d != s {
            return Err(AlgebraError::Inconsistent(format!("routes disagree on s_{w}")));
        }
        out = &out + &d.scale(c);
    }
    Ok(out)
}

/// `Φ = Σ λ_ij s_(w_i) ⊗ s_(w_j)`, evaluated as `Σ λ_ij s_(w_i)(u) s_(w_j)(v)`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PhiSeries {
    pub terms: BTreeMap<(MultiIndex, MultiIndex), DualElement>,
    pub truncation: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiSeriesJson {
    pub terms: Vec<PhiTermJson>,
    pub truncation: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiTermJson {
    pub wi: MultiIndex,
    pub wj: MultiIndex,
    pub poly: Vec<PolyTerm>,
}

impl PhiSeries {
    pub fn new(truncation: u32) -> Self {
        PhiSeries { terms: BTreeMap::new(), truncation }
    }

    /// `1 ⊗ 1`: the ordinary product.
    pub fn unit(truncation: u32) -> Self {
        let mut p = Self::new(truncation);
        p.add_term(MultiIndex::empty(), MultiIndex::empty(), &DualElement::one_value());
        p
    }

    /// `φ ⊗ ψ` for multiplicative operators.
    pub fn tensor(phi: &MultiplicativeOp, psi: &MultiplicativeOp, truncation: u32) -> Self {
        let a = phi.to_operator_series(truncation);
        let b = psi.to_operator_series(truncation);
        let mut p = Self::new(truncation);
        for (wi, li) in &a.terms {
            for (wj, lj) in &b.terms {
                p.add_term(wi.clone(), wj.clone(), &li.mul_ref(lj));
            }
        }
        p
    }

    pub fn add_term(&mut self, wi: MultiIndex, wj: MultiIndex, c: &DualElement) {
        if c.is_zero_value() || wi.weight() > self.truncation || wj.weight() > self.truncation {
            return;
        }
        let key = (wi, wj);
        let slot = self.terms.entry(key.clone()).or_default();
        slot.add_assign_ref(c);
        if slot.is_zero_value() {
            self.terms.remove(&key);
        }
    }

    pub fn to_json(&self) -> PhiSeriesJson {
        PhiSeriesJson {
            terms: self
                .terms
                .iter()
                .map(|((wi, wj), c)| PhiTermJson { wi: wi.clone(), wj: wj.clone(), poly: c.to_poly_terms() })
                .collect(),
            truncation: self.truncation,
        }
    }

    pub fn from_json(j: &PhiSeriesJson) -> Result<Self> {
        let mut p = Self::new(j.truncation);
        for t in &j.terms {
            p.add_term(t.wi.clone(), t.wj.clone(), &DualElement::from_poly_terms(&t.poly)?);
        }
        Ok(p)
    }
}

/// `u ∘ v = Σ λ_ij s_(w_i)(u) s_(w_j)(v)`.
pub fn stable_product_eval(phi: &PhiSeries, u: &ModuleElement, v: &ModuleElement) -> Result<ModuleElement> {
    let mut left: HashMap<&MultiIndex, ModuleElement> = HashMap::new();
    let mut right: HashMap<&MultiIndex, ModuleElement> = HashMap::new();
    let mut out: Option<ModuleElement> = None;
    for ((wi, wj), lam) in &phi.terms {
        let a = left.entry(wi).or_insert_with(|| act_basis(wi, u)).clone();
        let b = right.entry(wj).or_insert_with(|| act_basis(wj, v));
        let term = a.checked_mul(b)?.mul_coeff(lam);
        out = Some(match out {
            None => term,
            Some(acc) => acc.checked_add(&term)?,
        });
    }
    match out {
        Some(o) => Ok(o),
        None => Ok(Series::zero(u.vars(), u.truncation().min(v.truncation())).reindexed(&merge_vars(u, v))?),
    }
}

fn merge_vars(u: &ModuleElement, v: &ModuleElement) -> Vars {
    let mut names: Vec<Variable> = u.vars().to_vec();
    for x in v.vars().iter() {
        if !names.iter().any(|y| y.name == x.name) {
            names.push(x.clone());
        }
    }
    Arc::new(names)
}

/// A bilinear product on `S*`, queried on test elements.
pub type ProductOracle<'a> = dyn Fn(&DualElement, &DualElement) -> Result<DualElement> + 'a;

/// Recovers the Φ-series of a product from its values on monomials
/// `(s*)^a ∘ (s*)^b`, by induction on `wt a + wt b`. On such inputs only
/// `s_(w_i)` with `wt w_i ≤ wt a` survive and the top terms pair to `δ`,
/// so `λ_ab` is the oracle value minus the contribution of terms already
/// recovered. A unital product is required (`1 ∘ 1 = 1`), and the result
/// is re-checked on mixed inputs in every weight.
pub fn recover_phi(oracle: &ProductOracle<'_>, max_weight: u32) -> Result<PhiSeries> {
    let basis = basis_up_to(max_weight);
    let mut pairs: Vec<(&MultiIndex, &MultiIndex)> = Vec::new();
    for a in &basis {
        for b in &basis {
            if a.weight() + b.weight() <= max_weight {
                pairs.push((a, b));
            }
        }
    }
    pairs.sort_by(|x, y| {
        (x.0.weight() + x.1.weight())
            .cmp(&(y.0.weight() + y.1.weight()))
            .then_with(|| x.0.cmp(y.0))
            .then_with(|| x.1.cmp(y.1))
    });
    let mut phi = PhiSeries::new(max_weight);
    for (a, b) in pairs {
        let u = DualElement::monomial(a.clone(), Rational::one());
        let v = DualElement::monomial(b.clone(), Rational::one());
        let mut lam = oracle(&u, &v)?;
        for ((wi, wj), c) in &phi.terms {
            if wi.weight() > a.weight() || wj.weight() > b.weight() {
                continue;
            }
            let ru = r_star_basis_on(wi, &u);
            let rv = r_star_basis_on(wj, &v);
            if ru.is_zero_value() || rv.is_zero_value() {
                continue;
            }
            lam.sub_assign_ref(&c.mul_ref(&ru).mul_ref(&rv));
        }
        if a.is_empty() && b.is_empty() && lam != DualElement::one_value() {
            return Err(AlgebraError::Inconsistent(format!("weight 0: 1∘1 = {lam}, expected 1")));
        }
        phi.add_term(a.clone(), b.clone(), &lam);
    }
    for n in 0..=max_weight {
        for i in 0..=n {
            let u = mixed_element(i);
            let v = mixed_element(n - i);
            let got = stable_product_eval(&phi, &scalar(&u, 0), &scalar(&v, 0))?.constant_term();
            if got != oracle(&u, &v)? {
                return Err(AlgebraError::Inconsistent(format!("oracle is not a Φ-series product at weight {n}")));
            }
        }
    }
    Ok(phi)
}

/// A fixed combination of all monomials of weight `n` with distinct
/// coefficients `1, 2, 3, …`.
fn mixed_element(n: u32) -> DualElement {
    DualElement::from_terms(
        crate::multiindex::partitions(n)
            .into_iter()
            .enumerate()
            .map(|(i, m)| (m, Rational::from_integer((i as i64 + 1).into()))),
    )
}
