//! The universal formal group law over `S*`, computed two ways (from the
//! operators `φ_t` and from the logarithm), together with the inverse
//! series, the difference kernel `f(x, ι(y))`, the classes `[CP^m]` and the
//! reduction to `u = x·ι(x)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;
use crate::dual::{DualElement, PolyTerm};
use crate::error::{AlgebraError, Result};
use crate::hopf::{pairing, SElement};
use crate::linalg::{inverse, QMatrix};
use crate::milnor::act_basis;
use crate::multiindex::{basis_up_to, partitions, MultiIndex};
use crate::rational::Rational;
use crate::series::{vars, Series, Variable, Vars};

/// Coefficients `α_ij` of `f(x_1, x_2) = x_1 + x_2 + Σ α_ij x_1^i x_2^j` for
/// `i + j - 1 ≤ truncation`.
#[derive(Clone, Debug, PartialEq)]
pub struct FGLTable {
    pub truncation: u32,
    pub entries: BTreeMap<(u32, u32), DualElement>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FGLTableJson {
    pub truncation: u32,
    pub entries: Vec<FGLEntryJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FGLEntryJson {
    pub i: u32,
    pub j: u32,
    pub poly: Vec<PolyTerm>,
}

impl FGLTable {
    pub fn entry(&self, i: u32, j: u32) -> DualElement {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    /// Reads `α_ij` off a two-variable series.
    fn from_law(law: &Series<DualElement>, truncation: u32) -> Self {
        let mut entries = BTreeMap::new();
        for i in 1..=truncation {
            for j in 1..=(truncation + 1 - i) {
                entries.insert((i, j), law.coeff(&[i, j]));
            }
        }
        FGLTable { truncation, entries }
    }

    /// `f(x_1, x_2)` over the given pair of variables, known through degree
    /// `truncation + 1`.
    pub fn law(&self, v: &Vars) -> Series<DualElement> {
        let t = self.truncation + 1;
        let mut s = Series::var(v, t, 0);
        s.add_term(vec![0, 1], &DualElement::one_value());
        for ((i, j), c) in &self.entries {
            s.add_term(vec![*i, *j], c);
        }
        s
    }

    pub fn to_json(&self) -> FGLTableJson {
        FGLTableJson {
            truncation: self.truncation,
            entries: self
                .entries
                .iter()
                .map(|((i, j), c)| FGLEntryJson { i: *i, j: *j, poly: c.to_poly_terms() })
                .collect(),
        }
    }

    pub fn from_json(j: &FGLTableJson) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for e in &j.entries {
            entries.insert((e.i, e.j), DualElement::from_poly_terms(&e.poly)?);
        }
        Ok(FGLTable { truncation: j.truncation, entries })
    }
}

type InverseCache = RwLock<HashMap<u32, Arc<QMatrix>>>;

/// Inverse of the pairing matrix `P[m][w] = ⟨(s*)^m, s_w⟩` in weight `n`,
/// rows and columns indexed by `partitions(n)`.
fn inverse_pairing(n: u32) -> Result<Arc<QMatrix>> {
    static CACHE: OnceLock<InverseCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(m) = cache.read().get(&n) {
        return Ok(m.clone());
    }
    let basis = partitions(n);
    let p: QMatrix = basis
        .iter()
        .map(|m| {
            let d = DualElement::monomial(m.clone(), Rational::one());
            basis.iter().map(|w| pairing(&d, &SElement::basis(w.clone()))).collect()
        })
        .collect();
    let inv = Arc::new(inverse(&p).ok_or_else(|| AlgebraError::Inconsistent(format!("pairing matrix singular in weight {n}")))?);
    cache.write().insert(n, inv.clone());
    Ok(inv)
}

/// The element of `S*` whose values on the basis are `values[w] = ⟨λ, s_w⟩`.
pub fn dual_from_values(values: &BTreeMap<MultiIndex, Rational>) -> Result<DualElement> {
    let mut weights: Vec<u32> = values.keys().map(MultiIndex::weight).collect();
    weights.dedup();
    let mut out = DualElement::default();
    for n in weights {
        let basis = partitions(n);
        let inv = inverse_pairing(n)?;
        for (mi, m) in basis.iter().enumerate() {
            let mut c = Rational::zero();
            for (wi, w) in basis.iter().enumerate() {
                if let Some(v) = values.get(w) {
                    c += v * &inv[wi][mi];
                }
            }
            out.add_term(m.clone(), &c);
        }
    }
    Ok(out)
}

fn xy_vars() -> Vars {
    vars(&["x1", "x2"])
}

/// `f` from the proof route: with `φ_t(y) = y + Σ t_k y^(k+1)`, the law
/// `φ_t(φ_t^{-1}(y_1) + φ_t^{-1}(y_2))` has `t`-polynomial coefficients whose
/// coefficient at `t^w` is `⟨α_ij, s_w⟩`; `α_ij` is then read off through the
/// inverse pairing matrix.
pub fn universal_fgl(truncation: u32) -> Result<FGLTable> {
    if truncation == 0 {
        return Err(AlgebraError::Precondition("truncation must be at least 1".into()));
    }
    let t = truncation + 1;
    // t-polynomials reuse the monomial type: t^w is keyed by w
    let mut coeffs = vec![DualElement::default(), DualElement::one_value()];
    coeffs.extend((1..=truncation).map(DualElement::generator));
    let phi = Series::univariate(Variable::new("y", 1), t, &coeffs);
    let phi_inv = phi.revert()?;
    let v = xy_vars();
    let y1 = phi_inv.compose(&[Series::var(&v, t, 0)])?;
    let y2 = phi_inv.compose(&[Series::var(&v, t, 1)])?;
    let law_t = phi.compose(&[&y1 + &y2])?;
    let mut law = Series::zero(&v, t);
    for (e, c) in law_t.terms() {
        law.add_term(e.clone(), &dual_from_values(c.terms())?);
    }
    Ok(FGLTable::from_law(&law, truncation))
}

/// `exp(t) = t + Σ s*_k t^(k+1)` and `log = exp^{-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogPair {
    pub exp: Series<DualElement>,
    pub log: Series<DualElement>,
}

pub fn log_pair(truncation: u32) -> Result<LogPair> {
    if truncation == 0 {
        return Err(AlgebraError::Precondition("truncation must be at least 1".into()));
    }
    let mut coeffs = vec![DualElement::default(), DualElement::one_value()];
    coeffs.extend((1..=truncation).map(DualElement::generator));
    let exp = Series::univariate(Variable::new("t", 1), truncation + 1, &coeffs);
    let log = exp.revert()?.renamed(&vars(&["x"]))?;
    Ok(LogPair { exp, log })
}

/// `f(x_1, x_2) = exp(log x_1 + log x_2)`.
pub fn fgl_from_log(truncation: u32) -> Result<FGLTable> {
    let lp = log_pair(truncation)?;
    let v = xy_vars();
    let t = truncation + 1;
    let l1 = lp.log.compose(&[Series::var(&v, t, 0)])?;
    let l2 = lp.log.compose(&[Series::var(&v, t, 1)])?;
    let law = lp.exp.compose(&[&l1 + &l2])?;
    Ok(FGLTable::from_law(&law, truncation))
}

/// `[CP^m] = (m+1)·[x^(m+1)] log(x)`.
pub fn cp_class(m: u32) -> Result<DualElement> {
    let lp = log_pair(m)?;
    Ok(lp.log.coeff(&[m + 1]).scale(&Rational::from_integer((m + 1).into())))
}

/// `s_w(log x)` for every `w` with `0 < wt w ≤ max_weight`, reporting the
/// multi-indices whose image is nonzero through degree `truncation`.
pub fn log_annihilation_failures(max_weight: u32, truncation: u32) -> Result<Vec<MultiIndex>> {
    let lp = log_pair(truncation.max(1))?;
    let log = lp.log.truncate(truncation);
    Ok(basis_up_to(max_weight)
        .into_iter()
        .filter(|w| !w.is_empty())
        .filter(|w| !act_basis(w, &log).is_zero())
        .collect())
}

/// A one-dimensional formal group law over `S*`, held as a two-variable series.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalGroup {
    law: Series<DualElement>,
}

impl FormalGroup {
    /// Requires `f = x_1 + x_2 + (higher terms)` in exactly two variables.
    pub fn from_law(law: Series<DualElement>) -> Result<Self> {
        if law.vars().len() != 2 {
            return Err(AlgebraError::Precondition("a formal group law has two variables".into()));
        }
        let one = DualElement::one_value();
        if law.coeff(&[1, 0]) != one || law.coeff(&[0, 1]) != one || !law.constant_term().is_zero_value() {
            return Err(AlgebraError::Precondition("law must start with x_1 + x_2".into()));
        }
        Ok(FormalGroup { law })
    }

    pub fn universal(truncation: u32) -> Result<Self> {
        Self::from_law(universal_fgl(truncation)?.law(&xy_vars()))
    }

    /// `x_1 + x_2 - a x_1 x_2`.
    pub fn multiplicative(a: &DualElement, truncation: u32) -> Self {
        let v = xy_vars();
        let mut law = &Series::var(&v, truncation, 0) + &Series::var(&v, truncation, 1);
        law.add_term(vec![1, 1], &a.neg());
        FormalGroup { law }
    }

    pub fn law(&self) -> &Series<DualElement> {
        &self.law
    }

    pub fn truncation(&self) -> u32 {
        self.law.truncation()
    }

    /// `f(a, b)` for series without constant term.
    pub fn apply(&self, a: &Series<DualElement>, b: &Series<DualElement>) -> Result<Series<DualElement>> {
        self.law.compose(&[a.clone(), b.clone()])
    }

    /// Formal sum of the given elements; zero for an empty list.
    pub fn sum(&self, items: &[Series<DualElement>], v: &Vars, trunc: u32) -> Result<Series<DualElement>> {
        let mut acc = Series::zero(v, trunc);
        for (i, s) in items.iter().enumerate() {
            acc = if i == 0 { s.clone() } else { self.apply(&acc, s)? };
        }
        Ok(acc)
    }

    /// `ι(x) = -x + …` with `f(x, ι(x)) = 0`, solved one degree at a time.
    pub fn inverse_series(&self) -> Result<Series<DualElement>> {
        let t = self.truncation();
        let v = vars(&["x"]);
        let x = Series::<DualElement>::var(&v, t, 0);
        let mut iota = x.neg();
        for d in 2..=t {
            let r = self.apply(&x, &iota)?;
            let c = r.coeff(&[d]);
            if !c.is_zero_value() {
                iota.add_term(vec![d], &c.neg());
            }
        }
        let r = self.apply(&x, &iota)?;
        if !r.is_zero() {
            return Err(AlgebraError::Inconsistent("inverse series did not converge".into()));
        }
        Ok(iota)
    }

    /// `f(x, ι(y))` in the variables `x, y`.
    pub fn difference_kernel(&self) -> Result<Series<DualElement>> {
        let t = self.truncation();
        let v = vars(&["x", "y"]);
        let iota = self.inverse_series()?;
        let iy = iota.compose(&[Series::var(&v, t, 1)])?;
        self.apply(&Series::var(&v, t, 0), &iy)
    }

    /// Exact checks of `f(x,0) = x`, `f(x,y) = f(y,x)` and associativity
    /// through the law's truncation; returns the names of failing axioms.
    pub fn axiom_failures(&self) -> Result<Vec<&'static str>> {
        let t = self.truncation();
        let mut out = Vec::new();
        let v1 = vars(&["x"]);
        let x = Series::var(&v1, t, 0);
        let zero = Series::zero(&v1, t);
        if self.apply(&x, &zero)? != x {
            out.push("unit");
        }
        if self.law.permute(&[1, 0]) != self.law {
            out.push("commutativity");
        }
        let v3 = vars(&["x", "y", "z"]);
        let (a, b, c) = (Series::var(&v3, t, 0), Series::var(&v3, t, 1), Series::var(&v3, t, 2));
        let left = self.apply(&self.apply(&a, &b)?, &c)?;
        let right = self.apply(&a, &self.apply(&b, &c)?)?;
        if left != right {
            out.push("associativity");
        }
        Ok(out)
    }
}

/// Writes `p(x)` as `Σ c_k u^k` with `u = x·ι(x)`, eliminating the lowest
/// remaining power of `x` each step. Fails at the first odd power.
pub fn symmetric_reduction(p: &Series<DualElement>, iota: &Series<DualElement>) -> Result<Series<DualElement>> {
    let t = p.truncation().min(iota.truncation());
    let v = vars(&["x"]);
    let p = p.reindexed(&v)?.truncate(t);
    let x = Series::<DualElement>::var(&v, t, 0);
    let u = &x * &iota.reindexed(&v)?.truncate(t);
    let uv: Vars = Arc::new(vec![Variable::new("u", 2)]);
    let mut out = Series::zero(&uv, t);
    let mut residual = p;
    let mut powers = vec![Series::one(&v, t)];
    while let Some(d) = residual.valuation() {
        if d % 2 == 1 {
            return Err(AlgebraError::Irreducible { power: d });
        }
        let k = d / 2;
        while powers.len() <= k as usize {
            let next = &powers[powers.len() - 1] * &u;
            powers.push(next);
        }
        // u^k starts with (-1)^k x^(2k)
        let lead = residual.coeff(&[d]);
        let c = if k % 2 == 0 { lead } else { lead.neg() };
        residual = &residual - &powers[k as usize].mul_coeff(&c);
        out.add_term(vec![k], &c);
    }
    Ok(out)
}
