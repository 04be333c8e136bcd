//! Invariant suites behind `cobord verify`. Every check is exact; the report
//! lists checks in a fixed order so identical configurations serialize to
//! identical bytes.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;
use crate::divdiff::{
    self, agree, compose_divdiff, evaluation_op, gamma_from_square, gamma_predicates, kernel_division_equivalence,
    lemma12_op, lemma13_op, multiplicative_fgl_op, newton_op, random_lambda_coefficients, reflection_op,
    shifted_translation_op, universal_fgl_op, DividedDifferenceOp, Elem, Reflection,
};
use crate::dual::DualElement;
use crate::error::{AlgebraError, Result};
use crate::fgl::{cp_class, fgl_from_log, log_annihilation_failures, universal_fgl, FormalGroup};
use crate::hopf::{
    coproduct, coproduct_left_iterated, coproduct_right_iterated, dual_basis_check, multiply, r_star_definitional,
    SElement,
};
use crate::lattice::{LambdaLattice, Membership};
use crate::milnor::{act, one_dim_rep_eq11, r_star, recover_phi, scalar, stable_product_eval, PhiSeries};
use crate::multiindex::{basis_up_to, partitions, MultiIndex};
use crate::products::{
    associativity_check, condition1_witness, mu3, solve_alpha, solve_beta, theorem1_certificate, mu2_report, theorem3_hypotheses,
    ProjectorPair, Solution,
};
use crate::rational::{factorial, q, Rational};
use crate::series::{vars, Series};

pub const DEFAULT_SEED: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Hopf,
    Fgl,
    Divdiff,
    Products,
    All,
}

impl Suite {
    fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Hopf, Suite::Fgl, Suite::Divdiff, Suite::Products],
            s => vec![s],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Suite::Hopf => "hopf",
            Suite::Fgl => "fgl",
            Suite::Divdiff => "divdiff",
            Suite::Products => "products",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hopf" => Ok(Suite::Hopf),
            "fgl" => Ok(Suite::Fgl),
            "divdiff" => Ok(Suite::Divdiff),
            "products" => Ok(Suite::Products),
            "all" => Ok(Suite::All),
            other => Err(AlgebraError::Parse(format!("unknown suite `{other}`"))),
        }
    }
}

/// Deliberate corruptions used to exercise the failure path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Adds 1 to the solved β before the product hypotheses are checked.
    PerturbBeta,
}

impl FromStr for Fault {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perturb_beta" => Ok(Fault::PerturbBeta),
            other => Err(AlgebraError::Parse(format!("unknown fault `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub max_weight: u32,
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl VerifyConfig {
    pub fn new(max_weight: u32) -> Self {
        VerifyConfig { max_weight, seed: DEFAULT_SEED, fault: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub weight: u32,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub max_weight: u32,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

struct Recorder {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Recorder {
    fn new(suite: Suite) -> Self {
        Recorder { suite: suite.name(), checks: Vec::new() }
    }

    fn push(&mut self, name: impl Into<String>, weight: u32, pass: bool) {
        self.push_detail(name, weight, pass, None);
    }

    fn push_detail(&mut self, name: impl Into<String>, weight: u32, pass: bool, detail: Option<String>) {
        self.checks.push(Check { suite: self.suite.into(), name: name.into(), weight, pass, detail });
    }

    /// Records a check whose evaluation may error; an error is a failure
    /// carrying its message.
    fn run(&mut self, name: impl Into<String>, weight: u32, f: impl FnOnce() -> Result<bool>) {
        match f() {
            Ok(pass) => self.push(name, weight, pass),
            Err(e) => self.push_detail(name, weight, false, Some(e.to_string())),
        }
    }
}

pub fn run(suite: Suite, config: &VerifyConfig) -> Result<VerifyReport> {
    if config.max_weight == 0 {
        return Err(AlgebraError::Precondition("max_weight must be at least 1".into()));
    }
    let mut checks = Vec::new();
    for part in suite.parts() {
        let mut rec = Recorder::new(part);
        match part {
            Suite::Hopf => hopf_suite(&mut rec, config),
            Suite::Fgl => fgl_suite(&mut rec, config),
            Suite::Divdiff => divdiff_suite(&mut rec, config),
            Suite::Products => products_suite(&mut rec, config),
            Suite::All => unreachable!(),
        }
        checks.extend(rec.checks);
    }
    Ok(VerifyReport {
        suite,
        max_weight: config.max_weight,
        seed: config.seed,
        passed: checks.iter().all(|c| c.pass),
        checks,
    })
}

// ---------------------------------------------------------------------------
// hopf

fn triples_associative(w: u32) -> Result<bool> {
    let basis = basis_up_to(w);
    for a in &basis {
        for b in &basis {
            if a.weight() + b.weight() > w {
                continue;
            }
            let ab = multiply(&SElement::basis(a.clone()), &SElement::basis(b.clone()))?;
            for c in &basis {
                if a.weight() + b.weight() + c.weight() > w {
                    continue;
                }
                let sc = SElement::basis(c.clone());
                let bc = multiply(&SElement::basis(b.clone()), &sc)?;
                if multiply(&ab, &sc)? != multiply(&SElement::basis(a.clone()), &bc)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn commutator_law(w: u32) -> Result<bool> {
    for n in 1..w {
        for m in 1..=(w - n) {
            let (sn, sm) = (SElement::single(n), SElement::single(m));
            let c = &multiply(&sn, &sm)? - &multiply(&sm, &sn)?;
            if c != SElement::single(n + m).scale(&q(m as i64 - n as i64)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `s_w(uv) = Σ s_w'(u)s_w''(v)` and `(ab)(e) = a(b(e))` on fixed elements.
fn milnor_module_law(w: u32) -> Result<bool> {
    let v = vars(&["x1", "x2"]);
    let t = 3 * w + 4;
    let s = DualElement::generator;
    let u = &Series::monomial(&v, t, vec![1, 0], &s(1) + &s(2)) + &Series::monomial(&v, t, vec![0, 1], DualElement::constant(q(1)));
    let e = &Series::monomial(&v, t, vec![1, 1], s(1).pow(2)) + &Series::monomial(&v, t, vec![0, 2], DualElement::constant(q(3)));
    let basis = basis_up_to(w);
    for a in &basis {
        let sa = SElement::basis(a.clone());
        let mut split = Series::zero(&v, t);
        for ((l, r), c) in coproduct(a).terms() {
            let part = &act(&SElement::basis(l.clone()), &u) * &act(&SElement::basis(r.clone()), &e);
            split = &split + &part.scale(c);
        }
        if !act(&sa, &(&u * &e)).eq_through(&split, t) {
            return Ok(false);
        }
        for b in &basis {
            if a.weight() + b.weight() > w {
                continue;
            }
            let sb = SElement::basis(b.clone());
            if act(&multiply(&sa, &sb)?, &e) != act(&sa, &act(&sb, &e)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The one-dimensional representation: both routes agree (an error
/// otherwise), it is a module over the coproduct, and `s_(1,1)(u) = u³`.
fn one_dim_representation(w: u32) -> Result<bool> {
    let uv = vars(&["u"]);
    let t = 2 * w + 6;
    let mono = |k: u32| Series::monomial(&uv, t, vec![k], q(1));
    let s11 = SElement::basis(MultiIndex::new(vec![1, 1]));
    if one_dim_rep_eq11(&s11, &mono(1))? != mono(3) {
        return Ok(false);
    }
    for a in basis_up_to(w) {
        let sa = SElement::basis(a.clone());
        for i in 0..=3 {
            for j in 0..=3 {
                let lhs = one_dim_rep_eq11(&sa, &(&mono(i) * &mono(j)))?;
                let mut rhs = Series::zero(&uv, t);
                for ((l, r), c) in coproduct(&a).terms() {
                    let p = one_dim_rep_eq11(&SElement::basis(l.clone()), &mono(i))?;
                    let q = one_dim_rep_eq11(&SElement::basis(r.clone()), &mono(j))?;
                    rhs = &rhs + &(&p * &q).scale(c);
                }
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// A Φ-series with one coefficient in every term of weight `≤ w`, built
/// from a fixed rule so the round trip is not tested only on the unit.
pub fn sample_phi(w: u32) -> PhiSeries {
    let mut phi = PhiSeries::new(w);
    let basis = basis_up_to(w);
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let n = a.weight() + b.weight();
            if n > w {
                continue;
            }
            let c = if a.is_empty() && b.is_empty() {
                DualElement::one_value()
            } else if (i + 2 * j) % 3 == 0 {
                // coefficients of weight 0 or 1 keep products honest
                DualElement::constant(q((i as i64 % 5) - 2))
            } else {
                DualElement::generator(1).scale(&q(j as i64 % 4 - 1))
            };
            if !c.is_zero_value() {
                phi.add_term(a.clone(), b.clone(), &c);
            }
        }
    }
    phi
}

/// `recover_phi ∘ stable_product_eval = id` on `sample_phi(w)`.
pub fn phi_round_trip(w: u32) -> Result<bool> {
    let phi = sample_phi(w);
    let oracle = |a: &DualElement, b: &DualElement| {
        Ok(stable_product_eval(&phi, &scalar(a, 0), &scalar(b, 0))?.constant_term())
    };
    let back = recover_phi(&oracle, w)?;
    Ok(back == truncate_phi(&phi, w))
}

fn truncate_phi(phi: &PhiSeries, w: u32) -> PhiSeries {
    let mut out = PhiSeries::new(w);
    for ((a, b), c) in &phi.terms {
        out.add_term(a.clone(), b.clone(), c);
    }
    out
}

fn hopf_suite(rec: &mut Recorder, cfg: &VerifyConfig) {
    let w = cfg.max_weight;
    rec.push("coassociativity", w, basis_up_to(w).iter().all(|b| coproduct_left_iterated(b) == coproduct_right_iterated(b)));
    rec.push(
        "counit",
        w,
        basis_up_to(w).iter().all(|b| {
            let d = coproduct(b);
            d.counit_left() == SElement::basis(b.clone()) && d.counit_right() == SElement::basis(b.clone())
        }),
    );
    let wa = w.min(6);
    rec.run("product_associativity", wa, || triples_associative(wa));
    rec.run("commutator_law", w, || commutator_law(w));
    rec.push("dual_basis", w, dual_basis_check(w));
    let wr = w.min(5);
    rec.run("r_star_routes", wr, || {
        for n in 0..=wr {
            for m in partitions(n) {
                let lam = DualElement::monomial(m, Rational::from_integer(1.into()));
                for b in basis_up_to(n) {
                    let a = SElement::basis(b);
                    if r_star(&a, &lam) != r_star_definitional(&a, &lam)? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    });
    let wm = w.min(4);
    rec.run("milnor_module_law", wm, || milnor_module_law(wm));
    rec.run("one_dimensional_representation", wm, || one_dim_representation(wm));
    let wp = w.min(6);
    rec.run("phi_round_trip", wp, || phi_round_trip(wp));
    rec.run("phi_of_ordinary_product", wp, || {
        let ordinary = |a: &DualElement, b: &DualElement| Ok(a.mul_ref(b));
        Ok(recover_phi(&ordinary, wp)? == PhiSeries::unit(wp))
    });
}

// ---------------------------------------------------------------------------
// fgl

fn fgl_suite(rec: &mut Recorder, cfg: &VerifyConfig) {
    let w = cfg.max_weight;
    let table = universal_fgl(w);
    rec.run("log_route_agrees", w, || Ok(universal_fgl(w)? == fgl_from_log(w)?));
    rec.run("integral_coefficients", w, || {
        let t = universal_fgl(w)?;
        Ok((1..=w).all(|n| (1..=n).all(|i| t.entry(i, n + 1 - i).terms().values().all(|c| c.is_integer()))))
    });
    rec.run("axioms", w.min(7), || Ok(FormalGroup::universal(w.min(7))?.axiom_failures()?.is_empty()));
    rec.run("spot_values", 2.min(w), || {
        let t = table.clone()?;
        let s = DualElement::generator;
        let mut ok = t.entry(1, 1) == s(1).scale(&q(2));
        if w >= 2 {
            ok &= t.entry(1, 2) == &s(2).scale(&q(3)) - &s(1).pow(2).scale(&q(2));
        }
        Ok(ok)
    });
    let wl = w.min(6);
    rec.run("log_annihilation", wl, || Ok(log_annihilation_failures(wl, w + 2)?.is_empty()));
    rec.run("lattice_ranks", wl, || {
        let l = LambdaLattice::new(wl)?;
        Ok((0..=wl).all(|n| l.rank(n) == partitions(n).len()))
    });
    rec.run("lattice_multiplier", 1, || {
        let l = LambdaLattice::new(1)?;
        Ok(l.membership(&DualElement::generator(1))? == Membership::NotMember { multiplier: BigInt::from(2) })
    });
    let wk = w.min(4);
    rec.run("factorial_multiples", wk, || {
        let l = LambdaLattice::new(wk)?;
        for k in 1..=wk {
            let s = DualElement::generator(k);
            let f = s.scale(&Rational::from_integer(factorial(k + 1)));
            if l.membership(&s)?.is_member() || !l.membership(&f)?.is_member() {
                return Ok(false);
            }
        }
        Ok(true)
    });
    let wc = w.min(5);
    rec.run("cp_classes", wc, || {
        let l = LambdaLattice::new(wc)?;
        for m in 1..=wc {
            let cp = cp_class(m)?;
            if r_star(&SElement::single(m), &cp) != DualElement::constant(q(-(m as i64) - 1)) {
                return Ok(false);
            }
            if !l.membership(&cp)?.is_member() {
                return Ok(false);
            }
        }
        Ok(true)
    });
    if w >= 2 {
        rec.run("cp_combination", 2, || {
            let u = &cp_class(1)?.pow(2).scale(&q(3)) - &cp_class(2)?.scale(&q(4));
            Ok(r_star(&SElement::single(1), &u).is_zero_value())
        });
    }
}

// ---------------------------------------------------------------------------
// divdiff

/// The catalogue at check weight `w`, in report order.
pub fn catalogue(w: u32) -> Result<Vec<DividedDifferenceOp>> {
    let table = universal_fgl(w.max(2))?;
    let mut ops = vec![
        evaluation_op(w)?,
        shifted_translation_op(w)?,
        reflection_op(&[q(1), q(0)], Reflection::Projection, w)?,
        reflection_op(&[q(1), q(1)], Reflection::Projection, w)?,
        reflection_op(&[q(1), q(-1)], Reflection::Involution, w)?,
        newton_op(w)?,
        multiplicative_fgl_op(&table.entry(1, 1), w)?,
        universal_fgl_op(w)?,
        lemma12_op(1, &table.entry(1, 1), &[], w)?,
        lemma13_op(1, &table.entry(1, 1), w)?,
    ];
    ops.push(lemma12_op(2, &table.entry(1, 2), &[], w)?);
    Ok(ops)
}

fn label(op: &DividedDifferenceOp) -> String {
    format!("{} {}", op.constructor(), op.params())
}

/// `lemma12_op` cases `(n, m)` with their `α`.
pub fn lemma12_cases(w: u32) -> Result<Vec<(u32, u32, DualElement)>> {
    let table = universal_fgl(w.max(2))?;
    Ok(vec![
        (1, 1, DualElement::generator(1)),
        (1, 2, table.entry(1, 1)),
        (2, 3, table.entry(1, 2)),
    ])
}

/// `lemma13_op` cases with `s_(n)(α) = 2n`.
pub fn lemma13_cases(w: u32) -> Result<Vec<(u32, DualElement)>> {
    let table = universal_fgl(w.max(2))?;
    Ok(vec![(1, table.entry(1, 1)), (2, DualElement::generator(2).scale(&q(4)))])
}

fn divdiff_suite(rec: &mut Recorder, cfg: &VerifyConfig) {
    let w = cfg.max_weight;
    let ops = match catalogue(w) {
        Ok(o) => o,
        Err(e) => {
            rec.push_detail("catalogue", w, false, Some(e.to_string()));
            return;
        }
    };
    for op in &ops {
        let name = label(op);
        match divdiff::report(op) {
            Ok(r) => {
                for c in r.checks {
                    rec.push(format!("{name}: {}", c.name), c.weight, c.pass);
                }
            }
            Err(e) => rec.push_detail(format!("{name}: report"), w, false, Some(e.to_string())),
        }
        rec.run(format!("{name}: kernel_division"), w, || Ok(kernel_division_equivalence(op)?.consistent));
        rec.run(format!("{name}: ore_rule"), w, || {
            let (d, p) = (op.partial_map(), op.pi_map());
            divdiff::ore_check(op.carrier(), &*d, &*p)
        });
    }
    for op in ops.iter().filter(|o| matches!(o.constructor(), "newton" | "multiplicative_fgl" | "universal_fgl")) {
        rec.run(format!("{}: gamma_identities", label(op)), w, || {
            let g = gamma_from_square(op)?;
            Ok(gamma_predicates(op, &g)?.all())
        });
    }
    rec.run("newton: partial_alpha_is_2", w, || {
        let n = &ops[5];
        Ok(agree(&n.partial(n.alpha())?, &n.carrier().rational(q(2))))
    });
    let pairs = [(0usize, 1usize), (3, 3), (2, 2)];
    for (i, j) in pairs {
        rec.run(format!("composition {} / {}", label(&ops[i]), label(&ops[j])), w, || {
            let c = compose_divdiff(&ops[i], &ops[j])?;
            Ok(c.certificate && divdiff::check_divdiff(&c.op)?)
        });
    }
    lemma_families(rec, cfg, w, w);
}

/// The `lemma12_op` and `lemma13_op` families at the given weights, recorded by name.
pub fn lemma_families_checks(cfg: &VerifyConfig, w12: u32, w13: u32) -> Vec<Check> {
    let mut rec = Recorder::new(Suite::Divdiff);
    lemma_families(&mut rec, cfg, w12, w13);
    rec.checks
}

fn lemma_families(rec: &mut Recorder, cfg: &VerifyConfig, w12: u32, w13: u32) {
    let cases = match lemma12_cases(w12) {
        Ok(c) => c,
        Err(e) => return rec.push_detail("lemma12", w12, false, Some(e.to_string())),
    };
    for (n, m, alpha) in cases {
        for k in 0..3 {
            let seed = cfg.seed.wrapping_add(k);
            let name = format!("lemma12 n={n} m={m} seed={seed}");
            rec.run(name, w12, || {
                let a = random_lambda_coefficients(seed, 2)?;
                let op = lemma12_op(n, &alpha, &a, w12)?;
                let r = divdiff::report(&op)?;
                let kills = op.pi(op.alpha())?.is_zero();
                let dens = divdiff::localization_denominators(&op)?;
                let m = BigInt::from(m);
                Ok(r.passed() && kills && dens.iter().all(|d| crate::rational::is_power_supported(d, &m)))
            });
        }
    }
    let cases = match lemma13_cases(w13) {
        Ok(c) => c,
        Err(e) => return rec.push_detail("lemma13", w13, false, Some(e.to_string())),
    };
    for (n, alpha) in cases {
        rec.run(format!("lemma13 n={n}"), w13, || {
            let op = lemma13_op(n, &alpha, w13)?;
            Ok(divdiff::report(&op)?.passed())
        });
    }
}

// ---------------------------------------------------------------------------
// products

/// Operator pairs for the `μ_1` grid, with whether they are expected to
/// satisfy the division+commuting hypotheses.
pub fn mu1_grid(w: u32) -> Result<Vec<(DividedDifferenceOp, DividedDifferenceOp)>> {
    let proj = |a: i64, b: i64| reflection_op(&[q(a), q(b)], Reflection::Projection, w);
    let ev = evaluation_op(w)?;
    let l12 = lemma12_op(1, &DualElement::generator(1), &[], w)?;
    Ok(vec![
        (proj(1, 0)?, proj(0, 1)?),
        (proj(1, 1)?, proj(1, -1)?),
        (proj(1, 0)?, proj(1, 0)?),
        (proj(1, 0)?, proj(1, 1)?),
        (reflection_op(&[q(1), q(0)], Reflection::Involution, w)?, reflection_op(&[q(1), q(0)], Reflection::Involution, w)?),
        (newton_op(w)?, newton_op(w)?),
        (ev.clone(), ev.clone()),
        (ev, shifted_translation_op(w)?),
        (l12.clone(), l12),
    ])
}

fn products_suite(rec: &mut Recorder, cfg: &VerifyConfig) {
    let w = cfg.max_weight;
    match mu1_grid(w) {
        Ok(grid) => {
            for (a, b) in &grid {
                let name = format!("mu1 {} / {}", label(a), label(b));
                match theorem1_certificate(a, b, w) {
                    Ok(r) => rec.push_detail(
                        name,
                        w,
                        r.biconditional && r.commutativity_clause && r.expansion_matches,
                        Some(format!(
                            "hypotheses={} associative={} commutative={}",
                            r.hypotheses, r.associativity.associative, r.commutative
                        )),
                    ),
                    Err(e) => rec.push_detail(name, w, false, Some(e.to_string())),
                }
            }
        }
        Err(e) => rec.push_detail("mu1 grid", w, false, Some(e.to_string())),
    }

    rec.run("mu2 evaluation beta=a", w, || {
        let ev = evaluation_op(w)?;
        let r = mu2_report(&ev, &ev.carrier().var(0), w)?;
        Ok(r.consistent && r.associativity.associative)
    });
    for (i, beta) in ["x", "x+y", "xy"].iter().enumerate() {
        rec.run(format!("mu2 newton beta={beta}"), w, || {
            let n = newton_op(w)?;
            let c = n.carrier();
            let b = match i {
                0 => c.var(0),
                1 => &c.var(0) + &c.var(1),
                _ => &c.var(0) * &c.var(1),
            };
            let r = mu2_report(&n, &b, w)?;
            Ok(r.consistent && r.associativity.associative)
        });
    }
    // the first witness (a, a, a²) has weight 4
    let wf = w.max(4);
    rec.run("mu2 evaluation beta=1 rejected", wf, || {
        let ev = evaluation_op(wf)?;
        let r = mu2_report(&ev, &ev.carrier().one(), wf)?;
        Ok(r.consistent && !r.associativity.associative && r.associativity.witness.is_some())
    });

    let w3 = w.min(5);
    let models: Vec<(&str, Result<ProjectorPair>)> = vec![
        ("degenerate", evaluation_op(w3).map(|op| ProjectorPair::multiplicative(&op))),
        (
            "lemma12_with_zero_delta",
            random_lambda_coefficients(cfg.seed, 2)
                .and_then(|a| lemma12_op(1, &DualElement::generator(1), &a, w3))
                .map(|op| ProjectorPair::multiplicative(&op)),
        ),
        ("identity_with_newton", newton_op(w3).map(|op| ProjectorPair::identity_with(&op))),
    ];
    for (name, pair) in models {
        rec.run(format!("mu3 {name}"), w3, || mu3_check(&pair?, w3, cfg.fault));
    }
    for k in 1..=2 {
        let name = format!("mu3 conner_floyd k={k}: hypotheses imply associativity");
        match crate::products::conner_floyd_model(k, w3).and_then(|p| mu3_implication(&p, w3)) {
            Ok((pass, detail)) => rec.push_detail(name, w3, pass, Some(detail)),
            Err(e) => rec.push_detail(name, w3, false, Some(e.to_string())),
        }
    }
    rec.run("solve_beta detects inconsistency", w3, || {
        Ok(matches!(solve_beta(&ProjectorPair::linear_truncation(w3), w3)?, Solution::Inconsistent { .. }))
    });
}

fn solved(s: Solution) -> Option<Elem> {
    match s {
        Solution::Solved { value, .. } => Some(value),
        Solution::Inconsistent { .. } => None,
    }
}

/// Solves `α` and `β`, requires the hypotheses to hold with them, and sweeps
/// `μ_3` for associativity.
pub fn mu3_check(pair: &ProjectorPair, w: u32, fault: Option<Fault>) -> Result<bool> {
    let (Some(alpha), Some(mut beta)) = (solved(solve_alpha(pair, w)?), solved(solve_beta(pair, w)?)) else {
        return Ok(false);
    };
    if fault == Some(Fault::PerturbBeta) {
        beta = &beta + &pair.carrier.one();
    }
    if !theorem3_hypotheses(pair, &alpha, &beta, w)?.all() {
        return Ok(false);
    }
    let (mu, _) = mu3(pair, &alpha, &beta, w)?;
    Ok(associativity_check(&mu, w)?.associative)
}

/// Whether "hypotheses (1)–(3) hold for some `α, β`" implies associativity
/// of `Π(ΠxΠy)`, with a description of which side decided it.
pub fn mu3_implication(pair: &ProjectorPair, w: u32) -> Result<(bool, String)> {
    if let Some(at) = condition1_witness(pair, w)? {
        return Ok((true, format!("hypothesis (1) fails at {at}")));
    }
    let Some(alpha) = solved(solve_alpha(pair, w)?) else {
        return Ok((true, "no α satisfies hypothesis (2)".into()));
    };
    let Some(beta) = solved(solve_beta(pair, w)?) else {
        return Ok((true, "no β satisfies hypothesis (3)".into()));
    };
    if !theorem3_hypotheses(pair, &alpha, &beta, w)?.all() {
        return Ok((true, "hypotheses fail with the solved α, β".into()));
    }
    let (mu, _) = mu3(pair, &alpha, &beta, w)?;
    let r = associativity_check(&mu, w)?;
    Ok((r.associative, format!("hypotheses hold; associative={}", r.associative)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_at_low_weight() {
        let r = run(Suite::All, &VerifyConfig::new(3)).unwrap();
        let bad: Vec<_> = r.failures().collect();
        assert!(r.passed, "{bad:#?}");
        assert!(r.checks.iter().any(|c| c.suite == "products"));
    }

    #[test]
    fn fault_is_detected() {
        let cfg = VerifyConfig { fault: Some(Fault::PerturbBeta), ..VerifyConfig::new(3) };
        let r = run(Suite::Products, &cfg).unwrap();
        assert!(!r.passed);
        let failed: Vec<&str> = r.failures().map(|c| c.name.as_str()).collect();
        assert_eq!(failed, ["mu3 identity_with_newton"]);
    }

    #[test]
    fn suite_names_round_trip() {
        for s in [Suite::Hopf, Suite::Fgl, Suite::Divdiff, Suite::Products, Suite::All] {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
        assert!(run(Suite::Hopf, &VerifyConfig::new(0)).is_err());
    }

    #[test]
    fn sample_phi_round_trips() {
        assert!(phi_round_trip(3).unwrap());
    }
}
