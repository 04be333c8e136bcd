//! Acceptance run: one PASS/FAIL line per criterion, at the weights the
//! criteria name. Exits nonzero if a criterion fails that is not listed in
//! `KNOWN_RED`.

use std::process::Command;
use std::time::Instant;

use cobord_core::divdiff::{
    self, agree, check_divdiff, compose_divdiff, evaluation_op, gamma_from_square, gamma_predicates, involution,
    is_division, kernel_division_equivalence, lemma12_op, lemma13_op, localization_denominators,
    multiplicative_fgl_op, newton_op, random_lambda_coefficients, reflection_op, shifted_translation_op,
    square_is_gamma, Reflection,
};
use cobord_core::fgl::{cp_class, fgl_from_log, log_annihilation_failures, universal_fgl, FormalGroup};
use cobord_core::hopf::{
    coproduct, coproduct_left_iterated, coproduct_right_iterated, dual_basis_check, multiply,
};
use cobord_core::lattice::{evaluate_certificate, LambdaLattice, Membership};
use cobord_core::milnor::{act, one_dim_rep_eq11, r_star, recover_phi, PhiSeries};
use cobord_core::multiindex::basis_up_to;
use cobord_core::products::{
    associativity_check, condition1_witness, conner_floyd_model, projector_product, solve_alpha, solve_beta,
    theorem1_certificate, mu2_report, theorem3_hypotheses, Branch, ProjectorPair, Solution,
};
use cobord_core::rational::{factorial, is_power_supported, q};
use cobord_core::series::vars;
use cobord_core::verify::{phi_round_trip, mu1_grid};
use cobord_core::{Coeff, DualElement, MultiIndex, Rational, Result, SElement, Series};
use num_bigint::BigInt;

/// Criteria that cannot pass as stated; they still run and print FAIL.
/// 12: the linear Conner-Floyd projector is not idempotent (`Π(x)` has an
/// `α_21·x³` term that `Π(x³)` does not undo).
const KNOWN_RED: &[u32] = &[12];

type Verdict = Result<(bool, String)>;

fn s(k: u32) -> DualElement {
    DualElement::generator(k)
}

fn mi(p: &[u32]) -> MultiIndex {
    MultiIndex::new(p.to_vec())
}

fn all(ok: &[(&str, bool)]) -> (bool, String) {
    let bad: Vec<&str> = ok.iter().filter(|(_, b)| !b).map(|(n, _)| *n).collect();
    if bad.is_empty() {
        (true, ok.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", "))
    } else {
        (false, format!("failed: {}", bad.join(", ")))
    }
}

fn hopf_algebra() -> Verdict {
    let b8 = basis_up_to(8);
    let coassoc = b8.iter().all(|b| coproduct_left_iterated(b) == coproduct_right_iterated(b));
    let counit = b8.iter().all(|b| {
        let d = coproduct(b);
        d.counit_left() == SElement::basis(b.clone()) && d.counit_right() == SElement::basis(b.clone())
    });
    let b6 = basis_up_to(6);
    let mut assoc = true;
    for a in &b6 {
        for b in b6.iter().filter(|b| a.weight() + b.weight() <= 6) {
            let (sa, sb) = (SElement::basis(a.clone()), SElement::basis(b.clone()));
            let ab = multiply(&sa, &sb)?;
            for c in b6.iter().filter(|c| a.weight() + b.weight() + c.weight() <= 6) {
                let sc = SElement::basis(c.clone());
                assoc &= multiply(&ab, &sc)? == multiply(&sa, &multiply(&sb, &sc)?)?;
            }
        }
    }
    let mut commutator = true;
    for n in 1..7u32 {
        for m in 1..=(7 - n) {
            let (sn, sm) = (SElement::single(n), SElement::single(m));
            let c = &multiply(&sn, &sm)? - &multiply(&sm, &sn)?;
            commutator &= c == SElement::single(n + m).scale(&q(m as i64 - n as i64));
        }
    }
    // s_1·s_1 = 2s_2 + 2s_(1,1), worked by hand from the Leibniz rule
    let square = multiply(&SElement::single(1), &SElement::single(1))?
        == SElement::from_terms([(mi(&[2]), q(2)), (mi(&[1, 1]), q(2))]);
    Ok(all(&[
        ("coassociative w<=8", coassoc),
        ("counit w<=8", counit),
        ("associative triples w<=6", assoc),
        ("[s_n,s_m] n+m<=7", commutator),
        ("s1*s1", square),
    ]))
}

fn dual_basis() -> Verdict {
    Ok(all(&[("<m_a, s_b> = delta w<=8", dual_basis_check(8))]))
}

fn formal_group() -> Verdict {
    let t = universal_fgl(8)?;
    let routes = t == fgl_from_log(8)?;
    let axioms = FormalGroup::universal(7)?.axiom_failures()?.is_empty();
    let a11 = t.entry(1, 1) == s(1).scale(&q(2));
    let a12 = t.entry(1, 2) == &s(2).scale(&q(3)) - &s(1).pow(2).scale(&q(2));
    let annihilation = log_annihilation_failures(6, 8)?.is_empty();
    Ok(all(&[
        ("two routes agree w<=8", routes),
        ("axioms through degree 7", axioms),
        ("a11 = 2s1", a11),
        ("a12 = 3s2 - 2s1^2", a12),
        ("log annihilated w<=6", annihilation),
    ]))
}

fn lattice() -> Verdict {
    let t = universal_fgl(8)?;
    let integral = (1..=8u32).all(|n| (1..=n).all(|i| t.entry(i, n + 1 - i).terms().values().all(|c| c.is_integer())));
    let l = LambdaLattice::from_table(&t, 6)?;
    // partition counts p(0..6)
    let ranks = (0..=6).map(|n| l.rank(n)).collect::<Vec<_>>() == [1, 1, 2, 3, 5, 7, 11];
    let multiplier = l.membership(&s(1))? == Membership::NotMember { multiplier: BigInt::from(2) };
    let mut factorials = true;
    for k in 1..=4 {
        let f = s(k).scale(&Rational::from_integer(factorial(k + 1)));
        factorials &= !l.membership(&s(k))?.is_member() && l.membership(&f)?.is_member();
    }
    let mut certificates = true;
    for n in 1..=6u32 {
        for i in 1..=n {
            let e = t.entry(i, n + 1 - i);
            match l.membership(&e)? {
                Membership::Member { coordinates } => certificates &= evaluate_certificate(&t, &coordinates) == e,
                Membership::NotMember { .. } => certificates = false,
            }
        }
    }
    Ok(all(&[
        ("integer coefficients w<=8", integral),
        ("ranks p(n) n<=6", ranks),
        ("s1 needs multiplier 2", multiplier),
        ("(k+1)! s_k in lattice, s_k not, k<=4", factorials),
        ("a_ij certificates evaluate back w<=6", certificates),
    ]))
}

fn cp_classes() -> Verdict {
    let l = LambdaLattice::new(5)?;
    let mut values = true;
    let mut members = true;
    for m in 1..=5 {
        let cp = cp_class(m)?;
        values &= r_star(&SElement::single(m), &cp) == DualElement::constant(q(-(m as i64) - 1));
        members &= l.membership(&cp)?.is_member();
    }
    let combo = &cp_class(1)?.pow(2).scale(&q(3)) - &cp_class(2)?.scale(&q(4));
    let killed = r_star(&SElement::single(1), &combo).is_zero_value();
    Ok(all(&[
        ("s_(m)(CP^m) = -(m+1) m<=5", values),
        ("CP^m in lattice m<=5", members),
        ("s_(1)(3CP1^2 - 4CP2) = 0", killed),
    ]))
}

fn catalogue() -> Verdict {
    let w = 6;
    let ops = cobord_core::verify::catalogue(w)?;
    let mut reports = true;
    let mut kernels = true;
    let mut ore = true;
    let mut failed = Vec::new();
    for op in &ops {
        let r = divdiff::report(op)?.passed();
        let k = kernel_division_equivalence(op)?.consistent;
        let o = divdiff::ore_check(op.carrier(), &*op.partial_map(), &*op.pi_map())?;
        if !(r && k && o) {
            failed.push(op.constructor().to_string());
        }
        (reports, kernels, ore) = (reports && r, kernels && k, ore && o);
    }
    let mut gammas = true;
    for op in ops.iter().filter(|o| matches!(o.constructor(), "newton" | "multiplicative_fgl" | "universal_fgl")) {
        gammas &= gamma_predicates(op, &gamma_from_square(op)?)?.all();
    }
    let newton = newton_op(w)?;
    let c = newton.carrier();
    let newton_laws = square_is_gamma(&newton, &c.zero())?
        && involution(&newton)?
        && agree(&newton.partial(newton.alpha())?, &c.rational(q(2)));
    // ∂(x²) = x + y for (p(x,y) − p(y,x))/(x − y)
    let newton_value = agree(&newton.partial(&(&c.var(0) * &c.var(0)))?, &(&c.var(0) + &c.var(1)));
    let a = universal_fgl(2)?.entry(1, 1);
    let mult = multiplicative_fgl_op(&a, w)?;
    let mult_law = square_is_gamma(&mult, &mult.carrier().constant(a))?;
    let proj = reflection_op(&[q(1), q(-1)], Reflection::Projection, w)?;
    let refl = reflection_op(&[q(1), q(-1)], Reflection::Involution, w)?;
    let reflections = is_division(&proj)? && involution(&refl)? && square_is_gamma(&refl, &refl.carrier().zero())?;
    let (mut verdict, detail) = all(&[
        ("operator reports", reports),
        ("kernel/division/projector agree", kernels),
        ("Ore rule", ore),
        ("gamma identities", gammas),
        ("newton d^2=0, pi^2=1, d(alpha)=2", newton_laws),
        ("newton d(x^2)=x+y", newton_value),
        ("multiplicative d^2 = a d", mult_law),
        ("reflection projection divides, involution squares to 1", reflections),
    ]);
    verdict &= failed.is_empty();
    let detail = if failed.is_empty() { format!("{} operators: {detail}", ops.len()) } else { format!("{detail}; {failed:?}") };
    Ok((verdict, detail))
}

fn composition() -> Verdict {
    let w = 6;
    let ev = evaluation_op(w)?;
    let sh = shifted_translation_op(w)?;
    let proj = reflection_op(&[q(1), q(-1)], Reflection::Projection, w)?;
    let refl = reflection_op(&[q(1), q(-1)], Reflection::Involution, w)?;
    let mut ok = Vec::new();
    for (name, a, b) in [("evaluation/shifted", &ev, &sh), ("projection/involution", &proj, &refl)] {
        let c = compose_divdiff(a, b)?;
        ok.push((name, c.certificate && check_divdiff(&c.op)?));
    }
    // evaluation after p(a) ↦ p(a/2) is still evaluation at 0
    let c = compose_divdiff(&ev, &sh)?;
    let mut same = true;
    for m in ev.carrier().test_set() {
        same &= agree(&c.op.pi(&m.elem)?, &ev.pi(&m.elem)?);
    }
    ok.push(("pi1 pi2 of evaluation/shifted is evaluation", same));
    Ok(all(&ok))
}

fn localized_division_family() -> Verdict {
    let w = 8;
    let t = universal_fgl(2)?;
    // (n, s_(n)(α), α)
    let cases = [(1, 1, s(1)), (1, 2, t.entry(1, 1)), (2, 3, t.entry(1, 2))];
    let mut failed = Vec::new();
    let mut runs = 0;
    for (n, m, alpha) in cases {
        for seed in 1..=3u64 {
            runs += 1;
            let a = random_lambda_coefficients(seed, 2)?;
            let op = lemma12_op(n, &alpha, &a, w)?;
            let report = divdiff::report(&op)?.passed();
            let kills = op.pi(op.alpha())?.is_zero();
            let dens = localization_denominators(&op)?;
            let local = dens.iter().all(|d| is_power_supported(d, &BigInt::from(m)));
            if !(report && kills && local) {
                failed.push(format!("n={n} m={m} seed={seed}"));
            }
        }
    }
    Ok(if failed.is_empty() { (true, format!("{runs} operators at weight {w}")) } else { (false, failed.join(", ")) })
}

fn square_zero_involution_family() -> Verdict {
    let cases = [(1, universal_fgl(2)?.entry(1, 1)), (2, s(2).scale(&q(4)))];
    let mut ok = Vec::new();
    for (n, alpha) in &cases {
        let hi = lemma13_op(*n, alpha, 10)?;
        let lo = lemma13_op(*n, alpha, 8)?;
        let dens = localization_denominators(&lo)?;
        ok.push(involution(&hi)?);
        ok.push(square_is_gamma(&lo, &lo.carrier().zero())? && check_divdiff(&lo)?);
        ok.push(dens.iter().all(|d| is_power_supported(d, &BigInt::from(*n))));
    }
    Ok(all(&[
        ("n=1 pi^2=1 w<=10", ok[0]),
        ("n=1 d^2=0 w<=8", ok[1]),
        ("n=1 denominators", ok[2]),
        ("n=2 pi^2=1 w<=10", ok[3]),
        ("n=2 d^2=0 w<=8", ok[4]),
        ("n=2 denominators", ok[5]),
    ]))
}

fn first_construction() -> Verdict {
    let w = 6;
    let grid = mu1_grid(w)?;
    let mut agree_all = true;
    let mut designed_failure = false;
    let mut both = 0;
    for (a, b) in &grid {
        let r = theorem1_certificate(a, b, w)?;
        agree_all &= r.biconditional && r.commutativity_clause && r.expansion_matches;
        designed_failure |= !r.hypotheses && !r.associativity.associative && r.associativity.witness.is_some();
        both += usize::from(r.hypotheses);
    }
    Ok(all(&[
        ("at least 6 pairs", grid.len() >= 6),
        ("hypotheses <=> associative, commutativity clause", agree_all),
        ("a failing pair with witness", designed_failure),
        ("a passing pair", both > 0),
    ]))
}

fn second_construction() -> Verdict {
    let w = 6;
    let ev = evaluation_op(w)?;
    let r = mu2_report(&ev, &ev.carrier().var(0), w)?;
    let killed = r.branch == Branch::DivisionKillsBeta && r.associativity.associative;
    let n = newton_op(w)?;
    let c = n.carrier();
    let mut newton = true;
    for beta in [c.var(0), &c.var(0) + &c.var(1), &c.var(0) * &c.var(1)] {
        let r = mu2_report(&n, &beta, w)?;
        newton &= r.branch == Branch::SymmetricSquare && r.associativity.associative;
    }
    let r = mu2_report(&ev, &ev.carrier().one(), w)?;
    let rejected = r.branch == Branch::Neither && !r.associativity.associative && r.associativity.witness.is_some();
    Ok(all(&[
        ("evaluation, beta=a", killed),
        ("newton, beta in {x, x+y, xy}", newton),
        ("evaluation, beta=1 non-associative with witness", rejected),
    ]))
}

/// Condition (1), solved α and β, all hypotheses, then associativity of
/// `Π(ΠxΠy)`. Every step is reported, including ones after a failure.
fn projector_model(pair: &ProjectorPair, w: u32) -> Result<(bool, String)> {
    let zero = pair.carrier.zero();
    let mut notes = Vec::new();
    let mut hold = false;
    let (mut alpha, mut beta) = (zero.clone(), zero);
    match condition1_witness(pair, w)? {
        Some(at) => notes.push(format!("Pi^2 = Pi or dPi = d fails at {at}")),
        None => match (solve_alpha(pair, w)?, solve_beta(pair, w)?) {
            (Solution::Solved { value: a, .. }, Solution::Solved { value: b, .. }) => {
                hold = theorem3_hypotheses(pair, &a, &b, w)?.all();
                notes.push(format!("alpha={a}, beta={b}, hypotheses={hold}"));
                (alpha, beta) = (a, b);
            }
            _ => notes.push("alpha or beta inconsistent".into()),
        },
    }
    let r = associativity_check(&projector_product(pair, &alpha, &beta), w)?;
    match &r.witness {
        Some([x, y, z]) => notes.push(format!("non-associative at ({x}, {y}, {z})")),
        None => notes.push(format!("associative on {} triples", r.triples)),
    }
    Ok((hold && r.associative, format!("{}: {}", pair.name, notes.join("; "))))
}

fn third_construction() -> Verdict {
    let w = 5;
    let degenerate = ProjectorPair::multiplicative(&evaluation_op(w)?);
    let mut pass = true;
    let mut details = Vec::new();
    for pair in [degenerate, conner_floyd_model(1, w)?, conner_floyd_model(2, w)?] {
        let (ok, d) = projector_model(&pair, w)?;
        pass &= ok;
        details.push(d);
    }
    Ok((pass, details.join(" | ")))
}

fn phi_series() -> Verdict {
    let round_trip = phi_round_trip(6)?;
    let ordinary = |a: &DualElement, b: &DualElement| Ok(a.mul_ref(b));
    let unit = recover_phi(&ordinary, 6)? == PhiSeries::unit(6);
    Ok(all(&[("recover(eval(Phi)) = Phi w<=6", round_trip), ("ordinary product gives the unit", unit)]))
}

fn milnor_module() -> Verdict {
    let w = 4;
    let v = vars(&["x1", "x2"]);
    let t = 3 * w + 4;
    let one = DualElement::constant(q(1));
    let u = &Series::monomial(&v, t, vec![2, 0], s(1)) + &Series::monomial(&v, t, vec![0, 1], one.clone());
    let e = &Series::monomial(&v, t, vec![1, 1], one) + &Series::monomial(&v, t, vec![1, 0], s(2).scale(&q(-2)));
    let basis = basis_up_to(w);
    let mut cartan = true;
    let mut composition = true;
    for a in &basis {
        let sa = SElement::basis(a.clone());
        let mut split = Series::zero(&v, t);
        for ((l, r), c) in coproduct(a).terms() {
            split = &split + &(&act(&SElement::basis(l.clone()), &u) * &act(&SElement::basis(r.clone()), &e)).scale(c);
        }
        cartan &= act(&sa, &(&u * &e)).eq_through(&split, t);
        for b in basis.iter().filter(|b| a.weight() + b.weight() <= w) {
            let sb = SElement::basis(b.clone());
            composition &= act(&multiply(&sa, &sb)?, &e) == act(&sa, &act(&sb, &e));
        }
    }
    let uv = vars(&["u"]);
    let mono = |k: u32| Series::monomial(&uv, 12, vec![k], q(1));
    let s11 = SElement::basis(mi(&[1, 1]));
    // one_dim_rep_eq11 errors when its two routes disagree
    let cube = one_dim_rep_eq11(&s11, &mono(1))? == mono(3);
    let mut rep_law = true;
    for a in &basis {
        for (i, j) in [(1, 1), (1, 2), (2, 3)] {
            let lhs = one_dim_rep_eq11(&SElement::basis(a.clone()), &(&mono(i) * &mono(j)))?;
            let mut rhs = Series::zero(&uv, 12);
            for ((l, r), c) in coproduct(a).terms() {
                let p = one_dim_rep_eq11(&SElement::basis(l.clone()), &mono(i))?;
                let q = one_dim_rep_eq11(&SElement::basis(r.clone()), &mono(j))?;
                rhs = &rhs + &(&p * &q).scale(c);
            }
            rep_law &= lhs == rhs;
        }
    }
    Ok(all(&[
        ("s_w(uv) splits by the coproduct w<=4", cartan),
        ("(ab)e = a(be) w<=4", composition),
        ("s_(1,1)(u) = u^3, both routes", cube),
        ("one-dimensional representation respects the coproduct w<=4", rep_law),
    ]))
}

fn cobord(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cobord")).args(args).output().expect("binary runs")
}

fn cli_contract() -> Verdict {
    let args = ["verify", "--suite", "all", "--max-weight", "6"];
    let (a, b) = (cobord(&args), cobord(&args));
    let identical = a.stdout == b.stdout && !a.stdout.is_empty();
    let success = a.status.code() == Some(0);
    let fault = cobord(&["verify", "--suite", "products", "--max-weight", "3", "--inject-fault", "perturb_beta"]);
    let named = fault.status.code() == Some(1) && String::from_utf8_lossy(&fault.stderr).contains("identity_with_newton");
    let usage = [
        cobord(&["fgl", "--max-weight", "0"]),
        cobord(&["fgl", "--max-weight", "13"]),
        cobord(&["verify", "--suite", "none"]),
        cobord(&["product-check", "/nonexistent.json"]),
    ]
    .iter()
    .all(|o| o.status.code() == Some(2));
    Ok(all(&[
        ("verify all w=6 byte-identical across runs", identical),
        ("verify all w=6 exits 0", success),
        ("injected fault exits 1 and is named", named),
        ("usage errors exit 2", usage),
    ]))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Verdict); 15] = [
        (1, "Hopf algebra laws", hopf_algebra),
        (2, "dual basis pairing", dual_basis),
        (3, "universal formal group law", formal_group),
        (4, "lattice and integrality", lattice),
        (5, "projective space classes", cp_classes),
        (6, "operator catalogue", catalogue),
        (7, "composition of operators", composition),
        (8, "localized division family", localized_division_family),
        (9, "square-zero involution family", square_zero_involution_family),
        (10, "first product construction", first_construction),
        (11, "second product construction", second_construction),
        (12, "projector product models", third_construction),
        (13, "bilinear operations from series", phi_series),
        (14, "module over the Hopf algebra", milnor_module),
        (15, "CLI determinism and exit codes", cli_contract),
    ];
    let mut unexpected = Vec::new();
    let mut red = 0;
    for (n, title, f) in criteria {
        let start = Instant::now();
        let (pass, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        println!("criterion {n:>2} {}: {title} ({secs:.1}s) {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            red += 1;
            if !KNOWN_RED.contains(&n) {
                unexpected.push(n);
            }
        } else if KNOWN_RED.contains(&n) {
            println!("  criterion {n} passed but is listed as known red");
        }
    }
    println!("{} of {} criteria pass; known red: {KNOWN_RED:?}", 15 - red, 15);
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
