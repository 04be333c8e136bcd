//! The subring `Λ ⊂ S*` generated over the integers by the `α_ij`, one
//! weight at a time, as an integer lattice in monomial coordinates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::coeff::Coeff;
use crate::dual::DualElement;
use crate::error::{AlgebraError, Result};
use crate::fgl::{universal_fgl, FGLTable};
use crate::linalg::{hermite, solve_left, QMatrix, ZMatrix};
use crate::multiindex::{partitions, MultiIndex};
use crate::rational::Rational;

/// A product `α_(i_1 j_1) ⋯ α_(i_r j_r)`, stored as its sorted index pairs.
pub type AlphaMonomial = Vec<(u32, u32)>;

#[derive(Clone, Debug)]
struct Level {
    monomials: Vec<MultiIndex>,
    generators: Vec<AlphaMonomial>,
    /// Nonzero rows of the Hermite form: a lattice basis.
    basis: ZMatrix,
    /// Row `r` expresses `basis[r]` in the generators.
    transform: ZMatrix,
}

/// `Λ` in weights `0..=max_weight`.
#[derive(Clone, Debug)]
pub struct LambdaLattice {
    max_weight: u32,
    levels: Vec<Level>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// Integer coordinates with respect to products of the `α_ij`.
    Member { coordinates: Vec<(AlphaMonomial, BigInt)> },
    /// The least positive `q` with `q·d ∈ Λ`.
    NotMember { multiplier: BigInt },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }

    pub fn multiplier(&self) -> BigInt {
        match self {
            Membership::Member { .. } => BigInt::one(),
            Membership::NotMember { multiplier } => multiplier.clone(),
        }
    }
}

/// Index pairs `(i, j)`, `i ≤ j`, of weight `i + j - 1 = p`.
fn pairs_of_weight(p: u32) -> Vec<(u32, u32)> {
    (1..=(p + 1) / 2).map(|i| (i, p + 1 - i)).collect()
}

/// Multisets of index pairs of total weight `n`, each listed in
/// non-decreasing order.
fn alpha_monomials(n: u32) -> Vec<AlphaMonomial> {
    let mut all_pairs: Vec<(u32, u32)> = (1..=n).flat_map(pairs_of_weight).collect();
    all_pairs.sort();
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(pairs: &[(u32, u32)], start: usize, left: u32, cur: &mut Vec<(u32, u32)>, out: &mut Vec<AlphaMonomial>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for k in start..pairs.len() {
            let w = pairs[k].0 + pairs[k].1 - 1;
            if w <= left {
                cur.push(pairs[k]);
                rec(pairs, k, left - w, cur, out);
                cur.pop();
            }
        }
    }
    rec(&all_pairs, 0, n, &mut current, &mut out);
    out
}

fn integer_coords(d: &DualElement, monomials: &[MultiIndex]) -> Result<Vec<BigInt>> {
    monomials
        .iter()
        .map(|m| {
            let c = d.coeff(m);
            if c.denom().is_one() {
                Ok(c.numer().clone())
            } else {
                Err(AlgebraError::Inconsistent(format!("non-integral coefficient {c} in a generator")))
            }
        })
        .collect()
}

impl LambdaLattice {
    pub fn new(max_weight: u32) -> Result<Self> {
        let table = universal_fgl(max_weight.max(1))?;
        Self::from_table(&table, max_weight)
    }

    pub fn from_table(table: &FGLTable, max_weight: u32) -> Result<Self> {
        if max_weight > table.truncation {
            return Err(AlgebraError::WeightOutOfRange { requested: max_weight, available: table.truncation });
        }
        let mut levels = Vec::new();
        for n in 0..=max_weight {
            let monomials = partitions(n);
            let generators = alpha_monomials(n);
            let mut rows: ZMatrix = Vec::with_capacity(generators.len());
            for g in &generators {
                let mut p = DualElement::one_value();
                for &(i, j) in g {
                    p = p.mul_ref(&table.entry(i, j));
                }
                rows.push(integer_coords(&p, &monomials)?);
            }
            let (h, u) = hermite(&rows);
            let keep: Vec<usize> = (0..h.len()).filter(|&r| h[r].iter().any(|x| !x.is_zero())).collect();
            levels.push(Level {
                monomials,
                generators,
                basis: keep.iter().map(|&r| h[r].clone()).collect(),
                transform: keep.iter().map(|&r| u[r].clone()).collect(),
            });
        }
        Ok(LambdaLattice { max_weight, levels })
    }

    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }

    pub fn rank(&self, n: u32) -> usize {
        self.levels[n as usize].basis.len()
    }

    /// Lattice basis in weight `n` as elements of `S*`.
    pub fn basis(&self, n: u32) -> Vec<DualElement> {
        let level = &self.levels[n as usize];
        level
            .basis
            .iter()
            .map(|row| {
                DualElement::from_terms(
                    level.monomials.iter().zip(row).map(|(m, c)| (m.clone(), Rational::from_integer(c.clone()))),
                )
            })
            .collect()
    }

    /// Decides `d ∈ Λ` for homogeneous `d`.
    pub fn membership(&self, d: &DualElement) -> Result<Membership> {
        if d.is_zero_value() {
            return Ok(Membership::Member { coordinates: Vec::new() });
        }
        let n = d.homogeneous_weight()?;
        if n > self.max_weight {
            return Err(AlgebraError::WeightOutOfRange { requested: n, available: self.max_weight });
        }
        let level = &self.levels[n as usize];
        let target: Vec<Rational> = level.monomials.iter().map(|m| d.coeff(m)).collect();
        let b: QMatrix = level
            .basis
            .iter()
            .map(|row| row.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect();
        let y = solve_left(&b, &target)
            .ok_or_else(|| AlgebraError::Inconsistent(format!("element outside the rational span in weight {n}")))?;
        let mut q = BigInt::one();
        for c in &y {
            q = q.lcm(c.denom());
        }
        if !q.is_one() {
            return Ok(Membership::NotMember { multiplier: q });
        }
        let mut coords = vec![BigInt::zero(); level.generators.len()];
        for (yr, urow) in y.iter().zip(&level.transform) {
            let yr = yr.numer();
            for (c, u) in coords.iter_mut().zip(urow) {
                *c += yr * u;
            }
        }
        Ok(Membership::Member {
            coordinates: level
                .generators
                .iter()
                .cloned()
                .zip(coords)
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        })
    }
}

/// Evaluates a certificate back to an element of `S*`.
pub fn evaluate_certificate(table: &FGLTable, coords: &[(AlphaMonomial, BigInt)]) -> DualElement {
    let mut out = DualElement::default();
    for (g, c) in coords {
        let mut p = DualElement::constant(Rational::from_integer(c.clone()));
        for &(i, j) in g {
            p = p.mul_ref(&table.entry(i, j));
        }
        out.add_assign_ref(&p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgl::cp_class;
    use crate::rational::{factorial, q};

    #[test]
    fn weight_one_lattice() {
        let l = LambdaLattice::new(4).unwrap();
        assert_eq!(l.basis(1), vec![DualElement::generator(1).scale(&q(2))]);
        let m = l.membership(&DualElement::generator(1)).unwrap();
        assert_eq!(m, Membership::NotMember { multiplier: BigInt::from(2) });
    }

    #[test]
    fn ranks_are_partition_counts() {
        let l = LambdaLattice::new(6).unwrap();
        for (n, p) in [1usize, 1, 2, 3, 5, 7, 11].iter().enumerate() {
            assert_eq!(l.rank(n as u32), *p);
        }
    }

    #[test]
    fn factorial_multiples_of_generators() {
        let table = universal_fgl(4).unwrap();
        let l = LambdaLattice::from_table(&table, 4).unwrap();
        for k in 1..=4u32 {
            let s = DualElement::generator(k);
            assert!(!l.membership(&s).unwrap().is_member());
            let f = s.scale(&Rational::from_integer(factorial(k + 1)));
            match l.membership(&f).unwrap() {
                Membership::Member { coordinates } => {
                    assert_eq!(evaluate_certificate(&table, &coordinates), f);
                }
                other => panic!("{other:?}"),
            }
        }
        assert!(l.membership(&table.entry(1, 1)).unwrap().is_member());
        for m in 1..=4 {
            assert!(l.membership(&cp_class(m).unwrap()).unwrap().is_member());
        }
    }

    #[test]
    fn weight_two_coefficient_of_s2_is_divisible_by_three() {
        let l = LambdaLattice::new(2).unwrap();
        for b in l.basis(2) {
            let c = b.coeff(&MultiIndex::single(2));
            assert!(c.numer().is_multiple_of(&BigInt::from(3)));
        }
    }
}
