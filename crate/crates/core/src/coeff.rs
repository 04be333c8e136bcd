//! The coefficient rings series are built over.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::Rational;

/// A commutative Q-algebra usable as a series coefficient.
pub trait Coeff: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero_value() -> Self;
    fn one_value() -> Self;
    fn from_rational(r: Rational) -> Self;
    fn is_zero_value(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn sub_assign_ref(&mut self, other: &Self);
    fn neg(&self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn scale(&self, r: &Rational) -> Self;
    /// `Some(r)` when the element is the constant `r`.
    fn as_rational(&self) -> Option<Rational>;
    /// Distinct denominators occurring in the element.
    fn denominators(&self) -> Vec<BigInt>;

    fn is_integral(&self) -> bool {
        self.denominators().iter().all(|d| d.is_one())
    }
}

impl Coeff for Rational {
    fn zero_value() -> Self {
        Zero::zero()
    }
    fn one_value() -> Self {
        One::one()
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn is_zero_value(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn denominators(&self) -> Vec<BigInt> {
        if self.denom().is_one() {
            vec![]
        } else {
            vec![self.denom().clone()]
        }
    }
}
