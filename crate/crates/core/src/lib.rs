//! Exact computer algebra for the Landweber-Novikov Hopf algebra, the
//! universal formal group law over its dual, and divided difference
//! operators with the associative products they generate.

pub mod coeff;
pub mod divdiff;
pub mod dual;
pub mod error;
pub mod fgl;
pub mod hopf;
pub mod lattice;
pub mod linalg;
pub mod milnor;
pub mod multiindex;
pub mod products;
pub mod rational;
pub mod series;
pub mod verify;

pub use coeff::Coeff;
pub use dual::DualElement;
pub use error::{AlgebraError, Result};
pub use hopf::{SElement, TensorSquare};
pub use multiindex::MultiIndex;
pub use rational::Rational;
pub use series::{Series, Variable, Vars};
