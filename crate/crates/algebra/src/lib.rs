//! Exact arithmetic foundation: rationals, polynomials, rational functions,
//! quotient-ring extensions, truncated multivariate series, univariate Laurent
//! series, dense matrices and big-float complex numbers.

pub mod algext;
pub mod complex;
pub mod error;
pub mod laurent;
pub mod matrix;
pub mod poly;
pub mod rat;
pub mod ratfunc;
pub mod roots;
pub mod series;
pub mod traits;

pub use algext::AlgExt;
pub use complex::{complex_roots, BigComplex};
pub use error::{AlgebraError, Result};
pub use laurent::{Laurent, EXACT_PREC};
pub use matrix::Matrix;
pub use poly::Poly;
pub use rat::Rat;
pub use ratfunc::RatFunc;
pub use roots::{poly_resultant_free_roots, Root};
pub use series::{Exps, TermRecord, TruncatedSeries, Var, Vars};
pub use traits::{Field, Ring};
