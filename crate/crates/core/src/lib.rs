//! Exact computation of the Cartier matrix, a-number and p-rank of the
//! superelliptic curves `y^((q+1)/2) = x^m + x` over `F_{q^2}`, `q = p^s`,
//! together with brute-force point counts and checks of the published
//! congruence criterion and closed formulas.
//!
//! ```
//! use cartier::{a_number, validate_params};
//!
//! let params = validate_params(5, 2, 3).unwrap();
//! assert_eq!(params.g, 12);
//! assert_eq!(a_number(&params).unwrap(), 6);
//! ```

pub mod bipoly;
pub mod cli;
pub mod congruence;
pub mod curve;
pub mod engine;
pub mod error;
pub mod field;
pub mod points;
pub mod report;
pub mod sweep;

pub use bipoly::{poly_mul, trinomial_power_shift, BiPoly, Monomial};
pub use congruence::{
    congruence_count, paper_a_formula, paper_rank_formula, ExponentMode, FormulaValue, HRange,
    IndexMode,
};
pub use curve::{
    enumerate_basis, enumerate_paper_index_set, genus, validate_params, validate_params_strict,
    CurveParams, DifferentialBasis,
};
pub use engine::{a_number, cartier_apply, cartier_matrix, p_rank, rank, CartierMatrix};
pub use error::{Error, Result};
pub use field::{ext_pow, find_irreducible, fp_inv, ExtElement, ExtFieldCtx, Fp, PrimeModulus};
pub use points::{count_points, is_maximal, PointCount};
pub use report::{emit_report, verify, Format, VerificationReport};
