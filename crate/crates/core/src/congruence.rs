//! The congruence criterion for nonzero Cartier images and the published
//! closed formulas for rank and a-number.
//!
//! A column of the Cartier matrix is nonzero exactly when some term
//! `x^{mk+h-k+i} y^{n(p-1-h)+j}` of `F^{p-1} x^i y^j` has both exponents
//! `≡ p-1 (mod p)`. Counting index pairs with a solution `(h, k)` therefore
//! counts nonzero columns. The `PaperLiteral` modes reproduce the system as
//! printed, with the exponent roles of `x` and `y` interchanged.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::curve::{enumerate_basis, enumerate_paper_index_set, CurveParams};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentMode {
    /// `mk + h - k + i ≡ p-1`, `n(p-1-h) + j ≡ p-1`.
    Honest,
    /// `km + h - k + j ≡ 0`, `(p-1-h) n + i ≡ p-1`.
    PaperLiteral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexMode {
    /// Numerator exponents `(a-1, n-1-b)` of the holomorphic basis.
    DerivedBasis,
    /// `{(i, j) : 1 <= n i + m j <= g}`.
    PaperLiteral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HRange {
    /// `0 <= h <= (p-1)/2`.
    Half,
    /// `0 <= h <= p-1`.
    Full,
}

macro_rules! kebab_enum {
    ($ty:ident { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($ty::$variant),)+
                    other => Err(Error::Parse(format!(
                        concat!("unknown ", stringify!($ty), " {:?}"), other
                    ))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($ty::$variant => $name,)+ })
            }
        }
    };
}

kebab_enum!(ExponentMode { Honest => "honest", PaperLiteral => "paper-literal" });
kebab_enum!(IndexMode { DerivedBasis => "derived-basis", PaperLiteral => "paper-literal" });
kebab_enum!(HRange { Half => "half", Full => "full" });

/// Number of index pairs for which the chosen system has a solution `(h, k)`
/// with `h` in the chosen range and `0 <= k <= h`.
pub fn congruence_count(
    params: &CurveParams,
    exponent_mode: ExponentMode,
    index_mode: IndexMode,
    h_range: HRange,
) -> Result<u64> {
    let indices: Vec<(u64, u64)> = match index_mode {
        IndexMode::DerivedBasis => {
            let basis = enumerate_basis(params)?;
            (0..basis.len()).map(|c| basis.monomial(c)).collect()
        }
        IndexMode::PaperLiteral => enumerate_paper_index_set(params),
    };
    let p = params.p();
    let h_max = match h_range {
        HRange::Half => (p - 1) / 2,
        HRange::Full => p - 1,
    };
    let (m, n) = (params.m % p, params.n % p);
    let target = p - 1;
    let solvable = |i: u64, j: u64| -> bool {
        let (i, j) = (i % p, j % p);
        (0..=h_max).any(|h| {
            (0..=h).any(|k| match exponent_mode {
                ExponentMode::Honest => {
                    (m * k + h + (p - k) + i) % p == target && (n * (p - 1 - h) + j) % p == target
                }
                ExponentMode::PaperLiteral => {
                    (k * m + h + (p - k) + j).is_multiple_of(p)
                        && ((p - 1 - h) * n + i) % p == target
                }
            })
        })
    };
    Ok(indices.iter().filter(|&&(i, j)| solvable(i, j)).count() as u64)
}

/// An exact rational value of a closed formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormulaValue(pub Ratio<i128>);

impl FormulaValue {
    pub fn new(num: i128, den: i128) -> Self {
        FormulaValue(Ratio::new(num, den))
    }

    pub fn is_integral(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    /// Equal to the integer `v`.
    pub fn equals(&self, v: u64) -> bool {
        self.0 == Ratio::from_integer(v as i128)
    }
}

impl fmt::Display for FormulaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `(m-1)(2q+3p-5)/20`.
pub fn paper_a_formula(params: &CurveParams) -> FormulaValue {
    let (m, q, p) = (params.m as i128, params.q as i128, params.p() as i128);
    FormulaValue::new((m - 1) * (2 * q + 3 * p - 5), 20)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankFormula {
    /// `3(q-p)(m-1)/20`.
    pub value: FormulaValue,
    /// Increment `3 p^{t-1}(p-1)(m-1)/20` for each `t = 2..=s`; empty at `s = 1`.
    pub increments: Vec<FormulaValue>,
}

/// Rank by the recursion `rank_1 = 0`, `rank_t = rank_{t-1} + 3p^{t-1}(p-1)(m-1)/20`.
pub fn paper_rank_formula(params: &CurveParams) -> RankFormula {
    let (m, q, p) = (params.m as i128, params.q as i128, params.p() as i128);
    let increments = (2..=params.s)
        .map(|t| FormulaValue::new(3 * p.pow(t - 1) * (p - 1) * (m - 1), 20))
        .collect();
    RankFormula {
        value: FormulaValue::new(3 * (q - p) * (m - 1), 20),
        increments,
    }
}
