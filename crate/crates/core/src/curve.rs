//! The curve `y^n = x^m + x` with `n = (q+1)/2`, `q = p^s`: parameters,
//! genus and a basis of holomorphic differentials.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeModulus;

/// Largest `q = p^s` accepted, keeping every exponent computation in `u64`.
pub const MAX_Q: u64 = 1 << 32;

/// Which of the classical hypotheses on `(p, s, m)` hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisFlags {
    pub gcd_n_m: bool,
    pub gcd_q_n: bool,
    pub gcd_q_m_minus_1: bool,
    /// `m` is 2, 3, or `p^b` with `b | s`.
    pub m_form: bool,
    pub gcd_p_m_minus_1: bool,
}

impl HypothesisFlags {
    pub fn all_hold(&self) -> bool {
        self.gcd_n_m && self.gcd_q_n && self.gcd_q_m_minus_1 && self.m_form && self.gcd_p_m_minus_1
    }

    /// Names of the hypotheses that fail.
    pub fn failures(&self) -> Vec<&'static str> {
        [
            ("gcd(n,m)=1", self.gcd_n_m),
            ("gcd(q,n)=1", self.gcd_q_n),
            ("gcd(q,m-1)=1", self.gcd_q_m_minus_1),
            ("m in {2,3} or m=p^b with b|s", self.m_form),
            ("gcd(p,m-1)=1", self.gcd_p_m_minus_1),
        ]
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| name)
        .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveParams {
    pub p: PrimeModulus,
    pub s: u32,
    pub m: u64,
    pub n: u64,
    pub q: u64,
    pub g: u64,
    pub hypotheses: HypothesisFlags,
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn m_has_allowed_form(p: u64, s: u32, m: u64) -> bool {
    if m == 2 || m == 3 {
        return true;
    }
    let mut b = 0u32;
    let mut v = m;
    while v.is_multiple_of(p) {
        v /= p;
        b += 1;
    }
    v == 1 && b >= 1 && s.is_multiple_of(b)
}

/// Validates `(p, s, m)` and derives `n`, `q`, `g`. Hypothesis failures are
/// recorded in the flags, not rejected.
pub fn validate_params(p: u64, s: u32, m: u64) -> Result<CurveParams> {
    if p == 2 {
        return Err(Error::EvenCharacteristicUnsupported);
    }
    let modulus = PrimeModulus::new(p)?;
    if p == 3 {
        return Err(Error::InvalidPrime {
            p,
            reason: "characteristic must exceed 3".into(),
        });
    }
    if s == 0 {
        return Err(Error::InvalidParameter("s must be >= 1".into()));
    }
    if m < 2 {
        return Err(Error::InvalidParameter("m must be >= 2".into()));
    }
    let q = p
        .checked_pow(s)
        .filter(|&q| q <= MAX_Q)
        .ok_or_else(|| Error::ParameterOverflow(format!("q = {p}^{s} exceeds {MAX_Q}")))?;
    if m > MAX_Q {
        return Err(Error::ParameterOverflow(format!("m = {m} exceeds {MAX_Q}")));
    }
    let n = q.div_ceil(2);
    let g = (n - 1)
        .checked_mul(m - 1)
        .map(|v| v / 2)
        .ok_or_else(|| Error::ParameterOverflow("genus".into()))?;
    if g == 0 {
        return Err(Error::ZeroGenus);
    }
    let hypotheses = HypothesisFlags {
        gcd_n_m: gcd(n, m) == 1,
        gcd_q_n: gcd(q, n) == 1,
        gcd_q_m_minus_1: gcd(q, m - 1) == 1,
        m_form: m_has_allowed_form(p, s, m),
        gcd_p_m_minus_1: gcd(p, m - 1) == 1,
    };
    Ok(CurveParams {
        p: modulus,
        s,
        m,
        n,
        q,
        g,
        hypotheses,
    })
}

/// Like [`validate_params`] but any failed hypothesis is an error.
pub fn validate_params_strict(p: u64, s: u32, m: u64) -> Result<CurveParams> {
    let params = validate_params(p, s, m)?;
    let failures = params.hypotheses.failures();
    if failures.is_empty() {
        Ok(params)
    } else {
        Err(Error::HypothesisViolated(failures.join(", ")))
    }
}

/// `(n-1)(m-1)/2`.
pub fn genus(params: &CurveParams) -> u64 {
    params.g
}

impl CurveParams {
    pub fn p(&self) -> u64 {
        self.p.get()
    }
}

/// Ordered basis of `H^0(X, Ω^1)`. Entry `(a, b)` is `x^{a-1} dx / y^b`, which
/// is `n · h dx / F_y` with `h = x^{a-1} y^{n-1-b}`.
#[derive(Clone, Debug)]
pub struct DifferentialBasis {
    n: u64,
    entries: Vec<(u64, u64)>,
    by_monomial: HashMap<(u64, u64), usize>,
}

impl DifferentialBasis {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }

    /// Exponents `(i, j)` of the numerator `h = x^i y^j` of entry `idx`.
    pub fn monomial(&self, idx: usize) -> (u64, u64) {
        let (a, b) = self.entries[idx];
        (a - 1, self.n - 1 - b)
    }

    /// Basis position whose numerator is `x^i y^j`.
    pub fn position(&self, i: u64, j: u64) -> Option<usize> {
        self.by_monomial.get(&(i, j)).copied()
    }
}

/// All `(a, b)` with `1 <= b <= n-1` and `1 <= a <= floor((m b - 1)/n)`,
/// sorted by `(b, a)`.
///
/// At the unique place over `x = ∞`, `v(x) = -n`, `v(y) = -m`,
/// `v(dx) = -n-1`, giving `n a <= m b - 1`. At the branch places over the
/// roots of `x^m + x`, `v(y) = 1` and `v(dx) = n-1`, giving `b <= n-1`.
pub fn enumerate_basis(params: &CurveParams) -> Result<DifferentialBasis> {
    let (n, m) = (params.n, params.m);
    if !params.hypotheses.gcd_n_m {
        return Err(Error::InvalidParameter(format!(
            "gcd(n, m) = gcd({n}, {m}) != 1: the curve has several places at infinity"
        )));
    }
    let mut entries = Vec::new();
    for b in 1..n {
        let top = (m * b - 1) / n;
        entries.extend((1..=top).map(|a| (a, b)));
    }
    if entries.len() as u64 != params.g {
        return Err(Error::BasisCountMismatch {
            found: entries.len(),
            genus: params.g,
        });
    }
    let by_monomial = entries
        .iter()
        .enumerate()
        .map(|(idx, &(a, b))| ((a - 1, n - 1 - b), idx))
        .collect();
    Ok(DifferentialBasis {
        n,
        entries,
        by_monomial,
    })
}

/// The index set `{(i, j) : i, j >= 0, 1 <= n i + m j <= g}` taken literally.
pub fn enumerate_paper_index_set(params: &CurveParams) -> Vec<(u64, u64)> {
    let (n, m, g) = (params.n, params.m, params.g);
    let mut out = Vec::new();
    for i in 0..=g / n {
        for j in 0..=(g - n * i) / m {
            let w = n * i + m * j;
            if w >= 1 {
                out.push((i, j));
            }
        }
    }
    out
}
