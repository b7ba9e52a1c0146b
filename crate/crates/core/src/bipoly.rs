//! Sparse bivariate polynomials over F_p.
//!
//! Besides ring arithmetic this module carries the three steps of the Cartier
//! pipeline that act on polynomials: the coefficient-extraction operator
//! `nabla`, the exponent root, and reduction modulo `y^n = x^m + x`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::curve::CurveParams;
use crate::error::{Error, Result};
use crate::field::{Fp, PrimeModulus};

/// `x^ex * y^ey`. Ordered graded-lexicographically with `x > y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub ex: u64,
    pub ey: u64,
}

impl Monomial {
    pub fn new(ex: u64, ey: u64) -> Self {
        Monomial { ex, ey }
    }

    pub fn degree(&self) -> u64 {
        self.ex + self.ey
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.ex.cmp(&other.ex))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical sparse polynomial: no stored coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPoly {
    p: PrimeModulus,
    terms: BTreeMap<Monomial, u64>,
}

impl BiPoly {
    pub fn zero(p: PrimeModulus) -> Self {
        BiPoly {
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(p: PrimeModulus) -> Self {
        Self::monomial(p, 0, 0, 1)
    }

    pub fn monomial(p: PrimeModulus, ex: u64, ey: u64, coeff: u64) -> Self {
        let mut out = Self::zero(p);
        out.add_term(Monomial::new(ex, ey), p.reduce(coeff));
        out
    }

    /// Sums the given terms; repeated monomials accumulate.
    pub fn from_terms<I>(p: PrimeModulus, terms: I) -> Self
    where
        I: IntoIterator<Item = (u64, u64, i64)>,
    {
        let mut out = Self::zero(p);
        for (ex, ey, c) in terms {
            out.add_term(Monomial::new(ex, ey), p.reduce_i64(c));
        }
        out
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, ex: u64, ey: u64) -> Fp {
        let v = self.terms.get(&Monomial::new(ex, ey)).copied().unwrap_or(0);
        Fp::new(v, self.p)
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (Monomial, Fp)> + '_ {
        self.terms
            .iter()
            .map(|(&mono, &c)| (mono, Fp::new(c, self.p)))
    }

    pub fn max_y_degree(&self) -> Option<u64> {
        self.terms.keys().map(|m| m.ey).max()
    }

    pub(crate) fn add_term(&mut self, mono: Monomial, c: u64) {
        if c == 0 {
            return;
        }
        let p = self.p;
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let v = p.add(*slot.get(), c);
                if v == 0 {
                    slot.remove();
                } else {
                    *slot.get_mut() = v;
                }
            }
        }
    }

    fn check_modulus(&self, other: &BiPoly) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch {
                left: self.p.get(),
                right: other.p.get(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &BiPoly) -> Result<BiPoly> {
        self.check_modulus(other)?;
        let mut out = self.clone();
        for (&mono, &c) in &other.terms {
            out.add_term(mono, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &BiPoly) -> Result<BiPoly> {
        self.check_modulus(other)?;
        let mut out = self.clone();
        for (&mono, &c) in &other.terms {
            out.add_term(mono, self.p.neg(c));
        }
        Ok(out)
    }

    pub fn scale(&self, c: Fp) -> BiPoly {
        let mut out = BiPoly::zero(self.p);
        if c.is_zero() {
            return out;
        }
        for (&mono, &v) in &self.terms {
            out.add_term(mono, self.p.mul(v, c.value()));
        }
        out
    }

    /// Multiplication by `x^dx y^dy`.
    pub fn shift(&self, dx: u64, dy: u64) -> BiPoly {
        BiPoly {
            p: self.p,
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| (Monomial::new(m.ex + dx, m.ey + dy), c))
                .collect(),
        }
    }

    /// Exact product.
    pub fn mul(&self, other: &BiPoly) -> Result<BiPoly> {
        self.check_modulus(other)?;
        let p = self.p;
        let mut out = BiPoly::zero(p);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(Monomial::new(ma.ex + mb.ex, ma.ey + mb.ey), p.mul(ca, cb));
            }
        }
        Ok(out)
    }

    /// `self^k` by repeated multiplication; `self^0 = 1`.
    pub fn pow(&self, k: u32) -> BiPoly {
        let mut acc = BiPoly::one(self.p);
        for _ in 0..k {
            acc = acc.mul(self).expect("same modulus");
        }
        acc
    }

    /// Keeps the coefficients at `x^{Ip+p-1} y^{Jp+p-1}` and moves them to
    /// `x^{Ip} y^{Jp}`. Equal to `∂^{p-1}_x ∂^{p-1}_y` since `((p-1)!)^2 = 1`.
    pub fn nabla(&self) -> BiPoly {
        let p = self.p.get();
        BiPoly {
            p: self.p,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.ex % p == p - 1 && m.ey % p == p - 1)
                .map(|(m, &c)| (Monomial::new(m.ex - (p - 1), m.ey - (p - 1)), c))
                .collect(),
        }
    }

    /// Divides every exponent by p. Coefficients lie in F_p, where the
    /// inverse Frobenius is the identity.
    pub fn root_exponents(&self) -> Result<BiPoly> {
        let p = self.p.get();
        let mut terms = BTreeMap::new();
        for (m, &c) in &self.terms {
            for e in [m.ex, m.ey] {
                if e % p != 0 {
                    return Err(Error::NonDivisibleExponent { exponent: e, p });
                }
            }
            terms.insert(Monomial::new(m.ex / p, m.ey / p), c);
        }
        Ok(BiPoly { p: self.p, terms })
    }

    /// Rewrites `y^n` as `x^m + x` until every y-exponent is below `n`.
    pub fn curve_reduce(&self, params: &CurveParams) -> BiPoly {
        let (n, m) = (params.n, params.m);
        let p = self.p;
        let mut out = BiPoly::zero(p);
        for (mono, &c) in &self.terms {
            if mono.ey < n {
                out.add_term(*mono, c);
                continue;
            }
            // y^{nt + r} = y^r (x^m + x)^t = y^r Σ_k C(t,k) x^{mk + t - k}
            let (t, r) = (mono.ey / n, mono.ey % n);
            for k in 0..=t {
                let b = p.binomial(t, k);
                if b != 0 {
                    out.add_term(Monomial::new(mono.ex + m * k + t - k, r), p.mul(c, b));
                }
            }
        }
        out
    }

    /// Parses the canonical text form `c*x^a*y^b + ...` (or `0`).
    pub fn parse(text: &str, p: PrimeModulus) -> Result<BiPoly> {
        let text = text.trim();
        let mut out = BiPoly::zero(p);
        if text == "0" {
            return Ok(out);
        }
        let bad = || Error::Parse(format!("malformed polynomial term in {text:?}"));
        for term in text.split(" + ") {
            let mut parts = term.trim().split('*');
            let c: u64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let (mut ex, mut ey) = (0u64, 0u64);
            for part in parts {
                let (var, exp) = part.split_once('^').ok_or_else(bad)?;
                let exp: u64 = exp.parse().map_err(|_| bad())?;
                match var {
                    "x" => ex = exp,
                    "y" => ey = exp,
                    _ => return Err(bad()),
                }
            }
            out.add_term(Monomial::new(ex, ey), p.reduce(c));
        }
        Ok(out)
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*x^{}*y^{}", m.ex, m.ey)?;
        }
        Ok(())
    }
}

/// Free-function form of [`BiPoly::mul`].
pub fn poly_mul(a: &BiPoly, b: &BiPoly) -> Result<BiPoly> {
    a.mul(b)
}

/// `F = y^n - x - x^m` for the given curve.
pub fn curve_polynomial(params: &CurveParams) -> BiPoly {
    BiPoly::from_terms(params.p, [(0, params.n, 1), (1, 0, -1), (params.m, 0, -1)])
}

/// Closed-form terms of `F^{p-1}` as `(x-exponent, y-exponent, coefficient)`:
/// `Σ_h Σ_{k<=h} C(p-1,h) C(h,k) (-1)^h x^{mk+h-k} y^{n(p-1-h)}`.
pub(crate) fn trinomial_power_terms(params: &CurveParams) -> Vec<(u64, u64, u64)> {
    let p = params.p;
    let pv = p.get();
    let mut out = Vec::new();
    for h in 0..pv {
        let outer = p.binomial(pv - 1, h);
        let outer = if h % 2 == 1 { p.neg(outer) } else { outer };
        for k in 0..=h {
            let c = p.mul(outer, p.binomial(h, k));
            if c != 0 {
                out.push((params.m * k + h - k, params.n * (pv - 1 - h), c));
            }
        }
    }
    out
}

/// `(y^n - x - x^m)^{p-1} · x^i · y^j` from the double binomial sum.
pub fn trinomial_power_shift(params: &CurveParams, i: u64, j: u64) -> BiPoly {
    let mut out = BiPoly::zero(params.p);
    for (ex, ey, c) in trinomial_power_terms(params) {
        out.add_term(Monomial::new(ex + i, ey + j), c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::validate_params;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn mul_examples() {
        let p = pm(5);
        let x_plus_y = BiPoly::from_terms(p, [(1, 0, 1), (0, 1, 1)]);
        assert!(poly_mul(&x_plus_y, &BiPoly::zero(p)).unwrap().is_zero());
        let f = BiPoly::from_terms(p, [(0, 3, 1), (1, 0, -1), (2, 0, -1)]);
        assert_eq!(poly_mul(&f, &BiPoly::one(p)).unwrap(), f);
        let sq = poly_mul(&x_plus_y, &x_plus_y).unwrap();
        assert_eq!(sq, BiPoly::from_terms(p, [(2, 0, 1), (1, 1, 2), (0, 2, 1)]));
    }

    #[test]
    fn mul_modulus_mismatch() {
        let a = BiPoly::one(pm(5));
        let b = BiPoly::one(pm(7));
        assert_eq!(
            poly_mul(&a, &b),
            Err(Error::ModulusMismatch { left: 5, right: 7 })
        );
    }

    #[test]
    fn trinomial_examples() {
        let params = validate_params(5, 1, 2).unwrap();
        let t = trinomial_power_shift(&params, 0, 0);
        assert_eq!(t.coeff(0, 12).value(), 1);
        // brute force: expand (y^3 - x - x^2)^4 by repeated multiplication
        let brute = curve_polynomial(&params).pow(4);
        assert_eq!(t.coeff(4, 0), brute.coeff(4, 0));
        assert_eq!(t.coeff(4, 0).value(), 1);
        assert_eq!(t.len(), brute.len());
    }

    #[test]
    fn trinomial_matches_repeated_multiplication() {
        for (p, s, m) in [
            (5, 1, 2),
            (5, 2, 3),
            (7, 1, 3),
            (7, 1, 7),
            (11, 1, 11),
            (13, 1, 2),
        ] {
            let params = validate_params(p, s, m).unwrap();
            let brute = curve_polynomial(&params).pow(p as u32 - 1);
            for (i, j) in [(0, 0), (1, 2), (3, 0)] {
                assert_eq!(
                    trinomial_power_shift(&params, i, j),
                    brute.shift(i, j),
                    "({p},{s},{m}) shift ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn nabla_examples() {
        let p = pm(5);
        assert_eq!(BiPoly::monomial(p, 4, 4, 1).nabla(), BiPoly::one(p));
        assert!(BiPoly::monomial(p, 2, 3, 1).nabla().is_zero());
        assert_eq!(
            BiPoly::monomial(p, 9, 14, 3).nabla(),
            BiPoly::monomial(p, 5, 10, 3)
        );
    }

    #[test]
    fn root_examples() {
        let p = pm(5);
        assert_eq!(
            BiPoly::monomial(p, 5, 10, 1).root_exponents().unwrap(),
            BiPoly::monomial(p, 1, 2, 1)
        );
        assert!(BiPoly::zero(p).root_exponents().unwrap().is_zero());
        assert_eq!(
            BiPoly::monomial(p, 10, 0, 3).root_exponents().unwrap(),
            BiPoly::monomial(p, 2, 0, 3)
        );
        assert_eq!(
            BiPoly::monomial(p, 3, 5, 1).root_exponents(),
            Err(Error::NonDivisibleExponent { exponent: 3, p: 5 })
        );
    }

    #[test]
    fn curve_reduce_examples() {
        let params = validate_params(5, 1, 2).unwrap();
        let p = params.p;
        assert_eq!(
            BiPoly::monomial(p, 0, 3, 1).curve_reduce(&params),
            BiPoly::from_terms(p, [(2, 0, 1), (1, 0, 1)])
        );
        // y^7 = y (x^2 + x)^2
        assert_eq!(
            BiPoly::monomial(p, 0, 7, 1).curve_reduce(&params),
            BiPoly::from_terms(p, [(4, 1, 1), (3, 1, 2), (2, 1, 1)])
        );
        let fixed = BiPoly::monomial(p, 6, 2, 4);
        assert_eq!(fixed.curve_reduce(&params), fixed);
    }

    #[test]
    fn text_form() {
        let p = pm(5);
        let f = BiPoly::from_terms(p, [(0, 2, 1), (2, 0, 1), (1, 1, 2), (0, 0, 3)]);
        assert_eq!(
            f.to_string(),
            "1*x^2*y^0 + 2*x^1*y^1 + 1*x^0*y^2 + 3*x^0*y^0"
        );
        assert_eq!(BiPoly::parse(&f.to_string(), p).unwrap(), f);
        assert_eq!(BiPoly::zero(p).to_string(), "0");
        assert!(BiPoly::parse("2*z^3", p).is_err());
    }
}
