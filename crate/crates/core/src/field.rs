//! Prime fields F_p and extension fields F_{p^e}.
//!
//! Residues are stored as `u64`; products go through `u128` before reduction.
//! Extension elements are coordinate vectors in the power basis of a monic
//! irreducible modulus, and all arithmetic on them goes through an
//! [`ExtFieldCtx`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest prime accepted. Trial division stays instantaneous below this.
pub const MAX_PRIME: u64 = 1 << 32;

/// A verified prime modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if p >= MAX_PRIME {
            return Err(Error::InvalidPrime {
                p,
                reason: format!("exceeds supported bound {MAX_PRIME}"),
            });
        }
        if !is_prime(p) {
            return Err(Error::InvalidPrime {
                p,
                reason: "not prime".into(),
            });
        }
        Ok(PrimeModulus(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn reduce(self, v: u64) -> u64 {
        v % self.0
    }

    #[inline]
    pub fn reduce_i64(self, v: i64) -> u64 {
        v.rem_euclid(self.0 as i64) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.0 as u128) as u64
    }

    /// Inverse by the extended Euclidean algorithm.
    pub fn inv(self, a: u64) -> Result<u64> {
        let a = a % self.0;
        if a == 0 {
            return Err(Error::DivisionByZero { p: self.0 });
        }
        let (mut r0, mut r1) = (self.0 as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(t0.rem_euclid(self.0 as i128) as u64)
    }

    /// `a^k`, with `0^0` rejected.
    pub fn pow(self, a: u64, mut k: u64) -> Result<u64> {
        let mut base = a % self.0;
        if base == 0 && k == 0 {
            return Err(Error::UndefinedPower);
        }
        let mut acc = 1 % self.0;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        Ok(acc)
    }

    /// `C(n, k) mod p` by Lucas' theorem.
    pub fn binomial(self, mut n: u64, mut k: u64) -> u64 {
        if k > n {
            return 0;
        }
        let p = self.0;
        let mut acc = 1u64;
        while k > 0 || n > 0 {
            let (nd, kd) = (n % p, k % p);
            if kd > nd {
                return 0;
            }
            acc = self.mul(acc, self.small_binomial(nd, kd));
            n /= p;
            k /= p;
        }
        acc
    }

    // C(n, k) mod p for n < p; the denominator is a unit.
    fn small_binomial(self, n: u64, k: u64) -> u64 {
        let k = k.min(n - k);
        let mut num = 1u64;
        let mut den = 1u64;
        for t in 0..k {
            num = self.mul(num, n - t);
            den = self.mul(den, t + 1);
        }
        self.mul(num, self.inv(den).expect("k! is a unit for k < p"))
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// An element of F_p, always fully reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    modulus: PrimeModulus,
}

impl Fp {
    pub fn new(value: u64, modulus: PrimeModulus) -> Self {
        Fp {
            value: modulus.reduce(value),
            modulus,
        }
    }

    pub fn from_i64(value: i64, modulus: PrimeModulus) -> Self {
        Fp {
            value: modulus.reduce_i64(value),
            modulus,
        }
    }

    pub fn zero(modulus: PrimeModulus) -> Self {
        Fp { value: 0, modulus }
    }

    pub fn one(modulus: PrimeModulus) -> Self {
        Fp { value: 1, modulus }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Result<Fp> {
        Ok(Fp {
            value: self.modulus.inv(self.value)?,
            modulus: self.modulus,
        })
    }

    pub fn pow(self, k: u64) -> Result<Fp> {
        Ok(Fp {
            value: self.modulus.pow(self.value, k)?,
            modulus: self.modulus,
        })
    }

    fn check(self, other: Fp) {
        assert_eq!(
            self.modulus, other.modulus,
            "arithmetic between different prime fields"
        );
    }
}

/// Free-function form of [`Fp::inv`].
pub fn fp_inv(a: Fp) -> Result<Fp> {
    a.inv()
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        self.check(rhs);
        Fp {
            value: self.modulus.add(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self.check(rhs);
        Fp {
            value: self.modulus.sub(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        self.check(rhs);
        Fp {
            value: self.modulus.mul(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp {
            value: self.modulus.neg(self.value),
            modulus: self.modulus,
        }
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

// Dense univariate polynomials over F_p, coefficients from the constant term
// upward, no trailing zeros. Only what irreducibility testing needs.
mod upoly {
    use super::PrimeModulus;

    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn sub(a: &[u64], b: &[u64], p: PrimeModulus) -> Vec<u64> {
        let mut out = vec![0; a.len().max(b.len())];
        for (i, o) in out.iter_mut().enumerate() {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            *o = p.sub(x, y);
        }
        trim(&mut out);
        out
    }

    pub fn rem(a: &[u64], f: &[u64], p: PrimeModulus) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let df = f.len() - 1;
        let lead_inv = p.inv(f[df]).expect("nonzero leading coefficient");
        while r.len() > df {
            let shift = r.len() - 1 - df;
            let c = p.mul(*r.last().unwrap(), lead_inv);
            for (i, &fi) in f.iter().enumerate() {
                r[shift + i] = p.sub(r[shift + i], p.mul(c, fi));
            }
            trim(&mut r);
        }
        r
    }

    pub fn mulmod(a: &[u64], b: &[u64], f: &[u64], p: PrimeModulus) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = p.add(prod[i + j], p.mul(x, y));
            }
        }
        rem(&prod, f, p)
    }

    pub fn powmod(a: &[u64], mut k: u64, f: &[u64], p: PrimeModulus) -> Vec<u64> {
        let mut acc = rem(&[1], f, p);
        let mut base = rem(a, f, p);
        while k > 0 {
            if k & 1 == 1 {
                acc = mulmod(&acc, &base, f, p);
            }
            base = mulmod(&base, &base, f, p);
            k >>= 1;
        }
        acc
    }

    pub fn gcd(a: &[u64], b: &[u64], p: PrimeModulus) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test: `f` (monic, degree e) is irreducible iff `x^{p^e} = x mod f`
/// and `gcd(x^{p^{e/r}} - x, f) = 1` for every prime `r | e`.
pub fn is_irreducible(f: &[u64], p: PrimeModulus) -> bool {
    let e = f.len().saturating_sub(1);
    if e == 0 {
        return false;
    }
    if e == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let x = [0u64, 1];
    // frob[k] = x^{p^k} mod f
    let mut frob = Vec::with_capacity(e + 1);
    frob.push(upoly::rem(&x, f, p));
    for k in 1..=e {
        let next = upoly::powmod(&frob[k - 1], p.get(), f, p);
        frob.push(next);
    }
    if !upoly::sub(&frob[e], &frob[0], p).is_empty() {
        return false;
    }
    for r in prime_factors(e as u64) {
        let k = e / r as usize;
        let diff = upoly::sub(&frob[k], &frob[0], p);
        let g = upoly::gcd(&diff, f, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Monic irreducible polynomials of degree `e` in increasing order, where
/// candidates are ranked by `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`.
pub fn irreducibles(p: PrimeModulus, e: usize) -> impl Iterator<Item = Vec<u64>> {
    let pv = p.get();
    let total = (pv as u128).checked_pow(e as u32).unwrap_or(u128::MAX);
    (0u128..total).filter_map(move |mut idx| {
        let mut f = vec![0u64; e + 1];
        for c in f.iter_mut().take(e) {
            *c = (idx % pv as u128) as u64;
            idx /= pv as u128;
        }
        f[e] = 1;
        is_irreducible(&f, p).then_some(f)
    })
}

/// Context for F_{p^e} = F_p[t]/(f).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtFieldCtx {
    p: PrimeModulus,
    modulus: Vec<u64>,
}

/// Coordinates of an element of F_{p^e} in the power basis `1, t, ..., t^{e-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtElement {
    coeffs: Vec<u64>,
}

impl ExtElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// Smallest monic irreducible of degree `e` over F_p.
pub fn find_irreducible(p: PrimeModulus, e: usize) -> Result<ExtFieldCtx> {
    if e == 0 {
        return Err(Error::InvalidParameter(
            "extension degree must be >= 1".into(),
        ));
    }
    let f = irreducibles(p, e)
        .next()
        .expect("irreducible polynomials exist in every degree");
    Ok(ExtFieldCtx { p, modulus: f })
}

impl ExtFieldCtx {
    /// Builds a context from a monic modulus given constant term first.
    pub fn new(p: PrimeModulus, modulus: Vec<u64>) -> Result<Self> {
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidParameter(
                "modulus must be monic of degree >= 1".into(),
            ));
        }
        let modulus: Vec<u64> = modulus.into_iter().map(|c| p.reduce(c)).collect();
        if !is_irreducible(&modulus, p) {
            return Err(Error::ReducibleModulus { p: p.get() });
        }
        Ok(ExtFieldCtx { p, modulus })
    }

    pub fn prime(&self) -> PrimeModulus {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Modulus coefficients, constant term first.
    pub fn modulus_poly(&self) -> &[u64] {
        &self.modulus
    }

    /// Number of elements, `p^e`, if it fits in a `u64`.
    pub fn size(&self) -> Option<u64> {
        self.p.get().checked_pow(self.degree() as u32)
    }

    pub fn zero(&self) -> ExtElement {
        ExtElement {
            coeffs: vec![0; self.degree()],
        }
    }

    pub fn one(&self) -> ExtElement {
        self.from_base(1)
    }

    pub fn from_base(&self, c: u64) -> ExtElement {
        let mut coeffs = vec![0; self.degree()];
        coeffs[0] = self.p.reduce(c);
        ExtElement { coeffs }
    }

    /// The class of `t`, the adjoined root.
    pub fn generator(&self) -> ExtElement {
        let mut coeffs = vec![0; self.degree()];
        if coeffs.len() > 1 {
            coeffs[1] = 1;
        } else {
            // degree 1: t = -f_0
            coeffs[0] = self.p.neg(self.modulus[0]);
        }
        ExtElement { coeffs }
    }

    pub fn element(&self, coeffs: &[u64]) -> ExtElement {
        assert_eq!(coeffs.len(), self.degree());
        ExtElement {
            coeffs: coeffs.iter().map(|&c| self.p.reduce(c)).collect(),
        }
    }

    /// Element whose coordinates are the base-p digits of `index`.
    pub fn element_at(&self, mut index: u64) -> ExtElement {
        let p = self.p.get();
        let coeffs = (0..self.degree())
            .map(|_| {
                let d = index % p;
                index /= p;
                d
            })
            .collect();
        ExtElement { coeffs }
    }

    pub fn add(&self, a: &ExtElement, b: &ExtElement) -> ExtElement {
        ExtElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| self.p.add(x, y))
                .collect(),
        }
    }

    pub fn sub(&self, a: &ExtElement, b: &ExtElement) -> ExtElement {
        ExtElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| self.p.sub(x, y))
                .collect(),
        }
    }

    pub fn mul(&self, a: &ExtElement, b: &ExtElement) -> ExtElement {
        let e = self.degree();
        let p = self.p;
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = p.add(prod[i + j], p.mul(x, y));
            }
        }
        // t^e = -(f_0 + ... + f_{e-1} t^{e-1})
        for top in (e..prod.len()).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for k in 0..e {
                let idx = top - e + k;
                prod[idx] = p.sub(prod[idx], p.mul(c, self.modulus[k]));
            }
        }
        prod.truncate(e);
        ExtElement { coeffs: prod }
    }

    /// `a^k` by square-and-multiply; `0^0` is an error.
    pub fn pow(&self, a: &ExtElement, mut k: u64) -> Result<ExtElement> {
        if k == 0 && a.is_zero() {
            return Err(Error::UndefinedPower);
        }
        let mut acc = self.one();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        Ok(acc)
    }
}

/// Free-function form of [`ExtFieldCtx::pow`].
pub fn ext_pow(ctx: &ExtFieldCtx, a: &ExtElement, k: u64) -> Result<ExtElement> {
    ctx.pow(a, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn inverse_examples() {
        let p5 = pm(5);
        assert_eq!(fp_inv(Fp::new(1, p5)).unwrap().value(), 1);
        assert_eq!(fp_inv(Fp::new(2, p5)).unwrap().value(), 3);
        // exhaustive oracle for 7 mod 13
        let p13 = pm(13);
        let brute = (1..13).find(|&b| (7 * b) % 13 == 1).unwrap();
        assert_eq!(brute, 2);
        assert_eq!(fp_inv(Fp::new(7, p13)).unwrap().value(), brute);
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert_eq!(fp_inv(Fp::zero(pm(5))), Err(Error::DivisionByZero { p: 5 }));
    }

    #[test]
    fn rejects_composites() {
        assert!(PrimeModulus::new(4).is_err());
        assert!(PrimeModulus::new(1).is_err());
        assert!(PrimeModulus::new(91).is_err());
        assert!(PrimeModulus::new(1_048_573).is_ok());
    }

    #[test]
    fn binomial_matches_pascal() {
        let p = pm(7);
        let mut row = vec![1u64];
        for n in 0..30u64 {
            for (k, &c) in row.iter().enumerate() {
                assert_eq!(p.binomial(n, k as u64), c % 7, "C({n},{k})");
            }
            let mut next = vec![1u64; row.len() + 1];
            for k in 1..row.len() {
                next[k] = (row[k - 1] + row[k]) % 7;
            }
            row = next;
        }
    }

    #[test]
    fn irreducible_examples() {
        let c = find_irreducible(pm(5), 1).unwrap();
        assert_eq!(c.modulus_poly(), &[0, 1]);
        let c = find_irreducible(pm(5), 2).unwrap();
        assert_eq!(c.modulus_poly(), &[2, 0, 1]);
        let c = find_irreducible(pm(7), 2).unwrap();
        assert_eq!(c.modulus_poly(), &[1, 0, 1]);
    }

    fn mobius(n: u64) -> i64 {
        let mut n = n;
        let mut mu = 1;
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                n /= d;
                if n.is_multiple_of(d) {
                    return 0;
                }
                mu = -mu;
            }
            d += 1;
        }
        if n > 1 {
            mu = -mu;
        }
        mu
    }

    #[test]
    fn irreducible_count_matches_necklace_formula() {
        for (p, e) in [
            (5u64, 1usize),
            (5, 2),
            (5, 3),
            (5, 4),
            (7, 2),
            (7, 3),
            (11, 2),
        ] {
            let expected: i64 = (1..=e as u64)
                .filter(|d| (e as u64).is_multiple_of(*d))
                .map(|d| mobius(d) * (p as i64).pow((e as u64 / d) as u32))
                .sum::<i64>()
                / e as i64;
            let got = irreducibles(pm(p), e).count() as i64;
            assert_eq!(got, expected, "p={p} e={e}");
        }
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 + 1 = (x+2)(x+3) over F_5
        assert_eq!(
            ExtFieldCtx::new(pm(5), vec![1, 0, 1]),
            Err(Error::ReducibleModulus { p: 5 })
        );
    }

    #[test]
    fn ext_pow_examples() {
        let ctx = find_irreducible(pm(5), 2).unwrap();
        let one = ctx.one();
        assert_eq!(ext_pow(&ctx, &one, 1_000_000).unwrap(), one);
        let t = ctx.generator();
        assert_eq!(ext_pow(&ctx, &t, 2).unwrap(), ctx.from_base(3));
        let c1 = find_irreducible(pm(5), 1).unwrap();
        assert_eq!(ext_pow(&c1, &c1.from_base(2), 4).unwrap(), c1.one());
        assert_eq!(ext_pow(&ctx, &ctx.zero(), 0), Err(Error::UndefinedPower));
        assert_eq!(ext_pow(&ctx, &ctx.zero(), 3).unwrap(), ctx.zero());
    }

    #[test]
    fn element_orders_divide_group_order() {
        let ctx = find_irreducible(pm(5), 4).unwrap();
        let order = ctx.size().unwrap() - 1;
        for idx in (1..ctx.size().unwrap()).step_by(7) {
            let a = ctx.element_at(idx);
            assert_eq!(ctx.pow(&a, order).unwrap(), ctx.one());
        }
    }

    #[test]
    fn frobenius_fixes_prime_field() {
        let p = pm(13);
        for a in 0..13 {
            assert_eq!(Fp::new(a, p).pow(13).unwrap().value(), a);
        }
    }
}
