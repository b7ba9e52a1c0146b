//! Brute-force point counts over F_{p^e} and the maximality check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{gcd, CurveParams};
use crate::error::{Error, Result};
use crate::field::{find_irreducible, ExtFieldCtx};

/// Largest field enumerated by brute force.
pub const MAX_FIELD_SIZE: u64 = 10_000_000;

const CHUNK: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCount {
    pub e: usize,
    pub affine: u64,
    pub at_infinity: u64,
    pub total: u64,
    /// `[p^e + 1 - 2g p^{e/2}, p^e + 1 + 2g p^{e/2}]`, for even `e`.
    pub hasse_weil_interval: Option<(i128, i128)>,
    field_size: u64,
    genus: u64,
}

impl PointCount {
    /// `|total - (ℓ + 1)| <= 2g √ℓ`, checked exactly by squaring.
    pub fn within_hasse_weil(&self) -> bool {
        let dev = self.total as i128 - self.field_size as i128 - 1;
        let g = self.genus as i128;
        dev * dev <= 4 * g * g * self.field_size as i128
    }
}

/// Counts points on the smooth model over F_{p^e}, with F_{p^e} built from
/// the smallest irreducible polynomial.
pub fn count_points(params: &CurveParams, e: usize) -> Result<PointCount> {
    field_size(params, e)?;
    let ctx = find_irreducible(params.p, e)?;
    count_points_in(params, &ctx)
}

fn field_size(params: &CurveParams, e: usize) -> Result<u64> {
    if e == 0 {
        return Err(Error::InvalidParameter(
            "extension degree must be >= 1".into(),
        ));
    }
    match params.p().checked_pow(e as u32) {
        Some(size) if size <= MAX_FIELD_SIZE => Ok(size),
        other => Err(Error::FieldTooLarge {
            size: other.unwrap_or(u64::MAX),
            limit: MAX_FIELD_SIZE,
        }),
    }
}

/// Counts points using an explicit model of F_{p^e}.
pub fn count_points_in(params: &CurveParams, ctx: &ExtFieldCtx) -> Result<PointCount> {
    if ctx.prime() != params.p {
        return Err(Error::ModulusMismatch {
            left: ctx.prime().get(),
            right: params.p(),
        });
    }
    let e = ctx.degree();
    let size = field_size(params, e)?;
    let order = size - 1;
    // y^n = z has gcd(n, ℓ-1) solutions when z is a nonzero d-th power.
    let d = gcd(params.n, order);
    let residue_exp = order / d;
    let m = params.m;

    let affine: u64 = (0..size.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(size);
            let mut acc = 0u64;
            for idx in lo..hi {
                let x = ctx.element_at(idx);
                let z = if x.is_zero() {
                    x.clone()
                } else {
                    let xm = ctx.pow(&x, m).expect("x nonzero");
                    ctx.add(&xm, &x)
                };
                if z.is_zero() {
                    acc += 1;
                } else if ctx.pow(&z, residue_exp).expect("z nonzero") == ctx.one() {
                    acc += d;
                }
            }
            acc
        })
        .sum();

    // gcd(n, m) = 1: at infinity v(x) = -n and v(y) = -m, so the place over
    // x = ∞ is totally ramified and there is exactly one, rational.
    let at_infinity = 1;
    let hasse_weil_interval = e.is_multiple_of(2).then(|| {
        let root = params.p().pow(e as u32 / 2) as i128;
        let centre = size as i128 + 1;
        let width = 2 * params.g as i128 * root;
        (centre - width, centre + width)
    });
    Ok(PointCount {
        e,
        affine,
        at_infinity,
        total: affine + at_infinity,
        hasse_weil_interval,
        field_size: size,
        genus: params.g,
    })
}

/// `#X(F_{q^2}) == q^2 + 1 + 2 g q`.
pub fn is_maximal(params: &CurveParams) -> Result<bool> {
    let count = count_points(params, 2 * params.s as usize)?;
    Ok(count.total as u128 == maximal_count(params))
}

pub fn maximal_count(params: &CurveParams) -> u128 {
    let q = params.q as u128;
    q * q + 1 + 2 * params.g as u128 * q
}
