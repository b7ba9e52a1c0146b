//! Oracles shared by the integration tests. Nothing here calls the engine's
//! nabla / trinomial / Lucas code paths.

#![allow(dead_code)]

use cartier::{BiPoly, PrimeModulus};
use rand::Rng;

/// `a (a-1) ... (a-k+1) mod p` by direct multiplication.
pub fn falling_factorial(a: u64, k: u64, p: u64) -> u64 {
    (0..k).fold(1u64, |acc, t| acc * ((a - t) % p) % p)
}

/// `∂^{p-1}_x ∂^{p-1}_y f` computed term by term from the power rule.
pub fn formal_mixed_derivative(f: &BiPoly) -> BiPoly {
    let p = f.modulus();
    let pv = p.get();
    let terms = f.terms().filter_map(|(mono, c)| {
        if mono.ex < pv - 1 || mono.ey < pv - 1 {
            return None;
        }
        let fx = falling_factorial(mono.ex, pv - 1, pv);
        let fy = falling_factorial(mono.ey, pv - 1, pv);
        let coeff = c.value() * fx % pv * fy % pv;
        Some((mono.ex - (pv - 1), mono.ey - (pv - 1), coeff as i64))
    });
    BiPoly::from_terms(p, terms.collect::<Vec<_>>())
}

/// Sparse polynomial with up to `max_terms` terms and exponents `<= max_exp`.
pub fn random_poly<R: Rng>(rng: &mut R, p: PrimeModulus, max_terms: usize, max_exp: u64) -> BiPoly {
    let count = rng.gen_range(0..=max_terms);
    let terms: Vec<_> = (0..count)
        .map(|_| {
            (
                rng.gen_range(0..=max_exp),
                rng.gen_range(0..=max_exp),
                rng.gen_range(0..p.get() as i64),
            )
        })
        .collect();
    BiPoly::from_terms(p, terms)
}

/// Polynomial expansion of `(y^n - x - x^m)^e` by repeated multiplication.
pub fn trinomial_power_oracle(p: PrimeModulus, n: u64, m: u64, e: u32) -> BiPoly {
    let f = BiPoly::from_terms(p, [(0, n, 1), (1, 0, -1), (m, 0, -1)]);
    let mut acc = BiPoly::one(p);
    for _ in 0..e {
        acc = cartier::poly_mul(&acc, &f).unwrap();
    }
    acc
}

/// Valuation of `x^{a-1} dx / y^b` at every place type of `y^n = x^m + x`
/// (gcd(n, m) = 1, x^m + x separable): over x = ∞, over x = 0, over the
/// other roots of x^m + x. Elsewhere it is 0.
pub fn differential_valuations(n: i64, m: i64, a: i64, b: i64) -> [i64; 3] {
    let at_infinity = -n * (a - 1) + m * b - (n + 1);
    let at_zero = n * (a - 1) - b + (n - 1);
    let at_other_root = -b + (n - 1);
    [at_infinity, at_zero, at_other_root]
}

/// The parameter grid p ∈ {5,7,11,13}, s ∈ {1,2}, m ∈ {2,3,p,p²}, keeping
/// triples where all hypotheses hold and g <= cap.
pub fn hypothesis_grid(cap: u64) -> Vec<cartier::CurveParams> {
    let mut out = Vec::new();
    for p in [5u64, 7, 11, 13] {
        for s in [1u32, 2] {
            let mut ms = vec![2, 3, p, p * p];
            ms.dedup();
            for m in ms {
                let params = cartier::validate_params(p, s, m).unwrap();
                if params.hypotheses.all_hold() && params.g <= cap {
                    out.push(params);
                }
            }
        }
    }
    out
}
