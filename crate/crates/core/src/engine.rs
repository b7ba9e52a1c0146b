//! The Cartier operator on `H^0(X, Ω^1)` and its matrix.
//!
//! For a plane curve `F(x, y) = 0` and a polynomial `h`,
//! `C(h dx/F_y) = (∇(F^{p-1} h))^{1/p} dx/F_y`, where `∇` extracts the
//! coefficients at exponents `≡ p-1 (mod p)`. `F^{p-1} h` is expanded in the
//! free polynomial ring; the curve relation is applied only after the root.

use rayon::prelude::*;

use crate::bipoly::{curve_polynomial, trinomial_power_shift, BiPoly};
use crate::curve::{enumerate_basis, CurveParams, DifferentialBasis};
use crate::error::{Error, Result};
use crate::field::{Fp, PrimeModulus};

/// `(∇(F^{p-1} h))^{1/p}` for an arbitrary plane curve `F`, without any
/// reduction modulo `F`.
pub fn cartier_apply_plane(f: &BiPoly, h: &BiPoly) -> Result<BiPoly> {
    let p = f.modulus().get();
    let g = f.pow(p as u32 - 1).mul(h)?;
    g.nabla().root_exponents()
}

/// Returns `h'` with `C(h dx/F_y) = h' dx/F_y` on `y^n = x^m + x`, with `h'`
/// reduced to y-degree below `n`.
pub fn cartier_apply(h: &BiPoly, params: &CurveParams) -> Result<BiPoly> {
    if h.modulus() != params.p {
        return Err(Error::ModulusMismatch {
            left: h.modulus().get(),
            right: params.p(),
        });
    }
    let expanded = match h.len() {
        0 => return Ok(BiPoly::zero(params.p)),
        1 => {
            let (mono, c) = h.terms().next().unwrap();
            trinomial_power_shift(params, mono.ex, mono.ey).scale(c)
        }
        _ => trinomial_power_shift(params, 0, 0).mul(h)?,
    };
    Ok(expanded.nabla().root_exponents()?.curve_reduce(params))
}

/// Square matrix over F_p; column `c` holds the coordinates of the image of
/// basis element `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartierMatrix {
    p: PrimeModulus,
    columns: Vec<Vec<u64>>,
}

impl CartierMatrix {
    /// Builds a matrix from columns of residues. All columns must have
    /// length equal to the number of columns.
    pub fn from_columns(p: PrimeModulus, columns: Vec<Vec<u64>>) -> Self {
        let g = columns.len();
        assert!(
            columns.iter().all(|c| c.len() == g),
            "matrix must be square"
        );
        let columns = columns
            .into_iter()
            .map(|c| c.into_iter().map(|v| p.reduce(v)).collect())
            .collect();
        CartierMatrix { p, columns }
    }

    pub fn identity(p: PrimeModulus, g: usize) -> Self {
        let columns = (0..g)
            .map(|c| (0..g).map(|r| u64::from(r == c)).collect())
            .collect();
        CartierMatrix { p, columns }
    }

    pub fn zero(p: PrimeModulus, g: usize) -> Self {
        CartierMatrix {
            p,
            columns: vec![vec![0; g]; g],
        }
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn entry(&self, row: usize, col: usize) -> Fp {
        Fp::new(self.columns[col][row], self.p)
    }

    pub fn column(&self, col: usize) -> &[u64] {
        &self.columns[col]
    }

    pub fn columns(&self) -> &[Vec<u64>] {
        &self.columns
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.iter().all(|&v| v == 0))
    }

    /// `self · other`, skipping zero entries of `other`.
    pub fn mul(&self, other: &CartierMatrix) -> CartierMatrix {
        assert_eq!(self.dim(), other.dim());
        let p = self.p;
        let g = self.dim();
        let columns = other
            .columns
            .iter()
            .map(|ocol| {
                let mut out = vec![0u64; g];
                for (k, &b) in ocol.iter().enumerate() {
                    if b == 0 {
                        continue;
                    }
                    for (o, &a) in out.iter_mut().zip(&self.columns[k]) {
                        if a != 0 {
                            *o = p.add(*o, p.mul(a, b));
                        }
                    }
                }
                out
            })
            .collect();
        CartierMatrix { p, columns }
    }

    /// `self^k`, `k >= 1`, by binary exponentiation.
    pub fn pow(&self, k: u64) -> CartierMatrix {
        assert!(k >= 1);
        let mut acc: Option<CartierMatrix> = None;
        let mut base = self.clone();
        let mut k = k;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            if base.is_zero() {
                return CartierMatrix::zero(self.p, self.dim());
            }
            base = base.mul(&base);
        }
        acc.unwrap()
    }

    /// Exact rank over F_p.
    pub fn rank(&self) -> usize {
        rank_of_rows(self.rows(), self.p)
    }

    fn rows(&self) -> Vec<Vec<u64>> {
        let g = self.dim();
        (0..g)
            .map(|r| self.columns.iter().map(|c| c[r]).collect())
            .collect()
    }
}

/// Fraction-free elimination: `row <- pivot·row - lead·pivot_row`, pivot is
/// the first row with a nonzero entry in the current column.
fn rank_of_rows(mut rows: Vec<Vec<u64>>, p: PrimeModulus) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let (top, rest) = rows.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pv = pivot_row[col];
        for row in rest.iter_mut() {
            let lead = row[col];
            if lead == 0 {
                continue;
            }
            for (x, &y) in row.iter_mut().zip(pivot_row.iter()).skip(col) {
                *x = p.sub(p.mul(pv, *x), p.mul(lead, y));
            }
        }
        rank += 1;
    }
    rank
}

/// Free-function form of [`CartierMatrix::rank`].
pub fn rank(mat: &CartierMatrix) -> usize {
    mat.rank()
}

/// Column of the image of basis element `idx`.
fn image_column(params: &CurveParams, basis: &DifferentialBasis, idx: usize) -> Result<Vec<u64>> {
    let (i, j) = basis.monomial(idx);
    let h = BiPoly::monomial(params.p, i, j, 1);
    let image = cartier_apply(&h, params)?;
    let mut col = vec![0u64; basis.len()];
    for (mono, c) in image.terms() {
        let row = basis
            .position(mono.ex, mono.ey)
            .ok_or(Error::ImageOutsideBasis {
                ex: mono.ex,
                ey: mono.ey,
            })?;
        col[row] = c.value();
    }
    Ok(col)
}

/// Matrix of the Cartier operator in the basis of [`enumerate_basis`].
pub fn cartier_matrix(params: &CurveParams) -> Result<CartierMatrix> {
    let basis = enumerate_basis(params)?;
    cartier_matrix_in(params, &basis)
}

pub fn cartier_matrix_in(params: &CurveParams, basis: &DifferentialBasis) -> Result<CartierMatrix> {
    let columns = (0..basis.len())
        .into_par_iter()
        .map(|idx| image_column(params, basis, idx))
        .collect::<Result<Vec<_>>>()?;
    Ok(CartierMatrix {
        p: params.p,
        columns,
    })
}

/// Basis entry `(a, b)`, its numerator `h` and the image `C(h)`.
pub type ColumnImage = ((u64, u64), BiPoly, BiPoly);

/// Images `(h, C(h))` of each basis numerator, for dumps.
pub fn cartier_images(params: &CurveParams) -> Result<Vec<ColumnImage>> {
    let basis = enumerate_basis(params)?;
    (0..basis.len())
        .map(|idx| {
            let (i, j) = basis.monomial(idx);
            let h = BiPoly::monomial(params.p, i, j, 1);
            let image = cartier_apply(&h, params)?;
            Ok((basis.entries()[idx], h, image))
        })
        .collect()
}

/// `g - rank`.
pub fn a_number(params: &CurveParams) -> Result<u64> {
    let mat = cartier_matrix(params)?;
    Ok(params.g - mat.rank() as u64)
}

/// Stable rank: rank of the g-fold product `A · A · ... · A`.
pub fn p_rank_of(mat: &CartierMatrix) -> usize {
    if mat.dim() == 0 || mat.is_zero() {
        return 0;
    }
    mat.pow(mat.dim() as u64).rank()
}

pub fn p_rank(params: &CurveParams) -> Result<usize> {
    Ok(p_rank_of(&cartier_matrix(params)?))
}

/// `F = y^n - x - x^m` as used by the engine.
pub fn defining_polynomial(params: &CurveParams) -> BiPoly {
    curve_polynomial(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::validate_params;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn apply_zero_is_zero() {
        let params = validate_params(5, 1, 2).unwrap();
        assert!(cartier_apply(&BiPoly::zero(params.p), &params)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn monomial_fast_path_matches_generic_pipeline() {
        for (p, s, m) in [(5, 1, 2), (5, 2, 2), (5, 2, 3), (7, 1, 3), (7, 2, 2)] {
            let params = validate_params(p, s, m).unwrap();
            let f = defining_polynomial(&params);
            let basis = enumerate_basis(&params).unwrap();
            for idx in 0..basis.len() {
                let (i, j) = basis.monomial(idx);
                let h = BiPoly::monomial(params.p, i, j, 1);
                let fast = cartier_apply(&h, &params).unwrap();
                let slow = cartier_apply_plane(&f, &h).unwrap().curve_reduce(&params);
                assert_eq!(fast, slow);
            }
        }
    }

    #[test]
    fn elliptic_case_is_zero() {
        let params = validate_params(5, 1, 2).unwrap();
        let mat = cartier_matrix(&params).unwrap();
        assert_eq!(mat.dim(), 1);
        assert_eq!(mat.entry(0, 0).value(), 0);
        assert_eq!(a_number(&params).unwrap(), 1);
        assert_eq!(p_rank(&params).unwrap(), 0);
    }

    #[test]
    fn s1_matrix_is_zero() {
        let params = validate_params(7, 1, 3).unwrap();
        let mat = cartier_matrix(&params).unwrap();
        assert_eq!(mat, CartierMatrix::zero(params.p, 3));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(CartierMatrix::zero(pm(5), 3).rank(), 0);
        assert_eq!(CartierMatrix::identity(pm(7), 9).rank(), 9);
        let m = CartierMatrix::from_columns(pm(5), vec![vec![1, 2], vec![2, 4]]);
        assert_eq!(m.rank(), 1);
        let m =
            CartierMatrix::from_columns(pm(5), vec![vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.pow(2).rank(), 1);
        assert_eq!(p_rank_of(&m), 0);
    }

    #[test]
    fn rank_matches_brute_force_on_small_matrices() {
        // Oracle: rank = log_p |column space|, by enumerating combinations.
        let p = pm(3);
        let mut state = 12345u64;
        for _ in 0..40 {
            let cols: Vec<Vec<u64>> = (0..3)
                .map(|_| {
                    (0..3)
                        .map(|_| {
                            state = state
                                .wrapping_mul(6364136223846793005)
                                .wrapping_add(1442695040888963407);
                            (state >> 33) % 3
                        })
                        .collect()
                })
                .collect();
            let mut span = std::collections::HashSet::new();
            for a in 0..3 {
                for b in 0..3 {
                    for c in 0..3 {
                        let v: Vec<u64> = (0..3)
                            .map(|r| (a * cols[0][r] + b * cols[1][r] + c * cols[2][r]) % 3)
                            .collect();
                        span.insert(v);
                    }
                }
            }
            let expected = (span.len() as f64).log(3.0).round() as usize;
            assert_eq!(CartierMatrix::from_columns(p, cols).rank(), expected);
        }
    }

    #[test]
    fn a_number_examples() {
        let params = validate_params(11, 1, 11).unwrap();
        assert_eq!(a_number(&params).unwrap(), 25);
    }

    #[test]
    fn modulus_mismatch_rejected() {
        let params = validate_params(5, 1, 2).unwrap();
        let h = BiPoly::one(pm(7));
        assert!(matches!(
            cartier_apply(&h, &params),
            Err(Error::ModulusMismatch { .. })
        ));
    }
}
