use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::unimodular::{rational_to_f64, unimodular_with_mean_alpha, Unimodular};
use super::IntMatrix;
use crate::error::{Error, Result};
use crate::poly::PolyMap;
use crate::rng::SeededRng;

/// `x -> M x + offset` with `M` unimodular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    matrix: IntMatrix,
    inverse: IntMatrix,
    offset: Vec<BigInt>,
}

impl AffineMap {
    /// Fails unless `matrix` has an integer inverse.
    pub fn new(matrix: IntMatrix, offset: Vec<BigInt>) -> Result<Self> {
        if offset.len() != matrix.size() {
            return Err(Error::dims("affine offset", matrix.size(), offset.len()));
        }
        let inverse = matrix
            .integer_inverse()
            .ok_or_else(|| Error::InvalidParameter("matrix is not unimodular".into()))?;
        Ok(AffineMap {
            matrix,
            inverse,
            offset,
        })
    }

    pub(crate) fn from_unimodular(u: Unimodular, offset: Vec<BigInt>) -> Self {
        AffineMap {
            matrix: u.matrix,
            inverse: u.inverse,
            offset,
        }
    }

    pub fn identity(n: usize) -> Self {
        AffineMap {
            matrix: IntMatrix::identity(n),
            inverse: IntMatrix::identity(n),
            offset: vec![BigInt::zero(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.size()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn inverse_matrix(&self) -> &IntMatrix {
        &self.inverse
    }

    pub fn offset(&self) -> &[BigInt] {
        &self.offset
    }

    pub fn determinant(&self) -> BigInt {
        self.matrix.determinant()
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.matrix
            .apply(x)
            .into_iter()
            .zip(&self.offset)
            .map(|(v, c)| v + c)
            .collect()
    }

    pub fn to_polymap(&self) -> PolyMap {
        self.matrix.to_polymap(&self.offset)
    }

    /// `y -> M⁻¹ (y - offset)`.
    pub fn inverse_polymap(&self) -> PolyMap {
        let shift: Vec<BigInt> = self.inverse.apply(&self.offset).into_iter().map(|v| -v).collect();
        self.inverse.to_polymap(&shift)
    }
}

/// Parameters of the affine generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineParams {
    pub n: usize,
    pub beta: u64,
    pub mu: u64,
    pub mu_bar: BigRational,
    /// Draw a translation offset when the row budget leaves room for one.
    pub offset: bool,
}

fn ilog2(v: u64) -> u32 {
    63 - v.leading_zeros()
}

/// Largest `x >= 1` with `x^nu * mu <= beta`, or 1 when none exists.
fn factor_beta(beta: u64, mu: u64, nu: u32) -> u64 {
    let budget = BigInt::from(beta);
    let fits = |x: u64| BigInt::from(x).pow(nu) * mu <= budget;
    if !fits(1) {
        return 1;
    }
    let (mut lo, mut hi) = (1u64, beta.max(1));
    while lo < hi {
        let mid = lo + (hi - lo + 1) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// Random sparse affine automorphism: a product of `ν = ⌊log2 μ⌋` sparse
/// unimodular factors plus an optional offset. With `μ = 1` the matrix is a
/// signed permutation and there is no offset.
///
/// Entries of `M` and `M⁻¹` stay within `β`: each factor has entries at most
/// `β'` with `β'^ν μ <= β`, and a product of `ν` factors with two entries per
/// row multiplies entry sizes by at most `2^(ν-1) <= μ`.
pub fn gen_affine(params: &AffineParams, rng: &mut SeededRng) -> Result<AffineMap> {
    let AffineParams { n, beta, mu, .. } = *params;
    if beta < 1 || mu < 1 {
        return Err(Error::InvalidParameter(
            "affine generation needs β >= 1 and μ >= 1".into(),
        ));
    }
    let nu = ilog2(mu).max(1);
    let factor_bound = if mu == 1 { 1 } else { factor_beta(beta, mu, nu) };
    let per_factor_mu_bar = rational_to_f64(&params.mu_bar).max(1.0).powf(1.0 / nu as f64);
    let mean_alpha = n as f64 * (per_factor_mu_bar - 1.0) / 2.0;

    let mut acc = Unimodular::identity(n);
    for _ in 0..nu {
        let factor = if mu == 1 {
            unimodular_with_mean_alpha(n, 1, 0.0, rng)?
        } else {
            unimodular_with_mean_alpha(n, factor_bound, mean_alpha, rng)?
        };
        acc = acc.then_mul(&factor);
    }

    let mut offset = vec![BigInt::zero(); n];
    if params.offset && (1u64 << nu) < mu {
        // |M⁻¹ c| <= rowL1(M⁻¹) |c| keeps the inverse offset within β.
        let l1 = acc.inverse.max_row_l1().to_u64().unwrap_or(u64::MAX).max(1);
        let bound = (beta / l1) as i64;
        for c in offset.iter_mut() {
            *c = BigInt::from(rng.range_i64(-bound, bound));
        }
    }
    Ok(AffineMap::from_unimodular(acc, offset))
}
