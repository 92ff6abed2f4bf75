//! Small sparse unimodular matrices: 2×2 Bézout completions, block-diagonal
//! assemblies and their permuted conjugates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use super::IntMatrix;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// A unimodular matrix together with its exact inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unimodular {
    pub matrix: IntMatrix,
    pub inverse: IntMatrix,
}

impl Unimodular {
    pub fn identity(n: usize) -> Self {
        Unimodular {
            matrix: IntMatrix::identity(n),
            inverse: IntMatrix::identity(n),
        }
    }

    pub fn size(&self) -> usize {
        self.matrix.size()
    }

    pub fn determinant(&self) -> BigInt {
        self.matrix.determinant()
    }

    /// `self * other`, with inverse `other⁻¹ * self⁻¹`.
    pub fn then_mul(&self, other: &Unimodular) -> Unimodular {
        Unimodular {
            matrix: self.matrix.mul(&other.matrix),
            inverse: other.inverse.mul(&self.inverse),
        }
    }

    pub fn check(&self) -> bool {
        self.matrix.mul(&self.inverse).is_identity()
    }
}

/// `[[x11, x12], [x, y]]` with `x11*y - x12*x = delta`, choosing the
/// solution of least max-absolute-value (ties: non-negative `y`, then smaller
/// `|x| + |y|`, then smaller `x`).
pub fn unimodular_completion(x11: i64, x12: i64, delta: i64) -> Result<[[i64; 2]; 2]> {
    if delta != 1 && delta != -1 {
        return Err(Error::InvalidParameter(format!(
            "determinant must be ±1, got {delta}"
        )));
    }
    let (a, b, d) = (x11 as i128, x12 as i128, delta as i128);
    let eg = a.extended_gcd(&b);
    if eg.gcd.abs() != 1 {
        return Err(Error::InvalidParameter(format!(
            "{x11} and {x12} are not coprime"
        )));
    }
    let (s, t) = if eg.gcd == 1 { (eg.x, eg.y) } else { (-eg.x, -eg.y) };
    // a*s + b*t = 1  =>  y0 = s*d, x0 = -t*d; general y = y0 + k*b, x = x0 + k*a
    let (y0, x0) = (s * d, -t * d);
    let mut centers = Vec::new();
    if b != 0 {
        centers.push(-Integer::div_floor(&y0, &b));
    }
    if a != 0 {
        centers.push(-Integer::div_floor(&x0, &a));
    }
    let lo = centers.iter().min().copied().unwrap_or(0) - 2;
    let hi = centers.iter().max().copied().unwrap_or(0) + 2;
    let best = (lo..=hi)
        .map(|k| (x0 + k * a, y0 + k * b))
        .min_by_key(|&(x, y)| (x.abs().max(y.abs()), y < 0, x.abs() + y.abs(), x))
        .expect("non-empty search window");
    Ok([[x11, x12], [best.0 as i64, best.1 as i64]])
}

fn two_by_two(entries: [[i64; 2]; 2]) -> Unimodular {
    let [[a, b], [c, d]] = entries;
    let det = a * d - b * c;
    let matrix = IntMatrix::from_rows(&[vec![a, b], vec![c, d]]).expect("2x2");
    // inverse of a unimodular 2×2 is det * adjugate
    let inverse =
        IntMatrix::from_rows(&[vec![det * d, -det * b], vec![-det * c, det * a]]).expect("2x2");
    Unimodular { matrix, inverse }
}

/// Random 2×2 unimodular matrix with determinant `delta` and every entry of
/// it and its inverse bounded by `beta`. When `dense` is set all four entries
/// are nonzero (needs `beta >= 2`).
pub fn gen_unimodular_2x2(
    beta: u64,
    delta: i64,
    dense: bool,
    rng: &mut SeededRng,
) -> Result<Unimodular> {
    if beta < 1 {
        return Err(Error::InvalidParameter("β must be at least 1".into()));
    }
    if dense && beta < 2 {
        return Err(Error::InvalidParameter(
            "no dense 2×2 unimodular matrix has all entries bounded by 1".into(),
        ));
    }
    let b = beta as i64;
    loop {
        let x11 = nonzero_in(b, rng);
        let x12 = nonzero_in(b, rng);
        if x11.gcd(&x12) != 1 {
            continue;
        }
        let entries = unimodular_completion(x11, x12, delta)?;
        let [_, [x, y]] = entries;
        if x.abs() > b || y.abs() > b {
            continue;
        }
        if dense && (x == 0 || y == 0) {
            continue;
        }
        return Ok(two_by_two(entries));
    }
}

fn nonzero_in(bound: i64, rng: &mut SeededRng) -> i64 {
    loop {
        let v = rng.range_i64(-bound, bound);
        if v != 0 {
            return v;
        }
    }
}

/// Assemble `blocks` (each 2×2) followed by 1×1 entries `signs` on the
/// diagonal. The dimension is `2*blocks.len() + signs.len()`.
pub fn block_diagonal(blocks: &[Unimodular], signs: &[i64]) -> Result<Unimodular> {
    if let Some(b) = blocks.iter().find(|b| b.size() != 2) {
        return Err(Error::dims("block-diagonal block", 2, b.size()));
    }
    if let Some(&s) = signs.iter().find(|&&s| s != 1 && s != -1) {
        return Err(Error::InvalidParameter(format!(
            "diagonal entry must be ±1, got {s}"
        )));
    }
    let n = 2 * blocks.len() + signs.len();
    let mut matrix = IntMatrix::zeros(n);
    let mut inverse = IntMatrix::zeros(n);
    for (k, block) in blocks.iter().enumerate() {
        let o = 2 * k;
        for i in 0..2 {
            for j in 0..2 {
                matrix.set(o + i, o + j, block.matrix.get(i, j).clone());
                inverse.set(o + i, o + j, block.inverse.get(i, j).clone());
            }
        }
    }
    for (k, &s) in signs.iter().enumerate() {
        let o = 2 * blocks.len() + k;
        matrix.set(o, o, BigInt::from(s));
        inverse.set(o, o, BigInt::from(s));
    }
    Ok(Unimodular { matrix, inverse })
}

/// Random block-diagonal unimodular matrix with `alpha` dense 2×2 blocks and
/// `n - 2*alpha` diagonal ±1 entries. Blocks are redrawn (a bounded number of
/// times) to keep them pairwise distinct.
pub fn gen_block_diagonal(
    n: usize,
    alpha: usize,
    beta: u64,
    rng: &mut SeededRng,
) -> Result<Unimodular> {
    if 2 * alpha > n {
        return Err(Error::InvalidParameter(format!(
            "{alpha} 2×2 blocks do not fit in dimension {n}"
        )));
    }
    let mut blocks: Vec<Unimodular> = Vec::with_capacity(alpha);
    for _ in 0..alpha {
        let delta = rng.sign();
        let mut block = gen_unimodular_2x2(beta, delta, true, rng)?;
        for _ in 0..32 {
            if !blocks.contains(&block) {
                break;
            }
            block = gen_unimodular_2x2(beta, delta, true, rng)?;
        }
        blocks.push(block);
    }
    let signs: Vec<i64> = (0..n - 2 * alpha).map(|_| rng.sign()).collect();
    block_diagonal(&blocks, &signs)
}

/// Draw a block count with the requested mean, clamped to `[0, n/2]`.
fn draw_alpha(n: usize, mean: f64, rng: &mut SeededRng) -> usize {
    let mean = mean.clamp(0.0, (n / 2) as f64);
    let base = mean.floor();
    let extra = usize::from(rng.unit_f64() < mean - base);
    (base as usize + extra).min(n / 2)
}

/// `P1 · Δ · P2` for random permutations and a block-diagonal `Δ` whose
/// expected block count is `expected_alpha`. With `beta < 2` no dense block
/// exists and the result is a signed permutation matrix.
pub(crate) fn unimodular_with_mean_alpha(
    n: usize,
    beta: u64,
    expected_alpha: f64,
    rng: &mut SeededRng,
) -> Result<Unimodular> {
    let alpha = if beta < 2 {
        0
    } else {
        draw_alpha(n, expected_alpha, rng)
    };
    let delta = gen_block_diagonal(n, alpha, beta, rng)?;
    let p1 = IntMatrix::permutation(&rng.permutation(n));
    let p2 = IntMatrix::permutation(&rng.permutation(n));
    Ok(Unimodular {
        matrix: p1.mul(&delta.matrix).mul(&p2),
        inverse: p2.transpose().mul(&delta.inverse).mul(&p1.transpose()),
    })
}

/// Random sparse unimodular `n×n` matrix `P1 Δ P2` with expected mean row
/// weight `mu_bar`, which must lie strictly between 1 and 2.
pub fn gen_unimodular_n(
    n: usize,
    beta: u64,
    mu_bar: &BigRational,
    rng: &mut SeededRng,
) -> Result<Unimodular> {
    let one = BigRational::from_integer(1.into());
    let two = BigRational::from_integer(2.into());
    if *mu_bar <= one || *mu_bar >= two {
        return Err(Error::InvalidParameter(format!(
            "mean row weight must lie in (1, 2), got {mu_bar}"
        )));
    }
    if beta < 1 {
        return Err(Error::InvalidParameter("β must be at least 1".into()));
    }
    let mean = n as f64 * (rational_to_f64(mu_bar) - 1.0) / 2.0;
    unimodular_with_mean_alpha(n, beta, mean, rng)
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::PolyMap;

    #[test]
    fn completion_examples() {
        assert_eq!(unimodular_completion(3, 5, 1).unwrap(), [[3, 5], [1, 2]]);
        assert_eq!(unimodular_completion(1, 0, 1).unwrap(), [[1, 0], [0, 1]]);
        assert_eq!(unimodular_completion(2, 3, -1).unwrap(), [[2, 3], [1, 1]]);
    }

    /// Brute-force oracle: scan a box for the least max-abs solution.
    fn brute_force(x11: i64, x12: i64, delta: i64) -> i64 {
        let mut best = i64::MAX;
        for x in -60..=60i64 {
            for y in -60..=60i64 {
                if x11 * y - x12 * x == delta {
                    best = best.min(x.abs().max(y.abs()));
                }
            }
        }
        best
    }

    #[test]
    fn completion_is_minimal_against_brute_force() {
        for x11 in -12i64..=12 {
            for x12 in -12i64..=12 {
                if x11.gcd(&x12) != 1 {
                    continue;
                }
                for delta in [1, -1] {
                    let [[a, b], [x, y]] = unimodular_completion(x11, x12, delta).unwrap();
                    assert_eq!(a * y - b * x, delta);
                    assert_eq!(x.abs().max(y.abs()), brute_force(x11, x12, delta));
                    assert!(x.abs() <= x11.abs().max(x12.abs()).max(1));
                    assert!(y.abs() <= x11.abs().max(x12.abs()).max(1));
                }
            }
        }
    }

    #[test]
    fn completion_rejects_non_coprime() {
        assert!(unimodular_completion(4, 6, 1).is_err());
        assert!(unimodular_completion(3, 5, 2).is_err());
    }

    #[test]
    fn random_2x2_respects_bounds() {
        let mut rng = SeededRng::new(11);
        for beta in [1u64, 2, 5, 100] {
            for _ in 0..50 {
                let delta = rng.sign();
                let u = gen_unimodular_2x2(beta, delta, false, &mut rng).unwrap();
                assert_eq!(u.determinant(), BigInt::from(delta));
                assert!(u.check());
                assert!(u.matrix.max_abs() <= BigInt::from(beta));
                assert!(u.inverse.max_abs() <= BigInt::from(beta));
            }
        }
    }

    #[test]
    fn block_diagonal_example() {
        let block = two_by_two([[3, 5], [1, 2]]);
        let d = block_diagonal(&[block], &[1, -1]).unwrap();
        assert_eq!(d.determinant(), BigInt::from(-1));
        assert!(d.check());
        let m = d.matrix.to_polymap(&vec![BigInt::from(0); 4]).metrics();
        assert_eq!(m.avg_monomials, BigRational::new(3.into(), 2.into()));
        assert_eq!(m.max_monomials, 2);
    }

    #[test]
    fn block_diagonal_shapes() {
        let mut rng = SeededRng::new(5);
        let d = gen_block_diagonal(2, 0, 3, &mut rng).unwrap();
        assert_eq!(d.matrix.max_row_nonzeros(), 1);
        let d3 = gen_block_diagonal(3, 1, 3, &mut rng).unwrap();
        let ones = (0..3)
            .filter(|&i| (0..3).filter(|&j| d3.matrix.get(i, j) != &BigInt::from(0)).count() == 1)
            .count();
        assert_eq!(ones, 1);
        assert!(gen_block_diagonal(3, 2, 3, &mut rng).is_err());
    }

    #[test]
    fn block_diagonal_mean_row_weight_is_exact() {
        let mut rng = SeededRng::new(8);
        for (n, alpha) in [(4, 1), (5, 2), (6, 3), (7, 0)] {
            let d = gen_block_diagonal(n, alpha, 4, &mut rng).unwrap();
            let zero = vec![BigInt::from(0); n];
            let expect = BigRational::new((n + 2 * alpha).into(), n.into());
            assert_eq!(d.matrix.to_polymap(&zero).metrics().avg_monomials, expect);
            assert_eq!(d.inverse.to_polymap(&zero).metrics().avg_monomials, expect);
            assert_eq!(d.determinant().magnitude(), &1u32.into());
        }
    }

    #[test]
    fn permuted_identity_is_permutation() {
        let mut rng = SeededRng::new(2);
        let u = unimodular_with_mean_alpha(5, 1, 2.0, &mut rng).unwrap();
        assert_eq!(u.matrix.max_row_nonzeros(), 1);
        assert!(u.check());
    }

    #[test]
    fn gen_n_is_unimodular() {
        let mut rng = SeededRng::new(0);
        let mu_bar = BigRational::new(3.into(), 2.into());
        for _ in 0..20 {
            let u = gen_unimodular_n(6, 7, &mu_bar, &mut rng).unwrap();
            assert_eq!(u.determinant().magnitude(), &1u32.into());
            assert!(u.check());
            assert!(u.matrix.max_abs() <= BigInt::from(7));
            assert!(u.inverse.max_abs() <= BigInt::from(7));
            assert!(u.matrix.max_row_nonzeros() <= 2);
            let id = PolyMap::identity(6);
            let _ = id;
        }
        assert!(gen_unimodular_n(4, 3, &BigRational::from_integer(2.into()), &mut rng).is_err());
        assert!(gen_unimodular_n(4, 3, &BigRational::from_integer(1.into()), &mut rng).is_err());
    }

    #[test]
    fn single_block_conjugated_by_identity() {
        let block = two_by_two([[3, 5], [1, 2]]);
        let id = IntMatrix::identity(2);
        let m = id.mul(&block.matrix).mul(&id);
        assert_eq!(m, IntMatrix::from_rows(&[vec![3, 5], vec![1, 2]]).unwrap());
    }
}
