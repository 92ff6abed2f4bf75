use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{PolyMap, Polynomial};

/// Dense square integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix {
            n,
            data: vec![BigInt::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::dims("matrix row", n, row.len()));
            }
            data.extend(row.iter().cloned().map(Into::into));
        }
        Ok(IntMatrix { n, data })
    }

    /// Permutation matrix `P` with `(P x)_i = x_{perm[i]}`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(n);
        for (i, &j) in perm.iter().enumerate() {
            m.data[i * n + j] = BigInt::one();
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.n + j] = value;
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n, "matrix sizes differ");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.data[k * n + j];
                    if !b.is_zero() {
                        out.data[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| &self.data[i * self.n + j] * &v[j])
                    .sum()
            })
            .collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].clone();
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        let n = self.n;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                match (k + 1..n).find(|&r| !a[r * n + k].is_zero()) {
                    Some(r) => {
                        for j in 0..n {
                            a.swap(k * n + j, r * n + j);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j]) / &prev;
                    a[i * n + j] = v;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * &a[n * n - 1]
    }

    /// Exact inverse, if it exists over the integers.
    pub fn integer_inverse(&self) -> Option<IntMatrix> {
        let n = self.n;
        let mut a: Vec<BigRational> = self
            .data
            .iter()
            .map(|v| BigRational::from_integer(v.clone()))
            .collect();
        let mut inv: Vec<BigRational> = Self::identity(n)
            .data
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r * n + col].is_zero())?;
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                    inv.swap(col * n + j, pivot * n + j);
                }
            }
            let p = a[col * n + col].clone();
            for j in 0..n {
                a[col * n + j] = &a[col * n + j] / &p;
                inv[col * n + j] = &inv[col * n + j] / &p;
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let factor = a[r * n + col].clone();
                for j in 0..n {
                    let da = &factor * &a[col * n + j];
                    let di = &factor * &inv[col * n + j];
                    a[r * n + j] -= da;
                    inv[r * n + j] -= di;
                }
            }
        }
        let data = inv
            .into_iter()
            .map(|q| q.is_integer().then(|| q.to_integer()))
            .collect::<Option<Vec<_>>>()?;
        Some(IntMatrix { n, data })
    }

    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(|v| v.abs()).max().unwrap_or_default()
    }

    /// Largest number of nonzero entries in a row.
    pub fn max_row_nonzeros(&self) -> usize {
        self.data
            .chunks(self.n.max(1))
            .map(|r| r.iter().filter(|v| !v.is_zero()).count())
            .max()
            .unwrap_or(0)
    }

    /// Largest row sum of absolute values.
    pub fn max_row_l1(&self) -> BigInt {
        self.data
            .chunks(self.n.max(1))
            .map(|r| r.iter().map(|v| v.abs()).sum::<BigInt>())
            .max()
            .unwrap_or_default()
    }

    /// The polynomial map `x -> M x + offset`.
    pub fn to_polymap(&self, offset: &[BigInt]) -> PolyMap {
        let n = self.n;
        let components = (0..n)
            .map(|i| {
                let mut p = Polynomial::constant(n, offset[i].clone());
                for j in 0..n {
                    let c = &self.data[i * n + j];
                    if !c.is_zero() {
                        p = &p + &Polynomial::var(n, j).scale(c);
                    }
                }
                p
            })
            .collect();
        PolyMap::new(n, components).expect("components built with matching arity")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let a = m(&[vec![2, -3, 1], vec![2, 0, -1], vec![1, 4, 5]]);
        // 2(0+4) + 3(10+1) + 1(8-0) = 8 + 33 + 8
        assert_eq!(a.determinant(), BigInt::from(49));
        let p = m(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(p.determinant(), BigInt::from(-1));
        let singular = m(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(singular.determinant(), BigInt::from(0));
    }

    #[test]
    fn adjugate_inverse_for_2x2() {
        let a = m(&[vec![3, 5], vec![1, 2]]);
        let inv = a.integer_inverse().unwrap();
        assert_eq!(inv, m(&[vec![2, -5], vec![-1, 3]]));
        assert!(a.mul(&inv).is_identity());
    }

    #[test]
    fn non_unimodular_has_no_integer_inverse() {
        assert!(m(&[vec![2, 0], vec![0, 1]]).integer_inverse().is_none());
    }

    #[test]
    fn permutation_inverse_is_transpose() {
        let p = IntMatrix::permutation(&[2, 0, 1]);
        assert!(p.mul(&p.transpose()).is_identity());
        let v = [BigInt::from(10), BigInt::from(20), BigInt::from(30)];
        assert_eq!(
            p.apply(&v),
            vec![BigInt::from(30), BigInt::from(10), BigInt::from(20)]
        );
    }
}
