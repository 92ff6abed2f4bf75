use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::polynomial::{check_inner, substitute_cached, PointPowers, PowerCache};
use super::Polynomial;
use crate::error::{Error, Result};

/// A polynomial map `Z^domain -> Z^codomain`, one canonical polynomial per
/// output coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyMap {
    domain: usize,
    components: Vec<Polynomial>,
}

/// The four complexity measures of a polynomial map: maximum degree, largest
/// coefficient magnitude, and the maximum and mean term counts per component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metrics {
    pub degree: u32,
    pub coeff_norm: BigInt,
    pub max_monomials: usize,
    pub avg_monomials: BigRational,
}

impl PolyMap {
    pub fn new(domain: usize, components: Vec<Polynomial>) -> Result<Self> {
        if let Some(p) = components.iter().find(|p| p.num_vars() != domain) {
            return Err(Error::dims("polynomial map component", domain, p.num_vars()));
        }
        Ok(PolyMap { domain, components })
    }

    pub fn identity(n: usize) -> Self {
        PolyMap {
            domain: n,
            components: (0..n).map(|i| Polynomial::var(n, i)).collect(),
        }
    }

    /// Coordinate projection onto the listed (zero-based) indices.
    pub fn projection(domain: usize, indices: &[usize]) -> Self {
        PolyMap {
            domain,
            components: indices.iter().map(|&i| Polynomial::var(domain, i)).collect(),
        }
    }

    pub fn domain_dim(&self) -> usize {
        self.domain
    }

    pub fn codomain_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, index: usize) -> &Polynomial {
        &self.components[index]
    }

    pub fn into_components(self) -> Vec<Polynomial> {
        self.components
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.components.len()
            && self
                .components
                .iter()
                .enumerate()
                .all(|(i, p)| *p == Polynomial::var(self.domain, i))
    }

    /// `outer ∘ inner`: substitute `inner`'s components for `outer`'s
    /// variables and expand.
    pub fn compose(outer: &PolyMap, inner: &PolyMap) -> Result<PolyMap> {
        if outer.domain != inner.codomain_dim() {
            return Err(Error::dims(
                "composition",
                outer.domain,
                inner.codomain_dim(),
            ));
        }
        let target = check_inner(outer.domain, &inner.components)?;
        let target = if inner.components.is_empty() {
            inner.domain
        } else {
            target
        };
        let mut cache = PowerCache::new(&inner.components);
        let components = outer
            .components
            .iter()
            .map(|p| substitute_cached(p, target, &mut cache))
            .collect();
        Ok(PolyMap {
            domain: inner.domain,
            components,
        })
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &PolyMap) -> Result<PolyMap> {
        PolyMap::compose(self, inner)
    }

    pub fn evaluate(&self, point: &[BigInt]) -> Result<Vec<BigInt>> {
        if point.len() != self.domain {
            return Err(Error::dims("map evaluation", self.domain, point.len()));
        }
        let mut powers = PointPowers::new(point);
        Ok(self
            .components
            .iter()
            .map(|p| p.evaluate_with(&mut powers))
            .collect())
    }

    pub fn metrics(&self) -> Metrics {
        let degree = self.components.iter().map(|p| p.degree()).max().unwrap_or(0);
        let coeff_norm = self
            .components
            .iter()
            .map(|p| p.coeff_norm())
            .max()
            .unwrap_or_default();
        let counts: Vec<usize> = self.components.iter().map(|p| p.num_terms()).collect();
        let max_monomials = counts.iter().copied().max().unwrap_or(0);
        let avg_monomials = if counts.is_empty() {
            BigRational::zero()
        } else {
            BigRational::new(
                BigInt::from(counts.iter().sum::<usize>()),
                BigInt::from(counts.len()),
            )
        };
        Metrics {
            degree,
            coeff_norm,
            max_monomials,
            avg_monomials,
        }
    }

    /// Components of `self` followed by those of `other` (same domain).
    pub fn stack(&self, other: &PolyMap) -> Result<PolyMap> {
        if self.domain != other.domain {
            return Err(Error::dims("map stacking", self.domain, other.domain));
        }
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        Ok(PolyMap {
            domain: self.domain,
            components,
        })
    }

    /// Componentwise sum of two maps with equal shape.
    pub fn checked_add(&self, other: &PolyMap) -> Result<PolyMap> {
        if self.domain != other.domain {
            return Err(Error::dims("map addition", self.domain, other.domain));
        }
        if self.codomain_dim() != other.codomain_dim() {
            return Err(Error::dims(
                "map addition",
                self.codomain_dim(),
                other.codomain_dim(),
            ));
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a + b)
            .collect();
        Ok(PolyMap {
            domain: self.domain,
            components,
        })
    }

    pub fn checked_sub(&self, other: &PolyMap) -> Result<PolyMap> {
        let negated = PolyMap {
            domain: other.domain,
            components: other.components.iter().map(|p| -p).collect(),
        };
        self.checked_add(&negated)
    }

    /// Rename every component's variables into a larger (or permuted) space.
    pub fn remap_vars(&self, num_vars: usize, mapping: &[usize]) -> Result<PolyMap> {
        let components = self
            .components
            .iter()
            .map(|p| p.remap_vars(num_vars, mapping))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyMap {
            domain: num_vars,
            components,
        })
    }

    /// Render one component per line as `name_i = ...`.
    pub fn render(&self, lhs: &[impl AsRef<str>], vars: &[impl AsRef<str>]) -> String {
        self.components
            .iter()
            .zip(lhs)
            .map(|(p, name)| format!("{} = {}", name.as_ref(), p.render(vars)))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = Polynomial::default_names(self.domain);
        let parts: Vec<String> = self.components.iter().map(|p| p.render(&names)).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn v(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    #[test]
    fn compose_with_identity() {
        let f = PolyMap::new(2, vec![&v(2, 0) + &v(2, 1), &v(2, 0) * &v(2, 1)]).unwrap();
        let id = PolyMap::identity(2);
        assert_eq!(PolyMap::compose(&id, &f).unwrap(), f);
        assert_eq!(PolyMap::compose(&f, &id).unwrap(), f);
    }

    #[test]
    fn compose_dimension_mismatch() {
        let f = PolyMap::identity(3);
        let g = PolyMap::identity(2);
        assert!(matches!(
            PolyMap::compose(&f, &g),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn evaluate_length_mismatch() {
        assert!(PolyMap::identity(2).evaluate(&[BigInt::one()]).is_err());
    }

    #[test]
    fn zero_map_metrics() {
        let m = PolyMap::new(2, vec![Polynomial::zero(2), Polynomial::zero(2)])
            .unwrap()
            .metrics();
        assert_eq!(m.degree, 0);
        assert_eq!(m.coeff_norm, BigInt::zero());
        assert_eq!(m.max_monomials, 0);
        assert_eq!(m.avg_monomials, BigRational::zero());
    }

    #[test]
    fn metrics_avg_is_exact() {
        let m = PolyMap::new(
            3,
            vec![&v(3, 0) + &v(3, 1), v(3, 2), Polynomial::zero(3)],
        )
        .unwrap()
        .metrics();
        assert_eq!(m.avg_monomials, BigRational::new(1.into(), 1.into()));
        assert_eq!(m.max_monomials, 2);
    }

    #[test]
    fn stack_and_project() {
        let p = PolyMap::projection(3, &[2, 0]);
        let q = PolyMap::projection(3, &[1]);
        let s = p.stack(&q).unwrap();
        let out = s
            .evaluate(&[BigInt::from(1), BigInt::from(2), BigInt::from(3)])
            .unwrap();
        assert_eq!(out, vec![BigInt::from(3), BigInt::from(1), BigInt::from(2)]);
    }
}
