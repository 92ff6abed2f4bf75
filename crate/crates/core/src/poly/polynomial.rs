use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::Monomial;
use crate::error::{Error, Result};

/// Sparse multivariate polynomial with arbitrary-precision integer
/// coefficients, held in canonical form: like terms merged, no zero
/// coefficients, terms sorted by decreasing graded-lex monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    num_vars: usize,
    terms: Vec<(Monomial, BigInt)>,
}

/// Combine like terms, drop zeros and sort. Fails if any monomial does not
/// have exactly `num_vars` exponents.
pub fn canonicalize<I>(num_vars: usize, raw: I) -> Result<Polynomial>
where
    I: IntoIterator<Item = (Monomial, BigInt)>,
{
    let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
    for (mono, coeff) in raw {
        if mono.num_vars() != num_vars {
            return Err(Error::Structural(format!(
                "monomial {mono} has {} exponents, expected {num_vars}",
                mono.num_vars()
            )));
        }
        *acc.entry(mono).or_default() += coeff;
    }
    Ok(Polynomial::from_accumulator(num_vars, acc))
}

impl Polynomial {
    pub fn zero(num_vars: usize) -> Self {
        Polynomial {
            num_vars,
            terms: Vec::new(),
        }
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, BigInt::one())
    }

    pub fn constant(num_vars: usize, value: impl Into<BigInt>) -> Self {
        let value = value.into();
        let mut p = Self::zero(num_vars);
        if !value.is_zero() {
            p.terms.push((Monomial::one(num_vars), value));
        }
        p
    }

    /// The coordinate polynomial `x_{index+1}`.
    pub fn var(num_vars: usize, index: usize) -> Self {
        assert!(index < num_vars, "variable index {index} out of range");
        Polynomial {
            num_vars,
            terms: vec![(Monomial::var(num_vars, index), BigInt::one())],
        }
    }

    pub fn term(coeff: impl Into<BigInt>, exponents: Vec<u32>) -> Self {
        let num_vars = exponents.len();
        let coeff = coeff.into();
        if coeff.is_zero() {
            return Self::zero(num_vars);
        }
        Polynomial {
            num_vars,
            terms: vec![(Monomial::new(exponents), coeff)],
        }
    }

    pub fn from_terms<I>(num_vars: usize, raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, BigInt)>,
    {
        canonicalize(num_vars, raw)
    }

    fn from_accumulator(num_vars: usize, acc: HashMap<Monomial, BigInt>) -> Self {
        let mut terms: Vec<(Monomial, BigInt)> =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Polynomial { num_vars, terms }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> &[(Monomial, BigInt)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.first().map(|(m, _)| m.degree()).unwrap_or(0)
    }

    /// Largest absolute value of any coefficient (0 for the zero polynomial).
    pub fn coeff_norm(&self) -> BigInt {
        self.terms
            .iter()
            .map(|(_, c)| c.abs())
            .max()
            .unwrap_or_default()
    }

    pub fn coefficient(&self, mono: &Monomial) -> BigInt {
        self.terms
            .binary_search_by(|(m, _)| mono.cmp(m))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_default()
    }

    pub fn coefficient_of(&self, exponents: &[u32]) -> BigInt {
        self.coefficient(&Monomial::new(exponents.to_vec()))
    }

    pub fn constant_term(&self) -> BigInt {
        self.coefficient(&Monomial::one(self.num_vars))
    }

    /// True if `index` (zero-based) occurs in some term.
    pub fn depends_on(&self, index: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.exponent(index) > 0)
    }

    /// Zero-based variables occurring in some term, ascending.
    pub fn variables(&self) -> Vec<usize> {
        (0..self.num_vars).filter(|&i| self.depends_on(i)).collect()
    }

    /// Homogeneous component of total degree `degree`.
    pub fn homogeneous_part(&self, degree: u32) -> Polynomial {
        Polynomial {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == degree)
                .cloned()
                .collect(),
        }
    }

    fn check_same_vars(&self, other: &Polynomial, context: &'static str) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::dims(context, self.num_vars, other.num_vars));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same_vars(other, "polynomial addition")?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same_vars(other, "polynomial subtraction")?;
        Ok(self.add_unchecked(&-other))
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same_vars(other, "polynomial multiplication")?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &Polynomial) -> Polynomial {
        // Merge of two descending sorted term lists.
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match ma.cmp(mb) {
                std::cmp::Ordering::Greater => {
                    terms.push((ma.clone(), ca.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    terms.push((mb.clone(), cb.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = ca + cb;
                    if !c.is_zero() {
                        terms.push((ma.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        terms.extend_from_slice(&self.terms[i..]);
        terms.extend_from_slice(&other.terms[j..]);
        Polynomial {
            num_vars: self.num_vars,
            terms,
        }
    }

    fn mul_unchecked(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(self.num_vars);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut acc: HashMap<Monomial, BigInt> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.mul(mb)).or_default() += ca * cb;
            }
        }
        Polynomial::from_accumulator(self.num_vars, acc)
    }

    /// The constant value, if the polynomial has no non-constant terms.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn scale(&self, factor: &BigInt) -> Polynomial {
        if factor.is_zero() {
            return Polynomial::zero(self.num_vars);
        }
        Polynomial {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * factor))
                .collect(),
        }
    }

    pub fn pow(&self, exponent: u32) -> Polynomial {
        let mut result = Polynomial::one(self.num_vars);
        let mut base = self.clone();
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        result
    }

    /// Exact value at `point`.
    pub fn evaluate(&self, point: &[BigInt]) -> Result<BigInt> {
        if point.len() != self.num_vars {
            return Err(Error::dims(
                "polynomial evaluation",
                self.num_vars,
                point.len(),
            ));
        }
        let mut powers = PointPowers::new(point);
        Ok(self.evaluate_with(&mut powers))
    }

    pub(crate) fn evaluate_with(&self, powers: &mut PointPowers<'_>) -> BigInt {
        let mut total = BigInt::zero();
        for (mono, coeff) in &self.terms {
            let mut value = coeff.clone();
            for (i, &e) in mono.exponents().iter().enumerate() {
                if e > 0 {
                    value *= powers.get(i, e);
                }
            }
            total += value;
        }
        total
    }

    /// Re-express in `num_vars` variables, renaming variable `i` to
    /// `mapping[i]`.
    pub fn remap_vars(&self, num_vars: usize, mapping: &[usize]) -> Result<Polynomial> {
        if mapping.len() != self.num_vars {
            return Err(Error::dims("variable remapping", self.num_vars, mapping.len()));
        }
        if let Some(&bad) = mapping.iter().find(|&&t| t >= num_vars) {
            return Err(Error::Structural(format!(
                "remap target {bad} outside {num_vars} variables"
            )));
        }
        canonicalize(
            num_vars,
            self.terms
                .iter()
                .map(|(m, c)| (m.remap(num_vars, mapping), c.clone())),
        )
    }

    /// Substitute `inner[i]` for variable `i`. All `inner` polynomials must
    /// share one variable count, which becomes the result's.
    pub fn substitute(&self, inner: &[Polynomial]) -> Result<Polynomial> {
        let target_vars = check_inner(self.num_vars, inner)?;
        let mut cache = PowerCache::new(inner);
        Ok(substitute_cached(self, target_vars, &mut cache))
    }

    /// Render with explicit variable names, e.g. `-X1 - 3*X2 + 2*X2^2`.
    pub fn render(&self, names: &[impl AsRef<str>]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (mono, coeff)) in self.terms.iter().enumerate() {
            let negative = coeff.is_negative();
            let magnitude = coeff.abs();
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            if mono.is_one() {
                out.push_str(&magnitude.to_string());
            } else if magnitude.is_one() {
                out.push_str(&mono.render(names));
            } else {
                out.push_str(&format!("{}*{}", magnitude, mono.render(names)));
            }
        }
        out
    }

    /// Default variable names `x1, x2, ...`.
    pub fn default_names(num_vars: usize) -> Vec<String> {
        (1..=num_vars).map(|i| format!("x{i}")).collect()
    }
}

pub(crate) fn check_inner(outer_vars: usize, inner: &[Polynomial]) -> Result<usize> {
    if inner.len() != outer_vars {
        return Err(Error::dims("substitution", outer_vars, inner.len()));
    }
    let target = inner.first().map(|p| p.num_vars).unwrap_or(0);
    if let Some(p) = inner.iter().find(|p| p.num_vars != target) {
        return Err(Error::dims("substitution", target, p.num_vars));
    }
    Ok(target)
}

/// Memoized powers `inner[i]^e`, shared across every component substituted
/// into the same inner map.
pub(crate) struct PowerCache<'a> {
    base: &'a [Polynomial],
    powers: Vec<Vec<Polynomial>>,
}

impl<'a> PowerCache<'a> {
    pub(crate) fn new(base: &'a [Polynomial]) -> Self {
        PowerCache {
            base,
            powers: vec![Vec::new(); base.len()],
        }
    }

    fn get(&mut self, index: usize, exponent: u32) -> &Polynomial {
        let e = exponent as usize;
        let list = &mut self.powers[index];
        if list.is_empty() {
            list.push(self.base[index].clone());
        }
        while list.len() < e {
            let next = list.last().unwrap().mul_unchecked(&self.base[index]);
            list.push(next);
        }
        &list[e - 1]
    }
}

/// Horner-style substitution: split the terms by the exponent of one variable
/// at a time, substitute the remaining variables recursively, then multiply by
/// the cached power of that variable's replacement.
pub(crate) fn substitute_cached(
    outer: &Polynomial,
    target_vars: usize,
    cache: &mut PowerCache<'_>,
) -> Polynomial {
    let refs: Vec<&(Monomial, BigInt)> = outer.terms.iter().collect();
    horner(&refs, 0, outer.num_vars, target_vars, cache)
}

fn horner(
    terms: &[&(Monomial, BigInt)],
    var: usize,
    num_vars: usize,
    target_vars: usize,
    cache: &mut PowerCache<'_>,
) -> Polynomial {
    if terms.is_empty() {
        return Polynomial::zero(target_vars);
    }
    if var == num_vars {
        let sum: BigInt = terms.iter().map(|(_, c)| c).sum();
        return Polynomial::constant(target_vars, sum);
    }
    let mut groups: std::collections::BTreeMap<u32, Vec<&(Monomial, BigInt)>> =
        std::collections::BTreeMap::new();
    for t in terms {
        groups.entry(t.0.exponent(var)).or_default().push(t);
    }
    let mut result = Polynomial::zero(target_vars);
    for (exp, group) in groups {
        let rest = horner(&group, var + 1, num_vars, target_vars, cache);
        if rest.is_zero() {
            continue;
        }
        let contribution = if exp == 0 {
            rest
        } else {
            cache.get(var, exp).mul_unchecked(&rest)
        };
        result = result.add_unchecked(&contribution);
    }
    result
}

/// Cached integer powers of the coordinates of an evaluation point.
pub(crate) struct PointPowers<'a> {
    point: &'a [BigInt],
    powers: Vec<Vec<BigInt>>,
}

impl<'a> PointPowers<'a> {
    pub(crate) fn new(point: &'a [BigInt]) -> Self {
        PointPowers {
            point,
            powers: vec![Vec::new(); point.len()],
        }
    }

    fn get(&mut self, index: usize, exponent: u32) -> &BigInt {
        let list = &mut self.powers[index];
        if list.is_empty() {
            list.push(self.point[index].clone());
        }
        while list.len() < exponent as usize {
            let next = list.last().unwrap() * &self.point[index];
            list.push(next);
        }
        &list[exponent as usize - 1]
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&Polynomial::default_names(self.num_vars)))
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

// Operator forms panic on a variable-count mismatch; use the `checked_*`
// methods when the operands come from untrusted input.
impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial variable counts differ")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial variable counts differ")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial variable counts differ")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &Polynomial) -> Polynomial {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    #[test]
    fn cancellation_gives_zero() {
        let sq = Monomial::new(vec![2]);
        let p = canonicalize(1, [(sq.clone(), BigInt::from(1)), (sq, BigInt::from(-1))]).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.degree(), 0);
    }

    #[test]
    fn like_terms_merge() {
        let xy = Monomial::new(vec![1, 1]);
        let p = canonicalize(2, [(xy.clone(), 2.into()), (xy.clone(), 3.into())]).unwrap();
        assert_eq!(p.terms(), &[(xy, BigInt::from(5))]);
    }

    #[test]
    fn mismatched_monomial_length_is_rejected() {
        let err = canonicalize(2, [(Monomial::new(vec![1]), BigInt::from(1))]).unwrap_err();
        assert!(matches!(err, Error::Structural(_)));
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let p = &(&x(2, 0) + &x(2, 1)) * &(&x(2, 0) - &x(2, 1));
        let again = canonicalize(2, p.terms().iter().cloned()).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn difference_of_squares() {
        let p = &(&x(2, 0) + &x(2, 1)) * &(&x(2, 0) - &x(2, 1));
        let expected = &x(2, 0).pow(2) - &x(2, 1).pow(2);
        assert_eq!(p, expected);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn identities() {
        let p = &x(2, 0) + &x(2, 1);
        assert_eq!(&p + &Polynomial::zero(2), p);
        assert!((&p + &(-&p)).is_zero());
        assert_eq!(&p * &Polynomial::one(2), p);
    }

    #[test]
    fn arity_mismatch_errors() {
        let err = x(2, 0).checked_add(&x(3, 0)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        assert!(x(2, 0).checked_mul(&x(1, 0)).is_err());
    }

    #[test]
    fn render_matches_standard_form() {
        let p = &(&x(2, 1).pow(2).scale(&2.into()) - &x(2, 0)) - &x(2, 1).scale(&3.into());
        assert_eq!(p.render(&["X1", "X2"]), "2*X2^2 - X1 - 3*X2");
        assert_eq!(Polynomial::zero(2).to_string(), "0");
    }

    #[test]
    fn substitution_and_evaluation_agree() {
        // p(a, b) = a^2 b - 3, a = x + 1, b = x y
        let p = &(&x(2, 0).pow(2) * &x(2, 1)) - &Polynomial::constant(2, 3);
        let inner = vec![&x(2, 0) + &Polynomial::one(2), &x(2, 0) * &x(2, 1)];
        let q = p.substitute(&inner).unwrap();
        let pt = [BigInt::from(2), BigInt::from(-5)];
        let inner_vals: Vec<BigInt> = inner.iter().map(|c| c.evaluate(&pt).unwrap()).collect();
        assert_eq!(q.evaluate(&pt).unwrap(), p.evaluate(&inner_vals).unwrap());
    }

    #[test]
    fn coefficient_lookup() {
        let p = &x(2, 0).pow(3).scale(&7.into()) + &Polynomial::constant(2, -4);
        assert_eq!(p.coefficient_of(&[3, 0]), BigInt::from(7));
        assert_eq!(p.constant_term(), BigInt::from(-4));
        assert_eq!(p.coefficient_of(&[1, 1]), BigInt::from(0));
    }
}
