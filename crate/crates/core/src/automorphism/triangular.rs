use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::poly::{Monomial, PolyMap, Polynomial};
use crate::rng::SeededRng;

/// Disjoint index sets (zero-based) covering `0..n`. Offsets of `E1`
/// coordinates depend only on `E2` coordinates; offsets of `E2` vanish.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub e1: Vec<usize>,
    pub e2: Vec<usize>,
}

impl Partition {
    /// `E1 = {0, …, ⌊n/2⌋-1}`, `E2` the rest.
    pub fn standard(n: usize) -> Self {
        Partition {
            e1: (0..n / 2).collect(),
            e2: (n / 2..n).collect(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for &i in self.e1.iter().chain(&self.e2) {
            if i >= n || seen[i] {
                return Err(Error::InvalidParameter(format!(
                    "partition is not a disjoint cover of 1..{n}"
                )));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidParameter(format!(
                "partition is not a disjoint cover of 1..{n}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangularParams {
    pub n: usize,
    pub beta: u64,
    pub d: u32,
    pub mu: u64,
    pub mu_bar: BigRational,
    pub partition: Partition,
    /// Give `E2` coordinates a nonzero constant offset instead of zero.
    pub constant_e2: bool,
    /// Let one monomial of each `E1` offset include a later `E1` variable.
    pub mixed_e1_monomial: bool,
}

impl TriangularParams {
    pub fn new(n: usize, beta: u64, d: u32, mu: u64, mu_bar: BigRational) -> Self {
        TriangularParams {
            n,
            beta,
            d,
            mu,
            mu_bar,
            partition: Partition::standard(n),
            constant_e2: false,
            mixed_e1_monomial: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(
                "triangular maps need n >= 2 for a nontrivial partition".into(),
            ));
        }
        if self.mu < 2 {
            return Err(Error::InvalidParameter(
                "μ must be at least 2 to host a nonlinear offset".into(),
            ));
        }
        if self.beta < 1 || self.d < 2 {
            return Err(Error::InvalidParameter("need β >= 1 and d >= 2".into()));
        }
        let one = BigRational::from_integer(1.into());
        if self.mu_bar <= one || self.mu_bar > BigRational::from_integer(self.mu.into()) {
            return Err(Error::InvalidParameter(format!(
                "mean monomial target must lie in (1, μ], got {}",
                self.mu_bar
            )));
        }
        self.partition.validate(self.n)?;
        if self.partition.e1.is_empty() || self.partition.e2.is_empty() {
            return Err(Error::InvalidParameter(
                "both partition blocks must be nonempty".into(),
            ));
        }
        Ok(())
    }
}

/// `T(x) = (x_1 + f_1, …, x_n + f_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangularMap {
    pub forward: PolyMap,
    pub offsets: Vec<Polynomial>,
    pub partition: Partition,
}

impl TriangularMap {
    /// Build from offsets; `forward` is derived.
    pub fn from_offsets(offsets: Vec<Polynomial>, partition: Partition) -> Result<Self> {
        let n = offsets.len();
        partition.validate(n)?;
        let components = offsets
            .iter()
            .enumerate()
            .map(|(i, f)| {
                if f.num_vars() != n {
                    return Err(Error::dims("triangular offset", n, f.num_vars()));
                }
                Ok(&Polynomial::var(n, i) + f)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TriangularMap {
            forward: PolyMap::new(n, components)?,
            offsets,
            partition,
        })
    }

    pub fn is_segmented(&self) -> bool {
        let in_e2 = |v: &usize| self.partition.e2.contains(v);
        self.partition
            .e1
            .iter()
            .all(|&i| self.offsets[i].variables().iter().all(in_e2))
            && self
                .partition
                .e2
                .iter()
                .all(|&i| self.offsets[i].degree() == 0)
    }
}

/// Draw a random monomial of exact degree `deg` over `vars`.
fn random_monomial(n: usize, vars: &[usize], deg: u32, rng: &mut SeededRng) -> Monomial {
    let mut exps = vec![0u32; n];
    for _ in 0..deg {
        exps[vars[rng.range_usize(0, vars.len() - 1)]] += 1;
    }
    Monomial::new(exps)
}

fn nonzero_coeff(beta: u64, rng: &mut SeededRng) -> BigInt {
    let b = beta as i64;
    loop {
        let v = rng.range_i64(-b, b);
        if v != 0 {
            return BigInt::from(v);
        }
    }
}

/// Number of monomials of degree at most `d` in `v` variables.
fn monomial_count(v: usize, d: u32) -> u64 {
    binomial(BigInt::from(v as u64 + d as u64), BigInt::from(d))
        .to_u64()
        .unwrap_or(u64::MAX)
}

/// Random segmented triangular automorphism.
///
/// Each `E1` offset has `s_i` distinct monomials in the `E2` variables: one of
/// degree exactly `d`, one of lower degree (so the offset is nonlinear and
/// nonhomogeneous), the rest of any degree up to `d`. Coefficients are nonzero
/// and bounded by `β`. `s_i` is uniform on `[1, min(μ-1, ⌊2μ̄-1⌋)]`, raised to
/// 2 whenever `μ >= 3` so the offset can be nonhomogeneous; with `μ = 2` the
/// single monomial has degree `d`.
pub fn gen_segmented_triangular(
    params: &TriangularParams,
    rng: &mut SeededRng,
) -> Result<TriangularMap> {
    params.validate()?;
    let n = params.n;
    let e2 = &params.partition.e2;
    let cap_mean = (&params.mu_bar * BigInt::from(2) - BigInt::from(1))
        .floor()
        .to_integer()
        .to_u64()
        .unwrap_or(u64::MAX);
    let mu_cap = (params.mu - 1).min(cap_mean).max(1);
    let available = monomial_count(e2.len(), params.d);

    let mut offsets = vec![Polynomial::zero(n); n];
    for &i in &params.partition.e2 {
        if params.constant_e2 {
            offsets[i] = Polynomial::constant(n, nonzero_coeff(params.beta, rng));
        }
    }
    for &i in &params.partition.e1 {
        let mut s = rng.range_usize(1, mu_cap as usize) as u64;
        if params.mu >= 3 {
            s = s.max(2);
        }
        let s = s.min(available) as usize;

        let mut chosen: BTreeSet<Monomial> = BTreeSet::new();
        chosen.insert(random_monomial(n, e2, params.d, rng));
        if s >= 2 {
            let deg = rng.range_usize(0, params.d as usize - 1) as u32;
            chosen.insert(random_monomial(n, e2, deg, rng));
        }
        while chosen.len() < s {
            let deg = rng.range_usize(0, params.d as usize) as u32;
            chosen.insert(random_monomial(n, e2, deg, rng));
        }
        let mut terms: Vec<(Monomial, BigInt)> = chosen
            .into_iter()
            .map(|m| (m, nonzero_coeff(params.beta, rng)))
            .collect();

        if params.mixed_e1_monomial {
            let later: Vec<usize> = params.partition.e1.iter().copied().filter(|&j| j > i).collect();
            if !later.is_empty() {
                let j = later[rng.range_usize(0, later.len() - 1)];
                let slot = rng.range_usize(0, terms.len() - 1);
                let mut exps = terms[slot].0.exponents().to_vec();
                exps[j] += 1;
                if exps.iter().sum::<u32>() > params.d {
                    // stay within the degree budget by dropping one E2 factor
                    if let Some(k) = e2.iter().copied().find(|&k| exps[k] > 0) {
                        exps[k] -= 1;
                    }
                }
                let candidate = Monomial::new(exps);
                if !terms.iter().any(|(m, _)| *m == candidate) {
                    terms[slot].0 = candidate;
                }
            }
        }
        offsets[i] = Polynomial::from_terms(n, terms)?;
    }
    TriangularMap::from_offsets(offsets, params.partition.clone())
}

/// Inverse of a segmented map: `g_i = y_i - c_i` on `E2` (with `c_i = 0` in
/// the plain construction) and `g_i = y_i - f_i(g)` on `E1`.
pub fn invert_segmented_triangular(t: &TriangularMap) -> Result<PolyMap> {
    if !t.is_segmented() {
        return Err(Error::Contract(
            "triangular map is not segmented: an E1 offset references an E1 variable \
             or an E2 offset is non-constant"
                .into(),
        ));
    }
    let n = t.offsets.len();
    let mut g: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(n, i)).collect();
    for &i in &t.partition.e2 {
        g[i] = &g[i] - &t.offsets[i];
    }
    let base = PolyMap::new(n, g.clone())?;
    for &i in &t.partition.e1 {
        let f = PolyMap::new(n, vec![t.offsets[i].clone()])?;
        let f_of_g = PolyMap::compose(&f, &base)?;
        g[i] = &Polynomial::var(n, i) - f_of_g.component(0);
    }
    PolyMap::new(n, g)
}

/// Inverse of a general triangular map `x_i + f_i` whose offsets form an
/// acyclic dependency graph (`f_i` never depends on `x_i`, directly or
/// through other offsets). Each `g_i = y_i - f_i(g)` is computed after the
/// `g_j` it needs.
pub fn invert_triangular(forward: &PolyMap) -> Result<PolyMap> {
    let n = forward.domain_dim();
    if forward.codomain_dim() != n {
        return Err(Error::dims("triangular map", n, forward.codomain_dim()));
    }
    let offsets: Vec<Polynomial> = forward
        .components()
        .iter()
        .enumerate()
        .map(|(i, c)| c - &Polynomial::var(n, i))
        .collect();
    let deps: Vec<Vec<usize>> = offsets.iter().map(|f| f.variables()).collect();

    let mut g: Vec<Option<Polynomial>> = vec![None; n];
    let mut remaining = n;
    while remaining > 0 {
        let ready: Vec<usize> = (0..n)
            .filter(|&i| g[i].is_none() && deps[i].iter().all(|&j| j != i && g[j].is_some()))
            .collect();
        if ready.is_empty() {
            return Err(Error::Structural(
                "map is not triangular: offsets have a cyclic dependency".into(),
            ));
        }
        for i in ready {
            let inner = PolyMap::new(
                n,
                (0..n)
                    .map(|j| g[j].clone().unwrap_or_else(|| Polynomial::zero(n)))
                    .collect(),
            )?;
            let f = PolyMap::new(n, vec![offsets[i].clone()])?;
            let f_of_g = PolyMap::compose(&f, &inner)?;
            g[i] = Some(&Polynomial::var(n, i) - f_of_g.component(0));
            remaining -= 1;
        }
    }
    PolyMap::new(n, g.into_iter().map(|p| p.expect("all solved")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_map(n: usize, comps: &[&str]) -> PolyMap {
        let names = Polynomial::default_names(n);
        PolyMap::new(
            n,
            comps
                .iter()
                .map(|c| Polynomial::parse(c, &names).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn four_variable_template_and_inverse() {
        let offs = parse_map(4, &["x3*x4", "x4^2", "0", "0"]).into_components();
        let t = TriangularMap::from_offsets(offs, Partition::standard(4)).unwrap();
        assert_eq!(t.forward, parse_map(4, &["x1 + x3*x4", "x2 + x4^2", "x3", "x4"]));
        let inv = invert_segmented_triangular(&t).unwrap();
        assert_eq!(inv, parse_map(4, &["x1 - x3*x4", "x2 - x4^2", "x3", "x4"]));
        assert!(PolyMap::compose(&inv, &t.forward).unwrap().is_identity());
    }

    #[test]
    fn minimal_case() {
        let offs = parse_map(2, &["2*x2^2", "0"]).into_components();
        let t = TriangularMap::from_offsets(offs, Partition::standard(2)).unwrap();
        assert_eq!(t.forward, parse_map(2, &["x1 + 2*x2^2", "x2"]));
        let inv = invert_segmented_triangular(&t).unwrap();
        assert_eq!(inv, parse_map(2, &["x1 - 2*x2^2", "x2"]));
    }

    #[test]
    fn identity_inverts_to_identity() {
        let t = TriangularMap::from_offsets(vec![Polynomial::zero(3); 3], Partition::standard(3))
            .unwrap();
        assert!(invert_segmented_triangular(&t).unwrap().is_identity());
    }

    #[test]
    fn non_segmented_rejected() {
        let offs = parse_map(4, &["x2*x3", "x4^2", "0", "0"]).into_components();
        let t = TriangularMap::from_offsets(offs, Partition::standard(4)).unwrap();
        assert!(matches!(
            invert_segmented_triangular(&t),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn seed_zero_respects_bounds() {
        let params = TriangularParams::new(4, 3, 2, 4, BigRational::from_integer(3.into()));
        let t = gen_segmented_triangular(&params, &mut SeededRng::new(0)).unwrap();
        let m = t.forward.metrics();
        assert!(m.degree <= 2);
        assert!(m.coeff_norm <= BigInt::from(3));
        assert!(m.max_monomials <= 4);
    }

    #[test]
    fn offsets_are_nonlinear_nonhomogeneous() {
        let params = TriangularParams::new(5, 4, 3, 4, BigRational::from_integer(2.into()));
        for seed in 0..40 {
            let t = gen_segmented_triangular(&params, &mut SeededRng::new(seed)).unwrap();
            for &i in &t.partition.e1 {
                let f = &t.offsets[i];
                assert!(f.degree() >= 2);
                let degs: BTreeSet<u32> = f.terms().iter().map(|(m, _)| m.degree()).collect();
                assert!(degs.len() >= 2, "offset {f} is homogeneous");
                assert!(f.variables().iter().all(|v| t.partition.e2.contains(v)));
            }
            for &i in &t.partition.e2 {
                assert!(t.offsets[i].is_zero());
            }
        }
    }

    #[test]
    fn generic_non_segmented_inverse_degree_blows_up() {
        let f = parse_map(4, &["x1 + x2^2", "x2 + x3^2", "x3 + x4^2", "x4"]);
        let inv = invert_triangular(&f).unwrap();
        assert_eq!(inv.metrics().degree, 8);
        assert!(inv.metrics().degree > f.metrics().degree);
        assert!(PolyMap::compose(&inv, &f).unwrap().is_identity());
        assert!(PolyMap::compose(&f, &inv).unwrap().is_identity());
    }

    #[test]
    fn cyclic_offsets_rejected() {
        let f = parse_map(2, &["x1 + x2^2", "x2 + x1^2"]);
        assert!(invert_triangular(&f).is_err());
    }

    #[test]
    fn variations_still_invert() {
        let mut params = TriangularParams::new(6, 3, 2, 4, BigRational::from_integer(3.into()));
        params.constant_e2 = true;
        params.mixed_e1_monomial = true;
        for seed in 0..10 {
            let t = gen_segmented_triangular(&params, &mut SeededRng::new(seed)).unwrap();
            let inv = invert_triangular(&t.forward).unwrap();
            assert!(PolyMap::compose(&inv, &t.forward).unwrap().is_identity());
            assert!(t.forward.metrics().degree <= 2);
        }
    }

    #[test]
    fn rejects_bad_params() {
        let p = TriangularParams::new(1, 3, 2, 4, BigRational::from_integer(2.into()));
        assert!(gen_segmented_triangular(&p, &mut SeededRng::new(0)).is_err());
        let p = TriangularParams::new(4, 3, 2, 1, BigRational::from_integer(2.into()));
        assert!(gen_segmented_triangular(&p, &mut SeededRng::new(0)).is_err());
    }
}
