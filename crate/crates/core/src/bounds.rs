//! The quantitative claims of the scheme as computable bounds: metric
//! growth of rewritten programs, ciphertext bit width, and the keygen
//! budgets.
//!
//! All arithmetic is exact (`BigInt`, `BigRational`).

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::automorphism::{AutomorphismPair, KeyBudget};
use crate::poly::{Metrics, PolyMap};
use crate::serde_util::bigint_str;

/// Upper bounds on `(d, |·|, m)` of a map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetricBounds {
    #[serde(with = "bigint_str")]
    pub degree: BigInt,
    #[serde(with = "bigint_str")]
    pub coeff: BigInt,
    #[serde(with = "bigint_str")]
    pub monomials: BigInt,
}

/// Per-field comparison of measured metrics against bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub actual: ReportMetrics,
    pub bound: MetricBounds,
    pub degree_ok: bool,
    pub coeff_ok: bool,
    pub monomials_ok: bool,
}

/// [`Metrics`] in serializable form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportMetrics {
    pub degree: u32,
    pub coeff: String,
    pub monomials: usize,
    pub avg_monomials: String,
}

impl From<&Metrics> for ReportMetrics {
    fn from(m: &Metrics) -> Self {
        ReportMetrics {
            degree: m.degree,
            coeff: m.coeff_norm.to_string(),
            monomials: m.max_monomials,
            avg_monomials: m.avg_monomials.to_string(),
        }
    }
}

impl BoundsReport {
    pub fn compare(actual: &Metrics, bound: MetricBounds) -> Self {
        BoundsReport {
            degree_ok: BigInt::from(actual.degree) <= bound.degree,
            coeff_ok: actual.coeff_norm <= bound.coeff,
            monomials_ok: BigInt::from(actual.max_monomials) <= bound.monomials,
            actual: actual.into(),
            bound,
        }
    }

    pub fn satisfied(&self) -> bool {
        self.degree_ok && self.coeff_ok && self.monomials_ok
    }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "VIOLATED"
    }
}

impl fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "degree     {:>12} <= {:<24} {}",
            self.actual.degree,
            self.bound.degree,
            mark(self.degree_ok)
        )?;
        writeln!(
            f,
            "coeff      {:>12} <= {:<24} {}",
            self.actual.coeff,
            self.bound.coeff,
            mark(self.coeff_ok)
        )?;
        write!(
            f,
            "monomials  {:>12} <= {:<24} {}",
            self.actual.monomials,
            self.bound.monomials,
            mark(self.monomials_ok)
        )
    }
}

/// Metric growth of a rewritten program from the metrics of the program
/// `P`, of `φ` and of `ψ`:
///
/// - `d ≤ d(φ) d(P) d(ψ)`
/// - `|·| ≤ |φ| m(φ) m(P)^{d(φ)} |P|^{d(φ)} |ψ|^{d(P) d(φ)}`
/// - `m ≤ m(φ) m(P)^{d(φ)} m(ψ)^{d(P) d(φ)}`
pub fn transform_bounds(p: &Metrics, phi: &Metrics, psi: &Metrics) -> MetricBounds {
    let big = |v: usize| BigInt::from(v);
    let d_phi = phi.degree;
    let d_p_phi = p.degree * phi.degree;
    MetricBounds {
        degree: BigInt::from(phi.degree) * BigInt::from(p.degree) * BigInt::from(psi.degree),
        coeff: &phi.coeff_norm
            * big(phi.max_monomials)
            * big(p.max_monomials).pow(d_phi)
            * p.coeff_norm.pow(d_phi)
            * psi.coeff_norm.pow(d_p_phi),
        monomials: big(phi.max_monomials)
            * big(p.max_monomials).pow(d_phi)
            * big(psi.max_monomials).pow(d_p_phi),
    }
}

/// Compare a rewritten step against [`transform_bounds`] of its source.
pub fn check_rewritten_step(
    source: &PolyMap,
    rewritten: &PolyMap,
    pair: &AutomorphismPair,
) -> BoundsReport {
    let bound = transform_bounds(&source.metrics(), &pair.phi().metrics(), &pair.psi().metrics());
    BoundsReport::compare(&rewritten.metrics(), bound)
}

/// `⌈log2 x⌉` for `x ≥ 1`; 0 for `x ≤ 1`.
pub fn ceil_log2(x: &BigInt) -> u64 {
    if *x <= BigInt::one() {
        return 0;
    }
    let below = x - BigInt::one();
    below.bits()
}

/// Bits per ciphertext coordinate for `b`-bit inputs and randomness:
/// `d(φ) b + ⌈log2(|φ| m(φ))⌉`.
pub fn bit_width_estimate(b: u64, phi: &Metrics) -> u64 {
    phi.degree as u64 * b + ceil_log2(&(&phi.coeff_norm * BigInt::from(phi.max_monomials)))
}

/// Bounds 1 to 3 of the keygen budgets on `φ` and on `ψ`, with the mean
/// term counts recorded for aggregate checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KeygenReport {
    pub phi: BoundsReport,
    pub psi: BoundsReport,
    pub m_bar_budget: String,
    #[serde(skip)]
    pub m_bar_phi: BigRational,
    #[serde(skip)]
    pub m_bar_psi: BigRational,
}

impl KeygenReport {
    pub fn satisfied(&self) -> bool {
        self.phi.satisfied() && self.psi.satisfied()
    }
}

impl fmt::Display for KeygenReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "φ:\n{}", self.phi)?;
        writeln!(f, "  mean monomials {} (budget {})", self.phi.actual.avg_monomials, self.m_bar_budget)?;
        writeln!(f, "ψ:\n{}", self.psi)?;
        write!(f, "  mean monomials {} (budget {})", self.psi.actual.avg_monomials, self.m_bar_budget)
    }
}

pub fn keygen_bound_check(pair: &AutomorphismPair, budget: &KeyBudget) -> KeygenReport {
    let bound = MetricBounds {
        degree: BigInt::from(budget.d),
        coeff: budget.b.clone(),
        monomials: BigInt::from(budget.m),
    };
    let phi = pair.phi().metrics();
    let psi = pair.psi().metrics();
    KeygenReport {
        phi: BoundsReport::compare(&phi, bound.clone()),
        psi: BoundsReport::compare(&psi, bound),
        m_bar_budget: budget.m_bar.to_string(),
        m_bar_phi: phi.avg_monomials,
        m_bar_psi: psi.avg_monomials,
    }
}

/// Mean of a sample of exact rationals; zero for an empty sample.
pub fn mean(values: &[BigRational]) -> BigRational {
    if values.is_empty() {
        return BigRational::zero();
    }
    values.iter().sum::<BigRational>() / BigRational::from_integer(values.len().into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::rewrite_step;
    use crate::poly::Polynomial;
    use crate::samples;

    fn metrics(d: u32, c: i64, m: usize) -> Metrics {
        Metrics {
            degree: d,
            coeff_norm: c.into(),
            max_monomials: m,
            avg_monomials: BigRational::from_integer(m.into()),
        }
    }

    #[test]
    fn worked_instance() {
        let b = transform_bounds(&metrics(2, 1, 2), &metrics(2, 1, 2), &metrics(2, 1, 2));
        assert_eq!(b.degree, BigInt::from(8));
        assert_eq!(b.monomials, BigInt::from(128));
    }

    #[test]
    fn identity_keys_give_program_metrics() {
        let p = metrics(3, 17, 5);
        let id = metrics(1, 1, 1);
        let b = transform_bounds(&p, &id, &id);
        assert_eq!(b.degree, BigInt::from(3));
        assert_eq!(b.coeff, BigInt::from(17 * 5));
        assert_eq!(b.monomials, BigInt::from(5));
    }

    #[test]
    fn first_example_rewrite_within_bounds() {
        let pair = samples::first_example_pair();
        let f = samples::fun1().steps[0].clone();
        let r = rewrite_step(&f, &pair).unwrap();
        let report = check_rewritten_step(&f, &r, &pair);
        assert!(report.satisfied(), "{report}");
    }

    #[test]
    fn coefficient_bound_misses_multinomial_growth() {
        // φ = (x1 + x2², x2), ψ = (x1 - x2², x2), f = (x1³, x2): the bound is
        // 2 but (x1 - x2²)³ carries the coefficient 3.
        let p = |s: &str| Polynomial::parse(s, &["x1", "x2"]).unwrap();
        let map = |a: &str, b: &str| PolyMap::new(2, vec![p(a), p(b)]).unwrap();
        let pair = AutomorphismPair::new(map("x1 + x2^2", "x2"), map("x1 - x2^2", "x2"))
            .unwrap()
            .verified()
            .unwrap();
        let f = map("x1^3", "x2");
        let report = check_rewritten_step(&f, &rewrite_step(&f, &pair).unwrap(), &pair);
        assert_eq!(report.bound.coeff, BigInt::from(2));
        assert_eq!(report.actual.coeff, "3");
        assert!(!report.coeff_ok && report.degree_ok && report.monomials_ok);
    }

    #[test]
    fn bit_widths() {
        let two32 = Metrics {
            coeff_norm: BigInt::from(1u64 << 32),
            ..metrics(2, 0, 4)
        };
        assert_eq!(bit_width_estimate(32, &two32), 98);
        assert_eq!(bit_width_estimate(17, &metrics(1, 1, 1)), 17);
        assert_eq!(bit_width_estimate(8, &metrics(2, 16, 2)), 21);
    }

    #[test]
    fn log2_ceiling() {
        let c = |v: u64| ceil_log2(&BigInt::from(v));
        assert_eq!((c(1), c(2), c(3), c(4), c(5), c(64), c(65)), (0, 1, 2, 2, 3, 6, 7));
    }

    #[test]
    fn small_example_pair_within_budget() {
        let budget = KeyBudget {
            d: 2,
            b: 3.into(),
            m: 5,
            m_bar: BigRational::from_integer(5.into()),
        };
        assert!(keygen_bound_check(&samples::small_example_pair(), &budget).satisfied());
        assert!(keygen_bound_check(&AutomorphismPair::identity(3), &budget).satisfied());
    }
}
