use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::affine::{gen_affine, AffineParams};
use super::pair::{AutomorphismPair, Factor, FactorKind};
use super::triangular::{
    gen_segmented_triangular, invert_segmented_triangular, invert_triangular, TriangularParams,
};
use crate::error::{Error, Result};
use crate::poly::PolyMap;
use crate::rng::SeededRng;
use crate::serde_util::{bigint_str, rational_str};

/// Largest per-factor coefficient budget handed to the generators.
const BETA_CAP: u64 = 1 << 62;
/// Resampling attempts before `gen_tame` gives up on the budgets.
const MAX_ATTEMPTS: u64 = 64;

/// Requested bounds for `φ` and `ψ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyBudget {
    pub d: u32,
    #[serde(with = "bigint_str")]
    pub b: BigInt,
    pub m: u64,
    #[serde(with = "rational_str")]
    pub m_bar: BigRational,
}

/// Per-factor budgets: triangular (`t`) and affine (`a`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageBudgets {
    pub beta_t: u64,
    pub beta_a: u64,
    pub mu_t: u64,
    pub mu_a: u64,
    #[serde(with = "rational_str")]
    pub mu_bar_t: BigRational,
    #[serde(with = "rational_str")]
    pub mu_bar_a: BigRational,
}

/// Generator switches; all off except affine offsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeygenOptions {
    pub affine_offsets: bool,
    pub constant_e2: bool,
    pub mixed_e1_monomial: bool,
}

impl Default for KeygenOptions {
    fn default() -> Self {
        KeygenOptions {
            affine_offsets: true,
            constant_e2: false,
            mixed_e1_monomial: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TamePlan {
    pub n: usize,
    pub k: usize,
    pub requested: KeyBudget,
    /// `δ(1), …, δ(k)`.
    pub stage_degrees: Vec<u32>,
    /// `Δ(i) = δ(1)⋯δ(i)`.
    pub cumulative: Vec<u64>,
    /// `Σ = 1 + Δ(1) + … + Δ(k-1)`.
    pub sigma: u64,
    /// `Π = Δ(k)`.
    pub pi: u64,
    pub budgets: StageBudgets,
    #[serde(default)]
    pub options: KeygenOptions,
}

/// Bounds the plan guarantees through the composition estimates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanBounds {
    pub degree: u64,
    pub coeff: BigInt,
    pub monomials: BigInt,
    pub avg_monomials: BigRational,
}

pub const INEQ_DEGREE: &str = "Π = δ(1)⋯δ(k) ≤ d with every δ(i) ≥ 2";
pub const INEQ_MONOMIALS: &str = "(μ_a μ_t)^Σ (μ_a)^Δ(k) ≤ m";
pub const INEQ_COEFFS: &str = "(β_a μ_a β_t μ_t)^Σ (β_a μ_a)^Δ(k) ≤ b";
pub const INEQ_AVG: &str = "(μ̄_a μ̄_t)^Σ (μ̄_a)^Δ(k) ≤ m̄";

fn budget_product(a: &BigInt, t: &BigInt, sigma: u64, pi: u64) -> BigInt {
    (a * t).pow(sigma as u32) * a.pow(pi as u32)
}

fn rational_product(a: &BigRational, t: &BigRational, sigma: u64, pi: u64) -> BigRational {
    num_traits::pow(a * t, sigma as usize) * num_traits::pow(a.clone(), pi as usize)
}

impl TamePlan {
    /// `(Π, (β_aμ_aβ_tμ_t)^Σ(β_aμ_a)^Π, (μ_aμ_t)^Σ μ_a^Π, (μ̄_aμ̄_t)^Σ μ̄_a^Π)`.
    pub fn bounds(&self) -> PlanBounds {
        let b = &self.budgets;
        let (sigma, pi) = (self.sigma, self.pi);
        PlanBounds {
            degree: pi,
            coeff: budget_product(
                &BigInt::from(b.beta_a * b.mu_a),
                &BigInt::from(b.beta_t * b.mu_t),
                sigma,
                pi,
            ),
            monomials: budget_product(&BigInt::from(b.mu_a), &BigInt::from(b.mu_t), sigma, pi),
            avg_monomials: rational_product(&b.mu_bar_a, &b.mu_bar_t, sigma, pi),
        }
    }
}

/// Most-equal factorization of `target` into `k` factors `>= 2`, ascending.
fn balanced_factorization(target: u64, k: usize) -> Option<Vec<u64>> {
    fn search(rest: u64, k: usize, min: u64, acc: &mut Vec<u64>, best: &mut Option<Vec<u64>>) {
        if k == 0 {
            if rest == 1 {
                let spread = acc.last().unwrap_or(&0) - acc.first().unwrap_or(&0);
                let better = match best {
                    Some(b) => spread < b.last().unwrap() - b.first().unwrap(),
                    None => true,
                };
                if better {
                    *best = Some(acc.clone());
                }
            }
            return;
        }
        let mut f = min;
        while f.checked_pow(k as u32).is_some_and(|p| p <= rest) {
            if rest % f == 0 {
                acc.push(f);
                search(rest / f, k - 1, f, acc, best);
                acc.pop();
            }
            f += 1;
        }
    }
    let mut best = None;
    search(target, k, 2, &mut Vec::new(), &mut best);
    best
}

/// Stage degrees: the largest `Π <= d` with a factorization into `k`
/// factors `>= 2`, split as evenly as possible.
pub fn stage_degrees(d: u32, k: usize) -> Result<Vec<u32>> {
    if k == 0 {
        return Err(Error::InvalidParameter("stage count k must be at least 1".into()));
    }
    let floor = 2u64.checked_pow(k as u32).unwrap_or(u64::MAX);
    let mut pi = d as u64;
    while pi >= floor {
        if let Some(f) = balanced_factorization(pi, k) {
            return Ok(f.into_iter().map(|x| x as u32).collect());
        }
        pi -= 1;
    }
    Err(Error::Infeasible {
        inequality: INEQ_DEGREE.into(),
    })
}

/// Largest `t >= 0` with `t^e * factor <= limit`.
fn max_base(limit: &BigInt, factor: &BigInt, e: u64) -> BigInt {
    if factor > limit {
        return BigInt::from(0);
    }
    (limit / factor).nth_root(e as u32)
}

fn quarter_grid(lo_exclusive: bool, lo: u64, hi: u64) -> Vec<BigRational> {
    let mut out = Vec::new();
    let start = if lo_exclusive { 4 * lo + 1 } else { 4 * lo };
    for q in start..=4 * hi {
        out.push(BigRational::new(BigInt::from(q), BigInt::from(4)));
    }
    out
}

/// Choose stage degrees and per-factor budgets meeting the three budget
/// inequalities. The search maximizes the monomial product, then the
/// coefficient product, then prefers larger affine budgets. `μ_a = 1`
/// (signed-permutation affine factors) is allowed.
pub fn plan_tame(
    n: usize,
    d: u32,
    b: &BigInt,
    m: u64,
    m_bar: Option<BigRational>,
    k: usize,
) -> Result<TamePlan> {
    if n < 2 {
        return Err(Error::InvalidParameter(
            "tame keys need n >= 2 (triangular factors need both partition blocks)".into(),
        ));
    }
    if d < 2 {
        return Err(Error::InvalidParameter("degree bound d must be at least 2".into()));
    }
    let m_bar = m_bar.unwrap_or_else(|| BigRational::from_integer(m.into()));
    let degrees = stage_degrees(d, k)?;
    let mut cumulative = Vec::with_capacity(k);
    let mut acc = 1u64;
    for &delta in &degrees {
        acc *= delta as u64;
        cumulative.push(acc);
    }
    let pi = acc;
    let sigma = 1 + cumulative[..k - 1].iter().sum::<u64>();

    // (μ_a μ_t)^Σ μ_a^Π must fit under m, and under b with β_a = β_t = 1.
    let limit = BigInt::from(m).min(b.clone());
    let big = |v: u64| BigInt::from(v);
    if budget_product(&big(1), &big(2), sigma, pi) > BigInt::from(m) {
        return Err(Error::Infeasible {
            inequality: INEQ_MONOMIALS.into(),
        });
    }
    if budget_product(&big(1), &big(2), sigma, pi) > *b {
        return Err(Error::Infeasible {
            inequality: INEQ_COEFFS.into(),
        });
    }

    // Best (product, μ_a, μ_t) by monomial product then larger μ_a.
    let mut candidates: Vec<(BigInt, u64, u64)> = Vec::new();
    let mut mu_a = 1u64;
    while budget_product(&big(mu_a), &big(2), sigma, pi) <= limit {
        let a_part = big(mu_a).pow((sigma + pi) as u32);
        let mu_t = max_base(&limit, &a_part, sigma).to_u64().unwrap_or(u64::MAX);
        if mu_t >= 2 {
            let product = budget_product(&big(mu_a), &big(mu_t), sigma, pi);
            candidates.push((product, mu_a, mu_t));
        }
        mu_a += 1;
    }
    let best_product = candidates.iter().map(|c| c.0.clone()).max().expect("μ_a = 1 fits");

    let mut best: Option<(BigInt, u64, u64, StageBudgets)> = None;
    for (product, mu_a, mu_t) in candidates.into_iter().filter(|c| c.0 == best_product) {
        let beta_as: Vec<u64> = if mu_a == 1 {
            vec![1]
        } else {
            let mut v = Vec::new();
            let mut beta_a = 1u64;
            while v.len() < 100_000
                && budget_product(&big(beta_a * mu_a), &big(mu_t), sigma, pi) <= *b
            {
                v.push(beta_a);
                beta_a += 1;
            }
            v
        };
        for beta_a in beta_as {
            let a = big(beta_a * mu_a);
            let room = b / a.pow(pi as u32);
            let beta_t = (room.nth_root(sigma as u32) / (&a * mu_t))
                .to_u64()
                .unwrap_or(u64::MAX)
                .min(BETA_CAP);
            if beta_t == 0 {
                continue;
            }
            let coeff = budget_product(&a, &big(beta_t * mu_t), sigma, pi);
            debug_assert!(coeff <= *b && product <= BigInt::from(m));
            let key = (coeff.clone(), mu_a, beta_a);
            let better = match &best {
                None => true,
                Some((c, ma, ba, _)) => key > (c.clone(), *ma, *ba),
            };
            if better {
                best = Some((
                    coeff,
                    mu_a,
                    beta_a,
                    StageBudgets {
                        beta_t,
                        beta_a,
                        mu_t,
                        mu_a,
                        mu_bar_t: BigRational::one(),
                        mu_bar_a: BigRational::one(),
                    },
                ));
            }
        }
    }
    let mut budgets = best
        .ok_or_else(|| Error::Infeasible {
            inequality: INEQ_COEFFS.into(),
        })?
        .3;

    let a_grid = if budgets.mu_a == 1 {
        vec![BigRational::one()]
    } else {
        quarter_grid(false, 1, 1)
            .into_iter()
            .chain(
                [5, 6, 7]
                    .into_iter()
                    .map(|q| BigRational::new(BigInt::from(q), BigInt::from(4))),
            )
            .filter(|r| *r <= BigRational::from_integer(budgets.mu_a.into()))
            .collect()
    };
    let t_grid = quarter_grid(true, 1, budgets.mu_t);
    let mut best_avg: Option<(BigRational, BigRational, BigRational)> = None;
    for a in &a_grid {
        for t in &t_grid {
            let p = rational_product(a, t, sigma, pi);
            if p > m_bar {
                continue;
            }
            let better = match &best_avg {
                None => true,
                Some((bp, ba, _)) => (&p, a) > (bp, ba),
            };
            if better {
                best_avg = Some((p, a.clone(), t.clone()));
            }
        }
    }
    let (_, mu_bar_a, mu_bar_t) = best_avg.ok_or_else(|| Error::Infeasible {
        inequality: INEQ_AVG.into(),
    })?;
    budgets.mu_bar_a = mu_bar_a;
    budgets.mu_bar_t = mu_bar_t;

    Ok(TamePlan {
        n,
        k,
        requested: KeyBudget {
            d,
            b: b.clone(),
            m,
            m_bar,
        },
        stage_degrees: degrees,
        cumulative,
        sigma,
        pi,
        budgets,
        options: KeygenOptions::default(),
    })
}

/// Generated pair plus how many samples were drawn to meet the budgets.
#[derive(Debug, Clone)]
pub struct TameOutcome {
    pub pair: AutomorphismPair,
    pub attempts: u64,
}

fn within_budget(map: &PolyMap, budget: &KeyBudget) -> bool {
    let m = map.metrics();
    m.degree <= budget.d && m.coeff_norm <= budget.b && (m.max_monomials as u64) <= budget.m
}

fn sample_factors(plan: &TamePlan, rng: &mut SeededRng) -> Result<Vec<Factor>> {
    let b = &plan.budgets;
    let affine = AffineParams {
        n: plan.n,
        beta: b.beta_a,
        mu: b.mu_a,
        mu_bar: b.mu_bar_a.clone(),
        offset: plan.options.affine_offsets,
    };
    let gen_a = |rng: &mut SeededRng| -> Result<Factor> {
        let a = gen_affine(&affine, rng)?;
        Ok(Factor {
            kind: FactorKind::Affine,
            forward: a.to_polymap(),
            inverse: a.inverse_polymap(),
        })
    };
    let mut factors = vec![gen_a(rng)?];
    for &delta in &plan.stage_degrees {
        let mut tp = TriangularParams::new(plan.n, b.beta_t, delta, b.mu_t, b.mu_bar_t.clone());
        tp.constant_e2 = plan.options.constant_e2;
        tp.mixed_e1_monomial = plan.options.mixed_e1_monomial;
        let t = gen_segmented_triangular(&tp, rng)?;
        let inverse = if t.is_segmented() {
            invert_segmented_triangular(&t)?
        } else {
            invert_triangular(&t.forward)?
        };
        factors.push(Factor {
            kind: FactorKind::Triangular,
            forward: t.forward,
            inverse,
        });
        factors.push(gen_a(rng)?);
    }
    Ok(factors)
}

/// `φ = F_0 ∘ F_1 ∘ … ∘ F_last` and `ψ = F_last⁻¹ ∘ … ∘ F_0⁻¹`.
pub fn compose_factors(n: usize, factors: &[Factor]) -> Result<(PolyMap, PolyMap)> {
    let mut phi = PolyMap::identity(n);
    for f in factors.iter().rev() {
        phi = PolyMap::compose(&f.forward, &phi)?;
    }
    let mut psi = PolyMap::identity(n);
    for f in factors {
        psi = PolyMap::compose(&f.inverse, &psi)?;
    }
    Ok((phi, psi))
}

/// Generate `φ = A_0 ∘ T_1 ∘ A_1 ∘ … ∘ T_k ∘ A_k` with its inverse.
///
/// Candidates violating the requested degree, coefficient or monomial bound
/// are redrawn from a fresh indexed substream, as are involutions (`ψ = φ`).
/// The inverse is checked symbolically before return.
pub fn gen_tame(plan: &TamePlan, rng: &SeededRng) -> Result<TameOutcome> {
    for attempt in 0..MAX_ATTEMPTS {
        let mut stream = rng.split_indexed("tame", attempt);
        let factors = sample_factors(plan, &mut stream)?;
        let (phi, psi) = compose_factors(plan.n, &factors)?;
        if !(within_budget(&phi, &plan.requested) && within_budget(&psi, &plan.requested)) {
            log::debug!("tame sample {attempt} exceeds the requested bounds; redrawing");
            continue;
        }
        if phi == psi {
            log::debug!("tame sample {attempt} is an involution, so φ would reveal ψ; redrawing");
            continue;
        }
        let pair = AutomorphismPair::new(phi, psi)?
            .with_factorization(factors)
            .verified()?;
        return Ok(TameOutcome {
            pair,
            attempts: attempt + 1,
        });
    }
    Err(Error::Verification(format!(
        "no non-involutive key within the requested bounds after {MAX_ATTEMPTS} samples"
    )))
}
