use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::automorphism::{gen_tame, plan_tame, AutomorphismPair};
use crate::error::{Error, Result};
use crate::poly::{PolyMap, Polynomial};
use crate::rng::SeededRng;

/// Which randomization the encryption uses.
///
/// - `V0`: `E(u) = φ(u)`, deterministic.
/// - `V1`: `E(u) = φ(u, g)` with random padding slots.
/// - `V2`: `E(u) = φ(u + h(g), H(g))` with `H` an automorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum SchemeVersion {
    V0,
    V1,
    V2,
}

impl From<SchemeVersion> for u8 {
    fn from(v: SchemeVersion) -> u8 {
        match v {
            SchemeVersion::V0 => 0,
            SchemeVersion::V1 => 1,
            SchemeVersion::V2 => 2,
        }
    }
}

impl TryFrom<u8> for SchemeVersion {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(SchemeVersion::V0),
            1 => Ok(SchemeVersion::V1),
            2 => Ok(SchemeVersion::V2),
            other => Err(Error::InvalidParameter(format!(
                "scheme version must be 0, 1 or 2, got {other}"
            ))),
        }
    }
}

impl fmt::Display for SchemeVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

/// Everything besides `φ, ψ` that the encryption and the program
/// transformation need. `m` plaintext slots sit in front of `n - m`
/// randomness slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeConfig {
    pub version: SchemeVersion,
    pub m: usize,
    pub n: usize,
    /// Randomness is uniform on `[0, rng_bound]`.
    pub rng_bound: BigInt,
    /// `h: Z^{n-m} -> Z^m` (version 2).
    pub h: Option<PolyMap>,
    /// `H` on `Z^{n-m}` with its inverse (version 2).
    pub big_h: Option<AutomorphismPair>,
    /// `K: Z^n -> Z^{n-m}` (version 2), fixed when a program is transformed.
    pub k: Option<PolyMap>,
}

impl SchemeConfig {
    pub fn v0(n: usize) -> Self {
        SchemeConfig {
            version: SchemeVersion::V0,
            m: n,
            n,
            rng_bound: BigInt::from(0),
            h: None,
            big_h: None,
            k: None,
        }
    }

    pub fn v1(m: usize, n: usize, rng_bound: BigInt) -> Self {
        SchemeConfig {
            version: SchemeVersion::V1,
            m,
            n,
            rng_bound,
            h: None,
            big_h: None,
            k: None,
        }
    }

    pub fn v2(
        m: usize,
        n: usize,
        rng_bound: BigInt,
        h: PolyMap,
        big_h: AutomorphismPair,
        k: Option<PolyMap>,
    ) -> Self {
        SchemeConfig {
            version: SchemeVersion::V2,
            m,
            n,
            rng_bound,
            h: Some(h),
            big_h: Some(big_h),
            k,
        }
    }

    /// Number of randomness slots `n - m`.
    pub fn r(&self) -> usize {
        self.n - self.m
    }

    pub fn validate(&self) -> Result<()> {
        if self.rng_bound < BigInt::from(0) {
            return Err(Error::InvalidParameter("rng_bound must be non-negative".into()));
        }
        match self.version {
            SchemeVersion::V0 => {
                if self.n != self.m {
                    return Err(Error::InvalidParameter(format!(
                        "version 0 uses no randomness slots, but n = {} and m = {}",
                        self.n, self.m
                    )));
                }
            }
            SchemeVersion::V1 | SchemeVersion::V2 => {
                if self.n <= self.m {
                    return Err(Error::InvalidParameter(format!(
                        "version {} needs n > m, got n = {} and m = {}",
                        self.version, self.n, self.m
                    )));
                }
            }
        }
        if self.version != SchemeVersion::V2 {
            return Ok(());
        }
        let r = self.r();
        let h = self
            .h
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("version 2 needs h".into()))?;
        if h.domain_dim() != r || h.codomain_dim() != self.m {
            return Err(Error::InvalidParameter(format!(
                "h must map Z^{r} to Z^{}, got Z^{} to Z^{}",
                self.m,
                h.domain_dim(),
                h.codomain_dim()
            )));
        }
        let big_h = self
            .big_h
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("version 2 needs H".into()))?;
        if big_h.n() != r {
            return Err(Error::dims("H dimension", r, big_h.n()));
        }
        if !big_h.is_verified() {
            return Err(Error::Verification("H is not a verified automorphism pair".into()));
        }
        if let Some(k) = &self.k {
            if k.domain_dim() != self.n || k.codomain_dim() != r {
                return Err(Error::InvalidParameter(format!(
                    "K must map Z^{} to Z^{r}, got Z^{} to Z^{}",
                    self.n,
                    k.domain_dim(),
                    k.codomain_dim()
                )));
            }
        }
        Ok(())
    }
}

/// Scheme parameters for `version` on `n` slots with `m` plaintext slots.
/// Version 2 uses [`default_h`] and draws `H` from `rng`.
pub fn generate_scheme(
    version: SchemeVersion,
    m: usize,
    n: usize,
    rng_bound: BigInt,
    rng: &SeededRng,
) -> Result<SchemeConfig> {
    let cfg = match version {
        SchemeVersion::V0 => SchemeConfig { m, ..SchemeConfig::v0(n) },
        SchemeVersion::V1 => SchemeConfig::v1(m, n, rng_bound),
        SchemeVersion::V2 => {
            if n <= m {
                return Err(Error::InvalidParameter(format!(
                    "version 2 needs n > m, got n = {n} and m = {m}"
                )));
            }
            let r = n - m;
            SchemeConfig::v2(m, n, rng_bound, default_h(r, m), gen_big_h(r, rng)?, None)
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Products of neighbouring randomness slots:
/// `h_1 = g_1`, `h_i = g_{(i-2) mod r + 1} * g_{(i-1) mod r + 1}`.
/// For `r = m = 2` this is `(g1, g1*g2)`.
pub fn default_h(r: usize, m: usize) -> PolyMap {
    let g = |i: usize| Polynomial::var(r, i % r);
    let comps = (0..m)
        .map(|i| if i == 0 { g(0) } else { &g(i - 1) * &g(i) })
        .collect();
    PolyMap::new(r, comps).expect("components share the randomness arity")
}

/// A small verified automorphism `H` of `Z^r`: `g -> ±g + c` for `r = 1`,
/// otherwise a one-stage quadratic tame key.
pub fn gen_big_h(r: usize, rng: &SeededRng) -> Result<AutomorphismPair> {
    if r == 0 {
        return Err(Error::InvalidParameter("H needs at least one randomness slot".into()));
    }
    if r == 1 {
        let mut s = rng.split("H");
        let sign = s.sign();
        let c = s.range_i64(-3, 3);
        let x = Polynomial::var(1, 0);
        let fwd = &x.scale(&BigInt::from(sign)) + &Polynomial::constant(1, c);
        let inv = (&x - &Polynomial::constant(1, c)).scale(&BigInt::from(sign));
        return AutomorphismPair::new(
            PolyMap::new(1, vec![fwd])?,
            PolyMap::new(1, vec![inv])?,
        )?
        .verified();
    }
    let budget = 4 * r as u64;
    let plan = plan_tame(r, 2, &BigInt::from(16), budget, None, 1)?;
    Ok(gen_tame(&plan, &rng.split("H"))?.pair)
}

/// Random affine `K: Z^n -> Z^{n-m}` with coefficients in `[-beta, beta]`.
pub fn gen_k(n: usize, r: usize, beta: i64, rng: &SeededRng) -> PolyMap {
    let mut s = rng.split("K");
    let comps = (0..r)
        .map(|_| {
            let mut p = Polynomial::constant(n, s.range_i64(-beta, beta));
            for j in 0..n {
                let c = s.range_i64(-beta, beta);
                p = &p + &Polynomial::var(n, j).scale(&BigInt::from(c));
            }
            p
        })
        .collect();
    PolyMap::new(n, comps).expect("components share the state arity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn version_serializes_as_integer() {
        assert_eq!(serde_json::to_string(&SchemeVersion::V2).unwrap(), "2");
        let v: SchemeVersion = serde_json::from_str("1").unwrap();
        assert_eq!(v, SchemeVersion::V1);
        assert!(serde_json::from_str::<SchemeVersion>("3").is_err());
    }

    #[test]
    fn default_h_matches_demonstration() {
        assert_eq!(default_h(2, 2), samples::appendix_h());
    }

    #[test]
    fn generated_h_is_verified() {
        for r in 1..=4 {
            for seed in 0..5 {
                let h = gen_big_h(r, &SeededRng::new(seed)).unwrap();
                assert!(h.is_verified());
                assert_eq!(h.n(), r);
            }
        }
    }

    #[test]
    fn config_checks() {
        assert!(SchemeConfig::v0(2).validate().is_ok());
        assert!(SchemeConfig::v1(2, 2, 10.into()).validate().is_err());
        let cfg = SchemeConfig::v2(
            2,
            4,
            10.into(),
            samples::appendix_h(),
            samples::appendix_big_h().verified().unwrap(),
            Some(samples::appendix_k()),
        );
        assert!(cfg.validate().is_ok());
        let unverified = SchemeConfig {
            big_h: Some(samples::appendix_big_h()),
            ..cfg.clone()
        };
        assert!(matches!(unverified.validate(), Err(Error::Verification(_))));
        let bad_k = SchemeConfig {
            k: Some(PolyMap::identity(4)),
            ..cfg
        };
        assert!(bad_k.validate().is_err());
    }

    #[test]
    fn k_shape_and_range() {
        let k = gen_k(4, 2, 3, &SeededRng::new(1));
        assert_eq!((k.domain_dim(), k.codomain_dim()), (4, 2));
        assert!(k.metrics().coeff_norm <= BigInt::from(3));
        assert!(k.metrics().degree <= 1);
    }
}
