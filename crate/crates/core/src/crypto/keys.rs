use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::scheme::{generate_scheme, SchemeConfig, SchemeVersion};
use crate::automorphism::{gen_tame, plan_tame, AutomorphismPair, Factor, KeygenOptions, TamePlan};
use crate::error::{Error, Result};
use crate::poly::PolyMap;
use crate::rng::SeededRng;
use crate::serde_util::bigint_str;

const FILE_VERSION: u32 = 1;

/// The private key: `φ, ψ`, the scheme configuration (including `H⁻¹`) and
/// how the key was produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecretKey {
    pair: AutomorphismPair,
    scheme: SchemeConfig,
    seed: Option<u64>,
    plan: Option<TamePlan>,
    fingerprint: String,
}

/// What a data owner may publish: `φ`, the slot layout, `h` and `H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    n: usize,
    phi: PolyMap,
    scheme: PublicScheme,
    fingerprint: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicScheme {
    pub version: SchemeVersion,
    pub m: usize,
    #[serde(with = "bigint_str")]
    pub rng_bound: BigInt,
    pub h: Option<PolyMap>,
    /// Forward map of `H`.
    pub big_h: Option<PolyMap>,
}

#[derive(Serialize, Deserialize)]
struct HRecord {
    phi: PolyMap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    psi: Option<PolyMap>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    factorization: Vec<Factor>,
}

#[derive(Serialize, Deserialize)]
struct SchemeRecord {
    version: SchemeVersion,
    m: usize,
    #[serde(with = "bigint_str")]
    rng_bound: BigInt,
    h: Option<PolyMap>,
    #[serde(rename = "H")]
    big_h: Option<HRecord>,
}

#[derive(Serialize, Deserialize)]
struct SecretKeyFile {
    version: u32,
    n: usize,
    seed: Option<u64>,
    plan: Option<TamePlan>,
    phi: PolyMap,
    psi: PolyMap,
    factorization: Vec<Factor>,
    fingerprint: String,
    scheme: SchemeRecord,
}

#[derive(Serialize, Deserialize)]
struct PublicKeyFile {
    version: u32,
    n: usize,
    phi: PolyMap,
    fingerprint: String,
    scheme: SchemeRecord,
}

/// The part of the public key that is hashed.
#[derive(Serialize)]
struct PublicBody<'a> {
    n: usize,
    phi: &'a PolyMap,
    scheme: &'a SchemeRecord,
}

fn public_record(s: &PublicScheme) -> SchemeRecord {
    SchemeRecord {
        version: s.version,
        m: s.m,
        rng_bound: s.rng_bound.clone(),
        h: s.h.clone(),
        big_h: s.big_h.clone().map(|phi| HRecord {
            phi,
            psi: None,
            factorization: Vec::new(),
        }),
    }
}

fn fingerprint_of(n: usize, phi: &PolyMap, scheme: &PublicScheme) -> String {
    let record = public_record(scheme);
    let body = serde_json::to_vec(&PublicBody {
        n,
        phi,
        scheme: &record,
    })
    .expect("public key body serializes");
    hex::encode(Sha256::digest(&body))
}

fn check_file_version(found: u32) -> Result<()> {
    if found != FILE_VERSION {
        return Err(Error::Serialization(format!(
            "unsupported key file version {found}"
        )));
    }
    Ok(())
}

impl PublicScheme {
    fn of(cfg: &SchemeConfig) -> Self {
        PublicScheme {
            version: cfg.version,
            m: cfg.m,
            rng_bound: cfg.rng_bound.clone(),
            h: cfg.h.clone(),
            big_h: cfg.big_h.as_ref().map(|p| p.phi().clone()),
        }
    }
}

impl SecretKey {
    /// Assemble a key from a verified pair and a scheme configuration. `K`
    /// is not part of a key and is dropped.
    pub fn from_parts(
        pair: AutomorphismPair,
        mut scheme: SchemeConfig,
        seed: Option<u64>,
        plan: Option<TamePlan>,
    ) -> Result<Self> {
        if !pair.is_verified() {
            return Err(Error::Verification("key pair has not been verified".into()));
        }
        if scheme.n != pair.n() {
            return Err(Error::dims("scheme state slots", pair.n(), scheme.n));
        }
        scheme.k = None;
        scheme.validate()?;
        let fingerprint = fingerprint_of(pair.n(), pair.phi(), &PublicScheme::of(&scheme));
        Ok(SecretKey {
            pair,
            scheme,
            seed,
            plan,
            fingerprint,
        })
    }

    /// The same pair under different scheme parameters. The fingerprint
    /// changes with the scheme.
    pub fn with_scheme(&self, scheme: SchemeConfig) -> Result<Self> {
        SecretKey::from_parts(self.pair.clone(), scheme, self.seed, self.plan.clone())
    }

    pub fn pair(&self) -> &AutomorphismPair {
        &self.pair
    }

    pub fn scheme(&self) -> &SchemeConfig {
        &self.scheme
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn plan(&self) -> Option<&TamePlan> {
        self.plan.as_ref()
    }

    pub fn n(&self) -> usize {
        self.pair.n()
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn public_key(&self) -> PublicKey {
        PublicKey {
            n: self.n(),
            phi: self.pair.phi().clone(),
            scheme: PublicScheme::of(&self.scheme),
            fingerprint: self.fingerprint.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut scheme = public_record(&PublicScheme::of(&self.scheme));
        if let (Some(rec), Some(h)) = (scheme.big_h.as_mut(), self.scheme.big_h.as_ref()) {
            rec.psi = Some(h.psi().clone());
            rec.factorization = h.factorization().to_vec();
        }
        let file = SecretKeyFile {
            version: FILE_VERSION,
            n: self.n(),
            seed: self.seed,
            plan: self.plan.clone(),
            phi: self.pair.phi().clone(),
            psi: self.pair.psi().clone(),
            factorization: self.pair.factorization().to_vec(),
            fingerprint: self.fingerprint.clone(),
            scheme,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Parse and re-verify: both inverse pairs are checked symbolically and
    /// the stored fingerprint must match the recomputed one.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SecretKeyFile = serde_json::from_str(text)?;
        check_file_version(file.version)?;
        let pair = AutomorphismPair::new(file.phi, file.psi)?
            .with_factorization(file.factorization)
            .verified()?;
        if pair.n() != file.n {
            return Err(Error::dims("key file n", file.n, pair.n()));
        }
        let big_h = match file.scheme.big_h {
            Some(HRecord {
                phi,
                psi: Some(psi),
                factorization,
            }) => Some(
                AutomorphismPair::new(phi, psi)?
                    .with_factorization(factorization)
                    .verified()?,
            ),
            Some(HRecord { psi: None, .. }) => {
                return Err(Error::Serialization(
                    "private key lacks the inverse of H".into(),
                ))
            }
            None => None,
        };
        let scheme = SchemeConfig {
            version: file.scheme.version,
            m: file.scheme.m,
            n: file.n,
            rng_bound: file.scheme.rng_bound,
            h: file.scheme.h,
            big_h,
            k: None,
        };
        let key = SecretKey::from_parts(pair, scheme, file.seed, file.plan)?;
        if key.fingerprint != file.fingerprint {
            return Err(Error::FingerprintMismatch {
                expected: file.fingerprint,
                found: key.fingerprint,
            });
        }
        Ok(key)
    }
}

impl PublicKey {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phi(&self) -> &PolyMap {
        &self.phi
    }

    pub fn scheme(&self) -> &PublicScheme {
        &self.scheme
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn to_json(&self) -> Result<String> {
        let file = PublicKeyFile {
            version: FILE_VERSION,
            n: self.n,
            phi: self.phi.clone(),
            fingerprint: self.fingerprint.clone(),
            scheme: public_record(&self.scheme),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Accepts a public or a private key file; the private parts are ignored.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: PublicKeyFile = serde_json::from_str(text)?;
        check_file_version(file.version)?;
        if file.phi.domain_dim() != file.n || file.phi.codomain_dim() != file.n {
            return Err(Error::dims("public key φ", file.n, file.phi.codomain_dim()));
        }
        let scheme = PublicScheme {
            version: file.scheme.version,
            m: file.scheme.m,
            rng_bound: file.scheme.rng_bound,
            h: file.scheme.h,
            big_h: file.scheme.big_h.map(|r| r.phi),
        };
        let fingerprint = fingerprint_of(file.n, &file.phi, &scheme);
        if fingerprint != file.fingerprint {
            return Err(Error::FingerprintMismatch {
                expected: file.fingerprint,
                found: fingerprint,
            });
        }
        Ok(PublicKey {
            n: file.n,
            phi: file.phi,
            scheme,
            fingerprint,
        })
    }
}

/// Inputs to [`keygen`].
#[derive(Debug, Clone)]
pub struct KeygenRequest {
    /// Total state slots.
    pub n: usize,
    pub degree: u32,
    pub coeff_bound: BigInt,
    pub monomials: u64,
    pub avg_monomials: Option<BigRational>,
    pub stages: usize,
    pub version: SchemeVersion,
    /// Plaintext slots; must equal `n` for version 0.
    pub m: usize,
    pub rng_bound: BigInt,
    pub seed: u64,
    pub options: KeygenOptions,
}

#[derive(Debug, Clone)]
pub struct KeygenOutcome {
    pub key: SecretKey,
    /// Samples drawn before one met every bound.
    pub attempts: u64,
    pub warnings: Vec<String>,
}

/// Components of `φ` that read no randomness slot (`index >= m`).
pub fn mixing_warnings(phi: &PolyMap, m: usize) -> Vec<String> {
    phi.components()
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.variables().iter().any(|&v| v >= m))
        .map(|(i, _)| {
            format!(
                "component {} of φ does not depend on any randomness slot; \
                 version 1 relies on φ mixing the padding into every coordinate",
                i + 1
            )
        })
        .collect()
}

/// Plan, sample and verify a key; version 2 also draws `H` and uses the
/// default `h`.
pub fn keygen(req: &KeygenRequest) -> Result<KeygenOutcome> {
    let rng = SeededRng::new(req.seed);
    let mut plan = plan_tame(
        req.n,
        req.degree,
        &req.coeff_bound,
        req.monomials,
        req.avg_monomials.clone(),
        req.stages,
    )?;
    plan.options = req.options.clone();
    let outcome = gen_tame(&plan, &rng.split("phi"))?;
    let scheme = generate_scheme(req.version, req.m, req.n, req.rng_bound.clone(), &rng.split("scheme"))?;
    let warnings = if req.version == SchemeVersion::V1 {
        mixing_warnings(outcome.pair.phi(), req.m)
    } else {
        Vec::new()
    };
    for w in &warnings {
        log::warn!("{w}");
    }
    let key = SecretKey::from_parts(outcome.pair, scheme, Some(req.seed), Some(plan))?;
    Ok(KeygenOutcome {
        key,
        attempts: outcome.attempts,
        warnings,
    })
}
