use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::keys::{PublicKey, SecretKey};
use super::scheme::SchemeVersion;
use crate::error::{Error, Result};
use crate::poly::Metrics;
use crate::rng::SeededRng;
use crate::serde_util::bigint_vec;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plaintext {
    #[serde(with = "bigint_vec")]
    pub values: Vec<BigInt>,
}

impl Plaintext {
    pub fn new(values: Vec<BigInt>) -> Self {
        Plaintext { values }
    }
}

/// `n` integers in key coordinates, bound to a key by its fingerprint.
///
/// `masked` is set on fresh version 2 encryptions, whose plaintext slots
/// still carry `h(g)`; the unmasking step of a transformed program clears
/// it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ciphertext {
    pub version: SchemeVersion,
    pub key_fingerprint: String,
    #[serde(default)]
    pub masked: bool,
    #[serde(with = "bigint_vec")]
    pub values: Vec<BigInt>,
}

impl Ciphertext {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn max_abs(values: &[BigInt]) -> BigInt {
    values.iter().map(|v| v.abs()).max().unwrap_or_else(BigInt::zero)
}

/// `|φ| · m(φ) · base^{d(φ)}` with `base = max(|RG|, |u|)`, raised to 1
/// when smaller so that constant terms stay covered.
pub fn ciphertext_size_bound(phi: &Metrics, rng_bound: &BigInt, u_max: &BigInt) -> BigInt {
    let base = rng_bound.abs().max(u_max.abs()).max(BigInt::one());
    &phi.coeff_norm * BigInt::from(phi.max_monomials) * base.pow(phi.degree)
}

/// Draw `n - m` randomness values uniformly from `[0, rng_bound]`.
pub fn draw_randomness(pk: &PublicKey, rng: &mut SeededRng) -> Vec<BigInt> {
    let r = pk.n() - pk.scheme().m;
    (0..r)
        .map(|_| rng.range_bigint(&BigInt::zero(), &pk.scheme().rng_bound))
        .collect()
}

pub fn encrypt(u: &Plaintext, pk: &PublicKey, rng: &mut SeededRng) -> Result<Ciphertext> {
    let g = draw_randomness(pk, rng);
    encrypt_with(u, pk, &g)
}

/// The argument of `φ`: `(u, g)` for versions 0 and 1, `(u + h(g), H(g))`
/// for version 2.
pub fn encryption_point(u: &Plaintext, pk: &PublicKey, g: &[BigInt]) -> Result<Vec<BigInt>> {
    let scheme = pk.scheme();
    let (n, m) = (pk.n(), scheme.m);
    if u.values.len() != m {
        return Err(Error::dims("plaintext length", m, u.values.len()));
    }
    if g.len() != n - m {
        return Err(Error::dims("randomness length", n - m, g.len()));
    }
    Ok(match scheme.version {
        SchemeVersion::V0 | SchemeVersion::V1 => u.values.iter().chain(g).cloned().collect(),
        SchemeVersion::V2 => {
            let missing = || Error::InvalidParameter("version 2 key lacks h or H".into());
            let h = scheme.h.as_ref().ok_or_else(missing)?.evaluate(g)?;
            let hg = scheme.big_h.as_ref().ok_or_else(missing)?.evaluate(g)?;
            u.values
                .iter()
                .zip(&h)
                .map(|(a, b)| a + b)
                .chain(hg)
                .collect()
        }
    })
}

/// [`ciphertext_size_bound`] for one encryption. For versions 0 and 1 the
/// base is `max(|RG|, |u|)`; for version 2 it is the largest coordinate of
/// `(u + h(g), H(g))`, the point `φ` is actually evaluated at.
pub fn ciphertext_bound_for(u: &Plaintext, pk: &PublicKey, g: &[BigInt]) -> Result<BigInt> {
    let point = encryption_point(u, pk, g)?;
    let phi = pk.phi().metrics();
    Ok(match pk.scheme().version {
        SchemeVersion::V2 => ciphertext_size_bound(&phi, &BigInt::zero(), &max_abs(&point)),
        _ => ciphertext_size_bound(&phi, &pk.scheme().rng_bound, &max_abs(&u.values)),
    })
}

/// Encrypt with explicit randomness `g` (length `n - m`).
pub fn encrypt_with(u: &Plaintext, pk: &PublicKey, g: &[BigInt]) -> Result<Ciphertext> {
    let point = encryption_point(u, pk, g)?;
    let values = pk.phi().evaluate(&point)?;
    debug_assert!({
        let bound = ciphertext_size_bound(&pk.phi().metrics(), &BigInt::zero(), &max_abs(&point));
        values.iter().all(|v| v.abs() <= bound)
    });
    let version = pk.scheme().version;
    Ok(Ciphertext {
        version,
        key_fingerprint: pk.fingerprint().to_string(),
        masked: version == SchemeVersion::V2,
        values,
    })
}

/// `ψ`, then (for a masked version 2 ciphertext) `v' - h(H⁻¹(v''))`, then
/// truncation to the `m` plaintext slots.
pub fn decrypt(c: &Ciphertext, sk: &SecretKey) -> Result<Plaintext> {
    decrypt_state(c, sk).map(|mut v| {
        v.truncate(sk.scheme().m);
        Plaintext::new(v)
    })
}

/// Like [`decrypt`] but keeps all `n` slots.
pub fn decrypt_state(c: &Ciphertext, sk: &SecretKey) -> Result<Vec<BigInt>> {
    if c.key_fingerprint != sk.fingerprint() {
        return Err(Error::FingerprintMismatch {
            expected: sk.fingerprint().to_string(),
            found: c.key_fingerprint.clone(),
        });
    }
    let scheme = sk.scheme();
    if c.version != scheme.version {
        return Err(Error::VersionMismatch {
            expected: scheme.version.into(),
            found: c.version.into(),
        });
    }
    if c.values.len() != sk.n() {
        return Err(Error::dims("ciphertext length", sk.n(), c.values.len()));
    }
    let mut v = sk.pair().psi().evaluate(&c.values)?;
    if c.masked {
        let m = scheme.m;
        let (Some(h), Some(big_h)) = (&scheme.h, &scheme.big_h) else {
            return Err(Error::Contract("masked ciphertext under a key without h and H".into()));
        };
        let g = big_h.psi().evaluate(&v[m..])?;
        let mask = h.evaluate(&g)?;
        for (slot, x) in v[..m].iter_mut().zip(mask) {
            *slot -= x;
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::AutomorphismPair;
    use crate::crypto::SchemeConfig;
    use crate::samples;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn first_example_key() -> SecretKey {
        let pair = samples::first_example_pair().verified().unwrap();
        SecretKey::from_parts(pair, SchemeConfig::v0(2), None, None).unwrap()
    }

    fn identity_v2_key() -> SecretKey {
        let cfg = SchemeConfig::v2(
            2,
            4,
            BigInt::from(50),
            samples::appendix_h(),
            samples::appendix_big_h().verified().unwrap(),
            None,
        );
        SecretKey::from_parts(AutomorphismPair::identity(4), cfg, None, None).unwrap()
    }

    #[test]
    fn v0_first_example() {
        let sk = first_example_key();
        let c = encrypt_with(&Plaintext::new(ints(&[1, 1])), &sk.public_key(), &[]).unwrap();
        assert_eq!(c.values, ints(&[-2, 3]));
        assert_eq!(decrypt(&c, &sk).unwrap().values, ints(&[1, 1]));
    }

    #[test]
    fn v0_identity_key() {
        let sk = SecretKey::from_parts(AutomorphismPair::identity(3), SchemeConfig::v0(3), None, None)
            .unwrap();
        let u = Plaintext::new(ints(&[7, -4, 0]));
        let c = encrypt(&u, &sk.public_key(), &mut SeededRng::new(0)).unwrap();
        assert_eq!(c.values, u.values);
    }

    #[test]
    fn v2_hand_values() {
        let sk = identity_v2_key();
        let c = encrypt_with(&Plaintext::new(ints(&[2, 3])), &sk.public_key(), &ints(&[1, 2])).unwrap();
        assert_eq!(c.values, ints(&[3, 5, 3, 2]));
        assert!(c.masked);
        assert_eq!(decrypt(&c, &sk).unwrap().values, ints(&[2, 3]));
    }

    #[test]
    fn mismatches_are_reported() {
        let sk = first_example_key();
        let mut c = encrypt_with(&Plaintext::new(ints(&[1, 1])), &sk.public_key(), &[]).unwrap();
        c.version = SchemeVersion::V1;
        assert!(matches!(decrypt(&c, &sk), Err(Error::VersionMismatch { .. })));
        c.version = SchemeVersion::V0;
        c.key_fingerprint = "00".into();
        assert!(matches!(decrypt(&c, &sk), Err(Error::FingerprintMismatch { .. })));
        assert!(encrypt_with(&Plaintext::new(ints(&[1])), &sk.public_key(), &[]).is_err());
    }

    #[test]
    fn size_bound_values() {
        let m = |c: i64, mm: usize, d: u32| Metrics {
            degree: d,
            coeff_norm: c.into(),
            max_monomials: mm,
            avg_monomials: num_rational::BigRational::from_integer(1.into()),
        };
        assert_eq!(ciphertext_size_bound(&m(5, 3, 2), &10.into(), &0.into()), 1500.into());
        assert_eq!(ciphertext_size_bound(&m(1, 1, 1), &0.into(), &7.into()), 7.into());
        let phi = samples::first_example_pair().phi().metrics();
        assert_eq!(ciphertext_size_bound(&phi, &0.into(), &1.into()), 15.into());
    }

    #[test]
    fn ciphertext_json_round_trip() {
        let sk = identity_v2_key();
        let c = encrypt_with(&Plaintext::new(ints(&[2, 3])), &sk.public_key(), &ints(&[1, 2])).unwrap();
        assert_eq!(Ciphertext::from_json(&c.to_json().unwrap()).unwrap(), c);
        let p = Plaintext::new(ints(&[-5, 123456789012345678]));
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"{"values":["-5","123456789012345678"]}"#);
    }
}
