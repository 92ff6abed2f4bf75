//! Program encryption: every step `f` becomes `φ ∘ f ∘ ψ`, so that the
//! rewritten step maps `φ(x)` to `φ(f(x))`.
//!
//! [`encrypt_program`] keeps plaintext input and output maps (`φ ∘ in`,
//! `out ∘ ψ`). [`build_fhe`] produces the transformed program of the chosen
//! scheme version, which reads and writes ciphertexts directly.

mod emit;
mod transformed;

use crate::automorphism::AutomorphismPair;
use crate::crypto::{gen_k, SecretKey};
use crate::error::{Error, Result};
use crate::poly::{PolyMap, Polynomial};
use crate::program::StraightLineProgram;
use crate::rng::SeededRng;

pub use crate::crypto::{SchemeConfig, SchemeVersion};
pub use emit::emit_pseudocode;
pub use transformed::{SchemeProvenance, TransformedProgram};

/// Default coefficient bound for a generated `K`.
pub const DEFAULT_K_BOUND: i64 = 9;

/// `φ ∘ f ∘ ψ`.
pub fn rewrite_step(f: &PolyMap, pair: &AutomorphismPair) -> Result<PolyMap> {
    let n = pair.n();
    if f.domain_dim() != n || f.codomain_dim() != n {
        return Err(Error::dims("rewritten step", n, f.codomain_dim()));
    }
    PolyMap::compose(pair.phi(), &PolyMap::compose(f, pair.psi())?)
}

/// Rewrite every step; the input map becomes `φ ∘ in` and the output map
/// `out ∘ ψ`, so the result computes the same function as `p`.
pub fn encrypt_program(p: &StraightLineProgram, pair: &AutomorphismPair) -> Result<StraightLineProgram> {
    p.ensure_valid()?;
    if p.n != pair.n() {
        return Err(Error::dims("program state vs key", pair.n(), p.n));
    }
    let steps = p
        .steps
        .iter()
        .map(|f| rewrite_step(f, pair))
        .collect::<Result<Vec<_>>>()?;
    StraightLineProgram::new(
        PolyMap::compose(pair.phi(), &p.f_in)?,
        steps,
        PolyMap::compose(&p.f_out, pair.psi())?,
    )
}

/// `(x', x'') -> (f(x'), x'')` on `n ≥ m` slots.
fn expand_step(f: &PolyMap, n: usize) -> Result<PolyMap> {
    let m = f.domain_dim();
    let lifted = f.remap_vars(n, &(0..m).collect::<Vec<_>>())?;
    let mut comps = lifted.into_components();
    comps.extend((m..n).map(|i| Polynomial::var(n, i)));
    PolyMap::new(n, comps)
}

/// `x -> (x' - h(H⁻¹(x'')), K(x))`.
fn unmask_step(cfg: &SchemeConfig, k: &PolyMap) -> Result<PolyMap> {
    let (m, n) = (cfg.m, cfg.n);
    let missing = || Error::InvalidParameter("version 2 needs h and H".into());
    let h = cfg.h.as_ref().ok_or_else(missing)?;
    let big_h = cfg.big_h.as_ref().ok_or_else(missing)?;
    let tail = PolyMap::projection(n, &(m..n).collect::<Vec<_>>());
    let mask = PolyMap::compose(h, &PolyMap::compose(big_h.psi(), &tail)?)?;
    let head = PolyMap::projection(n, &(0..m).collect::<Vec<_>>());
    head.checked_sub(&mask)?.stack(k)
}

/// The program `P'` in plaintext coordinates on all `n` slots, before
/// rewriting: expanded steps, preceded in version 2 by the unmasking step.
pub fn augmented_steps(p: &StraightLineProgram, cfg: &SchemeConfig) -> Result<Vec<PolyMap>> {
    p.ensure_valid()?;
    cfg.validate()?;
    if p.n != cfg.m {
        return Err(Error::dims("program state vs plaintext slots", cfg.m, p.n));
    }
    let mut steps = Vec::with_capacity(p.steps.len() + 1);
    if cfg.version == SchemeVersion::V2 {
        let k = cfg
            .k
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("version 2 needs K".into()))?;
        steps.push(unmask_step(cfg, k)?);
    }
    for f in &p.steps {
        steps.push(expand_step(f, cfg.n)?);
    }
    Ok(steps)
}

/// `F_φ(P)` for the configured version. The result reads ciphertexts
/// (`y <- w`) and returns its state (`z <- y`); `in` and `out` of `p` are
/// kept for the data owner, who applies them around encryption and
/// decryption.
pub fn build_fhe_with(
    p: &StraightLineProgram,
    pair: &AutomorphismPair,
    cfg: &SchemeConfig,
    key_fingerprint: &str,
) -> Result<TransformedProgram> {
    if !pair.is_verified() {
        return Err(Error::Verification("key pair has not been verified".into()));
    }
    if pair.n() != cfg.n {
        return Err(Error::dims("key vs scheme state slots", cfg.n, pair.n()));
    }
    let steps = augmented_steps(p, cfg)?
        .iter()
        .map(|f| rewrite_step(f, pair))
        .collect::<Result<Vec<_>>>()?;
    let n = cfg.n;
    let inner = StraightLineProgram::new(PolyMap::identity(n), steps, PolyMap::identity(n))?;
    Ok(TransformedProgram {
        program: inner,
        scheme: SchemeProvenance {
            version: cfg.version,
            m: cfg.m,
            n,
            key_fingerprint: key_fingerprint.to_string(),
        },
        source_input: p.f_in.clone(),
        source_output: p.f_out.clone(),
    })
}

/// [`build_fhe_with`] under a private key. For version 2 a missing `K` is
/// drawn from `rng` with coefficients in `[-k_bound, k_bound]`.
pub fn build_fhe(
    p: &StraightLineProgram,
    key: &SecretKey,
    k: Option<PolyMap>,
    k_bound: i64,
    rng: &SeededRng,
) -> Result<TransformedProgram> {
    let mut cfg = key.scheme().clone();
    if cfg.version == SchemeVersion::V2 {
        cfg.k = Some(k.unwrap_or_else(|| gen_k(cfg.n, cfg.r(), k_bound, rng)));
    }
    build_fhe_with(p, key.pair(), &cfg, key.fingerprint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::{decrypt, encrypt_with, Plaintext};
    use crate::samples;
    use num_bigint::BigInt;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn fun1_step() -> PolyMap {
        samples::fun1().steps[0].clone()
    }

    #[test]
    fn first_example_rewrite_matches_listing() {
        let pair = samples::first_example_pair();
        let got = rewrite_step(&fun1_step(), &pair).unwrap();
        assert_eq!(got, samples::e_fun1_step());
        let c = got.component(0);
        assert_eq!(c.coefficient_of(&[1, 0]), BigInt::from(-3));
        assert_eq!(c.coefficient_of(&[0, 1]), BigInt::from(-2));
        assert_eq!(c.coefficient_of(&[4, 2]), BigInt::from(1920));
        assert_eq!(c.coefficient_of(&[4, 1]), BigInt::from(1664));
        assert_eq!(c.constant_term(), BigInt::from(0));
    }

    #[test]
    fn identity_pair_is_neutral() {
        let f = fun1_step();
        assert_eq!(rewrite_step(&f, &AutomorphismPair::identity(2)).unwrap(), f);
        let p = samples::fun1();
        assert_eq!(encrypt_program(&p, &AutomorphismPair::identity(2)).unwrap(), p);
    }

    #[test]
    fn swap_conjugation() {
        let swap = PolyMap::projection(2, &[1, 0]);
        let pair = AutomorphismPair::new(swap.clone(), swap).unwrap();
        let got = rewrite_step(&fun1_step(), &pair).unwrap();
        let y = |i| Polynomial::var(2, i);
        assert_eq!(got, PolyMap::new(2, vec![&y(0) * &y(1), &y(0) + &y(1)]).unwrap());
    }

    #[test]
    fn encrypted_fun1_runs_like_fun1() {
        let p = samples::fun1();
        let e = encrypt_program(&p, &samples::first_example_pair()).unwrap();
        for u in [[2, 3], [0, 0], [-4, 5]] {
            assert_eq!(e.run(&ints(&u)).unwrap(), p.run(&ints(&u)).unwrap());
        }
    }

    #[test]
    fn v2_with_identity_key_reproduces_p_prime_state() {
        let cfg = SchemeConfig::v2(
            2,
            4,
            BigInt::from(20),
            samples::appendix_h(),
            samples::appendix_big_h().verified().unwrap(),
            Some(samples::appendix_k()),
        );
        let p = samples::appendix_program();
        let steps = augmented_steps(&p, &cfg).unwrap();
        assert_eq!(steps.len(), 1);
        // (x1, x2, x3, x4) = (3, 5, 3, 2) after the masked input of u = (2, 3), g = (1, 2).
        let out = steps[0].evaluate(&ints(&[3, 5, 3, 2])).unwrap();
        assert_eq!(&out[..2], &ints(&[2, 3])[..]);
        assert_eq!(&out[2..], &ints(&[3 + 10 + 9 + 8, 3 - 18])[..]);
    }

    #[test]
    fn v1_identity_program_round_trip() {
        let key = crate::crypto::keygen(&crate::crypto::KeygenRequest {
            n: 3,
            degree: 2,
            coeff_bound: BigInt::from(9),
            monomials: 8,
            avg_monomials: None,
            stages: 1,
            version: SchemeVersion::V1,
            m: 2,
            rng_bound: BigInt::from(1000),
            seed: 3,
            options: Default::default(),
        })
        .unwrap()
        .key;
        let p = StraightLineProgram::identity(2);
        let tp = build_fhe(&p, &key, None, DEFAULT_K_BOUND, &SeededRng::new(0)).unwrap();
        let mut rng = SeededRng::new(9);
        for _ in 0..20 {
            let u = ints(&[rng.range_i64(-50, 50), rng.range_i64(-50, 50)]);
            let g = ints(&[rng.range_i64(0, 1000)]);
            let c = encrypt_with(&Plaintext::new(u.clone()), &key.public_key(), &g).unwrap();
            let z = tp.run(&c).unwrap();
            assert_eq!(decrypt(&z, &key).unwrap().values, u);
        }
    }

    #[test]
    fn dimension_errors() {
        let pair = samples::first_example_pair();
        assert!(rewrite_step(&PolyMap::identity(3), &pair).is_err());
        assert!(encrypt_program(&StraightLineProgram::identity(3), &pair).is_err());
        let cfg = SchemeConfig::v1(2, 2, BigInt::from(1));
        assert!(augmented_steps(&samples::fun1(), &cfg).is_err());
    }
}
