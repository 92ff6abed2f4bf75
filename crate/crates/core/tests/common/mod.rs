#![allow(dead_code)]

use affine_fhe::automorphism::{
    gen_segmented_triangular, invert_segmented_triangular, AutomorphismPair, KeygenOptions,
    TriangularParams,
};
use affine_fhe::crypto::{
    ciphertext_bound_for, decrypt, encrypt_with, keygen, KeygenRequest, SchemeVersion, SecretKey,
};
use affine_fhe::poly::{Monomial, PolyMap, Polynomial};
use affine_fhe::program::StraightLineProgram;
use affine_fhe::rewrite::TransformedProgram;
use affine_fhe::rng::SeededRng;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

pub fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

// ---------------------------------------------------------------------------
// strategies

pub fn coeff() -> impl Strategy<Value = BigInt> {
    prop_oneof![
        4 => (-20i64..=20).prop_map(BigInt::from),
        1 => any::<i128>().prop_map(BigInt::from),
    ]
}

pub fn poly(n: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((coeff(), prop::collection::vec(0..=max_exp, n)), 0..=max_terms).prop_map(
        move |terms| {
            Polynomial::from_terms(n, terms.into_iter().map(|(c, e)| (Monomial::new(e), c)))
                .expect("exponent vectors have length n")
        },
    )
}

pub fn poly_map(domain: usize, codomain: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = PolyMap> {
    prop::collection::vec(poly(domain, max_exp, max_terms), codomain)
        .prop_map(move |comps| PolyMap::new(domain, comps).expect("shared arity"))
}

pub fn point(n: usize) -> impl Strategy<Value = Vec<BigInt>> {
    prop::collection::vec((-1000i64..=1000).prop_map(BigInt::from), n)
}

// ---------------------------------------------------------------------------
// random objects from a seeded stream

pub fn random_poly(rng: &mut SeededRng, n: usize, max_degree: u32, max_terms: usize, coeff: i64) -> Polynomial {
    let terms = rng.range_usize(1, max_terms);
    let mut p = Polynomial::zero(n);
    for _ in 0..terms {
        let mut exps = vec![0u32; n];
        let degree = rng.range_usize(0, max_degree as usize);
        for _ in 0..degree {
            exps[rng.range_usize(0, n - 1)] += 1;
        }
        let c = rng.range_i64(-coeff, coeff);
        p = &p + &Polynomial::term(c, exps);
    }
    p
}

pub fn random_map(rng: &mut SeededRng, domain: usize, codomain: usize, max_degree: u32) -> PolyMap {
    let comps = (0..codomain).map(|_| random_poly(rng, domain, max_degree, 3, 5)).collect();
    PolyMap::new(domain, comps).unwrap()
}

/// Program with `m` state slots: input arity in `1..=m`, one or two steps,
/// one or two outputs, every map of degree at most `max_degree`.
pub fn random_program(rng: &mut SeededRng, m: usize, max_degree: u32) -> StraightLineProgram {
    let k = rng.range_usize(1, m);
    let l = rng.range_usize(1, 2);
    let steps = (0..rng.range_usize(1, 2)).map(|_| random_map(rng, m, m, max_degree)).collect();
    StraightLineProgram::new(
        random_map(rng, k, m, max_degree),
        steps,
        random_map(rng, m, l, max_degree),
    )
    .unwrap()
}

/// Generated key with the budgets of the introductory pair
/// (`d = 2`, `|·| ≤ 8`, `m ≤ 5`, one stage).
pub fn small_key(version: SchemeVersion, n: usize, m: usize, rng_bound: i64, seed: u64) -> SecretKey {
    keygen(&KeygenRequest {
        n,
        degree: 2,
        coeff_bound: BigInt::from(8),
        monomials: 5,
        avg_monomials: None,
        stages: 1,
        version,
        m,
        rng_bound: BigInt::from(rng_bound),
        seed,
        options: KeygenOptions::default(),
    })
    .expect("small budgets are feasible")
    .key
}

// ---------------------------------------------------------------------------
// checks returning a description of the first failure

/// One end-to-end trial: `out(D(F(P)(E(in(u), g)))) = P(u)`, with the
/// ciphertext size bound checked on the fresh ciphertext.
pub fn pipeline_trial(
    p: &StraightLineProgram,
    key: &SecretKey,
    tp: &TransformedProgram,
    u: &[BigInt],
    g: &[BigInt],
) -> Result<(), String> {
    let pk = key.public_key();
    let x = tp.encode(u).map_err(|e| e.to_string())?;
    let c = encrypt_with(&x, &pk, g).map_err(|e| e.to_string())?;
    let bound = ciphertext_bound_for(&x, &pk, g).map_err(|e| e.to_string())?;
    if let Some(v) = c.values.iter().find(|v| num_traits::Signed::abs(*v) > bound) {
        return Err(format!("ciphertext coordinate {v} exceeds size bound {bound}"));
    }
    let z = tp.run(&c).map_err(|e| e.to_string())?;
    let got = tp.decode(&decrypt(&z, key).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let want = p.run(u).map_err(|e| e.to_string())?;
    if got != want {
        return Err(format!("u = {u:?}, g = {g:?}: decrypted {got:?}, expected {want:?}"));
    }
    Ok(())
}

pub fn draw(rng: &mut SeededRng, len: usize, lo: i64, hi: i64) -> Vec<BigInt> {
    (0..len).map(|_| BigInt::from(rng.range_i64(lo, hi))).collect()
}

/// Segmented triangular metric equalities and inverse identity for one seed.
pub fn triangular_trial(seed: u64) -> Result<(), String> {
    let mut rng = SeededRng::new(seed);
    let n = rng.range_usize(2, 6);
    let d = rng.range_usize(2, 4) as u32;
    let mu = rng.range_usize(2, 6) as u64;
    let beta = rng.range_usize(1, 100) as u64;
    let mu_bar = BigRational::new(BigInt::from(4 * mu), BigInt::from(4)); // μ̄ = μ
    let params = TriangularParams::new(n, beta, d, mu, mu_bar);
    let t = gen_segmented_triangular(&params, &mut rng).map_err(|e| e.to_string())?;
    let inv = invert_segmented_triangular(&t).map_err(|e| e.to_string())?;
    let (a, b) = (t.forward.metrics(), inv.metrics());
    if a != b {
        return Err(format!("seed {seed}: forward metrics {a:?} differ from inverse {b:?}"));
    }
    if a.degree != d {
        return Err(format!("seed {seed}: degree {} instead of {d}", a.degree));
    }
    let pair = AutomorphismPair::new(t.forward.clone(), inv).map_err(|e| e.to_string())?;
    pair.verified().map_err(|e| format!("seed {seed}: {e}"))?;
    Ok(())
}
