use std::path::Path;

use affine_fhe::automorphism::{AutomorphismPair, KeygenOptions};
use affine_fhe::bounds::{
    bit_width_estimate, check_rewritten_step, keygen_bound_check, BoundsReport, ReportMetrics,
};
use affine_fhe::crypto::{
    self as crypto, ciphertext_bound_for, draw_randomness, encrypt_with, gen_k, generate_scheme,
    keygen as make_key, KeygenRequest, Plaintext, SchemeVersion, SecretKey,
};
use affine_fhe::poly::PolyMap;
use affine_fhe::program::StraightLineProgram;
use affine_fhe::rewrite::{augmented_steps, build_fhe_with, emit_pseudocode, TransformedProgram};
use affine_fhe::rng::SeededRng;
use affine_fhe::Error;
use anyhow::{bail, Result};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::workspace::{self as ws_files, show, Workspace};
use crate::{
    DecryptArgs, EmitArgs, EncryptArgs, KeygenArgs, RunArgs, Status, StatsArgs, TransformArgs, VerifyArgs,
};

#[derive(Debug, Clone, Copy)]
pub struct Seeds {
    pub key: u64,
    pub enc: u64,
}

fn version_of(v: u8) -> SchemeVersion {
    SchemeVersion::try_from(v).expect("validated by the argument parser")
}

fn write_keys(key: &SecretKey, private: &Path, public: &Path) -> Result<()> {
    ws_files::write_private(private, &key.to_json()?)?;
    ws_files::write_text(public, &key.public_key().to_json()?)?;
    Ok(())
}

fn print_step_reports(reports: &[BoundsReport]) {
    for (i, r) in reports.iter().enumerate() {
        println!("step {}:\n{r}", i + 1);
    }
}

pub fn keygen(ws: &Workspace, seeds: Seeds, a: KeygenArgs) -> Result<Status> {
    if a.rand_slots >= a.n {
        bail!(Error::InvalidParameter(format!(
            "--rand-slots {} leaves no plaintext slots out of n = {}",
            a.rand_slots, a.n
        )));
    }
    let outcome = make_key(&KeygenRequest {
        n: a.n,
        degree: a.degree,
        coeff_bound: a.coeff_bound,
        monomials: a.monomials,
        avg_monomials: a.avg_monomials,
        stages: a.stages,
        version: version_of(a.version),
        m: a.n - a.rand_slots,
        rng_bound: a.rng_bound,
        seed: seeds.key,
        options: KeygenOptions::default(),
    })?;
    let key = &outcome.key;
    let plan = key.plan().expect("generated keys carry their plan");
    let report = keygen_bound_check(key.pair(), &plan.requested);
    let private = ws.path(&a.private, ws_files::PRIVATE_KEY);
    let public = ws.path(&a.public, ws_files::PUBLIC_KEY);
    write_keys(key, &private, &public)?;

    println!("key {}", key.fingerprint());
    println!(
        "n = {}, scheme version {}, m = {}, stage degrees {:?}, {} sample(s) drawn",
        key.n(),
        key.scheme().version,
        key.scheme().m,
        plan.stage_degrees,
        outcome.attempts
    );
    println!("{report}");
    for w in &outcome.warnings {
        println!("warning: {w}");
    }
    let ok = report.satisfied();
    println!("verification {}", if ok { "PASS" } else { "FAIL" });
    ws.report(
        "keygen",
        &json!({
            "fingerprint": key.fingerprint(),
            "private_key": private,
            "public_key": public,
            "attempts": outcome.attempts,
            "plan": plan,
            "bounds": report,
            "warnings": outcome.warnings,
            "pass": ok,
        }),
    )?;
    Ok(if ok { Status::Ok } else { Status::VerificationFailed })
}

/// The key bound to `version` with `m` plaintext slots, rebuilding the
/// scheme from `seed` when the stored one differs.
fn bind_scheme(
    key: SecretKey,
    version: SchemeVersion,
    m: usize,
    rng_bound: Option<BigInt>,
    seed: u64,
) -> Result<(SecretKey, bool)> {
    let current = key.scheme();
    let bound_ok = rng_bound.as_ref().is_none_or(|b| *b == current.rng_bound);
    if current.version == version && current.m == m && bound_ok {
        return Ok((key, false));
    }
    let rng_bound = rng_bound.unwrap_or_else(|| {
        if current.rng_bound > BigInt::from(0) {
            current.rng_bound.clone()
        } else {
            BigInt::from(1000)
        }
    });
    let scheme = generate_scheme(version, m, key.n(), rng_bound, &SeededRng::new(seed).split("scheme"))?;
    Ok((key.with_scheme(scheme)?, true))
}

pub fn transform(ws: &Workspace, seeds: Seeds, a: TransformArgs) -> Result<Status> {
    let key_path = ws.path(&a.key, ws_files::PRIVATE_KEY);
    let key = ws_files::load_secret(&key_path)?;
    let p = ws_files::load_program(&ws.path(&a.program, ws_files::PROGRAM))?;
    let n = key.n();
    if let Some(r) = a.rand_slots {
        if p.n + r != n {
            bail!(Error::InvalidParameter(format!(
                "program state has {} slots and --rand-slots is {r}, but the key has n = {n}",
                p.n
            )));
        }
    }
    if p.n > n {
        bail!(Error::DimensionMismatch {
            context: "program state vs key",
            expected: n,
            found: p.n,
        });
    }
    let version = a.version.map(version_of).unwrap_or(key.scheme().version);
    let (key, rebound) = bind_scheme(key, version, p.n, a.rng_bound, seeds.key)?;
    if rebound {
        let public = ws.path(&a.public, ws_files::PUBLIC_KEY);
        write_keys(&key, &key_path, &public)?;
        println!(
            "key rebound to scheme version {} with m = {}; new fingerprint {} written to {} and {}",
            key.scheme().version,
            key.scheme().m,
            key.fingerprint(),
            key_path.display(),
            public.display()
        );
    }
    let mut cfg = key.scheme().clone();
    if cfg.version == SchemeVersion::V2 {
        cfg.k = Some(gen_k(n, cfg.r(), a.k_bound, &SeededRng::new(seeds.key).split("transform")));
    }
    let tp = build_fhe_with(&p, key.pair(), &cfg, key.fingerprint())?;
    let source = augmented_steps(&p, &cfg)?;
    let reports = step_reports(&tp, &source, key.pair());
    let out = ws.path(&a.out, ws_files::TRANSFORMED);
    ws_files::write_text(&out, &tp.to_json()?)?;
    println!(
        "wrote {} ({} step(s), scheme version {}, key {})",
        out.display(),
        tp.program.steps.len(),
        tp.scheme.version,
        tp.scheme.key_fingerprint
    );
    print_step_reports(&reports);
    ws.report(
        "transform",
        &json!({
            "transformed": out,
            "key_fingerprint": key.fingerprint(),
            "version": tp.scheme.version,
            "rebound_key": rebound,
            "steps": reports,
        }),
    )?;
    Ok(Status::Ok)
}

fn step_reports(tp: &TransformedProgram, source: &[PolyMap], pair: &AutomorphismPair) -> Vec<BoundsReport> {
    source
        .iter()
        .zip(&tp.program.steps)
        .map(|(f, r)| check_rewritten_step(f, r, pair))
        .collect()
}

pub fn encrypt(ws: &Workspace, seeds: Seeds, a: EncryptArgs) -> Result<Status> {
    let pk = ws_files::load_public(&ws.path(&a.public, ws_files::PUBLIC_KEY))?;
    let x = if a.raw {
        Plaintext::new(a.input.0.clone())
    } else {
        let tp = ws_files::load_transformed(&ws.path(&a.transformed, ws_files::TRANSFORMED))?;
        tp.encode(&a.input.0)?
    };
    let mut rng = SeededRng::new(seeds.enc).split("encrypt");
    let c = crypto::encrypt(&x, &pk, &mut rng)?;
    let out = ws.path(&a.out, ws_files::CIPHERTEXT);
    ws_files::write_text(&out, &c.to_json()?)?;
    println!("{} -> {}", show(&a.input.0), out.display());
    ws.report("encrypt", &json!({ "ciphertext": out, "key_fingerprint": c.key_fingerprint }))?;
    Ok(Status::Ok)
}

pub fn run(ws: &Workspace, a: RunArgs) -> Result<Status> {
    let tp = ws_files::load_transformed(&ws.path(&a.transformed, ws_files::TRANSFORMED))?;
    let c = ws_files::load_ciphertext(&ws.path(&a.ciphertext, ws_files::CIPHERTEXT))?;
    let z = tp.run(&c)?;
    let out = ws.path(&a.out, ws_files::RESULT);
    ws_files::write_text(&out, &z.to_json()?)?;
    println!("wrote {}", out.display());
    ws.report("run", &json!({ "result": out }))?;
    Ok(Status::Ok)
}

pub fn decrypt(ws: &Workspace, a: DecryptArgs) -> Result<Status> {
    let key = ws_files::load_secret(&ws.path(&a.key, ws_files::PRIVATE_KEY))?;
    let c = ws_files::load_ciphertext(&ws.path(&a.ciphertext, ws_files::RESULT))?;
    let x = crypto::decrypt(&c, &key)?;
    let values = if a.raw {
        x.values.clone()
    } else {
        let tp = ws_files::load_transformed(&ws.path(&a.transformed, ws_files::TRANSFORMED))?;
        tp.decode(&x)?
    };
    let out = ws.path(&a.out, ws_files::PLAINTEXT);
    ws_files::save_plaintext(&out, &Plaintext::new(values.clone()))?;
    println!("{}", show(&values));
    ws.report(
        "decrypt",
        &json!({ "values": values.iter().map(|v| v.to_string()).collect::<Vec<_>>() }),
    )?;
    Ok(Status::Ok)
}

/// Source steps of `tp` in plaintext coordinates. For version 2 the first
/// step is recovered as `ψ∘F_1∘φ`, which also yields the `K` used.
fn recover_source(tp: &TransformedProgram, p: &StraightLineProgram, key: &SecretKey) -> Result<Vec<PolyMap>> {
    let mut cfg = key.scheme().clone();
    if cfg.version == SchemeVersion::V2 {
        let Some(first) = tp.program.steps.first() else {
            bail!(Error::Verification("version 2 program has no unmasking step".into()));
        };
        let pair = key.pair();
        let s0 = PolyMap::compose(pair.psi(), &PolyMap::compose(first, pair.phi())?)?;
        let k = PolyMap::new(cfg.n, s0.components()[cfg.m..].to_vec())?;
        cfg.k = Some(k);
    }
    Ok(augmented_steps(p, &cfg)?)
}

#[derive(Debug, Clone, Serialize)]
struct Counterexample {
    trial: u64,
    input: Vec<String>,
    randomness: Vec<String>,
    problem: String,
}

fn strings(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn trial(
    i: u64,
    p: &StraightLineProgram,
    tp: &TransformedProgram,
    key: &SecretKey,
    base: &SeededRng,
    input: Option<&[BigInt]>,
    range: i64,
) -> Result<(), Counterexample> {
    let pk = key.public_key();
    let mut rng = base.split_indexed("verify", i);
    let u: Vec<BigInt> = match input {
        Some(u) => u.to_vec(),
        None => (0..p.k).map(|_| BigInt::from(rng.range_i64(-range, range))).collect(),
    };
    let g = draw_randomness(&pk, &mut rng);
    let fail = |problem: String| Counterexample {
        trial: i,
        input: strings(&u),
        randomness: strings(&g),
        problem,
    };
    let go = || -> affine_fhe::Result<Result<(), String>> {
        let x = tp.encode(&u)?;
        let c = encrypt_with(&x, &pk, &g)?;
        let bound = ciphertext_bound_for(&x, &pk, &g)?;
        if let Some(v) = c.values.iter().find(|v| num_traits::Signed::abs(*v) > bound) {
            return Ok(Err(format!("ciphertext coordinate {v} exceeds the size bound {bound}")));
        }
        let got = tp.decode(&crypto::decrypt(&tp.run(&c)?, key)?)?;
        let want = p.run(&u)?;
        Ok(if got == want {
            Ok(())
        } else {
            Err(format!("decrypted {}, expected {}", show(&got), show(&want)))
        })
    };
    match go() {
        Ok(r) => r.map_err(fail),
        Err(e) => Err(fail(e.to_string())),
    }
}

pub fn verify(ws: &Workspace, seeds: Seeds, a: VerifyArgs) -> Result<Status> {
    let key = ws_files::load_secret(&ws.path(&a.key, ws_files::PRIVATE_KEY))?;
    let p = ws_files::load_program(&ws.path(&a.program, ws_files::PROGRAM))?;
    let tp = ws_files::load_transformed(&ws.path(&a.transformed, ws_files::TRANSFORMED))?;
    if tp.scheme.key_fingerprint != key.fingerprint() {
        bail!(Error::FingerprintMismatch {
            expected: key.fingerprint().to_string(),
            found: tp.scheme.key_fingerprint.clone(),
        });
    }
    if let Some(u) = &a.input {
        if u.0.len() != p.k {
            bail!(Error::DimensionMismatch {
                context: "--input",
                expected: p.k,
                found: u.0.len(),
            });
        }
    }
    let source = recover_source(&tp, &p, &key)?;
    let reports = step_reports(&tp, &source, key.pair());
    let steps_match = source.len() == tp.program.steps.len();
    let bounds_ok = steps_match && reports.iter().all(BoundsReport::satisfied);

    let base = SeededRng::new(seeds.enc);
    let mut failures: Vec<Counterexample> = (0..a.trials)
        .into_par_iter()
        .filter_map(|i| trial(i, &p, &tp, &key, &base, a.input.as_ref().map(|t| t.0.as_slice()), a.input_range).err())
        .collect();
    failures.sort_by_key(|c| c.trial);
    let passed = a.trials - failures.len() as u64;

    print_step_reports(&reports);
    if !steps_match {
        println!(
            "transformed program has {} step(s), the source needs {}",
            tp.program.steps.len(),
            source.len()
        );
    }
    println!("trials: {passed}/{} agree with the source program", a.trials);
    if let Some(c) = failures.first() {
        println!(
            "counterexample (trial {}): u = ({}), g = ({}): {}",
            c.trial,
            c.input.join(", "),
            c.randomness.join(", "),
            c.problem
        );
    }
    let ok = failures.is_empty() && bounds_ok;
    println!("verification {}", if ok { "PASS" } else { "FAIL" });
    ws.report(
        "verify",
        &json!({
            "pass": ok,
            "trials": a.trials,
            "passed": passed,
            "bounds_ok": bounds_ok,
            "steps": reports,
            "counterexample": failures.first(),
        }),
    )?;
    Ok(if ok { Status::Ok } else { Status::VerificationFailed })
}

fn existing(ws: &Workspace, explicit: &Option<std::path::PathBuf>, name: &str) -> Option<std::path::PathBuf> {
    let path = ws.path(explicit, name);
    (explicit.is_some() || path.exists()).then_some(path)
}

pub fn stats(ws: &Workspace, a: StatsArgs) -> Result<Status> {
    let mut out = serde_json::Map::new();
    let mut ok = true;
    if let Some(path) = existing(ws, &a.key, ws_files::PRIVATE_KEY) {
        let key = ws_files::load_secret(&path)?;
        let phi = key.pair().phi().metrics();
        let bits = bit_width_estimate(a.bits, &phi);
        println!("key {} (n = {}, scheme version {})", key.fingerprint(), key.n(), key.scheme().version);
        println!("ciphertext bit width for {}-bit inputs: {bits}", a.bits);
        out.insert("key_fingerprint".into(), json!(key.fingerprint()));
        out.insert("phi".into(), json!(ReportMetrics::from(&phi)));
        out.insert("psi".into(), json!(ReportMetrics::from(&key.pair().psi().metrics())));
        out.insert("bit_width".into(), json!(bits));
        if let Some(plan) = key.plan() {
            let report = keygen_bound_check(key.pair(), &plan.requested);
            println!("{report}");
            ok &= report.satisfied();
            out.insert("keygen_bounds".into(), json!(report));
        } else {
            let show_m = |m: &affine_fhe::poly::Metrics| {
                format!("d = {}, |·| = {}, m = {}, m̄ = {}", m.degree, m.coeff_norm, m.max_monomials, m.avg_monomials)
            };
            println!("φ: {}", show_m(&phi));
            println!("ψ: {}", show_m(&key.pair().psi().metrics()));
        }
    }
    if let Some(path) = existing(ws, &a.program, ws_files::PROGRAM) {
        let p = ws_files::load_program(&path)?;
        let m = p.step_metrics();
        println!(
            "program: k = {}, n = {}, l = {}, {} step(s), d = {}, |·| = {}, m = {}",
            p.k,
            p.n,
            p.l,
            p.steps.len(),
            m.degree,
            m.coeff_norm,
            m.max_monomials
        );
        out.insert("program".into(), json!(ReportMetrics::from(&m)));
    }
    if let Some(path) = existing(ws, &a.transformed, ws_files::TRANSFORMED) {
        let tp = ws_files::load_transformed(&path)?;
        let metrics: Vec<ReportMetrics> = tp.program.steps.iter().map(|s| ReportMetrics::from(&s.metrics())).collect();
        for (i, m) in metrics.iter().enumerate() {
            println!(
                "transformed step {}: d = {}, |·| = {}, m = {}, m̄ = {}",
                i + 1,
                m.degree,
                m.coeff,
                m.monomials,
                m.avg_monomials
            );
        }
        out.insert("transformed_steps".into(), json!(metrics));
    }
    if out.is_empty() {
        bail!(Error::InvalidParameter(
            "nothing to report: no key, program or transformed program found".into()
        ));
    }
    ws.report("stats", &out)?;
    Ok(if ok { Status::Ok } else { Status::VerificationFailed })
}

pub fn emit(ws: &Workspace, a: EmitArgs) -> Result<Status> {
    let tp = ws_files::load_transformed(&ws.path(&a.transformed, ws_files::TRANSFORMED))?;
    let text = emit_pseudocode(&tp);
    match &a.out {
        Some(path) => ws_files::write_text(path, &text)?,
        None => print!("{text}"),
    }
    Ok(Status::Ok)
}
