//! `afhe`: key generation, program transformation, encryption, execution,
//! decryption and verification from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3
//! infeasible parameters.

mod commands;
mod workspace;

use std::path::PathBuf;
use std::process::ExitCode;

use affine_fhe::Error;
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;

use workspace::{parse_tuple, Tuple, Workspace};

#[derive(Parser, Debug)]
#[command(name = "afhe", about = "Homomorphic program encryption with polynomial automorphisms")]
struct Cli {
    /// Directory holding the default key, program and ciphertext files
    /// (the current directory when unset).
    #[arg(long, env = "AFHE_WORKSPACE", global = true)]
    workspace: Option<PathBuf>,
    /// Also write each report as `<command>.json` into this directory.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    /// Seed for key generation and, unless `--enc-seed` is given, encryption.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Separate seed for encryption randomness.
    #[arg(long, global = true)]
    enc_seed: Option<u64>,
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a key pair (φ, ψ) and write private and public key files.
    Keygen(KeygenArgs),
    /// Rewrite a program into one that runs on ciphertexts.
    Transform(TransformArgs),
    /// Encrypt a plaintext input under the public key.
    Encrypt(EncryptArgs),
    /// Run a transformed program on a ciphertext.
    Run(RunArgs),
    /// Decrypt a ciphertext with the private key.
    Decrypt(DecryptArgs),
    /// Check decrypt(run(F(P), encrypt(u, g))) = P(u) and the metric bounds.
    Verify(VerifyArgs),
    /// Metrics and bound reports for keys and programs.
    Stats(StatsArgs),
    /// Print a transformed program as program text.
    Emit(EmitArgs),
}

fn parse_bigint(s: &str) -> Result<BigInt, String> {
    s.parse().map_err(|_| format!("`{s}` is not an integer"))
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    s.parse().map_err(|_| format!("`{s}` is not a rational number (use `a` or `a/b`)"))
}

fn parse_version(s: &str) -> Result<u8, String> {
    match s {
        "0" | "1" | "2" => Ok(s.parse().unwrap()),
        _ => Err(format!("version must be 0, 1 or 2, got `{s}`")),
    }
}

#[derive(Args, Debug)]
struct KeygenArgs {
    /// Total state slots (plaintext plus randomness).
    #[arg(long)]
    n: usize,
    #[arg(long)]
    degree: u32,
    #[arg(long, value_parser = parse_bigint)]
    coeff_bound: BigInt,
    #[arg(long)]
    monomials: u64,
    /// Mean monomials per component; defaults to `--monomials`.
    #[arg(long, value_parser = parse_rational)]
    avg_monomials: Option<BigRational>,
    #[arg(long, default_value_t = 1)]
    stages: usize,
    #[arg(long = "version", alias = "scheme-version", default_value = "0", value_parser = parse_version)]
    version: u8,
    /// Randomness slots `n - m` (versions 1 and 2).
    #[arg(long, default_value_t = 0)]
    rand_slots: usize,
    /// Randomness is drawn uniformly from `[0, rng_bound]`.
    #[arg(long, value_parser = parse_bigint, default_value = "1000")]
    rng_bound: BigInt,
    #[arg(long)]
    private: Option<PathBuf>,
    #[arg(long)]
    public: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[arg(long)]
    key: Option<PathBuf>,
    /// Program text (or JSON).
    #[arg(long)]
    program: Option<PathBuf>,
    /// Scheme version; a value different from the key's rebinds the key.
    #[arg(long = "version", alias = "scheme-version", value_parser = parse_version)]
    version: Option<u8>,
    #[arg(long)]
    rand_slots: Option<usize>,
    #[arg(long, value_parser = parse_bigint)]
    rng_bound: Option<BigInt>,
    /// Coefficient range of the random affine `K` (version 2).
    #[arg(long, default_value_t = affine_fhe::rewrite::DEFAULT_K_BOUND)]
    k_bound: i64,
    #[arg(long)]
    public: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EncryptArgs {
    /// Program input such as `2,3`.
    #[arg(long, value_parser = parse_tuple)]
    input: Tuple,
    /// Encrypt `--input` as the plaintext state, skipping the program's input map.
    #[arg(long)]
    raw: bool,
    #[arg(long)]
    public: Option<PathBuf>,
    #[arg(long)]
    transformed: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    transformed: Option<PathBuf>,
    #[arg(long)]
    ciphertext: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DecryptArgs {
    #[arg(long)]
    key: Option<PathBuf>,
    /// Defaults to the result of `run`.
    #[arg(long)]
    ciphertext: Option<PathBuf>,
    /// Print the plaintext state, skipping the program's output map.
    #[arg(long)]
    raw: bool,
    #[arg(long)]
    transformed: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    key: Option<PathBuf>,
    #[arg(long)]
    program: Option<PathBuf>,
    #[arg(long)]
    transformed: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Fixed program input; otherwise drawn from `[-input_range, input_range]`.
    #[arg(long, value_parser = parse_tuple)]
    input: Option<Tuple>,
    #[arg(long, default_value_t = 50)]
    input_range: i64,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[arg(long)]
    key: Option<PathBuf>,
    #[arg(long)]
    program: Option<PathBuf>,
    #[arg(long)]
    transformed: Option<PathBuf>,
    /// Input bit width for the ciphertext bit-width estimate.
    #[arg(long, default_value_t = 32)]
    bits: u64,
}

#[derive(Args, Debug)]
struct EmitArgs {
    #[arg(long)]
    transformed: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Outcome of a command that ran to completion.
pub enum Status {
    Ok,
    VerificationFailed,
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::Infeasible { .. }) => 3,
        Some(
            Error::Verification(_)
            | Error::FingerprintMismatch { .. }
            | Error::VersionMismatch { .. }
            | Error::Contract(_),
        ) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    let ws = Workspace {
        dir: cli.workspace.clone().unwrap_or_else(|| PathBuf::from(".")),
        json_out: cli.json_out.clone(),
    };
    let seeds = commands::Seeds {
        key: cli.seed,
        enc: cli.enc_seed.unwrap_or(cli.seed),
    };
    let result = match cli.command {
        Command::Keygen(a) => commands::keygen(&ws, seeds, a),
        Command::Transform(a) => commands::transform(&ws, seeds, a),
        Command::Encrypt(a) => commands::encrypt(&ws, seeds, a),
        Command::Run(a) => commands::run(&ws, a),
        Command::Decrypt(a) => commands::decrypt(&ws, a),
        Command::Verify(a) => commands::verify(&ws, seeds, a),
        Command::Stats(a) => commands::stats(&ws, a),
        Command::Emit(a) => commands::emit(&ws, a),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
