use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::crypto::{Ciphertext, Plaintext, SchemeVersion};
use crate::error::{Error, Result};
use crate::poly::PolyMap;
use crate::program::{ExecutionTrace, StraightLineProgram};

/// Which key and scheme a transformed program belongs to. Only public data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeProvenance {
    pub version: SchemeVersion,
    pub m: usize,
    pub n: usize,
    pub key_fingerprint: String,
}

/// `F_φ(P)`: an `n`-slot program with identity input and output that runs
/// on ciphertexts, plus the plaintext maps `in` (`k -> m`) and `out`
/// (`m -> l`) of the source program for the data owner's side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformedProgram {
    #[serde(flatten)]
    pub program: StraightLineProgram,
    pub scheme: SchemeProvenance,
    pub source_input: PolyMap,
    pub source_output: PolyMap,
}

impl TransformedProgram {
    pub fn validate(&self) -> Result<()> {
        self.program.ensure_valid()?;
        let (m, n) = (self.scheme.m, self.scheme.n);
        if self.program.n != n || self.program.k != n || self.program.l != n {
            return Err(Error::Structural(format!(
                "transformed program must read and return all {n} slots"
            )));
        }
        if self.source_input.codomain_dim() != m || self.source_output.domain_dim() != m {
            return Err(Error::Structural(format!(
                "source input and output maps must meet the {m} plaintext slots"
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let tp: TransformedProgram = serde_json::from_str(text)?;
        tp.validate()?;
        Ok(tp)
    }

    /// `in(u)`, the plaintext to encrypt for source input `u`.
    pub fn encode(&self, u: &[BigInt]) -> Result<Plaintext> {
        if u.len() != self.source_input.domain_dim() {
            return Err(Error::dims("program input", self.source_input.domain_dim(), u.len()));
        }
        Ok(Plaintext::new(self.source_input.evaluate(u)?))
    }

    /// `out(x)` for a decrypted plaintext state `x`.
    pub fn decode(&self, x: &Plaintext) -> Result<Vec<BigInt>> {
        self.source_output.evaluate(&x.values)
    }

    fn check_ciphertext(&self, c: &Ciphertext) -> Result<()> {
        if c.key_fingerprint != self.scheme.key_fingerprint {
            return Err(Error::FingerprintMismatch {
                expected: self.scheme.key_fingerprint.clone(),
                found: c.key_fingerprint.clone(),
            });
        }
        if c.version != self.scheme.version {
            return Err(Error::VersionMismatch {
                expected: self.scheme.version.into(),
                found: c.version.into(),
            });
        }
        Ok(())
    }

    /// Run on a ciphertext. A version 2 program begins with the unmasking
    /// step, so its output is unmasked.
    pub fn run(&self, c: &Ciphertext) -> Result<Ciphertext> {
        self.check_ciphertext(c)?;
        let values = self.program.run(&c.values)?;
        Ok(Ciphertext {
            values,
            masked: false,
            ..c.clone()
        })
    }

    pub fn run_traced(&self, c: &Ciphertext) -> Result<ExecutionTrace> {
        self.check_ciphertext(c)?;
        self.program.run_traced(&c.values)
    }
}
