//! Data encryption `E_φ` and decryption `D_φ` for the three scheme versions,
//! plus key generation and key files.
//!
//! A public key holds `φ`, the slot layout and (version 2) `h` and the
//! forward map of `H`. The private key adds `ψ`, `H⁻¹`, the factorization
//! and the generating seed. Both carry a SHA-256 fingerprint of the public
//! part; ciphertexts and transformed programs name the key by it.

mod cipher;
mod keys;
mod scheme;

pub use cipher::{
    ciphertext_bound_for, ciphertext_size_bound, decrypt, decrypt_state, draw_randomness, encrypt, encrypt_with, encryption_point,
    Ciphertext, Plaintext,
};
pub use keys::{keygen, mixing_warnings, KeygenOutcome, KeygenRequest, PublicKey, PublicScheme, SecretKey};
pub use scheme::{default_h, gen_big_h, gen_k, generate_scheme, SchemeConfig, SchemeVersion};
