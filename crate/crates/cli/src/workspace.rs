use std::fs;
use std::path::{Path, PathBuf};

use affine_fhe::crypto::{Ciphertext, Plaintext, PublicKey, SecretKey};
use affine_fhe::program::StraightLineProgram;
use affine_fhe::rewrite::TransformedProgram;
use anyhow::{Context, Result};
use num_bigint::BigInt;
use serde::Serialize;

/// Default file names inside the workspace directory.
pub const PRIVATE_KEY: &str = "key.json";
pub const PUBLIC_KEY: &str = "key.pub.json";
pub const PROGRAM: &str = "program.txt";
pub const TRANSFORMED: &str = "transformed.json";
pub const CIPHERTEXT: &str = "ciphertext.json";
pub const RESULT: &str = "result.json";
pub const PLAINTEXT: &str = "plaintext.json";

#[derive(Debug, Clone)]
pub struct Workspace {
    pub dir: PathBuf,
    pub json_out: Option<PathBuf>,
}

impl Workspace {
    /// `explicit` if given, otherwise `name` under the workspace directory.
    pub fn path(&self, explicit: &Option<PathBuf>, name: &str) -> PathBuf {
        explicit.clone().unwrap_or_else(|| self.dir.join(name))
    }

    /// Write `<command>.json` under `--json-out`, if set.
    pub fn report(&self, command: &str, value: &impl Serialize) -> Result<()> {
        let Some(dir) = &self.json_out else {
            return Ok(());
        };
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let text = serde_json::to_string_pretty(value)?;
        write_text(&dir.join(format!("{command}.json")), &text)
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

pub fn write_private(path: &Path, text: &str) -> Result<()> {
    write_text(path, text)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        fs::set_permissions(path, fs::Permissions::from_mode(0o600))?;
    }
    Ok(())
}

pub fn load_secret(path: &Path) -> Result<SecretKey> {
    SecretKey::from_json(&read_text(path)?).with_context(|| format!("loading {}", path.display()))
}

pub fn load_public(path: &Path) -> Result<PublicKey> {
    PublicKey::from_json(&read_text(path)?).with_context(|| format!("loading {}", path.display()))
}

/// Program text, or the JSON form when the file starts with `{`.
pub fn load_program(path: &Path) -> Result<StraightLineProgram> {
    let text = read_text(path)?;
    let parsed = if text.trim_start().starts_with('{') {
        StraightLineProgram::from_json(&text)
    } else {
        StraightLineProgram::parse_text(&text)
    };
    parsed.with_context(|| format!("loading {}", path.display()))
}

pub fn load_transformed(path: &Path) -> Result<TransformedProgram> {
    TransformedProgram::from_json(&read_text(path)?).with_context(|| format!("loading {}", path.display()))
}

pub fn load_ciphertext(path: &Path) -> Result<Ciphertext> {
    Ciphertext::from_json(&read_text(path)?).with_context(|| format!("loading {}", path.display()))
}

pub fn save_plaintext(path: &Path, p: &Plaintext) -> Result<()> {
    write_text(path, &serde_json::to_string_pretty(p)?)
}

/// An integer tuple given on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tuple(pub Vec<BigInt>);

/// `"2,3"` -> `(2, 3)`; the empty string is the empty tuple.
pub fn parse_tuple(text: &str) -> Result<Tuple, String> {
    if text.trim().is_empty() {
        return Ok(Tuple(Vec::new()));
    }
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<BigInt>().map_err(|_| format!("`{s}` is not an integer"))
        })
        .collect::<Result<_, _>>()
        .map(Tuple)
}

pub fn show(values: &[BigInt]) -> String {
    let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}
