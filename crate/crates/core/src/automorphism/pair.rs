use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{PolyMap, Polynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorKind {
    Affine,
    Triangular,
}

/// One factor of a tame automorphism, with its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub kind: FactorKind,
    pub forward: PolyMap,
    pub inverse: PolyMap,
}

/// An automorphism `φ` of `Z^n` with its inverse `ψ`.
///
/// `verified` is set only by [`AutomorphismPair::verified`] after both
/// compositions were checked to be the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismPair {
    n: usize,
    phi: PolyMap,
    psi: PolyMap,
    factorization: Vec<Factor>,
    verified: bool,
}

impl AutomorphismPair {
    /// Unverified pair; only shapes are checked.
    pub fn new(phi: PolyMap, psi: PolyMap) -> Result<Self> {
        let n = phi.domain_dim();
        for map in [&phi, &psi] {
            if map.domain_dim() != n {
                return Err(Error::dims("automorphism domain", n, map.domain_dim()));
            }
            if map.codomain_dim() != n {
                return Err(Error::dims("automorphism codomain", n, map.codomain_dim()));
            }
        }
        Ok(AutomorphismPair {
            n,
            phi,
            psi,
            factorization: Vec::new(),
            verified: false,
        })
    }

    pub fn with_factorization(mut self, factorization: Vec<Factor>) -> Self {
        self.factorization = factorization;
        self
    }

    /// Check both compositions symbolically; fails with the report text if
    /// they are not the identity.
    pub fn verified(mut self) -> Result<Self> {
        let report = verify_inverse_pair(&self)?;
        if !report.holds {
            return Err(Error::Verification(report.to_string()));
        }
        self.verified = true;
        Ok(self)
    }

    pub fn identity(n: usize) -> Self {
        AutomorphismPair {
            n,
            phi: PolyMap::identity(n),
            psi: PolyMap::identity(n),
            factorization: Vec::new(),
            verified: true,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phi(&self) -> &PolyMap {
        &self.phi
    }

    pub fn psi(&self) -> &PolyMap {
        &self.psi
    }

    pub fn factorization(&self) -> &[Factor] {
        &self.factorization
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// `(ψ, φ)`, with the factorization reversed and inverted.
    pub fn inverse(&self) -> AutomorphismPair {
        AutomorphismPair {
            n: self.n,
            phi: self.psi.clone(),
            psi: self.phi.clone(),
            factorization: self
                .factorization
                .iter()
                .rev()
                .map(|f| Factor {
                    kind: f.kind,
                    forward: f.inverse.clone(),
                    inverse: f.forward.clone(),
                })
                .collect(),
            verified: self.verified,
        }
    }
}

/// A component of `ψ∘φ` or `φ∘ψ` that is not the matching coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseIssue {
    /// `"ψ∘φ"` or `"φ∘ψ"`.
    pub composition: &'static str,
    /// 1-based component index.
    pub component: usize,
    /// The composed component as computed.
    pub actual: Polynomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseReport {
    pub holds: bool,
    pub issues: Vec<InverseIssue>,
}

impl fmt::Display for InverseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.holds {
            return write!(f, "ψ∘φ and φ∘ψ are both the identity");
        }
        let parts: Vec<String> = self
            .issues
            .iter()
            .map(|i| {
                let names = Polynomial::default_names(i.actual.num_vars());
                format!(
                    "{} component {} is {} (expected x{})",
                    i.composition,
                    i.component,
                    i.actual.render(&names),
                    i.component
                )
            })
            .collect();
        write!(f, "not inverse: {}", parts.join("; "))
    }
}

fn identity_issues(composed: &PolyMap, label: &'static str) -> Vec<InverseIssue> {
    let n = composed.domain_dim();
    composed
        .components()
        .iter()
        .enumerate()
        .filter(|(i, p)| **p != Polynomial::var(n, *i))
        .map(|(i, p)| InverseIssue {
            composition: label,
            component: i + 1,
            actual: p.clone(),
        })
        .collect()
}

/// Symbolic check that `ψ∘φ` and `φ∘ψ` both canonicalize to the identity.
pub fn verify_inverse_maps(phi: &PolyMap, psi: &PolyMap) -> Result<InverseReport> {
    let n = phi.domain_dim();
    if phi.codomain_dim() != n {
        return Err(Error::dims("φ codomain", n, phi.codomain_dim()));
    }
    if psi.domain_dim() != n || psi.codomain_dim() != n {
        return Err(Error::dims("ψ shape", n, psi.domain_dim()));
    }
    let mut issues = identity_issues(&PolyMap::compose(psi, phi)?, "ψ∘φ");
    issues.extend(identity_issues(&PolyMap::compose(phi, psi)?, "φ∘ψ"));
    Ok(InverseReport {
        holds: issues.is_empty(),
        issues,
    })
}

pub fn verify_inverse_pair(pair: &AutomorphismPair) -> Result<InverseReport> {
    verify_inverse_maps(&pair.phi, &pair.psi)
}
