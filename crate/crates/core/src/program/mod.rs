//! Straight-line programs over `Z^n`: one input map, an ordered chain of
//! simultaneous full-state polynomial updates, one output map.

mod text;

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Metrics, PolyMap};

pub use text::LOOP_KEYWORDS;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StraightLineProgram {
    pub k: usize,
    pub n: usize,
    pub l: usize,
    pub f_in: PolyMap,
    pub steps: Vec<PolyMap>,
    pub f_out: PolyMap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// `f_in`, `f_out` or `step <i>` (1-based).
    pub location: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        let lines: Vec<String> = self.diagnostics.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", lines.join("\n"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionTrace {
    pub input: Vec<BigInt>,
    /// `states[0] = f_in(input)`, `states[i+1] = steps[i](states[i])`.
    pub states: Vec<Vec<BigInt>>,
    pub output: Vec<BigInt>,
}

impl StraightLineProgram {
    /// Build and validate.
    pub fn new(f_in: PolyMap, steps: Vec<PolyMap>, f_out: PolyMap) -> Result<Self> {
        let p = StraightLineProgram {
            k: f_in.domain_dim(),
            n: f_in.codomain_dim(),
            l: f_out.codomain_dim(),
            f_in,
            steps,
            f_out,
        };
        p.ensure_valid()?;
        Ok(p)
    }

    /// `n` state slots, identity input and output, no steps.
    pub fn identity(n: usize) -> Self {
        StraightLineProgram {
            k: n,
            n,
            l: n,
            f_in: PolyMap::identity(n),
            steps: Vec::new(),
            f_out: PolyMap::identity(n),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut diagnostics = Vec::new();
        let mut check = |location: String, map: &PolyMap, domain: usize, codomain: usize| {
            if map.domain_dim() != domain {
                diagnostics.push(Diagnostic {
                    location: location.clone(),
                    message: format!(
                        "input dimension mismatch: map reads {} variables, expected {domain}",
                        map.domain_dim()
                    ),
                });
            }
            if map.codomain_dim() != codomain {
                diagnostics.push(Diagnostic {
                    location,
                    message: format!(
                        "state dimension mismatch: map has {} components, expected {codomain}",
                        map.codomain_dim()
                    ),
                });
            }
        };
        check("f_in".into(), &self.f_in, self.k, self.n);
        for (i, step) in self.steps.iter().enumerate() {
            check(format!("step {}", i + 1), step, self.n, self.n);
        }
        check("f_out".into(), &self.f_out, self.n, self.l);
        ValidationReport { diagnostics }
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::Structural(report.to_string()))
        }
    }

    pub fn run(&self, input: &[BigInt]) -> Result<Vec<BigInt>> {
        self.ensure_valid()?;
        if input.len() != self.k {
            return Err(Error::dims("program input", self.k, input.len()));
        }
        let mut state = self.f_in.evaluate(input)?;
        for step in &self.steps {
            state = step.evaluate(&state)?;
        }
        self.f_out.evaluate(&state)
    }

    pub fn run_traced(&self, input: &[BigInt]) -> Result<ExecutionTrace> {
        self.ensure_valid()?;
        if input.len() != self.k {
            return Err(Error::dims("program input", self.k, input.len()));
        }
        let mut states = vec![self.f_in.evaluate(input)?];
        for step in &self.steps {
            let next = step.evaluate(states.last().expect("nonempty"))?;
            states.push(next);
        }
        let output = self.f_out.evaluate(states.last().expect("nonempty"))?;
        Ok(ExecutionTrace {
            input: input.to_vec(),
            states,
            output,
        })
    }

    /// `(d(P), |P|, m(P))` and mean term count taken over all steps; the
    /// zero-step program has the metrics of the empty map.
    pub fn step_metrics(&self) -> Metrics {
        let mut components = Vec::new();
        for s in &self.steps {
            components.extend(s.components().iter().cloned());
        }
        PolyMap::new(self.n, components)
            .expect("validated steps share the state arity")
            .metrics()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: StraightLineProgram = serde_json::from_str(text)?;
        p.ensure_valid()?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn fun1() -> StraightLineProgram {
        let x = |i| Polynomial::var(2, i);
        let step = PolyMap::new(2, vec![&x(0) + &x(1), &x(0) * &x(1)]).unwrap();
        StraightLineProgram::new(PolyMap::identity(2), vec![step], PolyMap::identity(2)).unwrap()
    }

    #[test]
    fn fun1_adds_and_multiplies() {
        let p = fun1();
        assert_eq!(p.run(&ints(&[2, 3])).unwrap(), ints(&[5, 6]));
        assert_eq!(p.run(&ints(&[0, 0])).unwrap(), ints(&[0, 0]));
    }

    #[test]
    fn three_step_hand_trace() {
        let x = Polynomial::var(1, 0);
        let steps = vec![
            PolyMap::new(1, vec![x.pow(2)]).unwrap(),
            PolyMap::new(1, vec![&x + &Polynomial::one(1)]).unwrap(),
            PolyMap::new(1, vec![x.scale(&BigInt::from(2))]).unwrap(),
        ];
        let p = StraightLineProgram::new(PolyMap::identity(1), steps, PolyMap::identity(1)).unwrap();
        assert_eq!(p.run(&ints(&[2])).unwrap(), ints(&[10]));
        let trace = p.run_traced(&ints(&[2])).unwrap();
        assert_eq!(trace.states, vec![ints(&[2]), ints(&[4]), ints(&[5]), ints(&[10])]);
        assert_eq!(trace.output, ints(&[10]));
    }

    #[test]
    fn short_step_is_diagnosed() {
        let mut p = fun1();
        p.steps.push(PolyMap::projection(2, &[0]));
        let report = p.validate();
        assert!(!report.is_valid());
        assert_eq!(report.diagnostics[0].location, "step 2");
        assert!(report.diagnostics[0].message.contains("state dimension mismatch"));
        assert!(p.run(&ints(&[1, 2])).is_err());
    }

    #[test]
    fn arity_checked() {
        assert!(fun1().run(&ints(&[1])).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = fun1();
        let back = StraightLineProgram::from_json(&p.to_json().unwrap()).unwrap();
        assert_eq!(back, p);
        let v: serde_json::Value = serde_json::from_str(&p.to_json().unwrap()).unwrap();
        for key in ["k", "n", "l", "f_in", "steps", "f_out"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
}
