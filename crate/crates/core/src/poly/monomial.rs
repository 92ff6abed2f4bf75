use std::cmp::Ordering;
use std::fmt;

/// Exponent vector `[e1, ..., ea]` standing for `x1^e1 * ... * xa^ea`.
///
/// Ordered graded-lexicographically: total degree first, then the exponent of
/// `x1`, then `x2`, and so on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars])
    }

    /// The monomial `x_{index+1}` (zero-based `index`).
    pub fn var(num_vars: usize, index: usize) -> Self {
        let mut exps = vec![0; num_vars];
        exps[index] = 1;
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0[index]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Variables (zero-based) with a positive exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i)
    }

    /// Re-index into `num_vars` variables, sending variable `i` to `mapping[i]`.
    pub(crate) fn remap(&self, num_vars: usize, mapping: &[usize]) -> Monomial {
        let mut exps = vec![0; num_vars];
        for (i, &e) in self.0.iter().enumerate() {
            exps[mapping[i]] += e;
        }
        Monomial(exps)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.0.len()).map(|i| format!("x{i}")).collect();
        f.write_str(&self.render(&names))
    }
}

impl Monomial {
    /// `x1^2*x3`, or `1` for the unit monomial.
    pub fn render(&self, names: &[impl AsRef<str>]) -> String {
        let factors: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    names[i].as_ref().to_string()
                } else {
                    format!("{}^{}", names[i].as_ref(), e)
                }
            })
            .collect();
        if factors.is_empty() {
            "1".to_string()
        } else {
            factors.join("*")
        }
    }
}
