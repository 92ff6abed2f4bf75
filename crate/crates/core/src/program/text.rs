//! Line-oriented text form of a straight-line program.
//!
//! ```text
//! # fun1
//! state x1, x2
//! input u1, u2 => u1, u2
//! x1, x2 = x1 + x2, x1 * x2
//! output x1, x2
//! ```
//!
//! A step line assigns a subset of the state simultaneously; slots not named
//! keep their value. A `begin` … `end` block holds sequential assignments,
//! may introduce temporaries, and compiles to a single simultaneous step.
//! `input` without `=>` binds the input names to the state slots in order.
//! Comments start with `#` or `//`.

use std::collections::HashMap;

use super::StraightLineProgram;
use crate::error::{Error, Result};
use crate::poly::{describe, tokenize, ExprParser, PolyMap, Polynomial, Spanned, Token};

/// Words that signal control flow. Rejected before any other parsing.
pub const LOOP_KEYWORDS: [&str; 13] = [
    "while", "for", "do", "if", "then", "else", "elif", "goto", "loop", "until", "repeat",
    "break", "continue",
];

const RESERVED: [&str; 5] = ["state", "input", "output", "begin", "end"];

fn strip_comment(line: &str) -> &str {
    let cut = [line.find('#'), line.find("//")]
        .into_iter()
        .flatten()
        .min()
        .unwrap_or(line.len());
    &line[..cut]
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

struct Line {
    number: usize,
    end_column: usize,
    tokens: Vec<Spanned>,
}

impl Line {
    fn column(&self, idx: usize) -> usize {
        self.tokens.get(idx).map(|t| t.column).unwrap_or(self.end_column)
    }

    fn error_at(&self, idx: usize, message: impl Into<String>) -> Error {
        parse_error(self.number, self.column(idx), message)
    }

    /// `a, b, c` up to (not including) `stop` or the end of the line.
    /// Returns the names with their token indices and the index after them.
    fn names(&self, from: usize, stop: Option<&Token>) -> Result<(Vec<(String, usize)>, usize)> {
        let mut names = Vec::new();
        let mut i = from;
        loop {
            match self.tokens.get(i).map(|t| &t.token) {
                Some(Token::Ident(name)) => {
                    names.push((name.clone(), i));
                    i += 1;
                }
                Some(t) if Some(t) == stop && names.is_empty() => return Ok((names, i)),
                None if names.is_empty() => return Ok((names, i)),
                Some(t) => return Err(self.error_at(i, format!("expected a name, found `{}`", describe(t)))),
                None => return Err(self.error_at(i, "expected a name")),
            }
            match self.tokens.get(i).map(|t| &t.token) {
                Some(Token::Comma) => i += 1,
                Some(t) if Some(t) == stop => return Ok((names, i)),
                None => return Ok((names, i)),
                Some(t) => return Err(self.error_at(i, format!("unexpected `{}`", describe(t)))),
            }
        }
    }

    fn exprs<F>(&self, from: usize, num_vars: usize, resolve: F) -> Result<Vec<Polynomial>>
    where
        F: Fn(&str) -> Option<Polynomial>,
    {
        let rest = &self.tokens[from.min(self.tokens.len())..];
        let mut parser = ExprParser::new(rest, self.number, self.end_column, num_vars, resolve);
        let out = parser.expr_list()?;
        parser.expect_end()?;
        Ok(out)
    }
}

fn check_fresh(line: &Line, names: &[(String, usize)], what: &str) -> Result<()> {
    for (j, (name, idx)) in names.iter().enumerate() {
        if RESERVED.contains(&name.as_str()) {
            return Err(line.error_at(*idx, format!("`{name}` is reserved")));
        }
        if names[..j].iter().any(|(other, _)| other == name) {
            return Err(line.error_at(*idx, format!("{what} `{name}` listed twice")));
        }
    }
    Ok(())
}

fn scan_control_flow(lines: &[Line]) -> Result<()> {
    for line in lines {
        for t in &line.tokens {
            if let Token::Ident(word) = &t.token {
                let lower = word.to_ascii_lowercase();
                if LOOP_KEYWORDS.contains(&lower.as_str()) {
                    return Err(Error::NotStraightLine {
                        line: line.number,
                        keyword: word.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

struct Block {
    opened_at: usize,
    env: HashMap<String, Polynomial>,
}

#[derive(Default)]
struct Builder {
    state: Option<Vec<String>>,
    f_in: Option<PolyMap>,
    steps: Vec<PolyMap>,
    f_out: Option<PolyMap>,
    block: Option<Block>,
}

impl Builder {
    fn state_names(&self, line: &Line) -> Result<&[String]> {
        self.state
            .as_deref()
            .ok_or_else(|| line.error_at(0, "`state` must be declared first"))
    }

    fn n(&self) -> usize {
        self.state.as_ref().map_or(0, Vec::len)
    }

    fn state_var(&self, name: &str) -> Option<Polynomial> {
        let names = self.state.as_ref()?;
        let n = names.len();
        names.iter().position(|s| s == name).map(|i| Polynomial::var(n, i))
    }

    fn line(&mut self, line: &Line) -> Result<()> {
        if self.f_out.is_some() {
            return Err(line.error_at(0, "nothing may follow `output`"));
        }
        let head = match &line.tokens[0].token {
            Token::Ident(w) => w.as_str(),
            _ => "",
        };
        match head {
            "state" => self.declare_state(line),
            "input" => self.input(line),
            "output" => self.output(line),
            "begin" => self.begin(line),
            "end" => self.end(line),
            _ => self.assignment(line),
        }
    }

    fn declare_state(&mut self, line: &Line) -> Result<()> {
        if self.state.is_some() {
            return Err(line.error_at(0, "`state` declared twice"));
        }
        let (names, _) = line.names(1, None)?;
        if names.is_empty() {
            return Err(line.error_at(1, "`state` needs at least one name"));
        }
        check_fresh(line, &names, "state variable")?;
        self.state = Some(names.into_iter().map(|(n, _)| n).collect());
        Ok(())
    }

    fn input(&mut self, line: &Line) -> Result<()> {
        let state = self.state_names(line)?.to_vec();
        if self.f_in.is_some() {
            return Err(line.error_at(0, "`input` declared twice"));
        }
        let (names, next) = line.names(1, Some(&Token::Arrow))?;
        check_fresh(line, &names, "input")?;
        let k = names.len();
        let f_in = if next < line.tokens.len() {
            let lookup = |name: &str| {
                names
                    .iter()
                    .position(|(n, _)| n == name)
                    .map(|i| Polynomial::var(k, i))
            };
            let exprs = line.exprs(next + 1, k, lookup)?;
            if exprs.len() != state.len() {
                return Err(line.error_at(
                    next,
                    format!("input map has {} expressions for {} state slots", exprs.len(), state.len()),
                ));
            }
            PolyMap::new(k, exprs)?
        } else {
            if k != state.len() {
                return Err(line.error_at(
                    1,
                    format!("{k} input names for {} state slots; use `=>` to give the input map", state.len()),
                ));
            }
            PolyMap::identity(k)
        };
        self.f_in = Some(f_in);
        Ok(())
    }

    fn output(&mut self, line: &Line) -> Result<()> {
        self.state_names(line)?;
        if self.f_in.is_none() {
            return Err(line.error_at(0, "`input` must precede `output`"));
        }
        if let Some(b) = &self.block {
            return Err(line.error_at(0, format!("block opened at line {} is not closed", b.opened_at)));
        }
        let exprs = line.exprs(1, self.n(), |name| self.state_var(name))?;
        self.f_out = Some(PolyMap::new(self.n(), exprs)?);
        Ok(())
    }

    fn begin(&mut self, line: &Line) -> Result<()> {
        let state = self.state_names(line)?.to_vec();
        if self.f_in.is_none() {
            return Err(line.error_at(0, "`input` must precede the first step"));
        }
        if self.block.is_some() {
            return Err(line.error_at(0, "blocks do not nest"));
        }
        if line.tokens.len() > 1 {
            return Err(line.error_at(1, "`begin` stands on its own line"));
        }
        let n = state.len();
        let env = state
            .into_iter()
            .enumerate()
            .map(|(i, name)| (name, Polynomial::var(n, i)))
            .collect();
        self.block = Some(Block {
            opened_at: line.number,
            env,
        });
        Ok(())
    }

    fn end(&mut self, line: &Line) -> Result<()> {
        let Some(block) = self.block.take() else {
            return Err(line.error_at(0, "`end` without `begin`"));
        };
        if line.tokens.len() > 1 {
            return Err(line.error_at(1, "`end` stands on its own line"));
        }
        let components = self
            .state
            .as_ref()
            .expect("blocks open after state")
            .iter()
            .map(|name| block.env[name].clone())
            .collect();
        self.steps.push(PolyMap::new(self.n(), components)?);
        Ok(())
    }

    fn assignment(&mut self, line: &Line) -> Result<()> {
        let state = self.state_names(line)?.to_vec();
        if self.f_in.is_none() {
            return Err(line.error_at(0, "`input` must precede the first step"));
        }
        let (targets, next) = line.names(0, Some(&Token::Assign))?;
        if targets.is_empty() || line.tokens.get(next).map(|t| &t.token) != Some(&Token::Assign) {
            return Err(line.error_at(next, "expected an assignment `names = expressions`"));
        }
        check_fresh(line, &targets, "assignment target")?;
        let n = state.len();
        let exprs = match &self.block {
            Some(block) => line.exprs(next + 1, n, |name| block.env.get(name).cloned())?,
            None => line.exprs(next + 1, n, |name| self.state_var(name))?,
        };
        if exprs.len() != targets.len() {
            return Err(line.error_at(
                next,
                format!("{} targets but {} expressions", targets.len(), exprs.len()),
            ));
        }
        match &mut self.block {
            Some(block) => {
                for ((name, _), value) in targets.into_iter().zip(exprs) {
                    block.env.insert(name, value);
                }
            }
            None => {
                let mut components = PolyMap::identity(n).into_components();
                for ((name, idx), value) in targets.iter().zip(exprs) {
                    let slot = state.iter().position(|s| s == name).ok_or_else(|| {
                        line.error_at(*idx, format!("`{name}` is not a state variable; temporaries need a begin/end block"))
                    })?;
                    components[slot] = value;
                }
                self.steps.push(PolyMap::new(n, components)?);
            }
        }
        Ok(())
    }
}

impl StraightLineProgram {
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let body = strip_comment(raw);
            let tokens = tokenize(body, i + 1)?;
            if !tokens.is_empty() {
                lines.push(Line {
                    number: i + 1,
                    end_column: body.chars().count() + 1,
                    tokens,
                });
            }
        }
        scan_control_flow(&lines)?;

        let mut builder = Builder::default();
        for line in &lines {
            builder.line(line)?;
        }
        let last = text.lines().count() + 1;
        if let Some(b) = &builder.block {
            return Err(parse_error(last, 1, format!("block opened at line {} is not closed", b.opened_at)));
        }
        let (Some(f_in), Some(f_out)) = (builder.f_in, builder.f_out) else {
            return Err(parse_error(last, 1, "a program needs `state`, `input` and `output` clauses"));
        };
        StraightLineProgram::new(f_in, builder.steps, f_out)
    }

    /// Canonical text; `parse_text` reads it back to an equal program.
    pub fn to_text(&self) -> String {
        let state = Polynomial::default_names(self.n);
        let inputs: Vec<String> = (1..=self.k).map(|i| format!("u{i}")).collect();
        let join = |items: Vec<String>| items.join(", ");
        let mut out = vec![format!("state {}", state.join(", "))];
        let f_in = join(self.f_in.components().iter().map(|p| p.render(&inputs)).collect());
        if inputs.is_empty() {
            out.push(format!("input => {f_in}"));
        } else {
            out.push(format!("input {} => {f_in}", inputs.join(", ")));
        }
        for step in &self.steps {
            let mut changed: Vec<usize> = (0..self.n)
                .filter(|&i| step.component(i) != &Polynomial::var(self.n, i))
                .collect();
            if changed.is_empty() {
                changed.push(0);
            }
            let lhs = join(changed.iter().map(|&i| state[i].clone()).collect());
            let rhs = join(changed.iter().map(|&i| step.component(i).render(&state)).collect());
            out.push(format!("{lhs} = {rhs}"));
        }
        out.push(format!(
            "output {}",
            join(self.f_out.components().iter().map(|p| p.render(&state)).collect())
        ));
        out.join("\n") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    const FUN1: &str = "# fun1\nstate x1, x2\ninput u1, u2\nx1, x2 = x1 + x2, x1 * x2\noutput x1, x2\n";

    #[test]
    fn fun1_text_runs() {
        let p = StraightLineProgram::parse_text(FUN1).unwrap();
        assert_eq!((p.k, p.n, p.l, p.steps.len()), (2, 2, 2, 1));
        assert_eq!(p.run(&ints(&[2, 3])).unwrap(), ints(&[5, 6]));
    }

    #[test]
    fn canonical_text_round_trips() {
        let p = StraightLineProgram::parse_text(FUN1).unwrap();
        let text = p.to_text();
        assert_eq!(StraightLineProgram::parse_text(&text).unwrap(), p);
        assert_eq!(StraightLineProgram::parse_text(&text).unwrap().to_text(), text);
    }

    #[test]
    fn block_compiles_to_one_step() {
        let src = "state a, b\ninput u, v\nbegin\n  t := a + b // sum\n  b := a * b\n  a := t\nend\noutput a, b\n";
        let p = StraightLineProgram::parse_text(src).unwrap();
        assert_eq!(p.steps.len(), 1);
        assert_eq!(p, StraightLineProgram::parse_text(FUN1).unwrap());
    }

    #[test]
    fn partial_assignment_keeps_other_slots() {
        let src = "state x1, x2, x3\ninput u => u, 2*u, 3\nx2 = x2 + x3\noutput x1 + x2 + x3\n";
        let p = StraightLineProgram::parse_text(src).unwrap();
        assert_eq!(p.run(&ints(&[5])).unwrap(), ints(&[5 + 13 + 3]));
        let p2 = StraightLineProgram::parse_text(&p.to_text()).unwrap();
        assert_eq!(p2, p);
    }

    #[test]
    fn no_input_program() {
        let src = "state x\ninput => 7\nx = x^2\noutput x\n";
        let p = StraightLineProgram::parse_text(src).unwrap();
        assert_eq!(p.k, 0);
        assert_eq!(p.run(&[]).unwrap(), ints(&[49]));
        assert_eq!(StraightLineProgram::parse_text(&p.to_text()).unwrap(), p);
    }

    #[test]
    fn unknown_variable_has_position() {
        let src = "state x1, x2, x3, x4\ninput u1, u2, u3, u4\nx1 = x1 + x5\noutput x1\n";
        match StraightLineProgram::parse_text(src).unwrap_err() {
            Error::Parse { line, column, message } => {
                assert_eq!((line, column), (3, 11));
                assert!(message.contains("x5"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn loop_keyword_rejected_first() {
        // The syntax error on line 1 loses to the loop on line 2.
        let src = "state x1 x2 ???\nwhile x1 < 3 do\n";
        assert_eq!(
            StraightLineProgram::parse_text(src).unwrap_err(),
            Error::NotStraightLine {
                line: 2,
                keyword: "while".into()
            }
        );
        let src = "state x\ninput u\nIF x = 1\noutput x\n";
        assert!(matches!(
            StraightLineProgram::parse_text(src).unwrap_err(),
            Error::NotStraightLine { line: 3, .. }
        ));
    }

    #[test]
    fn keyword_in_comment_is_ignored() {
        let src = "state x # while\ninput u // for\noutput x\n";
        assert!(StraightLineProgram::parse_text(src).is_ok());
    }

    #[test]
    fn structural_errors() {
        let bad = [
            "input u\nstate x\noutput x\n",
            "state x\ninput u\nbegin\nx = x\n",
            "state x\ninput u\nend\noutput x\n",
            "state x\ninput u\nt = x\noutput x\n",
            "state x, y\ninput u\noutput x\n",
            "state x\ninput u\nx, x = 1, 2\noutput x\n",
            "state x\ninput u\nx = 1, 2\noutput x\n",
            "state x\ninput u\noutput x\nx = 1\n",
            "state x\ninput u\n",
        ];
        for src in bad {
            assert!(
                matches!(StraightLineProgram::parse_text(src), Err(Error::Parse { .. })),
                "accepted: {src:?}"
            );
        }
    }
}
