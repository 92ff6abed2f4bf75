use super::TransformedProgram;
use crate::poly::Polynomial;

/// Listing of a transformed program in the program text format. Each step
/// becomes a `begin` … `end` block that computes `Y1new, …` from the old
/// state and then copies them back, so the text parses to an equivalent
/// program.
pub fn emit_pseudocode(tp: &TransformedProgram) -> String {
    let p = &tp.program;
    let n = p.n;
    let state: Vec<String> = (1..=n).map(|i| format!("Y{i}")).collect();
    let inputs: Vec<String> = (1..=n).map(|i| format!("w{i}")).collect();
    let mut out = vec![
        format!(
            "# encrypted program, scheme version {}, {} plaintext of {} state slots",
            tp.scheme.version, tp.scheme.m, n
        ),
        format!("# key {}", tp.scheme.key_fingerprint),
        format!("state {}", state.join(", ")),
        format!("input {}  # y <- w", inputs.join(", ")),
    ];
    if p.steps.is_empty() {
        out.push("# no computation steps".into());
    }
    for (s, step) in p.steps.iter().enumerate() {
        let changed: Vec<usize> = (0..n)
            .filter(|&i| step.component(i) != &Polynomial::var(n, i))
            .collect();
        out.push(format!("# step {}", s + 1));
        if changed.is_empty() {
            out.push(format!("{0} = {0}", state[0]));
            continue;
        }
        out.push("begin".into());
        for &i in &changed {
            out.push(format!("  {}new = {}", state[i], step.component(i).render(&state)));
        }
        for &i in &changed {
            out.push(format!("  {0} = {0}new", state[i]));
        }
        out.push("end".into());
    }
    out.push(format!("output {}  # z <- y", state.join(", ")));
    out.join("\n") + "\n"
}
