//! Worked examples: the two-variable key pairs and programs from the original
//! write-up of the scheme, kept verbatim so tests and the CLI can replay them.

use crate::automorphism::AutomorphismPair;
use crate::poly::{PolyMap, Polynomial};
use crate::program::StraightLineProgram;

fn map(names: &[&str], comps: &[&str]) -> PolyMap {
    let comps = comps
        .iter()
        .map(|c| Polynomial::parse(c, names).expect("sample polynomial parses"))
        .collect();
    PolyMap::new(names.len(), comps).expect("sample map is well formed")
}

fn pair(names: &[&str], phi: &[&str], psi: &[&str]) -> AutomorphismPair {
    AutomorphismPair::new(map(names, phi), map(names, psi)).expect("sample pair is square")
}

/// The introductory pair in `X1, X2` / `Y1, Y2`.
pub fn first_example_pair() -> AutomorphismPair {
    pair(
        &["X1", "X2"],
        &["-X1 - 3*X2 + 2*X2^2", "2*X1 + 5*X2 - 4*X2^2"],
        &["5*X1 + 3*X2 + 8*X1^2 + 8*X1*X2 + 2*X2^2", "-2*X1 - X2"],
    )
}

/// `fun1`: `(X1, X2) <- (X1 + X2, X1 * X2)` with identity input and output.
pub fn fun1() -> StraightLineProgram {
    StraightLineProgram::parse_text(FUN1_TEXT).expect("fun1 parses")
}

pub const FUN1_TEXT: &str = "\
# adds and multiplies two numbers
state x1, x2
input u1, u2
x1, x2 = x1 + x2, x1 * x2
output x1, x2
";

/// First component of the published `E(fun1)` update (the `temp1` listing,
/// with `+1664*Y1^4*Y2`).
pub const E_FUN1_TEMP1: &str = "1664*Y1^4*Y2+1728*Y1^3*Y2^2+1536*Y1^5*Y2+1280*Y1^3*Y2^3\
+362*Y1^2*Y2^2+232*Y2^4*Y1+440*Y1^3*Y2+132*Y2^3*Y1+96*Y2^5*Y1+1920*Y1^4*Y2^2\
+480*Y1^2*Y2^4+896*Y1^2*Y2^3+72*Y1^2*Y2+36*Y2^2*Y1+25*Y1*Y2+512*Y1^6+640*Y1^5\
+48*Y1^3+22*Y1^2+200*Y1^4+7*Y2^2+24*Y2^5+8*Y2^6+6*Y2^3+18*Y2^4-3*Y1-2*Y2";

/// Second component of the published `E(fun1)` update (`temp2`).
pub const E_FUN1_TEMP2: &str = "-3328*Y1^4*Y2-3456*Y1^3*Y2^2-3072*Y1^5*Y2-2560*Y1^3*Y2^3\
-724*Y1^2*Y2^2-464*Y2^4*Y1-880*Y1^3*Y2-264*Y2^3*Y1-192*Y2^5*Y1-3840*Y1^4*Y2^2\
-960*Y1^2*Y2^4-1792*Y1^2*Y2^3-120*Y1^2*Y2-60*Y2^2*Y1-39*Y1*Y2-1024*Y1^6-1280*Y1^5\
-80*Y1^3-34*Y1^2-400*Y1^4-11*Y2^2-48*Y2^5-16*Y2^6-10*Y2^3-36*Y2^4+6*Y1+4*Y2";

/// The published `E(fun1)` step as a map in `Y1, Y2`.
pub fn e_fun1_step() -> PolyMap {
    map(&["Y1", "Y2"], &[E_FUN1_TEMP1, E_FUN1_TEMP2])
}

/// Quadratic two-variable key with coefficient budget 3.
pub fn small_example_pair() -> AutomorphismPair {
    pair(
        &["X1", "X2"],
        &[
            "-X2 + X1^2 + 2*X1*X2 + X2^2 - 2*X1",
            "-2*X2 + X1^2 + 2*X1*X2 + X2^2 - 3*X1",
        ],
        &[
            "-2*X1 + X1^2 - 2*X1*X2 + X2^2 + X2",
            "3*X1 - X1^2 + 2*X1*X2 - X2^2 - 2*X2",
        ],
    )
}

/// Quadratic two-variable key with coefficient budget `10^12`.
pub fn large_example_pair() -> AutomorphismPair {
    pair(
        &["X1", "X2"],
        &[
            "-2331187*X1 + 2246855*X2 + 14309229798*X1^2 - 27583166484*X1*X2 + 13292662918*X2^2",
            "-6593429*X1 + 6354908*X2 + 40471627563*X1^2 - 78015075354*X1*X2 + 37596412283*X2^2",
        ],
        &[
            "-6354908*X1 + 2246855*X2 - 38201180309*X1^2 + 27012971828*X1*X2 - 4775380244*X2^2",
            "-6593429*X1 + 2331187*X2 - 39635004771*X1^2 + 28026863532*X1*X2 - 4954617036*X2^2",
        ],
    )
}

/// The four-variable pair printed next to the add/multiply demonstration.
/// As printed, `ψ` is not the inverse of `φ`.
pub fn appendix_printed_pair() -> AutomorphismPair {
    pair(
        &["X1", "X2", "X3", "X4"],
        &[
            "-4 - X2 - 2*X2*X4 - 2*X3*X4",
            "X4 - X1 - X3 + 1",
            "4 + X2 + 2*X2*X4 + 2*X3*X4 - X4",
            "1 + X4 - X1 - 2*X2 - 2*X3",
        ],
        &[
            "1 - 2*X2 + X4 - X1 - X3",
            "-X1 - 4 - 2*X1*X4 + 2*X1*X2 - 2*X3*X4 + 2*X2*X3",
            "X1 + 4 - X4 + X2 + 2*X1*X4 - 2*X1*X2 + 2*X3*X4 - 2*X2*X3",
            "-X1 - X3",
        ],
    )
}

/// The add/multiply program: two state slots, no steps, output
/// `(x1 + x2, x1 * x2)`.
pub fn appendix_program() -> StraightLineProgram {
    StraightLineProgram::parse_text(APPENDIX_TEXT).expect("appendix program parses")
}

pub const APPENDIX_TEXT: &str = "\
# accepts two integers and returns their sum and product
state x1, x2
input u1, u2
output x1 + x2, x1 * x2
";

/// `h(g) = (g1, g1*g2)`.
pub fn appendix_h() -> PolyMap {
    map(&["g1", "g2"], &["g1", "g1*g2"])
}

/// `H(g) = (g1 + g2, g2)` with inverse `(y1 - y2, y2)`.
pub fn appendix_big_h() -> AutomorphismPair {
    pair(&["g1", "g2"], &["g1 + g2", "g2"], &["g1 - g2", "g2"])
}

/// `K(x) = (x1 + 2*x2 + 3*x3 + 4*x4, x1 - 6*x3)`.
pub fn appendix_k() -> PolyMap {
    map(&["x1", "x2", "x3", "x4"], &["x1 + 2*x2 + 3*x3 + 4*x4", "x1 - 6*x3"])
}

/// The modified program `P'` with inputs `(u1, u2, g1, g2)`, transcribed
/// assignment by assignment (the last two run one after the other).
pub const APPENDIX_P_PRIME_TEXT: &str = "\
state x1, x2, x3, x4
input u1, u2, g1, g2 => u1 + g1, u2 + g1*g2, g1 + g2, g2
x1, x2 = x1 - x3 + x4, x2 - x3*x4 + x4*x4
x3 = x1 + 2*x2 + 3*x3 + 4*x4
x4 = x1 - 6*x3
output x1 + x2, x1 * x2
";

pub fn appendix_p_prime() -> StraightLineProgram {
    StraightLineProgram::parse_text(APPENDIX_P_PRIME_TEXT).expect("P' parses")
}

/// `fun5`, the factorial loop. Not a straight-line program.
pub const FUN5_SOURCE: &str = "\
fun5 := proc ( )
  local X1, X2, X3, temp1, temp2, temp3;
  X1 := 1;
  X2 := 1;
  temp1 := X1;
  temp2 := X2;
  while X2 < 11 do
    temp1 := temp1 * temp2;
    temp2 := X2 + 1;
    X1 := temp1;
    X2 := temp2;
  end do;
  return(X1);
end proc;
";
