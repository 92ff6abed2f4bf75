//! Tame automorphisms of `Z^n` under complexity budgets.
//!
//! Keys are compositions `φ = A_0 ∘ T_1 ∘ A_1 ∘ … ∘ T_k ∘ A_k` of sparse affine
//! maps `A_i` (products of permuted block-diagonal unimodular matrices) and
//! segmented triangular maps `T_i`, whose inverses have the same degree,
//! coefficient size and sparsity as the forward maps.

mod affine;
mod matrix;
mod pair;
mod tame;
mod triangular;
mod unimodular;

pub use affine::{gen_affine, AffineMap, AffineParams};
pub use matrix::IntMatrix;
pub use pair::{
    verify_inverse_maps, verify_inverse_pair, AutomorphismPair, Factor, FactorKind, InverseIssue,
    InverseReport,
};
pub use tame::{
    compose_factors, gen_tame, plan_tame, stage_degrees, KeyBudget, KeygenOptions, PlanBounds,
    StageBudgets, TameOutcome, TamePlan, INEQ_AVG, INEQ_COEFFS, INEQ_DEGREE, INEQ_MONOMIALS,
};
pub use triangular::{
    gen_segmented_triangular, invert_segmented_triangular, invert_triangular, Partition,
    TriangularMap, TriangularParams,
};
pub use unimodular::{
    block_diagonal, gen_block_diagonal, gen_unimodular_2x2, gen_unimodular_n,
    unimodular_completion, Unimodular,
};
