//! The eigenvalue-maximization program `max λ s.t. Γ(t) − λ·1 ⪰ 0` over the
//! free directions of a moment-matrix template, its interior-point solver,
//! certificate verification and a plain-text export.
//!
//! The program is posed in real-symmetric standard form on the embedding
//! `H ↦ [[Re H, −Im H], [Im H, Re H]]`:
//!
//! ```text
//! primal:  min ⟨C, X⟩   s.t.  ⟨I, X⟩ = 1,  ⟨F̂_k, X⟩ = 0,  X ⪰ 0
//! dual:    max y₀       s.t.  C − y₀·I + Σ_k y_k F̂_k ⪰ 0
//! ```
//!
//! with `C` the embedded `Γ_obs` and `F̂_k = F_k / ‖F_k‖`. The dual variable
//! `y₀` is `λ` and `t_k = y_k / ‖F_k‖`; the primal matrix `X` compresses to
//! the complex dual certificate `Z = (X₁₁ + X₂₂) + i(X₂₁ − X₁₂)` with
//! `Z ⪰ 0`, `Tr Z = 1`, `Tr[Z F_k] = 0` and `β = Tr[Z Γ_obs] ≥ λ⋆`.

mod certify;
mod ipm;
mod problem;
mod sdpa;

pub use certify::{certify, Certificate};
pub use ipm::{solve, SdpSolution, SolveStatus};
pub use problem::{compress, embed, SdpProblem};
pub use sdpa::write_sdpa;
