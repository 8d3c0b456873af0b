use std::fmt::Write as _;

use super::problem::{embed, SdpProblem};

/// Plain-text SDPA sparse export of the program, for cross-checking with
/// external solvers.
///
/// Variables are `x = (λ, t_1, …, t_m)` and the program reads
/// `min −λ  s.t.  Σ_i F_i x_i − F_0 ⪰ 0` on one real block of size `2k`
/// (the embedding of the complex matrix):
///
/// ```text
/// line 1      m + 1                 number of variables
/// line 2      1                     number of blocks
/// line 3      2k                    block size
/// line 4      -1 0 … 0              objective vector c
/// then        mat blk i j value     upper-triangular entries, 1-based
/// ```
///
/// with `F_0 = −embed(Γ_obs)`, `F_1 = −I` (the coefficient of `λ`) and
/// `F_{k+1} = embed(F_k)`. Values are printed with 17 significant digits
/// and zero entries are omitted.
pub fn write_sdpa(problem: &SdpProblem) -> String {
    let n = problem.embedded_dim();
    let m = problem.n_free();
    let mut out = String::new();
    let _ = writeln!(out, "{}", m + 1);
    let _ = writeln!(out, "1");
    let _ = writeln!(out, "{n}");
    let mut c = vec!["-1".to_string()];
    c.extend(std::iter::repeat_n("0".to_string(), m));
    let _ = writeln!(out, "{}", c.join(" "));
    let mut emit = |mat: usize, a: &nalgebra::DMatrix<f64>, sign: f64| {
        for i in 0..n {
            for j in i..n {
                let v = sign * a[(i, j)];
                if v != 0.0 {
                    let _ = writeln!(out, "{mat} 1 {} {} {v:.16e}", i + 1, j + 1);
                }
            }
        }
    };
    emit(0, &embed(problem.gamma_obs()), -1.0);
    emit(1, &nalgebra::DMatrix::identity(n, n), -1.0);
    for (k, f) in problem.free_dirs().iter().enumerate() {
        emit(k + 2, &embed(f), 1.0);
    }
    out
}
