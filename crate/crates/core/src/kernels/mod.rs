//! Discretized integral operators: the chord right-hand side `F_m`, the
//! Bukhgeim–Cauchy extension `B_m`, and the area operator `T_m` built on the
//! angular span integrals `Ψ_j`.

mod area;
mod cauchy;
mod psi;

pub use area::{area_first, area_modes, eval_t, t_first_at, t_modes_at};
pub use cauchy::{eval_b, eval_b_modes, eval_f, eval_f_modes, ChordData};
pub use psi::{build_psi_table, PsiRule, PsiTable, DEFAULT_Q_PSI};
