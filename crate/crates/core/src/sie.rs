//! The discrete chord equation `[I − iH_s]V = b`, one right-hand side per
//! mode, solved with a single shared LU factorization.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, LU};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::geometry::ChordGrid;
use crate::harmonics::ModeTable;
use crate::{Error, Result};

/// Bound on `‖Av − b‖∞ / (‖b‖∞ + ε)` accepted from a solve.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

/// Dense `J × J` matrix with `A_jj = 1`, `A_jℓ = −(i/π) Δx/(x_j − x_ℓ)`, and
/// its factorization. `A` is Hermitian.
#[derive(Debug, Clone)]
pub struct HilbertSystem {
    chord: ChordGrid,
    matrix: DMatrix<Complex64>,
    lu: LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    tikhonov: f64,
}

/// Solutions of all modes with the relative residual of each solve.
#[derive(Debug, Clone)]
pub struct ChordSolution {
    pub modes: ModeTable,
    pub residuals: Vec<f64>,
}

impl ChordSolution {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

pub fn hilbert_matrix(chord: &ChordGrid) -> DMatrix<Complex64> {
    let j = chord.len();
    let dx = chord.step();
    let x = chord.nodes();
    DMatrix::from_fn(j, j, |a, b| {
        if a == b {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, -dx / (PI * (x[a] - x[b])))
        }
    })
}

/// Assembles and factors the system for `chord`.
pub fn assemble(chord: &ChordGrid) -> Result<HilbertSystem> {
    HilbertSystem::new(chord, 0.0)
}

impl HilbertSystem {
    /// With `tikhonov = λ > 0` the solves use `(AᴴA + λI)v = Aᴴb` instead.
    pub fn new(chord: &ChordGrid, tikhonov: f64) -> Result<Self> {
        if !(tikhonov >= 0.0) || !tikhonov.is_finite() {
            return Err(Error::invalid(format!("Tikhonov parameter must be >= 0, got {tikhonov}")));
        }
        let matrix = hilbert_matrix(chord);
        let lhs = if tikhonov > 0.0 {
            let mut n = matrix.adjoint() * &matrix;
            for d in 0..n.nrows() {
                n[(d, d)] += tikhonov;
            }
            n
        } else {
            matrix.clone()
        };
        let lu = lhs.lu();
        if !lu.is_invertible() {
            return Err(Error::SingularSystem);
        }
        Ok(HilbertSystem {
            chord: chord.clone(),
            matrix,
            lu,
            tikhonov,
        })
    }

    pub fn chord(&self) -> &ChordGrid {
        &self.chord
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn tikhonov(&self) -> f64 {
        self.tikhonov
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (&self.matrix * DVector::from_column_slice(v)).as_slice().to_vec()
    }

    /// Relative residual `‖Av − b‖∞ / (‖b‖∞ + ε)`.
    pub fn residual(&self, v: &[Complex64], b: &[Complex64]) -> f64 {
        let av = self.apply(v);
        let num = av.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        let den = b.iter().map(|y| y.norm()).fold(0.0, f64::max);
        num / (den + f64::MIN_POSITIVE)
    }

    /// Solves one right-hand side, returning the solution and its residual.
    pub fn solve(&self, b: &[Complex64]) -> Result<(Vec<Complex64>, f64)> {
        if b.len() != self.chord.len() {
            return Err(Error::GridMismatch(format!(
                "right-hand side has {} entries for {} chord nodes",
                b.len(),
                self.chord.len()
            )));
        }
        let rhs = DVector::from_column_slice(b);
        let rhs = if self.tikhonov > 0.0 {
            self.matrix.adjoint() * rhs
        } else {
            rhs
        };
        let v = self.lu.solve(&rhs).ok_or(Error::SingularSystem)?;
        let v = v.as_slice().to_vec();
        let r = self.residual(&v, b);
        Ok((v, r))
    }

    /// Solves every mode of `rhs` (a table on the chord nodes). Without
    /// regularization a residual above [`RESIDUAL_TOLERANCE`] is an error.
    pub fn solve_modes(&self, rhs: &ModeTable) -> Result<ChordSolution> {
        if rhs.points() != self.chord.len() {
            return Err(Error::GridMismatch(format!(
                "right-hand side table has {} rows for {} chord nodes",
                rhs.points(),
                self.chord.len()
            )));
        }
        let columns = (0..rhs.order())
            .into_par_iter()
            .map(|p| self.solve(&rhs.column(p)))
            .collect::<Result<Vec<_>>>()?;
        let mut modes = ModeTable::zeros(rhs.parity(), rhs.order(), rhs.points());
        let mut residuals = Vec::with_capacity(columns.len());
        for (p, (v, r)) in columns.into_iter().enumerate() {
            if self.tikhonov == 0.0 && !(r < RESIDUAL_TOLERANCE) {
                return Err(Error::ResidualBreach {
                    mode: rhs.parity().mode(p),
                    residual: r,
                });
            }
            for (l, value) in v.into_iter().enumerate() {
                modes.set(l, p, value);
            }
            residuals.push(r);
        }
        Ok(ChordSolution { modes, residuals })
    }

    pub fn condition_number(&self) -> f64 {
        hermitian_condition(&self.matrix)
    }
}

/// 2-norm condition number of a Hermitian matrix, from its real eigenvalues.
fn hermitian_condition(a: &DMatrix<Complex64>) -> f64 {
    let eig = a.clone().symmetric_eigenvalues();
    let (lo, hi) = eig
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &l| (lo.min(l.abs()), hi.max(l.abs())));
    hi / lo
}

/// Condition number of the chord system with `j` nodes on `(-1, 1)`.
pub fn condition_number(j: usize) -> Result<f64> {
    Ok(hermitian_condition(&hilbert_matrix(&ChordGrid::new(j, 1.0)?)))
}

/// Least-squares fit of `y = a·x^p` on log–log axes; returns `(p, a)`.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 || x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return Err(Error::invalid("power-law fit needs at least two positive pairs"));
    }
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let p = sxy / sxx;
    Ok((p, (my - p * mx).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::Parity;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn random(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        let mut u = || 2.0 * (rng.next_u64() as f64 / u64::MAX as f64) - 1.0;
        (0..n).map(|_| Complex64::new(u(), u())).collect()
    }

    #[test]
    fn two_node_matrix() {
        let sys = assemble(&ChordGrid::new(2, 1.0).unwrap()).unwrap();
        let a = sys.matrix();
        assert!((a[(0, 1)] - Complex64::new(0.0, 1.0 / PI)).norm() < 1e-15);
        assert!((a[(1, 0)] - Complex64::new(0.0, -1.0 / PI)).norm() < 1e-15);
        assert_eq!(a[(0, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn structure() {
        let a = hilbert_matrix(&ChordGrid::new(37, 0.8).unwrap());
        for j in 0..37 {
            assert_eq!(a[(j, j)], Complex64::new(1.0, 0.0));
            for l in 0..37 {
                if l != j {
                    assert_eq!(a[(j, l)], -a[(l, j)]);
                    assert_eq!(a[(j, l)], a[(l, j)].conj());
                }
            }
        }
    }

    #[test]
    fn solves_recover_inputs() {
        let chord = ChordGrid::new(64, 1.0).unwrap();
        let sys = assemble(&chord).unwrap();
        let zero = sys.solve(&vec![Complex64::new(0.0, 0.0); 64]).unwrap().0;
        assert!(zero.iter().all(|v| v.norm() == 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut rhs = ModeTable::zeros(Parity::Even, 3, 64);
        let ws: Vec<Vec<Complex64>> = (0..3).map(|_| random(&mut rng, 64)).collect();
        for (p, w) in ws.iter().enumerate() {
            for (l, v) in sys.apply(w).into_iter().enumerate() {
                rhs.set(l, p, v);
            }
        }
        let sol = sys.solve_modes(&rhs).unwrap();
        assert!(sol.max_residual() < RESIDUAL_TOLERANCE);
        for (p, w) in ws.iter().enumerate() {
            let got = sol.modes.column(p);
            let err = got.iter().zip(w).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            let scale = w.iter().map(|v| v.norm()).fold(0.0, f64::max);
            assert!(err / scale < 1e-9);
        }
    }

    #[test]
    fn mode_order_is_irrelevant() {
        let chord = ChordGrid::new(40, 1.0).unwrap();
        let sys = assemble(&chord).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cols: Vec<Vec<Complex64>> = (0..4).map(|_| random(&mut rng, 40)).collect();
        let forward = ModeTable::from_rows(
            Parity::Odd,
            4,
            (0..40).map(|l| cols.iter().map(|c| c[l]).collect()).collect(),
        )
        .unwrap();
        let reversed = ModeTable::from_rows(
            Parity::Odd,
            4,
            (0..40).map(|l| cols.iter().rev().map(|c| c[l]).collect()).collect(),
        )
        .unwrap();
        let a = sys.solve_modes(&forward).unwrap().modes;
        let b = sys.solve_modes(&reversed).unwrap().modes;
        for p in 0..4 {
            assert_eq!(a.column(p), b.column(3 - p));
        }
    }

    #[test]
    fn tikhonov_shrinks() {
        let chord = ChordGrid::new(32, 1.0).unwrap();
        let plain = assemble(&chord).unwrap();
        let reg = HilbertSystem::new(&chord, 0.5).unwrap();
        let b = vec![Complex64::new(1.0, 0.0); 32];
        let n = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        assert!(n(&reg.solve(&b).unwrap().0) < n(&plain.solve(&b).unwrap().0));
        assert!(HilbertSystem::new(&chord, -1.0).is_err());
    }

    #[test]
    fn conditioning_grows_linearly() {
        let js = [64.0, 128.0, 256.0, 512.0];
        let conds: Vec<f64> = js.iter().map(|&j| condition_number(j as usize).unwrap()).collect();
        let (p, _) = fit_power_law(&js, &conds).unwrap();
        eprintln!("condition numbers {conds:?}, exponent {p}");
        assert!((p - 1.0).abs() <= 0.3, "exponent {p}");
    }

    #[test]
    fn power_law_fit() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(1.5)).collect();
        let (p, a) = fit_power_law(&x, &y).unwrap();
        assert!((p - 1.5).abs() < 1e-12 && (a - 3.0).abs() < 1e-12);
    }
}
