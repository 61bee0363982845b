//! Shared inputs for the kernel benchmarks.

use momenta_vt::{ArcGrid, ArcKind, ChordGrid, Complex64, ModeTable, Parity};

/// Mode table with a smooth, deterministic pattern.
pub fn smooth_table(parity: Parity, order: usize, points: usize) -> ModeTable {
    let mut t = ModeTable::zeros(parity, order, points);
    for i in 0..points {
        for p in 0..order {
            let a = (i as f64 * 0.013 + p as f64 * 0.7).sin() / (1.0 + p as f64);
            t.set(i, p, Complex64::new(a, 0.5 * a));
        }
    }
    t
}

/// Arc and chord grids of the published setup.
pub fn paper_grids() -> (ArcGrid, ChordGrid) {
    (
        ArcGrid::uniform(ArcKind::UpperHalf, 720).expect("arc grid"),
        ChordGrid::new(458, 1.0).expect("chord grid"),
    )
}
