//! Reconstruction of planar vector fields from partial knowledge of their
//! zeroth and first moment ray transforms.
//!
//! The measured data are the transforms `I⁰f`, `I¹f` on the lines that cross
//! the upper unit half-circle `Λ`. The field is recovered on the half-disc
//! `Ω⁺` bounded by `Λ` and the chord `L = (-1, 1)`:
//!
//! 1. boundary traces on `Λ` are reduced to negative angular Fourier modes
//!    ([`harmonics`]);
//! 2. the unknown traces on `L` are found from a Cauchy-type singular
//!    integral equation `[I - iH]v = F` for every mode ([`kernels`], [`sie`]);
//! 3. the modes are extended into `Ω⁺` with the Bukhgeim–Cauchy and area
//!    operators, differentiated on a triangulation ([`calculus`]) and turned
//!    back into the field ([`pipeline`]).
//!
//! Synthetic data for the built-in phantoms come from [`forward`].

pub mod calculus;
pub mod error;
pub mod forward;
pub mod geometry;
pub mod harmonics;
pub mod io;
pub mod kernels;
pub mod phantom;
pub mod pipeline;
pub mod quadrature;
pub mod sie;

pub use error::{Error, Result};

pub use forward::{NoiseDescriptor, Sinogram, TraceTable};
pub use geometry::{
    ArcGrid, ArcKind, ChordGrid, DirectionGrid, Neighborhoods, Triangulation, Vec2,
};
pub use harmonics::{ModeTable, Parity};
pub use phantom::{Phantom, VectorField};
pub use pipeline::{FieldOnMesh, ReconConfig, ReconMode, Reconstruction, Region};
pub use num_complex::Complex64;
