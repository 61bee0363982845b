use momenta_vt::calculus::{lsq_gradient, lsq_hessian, Weighting};
use momenta_vt::forward::{add_noise, simulate_traces, traces_to_sinograms};
use momenta_vt::geometry::{neighborhoods, triangulate_half_disc};
use momenta_vt::io::{read_sinogram, write_field, write_sinogram};
use momenta_vt::phantom::Phantom;
use momenta_vt::pipeline::{
    analytic_field, interior_trace_modes, reconstruct, relative_l2_error, simulate, ReconOptions,
};
use momenta_vt::{Complex64, ReconConfig, ReconMode, Region, Sinogram, Vec2};

fn coarse(mode: ReconMode, phantom: Phantom) -> ReconConfig {
    ReconConfig::coarse().with_mode(mode).with_phantom(phantom)
}

fn run(cfg: &ReconConfig, sin: &Sinogram) -> Vec<Vec2> {
    reconstruct(cfg, sin, &ReconOptions::default()).unwrap().field.values
}

fn max_norm(v: &[Vec2]) -> f64 {
    v.iter().map(|p| p.norm()).fold(0.0, f64::max)
}

#[test]
fn zero_data_gives_a_zero_field() {
    for mode in [ReconMode::Partial, ReconMode::Full] {
        let cfg = coarse(mode, Phantom::Experiment1);
        let sin = Sinogram::zeros(cfg.arc().unwrap(), cfg.dirs().unwrap());
        let field = run(&cfg, &sin);
        assert_eq!(field.len(), cfg.mesh().unwrap().len());
        assert_eq!(max_norm(&field), 0.0, "{mode:?}");
    }
}

#[test]
fn reconstruction_is_linear_in_the_data() {
    let (a, b) = (0.7, -1.3);
    for mode in [ReconMode::Partial, ReconMode::Full] {
        let cfg = coarse(mode, Phantom::Experiment1);
        let s1 = simulate(&cfg).unwrap();
        let s2 = simulate(&cfg.clone().with_phantom(Phantom::Experiment2)).unwrap();
        let mixed = run(&cfg, &s1.combine(a, &s2, b).unwrap());
        let (r1, r2) = (run(&cfg, &s1), run(&cfg, &s2));
        let combo: Vec<Vec2> = r1.iter().zip(&r2).map(|(&u, &v)| a * u + b * v).collect();
        let (mut num, mut den) = (0.0, 0.0);
        for (m, c) in mixed.iter().zip(&combo) {
            num += (*m - *c).norm_sq();
            den += c.norm_sq();
        }
        let gap = (num / den).sqrt();
        assert!(gap < 1e-6, "{mode:?}: relative gap {gap:.2e}");
    }
}

#[test]
fn repeated_runs_are_bit_identical() {
    let cfg = coarse(ReconMode::Partial, Phantom::Experiment2);
    let sin = add_noise(&simulate(&cfg).unwrap(), 0.05, 9).unwrap();
    let again = add_noise(&simulate(&cfg).unwrap(), 0.05, 9).unwrap();
    assert_eq!(sin.i0(), again.i0());
    assert_eq!(sin.i1(), again.i1());
    let f1 = reconstruct(&cfg, &sin, &ReconOptions::default()).unwrap().field;
    let f2 = reconstruct(&cfg, &again, &ReconOptions::default()).unwrap().field;
    let bits = |v: &[Vec2]| v.iter().flat_map(|p| [p.x.to_bits(), p.y.to_bits()]).collect::<Vec<_>>();
    assert_eq!(bits(&f1.values), bits(&f2.values));
}

#[test]
fn file_round_trip_is_bit_exact() {
    let cfg = coarse(ReconMode::Partial, Phantom::Experiment1);
    let sin = simulate(&cfg).unwrap();
    let mut buf = Vec::new();
    write_sinogram(&sin, &mut buf).unwrap();
    let back = read_sinogram(buf.as_slice()).unwrap();
    let direct = reconstruct(&cfg, &sin, &ReconOptions::default()).unwrap().field;
    let loaded = reconstruct(&cfg, &back, &ReconOptions::default()).unwrap().field;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    write_field(&direct, &mut a).unwrap();
    write_field(&loaded, &mut b).unwrap();
    assert!(a == b);
}

#[test]
fn checkpoints_resume_to_the_same_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = coarse(ReconMode::Partial, Phantom::Experiment1);
    let sin = simulate(&cfg).unwrap();
    let opts = ReconOptions {
        checkpoint_dir: Some(dir.path().to_path_buf()),
    };
    let first = reconstruct(&cfg, &sin, &opts).unwrap();
    let second = reconstruct(&cfg, &sin, &opts).unwrap();
    assert_eq!(first.field.values, second.field.values);
    let resumed = second
        .diagnostics
        .iter()
        .filter(|d| d.metrics.get("resumed") == Some(&1.0))
        .count();
    assert!(resumed >= 4, "{resumed} stages resumed");
    // other data must not reuse the checkpoints
    let other = simulate(&cfg.clone().with_phantom(Phantom::Experiment2)).unwrap();
    let third = reconstruct(&cfg, &other, &opts).unwrap();
    assert!(third.diagnostics.iter().all(|d| !d.metrics.contains_key("resumed")));
}

#[test]
fn grids_must_match_the_configuration() {
    let cfg = coarse(ReconMode::Partial, Phantom::Experiment1);
    let sin = simulate(&cfg).unwrap();
    let err = reconstruct(&cfg.clone().with_mode(ReconMode::Full), &sin, &ReconOptions::default());
    assert!(matches!(err, Err(momenta_vt::Error::GridMismatch(_))));
    let mut wrong = cfg.clone();
    wrong.n = 2 * cfg.n;
    assert!(matches!(
        reconstruct(&wrong, &sin, &ReconOptions::default()),
        Err(momenta_vt::Error::GridMismatch(_))
    ));
}

#[test]
fn potential_part_leaves_no_zeroth_moment() {
    let cfg = coarse(ReconMode::Full, Phantom::Experiment1);
    let arc = cfg.arc().unwrap();
    let dirs = cfg.dirs().unwrap();
    let full = simulate_traces(&Phantom::Experiment1, &arc, &dirs, 32).unwrap();
    let sol = simulate_traces(&Phantom::Solenoidal, &arc, &dirs, 32).unwrap();
    let gap = full
        .v0()
        .iter()
        .zip(sol.v0())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(gap < 1e-8, "{gap:.2e}");
    let sin = traces_to_sinograms(&full, &arc, &dirs).unwrap();
    let grad = simulate(&cfg.clone().with_phantom(Phantom::Gradient)).unwrap();
    assert!(sin.i0().len() == grad.i0().len());
    assert!(grad.i0().iter().all(|v| v.abs() < 1e-8));
}

#[test]
fn differentiation_of_exact_modes_recovers_the_field() {
    // per-component floor from exact trace modes on the paper-size mesh
    let mesh = triangulate_half_disc(0.0766).unwrap();
    let whole = mesh.reflected().unwrap();
    let dirs = momenta_vt::geometry::DirectionGrid::new(360).unwrap();
    let f = |p: Vec2| Vec2::new((2.0 * p.x).sin() * p.y.cos(), (p.x * p.y).cos() - 1.0);
    let points = whole.centroids().to_vec();
    let (v0, v1) = interior_trace_modes(&f, &points, &dirs, 2, 32).unwrap();
    let nb = neighborhoods(&whole, 0.15).unwrap();
    let g = lsq_gradient(&whole, &nb, &v0.column(0), Weighting::Uniform).unwrap();
    let h = lsq_hessian(&whole, &nb, &v1.column(0), Weighting::Uniform).unwrap();
    let f1 = momenta_vt::calculus::assemble_f1(&momenta_vt::calculus::DerivativeBundle { v0: g, v1: h });
    let values: Vec<Vec2> = momenta_vt::calculus::assemble_field(&f1)
        .into_iter()
        .take(mesh.len())
        .collect();
    let rec = momenta_vt::FieldOnMesh::new(&mesh, values, momenta_vt::pipeline::Provenance::Reconstructed).unwrap();
    let truth = analytic_field(&f, &mesh);
    let inner = Region::Upper;
    let err = relative_l2_error(&rec, &truth, inner).unwrap();
    assert!(err < 0.10, "{err:.3}");
}

#[test]
fn partial_errors_concentrate_near_the_chord() {
    let cfg = coarse(ReconMode::Partial, Phantom::Experiment1);
    let sin = simulate(&cfg).unwrap();
    let rec = reconstruct(&cfg, &sin, &ReconOptions::default()).unwrap();
    let truth = analytic_field(&cfg.phantom, &rec.mesh);
    let all = relative_l2_error(&rec.field, &truth, Region::All).unwrap();
    let up = relative_l2_error(&rec.field, &truth, Region::Upper).unwrap();
    assert!(up < all, "upper {up:.3} vs all {all:.3}");
    assert!(all.is_finite() && all < 1.0);
    let residuals: Vec<f64> = rec
        .diagnostics
        .iter()
        .filter_map(|d| d.metrics.get("max_residual").copied())
        .collect();
    assert_eq!(residuals.len(), 2);
    assert!(residuals.iter().all(|&r| r < 1e-9), "{residuals:?}");
}

#[test]
fn full_mode_stage_tables_cover_the_whole_disc() {
    let cfg = coarse(ReconMode::Full, Phantom::Experiment1);
    let sin = simulate(&cfg).unwrap();
    let rec = reconstruct(&cfg, &sin, &ReconOptions::default()).unwrap();
    let half = cfg.mesh().unwrap().len();
    assert_eq!(rec.field.len(), half);
    assert_eq!(rec.stages.v0_interior.points(), 2 * half);
    assert_eq!(rec.stages.v1_first.len(), 2 * half);
    assert!(rec.stages.v0_chord.is_none() && rec.stages.v1_chord.is_none());
    let z = rec.stages.v1_first.iter().fold(Complex64::new(0.0, 0.0), |a, v| a + v);
    assert!(z.is_finite());
}
