use std::io::Write;

use casimir_core::dielectric::{load_optical_table, permittivity_from_table, write_optical_table, TableError};
use casimir_core::force::force_imag_axis;
use casimir_core::{DielectricModel, OpticalTable, QuadratureConfig, ReflectionModel};

const WP: f64 = 1.37e16;
const GAMMA: f64 = 5e13;

fn drude_table(lo: f64, hi: f64, n: usize) -> OpticalTable {
    let step = (hi / lo).ln() / (n - 1) as f64;
    let omega: Vec<f64> = (0..n).map(|i| lo * (step * i as f64).exp()).collect();
    let im = omega.iter().map(|&w| WP * WP * GAMMA / (w * (w * w + GAMMA * GAMMA))).collect();
    OpticalTable::new(omega, im, None).unwrap()
}

#[test]
fn kramers_kronig_reproduces_drude() {
    let table = drude_table(1e11, 1e19, 600);
    for i in 0..=20 {
        // Two decades, 1e14 .. 1e16 rad/s.
        let xi = 1e14 * 10f64.powf(i as f64 / 10.0);
        let exact = 1.0 + WP * WP / (xi * (xi + GAMMA));
        let kk = permittivity_from_table(&table, xi).unwrap();
        assert!((kk / exact - 1.0).abs() < 1e-2, "xi = {xi:e}: {kk} vs {exact}");
    }
}

#[test]
fn tabulated_force_tracks_analytic_drude() {
    let cfg = QuadratureConfig::default().with_rel_tol(1e-6);
    let tab = ReflectionModel::fresnel(DielectricModel::tabulated(drude_table(1e11, 1e19, 400)));
    let exact = ReflectionModel::fresnel(DielectricModel::drude(WP, GAMMA).unwrap());
    let a = force_imag_axis(&tab, &tab, 200e-9, &cfg).unwrap();
    let b = force_imag_axis(&exact, &exact, 200e-9, &cfg).unwrap();
    assert!((a.pressure / b.pressure - 1.0).abs() < 1e-2, "{} vs {}", a.pressure, b.pressure);
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("drude.txt");
    let table = drude_table(1e12, 1e18, 50);
    write_optical_table(&table, &path).unwrap();
    let back = load_optical_table(&path).unwrap();
    assert_eq!(back, table);
}

#[test]
fn malformed_files_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "# omega  im_eps\n1e14 2.0\n5e13 1.0\n1e15 0.5").unwrap();
    assert!(matches!(load_optical_table(&path), Err(TableError::NonMonotonic { line: 3, .. })));

    let missing = dir.path().join("nope.txt");
    match load_optical_table(&missing) {
        Err(TableError::Io { path, .. }) => assert!(path.ends_with("nope.txt")),
        other => panic!("{other:?}"),
    }
}
