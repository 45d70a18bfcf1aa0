use hypfrac::funcspace::{assemble_forms, RadialFunction, RadialGrid};
use hypfrac::io::*;
use hypfrac::kernel::{build_kernel_table, build_reduced_kernel};
use hypfrac::Error;
use nalgebra::DMatrix;
use std::fs;
use std::sync::Arc;

fn small_grid() -> Arc<RadialGrid> {
    Arc::new(RadialGrid::geometric_uniform(3, 8.0, 40).unwrap())
}

#[test]
fn kernel_csv_round_trips_every_bit() {
    let dir = tempfile::tempdir().unwrap();
    let table = build_kernel_table(3, 0.5, 1e-3, 20.0, 50).unwrap();
    let path = dir.path().join("k.csv");
    write_kernel_csv(&path, &table).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("rho,kernel_value\n"));
    assert_eq!(text.lines().count(), 51);
    let (rho, values) = read_kernel_csv(&path).unwrap();
    assert_eq!(rho, table.rho_grid);
    assert_eq!(values, table.values);
    // 17 significant digits.
    let first = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .to_string();
    assert_eq!(first.split('e').next().unwrap().replace('.', "").len(), 17);
}

#[test]
fn format_keeps_seventeen_digits() {
    for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, f64::MIN_POSITIVE] {
        assert_eq!(format_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
}

#[test]
fn profile_csv_round_trips_and_checks_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let grid = small_grid();
    let u = RadialFunction::from_fn(grid.clone(), |r| (-r * r).exp() / 3.0).unwrap();
    let path = dir.path().join("nested/u.csv");
    write_profile_csv(&path, &u).unwrap();
    assert!(fs::read_to_string(&path).unwrap().starts_with("r,u\n"));
    let back = read_profile_csv(&path, grid).unwrap();
    assert_eq!(back.values(), u.values());
    let other = Arc::new(RadialGrid::uniform(3, 8.0, 40).unwrap());
    assert!(matches!(
        read_profile_csv(&path, other),
        Err(Error::Mismatch(_))
    ));
    fs::write(&path, "rho,u\n0,1\n").unwrap();
    assert!(matches!(
        read_profile_csv(&path, small_grid()),
        Err(Error::Format { .. })
    ));
    fs::write(&path, "r,u\n0,abc\n").unwrap();
    assert!(matches!(
        read_profile_csv(&path, small_grid()),
        Err(Error::Format { .. })
    ));
    assert!(matches!(
        read_profile_csv(&dir.path().join("missing.csv"), small_grid()),
        Err(Error::Io { .. })
    ));
}

#[test]
fn matrices_round_trip_and_reject_corruption() {
    let m = DMatrix::from_fn(3, 5, |i, j| (i as f64 + 0.5).powi(j as i32) - 1e-300);
    let bytes = matrix_bytes(&m);
    assert_eq!(bytes.len(), 24 + 8 * 15);
    assert_eq!(matrix_from_bytes(&bytes).unwrap(), m);
    assert!(matrix_from_bytes(&bytes[..bytes.len() - 1]).is_err());
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(matrix_from_bytes(&bad).is_err());
    assert!(matrix_from_bytes(&[]).is_err());
}

#[test]
fn atomic_write_leaves_only_the_target() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a/b/out.json");
    write_json(&path, &vec![1.0, 2.5]).unwrap();
    write_json(&path, &vec![3.0]).unwrap();
    assert_eq!(read_json::<Vec<f64>>(&path).unwrap(), vec![3.0]);
    let names: Vec<_> = fs::read_dir(path.parent().unwrap())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(names, vec!["out.json"]);
    assert!(to_json_string(&1).unwrap().ends_with('\n'));
}

#[test]
fn grid_hash_tracks_every_input() {
    let g = small_grid();
    let h = grid_hash(3, 0.5, &g);
    assert_eq!(h.len(), 64);
    assert_eq!(h, grid_hash(3, 0.5, &small_grid()));
    assert_ne!(h, grid_hash(3, 0.25, &g));
    assert_ne!(
        h,
        grid_hash(3, 0.5, &RadialGrid::geometric_uniform(3, 8.0, 41).unwrap())
    );
    assert_ne!(
        h,
        grid_hash(3, 0.5, &RadialGrid::uniform(3, 8.0, 40).unwrap())
    );
}

#[test]
fn cache_reuses_and_rebuilds_forms() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let grid = small_grid();
    let built = cache.forms(grid.clone(), 0.5).unwrap();
    let kernel = build_reduced_kernel(3, 0.5, &grid.nonlocal_points()).unwrap();
    let direct = assemble_forms(grid.clone(), 0.5, &kernel).unwrap();
    assert_eq!(built.nonlocal, direct.nonlocal);
    assert_eq!(built.exterior, direct.exterior);

    let sidecars: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    assert_eq!(sidecars.len(), 2, "{sidecars:?}");
    let forms_side = sidecars
        .iter()
        .find(|p| p.to_string_lossy().contains("forms-"))
        .unwrap();
    let reduced_side = sidecars
        .iter()
        .find(|p| p.to_string_lossy().contains("reduced-"))
        .unwrap();
    let meta: ReducedKernelSidecar = read_json(reduced_side).unwrap();
    assert_eq!(meta.grid, grid.nonlocal_points());
    assert_eq!(meta.diagonal_model, kernel.diagonal_model);
    let loaded = cache.reduced_kernel(&grid, 0.5).unwrap();
    assert_eq!(loaded.w, kernel.w);
    // Hits come from disk: a planted matrix of the right shape is returned as is.
    let planted = DMatrix::from_element(kernel.w.nrows(), kernel.w.ncols(), 0.25);
    write_matrix(&reduced_side.with_extension("bin"), &planted).unwrap();
    assert_eq!(cache.reduced_kernel(&grid, 0.5).unwrap().w, planted);
    write_matrix(&reduced_side.with_extension("bin"), &kernel.w).unwrap();

    // A matrix file that no longer matches is detected and replaced.
    let stiffness = forms_side.with_extension("stiffness.bin");
    fs::write(&stiffness, b"garbage").unwrap();
    let again = cache.forms(grid.clone(), 0.5).unwrap();
    assert_eq!(again.stiffness, direct.stiffness);
    assert_eq!(read_matrix(&stiffness).unwrap(), direct.stiffness);

    // A sidecar with a stale hash is ignored.
    let mut meta: FormsSidecar = read_json(forms_side).unwrap();
    meta.hash = "0".repeat(64);
    write_json(forms_side, &meta).unwrap();
    let again = cache.forms(grid, 0.5).unwrap();
    assert_eq!(again.mass, direct.mass);
    let meta: FormsSidecar = read_json(forms_side).unwrap();
    assert_eq!(meta.hash, grid_hash(3, 0.5, &small_grid()));
}

#[test]
fn cache_directory_follows_the_environment() {
    std::env::set_var(CACHE_ENV, "/tmp/elsewhere");
    assert_eq!(
        Cache::from_env("fallback").dir(),
        std::path::Path::new("/tmp/elsewhere")
    );
    std::env::set_var(CACHE_ENV, "");
    assert_eq!(
        Cache::from_env("fallback").dir(),
        std::path::Path::new("fallback")
    );
    std::env::remove_var(CACHE_ENV);
    assert_eq!(
        Cache::from_env("fallback").dir(),
        std::path::Path::new("fallback")
    );
}
