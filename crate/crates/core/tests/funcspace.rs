use hypfrac::funcspace::*;
use hypfrac::kernel::build_reduced_kernel;
use hypfrac::specfun::{integrate, QuadOptions};
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn forms_for(dim: usize, s: f64, nodes: usize) -> QuadraticForms {
    let grid = Arc::new(RadialGrid::geometric_uniform(dim, DEFAULT_R_MAX, nodes).unwrap());
    let kernel = build_reduced_kernel(dim, s, &grid.nonlocal_points()).unwrap();
    assemble_forms(grid, s, &kernel).unwrap()
}

/// Default forms for N = 3, s = 1/2.
fn forms3() -> &'static QuadraticForms {
    static F: OnceLock<QuadraticForms> = OnceLock::new();
    F.get_or_init(|| forms_for(3, 0.5, DEFAULT_NODES))
}

fn func(f: &QuadraticForms, g: impl Fn(f64) -> f64) -> RadialFunction {
    RadialFunction::from_fn(f.grid.clone(), g).unwrap()
}

fn gaussian(c: f64, w: f64) -> impl Fn(f64) -> f64 {
    move |r| (-((r - c) / w).powi(2)).exp()
}

/// `Σ|Aᵢⱼ|`, the natural scale of `uᵀAu` for `|u| ≤ 1`.
fn abs_sum(a: &nalgebra::DMatrix<f64>) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}

#[test]
fn grid_validation() {
    assert!(RadialGrid::new(3, vec![0.0, 1.0]).is_err());
    assert!(RadialGrid::new(3, vec![0.1, 1.0, 2.0]).is_err());
    assert!(RadialGrid::new(3, vec![0.0, 1.0, 1.0]).is_err());
    assert!(RadialGrid::new(1, vec![0.0, 1.0, 2.0]).is_err());
    assert!(RadialGrid::uniform(3, -1.0, 10).is_err());
    let g = RadialGrid::default_for(3).unwrap();
    assert_eq!(g.len(), DEFAULT_NODES);
    assert_eq!(g.nodes()[0], 0.0);
    assert_eq!(g.r_max(), DEFAULT_R_MAX);
    assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
    assert!(g.nodes()[1] < 2e-3, "dense near the origin");
    assert!(g.weights().iter().all(|w| *w > 0.0));
    let r = g.refined();
    assert_eq!(r.len(), 2 * g.len() - 1);
}

#[test]
fn weights_are_dual_cell_volumes() {
    // 4π(sinh(2r)/4 − r/2) is the volume of the geodesic ball in H³.
    let vol = |r: f64| {
        if r == 0.0 {
            0.0
        } else if r < 0.5 {
            // Series of sinh(2r)/4 − r/2, free of cancellation.
            let (mut term, mut sum, mut k): (f64, f64, f64) =
                (2.0 * r * (2.0 * r) * (2.0 * r) / 24.0, 0.0, 3.0);
            while term > 1e-20 * sum || sum == 0.0 {
                sum += term;
                term *= (2.0 * r) * (2.0 * r) / ((k + 1.0) * (k + 2.0));
                k += 2.0;
            }
            4.0 * PI * sum
        } else {
            4.0 * PI * ((2.0 * r).sinh() / 4.0 - r / 2.0)
        }
    };
    let g = RadialGrid::geometric_uniform(3, 6.0, 200).unwrap();
    let n = g.nodes();
    for k in 0..g.len() {
        let lo = if k == 0 { 0.0 } else { 0.5 * (n[k - 1] + n[k]) };
        let hi = if k + 1 == g.len() {
            n[k]
        } else {
            0.5 * (n[k] + n[k + 1])
        };
        let exact = vol(hi) - vol(lo);
        assert!(rel(g.weights()[k], exact) < 1e-10, "node {k}");
    }
    let total: f64 = g.weights().iter().sum();
    assert!(rel(total, vol(6.0)) < 1e-12);
    assert!(rel(ball_volume(3, 6.0), vol(6.0)) < 1e-12);
}

#[test]
fn mass_of_hat_functions_matches_direct_quadrature() {
    let f = forms3();
    let n = f.grid.nodes();
    let hat = |k: usize, r: f64| {
        if k > 0 && r >= n[k - 1] && r <= n[k] {
            (r - n[k - 1]) / (n[k] - n[k - 1])
        } else if k + 1 < n.len() && r >= n[k] && r <= n[k + 1] {
            (n[k + 1] - r) / (n[k + 1] - n[k])
        } else {
            0.0
        }
    };
    let opts = QuadOptions::relative(1e-14);
    for k in [0, 1, 17, 150, 500, 798] {
        // ∫(φ_k + φ_{k+1})² over the support, split at the nodes.
        let g = |r: f64| (hat(k, r) + hat(k + 1, r)).powi(2) * r.sinh().powi(2);
        let lo = if k == 0 { 0.0 } else { n[k - 1] };
        let hi = n[(k + 2).min(n.len() - 1)];
        let mut direct = 0.0;
        let mut a = lo;
        for &b in n.iter().filter(|&&x| x > lo && x <= hi) {
            direct += integrate(g, a, b, &opts).unwrap().value;
            a = b;
        }
        direct *= 4.0 * PI;
        let mut e = vec![0.0; n.len()];
        e[k] = 1.0;
        e[k + 1] = 1.0;
        assert!(rel(quadratic(&f.mass, &e), direct) < 1e-10, "node {k}");
    }
}

#[test]
fn constants_are_annihilated() {
    let f = forms3();
    let one = vec![1.0; f.grid.len()];
    assert!(quadratic(&f.stiffness, &one).abs() <= 1e-13 * abs_sum(&f.stiffness));
    assert!(quadratic(&f.nonlocal, &one).abs() <= 1e-13 * abs_sum(&f.nonlocal));
    // The zero extension of a constant jumps at R, so the full seminorm is positive.
    let u = func(f, |_| 1.0);
    assert!(seminorm_s_sq(&u, f).unwrap() > 0.0);
}

#[test]
fn forms_are_symmetric_and_semidefinite() {
    for (dim, s) in [(3, 0.5), (2, 0.25), (4, 0.75)] {
        let f = if (dim, s) == (3, 0.5) {
            forms3().clone()
        } else {
            forms_for(dim, s, 120)
        };
        assert_eq!(f.asymmetry(), 0.0, "N={dim} s={s}");
        for (name, a) in [
            ("stiffness", &f.stiffness),
            ("nonlocal", &f.nonlocal),
            ("exterior", &f.exterior),
        ] {
            let min = QuadraticForms::min_eigenvalue(a);
            assert!(min >= -1e-10 * a.amax(), "{name} N={dim} s={s}: {min}");
        }
        assert!(f.mass.diagonal().iter().all(|w| *w > 0.0));
    }
}

#[test]
fn mismatched_kernel_is_rejected() {
    let grid = Arc::new(RadialGrid::uniform(3, 5.0, 20).unwrap());
    let other = RadialGrid::uniform(3, 5.0, 21).unwrap();
    let k = build_reduced_kernel(3, 0.5, &other.nonlocal_points()).unwrap();
    assert!(assemble_forms(grid.clone(), 0.5, &k).is_err());
    let k = build_reduced_kernel(3, 0.5, &grid.nonlocal_points()).unwrap();
    assert!(assemble_forms(grid.clone(), 0.25, &k).is_err());
    let grid2 = Arc::new(RadialGrid::uniform(4, 5.0, 20).unwrap());
    assert!(assemble_forms(grid2, 0.5, &k).is_err());
}

#[test]
fn norm_lambda_basic_cases() {
    let f = forms3();
    let zero = RadialFunction::zeros(f.grid.clone());
    assert_eq!(norm_lambda_sq(&zero, 0.3, f).unwrap(), 0.0);
    let u = func(f, gaussian(0.0, 1.0));
    assert_eq!(
        norm_lambda_sq(&u, 0.0, f).unwrap(),
        dirichlet_energy(&u, f).unwrap()
    );
    assert!(norm_lambda_sq(&u, 1.0, f).is_err());
    assert!(norm_lambda_sq(&u, 2.0, f).is_err());
    assert!(norm_lambda_sq(&u, f64::NAN, f).is_err());
    assert_eq!(spectral_bottom(3), 1.0);
}

#[test]
fn spectral_bottom_bounds_rayleigh_quotients() {
    let f = forms3();
    let r_max = f.grid.r_max();
    let bottom = spectral_bottom(3);
    let family: Vec<Box<dyn Fn(f64) -> f64>> = vec![
        Box::new(move |r| {
            if r == 0.0 {
                PI / r_max
            } else {
                (PI * r / r_max).sin() / r.sinh()
            }
        }),
        Box::new(gaussian(0.0, 1.0)),
        Box::new(gaussian(3.0, 1.0)),
        Box::new(gaussian(8.0, 3.0)),
        Box::new(move |r| (1.0 - r / r_max) * (-r).exp()),
    ];
    let mut best = f64::INFINITY;
    for g in &family {
        let u = func(f, g);
        let q = dirichlet_energy(&u, f).unwrap() / quadratic(&f.mass, u.values());
        assert!(q >= bottom * (1.0 - 0.02), "{q}");
        best = best.min(q);
    }
    // sin(πr/R)/sinh r has quotient 1 + π²/R².
    assert!(
        best < bottom * (1.0 + 1.5 * PI * PI / (r_max * r_max)),
        "{best}"
    );
}

#[test]
fn norm_lambda_positive_near_bottom() {
    let f = forms3();
    let lambda = 0.9 * spectral_bottom(3);
    let mut rng = 0x9e3779b97f4a7c15u64;
    for _ in 0..20 {
        let mut next = || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            (rng >> 11) as f64 / (1u64 << 53) as f64
        };
        let (c, w, a) = (next() * 15.0, 0.3 + 4.0 * next(), next() - 0.5);
        let r_max = f.grid.r_max();
        let u = func(f, |r| {
            (gaussian(c, w)(r) + a * gaussian(0.0, 2.0)(r)) * (1.0 - r / r_max)
        });
        assert!(norm_lambda_sq(&u, lambda, f).unwrap() > 0.0);
    }
}

#[test]
fn embedding_constant_over_gaussian_bumps() {
    for (dim, s) in [(3, 0.5), (3, 0.25), (2, 0.5)] {
        let f = if (dim, s) == (3, 0.5) {
            forms3().clone()
        } else {
            forms_for(dim, s, 200)
        };
        let mut worst: f64 = 0.0;
        for c in [0.0, 1.0, 3.0, 6.0] {
            for w in [0.3, 1.0, 2.0] {
                let u = func(&f, gaussian(c, w));
                let ratio = seminorm_s_sq(&u, &f).unwrap() / dirichlet_energy(&u, &f).unwrap();
                assert!(ratio.is_finite() && ratio > 0.0);
                worst = worst.max(ratio);
            }
        }
        println!("N={dim} s={s}: [u]²_s ≤ {worst:.4}·‖∇u‖²");
        assert!(worst < 10.0, "N={dim} s={s}: {worst}");
    }
}

#[test]
fn separated_bumps_cross_term_matches_direct_quadrature() {
    // For disjoint supports, [u+v]² − [u]² − [v]² = −4∫∫u(r₁)v(r₂)M dr₁dr₂.
    let f = forms3();
    let kernel = build_reduced_kernel(3, 0.5, &[1.0, 2.0]).unwrap();
    let model = kernel.model();
    let bump = |c: f64| {
        move |r: f64| {
            if (r - c).abs() < 0.5 {
                (PI * (r - c)).cos().powi(2)
            } else {
                0.0
            }
        }
    };
    let mut last = f64::INFINITY;
    for d in [1.5, 2.5, 4.0, 6.0] {
        let (u, v) = (func(f, bump(1.0)), func(f, bump(1.0 + d)));
        let w = func(f, |r| bump(1.0)(r) + bump(1.0 + d)(r));
        let cross = seminorm_s_sq(&w, f).unwrap()
            - seminorm_s_sq(&u, f).unwrap()
            - seminorm_s_sq(&v, f).unwrap();
        // Oracle: 8-point Gauss on every pair of grid cells of the supports,
        // applied to the piecewise-linear interpolants.
        let (x, wt) = hypfrac::specfun::gauss_legendre(8);
        let n = f.grid.nodes();
        let points = |lo: f64, hi: f64| -> Vec<(f64, f64)> {
            n.windows(2)
                .filter(|c| c[1] > lo && c[0] < hi)
                .flat_map(|c| {
                    let (m, h) = (0.5 * (c[0] + c[1]), 0.5 * (c[1] - c[0]));
                    x.iter()
                        .zip(&wt)
                        .map(move |(xi, wi)| (m + h * xi, h * wi))
                        .collect::<Vec<_>>()
                })
                .collect()
        };
        let mut direct = 0.0;
        for (r1, w1) in points(0.5, 1.5) {
            for &(r2, w2) in &points(0.5 + d, 1.5 + d) {
                direct += w1 * w2 * u.eval(r1) * v.eval(r2) * model.m(r1, r2).unwrap();
            }
        }
        direct *= -4.0;
        assert!(rel(cross, direct) < 2e-3, "d={d}: {cross} vs {direct}");
        // Relative to the bump's own seminorm, the interaction fades with distance.
        let ratio = (cross / seminorm_s_sq(&u, f).unwrap()).abs();
        assert!(ratio < last, "d={d}");
        last = ratio;
    }
}

#[test]
fn lp_norm_properties() {
    let f = forms3();
    let u = func(f, gaussian(0.5, 1.0));
    for q in [1.0, 2.0, 4.0, 6.0] {
        let n = lp_norm(&u, q).unwrap();
        assert!(rel(lp_norm(&u.scaled(-3.5), q).unwrap(), 3.5 * n) < 1e-14);
    }
    let m = quadratic(&f.mass, u.values());
    assert!((lp_norm(&u, 2.0).unwrap().powi(2) - m).abs() < 1e-10 * m);
    assert!(lp_norm(&u, 0.5).is_err());
    assert!(lp_norm(&u, f64::NAN).is_err());
    assert_eq!(
        lp_norm(&RadialFunction::zeros(f.grid.clone()), 3.0).unwrap(),
        0.0
    );
}

#[test]
fn lp_norm_of_gaussian_against_direct_quadrature() {
    // The oracle integrates the exact profile; the discrete norm converges
    // to it under refinement.
    let f = forms3();
    let fine = Arc::new(f.grid.refined());
    for q in [2.0, 4.0, 6.0] {
        let exact = 4.0
            * PI
            * integrate(
                |r| (-q * r * r).exp() * r.sinh().powi(2),
                0.0,
                12.0,
                &QuadOptions::relative(1e-14),
            )
            .unwrap()
            .value;
        let coarse = lp_norm(&func(f, gaussian(0.0, 1.0)), q).unwrap().powf(q);
        let refined = lp_norm(
            &RadialFunction::from_fn(fine.clone(), gaussian(0.0, 1.0)).unwrap(),
            q,
        )
        .unwrap()
        .powf(q);
        assert!(rel(coarse, exact) < 1e-3, "q={q}: {coarse} vs {exact}");
        assert!(rel(refined, exact) < rel(coarse, exact).max(1e-12), "q={q}");
    }
}

#[test]
fn rearrangement_fixes_decreasing_profiles() {
    let f = forms3();
    let u = func(f, gaussian(0.0, 2.0));
    let v = schwarz_rearrange(&u).unwrap();
    for (a, b) in u.values().iter().zip(v.values()) {
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
    }
    let neg = func(f, |r| r - 1.0);
    assert!(schwarz_rearrange(&neg).is_err());
}

#[test]
fn rearrangement_preserves_norms_and_lowers_energies() {
    let f = forms3();
    let r_max = f.grid.r_max();
    let profiles: Vec<Box<dyn Fn(f64) -> f64>> = vec![
        Box::new(gaussian(1.5, 0.7)),
        Box::new(|r| gaussian(0.0, 0.5)(r) + 2.0 * gaussian(2.0, 0.4)(r)),
        Box::new(move |r| (1.0 + (3.0 * r).sin()) * (-r).exp() * (1.0 - r / r_max)),
    ];
    for g in &profiles {
        let u = func(f, g);
        let v = schwarz_rearrange(&u).unwrap();
        assert!(v.values().windows(2).all(|w| w[1] <= w[0]));
        for q in [2.0, 4.0, 6.0] {
            assert!(
                rel(lp_norm(&v, q).unwrap(), lp_norm(&u, q).unwrap()) < 1e-3,
                "q={q}"
            );
        }
        let (du, dv) = (
            dirichlet_energy(&u, f).unwrap(),
            dirichlet_energy(&v, f).unwrap(),
        );
        assert!(dv <= du * (1.0 + 1e-3), "Dirichlet {dv} > {du}");
        let (su, sv) = (seminorm_s_sq(&u, f).unwrap(), seminorm_s_sq(&v, f).unwrap());
        assert!(sv <= su * (1.0 + 1e-3), "seminorm {sv} > {su}");
        let w = schwarz_rearrange(&v).unwrap();
        for (a, b) in v.values().iter().zip(w.values()) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        }
    }
}

#[test]
fn refinement_changes_norms_little() {
    let coarse = forms3();
    let grid = Arc::new(coarse.grid.refined());
    let kernel = build_reduced_kernel(3, 0.5, &grid.nonlocal_points()).unwrap();
    let fine = assemble_forms(grid, 0.5, &kernel).unwrap();
    for g in [gaussian(0.0, 1.0), gaussian(2.0, 0.8)] {
        let (u, v) = (func(coarse, &g), func(&fine, &g));
        let pairs = [
            (
                dirichlet_energy(&u, coarse).unwrap(),
                dirichlet_energy(&v, &fine).unwrap(),
            ),
            (
                quadratic(&coarse.mass, u.values()),
                quadratic(&fine.mass, v.values()),
            ),
            (
                seminorm_s_sq(&u, coarse).unwrap(),
                seminorm_s_sq(&v, &fine).unwrap(),
            ),
            (lp_norm(&u, 4.0).unwrap(), lp_norm(&v, 4.0).unwrap()),
        ];
        for (i, (a, b)) in pairs.iter().enumerate() {
            assert!(rel(*a, *b) < 1e-3, "quantity {i}: {a} vs {b}");
        }
    }
}

#[test]
fn quotients_basic_properties() {
    let f = forms3();
    let u = func(f, gaussian(0.0, 1.0));
    let zero = RadialFunction::zeros(f.grid.clone());
    assert!(sobolev_quotient(&zero, 0.0, 3.0, f).is_err());
    assert!(mixed_quotient(&zero, 0.0, f).is_err());
    for lambda in [0.0, 0.5] {
        let q = sobolev_quotient(&u, lambda, 3.0, f).unwrap();
        assert!(rel(sobolev_quotient(&u.scaled(7.0), lambda, 3.0, f).unwrap(), q) < 1e-13);
        let m = mixed_quotient(&u, lambda, f).unwrap();
        assert!(rel(mixed_quotient(&u.scaled(0.01), lambda, f).unwrap(), m) < 1e-13);
        // Dropping the seminorm lowers the quotient.
        assert!(m >= sobolev_quotient(&u, lambda, 5.0, f).unwrap());
    }
    assert_eq!(critical_exponent(3).unwrap(), 6.0);
    assert!(critical_exponent(2).is_err());
}

#[test]
fn gaussian_family_gives_positive_infimum() {
    let f = forms3();
    let mut best = f64::INFINITY;
    for w in [0.1, 0.2, 0.4, 0.8, 1.6, 3.2] {
        best = best.min(sobolev_quotient(&func(f, gaussian(0.0, w)), 0.0, 3.0, f).unwrap());
    }
    assert!(best.is_finite() && best > 0.0);
}

#[test]
fn mixed_constant_concentration_estimate() {
    let f = forms3();
    let est = estimate_mixed_constant(0.5, f).unwrap();
    // The quotient decreases along the concentrating family.
    assert!(est.samples.windows(2).all(|w| w[1].1 < w[0].1));
    assert!(est.estimate <= est.samples.last().unwrap().1);
    // Limit: the Euclidean Sobolev constant 3(π/2)^{4/3}.
    let euclid = 3.0 * (PI / 2.0).powf(4.0 / 3.0);
    assert!(
        rel(est.estimate, euclid) < 0.01,
        "{} vs {euclid}",
        est.estimate
    );
    // Every test function lies above the estimate.
    for w in [0.05, 0.2, 1.0, 3.0] {
        assert!(mixed_quotient(&func(f, gaussian(0.0, w)), 0.5, f).unwrap() >= est.estimate);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rearrangement_is_idempotent_and_equimeasurable(vals in prop::collection::vec(0.0f64..10.0, 30)) {
        let grid = Arc::new(RadialGrid::geometric_uniform(3, 4.0, 30).unwrap());
        let u = RadialFunction::new(grid.clone(), vals).unwrap();
        let v = schwarz_rearrange(&u).unwrap();
        prop_assert!(v.values().windows(2).all(|w| w[1] <= w[0]));
        let w = schwarz_rearrange(&v).unwrap();
        for (a, b) in v.values().iter().zip(w.values()) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        }
        // Averaging preserves the lumped integral exactly.
        let lumped = |f: &RadialFunction| f.values().iter().zip(grid.weights()).map(|(a, w)| a * w).sum::<f64>();
        let m1 = lumped(&u);
        prop_assert!((lumped(&v) - m1).abs() <= 1e-12 * m1.max(1e-300));
        let tol = 1e-12 * u.max_value();
        prop_assert!(v.max_value() <= u.max_value() + tol && v.min_value() >= u.min_value() - tol);
    }

    #[test]
    fn lp_norm_is_homogeneous(vals in prop::collection::vec(-5.0f64..5.0, 30), alpha in -10.0f64..10.0, q in 1.0f64..8.0) {
        let grid = Arc::new(RadialGrid::uniform(3, 4.0, 30).unwrap());
        let u = RadialFunction::new(grid, vals).unwrap();
        let n = lp_norm(&u, q).unwrap();
        prop_assert!((lp_norm(&u.scaled(alpha), q).unwrap() - alpha.abs() * n).abs() <= 1e-12 * (1.0 + alpha.abs() * n));
    }

    #[test]
    fn forms_nonnegative_on_random_functions(vals in prop::collection::vec(-1.0f64..1.0, DEFAULT_NODES)) {
        let f = forms3();
        let mut vals = vals;
        *vals.last_mut().unwrap() = 0.0;
        let u = RadialFunction::new(f.grid.clone(), vals).unwrap();
        prop_assert!(seminorm_s_sq(&u, f).unwrap() >= -1e-10 * abs_sum(&f.nonlocal));
        prop_assert!(norm_lambda_sq(&u, 0.9 * spectral_bottom(3), f).unwrap() > 0.0);
    }
}
