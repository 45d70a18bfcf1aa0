// Reference values keep every digit the oracle printed.
#![allow(clippy::excessive_precision)]

use hypfrac::kernel::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn normalizing_constant_golden() {
    // Gamma-product values at 40 digits.
    let cases = [
        (3, 0.5, 0.050660591821168885722),
        (2, 0.5, 0.063493635934240969786),
        (4, 0.25, 0.016659133763406706019),
        (5, 0.75, 0.016723243155688890253),
    ];
    for (n, s, c) in cases {
        assert!(
            rel(normalizing_constant(n, s).unwrap(), c) < 1e-13,
            "N={n} s={s}"
        );
    }
}

#[test]
fn normalizing_constant_positive_and_continuous() {
    for n in 2..=6 {
        for k in 1..=9 {
            let s = k as f64 / 10.0;
            let c = normalizing_constant(n, s).unwrap();
            assert!(c > 0.0 && c.is_finite());
            let c2 = normalizing_constant(n, s + 1e-6).unwrap();
            assert!(rel(c2, c) < 1e-4);
        }
    }
}

#[test]
fn normalizing_constant_rejects_bad_order() {
    for s in [0.0, 1.0, -0.3, 1.5, f64::NAN] {
        assert!(normalizing_constant(3, s).is_err());
    }
}

#[test]
fn odd_kernel_golden() {
    // Extended-precision nested differentiation of the Bessel expression.
    let cases = [
        (3, 0.5, 1.0, 0.070043581187736398873),
        (3, 0.25, 0.1, 149.84670016571803538),
        (5, 0.5, 2.0, 0.000084734788395416183219),
        (5, 0.75, 0.5, 6.4919301022820103045),
        (3, 0.5, 10.0, 9.8944612534183360959e-12),
    ];
    for (n, s, rho, k) in cases {
        assert!(
            rel(kernel_odd(n, s, rho).unwrap(), k) < 1e-12,
            "N={n} s={s} ρ={rho}"
        );
    }
}

#[test]
fn even_kernel_golden() {
    // Extended-precision quadrature of the original singular integral.
    let cases = [
        (2, 0.5, 1.0, 0.13046455343549307),
        (4, 0.25, 0.5, 0.641837923669757792),
        (2, 0.75, 3.0, 0.00113471894047038978),
    ];
    for (n, s, rho, k) in cases {
        assert!(
            rel(kernel_even(n, s, rho).unwrap(), k) < 1e-10,
            "N={n} s={s} ρ={rho}"
        );
    }
}

#[test]
fn parity_dispatch() {
    for &rho in &[0.01, 0.7, 4.0] {
        assert_eq!(
            kernel(3, 0.5, rho).unwrap(),
            kernel_odd(3, 0.5, rho).unwrap()
        );
        assert_eq!(
            kernel(4, 0.5, rho).unwrap(),
            kernel_even(4, 0.5, rho).unwrap()
        );
    }
    assert!(kernel_odd(4, 0.5, 1.0).is_err());
    assert!(kernel_even(3, 0.5, 1.0).is_err());
}

#[test]
fn rejects_nonpositive_distance() {
    assert!(kernel(3, 0.5, 0.0).is_err());
    assert!(kernel(2, 0.5, -1.0).is_err());
}

#[test]
fn positive_and_decreasing_on_samples() {
    for n in 2..=5 {
        for &s in &[0.25, 0.5, 0.75] {
            let ev = KernelEvaluator::new(n, s).unwrap();
            let mut prev = f64::INFINITY;
            for i in 0..60 {
                let rho = 1e-3 * (2e4f64).powf(i as f64 / 59.0);
                let l = ev.ln_value(rho).unwrap();
                assert!(l.is_finite() && l < prev, "N={n} s={s} ρ={rho}");
                prev = l;
            }
        }
    }
}

#[test]
fn three_dimensional_half_order_decreasing() {
    let mut prev = f64::INFINITY;
    for i in 1..=50 {
        let k = kernel_odd(3, 0.5, i as f64 / 10.0).unwrap();
        assert!(k > 0.0 && k < prev);
        prev = k;
    }
}

#[test]
fn finite_difference_derivative_negative() {
    for n in [2, 3, 4, 5] {
        let ev = KernelEvaluator::new(n, 0.5).unwrap();
        for &rho in &[0.005, 0.05, 0.5, 2.0, 8.0, 15.0] {
            let h = 1e-4 * rho;
            let d = ev.ln_value(rho + h).unwrap() - ev.ln_value(rho - h).unwrap();
            assert!(d < 0.0, "N={n} ρ={rho}");
        }
    }
}

#[test]
fn near_field_coefficient_limit() {
    for n in 2..=5 {
        for &s in &[0.25, 0.5, 0.75] {
            let ev = KernelEvaluator::new(n, s).unwrap();
            let rho: f64 = 1e-6;
            let k = ev.ln_value(rho).unwrap().exp() * rho.powf(n as f64 + 2.0 * s);
            let kappa = near_field_coefficient(n, s).unwrap();
            assert!(rel(k, kappa) < 1e-3, "N={n} s={s}: {k} vs {kappa}");
        }
    }
}

#[test]
fn underflow_flag_in_far_field() {
    let v = kernel_value(5, 0.5, 200.0).unwrap();
    assert!(v.underflow && v.value == 0.0 && v.ln_value.is_finite());
    let v = kernel_value(3, 0.5, 5.0).unwrap();
    assert!(!v.underflow && v.value > 0.0);
}

#[test]
fn even_refinement_consistency() {
    for &rho in &[0.05, 1.0, 12.0] {
        let a = KernelEvaluator::new(2, 0.5)
            .unwrap()
            .with_tolerance(1e-8)
            .ln_value(rho)
            .unwrap();
        let b = KernelEvaluator::new(2, 0.5)
            .unwrap()
            .with_tolerance(5e-9)
            .ln_value(rho)
            .unwrap();
        assert!((a.exp() / b.exp() - 1.0).abs() < 1e-7);
    }
}

#[test]
fn even_far_field_profile_bounded() {
    let s = 0.5;
    let ev = KernelEvaluator::new(2, s).unwrap();
    let vals: Vec<f64> = (0..=20)
        .map(|i| {
            let rho = 10.0 + i as f64;
            ev.ln_value(rho).unwrap() + rho + (1.0 + s) * rho.ln()
        })
        .collect();
    let spread = vals.iter().cloned().fold(f64::MIN, f64::max)
        - vals.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 0.5, "spread {spread}");
}

#[test]
fn table_three_dimensional() {
    let t = build_kernel_table(3, 0.5, 1e-4, 30.0, 400).unwrap();
    assert_eq!(t.rho_grid.len(), 400);
    assert!((t.near_exponent + 4.0).abs() < 0.05, "{}", t.near_exponent);
    assert!((t.far_rate - 2.0).abs() < 0.02, "{}", t.far_rate);
    assert!(t.values.windows(2).all(|w| w[1] < w[0]));
    assert!(t.values.iter().all(|&v| v > 0.0));
}

#[test]
fn asymptotic_fits_across_matrix() {
    for n in 2..=5 {
        for &s in &[0.25, 0.5, 0.75] {
            let ev = KernelEvaluator::new(n, s).unwrap();
            let (near, far) = fit_asymptotics(&ev).unwrap();
            let nf = n as f64;
            assert!(
                (near + nf + 2.0 * s).abs() < 0.05,
                "N={n} s={s} near {near}"
            );
            assert!(
                ((far - (nf - 1.0)) / (nf - 1.0)).abs() < 0.01,
                "N={n} s={s} far {far}"
            );
        }
    }
}

mod reduced {
    use hypfrac::geometry::sphere_area;
    use hypfrac::kernel::*;
    use hypfrac::specfun::{integrate, QuadOptions};

    /// `ω_{N−1} ω_{N−2} (sinh r₁ sinh r₂)^{N−1} ∫₀^π 𝒦ₛ(d(θ)) sin^{N−2}θ dθ`
    /// with the exact kernel, split geometrically away from `θ = 0`.
    fn angular_oracle(n: usize, s: f64, r1: f64, r2: f64) -> f64 {
        let ev = KernelEvaluator::new(n, s).unwrap();
        let (s1, s2) = (r1.sinh(), r2.sinh());
        let f = |th: f64| {
            let h = ((r1 - r2) / 2.0).sinh().powi(2) + s1 * s2 * (th / 2.0).sin().powi(2);
            let d = 2.0 * h.sqrt().asinh();
            ev.eval(d).unwrap().value * th.sin().powi(n as i32 - 2)
        };
        let (mut a, mut w, mut total) = (0.0, (-(r1.min(r2))).exp().min(0.1), 0.0);
        while a < std::f64::consts::PI {
            let b = (a + w).min(std::f64::consts::PI);
            total += integrate(f, a, b, &QuadOptions::relative(1e-11))
                .unwrap()
                .value;
            a = b;
            w *= 2.0;
        }
        sphere_area(n) * sphere_area(n - 1) * (s1 * s2).powi(n as i32 - 1) * total
    }

    #[test]
    fn matches_angular_oracle() {
        let pairs = [
            (0.5, 1.0),
            (0.1, 2.0),
            (2.0, 2.3),
            (5.0, 5.05),
            (1e-3, 0.5),
            (10.0, 12.0),
            (3.0, 9.0),
        ];
        for n in [2, 3, 4, 5] {
            let m = ReducedKernelModel::new(n, 0.5).unwrap();
            for &(r1, r2) in &pairs {
                let a = m.m(r1, r2).unwrap();
                let b = angular_oracle(n, 0.5, r1, r2);
                assert!((a / b - 1.0).abs() < 1e-7, "N={n} ({r1},{r2}): {a} vs {b}");
            }
        }
        let m = ReducedKernelModel::new(3, 0.25).unwrap();
        let a = m.m(0.7, 1.9).unwrap();
        assert!((a / angular_oracle(3, 0.25, 0.7, 1.9) - 1.0).abs() < 1e-7);
    }

    #[test]
    fn symmetric_and_positive() {
        let grid: Vec<f64> = (1..=40)
            .map(|i| 0.05 * i as f64 + 0.01 * (i as f64).sqrt())
            .collect();
        let k = build_reduced_kernel(3, 0.5, &grid).unwrap();
        for i in 0..grid.len() {
            assert_eq!(k.w[(i, i)], 0.0);
            for j in 0..grid.len() {
                assert_eq!(k.w[(i, j)], k.w[(j, i)]);
                if i != j {
                    assert!(k.w[(i, j)] > 0.0);
                }
            }
        }
    }

    #[test]
    fn decreasing_away_from_diagonal() {
        let grid: Vec<f64> = (1..=60).map(|i| 0.25 * i as f64).collect();
        for n in [2, 3] {
            let k = build_reduced_kernel(n, 0.5, &grid).unwrap();
            for i in 0..grid.len() {
                for j in i + 2..grid.len() - 1 {
                    assert!(k.w[(i, j + 1)] < k.w[(i, j)], "N={n} i={i} j={j}");
                }
                for j in 1..i.saturating_sub(1) {
                    assert!(k.w[(i, j - 1)] < k.w[(i, j)], "N={n} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn near_diagonal_exponent() {
        for &s in &[0.25, 0.5, 0.75] {
            for n in [2, 3, 5] {
                let m = ReducedKernelModel::new(n, s).unwrap();
                let r = 2.0;
                let xs: Vec<f64> = (0..11)
                    .map(|i| (1e-3f64).ln() + i as f64 * 0.1 * (10f64).ln())
                    .collect();
                let ys: Vec<f64> = xs
                    .iter()
                    .map(|&l| m.ln_m(r - 0.5 * l.exp(), r + 0.5 * l.exp()).unwrap())
                    .collect();
                let slope = fit_slope(&xs, &ys);
                let target = -(1.0 + 2.0 * s);
                assert!(
                    ((slope - target) / target).abs() < 0.1,
                    "N={n} s={s}: {slope}"
                );
            }
        }
    }

    #[test]
    fn diagonal_model_within_ten_percent_below_grid_step() {
        let m = ReducedKernelModel::new(3, 0.5).unwrap();
        let dm = m.diagonal_model();
        assert_eq!(dm.exponent, 2.0);
        for &r in &[0.3, 1.0, 4.0, 15.0] {
            for &d in &[0.05, 0.02, 0.005] {
                let ratio =
                    m.m(r - d / 2.0, r + d / 2.0).unwrap() / dm.value(r - d / 2.0, r + d / 2.0);
                assert!((ratio - 1.0).abs() < 0.1, "r={r} d={d}: {ratio}");
            }
        }
    }

    #[test]
    fn far_regime_continuous() {
        for n in [2, 3, 4] {
            let m = ReducedKernelModel::new(n, 0.5).unwrap();
            let a = m.ln_m(5.0, 45.0 - 1e-7).unwrap();
            let b = m.ln_m(5.0, 45.0 + 1e-7).unwrap();
            assert!((a - b).abs() < 1e-6, "N={n}: {a} vs {b}");
        }
    }

    #[test]
    fn exterior_tail_additive() {
        for n in [2, 3] {
            let m = ReducedKernelModel::new(n, 0.5).unwrap();
            for &r in &[0.5, 5.0, 19.5] {
                let t20 = m.exterior_tail(r, 20.0).unwrap();
                let t30 = m.exterior_tail(r, 30.0).unwrap();
                let mid = integrate(
                    |x| m.m(r, x).unwrap(),
                    20.0,
                    30.0,
                    &QuadOptions::relative(1e-10),
                )
                .unwrap()
                .value;
                assert!(((t30 + mid) / t20 - 1.0).abs() < 1e-6, "N={n} r={r}");
            }
            assert_eq!(m.exterior_tail(0.0, 20.0).unwrap(), 0.0);
            assert!(m.exterior_tail(20.0, 20.0).is_err());
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(build_reduced_kernel(3, 0.5, &[0.5, 0.4]).is_err());
        assert!(build_reduced_kernel(3, 0.5, &[0.0, 0.4]).is_err());
        let m = ReducedKernelModel::new(3, 0.5).unwrap();
        assert!(m.m(1.0, 1.0).is_err());
    }
}
