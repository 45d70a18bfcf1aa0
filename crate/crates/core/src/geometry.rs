//! Poincaré ball model primitives.

use crate::error::{domain, Result};
use crate::specfun::gamma;
use serde::{Deserialize, Serialize};

/// Points closer than this to the unit sphere are rejected.
pub const BOUNDARY_MARGIN: f64 = 1e-12;

/// A point of the unit ball, stored in Euclidean coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallPoint(Vec<f64>);

impl BallPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || coords.iter().any(|c| !c.is_finite()) {
            return Err(domain("ball point needs finite coordinates"));
        }
        let norm = norm_sq(&coords).sqrt();
        if norm > 1.0 - BOUNDARY_MARGIN {
            return Err(domain(format!(
                "point with Euclidean norm {norm} is outside the ball or within {BOUNDARY_MARGIN:e} of its boundary"
            )));
        }
        Ok(Self(coords))
    }

    pub fn origin(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        norm_sq(&self.0).sqrt()
    }

    /// Hyperbolic distance to the origin.
    pub fn radius(&self) -> GeodesicRadius {
        GeodesicRadius(2.0 * self.norm().atanh())
    }
}

/// Hyperbolic distance to the origin (or between two points).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct GeodesicRadius(f64);

impl GeodesicRadius {
    pub fn new(r: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(domain(format!(
                "geodesic radius must be finite and ≥ 0, got {r}"
            )));
        }
        Ok(Self(r))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_dims(a: &BallPoint, b: &BallPoint) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(domain(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// Möbius translation `T_a(x)`; sends `a` to the origin.
pub fn mobius_translate(a: &BallPoint, x: &BallPoint) -> Result<BallPoint> {
    check_dims(a, x)?;
    let (a, x) = (a.coords(), x.coords());
    let a2 = norm_sq(a);
    let x2 = norm_sq(x);
    let diff: Vec<f64> = x.iter().zip(a).map(|(x, a)| x - a).collect();
    let d2 = norm_sq(&diff);
    let denom = 1.0 - 2.0 * dot(x, a) + x2 * a2;
    if !(denom > 1e-300) {
        return Err(domain(format!(
            "Möbius denominator {denom:e} underflows (|a|² = {a2}, |x|² = {x2})"
        )));
    }
    let out: Vec<f64> = a
        .iter()
        .zip(&diff)
        .map(|(ai, di)| (d2 * ai - (1.0 - a2) * di) / denom)
        .collect();
    if norm_sq(&out) >= 1.0 {
        return Err(domain(
            "Möbius image left the unit ball (points too close to the boundary)",
        ));
    }
    Ok(BallPoint(out))
}

/// Hyperbolic distance `log((1+|T_y(x)|)/(1-|T_y(x)|))`.
pub fn geodesic_distance(x: &BallPoint, y: &BallPoint) -> Result<GeodesicRadius> {
    let t = mobius_translate(y, x)?.norm();
    Ok(GeodesicRadius(2.0 * t.atanh()))
}

/// Surface area of the unit sphere `S^{n-1} ⊂ ℝⁿ`, `2π^{n/2}/Γ(n/2)`.
pub fn sphere_area(n: usize) -> f64 {
    let h = 0.5 * n as f64;
    2.0 * std::f64::consts::PI.powf(h) / gamma(h)
}

/// Radial volume density `ω_{N-1} sinh^{N-1}(r)`.
pub fn radial_volume_weight(dim: usize, r: GeodesicRadius) -> Result<f64> {
    if dim < 2 {
        return Err(domain(format!("dimension must be ≥ 2, got {dim}")));
    }
    Ok(sphere_area(dim) * r.value().sinh().powi(dim as i32 - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate, QuadOptions};
    use proptest::prelude::*;

    fn pt(c: &[f64]) -> BallPoint {
        BallPoint::new(c.to_vec()).unwrap()
    }

    #[test]
    fn coincident_points() {
        let x = pt(&[0.3, -0.2, 0.1]);
        assert!(geodesic_distance(&x, &x).unwrap().value().abs() < 1e-15);
    }

    #[test]
    fn distance_from_origin() {
        let d = geodesic_distance(&BallPoint::origin(2), &pt(&[0.5, 0.0])).unwrap();
        assert!((d.value() - 3f64.ln()).abs() < 1e-15);
        assert!((d.value() - 1.098_612_3).abs() < 1e-7);
    }

    #[test]
    fn translation_to_origin() {
        let a = pt(&[0.4, 0.1, -0.3]);
        let t = mobius_translate(&a, &a).unwrap();
        assert!(t.norm() < 1e-15);
        let x = pt(&[0.2, 0.5, 0.1]);
        let t0 = mobius_translate(&BallPoint::origin(3), &x).unwrap();
        assert!((t0.norm() - x.norm()).abs() < 1e-15);
        for (a, b) in t0.coords().iter().zip(x.coords()) {
            assert!((a + b).abs() < 1e-15);
        }
    }

    #[test]
    fn boundary_rejected() {
        assert!(BallPoint::new(vec![1.0, 0.0]).is_err());
        assert!(BallPoint::new(vec![1.0 - 1e-13, 0.0]).is_err());
        assert!(BallPoint::new(vec![0.6, 0.8]).is_err());
        assert!(BallPoint::new(vec![0.9999, 0.0]).is_ok());
    }

    #[test]
    fn volume_weight_values() {
        let r0 = GeodesicRadius::new(0.0).unwrap();
        assert_eq!(radial_volume_weight(3, r0).unwrap(), 0.0);
        let w = radial_volume_weight(3, GeodesicRadius::new(1.0).unwrap()).unwrap();
        let exact = 4.0 * std::f64::consts::PI * 1f64.sinh().powi(2);
        assert!((w - exact).abs() < 1e-12);
        assert!((w - 17.3551).abs() < 1e-3);
        assert!(radial_volume_weight(1, r0).is_err());
        assert!(GeodesicRadius::new(-1.0).is_err());
    }

    #[test]
    fn volume_weight_matches_ball_coordinates() {
        // Volume of B(0, R) in ball coordinates: ω ∫_0^{tanh(R/2)} (2/(1-t²))^N t^{N-1} dt.
        for dim in 2..=5 {
            for &big_r in &[0.5, 2.0, 4.0] {
                let opts = QuadOptions::relative(1e-13);
                let radial = integrate(
                    |r| radial_volume_weight(dim, GeodesicRadius(r)).unwrap(),
                    0.0,
                    big_r,
                    &opts,
                )
                .unwrap()
                .value;
                let tmax = (0.5 * big_r).tanh();
                let ball = sphere_area(dim)
                    * integrate(
                        |t| (2.0 / (1.0 - t * t)).powi(dim as i32) * t.powi(dim as i32 - 1),
                        0.0,
                        tmax,
                        &opts,
                    )
                    .unwrap()
                    .value;
                assert!(((radial - ball) / ball).abs() < 1e-8, "N={dim} R={big_r}");
            }
        }
    }

    #[test]
    fn exponential_growth_rate() {
        for dim in 2..=6 {
            let r = 30.0;
            let w = radial_volume_weight(dim, GeodesicRadius(r)).unwrap();
            let ratio = w / ((dim - 1) as f64 * r).exp();
            let limit = sphere_area(dim) / 2f64.powi(dim as i32 - 1);
            assert!(((ratio - limit) / limit).abs() < 1e-6);
        }
    }

    fn ball_point(dim: usize) -> impl Strategy<Value = BallPoint> {
        (proptest::collection::vec(-1.0f64..1.0, dim), 0.0f64..0.95).prop_map(|(v, r)| {
            let n = v.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-9);
            BallPoint(v.iter().map(|c| c / n * r).collect())
        })
    }

    proptest! {
        #[test]
        fn symmetric_and_triangle(x in ball_point(3), y in ball_point(3), z in ball_point(3)) {
            let dxy = geodesic_distance(&x, &y).unwrap().value();
            let dyx = geodesic_distance(&y, &x).unwrap().value();
            let dxz = geodesic_distance(&x, &z).unwrap().value();
            let dzy = geodesic_distance(&z, &y).unwrap().value();
            prop_assert!((dxy - dyx).abs() <= 1e-12 * (1.0 + dxy));
            prop_assert!(dxy <= dxz + dzy + 1e-12);
        }

        #[test]
        fn mobius_is_isometry(a in ball_point(3), x in ball_point(3), y in ball_point(3)) {
            let d = geodesic_distance(&x, &y).unwrap().value();
            let tx = mobius_translate(&a, &x).unwrap();
            let ty = mobius_translate(&a, &y).unwrap();
            let dt = geodesic_distance(&tx, &ty).unwrap().value();
            prop_assert!((d - dt).abs() <= 1e-10 * (1.0 + d));
        }
    }
}
