//! Plate material law, physical parameters, and the two manufactured
//! problems (exact fields, loads, boundary data).
//!
//! Problem 1 lives on the unit square with a polynomial solution vanishing on
//! the boundary; problem 2 on the unit disk under constant load g = 1, with
//! both fields vanishing on the unit circle. Both satisfy the clamped plate
//! system exactly for any thickness.

use crate::error::{Error, Result};
use crate::mesh::Point;

/// Material and thickness parameters. Defaults: E = 1.092, nu = 0.3,
/// kappa = 5/6, which make D = E/(12(1-nu^2)) = 0.1 and
/// lambda = E kappa / (2(1+nu)) = 0.35.
#[derive(Clone, Copy, Debug)]
pub struct PlateParams {
    pub young: f64,
    pub poisson: f64,
    pub shear_correction: f64,
    pub thickness: f64,
}

impl PlateParams {
    pub fn new(young: f64, poisson: f64, shear_correction: f64, thickness: f64) -> Result<Self> {
        if !(0.0 < poisson && poisson < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "Poisson ratio {poisson} outside (0, 1/2)"
            )));
        }
        if thickness <= 0.0 || young <= 0.0 || shear_correction <= 0.0 {
            return Err(Error::InvalidArgument(
                "thickness, Young's modulus and shear correction must be positive".into(),
            ));
        }
        Ok(PlateParams {
            young,
            poisson,
            shear_correction,
            thickness,
        })
    }

    /// Default material with the given thickness.
    pub fn with_thickness(thickness: f64) -> Self {
        PlateParams::new(1.092, 0.3, 5.0 / 6.0, thickness).expect("default material is valid")
    }

    /// Bending stiffness D = E / (12 (1 - nu^2)).
    pub fn bending_d(&self) -> f64 {
        self.young / (12.0 * (1.0 - self.poisson * self.poisson))
    }

    /// Shear modulus lambda = E kappa / (2 (1 + nu)).
    pub fn shear_lambda(&self) -> f64 {
        self.young * self.shear_correction / (2.0 * (1.0 + self.poisson))
    }

    /// lambda / t^2, the shear term weight.
    pub fn shear_weight(&self) -> f64 {
        self.shear_lambda() / (self.thickness * self.thickness)
    }
}

/// Symmetric 2x2 tensor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymTensor {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

impl SymTensor {
    pub fn trace(self) -> f64 {
        self.xx + self.yy
    }

    /// Frobenius double contraction (counts the off-diagonal twice).
    pub fn ddot(self, o: SymTensor) -> f64 {
        self.xx * o.xx + self.yy * o.yy + 2.0 * self.xy * o.xy
    }
}

/// Bending moduli: C sigma = D [ (1 - nu) sigma + nu tr(sigma) I ].
pub fn apply_bending_tensor(sigma: SymTensor, params: &PlateParams) -> SymTensor {
    let d = params.bending_d();
    let nu = params.poisson;
    let tr = nu * sigma.trace();
    SymTensor {
        xx: d * ((1.0 - nu) * sigma.xx + tr),
        yy: d * ((1.0 - nu) * sigma.yy + tr),
        xy: d * (1.0 - nu) * sigma.xy,
    }
}

/// Which domain a problem is posed on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    UnitSquare,
    UnitDisk,
}

type Scalar = Box<dyn Fn(Point) -> f64 + Send + Sync>;
type Vector = Box<dyn Fn(Point) -> (f64, f64) + Send + Sync>;

/// Manufactured problem: exact fields, load, boundary traces, and effective
/// polynomial degrees used to size quadrature rules.
pub struct Problem {
    pub id: u8,
    pub domain: Domain,
    pub w: Scalar,
    pub grad_w: Vector,
    pub theta: Vector,
    pub load: Scalar,
    pub w_degree: usize,
    pub theta_degree: usize,
    pub load_degree: usize,
    /// Degree of the shear stress gamma = lambda t^-2 (grad w - theta).
    pub gamma_degree: usize,
    pub params: PlateParams,
}

impl Problem {
    /// Shear stress gamma at a point.
    pub fn gamma(&self, p: Point) -> (f64, f64) {
        let (gx, gy) = (self.grad_w)(p);
        let (tx, ty) = (self.theta)(p);
        let s = self.params.shear_weight();
        (s * (gx - tx), s * (gy - ty))
    }

    /// Exact boundary trace of w (clamped: zero on the domain boundary).
    pub fn w_boundary(&self, p: Point) -> f64 {
        (self.w)(p)
    }

    pub fn theta_boundary(&self, p: Point) -> (f64, f64) {
        (self.theta)(p)
    }
}

/// Polynomial solution on the unit square (both fields vanish on the
/// boundary together with the needed derivatives).
pub fn problem1(params: PlateParams) -> Problem {
    let t2 = params.thickness * params.thickness;
    let nu = params.poisson;
    let d = params.bending_d();

    let theta = move |p: Point| {
        let (x, y) = (p.x, p.y);
        (
            y.powi(3) * (y - 1.0).powi(3) * x * x * (x - 1.0) * (x - 1.0) * (2.0 * x - 1.0),
            x.powi(3) * (x - 1.0).powi(3) * y * y * (y - 1.0) * (y - 1.0) * (2.0 * y - 1.0),
        )
    };

    let w = move |p: Point| {
        let (x, y) = (p.x, p.y);
        let cubic = x.powi(3) * (x - 1.0).powi(3) * y.powi(3) * (y - 1.0).powi(3) / 3.0;
        let shear = 2.0 * t2 / (5.0 * (1.0 - nu))
            * (y.powi(3) * (y - 1.0).powi(3) * x * (x - 1.0) * (5.0 * x * x - 5.0 * x + 1.0)
                + x.powi(3) * (x - 1.0).powi(3) * y * (y - 1.0) * (5.0 * y * y - 5.0 * y + 1.0));
        cubic - shear
    };

    let grad_w = move |p: Point| {
        let (x, y) = (p.x, p.y);
        let px = x * x * (x - 1.0) * (x - 1.0) * (2.0 * x - 1.0); // (x^3 (x-1)^3)' / 3
        let py = y * y * (y - 1.0) * (y - 1.0) * (2.0 * y - 1.0);
        let qx = (2.0 * x - 1.0) * (10.0 * x * x - 10.0 * x + 1.0); // (x(x-1)(5x^2-5x+1))'
        let qy = (2.0 * y - 1.0) * (10.0 * y * y - 10.0 * y + 1.0);
        let c = 2.0 * t2 / (5.0 * (1.0 - nu));
        let wx = px * y.powi(3) * (y - 1.0).powi(3)
            - c * (y.powi(3) * (y - 1.0).powi(3) * qx
                + 3.0 * px * y * (y - 1.0) * (5.0 * y * y - 5.0 * y + 1.0));
        let wy = py * x.powi(3) * (x - 1.0).powi(3)
            - c * (x.powi(3) * (x - 1.0).powi(3) * qy
                + 3.0 * py * x * (x - 1.0) * (5.0 * x * x - 5.0 * x + 1.0));
        (wx, wy)
    };

    let load = move |p: Point| {
        let (x, y) = (p.x, p.y);
        d * (12.0
            * y
            * (y - 1.0)
            * (5.0 * x * x - 5.0 * x + 1.0)
            * (2.0 * y * y * (y - 1.0) * (y - 1.0)
                + x * (x - 1.0) * (5.0 * y * y - 5.0 * y + 1.0))
            + 12.0
                * x
                * (x - 1.0)
                * (5.0 * y * y - 5.0 * y + 1.0)
                * (2.0 * x * x * (x - 1.0) * (x - 1.0)
                    + y * (y - 1.0) * (5.0 * x * x - 5.0 * x + 1.0)))
    };

    Problem {
        id: 1,
        domain: Domain::UnitSquare,
        w: Box::new(w),
        grad_w: Box::new(grad_w),
        theta: Box::new(theta),
        load: Box::new(load),
        w_degree: 12,
        theta_degree: 10,
        load_degree: 8,
        gamma_degree: 10,
        params,
    }
}

/// Radially symmetric solution on the unit disk under unit load; the shear
/// stress is exactly -(x, y)/2.
pub fn problem2(params: PlateParams) -> Problem {
    let d = params.bending_d();
    let lam = params.shear_lambda();
    let t2 = params.thickness * params.thickness;

    let theta = move |p: Point| {
        let r2m1 = p.x * p.x + p.y * p.y - 1.0;
        (p.x * r2m1 / (16.0 * d), p.y * r2m1 / (16.0 * d))
    };

    let w = move |p: Point| {
        let r2 = p.x * p.x + p.y * p.y;
        r2 * r2 / (64.0 * d) - (r2 - 1.0) * (t2 / (4.0 * lam) + 1.0 / (32.0 * d))
            - 1.0 / (64.0 * d)
    };

    let grad_w = move |p: Point| {
        let r2 = p.x * p.x + p.y * p.y;
        let f = r2 / (16.0 * d) - 2.0 * (t2 / (4.0 * lam) + 1.0 / (32.0 * d));
        (p.x * f, p.y * f)
    };

    Problem {
        id: 2,
        domain: Domain::UnitDisk,
        w: Box::new(w),
        grad_w: Box::new(grad_w),
        theta: Box::new(theta),
        load: Box::new(|_| 1.0),
        w_degree: 4,
        theta_degree: 3,
        load_degree: 0,
        gamma_degree: 1,
        params,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_invariants() {
        let p = PlateParams::with_thickness(1.0);
        assert!((p.bending_d() - 0.1).abs() < 1e-15);
        assert!((p.shear_lambda() - 0.35).abs() < 1e-15);
        assert!(PlateParams::new(1.0, 0.6, 1.0, 1.0).is_err());
        assert!(PlateParams::new(1.0, 0.3, 1.0, 0.0).is_err());
    }

    #[test]
    fn bending_tensor_closed_forms() {
        let params = PlateParams::with_thickness(1.0);
        let d = params.bending_d();
        let nu = params.poisson;
        // identity maps to D (1 + nu) I
        let out = apply_bending_tensor(
            SymTensor {
                xx: 1.0,
                yy: 1.0,
                xy: 0.0,
            },
            &params,
        );
        assert!((out.xx - d * (1.0 + nu)).abs() < 1e-15);
        assert!((out.yy - d * (1.0 + nu)).abs() < 1e-15);
        assert!(out.xy.abs() < 1e-15);
        // traceless shear scales by D (1 - nu)
        let out = apply_bending_tensor(
            SymTensor {
                xx: 0.0,
                yy: 0.0,
                xy: 1.0,
            },
            &params,
        );
        assert!((out.xy - d * (1.0 - nu)).abs() < 1e-15);
    }

    #[test]
    fn bending_matrix_eigenvalues_in_orthonormal_tensor_basis() {
        // In the basis {e11, e22, sqrt(2) e12} the operator matrix is
        // symmetric with eigenvalues {D(1+nu), D(1-nu), D(1-nu)}.
        let params = PlateParams::with_thickness(1.0);
        let d = params.bending_d();
        let nu = params.poisson;
        let basis = [
            SymTensor { xx: 1.0, yy: 0.0, xy: 0.0 },
            SymTensor { xx: 0.0, yy: 1.0, xy: 0.0 },
            SymTensor {
                xx: 0.0,
                yy: 0.0,
                xy: std::f64::consts::FRAC_1_SQRT_2,
            },
        ];
        let mut m = nalgebra::Matrix3::zeros();
        for (j, &b) in basis.iter().enumerate() {
            let img = apply_bending_tensor(b, &params);
            for (i, &a) in basis.iter().enumerate() {
                m[(i, j)] = img.ddot(a);
            }
        }
        let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        assert!((eig[0] - d * (1.0 - nu)).abs() < 1e-14);
        assert!((eig[1] - d * (1.0 - nu)).abs() < 1e-14);
        assert!((eig[2] - d * (1.0 + nu)).abs() < 1e-14);
    }

    #[test]
    fn bending_tensor_self_adjoint_on_random_pairs() {
        let params = PlateParams::with_thickness(0.5);
        let mut state = 42u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for _ in 0..25 {
            let a = SymTensor { xx: next(), yy: next(), xy: next() };
            let b = SymTensor { xx: next(), yy: next(), xy: next() };
            let lhs = apply_bending_tensor(a, &params).ddot(b);
            let rhs = a.ddot(apply_bending_tensor(b, &params));
            assert!((lhs - rhs).abs() < 1e-14 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn problem1_printed_formula_values() {
        let params = PlateParams::with_thickness(1.0);
        let pr = problem1(params);
        // first rotation component vanishes on the line x = 1/2
        for y in [0.1, 0.37, 0.92] {
            let (tx, _) = (pr.theta)(Point::new(0.5, y));
            assert_eq!(tx, 0.0);
        }
        // clamped boundary
        for s in [0.0, 0.3, 0.75, 1.0] {
            for p in [
                Point::new(s, 0.0),
                Point::new(s, 1.0),
                Point::new(0.0, s),
                Point::new(1.0, s),
            ] {
                assert!((pr.w)(p).abs() < 1e-13);
                let (tx, ty) = (pr.theta)(p);
                assert!(tx.abs() < 1e-13 && ty.abs() < 1e-13);
            }
        }
        // double-entry transcription oracle for the load at the center:
        // D = 0.1 and each bracket evaluates to 0.140625 at (1/2, 1/2)
        let g = (pr.load)(Point::new(0.5, 0.5));
        assert!((g - 0.028125).abs() < 1e-15);
    }

    /// Central finite differences of 4th order for the residual checks.
    fn d1(f: &dyn Fn(Point) -> f64, p: Point, dx: Point, h: f64) -> f64 {
        let at = |s: f64| f(Point::new(p.x + s * dx.x, p.y + s * dx.y));
        (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
    }

    fn strong_form_residual(pr: &Problem, p: Point) -> (f64, f64, f64) {
        let params = &pr.params;
        let h = 1e-3;
        let ex = Point::new(1.0, 0.0);
        let ey = Point::new(0.0, 1.0);
        // C eps(theta) components as functions of position
        let ctensor = |p: Point| -> SymTensor {
            let txx = d1(&|q| (pr.theta)(q).0, p, ex, h);
            let tyy = d1(&|q| (pr.theta)(q).1, p, ey, h);
            let txy = 0.5
                * (d1(&|q| (pr.theta)(q).0, p, ey, h) + d1(&|q| (pr.theta)(q).1, p, ex, h));
            apply_bending_tensor(SymTensor { xx: txx, yy: tyy, xy: txy }, params)
        };
        let div_c_x = d1(&|q| ctensor(q).xx, p, ex, h) + d1(&|q| ctensor(q).xy, p, ey, h);
        let div_c_y = d1(&|q| ctensor(q).xy, p, ex, h) + d1(&|q| ctensor(q).yy, p, ey, h);
        let (gx, gy) = pr.gamma(p);
        let _ = (gx, gy);
        let r1x = -div_c_x - pr.gamma(p).0;
        let r1y = -div_c_y - pr.gamma(p).1;
        let div_gamma = d1(&|q| pr.gamma(q).0, p, ex, h) + d1(&|q| pr.gamma(q).1, p, ey, h);
        let r2 = -div_gamma - (pr.load)(p);
        (r1x, r1y, r2)
    }

    #[test]
    fn strong_form_residuals_vanish() {
        let pts_square = [
            Point::new(0.21, 0.33),
            Point::new(0.5, 0.5),
            Point::new(0.68, 0.12),
            Point::new(0.86, 0.79),
            Point::new(0.13, 0.88),
        ];
        for t in [1.0, 0.01] {
            let pr = problem1(PlateParams::with_thickness(t));
            // scale of the load sets the residual scale
            let scale = pts_square
                .iter()
                .map(|&p| (pr.load)(p).abs())
                .fold(1e-12, f64::max);
            for &p in &pts_square {
                let (r1x, r1y, r2) = strong_form_residual(&pr, p);
                assert!(r1x.abs() <= 1e-6 * scale.max(1.0), "r1x = {r1x:e} at t = {t}");
                assert!(r1y.abs() <= 1e-6 * scale.max(1.0));
                assert!(r2.abs() <= 1e-6 * scale.max(1.0), "r2 = {r2:e} at t = {t}");
            }
        }
        let pts_disk = [
            Point::new(0.2, 0.1),
            Point::new(-0.4, 0.35),
            Point::new(0.1, -0.6),
            Point::new(0.55, 0.5),
        ];
        for t in [1.0, 0.01] {
            let pr = problem2(PlateParams::with_thickness(t));
            for &p in &pts_disk {
                let (r1x, r1y, r2) = strong_form_residual(&pr, p);
                assert!(r1x.abs() <= 1e-6, "r1x = {r1x:e} at t = {t}");
                assert!(r1y.abs() <= 1e-6);
                assert!(r2.abs() <= 1e-6, "r2 = {r2:e}");
            }
        }
    }

    #[test]
    fn problem2_closed_form_values() {
        for t in [1.0, 0.01] {
            let params = PlateParams::with_thickness(t);
            let pr = problem2(params);
            let (tx, ty) = (pr.theta)(Point::new(0.0, 0.0));
            assert_eq!((tx, ty), (0.0, 0.0));
            // w(0,0) = t^2/(4 lambda) + 1/(32 D) - 1/(64 D)
            let d = params.bending_d();
            let lam = params.shear_lambda();
            let want = t * t / (4.0 * lam) + 1.0 / (32.0 * d) - 1.0 / (64.0 * d);
            assert!(((pr.w)(Point::new(0.0, 0.0)) - want).abs() < 1e-14);
            // vanishes on the circle
            for i in 0..16 {
                let a = 2.0 * std::f64::consts::PI * i as f64 / 16.0;
                let p = Point::new(a.cos(), a.sin());
                assert!((pr.w)(p).abs() < 1e-13);
                let (tx, ty) = (pr.theta)(p);
                assert!(tx.abs() < 1e-14 && ty.abs() < 1e-14);
            }
            // gamma is exactly -(x, y)/2
            let p = Point::new(0.3, -0.4);
            let (gx, gy) = pr.gamma(p);
            assert!((gx + 0.15).abs() < 1e-12);
            assert!((gy - 0.2).abs() < 1e-12);
        }
    }
}
