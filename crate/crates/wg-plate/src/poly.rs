//! Scaled monomial bases on cells, Legendre bases on edges, mass matrices,
//! and L2 projections.
//!
//! Cell bases use ((x-x_c)/h_T)^a ((y-y_c)/h_T)^b in graded-lex order; the
//! centroid/diameter scaling keeps mass matrices well conditioned on small
//! and irregular cells. Edge bases are shifted Legendre polynomials in the
//! normalized arc parameter s in [0,1] along the global edge orientation, so
//! their Gram matrix is diagonal.

use crate::error::{Error, Result};
use crate::mesh::Point;
use crate::quadrature::{self, QuadratureRule};
use nalgebra::{DMatrix, DVector};

/// Dimension of P_r in two variables.
pub fn dim_pr(r: usize) -> usize {
    (r + 1) * (r + 2) / 2
}

/// Scaled monomial basis of P_r(T).
#[derive(Clone, Debug)]
pub struct CellBasis {
    pub centroid: Point,
    pub h: f64,
    pub degree: usize,
    /// (a, b) exponent pairs, graded-lex: degree block by block, x-power
    /// descending within a block.
    exponents: Vec<(u32, u32)>,
}

impl CellBasis {
    pub fn new(centroid: Point, h: f64, degree: usize) -> Self {
        let mut exponents = Vec::with_capacity(dim_pr(degree));
        for d in 0..=degree as u32 {
            for a in (0..=d).rev() {
                exponents.push((a, d - a));
            }
        }
        CellBasis {
            centroid,
            h,
            degree,
            exponents,
        }
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self, i: usize) -> (u32, u32) {
        self.exponents[i]
    }

    fn local(&self, p: Point) -> (f64, f64) {
        (
            (p.x - self.centroid.x) / self.h,
            (p.y - self.centroid.y) / self.h,
        )
    }

    pub fn eval(&self, i: usize, p: Point) -> f64 {
        let (x, y) = self.local(p);
        let (a, b) = self.exponents[i];
        x.powi(a as i32) * y.powi(b as i32)
    }

    /// Gradient of basis member i at p (physical coordinates).
    pub fn grad(&self, i: usize, p: Point) -> Point {
        let (x, y) = self.local(p);
        let (a, b) = self.exponents[i];
        let gx = if a == 0 {
            0.0
        } else {
            a as f64 * x.powi(a as i32 - 1) * y.powi(b as i32)
        };
        let gy = if b == 0 {
            0.0
        } else {
            b as f64 * x.powi(a as i32) * y.powi(b as i32 - 1)
        };
        Point::new(gx / self.h, gy / self.h)
    }

    /// Value table: (dim x points) matrix of basis values at rule points.
    pub fn value_table(&self, points: &[Point]) -> DMatrix<f64> {
        let mut v = DMatrix::zeros(self.dim(), points.len());
        for (jp, &p) in points.iter().enumerate() {
            let (x, y) = self.local(p);
            // powers up to degree, reused across members
            let mut xp = vec![1.0; self.degree + 1];
            let mut yp = vec![1.0; self.degree + 1];
            for d in 1..=self.degree {
                xp[d] = xp[d - 1] * x;
                yp[d] = yp[d - 1] * y;
            }
            for (i, &(a, b)) in self.exponents.iter().enumerate() {
                v[(i, jp)] = xp[a as usize] * yp[b as usize];
            }
        }
        v
    }

    /// Gradient tables (d/dx and d/dy), each (dim x points).
    pub fn gradient_tables(&self, points: &[Point]) -> (DMatrix<f64>, DMatrix<f64>) {
        let mut gx = DMatrix::zeros(self.dim(), points.len());
        let mut gy = DMatrix::zeros(self.dim(), points.len());
        for (jp, &p) in points.iter().enumerate() {
            for i in 0..self.dim() {
                let g = self.grad(i, p);
                gx[(i, jp)] = g.x;
                gy[(i, jp)] = g.y;
            }
        }
        (gx, gy)
    }
}

/// Shifted Legendre basis of P_p(e) in the arc parameter of the globally
/// oriented edge.
#[derive(Clone, Debug)]
pub struct EdgeBasis {
    pub start: Point,
    pub end: Point,
    pub length: f64,
    pub degree: usize,
}

impl EdgeBasis {
    pub fn new(start: Point, end: Point, degree: usize) -> Self {
        EdgeBasis {
            start,
            end,
            length: start.dist(end),
            degree,
        }
    }

    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    /// Arc parameter in [0, 1] of a point on the edge line.
    pub fn arc_parameter(&self, p: Point) -> f64 {
        let d = self.end.sub(self.start);
        p.sub(self.start).dot(d) / (self.length * self.length)
    }

    /// Legendre P_j(2s - 1).
    pub fn eval_at_s(&self, j: usize, s: f64) -> f64 {
        let u = 2.0 * s - 1.0;
        let (mut p0, mut p1) = (1.0, u);
        if j == 0 {
            return 1.0;
        }
        for k in 2..=j {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * u * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        p1
    }

    pub fn eval(&self, j: usize, p: Point) -> f64 {
        self.eval_at_s(j, self.arc_parameter(p))
    }

    /// Diagonal Gram entry: int_e P_j^2 ds = length / (2j + 1).
    pub fn gram_diag(&self, j: usize) -> f64 {
        self.length / (2 * j + 1) as f64
    }

    pub fn value_table(&self, points: &[Point]) -> DMatrix<f64> {
        let mut v = DMatrix::zeros(self.dim(), points.len());
        for (jp, &p) in points.iter().enumerate() {
            for j in 0..self.dim() {
                v[(j, jp)] = self.eval(j, p);
            }
        }
        v
    }
}

/// Coefficients of an L2 projection in its target basis.
#[derive(Clone, Debug)]
pub struct Projection {
    pub coeffs: DVector<f64>,
}

impl Projection {
    pub fn eval_cell(&self, basis: &CellBasis, p: Point) -> f64 {
        (0..basis.dim()).map(|i| self.coeffs[i] * basis.eval(i, p)).sum()
    }

    pub fn eval_edge(&self, basis: &EdgeBasis, p: Point) -> f64 {
        (0..basis.dim()).map(|j| self.coeffs[j] * basis.eval(j, p)).sum()
    }
}

/// Cholesky solver for small SPD systems with a cheap condition estimate and
/// one step of iterative refinement; local weak-operator solves must come out
/// with relative residual <= 1e-12.
pub(crate) struct SpdDense {
    matrix: DMatrix<f64>,
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    pub cond_estimate: f64,
}

pub(crate) const COND_LIMIT: f64 = 1e14;
pub(crate) const RESIDUAL_LIMIT: f64 = 1e-12;

impl SpdDense {
    pub fn new(matrix: DMatrix<f64>, what: &'static str, cell: usize) -> Result<Self> {
        let chol = nalgebra::Cholesky::new(matrix.clone()).ok_or(Error::Conditioning {
            what,
            cell,
            estimate: f64::INFINITY,
        })?;
        let l = chol.l_dirty();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..matrix.nrows() {
            lo = lo.min(l[(i, i)]);
            hi = hi.max(l[(i, i)]);
        }
        let cond_estimate = (hi / lo) * (hi / lo);
        if !cond_estimate.is_finite() || cond_estimate > COND_LIMIT {
            return Err(Error::Conditioning {
                what,
                cell,
                estimate: cond_estimate,
            });
        }
        Ok(SpdDense {
            matrix,
            chol,
            cond_estimate,
        })
    }

    /// Solves M X = B column-wise with one refinement pass; errors out if the
    /// relative residual stays above 1e-12.
    pub fn solve(&self, b: &DMatrix<f64>, what: &'static str, cell: usize) -> Result<DMatrix<f64>> {
        let mut x = self.chol.solve(b);
        let resid = b - &self.matrix * &x;
        x += self.chol.solve(&resid);
        let resid = b - &self.matrix * &x;
        let scale = b.norm().max(1e-300);
        let rel = resid.norm() / scale;
        if rel > RESIDUAL_LIMIT {
            return Err(Error::Conditioning {
                what,
                cell,
                estimate: self.cond_estimate,
            });
        }
        Ok(x)
    }
}

/// Mass matrix M_ij = int_T phi_i phi_j over the polygonal cell.
pub fn mass_matrix(polygon: &[Point], basis: &CellBasis) -> Result<DMatrix<f64>> {
    let rule = quadrature::polygon_rule(polygon, 2 * basis.degree)?;
    Ok(mass_from_rule(basis, &rule))
}

pub(crate) fn mass_from_rule(basis: &CellBasis, rule: &QuadratureRule) -> DMatrix<f64> {
    let v = basis.value_table(&rule.points);
    let mut vw = v.clone();
    for (j, mut col) in vw.column_iter_mut().enumerate() {
        col *= rule.weights[j];
    }
    let m = &vw * v.transpose();
    // enforce exact symmetry against rounding in the products
    let mut sym = m.clone();
    for i in 0..sym.nrows() {
        for j in 0..i {
            let a = 0.5 * (m[(i, j)] + m[(j, i)]);
            sym[(i, j)] = a;
            sym[(j, i)] = a;
        }
    }
    sym
}

/// L2 projection of `f` onto P_r(T) in the given cell basis. `f_degree` is
/// the polynomial degree of `f` (or an effective degree for smooth data); the
/// quadrature is exact for `f * phi_i` up to that degree.
pub fn l2_project_cell(
    polygon: &[Point],
    f: impl Fn(Point) -> f64,
    basis: &CellBasis,
    f_degree: usize,
) -> Result<Projection> {
    let rule = quadrature::polygon_rule(
        polygon,
        (2 * basis.degree).max(basis.degree + f_degree),
    )?;
    let m = mass_from_rule(basis, &rule);
    let chol = SpdDense::new(m, "cell mass matrix", usize::MAX)?;
    let mut b = DVector::zeros(basis.dim());
    for (jp, &p) in rule.points.iter().enumerate() {
        let fw = f(p) * rule.weights[jp];
        for i in 0..basis.dim() {
            b[i] += fw * basis.eval(i, p);
        }
    }
    let b = DMatrix::from_column_slice(basis.dim(), 1, b.as_slice());
    let x = chol.solve(&b, "cell L2 projection", usize::MAX)?;
    Ok(Projection {
        coeffs: DVector::from_column_slice(x.as_slice()),
    })
}

/// L2 projection of `f` onto P_p(e); the Legendre Gram matrix is diagonal so
/// no solve is needed.
pub fn l2_project_edge(
    basis: &EdgeBasis,
    f: impl Fn(Point) -> f64,
    f_degree: usize,
) -> Projection {
    let rule = quadrature::edge_rule(basis.start, basis.end, basis.degree + f_degree);
    let mut coeffs = DVector::zeros(basis.dim());
    for j in 0..basis.dim() {
        let num: f64 = rule
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(&p, &w)| w * f(p) * basis.eval(j, p))
            .sum();
        coeffs[j] = num / basis.gram_diag(j);
    }
    Projection { coeffs }
}
