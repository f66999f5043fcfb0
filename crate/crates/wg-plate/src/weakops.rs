//! Per-cell operator matrices on local weak-function degrees of freedom:
//! the discrete weak gradient, the discrete weak symmetric gradient, the
//! interior rotation projection, and the displacement edge-jump stabilizer.
//!
//! Local DOF layout. Displacement w on cell T: interior coefficients of
//! P_k(T), then one block of p+1 edge coefficients per edge in cell-loop
//! order. Rotation theta: interior x-component then y-component coefficients
//! of P_q(T), then per edge m+1 x-coefficients followed by m+1
//! y-coefficients. Edge coefficients are Legendre coefficients in the global
//! edge orientation, so the two cells sharing an edge see identical DOFs.
//!
//! Operator matrices:
//! - `g` (2*dim P_r1 x n_w): weak-gradient coefficients [x-block; y-block]
//! - `e` (3*dim P_r2 x n_theta): weak symmetric gradient coefficients in the
//!   tensor component order (11, 22, 12); inner products weight the shared
//!   off-diagonal component by 2
//! - `pint` (2*dim P_r1 x n_theta): L2 projection of the interior rotation
//! - `s` (n_w x n_w): h_T^{-1} <w_0 - w_b, v_0 - v_b> over the cell boundary

use crate::error::Result;
use crate::mesh::{Mesh, Point};
use crate::poly::{dim_pr, CellBasis, EdgeBasis, SpdDense};
use crate::quadrature;
use nalgebra::DMatrix;

/// The degree tuple (k, p, r1; q, m, r2) of the local spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeakDegrees {
    /// Interior displacement degree.
    pub k: usize,
    /// Edge displacement degree.
    pub p: usize,
    /// Weak-gradient target degree.
    pub r1: usize,
    /// Interior rotation degree.
    pub q: usize,
    /// Edge rotation degree.
    pub m: usize,
    /// Weak-symmetric-gradient target degree.
    pub r2: usize,
}

/// How r1/r2 are chosen per cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradientDegreeRule {
    /// Use the configured r1/r2 on every cell (the table defaults).
    Fixed,
    /// r1 = r2 = N + k - 1 on convex cells and 2N + k - 1 on non-convex
    /// cells, N the edge count. Much larger local spaces; exposed as a named
    /// preset, not the default.
    EdgeCount,
}

/// Degree configuration for the whole mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeakSpaceConfig {
    pub degrees: WeakDegrees,
    pub rule: GradientDegreeRule,
}

impl WeakSpaceConfig {
    pub fn fixed(degrees: WeakDegrees) -> Self {
        WeakSpaceConfig {
            degrees,
            rule: GradientDegreeRule::Fixed,
        }
    }

    /// Effective degrees on one cell.
    pub fn degrees_for_cell(&self, mesh: &Mesh, cell: usize) -> WeakDegrees {
        match self.rule {
            GradientDegreeRule::Fixed => self.degrees,
            GradientDegreeRule::EdgeCount => {
                let n = mesh.cells[cell].n_edges();
                let convex = mesh.reflex_vertices(cell).is_empty();
                let r = if convex {
                    n + self.degrees.k - 1
                } else {
                    2 * n + self.degrees.k - 1
                };
                WeakDegrees {
                    r1: r,
                    r2: r,
                    ..self.degrees
                }
            }
        }
    }
}

/// Offsets of the local DOF blocks.
#[derive(Clone, Debug)]
pub struct LocalDofLayout {
    pub dim_k: usize,
    pub dim_q: usize,
    /// Edge block size p+1 for w.
    pub w_edge: usize,
    /// Edge block size m+1 per component for theta.
    pub theta_edge: usize,
    pub n_edges: usize,
    pub n_w: usize,
    pub n_theta: usize,
}

impl LocalDofLayout {
    pub fn new(degrees: &WeakDegrees, n_edges: usize) -> Self {
        let dim_k = dim_pr(degrees.k);
        let dim_q = dim_pr(degrees.q);
        let w_edge = degrees.p + 1;
        let theta_edge = degrees.m + 1;
        LocalDofLayout {
            dim_k,
            dim_q,
            w_edge,
            theta_edge,
            n_edges,
            n_w: dim_k + n_edges * w_edge,
            n_theta: 2 * dim_q + n_edges * 2 * theta_edge,
        }
    }

    pub fn w_interior(&self, i: usize) -> usize {
        i
    }

    pub fn w_edge_dof(&self, edge: usize, j: usize) -> usize {
        self.dim_k + edge * self.w_edge + j
    }

    /// comp 0 = x, comp 1 = y.
    pub fn theta_interior(&self, comp: usize, i: usize) -> usize {
        comp * self.dim_q + i
    }

    pub fn theta_edge_dof(&self, edge: usize, comp: usize, j: usize) -> usize {
        2 * self.dim_q + edge * 2 * self.theta_edge + comp * self.theta_edge + j
    }
}

/// Geometry and basis tables shared by the operator constructors.
struct CellTables {
    polygon: Vec<Point>,
    cell_rule: quadrature::QuadratureRule,
    v_k: DMatrix<f64>,
    gx_k: DMatrix<f64>,
    gy_k: DMatrix<f64>,
    v_q: DMatrix<f64>,
    gx_q: DMatrix<f64>,
    gy_q: DMatrix<f64>,
    v_r1: DMatrix<f64>,
    v_r2: DMatrix<f64>,
    /// Per cell edge: rule, normal, trace tables of P_k / P_q / P_r1 / P_r2,
    /// and edge bases of degree p / m.
    edges: Vec<EdgeTables>,
}

struct EdgeTables {
    rule: quadrature::QuadratureRule,
    normal: Point,
    v_k: DMatrix<f64>,
    v_q: DMatrix<f64>,
    v_r1: DMatrix<f64>,
    v_r2: DMatrix<f64>,
    v_p: DMatrix<f64>,
    v_m: DMatrix<f64>,
}

/// Scales the columns of a value table by quadrature weights.
fn weighted(table: &DMatrix<f64>, weights: &[f64]) -> DMatrix<f64> {
    let mut out = table.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col *= weights[j];
    }
    out
}

fn symmetrize(m: &mut DMatrix<f64>) {
    for i in 0..m.nrows() {
        for j in 0..i {
            let a = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = a;
            m[(j, i)] = a;
        }
    }
}

/// Dense per-cell realizations of the weak operators.
#[derive(Clone, Debug)]
pub struct LocalOperators {
    pub cell: usize,
    pub degrees: WeakDegrees,
    pub layout: LocalDofLayout,
    pub h_t: f64,
    pub basis_k: CellBasis,
    pub basis_q: CellBasis,
    pub basis_r1: CellBasis,
    pub basis_r2: CellBasis,
    pub mass_k: DMatrix<f64>,
    pub mass_q: DMatrix<f64>,
    pub mass_r1: DMatrix<f64>,
    pub mass_r2: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub e: DMatrix<f64>,
    pub pint: DMatrix<f64>,
    pub s: DMatrix<f64>,
}

impl LocalOperators {
    pub fn build(mesh: &Mesh, cell: usize, degrees: WeakDegrees) -> Result<Self> {
        let WeakDegrees { k, p, r1, q, m, r2 } = degrees;
        let c = &mesh.cells[cell];
        let h_t = c.diameter;
        let basis_k = CellBasis::new(c.centroid, h_t, k);
        let basis_q = CellBasis::new(c.centroid, h_t, q);
        let basis_r1 = CellBasis::new(c.centroid, h_t, r1);
        let basis_r2 = CellBasis::new(c.centroid, h_t, r2);
        let layout = LocalDofLayout::new(&degrees, c.n_edges());

        let tables = {
            let polygon = mesh.cell_points(cell);
            let vol_degree =
                (r1 + r2 + 2 * k.max(q) + 2).max(2 * r1.max(r2).max(k).max(q));
            let cell_rule = quadrature::polygon_rule(&polygon, vol_degree)?;
            let v_k = basis_k.value_table(&cell_rule.points);
            let (gx_k, gy_k) = basis_k.gradient_tables(&cell_rule.points);
            let v_q = basis_q.value_table(&cell_rule.points);
            let (gx_q, gy_q) = basis_q.gradient_tables(&cell_rule.points);
            let v_r1 = basis_r1.value_table(&cell_rule.points);
            let v_r2 = basis_r2.value_table(&cell_rule.points);

            let edge_degree = r1.max(r2).max(k).max(q) + p.max(m).max(k).max(q);
            let edges = mesh.cell_edges[cell]
                .iter()
                .map(|&(e, _)| {
                    let (a, b) = mesh.edge_points(e);
                    let rule = quadrature::edge_rule(a, b, edge_degree);
                    let normal = mesh.edges[e]
                        .normal_for(cell)
                        .expect("edge incident to cell");
                    let ep = EdgeBasis::new(a, b, p);
                    let em = EdgeBasis::new(a, b, m);
                    EdgeTables {
                        v_k: basis_k.value_table(&rule.points),
                        v_q: basis_q.value_table(&rule.points),
                        v_r1: basis_r1.value_table(&rule.points),
                        v_r2: basis_r2.value_table(&rule.points),
                        v_p: ep.value_table(&rule.points),
                        v_m: em.value_table(&rule.points),
                        rule,
                        normal,
                    }
                })
                .collect();
            CellTables {
                polygon,
                cell_rule,
                v_k,
                gx_k,
                gy_k,
                v_q,
                gx_q,
                gy_q,
                v_r1,
                v_r2,
                edges,
            }
        };
        let _ = &tables.polygon;

        let w = &tables.cell_rule.weights;
        let mut mass_k = &weighted(&tables.v_k, w) * tables.v_k.transpose();
        let mut mass_q = &weighted(&tables.v_q, w) * tables.v_q.transpose();
        let mut mass_r1 = &weighted(&tables.v_r1, w) * tables.v_r1.transpose();
        let mut mass_r2 = &weighted(&tables.v_r2, w) * tables.v_r2.transpose();
        for m in [&mut mass_k, &mut mass_q, &mut mass_r1, &mut mass_r2] {
            symmetrize(m);
        }

        let chol_r1 = SpdDense::new(mass_r1.clone(), "P_r1 mass matrix", cell)?;
        let chol_r2 = SpdDense::new(mass_r2.clone(), "P_r2 mass matrix", cell)?;

        let g = build_weak_gradient(&tables, &layout, &chol_r1, cell)?;
        let e = build_weak_sym_gradient(&tables, &layout, &chol_r2, cell)?;
        let pint = build_interior_projection(&tables, &layout, &chol_r1, q, r1, cell)?;
        let s = build_stabilizer(&tables, &layout, h_t);

        Ok(LocalOperators {
            cell,
            degrees,
            layout,
            h_t,
            basis_k,
            basis_q,
            basis_r1,
            basis_r2,
            mass_k,
            mass_q,
            mass_r1,
            mass_r2,
            g,
            e,
            pint,
            s,
        })
    }

    /// Block-diagonal vector mass [M_r1, M_r1] applied as two scalar solves
    /// is never needed; energies contract G/E against the scalar masses.
    pub fn dim_r1(&self) -> usize {
        self.basis_r1.dim()
    }

    pub fn dim_r2(&self) -> usize {
        self.basis_r2.dim()
    }
}

/// Weak gradient: columns solve (grad_w, q)_T = (grad w_0, q)_T
/// + <w_b - w_0, q.n>_dT for each unit DOF.
fn build_weak_gradient(
    t: &CellTables,
    layout: &LocalDofLayout,
    chol_r1: &SpdDense,
    cell: usize,
) -> Result<DMatrix<f64>> {
    let dim_r1 = t.v_r1.nrows();
    let mut bx = DMatrix::zeros(dim_r1, layout.n_w);
    let mut by = DMatrix::zeros(dim_r1, layout.n_w);

    // interior columns: volume term (grad phi_j, q)
    let vw_r1 = weighted(&t.v_r1, &t.cell_rule.weights);
    bx.view_mut((0, 0), (dim_r1, layout.dim_k))
        .copy_from(&(&vw_r1 * t.gx_k.transpose()));
    by.view_mut((0, 0), (dim_r1, layout.dim_k))
        .copy_from(&(&vw_r1 * t.gy_k.transpose()));

    for (le, et) in t.edges.iter().enumerate() {
        let vw = weighted(&et.v_r1, &et.rule.weights);
        // -<w_0, q.n> for interior DOFs
        let minus_trace = &vw * et.v_k.transpose();
        bx.view_mut((0, 0), (dim_r1, layout.dim_k))
            .sub_assign_scaled(&minus_trace, et.normal.x);
        by.view_mut((0, 0), (dim_r1, layout.dim_k))
            .sub_assign_scaled(&minus_trace, et.normal.y);
        // +<w_b, q.n> for this edge's DOFs
        let eb = &vw * et.v_p.transpose();
        let col0 = layout.w_edge_dof(le, 0);
        bx.view_mut((0, col0), (dim_r1, layout.w_edge))
            .add_assign_scaled(&eb, et.normal.x);
        by.view_mut((0, col0), (dim_r1, layout.w_edge))
            .add_assign_scaled(&eb, et.normal.y);
    }

    let gx = chol_r1.solve(&bx, "weak gradient solve", cell)?;
    let gy = chol_r1.solve(&by, "weak gradient solve", cell)?;
    let mut g = DMatrix::zeros(2 * dim_r1, layout.n_w);
    g.view_mut((0, 0), (dim_r1, layout.n_w)).copy_from(&gx);
    g.view_mut((dim_r1, 0), (dim_r1, layout.n_w)).copy_from(&gy);
    Ok(g)
}

/// Weak symmetric gradient in component order (11, 22, 12); the 12 block is
/// solved against 2 M_r2 because the off-diagonal component is stored once.
fn build_weak_sym_gradient(
    t: &CellTables,
    layout: &LocalDofLayout,
    chol_r2: &SpdDense,
    cell: usize,
) -> Result<DMatrix<f64>> {
    let dim_r2 = t.v_r2.nrows();
    let n = layout.n_theta;
    let mut b11 = DMatrix::zeros(dim_r2, n);
    let mut b22 = DMatrix::zeros(dim_r2, n);
    let mut b12 = DMatrix::zeros(dim_r2, n);
    let dq = layout.dim_q;

    let vw_r2 = weighted(&t.v_r2, &t.cell_rule.weights);
    // interior x-component: eps = [[dx phi, dy phi / 2], [dy phi / 2, 0]]
    let ix = &vw_r2 * t.gx_q.transpose();
    let iy = &vw_r2 * t.gy_q.transpose();
    b11.view_mut((0, 0), (dim_r2, dq)).copy_from(&ix);
    b12.view_mut((0, 0), (dim_r2, dq)).copy_from(&iy);
    // interior y-component
    b22.view_mut((0, dq), (dim_r2, dq)).copy_from(&iy);
    b12.view_mut((0, dq), (dim_r2, dq)).copy_from(&ix);

    for (le, et) in t.edges.iter().enumerate() {
        let vw = weighted(&et.v_r2, &et.rule.weights);
        let trace_q = &vw * et.v_q.transpose();
        let (nx, ny) = (et.normal.x, et.normal.y);
        // -<eta_0, tau.n>
        b11.view_mut((0, 0), (dim_r2, dq))
            .sub_assign_scaled(&trace_q, nx);
        b12.view_mut((0, 0), (dim_r2, dq))
            .sub_assign_scaled(&trace_q, ny);
        b22.view_mut((0, dq), (dim_r2, dq))
            .sub_assign_scaled(&trace_q, ny);
        b12.view_mut((0, dq), (dim_r2, dq))
            .sub_assign_scaled(&trace_q, nx);
        // +<eta_b, tau.n>
        let eb = &vw * et.v_m.transpose();
        let cx = layout.theta_edge_dof(le, 0, 0);
        let cy = layout.theta_edge_dof(le, 1, 0);
        let te = layout.theta_edge;
        b11.view_mut((0, cx), (dim_r2, te)).add_assign_scaled(&eb, nx);
        b12.view_mut((0, cx), (dim_r2, te)).add_assign_scaled(&eb, ny);
        b22.view_mut((0, cy), (dim_r2, te)).add_assign_scaled(&eb, ny);
        b12.view_mut((0, cy), (dim_r2, te)).add_assign_scaled(&eb, nx);
    }

    let c11 = chol_r2.solve(&b11, "weak symmetric gradient solve", cell)?;
    let c22 = chol_r2.solve(&b22, "weak symmetric gradient solve", cell)?;
    let c12 = chol_r2.solve(&b12, "weak symmetric gradient solve", cell)? * 0.5;
    let mut e = DMatrix::zeros(3 * dim_r2, n);
    e.view_mut((0, 0), (dim_r2, n)).copy_from(&c11);
    e.view_mut((dim_r2, 0), (dim_r2, n)).copy_from(&c22);
    e.view_mut((2 * dim_r2, 0), (dim_r2, n)).copy_from(&c12);
    Ok(e)
}

/// Componentwise L2 projection of the interior rotation onto [P_r1]^2; zero
/// on edge blocks. For q <= r1 the scaled bases nest, so the projection is
/// the exact coefficient inclusion.
fn build_interior_projection(
    t: &CellTables,
    layout: &LocalDofLayout,
    chol_r1: &SpdDense,
    q: usize,
    r1: usize,
    cell: usize,
) -> Result<DMatrix<f64>> {
    let dim_r1 = t.v_r1.nrows();
    let dq = layout.dim_q;
    let mut pint = DMatrix::zeros(2 * dim_r1, layout.n_theta);
    if q <= r1 {
        for j in 0..dq {
            pint[(j, j)] = 1.0;
            pint[(dim_r1 + j, dq + j)] = 1.0;
        }
        return Ok(pint);
    }
    let b = &weighted(&t.v_r1, &t.cell_rule.weights) * t.v_q.transpose();
    let c = chol_r1.solve(&b, "interior projection solve", cell)?;
    pint.view_mut((0, 0), (dim_r1, dq)).copy_from(&c);
    pint.view_mut((dim_r1, dq), (dim_r1, dq)).copy_from(&c);
    Ok(pint)
}

/// Displacement stabilizer h_T^{-1} <w_0 - w_b, v_0 - v_b>_dT.
fn build_stabilizer(t: &CellTables, layout: &LocalDofLayout, h_t: f64) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(layout.n_w, layout.n_w);
    for (le, et) in t.edges.iter().enumerate() {
        let npts = et.rule.points.len();
        let mut diff = DMatrix::zeros(layout.n_w, npts);
        diff.view_mut((0, 0), (layout.dim_k, npts)).copy_from(&et.v_k);
        let col0 = layout.w_edge_dof(le, 0);
        let mut block = diff.view_mut((col0, 0), (layout.w_edge, npts));
        block.copy_from(&et.v_p);
        block.neg_mut();
        s += &weighted(&diff, &et.rule.weights) * diff.transpose();
    }
    s /= h_t;
    symmetrize(&mut s);
    s
}

trait AddAssignScaled {
    fn add_assign_scaled(&mut self, other: &DMatrix<f64>, scale: f64);
    fn sub_assign_scaled(&mut self, other: &DMatrix<f64>, scale: f64) {
        self.add_assign_scaled(other, -scale);
    }
}

impl AddAssignScaled for nalgebra::DMatrixViewMut<'_, f64> {
    fn add_assign_scaled(&mut self, other: &DMatrix<f64>, scale: f64) {
        self.zip_apply(other, |a, b| *a += scale * b);
    }
}

/// Weak-gradient matrix for the displacement space W(k, p, T).
pub fn weak_gradient_matrix(
    mesh: &Mesh,
    cell: usize,
    k: usize,
    p: usize,
    r1: usize,
) -> Result<DMatrix<f64>> {
    let ops = LocalOperators::build(
        mesh,
        cell,
        WeakDegrees {
            k,
            p,
            r1,
            q: 0,
            m: 0,
            r2: 0,
        },
    )?;
    Ok(ops.g)
}

/// Weak symmetric gradient matrix for the rotation space Theta(q, m, T).
pub fn weak_sym_gradient_matrix(
    mesh: &Mesh,
    cell: usize,
    q: usize,
    m: usize,
    r2: usize,
) -> Result<DMatrix<f64>> {
    let ops = LocalOperators::build(
        mesh,
        cell,
        WeakDegrees {
            k: 0,
            p: 0,
            r1: 0,
            q,
            m,
            r2,
        },
    )?;
    Ok(ops.e)
}

/// Projection matrix of interior rotation coefficients onto [P_r1]^2.
pub fn interior_projection_matrix(
    mesh: &Mesh,
    cell: usize,
    q: usize,
    r1: usize,
) -> Result<DMatrix<f64>> {
    let ops = LocalOperators::build(
        mesh,
        cell,
        WeakDegrees {
            k: 0,
            p: 0,
            r1,
            q,
            m: 0,
            r2: 0,
        },
    )?;
    Ok(ops.pint)
}

/// Stabilizer matrix for W(k, p, T).
pub fn stabilizer_matrix(mesh: &Mesh, cell: usize, k: usize, p: usize) -> Result<DMatrix<f64>> {
    let ops = LocalOperators::build(
        mesh,
        cell,
        WeakDegrees {
            k,
            p,
            r1: 0,
            q: 0,
            m: 0,
            r2: 0,
        },
    )?;
    Ok(ops.s)
}
