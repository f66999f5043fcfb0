//! Global DOF management, per-cell stiffness blocks, essential boundary
//! conditions, and sparse SPD system construction.
//!
//! Global DOF order: all displacement DOFs, then all rotation DOFs. Within
//! each field: cell interior blocks in cell order, then edge blocks in edge
//! order. Interior-edge blocks are shared by both incident cells through a
//! single global index; boundary-edge blocks are the constrained set.
//!
//! The stiffness matrix is assembled in its lower triangle only (it is
//! symmetric by construction); per-cell blocks are computed in parallel and
//! scattered serially in cell order so the result does not depend on the
//! worker count.

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::poly::{dim_pr, EdgeBasis};
use crate::quadrature;
use crate::rm_model::{PlateParams, Problem};
use crate::weakops::{LocalOperators, WeakSpaceConfig};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

/// Global index layout for W_h x Theta_h.
#[derive(Clone, Debug)]
pub struct DofMap {
    pub n_cells: usize,
    pub n_edges: usize,
    pub dim_k: usize,
    pub dim_q: usize,
    /// p + 1 displacement coefficients per edge.
    pub w_edge_block: usize,
    /// m + 1 rotation coefficients per edge and component.
    pub theta_edge_block: usize,
    pub n_w: usize,
    pub n_theta: usize,
    pub total: usize,
    /// Sorted global indices of boundary-edge DOFs (the essential set).
    pub constrained: Vec<usize>,
}

impl DofMap {
    pub fn build(mesh: &Mesh, config: &WeakSpaceConfig) -> DofMap {
        let d = config.degrees;
        let (nc, ne) = (mesh.cells.len(), mesh.edges.len());
        let dim_k = dim_pr(d.k);
        let dim_q = dim_pr(d.q);
        let w_edge_block = d.p + 1;
        let theta_edge_block = d.m + 1;
        let n_w = nc * dim_k + ne * w_edge_block;
        let n_theta = 2 * (nc * dim_q + ne * theta_edge_block);
        let mut map = DofMap {
            n_cells: nc,
            n_edges: ne,
            dim_k,
            dim_q,
            w_edge_block,
            theta_edge_block,
            n_w,
            n_theta,
            total: n_w + n_theta,
            constrained: Vec::new(),
        };
        let mut constrained = Vec::new();
        for &e in &mesh.boundary_edges {
            for j in 0..w_edge_block {
                constrained.push(map.w_edge(e, j));
            }
            for comp in 0..2 {
                for j in 0..theta_edge_block {
                    constrained.push(map.theta_edge(e, comp, j));
                }
            }
        }
        constrained.sort_unstable();
        map.constrained = constrained;
        map
    }

    pub fn w_interior(&self, cell: usize, i: usize) -> usize {
        cell * self.dim_k + i
    }

    pub fn w_edge(&self, edge: usize, j: usize) -> usize {
        self.n_cells * self.dim_k + edge * self.w_edge_block + j
    }

    pub fn theta_interior(&self, cell: usize, comp: usize, i: usize) -> usize {
        self.n_w + cell * 2 * self.dim_q + comp * self.dim_q + i
    }

    pub fn theta_edge(&self, edge: usize, comp: usize, j: usize) -> usize {
        self.n_w
            + self.n_cells * 2 * self.dim_q
            + edge * 2 * self.theta_edge_block
            + comp * self.theta_edge_block
            + j
    }

    /// Scatter map from a cell's local DOF order (as in
    /// [`crate::weakops::LocalDofLayout`]) to global indices.
    pub fn local_to_global(&self, mesh: &Mesh, cell: usize) -> Vec<usize> {
        let edges = &mesh.cell_edges[cell];
        let mut map = Vec::with_capacity(
            self.dim_k
                + edges.len() * self.w_edge_block
                + 2 * self.dim_q
                + edges.len() * 2 * self.theta_edge_block,
        );
        for i in 0..self.dim_k {
            map.push(self.w_interior(cell, i));
        }
        for &(e, _) in edges {
            for j in 0..self.w_edge_block {
                map.push(self.w_edge(e, j));
            }
        }
        for comp in 0..2 {
            for i in 0..self.dim_q {
                map.push(self.theta_interior(cell, comp, i));
            }
        }
        for &(e, _) in edges {
            for comp in 0..2 {
                for j in 0..self.theta_edge_block {
                    map.push(self.theta_edge(e, comp, j));
                }
            }
        }
        map
    }
}

/// Symmetric stiffness block of one cell on [w-DOFs; theta-DOFs]:
/// bending E^T M_C E, shear lambda t^-2 [G | -Pint]^T [M_r1, M_r1] [G | -Pint],
/// and the displacement stabilizer.
pub fn local_stiffness(ops: &LocalOperators, params: &PlateParams) -> Result<DMatrix<f64>> {
    let (n_w, n_theta) = (ops.layout.n_w, ops.layout.n_theta);
    let n = n_w + n_theta;
    let dim_r1 = ops.dim_r1();
    let dim_r2 = ops.dim_r2();
    if ops.g.ncols() != n_w || ops.e.ncols() != n_theta || ops.pint.ncols() != n_theta {
        return Err(Error::Internal(
            "local operator dimensions disagree with the DOF layout".into(),
        ));
    }

    let mut block = DMatrix::zeros(n, n);

    // shear: D = [G | -Pint], energy lambda t^-2 D^T blkdiag(M_r1, M_r1) D
    let shear = params.shear_weight();
    let mut d = DMatrix::zeros(2 * dim_r1, n);
    d.view_mut((0, 0), (2 * dim_r1, n_w)).copy_from(&ops.g);
    d.view_mut((0, n_w), (2 * dim_r1, n_theta))
        .copy_from(&(-&ops.pint));
    let mut md = DMatrix::zeros(2 * dim_r1, n);
    md.view_mut((0, 0), (dim_r1, n))
        .copy_from(&(&ops.mass_r1 * d.view((0, 0), (dim_r1, n))));
    md.view_mut((dim_r1, 0), (dim_r1, n))
        .copy_from(&(&ops.mass_r1 * d.view((dim_r1, 0), (dim_r1, n))));
    block += d.transpose() * md * shear;

    // bending: M_C = D_bend [[M, nu M, 0], [nu M, M, 0], [0, 0, 2(1-nu) M]]
    let db = params.bending_d();
    let nu = params.poisson;
    let e11 = ops.e.view((0, 0), (dim_r2, n_theta));
    let e22 = ops.e.view((dim_r2, 0), (dim_r2, n_theta));
    let e12 = ops.e.view((2 * dim_r2, 0), (dim_r2, n_theta));
    let m11 = &ops.mass_r2 * (e11 + e22 * nu);
    let m22 = &ops.mass_r2 * (e22 + e11 * nu);
    let m12 = &ops.mass_r2 * e12 * (2.0 * (1.0 - nu));
    let mut me = DMatrix::zeros(3 * dim_r2, n_theta);
    me.view_mut((0, 0), (dim_r2, n_theta)).copy_from(&m11);
    me.view_mut((dim_r2, 0), (dim_r2, n_theta)).copy_from(&m22);
    me.view_mut((2 * dim_r2, 0), (dim_r2, n_theta)).copy_from(&m12);
    let bend = ops.e.transpose() * me * db;
    block
        .view_mut((n_w, n_w), (n_theta, n_theta))
        .zip_apply(&bend, |a, b| *a += b);

    // displacement stabilizer
    block
        .view_mut((0, 0), (n_w, n_w))
        .zip_apply(&ops.s, |a, b| *a += b);

    // enforce exact symmetry of the block before scattering
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (block[(i, j)] + block[(j, i)]);
            block[(i, j)] = v;
            block[(j, i)] = v;
        }
    }
    Ok(block)
}

/// Load vector of one cell: (g, v_0) against the interior displacement basis;
/// edge and rotation entries stay zero.
fn local_load(mesh: &Mesh, ops: &LocalOperators, problem: &Problem) -> Result<DVector<f64>> {
    let polygon = mesh.cell_points(ops.cell);
    let rule = quadrature::polygon_rule(&polygon, ops.degrees.k + problem.load_degree)?;
    let mut rhs = DVector::zeros(ops.layout.n_w + ops.layout.n_theta);
    for (&p, &w) in rule.points.iter().zip(&rule.weights) {
        let gw = (problem.load)(p) * w;
        for i in 0..ops.layout.dim_k {
            rhs[i] += gw * ops.basis_k.eval(i, p);
        }
    }
    Ok(rhs)
}

/// Assembled global system: lower-triangle triplets of the symmetric
/// stiffness matrix, the load vector, and the per-cell operators (kept for
/// norm evaluations downstream).
pub struct GlobalSystem {
    pub dof_map: DofMap,
    /// Strict lower triangle plus diagonal, row >= col, unsummed.
    pub lower_triplets: Vec<(u32, u32, f64)>,
    pub rhs: Vec<f64>,
    pub ops: Vec<LocalOperators>,
}

/// Builds per-cell operators (in parallel) and scatters blocks in cell order.
pub fn assemble_system(
    mesh: &Mesh,
    config: &WeakSpaceConfig,
    problem: &Problem,
    params: &PlateParams,
) -> Result<GlobalSystem> {
    let dof_map = DofMap::build(mesh, config);
    let cells: Vec<usize> = (0..mesh.cells.len()).collect();
    let pieces: Vec<(LocalOperators, DMatrix<f64>, DVector<f64>)> = cells
        .par_iter()
        .map(|&c| {
            let ops = LocalOperators::build(mesh, c, config.degrees_for_cell(mesh, c))?;
            let block = local_stiffness(&ops, params)?;
            let load = local_load(mesh, &ops, problem)?;
            Ok((ops, block, load))
        })
        .collect::<Result<_>>()?;

    let nnz_estimate: usize = pieces
        .iter()
        .map(|(_, b, _)| b.nrows() * (b.nrows() + 1) / 2)
        .sum();
    let mut lower_triplets = Vec::with_capacity(nnz_estimate);
    let mut rhs = vec![0.0; dof_map.total];
    let mut ops_store = Vec::with_capacity(pieces.len());
    for (ops, block, load) in pieces {
        let map = dof_map.local_to_global(mesh, ops.cell);
        let n = map.len();
        debug_assert_eq!(n, block.nrows());
        for lj in 0..n {
            let gj = map[lj];
            rhs[gj] += load[lj];
            for li in 0..n {
                let gi = map[li];
                if gi >= gj {
                    let v = block[(li, lj)];
                    if v != 0.0 {
                        lower_triplets.push((gi as u32, gj as u32, v));
                    }
                }
            }
        }
        ops_store.push(ops);
    }

    Ok(GlobalSystem {
        dof_map,
        lower_triplets,
        rhs,
        ops: ops_store,
    })
}

/// Reduced SPD system after symmetric elimination of the essential set.
pub struct ReducedSystem {
    /// Compressed sparse columns of the lower triangle, free DOFs only.
    pub matrix: crate::solver::SparseSpd,
    pub rhs: Vec<f64>,
    /// Global index of each free DOF.
    pub free: Vec<usize>,
    /// Prescribed values on the constrained DOFs, by global index.
    pub constrained_values: Vec<f64>,
    pub dof_map: DofMap,
}

impl ReducedSystem {
    /// Expands a free-DOF solution to the full layout, filling in the
    /// prescribed boundary values.
    pub fn expand(&self, x_free: &[f64]) -> Vec<f64> {
        let mut full = self.constrained_values.clone();
        for (i, &g) in self.free.iter().enumerate() {
            full[g] = x_free[i];
        }
        full
    }
}

/// Projects the exact boundary traces onto the boundary-edge DOFs (zero for
/// the clamped problems), moves their contribution to the right-hand side,
/// and drops the constrained rows and columns.
pub fn apply_essential_bc(system: &GlobalSystem, mesh: &Mesh, problem: &Problem) -> ReducedSystem {
    let dof_map = &system.dof_map;
    let n = dof_map.total;
    let mut values = vec![0.0; n];
    let mut is_constrained = vec![false; n];
    for &g in &dof_map.constrained {
        is_constrained[g] = true;
    }
    for &e in &mesh.boundary_edges {
        let (a, b) = mesh.edge_points(e);
        let wp = EdgeBasis::new(a, b, dof_map.w_edge_block - 1);
        let proj = crate::poly::l2_project_edge(&wp, |pt| problem.w_boundary(pt), problem.w_degree);
        for j in 0..dof_map.w_edge_block {
            values[dof_map.w_edge(e, j)] = proj.coeffs[j];
        }
        let tm = EdgeBasis::new(a, b, dof_map.theta_edge_block - 1);
        for comp in 0..2 {
            let proj = crate::poly::l2_project_edge(
                &tm,
                |pt| {
                    let (tx, ty) = problem.theta_boundary(pt);
                    if comp == 0 {
                        tx
                    } else {
                        ty
                    }
                },
                problem.theta_degree,
            );
            for j in 0..dof_map.theta_edge_block {
                values[dof_map.theta_edge(e, comp, j)] = proj.coeffs[j];
            }
        }
    }

    // Free index remap.
    let mut new_index = vec![usize::MAX; n];
    let mut free = Vec::with_capacity(n - dof_map.constrained.len());
    for g in 0..n {
        if !is_constrained[g] {
            new_index[g] = free.len();
            free.push(g);
        }
    }

    // RHS update and reduced triplets from the lower-triangle stream. Each
    // stored entry (i, j, v) with i > j also stands for the mirrored (j, i).
    let mut rhs: Vec<f64> = free.iter().map(|&g| system.rhs[g]).collect();
    let mut reduced = Vec::with_capacity(system.lower_triplets.len());
    for &(i, j, v) in &system.lower_triplets {
        let (i, j) = (i as usize, j as usize);
        match (is_constrained[i], is_constrained[j]) {
            (false, false) => reduced.push((new_index[i] as u32, new_index[j] as u32, v)),
            (false, true) => rhs[new_index[i]] -= v * values[j],
            (true, false) => {
                if i != j {
                    rhs[new_index[j]] -= v * values[i];
                }
            }
            (true, true) => {}
        }
    }

    let matrix = crate::solver::SparseSpd::from_lower_triplets(free.len(), reduced);
    ReducedSystem {
        matrix,
        rhs,
        free,
        constrained_values: values,
        dof_map: dof_map.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_triangular_mesh;
    use crate::rm_model::{problem1, PlateParams};
    use crate::weakops::{WeakDegrees, WeakSpaceConfig};

    fn p1_config() -> WeakSpaceConfig {
        WeakSpaceConfig::fixed(WeakDegrees {
            k: 1,
            p: 1,
            r1: 1,
            q: 1,
            m: 1,
            r2: 2,
        })
    }

    #[test]
    fn dof_counts_single_triangle() {
        let mesh = crate::mesh::Mesh::from_cells(
            vec![
                crate::mesh::Point::new(0.0, 0.0),
                crate::mesh::Point::new(1.0, 0.0),
                crate::mesh::Point::new(0.0, 1.0),
            ],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        let map = DofMap::build(&mesh, &p1_config());
        assert_eq!(map.n_w, 3 + 3 * 2);
    }

    #[test]
    fn dof_counts_two_triangles() {
        let mesh = generate_triangular_mesh(1).unwrap();
        let map = DofMap::build(&mesh, &p1_config());
        // 5 edges x 2 displacement edge DOFs
        assert_eq!(map.n_w - 2 * 3, 10);
        // n_theta = 2 (2 cells x 3 + 5 edges x 2)
        assert_eq!(map.n_theta, 32);
        assert_eq!(map.total, map.n_w + map.n_theta);
    }

    #[test]
    fn zero_load_gives_zero_rhs() {
        let mesh = generate_triangular_mesh(2).unwrap();
        let params = PlateParams::with_thickness(1.0);
        let mut problem = problem1(params);
        problem.load = Box::new(|_| 0.0);
        problem.load_degree = 0;
        let sys = assemble_system(&mesh, &p1_config(), &problem, &params).unwrap();
        assert!(sys.rhs.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rhs_supported_on_interior_w_dofs_only() {
        let mesh = generate_triangular_mesh(2).unwrap();
        let params = PlateParams::with_thickness(1.0);
        let problem = problem1(params);
        let sys = assemble_system(&mesh, &p1_config(), &problem, &params).unwrap();
        let interior = mesh.cells.len() * sys.dof_map.dim_k;
        assert!(sys.rhs[..interior].iter().any(|&v| v != 0.0));
        assert!(sys.rhs[interior..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_pair_has_zero_energy() {
        // w = c with matching trace and theta = 0 lies in the kernel of the
        // unconstrained form.
        let mesh = generate_triangular_mesh(1).unwrap();
        let params = PlateParams::with_thickness(1.0);
        let problem = problem1(params);
        let sys = assemble_system(&mesh, &p1_config(), &problem, &params).unwrap();
        let map = &sys.dof_map;
        let mut x = vec![0.0; map.total];
        for c in 0..mesh.cells.len() {
            x[map.w_interior(c, 0)] = 3.0; // constant member of the scaled basis
        }
        for e in 0..mesh.edges.len() {
            x[map.w_edge(e, 0)] = 3.0; // constant Legendre member
        }
        // energy x^T A x from the lower-triangle stream
        let mut energy = 0.0;
        for &(i, j, v) in &sys.lower_triplets {
            let (i, j) = (i as usize, j as usize);
            energy += if i == j {
                v * x[i] * x[i]
            } else {
                2.0 * v * x[i] * x[j]
            };
        }
        assert!(energy.abs() < 1e-12);
    }

    #[test]
    fn reduced_size_matches_boundary_count() {
        let mesh = generate_triangular_mesh(2).unwrap();
        let params = PlateParams::with_thickness(1.0);
        let problem = problem1(params);
        let config = p1_config();
        let sys = assemble_system(&mesh, &config, &problem, &params).unwrap();
        let reduced = apply_essential_bc(&sys, &mesh, &problem);
        let nb = mesh.boundary_edges.len();
        let expect = sys.dof_map.total - nb * (2 + 2 * 2);
        assert_eq!(reduced.matrix.n, expect);
        assert_eq!(reduced.rhs.len(), expect);
        // clamped data projects to zero
        assert!(reduced.constrained_values.iter().all(|&v| v.abs() < 1e-14));
    }

    #[test]
    fn scatter_is_permutation_invariant() {
        // permuting cell order relabels cell-interior DOFs but leaves
        // edge-edge couplings identical
        let mesh = generate_triangular_mesh(2).unwrap();
        let perm: Vec<usize> = (0..mesh.cells.len()).rev().collect();
        let permuted = crate::mesh::Mesh::from_cells(
            mesh.vertices.clone(),
            perm.iter()
                .map(|&c| mesh.cells[c].vertex_indices.clone())
                .collect(),
        )
        .unwrap();
        let params = PlateParams::with_thickness(1.0);
        let problem = problem1(params);
        let config = p1_config();
        let a = assemble_system(&mesh, &config, &problem, &params).unwrap();
        let b = assemble_system(&permuted, &config, &problem, &params).unwrap();

        let map = &a.dof_map;
        let inv: Vec<usize> = {
            let mut inv = vec![0; perm.len()];
            for (newc, &oldc) in perm.iter().enumerate() {
                inv[oldc] = newc;
            }
            inv
        };
        let relabel = |g: usize| -> usize {
            let dim_k = map.dim_k;
            let dim_q = map.dim_q;
            let nc = map.n_cells;
            if g < nc * dim_k {
                let (c, i) = (g / dim_k, g % dim_k);
                b.dof_map.w_interior(inv[c], i)
            } else if g < map.n_w {
                g
            } else if g < map.n_w + nc * 2 * dim_q {
                let r = g - map.n_w;
                let (c, rest) = (r / (2 * dim_q), r % (2 * dim_q));
                b.dof_map.theta_interior(inv[c], rest / dim_q, rest % dim_q)
            } else {
                g
            }
        };

        let dense = |sys: &GlobalSystem, remap: &dyn Fn(usize) -> usize| {
            let n = sys.dof_map.total;
            let mut m = DMatrix::<f64>::zeros(n, n);
            for &(i, j, v) in &sys.lower_triplets {
                let (i, j) = (remap(i as usize), remap(j as usize));
                m[(i.max(j), i.min(j))] += v;
            }
            m
        };
        let da = dense(&a, &relabel);
        let db = dense(&b, &|g| g);
        assert!((da - db).amax() < 1e-13);
    }
}
