//! Polygonal mesh data model, structured mesh families, and topology queries.
//!
//! Cells are simple polygons with counterclockwise vertex order; convexity is
//! not required. Edges are stored once, oriented from the lower to the higher
//! vertex index, and carry one outward unit normal per incident cell.
//!
//! Mesh families on the unit square:
//! - `triangular`: n x n squares, each split along the main diagonal
//! - `nonconvex` A: each macro-square cut into two hexagons by a 3-segment
//!   zigzag, one reflex vertex per cell
//! - `nonconvex` B: 5-segment zigzag, octagons with two reflex vertices each
//!
//! The `disk` family triangulates the unit disk with concentric rings (6i
//! vertices on ring i), so every boundary vertex lies exactly on the circle.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// 2-D point / vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    pub fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(s * self.x, s * self.y)
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product `self x o`.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        self.sub(o).norm()
    }
}

/// Polygonal cell. `area` is the signed shoelace area; it is positive for the
/// required counterclockwise orientation.
#[derive(Clone, Debug)]
pub struct Cell {
    pub vertex_indices: Vec<usize>,
    pub centroid: Point,
    /// Maximum pairwise vertex distance h_T.
    pub diameter: f64,
    pub area: f64,
}

impl Cell {
    pub fn n_edges(&self) -> usize {
        self.vertex_indices.len()
    }
}

/// Outward unit normal of an edge as seen from one incident cell.
#[derive(Clone, Copy, Debug)]
pub struct EdgeSide {
    pub cell: usize,
    pub normal: Point,
}

/// Mesh edge, oriented from the lower to the higher vertex index.
#[derive(Clone, Debug)]
pub struct Edge {
    /// (lo, hi) with lo < hi.
    pub endpoints: (usize, usize),
    pub length: f64,
    /// Unit tangent pointing from `endpoints.0` to `endpoints.1`.
    pub tangent: Point,
    /// Incident cells (1 on the boundary, 2 in the interior).
    pub sides: Vec<EdgeSide>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.sides.len() == 1
    }

    /// Outward normal with respect to `cell`, if incident.
    pub fn normal_for(&self, cell: usize) -> Option<Point> {
        self.sides.iter().find(|s| s.cell == cell).map(|s| s.normal)
    }
}

/// Conforming polygonal mesh. Immutable after construction.
#[derive(Clone, Debug)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub cells: Vec<Cell>,
    pub edges: Vec<Edge>,
    /// Per cell, the edge loop in vertex order: (edge index, +1 if the cell
    /// traverses the edge lo->hi, -1 otherwise).
    pub cell_edges: Vec<Vec<(usize, i8)>>,
    /// Sorted indices of boundary edges.
    pub boundary_edges: Vec<usize>,
    pub h_max: f64,
}

fn polygon_signed_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    let mut a = 0.0;
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        a += p.cross(q);
    }
    0.5 * a
}

fn polygon_centroid(pts: &[Point], signed_area: f64) -> Point {
    let n = pts.len();
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        let w = p.cross(q);
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    let s = 1.0 / (6.0 * signed_area);
    Point::new(cx * s, cy * s)
}

fn polygon_diameter(pts: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d = d.max(pts[i].dist(pts[j]));
        }
    }
    d
}

impl Mesh {
    /// Builds a mesh from vertex coordinates and per-cell CCW vertex loops.
    ///
    /// Topology (edge table, normals, boundary flags) is derived here. The
    /// construction is lenient about geometric defects so that [`validate`]
    /// can report them; it only rejects structurally unusable input.
    pub fn from_cells(vertices: Vec<Point>, cell_vertices: Vec<Vec<usize>>) -> Result<Mesh> {
        let nv = vertices.len();
        let mut cells = Vec::with_capacity(cell_vertices.len());
        for (c, vs) in cell_vertices.iter().enumerate() {
            if vs.len() < 3 {
                return Err(Error::InvalidArgument(format!(
                    "cell {c} has fewer than 3 vertices"
                )));
            }
            if let Some(&v) = vs.iter().find(|&&v| v >= nv) {
                return Err(Error::InvalidArgument(format!(
                    "cell {c} references vertex {v} out of range"
                )));
            }
            let pts: Vec<Point> = vs.iter().map(|&v| vertices[v]).collect();
            let area = polygon_signed_area(&pts);
            let centroid = if area.abs() > 0.0 {
                polygon_centroid(&pts, area)
            } else {
                Point::new(0.0, 0.0)
            };
            cells.push(Cell {
                vertex_indices: vs.clone(),
                centroid,
                diameter: polygon_diameter(&pts),
                area,
            });
        }

        // Deterministic edge numbering: sorted by (lo, hi) vertex pair, which
        // is independent of cell ordering.
        let mut keys: std::collections::BTreeSet<(usize, usize)> = Default::default();
        for cell in &cells {
            let vs = &cell.vertex_indices;
            for i in 0..vs.len() {
                let (a, b) = (vs[i], vs[(i + 1) % vs.len()]);
                if a == b {
                    return Err(Error::InvalidArgument(
                        "degenerate edge with identical endpoints".into(),
                    ));
                }
                keys.insert((a.min(b), a.max(b)));
            }
        }
        let sorted_ids: BTreeMap<(usize, usize), usize> =
            keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let mut edges: Vec<Edge> = keys
            .iter()
            .map(|&(lo, hi)| {
                let d = vertices[hi].sub(vertices[lo]);
                let len = d.norm();
                Edge {
                    endpoints: (lo, hi),
                    length: len,
                    tangent: d.scale(1.0 / len),
                    sides: Vec::new(),
                }
            })
            .collect();

        let mut cell_edges = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            let vs = &cell.vertex_indices;
            let mut loop_edges = Vec::with_capacity(vs.len());
            for i in 0..vs.len() {
                let (a, b) = (vs[i], vs[(i + 1) % vs.len()]);
                let e = sorted_ids[&(a.min(b), a.max(b))];
                let sign: i8 = if a < b { 1 } else { -1 };
                // Outward normal for a CCW cell: rotate the traversal
                // direction by -90 degrees.
                let t = edges[e].tangent.scale(sign as f64);
                edges[e].sides.push(EdgeSide {
                    cell: c,
                    normal: Point::new(t.y, -t.x),
                });
                loop_edges.push((e, sign));
            }
            cell_edges.push(loop_edges);
        }

        for e in &edges {
            if e.sides.len() > 2 {
                return Err(Error::InvalidArgument(format!(
                    "edge {:?} incident to more than two cells",
                    e.endpoints
                )));
            }
        }

        let boundary_edges: Vec<usize> = edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_boundary())
            .map(|(i, _)| i)
            .collect();
        let h_max = cells.iter().map(|c| c.diameter).fold(0.0, f64::max);

        Ok(Mesh {
            vertices,
            cells,
            edges,
            cell_edges,
            boundary_edges,
            h_max,
        })
    }

    /// Coordinates of a cell's vertex loop.
    pub fn cell_points(&self, cell: usize) -> Vec<Point> {
        self.cells[cell]
            .vertex_indices
            .iter()
            .map(|&v| self.vertices[v])
            .collect()
    }

    /// Endpoint coordinates of an edge, in (lo, hi) order.
    pub fn edge_points(&self, edge: usize) -> (Point, Point) {
        let (a, b) = self.edges[edge].endpoints;
        (self.vertices[a], self.vertices[b])
    }

    /// Sum of all (signed) cell areas.
    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(|c| c.area).sum()
    }

    /// Indices of reflex vertices (interior angle > pi) within a cell's loop.
    pub fn reflex_vertices(&self, cell: usize) -> Vec<usize> {
        let pts = self.cell_points(cell);
        let n = pts.len();
        (0..n)
            .filter(|&i| {
                let prev = pts[(i + n - 1) % n];
                let next = pts[(i + 1) % n];
                pts[i].sub(prev).cross(next.sub(pts[i])) < 0.0
            })
            .collect()
    }
}

/// One invariant violation found by [`validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum MeshDefect {
    /// Cell is clockwise or degenerate (signed area <= 0).
    Orientation { cell: usize },
    /// Cell polygon self-intersects.
    SelfIntersection { cell: usize },
    /// Cell has fewer than 3 vertices.
    TooFewVertices { cell: usize },
    /// Stored centroid/diameter/area disagree with the vertex coordinates.
    StaleGeometry { cell: usize },
    /// Edge incident to zero or more than two cells, or listed twice.
    NonManifold { edge: usize },
    /// Cell edge loop does not close or disagrees with the vertex loop.
    OpenLoop { cell: usize },
    /// Stored normal is not the outward unit normal for the incident cell.
    BadNormal { edge: usize, cell: usize },
    /// Boundary flags disagree with edge incidence.
    BoundaryFlag { edge: usize },
    /// Sum of cell areas differs from the area enclosed by the boundary.
    Tiling { cell_sum: f64, boundary_area: f64 },
}

/// Pass/fail report per mesh invariant.
#[derive(Clone, Debug, Default)]
pub struct MeshReport {
    pub failures: Vec<MeshDefect>,
}

impl MeshReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

fn segments_properly_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = b.sub(a).cross(c.sub(a));
    let d2 = b.sub(a).cross(d.sub(a));
    let d3 = d.sub(c).cross(a.sub(c));
    let d4 = d.sub(c).cross(b.sub(c));
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

/// Checks every mesh invariant and reports all violations with offending
/// indices. A valid mesh yields an empty failure list.
pub fn validate(mesh: &Mesh) -> MeshReport {
    let mut failures = Vec::new();

    for (c, cell) in mesh.cells.iter().enumerate() {
        if cell.vertex_indices.len() < 3 {
            failures.push(MeshDefect::TooFewVertices { cell: c });
            continue;
        }
        let pts = mesh.cell_points(c);
        let area = polygon_signed_area(&pts);
        if area <= 0.0 {
            failures.push(MeshDefect::Orientation { cell: c });
        }
        let n = pts.len();
        'outer: for i in 0..n {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            for j in i + 1..n {
                // skip segments sharing a vertex
                if j == i || (j + 1) % n == i || j == (i + 1) % n {
                    continue;
                }
                let (cx, dx) = (pts[j], pts[(j + 1) % n]);
                if segments_properly_intersect(a, b, cx, dx) {
                    failures.push(MeshDefect::SelfIntersection { cell: c });
                    break 'outer;
                }
            }
        }
        let scale = cell.diameter.max(1e-30);
        let stale = (area - cell.area).abs() > 1e-12 * scale * scale
            || (polygon_diameter(&pts) - cell.diameter).abs() > 1e-12 * scale
            || (area > 0.0
                && polygon_centroid(&pts, area).dist(cell.centroid) > 1e-12 * scale);
        if stale {
            failures.push(MeshDefect::StaleGeometry { cell: c });
        }
    }

    // Edge manifoldness and duplicate detection.
    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (e, edge) in mesh.edges.iter().enumerate() {
        if edge.sides.is_empty() || edge.sides.len() > 2 {
            failures.push(MeshDefect::NonManifold { edge: e });
        }
        if seen.insert(edge.endpoints, e).is_some() {
            failures.push(MeshDefect::NonManifold { edge: e });
        }
        let on_boundary_list = mesh.boundary_edges.binary_search(&e).is_ok();
        if on_boundary_list != edge.is_boundary() {
            failures.push(MeshDefect::BoundaryFlag { edge: e });
        }
    }

    // Cell loops: consecutive, closed, and matching stored orientation signs.
    for (c, loop_edges) in mesh.cell_edges.iter().enumerate() {
        let vs = &mesh.cells[c].vertex_indices;
        if loop_edges.len() != vs.len() {
            failures.push(MeshDefect::OpenLoop { cell: c });
            continue;
        }
        for (i, &(e, sign)) in loop_edges.iter().enumerate() {
            let (a, b) = (vs[i], vs[(i + 1) % vs.len()]);
            let (lo, hi) = mesh.edges[e].endpoints;
            let ok = if sign >= 0 {
                (a, b) == (lo, hi)
            } else {
                (a, b) == (hi, lo)
            };
            if !ok {
                failures.push(MeshDefect::OpenLoop { cell: c });
                break;
            }
        }
    }

    // Outward normals.
    for (e, edge) in mesh.edges.iter().enumerate() {
        for side in &edge.sides {
            let Some(&(_, sign)) = mesh
                .cell_edges
                .get(side.cell)
                .and_then(|le| le.iter().find(|&&(ei, _)| ei == e))
            else {
                failures.push(MeshDefect::BadNormal {
                    edge: e,
                    cell: side.cell,
                });
                continue;
            };
            let t = edge.tangent.scale(sign as f64);
            let expect = Point::new(t.y, -t.x);
            if side.normal.dist(expect) > 1e-12 || (side.normal.norm() - 1.0).abs() > 1e-12 {
                failures.push(MeshDefect::BadNormal {
                    edge: e,
                    cell: side.cell,
                });
            }
        }
    }

    // Tiling: interior edges cancel in the boundary shoelace sum exactly when
    // the cells tile consistently.
    let cell_sum = mesh.total_area();
    let mut boundary_area = 0.0;
    for &e in &mesh.boundary_edges {
        let edge = &mesh.edges[e];
        if edge.sides.len() != 1 {
            continue;
        }
        let c = edge.sides[0].cell;
        let sign = mesh.cell_edges[c]
            .iter()
            .find(|&&(ei, _)| ei == e)
            .map(|&(_, s)| s as f64)
            .unwrap_or(1.0);
        let (p, q) = mesh.edge_points(e);
        boundary_area += 0.5 * sign * p.cross(q);
    }
    if (cell_sum - boundary_area).abs() > 1e-12 * cell_sum.abs().max(1.0) {
        failures.push(MeshDefect::Tiling {
            cell_sum,
            boundary_area,
        });
    }

    MeshReport { failures }
}

/// Structured mesh family selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NonconvexFamily {
    A,
    B,
}

/// Uniform n x n triangulation of the unit square (2 n^2 cells, diagonal from
/// the lower-left to the upper-right corner of each sub-square).
pub fn generate_triangular_mesh(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "triangular mesh requires n >= 1".into(),
        ));
    }
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Point::new(i as f64 / n as f64, j as f64 / n as f64));
        }
    }
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10) = (idx(i, j), idx(i + 1, j));
            let (v01, v11) = (idx(i, j + 1), idx(i + 1, j + 1));
            cells.push(vec![v00, v10, v11]);
            cells.push(vec![v00, v11, v01]);
        }
    }
    let mesh = Mesh::from_cells(vertices, cells)?;
    debug_assert!(validate(&mesh).is_valid());
    Ok(mesh)
}

/// Local vertex coordinates of the two half-cells of a macro-square, as
/// integer numerators over the given denominator. Counterclockwise.
fn zigzag_halves(family: NonconvexFamily) -> (Vec<(i64, i64)>, Vec<(i64, i64)>, i64) {
    match family {
        // Cut (6,0)-(9,4)-(3,8)-(6,12) over denominator 12: hexagons with one
        // reflex vertex each.
        NonconvexFamily::A => (
            vec![(0, 0), (6, 0), (9, 4), (3, 8), (6, 12), (0, 12)],
            vec![(6, 0), (12, 0), (12, 12), (6, 12), (3, 8), (9, 4)],
            12,
        ),
        // Cut (5,0)-(7,2)-(3,4)-(7,6)-(3,8)-(5,10) over denominator 10:
        // octagons with two reflex vertices each.
        NonconvexFamily::B => (
            vec![
                (0, 0),
                (5, 0),
                (7, 2),
                (3, 4),
                (7, 6),
                (3, 8),
                (5, 10),
                (0, 10),
            ],
            vec![
                (5, 0),
                (10, 0),
                (10, 10),
                (5, 10),
                (3, 8),
                (7, 6),
                (3, 4),
                (7, 2),
            ],
            10,
        ),
    }
}

/// n x n macro-grid of the unit square, each macro-square split into two
/// congruent non-convex polygons by a zigzag cut.
pub fn generate_nonconvex_polygonal_mesh(n: usize, family: NonconvexFamily) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "nonconvex mesh requires n >= 1".into(),
        ));
    }
    let (left, right, den) = zigzag_halves(family);
    // Vertices are deduplicated on the integer lattice with spacing 1/(n*den).
    let mut ids: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut vertices = Vec::new();
    let mut cells = Vec::new();
    let scale = 1.0 / (n as i64 * den) as f64;
    for j in 0..n as i64 {
        for i in 0..n as i64 {
            for half in [&left, &right] {
                let mut loop_ids = Vec::with_capacity(half.len());
                for &(lx, ly) in half.iter() {
                    let key = (i * den + lx, j * den + ly);
                    let next = vertices.len();
                    let id = *ids.entry(key).or_insert_with(|| {
                        vertices.push(Point::new(key.0 as f64 * scale, key.1 as f64 * scale));
                        next
                    });
                    loop_ids.push(id);
                }
                cells.push(loop_ids);
            }
        }
    }
    let mesh = Mesh::from_cells(vertices, cells)?;
    for c in 0..mesh.cells.len() {
        assert!(
            !mesh.reflex_vertices(c).is_empty(),
            "nonconvex family cell {c} has no reflex vertex"
        );
    }
    debug_assert!(validate(&mesh).is_valid());
    Ok(mesh)
}

/// Triangulation of the unit disk with n concentric rings; ring i carries 6i
/// equally spaced vertices, so all boundary vertices satisfy x^2 + y^2 = 1
/// exactly (up to rounding in cos/sin).
pub fn generate_disk_mesh(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidArgument("disk mesh requires n >= 1".into()));
    }
    let mut vertices = vec![Point::new(0.0, 0.0)];
    let mut ring_start = vec![0usize; n + 1]; // index of first vertex of ring i
    for i in 1..=n {
        ring_start[i] = vertices.len();
        let r = i as f64 / n as f64;
        let m = 6 * i;
        for j in 0..m {
            let a = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            vertices.push(Point::new(r * a.cos(), r * a.sin()));
        }
    }
    let ring_vertex = |i: usize, j: usize| -> usize {
        if i == 0 {
            0
        } else {
            ring_start[i] + j % (6 * i)
        }
    };
    let mut cells = Vec::new();
    // Ring 1: fan of 6 triangles around the center.
    for j in 0..6 {
        cells.push(vec![0, ring_vertex(1, j), ring_vertex(1, j + 1)]);
    }
    // Strip between rings i-1 and i, per 60-degree sector: i+1 outer and i
    // inner vertices, triangulated as an alternating strip.
    for i in 2..=n {
        for s in 0..6 {
            let outer = |j: usize| ring_vertex(i, s * i + j);
            let inner = |j: usize| ring_vertex(i - 1, s * (i - 1) + j);
            for j in 0..i {
                cells.push(vec![inner(j), outer(j), outer(j + 1)]);
                if j + 1 < i {
                    cells.push(vec![inner(j), outer(j + 1), inner(j + 1)]);
                }
            }
        }
    }
    let mesh = Mesh::from_cells(vertices, cells)?;
    debug_assert!(validate(&mesh).is_valid());
    Ok(mesh)
}

/// Writes the plain-text mesh format: `NV NC NE`, then NV lines `x y`, then
/// NC lines `k v1 ... vk` (0-based, counterclockwise). Edges are derived on
/// import, not stored.
pub fn write_mesh_text(mesh: &Mesh) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {} {}",
        mesh.vertices.len(),
        mesh.cells.len(),
        mesh.edges.len()
    );
    for v in &mesh.vertices {
        let _ = writeln!(out, "{} {}", v.x, v.y);
    }
    for c in &mesh.cells {
        let _ = write!(out, "{}", c.vertex_indices.len());
        for &v in &c.vertex_indices {
            let _ = write!(out, " {v}");
        }
        let _ = writeln!(out);
    }
    out
}

/// Parses the plain-text mesh format produced by [`write_mesh_text`].
pub fn read_mesh_text(text: &str) -> Result<Mesh> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty mesh file".into()))?;
    let counts: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad count `{t}`"))))
        .collect::<Result<_>>()?;
    let [nv, nc, ne] = counts[..] else {
        return Err(Error::Parse("header must be `NV NC NE`".into()));
    };
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse("missing vertex line".into()))?;
        let xy: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad coordinate `{t}`"))))
            .collect::<Result<_>>()?;
        let [x, y] = xy[..] else {
            return Err(Error::Parse(format!("vertex line `{line}` must be `x y`")));
        };
        vertices.push(Point::new(x, y));
    }
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse("missing cell line".into()))?;
        let ids: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad index `{t}`"))))
            .collect::<Result<_>>()?;
        let (&k, vs) = ids
            .split_first()
            .ok_or_else(|| Error::Parse("empty cell line".into()))?;
        if vs.len() != k {
            return Err(Error::Parse(format!(
                "cell line `{line}` announces {k} vertices but lists {}",
                vs.len()
            )));
        }
        cells.push(vs.to_vec());
    }
    let mesh = Mesh::from_cells(vertices, cells)?;
    if mesh.edges.len() != ne {
        return Err(Error::Parse(format!(
            "header announces {ne} edges, derived {}",
            mesh.edges.len()
        )));
    }
    Ok(mesh)
}
