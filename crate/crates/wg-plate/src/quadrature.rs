//! Exact-degree numerical integration over polygonal cells and edges.
//!
//! Polygon rules are assembled by ear-clipping the (possibly reflex) cell
//! into triangles and mapping a reference-triangle rule to each piece. All
//! integrands appearing in the scheme are polynomial, so rules are chosen
//! exact, never approximate.

use crate::error::{Error, Result};
use crate::mesh::Point;

/// Highest supported exactness degree for cell rules.
pub const MAX_CELL_DEGREE: usize = 64;

/// Quadrature points and weights. For cell rules the weights sum to the cell
/// area; for edge rules to the edge length.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

impl QuadratureRule {
    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .sum()
    }
}

/// Nodes and weights of the m-point Gauss-Legendre rule on [0, 1], found by
/// Newton iteration on the Legendre recurrence.
pub fn gauss_legendre_unit(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Chebyshev-based initial guess on [-1, 1].
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_m(x) and P'_m(x) via the three-term recurrence.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if m == 1 { x } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        weights[i] = w;
        nodes[m - 1 - i] = -x;
        weights[m - 1 - i] = w;
    }
    // Map from [-1, 1] to [0, 1].
    for i in 0..m {
        nodes[i] = 0.5 * (1.0 - nodes[i]);
        weights[i] *= 0.5;
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// Rule on the reference triangle (0,0)-(1,0)-(0,1), exact for total degree
/// <= d. Compact symmetric rules for d <= 2, collapsed Gauss product rules
/// beyond.
pub fn triangle_rule(d: usize) -> Result<QuadratureRule> {
    if d > MAX_CELL_DEGREE {
        return Err(Error::UnsupportedDegree {
            requested: d,
            max: MAX_CELL_DEGREE,
        });
    }
    let third = 1.0 / 3.0;
    let (points, weights) = match d {
        0 | 1 => (vec![Point::new(third, third)], vec![0.5]),
        2 => (
            vec![
                Point::new(1.0 / 6.0, 1.0 / 6.0),
                Point::new(2.0 / 3.0, 1.0 / 6.0),
                Point::new(1.0 / 6.0, 2.0 / 3.0),
            ],
            vec![1.0 / 6.0; 3],
        ),
        _ => {
            // Duffy mapping (u, v) -> (u(1-v), uv) with Jacobian u turns the
            // triangle integral into a product integral; the integrand has
            // degree d+1 in u and d in v.
            let (un, uw) = gauss_legendre_unit((d + 3) / 2);
            let (vn, vw) = gauss_legendre_unit((d + 2) / 2);
            let mut points = Vec::with_capacity(un.len() * vn.len());
            let mut weights = Vec::with_capacity(un.len() * vn.len());
            for (iu, &u) in un.iter().enumerate() {
                for (iv, &v) in vn.iter().enumerate() {
                    points.push(Point::new(u * (1.0 - v), u * v));
                    weights.push(uw[iu] * vw[iv] * u);
                }
            }
            (points, weights)
        }
    };
    Ok(QuadratureRule {
        points,
        weights,
        exact_degree: d,
    })
}

fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * b.sub(a).cross(c.sub(a))
}

fn point_in_triangle(p: Point, a: Point, b: Point, c: Point) -> bool {
    let d1 = b.sub(a).cross(p.sub(a));
    let d2 = c.sub(b).cross(p.sub(b));
    let d3 = a.sub(c).cross(p.sub(c));
    d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0
}

/// Partitions a simple CCW polygon into triangles by ear clipping. Handles
/// reflex polygons; rejects input where no ear can be found (the signature of
/// self-intersection or wrong orientation).
pub fn triangulate_cell(polygon: &[Point]) -> Result<Vec<[Point; 3]>> {
    if polygon.len() < 3 {
        return Err(Error::InvalidArgument(
            "polygon needs at least 3 vertices".into(),
        ));
    }
    let mut idx: Vec<usize> = (0..polygon.len()).collect();
    let mut tris = Vec::with_capacity(polygon.len() - 2);
    let diam: f64 = polygon
        .iter()
        .flat_map(|p| polygon.iter().map(move |q| p.dist(*q)))
        .fold(0.0, f64::max);
    let eps = 1e-14 * diam * diam;
    while idx.len() > 3 {
        let n = idx.len();
        let mut clipped = false;
        for i in 0..n {
            let (ia, ib, ic) = (idx[(i + n - 1) % n], idx[i], idx[(i + 1) % n]);
            let (a, b, c) = (polygon[ia], polygon[ib], polygon[ic]);
            if signed_area(a, b, c) <= eps {
                continue; // reflex or degenerate corner
            }
            // An ear must not contain any other remaining vertex.
            let contains_other = idx.iter().any(|&j| {
                j != ia && j != ib && j != ic && point_in_triangle(polygon[j], a, b, c)
            });
            if contains_other {
                continue;
            }
            tris.push([a, b, c]);
            idx.remove(i);
            clipped = true;
            break;
        }
        if !clipped {
            return Err(Error::InvalidArgument(
                "ear clipping failed: polygon is self-intersecting or not CCW".into(),
            ));
        }
    }
    tris.push([polygon[idx[0]], polygon[idx[1]], polygon[idx[2]]]);
    Ok(tris)
}

/// Quadrature rule over a polygonal cell, exact for total degree <= d:
/// ear-clipped triangles each carrying an affinely mapped triangle rule.
pub fn polygon_rule(polygon: &[Point], d: usize) -> Result<QuadratureRule> {
    let reference = triangle_rule(d)?;
    let tris = triangulate_cell(polygon)?;
    let mut points = Vec::with_capacity(reference.points.len() * tris.len());
    let mut weights = Vec::with_capacity(points.capacity());
    for [a, b, c] in tris {
        let det = 2.0 * signed_area(a, b, c);
        for (&p, &w) in reference.points.iter().zip(&reference.weights) {
            points.push(Point::new(
                a.x + (b.x - a.x) * p.x + (c.x - a.x) * p.y,
                a.y + (b.y - a.y) * p.x + (c.y - a.y) * p.y,
            ));
            weights.push(w * det);
        }
    }
    Ok(QuadratureRule {
        points,
        weights,
        exact_degree: d,
    })
}

/// Integral of `f` over the polygon, exact when `f` is a polynomial of
/// total degree <= d.
pub fn integrate_cell(polygon: &[Point], f: impl Fn(Point) -> f64, d: usize) -> Result<f64> {
    Ok(polygon_rule(polygon, d)?.integrate(f))
}

/// Quadrature rule along the segment [a, b], exact for polynomial traces of
/// degree <= d; weights sum to the segment length.
pub fn edge_rule(a: Point, b: Point, d: usize) -> QuadratureRule {
    let m = d / 2 + 1; // minimal Gauss count: 2m - 1 >= d
    let (nodes, mut weights) = gauss_legendre_unit(m);
    let len = a.dist(b);
    let points: Vec<Point> = nodes
        .iter()
        .map(|&s| Point::new(a.x + (b.x - a.x) * s, a.y + (b.y - a.y) * s))
        .collect();
    for w in &mut weights {
        *w *= len;
    }
    QuadratureRule {
        points,
        weights,
        exact_degree: d,
    }
}

/// Integral of `f` along the segment [a, b], exact for traces of degree <= d.
pub fn integrate_edge(a: Point, b: Point, f: impl Fn(Point) -> f64, d: usize) -> f64 {
    edge_rule(a, b, d).integrate(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_triangle() -> Vec<Point> {
        vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)]
    }

    #[test]
    fn centroid_rule_for_degree_one() {
        let r = triangle_rule(1).unwrap();
        assert_eq!(r.points.len(), 1);
        assert!((r.weights[0] - 0.5).abs() < 1e-16);
    }

    #[test]
    fn three_point_rule_for_degree_two() {
        let r = triangle_rule(2).unwrap();
        assert_eq!(r.points.len(), 3);
        // closed form: int x^2 over the reference triangle = 1/12
        let v = r.integrate(|p| p.x * p.x);
        assert!((v - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_reference_area() {
        for d in 0..=20 {
            let r = triangle_rule(d).unwrap();
            let s: f64 = r.weights.iter().sum();
            assert!((s - 0.5).abs() < 1e-14, "degree {d}: weight sum {s}");
        }
    }

    #[test]
    fn rejects_unsupported_degree() {
        assert!(matches!(
            triangle_rule(MAX_CELL_DEGREE + 1),
            Err(Error::UnsupportedDegree { .. })
        ));
    }

    #[test]
    fn convex_quad_fans_into_two_triangles() {
        let quad = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        assert_eq!(triangulate_cell(&quad).unwrap().len(), 2);
    }

    #[test]
    fn triangle_triangulates_to_itself() {
        let t = reference_triangle();
        let tris = triangulate_cell(&t).unwrap();
        assert_eq!(tris.len(), 1);
        assert!((signed_area(tris[0][0], tris[0][1], tris[0][2]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn l_shape_triangulation_preserves_area() {
        // L-shaped hexagon; shoelace oracle for the area.
        let l = vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(2.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 2.0),
            Point::new(0.0, 2.0),
        ];
        let tris = triangulate_cell(&l).unwrap();
        assert_eq!(tris.len(), 4);
        let sum: f64 = tris.iter().map(|t| signed_area(t[0], t[1], t[2])).sum();
        let shoelace = {
            let mut a = 0.0;
            for i in 0..l.len() {
                a += l[i].cross(l[(i + 1) % l.len()]);
            }
            0.5 * a
        };
        assert!((sum - shoelace).abs() < 1e-12 * shoelace.abs());
        assert!(tris.iter().all(|t| signed_area(t[0], t[1], t[2]) > 0.0));
    }

    #[test]
    fn rejects_self_intersecting_polygon() {
        let bowtie = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ];
        assert!(triangulate_cell(&bowtie).is_err());
    }

    #[test]
    fn cell_integrals_closed_forms() {
        let square = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        assert!((integrate_cell(&square, |_| 1.0, 0).unwrap() - 1.0).abs() < 1e-15);
        let t = reference_triangle();
        assert!((integrate_cell(&t, |p| p.x, 1).unwrap() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn edge_integrals_closed_forms() {
        let a = Point::new(0.25, 0.5);
        let b = Point::new(1.0, -0.25);
        let len = a.dist(b);
        assert!((integrate_edge(a, b, |_| 1.0, 0) - len).abs() < 1e-14);
        // arc parameter s on a unit-length edge: int s ds = 1/2, int s^3 = 1/4
        let u0 = Point::new(0.0, 0.0);
        let u1 = Point::new(1.0, 0.0);
        assert!((integrate_edge(u0, u1, |p| p.x, 1) - 0.5).abs() < 1e-15);
        assert!((integrate_edge(u0, u1, |p| p.x * p.x * p.x, 3) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn additivity_over_ear_clip() {
        let l = vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(2.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 2.0),
            Point::new(0.0, 2.0),
        ];
        let f = |p: Point| 1.0 + p.x * p.y + p.y * p.y;
        let whole = integrate_cell(&l, f, 4).unwrap();
        let parts: f64 = triangulate_cell(&l)
            .unwrap()
            .iter()
            .map(|t| integrate_cell(&t.to_vec(), f, 4).unwrap())
            .sum();
        assert!((whole - parts).abs() < 1e-13 * whole.abs());
    }
}
