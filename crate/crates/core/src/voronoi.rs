//! Voronoi cells of a node set in a box, and quadrature over convex polygons.

use crate::domain::{BoxDomain, Point};
use crate::quadrature::GaussLegendre;

/// Convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub vertices: Vec<Point>,
}

impl Polygon {
    pub fn rectangle(x: (f64, f64), y: (f64, f64)) -> Self {
        Self {
            vertices: vec![[x.0, y.0], [x.1, y.0], [x.1, y.1], [x.0, y.1]],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3 || self.area() <= 0.0
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            acc += a[0] * b[1] - a[1] * b[0];
        }
        0.5 * acc
    }

    pub fn bounding_box(&self) -> [(f64, f64); 2] {
        let mut bb = [(f64::MAX, f64::MIN); 2];
        for v in &self.vertices {
            for d in 0..2 {
                bb[d].0 = bb[d].0.min(v[d]);
                bb[d].1 = bb[d].1.max(v[d]);
            }
        }
        bb
    }

    /// Keeps the part where `normal · p ≤ offset` (one Sutherland–Hodgman pass).
    pub fn clip(&self, normal: [f64; 2], offset: f64) -> Polygon {
        let side = |p: &Point| normal[0] * p[0] + normal[1] * p[1] - offset;
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let cur = self.vertices[i];
            let next = self.vertices[(i + 1) % n];
            let sc = side(&cur);
            let sn = side(&next);
            if sc <= 0.0 {
                out.push(cur);
            }
            if (sc < 0.0 && sn > 0.0) || (sc > 0.0 && sn < 0.0) {
                let t = sc / (sc - sn);
                out.push([cur[0] + t * (next[0] - cur[0]), cur[1] + t * (next[1] - cur[1])]);
            }
        }
        Polygon { vertices: out }
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= -tol
        })
    }

    /// Pieces of the polygon cut along the grid lines `origin + i·step` in each axis.
    pub fn split_on_grid(&self, origin: [f64; 2], step: [f64; 2]) -> Vec<Polygon> {
        let mut pieces = vec![self.clone()];
        for d in 0..2 {
            let mut next = Vec::new();
            for piece in pieces {
                let bb = piece.bounding_box()[d];
                let first = ((bb.0 - origin[d]) / step[d]).floor() as i64;
                let last = ((bb.1 - origin[d]) / step[d]).ceil() as i64;
                if last - first <= 1 {
                    next.push(piece);
                    continue;
                }
                let mut normal = [0.0; 2];
                normal[d] = 1.0;
                let mut rest = piece;
                for i in (first + 1)..last {
                    let line = origin[d] + i as f64 * step[d];
                    let below = rest.clip(normal, line);
                    rest = rest.clip([-normal[0], -normal[1]], -line);
                    if !below.is_empty() {
                        next.push(below);
                    }
                }
                if !rest.is_empty() {
                    next.push(rest);
                }
            }
            pieces = next;
        }
        pieces
    }

    /// Calls `visit(p, w)` for a collapsed Gauss–Legendre rule of `order` points per
    /// direction on every fan triangle. Exact for polynomials of total degree `2·order − 2`.
    pub fn for_each_quadrature_point<F: FnMut(Point, f64)>(&self, order: usize, mut visit: F) {
        if self.is_empty() {
            return;
        }
        let rule = GaussLegendre::cached(order);
        let a = self.vertices[0];
        for w in self.vertices[1..].windows(2) {
            let (b, c) = (w[0], w[1]);
            let area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
            if area2 <= 0.0 {
                continue;
            }
            rule.for_each_point(0.0, 1.0, |u, wu| {
                rule.for_each_point(0.0, 1.0, |v, wv| {
                    // p = a + u (b − a) + u v (c − b), Jacobian = 2·area·u.
                    let p = [
                        a[0] + u * (b[0] - a[0]) + u * v * (c[0] - b[0]),
                        a[1] + u * (b[1] - a[1]) + u * v * (c[1] - b[1]),
                    ];
                    visit(p, wu * wv * area2 * u);
                });
            });
        }
    }
}

/// Voronoi cells indexed like the nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum VoronoiCells {
    Intervals(Vec<(f64, f64)>),
    Polygons(Vec<Polygon>),
}

impl VoronoiCells {
    pub fn len(&self) -> usize {
        match self {
            VoronoiCells::Intervals(v) => v.len(),
            VoronoiCells::Polygons(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn measure(&self, i: usize) -> f64 {
        match self {
            VoronoiCells::Intervals(v) => v[i].1 - v[i].0,
            VoronoiCells::Polygons(v) => v[i].area(),
        }
    }
}

/// Nearest-node cells: midpoint intervals in 1-D, half-plane clipped boxes in 2-D.
pub fn voronoi_partition(nodes: &[Point], domain: &BoxDomain) -> VoronoiCells {
    match domain.dim() {
        1 => {
            let (a, b) = domain.axis(0);
            let mut order: Vec<usize> = (0..nodes.len()).collect();
            order.sort_by(|&i, &j| nodes[i][0].total_cmp(&nodes[j][0]));
            let mut cells = vec![(a, b); nodes.len()];
            for (pos, &i) in order.iter().enumerate() {
                let lo = if pos == 0 {
                    a
                } else {
                    0.5 * (nodes[order[pos - 1]][0] + nodes[i][0])
                };
                let hi = if pos + 1 == order.len() {
                    b
                } else {
                    0.5 * (nodes[i][0] + nodes[order[pos + 1]][0])
                };
                cells[i] = (lo, hi);
            }
            VoronoiCells::Intervals(cells)
        }
        _ => {
            let bbox = Polygon::rectangle(domain.axis(0), domain.axis(1));
            let cells = nodes
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let mut cell = bbox.clone();
                    for (k, q) in nodes.iter().enumerate() {
                        if k == i || cell.is_empty() {
                            continue;
                        }
                        // |x − p|² ≤ |x − q|²  ⇔  2(q − p)·x ≤ |q|² − |p|²
                        let normal = [2.0 * (q[0] - p[0]), 2.0 * (q[1] - p[1])];
                        let offset = q[0] * q[0] + q[1] * q[1] - p[0] * p[0] - p[1] * p[1];
                        if normal != [0.0, 0.0] {
                            cell = cell.clip(normal, offset);
                        }
                    }
                    cell
                })
                .collect();
            VoronoiCells::Polygons(cells)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_cells_are_midpoints() {
        let d = BoxDomain::interval(0.0, 1.0).unwrap();
        let cells = voronoi_partition(&[[0.75, 0.0], [0.25, 0.0]], &d);
        assert_eq!(cells, VoronoiCells::Intervals(vec![(0.5, 1.0), (0.0, 0.5)]));
        let single = voronoi_partition(&[[0.3, 0.0]], &d);
        assert_eq!(single, VoronoiCells::Intervals(vec![(0.0, 1.0)]));
    }

    #[test]
    fn polygon_area_and_clipping() {
        let sq = Polygon::rectangle((0.0, 2.0), (0.0, 1.0));
        assert_eq!(sq.area(), 2.0);
        let half = sq.clip([1.0, 1.0], 1.0);
        assert!((half.area() - 0.5).abs() < 1e-15);
        let pieces = sq.split_on_grid([0.0, 0.0], [0.5, 0.5]);
        assert_eq!(pieces.len(), 8);
        assert!((pieces.iter().map(Polygon::area).sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn collapsed_rule_is_exact_on_polynomials() {
        let tri = Polygon {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        };
        // ∫_T x^a y^b = a! b! / (a + b + 2)!
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        for a in 0..4u32 {
            for b in 0..(4 - a) {
                let mut acc = 0.0;
                tri.for_each_quadrature_point(4, |p, w| acc += w * p[0].powi(a as i32) * p[1].powi(b as i32));
                let exact = fact(a) * fact(b) / fact(a + b + 2);
                assert!((acc - exact).abs() < 1e-15, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn square_cells_of_a_grid() {
        let d = BoxDomain::square(0.0, 2.0).unwrap();
        let nodes = [[0.5, 0.5], [1.5, 0.5], [0.5, 1.5], [1.5, 1.5]];
        let cells = voronoi_partition(&nodes, &d);
        for i in 0..4 {
            assert!((cells.measure(i) - 1.0).abs() < 1e-14);
        }
    }
}
