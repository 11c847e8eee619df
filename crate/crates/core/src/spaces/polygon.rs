//! Exact convex-polygon clipping for the planar cube arrangement.
//!
//! Every edge lies on an integer line `a . x = c` taken from a cube's
//! forward matrix, and every vertex is the intersection of two such lines,
//! stored in homogeneous integer coordinates. Side tests are therefore exact;
//! only the final area is computed in floating point.

use crate::geometry::ShearIndex;

/// Closed half-plane `a . x >= c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct HalfPlane {
    a: [i128; 2],
    c: i128,
}

impl HalfPlane {
    fn complement(self) -> HalfPlane {
        HalfPlane {
            a: [-self.a[0], -self.a[1]],
            c: -self.c,
        }
    }

    fn side(&self, v: &Point) -> i128 {
        (self.a[0] * v.x + self.a[1] * v.y - self.c * v.w).signum()
    }
}

/// `(x / w, y / w)` with `w > 0` and no common factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Point {
    x: i128,
    y: i128,
    w: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Intersection of the boundary lines of two half-planes.
fn meet(l: &HalfPlane, m: &HalfPlane) -> Option<Point> {
    let det = l.a[0] * m.a[1] - l.a[1] * m.a[0];
    if det == 0 {
        return None;
    }
    let mut x = l.c * m.a[1] - l.a[1] * m.c;
    let mut y = l.a[0] * m.c - l.c * m.a[0];
    let mut w = det;
    if w < 0 {
        (x, y, w) = (-x, -y, -w);
    }
    let g = gcd(gcd(x, y), w);
    Some(Point {
        x: x / g,
        y: y / g,
        w: w / g,
    })
}

fn orient(a: &Point, b: &Point, c: &Point) -> i128 {
    let det = a.x * (b.y * c.w - b.w * c.y) - a.y * (b.x * c.w - b.w * c.x) + a.w * (b.x * c.y - b.y * c.x);
    det.signum()
}

/// Convex polygon; edge `i` runs from vertex `i` to vertex `i + 1` along the
/// boundary of `edges[i]`, and the polygon is the intersection of its edge
/// half-planes.
#[derive(Clone, Debug)]
pub(crate) struct Polygon {
    verts: Vec<Point>,
    edges: Vec<HalfPlane>,
}

impl Polygon {
    /// The half-open cube of a two-dimensional index, as a closed polygon.
    pub fn of_cube(idx: &ShearIndex) -> Polygon {
        debug_assert_eq!(idx.dim(), 2);
        let m = idx.forward_matrix();
        let k = idx.translate();
        let (r1, r2) = ([m[0][0], m[0][1]], [m[1][0], m[1][1]]);
        let (k1, k2) = (k[0] as i128, k[1] as i128);
        let edges = vec![
            HalfPlane { a: r2, c: k2 },
            HalfPlane { a: [-r1[0], -r1[1]], c: -(k1 + 1) },
            HalfPlane { a: [-r2[0], -r2[1]], c: -(k2 + 1) },
            HalfPlane { a: r1, c: k1 },
        ];
        let verts = (0..4)
            .map(|i| meet(&edges[(i + 3) % 4], &edges[i]).expect("forward matrix is invertible"))
            .collect();
        Polygon { verts, edges }
    }

    /// `self` intersected with `h`, or `None` when the intersection has no
    /// interior.
    fn clip(&self, h: &HalfPlane) -> Option<Polygon> {
        let sides: Vec<i128> = self.verts.iter().map(|v| h.side(v)).collect();
        if sides.iter().all(|&s| s >= 0) {
            return Some(self.clone());
        }
        if sides.iter().all(|&s| s <= 0) {
            return None;
        }
        let n = self.verts.len();
        let mut verts = Vec::with_capacity(n + 1);
        let mut edges = Vec::with_capacity(n + 1);
        for i in 0..n {
            let (si, sj) = (sides[i], sides[(i + 1) % n]);
            let e = self.edges[i];
            if si >= 0 {
                verts.push(self.verts[i]);
                if sj >= 0 {
                    edges.push(e);
                } else if si > 0 {
                    edges.push(e);
                    verts.push(meet(&e, h).expect("edge crosses h"));
                    edges.push(*h);
                } else {
                    edges.push(*h);
                }
            } else if sj > 0 {
                verts.push(meet(&e, h).expect("edge crosses h"));
                edges.push(e);
            }
        }
        Some(Polygon { verts, edges })
    }

    /// `(self ∩ other, self \ other)`, the difference as disjoint convex
    /// pieces.
    pub fn split(&self, other: &Polygon) -> (Option<Polygon>, Vec<Polygon>) {
        let mut rest = self.clone();
        let mut outside = Vec::new();
        for e in &other.edges {
            if let Some(piece) = rest.clip(&e.complement()) {
                outside.push(piece);
            }
            match rest.clip(e) {
                Some(r) => rest = r,
                None => return (None, outside),
            }
        }
        (Some(rest), outside)
    }

    pub fn has_area(&self) -> bool {
        let v = &self.verts;
        v.len() >= 3 && (1..v.len() - 1).any(|i| orient(&v[0], &v[i], &v[i + 1]) != 0)
    }

    pub fn area(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .verts
            .iter()
            .map(|p| (p.x as f64 / p.w as f64, p.y as f64 / p.w as f64))
            .collect();
        let n = pts.len();
        let (x0, y0) = pts[0];
        // shoelace relative to the first vertex to limit cancellation
        let twice: f64 = (1..n.saturating_sub(1))
            .map(|i| {
                let (ax, ay) = (pts[i].0 - x0, pts[i].1 - y0);
                let (bx, by) = (pts[i + 1].0 - x0, pts[i + 1].1 - y0);
                ax * by - ay * bx
            })
            .sum();
        0.5 * twice.abs()
    }

    pub fn bbox(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for p in &self.verts {
            let (x, y) = (p.x as f64 / p.w as f64, p.y as f64 / p.w as f64);
            b[0] = b[0].min(x);
            b[1] = b[1].min(y);
            b[2] = b[2].max(x);
            b[3] = b[3].max(y);
        }
        b
    }
}

pub(crate) fn boxes_overlap(a: &[f64; 4], b: &[f64; 4]) -> bool {
    // conservative: touching boxes still go through the exact test
    a[0] <= b[2] && b[0] <= a[2] && a[1] <= b[3] && b[1] <= a[3]
}

/// Arrangement of weighted polygons: cells with pairwise disjoint interiors,
/// each carrying an accumulated value.
pub(crate) struct Overlay {
    cells: Vec<(Polygon, [f64; 4], f64)>,
}

impl Overlay {
    pub fn new() -> Self {
        Overlay { cells: Vec::new() }
    }

    /// Add `poly` carrying `value`. Cell values start at `combine(0, value)`
    /// and overlaps fold further values in with `combine`.
    pub fn add(&mut self, poly: Polygon, value: f64, combine: impl Fn(f64, f64) -> f64) {
        let pb = poly.bbox();
        let mut cells = Vec::with_capacity(self.cells.len() + 4);
        let mut fragments = vec![poly.clone()];
        for (cell, cb, acc) in self.cells.drain(..) {
            if !boxes_overlap(&pb, &cb) {
                cells.push((cell, cb, acc));
                continue;
            }
            let (inside, outside) = cell.split(&poly);
            let Some(inside) = inside else {
                cells.push((cell, cb, acc));
                continue;
            };
            fragments = fragments
                .iter()
                .flat_map(|f| {
                    if boxes_overlap(&f.bbox(), &cb) {
                        f.split(&cell).1
                    } else {
                        vec![f.clone()]
                    }
                })
                .collect();
            let ib = inside.bbox();
            cells.push((inside, ib, combine(acc, value)));
            for piece in outside {
                let b = piece.bbox();
                cells.push((piece, b, acc));
            }
        }
        for f in fragments {
            let b = f.bbox();
            cells.push((f, b, combine(0.0, value)));
        }
        self.cells = cells;
    }

    pub fn cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.cells.iter().filter(|(p, _, _)| p.has_area()).map(|(p, _, acc)| (p.area(), *acc))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_polygon_area_is_measure() {
        for (c, j, l) in [(1u8, 0u32, 0i64), (1, 1, 2), (2, 2, -3), (1, 3, 8)] {
            let idx = ShearIndex::cone(c, j, vec![l], vec![3, -1]).unwrap();
            let p = Polygon::of_cube(&idx);
            assert!((p.area() - idx.measure().to_f64()).abs() < 1e-15);
        }
    }

    #[test]
    fn split_conserves_area() {
        let a = Polygon::of_cube(&ShearIndex::coarse(vec![0, 0]));
        let b = Polygon::of_cube(&ShearIndex::cone(1, 1, vec![1], vec![1, 0]).unwrap());
        let (inside, outside) = a.split(&b);
        let total = inside.map_or(0.0, |p| p.area()) + outside.iter().map(Polygon::area).sum::<f64>();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn overlay_of_tiling_covers_its_union() {
        let mut ov = Overlay::new();
        let big = ShearIndex::coarse(vec![0, 0]);
        ov.add(Polygon::of_cube(&big), 1.0, |a, b| a + b);
        for k1 in 0..4 {
            for k2 in 0..2 {
                let q = ShearIndex::cone(1, 1, vec![0], vec![k1, k2]).unwrap();
                ov.add(Polygon::of_cube(&q), 1.0, |a, b| a + b);
            }
        }
        let twice: f64 = ov.cells().map(|(a, v)| a * v).sum();
        assert!((twice - 2.0).abs() < 1e-14, "{twice}");
    }

    #[test]
    fn touching_cubes_do_not_intersect() {
        let a = Polygon::of_cube(&ShearIndex::coarse(vec![0, 0]));
        let b = Polygon::of_cube(&ShearIndex::coarse(vec![1, 0]));
        let (inside, outside) = a.split(&b);
        assert!(inside.is_none());
        assert_eq!(outside.len(), 1);
    }
}
