//! Uniform triangulations of axis-aligned rectangles with tagged boundary edges.
//!
//! The rectangle `[0, width] × [0, height]` is cut into `nx × ny` squares of
//! side `h`, and every square is split along its lower-left to upper-right
//! diagonal. Vertices are numbered row-major starting at the origin, so
//! vertex `(i, j)` has index `j * (nx + 1) + i`. Square `(i, j)` owns
//! triangles `2 * (j * nx + i)` (below the diagonal) and
//! `2 * (j * nx + i) + 1` (above it). Using a single diagonal direction makes
//! the meshes for `h` and `h / 2` nested.

use crate::error::{Error, Result};

/// Boundary part an edge belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    /// Clamped part: the displacement vanishes.
    Gamma1,
    /// Traction part.
    Gamma2,
    /// Bilateral frictional contact: zero normal displacement.
    Gamma3,
}

impl BoundaryTag {
    pub fn index(self) -> usize {
        match self {
            BoundaryTag::Gamma1 => 1,
            BoundaryTag::Gamma2 => 2,
            BoundaryTag::Gamma3 => 3,
        }
    }
}

/// The coordinate held fixed along a boundary segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// An axis-aligned piece of the boundary: the points with `axis = at` and the
/// other coordinate in `[from, to]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundarySegment {
    pub axis: Axis,
    pub at: f64,
    pub from: f64,
    pub to: f64,
    pub tag: BoundaryTag,
}

impl BoundarySegment {
    /// Segment `{x = at} × [y0, y1]`.
    pub fn vertical(at: f64, y0: f64, y1: f64, tag: BoundaryTag) -> Self {
        BoundarySegment {
            axis: Axis::X,
            at,
            from: y0.min(y1),
            to: y0.max(y1),
            tag,
        }
    }

    /// Segment `[x0, x1] × {y = at}`.
    pub fn horizontal(at: f64, x0: f64, x1: f64, tag: BoundaryTag) -> Self {
        BoundarySegment {
            axis: Axis::Y,
            at,
            from: x0.min(x1),
            to: x0.max(x1),
            tag,
        }
    }

    fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        let (fixed, free) = match self.axis {
            Axis::X => (p[0], p[1]),
            Axis::Y => (p[1], p[0]),
        };
        (fixed - self.at).abs() <= tol && free >= self.from - tol && free <= self.to + tol
    }
}

/// A partition of the rectangle boundary into tagged segments.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySpec {
    segments: Vec<BoundarySegment>,
}

impl BoundarySpec {
    /// Rejects segments of non-positive length and pairs that overlap in more
    /// than an endpoint. Coverage of the boundary is checked against a
    /// concrete mesh by [`Mesh::classify_boundary`].
    pub fn new(segments: Vec<BoundarySegment>) -> Result<Self> {
        for s in &segments {
            if !(s.to > s.from) || !s.at.is_finite() {
                return Err(Error::Config(format!("degenerate boundary segment {s:?}")));
            }
        }
        for (a_idx, a) in segments.iter().enumerate() {
            for b in &segments[a_idx + 1..] {
                if a.axis == b.axis && (a.at - b.at).abs() < 1e-12 {
                    let overlap = a.to.min(b.to) - a.from.max(b.from);
                    if overlap > 1e-12 {
                        return Err(Error::Config(format!(
                            "boundary segments {a:?} and {b:?} overlap"
                        )));
                    }
                }
            }
        }
        Ok(BoundarySpec { segments })
    }

    pub fn segments(&self) -> &[BoundarySegment] {
        &self.segments
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryEdge {
    /// Endpoints, ordered counterclockwise around the domain.
    pub vertices: [usize; 2],
    /// The single triangle owning this edge.
    pub triangle: usize,
    pub tag: Option<BoundaryTag>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    width: f64,
    height: f64,
    nx: usize,
    ny: usize,
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
}

/// Returns `m` with `h = 1/m`, or an error naming `h`.
pub fn reciprocal_of(h: f64) -> Result<usize> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Config(format!("mesh size h = {h} must be positive")));
    }
    let m = (1.0 / h).round();
    if m < 1.0 || (m * h - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "mesh size h = {h} is not the reciprocal of a positive integer"
        )));
    }
    Ok(m as usize)
}

fn integer_multiple(len: f64, m: usize, name: &str) -> Result<usize> {
    let cells = len * m as f64;
    let rounded = cells.round();
    if !(len > 0.0) || rounded < 1.0 || (cells - rounded).abs() > 1e-9 * rounded.max(1.0) {
        return Err(Error::Config(format!(
            "{name} = {len} is not an integer multiple of h = 1/{m}"
        )));
    }
    Ok(rounded as usize)
}

impl Mesh {
    /// Structured triangulation of `[0, width] × [0, height]` with mesh size
    /// `h = 1/m`. Boundary edges are left untagged.
    pub fn structured(width: f64, height: f64, h: f64) -> Result<Mesh> {
        let m = reciprocal_of(h)?;
        let nx = integer_multiple(width, m, "width")?;
        let ny = integer_multiple(height, m, "height")?;
        let step = 1.0 / m as f64;

        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push([i as f64 * step, j as f64 * step]);
            }
        }
        let vid = |i: usize, j: usize| j * (nx + 1) + i;

        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let v00 = vid(i, j);
                let v10 = vid(i + 1, j);
                let v01 = vid(i, j + 1);
                let v11 = vid(i + 1, j + 1);
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }

        let cell = |i: usize, j: usize| 2 * (j * nx + i);
        let mut boundary_edges = Vec::with_capacity(2 * (nx + ny));
        for i in 0..nx {
            boundary_edges.push(BoundaryEdge {
                vertices: [vid(i, 0), vid(i + 1, 0)],
                triangle: cell(i, 0),
                tag: None,
            });
        }
        for j in 0..ny {
            boundary_edges.push(BoundaryEdge {
                vertices: [vid(nx, j), vid(nx, j + 1)],
                triangle: cell(nx - 1, j),
                tag: None,
            });
        }
        for i in (0..nx).rev() {
            boundary_edges.push(BoundaryEdge {
                vertices: [vid(i + 1, ny), vid(i, ny)],
                triangle: cell(i, ny - 1) + 1,
                tag: None,
            });
        }
        for j in (0..ny).rev() {
            boundary_edges.push(BoundaryEdge {
                vertices: [vid(0, j + 1), vid(0, j)],
                triangle: cell(0, j) + 1,
                tag: None,
            });
        }

        Ok(Mesh {
            width: nx as f64 * step,
            height: ny as f64 * step,
            nx,
            ny,
            vertices,
            triangles,
            boundary_edges,
        })
    }

    /// Tags every boundary edge by the segment containing its midpoint.
    pub fn classify_boundary(mut self, spec: &BoundarySpec) -> Result<Mesh> {
        let tol = 1e-9 * self.h();
        for e in 0..self.boundary_edges.len() {
            let mid = self.edge_midpoint(e);
            let mut hits = spec.segments().iter().filter(|s| s.contains(mid, tol));
            let first = hits.next();
            let second = hits.next();
            match (first, second) {
                (Some(s), None) => self.boundary_edges[e].tag = Some(s.tag),
                (None, _) => {
                    return Err(Error::Config(format!(
                        "boundary edge with midpoint ({:.6}, {:.6}) is not covered by any segment",
                        mid[0], mid[1]
                    )))
                }
                (Some(_), Some(_)) => {
                    return Err(Error::Config(format!(
                        "boundary edge with midpoint ({:.6}, {:.6}) is covered by two segments",
                        mid[0], mid[1]
                    )))
                }
            }
        }
        Ok(self)
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Mesh size.
    pub fn h(&self) -> f64 {
        self.width / self.nx as f64
    }

    /// Number of cells per unit length (`1/h`).
    pub fn cells_per_unit(&self) -> usize {
        (self.nx as f64 / self.width).round() as usize
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_classified(&self) -> bool {
        self.boundary_edges.iter().all(|e| e.tag.is_some())
    }

    pub fn triangle_coords(&self, t: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Signed area; positive for counterclockwise triangles.
    pub fn signed_area(&self, t: usize) -> f64 {
        let [p0, p1, p2] = self.triangle_coords(t);
        0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]))
    }

    pub fn barycenter(&self, t: usize) -> [f64; 2] {
        let [p0, p1, p2] = self.triangle_coords(t);
        [
            (p0[0] + p1[0] + p2[0]) / 3.0,
            (p0[1] + p1[1] + p2[1]) / 3.0,
        ]
    }

    /// Gradients of the three barycentric (P1 hat) functions on triangle `t`.
    pub fn shape_gradients(&self, t: usize) -> [[f64; 2]; 3] {
        let [p0, p1, p2] = self.triangle_coords(t);
        let two_area = 2.0 * self.signed_area(t);
        [
            [(p1[1] - p2[1]) / two_area, (p2[0] - p1[0]) / two_area],
            [(p2[1] - p0[1]) / two_area, (p0[0] - p2[0]) / two_area],
            [(p0[1] - p1[1]) / two_area, (p1[0] - p0[0]) / two_area],
        ]
    }

    pub fn edge_midpoint(&self, e: usize) -> [f64; 2] {
        let [a, b] = self.boundary_edges[e].vertices;
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.boundary_edges[e].vertices;
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt()
    }

    /// Total length of the edges carrying `tag`.
    pub fn tagged_length(&self, tag: BoundaryTag) -> f64 {
        (0..self.boundary_edges.len())
            .filter(|&e| self.boundary_edges[e].tag == Some(tag))
            .map(|e| self.edge_length(e))
            .sum()
    }

    /// Per-vertex flag: does the vertex belong to at least one edge tagged `tag`?
    pub fn vertices_on(&self, tag: BoundaryTag) -> Vec<bool> {
        let mut on = vec![false; self.vertices.len()];
        for e in &self.boundary_edges {
            if e.tag == Some(tag) {
                on[e.vertices[0]] = true;
                on[e.vertices[1]] = true;
            }
        }
        on
    }

    /// Barycentric coordinates of `p` with respect to triangle `t`.
    pub fn barycentric(&self, t: usize, p: [f64; 2]) -> [f64; 3] {
        let [p0, p1, p2] = self.triangle_coords(t);
        let two_area = 2.0 * self.signed_area(t);
        let l1 = ((p[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p[1] - p0[1])) / two_area;
        let l2 = ((p1[0] - p0[0]) * (p[1] - p0[1]) - (p[0] - p0[0]) * (p1[1] - p0[1])) / two_area;
        [1.0 - l1 - l2, l1, l2]
    }

    /// Finds a triangle containing `p` (closed, up to round-off) and the
    /// barycentric coordinates of `p` in it. Points on shared edges resolve
    /// to one of the neighbours; P1 fields agree there.
    pub fn locate(&self, p: [f64; 2]) -> Option<(usize, [f64; 3])> {
        let h = self.h();
        let tol = 1e-10 * h;
        if p[0] < -tol || p[1] < -tol || p[0] > self.width + tol || p[1] > self.height + tol {
            return None;
        }
        let i = ((p[0] / h).floor().max(0.0) as usize).min(self.nx - 1);
        let j = ((p[1] / h).floor().max(0.0) as usize).min(self.ny - 1);
        let dx = p[0] - i as f64 * h;
        let dy = p[1] - j as f64 * h;
        let t = 2 * (j * self.nx + i) + usize::from(dy > dx);
        Some((t, self.barycentric(t, p)))
    }

    /// True when `self` refines `coarse`: same rectangle, and the coarse cell
    /// count per unit length divides this mesh's.
    pub fn refines(&self, coarse: &Mesh) -> bool {
        let (fine_m, coarse_m) = (self.cells_per_unit(), coarse.cells_per_unit());
        (self.width - coarse.width).abs() < 1e-12
            && (self.height - coarse.height).abs() < 1e-12
            && fine_m % coarse_m == 0
    }
}
