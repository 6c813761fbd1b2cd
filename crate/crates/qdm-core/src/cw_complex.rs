//! Oriented 2D cell complexes: vertices, directed edges and faces given as
//! closed signed edge walks.

use serde::Serialize;

use crate::error::{QdmError, Result};

/// How an edge meets a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Incidence {
    /// The vertex is the head of the edge.
    In,
    /// The vertex is the tail of the edge.
    Out,
    /// Head and tail coincide.
    Loop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridShape {
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellComplex2 {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    faces: Vec<Vec<(usize, i8)>>,
    labels: Vec<String>,
    grid: Option<GridShape>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    EdgeEndpointOutOfRange { edge: usize },
    FaceEdgeOutOfRange { face: usize, edge: usize },
    BadSign { face: usize },
    EmptyFace { face: usize },
    OpenFaceWalk { face: usize },
    EdgeFaceCount { edge: usize, count: usize },
    NonOrientable { edge: usize },
}

impl CellComplex2 {
    /// Builds a complex and rejects it if `validate` finds anything wrong.
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>, faces: Vec<Vec<(usize, i8)>>) -> Result<Self> {
        let c = Self::new_unchecked(vertex_count, edges, faces);
        let violations = validate(&c);
        if violations.is_empty() {
            Ok(c)
        } else {
            Err(QdmError::InvalidCell(format!("{violations:?}")))
        }
    }

    /// Builds a complex without validation; useful for constructing broken
    /// fixtures on purpose.
    pub fn new_unchecked(vertex_count: usize, edges: Vec<(usize, usize)>, faces: Vec<Vec<(usize, i8)>>) -> Self {
        Self { vertex_count, edges, faces, labels: Vec::new(), grid: None }
    }

    pub fn empty() -> Self {
        Self::new_unchecked(0, Vec::new(), Vec::new())
    }

    /// Two vertices joined by a single edge 0 -> 1, no faces.
    pub fn single_edge() -> Self {
        Self::new_unchecked(2, vec![(0, 1)], Vec::new())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }
    pub fn faces(&self) -> &[Vec<(usize, i8)>] {
        &self.faces
    }
    pub fn face(&self, f: usize) -> &[(usize, i8)] {
        &self.faces[f]
    }
    pub fn labels(&self) -> &[String] {
        &self.labels
    }
    pub fn grid(&self) -> Option<GridShape> {
        self.grid
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.labels = labels;
        self
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn is_loop(&self, e: usize) -> bool {
        let (t, h) = self.edges[e];
        t == h
    }

    /// Faces whose boundary contains `e`, with the sign of each occurrence.
    pub fn faces_of_edge(&self, e: usize) -> Vec<(usize, i8)> {
        let mut out = Vec::new();
        for (f, walk) in self.faces.iter().enumerate() {
            for &(edge, s) in walk {
                if edge == e {
                    out.push((f, s));
                }
            }
        }
        out
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertex_count {
            Ok(())
        } else {
            Err(QdmError::InvalidCell(format!("vertex {v} (have {})", self.vertex_count)))
        }
    }
    pub fn check_edge(&self, e: usize) -> Result<()> {
        if e < self.edges.len() {
            Ok(())
        } else {
            Err(QdmError::InvalidCell(format!("edge {e} (have {})", self.edges.len())))
        }
    }
    pub fn check_face(&self, f: usize) -> Result<()> {
        if f < self.faces.len() {
            Ok(())
        } else {
            Err(QdmError::InvalidCell(format!("face {f} (have {})", self.faces.len())))
        }
    }
}

/// Horizontal edge index of the grid cell (r, c).
pub fn torus_h(rows: usize, cols: usize, r: usize, c: usize) -> usize {
    (r % rows) * cols + (c % cols)
}

/// Vertical edge index of the grid cell (r, c).
pub fn torus_v(rows: usize, cols: usize, r: usize, c: usize) -> usize {
    rows * cols + (r % rows) * cols + (c % cols)
}

/// Periodic square lattice. Vertices are row-major, horizontal edges come
/// first and point +x, vertical edges point +y, and every face is walked
/// counterclockwise starting from its lower horizontal edge.
pub fn torus_grid(rows: usize, cols: usize) -> Result<CellComplex2> {
    if rows == 0 || cols == 0 {
        return Err(QdmError::config("complex", "torus rows and cols must be positive"));
    }
    let vid = |r: usize, c: usize| (r % rows) * cols + (c % cols);
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            edges.push((vid(r, c), vid(r, c + 1)));
        }
    }
    for r in 0..rows {
        for c in 0..cols {
            edges.push((vid(r, c), vid(r + 1, c)));
        }
    }
    let mut faces = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            faces.push(vec![
                (torus_h(rows, cols, r, c), 1),
                (torus_v(rows, cols, r, c + 1), 1),
                (torus_h(rows, cols, r + 1, c), -1),
                (torus_v(rows, cols, r, c), -1),
            ]);
        }
    }
    let mut labels = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            labels.push(format!("v({r},{c})"));
        }
    }
    let mut out = CellComplex2::new_unchecked(rows * cols, edges, faces).with_labels(labels);
    out.grid = Some(GridShape { rows, cols });
    Ok(out)
}

/// Concatenation with the cells of `b` shifted past those of `a`.
pub fn disjoint_union(a: &CellComplex2, b: &CellComplex2) -> CellComplex2 {
    let dv = a.vertex_count;
    let de = a.edges.len();
    let mut edges = a.edges.clone();
    edges.extend(b.edges.iter().map(|&(t, h)| (t + dv, h + dv)));
    let mut faces = a.faces.clone();
    faces.extend(b.faces.iter().map(|w| w.iter().map(|&(e, s)| (e + de, s)).collect()));
    let labels = if a.labels.is_empty() && b.labels.is_empty() { Vec::new() } else { merged_labels(a, b, None) };
    CellComplex2::new_unchecked(dv + b.vertex_count, edges, faces).with_labels(labels)
}

/// Identifies vertex `va` of `a` with vertex `vb` of `b`. The shared vertex
/// keeps the id `va`; the remaining vertices of `b` follow those of `a` in
/// their original order.
pub fn wedge_at_vertex(a: &CellComplex2, va: usize, b: &CellComplex2, vb: usize) -> Result<(CellComplex2, usize)> {
    a.check_vertex(va)?;
    b.check_vertex(vb)?;
    let dv = a.vertex_count;
    let map = |u: usize| -> usize {
        match u.cmp(&vb) {
            std::cmp::Ordering::Equal => va,
            std::cmp::Ordering::Less => dv + u,
            std::cmp::Ordering::Greater => dv + u - 1,
        }
    };
    let de = a.edges.len();
    let mut edges = a.edges.clone();
    edges.extend(b.edges.iter().map(|&(t, h)| (map(t), map(h))));
    let mut faces = a.faces.clone();
    faces.extend(b.faces.iter().map(|w| w.iter().map(|&(e, s)| (e + de, s)).collect()));
    let labels = if a.labels.is_empty() && b.labels.is_empty() { Vec::new() } else { merged_labels(a, b, Some(vb)) };
    let out = CellComplex2::new_unchecked(dv + b.vertex_count - 1, edges, faces).with_labels(labels);
    Ok((out, va))
}

fn merged_labels(a: &CellComplex2, b: &CellComplex2, skip_b: Option<usize>) -> Vec<String> {
    let name = |c: &CellComplex2, v: usize| c.labels.get(v).cloned().unwrap_or_else(|| format!("v{v}"));
    let mut out: Vec<String> = (0..a.vertex_count).map(|v| format!("a.{}", name(a, v))).collect();
    for v in 0..b.vertex_count {
        if Some(v) != skip_b {
            out.push(format!("b.{}", name(b, v)));
        }
    }
    out
}

/// Lists every broken invariant. Face rules are skipped for complexes
/// without faces.
pub fn validate(c: &CellComplex2) -> Vec<Violation> {
    let mut out = Vec::new();
    for (e, &(t, h)) in c.edges.iter().enumerate() {
        if t >= c.vertex_count || h >= c.vertex_count {
            out.push(Violation::EdgeEndpointOutOfRange { edge: e });
        }
    }
    if c.faces.is_empty() {
        return out;
    }
    let mut count = vec![0usize; c.edges.len()];
    let mut signed = vec![0i64; c.edges.len()];
    for (f, walk) in c.faces.iter().enumerate() {
        if walk.is_empty() {
            out.push(Violation::EmptyFace { face: f });
            continue;
        }
        let mut ok = true;
        for &(e, s) in walk {
            if e >= c.edges.len() {
                out.push(Violation::FaceEdgeOutOfRange { face: f, edge: e });
                ok = false;
            } else {
                count[e] += 1;
                signed[e] += i64::from(s);
            }
            if s != 1 && s != -1 {
                out.push(Violation::BadSign { face: f });
                ok = false;
            }
        }
        if ok && !walk_closed(c, walk) {
            out.push(Violation::OpenFaceWalk { face: f });
        }
    }
    for e in 0..c.edges.len() {
        if count[e] != 2 {
            out.push(Violation::EdgeFaceCount { edge: e, count: count[e] });
        } else if signed[e] != 0 {
            out.push(Violation::NonOrientable { edge: e });
        }
    }
    out
}

fn walk_closed(c: &CellComplex2, walk: &[(usize, i8)]) -> bool {
    let ends = |&(e, s): &(usize, i8)| {
        let (t, h) = c.edges[e];
        if s > 0 {
            (t, h)
        } else {
            (h, t)
        }
    };
    let steps: Vec<(usize, usize)> = walk.iter().map(ends).collect();
    (0..steps.len()).all(|k| steps[k].1 == steps[(k + 1) % steps.len()].0)
}

/// Edges touching `v`, ascending by edge id.
pub fn vertex_star(c: &CellComplex2, v: usize) -> Vec<(usize, Incidence)> {
    c.edges
        .iter()
        .enumerate()
        .filter_map(|(e, &(t, h))| match (t == v, h == v) {
            (true, true) => Some((e, Incidence::Loop)),
            (false, true) => Some((e, Incidence::In)),
            (true, false) => Some((e, Incidence::Out)),
            (false, false) => None,
        })
        .collect()
}
