//! Single-vertex matter operators W^(J,K) that intertwine the J-th vertex
//! projector and K-th edge projector with the Hamiltonian's members.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::cw_complex::CellComplex2;
use crate::cyclic_action::{theta_matrix, MatterAction};
use crate::error::{QdmError, Result};
use crate::model_operators::{edge_projector, matter_operator, vertex_projector, LinearOp, LocalOp};
use crate::state_space::{ModelSpace, DEFAULT_DENSE_CAP};

type C = Complex64;
const PIVOT_TOL: f64 = 1e-9;
const SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct WOperator {
    pub label: String,
    /// Vertex projector index the operator excites, when known.
    pub j: Option<usize>,
    /// Edge projector index the operator excites, when known.
    pub k: Option<usize>,
    pub matrix: DMatrix<C>,
    /// Free-form bookkeeping, for example which vacua an operator excites.
    pub note: Option<String>,
}

impl WOperator {
    pub fn new(label: impl Into<String>, j: Option<usize>, k: Option<usize>, matrix: DMatrix<C>) -> Self {
        Self { label: label.into(), j, k, matrix, note: None }
    }

    /// The operator labeled `(j,k)`.
    pub fn labeled(j: usize, k: usize, matrix: DMatrix<C>) -> Self {
        Self::new(format!("({j},{k})"), Some(j), Some(k), matrix)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Builds a complex matrix from real row-major rows.
pub fn real_matrix(rows: &[Vec<f64>]) -> DMatrix<C> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(m, n, |i, j| C::new(rows[i][j], 0.0))
}

/// The complex with two vertices joined by the edge 0 -> 1.
pub fn two_vertex_space(action: &MatterAction) -> Result<Arc<ModelSpace>> {
    Ok(Arc::new(ModelSpace::new(CellComplex2::single_edge(), action.clone())?))
}

fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < SNAP_TOL {
        r + 0.0
    } else {
        x
    }
}

/// Scales so the first nonzero entry (row-major) is 1 and snaps entries
/// that are integral within tolerance.
pub fn canonicalize(w: &DMatrix<C>) -> DMatrix<C> {
    let mut first = None;
    'outer: for i in 0..w.nrows() {
        for j in 0..w.ncols() {
            if w[(i, j)].norm() > PIVOT_TOL {
                first = Some(w[(i, j)]);
                break 'outer;
            }
        }
    }
    let Some(f) = first else { return w.clone() };
    w.map(|z| {
        let q = z / f;
        C::new(snap(q.re), snap(q.im))
    })
}

/// Null-space basis of `a` from its reduced row echelon form, one vector
/// per free column, ordered by free column.
pub fn null_space(a: &DMatrix<C>) -> Vec<Vec<C>> {
    let (rows, cols) = a.shape();
    let mut m = a.clone();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, norm) =
            (r..rows).map(|i| (i, m[(i, c)].norm())).max_by(|x, y| x.1.partial_cmp(&y.1).unwrap()).unwrap();
        if norm < PIVOT_TOL {
            continue;
        }
        m.swap_rows(r, best);
        let p = m[(r, c)];
        for j in 0..cols {
            m[(r, j)] /= p;
        }
        for i in 0..rows {
            if i != r {
                let f = m[(i, c)];
                if f.norm() > 0.0 {
                    for j in 0..cols {
                        let v = m[(r, j)];
                        m[(i, j)] -= f * v;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![C::new(0.0, 0.0); cols];
            v[f] = C::new(1.0, 0.0);
            for (k, &p) in pivots.iter().enumerate() {
                v[p] = -m[(k, f)];
            }
            v
        })
        .collect()
}

fn unit(m: usize, idx: usize) -> DMatrix<C> {
    let mut e = DMatrix::zeros(m, m);
    e[(idx / m, idx % m)] = C::new(1.0, 0.0);
    e
}

/// Basis of the solution space of `constraint(W) = 0`, where `constraint`
/// is linear and returns the flattened residual.
fn solve_linear<F>(m: usize, constraint: F) -> Result<Vec<DMatrix<C>>>
where
    F: Fn(&DMatrix<C>) -> Result<Vec<C>>,
{
    let cols: Vec<Vec<C>> = (0..m * m).map(|i| constraint(&unit(m, i))).collect::<Result<_>>()?;
    let rows = cols.first().map_or(0, Vec::len);
    let a = DMatrix::from_fn(rows, m * m, |i, j| cols[j][i]);
    Ok(null_space(&a).into_iter().map(|v| canonicalize(&DMatrix::from_fn(m, m, |i, j| v[i * m + j]))).collect())
}

fn dense(op: &LinearOp) -> DMatrix<C> {
    op.to_dense()
}

/// Vertex-relation and edge-relation residual matrices.
type Residuals = (Vec<DMatrix<C>>, Vec<DMatrix<C>>);

/// Dense residual matrices of both relations on the two-vertex fixture,
/// with W acting at each end of the edge in turn.
fn relation_residuals(space: &Arc<ModelSpace>, w: &DMatrix<C>, j: usize, k: usize) -> Result<Residuals> {
    let mut vertex = Vec::new();
    let mut edge = Vec::new();
    let c1 = dense(&edge_projector(space, 0, 1)?);
    let ck = dense(&edge_projector(space, 0, k)?);
    for v in 0..2 {
        let wv = dense(&matter_operator(space, v, w)?);
        let aj = dense(&vertex_projector(space, v, j)?);
        let a1 = dense(&vertex_projector(space, v, 1)?);
        vertex.push(&aj * &wv - &wv * &a1);
        edge.push(&ck * &wv - &wv * &c1);
    }
    Ok((vertex, edge))
}

fn check_fixture(space: &ModelSpace) -> Result<()> {
    let c = space.complex();
    if c.vertex_count() != 2 || c.edge_count() != 1 || c.edge(0) != (0, 1) {
        return Err(QdmError::config("fixture", "expected two vertices joined by the edge 0 -> 1"));
    }
    if space.dim() > DEFAULT_DENSE_CAP {
        return Err(QdmError::DimensionCap { requested: space.dim() as u128, cap: DEFAULT_DENSE_CAP });
    }
    Ok(())
}

fn check_labels(space: &ModelSpace, j: usize, k: usize) -> Result<()> {
    if j == 0 || j > space.n() {
        return Err(QdmError::config("J", format!("must lie in 1..={}", space.n())));
    }
    if k == 0 || k > space.m() {
        return Err(QdmError::config("K", format!("must lie in 1..={}", space.m())));
    }
    Ok(())
}

/// Basis of all M x M matrices satisfying both intertwining relations on
/// the two-vertex fixture, with W at either end of the edge.
pub fn solve_w(space2v: &Arc<ModelSpace>, j: usize, k: usize) -> Result<Vec<DMatrix<C>>> {
    check_fixture(space2v)?;
    check_labels(space2v, j, k)?;
    solve_linear(space2v.m(), |w| {
        let (vertex, edge) = relation_residuals(space2v, w, j, k)?;
        Ok(vertex.iter().chain(&edge).flat_map(|d| d.iter().copied().collect::<Vec<_>>()).collect())
    })
}

/// Basis of matrices satisfying the vertex relation alone. On a single
/// matter factor this is Theta(1) W = omega^(J-1) W Theta(1).
pub fn solve_vertex_intertwiners(action: &MatterAction, j: usize) -> Result<Vec<DMatrix<C>>> {
    let n = action.group().order();
    if j == 0 || j > n {
        return Err(QdmError::config("J", format!("must lie in 1..={n}")));
    }
    let m = action.matter_dim();
    let theta = theta_matrix(action, 1);
    let t = DMatrix::from_fn(m, m, |r, c| C::new(theta[r][c] as f64, 0.0));
    let phase = action.group().phase(j as i64 - 1);
    solve_linear(m, |w| {
        let d = &t * w - w * &t * phase;
        Ok(d.iter().copied().collect())
    })
}

/// Vertex-relation solutions for every J, labeled (J,k) with k counting
/// solutions in order of their first nonzero entry. The identity is
/// appended as `vac` when it is not itself one of the solutions.
pub fn vertex_intertwiner_family(action: &MatterAction) -> Result<Vec<WOperator>> {
    let n = action.group().order();
    let m = action.matter_dim();
    let mut out = Vec::new();
    for j in 1..=n {
        let mut sols = solve_vertex_intertwiners(action, j)?;
        sols.sort_by_key(first_nonzero);
        for (idx, w) in sols.into_iter().enumerate() {
            out.push(WOperator::new(format!("({j},{})", idx + 1), Some(j), None, w));
        }
    }
    let id = DMatrix::<C>::identity(m, m);
    if !out.iter().any(|w| (&w.matrix - &id).norm() < SNAP_TOL) {
        out.push(WOperator::new("vac", Some(1), Some(1), id));
    }
    Ok(out)
}

fn first_nonzero(w: &DMatrix<C>) -> usize {
    let m = w.ncols();
    (0..w.len()).find(|&i| w[(i / m, i % m)].norm() > PIVOT_TOL).unwrap_or(usize::MAX)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WResidual {
    pub vertex: f64,
    pub edge: f64,
}

impl WResidual {
    pub fn max(&self) -> f64 {
        self.vertex.max(self.edge)
    }
}

fn local(op: &LinearOp) -> LocalOp {
    op.to_local().expect("model operators are local")
}

fn relation_norm(space: &ModelSpace, l: &LocalOp, w: &LocalOp, r: &LocalOp) -> f64 {
    let one = C::new(1.0, 0.0);
    let d = LocalOp::linear_combination(space, &[(one, &l.compose(space, w)), (-one, &w.compose(space, r))]);
    d.max_column_norm()
}

/// Largest residual norm of the two relations over all basis vectors of
/// `space`, with W placed at every vertex in turn. Edge relations are
/// checked on every non-loop edge at that vertex; on a self-loop W acts at
/// both ends at once and the single-vertex relation does not apply.
pub fn verify_w(space: &Arc<ModelSpace>, w: &WOperator) -> Result<WResidual> {
    let (j, k) = match (w.j, w.k) {
        (Some(j), Some(k)) => (j, k),
        _ => return Err(QdmError::config("label", format!("{} has no (J,K) label", w.label))),
    };
    check_labels(space, j, k)?;
    let c = space.complex();
    let mut out = WResidual { vertex: 0.0, edge: 0.0 };
    for v in 0..c.vertex_count() {
        let wv = local(&matter_operator(space, v, &w.matrix)?);
        let aj = local(&vertex_projector(space, v, j)?);
        let a1 = local(&vertex_projector(space, v, 1)?);
        out.vertex = out.vertex.max(relation_norm(space, &aj, &wv, &a1));
        for &(e, _) in space.star(v) {
            if c.is_loop(e) {
                continue;
            }
            let ck = local(&edge_projector(space, e, k)?);
            let c1 = local(&edge_projector(space, e, 1)?);
            out.edge = out.edge.max(relation_norm(space, &ck, &wv, &c1));
        }
    }
    Ok(out)
}
