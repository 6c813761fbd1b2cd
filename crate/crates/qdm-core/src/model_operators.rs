//! Matrix-free operators on a `ModelSpace`.
//!
//! Every model operator acts on a handful of digits, so it is stored as a
//! `LocalOp`: the list of digits it touches plus, for each local
//! configuration of those digits, a sparse row `out[i] = sum c * in[i + off]`.
//! Applying a local operator is one sequential pass over the output with an
//! odometer that tracks the touched digits, so no divisions are needed in
//! the inner loop. Local operators compose and add on the union of their
//! supports, which gives exact commutators without touching the full space.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cw_complex::Incidence;
use crate::error::{QdmError, Result};
use crate::state_space::{ModelSpace, StateVector};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Coefficients smaller than this are dropped when tables are merged.
pub const TABLE_EPS: f64 = 1e-14;

/// Outputs at least this long are split across rayon workers.
const PAR_THRESHOLD: usize = 1 << 16;
const PAR_CHUNK: usize = 1 << 14;

/// A digit of the basis index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Digit {
    Edge(usize),
    Vertex(usize),
}

impl Digit {
    fn weight(self, space: &ModelSpace) -> usize {
        match self {
            Digit::Edge(e) => space.edge_weight(e),
            Digit::Vertex(v) => space.vertex_weight(v),
        }
    }
    fn radix(self, space: &ModelSpace) -> usize {
        match self {
            Digit::Edge(_) => space.n(),
            Digit::Vertex(_) => space.m(),
        }
    }
}

/// Operator acting on the digits in `support` only.
#[derive(Debug, Clone)]
pub struct LocalOp {
    support: Vec<Digit>,
    weights: Vec<usize>,
    radices: Vec<usize>,
    /// Local stride of each support digit (mixed radix, first digit fastest).
    strides: Vec<usize>,
    /// rows[u] lists (source configuration, coefficient).
    rows: Vec<Vec<(usize, Complex64)>>,
    /// CSR form of `rows` with global index offsets, built once.
    row_start: Vec<usize>,
    entries: Vec<(isize, Complex64)>,
}

impl LocalOp {
    /// Builds a table by evaluating `row` on every local configuration of
    /// `support`. `row(digits)` returns the source configurations (as digit
    /// vectors) and their coefficients.
    pub fn build<F>(space: &ModelSpace, support: Vec<Digit>, row: F) -> Self
    where
        F: Fn(&[usize]) -> Vec<(Vec<usize>, Complex64)>,
    {
        let radices: Vec<usize> = support.iter().map(|d| d.radix(space)).collect();
        let strides = strides_of(&radices);
        let size: usize = radices.iter().product();
        let mut digits = vec![0usize; support.len()];
        let mut rows = Vec::with_capacity(size);
        for u in 0..size {
            unpack(u, &radices, &mut digits);
            let mut r: Vec<(usize, Complex64)> =
                row(&digits).into_iter().map(|(src, c)| (pack(&src, &strides), c)).collect();
            merge_row(&mut r);
            rows.push(r);
        }
        Self::from_rows(space, support, rows)
    }

    fn from_rows(space: &ModelSpace, support: Vec<Digit>, rows: Vec<Vec<(usize, Complex64)>>) -> Self {
        let weights: Vec<usize> = support.iter().map(|d| d.weight(space)).collect();
        let radices: Vec<usize> = support.iter().map(|d| d.radix(space)).collect();
        let strides = strides_of(&radices);
        let mut row_start = Vec::with_capacity(rows.len() + 1);
        let mut entries = Vec::new();
        let mut a = vec![0usize; support.len()];
        let mut b = vec![0usize; support.len()];
        for (u, r) in rows.iter().enumerate() {
            row_start.push(entries.len());
            unpack(u, &radices, &mut a);
            for &(src, c) in r {
                unpack(src, &radices, &mut b);
                let off: isize =
                    (0..support.len()).map(|k| (b[k] as isize - a[k] as isize) * weights[k] as isize).sum();
                entries.push((off, c));
            }
        }
        row_start.push(entries.len());
        Self { support, weights, radices, strides, rows, row_start, entries }
    }

    pub fn support(&self) -> &[Digit] {
        &self.support
    }

    /// True when no row has a coefficient of modulus above `eps`.
    pub fn is_zero(&self, eps: f64) -> bool {
        self.rows.iter().all(|r| r.iter().all(|&(_, c)| c.norm() <= eps))
    }

    /// Largest coefficient modulus in the table.
    pub fn max_coefficient(&self) -> f64 {
        self.rows.iter().flat_map(|r| r.iter().map(|&(_, c)| c.norm())).fold(0.0, f64::max)
    }

    /// Largest norm of the image of a basis vector, which is the same on the
    /// support as on the full space.
    pub fn max_column_norm(&self) -> f64 {
        let mut cols = vec![0.0; self.rows.len()];
        for r in &self.rows {
            for &(s, c) in r {
                cols[s] += c.norm_sqr();
            }
        }
        cols.into_iter().fold(0.0, f64::max).sqrt()
    }

    /// Re-expresses the table on a larger support (identity on the new digits).
    fn lift(&self, space: &ModelSpace, support: &[Digit]) -> LocalOp {
        let map: Vec<usize> =
            self.support.iter().map(|d| support.iter().position(|x| x == d).expect("support is a superset")).collect();
        let radices: Vec<usize> = support.iter().map(|d| d.radix(space)).collect();
        let strides = strides_of(&radices);
        let size: usize = radices.iter().product();
        let mut digits = vec![0usize; support.len()];
        let mut mine = vec![0usize; self.support.len()];
        let mut rows = Vec::with_capacity(size);
        for u in 0..size {
            unpack(u, &radices, &mut digits);
            for (k, &p) in map.iter().enumerate() {
                mine[k] = digits[p];
            }
            let local = pack(&mine, &self.strides);
            let r = self.rows[local]
                .iter()
                .map(|&(src, c)| {
                    let mut full = digits.clone();
                    let mut s = vec![0usize; self.support.len()];
                    unpack(src, &self.radices, &mut s);
                    for (k, &p) in map.iter().enumerate() {
                        full[p] = s[k];
                    }
                    (pack(&full, &strides), c)
                })
                .collect();
            rows.push(r);
        }
        LocalOp::from_rows(space, support.to_vec(), rows)
    }

    /// self * other (other acts first).
    pub fn compose(&self, space: &ModelSpace, other: &LocalOp) -> LocalOp {
        let support = union_support(&self.support, &other.support);
        let a = self.lift(space, &support);
        let b = other.lift(space, &support);
        let rows = a
            .rows
            .iter()
            .map(|ra| {
                let mut out = Vec::new();
                for &(mid, ca) in ra {
                    for &(src, cb) in &b.rows[mid] {
                        out.push((src, ca * cb));
                    }
                }
                merge_row(&mut out);
                out
            })
            .collect();
        LocalOp::from_rows(space, support, rows)
    }

    /// sum_k c_k * ops_k on the union support.
    pub fn linear_combination(space: &ModelSpace, terms: &[(Complex64, &LocalOp)]) -> LocalOp {
        let mut support: Vec<Digit> = Vec::new();
        for (_, op) in terms {
            support = union_support(&support, &op.support);
        }
        let lifted: Vec<(Complex64, LocalOp)> = terms.iter().map(|(c, op)| (*c, op.lift(space, &support))).collect();
        let size: usize = support.iter().map(|d| d.radix(space)).product();
        let rows = (0..size)
            .map(|u| {
                let mut out = Vec::new();
                for (c, op) in &lifted {
                    out.extend(op.rows[u].iter().map(|&(s, x)| (s, c * x)));
                }
                merge_row(&mut out);
                out
            })
            .collect();
        LocalOp::from_rows(space, support, rows)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self, space: &ModelSpace) -> LocalOp {
        let mut rows = vec![Vec::new(); self.rows.len()];
        for (u, r) in self.rows.iter().enumerate() {
            for &(src, c) in r {
                rows[src].push((u, c.conj()));
            }
        }
        for r in &mut rows {
            merge_row(r);
        }
        LocalOp::from_rows(space, self.support.clone(), rows)
    }

    /// Writes `scale * (self x)[start..start+out.len()]` into `out`,
    /// adding to the existing content when `add` is set.
    fn kernel(&self, x: &[Complex64], out: &mut [Complex64], start: usize, scale: Complex64, add: bool) {
        let k = self.support.len();
        let mut digit = [0usize; 16];
        let mut count = [0usize; 16];
        assert!(k <= 16, "local support too large");
        let mut local = 0usize;
        for j in 0..k {
            digit[j] = (start / self.weights[j]) % self.radices[j];
            count[j] = self.weights[j] - start % self.weights[j];
            local += digit[j] * self.strides[j];
        }
        for (t, y) in out.iter_mut().enumerate() {
            let i = (start + t) as isize;
            let mut acc = ZERO;
            for &(off, c) in &self.entries[self.row_start[local]..self.row_start[local + 1]] {
                acc += c * x[(i + off) as usize];
            }
            if add {
                *y += scale * acc;
            } else {
                *y = scale * acc;
            }
            for j in 0..k {
                count[j] -= 1;
                if count[j] == 0 {
                    count[j] = self.weights[j];
                    digit[j] += 1;
                    local += self.strides[j];
                    if digit[j] == self.radices[j] {
                        digit[j] = 0;
                        local -= self.radices[j] * self.strides[j];
                    }
                }
            }
        }
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64], scale: Complex64, add: bool) {
        if y.len() >= PAR_THRESHOLD {
            y.par_chunks_mut(PAR_CHUNK)
                .enumerate()
                .for_each(|(c, chunk)| self.kernel(x, chunk, c * PAR_CHUNK, scale, add));
        } else {
            self.kernel(x, y, 0, scale, add);
        }
    }
}

fn strides_of(radices: &[usize]) -> Vec<usize> {
    let mut s = Vec::with_capacity(radices.len());
    let mut acc = 1;
    for &r in radices {
        s.push(acc);
        acc *= r;
    }
    s
}

fn unpack(mut u: usize, radices: &[usize], out: &mut [usize]) {
    for (k, &r) in radices.iter().enumerate() {
        out[k] = u % r;
        u /= r;
    }
}

fn pack(digits: &[usize], strides: &[usize]) -> usize {
    digits.iter().zip(strides).map(|(d, s)| d * s).sum()
}

fn union_support(a: &[Digit], b: &[Digit]) -> Vec<Digit> {
    let mut out = a.to_vec();
    for d in b {
        if !out.contains(d) {
            out.push(*d);
        }
    }
    out
}

fn merge_row(r: &mut Vec<(usize, Complex64)>) {
    let mut m: BTreeMap<usize, Complex64> = BTreeMap::new();
    for &(s, c) in r.iter() {
        *m.entry(s).or_insert(ZERO) += c;
    }
    r.clear();
    r.extend(m.into_iter().filter(|(_, c)| c.norm() > TABLE_EPS));
}

/// What an operator is, for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Descriptor {
    pub kind: String,
    pub cell: Option<usize>,
    pub index: Option<usize>,
}

impl Descriptor {
    pub fn new(kind: &str, cell: Option<usize>, index: Option<usize>) -> Self {
        Self { kind: kind.to_string(), cell, index }
    }
}

impl std::fmt::Display for Descriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(c) = self.cell {
            write!(f, "[{c}]")?;
        }
        if let Some(i) = self.index {
            write!(f, "#{i}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Body {
    Local(Arc<LocalOp>),
    /// sum_k c_k * op_k
    Sum(Vec<(Complex64, LinearOp)>),
    /// ops[0] * ops[1] * ... (the last one acts first)
    Product(Vec<LinearOp>),
}

/// A matrix-free linear operator on a model space.
#[derive(Debug, Clone)]
pub struct LinearOp {
    space: Arc<ModelSpace>,
    body: Body,
    pub descriptor: Descriptor,
}

impl LinearOp {
    pub fn from_local(space: &Arc<ModelSpace>, local: LocalOp, descriptor: Descriptor) -> Self {
        Self { space: space.clone(), body: Body::Local(Arc::new(local)), descriptor }
    }

    pub fn sum(space: &Arc<ModelSpace>, terms: Vec<(Complex64, LinearOp)>, descriptor: Descriptor) -> Self {
        Self { space: space.clone(), body: Body::Sum(terms), descriptor }
    }

    pub fn product(space: &Arc<ModelSpace>, factors: Vec<LinearOp>, descriptor: Descriptor) -> Self {
        Self { space: space.clone(), body: Body::Product(factors), descriptor }
    }

    pub fn identity(space: &Arc<ModelSpace>) -> Self {
        let local = LocalOp::build(space, Vec::new(), |_| vec![(Vec::new(), ONE)]);
        Self::from_local(space, local, Descriptor::new("identity", None, None))
    }

    pub fn space(&self) -> &Arc<ModelSpace> {
        &self.space
    }

    pub fn local(&self) -> Option<&LocalOp> {
        match &self.body {
            Body::Local(l) => Some(l),
            _ => None,
        }
    }

    /// Digits the operator can touch.
    pub fn support(&self) -> Vec<Digit> {
        match &self.body {
            Body::Local(l) => l.support.clone(),
            Body::Sum(t) => t.iter().fold(Vec::new(), |acc, (_, op)| union_support(&acc, &op.support())),
            Body::Product(f) => f.iter().fold(Vec::new(), |acc, op| union_support(&acc, &op.support())),
        }
    }

    /// Collapses sums and products of local operators into a single table.
    pub fn to_local(&self) -> Option<LocalOp> {
        match &self.body {
            Body::Local(l) => Some((**l).clone()),
            Body::Sum(t) => {
                let locals: Vec<(Complex64, LocalOp)> =
                    t.iter().map(|(c, op)| op.to_local().map(|l| (*c, l))).collect::<Option<_>>()?;
                let refs: Vec<(Complex64, &LocalOp)> = locals.iter().map(|(c, l)| (*c, l)).collect();
                Some(LocalOp::linear_combination(&self.space, &refs))
            }
            Body::Product(f) => {
                let mut acc = LinearOp::identity(&self.space).to_local()?;
                for op in f {
                    acc = acc.compose(&self.space, &op.to_local()?);
                }
                Some(acc)
            }
        }
    }

    pub fn apply(&self, x: &StateVector) -> StateVector {
        assert_eq!(x.dim(), self.space.dim(), "state dimension does not match the operator");
        let mut y = StateVector::zeros(x.dim());
        self.apply_add(x, &mut y, ONE);
        y
    }

    /// y += scale * (self x)
    pub fn apply_add(&self, x: &StateVector, y: &mut StateVector, scale: Complex64) {
        match &self.body {
            Body::Local(l) => l.apply_into(&x.amps, &mut y.amps, scale, true),
            Body::Sum(terms) => {
                for (c, op) in terms {
                    op.apply_add(x, y, scale * c);
                }
            }
            Body::Product(factors) => {
                let mut cur = x.clone();
                for op in factors.iter().rev() {
                    cur = op.apply(&cur);
                }
                y.axpy(scale, &cur);
            }
        }
    }

    /// Dense matrix obtained by applying the operator to every basis vector.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let d = self.space.dim();
        let mut out = DMatrix::from_element(d, d, ZERO);
        for j in 0..d {
            let col = self.apply(&StateVector::basis(d, j));
            for i in 0..d {
                out[(i, j)] = col.amps[i];
            }
        }
        out
    }
}

/// Vertex, face and edge terms kept in the Hamiltonian.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Exclusion {
    pub vertices: Vec<usize>,
    /// Keep the edge terms of edges touching an excluded vertex.
    pub keep_edge_terms: bool,
}

impl Exclusion {
    pub fn none() -> Self {
        Self::default()
    }
    pub fn vertices(vertices: Vec<usize>) -> Self {
        Self { vertices, keep_edge_terms: false }
    }
    pub fn keeping_edge_terms(mut self) -> Self {
        self.keep_edge_terms = true;
        self
    }
}

/// Cells whose projectors enter H and P.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Terms {
    pub vertices: Vec<usize>,
    pub faces: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Terms {
    pub fn count(&self) -> usize {
        self.vertices.len() + self.faces.len() + self.edges.len()
    }
}

pub fn included_terms(space: &ModelSpace, excl: &Exclusion) -> Result<Terms> {
    let c = space.complex();
    for &v in &excl.vertices {
        c.check_vertex(v)?;
    }
    let vertices = (0..c.vertex_count()).filter(|v| !excl.vertices.contains(v)).collect();
    let faces = (0..c.face_count()).collect();
    let edges = (0..c.edge_count())
        .filter(|&e| {
            let (t, h) = c.edge(e);
            excl.keep_edge_terms || !(excl.vertices.contains(&t) || excl.vertices.contains(&h))
        })
        .collect();
    Ok(Terms { vertices, faces, edges })
}

/// Digits of vertex `v` and its non-loop edges, in star order.
fn vertex_support(space: &ModelSpace, v: usize) -> (Vec<Digit>, Vec<Incidence>) {
    let mut support = Vec::new();
    let mut inc = Vec::new();
    for &(e, i) in space.star(v) {
        if i != Incidence::Loop {
            support.push(Digit::Edge(e));
            inc.push(i);
        }
    }
    support.push(Digit::Vertex(v));
    (support, inc)
}

/// Table of sum_g coeff(g) * Abar^g_v.
fn vertex_table(space: &ModelSpace, v: usize, coeff: &dyn Fn(usize) -> Complex64) -> LocalOp {
    let (support, inc) = vertex_support(space, v);
    let n = space.n();
    let action = space.action().clone();
    LocalOp::build(space, support, move |d| {
        let k = inc.len();
        (0..n)
            .filter_map(|g| {
                let c = coeff(g);
                if c.norm() <= TABLE_EPS {
                    return None;
                }
                // out = Abar^g in, so out[b] = in[pi_{-g}(b)].
                let back = (n - g) % n;
                let mut src = d.to_vec();
                for (j, i) in inc.iter().enumerate() {
                    src[j] = match i {
                        Incidence::In => (d[j] + back) % n,
                        Incidence::Out => (d[j] + n - back) % n,
                        Incidence::Loop => d[j],
                    };
                }
                src[k] = action.act(back, d[k]);
                Some((src, c))
            })
            .collect()
    })
}

/// Abar^g_v: In edges gain g, Out edges lose g, loops are untouched and the
/// matter digit moves by theta(g, .).
pub fn vertex_component(space: &Arc<ModelSpace>, v: usize, g: usize) -> Result<LinearOp> {
    space.complex().check_vertex(v)?;
    let g = g % space.n();
    let t = vertex_table(space, v, &|x| if x == g { ONE } else { ZERO });
    Ok(LinearOp::from_local(space, t, Descriptor::new("A_component", Some(v), Some(g))))
}

/// A_{v,J} = (1/N) sum_g conj(omega)^{(J-1) g} Abar^g_v, J = 1..N.
pub fn vertex_projector(space: &Arc<ModelSpace>, v: usize, j: usize) -> Result<LinearOp> {
    space.complex().check_vertex(v)?;
    let n = space.n();
    if j == 0 || j > n {
        return Err(QdmError::InvalidCell(format!("vertex projector index {j} outside 1..{n}")));
    }
    let group = space.group();
    let coeff = move |g: usize| group.phase(-(((j - 1) * g) as i64)) / n as f64;
    let t = vertex_table(space, v, &coeff);
    Ok(LinearOp::from_local(space, t, Descriptor::new("A", Some(v), Some(j))))
}

/// Members indexed 1..=k stored at positions 0..k-1.
#[derive(Debug, Clone)]
pub struct ProjectorFamily {
    pub members: Vec<LinearOp>,
}

pub fn vertex_projector_family(space: &Arc<ModelSpace>, v: usize) -> Result<ProjectorFamily> {
    let members = (1..=space.n()).map(|j| vertex_projector(space, v, j)).collect::<Result<_>>()?;
    Ok(ProjectorFamily { members })
}

/// Holonomy of face `f` on the given local digits (one per distinct edge).
fn face_support(space: &ModelSpace, f: usize) -> (Vec<Digit>, Vec<(usize, i8)>) {
    let walk = space.complex().face(f);
    let mut support: Vec<Digit> = Vec::new();
    let mut steps = Vec::new();
    for &(e, s) in walk {
        let pos = match support.iter().position(|d| *d == Digit::Edge(e)) {
            Some(p) => p,
            None => {
                support.push(Digit::Edge(e));
                support.len() - 1
            }
        };
        steps.push((pos, s));
    }
    (support, steps)
}

/// Signed sum of boundary digits of face `f` mod N.
pub fn holonomy(space: &ModelSpace, f: usize, index: usize) -> usize {
    let n = space.n() as i64;
    let mut h = 0i64;
    for &(e, s) in space.complex().face(f) {
        h += i64::from(s) * space.edge_digit(index, e) as i64;
    }
    h.rem_euclid(n) as usize
}

/// B^h_f: diagonal, 1 where the holonomy of `f` equals h.
pub fn face_projector(space: &Arc<ModelSpace>, f: usize, h: usize) -> Result<LinearOp> {
    space.complex().check_face(f)?;
    let n = space.n();
    let h = h % n;
    let (support, steps) = face_support(space, f);
    let t = LocalOp::build(space, support, move |d| {
        let hol = steps.iter().map(|&(p, s)| i64::from(s) * d[p] as i64).sum::<i64>().rem_euclid(n as i64) as usize;
        if hol == h {
            vec![(d.to_vec(), ONE)]
        } else {
            Vec::new()
        }
    });
    Ok(LinearOp::from_local(space, t, Descriptor::new("B", Some(f), Some(h))))
}

/// B^0_f, ..., B^{N-1}_f; the first member is the Hamiltonian term.
pub fn face_projector_family(space: &Arc<ModelSpace>, f: usize) -> Result<ProjectorFamily> {
    let members = (0..space.n()).map(|h| face_projector(space, f, h)).collect::<Result<_>>()?;
    Ok(ProjectorFamily { members })
}

/// 1 iff theta(g, alpha) == beta + r - 1 (mod M) with alpha the tail digit,
/// g the edge digit and beta the head digit.
pub fn edge_eigenvalue(space: &ModelSpace, alpha: usize, g: usize, beta: usize, r: usize) -> bool {
    let m = space.m();
    space.action().act(g, alpha) == (beta + r - 1) % m
}

/// Whether the edge term C_{e,r} is satisfied on a basis index.
pub fn edge_satisfied(space: &ModelSpace, e: usize, index: usize, r: usize) -> bool {
    let (t, h) = space.complex().edge(e);
    edge_eigenvalue(space, space.vertex_digit(index, t), space.edge_digit(index, e), space.vertex_digit(index, h), r)
}

/// C_{e,R}: diagonal member R (1..=M) of the edge family.
pub fn edge_projector(space: &Arc<ModelSpace>, e: usize, r: usize) -> Result<LinearOp> {
    space.complex().check_edge(e)?;
    let m = space.m();
    if r == 0 || r > m {
        return Err(QdmError::InvalidCell(format!("edge projector index {r} outside 1..{m}")));
    }
    let (t, h) = space.complex().edge(e);
    let support = if t == h {
        vec![Digit::Edge(e), Digit::Vertex(t)]
    } else {
        vec![Digit::Edge(e), Digit::Vertex(t), Digit::Vertex(h)]
    };
    let sp = space.clone();
    let table = LocalOp::build(space, support, move |d| {
        let (alpha, beta) = if t == h { (d[1], d[1]) } else { (d[1], d[2]) };
        if edge_eigenvalue(&sp, alpha, d[0], beta, r) {
            vec![(d.to_vec(), ONE)]
        } else {
            Vec::new()
        }
    });
    Ok(LinearOp::from_local(space, table, Descriptor::new("C", Some(e), Some(r))))
}

pub fn edge_projector_family(space: &Arc<ModelSpace>, e: usize) -> Result<ProjectorFamily> {
    let members = (1..=space.m()).map(|r| edge_projector(space, e, r)).collect::<Result<_>>()?;
    Ok(ProjectorFamily { members })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgePauli {
    /// Adds h to the edge digit.
    Xpow(usize),
    /// Multiplies by omega^(g * digit).
    Zpow(usize),
}

pub fn pauli_edge(space: &Arc<ModelSpace>, e: usize, kind: EdgePauli) -> Result<LinearOp> {
    space.complex().check_edge(e)?;
    let n = space.n();
    let group = space.group();
    let (table, desc) = match kind {
        EdgePauli::Xpow(h) => (
            LocalOp::build(space, vec![Digit::Edge(e)], move |d| vec![(vec![(d[0] + n - h % n) % n], ONE)]),
            Descriptor::new("X", Some(e), Some(h % n)),
        ),
        EdgePauli::Zpow(g) => (
            LocalOp::build(space, vec![Digit::Edge(e)], move |d| vec![(d.to_vec(), group.phase((g * d[0]) as i64))]),
            Descriptor::new("Z", Some(e), Some(g % n)),
        ),
    };
    Ok(LinearOp::from_local(space, table, desc))
}

/// An M x M matrix (row-major) acting on the matter digit of `v`.
pub fn matter_operator(space: &Arc<ModelSpace>, v: usize, matrix: &DMatrix<Complex64>) -> Result<LinearOp> {
    space.complex().check_vertex(v)?;
    let m = space.m();
    if matrix.nrows() != m || matrix.ncols() != m {
        return Err(QdmError::DimensionMismatch { left: matrix.nrows(), right: m });
    }
    let mat = matrix.clone();
    let t = LocalOp::build(space, vec![Digit::Vertex(v)], move |d| {
        (0..m).map(|a| (vec![a], mat[(d[0], a)])).filter(|(_, c)| c.norm() > TABLE_EPS).collect()
    });
    Ok(LinearOp::from_local(space, t, Descriptor::new("W", Some(v), None)))
}

/// H = - sum A_{v,1} - sum B_{f,1} - sum C_{j,1} over the included terms.
pub fn hamiltonian(space: &Arc<ModelSpace>, excl: &Exclusion) -> Result<LinearOp> {
    let terms = included_terms(space, excl)?;
    let mut parts = Vec::with_capacity(terms.count());
    let minus = Complex64::new(-1.0, 0.0);
    for &v in &terms.vertices {
        parts.push((minus, vertex_projector(space, v, 1)?));
    }
    for &f in &terms.faces {
        parts.push((minus, face_projector(space, f, 0)?));
    }
    for &e in &terms.edges {
        parts.push((minus, edge_projector(space, e, 1)?));
    }
    Ok(LinearOp::sum(space, parts, Descriptor::new("H", None, None)))
}

/// Ground energy when the Hamiltonian is frustration free.
pub fn frustration_free_energy(space: &ModelSpace, excl: &Exclusion) -> Result<f64> {
    Ok(-(included_terms(space, excl)?.count() as f64))
}

/// P = prod A prod B prod C; the edge terms act first, then faces, then
/// vertices.
pub fn global_projector(space: &Arc<ModelSpace>, excl: &Exclusion) -> Result<LinearOp> {
    let terms = included_terms(space, excl)?;
    let mut factors = Vec::with_capacity(terms.count());
    for &v in &terms.vertices {
        factors.push(vertex_projector(space, v, 1)?);
    }
    for &f in &terms.faces {
        factors.push(face_projector(space, f, 0)?);
    }
    for &e in &terms.edges {
        factors.push(edge_projector(space, e, 1)?);
    }
    Ok(LinearOp::product(space, factors, Descriptor::new("P", None, None)))
}

/// Wraps a complex and action into a shared space.
pub fn shared(space: ModelSpace) -> Arc<ModelSpace> {
    Arc::new(space)
}
