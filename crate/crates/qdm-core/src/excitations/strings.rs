//! Electric and magnetic string operators and the confinement scan.

use std::sync::Arc;

use serde::Serialize;

use crate::cw_complex::{torus_h, torus_v, CellComplex2};
use crate::error::{QdmError, Result};
use crate::model_operators::{pauli_edge, Descriptor, EdgePauli, Exclusion, LinearOp};
use crate::spectrum::{energy, violation_profile, Violations};
use crate::state_space::{ModelSpace, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StringKind {
    /// Clock operators along a walk of edges.
    Electric,
    /// Shift operators on the edges crossed by a walk of faces.
    Magnetic,
}

/// A string of single-edge operators. The charge is supplied when the
/// string is applied, so one path serves every group element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StringOp {
    pub kind: StringKind,
    pub path: Vec<usize>,
    pub signs: Vec<i8>,
    /// Whether the walk returns to its start.
    pub closed: bool,
}

fn endpoints(c: &CellComplex2, e: usize, sign: i8) -> (usize, usize) {
    let (t, h) = c.edge(e);
    if sign > 0 {
        (t, h)
    } else {
        (h, t)
    }
}

impl StringOp {
    /// Electric string along `edges`, each traversed forward (+1) or
    /// backward (-1). Consecutive edges must be joined end to start.
    pub fn electric(c: &CellComplex2, edges: Vec<(usize, i8)>) -> Result<Self> {
        if edges.is_empty() {
            return Err(QdmError::InvalidPath("empty walk".into()));
        }
        for &(e, s) in &edges {
            c.check_edge(e)?;
            if s != 1 && s != -1 {
                return Err(QdmError::InvalidPath(format!("sign {s} on edge {e}")));
            }
        }
        for w in edges.windows(2) {
            if endpoints(c, w[0].0, w[0].1).1 != endpoints(c, w[1].0, w[1].1).0 {
                return Err(QdmError::InvalidPath(format!("edges {} and {} are not joined", w[0].0, w[1].0)));
            }
        }
        let first = endpoints(c, edges[0].0, edges[0].1).0;
        let last = endpoints(c, edges[edges.len() - 1].0, edges[edges.len() - 1].1).1;
        Ok(Self {
            kind: StringKind::Electric,
            path: edges.iter().map(|p| p.0).collect(),
            signs: edges.iter().map(|p| p.1).collect(),
            closed: first == last,
        })
    }

    /// Magnetic string for the face walk `faces`, crossing `edges[k]` when
    /// stepping from `faces[k]` to `faces[k + 1]`. With one edge per face the
    /// last crossing returns to the first face and the walk is closed. Each
    /// edge carries the sign it has in the face being left.
    pub fn magnetic(c: &CellComplex2, faces: &[usize], edges: &[usize]) -> Result<Self> {
        let closed = match faces.len().checked_sub(edges.len()) {
            Some(1) => false,
            Some(0) => true,
            _ => return Err(QdmError::InvalidPath("need one crossing per step between faces".into())),
        };
        if edges.is_empty() {
            return Err(QdmError::InvalidPath("empty walk".into()));
        }
        let sign_in = |f: usize, e: usize| c.face(f).iter().find(|&&(x, _)| x == e).map(|&(_, s)| s);
        let mut signs = Vec::with_capacity(edges.len());
        for (k, &e) in edges.iter().enumerate() {
            c.check_edge(e)?;
            let (from, to) = (faces[k], faces[(k + 1) % faces.len()]);
            c.check_face(from)?;
            c.check_face(to)?;
            let s = sign_in(from, e).ok_or_else(|| QdmError::InvalidPath(format!("edge {e} is not on face {from}")))?;
            if sign_in(to, e).is_none() {
                return Err(QdmError::InvalidPath(format!("edge {e} is not on face {to}")));
            }
            signs.push(s);
        }
        Ok(Self { kind: StringKind::Magnetic, path: edges.to_vec(), signs, closed })
    }

    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }
}

fn grid_of(c: &CellComplex2) -> Result<(usize, usize)> {
    let g = c.grid().ok_or_else(|| QdmError::PathUnavailable("straight walks need a torus grid".into()))?;
    Ok((g.rows, g.cols))
}

/// Electric walk of `len` horizontal edges along row 0 of a torus grid.
/// `len == cols` closes the loop around the torus.
pub fn straight_electric(c: &CellComplex2, len: usize) -> Result<StringOp> {
    let (rows, cols) = grid_of(c)?;
    if len == 0 || len > cols {
        return Err(QdmError::PathUnavailable(format!("length {len} on a grid with {cols} columns")));
    }
    StringOp::electric(c, (0..len).map(|k| (torus_h(rows, cols, 0, k), 1)).collect())
}

/// Magnetic walk crossing `len` vertical edges of row 0 of a torus grid.
/// `len == cols` closes the loop around the torus.
pub fn straight_magnetic(c: &CellComplex2, len: usize) -> Result<StringOp> {
    let (rows, cols) = grid_of(c)?;
    if len == 0 || len > cols {
        return Err(QdmError::PathUnavailable(format!("length {len} on a grid with {cols} columns")));
    }
    let edges: Vec<usize> = (0..len).map(|k| torus_v(rows, cols, 0, (k + 1) % cols)).collect();
    let nfaces = if len == cols { len } else { len + 1 };
    let faces: Vec<usize> = (0..nfaces).collect();
    StringOp::magnetic(c, &faces, &edges)
}

/// The string as a product of single-edge operators for group element `charge`.
pub fn string_operator(space: &Arc<ModelSpace>, s: &StringOp, charge: usize) -> Result<LinearOp> {
    let n = space.n();
    let factors = s
        .path
        .iter()
        .zip(&s.signs)
        .map(|(&e, &sign)| {
            let power = if sign > 0 { charge % n } else { (n - charge % n) % n };
            let kind = match s.kind {
                StringKind::Electric => EdgePauli::Zpow(power),
                StringKind::Magnetic => EdgePauli::Xpow(power),
            };
            pauli_edge(space, e, kind)
        })
        .collect::<Result<Vec<_>>>()?;
    let name = match s.kind {
        StringKind::Electric => "Oz",
        StringKind::Magnetic => "Ox",
    };
    Ok(LinearOp::product(space, factors, Descriptor::new(name, None, Some(charge))))
}

pub fn apply_string(space: &Arc<ModelSpace>, state: &StateVector, s: &StringOp, charge: usize) -> Result<StateVector> {
    Ok(string_operator(space, s, charge)?.apply(state))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfinementRow {
    pub length: usize,
    pub closed: bool,
    pub delta_e_magnetic: f64,
    pub delta_e_electric: f64,
    pub magnetic_violations: Violations,
    pub electric_violations: Violations,
}

/// Energy cost of straight magnetic and electric strings of each length
/// applied to `vacuum`, relative to the vacuum energy.
pub fn confinement_scan(
    space: &Arc<ModelSpace>,
    excl: &Exclusion,
    vacuum: &StateVector,
    lengths: &[usize],
) -> Result<Vec<ConfinementRow>> {
    let e0 = energy(space, excl, vacuum)?;
    let mut out = Vec::with_capacity(lengths.len());
    for &len in lengths {
        let m = straight_magnetic(space.complex(), len)?;
        let e = straight_electric(space.complex(), len)?;
        let xm = apply_string(space, vacuum, &m, 1)?;
        let xe = apply_string(space, vacuum, &e, 1)?;
        out.push(ConfinementRow {
            length: len,
            closed: m.closed,
            delta_e_magnetic: energy(space, excl, &xm)? - e0,
            delta_e_electric: energy(space, excl, &xe)? - e0,
            magnetic_violations: violation_profile(space, excl, &xm)?,
            electric_violations: violation_profile(space, excl, &xe)?,
        });
    }
    Ok(out)
}

/// CSV with header `L,deltaE_magnetic,deltaE_electric`.
pub fn confinement_csv(rows: &[ConfinementRow]) -> String {
    let mut s = String::from("L,deltaE_magnetic,deltaE_electric\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{}\n",
            r.length,
            crate::report::format_float(r.delta_e_magnetic),
            crate::report::format_float(r.delta_e_electric)
        ));
    }
    s
}
