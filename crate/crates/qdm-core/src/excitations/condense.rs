//! Condensation between vacua and domain walls on glued complexes.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{QdmError, Result};
use crate::model_operators::{global_projector, included_terms, matter_operator, vertex_projector, Exclusion};
use crate::spectrum::energy;
use crate::state_space::{inner, ModelSpace, StateVector};

const ZERO_NORM: f64 = 1e-12;
const VACUUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondensationReport {
    /// Norm of the image before normalization.
    pub norm: f64,
    /// |<vacuum|image>|^2 for each supplied vacuum, in order.
    pub overlaps: Vec<f64>,
    /// Whether the normalized image is fixed by the ground-space projector.
    pub is_vacuum: bool,
}

/// Applies `w` at every vertex of `source` and compares the normalized
/// image with each of `vacua`.
pub fn condense(
    space: &Arc<ModelSpace>,
    source: &StateVector,
    w: &DMatrix<Complex64>,
    vacua: &[StateVector],
) -> Result<CondensationReport> {
    let mut x = source.clone();
    for v in 0..space.complex().vertex_count() {
        x = matter_operator(space, v, w)?.apply(&x);
    }
    let norm = x.normalize();
    if norm < ZERO_NORM {
        return Err(QdmError::ZeroResult);
    }
    let overlaps = vacua.iter().map(|v| inner(v, &x).map(|z| z.norm_sqr())).collect::<Result<_>>()?;
    let p = global_projector(space, &Exclusion::none())?;
    let is_vacuum = p.apply(&x).distance(&x) < VACUUM_TOL;
    Ok(CondensationReport { norm, overlaps, is_vacuum })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainWall {
    pub energy: f64,
    pub ground_energy: f64,
}

/// Energy of the gauge-symmetrized product state with matter `rep_a` on
/// `side_a` and `rep_b` on every other vertex, all edges 0.
pub fn domain_wall(
    space: &Arc<ModelSpace>,
    excl: &Exclusion,
    side_a: &[usize],
    rep_a: usize,
    rep_b: usize,
) -> Result<DomainWall> {
    let c = space.complex();
    let matter: Vec<usize> = (0..c.vertex_count()).map(|v| if side_a.contains(&v) { rep_a } else { rep_b }).collect();
    let mut x = space.product_state(&vec![0; c.edge_count()], &matter)?;
    for v in included_terms(space, excl)?.vertices {
        x = vertex_projector(space, v, 1)?.apply(&x);
    }
    if x.normalize() < ZERO_NORM {
        return Err(QdmError::ZeroResult);
    }
    Ok(DomainWall {
        energy: energy(space, excl, &x)?,
        ground_energy: crate::model_operators::frustration_free_energy(space, excl)?,
    })
}
