//! Ground-space dimension, vacuum vectors, low-lying spectrum and
//! projector-violation counts.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cw_complex::Incidence;
use crate::cyclic_action::orbit_decomposition;
use crate::error::{QdmError, Result};
use crate::model_operators::{
    edge_projector, edge_satisfied, face_projector, frustration_free_energy, global_projector, hamiltonian, holonomy,
    included_terms, vertex_projector, Exclusion, LinearOp, Terms,
};
use crate::state_space::{inner, ModelSpace, StateVector};

/// Levels closer than this are one degenerate level.
pub const LEVEL_TOL: f64 = 1e-7;
const TRACE_TOL: f64 = 1e-6;
const SEED_TOL: f64 = 1e-12;

/// Index of the basis state obtained by applying Abar^g_v to basis state `i`.
fn gauge_image(space: &ModelSpace, i: usize, v: usize, g: usize) -> usize {
    let n = space.n();
    let mut j = i as isize;
    for &(e, inc) in space.star(v) {
        let w = space.edge_weight(e) as isize;
        let d = space.edge_digit(i, e);
        let nd = match inc {
            Incidence::In => (d + g) % n,
            Incidence::Out => (d + n - g) % n,
            Incidence::Loop => d,
        };
        j += (nd as isize - d as isize) * w;
    }
    let a = space.vertex_digit(i, v);
    j += (space.action().act(g, a) as isize - a as isize) * space.vertex_weight(v) as isize;
    j as usize
}

/// Number of gauge transformations over `vertices` fixing basis state `i`.
fn stabilizer_count(space: &ModelSpace, vertices: &[usize], i: usize) -> u128 {
    fn walk(space: &ModelSpace, vertices: &[usize], k: usize, cur: usize, target: usize) -> u128 {
        if k == vertices.len() {
            return u128::from(cur == target);
        }
        (0..space.n()).map(|g| walk(space, vertices, k + 1, gauge_image(space, cur, vertices[k], g), target)).sum()
    }
    walk(space, vertices, 0, i, i)
}

fn diagonal_terms_hold(space: &ModelSpace, terms: &Terms, i: usize) -> bool {
    terms.faces.iter().all(|&f| holonomy(space, f, i) == 0)
        && terms.edges.iter().all(|&e| edge_satisfied(space, e, i, 1))
}

/// Exact trace of P as the sum of its diagonal entries. The diagonal entry
/// at a basis state is zero unless every included face and edge term is
/// satisfied there, in which case it equals the fraction of gauge
/// transformations (products of vertex components) that fix the state.
pub fn projector_trace(space: &ModelSpace, excl: &Exclusion) -> Result<f64> {
    let terms = included_terms(space, excl)?;
    let total: u128 = (0..space.dim())
        .into_par_iter()
        .with_min_len(1 << 12)
        .map(|i| if diagonal_terms_hold(space, &terms, i) { stabilizer_count(space, &terms.vertices, i) } else { 0 })
        .sum();
    let group_size = (space.n() as f64).powi(terms.vertices.len() as i32);
    Ok(total as f64 / group_size)
}

pub fn ground_degeneracy(space: &ModelSpace, excl: &Exclusion) -> Result<u64> {
    let trace = projector_trace(space, excl)?;
    let rounded = trace.round();
    if (trace - rounded).abs() >= TRACE_TOL {
        return Err(QdmError::NonIntegerTrace { trace });
    }
    Ok(rounded as u64)
}

/// Normalized P-image of the seed with zero edges and matter `rep` everywhere.
pub fn vacuum_state_with(space: &Arc<ModelSpace>, representative: usize, excl: &Exclusion) -> Result<StateVector> {
    let p = global_projector(space, excl)?;
    let mut v = p.apply(&space.uniform_matter_state(representative)?);
    if v.normalize() < SEED_TOL {
        return Err(QdmError::AnnihilatedSeed { representative });
    }
    Ok(v)
}

pub fn vacuum_state(space: &Arc<ModelSpace>, representative: usize) -> Result<StateVector> {
    vacuum_state_with(space, representative, &Exclusion::none())
}

#[derive(Debug, Clone, Serialize)]
pub struct VacuumInfo {
    pub representative: usize,
    pub orbit: Vec<usize>,
    pub norm: f64,
    pub in_ground_space: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroundReport {
    pub degeneracy: u64,
    pub d_alg: usize,
    pub energy_floor: f64,
    pub vacua: Vec<VacuumInfo>,
    /// |<xi_a|xi_b>| between the vacua listed above.
    pub overlaps: Vec<Vec<f64>>,
}

/// One vacuum per orbit, seeded with the orbit's smallest label.
pub fn orbit_vacua(space: &Arc<ModelSpace>, excl: &Exclusion) -> Result<Vec<(VacuumInfo, StateVector)>> {
    let d = orbit_decomposition(space.action());
    let p = global_projector(space, excl)?;
    let mut out = Vec::new();
    for orbit in d.orbits {
        let rep = orbit[0];
        let mut v = p.apply(&space.uniform_matter_state(rep)?);
        let norm = v.normalize();
        let ok = norm >= SEED_TOL && p.apply(&v).distance(&v) < 1e-9;
        out.push((VacuumInfo { representative: rep, orbit, norm: 1.0, in_ground_space: ok }, v));
    }
    Ok(out)
}

pub fn ground_report(space: &Arc<ModelSpace>, excl: &Exclusion) -> Result<GroundReport> {
    let degeneracy = ground_degeneracy(space, excl)?;
    let d_alg = orbit_decomposition(space.action()).d_alg;
    let energy_floor = if degeneracy > 0 {
        frustration_free_energy(space, excl)?
    } else {
        low_spectrum(space, excl, 1, crate::state_space::DEFAULT_DENSE_CAP, 0)?[0].0
    };
    let vacua = orbit_vacua(space, excl)?;
    let overlaps = vacua
        .iter()
        .map(|(_, a)| vacua.iter().map(|(_, b)| inner(a, b).map(|z| z.norm())).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(GroundReport { degeneracy, d_alg, energy_floor, vacua: vacua.into_iter().map(|(i, _)| i).collect(), overlaps })
}

/// <x|op|x> for a unit vector.
pub fn expectation(op: &LinearOp, x: &StateVector) -> Result<f64> {
    Ok(inner(x, &op.apply(x))?.re)
}

pub fn energy(space: &Arc<ModelSpace>, excl: &Exclusion, x: &StateVector) -> Result<f64> {
    expectation(&hamiltonian(space, excl)?, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violations {
    pub vertex: f64,
    pub face: f64,
    pub edge: f64,
}

impl Violations {
    pub fn total(&self) -> f64 {
        self.vertex + self.face + self.edge
    }
    /// Rounded to the nearest integers.
    pub fn rounded(&self) -> (i64, i64, i64) {
        (self.vertex.round() as i64, self.face.round() as i64, self.edge.round() as i64)
    }
}

/// Sum over included terms of <1 - P_term> for a unit vector.
pub fn violation_profile(space: &Arc<ModelSpace>, excl: &Exclusion, x: &StateVector) -> Result<Violations> {
    let terms = included_terms(space, excl)?;
    let mut out = Violations { vertex: 0.0, face: 0.0, edge: 0.0 };
    for &v in &terms.vertices {
        out.vertex += 1.0 - expectation(&vertex_projector(space, v, 1)?, x)?;
    }
    for &f in &terms.faces {
        out.face += 1.0 - expectation(&face_projector(space, f, 0)?, x)?;
    }
    for &e in &terms.edges {
        out.edge += 1.0 - expectation(&edge_projector(space, e, 1)?, x)?;
    }
    Ok(out)
}

/// Groups ascending eigenvalues into (energy, multiplicity) levels.
pub fn cluster_levels(sorted: &[f64]) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &e in sorted {
        match out.last_mut() {
            Some((level, mult)) if (e - *level).abs() < LEVEL_TOL => *mult += 1,
            _ => out.push((e, 1)),
        }
    }
    out
}

/// All eigenvalues of a Hermitian operator, ascending, by dense diagonalization.
pub fn dense_eigenvalues(op: &LinearOp) -> Vec<f64> {
    let m: DMatrix<Complex64> = op.to_dense();
    let eig = SymmetricEigen::new(m);
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Lowest `count` levels with multiplicities. Dense diagonalization up to
/// `dense_cap`, deflated Lanczos above it.
pub fn low_spectrum(
    space: &Arc<ModelSpace>,
    excl: &Exclusion,
    count: usize,
    dense_cap: usize,
    seed: u64,
) -> Result<Vec<(f64, usize)>> {
    let h = hamiltonian(space, excl)?;
    if space.dim() <= dense_cap {
        let levels = cluster_levels(&dense_eigenvalues(&h));
        return Ok(levels.into_iter().take(count).collect());
    }
    lanczos_levels(&h, count, seed)
}

const MAX_KRYLOV: usize = 120;
const MAX_RESTARTS: usize = 60;
const MAX_LOCKED: usize = 512;
const RITZ_TOL: f64 = 1e-9;

fn orthogonalize(x: &mut StateVector, basis: &[StateVector]) {
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, x).expect("same dimension");
            x.axpy(-c, b);
        }
    }
}

/// Lowest eigenpair of `op` on the orthogonal complement of `locked`.
fn lanczos_lowest(op: &LinearOp, locked: &[StateVector], start: StateVector) -> Result<(f64, StateVector)> {
    let dim = start.dim();
    let room = dim - locked.len();
    let mut x = start;
    for _ in 0..MAX_RESTARTS {
        orthogonalize(&mut x, locked);
        if x.normalize() < 1e-14 {
            return Err(QdmError::ConvergenceFailure("start vector lies in the locked space".into()));
        }
        let mut q: Vec<StateVector> = vec![x.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        loop {
            let k = q.len() - 1;
            let mut w = op.apply(&q[k]);
            let a = inner(&q[k], &w)?.re;
            alpha.push(a);
            orthogonalize(&mut w, locked);
            orthogonalize(&mut w, &q);
            let b = w.norm();
            if q.len() >= MAX_KRYLOV.min(room) || b < 1e-12 {
                break;
            }
            w.scale(Complex64::new(1.0 / b, 0.0));
            beta.push(b);
            q.push(w);
        }
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (idx, theta) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("nonempty tridiagonal");
        let mut ritz = StateVector::zeros(dim);
        for (i, qi) in q.iter().enumerate() {
            ritz.axpy(Complex64::new(eig.eigenvectors[(i, idx)], 0.0), qi);
        }
        orthogonalize(&mut ritz, locked);
        ritz.normalize();
        let mut r = op.apply(&ritz);
        r.axpy(Complex64::new(-theta, 0.0), &ritz);
        if r.norm() < RITZ_TOL * theta.abs().max(1.0) {
            return Ok((theta, ritz));
        }
        x = ritz;
    }
    Err(QdmError::ConvergenceFailure(format!("no Ritz pair within {MAX_RESTARTS} restarts")))
}

/// Finds eigenpairs from the bottom until `count` complete levels are known.
pub fn lanczos_levels(op: &LinearOp, count: usize, seed: u64) -> Result<Vec<(f64, usize)>> {
    let dim = op.space().dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut locked: Vec<StateVector> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    loop {
        if locked.len() == dim {
            break;
        }
        if locked.len() >= MAX_LOCKED {
            return Err(QdmError::ConvergenceFailure(format!(
                "more than {MAX_LOCKED} eigenvectors needed for {count} levels"
            )));
        }
        let start = StateVector::random(dim, &mut rng);
        let (theta, vec) = lanczos_lowest(op, &locked, start)?;
        values.push(theta);
        locked.push(vec);
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let levels = cluster_levels(&sorted);
        // The newest value sitting above the count-th level closes it.
        if levels.len() > count && theta > levels[count - 1].0 + LEVEL_TOL {
            return Ok(levels.into_iter().take(count).collect());
        }
    }
    let mut sorted = values;
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(cluster_levels(&sorted).into_iter().take(count).collect())
}
