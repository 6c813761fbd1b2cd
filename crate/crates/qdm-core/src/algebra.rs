//! Randomized verification of the operator algebra: component relations,
//! commutators and projector-family resolutions.
//!
//! A relation `L = R` between local operators is checked by building the
//! local table of `L - R`. An identically zero table has residual exactly 0;
//! otherwise the residual is the largest `|(L - R) x|` over the random unit
//! vectors. Pairs with disjoint supports commute by the tensor-product
//! structure and are counted separately as structural.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::model_operators::{
    edge_projector_family, face_projector, face_projector_family, vertex_component, vertex_projector_family, LinearOp,
    LocalOp, ProjectorFamily,
};
use crate::state_space::{ModelSpace, StateVector};

pub const ALGEBRA_TOL: f64 = 1e-9;
const ZERO_TABLE: f64 = 1e-13;
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub relation: String,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub relations: usize,
    pub structural: usize,
    pub max_residual: f64,
    pub failure_count: usize,
    /// The first few failures, for reports.
    pub failures: Vec<Failure>,
    pub passed: bool,
}

impl Check {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            relations: 0,
            structural: 0,
            max_residual: 0.0,
            failure_count: 0,
            failures: Vec::new(),
            passed: true,
        }
    }

    fn record(&mut self, relation: impl FnOnce() -> String, residual: f64) {
        self.relations += 1;
        self.max_residual = self.max_residual.max(residual);
        if residual >= ALGEBRA_TOL || residual.is_nan() {
            self.passed = false;
            self.failure_count += 1;
            if self.failures.len() < 16 {
                self.failures.push(Failure { relation: relation(), residual });
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraReport {
    pub component_relations: Check,
    pub commutators: Check,
    pub resolutions: Check,
    pub passed: bool,
}

/// Random unit vectors, generated on first use.
pub struct Probe {
    dim: usize,
    count: usize,
    seed: u64,
    vectors: Option<Vec<StateVector>>,
}

impl Probe {
    pub fn new(dim: usize, count: usize, seed: u64) -> Self {
        Self { dim, count, seed, vectors: None }
    }

    fn vectors(&mut self) -> &[StateVector] {
        if self.vectors.is_none() {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            self.vectors = Some((0..self.count).map(|_| StateVector::random(self.dim, &mut rng)).collect());
        }
        self.vectors.as_deref().unwrap()
    }

    /// max_x |d x| over the probe vectors, 0 for a vanishing table.
    pub fn residual(&mut self, space: &Arc<ModelSpace>, d: &LocalOp) -> f64 {
        if d.is_zero(ZERO_TABLE) {
            return 0.0;
        }
        let op =
            LinearOp::from_local(space, d.clone(), crate::model_operators::Descriptor::new("residual", None, None));
        self.vectors().iter().map(|x| op.apply(x).norm()).fold(0.0, f64::max)
    }
}

fn local(op: &LinearOp) -> LocalOp {
    op.to_local().expect("model operators are local")
}

fn diff(space: &ModelSpace, a: &LocalOp, b: &LocalOp) -> LocalOp {
    LocalOp::linear_combination(space, &[(ONE, a), (-ONE, b)])
}

fn commutator(space: &ModelSpace, a: &LocalOp, b: &LocalOp) -> LocalOp {
    diff(space, &a.compose(space, b), &b.compose(space, a))
}

fn overlaps(a: &LocalOp, b: &LocalOp) -> bool {
    a.support().iter().any(|d| b.support().contains(d))
}

/// Every projector of the three families, with labels.
pub fn all_projectors(space: &Arc<ModelSpace>) -> Result<Vec<(String, LocalOp)>> {
    let c = space.complex();
    let mut out = Vec::new();
    for v in 0..c.vertex_count() {
        for (k, op) in vertex_projector_family(space, v)?.members.iter().enumerate() {
            out.push((format!("A(v={v},J={})", k + 1), local(op)));
        }
    }
    for f in 0..c.face_count() {
        for h in 0..space.n() {
            out.push((format!("B(f={f},h={h})"), local(&face_projector(space, f, h)?)));
        }
    }
    for e in 0..c.edge_count() {
        for (k, op) in edge_projector_family(space, e)?.members.iter().enumerate() {
            out.push((format!("C(j={e},R={})", k + 1), local(op)));
        }
    }
    Ok(out)
}

/// Abar^g Abar^g' = Abar^{g+g'}, B^h B^h' = delta B^h, Abar^g B^h = B^h Abar^g.
pub fn component_relations(space: &Arc<ModelSpace>, probe: &mut Probe) -> Result<Check> {
    let c = space.complex();
    let n = space.n();
    let mut check = Check::new("component_relations");
    let comps: Vec<Vec<LocalOp>> = (0..c.vertex_count())
        .map(|v| (0..n).map(|g| vertex_component(space, v, g).map(|o| local(&o))).collect())
        .collect::<Result<_>>()?;
    let faces: Vec<Vec<LocalOp>> = (0..c.face_count())
        .map(|f| (0..n).map(|h| face_projector(space, f, h).map(|o| local(&o))).collect())
        .collect::<Result<_>>()?;
    for (v, a) in comps.iter().enumerate() {
        for g in 0..n {
            for g2 in 0..n {
                let d = diff(space, &a[g].compose(space, &a[g2]), &a[(g + g2) % n]);
                let r = probe.residual(space, &d);
                check.record(|| format!("A{v}^{g} A{v}^{g2} = A{v}^{}", (g + g2) % n), r);
            }
        }
    }
    for (f, b) in faces.iter().enumerate() {
        for h in 0..n {
            for h2 in 0..n {
                let prod = b[h].compose(space, &b[h2]);
                let d = if h == h2 { diff(space, &prod, &b[h]) } else { prod };
                let r = probe.residual(space, &d);
                check.record(|| format!("B{f}^{h} B{f}^{h2} = delta B{f}^{h}"), r);
            }
        }
    }
    for (v, a) in comps.iter().enumerate() {
        for (f, b) in faces.iter().enumerate() {
            for (g, ag) in a.iter().enumerate().take(n) {
                for (h, bh) in b.iter().enumerate().take(n) {
                    if !overlaps(ag, bh) {
                        check.structural += 1;
                        continue;
                    }
                    let r = probe.residual(space, &commutator(space, ag, bh));
                    check.record(|| format!("[A{v}^{g}, B{f}^{h}]"), r);
                }
            }
        }
    }
    Ok(check)
}

/// All pairwise commutators among the projectors of the three families.
pub fn commutators(space: &Arc<ModelSpace>, probe: &mut Probe) -> Result<Check> {
    let ops = all_projectors(space)?;
    let mut check = Check::new("commutators");
    for i in 0..ops.len() {
        for j in (i + 1)..ops.len() {
            let (ref na, ref a) = ops[i];
            let (ref nb, ref b) = ops[j];
            if !overlaps(a, b) {
                check.structural += 1;
                continue;
            }
            let r = probe.residual(space, &commutator(space, a, b));
            check.record(|| format!("[{na}, {nb}]"), r);
        }
    }
    Ok(check)
}

fn family_check(space: &Arc<ModelSpace>, probe: &mut Probe, check: &mut Check, name: &str, family: &ProjectorFamily) {
    let members: Vec<LocalOp> = family.members.iter().map(local).collect();
    let id = local(&LinearOp::identity(space));
    let terms: Vec<(Complex64, &LocalOp)> = members.iter().map(|m| (ONE, m)).collect();
    let total = LocalOp::linear_combination(space, &terms);
    let r = probe.residual(space, &diff(space, &total, &id));
    check.record(|| format!("sum {name} = 1"), r);
    for (a, pa) in members.iter().enumerate() {
        for (b, pb) in members.iter().enumerate() {
            let prod = pa.compose(space, pb);
            let d = if a == b { diff(space, &prod, pa) } else { prod };
            let r = probe.residual(space, &d);
            check.record(|| format!("{name}{} {name}{} = delta", a + 1, b + 1), r);
        }
    }
}

/// Each family sums to the identity and is idempotent and pairwise orthogonal.
pub fn resolutions(space: &Arc<ModelSpace>, probe: &mut Probe) -> Result<Check> {
    let c = space.complex();
    let mut check = Check::new("resolutions");
    for v in 0..c.vertex_count() {
        family_check(space, probe, &mut check, &format!("A(v={v})"), &vertex_projector_family(space, v)?);
    }
    for f in 0..c.face_count() {
        family_check(space, probe, &mut check, &format!("B(f={f})"), &face_projector_family(space, f)?);
    }
    for e in 0..c.edge_count() {
        family_check(space, probe, &mut check, &format!("C(j={e})"), &edge_projector_family(space, e)?);
    }
    Ok(check)
}

pub fn algebra_suite(space: &Arc<ModelSpace>, vectors: usize, seed: u64) -> Result<AlgebraReport> {
    let mut probe = Probe::new(space.dim(), vectors, seed);
    let component_relations = component_relations(space, &mut probe)?;
    let commutators = commutators(space, &mut probe)?;
    let resolutions = resolutions(space, &mut probe)?;
    let passed = component_relations.passed && commutators.passed && resolutions.passed;
    Ok(AlgebraReport { component_relations, commutators, resolutions, passed })
}
