//! Configuration files and the four report-producing commands behind the
//! `qdm` binary.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::algebra::algebra_suite;
use crate::cw_complex::{disjoint_union, torus_grid, wedge_at_vertex, CellComplex2};
use crate::cyclic_action::{is_special_form, make_action, orbit_decomposition, MatterAction};
use crate::error::{QdmError, Result};
use crate::excitations::{
    confinement_csv, confinement_scan, detect_nonabelian, domain_wall, fusion_table, two_vertex_space, verify_w,
    vertex_intertwiner_family, WOperator,
};
use crate::model_operators::Exclusion;
use crate::report::{to_json_string, to_value};
use crate::spectrum::{ground_degeneracy, ground_report, low_spectrum, vacuum_state};
use crate::state_space::{ModelSpace, DEFAULT_DENSE_CAP};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ComplexSpec {
    Torus { rows: usize, cols: usize },
    Custom { vertices: usize, edges: Vec<[usize; 2]>, faces: Vec<Vec<(usize, i8)>> },
    Union { parts: Vec<ComplexSpec> },
    Wedge { parts: Vec<ComplexSpec>, at: [usize; 2] },
}

impl ComplexSpec {
    pub fn build(&self) -> Result<CellComplex2> {
        match self {
            ComplexSpec::Torus { rows, cols } => torus_grid(*rows, *cols),
            ComplexSpec::Custom { vertices, edges, faces } => {
                CellComplex2::new(*vertices, edges.iter().map(|e| (e[0], e[1])).collect(), faces.clone())
            }
            ComplexSpec::Union { parts } => {
                let mut out = CellComplex2::empty();
                for p in parts {
                    out = disjoint_union(&out, &p.build()?);
                }
                Ok(out)
            }
            ComplexSpec::Wedge { parts, at } => {
                let [a, b] = two_parts(parts)?;
                Ok(wedge_at_vertex(&a.build()?, at[0], &b.build()?, at[1])?.0)
            }
        }
    }
}

fn two_parts(parts: &[ComplexSpec]) -> Result<[&ComplexSpec; 2]> {
    match parts {
        [a, b] => Ok([a, b]),
        _ => Err(QdmError::config("complex.parts", "a wedge joins exactly two parts")),
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WSource {
    Solve,
    File,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisOptions {
    pub dense_cap: usize,
    pub algebra_vectors: usize,
    pub spectrum_levels: usize,
    pub confinement_lengths: Vec<usize>,
    /// Append the closed loop around the torus to the confinement scan.
    pub closed_loop: bool,
    pub w_source: WSource,
    /// W list for `w_source = file`, relative to the config file.
    pub w_file: Option<PathBuf>,
    /// Matter labels seeding the two sides of a wedge domain wall.
    pub domain_wall: Option<[usize; 2]>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            dense_cap: DEFAULT_DENSE_CAP,
            algebra_vectors: 20,
            spectrum_levels: 3,
            confinement_lengths: vec![1, 2, 3],
            closed_loop: false,
            w_source: WSource::Solve,
            w_file: None,
            domain_wall: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub group_order: usize,
    pub matter_dim: usize,
    pub action: Vec<usize>,
    pub complex: ComplexSpec,
    #[serde(default)]
    pub excluded_vertices: Vec<usize>,
    /// Keep the edge terms touching excluded vertices.
    #[serde(default)]
    pub keep_edge_terms: bool,
    #[serde(default)]
    pub analysis: AnalysisOptions,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| QdmError::config(json_field(&e), e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| QdmError::config("config", format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn matter_action(&self) -> Result<MatterAction> {
        if self.action.len() != self.matter_dim {
            return Err(QdmError::config(
                "action",
                format!("has {} entries but matter_dim is {}", self.action.len(), self.matter_dim),
            ));
        }
        make_action(self.group_order, &self.action).map_err(|e| match e {
            QdmError::EmptyGroup => QdmError::config("group_order", e.to_string()),
            other => QdmError::config("action", other.to_string()),
        })
    }

    pub fn exclusion(&self) -> Exclusion {
        Exclusion { vertices: self.excluded_vertices.clone(), keep_edge_terms: self.keep_edge_terms }
    }

    /// The model space, with the complex and exclusions checked.
    pub fn space(&self, cap: usize) -> Result<Arc<ModelSpace>> {
        let action = self.matter_action()?;
        let complex = self.complex.build().map_err(|e| match e {
            QdmError::Config { .. } => e,
            other => QdmError::config("complex", other.to_string()),
        })?;
        for &v in &self.excluded_vertices {
            if v >= complex.vertex_count() {
                return Err(QdmError::config("excluded_vertices", format!("vertex {v} does not exist")));
            }
        }
        Ok(Arc::new(ModelSpace::with_cap(complex, action, cap)?))
    }
}

/// Best-effort name of the offending field in a serde error.
fn json_field(e: &serde_json::Error) -> String {
    let msg = e.to_string();
    for marker in ["field `", "variant `"] {
        if let Some(i) = msg.find(marker) {
            let rest = &msg[i + marker.len()..];
            if let Some(j) = rest.find('`') {
                return rest[..j].to_string();
            }
        }
    }
    "config".into()
}

/// Run-wide settings from the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    pub dense_cap: Option<usize>,
    pub dim_cap: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { seed: 0, dense_cap: None, dim_cap: crate::state_space::DEFAULT_DIM_CAP }
    }
}

impl RunOptions {
    fn dense_cap(&self, cfg: &ModelConfig) -> usize {
        self.dense_cap.unwrap_or(cfg.analysis.dense_cap)
    }
}

fn action_summary(action: &MatterAction) -> Value {
    let d = orbit_decomposition(action);
    let sf = is_special_form(action);
    json!({
        "group_order": action.group().order(),
        "matter_dim": action.matter_dim(),
        "action": action.generator_map(),
        "orbits": d.orbits,
        "nontrivial_orbits": d.nontrivial_count,
        "fixed_points": d.fixed_count,
        "d_alg": d.d_alg,
        "special_form": sf.flag,
    })
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(x), Value::Object(y)) = (&mut a, b) {
        x.extend(y);
    }
    a
}

/// Orbits, d_alg, special form, degeneracy, algebra suite, vacuum overlaps
/// and, within the dense cap, the lowest levels.
pub fn cmd_analyze(cfg: &ModelConfig, opts: &RunOptions) -> Result<String> {
    let space = cfg.space(opts.dim_cap)?;
    let excl = cfg.exclusion();
    let ground = ground_report(&space, &excl)?;
    let algebra = algebra_suite(&space, cfg.analysis.algebra_vectors, opts.seed)?;
    let dense_cap = opts.dense_cap(cfg);
    let spectrum = if space.dim() <= dense_cap {
        let levels = low_spectrum(&space, &excl, cfg.analysis.spectrum_levels, dense_cap, opts.seed)?;
        Value::Array(levels.into_iter().map(|(e, m)| json!({"energy": e, "multiplicity": m})).collect())
    } else {
        Value::Null
    };
    let report = merge(
        action_summary(space.action()),
        json!({
            "dimension": space.dim(),
            "vertices": space.complex().vertex_count(),
            "edges": space.complex().edge_count(),
            "faces": space.complex().face_count(),
            "excluded_vertices": excl.vertices,
            "degeneracy": ground.degeneracy,
            "energy_floor": ground.energy_floor,
            "vacua": to_value(&ground.vacua)?,
            "vacuum_overlaps": ground.overlaps,
            "algebra": {
                "passed": algebra.passed,
                "checks": [
                    check_summary(&algebra.component_relations),
                    check_summary(&algebra.commutators),
                    check_summary(&algebra.resolutions),
                ],
            },
            "spectrum": spectrum,
        }),
    );
    Ok(to_json_string(&report))
}

fn check_summary(c: &crate::algebra::Check) -> Value {
    json!({
        "name": c.name,
        "relations": c.relations,
        "structural": c.structural,
        "max_residual": c.max_residual,
        "failures": c.failure_count,
        "first_failures": c.failures.iter().map(|f| json!({"relation": f.relation, "residual": f.residual})).collect::<Vec<_>>(),
        "passed": c.passed,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WEntry {
    label: String,
    #[serde(default)]
    j: Option<usize>,
    #[serde(default)]
    k: Option<usize>,
    matrix: Vec<Vec<Entry>>,
    #[serde(default)]
    note: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

/// (J,K) from a label of the form "(J,K)".
fn parse_label(label: &str) -> Option<(usize, usize)> {
    let inner = label.strip_prefix('(')?.strip_suffix(')')?;
    let (j, k) = inner.split_once(',')?;
    Some((j.trim().parse().ok()?, k.trim().parse().ok()?))
}

/// Reads a JSON list of `{label, matrix, j?, k?, note?}` objects. Matrix
/// entries are numbers or `[re, im]` pairs.
pub fn parse_w_list(text: &str, m: usize) -> Result<Vec<WOperator>> {
    let entries: Vec<WEntry> = serde_json::from_str(text).map_err(|e| QdmError::config("w_file", e.to_string()))?;
    if entries.is_empty() {
        return Err(QdmError::config("w_file", "the operator list is empty"));
    }
    entries
        .into_iter()
        .map(|e| {
            if e.matrix.len() != m || e.matrix.iter().any(|r| r.len() != m) {
                return Err(QdmError::config("w_file", format!("{} is not {m} x {m}", e.label)));
            }
            let mat = DMatrix::from_fn(m, m, |i, j| match e.matrix[i][j] {
                Entry::Real(x) => Complex64::new(x, 0.0),
                Entry::Complex([re, im]) => Complex64::new(re, im),
            });
            let parsed = parse_label(&e.label);
            let mut w = WOperator::new(e.label.clone(), e.j.or(parsed.map(|p| p.0)), e.k.or(parsed.map(|p| p.1)), mat);
            w.note = e.note;
            Ok(w)
        })
        .collect()
}

/// Fusion table of the solved W family or of a W file, with the
/// non-Abelian verdict.
pub fn cmd_fuse(cfg: &ModelConfig, _opts: &RunOptions) -> Result<String> {
    let action = cfg.matter_action()?;
    let fixture = two_vertex_space(&action)?;
    let (source, ws) = match cfg.analysis.w_source {
        WSource::Solve => ("solve", vertex_intertwiner_family(&action)?),
        WSource::File => {
            let rel =
                cfg.analysis.w_file.as_ref().ok_or_else(|| QdmError::config("w_file", "required for w_source file"))?;
            let path = cfg.base_dir.join(rel);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| QdmError::config("w_file", format!("{}: {e}", path.display())))?;
            ("file", parse_w_list(&text, action.matter_dim())?)
        }
    };
    let mut verification = Vec::new();
    for w in &ws {
        let entry = match (w.j, w.k) {
            (Some(j), Some(k)) if j <= action.group().order() && k <= action.matter_dim() && j > 0 && k > 0 => {
                let r = verify_w(&fixture, w)?;
                json!({"label": w.label, "vertex_residual": r.vertex, "edge_residual": r.edge})
            }
            _ => json!({"label": w.label, "vertex_residual": null, "edge_residual": null}),
        };
        verification.push(entry);
    }
    let table = fusion_table(&ws)?;
    let report = merge(
        table.to_json(),
        json!({
            "w_source": source,
            "nonabelian": detect_nonabelian(&table),
            "special_form": is_special_form(&action).flag,
            "verification": verification,
            "operators": ws.iter().map(matrix_json).collect::<Vec<_>>(),
        }),
    );
    Ok(to_json_string(&report))
}

fn matrix_json(w: &WOperator) -> Value {
    let rows: Vec<Vec<Value>> = (0..w.matrix.nrows())
        .map(|i| {
            (0..w.matrix.ncols())
                .map(|j| {
                    let z = w.matrix[(i, j)];
                    if z.im == 0.0 {
                        json!(z.re)
                    } else {
                        json!([z.re, z.im])
                    }
                })
                .collect()
        })
        .collect();
    json!({"label": w.label, "matrix": rows, "note": w.note})
}

/// CSV of the confinement scan on the vacuum seeded with matter label 0.
pub fn cmd_confine(cfg: &ModelConfig, opts: &RunOptions) -> Result<String> {
    let space = cfg.space(opts.dim_cap)?;
    let excl = cfg.exclusion();
    let mut lengths = cfg.analysis.confinement_lengths.clone();
    if cfg.analysis.closed_loop {
        let grid =
            space.complex().grid().ok_or_else(|| QdmError::PathUnavailable("closed loops need a torus grid".into()))?;
        lengths.push(grid.cols);
    }
    let vacuum = vacuum_state(&space, 0)?;
    let rows = confinement_scan(&space, &excl, &vacuum, &lengths)?;
    Ok(confinement_csv(&rows))
}

/// Degeneracy of a union or wedge against the product rule, with the
/// shared vertex of a wedge excluded and kept, plus the domain-wall energy.
pub fn cmd_glue(cfg: &ModelConfig, opts: &RunOptions) -> Result<String> {
    let action = cfg.matter_action()?;
    let d_alg = orbit_decomposition(&action).d_alg as u64;
    let space = cfg.space(opts.dim_cap)?;
    let report = match &cfg.complex {
        ComplexSpec::Union { parts } => {
            let mut part_degeneracies = Vec::new();
            for p in parts {
                let s = Arc::new(ModelSpace::with_cap(p.build()?, action.clone(), opts.dim_cap)?);
                part_degeneracies.push(ground_degeneracy(&s, &Exclusion::none())?);
            }
            let measured = ground_degeneracy(&space, &Exclusion::none())?;
            json!({
                "mode": "union",
                "d_alg": d_alg,
                "part_degeneracies": part_degeneracies,
                "product_of_parts": part_degeneracies.iter().product::<u64>(),
                "predicted": d_alg.pow(parts.len() as u32),
                "measured": measured,
            })
        }
        ComplexSpec::Wedge { parts, at } => {
            let [a, _] = two_parts(parts)?;
            let a_vertices = a.build()?.vertex_count();
            let shared = at[0];
            let mut excluded = Exclusion::vertices(vec![shared]);
            excluded.keep_edge_terms = cfg.keep_edge_terms;
            let with_excl = ground_degeneracy(&space, &excluded)?;
            let without = ground_degeneracy(&space, &Exclusion::none())?;
            let reps = orbit_decomposition(&action).representatives();
            let [ra, rb] = match cfg.analysis.domain_wall {
                Some(p) => p,
                None if reps.len() >= 2 => [reps[0], reps[1]],
                None => [reps[0], reps[0]],
            };
            let side_a: Vec<usize> = (0..a_vertices).collect();
            let wall = domain_wall(&space, &Exclusion::none(), &side_a, ra, rb)?;
            json!({
                "mode": "wedge",
                "d_alg": d_alg,
                "shared_vertex": shared,
                "keep_edge_terms": cfg.keep_edge_terms,
                "excluded": {"predicted": d_alg * d_alg, "measured": with_excl},
                "not_excluded": {"predicted": d_alg, "measured": without},
                "domain_wall": {
                    "matter": [ra, rb],
                    "energy": wall.energy,
                    "ground_energy": wall.ground_energy,
                    "above_ground": wall.energy > wall.ground_energy + 1e-9,
                },
            })
        }
        _ => return Err(QdmError::config("complex.type", "glue needs a union or wedge complex")),
    };
    Ok(to_json_string(&report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Fuse,
    Confine,
    Glue,
}

pub fn run(cmd: Command, cfg: &ModelConfig, opts: &RunOptions) -> Result<String> {
    match cmd {
        Command::Analyze => cmd_analyze(cfg, opts),
        Command::Fuse => cmd_fuse(cfg, opts),
        Command::Confine => cmd_confine(cfg, opts),
        Command::Glue => cmd_glue(cfg, opts),
    }
}
