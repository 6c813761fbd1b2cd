//! Acceptance run: one PASS/FAIL line per criterion. Criteria that do not
//! hold are reported as failures with the measured values; nothing here is
//! relaxed to make a line pass.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use nalgebra::DMatrix;
use qdm_core::algebra::algebra_suite;
use qdm_core::cli::parse_w_list;
use qdm_core::cw_complex::{disjoint_union, torus_grid, torus_h, torus_v, wedge_at_vertex, CellComplex2};
use qdm_core::cyclic_action::{all_actions, fixtures, is_special_form, orbit_decomposition, MatterAction};
use qdm_core::excitations::{
    apply_string, compare_with_printed, condense, confinement_scan, detect_nonabelian, domain_wall, fusion_table,
    vertex_intertwiner_family, FusionTable, StringOp, WOperator,
};
use qdm_core::model_operators::{hamiltonian, Exclusion};
use qdm_core::spectrum::{dense_eigenvalues, ground_degeneracy, vacuum_state, violation_profile};
use qdm_core::state_space::{inner, ModelSpace};
use qdm_core::QdmError;

const ALGEBRA_TOL: f64 = 1e-9;
const ALGEBRA_VECTORS: usize = 20;
const ORACLE_TOL: f64 = 1e-12;
const INTEGER_TOL: f64 = 1e-9;
const OVERLAP_TOL: f64 = 1e-9;
const SPECTRUM_TOL: f64 = 1e-9;
const SEED: u64 = 0;

const BUDGET_ALGEBRA: Duration = Duration::from_secs(60);
const BUDGET_DEGENERACY: Duration = Duration::from_secs(120);
const BUDGET_FUSION: Duration = Duration::from_secs(10);
const BUDGET_PREDICTOR: Duration = Duration::from_secs(120);
const BUDGET_CONFINEMENT: Duration = Duration::from_secs(30);
const BUDGET_CONDENSATION: Duration = Duration::from_secs(10);
const BUDGET_GLUING: Duration = Duration::from_secs(120);

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn space(c: CellComplex2, a: MatterAction) -> Arc<ModelSpace> {
    Arc::new(ModelSpace::new(c, a).expect("fixture within cap"))
}

fn five_actions() -> Vec<(&'static str, MatterAction)> {
    vec![
        ("D2(Z2)", fixtures::d2_z2()),
        ("D3(Z2)", fixtures::d3_z2()),
        ("D4(Z2)-I", fixtures::d4_z2_pairs()),
        ("D4(Z2)-II", fixtures::d4_z2_fixed()),
        ("D3(Z3)", fixtures::d3_z3()),
    ]
}

fn within(budget: Duration, t: Instant) -> (bool, String) {
    let e = t.elapsed();
    (e < budget, format!("{:.1}s of {}s", e.as_secs_f64(), budget.as_secs()))
}

fn algebra() -> Verdict {
    let t = Instant::now();
    let mut failed = Vec::new();
    for (name, a) in five_actions() {
        for (r, c) in [(1, 2), (2, 2)] {
            let s = space(torus_grid(r, c).unwrap(), a.clone());
            let rep = algebra_suite(&s, ALGEBRA_VECTORS, SEED).unwrap();
            for check in [&rep.component_relations, &rep.commutators, &rep.resolutions] {
                assert!(check.max_residual.is_finite());
                if check.max_residual >= ALGEBRA_TOL {
                    let first = check.failures.first().map(|f| f.relation.clone()).unwrap_or_default();
                    failed.push(format!(
                        "{name} torus({r},{c}) {}: {} of {} fail, max {:.3}, e.g. {first}",
                        check.name, check.failure_count, check.relations, check.max_residual
                    ));
                }
            }
        }
    }
    let (fast, time) = within(BUDGET_ALGEBRA, t);
    let ok = failed.is_empty() && fast;
    let detail = if failed.is_empty() { time } else { format!("{time}; {}", failed.join("; ")) };
    verdict(ok, detail)
}

fn degeneracy() -> Verdict {
    let t = Instant::now();
    let expected = [
        ("D2(Z2)", fixtures::d2_z2(), 1),
        ("D3(Z2)", fixtures::d3_z2(), 2),
        ("D4(Z2)-I", fixtures::d4_z2_pairs(), 2),
        ("D4(Z2)-II", fixtures::d4_z2_fixed(), 3),
        ("M=1", fixtures::trivial_z2(), 4),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, a, want) in expected {
        let got: Vec<u64> = [(1, 2), (2, 2)]
            .iter()
            .map(|&(r, c)| ground_degeneracy(&space(torus_grid(r, c).unwrap(), a.clone()), &Exclusion::none()).unwrap())
            .collect();
        let good = got.iter().all(|&g| g == want);
        ok &= good;
        parts.push(format!("{name} {got:?} want {want}{}", if good { "" } else { " MISMATCH" }));
    }
    let (fast, time) = within(BUDGET_DEGENERACY, t);
    verdict(ok && fast, format!("{time}; {}", parts.join(", ")))
}

fn oracle() -> Verdict {
    let mut worst = (0.0, String::new());
    let fixtures = small_fixtures();
    for (name, s) in &fixtures {
        let (gap, label) = oracle_gap(s);
        if gap >= worst.0 {
            worst = (gap, format!("{name} {label}"));
        }
    }
    verdict(worst.0 < ORACLE_TOL, format!("{} fixtures, max gap {:.2e} at {}", fixtures.len(), worst.0, worst.1))
}

fn load_w(file: &str, m: usize) -> Vec<WOperator> {
    parse_w_list(&std::fs::read_to_string(config_path(&format!("w/{file}"))).unwrap(), m).unwrap()
}

fn printed(rows: &[(&'static str, &[&'static str])]) -> BTreeMap<&'static str, Vec<&'static str>> {
    rows.iter().map(|(r, cells)| (*r, cells.to_vec())).collect()
}

fn group_like(t: &FusionTable) -> bool {
    let n = t.labels.len();
    (0..n).all(|a| {
        let mut seen = vec![false; n];
        (0..n).all(|b| match t.products[a][b].as_slice() {
            [(c, 1)] if !seen[*c] => {
                seen[*c] = true;
                true
            }
            _ => false,
        })
    })
}

fn fusion() -> Verdict {
    let t = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;

    let cols1 = ["(1,1)", "(1,2)", "(2,1)", "(2,2)"];
    let table1 = printed(&[
        ("(1,1)", &["(1,1)", "(1,2)", "(2,1)", "(2,2)"]),
        ("(1,2)", &["(1,2)", "(1,1)", "(2,2)", "(2,1)"]),
        ("(2,1)", &["(2,1)", "(2,2)", "(1,1)", "(1,2)"]),
        ("(2,2)", &["(2,2)", "(2,1)", "(1,2)", "(1,1)"]),
    ]);
    let d2 = fusion_table(&load_w("d2_z2.json", 2)).unwrap();
    let d2_solved = fusion_table(&vertex_intertwiner_family(&fixtures::d2_z2()).unwrap()).unwrap();
    let diff1 = compare_with_printed(&d2, &cols1, &table1).unwrap();
    let diff1s = compare_with_printed(&d2_solved, &cols1, &table1).unwrap();
    ok &= diff1.is_empty() && diff1s.is_empty();
    notes.push(format!("two-state table: {} + {} mismatches", diff1.len(), diff1s.len()));

    let cols2 = ["(1,1)", "(1,2)", "(1,3)"];
    let table2 = printed(&[
        ("(1,1)", &["(1,1)", "(1,2)", "(1,3)"]),
        ("(1,2)", &["(1,2)", "(1,1)", "(1,3)"]),
        ("(1,3)", &["(1,3)", "(1,3)", "(1,1)+(1,2)+(1,3)"]),
    ]);
    let d3 = fusion_table(&load_w("d3_z2.json", 3)).unwrap();
    let diff2 = compare_with_printed(&d3, &cols2, &table2).unwrap();
    ok &= diff2.is_empty();
    notes.push(format!("three-state table: {} mismatches", diff2.len()));

    let d4ii = fusion_table(&load_w("d4_z2_fixed.json", 4)).unwrap();
    let sq = d4ii.product("(1;3,3)", "(1;3,3)").unwrap();
    let want = vec![("(1;1,1)".to_string(), 2), ("(1;2,2)".to_string(), 2)];
    ok &= sq == want;
    notes.push(format!("(1;3,3)^2 = {sq:?}"));

    match fusion_table(&load_w("d3_z2_with_21.json", 3)) {
        Err(QdmError::NotClosed { pairs }) => {
            let named = pairs.contains(&("(2,1)".into(), "(1,3)".into()));
            ok &= named;
            notes.push(format!("with (2,1): not closed, {} pairs, names ((2,1),(1,3)): {named}", pairs.len()));
        }
        other => {
            ok = false;
            notes.push(format!("with (2,1): unexpected {:?}", other.map(|t| t.abelian)));
        }
    }

    let cols3 = ["(1,1)", "(1,2)", "(1,3)", "(1,4)", "(2,1)", "(2,2)", "(2,3)", "(2,4)"];
    let table3 = printed(&[
        ("(1,1)", &["(1,1)", "(1,2)", "(1,3)", "(1,4)", "(1,5)", "(1,6)", "(1,7)", "(1,8)"]),
        ("(1,2)", &["(1,2)", "(1,1)", "(1,4)", "(1,3)", "(2,2)", "(2,1)", "(2,4)", "(1,3)"]),
        ("(1,3)", &["(1,3)", "(1,4)", "(1,1)", "(1,2)", "(2,3)", "(2,4)", "(2,1)", "(2,2)"]),
        ("(1,4)", &["(1,4)", "(1,3)", "(1,2)", "(1,1)", "(2,4)", "(2,3)", "(2,2)", "(2,1)"]),
        ("(2,1)", &["(2,1)", "(2,2)", "(2,3)", "(2,4)", "(1,1)", "(1,2)", "(1,3)", "(1,4)"]),
        ("(2,2)", &["(2,2)", "(2,1)", "(2,4)", "(2,3)", "(1,2)", "(1,1)", "(1,4)", "(1,3)"]),
        ("(2,3)", &["(2,3)", "(2,4)", "(2,1)", "(2,2)", "(1,3)", "(1,4)", "(1,1)", "(1,2)"]),
        ("(2,4)", &["(2,4)", "(2,3)", "(2,2)", "(2,1)", "(1,4)", "(1,3)", "(1,2)", "(1,1)"]),
    ]);
    let d4i = fusion_table(&load_w("d4_z2_pairs.json", 4)).unwrap();
    let diff3 = compare_with_printed(&d4i, &cols3, &table3).unwrap();
    ok &= d4i.abelian && group_like(&d4i);
    let cells: Vec<String> =
        diff3.iter().map(|d| format!("{}x{} printed {} derived {}", d.row, d.column, d.printed, d.derived)).collect();
    notes.push(format!(
        "choice I abelian {} group-like {}; {} printed cells differ: {}",
        d4i.abelian,
        group_like(&d4i),
        diff3.len(),
        cells.join(", ")
    ));

    let (fast, time) = within(BUDGET_FUSION, t);
    verdict(ok && fast, format!("{time}; {}", notes.join("; ")))
}

fn predictor() -> Verdict {
    let t = Instant::now();
    let mut actions: Vec<(String, MatterAction)> =
        five_actions().into_iter().map(|(n, a)| (n.to_string(), a)).collect();
    for m in 2..=4 {
        for a in all_actions(2, m) {
            actions.push((format!("Z2 on {m}: {:?}", a.generator_map()), a));
        }
    }
    let mut disagree = Vec::new();
    let mut errors = Vec::new();
    for (name, a) in &actions {
        match vertex_intertwiner_family(a).and_then(|ws| fusion_table(&ws)) {
            Ok(table) => {
                if detect_nonabelian(&table) != is_special_form(a).flag {
                    disagree.push(name.clone());
                }
            }
            Err(e) => errors.push(format!("{name}: {e}")),
        }
    }
    let (fast, time) = within(BUDGET_PREDICTOR, t);
    let ok = disagree.is_empty() && errors.is_empty() && fast;
    verdict(
        ok,
        format!(
            "{time}; {} actions, {} disagree {:?}, {} errors {:?}",
            actions.len(),
            disagree.len(),
            disagree,
            errors.len(),
            errors
        ),
    )
}

fn is_int(x: f64, want: i64) -> bool {
    (x - want as f64).abs() < INTEGER_TOL
}

fn confinement() -> Verdict {
    let t = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    let s = space(torus_grid(1, 4).unwrap(), fixtures::d2_z2());
    let vac = vacuum_state(&s, 0).unwrap();
    let rows = confinement_scan(&s, &Exclusion::none(), &vac, &[1, 2, 3, 4]).unwrap();
    for r in &rows {
        let l = r.length as i64;
        let (mag, ele) = if r.closed { (l, None) } else { (2 + l, Some(2)) };
        let good = is_int(r.delta_e_magnetic, mag) && ele.is_none_or(|e| is_int(r.delta_e_electric, e));
        let pattern = if r.closed { (0, 0, l) } else { (0, 2, l) };
        let good = good && r.magnetic_violations.rounded() == pattern;
        let good = good && (r.closed || r.electric_violations.rounded() == (2, 0, 0));
        ok &= good;
        notes.push(format!(
            "L={}{} dE_m={} dE_e={}",
            r.length,
            if r.closed { " closed" } else { "" },
            r.delta_e_magnetic,
            r.delta_e_electric
        ));
    }

    // Five crossings on a 2x3 torus.
    let c = torus_grid(2, 3).unwrap();
    let f = |r: usize, col: usize| r * 3 + col;
    let faces = [f(0, 0), f(0, 1), f(0, 2), f(1, 2), f(1, 1), f(1, 0)];
    let edges =
        [torus_v(2, 3, 0, 1), torus_v(2, 3, 0, 2), torus_h(2, 3, 1, 2), torus_v(2, 3, 1, 2), torus_v(2, 3, 1, 1)];
    let s5 = space(c, fixtures::d2_z2());
    let walk = StringOp::magnetic(s5.complex(), &faces, &edges).unwrap();
    let v5 = vacuum_state(&s5, 0).unwrap();
    let x = apply_string(&s5, &v5, &walk, 1).unwrap();
    let p5 = violation_profile(&s5, &Exclusion::none(), &x).unwrap().rounded();
    ok &= p5 == (0, 2, 5) && (x.norm() - 1.0).abs() < 1e-12;
    notes.push(format!("five crossings {p5:?}"));

    // Closed loop on a 2x2 torus.
    let s2 = space(torus_grid(2, 2).unwrap(), fixtures::d2_z2());
    let loop2 = StringOp::magnetic(s2.complex(), &[0, 1], &[torus_v(2, 2, 0, 1), torus_v(2, 2, 0, 0)]).unwrap();
    let v2 = vacuum_state(&s2, 0).unwrap();
    let p2 = violation_profile(&s2, &Exclusion::none(), &apply_string(&s2, &v2, &loop2, 1).unwrap()).unwrap().rounded();
    ok &= p2 == (0, 0, 2);
    notes.push(format!("2x2 loop {p2:?}"));

    let (fast, time) = within(BUDGET_CONFINEMENT, t);
    verdict(ok && fast, format!("{time}; {}", notes.join(", ")))
}

fn condensation() -> Verdict {
    let t = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    let s3 = space(torus_grid(1, 2).unwrap(), fixtures::d3_z2());
    let (a, b) = (vacuum_state(&s3, 0).unwrap(), vacuum_state(&s3, 2).unwrap());
    let w13 = load_w("d3_z2.json", 3).into_iter().find(|w| w.label == "(1,3)").unwrap();
    let r = condense(&s3, &a, &w13.matrix, &[a.clone(), b.clone()]).unwrap();
    ok &= (r.overlaps[1] - 1.0).abs() < OVERLAP_TOL && r.overlaps[0] < OVERLAP_TOL;
    notes.push(format!("D3 W13: |<xi2|.>|^2 = {:.12}", r.overlaps[1]));

    let s4 = space(torus_grid(1, 2).unwrap(), fixtures::d4_z2_pairs());
    let (a4, b4) = (vacuum_state(&s4, 0).unwrap(), vacuum_state(&s4, 2).unwrap());
    let x2 = DMatrix::from_fn(4, 4, |r, c| if r == (c + 2) % 4 { c64(1.0) } else { c64(0.0) });
    let r4 = condense(&s4, &a4, &x2, &[a4.clone(), b4.clone()]).unwrap();
    let back = condense(&s4, &b4, &x2, std::slice::from_ref(&a4)).unwrap();
    ok &= (r4.overlaps[1] - 1.0).abs() < OVERLAP_TOL && (back.overlaps[0] - 1.0).abs() < OVERLAP_TOL;
    notes.push(format!("D4-I X^2: {:.12} and back {:.12}", r4.overlaps[1], back.overlaps[0]));
    ok &= inner(&a4, &b4).unwrap().norm() < OVERLAP_TOL;

    let (fast, time) = within(BUDGET_CONDENSATION, t);
    verdict(ok && fast, format!("{time}; {}", notes.join(", ")))
}

fn c64(x: f64) -> num_complex::Complex64 {
    num_complex::Complex64::new(x, 0.0)
}

fn gluing() -> Verdict {
    let t = Instant::now();
    let a = fixtures::d3_z2();
    let d_alg = orbit_decomposition(&a).d_alg as u64;
    let t11 = torus_grid(1, 1).unwrap();
    let single = ground_degeneracy(&space(t11.clone(), a.clone()), &Exclusion::none()).unwrap();
    let union = ground_degeneracy(&space(disjoint_union(&t11, &t11), a.clone()), &Exclusion::none()).unwrap();

    let t12 = torus_grid(1, 2).unwrap();
    let (w, shared) = wedge_at_vertex(&t12, 0, &t12, 0).unwrap();
    let ws = space(w, a.clone());
    let excl = Exclusion::vertices(vec![shared]);
    let excluded = ground_degeneracy(&ws, &excl).unwrap();
    let excluded_keep = ground_degeneracy(&ws, &excl.clone().keeping_edge_terms()).unwrap();
    let joined = ground_degeneracy(&ws, &Exclusion::none()).unwrap();
    let side_a: Vec<usize> = (0..t12.vertex_count()).collect();
    let wall = domain_wall(&ws, &Exclusion::none(), &side_a, 0, 2).unwrap();

    let ok_union = union == d_alg * d_alg;
    let ok_excl = excluded == d_alg * d_alg;
    let ok_joined = joined == d_alg;
    let ok_wall = wall.energy > wall.ground_energy + INTEGER_TOL;
    let (fast, time) = within(BUDGET_GLUING, t);
    verdict(
        ok_union && ok_excl && ok_joined && ok_wall && fast,
        format!(
            "{time}; union {union} want {} (single torus {single}, product {}); wedge excluded {excluded} \
             (edge terms kept {excluded_keep}) want {}; wedge joined {joined} want {d_alg}; \
             domain wall E={} vs E0={}",
            d_alg * d_alg,
            single * single,
            d_alg * d_alg,
            wall.energy,
            wall.ground_energy
        ),
    )
}

fn trivial_matter() -> Verdict {
    let c = torus_grid(1, 2).unwrap();
    let s = space(c.clone(), fixtures::trivial_z2());
    let ours = dense_eigenvalues(&hamiltonian(&s, &Exclusion::none()).unwrap());
    let shift = c.edge_count() as f64;
    let plain: Vec<f64> = eigenvalues(&plain_double_hamiltonian(&c, 2)).into_iter().map(|e| e - shift).collect();
    let gap = ours.iter().zip(&plain).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let ok = ours.len() == plain.len() && gap < SPECTRUM_TOL;
    verdict(ok, format!("{} eigenvalues, shift -{shift}, max gap {gap:.2e}", ours.len()))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("algebra suite", algebra),
        ("degeneracy on a single torus", degeneracy),
        ("dense reference equivalence", oracle),
        ("fusion tables", fusion),
        ("non-Abelian predictor", predictor),
        ("confinement", confinement),
        ("condensation", condensation),
        ("gluing", gluing),
        ("trivial matter reduces to the plain double", trivial_matter),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let v = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        if !v.passed {
            failures += 1;
        }
        println!("criterion {} [{}]: {} - {}", i + 1, name, if v.passed { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
