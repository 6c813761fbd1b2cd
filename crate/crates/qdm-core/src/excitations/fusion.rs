//! Fusion rules read off from compositions of W operators.
//!
//! A product W_a W_b that is a multiple of a listed operator W_c gives the
//! single outcome c. Otherwise it is expanded by least squares in a maximal
//! linearly independent subset of the list, chosen greedily in list order.
//! Coefficients are taken in modulus: representatives such as [[0,1],[-1,0]]
//! carry a sign that relabels nothing, so N_ab^c = |lambda_c|.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::intertwiner::WOperator;
use crate::error::{QdmError, Result};

type C = Complex64;
const CLOSURE_TOL: f64 = 1e-6;
const INTEGER_TOL: f64 = 1e-6;
const MATCH_TOL: f64 = 1e-9;
const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub c: String,
    pub coeff: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FusionTable {
    pub labels: Vec<String>,
    pub vacuum: String,
    /// products[a][b] lists the outcomes of a x b with nonzero coefficient.
    pub products: Vec<Vec<Vec<(usize, u64)>>>,
    /// Whether a x b and b x a have the same outcomes.
    pub commuting: Vec<Vec<bool>>,
    /// Whether W_a and W_b commute as matrices.
    pub matrix_commuting: Vec<Vec<bool>>,
    pub abelian: bool,
}

impl FusionTable {
    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Outcomes of a x b by label, in label order.
    pub fn product(&self, a: &str, b: &str) -> Option<Vec<(String, u64)>> {
        let (i, j) = (self.index(a)?, self.index(b)?);
        Some(self.products[i][j].iter().map(|&(c, n)| (self.labels[c].clone(), n)).collect())
    }

    /// The single outcome of a x b with coefficient 1, if that is what it is.
    pub fn single(&self, a: &str, b: &str) -> Option<String> {
        match self.product(a, b)?.as_slice() {
            [(c, 1)] => Some(c.clone()),
            _ => None,
        }
    }

    pub fn coefficient(&self, a: usize, b: usize, c: usize) -> u64 {
        self.products[a][b].iter().find(|o| o.0 == c).map_or(0, |o| o.1)
    }

    /// The JSON shape `{labels, products: {"a,b": [{c, coeff}]}, abelian}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut products = serde_json::Map::new();
        for (i, row) in self.products.iter().enumerate() {
            for (j, outs) in row.iter().enumerate() {
                let list: Vec<Outcome> =
                    outs.iter().map(|&(c, n)| Outcome { c: self.labels[c].clone(), coeff: n }).collect();
                products.insert(format!("{},{}", self.labels[i], self.labels[j]), serde_json::to_value(list).unwrap());
            }
        }
        serde_json::json!({
            "labels": self.labels,
            "vacuum": self.vacuum,
            "products": products,
            "abelian": self.abelian,
        })
    }
}

fn flat(m: &DMatrix<C>) -> DVector<C> {
    DVector::from_iterator(m.len(), m.iter().copied())
}

/// Indices of a maximal linearly independent subset, greedy in list order.
/// Gram-Schmidt with a second pass; a vector is kept when its component
/// orthogonal to the chosen ones is not negligible.
fn independent_subset(ws: &[WOperator]) -> Vec<usize> {
    let mut chosen = Vec::new();
    let mut ortho: Vec<DVector<C>> = Vec::new();
    for (i, w) in ws.iter().enumerate() {
        let v = flat(&w.matrix);
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &ortho {
                let c = q.dotc(&r);
                r -= q * c;
            }
        }
        if r.norm() > RANK_TOL * (1.0 + v.norm()) {
            ortho.push(r.unscale(r.norm()));
            chosen.push(i);
        }
    }
    chosen
}

/// Least-squares coefficients of `b` in the full-column-rank `span`.
fn least_squares(span: &DMatrix<C>, b: &DVector<C>) -> Option<DVector<C>> {
    let gram = span.adjoint() * span;
    gram.cholesky().map(|ch| ch.solve(&(span.adjoint() * b)))
}

/// lambda with p = lambda * w, when p is such a multiple.
fn multiple_of(p: &DMatrix<C>, w: &DMatrix<C>) -> Option<C> {
    let wn = w.norm_squared();
    if wn < MATCH_TOL {
        return None;
    }
    let lambda: C = w.iter().zip(p.iter()).map(|(a, b)| a.conj() * b).sum::<C>() / wn;
    if (p - w * lambda).norm() < MATCH_TOL * (1.0 + p.norm()) && lambda.norm() > MATCH_TOL {
        Some(lambda)
    } else {
        None
    }
}

fn is_vacuum(ws: &[WOperator], i: usize) -> bool {
    ws.iter().all(|b| {
        (&ws[i].matrix * &b.matrix - &b.matrix).norm() < MATCH_TOL
            && (&b.matrix * &ws[i].matrix - &b.matrix).norm() < MATCH_TOL
    })
}

fn check_shapes(ws: &[WOperator]) -> Result<usize> {
    let first = ws.first().ok_or_else(|| QdmError::config("w", "empty operator list"))?;
    let m = first.matrix.nrows();
    for w in ws {
        if w.matrix.nrows() != m || w.matrix.ncols() != m {
            return Err(QdmError::config("w", format!("{} is not {m} x {m}", w.label)));
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for w in ws {
        if !seen.insert(&w.label) {
            return Err(QdmError::config("w", format!("duplicate label {}", w.label)));
        }
    }
    Ok(m)
}

/// Outcomes of W_a W_b, or the least-squares residual when the product
/// leaves the span.
enum Expansion {
    Outcomes(Vec<(usize, u64)>),
    Outside,
    NonInteger,
}

fn expand(ws: &[WOperator], basis: &[usize], span: &DMatrix<C>, p: &DMatrix<C>) -> Expansion {
    if p.norm() < MATCH_TOL {
        return Expansion::Outcomes(Vec::new());
    }
    for (c, w) in ws.iter().enumerate() {
        if let Some(l) = multiple_of(p, &w.matrix) {
            return snap_all(&[(c, l)]);
        }
    }
    let b = flat(p);
    let Some(x) = least_squares(span, &b) else {
        return Expansion::Outside;
    };
    if (span * &x - &b).norm() > CLOSURE_TOL {
        return Expansion::Outside;
    }
    let terms: Vec<(usize, C)> = basis.iter().zip(x.iter()).map(|(&c, &l)| (c, l)).collect();
    snap_all(&terms)
}

fn snap_all(terms: &[(usize, C)]) -> Expansion {
    let mut out = Vec::new();
    for &(c, l) in terms {
        let m = l.norm();
        let r = m.round();
        if (m - r).abs() >= INTEGER_TOL {
            return Expansion::NonInteger;
        }
        if r >= 1.0 {
            out.push((c, r as u64));
        }
    }
    out.sort();
    Expansion::Outcomes(out)
}

/// Fusion table of a family of W operators. Fails with `NotClosed` (or
/// `NonIntegerCoefficients`) naming every offending ordered pair.
pub fn fusion_table(ws: &[WOperator]) -> Result<FusionTable> {
    check_shapes(ws)?;
    let vacuum = (0..ws.len()).find(|&i| is_vacuum(ws, i)).ok_or(QdmError::MissingVacuum)?;
    let basis = independent_subset(ws);
    let span = DMatrix::from_columns(&basis.iter().map(|&k| flat(&ws[k].matrix)).collect::<Vec<_>>());
    let n = ws.len();
    let mut products = vec![vec![Vec::new(); n]; n];
    let mut outside = Vec::new();
    let mut fractional = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let p = &ws[a].matrix * &ws[b].matrix;
            match expand(ws, &basis, &span, &p) {
                Expansion::Outcomes(o) => products[a][b] = o,
                Expansion::Outside => outside.push((ws[a].label.clone(), ws[b].label.clone())),
                Expansion::NonInteger => fractional.push((ws[a].label.clone(), ws[b].label.clone())),
            }
        }
    }
    if !outside.is_empty() {
        return Err(QdmError::NotClosed { pairs: outside });
    }
    if !fractional.is_empty() {
        return Err(QdmError::NonIntegerCoefficients { pairs: fractional });
    }
    let commuting: Vec<Vec<bool>> =
        (0..n).map(|a| (0..n).map(|b| products[a][b] == products[b][a]).collect()).collect();
    let matrix_commuting: Vec<Vec<bool>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let (x, y) = (&ws[a].matrix, &ws[b].matrix);
                    (x * y - y * x).norm() < MATCH_TOL
                })
                .collect()
        })
        .collect();
    let single = products.iter().flatten().all(|o| o.len() == 1 && o[0].1 == 1);
    let abelian = single && commuting.iter().flatten().all(|&c| c);
    Ok(FusionTable {
        labels: ws.iter().map(|w| w.label.clone()).collect(),
        vacuum: ws[vacuum].label.clone(),
        products,
        commuting,
        matrix_commuting,
        abelian,
    })
}

/// True when some product has a coefficient above 1 or several outcomes.
pub fn detect_nonabelian(table: &FusionTable) -> bool {
    table.products.iter().flatten().any(|o| o.len() > 1 || o.iter().any(|&(_, n)| n > 1))
}

/// A cell where a derived table and a printed one disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub row: String,
    pub column: String,
    pub printed: String,
    pub derived: String,
}

fn render(table: &FusionTable, a: usize, b: usize) -> String {
    let outs = &table.products[a][b];
    if outs.is_empty() {
        return "0".into();
    }
    outs.iter()
        .map(|&(c, n)| if n == 1 { table.labels[c].clone() } else { format!("{n}{}", table.labels[c]) })
        .collect::<Vec<_>>()
        .join("+")
}

/// Compares against a printed single-outcome table given as rows of
/// labels, `printed[row][k]` being row x `columns[k]`.
pub fn compare_with_printed(
    table: &FusionTable,
    columns: &[&str],
    printed: &BTreeMap<&str, Vec<&str>>,
) -> Result<Vec<Discrepancy>> {
    let idx = |l: &str| table.index(l).ok_or_else(|| QdmError::config("label", format!("unknown label {l}")));
    let mut out = Vec::new();
    for (row, cells) in printed {
        let a = idx(row)?;
        for (col, cell) in columns.iter().zip(cells) {
            let b = idx(col)?;
            let derived = render(table, a, b);
            if derived != *cell {
                out.push(Discrepancy {
                    row: row.to_string(),
                    column: col.to_string(),
                    printed: cell.to_string(),
                    derived,
                });
            }
        }
    }
    Ok(out)
}
