//! Dense reference constructions built from Kronecker products of
//! single-site matrices, independent of the matrix-free operator layer.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qdm_core::cw_complex::CellComplex2;

pub type C = Complex64;
pub type Dense = DMatrix<C>;

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub fn omega(n: usize, k: i64) -> C {
    let t = 2.0 * std::f64::consts::PI * (k.rem_euclid(n as i64) as f64) / n as f64;
    C::new(t.cos(), t.sin())
}

/// Site layout of the reference: edges first (edge 0 fastest), then
/// vertices. The Kronecker product puts its first factor slowest, so the
/// factors are assembled from the last site down to edge 0.
pub struct Oracle {
    pub complex: CellComplex2,
    pub n: usize,
    pub m: usize,
    /// theta(1, .) as an array.
    pub perm: Vec<usize>,
}

impl Oracle {
    pub fn new(complex: CellComplex2, n: usize, perm: &[usize]) -> Self {
        Self { complex, n, m: perm.len(), perm: perm.to_vec() }
    }

    pub fn sites(&self) -> usize {
        self.complex.edge_count() + self.complex.vertex_count()
    }

    fn radix(&self, site: usize) -> usize {
        if site < self.complex.edge_count() {
            self.n
        } else {
            self.m
        }
    }

    pub fn dim(&self) -> usize {
        (0..self.sites()).map(|s| self.radix(s)).product()
    }

    pub fn edge_site(&self, e: usize) -> usize {
        e
    }

    pub fn vertex_site(&self, v: usize) -> usize {
        self.complex.edge_count() + v
    }

    /// Product of single-site matrices; factors on the same site multiply
    /// left to right.
    pub fn embed(&self, factors: &[(usize, Dense)]) -> Dense {
        let mut out = DMatrix::from_element(1, 1, c(1.0));
        for site in (0..self.sites()).rev() {
            let d = self.radix(site);
            let mut local = Dense::identity(d, d);
            for (s, f) in factors {
                if *s == site {
                    local *= f;
                }
            }
            out = out.kronecker(&local);
        }
        out
    }

    /// |x> -> |x + k mod n>.
    pub fn shift(&self, k: i64) -> Dense {
        let n = self.n;
        let k = k.rem_euclid(n as i64) as usize;
        Dense::from_fn(n, n, |r, col| if r == (col + k) % n { c(1.0) } else { c(0.0) })
    }

    /// |x> -> omega^(k x) |x>.
    pub fn clock(&self, k: i64) -> Dense {
        let n = self.n;
        Dense::from_fn(n, n, |r, col| if r == col { omega(n, k * r as i64) } else { c(0.0) })
    }

    pub fn theta_pow(&self, g: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..self.m).collect();
        for _ in 0..g {
            p = p.iter().map(|&a| self.perm[a]).collect();
        }
        p
    }

    /// Permutation matrix with (theta(g,a), a) = 1.
    pub fn theta(&self, g: usize) -> Dense {
        let p = self.theta_pow(g);
        Dense::from_fn(self.m, self.m, |r, col| if p[col] == r { c(1.0) } else { c(0.0) })
    }

    pub fn projector_on(&self, d: usize, k: usize) -> Dense {
        Dense::from_fn(d, d, |r, col| if r == k && col == k { c(1.0) } else { c(0.0) })
    }

    /// Gauge transformation by g at v: the shift by +g on edges entering v,
    /// by -g on edges leaving it, and theta(g) on the matter.
    pub fn vertex_component(&self, v: usize, g: usize) -> Dense {
        let mut f = Vec::new();
        for (e, &(t, h)) in self.complex.edges().iter().enumerate() {
            if h == v {
                f.push((self.edge_site(e), self.shift(g as i64)));
            }
            if t == v {
                f.push((self.edge_site(e), self.shift(-(g as i64))));
            }
        }
        f.push((self.vertex_site(v), self.theta(g)));
        self.embed(&f)
    }

    pub fn vertex_projector(&self, v: usize, j: usize) -> Dense {
        let mut out = Dense::zeros(self.dim(), self.dim());
        for g in 0..self.n {
            out += self.vertex_component(v, g) * omega(self.n, -(((j - 1) * g) as i64));
        }
        out / c(self.n as f64)
    }

    /// Projector onto signed holonomy h, as the character sum of clock
    /// products around the face.
    pub fn face_projector(&self, f: usize, h: usize) -> Dense {
        let mut out = Dense::zeros(self.dim(), self.dim());
        for k in 0..self.n as i64 {
            let factors: Vec<(usize, Dense)> =
                self.complex.face(f).iter().map(|&(e, s)| (self.edge_site(e), self.clock(k * s as i64))).collect();
            out += self.embed(&factors) * omega(self.n, -k * h as i64);
        }
        out / c(self.n as f64)
    }

    /// Sum of the rank-one projectors on (x, tail label, head label) with
    /// theta(x, tail) = head + r - 1 mod m.
    pub fn edge_projector(&self, e: usize, r: usize) -> Dense {
        let (t, h) = self.complex.edge(e);
        let mut out = Dense::zeros(self.dim(), self.dim());
        for x in 0..self.n {
            let p = self.theta_pow(x);
            for (a, &pa) in p.iter().enumerate() {
                for b in 0..self.m {
                    if pa != (b + r - 1) % self.m {
                        continue;
                    }
                    if t == h && a != b {
                        continue;
                    }
                    let mut f = vec![(self.edge_site(e), self.projector_on(self.n, x))];
                    f.push((self.vertex_site(t), self.projector_on(self.m, a)));
                    if t != h {
                        f.push((self.vertex_site(h), self.projector_on(self.m, b)));
                    }
                    out += self.embed(&f);
                }
            }
        }
        out
    }

    pub fn hamiltonian(&self) -> Dense {
        let mut h = Dense::zeros(self.dim(), self.dim());
        for v in 0..self.complex.vertex_count() {
            h -= self.vertex_projector(v, 1);
        }
        for f in 0..self.complex.face_count() {
            h -= self.face_projector(f, 0);
        }
        for e in 0..self.complex.edge_count() {
            h -= self.edge_projector(e, 1);
        }
        h
    }

    pub fn ground_projector(&self) -> Dense {
        let mut p = Dense::identity(self.dim(), self.dim());
        for v in 0..self.complex.vertex_count() {
            p *= self.vertex_projector(v, 1);
        }
        for f in 0..self.complex.face_count() {
            p *= self.face_projector(f, 0);
        }
        for e in 0..self.complex.edge_count() {
            p *= self.edge_projector(e, 1);
        }
        p
    }
}

/// Toric-code Hamiltonian of Z_n on the same complex with no matter sites:
/// -sum of vertex averages of shifts and face projectors.
pub fn plain_double_hamiltonian(complex: &CellComplex2, n: usize) -> Dense {
    let edges = complex.edge_count();
    let dim = n.pow(edges as u32);
    let embed = |factors: &[(usize, Dense)]| {
        let mut out = DMatrix::from_element(1, 1, c(1.0));
        for site in (0..edges).rev() {
            let mut local = Dense::identity(n, n);
            for (s, f) in factors {
                if *s == site {
                    local *= f;
                }
            }
            out = out.kronecker(&local);
        }
        out
    };
    let shift = |k: i64| {
        let k = k.rem_euclid(n as i64) as usize;
        Dense::from_fn(n, n, |r, col| if r == (col + k) % n { c(1.0) } else { c(0.0) })
    };
    let clock = |k: i64| Dense::from_fn(n, n, |r, col| if r == col { omega(n, k * r as i64) } else { c(0.0) });
    let mut h = Dense::zeros(dim, dim);
    for v in 0..complex.vertex_count() {
        let mut a = Dense::zeros(dim, dim);
        for g in 0..n as i64 {
            let mut f = Vec::new();
            for (e, &(t, hd)) in complex.edges().iter().enumerate() {
                if hd == v {
                    f.push((e, shift(g)));
                }
                if t == v {
                    f.push((e, shift(-g)));
                }
            }
            a += embed(&f);
        }
        h -= a / c(n as f64);
    }
    for fc in 0..complex.face_count() {
        let mut b = Dense::zeros(dim, dim);
        for k in 0..n as i64 {
            let f: Vec<(usize, Dense)> = complex.face(fc).iter().map(|&(e, s)| (e, clock(k * s as i64))).collect();
            b += embed(&f);
        }
        h -= b / c(n as f64);
    }
    h
}

/// Sorted eigenvalues of a Hermitian dense matrix.
pub fn eigenvalues(h: &Dense) -> Vec<f64> {
    let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

pub fn max_abs_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Reads a file under the crate's `configs` directory.
pub fn config_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

use std::sync::Arc;

use qdm_core::cw_complex::{disjoint_union, torus_grid};
use qdm_core::cyclic_action::{fixtures, MatterAction};
use qdm_core::model_operators as ops;
use qdm_core::state_space::ModelSpace;

/// Small fixtures: every named action on a few complexes, all within the
/// dense cap.
pub fn small_fixtures() -> Vec<(String, Arc<ModelSpace>)> {
    let sphere = CellComplex2::new(2, vec![(0, 1), (0, 1)], vec![vec![(0, 1), (1, -1)], vec![(1, 1), (0, -1)]])
        .expect("valid sphere");
    let mut out = Vec::new();
    for (name, action) in fixtures::named() {
        let complexes = vec![
            ("edge", CellComplex2::single_edge()),
            ("sphere", sphere.clone()),
            ("torus(1,1)", torus_grid(1, 1).unwrap()),
            ("torus(1,2)", torus_grid(1, 2).unwrap()),
            ("torus(2,1)", torus_grid(2, 1).unwrap()),
            ("union", disjoint_union(&torus_grid(1, 1).unwrap(), &torus_grid(1, 1).unwrap())),
        ];
        for (cname, cx) in complexes {
            if let Ok(space) = ModelSpace::with_cap(cx, action.clone(), 1024) {
                out.push((format!("{name} {cname}"), Arc::new(space)));
            }
        }
    }
    out
}

pub fn oracle_for(space: &ModelSpace) -> Oracle {
    Oracle::new(space.complex().clone(), space.n(), space.action().generator_map())
}

pub fn action_of(space: &ModelSpace) -> MatterAction {
    space.action().clone()
}

/// Largest entrywise gap between every matrix-free operator on `space` and
/// its reference, with the label of the worst one.
pub fn oracle_gap(space: &Arc<ModelSpace>) -> (f64, String) {
    let o = oracle_for(space);
    let cx = space.complex();
    let mut worst = (0.0, String::new());
    let mut see = |label: String, a: Dense, b: Dense| {
        let d = max_abs_diff(&a, &b);
        if d >= worst.0 {
            worst = (d, label);
        }
    };
    for v in 0..cx.vertex_count() {
        for g in 0..space.n() {
            see(
                format!("Abar(v={v},g={g})"),
                ops::vertex_component(space, v, g).unwrap().to_dense(),
                o.vertex_component(v, g),
            );
        }
        for j in 1..=space.n() {
            see(
                format!("A(v={v},J={j})"),
                ops::vertex_projector(space, v, j).unwrap().to_dense(),
                o.vertex_projector(v, j),
            );
        }
        let w = Dense::from_fn(space.m(), space.m(), |r, col| {
            C::new((r * 3 + col) as f64 * 0.25 - 1.0, r as f64 - col as f64)
        });
        see(
            format!("W(v={v})"),
            ops::matter_operator(space, v, &w).unwrap().to_dense(),
            o.embed(&[(o.vertex_site(v), w.clone())]),
        );
    }
    for f in 0..cx.face_count() {
        for h in 0..space.n() {
            see(
                format!("B(f={f},h={h})"),
                ops::face_projector(space, f, h).unwrap().to_dense(),
                o.face_projector(f, h),
            );
        }
    }
    for e in 0..cx.edge_count() {
        for r in 1..=space.m() {
            see(
                format!("C(j={e},R={r})"),
                ops::edge_projector(space, e, r).unwrap().to_dense(),
                o.edge_projector(e, r),
            );
        }
        for k in 0..space.n() {
            see(
                format!("X(j={e})^{k}"),
                ops::pauli_edge(space, e, ops::EdgePauli::Xpow(k)).unwrap().to_dense(),
                o.embed(&[(e, o.shift(k as i64))]),
            );
            see(
                format!("Z(j={e})^{k}"),
                ops::pauli_edge(space, e, ops::EdgePauli::Zpow(k)).unwrap().to_dense(),
                o.embed(&[(e, o.clock(k as i64))]),
            );
        }
    }
    let none = ops::Exclusion::none();
    see("H".into(), ops::hamiltonian(space, &none).unwrap().to_dense(), o.hamiltonian());
    see("P".into(), ops::global_projector(space, &none).unwrap().to_dense(), o.ground_projector());
    worst
}
