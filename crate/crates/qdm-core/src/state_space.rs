//! The tensor-product state space with its mixed-radix basis and dense
//! complex state vectors.
//!
//! Basis index layout (little-endian): edge `e` carries weight `N^e`, vertex
//! `v` carries weight `N^E * M^v`.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::cw_complex::{vertex_star, CellComplex2, Incidence};
use crate::cyclic_action::{CyclicGroup, MatterAction};
use crate::error::{QdmError, Result};

pub const DEFAULT_DIM_CAP: usize = 1 << 27;
pub const DEFAULT_DENSE_CAP: usize = 1024;

#[derive(Debug, Clone)]
pub struct ModelSpace {
    complex: CellComplex2,
    action: MatterAction,
    dim: usize,
    edge_weight: Vec<usize>,
    vertex_weight: Vec<usize>,
    stars: Vec<Vec<(usize, Incidence)>>,
}

impl ModelSpace {
    pub fn new(complex: CellComplex2, action: MatterAction) -> Result<Self> {
        Self::with_cap(complex, action, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(complex: CellComplex2, action: MatterAction, cap: usize) -> Result<Self> {
        let n = action.group().order();
        let m = action.matter_dim();
        let mut dim: u128 = 1;
        let mut edge_weight = Vec::with_capacity(complex.edge_count());
        let mut vertex_weight = Vec::with_capacity(complex.vertex_count());
        let too_big = |d: u128| QdmError::DimensionCap { requested: d, cap };
        for _ in 0..complex.edge_count() {
            edge_weight.push(dim as usize);
            dim = dim.checked_mul(n as u128).ok_or_else(|| too_big(u128::MAX))?;
            if dim > cap as u128 {
                return Err(too_big(full_dim(&complex, n, m)));
            }
        }
        for _ in 0..complex.vertex_count() {
            vertex_weight.push(dim as usize);
            dim = dim.checked_mul(m as u128).ok_or_else(|| too_big(u128::MAX))?;
            if dim > cap as u128 {
                return Err(too_big(full_dim(&complex, n, m)));
            }
        }
        let stars = (0..complex.vertex_count()).map(|v| vertex_star(&complex, v)).collect();
        Ok(Self { complex, action, dim: dim as usize, edge_weight, vertex_weight, stars })
    }

    pub fn complex(&self) -> &CellComplex2 {
        &self.complex
    }
    pub fn action(&self) -> &MatterAction {
        &self.action
    }
    pub fn group(&self) -> CyclicGroup {
        self.action.group()
    }
    pub fn n(&self) -> usize {
        self.action.group().order()
    }
    pub fn m(&self) -> usize {
        self.action.matter_dim()
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn edge_weight(&self, e: usize) -> usize {
        self.edge_weight[e]
    }
    pub fn vertex_weight(&self, v: usize) -> usize {
        self.vertex_weight[v]
    }
    pub fn star(&self, v: usize) -> &[(usize, Incidence)] {
        &self.stars[v]
    }

    #[inline]
    pub fn edge_digit(&self, index: usize, e: usize) -> usize {
        (index / self.edge_weight[e]) % self.n()
    }

    #[inline]
    pub fn vertex_digit(&self, index: usize, v: usize) -> usize {
        (index / self.vertex_weight[v]) % self.m()
    }

    pub fn encode(&self, edge_digits: &[usize], vertex_digits: &[usize]) -> Result<usize> {
        if edge_digits.len() != self.complex.edge_count() {
            return Err(QdmError::DimensionMismatch { left: edge_digits.len(), right: self.complex.edge_count() });
        }
        if vertex_digits.len() != self.complex.vertex_count() {
            return Err(QdmError::DimensionMismatch { left: vertex_digits.len(), right: self.complex.vertex_count() });
        }
        let (n, m) = (self.n(), self.m());
        let mut index = 0;
        for (e, &d) in edge_digits.iter().enumerate() {
            if d >= n {
                return Err(QdmError::RadixViolation { position: e, value: d, radix: n });
            }
            index += d * self.edge_weight[e];
        }
        for (v, &d) in vertex_digits.iter().enumerate() {
            if d >= m {
                return Err(QdmError::RadixViolation { position: edge_digits.len() + v, value: d, radix: m });
            }
            index += d * self.vertex_weight[v];
        }
        Ok(index)
    }

    pub fn decode(&self, index: usize) -> BasisIndex {
        let edge_digits = (0..self.complex.edge_count()).map(|e| self.edge_digit(index, e)).collect();
        let vertex_digits = (0..self.complex.vertex_count()).map(|v| self.vertex_digit(index, v)).collect();
        BasisIndex { edge_digits, vertex_digits }
    }

    pub fn product_state(&self, edge_digits: &[usize], vertex_digits: &[usize]) -> Result<StateVector> {
        let i = self.encode(edge_digits, vertex_digits)?;
        Ok(StateVector::basis(self.dim, i))
    }

    /// All edges zero, every vertex carrying `alpha`.
    pub fn uniform_matter_state(&self, alpha: usize) -> Result<StateVector> {
        self.product_state(&vec![0; self.complex.edge_count()], &vec![alpha; self.complex.vertex_count()])
    }
}

fn full_dim(c: &CellComplex2, n: usize, m: usize) -> u128 {
    let mut d: u128 = 1;
    for _ in 0..c.edge_count() {
        d = d.saturating_mul(n as u128);
    }
    for _ in 0..c.vertex_count() {
        d = d.saturating_mul(m as u128);
    }
    d
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisIndex {
    pub edge_digits: Vec<usize>,
    pub vertex_digits: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(dim: usize) -> Self {
        Self { amps: vec![Complex64::new(0.0, 0.0); dim] }
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut s = Self::zeros(dim);
        s.amps[i] = Complex64::new(1.0, 0.0);
        s
    }

    /// Unit vector with independent Gaussian-like components.
    pub fn random(dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut s =
            Self { amps: (0..dim).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect() };
        s.normalize();
        s
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Scales to unit norm and returns the previous norm.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            for a in &mut self.amps {
                *a *= inv;
            }
        }
        n
    }

    pub fn scale(&mut self, c: Complex64) {
        for a in &mut self.amps {
            *a *= c;
        }
    }

    /// self += c * other
    pub fn axpy(&mut self, c: Complex64, other: &StateVector) {
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += c * b;
        }
    }

    pub fn sub(&self, other: &StateVector) -> StateVector {
        StateVector { amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a - b).collect() }
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }
}

/// <a|b>, conjugate-linear in `a`.
pub fn inner(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(QdmError::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}
