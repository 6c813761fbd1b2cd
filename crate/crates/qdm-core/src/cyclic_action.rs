//! The cyclic gauge group Z_N, its permutation action on the matter labels,
//! and the orbit structure that controls vacuum counting.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::TAU;

use crate::error::{QdmError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CyclicGroup {
    order: usize,
}

impl CyclicGroup {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(QdmError::EmptyGroup);
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// omega = exp(2 pi i / N).
    pub fn generator_phase(&self) -> Complex64 {
        Complex64::from_polar(1.0, TAU / self.order as f64)
    }

    /// omega^k with k reduced mod N first, so large exponents stay exact.
    pub fn phase(&self, k: i64) -> Complex64 {
        let r = k.rem_euclid(self.order as i64) as f64;
        Complex64::from_polar(1.0, TAU * r / self.order as f64)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        (a + b) % self.order
    }

    pub fn neg(&self, a: usize) -> usize {
        (self.order - a % self.order) % self.order
    }
}

/// theta(1, .) stored as a permutation; theta(g, .) is its g-th power.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatterAction {
    group: CyclicGroup,
    generator_map: Vec<usize>,
    powers: Vec<Vec<usize>>,
}

impl MatterAction {
    pub fn group(&self) -> CyclicGroup {
        self.group
    }

    pub fn matter_dim(&self) -> usize {
        self.generator_map.len()
    }

    pub fn generator_map(&self) -> &[usize] {
        &self.generator_map
    }

    /// theta(g, alpha).
    #[inline]
    pub fn act(&self, g: usize, alpha: usize) -> usize {
        self.powers[g % self.group.order()][alpha]
    }

    /// Permutation table of theta(g, .).
    pub fn power(&self, g: usize) -> &[usize] {
        &self.powers[g % self.group.order()]
    }
}

/// Validates `perm` as the image of the generator of Z_N.
pub fn make_action(n: usize, perm: &[usize]) -> Result<MatterAction> {
    let group = CyclicGroup::new(n)?;
    let m = perm.len();
    if m == 0 {
        return Err(QdmError::InvalidPermutation { matter_dim: 0, detail: "matter set is empty".into() });
    }
    let mut seen = vec![false; m];
    for (i, &p) in perm.iter().enumerate() {
        if p >= m {
            return Err(QdmError::InvalidPermutation { matter_dim: m, detail: format!("entry {i} maps to {p}") });
        }
        if seen[p] {
            return Err(QdmError::InvalidPermutation { matter_dim: m, detail: format!("image {p} appears twice") });
        }
        seen[p] = true;
    }
    let mut powers = Vec::with_capacity(n);
    let mut current: Vec<usize> = (0..m).collect();
    for _ in 0..n {
        powers.push(current.clone());
        current = current.iter().map(|&x| perm[x]).collect();
    }
    if current.iter().enumerate().any(|(i, &x)| i != x) {
        return Err(QdmError::OrderViolation { order: n });
    }
    Ok(MatterAction { group, generator_map: perm.to_vec(), powers })
}

/// Theta(g) as a dense 0/1 matrix, entry (gamma, alpha) = [theta(g, alpha) == gamma].
pub fn theta_matrix(action: &MatterAction, g: usize) -> Vec<Vec<u8>> {
    let m = action.matter_dim();
    let mut out = vec![vec![0u8; m]; m];
    for alpha in 0..m {
        out[action.act(g, alpha)][alpha] = 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitDecomposition {
    pub orbits: Vec<Vec<usize>>,
    pub nontrivial_count: usize,
    pub fixed_count: usize,
    pub d_alg: usize,
}

impl OrbitDecomposition {
    /// Smallest label of each orbit, in orbit order.
    pub fn representatives(&self) -> Vec<usize> {
        self.orbits.iter().map(|o| o[0]).collect()
    }

    pub fn orbit_of(&self, alpha: usize) -> usize {
        self.orbits.iter().position(|o| o.contains(&alpha)).expect("orbits cover the matter set")
    }
}

/// Orbits ordered by their smallest element; each orbit is sorted.
pub fn orbit_decomposition(action: &MatterAction) -> OrbitDecomposition {
    let m = action.matter_dim();
    let mut assigned = vec![false; m];
    let mut orbits = Vec::new();
    for start in 0..m {
        if assigned[start] {
            continue;
        }
        let mut orbit = vec![start];
        assigned[start] = true;
        let mut x = action.act(1, start);
        while x != start {
            assigned[x] = true;
            orbit.push(x);
            x = action.act(1, x);
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    let fixed_count = orbits.iter().filter(|o| o.len() == 1).count();
    let nontrivial_count = orbits.len() - fixed_count;
    OrbitDecomposition { d_alg: orbits.len(), orbits, nontrivial_count, fixed_count }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpecialForm {
    pub flag: bool,
    pub k: usize,
    pub identity_dim: usize,
}

/// True when the action has both a nontrivial orbit and a fixed point.
pub fn is_special_form(action: &MatterAction) -> SpecialForm {
    let d = orbit_decomposition(action);
    SpecialForm {
        flag: d.nontrivial_count > 0 && d.fixed_count > 0,
        k: d.nontrivial_count,
        identity_dim: d.fixed_count,
    }
}

/// Every permutation of 0..m whose n-th power is the identity, in
/// lexicographic order.
pub fn all_actions(n: usize, m: usize) -> Vec<MatterAction> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..m).collect();
    loop {
        if let Ok(a) = make_action(n, &perm) {
            out.push(a);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Named actions used throughout the tests and sample configs.
pub mod fixtures {
    use super::{make_action, MatterAction};

    pub fn d2_z2() -> MatterAction {
        make_action(2, &[1, 0]).unwrap()
    }
    pub fn d3_z2() -> MatterAction {
        make_action(2, &[1, 0, 2]).unwrap()
    }
    /// Two swapped pairs: (0 1)(2 3).
    pub fn d4_z2_pairs() -> MatterAction {
        make_action(2, &[1, 0, 3, 2]).unwrap()
    }
    /// One swapped pair and two fixed points: (0 1).
    pub fn d4_z2_fixed() -> MatterAction {
        make_action(2, &[1, 0, 2, 3]).unwrap()
    }
    /// Trivial action on a single matter label.
    pub fn trivial_z2() -> MatterAction {
        make_action(2, &[0]).unwrap()
    }
    pub fn d3_z3() -> MatterAction {
        make_action(3, &[1, 2, 0]).unwrap()
    }

    /// The five actions of the algebra and degeneracy suites plus the trivial one.
    pub fn named() -> Vec<(&'static str, MatterAction)> {
        vec![
            ("D2(Z2)", d2_z2()),
            ("D3(Z2)", d3_z2()),
            ("D4(Z2)-I", d4_z2_pairs()),
            ("D4(Z2)-II", d4_z2_fixed()),
            ("D3(Z3)", d3_z3()),
            ("M1(Z2)", trivial_z2()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_three_cycle_for_z2() {
        assert_eq!(make_action(2, &[1, 2, 0]), Err(QdmError::OrderViolation { order: 2 }));
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(matches!(make_action(2, &[0, 0]), Err(QdmError::InvalidPermutation { .. })));
        assert!(matches!(make_action(2, &[0, 5]), Err(QdmError::InvalidPermutation { .. })));
    }

    #[test]
    fn theta_matrices_match_printed_forms() {
        assert_eq!(theta_matrix(&fixtures::d3_z2(), 1), vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]);
        assert_eq!(
            theta_matrix(&fixtures::d4_z2_pairs(), 1),
            vec![vec![0, 1, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 0, 1], vec![0, 0, 1, 0]]
        );
        let id = theta_matrix(&fixtures::d4_z2_fixed(), 0);
        for (i, row) in id.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                assert_eq!(x, u8::from(i == j));
            }
        }
    }

    #[test]
    fn orbit_counts() {
        let d = orbit_decomposition(&fixtures::d3_z2());
        assert_eq!(d.orbits, vec![vec![0, 1], vec![2]]);
        assert_eq!((d.nontrivial_count, d.fixed_count, d.d_alg), (1, 1, 2));
        let d = orbit_decomposition(&fixtures::d4_z2_fixed());
        assert_eq!(d.orbits, vec![vec![0, 1], vec![2], vec![3]]);
        assert_eq!(d.d_alg, 3);
        let id5 = make_action(2, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(orbit_decomposition(&id5).d_alg, 5);
    }

    #[test]
    fn special_form_examples() {
        let s = is_special_form(&fixtures::d3_z2());
        assert_eq!((s.flag, s.k, s.identity_dim), (true, 1, 1));
        let s = is_special_form(&fixtures::d4_z2_pairs());
        assert_eq!((s.flag, s.k, s.identity_dim), (false, 2, 0));
        let s = is_special_form(&fixtures::d4_z2_fixed());
        assert_eq!((s.flag, s.k, s.identity_dim), (true, 1, 2));
    }

    #[test]
    fn phases_are_roots_of_unity() {
        for n in 1..8 {
            let g = CyclicGroup::new(n).unwrap();
            let w = g.generator_phase().powu(n as u32);
            assert!((w - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn enumerates_z2_actions() {
        // involutions of 3 points: identity plus three transpositions
        assert_eq!(all_actions(2, 3).len(), 4);
        // involutions of 4 points: 1 + 6 + 3
        assert_eq!(all_actions(2, 4).len(), 10);
    }
}
