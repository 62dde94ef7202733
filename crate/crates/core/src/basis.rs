//! Permutation-symmetric collective states of N three-level atoms.
//!
//! A symmetric state `|N, n, m⟩` has `n` atoms in the upper level `|1⟩`,
//! `m - n` in the middle level `|2⟩` and `N - m` in the ground level `|3⟩`.
//! The collective operators `S_αβ = Σ_j |α⟩_j⟨β|` act on these states with
//! single-target matrix elements, so every operator product can be applied
//! state by state without building matrices.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Bare atomic level of the ladder: `|1⟩` upper, `|2⟩` middle, `|3⟩` ground.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Upper,
    Middle,
    Ground,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Upper, Level::Middle, Level::Ground];

    pub fn from_label(label: u8) -> Result<Self> {
        match label {
            1 => Ok(Level::Upper),
            2 => Ok(Level::Middle),
            3 => Ok(Level::Ground),
            other => Err(Error::InvalidLevel(other)),
        }
    }

    pub fn label(self) -> u8 {
        match self {
            Level::Upper => 1,
            Level::Middle => 2,
            Level::Ground => 3,
        }
    }
}

/// Names the collective operator `S_αβ = |α⟩⟨β|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitionLabel {
    pub alpha: Level,
    pub beta: Level,
}

impl TransitionLabel {
    pub const S11: Self = Self::new(Level::Upper, Level::Upper);
    pub const S22: Self = Self::new(Level::Middle, Level::Middle);
    pub const S33: Self = Self::new(Level::Ground, Level::Ground);
    pub const S12: Self = Self::new(Level::Upper, Level::Middle);
    pub const S21: Self = Self::new(Level::Middle, Level::Upper);
    pub const S23: Self = Self::new(Level::Middle, Level::Ground);
    pub const S32: Self = Self::new(Level::Ground, Level::Middle);
    pub const S13: Self = Self::new(Level::Upper, Level::Ground);
    pub const S31: Self = Self::new(Level::Ground, Level::Upper);

    pub const fn new(alpha: Level, beta: Level) -> Self {
        Self { alpha, beta }
    }

    pub fn from_labels(alpha: u8, beta: u8) -> Result<Self> {
        Ok(Self::new(Level::from_label(alpha)?, Level::from_label(beta)?))
    }

    /// All nine operators, in label order 11, 12, 13, 21, ...
    pub fn all() -> impl Iterator<Item = Self> {
        Level::ALL
            .into_iter()
            .flat_map(|a| Level::ALL.into_iter().map(move |b| Self::new(a, b)))
    }

    pub fn is_population(self) -> bool {
        self.alpha == self.beta
    }

    /// `S_βα`, the Hermitian conjugate (all matrix elements are real).
    pub fn adjoint(self) -> Self {
        Self::new(self.beta, self.alpha)
    }
}

impl fmt::Display for TransitionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}{}", self.alpha.label(), self.beta.label())
    }
}

impl FromStr for TransitionLabel {
    type Err = Error;

    /// Accepts `"21"` or `"S21"`.
    fn from_str(s: &str) -> Result<Self> {
        let digits = s.trim().trim_start_matches(['S', 's']);
        let bytes = digits.as_bytes();
        if bytes.len() != 2 || !bytes.iter().all(u8::is_ascii_digit) {
            return Err(Error::Domain(format!("cannot parse operator label {s:?}")));
        }
        Self::from_labels(bytes[0] - b'0', bytes[1] - b'0')
    }
}

/// A symmetric collective state `|N, n, m⟩` with `0 ≤ n ≤ m ≤ N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex {
    n_atoms: usize,
    n: usize,
    m: usize,
}

impl BasisIndex {
    pub fn new(n: usize, m: usize, n_atoms: usize) -> Result<Self> {
        if n_atoms < 1 {
            return Err(Error::Domain("ensemble needs at least one atom".into()));
        }
        if n > m || m > n_atoms {
            return Err(Error::Domain(format!(
                "state (n={n}, m={m}) violates 0 <= n <= m <= N={n_atoms}"
            )));
        }
        Ok(Self { n_atoms, n, m })
    }

    pub fn n_atoms(self) -> usize {
        self.n_atoms
    }

    /// Atoms in the upper level.
    pub fn n(self) -> usize {
        self.n
    }

    pub fn m(self) -> usize {
        self.m
    }

    pub fn count(self, level: Level) -> usize {
        match level {
            Level::Upper => self.n,
            Level::Middle => self.m - self.n,
            Level::Ground => self.n_atoms - self.m,
        }
    }

    /// Eigenvalue of the inversion `S_z = S11 - S33`.
    pub fn inversion(self) -> i64 {
        self.n as i64 - (self.n_atoms - self.m) as i64
    }

    fn with_counts(self, upper: usize, middle: usize) -> Self {
        Self {
            n_atoms: self.n_atoms,
            n: upper,
            m: upper + middle,
        }
    }
}

/// Result of applying one collective operator to one basis state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorAction {
    Mapped { coefficient: f64, target: BasisIndex },
    Annihilated,
}

impl OperatorAction {
    pub fn coefficient(self) -> f64 {
        match self {
            OperatorAction::Mapped { coefficient, .. } => coefficient,
            OperatorAction::Annihilated => 0.0,
        }
    }

    pub fn target(self) -> Option<BasisIndex> {
        match self {
            OperatorAction::Mapped { target, .. } => Some(target),
            OperatorAction::Annihilated => None,
        }
    }

    fn scaled(self, factor: f64) -> Self {
        match self {
            OperatorAction::Mapped { coefficient, target } if factor * coefficient != 0.0 => {
                OperatorAction::Mapped {
                    coefficient: factor * coefficient,
                    target,
                }
            }
            _ => OperatorAction::Annihilated,
        }
    }
}

/// Moves one atom from `from` to `to` (`from != to`), with the bosonic
/// symmetric-state amplitude `sqrt(n_from (n_to + 1))`.
fn single_jump(s: BasisIndex, to: Level, from: Level) -> OperatorAction {
    let mut counts = [s.count(Level::Upper), s.count(Level::Middle), s.count(Level::Ground)];
    let (fi, ti) = (from.label() as usize - 1, to.label() as usize - 1);
    if counts[fi] == 0 {
        return OperatorAction::Annihilated;
    }
    let amplitude = ((counts[fi] * (counts[ti] + 1)) as f64).sqrt();
    counts[fi] -= 1;
    counts[ti] += 1;
    OperatorAction::Mapped {
        coefficient: amplitude,
        target: s.with_counts(counts[0], counts[1]),
    }
}

fn chain(op_left: TransitionLabel, op_right: TransitionLabel, s: BasisIndex) -> OperatorAction {
    match apply_operator(op_right, s) {
        OperatorAction::Mapped { coefficient, target } => {
            apply_operator(op_left, target).scaled(coefficient)
        }
        OperatorAction::Annihilated => OperatorAction::Annihilated,
    }
}

/// Applies `S_αβ` to a symmetric state.
///
/// Population operators return their eigenvalue. `S21`, `S32` and their
/// conjugates are the one-step ladder operators. `S31` and `S13` are composed
/// from the two ladder steps as `S31 = [S32, S21]` and `S13 = [S12, S23]`;
/// both chained products land on the same target, so the result is again a
/// single mapped state.
pub fn apply_operator(op: TransitionLabel, s: BasisIndex) -> OperatorAction {
    use TransitionLabel as T;
    if op.is_population() {
        return match s.count(op.alpha) {
            0 => OperatorAction::Annihilated,
            k => OperatorAction::Mapped {
                coefficient: k as f64,
                target: s,
            },
        };
    }
    match op {
        T::S31 | T::S13 => {
            let (outer, inner) = if op == T::S31 {
                (T::S32, T::S21)
            } else {
                (T::S12, T::S23)
            };
            let forward = chain(outer, inner, s);
            let backward = chain(inner, outer, s);
            let target = forward.target().or(backward.target());
            match target {
                Some(target) => {
                    let c = forward.coefficient() - backward.coefficient();
                    OperatorAction::Mapped {
                        coefficient: c,
                        target,
                    }
                    .scaled(1.0)
                }
                None => OperatorAction::Annihilated,
            }
        }
        _ => single_jump(s, op.alpha, op.beta),
    }
}

/// Ordered enumeration of all symmetric states for fixed N.
///
/// States are ordered lexicographically in `(m, n)`, so the flat index of
/// `(n, m)` is `m (m + 1) / 2 + n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisMap {
    n_atoms: usize,
    states: Vec<BasisIndex>,
}

/// Cardinality `(N+1)(N+2)/2` of the symmetric subspace.
pub fn basis_dimension(n_atoms: usize) -> usize {
    (n_atoms + 1) * (n_atoms + 2) / 2
}

pub fn enumerate_basis(n_atoms: usize) -> Result<BasisMap> {
    if n_atoms < 1 {
        return Err(Error::Domain("ensemble needs at least one atom".into()));
    }
    let states = (0..=n_atoms)
        .flat_map(|m| (0..=m).map(move |n| BasisIndex { n_atoms, n, m }))
        .collect();
    Ok(BasisMap { n_atoms, states })
}

impl BasisMap {
    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[BasisIndex] {
        &self.states
    }

    pub fn state_of(&self, k: usize) -> Option<BasisIndex> {
        self.states.get(k).copied()
    }

    pub fn index_of(&self, s: BasisIndex) -> Option<usize> {
        (s.n_atoms == self.n_atoms).then(|| s.m * (s.m + 1) / 2 + s.n)
    }

    /// Dense real matrix of `S_αβ` in this basis.
    pub fn operator_matrix(&self, op: TransitionLabel) -> DMatrix<f64> {
        let d = self.len();
        let mut mat = DMatrix::zeros(d, d);
        for (col, &s) in self.states.iter().enumerate() {
            if let OperatorAction::Mapped { coefficient, target } = apply_operator(op, s) {
                let row = self.index_of(target).expect("target lies in the same basis");
                mat[(row, col)] = coefficient;
            }
        }
        mat
    }

    /// `Σ_k w_k ⟨k| O_1 O_2 ... O_r |k⟩` for diagonal weights `w` (operators act
    /// right to left).
    pub fn expectation_normal_product(&self, ops: &[TransitionLabel], weights: &[f64]) -> Result<f64> {
        if weights.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: weights.len(),
            });
        }
        let total = self
            .states
            .iter()
            .zip(weights)
            .filter(|(_, &w)| w != 0.0)
            .map(|(&s, &w)| w * diagonal_element(ops, s))
            .sum();
        Ok(total)
    }
}

/// `⟨s| O_1 ... O_r |s⟩`.
pub fn diagonal_element(ops: &[TransitionLabel], s: BasisIndex) -> f64 {
    let mut state = s;
    let mut amplitude = 1.0;
    for &op in ops.iter().rev() {
        match apply_operator(op, state) {
            OperatorAction::Mapped { coefficient, target } => {
                amplitude *= coefficient;
                state = target;
            }
            OperatorAction::Annihilated => return 0.0,
        }
    }
    if state == s {
        amplitude
    } else {
        0.0
    }
}
