use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One tensor factor of the composite space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subsystem {
    Qubit,
    Cavity,
    Mech,
}

/// Truncated composite space, ordered qubit ⊗ cavity ⊗ mechanical.
///
/// The qubit factor is omitted when `has_qubit` is false. Cavity levels run
/// over `|0⟩..|n_cavity − 1⟩`, mechanical levels over `|0⟩..|n_mech − 1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertSpace {
    has_qubit: bool,
    n_cavity: usize,
    n_mech: usize,
}

impl HilbertSpace {
    pub fn new(has_qubit: bool, n_cavity: usize, n_mech: usize) -> Result<Self> {
        if n_cavity < 2 {
            return Err(Error::InvalidSpace(format!("n_cavity = {n_cavity} < 2")));
        }
        if n_mech < 2 {
            return Err(Error::InvalidSpace(format!("n_mech = {n_mech} < 2")));
        }
        Ok(HilbertSpace { has_qubit, n_cavity, n_mech })
    }

    /// Cavity ⊗ mechanical, no qubit.
    pub fn optomechanical(n_cavity: usize, n_mech: usize) -> Result<Self> {
        Self::new(false, n_cavity, n_mech)
    }

    /// Qubit ⊗ cavity ⊗ mechanical.
    pub fn hybrid(n_cavity: usize, n_mech: usize) -> Result<Self> {
        Self::new(true, n_cavity, n_mech)
    }

    pub fn has_qubit(&self) -> bool {
        self.has_qubit
    }

    pub fn n_cavity(&self) -> usize {
        self.n_cavity
    }

    pub fn n_mech(&self) -> usize {
        self.n_mech
    }

    pub fn n_qubit(&self) -> usize {
        if self.has_qubit {
            2
        } else {
            1
        }
    }

    pub fn dim(&self) -> usize {
        self.n_qubit() * self.n_cavity * self.n_mech
    }

    /// Factor dimensions in tensor order, qubit first when present.
    pub fn dims(&self) -> Vec<usize> {
        if self.has_qubit {
            vec![2, self.n_cavity, self.n_mech]
        } else {
            vec![self.n_cavity, self.n_mech]
        }
    }

    pub fn factor_dim(&self, which: Subsystem) -> Result<usize> {
        match which {
            Subsystem::Qubit if !self.has_qubit => Err(Error::NoQubit),
            Subsystem::Qubit => Ok(2),
            Subsystem::Cavity => Ok(self.n_cavity),
            Subsystem::Mech => Ok(self.n_mech),
        }
    }

    /// The same factors with extra levels appended at the top of the
    /// cavity and mechanical ladders.
    pub fn with_headroom(&self, extra_cavity: usize, extra_mech: usize) -> Self {
        HilbertSpace {
            has_qubit: self.has_qubit,
            n_cavity: self.n_cavity + extra_cavity,
            n_mech: self.n_mech + extra_mech,
        }
    }

    /// True when `other` fits inside `self` as the low-excitation corner.
    pub fn contains(&self, other: &HilbertSpace) -> bool {
        self.has_qubit == other.has_qubit && other.n_cavity <= self.n_cavity && other.n_mech <= self.n_mech
    }

    /// Flat index of `|q⟩ ⊗ |c⟩ ⊗ |m⟩`. `q` is ignored without a qubit.
    pub fn index(&self, q: usize, c: usize, m: usize) -> usize {
        let q = if self.has_qubit { q } else { 0 };
        (q * self.n_cavity + c) * self.n_mech + m
    }

    /// Inverse of [`HilbertSpace::index`].
    pub fn decompose(&self, idx: usize) -> (usize, usize, usize) {
        let m = idx % self.n_mech;
        let rest = idx / self.n_mech;
        (rest / self.n_cavity, rest % self.n_cavity, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_counts_all_factors() {
        assert_eq!(HilbertSpace::hybrid(8, 24).unwrap().dim(), 384);
        assert_eq!(HilbertSpace::optomechanical(8, 24).unwrap().dim(), 192);
    }

    #[test]
    fn rejects_tiny_factors() {
        assert!(HilbertSpace::optomechanical(1, 24).is_err());
        assert!(HilbertSpace::optomechanical(8, 1).is_err());
    }

    #[test]
    fn index_round_trips() {
        let s = HilbertSpace::hybrid(3, 5).unwrap();
        for idx in 0..s.dim() {
            let (q, c, m) = s.decompose(idx);
            assert_eq!(s.index(q, c, m), idx);
        }
    }
}
