use serde::{Deserialize, Serialize};

use crate::perm::Perm;

/// Irreducible representations of `S₄`, labelled by their Young diagrams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Irrep {
    /// `[4]`, the trivial representation.
    Trivial,
    /// `[3,1]`, the standard representation.
    Standard,
    /// `[2,2]`.
    TwoTwo,
    /// `[2,1,1]`, standard times sign.
    StandardSign,
    /// `[1,1,1,1]`, the sign representation.
    Sign,
}

impl Irrep {
    pub const ALL: [Irrep; 5] = [Irrep::Trivial, Irrep::Standard, Irrep::TwoTwo, Irrep::StandardSign, Irrep::Sign];

    pub fn dim(self) -> usize {
        self.character_by_class()[0] as usize
    }

    pub fn young(self) -> &'static str {
        match self {
            Irrep::Trivial => "[4]",
            Irrep::Standard => "[3,1]",
            Irrep::TwoTwo => "[2,2]",
            Irrep::StandardSign => "[2,1,1]",
            Irrep::Sign => "[1,1,1,1]",
        }
    }

    /// Characters on the classes `e, (12), (12)(34), (123), (1234)`.
    fn character_by_class(self) -> [i64; 5] {
        match self {
            Irrep::Trivial => [1, 1, 1, 1, 1],
            Irrep::Standard => [3, 1, -1, 0, -1],
            Irrep::TwoTwo => [2, 0, 2, -1, 0],
            Irrep::StandardSign => [3, -1, -1, 0, 1],
            Irrep::Sign => [1, -1, 1, 1, -1],
        }
    }

    pub fn character(self, p: &Perm) -> i64 {
        self.character_by_class()[class_index(p)]
    }
}

fn class_index(p: &Perm) -> usize {
    assert_eq!(p.n(), 4, "S4 characters need a permutation of 4 points");
    match p.cycle_type().as_slice() {
        [1, 1, 1, 1] => 0,
        [2, 1, 1] => 1,
        [2, 2] => 2,
        [3, 1] => 3,
        _ => 4,
    }
}

/// Character table of `S₄` over all 24 elements in `Perm::all(4)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct IrrepTable {
    pub perms: Vec<Perm>,
    pub characters: Vec<(Irrep, Vec<i64>)>,
}

impl IrrepTable {
    pub fn new() -> Self {
        let perms = Perm::all(4);
        let characters = Irrep::ALL
            .iter()
            .map(|&irrep| (irrep, perms.iter().map(|p| irrep.character(p)).collect()))
            .collect();
        IrrepTable { perms, characters }
    }

    /// `Σ_λ d_λ² = 24` and `Σ_π χ^λ(π) χ^μ(π) = 24 δ_{λμ}`, in integer arithmetic.
    pub fn check_orthogonality(&self) -> bool {
        let dims: i64 = Irrep::ALL.iter().map(|l| (l.dim() * l.dim()) as i64).sum();
        let rows = self.characters.iter().enumerate().all(|(i, (_, a))| {
            self.characters.iter().enumerate().all(|(j, (_, b))| {
                let dot: i64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                dot == if i == j { 24 } else { 0 }
            })
        });
        dims == 24 && rows
    }
}

impl Default for IrrepTable {
    fn default() -> Self {
        Self::new()
    }
}
