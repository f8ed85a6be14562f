//! Elements of the symmetric group `S_n`.

use std::fmt;

use crate::error::{Error, Result};

/// A permutation of `0..n`, stored as the image of each point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    mapping: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm { mapping: (0..n).collect() }
    }

    pub fn from_mapping(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &m in &mapping {
            if m >= n || seen[m] {
                return Err(Error::InvalidPerm(format!("{mapping:?} is not a bijection on 0..{n}")));
            }
            seen[m] = true;
        }
        Ok(Perm { mapping })
    }

    /// Build from cycles written with 1-based points, e.g. `&[&[1, 4, 2, 3]]`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut mapping: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        for cyc in cycles {
            for (k, &p) in cyc.iter().enumerate() {
                if p == 0 || p > n || used[p - 1] {
                    return Err(Error::InvalidPerm(format!("bad cycle {cyc:?} for n = {n}")));
                }
                used[p - 1] = true;
                let next = cyc[(k + 1) % cyc.len()];
                mapping[p - 1] = next - 1;
            }
        }
        Ok(Perm { mapping })
    }

    /// Parse cycle notation such as `"(1423)"`, `"(14)(23)"` or `"e"`.
    ///
    /// Points are single digits `1..=9` unless separated by spaces or commas
    /// inside a cycle, e.g. `"(1 10 3)"`.
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "e" || s == "()" {
            return Ok(Self::identity(n));
        }
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = s;
        while let Some(open) = rest.find('(') {
            let close = rest[open..]
                .find(')')
                .ok_or_else(|| Error::InvalidPerm(format!("unbalanced cycle in {s:?}")))?
                + open;
            let body = &rest[open + 1..close];
            let pts: Vec<usize> = if body.contains([' ', ',']) {
                body.split([' ', ','])
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::InvalidPerm(format!("{s:?}: {e}")))?
            } else {
                body.chars()
                    .map(|c| c.to_digit(10).map(|d| d as usize))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::InvalidPerm(format!("non-digit in {s:?}")))?
            };
            cycles.push(pts);
            rest = &rest[close + 1..];
        }
        let refs: Vec<&[usize]> = cycles.iter().map(|c| c.as_slice()).collect();
        Self::from_cycles(n, &refs)
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut mapping: Vec<usize> = (0..n).collect();
        mapping.swap(a, b);
        Perm { mapping }
    }

    pub fn n(&self) -> usize {
        self.mapping.len()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i]
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.n(), other.n(), "composing permutations of different order");
        Perm { mapping: other.mapping.iter().map(|&i| self.mapping[i]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.n()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m] = i;
        }
        Perm { mapping: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &m)| i == m)
    }

    /// Disjoint cycles including fixed points, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut j = self.mapping[start];
            while j != start {
                seen[j] = true;
                cyc.push(j);
                j = self.mapping[j];
            }
            out.push(cyc);
        }
        out
    }

    /// Number of cycles `ℓ(π)`, fixed points included.
    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }

    /// Cycle lengths in non-increasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(|c| c.len()).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// All elements of `S_n` in lexicographic order of their mappings.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            out.push(Perm { mapping: current.clone() });
            if !next_permutation(&mut current) {
                break;
            }
        }
        out
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl fmt::Display for Perm {
    /// Cycle notation with 1-based points, fixed points omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<Vec<usize>> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "e");
        }
        let wide = self.n() > 9;
        for c in cycles {
            let pts: Vec<String> = c.iter().map(|p| (p + 1).to_string()).collect();
            write!(f, "({})", pts.join(if wide { " " } else { "" }))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["e", "(12)", "(1423)", "(14)(23)", "(123)"] {
            let p = Perm::parse(4, s).unwrap();
            assert_eq!(p.to_string(), s);
        }
        let wide = Perm::parse(10, "(1 10 3)").unwrap();
        assert_eq!(wide.apply(0), 9);
        assert_eq!(wide.to_string(), "(1 10 3)");
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Perm::from_mapping(vec![0, 0, 1]).is_err());
        assert!(Perm::from_mapping(vec![0, 3]).is_err());
        assert!(Perm::parse(3, "(14)").is_err());
        assert!(Perm::parse(3, "(12)(23)").is_err());
    }

    #[test]
    fn symmetric_group_sizes() {
        assert_eq!(Perm::all(1).len(), 1);
        assert_eq!(Perm::all(3).len(), 6);
        assert_eq!(Perm::all(4).len(), 24);
    }

    #[test]
    fn conjugation_by_transposition_relabels() {
        // (23)(1432)(23) = (1423)
        let s = Perm::parse(4, "(23)").unwrap();
        let c = Perm::parse(4, "(1432)").unwrap();
        assert_eq!(s.compose(&c).compose(&s), Perm::parse(4, "(1423)").unwrap());
    }

    fn arb_perm() -> impl Strategy<Value = Perm> {
        (1usize..8).prop_flat_map(|n| {
            Just((0..n).collect::<Vec<_>>()).prop_shuffle().prop_map(|m| Perm::from_mapping(m).unwrap())
        })
    }

    proptest! {
        #[test]
        fn inverse_composes_to_identity(p in arb_perm()) {
            prop_assert!(p.compose(&p.inverse()).is_identity());
            prop_assert!(p.inverse().compose(&p).is_identity());
        }

        #[test]
        fn cycle_lengths_sum_to_n(p in arb_perm()) {
            prop_assert_eq!(p.cycle_type().iter().sum::<usize>(), p.n());
        }
    }
}
