//! Path monomials: an ordered product `a_{i0,i1} a_{i1,i2} … a_{i(j-1),ij}`
//! kept as its vertex sequence, with `i0 = 1` and `ij = 2`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

pub type Vertex = u16;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathMonomial {
    n: usize,
    vertices: Vec<Vertex>,
}

/// A simple cycle `vertices[start] → … → vertices[start + length]`
/// with matching ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleLocation {
    pub start: usize,
    pub length: usize,
}

impl PathMonomial {
    /// Validates a 1-based vertex sequence from vertex 1 to vertex 2.
    pub fn new(n: usize, vertices: Vec<Vertex>) -> Result<Self> {
        if n < 2 || n > Vertex::MAX as usize {
            return Err(invalid(format!("vertex count {n} out of range")));
        }
        if vertices.len() < 2 {
            return Err(invalid("a path needs at least one edge"));
        }
        if vertices[0] != 1 || *vertices.last().unwrap() != 2 {
            return Err(invalid("paths run from vertex 1 to vertex 2"));
        }
        if let Some(&v) = vertices.iter().find(|&&v| v == 0 || v as usize > n) {
            return Err(invalid(format!("vertex {v} outside 1..={n}")));
        }
        Ok(Self { n, vertices })
    }

    pub(crate) fn from_parts_unchecked(n: usize, vertices: Vec<Vertex>) -> Self {
        Self { n, vertices }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Number of edges (factors).
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `Π_t A[i_{t-1}, i_t]`.
    pub fn value<S: Scalar>(&self, a: &DenseMatrix<S>) -> S {
        segment_value(&self.vertices, a)
    }

    /// Position in the lexicographic enumeration of all paths with this
    /// length; interior vertices are the base-`n` digits.
    pub fn rank(&self) -> u128 {
        rank_of(self.n, self.vertices[1..self.vertices.len() - 1].iter().copied())
    }

    pub fn min_cycle_length(&self) -> Result<usize> {
        min_cycle_length(&self.vertices, self.n).ok_or(Error::NoCycle)
    }

    /// The leftmost cycle of length `k`, where `k` must be the minimal
    /// cycle length of the path.
    pub fn first_cycle(&self, k: usize) -> Result<CycleLocation> {
        let expected = self.min_cycle_length()?;
        if k != expected {
            return Err(Error::WrongCycleLength { got: k, expected });
        }
        Ok(first_cycle_of_length(&self.vertices, k))
    }

    fn check_cycle(&self, cyc: CycleLocation) -> Result<()> {
        let ok = cyc.length >= 1
            && cyc.start + cyc.length < self.vertices.len()
            && self.min_cycle_length().ok() == Some(cyc.length)
            && first_cycle_of_length(&self.vertices, cyc.length) == cyc;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidCycle { start: cyc.start, length: cyc.length })
        }
    }

    /// Duplicates the cycle segment in place.
    pub fn phi(&self, cyc: CycleLocation) -> Result<Self> {
        self.check_cycle(cyc)?;
        Ok(Self { n: self.n, vertices: phi_vertices(&self.vertices, cyc).collect() })
    }

    /// Deletes the cycle segment.
    pub fn psi(&self, cyc: CycleLocation) -> Result<Self> {
        self.check_cycle(cyc)?;
        Ok(Self { n: self.n, vertices: psi_vertices(&self.vertices, cyc).collect() })
    }

    /// Splits the factors into `(u, z, v)`: before, on and after the cycle.
    pub fn split_at_cycle(&self, cyc: CycleLocation) -> (&[Vertex], &[Vertex], &[Vertex]) {
        let v = &self.vertices;
        (&v[..=cyc.start], &v[cyc.start..=cyc.start + cyc.length], &v[cyc.start + cyc.length..])
    }

    /// How many times the cycle segment occurs back to back starting at `cyc.start`.
    pub fn consecutive_repeats(&self, cyc: CycleLocation) -> usize {
        let v = &self.vertices;
        if cyc.length == 0 || cyc.start + cyc.length > v.len() {
            return 0;
        }
        let seg = &v[cyc.start..cyc.start + cyc.length];
        let mut q = 0;
        let mut at = cyc.start;
        while at + cyc.length < v.len() && v[at..at + cyc.length] == *seg && v[at + cyc.length] == seg[0] {
            q += 1;
            at += cyc.length;
        }
        q
    }
}

impl fmt::Display for PathMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("→"))
    }
}

pub(crate) fn segment_value<S: Scalar>(vertices: &[Vertex], a: &DenseMatrix<S>) -> S {
    vertices
        .windows(2)
        .fold(S::one(), |acc, e| acc * a.get(e[0] as usize - 1, e[1] as usize - 1).clone())
}

pub(crate) fn rank_of(n: usize, interior: impl Iterator<Item = Vertex>) -> u128 {
    interior.fold(0u128, |acc, v| acc * n as u128 + (v as u128 - 1))
}

/// Minimal `q - p` over repeats `vertices[p] = vertices[q]`. Only
/// consecutive occurrences of a vertex can realize the minimum.
pub(crate) fn min_cycle_length(vertices: &[Vertex], n: usize) -> Option<usize> {
    let mut last = vec![usize::MAX; n + 1];
    let mut best: Option<usize> = None;
    for (pos, &v) in vertices.iter().enumerate() {
        let prev = last[v as usize];
        if prev != usize::MAX {
            let gap = pos - prev;
            best = Some(best.map_or(gap, |b| b.min(gap)));
        }
        last[v as usize] = pos;
    }
    best
}

/// Smallest `p` with `vertices[p] = vertices[p + k]`. The caller guarantees
/// `k` is the minimal cycle length, so the segment is a simple cycle.
pub(crate) fn first_cycle_of_length(vertices: &[Vertex], k: usize) -> CycleLocation {
    let start = (0..vertices.len() - k)
        .find(|&p| vertices[p] == vertices[p + k])
        .expect("a cycle of the minimal length exists");
    debug_assert!(
        {
            let seg = &vertices[start..start + k];
            (0..k).all(|i| (i + 1..k).all(|j| seg[i] != seg[j]))
        },
        "first minimal cycle must be simple"
    );
    CycleLocation { start, length: k }
}

pub(crate) fn phi_vertices(v: &[Vertex], cyc: CycleLocation) -> impl Iterator<Item = Vertex> + '_ {
    v[..cyc.start + cyc.length].iter().chain(&v[cyc.start..]).copied()
}

pub(crate) fn psi_vertices(v: &[Vertex], cyc: CycleLocation) -> impl Iterator<Item = Vertex> + '_ {
    v[..cyc.start].iter().chain(&v[cyc.start + cyc.length..]).copied()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    /// The worked n = 12 example.
    fn example() -> PathMonomial {
        PathMonomial::new(12, vec![1, 3, 5, 7, 3, 10, 6, 4, 12, 10, 7, 5, 2]).unwrap()
    }

    fn brute_min_cycle(v: &[Vertex]) -> Option<usize> {
        let mut best = None;
        for p in 0..v.len() {
            for q in p + 1..v.len() {
                if v[p] == v[q] {
                    best = Some(best.map_or(q - p, |b: usize| b.min(q - p)));
                }
            }
        }
        best
    }

    #[test]
    fn worked_example() {
        let m = example();
        assert_eq!(m.min_cycle_length().unwrap(), 3);
        let cyc = m.first_cycle(3).unwrap();
        assert_eq!(cyc, CycleLocation { start: 1, length: 3 });
        assert_eq!(m.phi(cyc).unwrap().vertices(), &[1, 3, 5, 7, 3, 5, 7, 3, 10, 6, 4, 12, 10, 7, 5, 2]);
        assert_eq!(m.psi(cyc).unwrap().vertices(), &[1, 3, 10, 6, 4, 12, 10, 7, 5, 2]);
    }

    #[test]
    fn small_cases() {
        let loop_first = PathMonomial::new(3, vec![1, 1, 2]).unwrap();
        assert_eq!(loop_first.min_cycle_length().unwrap(), 1);
        let c = loop_first.first_cycle(1).unwrap();
        assert_eq!(c, CycleLocation { start: 0, length: 1 });
        assert_eq!(loop_first.phi(c).unwrap().vertices(), &[1, 1, 1, 2]);
        assert_eq!(loop_first.psi(c).unwrap().vertices(), &[1, 2]);

        let two = PathMonomial::new(3, vec![1, 2, 1, 2]).unwrap();
        assert_eq!(two.min_cycle_length().unwrap(), 2);
        let c = two.first_cycle(2).unwrap();
        assert_eq!(c, CycleLocation { start: 0, length: 2 });
        assert_eq!(two.phi(c).unwrap().vertices(), &[1, 2, 1, 2, 1, 2]);
        assert_eq!(two.psi(c).unwrap().vertices(), &[1, 2]);
    }

    #[test]
    fn errors() {
        let simple = PathMonomial::new(4, vec![1, 3, 2]).unwrap();
        assert_eq!(simple.min_cycle_length(), Err(Error::NoCycle));
        let two = PathMonomial::new(3, vec![1, 2, 1, 2]).unwrap();
        assert_eq!(two.first_cycle(1), Err(Error::WrongCycleLength { got: 1, expected: 2 }));
        assert!(two.phi(CycleLocation { start: 1, length: 2 }).is_err());
        assert!(PathMonomial::new(3, vec![2, 1]).is_err());
        assert!(PathMonomial::new(3, vec![1, 4, 2]).is_err());
        assert!(PathMonomial::new(3, vec![1]).is_err());
    }

    #[test]
    fn linear_scan_matches_pairwise_scan() {
        let cases: &[&[Vertex]] = &[&[1, 2, 3, 2], &[1, 3, 1, 2], &[1, 2, 2], &[1, 3, 4, 1, 3, 2], &[1, 3, 2]];
        for v in cases {
            assert_eq!(min_cycle_length(v, 4), brute_min_cycle(v), "{v:?}");
        }
    }

    #[test]
    fn consecutive_repeat_bookkeeping() {
        // Cycle 3→4→3 twice in a row, then on to 2.
        let m = PathMonomial::new(4, vec![1, 3, 4, 3, 4, 3, 2]).unwrap();
        let cyc = m.first_cycle(2).unwrap();
        assert_eq!(m.consecutive_repeats(cyc), 2);
        let phi = m.phi(cyc).unwrap();
        let psi = m.psi(cyc).unwrap();
        assert_eq!(phi.consecutive_repeats(cyc), 3);
        assert_eq!(psi.consecutive_repeats(cyc), 1);
    }

    #[test]
    fn value_and_rank() {
        let a = DenseMatrix::from_fn(3, |i, j| Rational::from_int((1 + i * 3 + j) as i64)).unwrap();
        let m = PathMonomial::new(3, vec![1, 3, 2]).unwrap();
        assert_eq!(m.value(&a), Rational::from_int(3 * 8));
        assert_eq!(m.rank(), 2);
        assert_eq!(PathMonomial::new(3, vec![1, 2, 1, 2]).unwrap().rank(), 3);
    }
}
