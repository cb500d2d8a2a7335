//! Lexicographic enumeration of the paths `1 → … → 2` of a fixed length,
//! streamed and split into rank ranges for parallel folding.

use std::ops::Range;

use rayon::prelude::*;

use super::path::{PathMonomial, Vertex};
use crate::error::{invalid, Error, Result};

/// Default ceiling on the number of paths any single enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u128 = 100_000_000;

const CHUNK: u128 = 1 << 12;

/// `n^{j-1}`, or `None` on overflow.
pub fn path_count(n: usize, j: usize) -> Option<u128> {
    (n as u128).checked_pow(u32::try_from(j.checked_sub(1)?).ok()?)
}

pub(crate) fn checked_count(n: usize, j: usize, cap: u128) -> Result<u128> {
    if n < 2 || n > Vertex::MAX as usize {
        return Err(invalid(format!("vertex count {n} out of range")));
    }
    if j == 0 {
        return Err(invalid("path length must be at least 1"));
    }
    let count = path_count(n, j).ok_or(Error::CapExceeded { requested: u128::MAX, cap })?;
    if count > cap {
        return Err(Error::CapExceeded { requested: count, cap });
    }
    Ok(count)
}

/// Streams all `n^{j-1}` paths of length `j` in lexicographic order.
pub fn enumerate_monomials(n: usize, j: usize, cap: u128) -> Result<Monomials> {
    let count = checked_count(n, j, cap)?;
    Ok(Monomials { cursor: Cursor::at_rank(n, j, 0), remaining: count })
}

pub struct Monomials {
    cursor: Cursor,
    remaining: u128,
}

impl Iterator for Monomials {
    type Item = PathMonomial;

    fn next(&mut self) -> Option<PathMonomial> {
        if self.remaining == 0 {
            return None;
        }
        let out = PathMonomial::from_parts_unchecked(self.cursor.n, self.cursor.vertices.clone());
        self.remaining -= 1;
        if self.remaining > 0 {
            self.cursor.advance();
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = usize::try_from(self.remaining).ok();
        (r.unwrap_or(usize::MAX), r)
    }
}

/// Odometer over interior vertices; the buffer is reused between steps.
struct Cursor {
    n: usize,
    vertices: Vec<Vertex>,
}

impl Cursor {
    fn at_rank(n: usize, j: usize, mut rank: u128) -> Self {
        let mut vertices = vec![1; j + 1];
        vertices[j] = 2;
        for slot in (1..j).rev() {
            vertices[slot] = (rank % n as u128) as Vertex + 1;
            rank /= n as u128;
        }
        Self { n, vertices }
    }

    fn advance(&mut self) {
        let last = self.vertices.len() - 1;
        for slot in (1..last).rev() {
            if (self.vertices[slot] as usize) < self.n {
                self.vertices[slot] += 1;
                return;
            }
            self.vertices[slot] = 1;
        }
    }
}

/// Visits the paths with ranks in `range`, passing each vertex sequence.
pub(crate) fn for_each_in_range(n: usize, j: usize, range: Range<u128>, mut f: impl FnMut(&[Vertex])) {
    if range.is_empty() {
        return;
    }
    let mut cursor = Cursor::at_rank(n, j, range.start);
    let mut left = range.end - range.start;
    loop {
        f(&cursor.vertices);
        left -= 1;
        if left == 0 {
            break;
        }
        cursor.advance();
    }
}

/// Parallel fold over all paths of length `j`, split into disjoint
/// lexicographic chunks whose partial results are merged with `merge`.
/// `merge` must be associative for the result to be deterministic.
pub(crate) fn par_fold<T, Init, Fold, Merge>(
    n: usize,
    j: usize,
    cap: u128,
    init: Init,
    fold: Fold,
    merge: Merge,
) -> Result<T>
where
    T: Send,
    Init: Fn() -> T + Sync + Send,
    Fold: Fn(&mut T, &[Vertex]) + Sync + Send,
    Merge: Fn(T, T) -> T + Sync + Send,
{
    let count = checked_count(n, j, cap)?;
    let chunks = count.div_ceil(CHUNK);
    let chunks = u64::try_from(chunks).map_err(|_| Error::CapExceeded { requested: count, cap })?;
    Ok((0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c as u128 * CHUNK;
            let end = (start + CHUNK).min(count);
            let mut acc = init();
            for_each_in_range(n, j, start..end, |v| fold(&mut acc, v));
            acc
        })
        .reduce(&init, &merge))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_order() {
        let single: Vec<_> = enumerate_monomials(2, 1, DEFAULT_ENUMERATION_CAP).unwrap().collect();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].vertices(), &[1, 2]);

        let nine: Vec<_> = enumerate_monomials(3, 3, DEFAULT_ENUMERATION_CAP).unwrap().collect();
        assert_eq!(nine.len(), 9);
        assert_eq!(nine[0].vertices(), &[1, 1, 1, 2]);
        assert_eq!(nine[1].vertices(), &[1, 1, 2, 2]);
        assert_eq!(nine[8].vertices(), &[1, 3, 3, 2]);
        for (r, m) in nine.iter().enumerate() {
            assert_eq!(m.rank(), r as u128);
        }
    }

    #[test]
    fn distinct_orderings_are_distinct_monomials() {
        let all: Vec<_> = enumerate_monomials(6, 5, DEFAULT_ENUMERATION_CAP).unwrap().collect();
        assert_eq!(all.len(), 6usize.pow(4));
        let has = |v: &[Vertex]| all.iter().any(|m| m.vertices() == v);
        assert!(has(&[1, 1, 4, 6, 1, 2]));
        assert!(has(&[1, 4, 6, 1, 1, 2]));
    }

    #[test]
    fn cap_guard() {
        assert!(matches!(enumerate_monomials(10, 10, 1000), Err(Error::CapExceeded { requested: 1_000_000_000, cap: 1000 })));
        assert!(enumerate_monomials(1, 3, 1000).is_err());
        assert!(enumerate_monomials(3, 0, 1000).is_err());
    }

    #[test]
    fn parallel_fold_matches_sequential() {
        let seq: u128 = enumerate_monomials(5, 7, DEFAULT_ENUMERATION_CAP).unwrap().map(|m| m.rank()).sum();
        let par = par_fold(
            5,
            7,
            DEFAULT_ENUMERATION_CAP,
            || 0u128,
            |acc, v| *acc += super::super::path::rank_of(5, v[1..v.len() - 1].iter().copied()),
            |a, b| a + b,
        )
        .unwrap();
        assert_eq!(seq, par);
        let count = 5u128.pow(6);
        assert_eq!(par, count * (count - 1) / 2);
    }
}
