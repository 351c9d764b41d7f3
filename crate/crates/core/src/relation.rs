//! Finite binary relations over event identifiers `0..size`, stored as one
//! 64-bit row per element. Universes are capped at 64 elements, which the
//! program size limits guarantee.

use std::fmt;

use crate::error::RelationError;

pub const MAX_UNIVERSE: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    size: usize,
    rows: Vec<u64>,
}

#[inline]
fn bit(i: usize) -> u64 {
    1u64 << i
}

impl Relation {
    pub fn empty(size: usize) -> Result<Relation, RelationError> {
        if size > MAX_UNIVERSE {
            return Err(RelationError::TooLarge(size));
        }
        Ok(Relation {
            size,
            rows: vec![0; size],
        })
    }

    pub fn from_pairs(
        size: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Relation, RelationError> {
        let mut r = Relation::empty(size)?;
        for (a, b) in pairs {
            r.try_insert(a, b)?;
        }
        Ok(r)
    }

    /// All pairs `(order[i], order[j])` with `i < j`.
    pub fn from_total_order(size: usize, order: &[usize]) -> Result<Relation, RelationError> {
        let mut r = Relation::empty(size)?;
        for (i, &a) in order.iter().enumerate() {
            for &b in &order[i + 1..] {
                r.try_insert(a, b)?;
            }
        }
        Ok(r)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn try_insert(&mut self, a: usize, b: usize) -> Result<(), RelationError> {
        for x in [a, b] {
            if x >= self.size {
                return Err(RelationError::OutOfRange(x));
            }
        }
        self.rows[a] |= bit(b);
        Ok(())
    }

    /// Panics if either element lies outside the universe.
    pub fn insert(&mut self, a: usize, b: usize) {
        self.try_insert(a, b)
            .unwrap_or_else(|e| panic!("Relation::insert({a}, {b}): {e}"));
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        a < self.size && b < self.size && self.rows[a] & bit(b) != 0
    }

    /// Successors of `a` as a bit mask.
    pub fn row(&self, a: usize) -> u64 {
        self.rows[a]
    }

    pub fn successors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        bits(self.rows[a])
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.size).flat_map(move |a| bits(self.rows[a]).map(move |b| (a, b)))
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.size == other.size && self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }

    /// Smallest transitive superset (Warshall over bit rows).
    pub fn transitive_closure(&self) -> Relation {
        let mut rows = self.rows.clone();
        for k in 0..self.size {
            let via = rows[k];
            for row in rows.iter_mut() {
                if *row & bit(k) != 0 {
                    *row |= via;
                }
            }
        }
        Relation {
            size: self.size,
            rows,
        }
    }

    /// True iff the transitive closure has no `(a, a)` pair.
    pub fn is_irreflexive_and_acyclic(&self) -> bool {
        let tc = self.transitive_closure();
        (0..self.size).all(|a| tc.rows[a] & bit(a) == 0)
    }

    fn same_universe(&self, other: &Relation) -> Result<(), RelationError> {
        if self.size != other.size {
            return Err(RelationError::UniverseMismatch(self.size, other.size));
        }
        Ok(())
    }

    /// `{(a, c) | (a, b) ∈ self, (b, c) ∈ other}`
    pub fn compose(&self, other: &Relation) -> Result<Relation, RelationError> {
        self.same_universe(other)?;
        let rows = self
            .rows
            .iter()
            .map(|&row| bits(row).fold(0, |acc, b| acc | other.rows[b]))
            .collect();
        Ok(Relation {
            size: self.size,
            rows,
        })
    }

    pub fn union(&self, other: &Relation) -> Result<Relation, RelationError> {
        self.same_universe(other)?;
        Ok(Relation {
            size: self.size,
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a | b).collect(),
        })
    }

    pub fn union_with(&mut self, other: &Relation) -> Result<(), RelationError> {
        self.same_universe(other)?;
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            *a |= b;
        }
        Ok(())
    }

    /// Keeps pairs whose endpoints both satisfy `keep`.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Relation {
        let mask = (0..self.size)
            .filter(|&e| keep(e))
            .fold(0u64, |m, e| m | bit(e));
        let rows = (0..self.size)
            .map(|a| {
                if mask & bit(a) != 0 {
                    self.rows[a] & mask
                } else {
                    0
                }
            })
            .collect();
        Relation {
            size: self.size,
            rows,
        }
    }

    /// Lazily yields every total order of `elements` consistent with this
    /// relation (pairs with an endpoint outside `elements` are ignored).
    pub fn linear_extensions(&self, elements: &[usize]) -> Result<LinearExtensions, RelationError> {
        let mut mask = 0u64;
        for &e in elements {
            if e >= self.size {
                return Err(RelationError::OutOfRange(e));
            }
            mask |= bit(e);
        }
        let sub = self.restrict(|e| mask & bit(e) != 0);
        if !sub.is_irreflexive_and_acyclic() {
            return Err(RelationError::Cyclic);
        }
        let mut preds = vec![0u64; self.size];
        for (a, b) in sub.pairs() {
            preds[b] |= bit(a);
        }
        let mut elems: Vec<usize> = elements.to_vec();
        elems.sort_unstable();
        elems.dedup();
        let n = elems.len();
        Ok(LinearExtensions {
            elems,
            preds,
            prefix: Vec::with_capacity(n),
            placed: 0,
            cursor: vec![0; n + 1],
            started: false,
            done: false,
        })
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

fn bits(mut word: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if word == 0 {
            None
        } else {
            let i = word.trailing_zeros() as usize;
            word &= word - 1;
            Some(i)
        }
    })
}

/// Backtracking enumerator behind [`Relation::linear_extensions`].
pub struct LinearExtensions {
    elems: Vec<usize>,
    preds: Vec<u64>,
    prefix: Vec<usize>,
    placed: u64,
    cursor: Vec<usize>,
    started: bool,
    done: bool,
}

impl LinearExtensions {
    fn pop(&mut self) {
        if let Some(e) = self.prefix.pop() {
            self.placed &= !bit(e);
        }
    }
}

impl Iterator for LinearExtensions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let n = self.elems.len();
        if !self.started {
            self.started = true;
            if n == 0 {
                self.done = true;
                return Some(Vec::new());
            }
        }
        loop {
            let depth = self.prefix.len();
            if depth == n {
                let out = self.prefix.clone();
                self.pop();
                return Some(out);
            }
            let mut found = None;
            while self.cursor[depth] < n {
                let e = self.elems[self.cursor[depth]];
                self.cursor[depth] += 1;
                if self.placed & bit(e) == 0 && self.preds[e] & !self.placed == 0 {
                    found = Some(e);
                    break;
                }
            }
            match found {
                Some(e) => {
                    self.prefix.push(e);
                    self.placed |= bit(e);
                    self.cursor[depth + 1] = 0;
                }
                None if depth == 0 => {
                    self.done = true;
                    return None;
                }
                None => self.pop(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;

    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;

    fn rel(size: usize, pairs: &[(usize, usize)]) -> Relation {
        Relation::from_pairs(size, pairs.iter().copied()).unwrap()
    }

    /// Reachability by repeated breadth-first search, independent of Warshall.
    fn reachability_oracle(size: usize, pairs: &[(usize, usize)]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for s in 0..size {
            let mut seen = vec![false; size];
            let mut frontier = vec![s];
            while let Some(x) = frontier.pop() {
                for &(a, b) in pairs {
                    if a == x && !seen[b] {
                        seen[b] = true;
                        frontier.push(b);
                    }
                }
            }
            out.extend((0..size).filter(|&t| seen[t]).map(|t| (s, t)));
        }
        out
    }

    #[test]
    fn closure_of_chain() {
        let tc = rel(3, &[(A, B), (B, C)]).transitive_closure();
        assert_eq!(tc.pairs().collect::<Vec<_>>(), vec![(A, B), (A, C), (B, C)]);
    }

    #[test]
    fn closure_of_empty() {
        assert!(Relation::empty(5).unwrap().transitive_closure().is_empty());
    }

    #[test]
    fn closure_of_four_cycle_is_complete() {
        let pairs = [(0, 1), (1, 2), (2, 3), (3, 0)];
        let tc = rel(4, &pairs).transitive_closure();
        let oracle = reachability_oracle(4, &pairs);
        assert_eq!(oracle.len(), 16);
        assert_eq!(tc.pairs().collect::<Vec<_>>(), oracle);
    }

    #[test]
    fn acyclicity() {
        assert!(!rel(2, &[(A, B), (B, A)]).is_irreflexive_and_acyclic());
        assert!(rel(3, &[(A, B), (B, C)]).is_irreflexive_and_acyclic());
        assert!(!rel(1, &[(A, A)]).is_irreflexive_and_acyclic());
    }

    #[test]
    fn compose_union_restrict() {
        let r = rel(3, &[(A, B)]);
        let s = rel(3, &[(B, C)]);
        assert_eq!(r.compose(&s).unwrap(), rel(3, &[(A, C)]));
        assert_eq!(r.union(&Relation::empty(3).unwrap()).unwrap(), r);
        let both = r.union(&s).unwrap();
        assert_eq!(both.restrict(|e| e != A), s);
        assert_eq!(
            r.compose(&Relation::empty(4).unwrap()),
            Err(RelationError::UniverseMismatch(3, 4))
        );
    }

    #[test]
    fn oversized_universe_rejected() {
        assert_eq!(Relation::empty(65), Err(RelationError::TooLarge(65)));
        assert!(Relation::empty(64).is_ok());
        assert_eq!(
            Relation::from_pairs(2, [(0, 2)]),
            Err(RelationError::OutOfRange(2))
        );
    }

    #[test]
    fn extensions_small_cases() {
        let none = Relation::empty(3).unwrap();
        let two: Vec<_> = none.linear_extensions(&[A, B]).unwrap().collect();
        assert_eq!(two, vec![vec![A, B], vec![B, A]]);

        let three = rel(3, &[(A, B)]).linear_extensions(&[A, B, C]).unwrap().count();
        assert_eq!(three, 3);

        let empty: Vec<_> = none.linear_extensions(&[]).unwrap().collect();
        assert_eq!(empty, vec![Vec::<usize>::new()]);

        assert!(matches!(
            rel(2, &[(A, B), (B, A)]).linear_extensions(&[A, B]),
            Err(RelationError::Cyclic)
        ));
        // a cycle through an element outside the set is ignored
        assert_eq!(
            rel(3, &[(A, C), (C, A)]).linear_extensions(&[A, B]).unwrap().count(),
            2
        );
    }

    fn arb_relation(max: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (1..=max).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..(n * n))))
    }

    proptest! {
        #[test]
        fn closure_matches_reachability((n, pairs) in arb_relation(8)) {
            let tc = rel(n, &pairs).transitive_closure();
            prop_assert_eq!(tc.pairs().collect::<Vec<_>>(), reachability_oracle(n, &pairs));
        }

        #[test]
        fn closure_idempotent_and_monotone((n, pairs) in arb_relation(8), cut in 0usize..64) {
            let s = rel(n, &pairs);
            let r = rel(n, &pairs[..cut.min(pairs.len())]);
            let tc = s.transitive_closure();
            prop_assert_eq!(tc.transitive_closure(), tc.clone());
            prop_assert!(r.transitive_closure().is_subset(&tc));
            prop_assert_eq!(tc.size(), n);
        }

        #[test]
        fn extensions_match_brute_force((n, pairs) in arb_relation(6)) {
            // orient every pair low -> high so the input is acyclic
            let dag: Vec<_> = pairs.iter().filter(|(a, b)| a < b).copied().collect();
            let r = rel(n, &dag);
            let elements: Vec<usize> = (0..n).collect();
            let got: Vec<Vec<usize>> = r.linear_extensions(&elements).unwrap().collect();
            let expected: Vec<Vec<usize>> = elements
                .iter()
                .copied()
                .permutations(n)
                .filter(|perm| {
                    dag.iter().all(|&(a, b)| {
                        perm.iter().position(|&x| x == a) < perm.iter().position(|&x| x == b)
                    })
                })
                .collect();
            prop_assert_eq!(got.len(), expected.len());
            let mut got_sorted = got.clone();
            got_sorted.sort();
            got_sorted.dedup();
            prop_assert_eq!(got_sorted.len(), got.len());
            let mut exp_sorted = expected;
            exp_sorted.sort();
            prop_assert_eq!(got_sorted, exp_sorted);
        }
    }
}
