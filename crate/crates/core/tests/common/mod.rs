//! Brute-force reference computations, written without the library's
//! cover solver, closure operator or coordinatizer.

#![allow(dead_code)]

use mdl_core::gf::Elem;
use mdl_core::{FiniteField, Matroid, Subset};

/// Rank of every subset of the ground set, indexed by local bit masks.
pub struct RankTable {
    pub elements: Vec<usize>,
    pub ranks: Vec<usize>,
}

impl RankTable {
    pub fn new(m: &Matroid) -> RankTable {
        let elements = m.ground().to_vec();
        assert!(elements.len() <= 16, "rank table limited to 16 elements");
        let ranks = (0..1usize << elements.len())
            .map(|mask| m.rank(Self::to_subset(&elements, mask)))
            .collect();
        RankTable { elements, ranks }
    }

    fn to_subset(elements: &[usize], mask: usize) -> Subset {
        elements.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect()
    }

    pub fn n(&self) -> usize {
        self.elements.len()
    }

    pub fn full(&self) -> usize {
        (1 << self.n()) - 1
    }

    pub fn subset(&self, mask: usize) -> Subset {
        Self::to_subset(&self.elements, mask)
    }

    pub fn mask(&self, s: Subset) -> usize {
        self.elements.iter().enumerate().filter(|(_, &e)| s.contains(e)).fold(0, |acc, (i, _)| acc | 1 << i)
    }
}

/// Minimum number of sets of rank at most `a` covering `within` (a local
/// mask), by dynamic programming over covered masks. `None` when no such
/// cover exists.
pub fn min_cover_count(t: &RankTable, within: usize, a: usize) -> Option<u64> {
    let candidates: Vec<usize> = (1..=within)
        .filter(|&s| s & !within == 0 && t.ranks[s] <= a)
        .filter(|&s| (0..t.n()).all(|e| s >> e & 1 == 1 || within >> e & 1 == 0 || t.ranks[s | 1 << e] > a))
        .collect();
    let mut dp = vec![u64::MAX; 1 << t.n()];
    dp[0] = 0;
    for mask in 0..=within {
        if mask & !within != 0 || dp[mask] == u64::MAX {
            continue;
        }
        for &c in &candidates {
            let next = mask | c;
            dp[next] = dp[next].min(dp[mask] + 1);
        }
    }
    (dp[within] != u64::MAX).then_some(dp[within])
}

/// Minimum `Σ d^{r(F)}` over covers of the ground set by arbitrary subsets.
pub fn min_weight(t: &RankTable, d: u64) -> u128 {
    let full = t.full();
    let mut dp = vec![u128::MAX; full + 1];
    dp[0] = 0;
    for mask in 0..=full {
        if dp[mask] == u128::MAX {
            continue;
        }
        let missing = full & !mask;
        if missing == 0 {
            continue;
        }
        // some set must cover the lowest missing element
        let low = missing & missing.wrapping_neg();
        let mut s = missing;
        loop {
            if s & low != 0 {
                let w = (d as u128).pow(t.ranks[s] as u32);
                let next = mask | s;
                dp[next] = dp[next].min(dp[mask] + w);
            }
            if s == 0 {
                break;
            }
            s = (s - 1) & missing;
        }
    }
    dp[full]
}

/// `τ_{r(X)-1}(M|X) >= d` for a local mask `x`.
pub fn is_thick(t: &RankTable, x: usize, d: u64) -> bool {
    let r = t.ranks[x];
    if r == 0 {
        return false;
    }
    min_cover_count(t, x, r - 1).map_or(true, |v| v >= d)
}

/// Number of rank-1 parallel classes.
pub fn point_count(t: &RankTable) -> usize {
    let mut reps: Vec<usize> = Vec::new();
    for e in 0..t.n() {
        if t.ranks[1 << e] == 0 {
            continue;
        }
        if !reps.iter().any(|&f| t.ranks[1 << e | 1 << f] == 1) {
            reps.push(e);
        }
    }
    reps.len()
}

/// Rank of a list of vectors by Gaussian elimination over `f`.
pub fn vector_rank(f: &FiniteField, vecs: &[Vec<Elem>]) -> usize {
    let mut rows: Vec<Vec<Elem>> = vecs.to_vec();
    let dim = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..dim {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = f.inv(rows[rank][col]);
        let pivot: Vec<Elem> = rows[rank].iter().map(|&v| f.mul(v, inv)).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[col] != 0 {
                let c = row[col];
                for (x, &pv) in row.iter_mut().zip(&pivot) {
                    *x = f.sub(*x, f.mul(c, pv));
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    rank
}

/// Exhaustive search for a `GF(q)` representation: a basis is fixed to the
/// identity and every other element ranges over the zero vector and the
/// normalised nonzero vectors, with every subset's rank compared as each
/// column is placed.
pub fn brute_representable(m: &Matroid, q: usize) -> bool {
    let f = FiniteField::new(q).unwrap();
    let t = RankTable::new(m);
    let r = t.ranks[t.full()];
    if r == 0 {
        return true;
    }
    let mut basis = 0usize;
    for e in 0..t.n() {
        if t.ranks[basis | 1 << e] > t.ranks[basis] {
            basis |= 1 << e;
        }
    }
    let mut candidates: Vec<Vec<Elem>> = vec![vec![0; r]];
    let total = q.pow(r as u32);
    for code in 1..total {
        let v: Vec<Elem> = (0..r).map(|i| (code / q.pow(i as u32) % q) as Elem).collect();
        if v.iter().find(|&&x| x != 0) == Some(&1) {
            candidates.push(v);
        }
    }
    let mut cols: Vec<Option<Vec<Elem>>> = vec![None; t.n()];
    let mut k = 0;
    for e in 0..t.n() {
        if basis >> e & 1 == 1 {
            let mut v = vec![0; r];
            v[k] = 1;
            cols[e] = Some(v);
            k += 1;
        }
    }
    fn consistent(t: &RankTable, f: &FiniteField, cols: &[Option<Vec<Elem>>], placed: usize, e: usize) -> bool {
        let mut s = placed;
        loop {
            let set = s | 1 << e;
            let vecs: Vec<Vec<Elem>> = (0..t.n()).filter(|&i| set >> i & 1 == 1).map(|i| cols[i].clone().unwrap()).collect();
            if vector_rank(f, &vecs) != t.ranks[set] {
                return false;
            }
            if s == 0 {
                return true;
            }
            s = (s - 1) & placed;
        }
    }
    if !consistent(&t, &f, &cols, basis & !(basis & basis.wrapping_neg()), basis.trailing_zeros() as usize) {
        return false;
    }
    let rest: Vec<usize> = (0..t.n()).filter(|&e| basis >> e & 1 == 0).collect();
    fn place(
        t: &RankTable,
        f: &FiniteField,
        cols: &mut Vec<Option<Vec<Elem>>>,
        candidates: &[Vec<Elem>],
        rest: &[usize],
        placed: usize,
    ) -> bool {
        let Some((&e, tail)) = rest.split_first() else {
            return true;
        };
        for c in candidates {
            cols[e] = Some(c.clone());
            if consistent(t, f, cols, placed, e) && place(t, f, cols, candidates, tail, placed | 1 << e) {
                return true;
            }
        }
        cols[e] = None;
        false
    }
    place(&t, &f, &mut cols, &candidates, &rest, basis)
}

/// Exhaustive rank-axiom check in the pairwise form
/// `r(X) + r(Y) >= r(X ∪ Y) + r(X ∩ Y)`.
pub fn axioms_hold(t: &RankTable) -> bool {
    let full = t.full();
    if t.ranks[0] != 0 {
        return false;
    }
    for x in 0..=full {
        let rx = t.ranks[x];
        if rx > (x as u32).count_ones() as usize {
            return false;
        }
        for e in 0..t.n() {
            if x >> e & 1 == 0 && t.ranks[x | 1 << e] < rx {
                return false;
            }
        }
    }
    if t.n() <= 8 {
        for x in 0..=full {
            for y in 0..=full {
                if t.ranks[x] + t.ranks[y] < t.ranks[x | y] + t.ranks[x & y] {
                    return false;
                }
            }
        }
    }
    true
}
