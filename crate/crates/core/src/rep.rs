//! GF(q)-representability by backtracking coordinatization.
//!
//! The simplification is coordinatized with a fixed basis sent to the
//! identity columns. A later element `e` may only take vectors whose support
//! is the fundamental circuit of `e`, scaled so the first nonzero entry is 1.
//! A candidate is accepted when, for every flat `F` of the already placed
//! prefix, `e ∈ cl_M(F)` exactly when the vector lies in the span of `F`;
//! that condition is equivalent to the two rank functions agreeing on the
//! prefix plus `e`.

use std::collections::HashSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::caps;
use crate::error::{MdlError, Result};
use crate::gf::{Elem, FiniteField, Matrix, Span};
use crate::matroid::Matroid;
use crate::subset::Subset;

struct Constraint {
    basis: Vec<usize>,
    contains_next: bool,
}

struct Coordinatizer<'a> {
    field: &'a FiniteField,
    rank: usize,
    /// placement order: a basis first, then the rest
    order: Vec<usize>,
    /// per non-basis position, the coordinates of its fundamental circuit
    support: Vec<Vec<usize>>,
    /// per non-basis position, the proper flats of the prefix before it
    constraints: Vec<Vec<Constraint>>,
    vectors: Vec<Vec<Elem>>,
    nodes: usize,
    cap: usize,
}

impl Coordinatizer<'_> {
    fn search(&mut self, pos: usize) -> Result<bool> {
        if pos == self.order.len() {
            return Ok(true);
        }
        let k = pos - self.rank;
        let spans: Vec<Span<'_>> = self.constraints[k]
            .iter()
            .map(|c| {
                let mut s = Span::new(self.field, self.rank);
                for &p in &c.basis {
                    s.insert(&self.vectors[p]);
                }
                s
            })
            .collect();
        let support = self.support[k].clone();
        let q = self.field.order();
        let free = support.len().saturating_sub(1);
        let total = (q - 1).pow(free as u32);
        let mut accepted = Vec::new();
        for code in 0..total {
            let mut v = vec![0 as Elem; self.rank];
            let mut c = code;
            for (i, &coord) in support.iter().enumerate() {
                v[coord] = if i == 0 {
                    1
                } else {
                    let digit = (c % (q - 1)) as Elem + 1;
                    c /= q - 1;
                    digit
                };
            }
            let ok = self.constraints[k]
                .iter()
                .zip(&spans)
                .all(|(con, span)| span.contains(&v) == con.contains_next);
            if ok {
                accepted.push(v);
            }
        }
        drop(spans);
        for v in accepted {
            self.nodes += 1;
            if self.nodes > self.cap {
                return Err(MdlError::TooLarge {
                    what: "representability search nodes",
                    count: self.nodes,
                    cap: self.cap,
                });
            }
            self.vectors.push(v);
            if self.search(pos + 1)? {
                return Ok(true);
            }
            self.vectors.pop();
        }
        Ok(false)
    }
}

fn check_caps(si: &Matroid) -> Result<()> {
    let r = si.full_rank();
    let eps = si.ground().len();
    let rank_cap = caps::scaled(caps::REP_RANK);
    let point_cap = caps::scaled(caps::REP_POINTS);
    if r > rank_cap {
        return Err(MdlError::TooLarge {
            what: "rank for representability",
            count: r,
            cap: rank_cap,
        });
    }
    if eps > point_cap {
        return Err(MdlError::TooLarge {
            what: "points for representability",
            count: eps,
            cap: point_cap,
        });
    }
    Ok(())
}

/// Placement order: points sorted by how many lines with at least three
/// points pass through them, most first; a greedy basis goes in front.
fn placement_order(si: &Matroid) -> (Vec<usize>, Vec<usize>) {
    let lines = if si.full_rank() >= 2 { si.flats_of_rank(2) } else { Vec::new() };
    let mut degree = vec![0usize; si.size()];
    for l in lines.iter().filter(|l| l.len() >= 3) {
        for e in l.iter() {
            degree[e] += 1;
        }
    }
    let mut pts = si.ground().to_vec();
    pts.sort_by_key(|&e| (std::cmp::Reverse(degree[e]), e));
    let mut basis = Vec::new();
    let mut b = Subset::EMPTY;
    for &e in &pts {
        if si.rank(b.with(e)) > b.len() {
            b.insert(e);
            basis.push(e);
        }
    }
    let rest = pts.into_iter().filter(|e| !b.contains(*e)).collect();
    (basis, rest)
}

/// Flats of `si|prefix` of rank below `r(si)`, grown one element at a time.
fn prefix_flats(si: &Matroid, basis: &[usize], rest: &[usize]) -> Vec<Vec<Constraint>> {
    let r = basis.len();
    let bset: Subset = basis.iter().copied().collect();
    let mut flats: Vec<Subset> = bset.subsets().filter(|s| s.len() < r && !s.is_empty()).collect();
    let mut prefix = bset;
    let mut out = Vec::with_capacity(rest.len());
    for &e in rest {
        let level = flats
            .iter()
            .map(|&f| {
                let fb = si.basis_of(f);
                Constraint {
                    basis: fb.to_vec(),
                    contains_next: si.rank(f.with(e)) == fb.len(),
                }
            })
            .collect();
        out.push(level);
        prefix.insert(e);
        let mut next: HashSet<Subset> = HashSet::new();
        for &f in &flats {
            if si.rank(f.with(e)) > si.rank(f) {
                next.insert(f);
            }
            let g = si.closure(f.with(e)).intersection(prefix);
            if si.rank(g) < r {
                next.insert(g);
            }
        }
        next.insert(Subset::singleton(e));
        let mut v: Vec<Subset> = next.into_iter().collect();
        v.sort_by(|a, b| a.lex_cmp(*b));
        flats = v;
    }
    out
}

/// Exact rank comparison between `m` and the columns of `mat` on subsets of
/// `points`: exhaustive for up to 14 points, otherwise every subset of size
/// at most 3 plus a seeded sample of larger ones.
pub fn representation_matches(m: &Matroid, mat: &Matrix, points: Subset) -> bool {
    let check = |x: Subset| m.rank(x) == mat.rank_of_columns(x);
    if points.len() <= 14 {
        return points.subsets().all(check);
    }
    for k in 1..=3 {
        if !points.subsets_of_size(k).all(check) {
            return false;
        }
    }
    let pts = points.to_vec();
    let r = m.rank(points);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..20_000).all(|_| {
        let size = rng.gen_range(1..=(r + 1).min(pts.len()));
        let mut x = Subset::EMPTY;
        while x.len() < size {
            x.insert(pts[rng.gen_range(0..pts.len())]);
        }
        check(x)
    })
}

/// A `GF(q)` representation of `m`, or `None` when there is none.
///
/// The matrix has one column per index of `m`; loops and indices outside the
/// ground set get zero columns and parallel elements share a column.
pub fn is_representable(m: &Matroid, q: usize) -> Result<Option<Matrix>> {
    let field = Arc::new(FiniteField::new(q)?);
    let (si, mapping) = m.simplify();
    check_caps(&si)?;
    let r = si.full_rank();
    let (basis, rest) = placement_order(&si);
    let bset: Subset = basis.iter().copied().collect();
    let support = rest
        .iter()
        .map(|&e| {
            (0..r)
                .filter(|&i| si.rank(bset.without(basis[i]).with(e)) == r)
                .collect::<Vec<_>>()
        })
        .collect();
    let constraints = prefix_flats(&si, &basis, &rest);
    let order: Vec<usize> = basis.iter().chain(rest.iter()).copied().collect();
    let mut pos_of = vec![usize::MAX; si.size()];
    for (p, &e) in order.iter().enumerate() {
        pos_of[e] = p;
    }
    let constraints = constraints
        .into_iter()
        .map(|level: Vec<Constraint>| {
            level
                .into_iter()
                .map(|c| Constraint {
                    basis: c.basis.iter().map(|&e| pos_of[e]).collect(),
                    contains_next: c.contains_next,
                })
                .collect()
        })
        .collect();
    let vectors = (0..r)
        .map(|i| {
            let mut v = vec![0 as Elem; r];
            v[i] = 1;
            v
        })
        .collect();
    let mut search = Coordinatizer {
        field: &field,
        rank: r,
        order: order.clone(),
        support,
        constraints,
        vectors,
        nodes: 0,
        cap: caps::scaled(caps::REP_NODES),
    };
    if !search.search(r)? {
        return Ok(None);
    }
    let rows = r.max(1);
    let mut mat = Matrix::zeros(field.clone(), rows, m.size());
    for e in m.ground().iter() {
        if let Some(rep) = mapping[e] {
            for (i, &v) in search.vectors[pos_of[rep]].iter().enumerate() {
                mat.set(i, e, v);
            }
        }
    }
    if !representation_matches(&si, &mat, si.ground()) {
        return Err(MdlError::InvalidCertificate(
            "coordinatization failed its rank re-check".into(),
        ));
    }
    Ok(Some(mat))
}

/// Whether `si(m)` is `PG(n-1, q)`: rank `n`, `(q^n - 1)/(q - 1)` points and
/// `GF(q)`-representable.
pub fn is_pg(m: &Matroid, n: usize, q: usize) -> Result<bool> {
    FiniteField::new(q)?;
    let (si, _) = m.simplify();
    if si.full_rank() != n {
        return Ok(false);
    }
    let points = (q.pow(n as u32) - 1) / (q - 1);
    if si.ground().len() != points {
        return Ok(false);
    }
    Ok(is_representable(&si, q)?.is_some())
}

/// Whether `U_{a+1,b}` is `GF(q)`-representable, for `a + 1 <= 3`, `b <= 7`
/// and `q <= 8`.
pub fn uniform_representability_fact(a: usize, b: usize, q: usize) -> Result<bool> {
    if a + 1 > 3 || b > 7 || q > 8 {
        return Err(MdlError::TooLarge {
            what: "uniform representability parameters",
            count: (a + 1).max(b).max(q),
            cap: 8,
        });
    }
    Ok(is_representable(&Matroid::uniform(a + 1, b)?, q)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn spec_examples() {
        assert!(is_representable(&Matroid::uniform(2, 4).unwrap(), 2).unwrap().is_none());
        let fano = catalog::fano();
        let mat = is_representable(&fano, 2).unwrap().unwrap();
        assert!(representation_matches(&fano, &mat, fano.ground()));
        for q in [2, 3, 4] {
            let u = Matroid::uniform(2, q + 2).unwrap();
            assert!(is_representable(&u, q).unwrap().is_none(), "q={q}");
            let v = Matroid::uniform(2, q + 1).unwrap();
            assert!(is_representable(&v, q).unwrap().is_some(), "q={q}");
        }
        assert!(is_representable(&fano, 3).unwrap().is_none());
    }

    #[test]
    fn pg_recognition() {
        assert!(is_pg(&catalog::pg(3, 3).unwrap(), 3, 3).unwrap());
        let f = catalog::fano();
        assert!(!is_pg(&f.delete(Subset::singleton(0)).unwrap(), 3, 2).unwrap());
        assert!(!is_pg(&Matroid::uniform(3, 7).unwrap(), 3, 2).unwrap());
        assert!(is_pg(&catalog::pg(4, 3).unwrap(), 4, 3).unwrap());
        assert!(is_pg(&catalog::pg(5, 2).unwrap(), 5, 2).unwrap());
        assert!(is_pg(&catalog::pg(5, 3).unwrap(), 5, 3).is_err());
    }

    #[test]
    fn non_simple_inputs() {
        let f = catalog::fano().parallel_extension(&[0, 0, 3]).unwrap();
        let mat = is_representable(&f, 2).unwrap().unwrap();
        assert!(representation_matches(&f, &mat, f.ground()));
        assert!(is_representable(&Matroid::uniform(0, 3).unwrap(), 2).unwrap().is_some());
    }

    #[test]
    fn uniform_fact() {
        assert!(uniform_representability_fact(1, 5, 5).unwrap());
        assert!(!uniform_representability_fact(1, 5, 3).unwrap());
        assert!(uniform_representability_fact(1, 3, 2).unwrap());
        assert!(uniform_representability_fact(2, 6, 5).unwrap());
        assert!(uniform_representability_fact(4, 6, 5).is_err());
    }

    #[test]
    fn caps_are_enforced() {
        let big = catalog::pg(3, 8).unwrap();
        assert!(matches!(is_representable(&big, 8), Err(MdlError::TooLarge { .. })));
    }
}
