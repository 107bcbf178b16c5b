//! Search for uniform minors `U_{r,b}`.

use crate::caps;
use crate::error::{MdlError, Result};
use crate::matroid::Matroid;
use crate::subset::Subset;

/// A `U_{r,b}`-minor `(M / contract)|elements`, with `contract` independent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformMinor {
    pub rank: usize,
    pub contract: Subset,
    pub elements: Subset,
}

impl UniformMinor {
    pub fn delete(&self, m: &Matroid) -> Subset {
        m.ground().difference(self.contract).difference(self.elements)
    }

    /// Checks the witness against `m` on every subset of `elements`.
    pub fn verify(&self, m: &Matroid) -> bool {
        if !self.contract.is_disjoint(self.elements)
            || !self.contract.union(self.elements).is_subset(m.ground())
            || !m.is_independent(self.contract)
        {
            return false;
        }
        let rc = m.rank(self.contract);
        self.elements
            .subsets()
            .all(|x| m.rank(x.union(self.contract)) - rc == x.len().min(self.rank))
    }
}

struct Search<'a> {
    m: &'a Matroid,
    flat: Subset,
    base_rank: usize,
    r: usize,
    b: usize,
    points: Vec<usize>,
    nodes: usize,
    cap: usize,
}

impl Search<'_> {
    /// Whether `e` can join `chosen` with every `r`-subset staying a basis
    /// of the contraction.
    fn compatible(&self, chosen: Subset, e: usize) -> bool {
        let need = self.r.saturating_sub(1);
        if chosen.len() < need {
            let s = chosen.with(e);
            return self.m.rank(s.union(self.flat)) - self.base_rank == s.len();
        }
        chosen
            .subsets_of_size(need)
            .all(|s| self.m.rank(s.with(e).union(self.flat)) - self.base_rank == self.r)
    }

    fn grow(&mut self, chosen: Subset, from: usize) -> Result<Option<Subset>> {
        if chosen.len() == self.b {
            return Ok(Some(chosen));
        }
        if self.points.len() - from < self.b - chosen.len() {
            return Ok(None);
        }
        for i in from..self.points.len() {
            self.nodes += 1;
            if self.nodes > self.cap {
                return Err(MdlError::TooLarge {
                    what: "uniform-minor search nodes",
                    count: self.nodes,
                    cap: self.cap,
                });
            }
            let e = self.points[i];
            if self.compatible(chosen, e) {
                if let Some(found) = self.grow(chosen.with(e), i + 1)? {
                    return Ok(Some(found));
                }
            }
        }
        Ok(None)
    }
}

/// Finds a `U_{r,b}`-minor of `m`, or `None` when there is none.
///
/// Every such minor is `(M / F)|Z` for a flat `F` of rank `r(M) - r`, so the
/// search runs over those flats and, inside each contraction, over sets of
/// pairwise non-parallel points.
pub fn find_uniform_minor(m: &Matroid, r: usize, b: usize) -> Result<Option<UniformMinor>> {
    if r > b {
        return Err(MdlError::Precondition(format!("U({r},{b}) needs r <= b")));
    }
    let rm = m.full_rank();
    if r > rm {
        return Ok(None);
    }
    if r == 0 {
        let contract = m.basis_of(m.ground());
        let elements: Subset = m.ground().difference(contract).iter().take(b).collect();
        return Ok((elements.len() == b).then_some(UniformMinor {
            rank: 0,
            contract,
            elements,
        }));
    }
    let cap = caps::scaled(caps::MINOR_SEARCH_NODES);
    let mut nodes = 0;
    for flat in m.flats_of_rank(rm - r) {
        let contracted = m.contract(flat)?;
        let points: Vec<usize> = contracted.parallel_classes().iter().filter_map(|c| Subset::min(*c)).collect();
        if points.len() < b {
            continue;
        }
        let mut s = Search {
            m,
            flat,
            base_rank: m.rank(flat),
            r,
            b,
            points,
            nodes,
            cap,
        };
        let found = s.grow(Subset::EMPTY, 0)?;
        nodes = s.nodes;
        if let Some(elements) = found {
            return Ok(Some(UniformMinor {
                rank: r,
                contract: m.basis_of(flat),
                elements,
            }));
        }
    }
    Ok(None)
}

/// Whether `m` has a `U_{r,b}`-minor.
pub fn has_uniform_minor(m: &Matroid, r: usize, b: usize) -> Result<bool> {
    Ok(find_uniform_minor(m, r, b)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn fano_has_no_u24() {
        let f = catalog::fano();
        assert_eq!(find_uniform_minor(&f, 2, 4).unwrap(), None);
        let w = find_uniform_minor(&f, 2, 3).unwrap().unwrap();
        assert!(w.verify(&f));
    }

    #[test]
    fn uniform_contains_smaller_uniform() {
        let u = Matroid::uniform(3, 7).unwrap();
        let w = find_uniform_minor(&u, 2, 6).unwrap().unwrap();
        assert!(w.verify(&u));
        assert_eq!(w.contract.len(), 1);
        assert!(find_uniform_minor(&u, 2, 7).unwrap().is_none());
        assert!(find_uniform_minor(&u, 3, 8).unwrap().is_none());
    }

    #[test]
    fn pg_over_gf4_has_u25() {
        let m = catalog::pg(3, 4).unwrap();
        let w = find_uniform_minor(&m, 2, 5).unwrap().unwrap();
        assert!(w.verify(&m));
        assert!(find_uniform_minor(&m, 2, 6).unwrap().is_none());
    }
}
