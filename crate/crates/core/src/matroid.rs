//! The matroid kernel: rank oracles, minors, closure, flats, simplification,
//! local connectivity and weak roundness.
//!
//! Every matroid lives on an index space `0..size()`; `ground()` is the set
//! of live elements. Minors keep their parent's indexing, so a set named in
//! one step of a reduction still means the same elements after contracting
//! or deleting others.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{MdlError, Result};
use crate::gf::Matrix;
use crate::subset::{Subset, MAX_ELEMENTS};

/// Anything that answers rank queries on subsets of a ground set.
pub trait RankOracle {
    /// Width of the index space; every element index is below this.
    fn index_size(&self) -> usize;
    fn ground(&self) -> Subset;
    fn rank(&self, x: Subset) -> usize;
}

#[derive(Clone)]
pub enum Kind {
    Uniform {
        rank: usize,
        n: usize,
    },
    Linear(Matrix),
    Minor {
        base: Matroid,
        contract: Subset,
        delete: Subset,
    },
    DirectSum {
        parts: Vec<Matroid>,
        offsets: Vec<usize>,
    },
    /// `base` extended by parallel copies; index `base.size() + j` is a copy
    /// of `sources[j]`.
    Parallel {
        base: Matroid,
        sources: Vec<usize>,
    },
}

const MEMO_LIMIT: usize = 1 << 20;

struct Inner {
    kind: Kind,
    size: usize,
    ground: Subset,
    full_rank: OnceLock<usize>,
    /// rank of the contracted set in the base, for minors
    contract_rank: usize,
    memo: RwLock<HashMap<Subset, u8>>,
}

/// An immutable, cheaply clonable matroid value.
#[derive(Clone)]
pub struct Matroid(Arc<Inner>);

impl fmt::Debug for Matroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.0.kind {
            Kind::Uniform { rank, n } => format!("U({rank},{n})"),
            Kind::Linear(m) => format!("linear {}x{} over GF({})", m.rows(), m.cols(), m.field().order()),
            Kind::Minor { contract, delete, .. } => format!("minor /{contract} \\{delete}"),
            Kind::DirectSum { parts, .. } => format!("direct sum of {}", parts.len()),
            Kind::Parallel { sources, .. } => format!("parallel extension by {}", sources.len()),
        };
        write!(
            f,
            "Matroid({kind}, |E|={}, r={})",
            self.0.ground.len(),
            self.full_rank()
        )
    }
}

impl Matroid {
    fn build(kind: Kind, size: usize, ground: Subset, contract_rank: usize) -> Matroid {
        Matroid(Arc::new(Inner {
            kind,
            size,
            ground,
            full_rank: OnceLock::new(),
            contract_rank,
            memo: RwLock::new(HashMap::new()),
        }))
    }

    pub fn uniform(rank: usize, n: usize) -> Result<Matroid> {
        if n > MAX_ELEMENTS {
            return Err(MdlError::GroundTooLarge(n));
        }
        if rank > n {
            return Err(MdlError::Precondition(format!("U({rank},{n}) needs rank <= n")));
        }
        Ok(Matroid::build(Kind::Uniform { rank, n }, n, Subset::full(n), 0))
    }

    pub fn linear(matrix: Matrix) -> Result<Matroid> {
        let n = matrix.cols();
        if n > MAX_ELEMENTS {
            return Err(MdlError::GroundTooLarge(n));
        }
        Ok(Matroid::build(Kind::Linear(matrix), n, Subset::full(n), 0))
    }

    pub fn direct_sum(parts: &[Matroid]) -> Result<Matroid> {
        let size: usize = parts.iter().map(|p| p.size()).sum();
        if size > MAX_ELEMENTS {
            return Err(MdlError::GroundTooLarge(size));
        }
        let mut offsets = Vec::with_capacity(parts.len());
        let mut ground = Subset::EMPTY;
        let mut off = 0;
        for p in parts {
            offsets.push(off);
            ground = ground.union(shift_up(p.ground(), off));
            off += p.size();
        }
        Ok(Matroid::build(
            Kind::DirectSum {
                parts: parts.to_vec(),
                offsets,
            },
            size,
            ground,
            0,
        ))
    }

    /// `M / contract \ delete`. Nested minors collapse onto the underlying
    /// base, so contraction is associative rank-for-rank.
    pub fn minor(&self, contract: Subset, delete: Subset) -> Result<Matroid> {
        self.check_subset(contract)?;
        self.check_subset(delete)?;
        if !contract.is_disjoint(delete) {
            return Err(MdlError::Overlap(contract.intersection(delete)));
        }
        if contract.is_empty() && delete.is_empty() {
            return Ok(self.clone());
        }
        let (base, c0, d0) = match &self.0.kind {
            Kind::Minor {
                base,
                contract: c0,
                delete: d0,
            } => (base.clone(), *c0, *d0),
            _ => (self.clone(), Subset::EMPTY, Subset::EMPTY),
        };
        let c = c0.union(contract);
        let d = d0.union(delete);
        let ground = base.ground().difference(c).difference(d);
        let cr = base.rank(c);
        Ok(Matroid::build(
            Kind::Minor {
                base: base.clone(),
                contract: c,
                delete: d,
            },
            base.size(),
            ground,
            cr,
        ))
    }

    pub fn contract(&self, c: Subset) -> Result<Matroid> {
        self.minor(c, Subset::EMPTY)
    }

    pub fn delete(&self, d: Subset) -> Result<Matroid> {
        self.minor(Subset::EMPTY, d)
    }

    /// `M|X`.
    pub fn restrict(&self, x: Subset) -> Result<Matroid> {
        self.check_subset(x)?;
        self.delete(self.ground().difference(x))
    }

    /// Adds one parallel copy of each listed element, at fresh indices
    /// `size()..size()+sources.len()`.
    pub fn parallel_extension(&self, sources: &[usize]) -> Result<Matroid> {
        for &s in sources {
            if !self.ground().contains(s) {
                return Err(MdlError::IndexOutOfRange {
                    index: s,
                    size: self.size(),
                });
            }
        }
        let size = self.size() + sources.len();
        if size > MAX_ELEMENTS {
            return Err(MdlError::GroundTooLarge(size));
        }
        let mut ground = self.ground();
        for j in 0..sources.len() {
            ground.insert(self.size() + j);
        }
        Ok(Matroid::build(
            Kind::Parallel {
                base: self.clone(),
                sources: sources.to_vec(),
            },
            size,
            ground,
            0,
        ))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn ground(&self) -> Subset {
        self.0.ground
    }

    /// `r(M)`.
    pub fn full_rank(&self) -> usize {
        *self.0.full_rank.get_or_init(|| self.raw_rank(self.0.ground))
    }

    pub fn check_subset(&self, x: Subset) -> Result<()> {
        match x.difference(self.ground()).min() {
            None => Ok(()),
            Some(i) => Err(MdlError::IndexOutOfRange {
                index: i,
                size: self.size(),
            }),
        }
    }

    /// Rank with a ground-set check.
    pub fn try_rank(&self, x: Subset) -> Result<usize> {
        self.check_subset(x)?;
        Ok(self.rank(x))
    }

    /// `r_M(X)`; elements outside the ground set are ignored.
    pub fn rank(&self, x: Subset) -> usize {
        self.raw_rank(x.intersection(self.0.ground))
    }

    fn raw_rank(&self, x: Subset) -> usize {
        match &self.0.kind {
            Kind::Uniform { rank, .. } => x.len().min(*rank),
            Kind::Linear(m) => {
                if x.len() <= 1 {
                    return x.iter().filter(|&j| m.column(j).iter().any(|&v| v != 0)).count();
                }
                if let Some(&r) = self.0.memo.read().expect("memo lock").get(&x) {
                    return r as usize;
                }
                let r = m.rank_of_columns(x);
                let mut memo = self.0.memo.write().expect("memo lock");
                if memo.len() >= MEMO_LIMIT {
                    memo.clear();
                }
                memo.insert(x, r as u8);
                r
            }
            Kind::Minor { base, contract, .. } => base.rank(x.union(*contract)) - self.0.contract_rank,
            Kind::DirectSum { parts, offsets } => parts
                .iter()
                .zip(offsets)
                .map(|(p, &o)| p.rank(shift_down(x, o, p.size())))
                .sum(),
            Kind::Parallel { base, sources } => base.rank(self.to_base(base, sources, x)),
        }
    }

    fn to_base(&self, base: &Matroid, sources: &[usize], x: Subset) -> Subset {
        let n = base.size();
        let mut y = x.intersection(Subset::full(n));
        for i in x.iter().filter(|&i| i >= n) {
            y.insert(sources[i - n]);
        }
        y
    }

    pub fn is_independent(&self, x: Subset) -> bool {
        self.rank(x) == x.len()
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.rank(Subset::singleton(e)) == 0
    }

    pub fn loops(&self) -> Subset {
        self.ground().iter().filter(|&e| self.is_loop(e)).collect()
    }

    pub fn nonloops(&self) -> Subset {
        self.ground().difference(self.loops())
    }

    /// `cl_M(X) = X ∪ {e : r(X ∪ e) = r(X)}`, restricted to the ground set.
    pub fn closure(&self, x: Subset) -> Subset {
        let x = x.intersection(self.ground());
        match &self.0.kind {
            Kind::Uniform { rank, .. } => {
                if x.len() >= *rank {
                    self.ground()
                } else {
                    x
                }
            }
            Kind::Linear(m) => {
                let span = m.span_of(x);
                if span.rank() == m.rows() {
                    return self.ground();
                }
                self.ground()
                    .iter()
                    .filter(|&j| x.contains(j) || span.contains(m.column(j)))
                    .collect()
            }
            Kind::Minor { base, contract, .. } => base.closure(x.union(*contract)).intersection(self.ground()),
            Kind::DirectSum { parts, offsets } => {
                let mut out = Subset::EMPTY;
                for (p, &o) in parts.iter().zip(offsets) {
                    out = out.union(shift_up(p.closure(shift_down(x, o, p.size())), o));
                }
                out
            }
            Kind::Parallel { base, sources } => {
                let cl = base.closure(self.to_base(base, sources, x));
                let n = base.size();
                self.ground()
                    .iter()
                    .filter(|&i| if i < n { cl.contains(i) } else { cl.contains(sources[i - n]) })
                    .collect()
            }
        }
    }

    /// Closure computed straight from the rank oracle.
    pub fn closure_by_rank(&self, x: Subset) -> Subset {
        let r = self.rank(x);
        let mut out = x.intersection(self.ground());
        for e in self.ground().difference(x).iter() {
            if self.rank(x.with(e)) == r {
                out.insert(e);
            }
        }
        out
    }

    pub fn is_flat(&self, x: Subset) -> bool {
        self.closure(x) == x
    }

    pub fn spans(&self, x: Subset) -> bool {
        self.rank(x) == self.full_rank()
    }

    /// A maximal independent subset of `x`, chosen greedily by index.
    pub fn basis_of(&self, x: Subset) -> Subset {
        self.extend_to_basis(Subset::EMPTY, x)
    }

    /// Greedily extends the independent set `start` to a basis of
    /// `start ∪ within`.
    pub fn extend_to_basis(&self, start: Subset, within: Subset) -> Subset {
        let mut b = start;
        let mut r = self.rank(b);
        let target = self.rank(start.union(within));
        for e in within.intersection(self.ground()).difference(start).iter() {
            if r == target {
                break;
            }
            if self.rank(b.with(e)) > r {
                b.insert(e);
                r += 1;
            }
        }
        b
    }

    /// Flats grouped by rank, `result[k]` holding the rank-`k` flats for
    /// `k <= max_rank`, each list sorted lexicographically by index list.
    pub fn flats_up_to_rank(&self, max_rank: usize) -> Vec<Vec<Subset>> {
        let top = max_rank.min(self.full_rank());
        let mut levels = vec![vec![self.closure(Subset::EMPTY)]];
        for _ in 0..top {
            let mut next: HashSet<Subset> = HashSet::new();
            for &f in levels.last().expect("nonempty") {
                let mut rest = self.ground().difference(f);
                while let Some(e) = rest.min() {
                    let g = self.closure(f.with(e));
                    rest = rest.difference(g);
                    next.insert(g);
                }
            }
            let mut v: Vec<Subset> = next.into_iter().collect();
            v.sort_by(|a, b| a.lex_cmp(*b));
            levels.push(v);
        }
        levels
    }

    /// All flats of rank exactly `k`.
    pub fn flats_of_rank(&self, k: usize) -> Vec<Subset> {
        if k > self.full_rank() {
            return Vec::new();
        }
        self.flats_up_to_rank(k).pop().unwrap_or_default()
    }

    /// Rank-`(r-1)` flats.
    pub fn hyperplanes(&self) -> Vec<Subset> {
        match self.full_rank() {
            0 => Vec::new(),
            r => self.flats_of_rank(r - 1),
        }
    }

    /// Parallel classes of nonloops, each a set, ordered by least element.
    pub fn parallel_classes(&self) -> Vec<Subset> {
        let loops = self.loops();
        let mut seen = loops;
        let mut out = Vec::new();
        for e in self.ground().difference(loops).iter() {
            if seen.contains(e) {
                continue;
            }
            let class = self.closure(Subset::singleton(e)).difference(loops);
            seen = seen.union(class);
            out.push(class);
        }
        out
    }

    /// `ε(M)`, the number of points.
    pub fn epsilon(&self) -> usize {
        self.parallel_classes().len()
    }

    /// Deletes loops and all but the least-index member of each parallel
    /// class. `mapping[e]` is the representative kept for `e`.
    pub fn simplify(&self) -> (Matroid, Vec<Option<usize>>) {
        let mut mapping = vec![None; self.size()];
        let mut keep = Subset::EMPTY;
        for class in self.parallel_classes() {
            let rep = class.min().expect("nonempty class");
            keep.insert(rep);
            for e in class.iter() {
                mapping[e] = Some(rep);
            }
        }
        let si = self.restrict(keep).expect("representatives lie in the ground set");
        (si, mapping)
    }

    pub fn is_simple(&self) -> bool {
        self.loops().is_empty() && self.parallel_classes().iter().all(|c| c.len() == 1)
    }

    /// `⊓_M(X, Y) = r(X) + r(Y) - r(X ∪ Y)`.
    pub fn local_conn(&self, x: Subset, y: Subset) -> usize {
        self.rank(x) + self.rank(y) - self.rank(x.union(y))
    }

    pub fn are_skew(&self, x: Subset, y: Subset) -> bool {
        self.local_conn(x, y) == 0
    }

    /// A pair `(A, B)` covering `E(M)` with `r(A) <= r-2`, `r(B) <= r-1`, if
    /// one exists. `B` is a hyperplane minimising `r(E - B)`; ties go to the
    /// lexicographically first hyperplane.
    pub fn weak_roundness_violation(&self) -> Option<(Subset, Subset)> {
        let r = self.full_rank();
        if r <= 2 {
            return None;
        }
        let mut best: Option<(usize, Subset)> = None;
        for h in self.hyperplanes() {
            let rc = self.rank(self.ground().difference(h));
            if rc + 2 <= r && best.map_or(true, |(b, _)| rc < b) {
                best = Some((rc, h));
            }
        }
        best.map(|(_, h)| (self.ground().difference(h), h))
    }

    pub fn is_weakly_round(&self) -> bool {
        self.weak_roundness_violation().is_none()
    }

    /// Whether `self` and `other` have the same rank on every subset of `x`.
    pub fn agrees_on(&self, other: &Matroid, x: Subset) -> bool {
        x.subsets().all(|s| self.rank(s) == other.rank(s))
    }
}

impl RankOracle for Matroid {
    fn index_size(&self) -> usize {
        self.size()
    }

    fn ground(&self) -> Subset {
        Matroid::ground(self)
    }

    fn rank(&self, x: Subset) -> usize {
        Matroid::rank(self, x)
    }
}

fn shift_up(x: Subset, by: usize) -> Subset {
    if by >= MAX_ELEMENTS {
        Subset::EMPTY
    } else {
        Subset(x.0 << by)
    }
}

fn shift_down(x: Subset, by: usize, width: usize) -> Subset {
    let s = if by >= MAX_ELEMENTS { 0 } else { x.0 >> by };
    Subset(s).intersection(Subset::full(width))
}

/// Outcome of a rank-axiom check: `None` when every axiom holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomViolation {
    pub axiom: &'static str,
    pub sets: Vec<Subset>,
}

/// Checks normalisation, unit increase, monotonicity and submodularity.
///
/// Submodularity is checked in its local form
/// `r(X∪e) + r(X∪f) >= r(X∪e∪f) + r(X)`, which together with unit increase
/// is equivalent to the pairwise inequality. Ground sets of at most 14
/// elements are checked exhaustively; larger ones on `samples` random sets.
pub fn validate_rank_axioms<O: RankOracle + ?Sized>(m: &O, samples: usize, seed: u64) -> Option<AxiomViolation> {
    let ground = m.ground();
    if m.rank(Subset::EMPTY) != 0 {
        return Some(AxiomViolation {
            axiom: "normalisation",
            sets: vec![Subset::EMPTY],
        });
    }
    let check = |x: Subset| -> Option<AxiomViolation> {
        let rx = m.rank(x);
        let outside: Vec<usize> = ground.difference(x).iter().collect();
        for (i, &e) in outside.iter().enumerate() {
            let re = m.rank(x.with(e));
            if re < rx || re > rx + 1 {
                return Some(AxiomViolation {
                    axiom: if re < rx { "monotonicity" } else { "unit increase" },
                    sets: vec![x, x.with(e)],
                });
            }
            for &f in &outside[i + 1..] {
                let rf = m.rank(x.with(f));
                let ref_ = m.rank(x.with(e).with(f));
                if re + rf < ref_ + rx {
                    return Some(AxiomViolation {
                        axiom: "submodularity",
                        sets: vec![x.with(e), x.with(f)],
                    });
                }
            }
        }
        None
    };
    if ground.len() <= 14 {
        ground.subsets().find_map(check)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples).find_map(|_| {
            let x: Subset = ground.iter().filter(|_| rng.gen_bool(0.5)).collect();
            check(x)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FiniteField;

    fn fano() -> Matroid {
        let f = Arc::new(FiniteField::new(2).unwrap());
        let cols: Vec<Vec<usize>> = (1..8usize).map(|v| vec![v >> 2 & 1, v >> 1 & 1, v & 1]).collect();
        Matroid::linear(Matrix::from_columns(f, 3, &cols).unwrap()).unwrap()
    }

    #[test]
    fn rank_examples() {
        let u24 = Matroid::uniform(2, 4).unwrap();
        assert_eq!(u24.rank(Subset::from_indices([0, 1, 2])), 2);
        assert_eq!(fano().full_rank(), 3);
        let u36 = Matroid::uniform(3, 6).unwrap();
        let c = u36.contract(Subset::singleton(0)).unwrap();
        assert_eq!(c.rank(Subset::from_indices([1, 2])), 2);
        assert!(c.try_rank(Subset::singleton(0)).is_err());
    }

    #[test]
    fn closure_examples() {
        let u24 = Matroid::uniform(2, 4).unwrap();
        assert_eq!(u24.closure(Subset::EMPTY), Subset::EMPTY);
        assert_eq!(u24.closure(Subset::singleton(0)), Subset::singleton(0));
        let f = fano();
        let line = f.closure(Subset::from_indices([0, 1]));
        assert_eq!(line.len(), 3);
        assert_eq!(f.rank(line), 2);
        for x in f.ground().subsets() {
            assert_eq!(f.closure(x), f.closure_by_rank(x));
        }
    }

    #[test]
    fn flats_and_points() {
        let f = fano();
        assert_eq!(f.epsilon(), 7);
        let lines = f.flats_of_rank(2);
        assert_eq!(lines.len(), 7);
        assert!(lines.iter().all(|l| l.len() == 3));
        assert_eq!(Matroid::uniform(2, 4).unwrap().epsilon(), 4);
        assert_eq!(Matroid::uniform(3, 5).unwrap().flats_of_rank(1).len(), 5);
        assert_eq!(f.flats_of_rank(0), vec![Subset::EMPTY]);
    }

    #[test]
    fn duplicated_columns_count_once() {
        let f3 = Arc::new(FiniteField::new(3).unwrap());
        let m = Matroid::linear(Matrix::from_columns(f3, 2, &[vec![1, 1], vec![2, 2], vec![0, 1], vec![0, 0]]).unwrap())
            .unwrap();
        assert_eq!(m.epsilon(), 2);
        let (si, map) = m.simplify();
        assert_eq!(si.ground(), Subset::from_indices([0, 2]));
        assert_eq!(map, vec![Some(0), Some(0), Some(2), None]);
        let loops = Matroid::uniform(0, 3).unwrap();
        assert!(loops.simplify().0.ground().is_empty());
    }

    #[test]
    fn local_connectivity() {
        let u23 = Matroid::uniform(2, 3).unwrap();
        let ds = Matroid::direct_sum(&[u23.clone(), u23]).unwrap();
        assert_eq!(ds.local_conn(Subset::full(3), Subset::from_indices([3, 4, 5])), 0);
        let u36 = Matroid::uniform(3, 6).unwrap();
        assert_eq!(u36.local_conn(Subset::from_indices([0, 1]), Subset::from_indices([1, 2, 3])), 2);
    }

    #[test]
    fn weak_roundness() {
        let u33 = Matroid::uniform(3, 3).unwrap();
        let (a, b) = u33.weak_roundness_violation().unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(b.len(), 2);
        assert!(Matroid::uniform(2, 5).unwrap().is_weakly_round());
        assert!(fano().is_weakly_round());
    }

    #[test]
    fn minors_compose() {
        let u24 = Matroid::uniform(2, 4).unwrap();
        let c = u24.contract(Subset::singleton(0)).unwrap();
        for e in 1..4 {
            assert_eq!(c.rank(Subset::singleton(e)), 1);
        }
        assert_eq!(c.rank(Subset::from_indices([1, 2, 3])), 1);
        assert_eq!(u24.contract(Subset::EMPTY).unwrap().rank(Subset::full(4)), 2);
        let f = fano();
        let line = f.flats_of_rank(2)[0];
        assert_eq!(f.delete(line).unwrap().full_rank(), 3);
        assert!(matches!(
            f.minor(Subset::singleton(1), Subset::singleton(1)),
            Err(MdlError::Overlap(_))
        ));
        let a = f.contract(Subset::singleton(0)).unwrap().contract(Subset::singleton(3)).unwrap();
        let b = f.contract(Subset::from_indices([0, 3])).unwrap();
        assert!(a.agrees_on(&b, a.ground()));
    }

    #[test]
    fn parallel_extension_ranks() {
        let f = fano();
        let p = f.parallel_extension(&[2]).unwrap();
        assert_eq!(p.size(), 8);
        assert_eq!(p.rank(Subset::from_indices([2, 7])), 1);
        assert_eq!(p.closure(Subset::singleton(2)), Subset::from_indices([2, 7]));
    }

    struct Clamped;
    impl RankOracle for Clamped {
        fn index_size(&self) -> usize {
            6
        }
        fn ground(&self) -> Subset {
            Subset::full(6)
        }
        fn rank(&self, x: Subset) -> usize {
            // U(3,6) with {0,1} forced down to rank 1
            if x == Subset::from_indices([0, 1]) {
                1
            } else {
                x.len().min(3)
            }
        }
    }

    #[test]
    fn axioms() {
        assert!(validate_rank_axioms(&Matroid::uniform(3, 6).unwrap(), 0, 0).is_none());
        assert!(validate_rank_axioms(&fano(), 0, 0).is_none());
        let v = validate_rank_axioms(&Clamped, 0, 0).unwrap();
        assert!(v.sets.iter().any(|s| s.is_subset(Subset::full(3))));
    }
}
