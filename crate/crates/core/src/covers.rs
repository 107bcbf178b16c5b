//! Exact covering numbers `τ_a` and `τ^d`, d-thickness, the constructive
//! bounded cover for matroids without a large uniform minor, and the exact
//! contraction inequalities.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::caps;
use crate::error::{MdlError, Result};
use crate::matroid::Matroid;
use crate::numeric::{binom, int, rpow};
use crate::subset::Subset;

/// A covering number, possibly `+∞` when no qualifying cover exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoverNumber {
    Finite(u128),
    Infinite,
}

impl CoverNumber {
    pub fn finite(self) -> Option<u128> {
        match self {
            CoverNumber::Finite(v) => Some(v),
            CoverNumber::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, CoverNumber::Infinite)
    }

    pub fn at_least(self, v: u128) -> bool {
        match self {
            CoverNumber::Finite(x) => x >= v,
            CoverNumber::Infinite => true,
        }
    }
}

impl PartialOrd for CoverNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CoverNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        use CoverNumber::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Infinite) => Ordering::Less,
            (Infinite, Finite(_)) => Ordering::Greater,
            (Infinite, Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for CoverNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverNumber::Finite(v) => write!(f, "{v}"),
            CoverNumber::Infinite => write!(f, "inf"),
        }
    }
}

/// A collection of subsets whose union is the ground set.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Cover {
    pub sets: Vec<Subset>,
}

impl Cover {
    pub fn new(mut sets: Vec<Subset>) -> Self {
        sets.sort_by(|a, b| a.lex_cmp(*b));
        sets.dedup();
        Cover { sets }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn union(&self) -> Subset {
        self.sets.iter().fold(Subset::EMPTY, |acc, s| acc.union(*s))
    }

    pub fn covers(&self, m: &Matroid) -> bool {
        self.union() == m.ground() && self.sets.iter().all(|s| s.is_subset(m.ground()))
    }

    pub fn max_rank(&self, m: &Matroid) -> usize {
        self.sets.iter().map(|s| m.rank(*s)).max().unwrap_or(0)
    }
}

/// `wt^d_M(F) = Σ d^{r_M(F)}`.
pub fn cover_weight(m: &Matroid, cover: &Cover, d: u64) -> u128 {
    cover.sets.iter().map(|s| (d as u128).pow(m.rank(*s) as u32)).sum()
}

/// Minimum-cost set cover by branch and bound.
///
/// Branches on the uncovered element lying in the fewest candidates, tries
/// candidates cheapest-per-newly-covered first, and prunes with
/// `⌈|U| · min(cost/coverage)⌉`. The first optimum met in this fixed order
/// is kept, so certificates are deterministic.
struct SetCover<'a> {
    cands: &'a [(Subset, u128)],
    best_cost: u128,
    best: Vec<usize>,
    chosen: Vec<usize>,
    nodes: usize,
    node_cap: usize,
}

impl<'a> SetCover<'a> {
    fn solve(universe: Subset, cands: &'a [(Subset, u128)]) -> Result<Option<(u128, Vec<usize>)>> {
        if universe.is_empty() {
            return Ok(Some((0, Vec::new())));
        }
        let reach = cands.iter().fold(Subset::EMPTY, |acc, (s, _)| acc.union(*s));
        if !universe.is_subset(reach) {
            return Ok(None);
        }
        let mut solver = SetCover {
            cands,
            best_cost: u128::MAX,
            best: Vec::new(),
            chosen: Vec::new(),
            nodes: 0,
            node_cap: caps::scaled(caps::COVER_NODES),
        };
        solver.greedy(universe);
        solver.dfs(universe, 0)?;
        Ok(Some((solver.best_cost, solver.best)))
    }

    fn ratio_cmp(&self, i: usize, j: usize, uncovered: Subset) -> Ordering {
        let (si, ci) = self.cands[i];
        let (sj, cj) = self.cands[j];
        let ki = si.intersection(uncovered).len() as u128;
        let kj = sj.intersection(uncovered).len() as u128;
        (ci * kj)
            .cmp(&(cj * ki))
            .then(kj.cmp(&ki))
            .then(i.cmp(&j))
    }

    fn greedy(&mut self, universe: Subset) {
        let mut uncovered = universe;
        let mut cost = 0;
        let mut pick = Vec::new();
        while !uncovered.is_empty() {
            let i = (0..self.cands.len())
                .filter(|&i| !self.cands[i].0.is_disjoint(uncovered))
                .min_by(|&i, &j| self.ratio_cmp(i, j, uncovered))
                .expect("universe is coverable");
            cost += self.cands[i].1;
            uncovered = uncovered.difference(self.cands[i].0);
            pick.push(i);
        }
        self.best_cost = cost;
        self.best = pick;
    }

    fn lower_bound(&self, uncovered: Subset) -> u128 {
        let u = uncovered.len() as u128;
        self.cands
            .iter()
            .filter_map(|(s, c)| {
                let k = s.intersection(uncovered).len() as u128;
                (k > 0).then(|| (u * c).div_ceil(k))
            })
            .min()
            .unwrap_or(u128::MAX)
    }

    fn dfs(&mut self, uncovered: Subset, cost: u128) -> Result<()> {
        if uncovered.is_empty() {
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best = self.chosen.clone();
            }
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.node_cap {
            return Err(MdlError::TooLarge {
                what: "set-cover search nodes",
                count: self.nodes,
                cap: self.node_cap,
            });
        }
        if cost.saturating_add(self.lower_bound(uncovered)) >= self.best_cost {
            return Ok(());
        }
        // most constrained element
        let mut pivot = None;
        let mut fewest = usize::MAX;
        for e in uncovered.iter() {
            let k = self.cands.iter().filter(|(s, _)| s.contains(e)).count();
            if k < fewest {
                fewest = k;
                pivot = Some(e);
            }
        }
        let e = pivot.expect("uncovered is nonempty");
        let mut options: Vec<usize> = (0..self.cands.len()).filter(|&i| self.cands[i].0.contains(e)).collect();
        options.sort_by(|&i, &j| self.ratio_cmp(i, j, uncovered));
        for i in options {
            let (s, c) = self.cands[i];
            self.chosen.push(i);
            self.dfs(uncovered.difference(s), cost + c)?;
            self.chosen.pop();
        }
        Ok(())
    }
}

/// Drops candidates contained in another candidate of no greater cost.
fn prune_dominated(cands: &mut Vec<(Subset, u128)>) {
    let snapshot = cands.clone();
    let mut keep = Vec::with_capacity(cands.len());
    for (i, &(s, c)) in snapshot.iter().enumerate() {
        let dominated = snapshot.iter().enumerate().any(|(j, &(t, d))| {
            j != i && s.is_subset(t) && d <= c && (s != t || d < c || j < i)
        });
        if !dominated {
            keep.push((s, c));
        }
    }
    *cands = keep;
}

fn check_candidate_cap(count: usize) -> Result<()> {
    let cap = caps::scaled(caps::CANDIDATE_FLATS);
    if count > cap {
        Err(MdlError::TooLarge {
            what: "candidate flats",
            count,
            cap,
        })
    } else {
        Ok(())
    }
}

/// `τ_a(M)` with an optimal cover. Candidate sets are the rank-`a` flats:
/// any set of rank at most `a` lies in one, and replacing a cover member by
/// a superset of the same rank bound keeps the cover valid.
///
/// An empty ground set has `τ_a = 0`.
pub fn tau(m: &Matroid, a: usize) -> Result<(CoverNumber, Cover)> {
    let ground = m.ground();
    if ground.is_empty() {
        return Ok((CoverNumber::Finite(0), Cover::default()));
    }
    if m.full_rank() <= a {
        return Ok((CoverNumber::Finite(1), Cover::new(vec![ground])));
    }
    if a == 0 {
        // only loops have rank 0, and a nonloop exists here
        return Ok((CoverNumber::Infinite, Cover::default()));
    }
    let flats = m.flats_of_rank(a);
    check_candidate_cap(flats.len())?;
    let mut cands: Vec<(Subset, u128)> = flats.into_iter().map(|f| (f, 1)).collect();
    prune_dominated(&mut cands);
    let (cost, picks) = SetCover::solve(ground, &cands)?.expect("rank-a flats cover the ground set");
    let cover = Cover::new(picks.into_iter().map(|i| cands[i].0).collect());
    Ok((CoverNumber::Finite(cost), cover))
}

/// `τ^d(M)` with a d-minimal cover drawn from the flats of every rank.
pub fn tau_weighted(m: &Matroid, d: u64) -> Result<(u128, Cover)> {
    if d == 0 {
        return Err(MdlError::Precondition("weighted covers need d >= 1".into()));
    }
    let ground = m.ground();
    if ground.is_empty() {
        return Ok((0, Cover::default()));
    }
    let levels = m.flats_up_to_rank(m.full_rank());
    let count: usize = levels.iter().map(Vec::len).sum();
    check_candidate_cap(count)?;
    let mut cands = Vec::with_capacity(count);
    for (k, flats) in levels.iter().enumerate() {
        let w = (d as u128)
            .checked_pow(k as u32)
            .ok_or(MdlError::TooLarge {
                what: "cover weight d^rank",
                count: k,
                cap: 0,
            })?;
        cands.extend(flats.iter().map(|&f| (f, w)));
    }
    prune_dominated(&mut cands);
    let (cost, picks) = SetCover::solve(ground, &cands)?.expect("E(M) is a flat");
    Ok((cost, Cover::new(picks.into_iter().map(|i| cands[i].0).collect())))
}

/// Whether `M|X` is d-thick: `τ_{r(X)-1}(M|X) >= d`. A rank-0 set cannot be
/// covered by sets of smaller rank, so it is d-thick for every d.
pub fn is_d_thick(m: &Matroid, x: Subset, d: u64) -> Result<bool> {
    m.check_subset(x)?;
    if x.is_empty() {
        return Err(MdlError::Precondition("thickness of an empty set".into()));
    }
    let k = m.rank(x);
    if k == 0 {
        return Ok(true);
    }
    let (t, _) = tau(&m.restrict(x)?, k - 1)?;
    Ok(t.at_least(d as u128))
}

/// Constructive cover by rank-≤`a` sets of size at most
/// `binom(b-1, a)^{r(M)-a}` for a matroid with no `U_{a+1,b}`-minor.
///
/// Rank `a+1`: grow a maximal `X` with `M|X` uniform of rank `a+1` and
/// cover by the closures of its `a`-subsets. Higher rank: contract a nonloop
/// `e`, cover `M/e`, lift each set by adding `e`, and refine the lifted sets
/// of rank `a+1` by the base case. A uniform restriction of size `b` met on
/// the way is returned as an error carrying the witness.
pub fn kdensity_cover(m: &Matroid, a: usize, b: usize) -> Result<Cover> {
    if a == 0 || a >= b {
        return Err(MdlError::Precondition(format!("need 1 <= a < b, got a={a}, b={b}")));
    }
    Ok(Cover::new(kdensity_sets(m, a, b)?))
}

fn kdensity_sets(m: &Matroid, a: usize, b: usize) -> Result<Vec<Subset>> {
    let ground = m.ground();
    let r = m.full_rank();
    if ground.is_empty() {
        return Ok(Vec::new());
    }
    if r <= a {
        return Ok(vec![ground]);
    }
    if r == a + 1 {
        return uniform_refinement(m, ground, a, b);
    }
    let e = m.nonloops().min().expect("rank > 0");
    let lower = kdensity_sets(&m.contract(Subset::singleton(e))?, a, b)?;
    let mut out = Vec::new();
    for f in lower {
        let lifted = f.with(e);
        if m.rank(lifted) <= a {
            out.push(lifted);
        } else {
            out.extend(uniform_refinement(m, lifted, a, b)?);
        }
    }
    Ok(out)
}

/// Base case on a rank-`(a+1)` set `s`.
fn uniform_refinement(m: &Matroid, s: Subset, a: usize, b: usize) -> Result<Vec<Subset>> {
    debug_assert_eq!(m.rank(s), a + 1);
    let mut x = m.basis_of(s);
    for e in s.difference(x).iter() {
        let extends = x.subsets_of_size(a).all(|t| m.rank(t.with(e)) == a + 1);
        if extends {
            x.insert(e);
            if x.len() >= b {
                let witness: Subset = x.iter().take(b).collect();
                return Err(MdlError::UniformRestriction {
                    rank: a + 1,
                    size: b,
                    witness,
                });
            }
        }
    }
    Ok(x.subsets_of_size(a).map(|t| m.closure(t).intersection(s)).collect())
}

/// One side of an exact inequality `lhs >= rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inequality {
    pub lhs: BigRational,
    pub rhs: BigRational,
}

impl Inequality {
    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.holds() { ">=" } else { "<" };
        write!(f, "{} {op} {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug)]
pub struct ContractionReport {
    pub rank_c: usize,
    pub tau_a: u128,
    pub tau_a_contracted: u128,
    pub tau_d: u128,
    pub tau_d_contracted: u128,
    /// `τ_a(M/C) >= binom(b-1,a)^{-r(C)} τ_a(M)`; `None` when `C = E(M)`.
    pub covering: Option<Inequality>,
    /// `τ^d(M/C) >= d^{-r(C)} τ^d(M)`; `None` when `C = E(M)`.
    pub weighted: Option<Inequality>,
}

impl ContractionReport {
    pub fn holds(&self) -> bool {
        self.covering.as_ref().map_or(true, Inequality::holds) && self.weighted.as_ref().map_or(true, Inequality::holds)
    }
}

/// Computes both sides of the contraction inequalities for `τ_a` and `τ^d`
/// exactly. With `C = E(M)` the contracted matroid is empty, its covering
/// numbers are 0 by convention, and the inequalities are reported as not
/// applicable.
pub fn check_contraction_inequalities(m: &Matroid, c: Subset, a: usize, b: usize, d: u64) -> Result<ContractionReport> {
    m.check_subset(c)?;
    if a == 0 || a >= b {
        return Err(MdlError::Precondition(format!("need 1 <= a < b, got a={a}, b={b}")));
    }
    let mc = m.contract(c)?;
    let rc = m.rank(c) as i64;
    let finite = |t: CoverNumber| t.finite().expect("a >= 1 gives finite covers");
    let tau_a = finite(tau(m, a)?.0);
    let tau_a_c = finite(tau(&mc, a)?.0);
    let tau_d = tau_weighted(m, d)?.0;
    let tau_d_c = tau_weighted(&mc, d)?.0;
    let applicable = !mc.ground().is_empty() || m.ground().is_empty();
    let bc = BigRational::from_integer(binom(b - 1, a));
    let covering = applicable.then(|| Inequality {
        lhs: int(tau_a_c),
        rhs: rpow(&bc, -rc) * int(tau_a),
    });
    let weighted = applicable.then(|| Inequality {
        lhs: int(tau_d_c),
        rhs: rpow(&int(d), -rc) * int(tau_d),
    });
    Ok(ContractionReport {
        rank_c: rc as usize,
        tau_a,
        tau_a_contracted: tau_a_c,
        tau_d,
        tau_d_contracted: tau_d_c,
        covering,
        weighted,
    })
}

/// Findings for one d-minimal cover against the weighted-cover structure
/// statements: members are d-thick and of rank at most `a`, and
/// `τ_a <= τ^d <= d^a τ_a`.
#[derive(Clone, Debug)]
pub struct WeightedCoverReport {
    pub tau_a: u128,
    pub tau_d: u128,
    pub cover: Cover,
    pub thin_members: Vec<Subset>,
    pub high_rank_members: Vec<Subset>,
    pub sandwich: bool,
}

impl WeightedCoverReport {
    pub fn holds(&self) -> bool {
        self.thin_members.is_empty() && self.high_rank_members.is_empty() && self.sandwich
    }
}

pub fn check_weighted_cover(m: &Matroid, a: usize, d: u64) -> Result<WeightedCoverReport> {
    let (tau_d, cover) = tau_weighted(m, d)?;
    let tau_a = tau(m, a)?.0.finite().unwrap_or(u128::MAX);
    let mut thin = Vec::new();
    let mut high = Vec::new();
    for &f in &cover.sets {
        if !is_d_thick(m, f, d)? {
            thin.push(f);
        }
        if m.rank(f) > a {
            high.push(f);
        }
    }
    let upper = BigInt::from(d).pow(a as u32) * BigInt::from(tau_a);
    let sandwich = tau_a <= tau_d && BigInt::from(tau_d) <= upper;
    Ok(WeightedCoverReport {
        tau_a,
        tau_d,
        cover,
        thin_members: thin,
        high_rank_members: high,
        sandwich,
    })
}

/// `τ^d(M) >= α q^{r(M)}` as an exact comparison.
pub fn meets_density(value: &BigRational, alpha: &BigRational, q: usize, rank: usize) -> bool {
    *value >= alpha * BigRational::from_integer(BigInt::from(q).pow(rank as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn u(r: usize, n: usize) -> Matroid {
        Matroid::uniform(r, n).unwrap()
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(&u(2, 4), 1).unwrap().0, CoverNumber::Finite(4));
        let pg32 = catalog::pg(4, 2).unwrap();
        let (t, cert) = tau(&pg32, 2).unwrap();
        assert_eq!(t, CoverNumber::Finite(5));
        assert!(cert.covers(&pg32));
        assert_eq!(cert.len(), 5);
        assert!(cert.sets.iter().all(|s| pg32.rank(*s) <= 2));
        assert_eq!(tau(&u(3, 5), 3).unwrap().0, CoverNumber::Finite(1));
        assert_eq!(tau(&u(2, 5), 0).unwrap().0, CoverNumber::Infinite);
        assert_eq!(tau(&u(0, 3), 0).unwrap().0, CoverNumber::Finite(1));
        assert_eq!(tau(&u(0, 0), 2).unwrap().0, CoverNumber::Finite(0));
    }

    #[test]
    fn weighted_examples() {
        let m = u(2, 4);
        assert_eq!(tau_weighted(&m, 2).unwrap().0, 4);
        let (w, cert) = tau_weighted(&m, 5).unwrap();
        assert_eq!(w, 20);
        assert_eq!(cover_weight(&m, &cert, 5), 20);
        assert_eq!(tau_weighted(&m, 1).unwrap().0, 1);
        assert!(tau_weighted(&m, 0).is_err());
    }

    #[test]
    fn weights() {
        let m = u(2, 4);
        let whole = Cover::new(vec![m.ground()]);
        assert_eq!(cover_weight(&m, &whole, 3), 9);
        let points = Cover::new((0..4).map(Subset::singleton).collect());
        assert_eq!(cover_weight(&m, &points, 3), 12);
        assert_eq!(cover_weight(&m, &points, 1), 4);
    }

    #[test]
    fn thickness() {
        let m = u(2, 4);
        assert!(is_d_thick(&m, Subset::singleton(0), 1000).unwrap());
        assert!(is_d_thick(&m, m.ground(), 4).unwrap());
        assert!(!is_d_thick(&m, m.ground(), 5).unwrap());
        assert!(is_d_thick(&u(2, 5), Subset::full(5), 5).unwrap());
    }

    #[test]
    fn kdensity_examples() {
        let fano = catalog::fano();
        let c = kdensity_cover(&fano, 1, 4).unwrap();
        assert!(c.covers(&fano));
        assert!(c.len() <= 9 && c.len() >= 7);
        assert!(c.max_rank(&fano) <= 1);

        let m = u(2, 4);
        let c = kdensity_cover(&m, 1, 5).unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(kdensity_cover(&u(1, 3), 1, 3).unwrap().sets, vec![Subset::full(3)]);

        match kdensity_cover(&u(2, 6), 1, 5) {
            Err(MdlError::UniformRestriction { witness, .. }) => assert_eq!(witness.len(), 5),
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn contraction_examples() {
        let fano = catalog::fano();
        let r = check_contraction_inequalities(&fano, Subset::EMPTY, 1, 4, 3).unwrap();
        let cov = r.covering.as_ref().unwrap();
        assert_eq!(cov.lhs, cov.rhs);
        assert!(r.holds());

        let r = check_contraction_inequalities(&fano, Subset::singleton(0), 1, 4, 2).unwrap();
        assert_eq!(r.tau_a_contracted, 3);
        assert_eq!(r.covering.unwrap().rhs, BigRational::new(7.into(), 3.into()));

        let r = check_contraction_inequalities(&u(2, 4), Subset::singleton(0), 1, 5, 2).unwrap();
        assert_eq!(r.tau_d_contracted, 2);
        assert_eq!(r.weighted.unwrap().rhs, int(2));

        let r = check_contraction_inequalities(&u(2, 4), Subset::full(4), 1, 5, 2).unwrap();
        assert!(r.covering.is_none());
    }

    #[test]
    fn weighted_structure_on_fano() {
        let r = check_weighted_cover(&catalog::fano(), 1, 5).unwrap();
        assert!(r.holds(), "{r:?}");
        assert_eq!(r.tau_d, 35);
    }
}
