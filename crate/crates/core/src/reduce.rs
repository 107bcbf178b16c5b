//! Connectivity and roundness reductions.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::covers::{meets_density, tau, CoverNumber};
use crate::error::{MdlError, Result};
use crate::matroid::Matroid;
use crate::numeric::{binom, int, rpow};
use crate::subset::Subset;

fn tau_rational(m: &Matroid, a: usize) -> Result<BigRational> {
    match tau(m, a)?.0 {
        CoverNumber::Finite(v) => Ok(int(BigInt::from(v))),
        CoverNumber::Infinite => Err(MdlError::Precondition(format!("a = {a} sets cannot cover the nonloops"))),
    }
}

#[derive(Clone, Debug)]
pub struct ConnReduction {
    pub x: Subset,
    /// `B - B_Y`; empty on the trivial branch.
    pub contracted: Subset,
    pub conn: usize,
    pub tau_x: BigRational,
    pub tau_m: BigRational,
    /// `binom(b-1, a)^{a - r(Y)}`.
    pub factor: BigRational,
}

impl ConnReduction {
    pub fn bound(&self) -> BigRational {
        self.factor.clone() * self.tau_m.clone()
    }

    pub fn conn_holds(&self, a: usize) -> bool {
        self.conn <= a
    }

    pub fn density_holds(&self) -> bool {
        self.tau_x >= self.bound()
    }

    pub fn holds(&self, a: usize) -> bool {
        self.conn_holds(a) && self.density_holds()
    }
}

/// Finds `X` with `⊓(X, Y) <= a` and `τ_a(M|X) >= binom(b-1,a)^{a-r(Y)} τ_a(M)`
/// by covering `M / (B - B_Y)` minimally and keeping the member whose
/// preimage (with `B - B_Y` added back) has the largest `τ_a`.
///
/// Both bounds are recomputed exactly and reported; the density bound
/// relies on `M` having no `U_{a+1,b}`-minor, which is not checked here.
/// When `r(Y) <= a` the answer is `E(M)`; the density bound then holds only
/// for `r(Y) = a` (or `binom(b-1,a) = 1`).
pub fn reduce_connectivity(m: &Matroid, y: Subset, a: usize, b: usize) -> Result<ConnReduction> {
    m.check_subset(y)?;
    if a == 0 || a >= b {
        return Err(MdlError::Precondition(format!("need 1 <= a < b, got a={a}, b={b}")));
    }
    let ry = m.rank(y);
    let factor = rpow(&int(binom(b - 1, a)), a as i64 - ry as i64);
    let tau_m = tau_rational(m, a)?;
    if ry <= a {
        let x = m.ground();
        return Ok(ConnReduction {
            x,
            contracted: Subset::EMPTY,
            conn: m.local_conn(x, y),
            tau_x: tau_m.clone(),
            tau_m,
            factor,
        });
    }
    let by = m.basis_of(y);
    let basis = m.extend_to_basis(by, m.ground());
    let c = basis.difference(by);
    let mc = m.contract(c)?;
    let (_, cover) = tau(&mc, a)?;
    let mut best: Option<(BigRational, Subset)> = None;
    for f in cover.sets {
        let x = f.union(c);
        let tx = tau_rational(&m.restrict(x)?, a)?;
        let better = match &best {
            None => true,
            Some((bt, bx)) => tx > *bt || (tx == *bt && (x.len() > bx.len() || (x.len() == bx.len() && x.lex_cmp(*bx).is_lt()))),
        };
        if better {
            best = Some((tx, x));
        }
    }
    let (tau_x, x) = best.ok_or_else(|| MdlError::Precondition("empty cover of the contraction".into()))?;
    Ok(ConnReduction {
        x,
        contracted: c,
        conn: m.local_conn(x, y),
        tau_x,
        tau_m,
        factor,
    })
}

#[derive(Clone, Debug)]
pub struct RoundRestriction {
    pub n: Matroid,
    pub ground: Subset,
    pub tau: BigRational,
    /// ground sets visited, outermost first
    pub path: Vec<Subset>,
}

/// Descends from `m` to a weakly round restriction `N` with
/// `τ_a(N) >= α q^{r(N)}`, splitting along `(E - H, H)` for the hyperplane
/// `H` whose complement has least rank and keeping the side with larger
/// `τ_a` (the hyperplane side on ties).
pub fn weakly_round_restriction(m: &Matroid, a: usize, q: usize, alpha: &BigRational) -> Result<RoundRestriction> {
    if a == 0 || q < 2 || *alpha < int(0) {
        return Err(MdlError::Precondition("need a >= 1, q >= 2 and alpha >= 0".into()));
    }
    let mut cur = m.clone();
    let mut t = tau_rational(&cur, a)?;
    if !meets_density(&t, alpha, q, cur.full_rank()) {
        return Err(MdlError::Precondition(format!(
            "tau_{a}(M) = {t} is below alpha q^r(M) = {}",
            alpha.clone() * int(BigInt::from(q).pow(cur.full_rank() as u32))
        )));
    }
    let mut path = vec![cur.ground()];
    while let Some((low, hyper)) = cur.weak_roundness_violation() {
        let ma = cur.restrict(low)?;
        let mb = cur.restrict(hyper)?;
        let ta = tau_rational(&ma, a)?;
        let tb = tau_rational(&mb, a)?;
        let (next, tn) = if ta > tb { (ma, ta) } else { (mb, tb) };
        let shrank = next.ground().len() < cur.ground().len() || next.full_rank() < cur.full_rank();
        if !shrank || !meets_density(&tn, alpha, q, next.full_rank()) {
            return Err(MdlError::InvalidCertificate(format!(
                "split on {} kept tau = {tn} at rank {}",
                cur.ground(),
                next.full_rank()
            )));
        }
        cur = next;
        t = tn;
        path.push(cur.ground());
    }
    Ok(RoundRestriction {
        ground: cur.ground(),
        n: cur,
        tau: t,
        path,
    })
}

const RESTRICTION_CHECK_CAP: usize = 12;

#[derive(Clone, Debug)]
pub struct SpanInto {
    pub contract: Subset,
    pub n: Matroid,
}

fn same_restriction(m: &Matroid, n: &Matroid, x: Subset) -> bool {
    x.subsets().all(|s| m.rank(s) == n.rank(s))
}

/// Contracts a maximal `C ⊆ E(M) - (X ∪ Y)` keeping `M|X` and `M|Y`, which
/// makes `Y` spanning when `M` is weakly round and `r(X) < r(Y)`.
pub fn span_into(m: &Matroid, x: Subset, y: Subset) -> Result<SpanInto> {
    m.check_subset(x)?;
    m.check_subset(y)?;
    for (name, s) in [("X", x), ("Y", y)] {
        if s.len() > RESTRICTION_CHECK_CAP {
            return Err(MdlError::TooLarge {
                what: if name == "X" { "elements of X" } else { "elements of Y" },
                count: s.len(),
                cap: RESTRICTION_CHECK_CAP,
            });
        }
    }
    if m.rank(x) >= m.rank(y) {
        return Err(MdlError::Precondition(format!("need r(X) < r(Y), got {} and {}", m.rank(x), m.rank(y))));
    }
    if !m.is_weakly_round() {
        return Err(MdlError::Precondition("M is not weakly round".into()));
    }
    let mut c = Subset::EMPTY;
    let mut n = m.clone();
    for e in m.ground().difference(x.union(y)).iter() {
        let trial = m.contract(c.with(e))?;
        if same_restriction(m, &trial, x) && same_restriction(m, &trial, y) {
            c.insert(e);
            n = trial;
        }
    }
    if !n.spans(y) {
        return Err(MdlError::InvalidCertificate("Y does not span the contraction".into()));
    }
    if n.closure(x).union(n.closure(y)) != n.ground() {
        return Err(MdlError::InvalidCertificate("contraction is not covered by cl(X) and cl(Y)".into()));
    }
    Ok(SpanInto { contract: c, n })
}
