//! Stack certificates and the procedures that build, move and consume them.
//!
//! A `(q,h,t)`-stack on `F_1, .., F_h` asks that each layer
//! `(M / (F_1 ∪ .. ∪ F_{i-1}))|F_i` has rank in `2..=t` and is not
//! `GF(q)`-representable.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::caps;
use crate::covers::tau_weighted;
use crate::error::{MdlError, Result};
use crate::gf::FiniteField;
use crate::matroid::Matroid;
use crate::numeric::{binom, int};
use crate::rep::{is_pg, is_representable};
use crate::subset::Subset;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackCert {
    pub parts: Vec<Subset>,
    pub q: usize,
    pub t: usize,
}

impl StackCert {
    pub fn new(parts: Vec<Subset>, q: usize, t: usize) -> Self {
        StackCert { parts, q, t }
    }

    pub fn height(&self) -> usize {
        self.parts.len()
    }

    /// `E(S)`.
    pub fn union(&self) -> Subset {
        self.parts.iter().fold(Subset::EMPTY, |acc, p| acc.union(*p))
    }

    /// The first `j` layers.
    pub fn prefix(&self, j: usize) -> StackCert {
        StackCert::new(self.parts[..j.min(self.parts.len())].to_vec(), self.q, self.t)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("stack q={} t={}\n", self.q, self.t);
        for p in &self.parts {
            let idx: Vec<String> = p.iter().map(|i| i.to_string()).collect();
            s.push_str(&format!("part {}\n", idx.join(" ")));
        }
        s
    }

    pub fn parse(text: &str) -> Result<StackCert> {
        let perr = |line: usize, msg: &str| MdlError::Parse {
            line,
            msg: msg.to_string(),
        };
        let mut header: Option<(usize, usize)> = None;
        let mut parts = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut toks = line.split_whitespace();
            match toks.next() {
                Some("stack") => {
                    let mut q = None;
                    let mut t = None;
                    for tok in toks {
                        match tok.split_once('=') {
                            Some(("q", v)) => q = v.parse().ok(),
                            Some(("t", v)) => t = v.parse().ok(),
                            _ => return Err(perr(i + 1, "expected q=<q> t=<t>")),
                        }
                    }
                    match (q, t) {
                        (Some(q), Some(t)) => header = Some((q, t)),
                        _ => return Err(perr(i + 1, "stack header needs q=<q> and t=<t>")),
                    }
                }
                Some("part") => {
                    if header.is_none() {
                        return Err(perr(i + 1, "part before stack header"));
                    }
                    let idx = toks
                        .map(|t| t.parse::<usize>().map_err(|_| perr(i + 1, "part indices must be integers")))
                        .collect::<Result<Vec<_>>>()?;
                    if idx.iter().any(|&e| e >= crate::subset::MAX_ELEMENTS) {
                        return Err(perr(i + 1, "part index out of range"));
                    }
                    parts.push(idx.into_iter().collect());
                }
                _ => return Err(perr(i + 1, "expected `stack` or `part`")),
            }
        }
        let (q, t) = header.ok_or_else(|| perr(0, "missing stack header"))?;
        Ok(StackCert::new(parts, q, t))
    }
}

impl fmt::Display for StackCert {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Rank of each layer in the contraction by the earlier layers.
pub fn layer_ranks(m: &Matroid, parts: &[Subset]) -> Vec<usize> {
    let mut prev = Subset::EMPTY;
    parts
        .iter()
        .map(|&p| {
            let r = m.rank(prev.union(p)) - m.rank(prev);
            prev = prev.union(p);
            r
        })
        .collect()
}

/// The first clause `cert` breaks when `m` itself is read as the stack, or
/// `None` when it is a valid `(q,h,t)`-stack.
pub fn stack_violation(m: &Matroid, cert: &StackCert) -> Result<Option<String>> {
    FiniteField::new(cert.q)?;
    let mut seen = Subset::EMPTY;
    for (i, &p) in cert.parts.iter().enumerate() {
        if !p.is_subset(m.ground()) {
            return Ok(Some(format!("part {} is not inside the ground set", i + 1)));
        }
        if !p.is_disjoint(seen) {
            return Ok(Some(format!("part {} meets an earlier part", i + 1)));
        }
        seen = seen.union(p);
    }
    if !m.spans(seen) {
        return Ok(Some("the union of the parts does not span".into()));
    }
    let mut prev = Subset::EMPTY;
    for (i, &p) in cert.parts.iter().enumerate() {
        let layer = m.minor(prev, m.ground().difference(prev).difference(p))?;
        let r = layer.full_rank();
        if r < 2 {
            return Ok(Some(format!("part {} has rank {r} < 2 in its contraction", i + 1)));
        }
        if r > cert.t {
            return Ok(Some(format!("part {} has rank {r} > t = {}", i + 1, cert.t)));
        }
        if is_representable(&layer, cert.q)?.is_some() {
            return Ok(Some(format!("part {} is GF({})-representable in its contraction", i + 1, cert.q)));
        }
        prev = prev.union(p);
    }
    Ok(None)
}

/// Whether `m` is a stack with the layers of `cert`.
pub fn verify_stack(m: &Matroid, cert: &StackCert) -> Result<bool> {
    Ok(stack_violation(m, cert)?.is_none())
}

/// The first broken clause when `cert` is read as a stack restriction
/// `m|E(S)`.
pub fn stack_restriction_violation(m: &Matroid, cert: &StackCert) -> Result<Option<String>> {
    let u = cert.union();
    if !u.is_subset(m.ground()) {
        return Ok(Some("the parts are not inside the ground set".into()));
    }
    stack_violation(&m.restrict(u)?, cert)
}

/// Whether `m|E(S)` is a stack with the layers of `cert`.
pub fn verify_stack_restriction(m: &Matroid, cert: &StackCert) -> Result<bool> {
    Ok(stack_restriction_violation(m, cert)?.is_none())
}

fn require_restriction(m: &Matroid, cert: &StackCert, what: &str) -> Result<()> {
    match stack_restriction_violation(m, cert)? {
        None => Ok(()),
        Some(v) => Err(MdlError::InvalidCertificate(format!("{what}: {v}"))),
    }
}

struct Finder<'a> {
    m: &'a Matroid,
    q: usize,
    t: usize,
    evals: usize,
    cap: usize,
    dead: HashSet<(Subset, usize)>,
}

impl Finder<'_> {
    fn search(&mut self, used: Subset, remaining: usize, parts: &mut Vec<Subset>) -> Result<bool> {
        if remaining == 0 {
            return Ok(true);
        }
        let cur = self.m.contract(used)?;
        if cur.full_rank() < 2 * remaining {
            return Ok(false);
        }
        let key = (self.m.closure(used), remaining);
        if self.dead.contains(&key) {
            return Ok(false);
        }
        let loops = cur.loops();
        let levels = cur.flats_up_to_rank(self.t);
        for level in levels.iter().skip(2) {
            for &flat in level {
                self.evals += 1;
                if self.evals > self.cap {
                    return Err(MdlError::TooLarge {
                        what: "stack layer evaluations",
                        count: self.evals,
                        cap: self.cap,
                    });
                }
                let layer = flat.difference(loops);
                if is_representable(&cur.restrict(layer)?, self.q)?.is_some() {
                    continue;
                }
                parts.push(layer);
                if self.search(used.union(layer), remaining - 1, parts)? {
                    return Ok(true);
                }
                parts.pop();
            }
        }
        self.dead.insert(key);
        Ok(false)
    }
}

/// Searches for a `(q,h,t)`-stack restriction whose layers are flats (less
/// loops) of rank `2..=t` in the successive contractions.
///
/// `None` means no stack exists inside that candidate universe; stacks whose
/// layers are not flats of the contraction are not ruled out.
pub fn find_stack(m: &Matroid, q: usize, h: usize, t: usize) -> Result<Option<StackCert>> {
    FiniteField::new(q)?;
    let mut finder = Finder {
        m,
        q,
        t,
        evals: 0,
        cap: caps::scaled(caps::STACK_EVALUATIONS),
        dead: HashSet::new(),
    };
    let mut parts = Vec::new();
    if !finder.search(Subset::EMPTY, h, &mut parts)? {
        return Ok(None);
    }
    let cert = StackCert::new(parts, q, t);
    require_restriction(m, &cert, "search result")?;
    Ok(Some(cert))
}

fn project_parts(m: &Matroid, c: Subset, k: usize, parts: &[Subset]) -> Result<Vec<Subset>> {
    let head = parts[..k].to_vec();
    if m.rank(c) == 0 {
        return Ok(head);
    }
    let f = head.iter().fold(Subset::EMPTY, |acc, p| acc.union(*p));
    if m.are_skew(c, f) {
        return Ok(head);
    }
    let mf = m.contract(f)?;
    debug_assert!(mf.rank(c) < m.rank(c));
    let mut sub = project_parts(&mf, c, k, &parts[k..])?;
    if let Some(first) = sub.first_mut() {
        *first = first.union(f);
    }
    Ok(sub)
}

/// Given a `(k(r(C)+1), q)`-stack restriction `cert` of `m`, returns a
/// `(k,q)`-stack restriction of `M / C` inside `E(S)`.
///
/// When `C` meets `E(S)`, the shared elements are contracted through
/// parallel copies instead, so the stack layers stay disjoint from the
/// contracted set; afterwards they are loops and are dropped from the layers.
pub fn project_stack(m: &Matroid, c: Subset, k: usize, cert: &StackCert) -> Result<StackCert> {
    m.check_subset(c)?;
    require_restriction(m, cert, "input")?;
    let need = k * (m.rank(c) + 1);
    if cert.height() < need {
        return Err(MdlError::Precondition(format!(
            "projection needs {need} layers, certificate has {}",
            cert.height()
        )));
    }
    let es = cert.union();
    let shared = c.intersection(es);
    let (aug, c_aug) = if shared.is_empty() {
        (m.clone(), c)
    } else {
        let aug = m.parallel_extension(&shared.to_vec())?;
        let copies: Subset = (m.size()..m.size() + shared.len()).collect();
        (aug, c.difference(shared).union(copies))
    };
    let parts = project_parts(&aug, c_aug, k, &cert.parts[..need])?;
    let parts: Vec<Subset> = parts.into_iter().map(|p| p.difference(c)).collect();
    let mc = m.contract(c)?;
    let t = layer_ranks(&mc, &parts).into_iter().max().unwrap_or(0).max(2);
    let out = StackCert::new(parts, cert.q, t);
    require_restriction(&mc, &out, "projected stack")?;
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct SkewedStack {
    pub contract: Subset,
    pub cert: StackCert,
}

/// Given an `((a+1)h, q, t)`-stack restriction `cert` with
/// `⊓(X, E(S)) <= a`, finds `C ⊆ E(S)` and an `(h,q,t)`-stack restriction of
/// `M / C` skew to `X - C`.
///
/// Each round contracts the next `h` layers while `X - C` still meets them;
/// `⊓(X - C, E(S) - C)` drops by `⊓(X - C, F)` per round, so at most `a`
/// rounds contract anything.
pub fn skew_stack(m: &Matroid, cert: &StackCert, x: Subset, a: usize, h: usize) -> Result<SkewedStack> {
    m.check_subset(x)?;
    if h == 0 {
        return Err(MdlError::Precondition("h must be at least 1".into()));
    }
    require_restriction(m, cert, "input")?;
    if cert.height() < (a + 1) * h {
        return Err(MdlError::Precondition(format!(
            "need {} layers, certificate has {}",
            (a + 1) * h,
            cert.height()
        )));
    }
    let es = cert.union();
    let conn = m.local_conn(x, es);
    if conn > a {
        return Err(MdlError::Precondition(format!("local connectivity {conn} exceeds a = {a}")));
    }
    let union_of = |ps: &[Subset]| ps.iter().fold(Subset::EMPTY, |acc, p| acc.union(*p));
    let mut c = Subset::EMPTY;
    let mut measure = conn;
    for round in 0..=a {
        let s = round * h;
        let mc = m.contract(c)?;
        let f = union_of(&cert.parts[s..s + h]);
        let xc = x.difference(c);
        if mc.are_skew(xc, f) {
            let out = StackCert::new(cert.parts[s..s + h].to_vec(), cert.q, cert.t);
            require_restriction(&mc, &out, "skewed stack")?;
            if mc.local_conn(xc, out.union()) != 0 {
                return Err(MdlError::InvalidCertificate("result is not skew to X".into()));
            }
            return Ok(SkewedStack { contract: c, cert: out });
        }
        c = c.union(f);
        let rest = union_of(&cert.parts[s + h..]);
        let next = m.contract(c)?.local_conn(x.difference(c), rest);
        if next >= measure {
            return Err(MdlError::InvalidCertificate(format!(
                "local connectivity did not drop ({measure} -> {next})"
            )));
        }
        measure = next;
    }
    Err(MdlError::Precondition("ran out of layers before reaching skewness".into()))
}

/// The parameters `(a, b, q, d, t, h, λ)` shared by the density procedures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityParams {
    pub a: usize,
    pub b: usize,
    pub q: usize,
    pub d: u64,
    pub t: usize,
    pub h: usize,
    pub lambda: BigRational,
}

impl DensityParams {
    pub fn check(&self) -> Result<()> {
        if self.a == 0 || self.a >= self.b {
            return Err(MdlError::Precondition(format!("need 1 <= a < b, got a={}, b={}", self.a, self.b)));
        }
        if self.q < 2 {
            return Err(MdlError::Precondition("need q >= 2".into()));
        }
        if self.d == 0 || self.t == 0 {
            return Err(MdlError::Precondition("need d >= 1 and t >= 1".into()));
        }
        if self.lambda < int(0) {
            return Err(MdlError::Precondition("need lambda >= 0".into()));
        }
        Ok(())
    }
}

fn alpha_rec(a: usize, d: u64, q: usize, h: usize, lambda: BigRational) -> BigRational {
    if h == 0 {
        return lambda;
    }
    let step_d = int(BigInt::from(d).pow(a as u32 + 1));
    let step_q = int(BigInt::from(q).pow(a as u32 + 1));
    step_d * alpha_rec(a, d, q, h - 1, lambda * step_q)
}

/// The density threshold of the stack extraction, by its recursion
/// `α(0, λ) = λ`, `α(h, λ) = d^{a+1} α(h-1, λ q^{a+1})`.
pub fn alpha_getstack(p: &DensityParams) -> BigRational {
    alpha_rec(p.a, p.d, p.q, p.h, p.lambda.clone())
}

/// `λ (dq)^{(a+1)h}`.
pub fn alpha_closed_form(p: &DensityParams) -> BigRational {
    let base = BigInt::from(p.d) * BigInt::from(p.q);
    p.lambda.clone() * int(base.pow(((p.a + 1) * p.h) as u32))
}

/// Supplies `τ^d` values to the stack extraction.
pub trait DensityOracle: Sync {
    fn tau_d(&self, m: &Matroid, d: u64) -> Result<BigRational>;
}

/// Exact `τ^d` by weighted set cover.
pub struct ExactDensity;

impl DensityOracle for ExactDensity {
    fn tau_d(&self, m: &Matroid, d: u64) -> Result<BigRational> {
        Ok(int(tau_weighted(m, d)?.0))
    }
}

/// A fixed multiple of the exact value; lets the recursion run on desk-scale
/// matroids whose true density is far below the premise.
pub struct ScaledDensity(pub BigRational);

impl DensityOracle for ScaledDensity {
    fn tau_d(&self, m: &Matroid, d: u64) -> Result<BigRational> {
        Ok(self.0.clone() * ExactDensity.tau_d(m, d)?)
    }
}

impl<F> DensityOracle for F
where
    F: Fn(&Matroid, u64) -> Result<BigRational> + Sync,
{
    fn tau_d(&self, m: &Matroid, d: u64) -> Result<BigRational> {
        self(m, d)
    }
}

/// Compares `oracle` against exact `τ^d` on each sample.
pub fn spot_check(oracle: &dyn DensityOracle, samples: &[Matroid], d: u64) -> Result<()> {
    for m in samples {
        let claimed = oracle.tau_d(m, d)?;
        let exact = ExactDensity.tau_d(m, d)?;
        if claimed != exact {
            return Err(MdlError::OracleInconsistent {
                oracle: claimed.to_string(),
                exact: exact.to_string(),
            });
        }
    }
    Ok(())
}

fn density_target(alpha: &BigRational, q: usize, rank: usize) -> BigRational {
    alpha.clone() * int(BigInt::from(q).pow(rank as u32))
}

/// Which branch of the case analysis produced the claim set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClaimCase {
    /// every minimal-cover member is a point; a line through `e` is long
    LongLine,
    /// a minimal cover of `M` has a member of rank at least 2
    ThickMember,
    /// a minimal cover of `M / e` has a member of rank at least 2
    ThickContractedMember,
}

#[derive(Clone, Debug)]
pub struct ClaimWitness {
    pub x: Subset,
    pub e: usize,
    pub case: ClaimCase,
}

/// Finds `X` with `r(X) <= a+1` and `M|X` not `GF(q)`-representable from
/// d-minimal covers of `M` and `M / e`, `e` the least nonloop. Returns
/// `None` when the case analysis produces no such set, which happens when
/// the density premise does not hold.
pub fn claim_step(m: &Matroid, q: usize, a: usize, d: u64) -> Result<Option<ClaimWitness>> {
    let Some(e) = m.nonloops().min() else {
        return Ok(None);
    };
    let me = m.contract(Subset::singleton(e))?;
    let (_, cover) = tau_weighted(m, d)?;
    let (_, cover_e) = tau_weighted(&me, d)?;
    let accept = |x: Subset| -> Result<bool> {
        Ok(m.rank(x) <= a + 1 && is_representable(&m.restrict(x)?, q)?.is_none())
    };
    let thick: Vec<Subset> = cover.sets.iter().copied().filter(|&f| m.rank(f) >= 2).collect();
    let thick_e: Vec<Subset> = cover_e.sets.iter().copied().filter(|&f| me.rank(f) >= 2).collect();
    if thick.is_empty() && thick_e.is_empty() {
        for class in me.parallel_classes() {
            let p = class.min().expect("nonempty class");
            let line = m.closure(Subset::from_indices([e, p]));
            let others = m.restrict(line)?.epsilon() - 1;
            if others > q && accept(line)? {
                return Ok(Some(ClaimWitness {
                    x: line,
                    e,
                    case: ClaimCase::LongLine,
                }));
            }
        }
        return Ok(None);
    }
    for x in thick {
        if accept(x)? {
            return Ok(Some(ClaimWitness {
                x,
                e,
                case: ClaimCase::ThickMember,
            }));
        }
    }
    for f in thick_e {
        let x = f.with(e);
        if accept(x)? {
            return Ok(Some(ClaimWitness {
                x,
                e,
                case: ClaimCase::ThickContractedMember,
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub enum GetStack {
    /// `n = M / contract` with the stack restriction `cert`;
    /// `density_holds` reports `τ^d(N) >= λ q^{r(N)}` under the oracle.
    Found {
        n: Matroid,
        contract: Subset,
        cert: StackCert,
        density_holds: bool,
    },
    PremiseNotMet(String),
}

/// Extracts a contraction-minor with an `(h, q, a+1)`-stack restriction from
/// a matroid with `τ^d(M) >= α q^{r(M)}`.
///
/// The descent contracts single nonloops while the premise survives, so the
/// result is minimal with respect to single-element contractions, which is
/// all the case analysis uses. With `spot_check`, the oracle is first
/// compared with the exact value on `m`.
pub fn getstack(m: &Matroid, p: &DensityParams, oracle: &dyn DensityOracle, spot_check_input: bool) -> Result<GetStack> {
    p.check()?;
    FiniteField::new(p.q)?;
    let dmin = (p.q as u64 + 1).max(u64::try_from(binom(p.b - 1, p.a)).unwrap_or(u64::MAX));
    if p.d <= dmin {
        return Err(MdlError::Precondition(format!("need d > {dmin}, got d = {}", p.d)));
    }
    if spot_check_input {
        spot_check(oracle, std::slice::from_ref(m), p.d)?;
    }
    extract(m, p, oracle, p.h, p.lambda.clone())
}

fn extract(m: &Matroid, p: &DensityParams, oracle: &dyn DensityOracle, h: usize, lambda: BigRational) -> Result<GetStack> {
    let alpha = alpha_rec(p.a, p.d, p.q, h, lambda.clone());
    let dens = oracle.tau_d(m, p.d)?;
    let target = density_target(&alpha, p.q, m.full_rank());
    if dens < target {
        return Ok(GetStack::PremiseNotMet(format!(
            "tau^d = {dens} is below alpha q^r = {target} at height {h}"
        )));
    }
    if h == 0 {
        return Ok(GetStack::Found {
            n: m.clone(),
            contract: Subset::EMPTY,
            cert: StackCert::new(Vec::new(), p.q, p.a + 1),
            density_holds: true,
        });
    }
    let mut cur = m.clone();
    let mut descent = Subset::EMPTY;
    'descend: loop {
        for e in cur.nonloops().iter() {
            let next = cur.contract(Subset::singleton(e))?;
            if oracle.tau_d(&next, p.d)? >= density_target(&alpha, p.q, next.full_rank()) {
                cur = next;
                descent.insert(e);
                continue 'descend;
            }
        }
        break;
    }
    let Some(w) = claim_step(&cur, p.q, p.a, p.d)? else {
        return Ok(GetStack::PremiseNotMet(
            "no non-representable set of rank at most a+1 in the minimal contraction".into(),
        ));
    };
    let mx = cur.contract(w.x)?;
    let step_q = int(BigInt::from(p.q).pow(p.a as u32 + 1));
    match extract(&mx, p, oracle, h - 1, lambda.clone() * step_q)? {
        GetStack::PremiseNotMet(why) => Ok(GetStack::PremiseNotMet(why)),
        GetStack::Found { contract: sub, cert: sub_cert, .. } => {
            let indep = mx.basis_of(sub);
            let n = cur.contract(indep)?;
            let mut parts = vec![w.x];
            parts.extend(sub_cert.parts);
            let cert = StackCert::new(parts, p.q, p.a + 1);
            require_restriction(&n, &cert, "extracted stack")?;
            let density_holds = oracle.tau_d(&n, p.d)? >= density_target(&lambda, p.q, n.full_rank());
            Ok(GetStack::Found {
                n,
                contract: descent.union(indep),
                cert,
                density_holds,
            })
        }
    }
}

/// Per-`t` outcome of the projection check: `found[t-1]` is a stack found
/// with layer rank cap `t`, if any.
#[derive(Clone, Debug)]
pub struct ProjectionReport {
    pub h: usize,
    pub found: Vec<Option<StackCert>>,
}

impl ProjectionReport {
    pub fn holds(&self) -> bool {
        self.found.iter().all(Option::is_none)
    }
}

/// With `r(X) <= h` and `si(M \ X) ≅ PG(r(M)-1, q)`, searches `M / X` for a
/// `(q, h+1, t)`-stack restriction for each `t <= t_max`.
pub fn check_no_stack_in_projection(m: &Matroid, x: Subset, q: usize, h: usize, t_max: usize) -> Result<ProjectionReport> {
    m.check_subset(x)?;
    if m.rank(x) > h {
        return Err(MdlError::Precondition(format!("r(X) = {} exceeds h = {h}", m.rank(x))));
    }
    if !is_pg(&m.delete(x)?, m.full_rank(), q)? {
        return Err(MdlError::Precondition(format!(
            "M \\ X is not a rank-{} projective geometry over GF({q})",
            m.full_rank()
        )));
    }
    let mx = m.contract(x)?;
    let found = (1..=t_max)
        .map(|t| find_stack(&mx, q, h + 1, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProjectionReport { h, found })
}

fn half_conn_holds(m: &Matroid, xs: Subset, k: Subset) -> bool {
    xs.subsets().all(|x| 2 * m.local_conn(x, k) <= m.rank(x))
}

/// First `X ⊆ xs` with `2⊓(X, K) > r(X)`, if any.
pub fn half_conn_violation(m: &Matroid, xs: Subset, k: Subset) -> Option<Subset> {
    xs.subsets().find(|&x| 2 * m.local_conn(x, k) > m.rank(x))
}

#[derive(Clone, Debug)]
pub enum LowConnFlat {
    /// `minor = M / contract`, with geometry `r_prime` and flat `k_flat`
    /// satisfying `⊓(X, K) <= r(X)/2` for every `X ⊆ r_prime`.
    Found {
        minor: Matroid,
        contract: Subset,
        r_prime: Subset,
        k_flat: Subset,
        layered: bool,
    },
    Failed(String),
}

const LOW_CONN_GEOMETRY_CAP: usize = 15;

/// Finds a rank-`k` flat with low local connectivity to every subset of a
/// projective-geometry restriction `R`.
///
/// First a maximal `J ⊆ E(M) - R` with `2⊓(X, J) <= r(X)` for all `X ⊆ R`
/// is grown greedily; if `r(J) >= k` a rank-`k` subflat of `cl(J)` is
/// returned. Otherwise, when `R` spans, the layered construction is tried
/// in `M / J` with layers that have a basis inside `R`.
pub fn find_low_conn_flat(m: &Matroid, r_set: Subset, q: usize, cert: &StackCert, k: usize) -> Result<LowConnFlat> {
    m.check_subset(r_set)?;
    let cap = caps::scaled(LOW_CONN_GEOMETRY_CAP);
    if r_set.len() > cap {
        return Err(MdlError::TooLarge {
            what: "geometry elements for the connectivity check",
            count: r_set.len(),
            cap,
        });
    }
    let rr = m.rank(r_set);
    if !is_pg(&m.restrict(r_set)?, rr, q)? {
        return Err(MdlError::Precondition(format!("R is not a rank-{rr} projective geometry over GF({q})")));
    }
    require_restriction(m, cert, "input")?;
    if cert.q != q || cert.height() < k.pow(4) {
        return Err(MdlError::InvalidCertificate(format!(
            "need a ({}, {q})-stack, got height {} over GF({})",
            k.pow(4),
            cert.height(),
            cert.q
        )));
    }
    let mut j = Subset::EMPTY;
    for e in m.ground().difference(r_set).iter() {
        if half_conn_holds(m, r_set, j.with(e)) {
            j.insert(e);
        }
    }
    if m.rank(j) >= k {
        let basis: Vec<usize> = m.basis_of(j).iter().take(k).collect();
        let k_flat = m.closure(basis.into_iter().collect());
        if let Some(x) = half_conn_violation(m, r_set, k_flat) {
            return Err(MdlError::InvalidCertificate(format!("flat fails the connectivity bound at {x}")));
        }
        return Ok(LowConnFlat::Found {
            minor: m.clone(),
            contract: Subset::EMPTY,
            r_prime: r_set,
            k_flat,
            layered: false,
        });
    }
    if !m.spans(r_set) {
        return Ok(LowConnFlat::Failed(format!(
            "r(J) = {} < k = {k} and R does not span, so the layered construction does not apply",
            m.rank(j)
        )));
    }
    let mp = m.contract(j)?;
    let (layers, bases) = layers_on_geometry(&mp, r_set, q, k)?;
    if layers.len() < k {
        return Ok(LowConnFlat::Failed(format!(
            "r(J) = {} < k = {k} and M / J has only {} of {k} layers with a basis in R",
            m.rank(j),
            layers.len()
        )));
    }
    let geometry = m.restrict(r_set)?;
    let k0 = layered_flat(&mp, &geometry, &layers, &bases, q)?;
    let all_b = bases.iter().fold(Subset::EMPTY, |acc, b| acc.union(*b));
    let r_prime = geometry.closure(all_b);
    let k_flat = mp.closure(k0);
    if let Some(x) = half_conn_violation(&mp, r_prime.intersection(mp.ground()), k_flat) {
        return Ok(LowConnFlat::Failed(format!("layered flat fails the connectivity bound at {x}")));
    }
    Ok(LowConnFlat::Found {
        minor: mp,
        contract: j,
        r_prime,
        k_flat,
        layered: true,
    })
}

fn parallel_to_any(m: &Matroid, e: usize, set: Subset) -> bool {
    set.iter().any(|f| !m.is_loop(f) && m.rank(Subset::from_indices([e, f])) == 1)
}

/// Greedily stacks up to `k` layers `Z ∪ {x}` in `mp`, each with `Z ⊆ R`
/// independent of size at most `k` spanning `x`, `x` off the geometry, and
/// the layer not `GF(q)`-representable.
fn layers_on_geometry(mp: &Matroid, r_set: Subset, q: usize, k: usize) -> Result<(Vec<Subset>, Vec<Subset>)> {
    let mut used = Subset::EMPTY;
    let mut layers = Vec::new();
    let mut bases = Vec::new();
    'layer: for _ in 0..k {
        let cur = mp.contract(used)?;
        let geo = r_set.intersection(cur.ground());
        for x in cur.nonloops().difference(r_set).iter() {
            if parallel_to_any(&cur, x, geo) {
                continue;
            }
            for size in 1..=k {
                for z in geo.subsets_of_size(size) {
                    if !cur.is_independent(z) || cur.rank(z.with(x)) != z.len() {
                        continue;
                    }
                    let layer = z.with(x);
                    if is_representable(&cur.restrict(layer)?, q)?.is_none() {
                        used = used.union(layer);
                        layers.push(layer);
                        bases.push(z);
                        continue 'layer;
                    }
                }
            }
        }
        break;
    }
    Ok((layers, bases))
}

/// The layered construction: given a stack `layers` in `mp` where layer `i`
/// has basis `bases[i] ⊆ E(geometry)` in its contraction, picks from each
/// layer (last first) the least element not parallel, in that contraction,
/// to a nonloop of the geometry spanned by the later bases. The picks form
/// an independent set `K_0` of rank `k`.
pub fn layered_flat(mp: &Matroid, geometry: &Matroid, layers: &[Subset], bases: &[Subset], q: usize) -> Result<Subset> {
    let k = layers.len();
    if bases.len() != k {
        return Err(MdlError::Precondition("one basis per layer is required".into()));
    }
    let t = layer_ranks(mp, layers).into_iter().max().unwrap_or(2).max(2);
    require_restriction(mp, &StackCert::new(layers.to_vec(), q, t), "layers")?;
    let mut prev = Subset::EMPTY;
    for (i, (&f, &b)) in layers.iter().zip(bases).enumerate() {
        let mi = mp.contract(prev)?;
        if !b.is_subset(geometry.ground()) || !b.is_subset(f) || !mi.is_independent(b) || mi.rank(b) != mi.rank(f) {
            return Err(MdlError::Precondition(format!("basis {} is not a basis of its layer inside R", i + 1)));
        }
        prev = prev.union(f);
    }
    let mut k0 = Subset::EMPTY;
    for i in (0..k).rev() {
        let before = layers[..i].iter().fold(Subset::EMPTY, |acc, p| acc.union(*p));
        let mi = mp.contract(before)?;
        let later = bases[i..].iter().fold(Subset::EMPTY, |acc, b| acc.union(*b));
        let ri = geometry.closure(later).intersection(mi.ground());
        let pick = layers[i]
            .iter()
            .find(|&e| !mi.is_loop(e) && !parallel_to_any(&mi, e, ri))
            .ok_or_else(|| MdlError::Precondition(format!("layer {} lies on the geometry", i + 1)))?;
        k0.insert(pick);
    }
    if !mp.is_independent(k0) {
        return Err(MdlError::InvalidCertificate("layered picks are dependent".into()));
    }
    Ok(k0)
}

/// Caches representability verdicts for `(contracted set, layer)` pairs.
#[derive(Default)]
pub struct LayerCache(HashMap<(Subset, Subset), bool>);

impl LayerCache {
    pub fn non_representable(&mut self, m: &Matroid, before: Subset, layer: Subset, q: usize) -> Result<bool> {
        if let Some(&v) = self.0.get(&(before, layer)) {
            return Ok(v);
        }
        let mc = m.contract(before)?;
        let v = is_representable(&mc.restrict(layer)?, q)?.is_none();
        self.0.insert((before, layer), v);
        Ok(v)
    }
}
