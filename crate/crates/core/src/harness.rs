//! Property suites over seeded instances; each trial is replayable from
//! `(suite, seed, index)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catalog;
use crate::covers::{check_contraction_inequalities, check_weighted_cover, is_d_thick, kdensity_cover, tau, CoverNumber};
use crate::error::{MdlError, Result};
use crate::matroid::Matroid;
use crate::minors::find_uniform_minor;
use crate::numeric::{binom_u128, int};
use crate::reduce::{reduce_connectivity, span_into, weakly_round_restriction};
use crate::rep::uniform_representability_fact;
use crate::stacks::{check_no_stack_in_projection, project_stack, skew_stack, verify_stack_restriction, StackCert};
use crate::subset::Subset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    CoverBound,
    ContractionCover,
    StackProjection,
    StackSkew,
    LowConnectivity,
    ContractionWeighted,
    ThickMinor,
    WeightedCover,
    ProjectionNoStack,
    RoundRestriction,
    SpanInto,
    UniformRepresentability,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::CoverBound,
        Suite::ContractionCover,
        Suite::StackProjection,
        Suite::StackSkew,
        Suite::LowConnectivity,
        Suite::ContractionWeighted,
        Suite::ThickMinor,
        Suite::WeightedCover,
        Suite::ProjectionNoStack,
        Suite::RoundRestriction,
        Suite::SpanInto,
        Suite::UniformRepresentability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::CoverBound => "cover-bound",
            Suite::ContractionCover => "contraction-cover",
            Suite::StackProjection => "stack-projection",
            Suite::StackSkew => "stack-skew",
            Suite::LowConnectivity => "low-connectivity",
            Suite::ContractionWeighted => "contraction-weighted",
            Suite::ThickMinor => "thick-minor",
            Suite::WeightedCover => "weighted-cover",
            Suite::ProjectionNoStack => "projection-no-stack",
            Suite::RoundRestriction => "round-restriction",
            Suite::SpanInto => "span-into",
            Suite::UniformRepresentability => "uniform-representability",
        }
    }

    pub fn from_name(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// the trial hit a cap or a precondition it generated itself
    Error,
}

#[derive(Clone, Debug)]
pub struct Trial {
    pub index: usize,
    pub description: String,
    pub verdict: Verdict,
    pub detail: String,
    pub counterexample: Option<Matroid>,
}

impl Trial {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: Vec<Trial>,
}

impl SuiteReport {
    pub fn count(&self, v: Verdict) -> usize {
        self.trials.iter().filter(|t| t.verdict == v).count()
    }

    pub fn all_passed(&self) -> bool {
        self.trials.iter().all(Trial::passed)
    }
}

/// Optional `key=value` overrides: `q`, `a`, `max_rank`, `max_n`.
#[derive(Clone, Debug, Default)]
pub struct SuiteParams(BTreeMap<String, usize>);

impl SuiteParams {
    pub const KEYS: [&'static str; 4] = ["q", "a", "max_rank", "max_n"];

    pub fn parse(items: &[String]) -> Result<SuiteParams> {
        let mut map = BTreeMap::new();
        for item in items {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| MdlError::Precondition(format!("expected key=value, got `{item}`")))?;
            if !Self::KEYS.contains(&k) {
                return Err(MdlError::Precondition(format!("unknown parameter `{k}`")));
            }
            let v = v
                .parse()
                .map_err(|_| MdlError::Precondition(format!("parameter `{k}` needs an integer")))?;
            map.insert(k.to_string(), v);
        }
        Ok(SuiteParams(map))
    }

    pub fn get(&self, key: &str) -> Option<usize> {
        self.0.get(key).copied()
    }

    fn pick_q(&self, rng: &mut ChaCha8Rng, choices: &[usize]) -> usize {
        self.get("q").unwrap_or_else(|| *choices.choose(rng).expect("nonempty"))
    }
}

/// Seed for trial `index` of a suite run.
pub fn trial_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (index as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9)
}

pub fn run_suite(suite: Suite, trials: usize, seed: u64, params: &SuiteParams) -> SuiteReport {
    let trials = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(suite, seed, i, params))
        .collect();
    SuiteReport { suite, seed, trials }
}

pub fn run_trial(suite: Suite, seed: u64, index: usize, params: &SuiteParams) -> Trial {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, index));
    let mut out = Outcome::default();
    let res = match suite {
        Suite::CoverBound => cover_bound(&mut rng, params, &mut out),
        Suite::ContractionCover => contraction(&mut rng, params, &mut out, false),
        Suite::ContractionWeighted => contraction(&mut rng, params, &mut out, true),
        Suite::StackProjection => stack_projection(&mut rng, index, &mut out),
        Suite::StackSkew => stack_skew(&mut rng, &mut out),
        Suite::LowConnectivity => low_connectivity(&mut rng, index, params, &mut out),
        Suite::ThickMinor => thick_minor(&mut rng, index, params, &mut out),
        Suite::WeightedCover => weighted_cover(&mut rng, params, &mut out),
        Suite::ProjectionNoStack => projection_no_stack(&mut rng, params, &mut out),
        Suite::RoundRestriction => round_restriction(&mut rng, index, params, &mut out),
        Suite::SpanInto => span_suite(&mut rng, index, &mut out),
        Suite::UniformRepresentability => uniform_fact(index, &mut out),
    };
    let (verdict, detail) = match res {
        Ok(()) if out.failures.is_empty() => (Verdict::Pass, out.notes.join("; ")),
        Ok(()) => (Verdict::Fail, out.failures.join("; ")),
        Err(e) => (Verdict::Error, e.to_string()),
    };
    let counterexample = if verdict == Verdict::Pass { None } else { out.instance };
    Trial {
        index,
        description: out.description,
        verdict,
        detail,
        counterexample,
    }
}

#[derive(Default)]
struct Outcome {
    description: String,
    instance: Option<Matroid>,
    notes: Vec<String>,
    failures: Vec<String>,
}

impl Outcome {
    fn instance(&mut self, m: &Matroid, description: String) {
        self.instance = Some(m.clone());
        self.description = description;
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn random_linear(rng: &mut ChaCha8Rng, p: &SuiteParams, qs: &[usize], ranks: (usize, usize), max_n: usize) -> Result<(Matroid, String, usize)> {
    let q = p.pick_q(rng, qs);
    let hi = p.get("max_rank").unwrap_or(ranks.1).max(ranks.0);
    let r = rng.gen_range(ranks.0..=hi);
    let n_hi = p.get("max_n").unwrap_or(max_n).max(r);
    let n = rng.gen_range(r..=n_hi);
    let s: u64 = rng.gen();
    let m = catalog::linear_random(r, n, q, s)?;
    Ok((m, format!("linear_random {r} {n} {q} seed={s}"), q))
}

fn random_subset(rng: &mut ChaCha8Rng, of: Subset, p: f64) -> Subset {
    of.iter().filter(|_| rng.gen_bool(p)).collect()
}

fn finite_tau(m: &Matroid, a: usize) -> Result<u128> {
    match tau(m, a)?.0 {
        CoverNumber::Finite(v) => Ok(v),
        CoverNumber::Infinite => Err(MdlError::Precondition("infinite covering number".into())),
    }
}

fn cover_bound(rng: &mut ChaCha8Rng, p: &SuiteParams, out: &mut Outcome) -> Result<()> {
    let (m, desc, q) = random_linear(rng, p, &[2, 3], (2, 5), 12)?;
    out.instance(&m, desc);
    let (a, b) = (1, q + 2);
    let r = m.full_rank();
    let bound = binom_u128(b - 1, a).pow((r - a.min(r)) as u32);
    let t = finite_tau(&m, a)?;
    out.check(t == m.epsilon() as u128, format!("tau_1 = {t} but there are {} points", m.epsilon()));
    out.check(t <= bound, format!("tau_1 = {t} exceeds {bound}"));
    let cover = kdensity_cover(&m, a, b)?;
    out.check(cover.covers(&m), "constructive cover misses elements");
    out.check(cover.max_rank(&m) <= a, "constructive cover has a member of rank > a");
    out.check(cover.len() as u128 <= bound, format!("constructive cover has {} > {bound} sets", cover.len()));
    out.note(format!("tau_1={t} bound={bound} constructive={}", cover.len()));
    Ok(())
}

fn contraction(rng: &mut ChaCha8Rng, p: &SuiteParams, out: &mut Outcome, weighted: bool) -> Result<()> {
    let (m, desc, q) = random_linear(rng, p, &[2, 3], (1, 4), 9)?;
    let a = p.get("a").unwrap_or_else(|| rng.gen_range(1..=2));
    let b = q + 1 + a;
    let d = if weighted { rng.gen_range(1..=6) } else { binom_u128(b - 1, a) as u64 + 1 };
    let c = random_subset(rng, m.ground(), 0.35);
    out.instance(&m, format!("{desc} C={c} a={a} b={b} d={d}"));
    let rep = check_contraction_inequalities(&m, c, a, b, d)?;
    let ineq = if weighted { &rep.weighted } else { &rep.covering };
    match ineq {
        Some(i) => {
            out.check(i.holds(), format!("inequality fails: {i}"));
            out.note(i.to_string());
        }
        None => out.note("C = E(M): not applicable"),
    }
    Ok(())
}

fn weighted_cover(rng: &mut ChaCha8Rng, p: &SuiteParams, out: &mut Outcome) -> Result<()> {
    let (m, desc, q) = random_linear(rng, p, &[2, 3], (1, 4), 9)?;
    let a = p.get("a").unwrap_or_else(|| rng.gen_range(1..=2));
    let b = q + 1 + a;
    let d = binom_u128(b - 1, a) as u64 + rng.gen_range(1..=3);
    out.instance(&m, format!("{desc} a={a} b={b} d={d}"));
    let rep = check_weighted_cover(&m, a, d)?;
    out.check(rep.thin_members.is_empty(), format!("members not d-thick: {:?}", rep.thin_members));
    out.check(rep.high_rank_members.is_empty(), format!("members of rank > a: {:?}", rep.high_rank_members));
    out.check(rep.sandwich, format!("tau_a={} tau^d={} outside [tau_a, d^a tau_a]", rep.tau_a, rep.tau_d));
    out.note(format!("tau_a={} tau^d={}", rep.tau_a, rep.tau_d));
    Ok(())
}

fn largest_b(a: usize, d: u64) -> Option<usize> {
    (a + 1..64).take_while(|&b| binom_u128(b - 1, a) < d as u128).last()
}

fn thick_minor(rng: &mut ChaCha8Rng, index: usize, p: &SuiteParams, out: &mut Outcome) -> Result<()> {
    let (m, desc, a, d) = if index % 2 == 0 {
        let a = p.get("a").unwrap_or_else(|| rng.gen_range(1..=2));
        let n = rng.gen_range(a + 2..=10);
        let d = n.div_ceil(a) as u64;
        (catalog::uniform(a + 1, n)?, format!("uniform {} {n}", a + 1), a, d)
    } else {
        let (mut m, mut desc, _) = random_linear(rng, p, &[4, 5], (2, 3), 10)?;
        while m.full_rank() < 2 {
            (m, desc, _) = random_linear(rng, p, &[4, 5], (2, 3), 10)?;
        }
        let r = m.full_rank();
        let a = rng.gen_range(1..r.max(2));
        let d = finite_tau(&m, r - 1)? as u64;
        (m, desc, a, d)
    };
    let Some(b) = largest_b(a, d) else {
        out.instance(&m, desc);
        out.note(format!("d = {d} leaves no b; vacuous"));
        return Ok(());
    };
    out.instance(&m, format!("{desc} a={a} b={b} d={d}"));
    if m.full_rank() <= a {
        out.note("rank at most a; vacuous");
        return Ok(());
    }
    out.check(is_d_thick(&m, m.ground(), d)?, format!("not {d}-thick"));
    match find_uniform_minor(&m, a + 1, b)? {
        Some(w) => {
            out.check(w.verify(&m), "uniform-minor witness does not verify");
            out.note(format!("U({},{b}) via contract {}", a + 1, w.contract));
        }
        None => out.check(false, format!("no U({},{b}) minor", a + 1)),
    }
    Ok(())
}

fn tower_cert(h: usize) -> StackCert {
    StackCert::new((0..h).map(|i| Subset::from_indices(4 * i..4 * i + 4)).collect(), 2, 2)
}

fn stack_projection(rng: &mut ChaCha8Rng, index: usize, out: &mut Outcome) -> Result<()> {
    let fq = *[3, 4, 5].choose(rng).expect("nonempty");
    let extra = rng.gen_range(1..=3);
    let s: u64 = rng.gen();
    let h_max = 6;
    let m = catalog::planted_tower(h_max, extra, fq, s)?;
    let extras: Subset = (4 * h_max..4 * h_max + extra).collect();
    let (k, c) = if index % 5 == 0 {
        (rng.gen_range(2..=3), Subset::EMPTY)
    } else {
        let mut c = random_subset(rng, extras, 0.5);
        if c.is_empty() {
            c = Subset::singleton(4 * h_max);
        }
        if rng.gen_bool(0.3) {
            c.insert(rng.gen_range(0..4 * h_max));
        }
        while m.rank(c) > 3 {
            c.remove(c.max().expect("nonempty"));
        }
        (1, c)
    };
    let h = (k * (m.rank(c) + 1)).min(h_max);
    let cert = tower_cert(h + (h_max - h).min(rng.gen_range(0..=1)));
    out.instance(&m, format!("planted_tower {h_max} {extra} {fq} seed={s} C={c} k={k} layers={}", cert.height()));
    let res = project_stack(&m, c, k, &cert)?;
    let mc = m.contract(c)?;
    out.check(res.height() == k, format!("projection has {} layers, expected {k}", res.height()));
    out.check(res.union().is_subset(cert.union()), "projection leaves E(S)");
    out.check(verify_stack_restriction(&mc, &res)?, "projected certificate fails verification");
    out.note(format!("t={}", res.t));
    Ok(())
}

fn stack_skew(rng: &mut ChaCha8Rng, out: &mut Outcome) -> Result<()> {
    let fq = *[3, 4, 5].choose(rng).expect("nonempty");
    let extra = 3;
    let s: u64 = rng.gen();
    let layers = 6;
    let m = catalog::planted_tower(layers, extra, fq, s)?;
    let extras: Subset = (4 * layers..4 * layers + extra).collect();
    let mut x = random_subset(rng, extras, 0.5);
    if x.is_empty() {
        x = Subset::singleton(4 * layers + rng.gen_range(0..extra));
    }
    let cert = tower_cert(layers);
    let a = m.local_conn(x, cert.union());
    let h = if (a + 1) * 2 <= layers && rng.gen_bool(0.5) { 2 } else { 1 };
    out.instance(&m, format!("planted_tower {layers} {extra} {fq} seed={s} X={x} a={a} h={h}"));
    let res = skew_stack(&m, &cert, x, a, h)?;
    let mc = m.contract(res.contract)?;
    out.check(res.contract.is_subset(cert.union()), "contracted set leaves E(S)");
    out.check(res.cert.height() == h, "wrong height");
    out.check(verify_stack_restriction(&mc, &res.cert)?, "skewed certificate fails verification");
    let conn = mc.local_conn(x.difference(res.contract), res.cert.union());
    out.check(conn == 0, format!("local connectivity {conn} after skewing"));
    out.note(format!("contracted {} elements", res.contract.len()));
    Ok(())
}

fn low_connectivity(rng: &mut ChaCha8Rng, index: usize, p: &SuiteParams, out: &mut Outcome) -> Result<()> {
    let (m, desc, q) = random_linear(rng, p, &[2, 3], (2, 5), 10)?;
    let r = m.full_rank();
    let a = p.get("a").unwrap_or_else(|| if r >= 3 && rng.gen_bool(0.3) { 2 } else { 1 }).min(r);
    let b = q + 1 + a;
    let y = if index % 6 == 0 {
        m.basis_of(m.ground()).iter().take(a).collect()
    } else {
        let mut y = Subset::EMPTY;
        for _ in 0..20 {
            y = random_subset(rng, m.ground(), 0.4);
            if m.rank(y) >= a {
                break;
            }
        }
        if m.rank(y) < a {
            y = m.ground();
        }
        y
    };
    out.instance(&m, format!("{desc} Y={y} a={a} b={b}"));
    let red = reduce_connectivity(&m, y, a, b)?;
    out.check(red.x.is_subset(m.ground()), "X leaves the ground set");
    let conn = m.local_conn(red.x, y);
    out.check(conn <= a, format!("local connectivity {conn} > {a}"));
    let tx = int(BigInt::from(finite_tau(&m.restrict(red.x)?, a)?));
    out.check(tx >= red.bound(), format!("tau_a(M|X) = {tx} below {}", red.bound()));
    out.note(format!("r(Y)={} conn={conn} tau={tx} bound={}", m.rank(y), red.bound()));
    Ok(())
}

fn projection_no_stack(rng: &mut ChaCha8Rng, p: &SuiteParams, out: &mut Outcome) -> Result<()> {
    let q = p.pick_q(rng, &[2, 3]);
    let n = if q == 2 { rng.gen_range(3..=5) } else { rng.gen_range(3..=4) };
    let extra = rng.gen_range(1..=2);
    let s: u64 = rng.gen();
    let m = catalog::pg_plus_noise(n, q, extra, s)?;
    let x = catalog::noise_elements(n, q, extra);
    let h = m.rank(x);
    out.instance(&m, format!("pg_plus_noise {n} {q} {extra} seed={s} h={h}"));
    let rep = check_no_stack_in_projection(&m, x, q, h, 3)?;
    for (t, f) in rep.found.iter().enumerate() {
        if let Some(c) = f {
            out.check(false, format!("t={} stack found:\n{}", t + 1, c));
        }
    }
    out.note(format!("r(M/X)={} needs {} layers", m.full_rank() - h, h + 1));
    Ok(())
}

/// Exhaustive weak-roundness check by complement pairs.
pub fn weakly_round_exhaustive(m: &Matroid) -> bool {
    let r = m.full_rank();
    if r <= 2 {
        return true;
    }
    let e = m.ground();
    !e.subsets().any(|a| m.rank(a) + 2 <= r && m.rank(e.difference(a)) < r)
}

fn round_restriction(rng: &mut ChaCha8Rng, index: usize, p: &SuiteParams, out: &mut Outcome) -> Result<()> {
    let q = p.pick_q(rng, &[2, 3]);
    let (m, desc) = match index % 3 {
        0 => {
            let r1 = rng.gen_range(1..=3);
            let r2 = rng.gen_range(1..=3);
            let (s1, s2): (u64, u64) = (rng.gen(), rng.gen());
            let n1 = rng.gen_range(r1..=5);
            let n2 = rng.gen_range(r2..=6);
            let parts = [catalog::linear_random(r1, n1, 3, s1)?, catalog::linear_random(r2, n2, 4, s2)?];
            (
                Matroid::direct_sum(&parts)?,
                format!("direct_sum linear_random:{r1}:{n1}:3 linear_random:{r2}:{n2}:4 seeds={s1},{s2}"),
            )
        }
        1 => {
            let r = rng.gen_range(2..=4);
            (catalog::uniform(r, rng.gen_range(r..=9))?, format!("uniform rank {r}"))
        }
        _ => {
            let (m, d, _) = random_linear(rng, p, &[2, 3], (2, 4), 10)?;
            (m, d)
        }
    };
    let a = p.get("a").unwrap_or(1);
    let t = finite_tau(&m, a)?;
    let shrink = *[1u32, 2, 3].choose(rng).expect("nonempty");
    let alpha = BigRational::new(BigInt::from(t), BigInt::from(q).pow(m.full_rank() as u32) * BigInt::from(shrink));
    out.instance(&m, format!("{desc} a={a} q={q} alpha={alpha}"));
    let res = weakly_round_restriction(&m, a, q, &alpha)?;
    out.check(res.ground.is_subset(m.ground()), "not a restriction");
    out.check(m.restrict(res.ground)?.agrees_on(&res.n, res.ground), "restriction ranks disagree");
    out.check(weakly_round_exhaustive(&res.n), "result is not weakly round");
    let tn = int(BigInt::from(finite_tau(&res.n, a)?));
    let target = alpha.clone() * int(BigInt::from(q).pow(res.n.full_rank() as u32));
    out.check(tn >= target, format!("tau_a(N) = {tn} below {target}"));
    out.note(format!("{} splits, r(N)={}", res.path.len() - 1, res.n.full_rank()));
    Ok(())
}

fn weakly_round_instance(rng: &mut ChaCha8Rng, index: usize) -> Result<(Matroid, String)> {
    match index % 4 {
        0 => {
            let (n, q) = *[(3, 2), (4, 2), (3, 3)].choose(rng).expect("nonempty");
            Ok((catalog::pg(n, q)?, format!("pg {n} {q}")))
        }
        1 => {
            // U(r,n) is weakly round exactly when n >= 2r - 2
            let r = rng.gen_range(3..=4);
            let n = rng.gen_range(2 * r - 2..=9);
            Ok((catalog::uniform(r, n)?, format!("uniform {r} {n}")))
        }
        _ => {
            for _ in 0..30 {
                let r = rng.gen_range(3..=4);
                let n = rng.gen_range(r + 2..=12);
                let q = *[3, 4].choose(rng).expect("nonempty");
                let s: u64 = rng.gen();
                let m = catalog::linear_random(r, n, q, s)?;
                if m.is_weakly_round() {
                    return Ok((m, format!("linear_random {r} {n} {q} seed={s}")));
                }
            }
            Ok((catalog::pg(3, 3)?, "pg 3 3".into()))
        }
    }
}

fn span_suite(rng: &mut ChaCha8Rng, index: usize, out: &mut Outcome) -> Result<()> {
    let (m, desc) = weakly_round_instance(rng, index)?;
    let e = m.ground();
    let pick = |rng: &mut ChaCha8Rng, from: Subset, size: usize| -> Subset {
        let mut v = from.to_vec();
        v.shuffle(rng);
        v.into_iter().take(size).collect()
    };
    let y = if index % 5 == 0 {
        let b = m.basis_of(e);
        b.union(pick(rng, e.difference(b), 2))
    } else {
        let mut y = Subset::EMPTY;
        for _ in 0..30 {
            let size = rng.gen_range(2..=6);
            y = pick(rng, e, size);
            if m.rank(y) >= 2 {
                break;
            }
        }
        y
    };
    let mut x = Subset::EMPTY;
    for _ in 0..30 {
        let size = rng.gen_range(1..=4);
        x = pick(rng, e, size);
        if m.rank(x) < m.rank(y) {
            break;
        }
    }
    if m.rank(x) >= m.rank(y) {
        x = Subset::singleton(y.min().expect("nonempty"));
    }
    out.instance(&m, format!("{desc} X={x} Y={y}"));
    let res = span_into(&m, x, y)?;
    let n = &res.n;
    out.check(res.contract.is_disjoint(x.union(y)), "contracted set meets X or Y");
    out.check(x.subsets().all(|s| n.rank(s) == m.rank(s)), "N|X differs from M|X");
    out.check(y.subsets().all(|s| n.rank(s) == m.rank(s)), "N|Y differs from M|Y");
    out.check(n.rank(y) == n.full_rank(), "Y does not span N");
    out.check(n.closure(x).union(n.closure(y)) == n.ground(), "E(N) is not cl(X) ∪ cl(Y)");
    for f in n.ground().difference(x.union(y)).iter() {
        let more = m.contract(res.contract.with(f))?;
        let keeps = x.subsets().all(|s| more.rank(s) == m.rank(s)) && y.subsets().all(|s| more.rank(s) == m.rank(s));
        out.check(!keeps, format!("contracted set is not maximal: {f} can be added"));
    }
    out.note(format!("|C|={} r(N)={}", res.contract.len(), n.full_rank()));
    Ok(())
}

/// `(a, b, q)` with `a + 1 <= 3`, `b <= 7`, `q <= 8` and `q >= b`.
pub fn uniform_fact_cases() -> Vec<(usize, usize, usize)> {
    let mut v = Vec::new();
    for a in 1..=2 {
        for b in a + 1..=7 {
            for q in [2, 3, 4, 5, 7, 8] {
                if q >= b {
                    v.push((a, b, q));
                }
            }
        }
    }
    v
}

fn uniform_fact(index: usize, out: &mut Outcome) -> Result<()> {
    let cases = uniform_fact_cases();
    let (a, b, q) = cases[index % cases.len()];
    let m = catalog::uniform(a + 1, b)?;
    out.instance(&m, format!("U({},{b}) over GF({q})", a + 1));
    out.check(uniform_representability_fact(a, b, q)?, "not representable");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_small() {
        let p = SuiteParams::default();
        for s in Suite::ALL {
            let r = run_suite(s, 6, 3, &p);
            for t in &r.trials {
                assert!(t.passed(), "{s} trial {}: {} -- {}", t.index, t.description, t.detail);
            }
        }
    }

    #[test]
    fn deterministic() {
        let p = SuiteParams::default();
        let a = run_suite(Suite::CoverBound, 4, 9, &p);
        let b = run_suite(Suite::CoverBound, 4, 9, &p);
        let da: Vec<_> = a.trials.iter().map(|t| &t.description).collect();
        let db: Vec<_> = b.trials.iter().map(|t| &t.description).collect();
        assert_eq!(da, db);
    }

    #[test]
    fn params_parse() {
        assert_eq!(SuiteParams::parse(&["q=3".into()]).unwrap().get("q"), Some(3));
        assert!(SuiteParams::parse(&["z=1".into()]).is_err());
        assert!(SuiteParams::parse(&["q".into()]).is_err());
    }

    #[test]
    fn exhaustive_roundness_agrees() {
        let m = Matroid::direct_sum(&[catalog::uniform(2, 3).unwrap(), catalog::uniform(2, 3).unwrap()]).unwrap();
        assert_eq!(weakly_round_exhaustive(&m), m.is_weakly_round());
        let p = catalog::pg(3, 2).unwrap();
        assert!(weakly_round_exhaustive(&p));
    }
}
