mod common;

use proptest::prelude::*;

use common::{min_cover_count, vector_rank, RankTable};
use mdl_core::catalog;
use mdl_core::covers::{check_weighted_cover, tau, CoverNumber};
use mdl_core::numeric::{binom_u128, int};
use mdl_core::reduce::{reduce_connectivity, weakly_round_restriction};
use mdl_core::rep::{is_pg, is_representable};
use mdl_core::stacks::{layer_ranks, skew_stack, verify_stack_restriction, StackCert};
use mdl_core::{Matroid, Subset};

fn linear() -> impl Strategy<Value = (Matroid, usize)> {
    (prop::sample::select(vec![2usize, 3, 4, 5]), 1usize..=4, 0usize..=4, any::<u64>())
        .prop_map(|(q, r, extra, seed)| (catalog::linear_random(r, r + extra, q, seed).unwrap(), q))
}

fn mask_of(m: &Matroid, bits: u64) -> Subset {
    m.ground().iter().filter(|&e| bits >> (e % 64) & 1 == 1).collect()
}

fn tau_value(m: &Matroid, a: usize) -> u128 {
    match tau(m, a).unwrap().0 {
        CoverNumber::Finite(v) => v,
        CoverNumber::Infinite => u128::MAX,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn column_rank_monotone_submodular((m, _q) in linear()) {
        let mdl_core::matroid::Kind::Linear(mat) = m.kind() else { unreachable!() };
        let g = m.ground();
        for x in g.subsets() {
            for e in g.difference(x).iter() {
                prop_assert!(mat.rank_of_columns(x) <= mat.rank_of_columns(x.with(e)));
            }
            for y in g.subsets().step_by(3) {
                let lhs = mat.rank_of_columns(x) + mat.rank_of_columns(y);
                prop_assert!(lhs >= mat.rank_of_columns(x.union(y)) + mat.rank_of_columns(x.intersection(y)));
            }
        }
    }

    #[test]
    fn minors_commute((m, _q) in linear(), cb in any::<u64>(), db in any::<u64>()) {
        let c = mask_of(&m, cb);
        let d = mask_of(&m, db).difference(c);
        let a = m.contract(c).unwrap().delete(d).unwrap();
        let b = m.delete(d).unwrap().contract(c).unwrap();
        prop_assert_eq!(a.ground(), b.ground());
        for x in a.ground().subsets() {
            prop_assert_eq!(a.rank(x), b.rank(x));
        }
    }

    #[test]
    fn closure_axioms((m, _q) in linear(), xb in any::<u64>(), yb in any::<u64>()) {
        let x = mask_of(&m, xb);
        let y = x.union(mask_of(&m, yb));
        let cx = m.closure(x);
        prop_assert!(x.is_subset(cx));
        prop_assert!(cx.is_subset(m.closure(y)));
        prop_assert_eq!(m.closure(cx), cx);
        prop_assert_eq!(cx, m.closure_by_rank(x));
    }

    #[test]
    fn local_conn_bounds((m, _q) in linear(), xb in any::<u64>(), yb in any::<u64>()) {
        let (x, y) = (mask_of(&m, xb), mask_of(&m, yb));
        let c = m.local_conn(x, y);
        prop_assert!(c <= m.rank(x).min(m.rank(y)));
        prop_assert_eq!(c, m.rank(x) + m.rank(y) - m.rank(x.union(y)));
    }

    #[test]
    fn contraction_does_not_add_points((m, _q) in linear()) {
        for e in m.nonloops().iter() {
            prop_assert!(m.contract(Subset::singleton(e)).unwrap().epsilon() <= m.epsilon());
        }
    }

    #[test]
    fn roundness_survives_contraction((m, _q) in linear()) {
        if m.is_weakly_round() {
            for e in m.nonloops().iter() {
                prop_assert!(m.contract(Subset::singleton(e)).unwrap().is_weakly_round());
            }
        }
    }

    #[test]
    fn tau_matches_brute_force((m, _q) in linear(), a in 1usize..=3) {
        let t = RankTable::new(&m);
        let brute = min_cover_count(&t, t.full(), a).map_or(u128::MAX, u128::from);
        prop_assert_eq!(tau_value(&m, a), brute);
        if a >= m.full_rank() && !m.ground().is_empty() {
            prop_assert_eq!(tau_value(&m, a), 1);
        }
    }

    #[test]
    fn density_bound_and_weighted_structure((m, q) in linear(), a in 1usize..=2, extra in 1u64..=3) {
        // GF(q)-representable matroids have no U(a+1, q+1+a)-minor
        let b = q + 1 + a;
        let r = m.full_rank();
        if r >= a {
            prop_assert!(tau_value(&m, a) <= binom_u128(b - 1, a).pow((r - a) as u32));
        }
        let d = binom_u128(b - 1, a) as u64 + extra;
        prop_assert!(check_weighted_cover(&m, a, d).unwrap().holds());
    }

    #[test]
    fn representation_is_sound((m, q) in linear()) {
        let mat = is_representable(&m, q).unwrap().expect("generated over GF(q)");
        let f = mat.field().clone();
        for x in m.ground().subsets() {
            let cols: Vec<Vec<u8>> = x.iter().map(|e| mat.column(e).to_vec()).collect();
            prop_assert_eq!(vector_rank(&f, &cols), m.rank(x));
        }
    }

    #[test]
    fn representability_closed_under_minors((m, q) in linear()) {
        for e in m.ground().iter() {
            let s = Subset::singleton(e);
            prop_assert!(is_representable(&m.contract(s).unwrap(), q).unwrap().is_some());
            prop_assert!(is_representable(&m.delete(s).unwrap(), q).unwrap().is_some());
        }
    }

    #[test]
    fn representability_lifts_to_extension(r in 1usize..=3, n in 1usize..=7, seed in any::<u64>(), pick in 0usize..2) {
        let (q, big) = [(2, 4), (3, 9)][pick];
        let m = catalog::linear_random(r, n, q, seed).unwrap();
        prop_assert!(is_representable(&m, big).unwrap().is_some());
    }

    #[test]
    fn stack_prefixes_and_rank(h in 1usize..=4, extra in 0usize..=3, fq in prop::sample::select(vec![3usize, 4, 5]), seed in any::<u64>(), j in 0usize..=4) {
        let m = catalog::planted_tower(h, extra, fq, seed).unwrap();
        let cert = StackCert::new((0..h).map(|i| Subset::from_indices(4 * i..4 * i + 4)).collect(), 2, 2);
        prop_assert!(verify_stack_restriction(&m, &cert).unwrap());
        let p = cert.prefix(j.min(h));
        prop_assert!(verify_stack_restriction(&m, &p).unwrap());
        let rs = m.rank(p.union());
        prop_assert!(2 * p.height() <= rs && rs <= p.t * p.height());
        prop_assert!(layer_ranks(&m, &p.parts).iter().all(|&r| (2..=p.t).contains(&r)));
        prop_assert_eq!(StackCert::parse(&cert.to_text()).unwrap(), cert);
    }

    #[test]
    fn skewing_reaches_zero_connectivity(fq in prop::sample::select(vec![3usize, 4, 5]), seed in any::<u64>(), xb in 1u64..8) {
        let m = catalog::planted_tower(6, 3, fq, seed).unwrap();
        let cert = StackCert::new((0..6).map(|i| Subset::from_indices(4 * i..4 * i + 4)).collect(), 2, 2);
        let x: Subset = (0..3).filter(|i| xb >> i & 1 == 1).map(|i| 24 + i).collect();
        let a = m.local_conn(x, cert.union());
        let s = skew_stack(&m, &cert, x, a, 1).unwrap();
        let mc = m.contract(s.contract).unwrap();
        prop_assert_eq!(mc.local_conn(x.difference(s.contract), s.cert.union()), 0);
        prop_assert!(verify_stack_restriction(&mc, &s.cert).unwrap());
    }

    #[test]
    fn connectivity_reduction_postconditions((m, q) in linear(), yb in any::<u64>()) {
        let a = 1;
        let y = mask_of(&m, yb);
        prop_assume!(m.rank(y) >= a);
        let red = reduce_connectivity(&m, y, a, q + 2).unwrap();
        prop_assert!(red.holds(a));
        prop_assert_eq!(red.conn, m.local_conn(red.x, y));
        prop_assert_eq!(red.tau_x, int(tau_value(&m.restrict(red.x).unwrap(), a)));
    }

    #[test]
    fn round_restriction_descends((m, _q) in linear(), (m2, _q2) in linear()) {
        let s = Matroid::direct_sum(&[m, m2]).unwrap();
        prop_assume!(s.size() <= 12);
        let t = tau_value(&s, 1);
        let alpha = num_rational::BigRational::new(t.into(), num_bigint::BigInt::from(2).pow(s.full_rank() as u32));
        let res = weakly_round_restriction(&s, 1, 2, &alpha).unwrap();
        prop_assert!(res.n.is_weakly_round());
        for w in res.path.windows(2) {
            let (outer, inner) = (s.restrict(w[0]).unwrap(), s.restrict(w[1]).unwrap());
            prop_assert!(inner.ground().len() < outer.ground().len() || inner.full_rank() < outer.full_rank());
        }
    }

    #[test]
    fn generators_deterministic_and_round_trip(r in 1usize..=4, n in 1usize..=8, q in prop::sample::select(vec![2usize, 3, 4]), seed in any::<u64>()) {
        let a = catalog::gen("linear_random", &[r.to_string(), n.to_string(), q.to_string()], seed).unwrap();
        let b = catalog::gen("linear_random", &[r.to_string(), n.to_string(), q.to_string()], seed).unwrap();
        let text = catalog::to_mtd(&a, "m", &[]).unwrap();
        let c = catalog::parse_mtd(&text).unwrap();
        for x in a.ground().subsets() {
            prop_assert_eq!(a.rank(x), b.rank(x));
            prop_assert_eq!(a.rank(x), c.rank(x));
        }
    }
}

#[test]
fn pg_generators_are_recognised() {
    for (n, q) in [(2, 2), (3, 2), (4, 2), (5, 2), (2, 3), (3, 3), (4, 3), (2, 4), (3, 4), (3, 5)] {
        let m = catalog::pg(n, q).unwrap();
        assert!(is_pg(&m, n, q).unwrap(), "pg({n},{q})");
        assert_eq!(m.epsilon(), (q.pow(n as u32) - 1) / (q - 1));
    }
}

#[test]
fn minor_and_sum_files_round_trip() {
    let tower = catalog::u24_tower(2).unwrap();
    let minor = catalog::fano().minor(Subset::singleton(0), Subset::singleton(6)).unwrap();
    let ext = catalog::fano().parallel_extension(&[1, 2]).unwrap();
    for m in [tower, minor, ext] {
        let c = catalog::parse_mtd(&catalog::to_mtd(&m, "m", &[]).unwrap()).unwrap();
        assert_eq!(c.ground(), m.ground());
        for x in m.ground().subsets() {
            assert_eq!(c.rank(x), m.rank(x));
        }
    }
}
