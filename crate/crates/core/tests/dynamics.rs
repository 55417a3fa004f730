//! Integer string, Boolean and fermion dynamics against brute-force oracles.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use cadual_core::fermion::{jordan_wigner, split_boolean_movers, BooleanField, MAX_CHAIN, MAX_DENSE_CHAIN};
use cadual_core::linalg::{Basis, Complex64, ComplexMatrix};
use cadual_core::worldsheet::{
    exchange_interaction, split_string_movers, Boundary, OrientedString, Point, StringConfiguration,
    StringEnsemble, StringSpec, WorldSheetLattice,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_points(rng: &mut ChaCha8Rng, len: usize, dims: usize, span: i64) -> Vec<Point> {
    (0..len)
        .map(|_| (0..dims).map(|_| rng.random_range(-span..=span)).collect())
        .collect()
}

/// `X(σ,τ+1) = X(σ+1,τ) + X(σ-1,τ) - X(σ,τ-1)` on a ring, written out directly.
fn ring_recursion(prev: &[Point], cur: &[Point]) -> Vec<Point> {
    let n = cur.len();
    (0..n)
        .map(|s| {
            let (l, r) = (&cur[(s + n - 1) % n], &cur[(s + 1) % n]);
            (0..cur[s].len()).map(|m| l[m] + r[m] - prev[s][m]).collect()
        })
        .collect()
}

#[test]
fn random_strings_evolve_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..50 {
        let len = rng.random_range(3..=64);
        let dims = rng.random_range(1..=3);
        let boundary = if case % 5 == 4 { Boundary::Free } else { Boundary::Periodic };
        let lattice = WorldSheetLattice::new(len, dims, boundary).unwrap();
        let prev = random_points(&mut rng, len, dims, 10);
        let cur = random_points(&mut rng, len, dims, 10);
        let start = StringConfiguration::new(lattice, prev, cur, 1).unwrap();
        let movers = split_string_movers(&start);
        let mut c = start.clone();
        for _ in 0..1000 {
            let next = c.step();
            assert_eq!(c.wave_residual(&next.cur), 0, "case {case} t {}", c.time);
            if boundary == Boundary::Periodic {
                assert_eq!(next.cur, ring_recursion(&c.prev, &c.cur));
            }
            c = next;
            assert_eq!(movers.slice(c.time, len), c.cur, "case {case} t {}", c.time);
        }
        let later = split_string_movers(&c);
        assert_eq!(later.left_increments, movers.left_increments);
        assert_eq!(later.right_increments, movers.right_increments);
        for _ in 0..1000 {
            c = c.step_back();
        }
        assert_eq!(c, start, "case {case}");
    }
}

/// Successor of every site along the arrow; `None` at the head of an open string.
fn successor_map(strings: &[OrientedString]) -> BTreeMap<u64, Option<u64>> {
    let mut out = BTreeMap::new();
    for s in strings {
        let mut ids: Vec<u64> = s.sites.iter().map(|x| x.id).collect();
        if s.orientation < 0 {
            ids.reverse();
        }
        for k in 0..ids.len() {
            let next = match ids.get(k + 1) {
                Some(&n) => Some(n),
                None if s.closed => Some(ids[0]),
                None => None,
            };
            out.insert(ids[k], next);
        }
    }
    out
}

fn site_table(e: &StringEnsemble) -> BTreeMap<u64, (Point, Point)> {
    e.strings
        .iter()
        .flat_map(|s| s.sites.iter().map(|x| (x.id, (x.prev.clone(), x.cur.clone()))))
        .collect()
}

fn random_ensemble(rng: &mut ChaCha8Rng) -> StringEnsemble {
    let count = rng.random_range(2..=5);
    let specs = (0..count)
        .map(|_| {
            let closed = rng.random_bool(0.5);
            let len = rng.random_range(if closed { 3 } else { 2 }..=9);
            let cur = random_points(rng, len, 2, 2);
            StringSpec {
                closed,
                orientation: if rng.random_bool(0.5) { 1 } else { -1 },
                prev: cur.clone(),
                cur,
            }
        })
        .collect();
    let mut e = StringEnsemble::new(2, specs).unwrap();
    e.self_exchange = rng.random_bool(0.5);
    e
}

#[test]
fn exchange_conserves_sites_and_undoes_itself() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut total_events = 0;
    for _ in 0..300 {
        let mut e = random_ensemble(&mut rng);
        let before = e.clone();
        let events = exchange_interaction(&mut e);
        total_events += events.len();
        assert_eq!(site_table(&e), site_table(&before));
        assert_eq!(e.current_points(), before.current_points());
        assert_eq!(e.previous_points(), before.previous_points());
        for s in &e.strings {
            assert!(s.sites.len() >= if s.closed { 3 } else { 2 });
        }
        // open ends are conserved: each reconnection swaps arms, never cuts
        let heads = |m: &BTreeMap<u64, Option<u64>>| m.values().filter(|v| v.is_none()).count();
        assert_eq!(heads(&successor_map(&e.strings)), heads(&successor_map(&before.strings)));
        for ev in events.iter().rev() {
            assert!(e.swap_arms(ev.sites[0], ev.sites[1]).unwrap().is_some());
        }
        assert_eq!(successor_map(&e.strings), successor_map(&before.strings));
    }
    assert!(total_events > 100, "only {total_events} exchanges exercised");
}

#[test]
fn ensemble_evolution_conserves_site_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..40 {
        let mut e = random_ensemble(&mut rng);
        let ids: BTreeSet<u64> = site_table(&e).into_keys().collect();
        for _ in 0..100 {
            e.step();
            assert_eq!(site_table(&e).into_keys().collect::<BTreeSet<_>>(), ids);
        }
    }
}

fn bits(x: usize, len: usize) -> Vec<i8> {
    (0..len).map(|k| if x >> k & 1 == 1 { -1 } else { 1 }).collect()
}

#[test]
fn boolean_factorisation_matches_exhaustive_search() {
    for len in 3..=6usize {
        // every pair of slices that periodic movers can produce at t = 0
        let mut reachable: HashSet<(Vec<i8>, Vec<i8>)> = HashSet::new();
        for l in 0..1usize << len {
            for r in 0..1usize << len {
                let (sl, sr) = (bits(l, len), bits(r, len));
                let at = |x: i64, t: i64| {
                    sl[(x + t).rem_euclid(len as i64) as usize] * sr[(x - t).rem_euclid(len as i64) as usize]
                };
                let prev: Vec<i8> = (0..len as i64).map(|x| at(x, -1)).collect();
                let cur: Vec<i8> = (0..len as i64).map(|x| at(x, 0)).collect();
                reachable.insert((prev, cur));
            }
        }
        let mut accepted = 0;
        for a in 0..1usize << len {
            for b in 0..1usize << len {
                let (prev, cur) = (bits(a, len), bits(b, len));
                let f = BooleanField::ring(&prev, &cur).unwrap();
                let split = split_boolean_movers(&f);
                assert_eq!(split.is_ok(), reachable.contains(&(prev, cur)), "L={len} {a} {b}");
                if let Ok(m) = split {
                    accepted += 1;
                    let mut g = f.clone();
                    for _ in 0..2 * len {
                        assert_eq!(m.slice(g.time, len), g.cur);
                        g = g.step();
                    }
                }
            }
        }
        assert_eq!(accepted, reachable.len());
    }
}

#[test]
fn boolean_movers_drive_random_rings() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let len = 32usize;
    for _ in 0..200 {
        let comps = rng.random_range(1..=3);
        let sl: Vec<Vec<i8>> = (0..len)
            .map(|_| (0..comps).map(|_| if rng.random_bool(0.5) { -1 } else { 1 }).collect())
            .collect();
        let sr: Vec<Vec<i8>> = (0..len)
            .map(|_| (0..comps).map(|_| if rng.random_bool(0.5) { -1 } else { 1 }).collect())
            .collect();
        let at = |x: i64, t: i64| -> Vec<i8> {
            let l = &sl[(x + t).rem_euclid(len as i64) as usize];
            let r = &sr[(x - t).rem_euclid(len as i64) as usize];
            l.iter().zip(r).map(|(a, b)| a * b).collect()
        };
        let prev: Vec<Vec<i8>> = (0..len as i64).map(|x| at(x, -1)).collect();
        let cur: Vec<Vec<i8>> = (0..len as i64).map(|x| at(x, 0)).collect();
        let f = BooleanField::new(Boundary::Periodic, prev, cur).unwrap();
        let m = split_boolean_movers(&f).unwrap();
        let mut g = f.clone();
        for _ in 0..200 {
            g = g.step();
            let want: Vec<Vec<i8>> = (0..len as i64).map(|x| at(x, g.time)).collect();
            assert_eq!(g.cur, want);
            assert_eq!(m.slice(g.time, len), want);
        }
        for _ in 0..200 {
            g = g.step_back();
        }
        assert_eq!(g, f);
    }
}

/// `c_i = Z ⊗ … ⊗ Z ⊗ σ⁻ ⊗ 1 ⊗ … ⊗ 1` assembled factor by factor.
fn kronecker_annihilator(n: usize, i: usize) -> ComplexMatrix {
    let two = Basis::indexed(2);
    let one = Complex64::new(1.0, 0.0);
    let z = ComplexMatrix::diagonal(&two, &[1.0, -1.0]).unwrap();
    let id = ComplexMatrix::identity(&two);
    let lower = ComplexMatrix::from_fn(&two, |r, c| if r == 0 && c == 1 { one } else { Complex64::new(0.0, 0.0) });
    (0..n)
        .map(|k| match k.cmp(&i) {
            std::cmp::Ordering::Less => z.clone(),
            std::cmp::Ordering::Equal => lower.clone(),
            std::cmp::Ordering::Greater => id.clone(),
        })
        .reduce(|a, b| a.kron(&b))
        .unwrap()
}

#[test]
fn annihilators_match_kronecker_products() {
    for n in 1..=5 {
        let chain = jordan_wigner(n).unwrap();
        for i in 0..n {
            let want = kronecker_annihilator(n, i);
            let got = chain.annihilator_matrix(i);
            assert_eq!(got.data(), want.data(), "n={n} i={i}");
        }
    }
}

#[test]
fn canonical_anticommutation_holds_up_to_the_chain_limit() {
    for n in 1..=MAX_CHAIN {
        let chain = jordan_wigner(n).unwrap();
        assert_eq!(chain.car_check().worst(), 0.0, "n={n}");
        assert_eq!(chain.parity_violations(), 0);
    }
    for n in 1..=MAX_DENSE_CHAIN {
        let chain = jordan_wigner(n).unwrap();
        assert!(chain.car_check_dense().unwrap().worst() <= 1e-15, "n={n}");
        assert_eq!(chain.parity_violations_dense(), 0);
    }
    assert!(jordan_wigner(MAX_CHAIN + 1).is_err());
}
