use std::collections::HashSet;
use std::path::Path;

use cadual_core::fermion::{
    jordan_wigner, split_boolean_movers, BooleanField, BooleanMovers, MAX_DENSE_CHAIN,
};
use cadual_core::worldsheet::Boundary;
use cadual_core::Error;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{suite_rng, Outcome};
use crate::config::Resolved;
use crate::inputs::write_table;
use crate::report::Record;
use crate::CliError;

fn spin(rng: &mut ChaCha8Rng) -> i8 {
    if rng.random_bool(0.5) {
        -1
    } else {
        1
    }
}

/// Ring built from random movers, hence factorizable.
fn random_factorizable(rng: &mut ChaCha8Rng, len: usize, comps: usize) -> Result<BooleanField, CliError> {
    let mut draw = || -> Vec<Vec<i8>> { (0..len).map(|_| (0..comps).map(|_| spin(rng)).collect()).collect() };
    let movers = BooleanMovers {
        left: draw(),
        right: draw(),
    };
    Ok(BooleanField::new(
        Boundary::Periodic,
        movers.slice(-1, len),
        movers.slice(0, len),
    )?)
}

pub(super) fn default_field(params: &Resolved) -> Result<BooleanField, CliError> {
    random_factorizable(&mut suite_rng(params.seed, 6), params.sites, 1)
}

/// Same movers up to the sign freedom on each checkerboard sublattice.
fn gauge_equivalent(a: &BooleanMovers, b: &BooleanMovers) -> bool {
    let p = a.period();
    if b.period() != p {
        return false;
    }
    let classes = if p % 2 == 0 { 2 } else { 1 };
    (0..classes).all(|c| {
        let ratio = |u: usize| -> Vec<i8> { a.left[u].iter().zip(&b.left[u]).map(|(x, y)| x * y).collect() };
        let first = ratio(c);
        (c..p).step_by(classes).all(|u| ratio(u) == first)
    })
}

#[derive(Debug, Default)]
struct Tally {
    reversibility: usize,
    not_factorized: usize,
    mover_slices: usize,
    mover_contents: usize,
}

fn check_field(field: &BooleanField, steps: u64, tally: &mut Tally, mut rows: Option<&mut Vec<Vec<i64>>>) -> Result<(), CliError> {
    let movers = match split_boolean_movers(field) {
        Ok(m) => Some(m),
        Err(Error::Inconsistent(_)) => {
            tally.not_factorized += 1;
            None
        }
        Err(e) => return Err(e.into()),
    };
    let len = field.sites();
    let mut g = field.clone();
    let mut push_row = |g: &BooleanField| {
        if let Some(r) = rows.as_deref_mut() {
            for (x, site) in g.cur.iter().enumerate() {
                let mut row = vec![g.time, x as i64];
                row.extend(site.iter().map(|&v| i64::from(v)));
                r.push(row);
            }
        }
    };
    push_row(&g);
    for _ in 0..steps {
        g = g.step();
        push_row(&g);
        if let Some(m) = &movers {
            tally.mover_slices += usize::from(m.slice(g.time, len) != g.cur);
        }
    }
    if let Some(m) = &movers {
        match split_boolean_movers(&g) {
            Ok(later) => tally.mover_contents += usize::from(!gauge_equivalent(m, &later)),
            Err(_) => tally.not_factorized += 1,
        }
    }
    for _ in 0..steps {
        g = g.step_back();
    }
    tally.reversibility += usize::from(g != *field);
    Ok(())
}

fn bits(x: usize, len: usize) -> Vec<i8> {
    (0..len).map(|k| if x >> k & 1 == 1 { -1 } else { 1 }).collect()
}

/// Disagreements between the factorisation and a search over all movers.
fn exhaustive_factorization(max_len: usize) -> Result<(usize, usize), CliError> {
    let (mut wrong, mut pairs) = (0usize, 0usize);
    for len in 3..=max_len {
        let mut reachable: HashSet<(Vec<i8>, Vec<i8>)> = HashSet::new();
        for l in 0..1usize << len {
            for r in 0..1usize << len {
                let m = BooleanMovers {
                    left: bits(l, len).into_iter().map(|v| vec![v]).collect(),
                    right: bits(r, len).into_iter().map(|v| vec![v]).collect(),
                };
                let flat = |t: i64| m.slice(t, len).into_iter().map(|v| v[0]).collect::<Vec<i8>>();
                reachable.insert((flat(-1), flat(0)));
            }
        }
        for a in 0..1usize << len {
            for b in 0..1usize << len {
                let (prev, cur) = (bits(a, len), bits(b, len));
                let field = BooleanField::ring(&prev, &cur)?;
                let split = split_boolean_movers(&field);
                wrong += usize::from(split.is_ok() != reachable.contains(&(prev, cur)));
                if let Ok(m) = split {
                    pairs += 1;
                    let mut g = field;
                    for _ in 0..2 * len {
                        g = g.step();
                        wrong += usize::from(m.slice(g.time, len) != g.cur);
                    }
                }
            }
        }
    }
    Ok((wrong, pairs))
}

fn push_tally(out: &mut Outcome, label: &str, t: &Tally) {
    out.push(Record::violations(
        "boolean.reversibility",
        format!("fields not restored by stepping back, {label}"),
        "s(x,t-1) = s(x-1,t) s(x+1,t) s(x,t+1)",
        t.reversibility,
    ));
    out.push(Record::violations(
        "boolean.factorization",
        format!("inputs or evolved fields without periodic movers, {label}"),
        "s(x,t) = s_L(x+t) s_R(x-t)",
        t.not_factorized,
    ));
    out.push(Record::violations(
        "boolean.mover-conservation",
        format!("slices not rebuilt from initial movers, {label}"),
        "s(x,t) = s_L(x+t) s_R(x-t)",
        t.mover_slices,
    ));
    out.push(Record::violations(
        "boolean.mover-conservation",
        format!("movers changed beyond rotation and sign gauge, {label}"),
        "s_L, s_R contents fixed",
        t.mover_contents,
    ));
}

fn push_chain(out: &mut Outcome, n: usize) -> Result<(), CliError> {
    let chain = jordan_wigner(n)?;
    out.push(Record::exact(
        "fermion.car",
        format!("exact composition, n = {n}"),
        "{c_i, c_j†} = δ_ij, {c_i, c_j} = 0",
        chain.car_check().worst(),
    ));
    out.push(Record::violations(
        "fermion.parity",
        format!("entries joining equal parities, n = {n}"),
        "c_i = Z_0 ⋯ Z_{i-1} σ⁻_i",
        chain.parity_violations(),
    ));
    if n <= MAX_DENSE_CHAIN {
        out.push(Record::exact(
            "fermion.car",
            format!("dense anticommutators, n = {n}"),
            "{c_i, c_j†} = δ_ij, {c_i, c_j} = 0",
            chain.car_check_dense()?.worst(),
        ));
        out.push(Record::violations(
            "fermion.parity",
            format!("dense blocks joining equal parities, n = {n}"),
            "c_i = Z_0 ⋯ Z_{i-1} σ⁻_i",
            chain.parity_violations_dense(),
        ));
    }
    Ok(())
}

pub(super) fn simulate(
    field: BooleanField,
    params: &Resolved,
    trajectory: Option<&Path>,
    out: &mut Outcome,
) -> Result<(), CliError> {
    let mut tally = Tally::default();
    let mut rows = Vec::new();
    check_field(&field, params.steps, &mut tally, trajectory.map(|_| &mut rows))?;
    push_tally(out, &format!("{} sites, {} steps", field.sites(), params.steps), &tally);
    push_chain(out, params.chain)?;
    if let Some(path) = trajectory {
        let mut header: Vec<String> = vec!["step".into(), "site".into()];
        header.extend((1..=field.components()).map(|c| format!("s{c}")));
        write_table(path, &header, &rows)?;
        out.artifacts.push(path.to_path_buf());
    }
    Ok(())
}

pub(super) fn suite(params: &Resolved, out: &mut Outcome) -> Result<(), CliError> {
    let mut rng = suite_rng(params.seed, 6);
    let (wrong, pairs) = exhaustive_factorization(6)?;
    out.push(
        Record::violations(
            "boolean.factorization",
            "all slice pairs on rings 3 <= L <= 6 against a search over movers",
            "s(x,t) = s_L(x+t) s_R(x-t)",
            wrong,
        )
        .with_note(format!("{pairs} factorizable pairs")),
    );
    let mut tally = Tally::default();
    for _ in 0..200 {
        let comps = rng.random_range(1..=3);
        let field = random_factorizable(&mut rng, 32, comps)?;
        check_field(&field, params.steps, &mut tally, None)?;
    }
    push_tally(out, &format!("200 random rings of 32 sites, {} steps", params.steps), &tally);
    let mut chains = vec![1, 2, params.chain];
    chains.sort_unstable();
    chains.dedup();
    for n in chains {
        push_chain(out, n)?;
    }
    Ok(())
}
