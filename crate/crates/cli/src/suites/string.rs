use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::path::Path;

use cadual_core::worldsheet::{
    exchange_interaction, spacetime_lattice_constant, split_string_movers, Boundary,
    OrientedString, Point, StringConfiguration, StringEnsemble, StringSpec, WorldSheetLattice,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{suite_rng, Outcome};
use crate::config::Resolved;
use crate::inputs::write_table;
use crate::report::Record;
use crate::CliError;

/// Violation counts gathered over one or more runs.
#[derive(Debug, Default)]
struct Tally {
    residual: i64,
    exchanges: usize,
    conservation: usize,
    undo: usize,
    reversibility: usize,
    mover_slices: usize,
    mover_contents: usize,
    kinds: BTreeMap<String, usize>,
}

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

/// Worst residual of the free step `before → after` at interior sites.
fn free_residual(before: &StringEnsemble, after: &StringEnsemble) -> i64 {
    let mut worst = 0i64;
    for (b, a) in before.strings.iter().zip(&after.strings) {
        let n = b.sites.len();
        let interior: Vec<usize> = if b.closed { (0..n).collect() } else { (1..n - 1).collect() };
        for i in interior {
            let (lo, hi) = ((i + n - 1) % n, (i + 1) % n);
            for m in 0..before.transverse_dims {
                let r = a.sites[i].cur[m] + b.sites[i].prev[m] - b.sites[lo].cur[m] - b.sites[hi].cur[m];
                worst = worst.max(r.abs());
            }
        }
    }
    worst
}

/// One exchange scan, checked for conservation and undone on a copy.
fn checked_exchange(ens: &mut StringEnsemble, tally: &mut Tally) -> Result<(), CliError> {
    let pre = ens.clone();
    let events = exchange_interaction(ens);
    if events.is_empty() {
        return Ok(());
    }
    tally.exchanges += events.len();
    for ev in &events {
        *tally.kinds.entry(format!("{:?}", ev.kind).to_lowercase()).or_default() += 1;
    }
    let conserved = pre.site_count() == ens.site_count()
        && site_table(&pre) == site_table(ens)
        && pre.current_points() == ens.current_points()
        && pre.previous_points() == ens.previous_points();
    tally.conservation += usize::from(!conserved);
    let mut back = ens.clone();
    for ev in events.iter().rev() {
        if back.swap_arms(ev.sites[0], ev.sites[1])?.is_none() {
            tally.undo += 1;
        }
    }
    tally.undo += usize::from(successor_map(&back.strings) != successor_map(&pre.strings));
    Ok(())
}

/// Free evolution of each string on its own: reversibility and movers.
fn check_free_strings(specs: &[StringSpec], dims: usize, steps: u64, tally: &mut Tally) -> Result<(), CliError> {
    for spec in specs {
        let boundary = if spec.closed { Boundary::Periodic } else { Boundary::Free };
        let lattice = WorldSheetLattice::new(spec.cur.len(), dims, boundary)?;
        let start = StringConfiguration::new(lattice, spec.prev.clone(), spec.cur.clone(), spec.orientation)?;
        let movers = split_string_movers(&start);
        let len = spec.cur.len();
        let mut c = start.clone();
        for _ in 0..steps {
            c = c.step();
            tally.mover_slices += usize::from(movers.slice(c.time, len) != c.cur);
        }
        let later = split_string_movers(&c);
        let sorted = |v: &[Point]| {
            let mut v = v.to_vec();
            v.sort();
            v
        };
        let same = later.left_increments == movers.left_increments
            && later.right_increments == movers.right_increments
            && sorted(&later.left_increments) == sorted(&movers.left_increments)
            && sorted(&later.right_increments) == sorted(&movers.right_increments);
        tally.mover_contents += usize::from(!same);
        for _ in 0..steps {
            c = c.step_back();
        }
        tally.reversibility += usize::from(c != start);
    }
    Ok(())
}

fn trajectory_rows(ens: &StringEnsemble, rows: &mut Vec<Vec<i64>>) {
    for (s, st) in ens.strings.iter().enumerate() {
        for (i, site) in st.sites.iter().enumerate() {
            let mut row = vec![ens.time, s as i64, i as i64, site.id as i64];
            row.extend(&site.cur);
            rows.push(row);
        }
    }
}

/// Evolve with exchange, checking every free step and every exchange scan.
fn run_ensemble(
    ens: &mut StringEnsemble,
    steps: u64,
    tally: &mut Tally,
    mut rows: Option<&mut Vec<Vec<i64>>>,
) -> Result<(), CliError> {
    check_free_strings(&ens.configurations(), ens.transverse_dims, steps, tally)?;
    if let Some(r) = rows.as_deref_mut() {
        trajectory_rows(ens, r);
    }
    for _ in 0..steps {
        let before = ens.clone();
        ens.free_step();
        tally.residual = tally.residual.max(free_residual(&before, ens));
        checked_exchange(ens, tally)?;
        if let Some(r) = rows.as_deref_mut() {
            trajectory_rows(ens, r);
        }
    }
    Ok(())
}

fn push_tally(out: &mut Outcome, label: &str, t: &Tally) {
    out.push(Record::exact(
        "string.wave-residual",
        format!("worst interior residual, {label}"),
        "X(σ,τ+a) + X(σ,τ-a) = X(σ+a,τ) + X(σ-a,τ)",
        t.residual as f64,
    ));
    out.push(Record::violations(
        "string.mover-conservation",
        format!("slices not rebuilt from initial movers, {label}"),
        "X(σ,τ) = X_L(τ+σ) + X_R(τ-σ)",
        t.mover_slices,
    ));
    out.push(Record::violations(
        "string.mover-conservation",
        format!("strings whose mover contents changed, {label}"),
        "X_L, X_R increments fixed up to rotation",
        t.mover_contents,
    ));
    out.push(Record::violations(
        "string.reversibility",
        format!("strings not restored by stepping back, {label}"),
        "X(σ,τ-a) = X(σ+a,τ) + X(σ-a,τ) - X(σ,τ+a)",
        t.reversibility,
    ));
    out.push(
        Record::violations(
            "string.exchange-conservation",
            format!("exchange scans changing sites or coordinates, {label}"),
            "swap of successors at coinciding points",
            t.conservation,
        )
        .with_note(format!("{} exchanges", t.exchanges)),
    );
    out.push(Record::violations(
        "string.exchange-conservation",
        format!("exchange scans not undone by a second swap, {label}"),
        "swap ∘ swap = identity on the successor map",
        t.undo,
    ));
}

fn push_lattice_constants(out: &mut Outcome, alpha_prime: f64) -> Result<(), CliError> {
    let mut cases = vec![(1.0, TAU), (1.0 / (4.0 * PI * PI), 1.0), (4.0, 2.0 * TAU)];
    if !cases.iter().any(|c| c.0 == alpha_prime) {
        cases.push((alpha_prime, TAU * alpha_prime.sqrt()));
    }
    let worst = cases
        .iter()
        .map(|&(a, want)| Ok((spacetime_lattice_constant(a)? - want).abs()))
        .collect::<Result<Vec<f64>, CliError>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let values: Vec<String> = cases.iter().map(|c| format!("{:.6}", c.0)).collect();
    out.push(Record::at_most(
        "string.lattice-constant",
        format!("α′ ∈ {{{}}}", values.join(", ")),
        "a = 2π√α′",
        worst,
        1e-14,
    ));
    out.output("lattice_constant", spacetime_lattice_constant(alpha_prime)?);
    Ok(())
}

fn random_points(rng: &mut ChaCha8Rng, len: usize, dims: usize, span: i64) -> Vec<Point> {
    (0..len)
        .map(|_| (0..dims).map(|_| rng.random_range(-span..=span)).collect())
        .collect()
}

fn random_spec(rng: &mut ChaCha8Rng, closed: bool, len: usize, dims: usize, span: i64) -> StringSpec {
    StringSpec {
        closed,
        orientation: if rng.random_bool(0.5) { 1 } else { -1 },
        prev: random_points(rng, len, dims, span),
        cur: random_points(rng, len, dims, span),
    }
}

/// One closed and one open string of `--sites` points in three dimensions.
pub(super) fn default_ensemble(params: &Resolved) -> Result<StringEnsemble, CliError> {
    let mut rng = suite_rng(params.seed, 5);
    let specs = vec![
        random_spec(&mut rng, true, params.sites, 3, 3),
        random_spec(&mut rng, false, params.sites, 3, 3),
    ];
    Ok(StringEnsemble::new(3, specs)?)
}

pub(super) fn simulate(
    mut ens: StringEnsemble,
    params: &Resolved,
    trajectory: Option<&Path>,
    out: &mut Outcome,
) -> Result<(), CliError> {
    push_lattice_constants(out, params.alpha_prime)?;
    let mut tally = Tally::default();
    let mut rows = Vec::new();
    run_ensemble(&mut ens, params.steps, &mut tally, trajectory.map(|_| &mut rows))?;
    push_tally(out, &format!("{} steps", params.steps), &tally);
    out.output("exchanges", &tally.kinds);
    out.output("strings", ens.strings.len());
    out.output("sites", ens.site_count());
    if let Some(path) = trajectory {
        let mut header: Vec<String> = ["step", "string", "sigma", "site"].map(String::from).to_vec();
        header.extend((1..=ens.transverse_dims).map(|m| format!("x{m}")));
        write_table(path, &header, &rows)?;
        out.artifacts.push(path.to_path_buf());
    }
    Ok(())
}

fn line(axis: usize, dims: usize, range: std::ops::RangeInclusive<i64>) -> Vec<Point> {
    range
        .map(|v| {
            let mut p = vec![0; dims];
            p[axis] = v;
            p
        })
        .collect()
}

fn square(x0: i64, y0: i64) -> Vec<Point> {
    [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1)]
        .iter()
        .map(|(x, y)| vec![x0 + x, y0 + y])
        .collect()
}

fn fixed(closed: bool, orientation: i8, cur: Vec<Point>) -> StringSpec {
    StringSpec {
        closed,
        orientation,
        prev: cur.clone(),
        cur,
    }
}

/// Hand-built coincidences: a crossing, overlapping loops, a self-crossing.
fn crossing_instances() -> Result<Vec<StringEnsemble>, CliError> {
    let mut figure_eight = StringEnsemble::new(
        2,
        vec![fixed(
            true,
            1,
            vec![
                vec![0, 0], vec![1, 1], vec![2, 0], vec![1, -1],
                vec![0, 0], vec![-1, 1], vec![-2, 0], vec![-1, -1],
            ],
        )],
    )?;
    figure_eight.self_exchange = true;
    Ok(vec![
        StringEnsemble::new(2, vec![fixed(false, 1, line(0, 2, -3..=3)), fixed(false, 1, line(1, 2, -3..=3))])?,
        StringEnsemble::new(2, vec![fixed(false, 1, line(0, 2, -3..=3)), fixed(false, -1, line(1, 2, -3..=3))])?,
        StringEnsemble::new(2, vec![fixed(true, 1, square(0, 0)), fixed(true, 1, square(2, 0))])?,
        StringEnsemble::new(2, vec![fixed(true, 1, square(0, 0)), fixed(false, -1, line(0, 2, -2..=4))])?,
        figure_eight,
    ])
}

pub(super) fn suite(params: &Resolved, out: &mut Outcome) -> Result<(), CliError> {
    let mut rng = suite_rng(params.seed, 5);

    let mut free = Tally::default();
    for k in 0..10 {
        let len = rng.random_range(3..=64);
        let spec = random_spec(&mut rng, k % 3 != 2, len, 3, 10);
        let mut ens = StringEnsemble::new(3, vec![spec])?;
        run_ensemble(&mut ens, params.steps, &mut free, None)?;
    }
    push_tally(out, &format!("10 random strings, {} steps", params.steps), &free);

    let mut crossing = Tally::default();
    for mut ens in crossing_instances()? {
        checked_exchange(&mut ens, &mut crossing)?;
        run_ensemble(&mut ens, params.steps.min(20), &mut crossing, None)?;
    }
    for _ in 0..40 {
        let count = rng.random_range(2..=5);
        let specs = (0..count)
            .map(|_| {
                let closed = rng.random_bool(0.5);
                let len = rng.random_range(if closed { 3 } else { 2 }..=9);
                let cur = random_points(&mut rng, len, 2, 2);
                fixed(closed, if rng.random_bool(0.5) { 1 } else { -1 }, cur)
            })
            .collect();
        let mut ens = StringEnsemble::new(2, specs)?;
        ens.self_exchange = rng.random_bool(0.5);
        checked_exchange(&mut ens, &mut crossing)?;
        run_ensemble(&mut ens, 10, &mut crossing, None)?;
    }
    push_tally(out, "crossing instances and dense random ensembles", &crossing);
    out.output("exchanges", &crossing.kinds);
    push_lattice_constants(out, params.alpha_prime)
}
