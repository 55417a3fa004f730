//! Integer string automaton on a world-sheet lattice.
//!
//! Transverse coordinates `X^μ(σ, τ)` are integers updated by
//!
//! ```text
//! X(σ, τ+a) = X(σ+a, τ) + X(σ-a, τ) - X(σ, τ-a),
//! ```
//!
//! solved equally well for the bottom slice, so the evolution is exactly
//! reversible. Solutions split into movers `X = X_L(σ+τ) + X_R(σ-τ)`.
//! Several strings may reconnect where their coordinates coincide: the arm
//! arriving at the common point continues along the arm leaving the other
//! one (see [`StringEnsemble`]).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Transverse coordinate vector of one site.
pub type Point = Vec<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Closed string, `σ` periodic.
    Periodic,
    /// Open string with reflecting ends (ghost `X(-1) = X(1)`).
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WorldSheetLattice {
    pub length: usize,
    /// Lattice step `a`; only scales `τ`.
    pub step: i64,
    pub transverse_dims: usize,
    pub boundary: Boundary,
}

impl WorldSheetLattice {
    pub fn new(length: usize, transverse_dims: usize, boundary: Boundary) -> Result<Self> {
        Self::with_step(length, transverse_dims, boundary, 1)
    }

    pub fn with_step(
        length: usize,
        transverse_dims: usize,
        boundary: Boundary,
        step: i64,
    ) -> Result<Self> {
        let min = match boundary {
            Boundary::Periodic => 3,
            Boundary::Free => 2,
        };
        if length < min {
            return Err(Error::out_of_range("string length", length, format!(">= {min}")));
        }
        if transverse_dims == 0 {
            return Err(Error::out_of_range("transverse dimensions", 0, ">= 1"));
        }
        if step <= 0 {
            return Err(Error::out_of_range("lattice step", step, ">= 1"));
        }
        Ok(Self {
            length,
            step,
            transverse_dims,
            boundary,
        })
    }

    /// Sites `σ - 1` and `σ + 1`.
    fn neighbours(&self, sigma: usize) -> (usize, usize) {
        neighbours(self.length, self.boundary == Boundary::Periodic, sigma)
    }
}

fn neighbours(len: usize, closed: bool, sigma: usize) -> (usize, usize) {
    if closed {
        ((sigma + len - 1) % len, (sigma + 1) % len)
    } else {
        let down = if sigma == 0 { 1 } else { sigma - 1 };
        let up = if sigma + 1 == len { len - 2 } else { sigma + 1 };
        (down, up)
    }
}

fn combine(a: &[i64], b: &[i64], c: &[i64]) -> Point {
    a.iter()
        .zip(b)
        .zip(c)
        .map(|((x, y), z)| x + y - z)
        .collect()
}

fn sub(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Two consecutive slices `X(·, τ-a)` and `X(·, τ)` of one string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringConfiguration {
    pub lattice: WorldSheetLattice,
    pub prev: Vec<Point>,
    pub cur: Vec<Point>,
    pub orientation: i8,
    /// Number of steps taken; `τ = time · a`.
    pub time: i64,
}

impl StringConfiguration {
    pub fn new(
        lattice: WorldSheetLattice,
        prev: Vec<Point>,
        cur: Vec<Point>,
        orientation: i8,
    ) -> Result<Self> {
        for slice in [&prev, &cur] {
            if slice.len() != lattice.length
                || slice.iter().any(|p| p.len() != lattice.transverse_dims)
            {
                return Err(Error::Invalid(format!(
                    "slices must have {} sites of {} coordinates",
                    lattice.length, lattice.transverse_dims
                )));
            }
        }
        if orientation != 1 && orientation != -1 {
            return Err(Error::out_of_range("orientation", orientation, "±1"));
        }
        Ok(Self {
            lattice,
            prev,
            cur,
            orientation,
            time: 0,
        })
    }

    pub fn tau(&self) -> i64 {
        self.time * self.lattice.step
    }

    fn advance(&self, slice: &[Point], other: &[Point]) -> Vec<Point> {
        (0..self.lattice.length)
            .map(|s| {
                let (d, u) = self.lattice.neighbours(s);
                combine(&slice[u], &slice[d], &other[s])
            })
            .collect()
    }

    /// One step forward.
    pub fn step(&self) -> Self {
        let next = self.advance(&self.cur, &self.prev);
        Self {
            prev: self.cur.clone(),
            cur: next,
            time: self.time + 1,
            ..self.clone()
        }
    }

    /// One step backward: the update solved for the bottom slice.
    pub fn step_back(&self) -> Self {
        let before = self.advance(&self.prev, &self.cur);
        Self {
            prev: before,
            cur: self.prev.clone(),
            time: self.time - 1,
            ..self.clone()
        }
    }

    pub fn evolve(&self, steps: u64) -> Self {
        (0..steps).fold(self.clone(), |c, _| c.step())
    }

    /// Worst `|X(σ,τ+a) + X(σ,τ-a) - X(σ+a,τ) - X(σ-a,τ)|` over the sites
    /// where the equation holds without boundary data (all of them on a
    /// closed string, `1..L-1` on an open one).
    pub fn wave_residual(&self, next: &[Point]) -> i64 {
        let sites: Vec<usize> = match self.lattice.boundary {
            Boundary::Periodic => (0..self.lattice.length).collect(),
            Boundary::Free => (1..self.lattice.length - 1).collect(),
        };
        sites
            .into_iter()
            .flat_map(|s| {
                let (d, u) = self.lattice.neighbours(s);
                (0..self.lattice.transverse_dims).map(move |m| (s, d, u, m))
            })
            .map(|(s, d, u, m)| {
                (next[s][m] + self.prev[s][m] - self.cur[u][m] - self.cur[d][m]).abs()
            })
            .max()
            .unwrap_or(0)
    }

    /// Slices on the ring the movers live on (an open string is unfolded
    /// into its mirror image).
    fn ring(&self) -> (Vec<Point>, Vec<Point>) {
        match self.lattice.boundary {
            Boundary::Periodic => (self.prev.clone(), self.cur.clone()),
            Boundary::Free => {
                let unfold = |s: &[Point]| {
                    let mut out = s.to_vec();
                    out.extend(s[1..s.len() - 1].iter().rev().cloned());
                    out
                };
                (unfold(&self.prev), unfold(&self.cur))
            }
        }
    }
}

/// `X = X_L(σ+τ) + X_R(σ-τ)` with `σ, τ` counted in lattice steps.
///
/// The two checkerboard sublattices decouple, so the split has one free
/// constant per sublattice; it is fixed by `X_R = 0` on the two light-cone
/// lines through `σ = 0` on the given slices. Values are stored over one
/// period `2P` of each mover together with the gain per period.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringMovers {
    /// Ring length `P` (`L`, or `2L - 2` for an unfolded open string).
    pub period: usize,
    pub time: i64,
    /// `X_L(u)` for `u ∈ [time-1, time-1+2P)`.
    pub left: Vec<Point>,
    /// `X_R(v)` for `v ∈ [2-time-2P, 2-time)`.
    pub right: Vec<Point>,
    /// `X_L(u+2P) - X_L(u)` by parity of `u`.
    pub left_gain: [Point; 2],
    /// `X_R(v+2P) - X_R(v)` by parity of `v`.
    pub right_gain: [Point; 2],
    /// `X(σ,τ) - X(σ-1,τ-1) = X_L(u) - X_L(u-2)`, indexed by `u mod P`.
    pub left_increments: Vec<Point>,
    /// `X(σ,τ) - X(σ+1,τ-1) = X_R(v) - X_R(v+2)`, indexed by `v mod P`.
    pub right_increments: Vec<Point>,
}

fn parity(x: i64) -> usize {
    x.rem_euclid(2) as usize
}

fn scale(p: &[i64], k: i64) -> Point {
    p.iter().map(|x| x * k).collect()
}

pub fn split_string_movers(config: &StringConfiguration) -> StringMovers {
    let (prev, cur) = config.ring();
    let p = cur.len();
    let pi = p as i64;
    let t = config.time;
    let dims = config.lattice.transverse_dims;
    let wrap = |x: i64| x.rem_euclid(pi) as usize;

    let mut left_increments = vec![vec![0; dims]; p];
    let mut right_increments = vec![vec![0; dims]; p];
    for s in 0..p {
        let si = s as i64;
        left_increments[wrap(si + t)] = sub(&cur[s], &prev[wrap(si - 1)]);
        right_increments[wrap(si - t)] = sub(&cur[s], &prev[wrap(si + 1)]);
    }

    let mut right = vec![vec![0; dims]; 2 * p];
    let v0 = 2 - t - 2 * pi;
    for r in (0..2 * p - 2).rev() {
        let v = v0 + r as i64;
        right[r] = add(&right[r + 2], &right_increments[wrap(v)]);
    }
    let mut left = vec![vec![0; dims]; 2 * p];
    left[0] = prev[0].clone();
    left[1] = cur[0].clone();
    for r in 2..2 * p {
        let u = t - 1 + r as i64;
        left[r] = add(&left[r - 2], &left_increments[wrap(u)]);
    }

    let gain = |inc: &[Point], start: i64, sign: i64| -> Point {
        (1..=pi).fold(vec![0; dims], |acc, j| {
            add(&acc, &scale(&inc[wrap(start + 2 * j)], sign))
        })
    };
    StringMovers {
        period: p,
        time: t,
        left,
        right,
        left_gain: [gain(&left_increments, 0, 1), gain(&left_increments, 1, 1)],
        right_gain: [gain(&right_increments, 0, -1), gain(&right_increments, 1, -1)],
        left_increments,
        right_increments,
    }
}

impl StringMovers {
    fn lookup(values: &[Point], gain: &[Point; 2], base: i64, at: i64) -> Point {
        let span = values.len() as i64;
        let offset = at - base;
        let k = offset.div_euclid(span);
        let r = offset.rem_euclid(span) as usize;
        add(&values[r], &scale(&gain[parity(at)], k))
    }

    pub fn left_at(&self, u: i64) -> Point {
        Self::lookup(&self.left, &self.left_gain, self.time - 1, u)
    }

    pub fn right_at(&self, v: i64) -> Point {
        let base = 2 - self.time - 2 * self.period as i64;
        Self::lookup(&self.right, &self.right_gain, base, v)
    }

    /// `X(σ, τ)` at step `t` recomposed from the movers.
    pub fn value(&self, sigma: i64, t: i64) -> Point {
        add(&self.left_at(sigma + t), &self.right_at(sigma - t))
    }

    /// Slice at step `t`, on the first `len` sites.
    pub fn slice(&self, t: i64, len: usize) -> Vec<Point> {
        (0..len as i64).map(|s| self.value(s, t)).collect()
    }
}

/// `a_spacetime = 2π√α′`.
pub fn spacetime_lattice_constant(alpha_prime: f64) -> Result<f64> {
    if !(alpha_prime.is_finite() && alpha_prime > 0.0) {
        return Err(Error::out_of_range("alpha'", alpha_prime, "> 0"));
    }
    Ok(TAU * alpha_prime.sqrt())
}

/// One site of a string in an ensemble; the id survives reconnections.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Site {
    pub id: u64,
    pub prev: Point,
    pub cur: Point,
}

/// A string as an ordered list of sites. The arrow runs along the stored
/// order for orientation `+1` and against it for `-1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientedString {
    pub sites: Vec<Site>,
    pub closed: bool,
    pub orientation: i8,
}

impl OrientedString {
    fn min_len(closed: bool) -> usize {
        if closed {
            3
        } else {
            2
        }
    }

    fn arrow_order(&self) -> Vec<&Site> {
        let mut v: Vec<&Site> = self.sites.iter().collect();
        if self.orientation < 0 {
            v.reverse();
        }
        v
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        let n = self.sites.len();
        i.abs_diff(j) == 1 || (self.closed && i.abs_diff(j) == n - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExchangeKind {
    /// Two strings exchange arms and remain two strings.
    Reconnect,
    /// Two strings join into one.
    Merge,
    /// One string splits into two.
    Split,
    /// One string is rewired and stays one string.
    Rewire,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExchangeEvent {
    pub step: i64,
    /// String indices before the exchange.
    pub strings: [usize; 2],
    /// Positions along the strings before the exchange.
    pub sigma: [usize; 2],
    pub sites: [u64; 2],
    pub point: Point,
    pub kind: ExchangeKind,
}

/// Several strings evolving together, reconnecting where they meet.
///
/// Reconnection swaps the successors (along the arrow) of the two sites that
/// share a point: the arm arriving at one site continues along the arm that
/// leaves the other. Applying the same swap twice restores the original
/// successor map, hence the original connectivity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringEnsemble {
    pub transverse_dims: usize,
    pub strings: Vec<OrientedString>,
    pub time: i64,
    /// Allow a string to exchange with itself at a self-intersection.
    pub self_exchange: bool,
    next_id: u64,
}

/// One string as accepted from structured text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringSpec {
    pub closed: bool,
    #[serde(default = "positive")]
    pub orientation: i8,
    pub prev: Vec<Point>,
    pub cur: Vec<Point>,
}

fn positive() -> i8 {
    1
}

impl StringEnsemble {
    pub fn new(transverse_dims: usize, specs: Vec<StringSpec>) -> Result<Self> {
        let mut ens = Self {
            transverse_dims,
            strings: Vec::new(),
            time: 0,
            self_exchange: false,
            next_id: 0,
        };
        for spec in specs {
            ens.push(spec)?;
        }
        Ok(ens)
    }

    pub fn from_configurations(configs: &[StringConfiguration]) -> Result<Self> {
        let dims = configs
            .first()
            .map(|c| c.lattice.transverse_dims)
            .ok_or_else(|| Error::Invalid("no strings".into()))?;
        let specs = configs
            .iter()
            .map(|c| StringSpec {
                closed: c.lattice.boundary == Boundary::Periodic,
                orientation: c.orientation,
                prev: c.prev.clone(),
                cur: c.cur.clone(),
            })
            .collect();
        Self::new(dims, specs)
    }

    pub fn push(&mut self, spec: StringSpec) -> Result<()> {
        let lattice = WorldSheetLattice::new(
            spec.cur.len(),
            self.transverse_dims,
            if spec.closed {
                Boundary::Periodic
            } else {
                Boundary::Free
            },
        )?;
        let c = StringConfiguration::new(lattice, spec.prev, spec.cur, spec.orientation)?;
        let sites = c
            .prev
            .into_iter()
            .zip(c.cur)
            .map(|(prev, cur)| {
                self.next_id += 1;
                Site {
                    id: self.next_id - 1,
                    prev,
                    cur,
                }
            })
            .collect();
        self.strings.push(OrientedString {
            sites,
            closed: spec.closed,
            orientation: spec.orientation,
        });
        Ok(())
    }

    pub fn site_count(&self) -> usize {
        self.strings.iter().map(|s| s.sites.len()).sum()
    }

    /// All current coordinate vectors, sorted.
    pub fn current_points(&self) -> Vec<Point> {
        let mut v: Vec<Point> = self
            .strings
            .iter()
            .flat_map(|s| s.sites.iter().map(|x| x.cur.clone()))
            .collect();
        v.sort();
        v
    }

    /// All previous-slice coordinate vectors, sorted.
    pub fn previous_points(&self) -> Vec<Point> {
        let mut v: Vec<Point> = self
            .strings
            .iter()
            .flat_map(|s| s.sites.iter().map(|x| x.prev.clone()))
            .collect();
        v.sort();
        v
    }

    /// Free evolution of every string, then one exchange scan.
    pub fn step(&mut self) -> Vec<ExchangeEvent> {
        self.free_step();
        exchange_interaction(self)
    }

    /// Free evolution of every string, no exchange.
    pub fn free_step(&mut self) {
        for s in &mut self.strings {
            let n = s.sites.len();
            let next: Vec<Point> = (0..n)
                .map(|i| {
                    let (d, u) = neighbours(n, s.closed, i);
                    combine(&s.sites[u].cur, &s.sites[d].cur, &s.sites[i].prev)
                })
                .collect();
            for (site, new) in s.sites.iter_mut().zip(next) {
                site.prev = std::mem::replace(&mut site.cur, new);
            }
        }
        self.time += 1;
    }

    fn locate(&self, id: u64) -> Option<(usize, usize)> {
        self.strings.iter().enumerate().find_map(|(s, st)| {
            st.sites.iter().position(|x| x.id == id).map(|i| (s, i))
        })
    }

    /// Reconnect at the sites `a` and `b`. Returns `None` (and leaves the
    /// ensemble unchanged) when a resulting closed string would have fewer
    /// than 3 sites or an open one fewer than 2.
    pub fn swap_arms(&mut self, a: u64, b: u64) -> Result<Option<ExchangeKind>> {
        let (sa, _) = self
            .locate(a)
            .ok_or_else(|| Error::Invalid(format!("unknown site {a}")))?;
        let (sb, _) = self
            .locate(b)
            .ok_or_else(|| Error::Invalid(format!("unknown site {b}")))?;
        if a == b {
            return Err(Error::Invalid("a site cannot exchange with itself".into()));
        }
        let mut involved = vec![sa, sb];
        involved.sort_unstable();
        involved.dedup();

        let mut succ: HashMap<u64, Option<u64>> = HashMap::new();
        let mut store: HashMap<u64, Site> = HashMap::new();
        for &s in &involved {
            let st = &self.strings[s];
            let order = st.arrow_order();
            for (k, site) in order.iter().enumerate() {
                let next = match order.get(k + 1) {
                    Some(n) => Some(n.id),
                    None if st.closed => Some(order[0].id),
                    None => None,
                };
                succ.insert(site.id, next);
                store.insert(site.id, (*site).clone());
            }
        }
        let sa_next = succ[&a];
        let sb_next = succ[&b];
        succ.insert(a, sb_next);
        succ.insert(b, sa_next);

        let components = rebuild(&succ, a, b);
        if components
            .iter()
            .any(|(ids, closed)| ids.len() < OrientedString::min_len(*closed))
        {
            return Ok(None);
        }
        let orientation = self.strings[involved[0]].orientation;
        let built: Vec<OrientedString> = components
            .into_iter()
            .map(|(ids, closed)| {
                let mut sites: Vec<Site> = ids.iter().map(|id| store[id].clone()).collect();
                if orientation < 0 {
                    sites.reverse();
                }
                OrientedString {
                    sites,
                    closed,
                    orientation,
                }
            })
            .collect();

        let kind = match (involved.len(), built.len()) {
            (2, 2) => ExchangeKind::Reconnect,
            (2, _) => ExchangeKind::Merge,
            (1, 2) => ExchangeKind::Split,
            _ => ExchangeKind::Rewire,
        };
        let mut built = built.into_iter();
        self.strings[involved[0]] = built.next().expect("at least one component");
        match (involved.get(1), built.next()) {
            (Some(&slot), Some(s)) => self.strings[slot] = s,
            (Some(&slot), None) => {
                self.strings.remove(slot);
            }
            (None, Some(s)) => self.strings.insert(involved[0] + 1, s),
            (None, None) => {}
        }
        Ok(Some(kind))
    }

    pub fn configurations(&self) -> Vec<StringSpec> {
        self.strings
            .iter()
            .map(|s| StringSpec {
                closed: s.closed,
                orientation: s.orientation,
                prev: s.sites.iter().map(|x| x.prev.clone()).collect(),
                cur: s.sites.iter().map(|x| x.cur.clone()).collect(),
            })
            .collect()
    }
}

/// Split a successor map into strings, in arrow order. The component holding
/// `a` comes first; closed components start at `a` (or `b`).
fn rebuild(succ: &HashMap<u64, Option<u64>>, a: u64, b: u64) -> Vec<(Vec<u64>, bool)> {
    let has_pred: HashSet<u64> = succ.values().flatten().copied().collect();
    let mut starts: Vec<(u64, bool)> = Vec::new();
    let mut open_starts: Vec<u64> = succ
        .keys()
        .filter(|id| !has_pred.contains(id))
        .copied()
        .collect();
    open_starts.sort_unstable();
    starts.extend(open_starts.into_iter().map(|id| (id, false)));
    starts.push((a, true));
    starts.push((b, true));

    let mut seen: HashSet<u64> = HashSet::new();
    let mut comps: Vec<(Vec<u64>, bool)> = Vec::new();
    for (start, closed) in starts {
        if seen.contains(&start) {
            continue;
        }
        let mut ids = Vec::new();
        let mut cur = Some(start);
        while let Some(id) = cur {
            if !seen.insert(id) {
                break;
            }
            ids.push(id);
            cur = succ[&id];
        }
        comps.push((ids, closed));
    }
    comps.sort_by_key(|(ids, _)| !ids.contains(&a));
    comps
}

/// Reconnect every pair of sites sharing a point on the current slice.
///
/// Pairs are chosen before any reconnection, scanning strings by index and
/// sites by position; each site takes part in at most one exchange, and its
/// partner is the first later site at the same point. Neighbouring sites of
/// one string are not crossings, and a string meets itself only when
/// `self_exchange` is set.
pub fn exchange_interaction(ens: &mut StringEnsemble) -> Vec<ExchangeEvent> {
    let mut at: BTreeMap<&Point, Vec<(usize, usize)>> = BTreeMap::new();
    for (s, st) in ens.strings.iter().enumerate() {
        for (i, site) in st.sites.iter().enumerate() {
            at.entry(&site.cur).or_default().push((s, i));
        }
    }
    let mut used: HashSet<(usize, usize)> = HashSet::new();
    let mut pairs = Vec::new();
    for (s, st) in ens.strings.iter().enumerate() {
        for (i, site) in st.sites.iter().enumerate() {
            if used.contains(&(s, i)) {
                continue;
            }
            let partner = at[&site.cur].iter().copied().find(|&(t, j)| {
                (t, j) > (s, i)
                    && !used.contains(&(t, j))
                    && (t != s || (ens.self_exchange && !st.adjacent(i, j)))
            });
            if let Some((t, j)) = partner {
                used.insert((s, i));
                used.insert((t, j));
                pairs.push(((s, i), (t, j), site.id, ens.strings[t].sites[j].id, site.cur.clone()));
            }
        }
    }
    let mut events = Vec::new();
    for ((s, i), (t, j), a, b, point) in pairs {
        if let Ok(Some(kind)) = ens.swap_arms(a, b) {
            events.push(ExchangeEvent {
                step: ens.time,
                strings: [s, t],
                sigma: [i, j],
                sites: [a, b],
                point,
                kind,
            });
        }
    }
    events
}
