//! Single-agent route enumeration by labeling.
//!
//! A label is a feasible route prefix summarised by (visited set, last task,
//! completion time, energy used, accumulated profit). Labels are grown one
//! visit at a time, level by level. Within one (set, last) bucket a label that
//! finishes no later, uses no more energy and earns no less is kept; the
//! others are dropped, since every extension of the loser is available to the
//! winner at equal or better profit.

use std::collections::HashMap;
use std::hash::Hash;
use std::time::Instant;

use crate::geometry::TravelTable;
use crate::model::{Instance, FEAS_TOL};
use crate::schedule::Cursor;

/// Fixed-width task set over local task indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Bits<const W: usize>(pub [u64; W]);

pub(crate) trait TaskBits: Copy + Eq + Hash + Ord + Send + Sync {
    const CAPACITY: usize;
    fn empty() -> Self;
    fn with(self, i: usize) -> Self;
    fn contains(&self, i: usize) -> bool;
}

impl<const W: usize> TaskBits for Bits<W> {
    const CAPACITY: usize = 64 * W;

    #[inline]
    fn empty() -> Self {
        Bits([0; W])
    }

    #[inline]
    fn with(mut self, i: usize) -> Self {
        self.0[i / 64] |= 1 << (i % 64);
        self
    }

    #[inline]
    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
}

pub(crate) const NO_PARENT: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Label<B> {
    pub set: B,
    pub last: u16,
    pub mode: u8,
    pub parent: u32,
    /// `set` plus tasks that can no longer be reached.
    pub closed: B,
    pub completion: f64,
    pub energy: f64,
    pub value: f64,
    /// Upper bound on profit still obtainable from unvisited tasks.
    pub potential: f64,
}

/// The routes one agent could drive over a subset of tasks, with per-visit profits.
pub(crate) struct RouteSpace<'a> {
    pub instance: &'a Instance,
    pub table: &'a TravelTable,
    /// local index -> instance task index
    pub tasks: Vec<usize>,
    /// local index -> per-mode profit of visiting in that mode (`-inf` disables the mode)
    pub profit: Vec<Vec<f64>>,
    /// local index -> cheapest travel time into the task from the depot or another task
    min_in: Vec<f64>,
    /// local index -> latest completion that meets the window and still returns in time
    due: Vec<f64>,
    /// local indices by `due`
    order: Vec<usize>,
    /// False when no route can run out of energy, so energy never decides dominance.
    energy_binds: bool,
    /// local index -> hull increments over all profitable modes
    hull: Vec<Vec<(f64, f64)>>,
}

/// Reused buffers for [`RouteSpace::bound`].
#[derive(Default)]
struct BoundScratch {
    /// (time, profit, deadline rank)
    segs: Vec<(f64, f64, usize)>,
    room: Vec<f64>,
    items: Vec<(f64, f64)>,
}

/// Upper concave hull of `(time, profit)` items starting from (0, 0), pushed
/// as increments with steepest first.
fn push_hull(items: &mut [(f64, f64)], rank: usize, out: &mut Vec<(f64, f64, usize)>) {
    items.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    let (mut w0, mut p0) = (0.0, 0.0);
    let mut i = 0;
    while i < items.len() {
        let mut best = None;
        let mut best_slope = 0.0;
        for (idx, &(w, p)) in items.iter().enumerate().skip(i) {
            if p <= p0 {
                continue;
            }
            let dw = w - w0;
            let slope = if dw <= 0.0 { f64::INFINITY } else { (p - p0) / dw };
            if best.is_none() || slope >= best_slope {
                best = Some(idx);
                best_slope = slope;
            }
        }
        let Some(idx) = best else { break };
        let (w, p) = items[idx];
        out.push((w - w0, p - p0, rank));
        w0 = w;
        p0 = p;
        i = idx + 1;
    }
}

impl<'a> RouteSpace<'a> {
    pub fn new(instance: &'a Instance, table: &'a TravelTable, tasks: Vec<usize>, profit: Vec<Vec<f64>>) -> Self {
        let min_in: Vec<f64> = tasks
            .iter()
            .map(|&t| {
                let to = TravelTable::node(t);
                tasks
                    .iter()
                    .filter(|&&u| u != t)
                    .map(|&u| table.time(TravelTable::node(u), to))
                    .fold(table.time(TravelTable::DEPOT, to), f64::min)
            })
            .collect();
        let due = tasks
            .iter()
            .map(|&t| {
                let home = table.time(TravelTable::node(t), TravelTable::DEPOT);
                instance.tasks()[t].window_end.min(instance.horizon() - home) + FEAS_TOL
            })
            .collect::<Vec<f64>>();
        let mut order: Vec<usize> = (0..tasks.len()).collect();
        order.sort_by(|&a, &b| due[a].total_cmp(&due[b]).then(a.cmp(&b)));
        let hull = (0..tasks.len())
            .map(|j| {
                let modes = &instance.tasks()[tasks[j]].modes;
                let mut items: Vec<(f64, f64)> = profit[j]
                    .iter()
                    .enumerate()
                    .filter(|&(_, &p)| p > 0.0)
                    .map(|(m, &p)| (modes[m].service_time + min_in[j], p))
                    .collect();
                let mut segs = Vec::new();
                push_hull(&mut items, 0, &mut segs);
                segs.into_iter().map(|(w, p, _)| (w, p)).collect()
            })
            .collect();
        let fleet = instance.fleet();
        let service: f64 = tasks
            .iter()
            .map(|&t| instance.tasks()[t].modes.iter().map(|m| m.energy).fold(0.0, f64::max))
            .sum();
        let driving = fleet.speed * instance.horizon() * fleet.travel_energy_rate;
        let energy_binds = service + driving > fleet.capacity;
        RouteSpace {
            instance,
            table,
            tasks,
            profit,
            min_in,
            due,
            order,
            hull,
            energy_binds,
        }
    }

    /// Upper bound on the profit any extension of a route ending in `cursor`
    /// can still add, visiting only tasks outside `set`.
    ///
    /// Each task still reachable from here offers its feasible modes as
    /// (time, profit) items, time being service plus the cheapest way in.
    /// Every task must be done by its deadline (window end, or the latest
    /// finish that still makes it home), so tasks due by `d` must fit in
    /// `d - now`. The bound is the LP optimum of choosing at most one item per
    /// task under those nested time budgets: per task the upper concave hull
    /// of its items, then hull segments greedily by slope.
    ///
    /// Also returns `set` plus every task no enabled mode can still reach.
    fn bound<B: TaskBits>(&self, set: B, cursor: &Cursor, scratch: &mut BoundScratch) -> (f64, B) {
        let BoundScratch { segs, room, items } = scratch;
        segs.clear();
        room.clear();
        let mut closed = set;
        let mut total = 0.0;
        let mut used = 0.0;
        let mut fits = true;
        for &j in &self.order {
            if set.contains(j) {
                continue;
            }
            let task = self.tasks[j];
            items.clear();
            let mut all = true;
            let mut reachable = false;
            for (m, &p) in self.profit[j].iter().enumerate() {
                if p == f64::NEG_INFINITY {
                    continue;
                }
                if cursor.extend(self.instance, self.table, task, m).is_ok() {
                    reachable = true;
                    if p > 0.0 {
                        items.push((self.instance.tasks()[task].modes[m].service_time + self.min_in[j], p));
                    }
                } else if p > 0.0 {
                    all = false;
                }
            }
            if !reachable {
                closed = closed.with(j);
            }
            if items.is_empty() {
                continue;
            }
            let rank = room.len();
            let start = segs.len();
            if all {
                segs.extend(self.hull[j].iter().map(|&(w, p)| (w, p, rank)));
            } else {
                push_hull(items, rank, segs);
            }
            for &(w, p, _) in &segs[start..] {
                used += w;
                total += p;
            }
            let r = self.due[j] - cursor.completion;
            fits &= used <= r;
            room.push(r);
        }
        if fits {
            return (total, closed);
        }
        segs.sort_unstable_by(|a, b| (b.1 * a.0).total_cmp(&(a.1 * b.0)));
        let mut value = 0.0;
        for &(w, p, r) in segs.iter() {
            let cap = room[r..].iter().copied().fold(f64::INFINITY, f64::min);
            if cap <= 0.0 {
                continue;
            }
            let take = w.min(cap);
            value += if take >= w { p } else { p * take / w };
            for x in &mut room[r..] {
                *x -= take;
            }
        }
        (value, closed)
    }

    /// Instance `(task, mode)` sequence of the route ending in `label`.
    pub fn path<B: TaskBits>(&self, arena: &[Label<B>], mut idx: u32) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        while idx != NO_PARENT {
            let l = &arena[idx as usize];
            out.push((self.tasks[l.last as usize], l.mode as usize));
            idx = l.parent;
        }
        out.reverse();
        out
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct LabelLimits {
    pub deadline: Option<Instant>,
    pub max_labels: Option<usize>,
    /// Expand only this many labels per level, most promising first.
    pub beam: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Stop {
    Exhausted,
    /// Finished, but the beam dropped labels along the way.
    Truncated,
    Deadline,
    LabelCap,
}

/// Controls pruning during a labeling run.
pub(crate) trait Visitor<B> {
    /// Called for every label as it is stored; it may be dominated later.
    fn visit(&mut self, idx: u32, label: &Label<B>);
    /// Labels whose `value + potential` cannot beat this are not stored.
    fn prune_below(&self) -> f64 {
        f64::NEG_INFINITY
    }
    /// Called now and then during the search; a chance to tighten the pruning threshold.
    fn end_level(&mut self) {}
    /// Whether the best route for every visited set must survive, rather than
    /// just the most valuable routes overall.
    fn needs_every_set(&self) -> bool {
        true
    }
}

pub(crate) struct LabelRun<B> {
    pub arena: Vec<Label<B>>,
    pub stop: Stop,
}

pub(crate) fn run_labeling<B: TaskBits, V: Visitor<B>>(
    space: &RouteSpace<'_>,
    limits: LabelLimits,
    visitor: &mut V,
) -> LabelRun<B> {
    let n = space.tasks.len();
    assert!(n <= B::CAPACITY, "task subset exceeds label bit width");
    let instance = space.instance;
    let table = space.table;
    // Keying buckets by the closed set lets routes over different tasks
    // dominate each other; only sound when one route per set is not needed.
    let merge = !visitor.needs_every_set();

    let mut arena: Vec<Label<B>> = Vec::new();
    let mut dead: Vec<bool> = Vec::new();
    let mut buckets: HashMap<(B, u16), Vec<u32>> = HashMap::new();
    let mut scratch = BoundScratch::default();
    let mut level: Vec<u32> = Vec::new();
    let mut parents: Vec<Option<u32>> = vec![None];
    let mut truncated = false;
    let mut checks = 0usize;
    loop {
        for p in parents.drain(..) {
            checks += 1;
            if checks.is_multiple_of(256) {
                visitor.end_level();
                if limits.deadline.is_some_and(|d| Instant::now() >= d) {
                    return LabelRun {
                        arena,
                        stop: Stop::Deadline,
                    };
                }
            }
            let floor = visitor.prune_below();
            let (set, closed, cursor, value, parent) = match p {
                None => (B::empty(), B::empty(), Cursor::START, 0.0, NO_PARENT),
                Some(p) => {
                    let l = &arena[p as usize];
                    if dead[p as usize] || l.value + l.potential <= floor {
                        continue;
                    }
                    let cursor = Cursor {
                        node: TravelTable::node(space.tasks[l.last as usize]),
                        completion: l.completion,
                        energy: l.energy,
                    };
                    (l.set, l.closed, cursor, l.value, p)
                }
            };
            for j in 0..n {
                if closed.contains(j) {
                    continue;
                }
                let task = space.tasks[j];
                for (m, &gain) in space.profit[j].iter().enumerate() {
                    if gain == f64::NEG_INFINITY {
                        continue;
                    }
                    let Ok((next, _)) = cursor.extend(instance, table, task, m) else {
                        continue;
                    };
                    let value = value + gain;
                    let (potential, next_closed) = space.bound(closed.with(j), &next, &mut scratch);
                    if value + potential <= floor {
                        continue;
                    }
                    let label = Label {
                        set: set.with(j),
                        last: j as u16,
                        mode: m as u8,
                        parent,
                        closed: next_closed,
                        completion: next.completion,
                        energy: next.energy,
                        value,
                        potential,
                    };
                    let key = if merge { label.closed } else { label.set };
                    let bucket = buckets.entry((key, label.last)).or_default();
                    let covers = |a: &Label<B>, b: &Label<B>| {
                        a.completion <= b.completion
                            && (!space.energy_binds || a.energy <= b.energy)
                            && a.value >= b.value
                    };
                    let dominated = bucket.iter().any(|&o| covers(&arena[o as usize], &label));
                    if dominated {
                        continue;
                    }
                    bucket.retain(|&o| {
                        let beaten = covers(&label, &arena[o as usize]);
                        if beaten {
                            dead[o as usize] = true;
                        }
                        !beaten
                    });
                    if limits.max_labels.is_some_and(|cap| arena.len() >= cap) {
                        return LabelRun {
                            arena,
                            stop: Stop::LabelCap,
                        };
                    }
                    let idx = arena.len() as u32;
                    bucket.push(idx);
                    level.push(idx);
                    visitor.visit(idx, &label);
                    arena.push(label);
                    dead.push(false);
                }
            }
        }
        level.retain(|&i| !dead[i as usize]);
        if level.is_empty() {
            break;
        }
        visitor.end_level();
        if let Some(b) = limits.beam {
            if level.len() > b {
                truncated = true;
                let score = |i: u32| {
                    let l = &arena[i as usize];
                    l.value + l.potential
                };
                level.sort_by(|&x, &y| score(y).total_cmp(&score(x)).then(x.cmp(&y)));
                level.truncate(b);
                level.sort_unstable();
            }
        }
        parents.extend(level.drain(..).map(Some));
    }
    LabelRun {
        arena,
        stop: if truncated { Stop::Truncated } else { Stop::Exhausted },
    }
}

/// Keeps the best label per visited set, for sets worth more than a floor.
pub(crate) struct BestPerSet<B> {
    floor: f64,
    pub best: HashMap<B, (f64, u32)>,
}

impl<B: TaskBits> BestPerSet<B> {
    pub fn new() -> Self {
        Self::above(f64::NEG_INFINITY)
    }

    pub fn above(floor: f64) -> Self {
        BestPerSet {
            floor,
            best: HashMap::new(),
        }
    }

    /// `(set, value, label)` sorted by value descending, ties by set.
    pub fn into_sorted(self) -> Vec<(B, f64, u32)> {
        let mut v: Vec<(B, f64, u32)> = self.best.into_iter().map(|(s, (v, i))| (s, v, i)).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }
}

impl<B: TaskBits> Visitor<B> for BestPerSet<B> {
    fn visit(&mut self, idx: u32, label: &Label<B>) {
        if label.value <= self.floor {
            return;
        }
        let entry = self.best.entry(label.set).or_insert((f64::NEG_INFINITY, idx));
        if label.value > entry.0 || (label.value == entry.0 && idx < entry.1) {
            *entry = (label.value, idx);
        }
    }

    fn prune_below(&self) -> f64 {
        self.floor
    }
}

/// Keeps the `k` best sets whose value exceeds `offset + min_gain`.
pub(crate) struct TopSets<B> {
    k: usize,
    offset: f64,
    min_gain: f64,
    threshold: f64,
    pub best_gain: Option<f64>,
    pub found: HashMap<B, (f64, u32)>,
}

impl<B: TaskBits> TopSets<B> {
    pub fn new(k: usize, offset: f64, min_gain: f64) -> Self {
        TopSets {
            k,
            offset,
            min_gain,
            threshold: offset + min_gain,
            best_gain: None,
            found: HashMap::new(),
        }
    }

    /// Retained `(set, value, label)`, best first.
    pub fn into_sorted(self) -> Vec<(B, f64, u32)> {
        let mut v: Vec<(B, f64, u32)> = self.found.into_iter().map(|(s, (v, i))| (s, v, i)).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v.truncate(self.k);
        v
    }
}

impl<B: TaskBits> Visitor<B> for TopSets<B> {
    fn visit(&mut self, idx: u32, label: &Label<B>) {
        let gain = label.value - self.offset;
        if self.best_gain.is_none_or(|g| gain > g) {
            self.best_gain = Some(gain);
        }
        if gain > self.min_gain {
            let entry = self.found.entry(label.set).or_insert((f64::NEG_INFINITY, idx));
            if label.value > entry.0 || (label.value == entry.0 && idx < entry.1) {
                *entry = (label.value, idx);
            }
        }
    }

    fn prune_below(&self) -> f64 {
        self.threshold
    }

    fn needs_every_set(&self) -> bool {
        false
    }

    fn end_level(&mut self) {
        if self.found.len() >= self.k {
            let mut vals: Vec<f64> = self.found.values().map(|v| v.0).collect();
            let kth = self.k - 1;
            vals.select_nth_unstable_by(kth, |a, b| b.total_cmp(a));
            self.threshold = self.threshold.max(vals[kth]);
            // drop entries that can no longer make the cut
            let t = self.threshold;
            if self.found.len() > 4 * self.k {
                self.found.retain(|_, v| v.0 >= t);
            }
        }
    }
}
