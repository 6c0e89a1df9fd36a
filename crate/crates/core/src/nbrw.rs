//! The branching random walk with offspring `Σ δ{eT_i − 1}` (`T_i` unit-rate
//! Poisson atoms), its N-selection variant, barrier-killed variants and the
//! many-to-one harness.
//!
//! The offspring of the particle of rank `k` (ascending position) in
//! generation `g` are always driven by `stream.substream2(g, k)`. Two processes
//! run on the same base stream therefore share their offspring point
//! processes rank by rank, and the number of children a run chooses to look at
//! never changes the children it has already seen.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::E;
use std::io::Write;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Gamma};

use crate::error::{invalid, Error, Result};
use crate::rng::{PoissonAtoms, SeededStream};
use crate::stats::{ls_slope, Moments};
use crate::walk::{y_step, BoxEvent};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Particle {
    pub position: f64,
    /// Index into the previous generation; `None` at generation 0.
    pub parent: Option<usize>,
    pub generation: usize,
}

/// One generation, positions ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Population {
    pub generation: usize,
    pub particles: Vec<Particle>,
}

impl Population {
    /// Generation-0 population from arbitrary positions.
    pub fn initial(positions: &[f64]) -> Self {
        let mut positions = positions.to_vec();
        positions.sort_by(f64::total_cmp);
        Self {
            generation: 0,
            particles: positions
                .into_iter()
                .map(|position| Particle {
                    position,
                    parent: None,
                    generation: 0,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn positions(&self) -> Vec<f64> {
        self.particles.iter().map(|p| p.position).collect()
    }

    /// Leftmost position, `+∞` when empty.
    pub fn min(&self) -> f64 {
        self.particles.first().map_or(f64::INFINITY, |p| p.position)
    }
}

/// Ascending children of one particle.
#[derive(Debug, Clone)]
pub struct Brood {
    parent_position: f64,
    atoms: PoissonAtoms,
    next: f64,
}

impl Brood {
    pub fn new(parent_position: f64, stream: SeededStream) -> Self {
        let mut atoms = PoissonAtoms::new(stream);
        let first = atoms.next().expect("endless atoms");
        Self {
            parent_position,
            atoms,
            next: parent_position + E * first - 1.0,
        }
    }

    pub fn peek(&self) -> f64 {
        self.next
    }

    pub fn pop(&mut self) -> f64 {
        let out = self.next;
        self.next = self.parent_position + E * self.atoms.next().expect("endless atoms") - 1.0;
        out
    }
}

/// Children of a particle at `parent_position` that land at or below `cutoff`.
pub fn offspring(parent_position: f64, cutoff: f64, stream: SeededStream) -> Vec<f64> {
    let mut brood = Brood::new(parent_position, stream);
    let mut out = Vec::new();
    while brood.peek() <= cutoff {
        out.push(brood.pop());
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    position: f64,
    parent: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.position.total_cmp(&other.position).then(self.parent.cmp(&other.parent))
    }
}

/// Selection result for one generation.
#[derive(Debug, Clone)]
pub struct SelectionStep {
    pub population: Population,
    /// Children generated while selecting.
    pub census: usize,
}

/// The `keep` leftmost children of `parents`, found with a bounded max-heap.
///
/// Parents are scanned in ascending order and each brood is pulled until its
/// next child would not enter the full heap; the scan stops once a parent
/// sits at or above `heap max + 1`, since no child of it can enter.
pub fn select_leftmost(parents: &Population, keep: usize, stream: &SeededStream) -> Result<SelectionStep> {
    if keep == 0 {
        return Err(invalid("selection needs keep >= 1"));
    }
    if parents.is_empty() {
        return Ok(SelectionStep {
            population: Population {
                generation: parents.generation + 1,
                particles: Vec::new(),
            },
            census: 0,
        });
    }
    let g = parents.generation as u64;
    let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(keep + 1);
    let mut census = 0;
    for (rank, p) in parents.particles.iter().enumerate() {
        if heap.len() == keep && p.position - 1.0 >= heap.peek().expect("full heap").position {
            break;
        }
        let mut brood = Brood::new(p.position, stream.substream2(g, rank as u64));
        loop {
            let c = Candidate {
                position: brood.peek(),
                parent: rank,
            };
            if heap.len() == keep {
                if c >= *heap.peek().expect("full heap") {
                    break;
                }
                heap.pop();
            }
            heap.push(c);
            brood.pop();
            census += 1;
        }
    }
    let mut chosen = heap.into_vec();
    chosen.sort();
    let generation = parents.generation + 1;
    Ok(SelectionStep {
        population: Population {
            generation,
            particles: chosen
                .into_iter()
                .map(|c| Particle {
                    position: c.position,
                    parent: Some(c.parent),
                    generation,
                })
                .collect(),
        },
        census,
    })
}

/// Per-generation summary row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenerationSummary {
    pub generation: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub census: usize,
}

impl GenerationSummary {
    fn of(pop: &Population, census: usize) -> Self {
        let k = pop.len();
        let (min, median, max) = if k == 0 {
            (f64::INFINITY, f64::NAN, f64::NEG_INFINITY)
        } else {
            let pos = |i: usize| pop.particles[i].position;
            let median = if k % 2 == 1 { pos(k / 2) } else { 0.5 * (pos(k / 2 - 1) + pos(k / 2)) };
            (pos(0), median, pos(k - 1))
        };
        Self {
            generation: pop.generation,
            min,
            median,
            max,
            census,
        }
    }
}

/// An N-selection run. `summaries[k]` describes generation `k` (0 included).
#[derive(Debug, Clone)]
pub struct NbrwRun {
    pub keep: usize,
    pub summaries: Vec<GenerationSummary>,
    pub last: Population,
    /// Every generation, when requested.
    pub genealogy: Option<Vec<Population>>,
}

impl NbrwRun {
    /// `min_{|u|=k} 𝒱^N(u)` for `k = 1..steps`.
    pub fn mins(&self) -> Vec<f64> {
        self.summaries.iter().skip(1).map(|s| s.min).collect()
    }

    pub fn final_min(&self) -> f64 {
        self.last.min()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "generation,min,median,max,census")?;
        for s in &self.summaries {
            writeln!(out, "{},{},{},{},{}", s.generation, s.min, s.median, s.max, s.census)?;
        }
        Ok(())
    }
}

/// Runs the N-selection walk from `initial` for `steps` generations.
pub fn nbrw_evolve(initial: Population, keep: usize, steps: usize, stream: &SeededStream, keep_genealogy: bool) -> Result<NbrwRun> {
    if initial.is_empty() || initial.len() > keep {
        return Err(invalid(format!("initial population must hold 1..={keep} particles")));
    }
    let mut summaries = vec![GenerationSummary::of(&initial, 0)];
    let mut genealogy = keep_genealogy.then(|| vec![initial.clone()]);
    let mut current = initial;
    for _ in 0..steps {
        let step = select_leftmost(&current, keep, stream)?;
        summaries.push(GenerationSummary::of(&step.population, step.census));
        current = step.population;
        if let Some(g) = genealogy.as_mut() {
            g.push(current.clone());
        }
    }
    Ok(NbrwRun {
        keep,
        summaries,
        last: current,
        genealogy,
    })
}

/// `initial_count` particles at 0, selection size `keep`.
pub fn nbrw_run(keep: usize, initial_count: usize, steps: usize, stream: &SeededStream) -> Result<NbrwRun> {
    if initial_count == 0 || initial_count > keep || steps == 0 {
        return Err(invalid("nbrw_run needs 1 <= initial_count <= N and steps >= 1"));
    }
    nbrw_evolve(Population::initial(&vec![0.0; initial_count]), keep, steps, stream, false)
}

/// Least-squares slope of the min trajectory over its last half.
pub fn velocity(mins: &[f64]) -> f64 {
    let start = mins.len() / 2;
    let xs: Vec<f64> = (start..mins.len()).map(|k| k as f64).collect();
    ls_slope(&xs, &mins[start..])
}

/// Generation count `⌊t ln³N⌋`.
pub fn front_horizon(keep: usize, t: f64) -> usize {
    (t * (keep as f64).ln().powi(3)).floor() as usize
}

/// Lower and upper barriers `r_j ≤ s_j` for `j = 0..=horizon`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BarrierSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(invalid("barriers need matching, non-empty tables"));
        }
        if lower.iter().zip(&upper).any(|(r, s)| r > s) {
            return Err(invalid("barriers need r_j <= s_j"));
        }
        Ok(Self { lower, upper })
    }

    /// `r_j = r0 + slope·j`, `s_j = r_j + width`.
    pub fn linear(r0: f64, slope: f64, width: f64, horizon: usize) -> Result<Self> {
        let lower: Vec<f64> = (0..=horizon).map(|j| r0 + slope * j as f64).collect();
        let upper = lower.iter().map(|r| r + width).collect();
        Self::new(lower, upper)
    }

    /// The growing corridor `r_j = (π²/2c²)L^{−2/3} j`, `s_j = r_j + cL^{1/3}`.
    pub fn growing_corridor(c: f64, len: usize) -> Result<Self> {
        let l = len as f64;
        let slope = std::f64::consts::PI.powi(2) / (2.0 * c * c) * l.powf(-2.0 / 3.0);
        Self::linear(0.0, slope, c * l.cbrt(), len)
    }

    /// Constant barriers `[r, s]`.
    pub fn flat(r: f64, s: f64, horizon: usize) -> Result<Self> {
        Self::new(vec![r; horizon + 1], vec![s; horizon + 1])
    }

    pub fn horizon(&self) -> usize {
        self.lower.len() - 1
    }
}

/// Outcome of a barrier-killed run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierOutcome {
    pub survivors: usize,
    /// `+∞` if nothing survived.
    pub min_final: f64,
    /// Particles ever alive, generation 0 included.
    pub census: usize,
    pub alive_per_generation: Vec<usize>,
    /// Generation at which the census cap stopped the run.
    pub capped_at: Option<usize>,
}

/// Survivors of one generation of killing: children of each parent inside
/// `[lower, upper]`, ascending.
fn killed_generation(parents: &[f64], g: usize, lower: f64, upper: f64, stream: &SeededStream, budget: usize) -> Option<Vec<f64>> {
    let mut next = Vec::new();
    let mut generated = 0usize;
    for (rank, &p) in parents.iter().enumerate() {
        let mut brood = Brood::new(p, stream.substream2(g as u64, rank as u64));
        while brood.peek() <= upper {
            let x = brood.pop();
            generated += 1;
            if x >= lower {
                next.push(x);
                if next.len() > budget {
                    return None;
                }
            }
            if generated > budget.saturating_mul(64).max(1 << 20) {
                return None;
            }
        }
    }
    next.sort_by(f64::total_cmp);
    Some(next)
}

/// BRW killed outside `[r_j, s_j]` at every generation `1..=horizon`.
pub fn barrier_brw(spec: &BarrierSpec, initial: &[f64], stream: &SeededStream, census_cap: usize) -> Result<BarrierOutcome> {
    if initial.iter().any(|&x| x < spec.lower[0] || x > spec.upper[0]) {
        return Err(invalid("initial positions must lie within [r_0, s_0]"));
    }
    let mut current = initial.to_vec();
    current.sort_by(f64::total_cmp);
    let mut census = current.len();
    let mut alive = vec![current.len()];
    for j in 1..=spec.horizon() {
        match killed_generation(&current, j - 1, spec.lower[j], spec.upper[j], stream, census_cap - census.min(census_cap)) {
            Some(next) => {
                census += next.len();
                alive.push(next.len());
                current = next;
            }
            None => {
                return Ok(BarrierOutcome {
                    survivors: current.len(),
                    min_final: current.first().copied().unwrap_or(f64::INFINITY),
                    census,
                    alive_per_generation: alive,
                    capped_at: Some(j),
                })
            }
        }
        if current.is_empty() {
            break;
        }
    }
    while alive.len() <= spec.horizon() {
        alive.push(0);
    }
    Ok(BarrierOutcome {
        survivors: current.len(),
        min_final: current.first().copied().unwrap_or(f64::INFINITY),
        census,
        alive_per_generation: alive,
        capped_at: None,
    })
}

/// Monte Carlo survival probability of a barrier-killed run.
pub fn barrier_survival(spec: &BarrierSpec, trials: u64, stream: &SeededStream, census_cap: usize) -> Result<(u64, u64)> {
    let mut survived = 0;
    let mut capped = 0;
    for t in 0..trials {
        let out = barrier_brw(spec, &[0.0], &stream.substream(t), census_cap)?;
        match out.capped_at {
            Some(_) => capped += 1,
            None => survived += (out.survivors > 0) as u64,
        }
    }
    Ok((survived, capped))
}

/// Selection rule of a killed BRW.
#[derive(Debug, Clone, PartialEq)]
pub enum KillRule {
    /// Keep children inside the barriers; the horizon must cover the run.
    Barrier(BarrierSpec),
    /// No particle survives past generation 0.
    KillAll,
    /// Each particle keeps only its leftmost child.
    LeftmostChild,
}

/// Per-generation comparison of the selected and killed minima.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceTrace {
    /// `min 𝒱^N ≤ min 𝒱^kil` at generations `0..T` (or the full horizon).
    pub holds: Vec<bool>,
    pub selected_min: Vec<f64>,
    pub killed_min: Vec<f64>,
    /// First generation where the killed population exceeded `N`.
    pub overflow_at: Option<usize>,
}

impl DominanceTrace {
    pub fn violations(&self) -> usize {
        self.holds.iter().filter(|h| !**h).count()
    }
}

/// Runs `𝒱^N` and a killed BRW on the shared rank-indexed offspring and
/// compares their minima up to the first killed-population overflow.
pub fn killed_vs_selected_dominance(
    keep: usize,
    rule: &KillRule,
    selected_initial: &[f64],
    killed_initial: &[f64],
    steps: usize,
    stream: &SeededStream,
) -> Result<DominanceTrace> {
    if killed_initial.iter().any(|x| !selected_initial.contains(x)) {
        return Err(invalid("killed initial population must be contained in the selected one"));
    }
    if let KillRule::Barrier(b) = rule {
        if b.horizon() < steps || b.upper.iter().any(|s| !s.is_finite()) {
            return Err(invalid("barrier kill rule needs finite upper barriers over the whole run"));
        }
    }
    let mut selected = Population::initial(selected_initial);
    let mut killed = killed_initial.to_vec();
    killed.sort_by(f64::total_cmp);
    let mut trace = DominanceTrace {
        holds: Vec::new(),
        selected_min: Vec::new(),
        killed_min: Vec::new(),
        overflow_at: None,
    };
    for g in 0..=steps {
        if killed.len() > keep {
            trace.overflow_at = Some(g);
            break;
        }
        let kmin = killed.first().copied().unwrap_or(f64::INFINITY);
        trace.selected_min.push(selected.min());
        trace.killed_min.push(kmin);
        trace.holds.push(selected.min() <= kmin);
        if g == steps {
            break;
        }
        selected = select_leftmost(&selected, keep, stream)?.population;
        killed = match rule {
            KillRule::KillAll => Vec::new(),
            KillRule::LeftmostChild => {
                let mut next: Vec<f64> = killed
                    .iter()
                    .enumerate()
                    .map(|(rank, &p)| Brood::new(p, stream.substream2(g as u64, rank as u64)).peek())
                    .collect();
                next.sort_by(f64::total_cmp);
                next
            }
            KillRule::Barrier(b) => match killed_generation(&killed, g, b.lower[g + 1], b.upper[g + 1], stream, keep) {
                Some(next) => next,
                None => {
                    trace.overflow_at = Some(g + 1);
                    break;
                }
            },
        };
    }
    Ok(trace)
}

/// Both sides of the many-to-one identity for a box event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ManyToOneCheck {
    pub lhs: f64,
    pub lhs_sigma: f64,
    pub rhs: f64,
    pub rhs_sigma: f64,
    /// Certified bound on the weighted mass dropped by truncation.
    pub tail_bound: f64,
    pub truncation: f64,
    pub agree: bool,
}

/// `E[Σ_{|x|=ℓ} e^{−𝒱(x)} 1_A(𝒱(x_1),…,𝒱(x_ℓ))]` against `P((Y_1,…,Y_ℓ) ∈ A)`.
///
/// Particles leaving the box are pruned at once. Coordinates whose upper end
/// exceeds `truncation` are cut there, and the weighted mass lost at
/// generation `j` is at most `P(Y_j > C) = P(Gamma(j, 1) > C + j)`.
pub fn many_to_one_check(event: &BoxEvent, truncation: f64, trials: u64, stream: &SeededStream, census_cap: usize) -> Result<ManyToOneCheck> {
    let len = event.len();
    if len > 5 || trials == 0 {
        return Err(invalid("many_to_one_check needs len <= 5 and trials >= 1"));
    }
    let mut tail_bound = 0.0;
    let mut upper = event.upper.clone();
    for (j, u) in upper.iter_mut().enumerate() {
        if *u > truncation {
            *u = truncation;
            let gamma = Gamma::new((j + 1) as f64, 1.0).map_err(|e| invalid(e.to_string()))?;
            tail_bound += gamma.sf(truncation + (j + 1) as f64);
        }
    }

    let lhs_stream = stream.substream(0);
    let mut lhs = Moments::new();
    for t in 0..trials {
        let base = lhs_stream.substream(t);
        let mut current = vec![0.0f64];
        for j in 0..len {
            match killed_generation(&current, j, event.lower[j], upper[j], &base, census_cap) {
                Some(next) => current = next,
                None => return Err(Error::CensusCapExceeded { cap: census_cap, generation: j + 1 }),
            }
            if current.is_empty() {
                break;
            }
        }
        lhs.push(current.iter().map(|v| (-v).exp()).sum());
    }

    let mut rhs_stream = stream.substream(1);
    let mut hits = 0u64;
    for _ in 0..trials {
        let mut y = 0.0;
        let mut inside = true;
        for j in 1..=len {
            y += y_step(&mut rhs_stream);
            inside &= event.admits(j, y);
        }
        hits += inside as u64;
    }
    let rhs = hits as f64 / trials as f64;
    let rhs_sigma = crate::stats::binomial_sigma(rhs, trials);
    let combined = (lhs.sem().powi(2) + rhs_sigma.powi(2)).sqrt();
    Ok(ManyToOneCheck {
        lhs: lhs.mean(),
        lhs_sigma: lhs.sem(),
        rhs,
        rhs_sigma,
        tail_bound,
        truncation,
        agree: (lhs.mean() - rhs).abs() < 3.0 * combined + tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offspring_support_edge() {
        let s = SeededStream::new(1, 0);
        assert!(offspring(0.0, -1.0, s.clone()).is_empty());
        let kids = offspring(0.0, 5.0, s);
        assert!(kids.windows(2).all(|w| w[0] < w[1]));
        assert!(kids.iter().all(|&x| x > -1.0 && x <= 5.0));
    }

    #[test]
    fn offspring_prefix_is_stable() {
        let s = SeededStream::new(2, 0);
        let short = offspring(0.5, 2.0, s.clone());
        let long = offspring(0.5, 10.0, s);
        assert_eq!(short[..], long[..short.len()]);
    }

    #[test]
    fn selection_keeps_exactly_n() {
        let s = SeededStream::new(3, 0);
        let pop = Population::initial(&[0.0, 0.3, 2.0]);
        let step = select_leftmost(&pop, 7, &s).unwrap();
        assert_eq!(step.population.len(), 7);
        assert_eq!(step.population.generation, 1);
        assert!(step.population.particles.windows(2).all(|w| w[0].position <= w[1].position));
    }

    #[test]
    fn single_survivor_is_a_walk_with_min_steps() {
        let s = SeededStream::new(4, 0);
        let run = nbrw_run(1, 1, 50, &s).unwrap();
        for (k, m) in run.mins().iter().enumerate() {
            let prev = if k == 0 { 0.0 } else { run.mins()[k - 1] };
            assert_eq!(*m, Brood::new(prev, s.substream2(k as u64, 0)).peek());
        }
    }

    #[test]
    fn min_above_minus_generation() {
        let s = SeededStream::new(5, 0);
        let run = nbrw_run(20, 20, 100, &s).unwrap();
        for (k, m) in run.mins().iter().enumerate() {
            assert!(*m >= -((k + 1) as f64));
        }
    }

    #[test]
    fn nbrw_rejects_bad_arguments() {
        let s = SeededStream::new(0, 0);
        assert!(nbrw_run(5, 6, 10, &s).is_err());
        assert!(nbrw_run(5, 0, 10, &s).is_err());
        assert!(nbrw_run(5, 1, 0, &s).is_err());
    }

    #[test]
    fn empty_slab_kills_everything() {
        let spec = BarrierSpec::flat(0.0, 0.0, 3).unwrap();
        let out = barrier_brw(&spec, &[0.0], &SeededStream::new(6, 0), 1000).unwrap();
        assert_eq!(out.survivors, 0);
        assert_eq!(out.min_final, f64::INFINITY);
    }

    #[test]
    fn unbounded_barrier_hits_cap() {
        let spec = BarrierSpec::flat(f64::NEG_INFINITY, f64::INFINITY, 1).unwrap();
        let out = barrier_brw(&spec, &[0.0], &SeededStream::new(7, 0), 100).unwrap();
        assert_eq!(out.capped_at, Some(1));
    }

    #[test]
    fn barrier_validation() {
        assert!(BarrierSpec::new(vec![1.0], vec![0.0]).is_err());
        let spec = BarrierSpec::flat(0.0, 1.0, 2).unwrap();
        assert!(barrier_brw(&spec, &[2.0], &SeededStream::new(0, 0), 10).is_err());
    }

    #[test]
    fn kill_all_dominance_is_trivial() {
        let s = SeededStream::new(8, 0);
        let t = killed_vs_selected_dominance(10, &KillRule::KillAll, &[0.0], &[0.0], 20, &s).unwrap();
        assert_eq!(t.violations(), 0);
        assert!(t.killed_min[1..].iter().all(|m| m.is_infinite()));
    }

    #[test]
    fn leftmost_child_equals_single_selection() {
        let s = SeededStream::new(9, 0);
        let t = killed_vs_selected_dominance(1, &KillRule::LeftmostChild, &[0.0], &[0.0], 30, &s).unwrap();
        assert_eq!(t.selected_min, t.killed_min);
    }

    #[test]
    fn killed_must_be_subset() {
        let s = SeededStream::new(0, 0);
        assert!(killed_vs_selected_dominance(3, &KillRule::KillAll, &[0.0], &[1.0], 5, &s).is_err());
    }

    #[test]
    fn many_to_one_normalization() {
        let s = SeededStream::new(10, 0);
        let event = BoxEvent::cube(1, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        let c = many_to_one_check(&event, 12.0, 20_000, &s, 1 << 16).unwrap();
        assert_eq!(c.rhs, 1.0);
        assert!((c.tail_bound - (-13f64).exp()).abs() < 1e-12);
        assert!(c.agree, "{c:?}");
    }

    #[test]
    fn horizon_rule() {
        assert_eq!(front_horizon(1000, 1.0), 329);
    }
}
