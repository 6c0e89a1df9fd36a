//! Exploration processes on `K_n`: generations of active vertices chosen as
//! the `N` globally smallest one-edge extensions, the block-restart variant
//! that concatenates short explorations into one long path, and the
//! three-colour coupling with the N-selection walk.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::f64::consts::E;
use std::io::Write;

use rand::seq::index::sample;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::exact::{Provenance, WitnessPath};
use crate::graph::{EdgeOracle, Vertex};
use crate::nbrw::Brood;
use crate::rng::SeededStream;

/// One node of the witness forest: a path ending at `vertex`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForestNode {
    pub vertex: Vertex,
    pub parent: Option<usize>,
    /// Path weight `V`.
    pub weight: f64,
    /// Path length.
    pub depth: usize,
}

/// Parent-pointer forest over every vertex that was ever active.
#[derive(Debug, Clone, Default, Serialize)]
pub struct WitnessForest {
    pub nodes: Vec<ForestNode>,
}

impl WitnessForest {
    fn push(&mut self, node: ForestNode) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    /// Vertices from the root down to `node`.
    pub fn path_to(&self, node: usize) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(self.nodes[node].depth + 1);
        let mut cur = Some(node);
        while let Some(i) = cur {
            out.push(self.nodes[i].vertex);
            cur = self.nodes[i].parent;
        }
        out.reverse();
        out
    }

    pub fn witness(&self, oracle: &EdgeOracle, node: usize, provenance: Provenance) -> Result<WitnessPath> {
        WitnessPath::from_vertices(oracle, self.path_to(node), provenance)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActiveVertex {
    pub vertex: Vertex,
    pub weight: f64,
    pub node: usize,
}

/// Minimal edge out of the lightest active vertex, `(u*, v*, X(u*, v*))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StoredEdge {
    pub from: Vertex,
    pub to: Vertex,
    pub label: f64,
    pub from_node: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenerationRecord {
    pub generation: usize,
    /// `+∞` once the active set is empty.
    pub min_v: f64,
    pub active: usize,
    pub removed: usize,
}

/// Exploration state `(Z_j, Q_j)` together with the removed set.
#[derive(Debug, Clone)]
pub struct ExplorationState {
    n: usize,
    pub generation: usize,
    /// Active set, ascending in `V`.
    pub active: Vec<ActiveVertex>,
    removed: Vec<bool>,
    pub removed_count: usize,
    pub forest: WitnessForest,
    pub records: Vec<GenerationRecord>,
}

impl ExplorationState {
    /// Starts from the given distinct vertices, each with `V = 0`.
    pub fn new(n: usize, start: &[Vertex]) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        for &v in start {
            if v == 0 || v > n || seen[v] {
                return Err(invalid(format!("start set must hold distinct vertices of 1..={n}")));
            }
            seen[v] = true;
        }
        let mut forest = WitnessForest::default();
        let active = start
            .iter()
            .map(|&vertex| ActiveVertex {
                vertex,
                weight: 0.0,
                node: forest.push(ForestNode {
                    vertex,
                    parent: None,
                    weight: 0.0,
                    depth: 0,
                }),
            })
            .collect();
        let mut state = Self {
            n,
            generation: 0,
            active,
            removed: vec![false; n + 1],
            removed_count: 0,
            forest,
            records: Vec::new(),
        };
        state.record();
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `#G_j = n − removed`.
    pub fn remaining(&self) -> usize {
        self.n - self.removed_count
    }

    pub fn is_removed(&self, v: Vertex) -> bool {
        self.removed[v]
    }

    pub fn min_v(&self) -> f64 {
        self.active.first().map_or(f64::INFINITY, |a| a.weight)
    }

    /// `G_j ∖ Z_j`.
    pub fn candidates(&self) -> Vec<Vertex> {
        let mut blocked = self.removed.clone();
        for a in &self.active {
            blocked[a.vertex] = true;
        }
        (1..=self.n).filter(|&v| !blocked[v]).collect()
    }

    fn record(&mut self) {
        self.records.push(GenerationRecord {
            generation: self.generation,
            min_v: self.min_v(),
            active: self.active.len(),
            removed: self.removed_count,
        });
    }

    fn remove_active(&mut self) {
        for a in &self.active {
            self.removed[a.vertex] = true;
        }
        self.removed_count += self.active.len();
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "generation,min_v,active,removed")?;
        for r in &self.records {
            writeln!(out, "{},{},{},{}", r.generation, r.min_v, r.active, r.removed)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Extension {
    sum: f64,
    source: usize,
    target: Vertex,
}

impl Extension {
    fn key(&self) -> (f64, usize, Vertex) {
        (self.sum, self.source, self.target)
    }
}

impl PartialEq for Extension {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Extension {}

impl PartialOrd for Extension {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extension {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.key(), other.key());
        a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
    }
}

/// What one step did besides updating the state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepReport {
    pub stored: Option<StoredEdge>,
    /// Selected extensions dropped because their target was already taken.
    pub merged: usize,
    /// Edge labels read while selecting.
    pub pulled: usize,
}

/// Row stream key for vertex `u` at generation `g`.
fn row_stream(stream: &SeededStream, g: usize, u: Vertex) -> SeededStream {
    stream.substream2(g as u64, u as u64)
}

/// One exploration step: selects the `keep` smallest `V(u) + X(u, v)` over
/// active `u` and `v ∈ G_j ∖ Z_j`, keeps the lightest extension per target,
/// then removes the old active set.
pub fn explore_step(state: &mut ExplorationState, keep: usize, oracle: &mut EdgeOracle, stream: &SeededStream) -> Result<StepReport> {
    if keep == 0 {
        return Err(invalid("explore_step needs N >= 1"));
    }
    if oracle.n() != state.n {
        return Err(invalid("oracle and state disagree on n"));
    }
    let allowed = state.candidates();
    let mut report = StepReport {
        stored: None,
        merged: 0,
        pulled: 0,
    };
    let mut heap: BinaryHeap<Extension> = BinaryHeap::with_capacity(keep + 1);
    if !allowed.is_empty() {
        for (idx, a) in state.active.iter().enumerate() {
            if heap.len() == keep && a.weight - 1.0 >= heap.peek().expect("full heap").sum {
                break;
            }
            let mut row = oracle.open_row(a.vertex, &allowed, row_stream(stream, state.generation, a.vertex));
            while let Some(w) = row.peek_weight() {
                let sum = a.weight + w;
                if heap.len() == keep && sum >= heap.peek().expect("full heap").sum {
                    break;
                }
                let (target, label) = row.take(oracle)?;
                report.pulled += 1;
                if idx == 0 && report.stored.is_none() {
                    report.stored = Some(StoredEdge {
                        from: a.vertex,
                        to: target,
                        label,
                        from_node: a.node,
                    });
                }
                heap.push(Extension { sum, source: idx, target });
                if heap.len() > keep {
                    heap.pop();
                }
            }
        }
    }
    let mut selected = heap.into_vec();
    selected.sort();
    let mut best: BTreeMap<Vertex, Extension> = BTreeMap::new();
    for e in selected {
        match best.get(&e.target) {
            Some(_) => report.merged += 1,
            None => {
                best.insert(e.target, e);
            }
        }
    }
    let mut next: Vec<ActiveVertex> = best
        .into_values()
        .map(|e| {
            let parent = state.active[e.source];
            let node = state.forest.push(ForestNode {
                vertex: e.target,
                parent: Some(parent.node),
                weight: e.sum,
                depth: state.forest.nodes[parent.node].depth + 1,
            });
            ActiveVertex {
                vertex: e.target,
                weight: e.sum,
                node,
            }
        })
        .collect();
    next.sort_by(|a, b| a.weight.total_cmp(&b.weight).then(a.vertex.cmp(&b.vertex)));
    state.remove_active();
    state.active = next;
    state.generation += 1;
    state.record();
    Ok(report)
}

/// A finished exploration run.
#[derive(Debug, Clone)]
pub struct ExplorationRun {
    pub state: ExplorationState,
    /// Path to the lightest active vertex of the last non-empty generation.
    pub best: Option<WitnessPath>,
    pub extinct: bool,
}

impl ExplorationRun {
    /// `min V` over `Z_1, Z_2, …`.
    pub fn min_v(&self) -> Vec<f64> {
        self.state.records.iter().skip(1).map(|r| r.min_v).collect()
    }

    /// The longest path in the forest with average weight at most `lambda`
    /// (lighter first among equal lengths).
    pub fn best_below(&self, oracle: &EdgeOracle, lambda: f64) -> Result<Option<WitnessPath>> {
        let pick = self
            .state
            .forest
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.depth > 0 && n.weight <= lambda * n.depth as f64)
            .max_by(|(_, a), (_, b)| a.depth.cmp(&b.depth).then(b.weight.total_cmp(&a.weight)));
        pick.map(|(i, _)| self.state.forest.witness(oracle, i, Provenance::Exploration)).transpose()
    }
}

/// Runs `steps` exploration steps from `start` (fewer on extinction).
pub fn run_exploration(keep: usize, steps: usize, start: &[Vertex], oracle: &mut EdgeOracle, stream: &SeededStream) -> Result<ExplorationRun> {
    let n = oracle.n();
    if keep.checked_mul(steps).is_none_or(|x| x >= n) {
        return Err(invalid(format!("exploration needs N * steps < n, got {keep} * {steps} vs {n}")));
    }
    if start.is_empty() || start.len() > keep {
        return Err(invalid("start set must hold 1..=N vertices"));
    }
    let mut state = ExplorationState::new(n, start)?;
    let mut last_best = None;
    let mut extinct = false;
    for _ in 0..steps {
        explore_step(&mut state, keep, oracle, stream)?;
        match state.active.first() {
            Some(a) => last_best = Some(a.node),
            None => {
                extinct = true;
                break;
            }
        }
    }
    let best = last_best
        .map(|i| state.forest.witness(oracle, i, Provenance::Exploration))
        .transpose()?;
    Ok(ExplorationRun { state, best, extinct })
}

/// Bookkeeping of the block-restart scheme.
#[derive(Debug, Clone, Serialize)]
pub struct BlockState {
    /// Restart times `τ_1 < τ_2 < …` on the global clock.
    pub tau: Vec<usize>,
    /// Stored edges closing each block.
    pub stored: Vec<StoredEdge>,
    /// Weight of each block's in-block path `Γ_i`.
    pub block_weights: Vec<f64>,
    /// `η` of every step, the label of the stored edge at that step.
    pub eta: Vec<f64>,
    pub exhausted: bool,
}

impl BlockState {
    /// `Σ s_i + Σ η_{τ_i}` over the blocks making up the spine.
    pub fn decomposed_weight(&self) -> f64 {
        let blocks = self.block_weights.len();
        self.block_weights.iter().sum::<f64>() + self.stored.iter().take(blocks.saturating_sub(1)).map(|e| e.label).sum::<f64>()
    }
}

/// Block exploration: runs up to `delta` steps from a single active vertex,
/// extends the spine by the in-block path to the lightest active vertex and
/// its stored minimal edge, and restarts from that edge's far end. The spine
/// ends with the in-block path of the block that takes it past `target_len`.
pub fn block_exploration(
    delta: usize,
    keep: usize,
    target_len: usize,
    start: Vertex,
    oracle: &mut EdgeOracle,
    stream: &SeededStream,
) -> Result<(WitnessPath, BlockState)> {
    let n = oracle.n();
    if delta == 0 || keep == 0 || keep.saturating_mul(delta) >= n {
        return Err(invalid(format!("block exploration needs N * delta < n, got {keep} * {delta} vs {n}")));
    }
    let mut state = ExplorationState::new(n, &[start])?;
    let mut blocks = BlockState {
        tau: Vec::new(),
        stored: Vec::new(),
        block_weights: Vec::new(),
        eta: Vec::new(),
        exhausted: false,
    };
    let mut block_root_weight = 0.0;
    let mut end_node;
    loop {
        let mut local = 0;
        let (u_star, closing) = loop {
            let u = state.active[0];
            if local + 1 == delta {
                break (u, stored_edge(&state, oracle, stream)?);
            }
            let report = explore_step(&mut state, keep, oracle, stream)?;
            match report.stored {
                Some(e) if !state.active.is_empty() => blocks.eta.push(e.label),
                other => break (u, other),
            }
            local += 1;
        };
        end_node = u_star.node;
        blocks.block_weights.push(u_star.weight - block_root_weight);
        blocks.tau.push(state.forest.nodes[end_node].depth + 1);
        let Some(edge) = closing else {
            blocks.exhausted = true;
            break;
        };
        blocks.eta.push(edge.label);
        blocks.stored.push(edge);
        if state.forest.nodes[end_node].depth >= target_len {
            break;
        }
        // restart from v* on what is left of the graph
        if state.active.first().map(|a| a.node) == Some(u_star.node) {
            state.remove_active();
        }
        let root_weight = u_star.weight + edge.label;
        let node = state.forest.push(ForestNode {
            vertex: edge.to,
            parent: Some(u_star.node),
            weight: root_weight,
            depth: state.forest.nodes[u_star.node].depth + 1,
        });
        state.active = vec![ActiveVertex {
            vertex: edge.to,
            weight: root_weight,
            node,
        }];
        block_root_weight = root_weight;
        state.generation += 1;
        state.record();
    }
    let spine = state.forest.witness(oracle, end_node, Provenance::BlockExploration)?;
    Ok((spine, blocks))
}

/// The minimal edge from the lightest active vertex into `G_j ∖ Z_j`, read
/// from the same row stream a step at this generation would open.
fn stored_edge(state: &ExplorationState, oracle: &mut EdgeOracle, stream: &SeededStream) -> Result<Option<StoredEdge>> {
    let Some(u) = state.active.first().copied() else {
        return Ok(None);
    };
    let allowed = state.candidates();
    if allowed.is_empty() {
        return Ok(None);
    }
    let mut row = oracle.open_row(u.vertex, &allowed, row_stream(stream, state.generation, u.vertex));
    let (to, label) = row.take(oracle)?;
    Ok(Some(StoredEdge {
        from: u.vertex,
        to,
        label,
        from_node: u.node,
    }))
}

/// Recomputes the spine weight from the oracle and compares it with the
/// block decomposition; returns the absolute discrepancy.
pub fn block_decomposition_error(spine: &WitnessPath, blocks: &BlockState) -> f64 {
    (spine.total() - blocks.decomposed_weight()).abs()
}

/// Per-generation colour counts of the coupled N-selection walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColorCounts {
    pub generation: usize,
    pub blue: usize,
    pub red: usize,
    pub purple: usize,
    /// Right-hand side of the non-blue probability bound at this generation.
    pub bound: f64,
}

impl ColorCounts {
    pub fn non_blue_fraction(&self) -> f64 {
        let total = self.blue + self.red + self.purple;
        if total == 0 {
            0.0
        } else {
            (self.red + self.purple) as f64 / total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColorAudit {
    pub n: usize,
    pub keep: usize,
    pub counts: Vec<ColorCounts>,
    /// Blue particles with `V(v) > n/(n−N)·𝒱^N(v) + N/(n−N)·|v|`.
    pub upper_violations: usize,
    /// Blue particles with `𝒱^N(v) > V(v)`.
    pub lower_violations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Color {
    Blue,
    Red,
    Purple,
}

#[derive(Debug, Clone, Copy)]
struct Coloured {
    position: f64,
    color: Color,
    vertex: Vertex,
    weight: f64,
}

#[derive(Debug, Clone, Copy)]
struct ColouredChild {
    position: f64,
    parent: usize,
    /// Order-statistic index among the parent's first `n − 1` children, for
    /// blue children of blue parents.
    blue_label: Option<f64>,
}

impl PartialEq for ColouredChild {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ColouredChild {}

impl PartialOrd for ColouredChild {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ColouredChild {
    fn cmp(&self, other: &Self) -> Ordering {
        self.position.total_cmp(&other.position).then(self.parent.cmp(&other.parent))
    }
}

/// Children of one particle with colours and coupled labels.
///
/// For a blue parent, among its first `n − 1` children exactly `m` are blue,
/// a uniform subset chosen sequentially; child `i` carries the label
/// `X_(i)` built from the same atoms by `X_(i) − X_(i−1) = ne/(n−i)(T_i − T_{i−1})`.
struct ColouredBrood {
    brood: Brood,
    colour: Option<SeededStream>,
    n: usize,
    m: usize,
    index: usize,
    blue_so_far: usize,
    parent_position: f64,
    t_prev: f64,
    x_prev: f64,
}

impl ColouredBrood {
    fn new(parent: &Coloured, n: usize, m: usize, atoms: SeededStream, colour: SeededStream) -> Self {
        Self {
            brood: Brood::new(parent.position, atoms),
            colour: (parent.color == Color::Blue).then_some(colour),
            n,
            m,
            index: 0,
            blue_so_far: 0,
            parent_position: parent.position,
            t_prev: 0.0,
            x_prev: -1.0,
        }
    }

    fn peek(&self) -> f64 {
        self.brood.peek()
    }

    /// Pops the next child, returning its position and, if blue, its label.
    fn pop(&mut self) -> (f64, Option<f64>) {
        let pos = self.brood.pop();
        self.index += 1;
        let i = self.index;
        let Some(colour) = self.colour.as_mut() else {
            return (pos, None);
        };
        if i > self.n - 1 {
            return (pos, None);
        }
        let t = (pos - self.parent_position + 1.0) / E;
        let x = self.x_prev + self.n as f64 * E / (self.n - i) as f64 * (t - self.t_prev);
        self.t_prev = t;
        self.x_prev = x;
        let left = (self.n - 1) - (i - 1);
        let need = self.m - self.blue_so_far;
        let blue = need > 0 && colour.below(left) < need;
        if blue {
            self.blue_so_far += 1;
            (pos, Some(x))
        } else {
            (pos, None)
        }
    }
}

/// Runs the N-selection walk and the graph exploration it drives, colouring
/// particles blue (coupled to a vertex), red (outside the graph) or purple
/// (a duplicate target), and checks the per-particle position sandwich.
///
/// Labels of the explored edges are produced by the coupling itself, so no
/// edge oracle is involved; every edge is read at most once by construction.
pub fn coupled_color_audit(n: usize, keep: usize, steps: usize, initial: usize, stream: &SeededStream) -> Result<ColorAudit> {
    if keep == 0 || initial == 0 || initial > keep || keep.saturating_mul(steps + 1) >= n {
        return Err(invalid("coupled audit needs 1 <= initial <= N and N * (steps + 1) < n"));
    }
    let (nf, kf) = (n as f64, keep as f64);
    let mut removed = vec![false; n + 1];
    let mut population: Vec<Coloured> = (1..=initial)
        .map(|v| Coloured {
            position: 0.0,
            color: Color::Blue,
            vertex: v,
            weight: 0.0,
        })
        .collect();
    let mut audit = ColorAudit {
        n,
        keep,
        counts: vec![ColorCounts {
            generation: 0,
            blue: initial,
            red: 0,
            purple: 0,
            bound: 0.0,
        }],
        upper_violations: 0,
        lower_violations: 0,
    };
    let atoms = stream.substream(0);
    let colours = stream.substream(1);
    let targets = stream.substream(2);
    let mut bound = 0.0;
    for j in 0..steps {
        let mut is_active = removed.clone();
        for p in population.iter().filter(|p| p.color == Color::Blue) {
            is_active[p.vertex] = true;
        }
        let allowed: Vec<Vertex> = (1..=n).filter(|&v| !is_active[v]).collect();
        let m = allowed.len();

        let mut heap: BinaryHeap<ColouredChild> = BinaryHeap::with_capacity(keep + 1);
        for (rank, p) in population.iter().enumerate() {
            if heap.len() == keep && p.position - 1.0 >= heap.peek().expect("full heap").position {
                break;
            }
            let key = (j as u64, rank as u64);
            let mut brood = ColouredBrood::new(p, n, m, atoms.substream2(key.0, key.1), colours.substream2(key.0, key.1));
            loop {
                if heap.len() == keep && brood.peek() >= heap.peek().expect("full heap").position {
                    break;
                }
                let (position, blue_label) = brood.pop();
                heap.push(ColouredChild {
                    position,
                    parent: rank,
                    blue_label,
                });
                if heap.len() > keep {
                    heap.pop();
                }
            }
        }
        let mut chosen = heap.into_vec();
        chosen.sort();

        // vertices for the selected blue children, uniformly without replacement per parent
        let mut per_parent: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, c) in chosen.iter().enumerate() {
            if c.blue_label.is_some() {
                per_parent.entry(c.parent).or_default().push(i);
            }
        }
        let mut vertex_of = vec![0; chosen.len()];
        for (&parent, kids) in &per_parent {
            let mut s = targets.substream2(j as u64, parent as u64);
            for (slot, idx) in kids.iter().zip(sample(&mut s, m, kids.len())) {
                vertex_of[*slot] = allowed[idx];
            }
        }

        let mut claimed = vec![false; n + 1];
        let gen = (j + 1) as f64;
        let mut next = Vec::with_capacity(chosen.len());
        let (mut blue, mut red, mut purple) = (0, 0, 0);
        for (i, c) in chosen.iter().enumerate() {
            let parent = population[c.parent];
            let mut child = Coloured {
                position: c.position,
                color: Color::Red,
                vertex: 0,
                weight: f64::NAN,
            };
            if let Some(label) = c.blue_label {
                let v = vertex_of[i];
                if claimed[v] {
                    child.color = Color::Purple;
                } else {
                    claimed[v] = true;
                    child.color = Color::Blue;
                    child.vertex = v;
                    child.weight = parent.weight + label;
                    let slack = 1e-9 * (1.0 + child.weight.abs());
                    if child.weight > nf / (nf - kf) * child.position + kf / (nf - kf) * gen + slack {
                        audit.upper_violations += 1;
                    }
                    if child.position > child.weight + slack {
                        audit.lower_violations += 1;
                    }
                }
            }
            match child.color {
                Color::Blue => blue += 1,
                Color::Red => red += 1,
                Color::Purple => purple += 1,
            }
            next.push(child);
        }
        bound += (kf * (j + 1) as f64) / (nf - 1.0) + kf / (nf - kf * (j + 1) as f64);
        audit.counts.push(ColorCounts {
            generation: j + 1,
            blue,
            red,
            purple,
            bound,
        });
        for p in population.iter().filter(|p| p.color == Color::Blue) {
            removed[p.vertex] = true;
        }
        population = next;
    }
    Ok(audit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::verify_witness;

    #[test]
    fn single_selection_is_greedy() {
        let mut s = SeededStream::new(1, 0);
        let mut o = EdgeOracle::materialized(9, &mut s).unwrap();
        let run = run_exploration(1, 8, &[1], &mut o, &s).unwrap();
        let path = run.best.unwrap();
        let mut seen = vec![1];
        for (k, pair) in path.vertices.windows(2).enumerate() {
            let row_min = (1..=9)
                .filter(|v| !seen.contains(v))
                .map(|v| o.edge_weight(pair[0], v).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert_eq!(o.edge_weight(pair[0], pair[1]).unwrap(), row_min, "step {k}");
            seen.push(pair[1]);
        }
    }

    #[test]
    fn duplicate_target_counted_once() {
        // 1 and 2 active; both cheapest edges point at 3
        let edges = [(1, 2, 9.0), (1, 3, 0.1), (2, 3, 0.2), (1, 4, 5.0), (2, 4, 6.0), (3, 4, 9.0)];
        let mut o = EdgeOracle::from_weights(4, &edges).unwrap();
        let mut state = ExplorationState::new(4, &[1, 2]).unwrap();
        let s = SeededStream::new(0, 0);
        let r = explore_step(&mut state, 2, &mut o, &s).unwrap();
        assert_eq!(r.merged, 1);
        assert_eq!(state.active.len(), 1);
        assert_eq!(state.active[0].vertex, 3);
        assert!((state.active[0].weight - 0.1).abs() < 1e-15);
        assert_eq!(state.removed_count, 2);
    }

    #[test]
    fn one_step_takes_global_minimum() {
        let mut s = SeededStream::new(2, 0);
        let mut o = EdgeOracle::materialized(10, &mut s).unwrap();
        let run = run_exploration(3, 1, &[4], &mut o, &s).unwrap();
        let w = run.best.unwrap();
        assert_eq!(w.len(), 1);
        let min = (1..=10).filter(|&v| v != 4).map(|v| o.edge_weight(4, v).unwrap()).fold(f64::INFINITY, f64::min);
        assert_eq!(w.total(), min);
    }

    #[test]
    fn lazy_run_keeps_invariants() {
        let mut o = EdgeOracle::lazy(2000).unwrap();
        let s = SeededStream::new(3, 0);
        let run = run_exploration(20, 60, &[1], &mut o, &s).unwrap();
        assert!(!run.extinct);
        let mut seen = vec![false; 2001];
        for node in &run.state.forest.nodes {
            assert!(!seen[node.vertex], "vertex {} active twice", node.vertex);
            seen[node.vertex] = true;
        }
        for (i, node) in run.state.forest.nodes.iter().enumerate() {
            let w = run.state.forest.witness(&o, i, Provenance::Exploration).unwrap();
            assert!((w.total() - node.weight).abs() < 1e-9);
        }
        for r in &run.state.records {
            assert!(r.active <= 20);
            assert_eq!(run.state.n() - r.removed, 2000 - r.removed);
        }
        let best = run.best.unwrap();
        assert!(verify_witness(&o, &best, best.average()).unwrap());
    }

    #[test]
    fn infeasible_budget_rejected() {
        let mut o = EdgeOracle::lazy(100).unwrap();
        let s = SeededStream::new(0, 0);
        assert!(run_exploration(10, 10, &[1], &mut o, &s).is_err());
        assert!(block_exploration(5, 20, 10, 1, &mut o, &s).is_err());
    }

    #[test]
    fn unit_blocks_are_greedy() {
        let mut s = SeededStream::new(4, 0);
        let mut o = EdgeOracle::materialized(12, &mut s).unwrap();
        let (spine, blocks) = block_exploration(1, 3, 11, 1, &mut o, &s).unwrap();
        assert!(blocks.block_weights.iter().all(|&w| w == 0.0));
        let mut seen = vec![spine.vertices[0]];
        for pair in spine.vertices.windows(2) {
            let row_min = (1..=12)
                .filter(|v| !seen.contains(v))
                .map(|v| o.edge_weight(pair[0], v).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert_eq!(o.edge_weight(pair[0], pair[1]).unwrap(), row_min);
            seen.push(pair[1]);
        }
        assert!(block_decomposition_error(&spine, &blocks) < 1e-9);
    }

    #[test]
    fn block_spine_is_simple_and_decomposes() {
        let mut o = EdgeOracle::lazy(20_000).unwrap();
        let s = SeededStream::new(5, 0);
        let (spine, blocks) = block_exploration(8, 30, 200, 1, &mut o, &s).unwrap();
        assert!(spine.len() >= 200);
        assert!(verify_witness(&o, &spine, f64::INFINITY).unwrap());
        assert!(block_decomposition_error(&spine, &blocks) < 1e-9);
        assert!(blocks.tau.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] <= 8));
    }

    #[test]
    fn coupled_audit_small() {
        let s = SeededStream::new(6, 0);
        let a = coupled_color_audit(2000, 20, 10, 1, &s).unwrap();
        assert_eq!(a.upper_violations, 0);
        assert_eq!(a.lower_violations, 0);
        assert_eq!(a.counts[0].non_blue_fraction(), 0.0);
        assert!(a.counts.iter().skip(1).all(|c| c.blue + c.red + c.purple == 20));
    }
}
