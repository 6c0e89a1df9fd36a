//! The centered walk `Y` with steps `Exp(1) − 1` and the scalar estimates
//! built on it: corridor confinement (Monte Carlo and spectral), drop counts,
//! the top-k exponential bound and the tilting identity.

use std::f64::consts::{E, PI};

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::rng::{exp1, step_x, SeededStream};
use crate::stats::{binomial_sigma, Moments};

/// Trajectory `Y_0 = 0, Y_1, …, Y_ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkTrace {
    pub values: Vec<f64>,
}

impl WalkTrace {
    pub fn len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("trace holds Y_0")
    }

    /// `min_{i ≤ j} (Y_j − Y_i)`, the deepest drop.
    pub fn max_drop(&self) -> f64 {
        let mut running_max = f64::NEG_INFINITY;
        let mut worst = 0.0f64;
        for &y in &self.values {
            running_max = running_max.max(y);
            worst = worst.min(y - running_max);
        }
        worst
    }
}

/// `Y` step: `Exp(1) − 1`.
#[inline]
pub fn y_step(stream: &mut SeededStream) -> f64 {
    exp1(stream) - 1.0
}

pub fn y_walk(len: usize, stream: &mut SeededStream) -> WalkTrace {
    let mut values = Vec::with_capacity(len + 1);
    let mut y = 0.0;
    values.push(y);
    for _ in 0..len {
        y += y_step(stream);
        values.push(y);
    }
    WalkTrace { values }
}

/// A product of closed intervals `[lower_j, upper_j]`, `j = 1..ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxEvent {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxEvent {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(invalid("box event needs matching, non-empty bounds"));
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(invalid("box event has an empty side"));
        }
        Ok(Self { lower, upper })
    }

    /// The same interval in every coordinate.
    pub fn cube(len: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; len], vec![upper; len])
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    /// Whether coordinate `j` (1-based) contains `x`.
    #[inline]
    pub fn admits(&self, j: usize, x: f64) -> bool {
        self.lower[j - 1] <= x && x <= self.upper[j - 1]
    }

    pub fn contains(&self, path: &[f64]) -> bool {
        path.len() == self.len() && path.iter().enumerate().all(|(i, &x)| self.admits(i + 1, x))
    }
}

/// Monte Carlo probability estimate with its binomial error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilityEstimate {
    pub estimate: f64,
    pub sigma: f64,
    pub successes: u64,
    pub trials: u64,
    /// No trial succeeded; the estimate is 0 and must not be fed to `ln`.
    pub zero_flag: bool,
}

impl ProbabilityEstimate {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        let p = successes as f64 / trials as f64;
        Self {
            estimate: p,
            sigma: binomial_sigma(p, trials),
            successes,
            trials,
            zero_flag: successes == 0,
        }
    }
}

/// Estimates `P(r_j ≤ Y_j ≤ r_j + Δ, 1 ≤ j ≤ ℓ)` with `r_j = r0 + (c/Δ²)j`.
///
/// Trial `i` is driven by `stream.substream(i)`, so calls that differ only in
/// `Δ` share their noise and nested corridors give nested success sets.
pub fn confinement_mc(
    r0: f64,
    delta: f64,
    drift: f64,
    len: usize,
    trials: u64,
    stream: &SeededStream,
) -> Result<ProbabilityEstimate> {
    if !(r0 <= 0.0 && 0.0 <= r0 + delta) {
        return Err(invalid(format!("need r0 <= 0 <= r0 + delta, got r0={r0}, delta={delta}")));
    }
    if drift < 0.0 || trials == 0 {
        return Err(invalid("confinement_mc needs drift >= 0 and trials >= 1"));
    }
    let slope = drift / (delta * delta);
    let mut ok = 0;
    for t in 0..trials {
        let mut s = stream.substream(t);
        let mut y = 0.0;
        let mut inside = true;
        for j in 1..=len {
            y += y_step(&mut s);
            let r = r0 + slope * j as f64;
            if y < r || y > r + delta {
                inside = false;
                break;
            }
        }
        ok += inside as u64;
    }
    Ok(ProbabilityEstimate::from_counts(ok, trials))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RateMethod {
    MonteCarlo,
    Spectral,
}

/// Per-step exponential decay rate of the corridor-confinement probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEstimate {
    pub delta: f64,
    pub grid: usize,
    /// Principal eigenvalue of the corridor transfer operator.
    pub eigenvalue: f64,
    /// `−ln eigenvalue`.
    pub rate: f64,
    pub method: RateMethod,
    pub error_bar: f64,
}

impl RateEstimate {
    pub fn scaled_rate(&self) -> f64 {
        self.delta * self.delta * self.rate
    }
}

/// The Brownian corridor constant `π²/2`.
pub const MOGULSKII_CONSTANT: f64 = PI * PI / 2.0;

const MAX_SWEEPS: usize = 400_000;

/// Discretized transfer operator of the walk killed outside `[0, Δ]`.
///
/// The kernel `k(x, y) = e^{−(y − x + 1)}` on `y > x − 1` is integrated
/// exactly over each target cell (including the cell cut by `y = x − 1`) and
/// collocated at cell midpoints, so a matrix–vector product is a suffix sum.
struct CorridorOperator {
    h: f64,
    /// `e^{x_a − 1}` per row.
    row_scale: Vec<f64>,
    /// Mass `∫_cell e^{−y} dy` per column.
    col_mass: Vec<f64>,
    /// Index of the cell containing `x_a − 1`, or `None` if `x_a < 1`.
    cut_cell: Vec<Option<usize>>,
    /// Weight of the partial cut cell for each row.
    cut_weight: Vec<f64>,
    suffix: Vec<f64>,
}

impl CorridorOperator {
    fn new(delta: f64, grid: usize) -> Self {
        let h = delta / grid as f64;
        let col_mass = (0..grid)
            .map(|b| (-(b as f64) * h).exp() - (-((b + 1) as f64) * h).exp())
            .collect();
        let mut row_scale = Vec::with_capacity(grid);
        let mut cut_cell = Vec::with_capacity(grid);
        let mut cut_weight = Vec::with_capacity(grid);
        for a in 0..grid {
            let z = (a as f64 + 0.5) * h - 1.0;
            row_scale.push(z.exp());
            if z < 0.0 {
                cut_cell.push(None);
                cut_weight.push(0.0);
            } else {
                let b = ((z / h).floor() as usize).min(grid - 1);
                cut_cell.push(Some(b));
                // ∫_z^{(b+1)h} e^{-(y - z)} dy
                cut_weight.push(1.0 - (z - (b + 1) as f64 * h).exp());
            }
        }
        Self {
            h,
            row_scale,
            col_mass,
            cut_cell,
            cut_weight,
            suffix: vec![0.0; grid + 1],
        }
    }

    fn apply(&mut self, f: &[f64], out: &mut [f64]) {
        let grid = f.len();
        self.suffix[grid] = 0.0;
        for b in (0..grid).rev() {
            self.suffix[b] = self.suffix[b + 1] + self.col_mass[b] * f[b];
        }
        for a in 0..grid {
            out[a] = match self.cut_cell[a] {
                None => self.row_scale[a] * self.suffix[0],
                Some(b) => self.row_scale[a] * self.suffix[b + 1] + self.cut_weight[a] * f[b],
            };
        }
    }

    fn principal_eigenvalue(&mut self, delta: f64) -> Result<f64> {
        let grid = self.row_scale.len();
        let mut f: Vec<f64> = (0..grid)
            .map(|a| (PI * (a as f64 + 0.5) * self.h / delta).sin())
            .collect();
        let mut g = vec![0.0; grid];
        let mut lambda = 0.0;
        for _ in 0..MAX_SWEEPS {
            self.apply(&f, &mut g);
            let next = g.iter().sum::<f64>() / f.iter().sum::<f64>();
            let norm = g.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
            for x in g.iter_mut() {
                *x /= norm;
            }
            std::mem::swap(&mut f, &mut g);
            if (next - lambda).abs() <= 1e-15 * next {
                return Ok(next);
            }
            lambda = next;
        }
        Err(Error::NoConvergence(MAX_SWEEPS))
    }
}

/// Principal eigenvalue of the corridor operator on `[0, Δ]` by power
/// iteration; the error bar is the change from `grid` to `2·grid` cells.
pub fn confinement_spectral(delta: f64, grid: usize) -> Result<RateEstimate> {
    if !(delta > 0.0) || grid < 64 {
        return Err(invalid(format!("confinement_spectral needs delta > 0 and grid >= 64, got {delta}, {grid}")));
    }
    let coarse = CorridorOperator::new(delta, grid).principal_eigenvalue(delta)?;
    let fine = CorridorOperator::new(delta, 2 * grid).principal_eigenvalue(delta)?;
    let rate = -fine.ln();
    Ok(RateEstimate {
        delta,
        grid: 2 * grid,
        eigenvalue: fine,
        rate,
        method: RateMethod::Spectral,
        error_bar: (rate + coarse.ln()).abs(),
    })
}

/// `m_Δ(L)`: indices `j` with `min_{ℓ ≥ j} Y_ℓ ≤ Y_j − Δ`, in one backward pass.
pub fn drop_count(trace: &WalkTrace, delta: f64) -> usize {
    let mut suffix_min = f64::INFINITY;
    let mut count = 0;
    for &y in trace.values.iter().rev() {
        suffix_min = suffix_min.min(y);
        if suffix_min <= y - delta {
            count += 1;
        }
    }
    count
}

/// Result of the top-k exponential sum check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TopKCheck {
    pub len: usize,
    pub k: usize,
    pub mean: f64,
    pub sigma: f64,
    pub bound: f64,
    pub holds: bool,
}

/// MC mean of the sum of the `k` largest of `len` i.i.d. `Exp(1)`, against
/// the bound `k + k ln(len/k)`.
pub fn top_k_exp_sum(len: usize, k: usize, trials: u64, stream: &SeededStream) -> Result<TopKCheck> {
    if k == 0 || k > len || trials == 0 {
        return Err(invalid(format!("top_k_exp_sum needs 1 <= k <= len and trials >= 1, got k={k}, len={len}")));
    }
    let mut s = stream.clone();
    let mut buf = vec![0.0; len];
    let mut m = Moments::new();
    for _ in 0..trials {
        for x in buf.iter_mut() {
            *x = exp1(&mut s);
        }
        let top = if k == len {
            &buf[..]
        } else {
            buf.select_nth_unstable_by(len - k, f64::total_cmp);
            &buf[len - k..]
        };
        m.push(top.iter().sum());
    }
    let bound = k as f64 + k as f64 * (len as f64 / k as f64).ln();
    let sigma = m.sem();
    Ok(TopKCheck {
        len,
        k,
        mean: m.mean(),
        sigma,
        bound,
        holds: m.mean() <= bound + 3.0 * sigma,
    })
}

/// Outcome of the bounded-drop estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DropTiltCheck {
    pub len: usize,
    pub delta: f64,
    pub c: f64,
    /// `P(Y_ℓ ≤ Δ/c, min drop ≥ −Δ)`.
    pub joint: ProbabilityEstimate,
    /// `P(min drop ≥ −Δ)`, which contains the joint event.
    pub drop_only: ProbabilityEstimate,
    /// `(d, e^{−dℓ/Δ²})` for reference; descriptive only.
    pub references: Vec<(f64, f64)>,
    /// `joint ≤ e^{−3ℓ/Δ²} + 3σ`.
    pub flag: bool,
}

/// Direct MC of the bounded-drop event against the conservative `d = 3` rate.
pub fn max_drop_tilt_check(len: usize, delta: f64, c: f64, trials: u64, stream: &SeededStream) -> Result<DropTiltCheck> {
    if len > 10_000 || trials == 0 || !(delta > 0.0) || !(c > 0.0) {
        return Err(invalid("max_drop_tilt_check needs len <= 1e4, trials >= 1, delta > 0, c > 0"));
    }
    let (mut joint, mut drop_only) = (0u64, 0u64);
    for t in 0..trials {
        let mut s = stream.substream(t);
        let (mut y, mut top) = (0.0f64, 0.0f64);
        let mut ok = true;
        for _ in 0..len {
            y += y_step(&mut s);
            top = top.max(y);
            if y - top < -delta {
                ok = false;
                break;
            }
        }
        if ok {
            drop_only += 1;
            joint += (y <= delta / c) as u64;
        }
    }
    let joint = ProbabilityEstimate::from_counts(joint, trials);
    let drop_only = ProbabilityEstimate::from_counts(drop_only, trials);
    let scale = len as f64 / (delta * delta);
    let references = [3.0, 4.0, 4.5].iter().map(|&d| (d, (-d * scale).exp())).collect();
    let flag = joint.estimate <= (-3.0 * scale).exp() + 3.0 * joint.sigma;
    Ok(DropTiltCheck {
        len,
        delta,
        c,
        joint,
        drop_only,
        references,
        flag,
    })
}

/// Two independent estimates of the probability of a box event for the
/// label walk `S`: direct simulation, and the tilted `Y`-walk expression
/// `n^{−ℓ} e^{−ℓ/(ne)} E[e^{q_n Y_ℓ} 1_A(Y)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TiltingCheck {
    pub direct: f64,
    pub direct_sigma: f64,
    pub tilted: f64,
    pub tilted_sigma: f64,
    pub agree: bool,
}

pub fn tilting_round_trip(n: usize, event: &BoxEvent, trials: u64, stream: &SeededStream) -> Result<TiltingCheck> {
    if n < 2 || trials == 0 {
        return Err(invalid("tilting_round_trip needs n >= 2 and trials >= 1"));
    }
    let len = event.len();
    let mut direct_stream = stream.substream(0);
    let mut hits = 0u64;
    let mut path = vec![0.0; len];
    for _ in 0..trials {
        let mut s = 0.0;
        for x in path.iter_mut() {
            s += step_x(&mut direct_stream, n)?;
            *x = s;
        }
        hits += event.contains(&path) as u64;
    }
    let direct = ProbabilityEstimate::from_counts(hits, trials);

    let q = 1.0 - 1.0 / (E * n as f64);
    let prefactor = (n as f64).powi(-(len as i32)) * (-(len as f64) / (n as f64 * E)).exp();
    let mut tilted_stream = stream.substream(1);
    let mut m = Moments::new();
    for _ in 0..trials {
        let mut y = 0.0;
        for x in path.iter_mut() {
            y += y_step(&mut tilted_stream);
            *x = y;
        }
        m.push(if event.contains(&path) { (q * y).exp() } else { 0.0 });
    }
    let tilted = prefactor * m.mean();
    let tilted_sigma = prefactor * m.sem();
    let combined = (direct.sigma.powi(2) + tilted_sigma.powi(2)).sqrt();
    Ok(TiltingCheck {
        direct: direct.estimate,
        direct_sigma: direct.sigma,
        tilted,
        tilted_sigma,
        agree: (direct.estimate - tilted).abs() <= 3.0 * combined,
    })
}

/// First time `Y` goes strictly below `−x`, if it happens within `horizon`.
pub fn first_crossing_time(x: f64, horizon: usize, stream: &mut SeededStream) -> Option<usize> {
    let mut y = 0.0;
    for j in 1..=horizon {
        y += y_step(stream);
        if y < -x {
            return Some(j);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_walk() {
        let mut s = SeededStream::new(0, 0);
        let t = y_walk(0, &mut s);
        assert_eq!(t.values, vec![0.0]);
        assert!(t.is_empty());
    }

    #[test]
    fn increments_exceed_minus_one() {
        let mut s = SeededStream::new(1, 0);
        let t = y_walk(1000, &mut s);
        assert!(t.values.windows(2).all(|w| w[1] - w[0] > -1.0));
    }

    #[test]
    fn drop_count_hand_cases() {
        let up = WalkTrace {
            values: vec![0.0, 1.0, 2.0, 3.0],
        };
        assert_eq!(drop_count(&up, 0.5), 0);
        let t = WalkTrace {
            values: vec![0.0, 2.0, -3.0],
        };
        assert_eq!(drop_count(&t, 1.0), 2);
    }

    #[test]
    fn max_drop_matches_definition() {
        let t = WalkTrace {
            values: vec![0.0, 2.0, -3.0, 5.0, 4.0],
        };
        assert_eq!(t.max_drop(), -5.0);
    }

    #[test]
    fn wide_corridor_almost_surely_holds() {
        let s = SeededStream::new(2, 0);
        let p = confinement_mc(-500.0, 1000.0, 0.0, 10, 2000, &s).unwrap();
        assert_eq!(p.estimate, 1.0);
        assert!(confinement_mc(1.0, 1.0, 0.0, 10, 10, &s).is_err());
    }

    #[test]
    fn corridor_monotone_in_width() {
        let s = SeededStream::new(3, 0);
        let narrow = confinement_mc(-2.0, 4.0, 0.0, 40, 20_000, &s).unwrap();
        let wide = confinement_mc(-2.0, 6.0, 0.0, 40, 20_000, &s).unwrap();
        assert!(wide.successes >= narrow.successes);
    }

    #[test]
    fn spectral_rate_positive_and_guarded() {
        let r = confinement_spectral(5.0, 64).unwrap();
        assert!(r.rate > 0.0 && r.eigenvalue < 1.0);
        assert!(confinement_spectral(5.0, 32).is_err());
        assert!(confinement_spectral(0.0, 64).is_err());
    }

    #[test]
    fn top_k_all_is_total_sum() {
        let s = SeededStream::new(4, 0);
        let r = top_k_exp_sum(10, 10, 20_000, &s).unwrap();
        assert_eq!(r.bound, 10.0);
        assert!((r.mean - 10.0).abs() < 4.0 * r.sigma);
        assert!(top_k_exp_sum(5, 6, 10, &s).is_err());
    }

    #[test]
    fn top_one_of_ten_is_harmonic() {
        let s = SeededStream::new(5, 0);
        let r = top_k_exp_sum(10, 1, 200_000, &s).unwrap();
        let h10: f64 = (1..=10).map(|i| 1.0 / i as f64).sum();
        assert!((r.mean - h10).abs() < 4.0 * r.sigma, "{} vs {h10}", r.mean);
        assert!((r.bound - (1.0 + 10f64.ln())).abs() < 1e-12);
        assert!(h10 <= r.bound);
    }

    #[test]
    fn huge_drop_allowance() {
        let s = SeededStream::new(6, 0);
        let r = max_drop_tilt_check(50, 1e6, 1.0, 1000, &s).unwrap();
        assert_eq!(r.joint.estimate, 1.0);
        assert!(r.joint.estimate <= r.drop_only.estimate);
    }

    #[test]
    fn box_event_validation() {
        assert!(BoxEvent::new(vec![1.0], vec![0.0]).is_err());
        assert!(BoxEvent::new(vec![], vec![]).is_err());
        let b = BoxEvent::cube(2, -1.0, 1.0).unwrap();
        assert!(b.contains(&[0.0, 1.0]));
        assert!(!b.contains(&[0.0, 1.5]));
    }
}
