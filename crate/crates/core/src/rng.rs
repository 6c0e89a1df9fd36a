//! Seeded randomness and the primitive distributions of the model.
//!
//! Every random quantity in the crate is drawn from a [`SeededStream`], keyed
//! by a `(seed, stream_id)` pair. Substreams are derived from a parent key
//! without consuming any of the parent's draws, so replicas, per-generation
//! and per-parent streams can be created in any order (or on any thread) and
//! still replay bit-identically.
//!
//! Exponential variables are produced by inverse CDF from a 53-bit uniform.
//! All order statistics below are built from cumulative exponential gaps, so
//! the coupling between the edge labels of one vertex and a unit-rate Poisson
//! process holds exactly by construction.

use std::f64::consts::E;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};

/// `2^-53`, the spacing of the uniform grid used for exponential draws.
const UNIT_53: f64 = 1.0 / (1u64 << 53) as f64;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A deterministic random stream identified by `(seed, stream_id)`.
///
/// Two streams with the same key produce identical draw sequences. Streams
/// are single-owner; clone one to replay it.
#[derive(Debug, Clone)]
pub struct SeededStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl SeededStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Derives an independent child stream. Does not advance `self`.
    pub fn substream(&self, key: u64) -> SeededStream {
        let id = splitmix64(self.stream_id ^ splitmix64(key.wrapping_add(0x5851_F42D_4C95_7F2D)));
        SeededStream::new(self.seed, id)
    }

    /// Child stream keyed by two indices, e.g. `(generation, rank)`.
    pub fn substream2(&self, a: u64, b: u64) -> SeededStream {
        self.substream(a).substream(b)
    }

    /// Uniform on the open interval `(0, 1)`, on a grid of spacing `2^-53`.
    pub fn uniform_open(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * UNIT_53
    }

    /// Uniform integer in `[0, bound)`.
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "bound must be positive");
        // Lemire's multiply-shift with rejection; unbiased.
        let bound = bound as u64;
        loop {
            let x = self.rng.next_u64();
            let m = (x as u128) * (bound as u128);
            let low = m as u64;
            if low >= bound || low >= bound.wrapping_neg() % bound {
                return (m >> 64) as usize;
            }
        }
    }
}

impl RngCore for SeededStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// One draw of `Exp(1)`, strictly positive.
pub fn exp1(stream: &mut SeededStream) -> f64 {
    -stream.uniform_open().ln()
}

/// One edge label `n·e·Exp(1) − 1`; support `(−1, ∞)`.
pub fn step_x(stream: &mut SeededStream, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(invalid(format!("step_x needs n >= 2, got {n}")));
    }
    Ok(label_from_exp(n, exp1(stream)))
}

#[inline]
pub(crate) fn label_from_exp(n: usize, e: f64) -> f64 {
    n as f64 * E * e - 1.0
}

/// Order statistics of `n − 1` labels coupled to Poisson(1) atoms.
///
/// `x[i-1]` is `X_(i)` and `t[i-1]` is `T_i`; both are driven by the same
/// exponential gaps `gaps[i-1]`, with `X_(i) − X_(i−1) = ne/(n−i)·gap_i` and
/// `T_i − T_{i−1} = gap_i` (conventions `X_(0) = −1`, `T_0 = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledOrderStats {
    pub n: usize,
    pub m: usize,
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    pub gaps: Vec<f64>,
}

impl CoupledOrderStats {
    /// Largest violation of the gap identity, measured against the size of
    /// the accumulated quantities.
    ///
    /// The stored `x` and `t` are rounded running sums, so the identity can
    /// only be checked to the precision of their magnitudes.
    pub fn identity_error(&self) -> f64 {
        let ne = self.n as f64 * E;
        let mut worst = 0.0f64;
        let (mut x_prev, mut t_prev) = (-1.0, 0.0);
        for i in 1..=self.m {
            let (x, t) = (self.x[i - 1], self.t[i - 1]);
            let coef = ne / (self.n - i) as f64;
            let lhs = x - x_prev;
            let rhs = coef * (t - t_prev);
            let scale = x.abs().max(x_prev.abs()).max(coef * t).max(1.0);
            worst = worst.max((lhs - rhs).abs() / scale);
            x_prev = x;
            t_prev = t;
        }
        worst
    }

    /// Number of indices at which `eT_i − 1 ≤ X_(i) ≤ n/(n−i)(eT_i − 1) + i/(n−i)`
    /// fails by more than floating-point rounding of the bounds themselves.
    pub fn sandwich_violations(&self) -> usize {
        let n = self.n as f64;
        (1..=self.m)
            .filter(|&i| {
                let (x, t) = (self.x[i - 1], self.t[i - 1]);
                let fi = i as f64;
                let lower = E * t - 1.0;
                let upper = n / (n - fi) * (E * t - 1.0) + fi / (n - fi);
                let slack = 4.0 * f64::EPSILON * (x.abs() + upper.abs() + 1.0);
                !(lower < x + slack && x <= upper + slack)
            })
            .count()
    }
}

/// Draws the first `m` order statistics of `n − 1` i.i.d. labels together with
/// the coupled Poisson atoms.
pub fn coupled_order_stats(stream: &mut SeededStream, n: usize, m: usize) -> Result<CoupledOrderStats> {
    if n < 2 {
        return Err(invalid(format!("coupled_order_stats needs n >= 2, got {n}")));
    }
    if m == 0 || m > n - 1 {
        return Err(invalid(format!("coupled_order_stats needs 1 <= m <= n-1, got m={m}, n={n}")));
    }
    let ne = n as f64 * E;
    let mut x = Vec::with_capacity(m);
    let mut t = Vec::with_capacity(m);
    let mut gaps = Vec::with_capacity(m);
    let (mut xc, mut tc) = (-1.0, 0.0);
    for i in 1..=m {
        let g = exp1(stream);
        xc += ne / (n - i) as f64 * g;
        tc += g;
        gaps.push(g);
        x.push(xc);
        t.push(tc);
    }
    Ok(CoupledOrderStats { n, m, x, t, gaps })
}

/// Ascending order statistics of `pool` i.i.d. labels (ambient graph size `n`),
/// generated one gap at a time.
///
/// The `i`-th gap is `ne/(pool − i + 1)·Exp(1)`; stopping early never changes
/// the values already emitted.
#[derive(Debug, Clone)]
pub struct LazyOrderStats {
    stream: SeededStream,
    scale: f64,
    pool: usize,
    emitted: usize,
    current: f64,
}

impl LazyOrderStats {
    pub fn new(stream: SeededStream, n: usize, pool: usize) -> Self {
        Self {
            stream,
            scale: n as f64 * E,
            pool,
            emitted: 0,
            current: -1.0,
        }
    }

    pub fn emitted(&self) -> usize {
        self.emitted
    }

    pub fn remaining(&self) -> usize {
        self.pool - self.emitted
    }
}

impl Iterator for LazyOrderStats {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if self.emitted == self.pool {
            return None;
        }
        let g = exp1(&mut self.stream);
        self.current += self.scale / (self.pool - self.emitted) as f64 * g;
        self.emitted += 1;
        Some(self.current)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.remaining();
        (r, Some(r))
    }
}

/// All order statistics of `pool` labels that do not exceed `cutoff`.
pub fn lazy_order_stat_stream(stream: SeededStream, n: usize, pool: usize, cutoff: f64) -> Result<Vec<f64>> {
    if pool == 0 {
        return Err(invalid("lazy_order_stat_stream needs pool >= 1"));
    }
    if n < 2 {
        return Err(invalid(format!("lazy_order_stat_stream needs n >= 2, got {n}")));
    }
    Ok(LazyOrderStats::new(stream, n, pool).take_while(|&x| x <= cutoff).collect())
}

/// Unit-rate Poisson atoms `T_1 < T_2 < …`, an endless stream.
#[derive(Debug, Clone)]
pub struct PoissonAtoms {
    stream: SeededStream,
    current: f64,
}

impl PoissonAtoms {
    pub fn new(stream: SeededStream) -> Self {
        Self { stream, current: 0.0 }
    }
}

impl Iterator for PoissonAtoms {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.current += exp1(&mut self.stream);
        Some(self.current)
    }
}
