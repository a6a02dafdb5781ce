//! Desk-scale Monte Carlo simulation of the block-Markov achievability
//! scheme with information-density threshold decoders.
//!
//! One trial transmits `B` blocks of length `n`. Block `i` carries a triple
//! `(t_i, j_i, l_i)`; the sender transmits the codeword
//! `x(w_i, t_i, j_i, l_i)` where `w_i` is the partition cell of the previous
//! common message `t_{i-1}`, and the relay, having decoded `t_{i-1}` on its
//! own, forwards `s(w_i)`. Decoding events, the eavesdropper-side estimator
//! failures, and the surprisal-window escape rates are tallied per message
//! block and assembled into an equivocation lower bound.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::info::{cond_entropy, cond_mutual_information, DensityKind, DensityTable, Var, VarSet};
use crate::prob::{make_joint, AuxInput, ProbError, RelayChannel};
use crate::{real, Real};

/// Default cap on `|W||T||J||L|` total codewords.
pub const CODEBOOK_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SimError {
    #[error("codebook would hold {total} codewords, above the cap {cap}")]
    CapExceeded { total: u64, cap: u64 },
    #[error("invalid simulation config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Prob(#[from] ProbError),
}

/// The four coding rates of the scheme, in bits per channel use.
///
/// `r0` sizes the common-message set, `r` the relay's forwarded index set,
/// `r1` the protected part and `r2` the sacrificial part of the private
/// message.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimRates<F> {
    pub r0: F,
    pub r: F,
    pub r1: F,
    pub r2: F,
}

/// Single-letter informations of the fixed input distribution that the rate
/// preset and the equivocation bound reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingleLetterInfo<F> {
    pub i_u_z_given_s: F,
    pub i_u_y_given_s: F,
    pub i_s_y: F,
    pub i_x_y_given_us: F,
    pub i_x_z_given_us: F,
    pub h_z_given_xs: F,
    pub h_z_given_us: F,
}

impl<F: Real> SingleLetterInfo<F> {
    pub fn compute(channel: &RelayChannel<F>, input: &AuxInput<F>) -> Result<Self, ProbError> {
        let joint = make_joint(channel, input)?;
        let u = VarSet::new(&[Var::U]);
        let s = VarSet::new(&[Var::S]);
        let x = VarSet::new(&[Var::X]);
        let y = VarSet::new(&[Var::Y]);
        let z = VarSet::new(&[Var::Z]);
        let us = VarSet::new(&[Var::U, Var::S]);
        let xs = VarSet::new(&[Var::X, Var::S]);
        let mi = |a, b, c| cond_mutual_information(&joint, a, b, c).expect("disjoint");
        Ok(Self {
            i_u_z_given_s: mi(u, z, s),
            i_u_y_given_s: mi(u, y, s),
            i_s_y: mi(s, y, VarSet::EMPTY),
            i_x_y_given_us: mi(x, y, us),
            i_x_z_given_us: mi(x, z, us),
            h_z_given_xs: cond_entropy(&joint, z, xs).expect("disjoint"),
            h_z_given_us: cond_entropy(&joint, z, us).expect("disjoint"),
        })
    }

    /// The scheme's canonical rate choice for a margin `epsilon`:
    /// `r = I(S;Y) - 2e`, `r0 = min{I(U;Z|S), I(U;Y|S) + r} - 2e`,
    /// `r1 = I(X;Y|US) - I(X;Z|US) - 2e`, `r2 = I(X;Z|US) - e`.
    pub fn preset_rates(&self, epsilon: F) -> SimRates<F> {
        let two = real::<F>(2.0);
        let r = self.i_s_y - two * epsilon;
        SimRates {
            r0: (self.i_u_z_given_s.min(self.i_u_y_given_s + r)) - two * epsilon,
            r,
            r1: self.i_x_y_given_us - self.i_x_z_given_us - two * epsilon,
            r2: self.i_x_z_given_us - epsilon,
        }
    }
}

/// Full configuration of one simulation run.
#[derive(Debug, Clone)]
pub struct SimConfig<F> {
    pub channel: RelayChannel<F>,
    pub input: AuxInput<F>,
    /// Block length.
    pub n: usize,
    /// Number of blocks per trial; blocks `1..B-1` carry fresh messages.
    pub blocks: usize,
    /// Independent trials.
    pub trials: usize,
    pub rates: SimRates<F>,
    /// Threshold margin of every decoder.
    pub epsilon: F,
    pub seed: u64,
    /// Cap on `|W||T||J||L|`.
    pub codebook_cap: u64,
    /// Diagnostic switch: relay forwards the true cell index instead of its
    /// own decoded one (no error propagation).
    pub genie_relay: bool,
}

impl<F: Real> SimConfig<F> {
    pub fn new(
        channel: RelayChannel<F>,
        input: AuxInput<F>,
        n: usize,
        blocks: usize,
        trials: usize,
        rates: SimRates<F>,
        epsilon: F,
        seed: u64,
    ) -> Result<Self, SimError> {
        let cfg = Self {
            channel,
            input,
            n,
            blocks,
            trials,
            rates,
            epsilon,
            seed,
            codebook_cap: CODEBOOK_CAP,
            genie_relay: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.n == 0 {
            return Err(SimError::BadConfig("block length n must be >= 1".into()));
        }
        if self.blocks < 2 {
            return Err(SimError::BadConfig("need at least 2 blocks".into()));
        }
        if self.trials == 0 {
            return Err(SimError::BadConfig("need at least 1 trial".into()));
        }
        if self.epsilon <= F::zero() {
            return Err(SimError::BadConfig("epsilon must be > 0".into()));
        }
        if self.input.ns() != self.channel.ns() || self.input.nx() != self.channel.nx() {
            return Err(SimError::BadConfig("input alphabets do not match the channel".into()));
        }
        for (name, size) in [
            ("|S|", self.channel.ns()),
            ("|X|", self.channel.nx()),
            ("|Y|", self.channel.ny()),
            ("|Z|", self.channel.nz()),
            ("|U|", self.input.nu()),
        ] {
            if size > u8::MAX as usize + 1 {
                return Err(SimError::BadConfig(format!("{name} = {size} exceeds 256")));
            }
        }
        let sizes = CodebookSizes::from_rates(self.n, &self.rates);
        let total = sizes.total();
        if total > self.codebook_cap {
            return Err(SimError::CapExceeded { total, cap: self.codebook_cap });
        }
        Ok(())
    }

    pub fn sizes(&self) -> CodebookSizes {
        CodebookSizes::from_rates(self.n, &self.rates)
    }
}

/// Index-set sizes `2^floor(n * rate)`, clamped to at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CodebookSizes {
    pub w: u64,
    pub t: u64,
    pub j: u64,
    pub l: u64,
}

impl CodebookSizes {
    pub fn from_rates<F: Real>(n: usize, rates: &SimRates<F>) -> Self {
        Self {
            w: index_size(n, rates.r),
            t: index_size(n, rates.r0),
            j: index_size(n, rates.r2),
            l: index_size(n, rates.r1),
        }
    }

    pub fn total(&self) -> u64 {
        self.w.saturating_mul(self.t).saturating_mul(self.j).saturating_mul(self.l)
    }
}

fn index_size<F: Real>(n: usize, rate: F) -> u64 {
    let e = (F::from_usize(n).unwrap() * rate).floor();
    let e = e.to_i64().unwrap_or(0);
    if e <= 0 {
        1
    } else {
        1u64 << e.min(62)
    }
}

/// Sampled random codebook: relay words `s(w)`, cloud centers `u(w,t)`,
/// satellites `x(w,t,j,l)`, and the random partition of the common-message
/// set into `|W|` cells.
#[derive(Debug, Clone)]
pub struct Codebook {
    pub n: usize,
    pub sizes: CodebookSizes,
    s_words: Vec<u8>,
    u_words: Vec<u8>,
    x_words: Vec<u8>,
    partition: Vec<u32>,
}

impl Codebook {
    #[inline]
    pub fn s_word(&self, w: usize) -> &[u8] {
        &self.s_words[w * self.n..(w + 1) * self.n]
    }

    #[inline]
    pub fn u_word(&self, w: usize, t: usize) -> &[u8] {
        let idx = w * self.sizes.t as usize + t;
        &self.u_words[idx * self.n..(idx + 1) * self.n]
    }

    #[inline]
    pub fn x_word(&self, w: usize, t: usize, j: usize, l: usize) -> &[u8] {
        let jl = self.sizes.j as usize * self.sizes.l as usize;
        let idx = (w * self.sizes.t as usize + t) * jl + j * self.sizes.l as usize + l;
        &self.x_words[idx * self.n..(idx + 1) * self.n]
    }

    /// Partition cell of a common message.
    #[inline]
    pub fn cell_of(&self, t: usize) -> usize {
        self.partition[t] as usize
    }
}

/// Inverse-CDF sampler over one probability row.
#[derive(Debug, Clone)]
struct CumRow {
    cum: Vec<f64>,
}

impl CumRow {
    fn new<F: Real>(row: impl Iterator<Item = F>) -> Self {
        let mut cum = Vec::new();
        let mut acc = 0.0f64;
        for p in row {
            acc += p.to_f64().unwrap_or(0.0);
            cum.push(acc);
        }
        Self { cum }
    }

    #[inline]
    fn sample(&self, u01: f64) -> usize {
        let target = u01 * self.cum.last().copied().unwrap_or(1.0);
        for (i, &c) in self.cum.iter().enumerate() {
            if target < c {
                return i;
            }
        }
        self.cum.len() - 1
    }
}

/// Samples the random codebook: i.i.d. relay words per `p(s)`, cloud centers
/// per `p(u|s)` given the relay word, satellites per `p(x|u,s)`, and a
/// uniform independent partition cell per common message.
pub fn build_codebook<F: Real>(cfg: &SimConfig<F>) -> Result<Codebook, SimError> {
    cfg.validate()?;
    let sizes = cfg.sizes();
    let n = cfg.n;
    let factors = cfg.input.factorize();
    let s_sampler = CumRow::new(factors.p_s.iter().copied());
    let u_samplers: Vec<CumRow> = (0..factors.ns)
        .map(|s| CumRow::new((0..factors.nu).map(|u| factors.p_u_given_s[s * factors.nu + u])))
        .collect();
    let x_samplers: Vec<CumRow> = (0..factors.nu * factors.ns)
        .map(|us| CumRow::new((0..factors.nx).map(|x| factors.p_x_given_us[us * factors.nx + x])))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(0);

    let (nw, nt, nj, nl) = (sizes.w as usize, sizes.t as usize, sizes.j as usize, sizes.l as usize);
    let mut s_words = vec![0u8; nw * n];
    for w in 0..nw {
        for k in 0..n {
            s_words[w * n + k] = s_sampler.sample(rng.random::<f64>()) as u8;
        }
    }
    let mut u_words = vec![0u8; nw * nt * n];
    for w in 0..nw {
        for t in 0..nt {
            for k in 0..n {
                let s = s_words[w * n + k] as usize;
                u_words[(w * nt + t) * n + k] = u_samplers[s].sample(rng.random::<f64>()) as u8;
            }
        }
    }
    let mut x_words = vec![0u8; nw * nt * nj * nl * n];
    for w in 0..nw {
        for t in 0..nt {
            for j in 0..nj {
                for l in 0..nl {
                    let idx = ((w * nt + t) * nj + j) * nl + l;
                    for k in 0..n {
                        let s = s_words[w * n + k] as usize;
                        let u = u_words[(w * nt + t) * n + k] as usize;
                        x_words[idx * n + k] =
                            x_samplers[u * factors.ns + s].sample(rng.random::<f64>()) as u8;
                    }
                }
            }
        }
    }
    let mut partition = vec![0u32; nt];
    for cell in partition.iter_mut() {
        *cell = rng.random_range(0..nw as u32);
    }
    Ok(Codebook { n, sizes, s_words, u_words, x_words, partition })
}

/// Precomputed per-symbol density tables and thresholds shared by all
/// trials.
pub struct SimTables<F> {
    pub info: SingleLetterInfo<F>,
    d_uz_s: DensityTable<F>,
    d_sy: DensityTable<F>,
    d_uy_s: DensityTable<F>,
    d_xy_us: DensityTable<F>,
    d_xz_us: DensityTable<F>,
    d_z_xs: DensityTable<F>,
    d_z_us: DensityTable<F>,
    channel_rows: Vec<CumRow>,
    nz: usize,
    ns: usize,
}

impl<F: Real> SimTables<F> {
    pub fn new(cfg: &SimConfig<F>) -> Result<Self, SimError> {
        let joint = make_joint(&cfg.channel, &cfg.input)?;
        let info = SingleLetterInfo::compute(&cfg.channel, &cfg.input)?;
        let ch = &cfg.channel;
        let channel_rows = (0..ch.nx() * ch.ns())
            .map(|xs| {
                let (x, s) = (xs / ch.ns(), xs % ch.ns());
                CumRow::new(
                    (0..ch.ny() * ch.nz()).map(|yz| ch.gamma(x, s, yz / ch.nz(), yz % ch.nz())),
                )
            })
            .collect();
        Ok(Self {
            info,
            d_uz_s: DensityTable::new(&joint, DensityKind::UzGivenS),
            d_sy: DensityTable::new(&joint, DensityKind::Sy),
            d_uy_s: DensityTable::new(&joint, DensityKind::UyGivenS),
            d_xy_us: DensityTable::new(&joint, DensityKind::XyGivenUs),
            d_xz_us: DensityTable::new(&joint, DensityKind::XzGivenUs),
            d_z_xs: DensityTable::new(&joint, DensityKind::ZGivenXs),
            d_z_us: DensityTable::new(&joint, DensityKind::ZGivenUs),
            channel_rows,
            nz: ch.nz(),
            ns: ch.ns(),
        })
    }

    /// Samples `(y, z)` for one transmitted symbol pair.
    #[inline]
    fn transmit(&self, x: u8, s: u8, u01: f64) -> (u8, u8) {
        let yz = self.channel_rows[x as usize * self.ns + s as usize].sample(u01);
        ((yz / self.nz) as u8, (yz % self.nz) as u8)
    }
}

/// Per-trial tallies: one flag per message block (`1..B-1`) and event kind.
#[derive(Debug, Clone, Default)]
pub struct TrialOutcome {
    /// Relay failed to uniquely decode `t_i`.
    pub e2: Vec<bool>,
    /// Receiver failed to uniquely decode the forwarded cell index.
    pub e1a: Vec<bool>,
    /// Receiver failed to uniquely decode `t_i`.
    pub e1b: Vec<bool>,
    /// Receiver failed to uniquely decode `(j_i, l_i)`.
    pub e1c: Vec<bool>,
    /// Eavesdropper-side estimator missed `j_i`.
    pub e_tau: Vec<bool>,
    /// `(s, x, z)` fell outside the low-surprisal window.
    pub eb_zxs: Vec<bool>,
    /// `(s, u, z)` fell outside the high-surprisal window.
    pub eb_zus: Vec<bool>,
}

impl TrialOutcome {
    fn with_blocks(m: usize) -> Self {
        Self {
            e2: vec![false; m],
            e1a: vec![false; m],
            e1b: vec![false; m],
            e1c: vec![false; m],
            e_tau: vec![false; m],
            eb_zxs: vec![false; m],
            eb_zus: vec![false; m],
        }
    }

    pub fn relay_failed(&self) -> bool {
        self.e2.iter().any(|&b| b)
    }

    pub fn receiver_failed(&self) -> bool {
        self.e1a.iter().chain(&self.e1b).chain(&self.e1c).any(|&b| b)
    }
}

/// Scans `candidates`, accumulating each candidate's sequence density via
/// `density`, and returns the declared index: `Some(c)` iff exactly one
/// candidate clears `threshold`.
fn unique_above<F: Real>(
    candidates: usize,
    threshold: F,
    mut density: impl FnMut(usize) -> F,
) -> Option<usize> {
    let mut passer = None;
    for c in 0..candidates {
        if density(c) > threshold {
            if passer.is_some() {
                return None;
            }
            passer = Some(c);
        }
    }
    passer
}

/// Sums per-symbol densities of a candidate codeword against an observed
/// sequence, bailing out once the sum is `-inf`.
#[inline]
fn seq_density_2<F: Real>(table: &DensityTable<F>, a: &[u8], b: &[u8]) -> F {
    let mut sum = F::zero();
    for (&ai, &bi) in a.iter().zip(b) {
        sum = sum + table.per_symbol(&[ai as usize, bi as usize]);
        if sum == F::neg_infinity() {
            return sum;
        }
    }
    sum
}

#[inline]
fn seq_density_3<F: Real>(table: &DensityTable<F>, a: &[u8], b: &[u8], c: &[u8]) -> F {
    let mut sum = F::zero();
    for i in 0..a.len() {
        sum = sum + table.per_symbol(&[a[i] as usize, b[i] as usize, c[i] as usize]);
        if sum == F::neg_infinity() {
            return sum;
        }
    }
    sum
}

#[inline]
fn seq_density_4<F: Real>(table: &DensityTable<F>, a: &[u8], b: &[u8], c: &[u8], d: &[u8]) -> F {
    let mut sum = F::zero();
    for i in 0..a.len() {
        sum = sum
            + table.per_symbol(&[a[i] as usize, b[i] as usize, c[i] as usize, d[i] as usize]);
        if sum == F::neg_infinity() {
            return sum;
        }
    }
    sum
}

/// Runs one trial of `B` blocks and records every per-block event.
///
/// The relay's forwarded cell index at block `i` comes from its own decoded
/// `t_{i-1}` (decoding errors propagate) unless `genie_relay` is set. The
/// receiver's chain likewise reuses its own decoded cell indices; on a
/// failed unique-decode it falls back to index 0, with the failure already
/// recorded.
pub fn run_block_trial<F: Real>(
    cfg: &SimConfig<F>,
    codebook: &Codebook,
    tables: &SimTables<F>,
    trial: usize,
) -> TrialOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial as u64 + 1);

    let b = cfg.blocks;
    let n = cfg.n;
    let nf = F::from_usize(n).unwrap();
    let sizes = codebook.sizes;
    let (nw, nt, nj, nl) = (sizes.w as usize, sizes.t as usize, sizes.j as usize, sizes.l as usize);
    let mut outcome = TrialOutcome::with_blocks(b - 1);

    // messages: blocks 0 and B constant, 1..B-1 uniform
    let mut t_msg = vec![0usize; b + 1];
    let mut j_msg = vec![0usize; b + 1];
    let mut l_msg = vec![0usize; b + 1];
    for i in 1..b {
        t_msg[i] = rng.random_range(0..nt as u64) as usize;
        j_msg[i] = rng.random_range(0..nj as u64) as usize;
        l_msg[i] = rng.random_range(0..nl as u64) as usize;
    }

    let eps = cfg.epsilon;
    let thr_2 = nf * (cfg.rates.r0 + eps);
    let thr_1a = nf * (cfg.rates.r + eps);
    let thr_1b = nf * (cfg.rates.r0 + eps - cfg.rates.r);
    let thr_1c = nf * (cfg.rates.r1 + cfg.rates.r2 + eps);
    let thr_tau = nf * (cfg.rates.r2 + eps);
    let thr_zxs = nf * (tables.info.h_z_given_xs - eps);
    let thr_zus = nf * (tables.info.h_z_given_us + eps);

    // chain state
    let mut relay_t_prev = t_msg[0];
    let mut rx_w_prev = codebook.cell_of(t_msg[0]);
    let mut y_prev: Vec<u8> = Vec::new();
    let mut y_cur = vec![0u8; n];
    let mut z_cur = vec![0u8; n];

    for i in 1..=b {
        let w_true = codebook.cell_of(t_msg[i - 1]);
        let relay_w = if cfg.genie_relay { w_true } else { codebook.cell_of(relay_t_prev) };
        let x_word = codebook.x_word(w_true, t_msg[i], j_msg[i], l_msg[i]);
        let s_sent = codebook.s_word(relay_w);
        for k in 0..n {
            let (y, z) = tables.transmit(x_word[k], s_sent[k], rng.random::<f64>());
            y_cur[k] = y;
            z_cur[k] = z;
        }

        // relay decodes t_i (needed to forward the next cell index)
        if i <= b - 1 {
            let s_relay = codebook.s_word(relay_w);
            let decided = unique_above(nt, thr_2, |t| {
                seq_density_3(&tables.d_uz_s, codebook.u_word(relay_w, t), &z_cur, s_relay)
            });
            outcome.e2[i - 1] = decided != Some(t_msg[i]);
            relay_t_prev = decided.unwrap_or(0);
        }

        // receiver: at the end of block i >= 2, decode the forwarded cell
        // index of block i, then the previous block's messages
        if i >= 2 {
            let m = i - 2; // message index i-1, zero-based
            let w_i_true = codebook.cell_of(t_msg[i - 1]);
            let decided_w = unique_above(nw, thr_1a, |w| {
                seq_density_2(&tables.d_sy, codebook.s_word(w), &y_cur)
            });
            outcome.e1a[m] = decided_w != Some(w_i_true);
            let w_hat = decided_w.unwrap_or(0);

            let s_prev = codebook.s_word(rx_w_prev);
            let decided_t = unique_above(nt, thr_1b, |t| {
                if codebook.cell_of(t) != w_hat {
                    return F::neg_infinity();
                }
                seq_density_3(&tables.d_uy_s, codebook.u_word(rx_w_prev, t), &y_prev, s_prev)
            });
            outcome.e1b[m] = decided_t != Some(t_msg[i - 1]);
            let t_hat = decided_t.unwrap_or(0);

            let u_prev = codebook.u_word(rx_w_prev, t_hat);
            let decided_jl = unique_above(nj * nl, thr_1c, |jl| {
                let xw = codebook.x_word(rx_w_prev, t_hat, jl / nl, jl % nl);
                seq_density_4(&tables.d_xy_us, xw, &y_prev, u_prev, s_prev)
            });
            outcome.e1c[m] = decided_jl != Some(j_msg[i - 1] * nl + l_msg[i - 1]);

            rx_w_prev = w_hat;
        }

        // eavesdropper-side estimator and surprisal windows, at the true
        // codeword context of this block
        if i <= b - 1 {
            let m = i - 1;
            let s_true = codebook.s_word(w_true);
            let u_true = codebook.u_word(w_true, t_msg[i]);
            let decided_j = unique_above(nj, thr_tau, |j| {
                let xw = codebook.x_word(w_true, t_msg[i], j, l_msg[i]);
                seq_density_4(&tables.d_xz_us, xw, &z_cur, u_true, s_true)
            });
            outcome.e_tau[m] = decided_j != Some(j_msg[i]);

            let mut zxs = F::zero();
            let mut zus = F::zero();
            for k in 0..n {
                zxs = zxs
                    + tables.d_z_xs.per_symbol(&[
                        z_cur[k] as usize,
                        x_word[k] as usize,
                        s_true[k] as usize,
                    ]);
                zus = zus
                    + tables.d_z_us.per_symbol(&[
                        z_cur[k] as usize,
                        u_true[k] as usize,
                        s_true[k] as usize,
                    ]);
            }
            outcome.eb_zxs[m] = !(zxs >= thr_zxs);
            outcome.eb_zus[m] = !(zus <= thr_zus);
        }

        std::mem::swap(&mut y_prev, &mut y_cur);
        if y_cur.len() != n {
            y_cur = vec![0u8; n];
        }
    }
    outcome
}

/// Empirical per-block failure rates of the eavesdropper-side estimator.
pub fn eavesdropper_estimate(outcomes: &[TrialOutcome]) -> Vec<f64> {
    if outcomes.is_empty() {
        return Vec::new();
    }
    let m = outcomes[0].e_tau.len();
    let mut rates = vec![0.0; m];
    for o in outcomes {
        for (r, &flag) in rates.iter_mut().zip(&o.e_tau) {
            if flag {
                *r += 1.0;
            }
        }
    }
    for r in rates.iter_mut() {
        *r /= outcomes.len() as f64;
    }
    rates
}

/// Aggregated simulation report.
///
/// Arrays hold one empirical rate per message block (`1..B-1`). The
/// equivocation lower bound per block is
/// `r1 + r2 - I(X;Z|US) - 2e - (3 + log2 e)/n - r2*e_tau - log2|Z|*(eb_zus + eb_zxs)`;
/// `equiv_lower` is the across-block mean clamped at zero (the raw mean and
/// the `(1 - 1/B)`-scaled variant are reported alongside), and
/// `equiv_target` is the scheme's target `I(X;Y|US) - I(X;Z|US)`.
#[derive(Debug, Clone, Serialize)]
pub struct SimReport {
    pub e2: Vec<f64>,
    pub e1a: Vec<f64>,
    pub e1b: Vec<f64>,
    pub e1c: Vec<f64>,
    pub e_tau: Vec<f64>,
    #[serde(rename = "eB_zxs")]
    pub eb_zxs: Vec<f64>,
    #[serde(rename = "eB_zus")]
    pub eb_zus: Vec<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub equiv_lower: f64,
    pub equiv_target: f64,
    pub n: usize,
    #[serde(rename = "B")]
    pub blocks: usize,
    pub trials: usize,
    pub seed: u64,
    pub equiv_lower_raw: f64,
    pub equiv_lower_blocks: Vec<f64>,
    pub equiv_lower_b_avg: f64,
    pub rates: SimRates<f64>,
    pub epsilon: f64,
    pub sizes: CodebookSizes,
    pub i_x_z_given_us: f64,
}

/// Assembles the report from per-trial outcomes.
pub fn equivocation_report<F: Real>(
    cfg: &SimConfig<F>,
    info: &SingleLetterInfo<F>,
    outcomes: &[TrialOutcome],
) -> SimReport {
    let m = cfg.blocks - 1;
    let trials = outcomes.len().max(1) as f64;
    let mean_of = |select: fn(&TrialOutcome) -> &Vec<bool>| -> Vec<f64> {
        let mut rates = vec![0.0; m];
        for o in outcomes {
            for (r, &flag) in rates.iter_mut().zip(select(o)) {
                if flag {
                    *r += 1.0;
                }
            }
        }
        for r in rates.iter_mut() {
            *r /= trials;
        }
        rates
    };
    let e2 = mean_of(|o| &o.e2);
    let e1a = mean_of(|o| &o.e1a);
    let e1b = mean_of(|o| &o.e1b);
    let e1c = mean_of(|o| &o.e1c);
    let e_tau = mean_of(|o| &o.e_tau);
    let eb_zxs = mean_of(|o| &o.eb_zxs);
    let eb_zus = mean_of(|o| &o.eb_zus);
    let lambda1 = outcomes.iter().filter(|o| o.receiver_failed()).count() as f64 / trials;
    let lambda2 = outcomes.iter().filter(|o| o.relay_failed()).count() as f64 / trials;

    let f = |v: F| v.to_f64().unwrap_or(f64::NAN);
    let (r1, r2) = (f(cfg.rates.r1), f(cfg.rates.r2));
    let i_xz = f(info.i_x_z_given_us);
    let eps = f(cfg.epsilon);
    let n = cfg.n as f64;
    let log_z = (cfg.channel.nz() as f64).log2();
    let base = r1 + r2 - i_xz - 2.0 * eps - (3.0 + std::f64::consts::LOG2_E) / n;
    let equiv_lower_blocks: Vec<f64> = (0..m)
        .map(|k| base - r2 * e_tau[k] - log_z * (eb_zus[k] + eb_zxs[k]))
        .collect();
    let equiv_lower_raw = equiv_lower_blocks.iter().sum::<f64>() / m as f64;
    let equiv_lower_b_avg = equiv_lower_raw * (1.0 - 1.0 / cfg.blocks as f64);

    SimReport {
        e2,
        e1a,
        e1b,
        e1c,
        e_tau,
        eb_zxs,
        eb_zus,
        lambda1,
        lambda2,
        equiv_lower: equiv_lower_raw.max(0.0),
        equiv_target: f(info.i_x_y_given_us) - i_xz,
        n: cfg.n,
        blocks: cfg.blocks,
        trials: outcomes.len(),
        seed: cfg.seed,
        equiv_lower_raw,
        equiv_lower_blocks,
        equiv_lower_b_avg,
        rates: SimRates { r0: f(cfg.rates.r0), r: f(cfg.rates.r), r1, r2 },
        epsilon: eps,
        sizes: cfg.sizes(),
        i_x_z_given_us: i_xz,
    }
}

/// Builds the codebook, runs all trials (in parallel, with per-trial seed
/// streams), and aggregates the report. Identical seeds give identical
/// reports at any worker count.
pub fn run_simulation<F: Real>(cfg: &SimConfig<F>) -> Result<SimReport, SimError> {
    let codebook = build_codebook(cfg)?;
    let tables = SimTables::new(cfg)?;
    let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_block_trial(cfg, &codebook, &tables, trial))
        .collect();
    Ok(equivocation_report(cfg, &tables.info, &outcomes))
}
