//! Finite probability objects: relay channel tensors, auxiliary input
//! distributions, joint distributions, and channel-class decision procedures.
//!
//! A relay channel is a stochastic tensor `gamma(y,z|x,s)`: the sender puts
//! `x` on the channel, the relay puts `s`, the receiver observes `y` and the
//! relay observes `z`. Auxiliary inputs attach a distribution over `(u,s,x)`
//! (or `(u,v,s,x)` with a second auxiliary) in front of the channel; the
//! resulting joint over all variables is what the information measures and
//! region bounds are evaluated on.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{real, Real};

/// Tolerance applied to probability normalization checks.
pub const PROB_SUM_TOL: f64 = 1e-12;
/// Default tolerance for channel classification residuals.
pub const CLASSIFY_TOL: f64 = 1e-9;
/// Joints larger than this many entries are rejected.
pub const MAX_JOINT_ENTRIES: usize = 100_000_000;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ProbError {
    #[error("negative entry {value:e} at index {index:?}")]
    NegativeEntry { index: Vec<usize>, value: f64 },
    #[error("row (x={x}, s={s}) sums to {sum} (deviation {deviation:e} exceeds tolerance {tol:e})")]
    RowSumMismatch {
        x: usize,
        s: usize,
        sum: f64,
        deviation: f64,
        tol: f64,
    },
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("distribution sums to {sum} (deviation {deviation:e} exceeds tolerance {tol:e})")]
    NotNormalized { sum: f64, deviation: f64, tol: f64 },
    #[error("stochastic row {row} of {what} sums to {sum}")]
    RowNotStochastic { what: String, row: usize, sum: f64 },
}

/// Discrete memoryless relay channel `gamma(y,z|x,s)` over finite alphabets.
///
/// Stored as a flat tensor indexed `(x, s, y, z)` row-major; every `(x,s)`
/// row is a probability vector over `(y,z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayChannel<F> {
    nx: usize,
    ns: usize,
    ny: usize,
    nz: usize,
    gamma: Vec<F>,
}

impl<F: Real> RelayChannel<F> {
    /// Validates and wraps a channel tensor.
    ///
    /// `gamma` must have `nx*ns*ny*nz` entries indexed `(x,s,y,z)` row-major,
    /// all nonnegative, with every `(x,s)` row summing to 1 within
    /// [`PROB_SUM_TOL`].
    pub fn from_tensor(
        nx: usize,
        ns: usize,
        ny: usize,
        nz: usize,
        gamma: Vec<F>,
    ) -> Result<Self, ProbError> {
        if nx == 0 || ns == 0 || ny == 0 || nz == 0 {
            return Err(ProbError::SizeMismatch("alphabet sizes must be positive".into()));
        }
        if gamma.len() != nx * ns * ny * nz {
            return Err(ProbError::SizeMismatch(format!(
                "tensor has {} entries, expected {}*{}*{}*{} = {}",
                gamma.len(),
                nx,
                ns,
                ny,
                nz,
                nx * ns * ny * nz
            )));
        }
        let tol = real::<F>(PROB_SUM_TOL);
        let mut worst: Option<(usize, usize, F, F)> = None;
        for x in 0..nx {
            for s in 0..ns {
                let mut sum = F::zero();
                for y in 0..ny {
                    for z in 0..nz {
                        let v = gamma[((x * ns + s) * ny + y) * nz + z];
                        if v < F::zero() {
                            return Err(ProbError::NegativeEntry {
                                index: vec![x, s, y, z],
                                value: v.to_f64().unwrap_or(f64::NAN),
                            });
                        }
                        sum = sum + v;
                    }
                }
                let dev = (sum - F::one()).abs();
                if worst.map_or(true, |(_, _, _, d)| dev > d) {
                    worst = Some((x, s, sum, dev));
                }
            }
        }
        if let Some((x, s, sum, dev)) = worst {
            if dev > tol {
                return Err(ProbError::RowSumMismatch {
                    x,
                    s,
                    sum: sum.to_f64().unwrap_or(f64::NAN),
                    deviation: dev.to_f64().unwrap_or(f64::NAN),
                    tol: PROB_SUM_TOL,
                });
            }
        }
        Ok(Self { nx, ns, ny, nz, gamma })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ns(&self) -> usize {
        self.ns
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn nz(&self) -> usize {
        self.nz
    }

    /// `gamma(y,z|x,s)`.
    #[inline]
    pub fn gamma(&self, x: usize, s: usize, y: usize, z: usize) -> F {
        self.gamma[((x * self.ns + s) * self.ny + y) * self.nz + z]
    }

    /// Raw tensor in `(x,s,y,z)` row-major order.
    pub fn tensor(&self) -> &[F] {
        &self.gamma
    }

    /// Marginal `gamma_Y(y|x,s)`.
    pub fn y_marginal(&self, x: usize, s: usize, y: usize) -> F {
        (0..self.nz).map(|z| self.gamma(x, s, y, z)).sum()
    }

    /// Marginal `gamma_Z(z|x,s)`.
    pub fn z_marginal(&self, x: usize, s: usize, z: usize) -> F {
        (0..self.ny).map(|y| self.gamma(x, s, y, z)).sum()
    }

    /// Classifies the channel against the four structural classes.
    ///
    /// Each flag is decided by a residual:
    ///
    /// * `degraded` — the conditional of `y` given `(z,x,s)` must not depend
    ///   on `x`, i.e. `gamma(y,z|x,s)/gamma_Z(z|x,s)` is constant in `x`
    ///   wherever `gamma_Z > 0` (Markov chain `X -> SZ -> Y`);
    /// * `reversely_degraded` — symmetric with the roles of `y` and `z`
    ///   swapped (`X -> SY -> Z`);
    /// * `semi_deterministic` — for each `(x,s)` the `z`-marginal is a point
    ///   mass;
    /// * `class_nl` — `gamma_Z(z|x,s)` does not depend on `s` (the relay
    ///   input cannot influence what the relay hears: `S -> X -> Z`).
    ///
    /// The residual is the maximum spread observed; a flag is set when its
    /// residual is `<= tol`. Rows of probability zero are skipped, so the
    /// predicate is monotone in `tol`.
    pub fn classify(&self, tol: F) -> ClassificationReport<F> {
        let mut res_deg = F::zero();
        let mut res_rev = F::zero();
        // degraded: spread over x of gamma(y,z|x,s)/gamma_Z(z|x,s)
        for s in 0..self.ns {
            for y in 0..self.ny {
                for z in 0..self.nz {
                    let mut lo = F::infinity();
                    let mut hi = F::neg_infinity();
                    for x in 0..self.nx {
                        let den = self.z_marginal(x, s, z);
                        if den > F::zero() {
                            let r = self.gamma(x, s, y, z) / den;
                            lo = lo.min(r);
                            hi = hi.max(r);
                        }
                    }
                    if hi > lo {
                        res_deg = res_deg.max(hi - lo);
                    }
                    // reversely degraded: spread of gamma / gamma_Y
                    let mut lo = F::infinity();
                    let mut hi = F::neg_infinity();
                    for x in 0..self.nx {
                        let den = self.y_marginal(x, s, y);
                        if den > F::zero() {
                            let r = self.gamma(x, s, y, z) / den;
                            lo = lo.min(r);
                            hi = hi.max(r);
                        }
                    }
                    if hi > lo {
                        res_rev = res_rev.max(hi - lo);
                    }
                }
            }
        }
        // semi-deterministic: 1 - max_z gamma_Z(z|x,s) over all (x,s)
        let mut res_semi = F::zero();
        for x in 0..self.nx {
            for s in 0..self.ns {
                let mut top = F::zero();
                for z in 0..self.nz {
                    top = top.max(self.z_marginal(x, s, z));
                }
                res_semi = res_semi.max(F::one() - top);
            }
        }
        // class NL: spread over s of gamma_Z(z|x,s)
        let mut res_nl = F::zero();
        for x in 0..self.nx {
            for z in 0..self.nz {
                let mut lo = F::infinity();
                let mut hi = F::neg_infinity();
                for s in 0..self.ns {
                    let m = self.z_marginal(x, s, z);
                    lo = lo.min(m);
                    hi = hi.max(m);
                }
                if hi > lo {
                    res_nl = res_nl.max(hi - lo);
                }
            }
        }
        ClassificationReport {
            reversely_degraded: res_rev <= tol,
            degraded: res_deg <= tol,
            semi_deterministic: res_semi <= tol,
            class_nl: res_nl <= tol,
            residual_reversely_degraded: res_rev,
            residual_degraded: res_deg,
            residual_semi_deterministic: res_semi,
            residual_class_nl: res_nl,
            tol,
        }
    }
}

/// Result of [`RelayChannel::classify`]: one flag and one residual per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport<F> {
    pub reversely_degraded: bool,
    pub degraded: bool,
    pub semi_deterministic: bool,
    pub class_nl: bool,
    pub residual_reversely_degraded: F,
    pub residual_degraded: F,
    pub residual_semi_deterministic: F,
    pub residual_class_nl: F,
    pub tol: F,
}

/// Joint distribution over `(u,s,x)` parameterizing a region point.
///
/// The channel is applied after `(u,s,x)`, so the chain `U -> XS -> YZ`
/// holds by construction for every joint built from an `AuxInput`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxInput<F> {
    nu: usize,
    ns: usize,
    nx: usize,
    /// `p(u,s,x)` indexed `(u,s,x)` row-major.
    p: Vec<F>,
}

impl<F: Real> AuxInput<F> {
    pub fn new(nu: usize, ns: usize, nx: usize, p: Vec<F>) -> Result<Self, ProbError> {
        if nu == 0 || ns == 0 || nx == 0 {
            return Err(ProbError::SizeMismatch("alphabet sizes must be positive".into()));
        }
        if p.len() != nu * ns * nx {
            return Err(ProbError::SizeMismatch(format!(
                "input tensor has {} entries, expected {}*{}*{} = {}",
                p.len(),
                nu,
                ns,
                nx,
                nu * ns * nx
            )));
        }
        let mut sum = F::zero();
        for (i, &v) in p.iter().enumerate() {
            if v < F::zero() {
                return Err(ProbError::NegativeEntry {
                    index: vec![i / (ns * nx), (i / nx) % ns, i % nx],
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
            sum = sum + v;
        }
        let dev = (sum - F::one()).abs();
        if dev > real(PROB_SUM_TOL) {
            return Err(ProbError::NotNormalized {
                sum: sum.to_f64().unwrap_or(f64::NAN),
                deviation: dev.to_f64().unwrap_or(f64::NAN),
                tol: PROB_SUM_TOL,
            });
        }
        Ok(Self { nu, ns, nx, p })
    }

    /// Uniform distribution over `(u,s,x)`.
    pub fn uniform(nu: usize, ns: usize, nx: usize) -> Self {
        let total = nu * ns * nx;
        let w = F::one() / F::from_usize(total).unwrap();
        Self { nu, ns, nx, p: vec![w; total] }
    }

    pub fn nu(&self) -> usize {
        self.nu
    }
    pub fn ns(&self) -> usize {
        self.ns
    }
    pub fn nx(&self) -> usize {
        self.nx
    }

    #[inline]
    pub fn prob(&self, u: usize, s: usize, x: usize) -> F {
        self.p[(u * self.ns + s) * self.nx + x]
    }

    pub fn tensor(&self) -> &[F] {
        &self.p
    }

    /// Whether the auxiliary alphabet honors the single-auxiliary cardinality
    /// cap `|U| <= |X||S| + 3`.
    pub fn fits_single_aux_cap(&self) -> bool {
        self.nu <= self.nx * self.ns + 3
    }

    /// Whether it honors the extended cap `|U| <= |Z||X||S| + 3` used by the
    /// refined outer bounds.
    pub fn fits_extended_aux_cap(&self, nz: usize) -> bool {
        self.nu <= nz * self.nx * self.ns + 3
    }

    /// Factors `p(u,s,x)` into `p(s)`, `p(u|s)`, `p(x|u,s)`.
    ///
    /// Rows conditioned on zero-probability events are set to uniform; they
    /// are never sampled.
    pub fn factorize(&self) -> InputFactors<F> {
        let (nu, ns, nx) = (self.nu, self.ns, self.nx);
        let mut p_s = vec![F::zero(); ns];
        let mut p_us = vec![F::zero(); nu * ns];
        for u in 0..nu {
            for s in 0..ns {
                for x in 0..nx {
                    let v = self.prob(u, s, x);
                    p_s[s] = p_s[s] + v;
                    p_us[u * ns + s] = p_us[u * ns + s] + v;
                }
            }
        }
        let unif_u = F::one() / F::from_usize(nu).unwrap();
        let unif_x = F::one() / F::from_usize(nx).unwrap();
        let mut p_u_given_s = vec![unif_u; nu * ns];
        let mut p_x_given_us = vec![unif_x; nu * ns * nx];
        for s in 0..ns {
            if p_s[s] > F::zero() {
                for u in 0..nu {
                    p_u_given_s[s * nu + u] = p_us[u * ns + s] / p_s[s];
                }
            }
        }
        for u in 0..nu {
            for s in 0..ns {
                let mass = p_us[u * ns + s];
                if mass > F::zero() {
                    for x in 0..nx {
                        p_x_given_us[(u * ns + s) * nx + x] = self.prob(u, s, x) / mass;
                    }
                }
            }
        }
        InputFactors { nu, ns, nx, p_s, p_u_given_s, p_x_given_us }
    }
}

/// `p(s)`, `p(u|s)`, `p(x|u,s)` factors of an [`AuxInput`].
#[derive(Debug, Clone)]
pub struct InputFactors<F> {
    pub nu: usize,
    pub ns: usize,
    pub nx: usize,
    /// `p(s)`
    pub p_s: Vec<F>,
    /// `p(u|s)` indexed `s*nu + u`
    pub p_u_given_s: Vec<F>,
    /// `p(x|u,s)` indexed `(u*ns + s)*nx + x`
    pub p_x_given_us: Vec<F>,
}

/// Joint distribution over `(u,v,s)` plus a stochastic map `V -> X`.
///
/// The factorization `p(u,v,s,x) = p(u,v,s) * p(x|v)` enforces the chain
/// `US -> V -> X` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxInputV<F> {
    nu: usize,
    nv: usize,
    ns: usize,
    nx: usize,
    /// `p(u,v,s)` indexed `(u,v,s)` row-major.
    p_uvs: Vec<F>,
    /// `p(x|v)` indexed `v*nx + x`, rows stochastic.
    p_x_given_v: Vec<F>,
}

impl<F: Real> AuxInputV<F> {
    pub fn new(
        nu: usize,
        nv: usize,
        ns: usize,
        nx: usize,
        p_uvs: Vec<F>,
        p_x_given_v: Vec<F>,
    ) -> Result<Self, ProbError> {
        if nu == 0 || nv == 0 || ns == 0 || nx == 0 {
            return Err(ProbError::SizeMismatch("alphabet sizes must be positive".into()));
        }
        if p_uvs.len() != nu * nv * ns {
            return Err(ProbError::SizeMismatch(format!(
                "p(u,v,s) has {} entries, expected {}",
                p_uvs.len(),
                nu * nv * ns
            )));
        }
        if p_x_given_v.len() != nv * nx {
            return Err(ProbError::SizeMismatch(format!(
                "p(x|v) has {} entries, expected {}",
                p_x_given_v.len(),
                nv * nx
            )));
        }
        let mut sum = F::zero();
        for &v in &p_uvs {
            if v < F::zero() {
                return Err(ProbError::NegativeEntry { index: vec![], value: v.to_f64().unwrap_or(f64::NAN) });
            }
            sum = sum + v;
        }
        let dev = (sum - F::one()).abs();
        if dev > real(PROB_SUM_TOL) {
            return Err(ProbError::NotNormalized {
                sum: sum.to_f64().unwrap_or(f64::NAN),
                deviation: dev.to_f64().unwrap_or(f64::NAN),
                tol: PROB_SUM_TOL,
            });
        }
        for v in 0..nv {
            let mut row = F::zero();
            for x in 0..nx {
                let e = p_x_given_v[v * nx + x];
                if e < F::zero() {
                    return Err(ProbError::NegativeEntry { index: vec![v, x], value: e.to_f64().unwrap_or(f64::NAN) });
                }
                row = row + e;
            }
            if (row - F::one()).abs() > real(PROB_SUM_TOL) {
                return Err(ProbError::RowNotStochastic {
                    what: "p(x|v)".into(),
                    row: v,
                    sum: row.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(Self { nu, nv, ns, nx, p_uvs, p_x_given_v })
    }

    pub fn nu(&self) -> usize {
        self.nu
    }
    pub fn nv(&self) -> usize {
        self.nv
    }
    pub fn ns(&self) -> usize {
        self.ns
    }
    pub fn nx(&self) -> usize {
        self.nx
    }

    #[inline]
    pub fn prob_uvs(&self, u: usize, v: usize, s: usize) -> F {
        self.p_uvs[(u * self.nv + v) * self.ns + s]
    }

    #[inline]
    pub fn prob_x_given_v(&self, v: usize, x: usize) -> F {
        self.p_x_given_v[v * self.nx + x]
    }

    /// `p(u,v,s,x) = p(u,v,s) * p(x|v)`.
    #[inline]
    pub fn prob(&self, u: usize, v: usize, s: usize, x: usize) -> F {
        self.prob_uvs(u, v, s) * self.prob_x_given_v(v, x)
    }

    /// Caps for the two-auxiliary inner class:
    /// `|U| <= |X||S| + 3`, `|V| <= (|X||S|)^2 + 4|X||S| + 3`.
    pub fn fits_double_aux_cap(&self) -> bool {
        let k = self.nx * self.ns;
        self.nu <= k + 3 && self.nv <= k * k + 4 * k + 3
    }

    /// Embeds a plain input by taking `V = X` (identity map `p(x|v)`).
    pub fn from_aux_input_v_eq_x(input: &AuxInput<F>) -> Self {
        let (nu, ns, nx) = (input.nu, input.ns, input.nx);
        let nv = nx;
        let mut p_uvs = vec![F::zero(); nu * nv * ns];
        for u in 0..nu {
            for s in 0..ns {
                for x in 0..nx {
                    p_uvs[(u * nv + x) * ns + s] = input.prob(u, s, x);
                }
            }
        }
        let mut p_x_given_v = vec![F::zero(); nv * nx];
        for v in 0..nv {
            p_x_given_v[v * nx + v] = F::one();
        }
        Self { nu, nv, ns, nx, p_uvs, p_x_given_v }
    }
}

/// Full joint distribution `p(u,v,s,x,y,z)` with cached single-axis
/// marginals.
///
/// The `v` axis always exists; joints built from a plain [`AuxInput`] carry
/// `|V| = 1` and report `has_v() == false`. Immutable after construction.
#[derive(Debug, Clone)]
pub struct JointDist<F> {
    dims: [usize; 6],
    p: Vec<F>,
    has_v: bool,
    /// Cached marginals `p(u)`, `p(v)`, `p(s)`, `p(x)`, `p(y)`, `p(z)`.
    axis_marginals: [Vec<F>; 6],
}

impl<F: Real> JointDist<F> {
    fn build(dims: [usize; 6], p: Vec<F>, has_v: bool) -> Result<Self, ProbError> {
        let total: F = p.iter().copied().sum();
        let dev = (total - F::one()).abs();
        if dev > real(1e-11) {
            return Err(ProbError::NotNormalized {
                sum: total.to_f64().unwrap_or(f64::NAN),
                deviation: dev.to_f64().unwrap_or(f64::NAN),
                tol: 1e-11,
            });
        }
        let mut axis_marginals: [Vec<F>; 6] = [
            vec![F::zero(); dims[0]],
            vec![F::zero(); dims[1]],
            vec![F::zero(); dims[2]],
            vec![F::zero(); dims[3]],
            vec![F::zero(); dims[4]],
            vec![F::zero(); dims[5]],
        ];
        let mut idx = [0usize; 6];
        for &mass in &p {
            for a in 0..6 {
                axis_marginals[a][idx[a]] = axis_marginals[a][idx[a]] + mass;
            }
            // increment mixed-radix counter
            for a in (0..6).rev() {
                idx[a] += 1;
                if idx[a] < dims[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        Ok(Self { dims, p, has_v, axis_marginals })
    }

    /// `[|U|, |V|, |S|, |X|, |Y|, |Z|]`.
    pub fn dims(&self) -> [usize; 6] {
        self.dims
    }

    /// Whether the joint was built with a second auxiliary variable.
    pub fn has_v(&self) -> bool {
        self.has_v
    }

    #[inline]
    pub fn prob(&self, u: usize, v: usize, s: usize, x: usize, y: usize, z: usize) -> F {
        let d = &self.dims;
        self.p[((((u * d[1] + v) * d[2] + s) * d[3] + x) * d[4] + y) * d[5] + z]
    }

    pub fn flat(&self) -> &[F] {
        &self.p
    }

    /// Cached marginal of a single axis.
    pub fn axis_marginal(&self, axis: usize) -> &[F] {
        &self.axis_marginals[axis]
    }
}

/// Builds the joint `p(u,s,x) * gamma(y,z|x,s)` over `(u,1,s,x,y,z)`.
pub fn make_joint<F: Real>(
    channel: &RelayChannel<F>,
    input: &AuxInput<F>,
) -> Result<JointDist<F>, ProbError> {
    if input.ns() != channel.ns() || input.nx() != channel.nx() {
        return Err(ProbError::SizeMismatch(format!(
            "input is over |S|={}, |X|={} but channel expects |S|={}, |X|={}",
            input.ns(),
            input.nx(),
            channel.ns(),
            channel.nx()
        )));
    }
    let dims = [input.nu(), 1, input.ns(), input.nx(), channel.ny(), channel.nz()];
    let total: usize = dims.iter().product();
    if total > MAX_JOINT_ENTRIES {
        return Err(ProbError::SizeMismatch(format!(
            "joint would have {total} entries, above the {MAX_JOINT_ENTRIES} cap"
        )));
    }
    let mut p = Vec::with_capacity(total);
    for u in 0..dims[0] {
        for s in 0..dims[2] {
            for x in 0..dims[3] {
                let base = input.prob(u, s, x);
                for y in 0..dims[4] {
                    for z in 0..dims[5] {
                        p.push(base * channel.gamma(x, s, y, z));
                    }
                }
            }
        }
    }
    JointDist::build(dims, p, false)
}

/// Builds the joint `p(u,v,s) p(x|v) gamma(y,z|x,s)` over `(u,v,s,x,y,z)`.
pub fn make_joint_v<F: Real>(
    channel: &RelayChannel<F>,
    input: &AuxInputV<F>,
) -> Result<JointDist<F>, ProbError> {
    if input.ns() != channel.ns() || input.nx() != channel.nx() {
        return Err(ProbError::SizeMismatch(format!(
            "input is over |S|={}, |X|={} but channel expects |S|={}, |X|={}",
            input.ns(),
            input.nx(),
            channel.ns(),
            channel.nx()
        )));
    }
    let dims = [input.nu(), input.nv(), input.ns(), input.nx(), channel.ny(), channel.nz()];
    let total: usize = dims.iter().product();
    if total > MAX_JOINT_ENTRIES {
        return Err(ProbError::SizeMismatch(format!(
            "joint would have {total} entries, above the {MAX_JOINT_ENTRIES} cap"
        )));
    }
    let mut p = Vec::with_capacity(total);
    for u in 0..dims[0] {
        for v in 0..dims[1] {
            for s in 0..dims[2] {
                for x in 0..dims[3] {
                    let base = input.prob(u, v, s, x);
                    for y in 0..dims[4] {
                        for z in 0..dims[5] {
                            p.push(base * channel.gamma(x, s, y, z));
                        }
                    }
                }
            }
        }
    }
    JointDist::build(dims, p, true)
}
