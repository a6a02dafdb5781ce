//! Closed-form rate-equivocation regions and secrecy capacities for the
//! additive-Gaussian relay channel with confidential messages.
//!
//! The channel is `Y = X + S + xi1`, `Z = X + xi2` with `(xi1, xi2)` zero
//! mean, variances `(N1, N2)` and correlation `rho`; inputs obey average
//! power constraints `P1` (sender) and `P2` (relay). Every bound is a
//! one- or two-parameter family in `(theta, eta) in [0,1]^2`, where `theta`
//! splits the sender power between the private and cooperative signal and
//! `eta` splits the cooperative correlation; all rate expressions are built
//! from `cap(x) = 0.5*log2(1+x)`.
//!
//! When `N1 <= N2` and `rho = sqrt(N1/N2)` the channel is reversely
//! degraded, the effective outer noise `n1_tilde` collapses onto `N1`, and
//! each inner/outer pair coincides.

use thiserror::Error;

use crate::{real, Real};

/// Tolerance for detecting the reversely degraded parameter line.
pub const REV_DEGRADED_TOL: f64 = 1e-12;
/// Membership slack tolerance.
pub const GAUSS_SLACK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GaussianError {
    #[error("cap() requires a nonnegative argument, got {0}")]
    NegativeArgument(f64),
    #[error("invalid Gaussian spec: {0}")]
    BadSpec(String),
    #[error("resolution must be >= 2, got {0}")]
    BadResolution(usize),
}

/// `cap(x) = 0.5 * log2(1 + x)` — the Gaussian rate function in bits.
pub fn cap<F: Real>(x: F) -> Result<F, GaussianError> {
    if x < F::zero() || !x.is_finite() {
        return Err(GaussianError::NegativeArgument(x.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(real::<F>(0.5) * (F::one() + x).log2())
}

fn cap_unchecked<F: Real>(x: F) -> F {
    real::<F>(0.5) * (F::one() + x.max(F::zero())).log2()
}

/// Parameters of the Gaussian relay channel and its power constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec<F> {
    pub p1: F,
    pub p2: F,
    pub n1: F,
    pub n2: F,
    pub rho: F,
}

impl<F: Real> GaussianSpec<F> {
    pub fn new(p1: F, p2: F, n1: F, n2: F, rho: F) -> Result<Self, GaussianError> {
        if !(p1.is_finite() && p1 >= F::zero()) || !(p2.is_finite() && p2 >= F::zero()) {
            return Err(GaussianError::BadSpec("powers P1, P2 must be finite and >= 0".into()));
        }
        if !(n1.is_finite() && n1 > F::zero()) || !(n2.is_finite() && n2 > F::zero()) {
            return Err(GaussianError::BadSpec("noise variances N1, N2 must be > 0".into()));
        }
        if !(rho.is_finite() && rho.abs() < F::one()) {
            return Err(GaussianError::BadSpec("correlation must satisfy |rho| < 1".into()));
        }
        Ok(Self { p1, p2, n1, n2, rho })
    }

    /// Effective receiver-side noise of the outer bounds:
    /// `(1 - rho^2) N1 N2 / (N1 + N2 - 2 rho sqrt(N1 N2))`.
    ///
    /// Always `<= N1`, with equality exactly on the reversely degraded line.
    pub fn n1_tilde(&self) -> F {
        let num = (F::one() - self.rho * self.rho) * self.n1 * self.n2;
        let den = self.n1 + self.n2 - real::<F>(2.0) * self.rho * (self.n1 * self.n2).sqrt();
        num / den
    }

    /// Whether `N1 <= N2` and `rho = sqrt(N1/N2)` within [`REV_DEGRADED_TOL`].
    pub fn reversely_degraded(&self) -> bool {
        self.n1 <= self.n2
            && (self.rho - (self.n1 / self.n2).sqrt()).abs() <= real(REV_DEGRADED_TOL)
    }

    /// `R0` right-hand side at `(theta, eta)`: `min{A, B}` with
    /// `A = cap((th' P1 + P2 + 2 sqrt(th' et' P1 P2)) / (th P1 + N1))` and
    /// `B = cap(th' et P1 / (th P1 + N2))` (primes denote `1 - `).
    pub fn r0_cap(&self, theta: F, eta: F) -> F {
        let tb = F::one() - theta;
        let eb = F::one() - eta;
        let a_num = tb * self.p1 + self.p2 + real::<F>(2.0) * (tb * eb * self.p1 * self.p2).sqrt();
        let a = cap_unchecked(a_num / (theta * self.p1 + self.n1));
        let b = cap_unchecked(tb * eta * self.p1 / (theta * self.p1 + self.n2));
        a.min(b)
    }

    /// `R0 + R1` cap of the outer bounds at `(theta, eta)`.
    pub fn sum_cap(&self, theta: F, eta: F) -> F {
        let tb = F::one() - theta;
        let eb = F::one() - eta;
        let num = self.p1 + self.p2 + real::<F>(2.0) * (tb * eb * self.p1 * self.p2).sqrt();
        cap_unchecked(num / self.n1)
    }

    /// Inner-bound `R1` cap `cap(theta P1 / N1)`.
    pub fn r1_cap_inner(&self, theta: F) -> F {
        cap_unchecked(theta * self.p1 / self.n1)
    }

    /// Outer-bound `R1` cap `cap(theta P1 / n1_tilde)`.
    pub fn r1_cap_outer(&self, theta: F) -> F {
        cap_unchecked(theta * self.p1 / self.n1_tilde())
    }

    /// Relay-side rate `cap(theta P1 / N2)` subtracted in every `Re` bound.
    pub fn relay_rate(&self, theta: F) -> F {
        cap_unchecked(theta * self.p1 / self.n2)
    }

    /// `max_eta min{A, B}` at fixed `theta`.
    pub fn r0_cap_max_eta(&self, theta: F, resolution: usize) -> (F, F) {
        maximize_on_unit(|eta| self.r0_cap(theta, eta), resolution)
    }
}

/// A `(theta, eta)` witness point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams<F> {
    pub theta: F,
    pub eta: F,
}

/// Identifier of one Gaussian region.
///
/// `gd-*`/`gs-*` are the full three-rate deterministic/stochastic regions;
/// `gd1e-*`/`gs1e-*` their no-common-message `(R1, Re)` cross-sections
/// (these ignore the `R0` component of a queried triple); `gcss-*` the
/// perfect-secrecy `(R0, R1)` cross-sections (these ignore `Re`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GaussianRegionId {
    GdIn,
    GdOut,
    GsIn,
    GsOut,
    Gd1eIn,
    Gd1eOut,
    Gs1eIn,
    Gs1eOut,
    GcssIn,
    GcssOut,
}

impl GaussianRegionId {
    pub const ALL: [GaussianRegionId; 10] = [
        GaussianRegionId::GdIn,
        GaussianRegionId::GdOut,
        GaussianRegionId::GsIn,
        GaussianRegionId::GsOut,
        GaussianRegionId::Gd1eIn,
        GaussianRegionId::Gd1eOut,
        GaussianRegionId::Gs1eIn,
        GaussianRegionId::Gs1eOut,
        GaussianRegionId::GcssIn,
        GaussianRegionId::GcssOut,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GaussianRegionId::GdIn => "gd-in",
            GaussianRegionId::GdOut => "gd-out",
            GaussianRegionId::GsIn => "gs-in",
            GaussianRegionId::GsOut => "gs-out",
            GaussianRegionId::Gd1eIn => "gd1e-in",
            GaussianRegionId::Gd1eOut => "gd1e-out",
            GaussianRegionId::Gs1eIn => "gs1e-in",
            GaussianRegionId::Gs1eOut => "gs1e-out",
            GaussianRegionId::GcssIn => "gcss-in",
            GaussianRegionId::GcssOut => "gcss-out",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.name() == name)
    }

    fn is_outer(self) -> bool {
        matches!(
            self,
            GaussianRegionId::GdOut
                | GaussianRegionId::GsOut
                | GaussianRegionId::Gd1eOut
                | GaussianRegionId::Gs1eOut
                | GaussianRegionId::GcssOut
        )
    }

    /// Regions whose membership is a joint choice of `(theta, eta)` rather
    /// than `theta` with `eta` maximized inline.
    fn joint_eta(self) -> bool {
        matches!(self, GaussianRegionId::GdOut | GaussianRegionId::GsOut)
    }

    fn has_theta(self) -> bool {
        !matches!(self, GaussianRegionId::Gs1eIn | GaussianRegionId::Gs1eOut)
    }
}

/// Membership verdict with the best witness parameters found.
#[derive(Debug, Clone, Copy)]
pub struct GaussianMembership<F> {
    pub member: bool,
    pub witness: GaussianParams<F>,
    /// Minimum constraint slack at the witness (>= -1e-9 when member).
    pub best_slack: F,
}

fn min_slack_at<F: Real>(
    region: GaussianRegionId,
    spec: &GaussianSpec<F>,
    t: crate::regions::RateTriple<F>,
    theta: F,
    eta: F,
    resolution: usize,
) -> F {
    let r1_cap = if region.is_outer() { spec.r1_cap_outer(theta) } else { spec.r1_cap_inner(theta) };
    let relay = spec.relay_rate(theta);
    let mut slack = F::infinity();
    let mut push = |s: F| slack = slack.min(s);
    match region {
        GaussianRegionId::GdIn => {
            let (_, r0) = spec.r0_cap_max_eta(theta, resolution);
            push(r0 - t.r0);
            push(r1_cap - t.r1);
            push((t.r1 - relay).max(F::zero()) - t.re);
        }
        GaussianRegionId::GdOut => {
            push(spec.r0_cap(theta, eta) - t.r0);
            push(r1_cap - t.r1);
            push(spec.sum_cap(theta, eta) - t.r0 - t.r1);
            push((t.r1 - relay).max(F::zero()) - t.re);
        }
        GaussianRegionId::GsIn => {
            let (_, r0) = spec.r0_cap_max_eta(theta, resolution);
            push(r0 - t.r0);
            push(r1_cap - t.r1);
            push(t.r1 - t.re);
            push((r1_cap - relay).max(F::zero()) - t.re);
        }
        GaussianRegionId::GsOut => {
            push(spec.r0_cap(theta, eta) - t.r0);
            push(spec.sum_cap(theta, eta) - t.r0 - t.r1);
            push(r1_cap - t.r1);
            push(t.r1 - t.re);
            push((r1_cap - relay).max(F::zero()) - t.re);
        }
        GaussianRegionId::Gd1eIn | GaussianRegionId::Gd1eOut => {
            push(r1_cap - t.r1);
            push((t.r1 - relay).max(F::zero()) - t.re);
        }
        GaussianRegionId::Gs1eIn | GaussianRegionId::Gs1eOut => {
            // theta plays no role: full power on the private signal
            let full = if region.is_outer() {
                spec.r1_cap_outer(F::one())
            } else {
                spec.r1_cap_inner(F::one())
            };
            let relay_full = spec.relay_rate(F::one());
            push(full - t.r1);
            push(t.r1 - t.re);
            push((full - relay_full).max(F::zero()) - t.re);
        }
        GaussianRegionId::GcssIn | GaussianRegionId::GcssOut => {
            let (_, r0) = spec.r0_cap_max_eta(theta, resolution);
            push(r0 - t.r0);
            push((r1_cap - relay).max(F::zero()) - t.r1);
        }
    }
    slack
}

/// Decides membership of `t` in the named region by sweeping `theta` (and
/// `eta` where the region requires a joint choice) on a grid, then refining
/// the most promising bracket by golden section.
///
/// For the `*1e` cross-sections the `R0` component of `t` is ignored; for
/// the `gcss` cross-sections the `Re` component is ignored (the region lives
/// on the `Re = R1` face).
pub fn gaussian_membership<F: Real>(
    region: GaussianRegionId,
    spec: &GaussianSpec<F>,
    t: crate::regions::RateTriple<F>,
    resolution: usize,
) -> Result<GaussianMembership<F>, GaussianError> {
    if resolution < 2 {
        return Err(GaussianError::BadResolution(resolution));
    }
    let eta_res = resolution.min(129);
    let slack_at = |theta: F| -> (F, F) {
        if region.joint_eta() {
            let (eta, s) =
                maximize_on_unit(|eta| min_slack_at(region, spec, t, theta, eta, eta_res), eta_res);
            (eta, s)
        } else {
            (F::zero(), min_slack_at(region, spec, t, theta, F::zero(), eta_res))
        }
    };
    if !region.has_theta() {
        let (eta, slack) = slack_at(F::one());
        return Ok(GaussianMembership {
            member: slack >= -real::<F>(GAUSS_SLACK_TOL),
            witness: GaussianParams { theta: F::one(), eta },
            best_slack: slack,
        });
    }
    let (theta, slack) = maximize_on_unit(|th| slack_at(th).1, resolution);
    let (eta, slack_final) = slack_at(theta);
    let _ = slack;
    Ok(GaussianMembership {
        member: slack_final >= -real::<F>(GAUSS_SLACK_TOL),
        witness: GaussianParams { theta, eta },
        best_slack: slack_final,
    })
}

/// Lower and upper bounds on the Gaussian secrecy capacity:
/// `[cap(P1/N1) - cap(P1/N2)]+` and `[cap(P1/n1_tilde) - cap(P1/N2)]+`.
/// They coincide on reversely degraded channels and are independent of the
/// relay power `P2`.
pub fn gaussian_secrecy_capacity<F: Real>(spec: &GaussianSpec<F>) -> (F, F) {
    let relay = cap_unchecked(spec.p1 / spec.n2);
    let lower = (cap_unchecked(spec.p1 / spec.n1) - relay).max(F::zero());
    let upper = (cap_unchecked(spec.p1 / spec.n1_tilde()) - relay).max(F::zero());
    (lower, upper)
}

/// One emitted corner of a Gaussian region sweep.
#[derive(Debug, Clone, Copy)]
pub struct GaussianPoint<F> {
    pub theta: F,
    pub eta: F,
    pub r0: F,
    pub r1: F,
    pub re: F,
}

/// Sweeps the region's parameters on a grid and emits the achievable corner
/// triple per parameter choice.
pub fn gaussian_boundary<F: Real>(
    region: GaussianRegionId,
    spec: &GaussianSpec<F>,
    resolution: usize,
) -> Result<Vec<GaussianPoint<F>>, GaussianError> {
    if resolution < 2 {
        return Err(GaussianError::BadResolution(resolution));
    }
    let eta_res = resolution.min(129);
    if !region.has_theta() {
        let r1_cap = if region.is_outer() {
            spec.r1_cap_outer(F::one())
        } else {
            spec.r1_cap_inner(F::one())
        };
        let re = (r1_cap - spec.relay_rate(F::one())).max(F::zero());
        return Ok(vec![GaussianPoint { theta: F::one(), eta: F::zero(), r0: F::zero(), r1: r1_cap, re }]);
    }
    let mut out = Vec::with_capacity(resolution);
    for k in 0..resolution {
        let theta = F::from_usize(k).unwrap() / F::from_usize(resolution - 1).unwrap();
        let (eta, r0) = spec.r0_cap_max_eta(theta, eta_res);
        let r1_cap = if region.is_outer() { spec.r1_cap_outer(theta) } else { spec.r1_cap_inner(theta) };
        let relay = spec.relay_rate(theta);
        let (r0, r1, re) = match region {
            GaussianRegionId::GdIn | GaussianRegionId::GdOut => {
                let mut r1 = r1_cap;
                if region.joint_eta() {
                    r1 = r1.min(spec.sum_cap(theta, eta) - r0);
                }
                (r0, r1, (r1 - relay).max(F::zero()))
            }
            GaussianRegionId::GsIn | GaussianRegionId::GsOut => {
                let mut r1 = r1_cap;
                if region.joint_eta() {
                    r1 = r1.min(spec.sum_cap(theta, eta) - r0);
                }
                let re = (r1_cap - relay).max(F::zero()).min(r1);
                (r0, r1, re)
            }
            GaussianRegionId::Gd1eIn | GaussianRegionId::Gd1eOut => {
                (F::zero(), r1_cap, (r1_cap - relay).max(F::zero()))
            }
            GaussianRegionId::GcssIn | GaussianRegionId::GcssOut => {
                let r1 = (r1_cap - relay).max(F::zero());
                (r0, r1, r1)
            }
            GaussianRegionId::Gs1eIn | GaussianRegionId::Gs1eOut => unreachable!(),
        };
        out.push(GaussianPoint { theta, eta, r0, r1, re });
    }
    Ok(out)
}

/// Maximizes a scalar function on `[0,1]`: coarse grid, then golden-section
/// refinement of the best bracket down to a `1e-10` interval. The grid pass
/// guards non-unimodal shapes.
fn maximize_on_unit<F: Real>(f: impl Fn(F) -> F, resolution: usize) -> (F, F) {
    let n = resolution.max(2);
    let mut best_k = 0usize;
    let mut best = F::neg_infinity();
    for k in 0..n {
        let x = F::from_usize(k).unwrap() / F::from_usize(n - 1).unwrap();
        let v = f(x);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let step = F::one() / F::from_usize(n - 1).unwrap();
    let mut lo = if best_k == 0 { F::zero() } else { F::from_usize(best_k - 1).unwrap() * step };
    let mut hi = if best_k + 1 >= n { F::one() } else { F::from_usize(best_k + 1).unwrap() * step };
    let phi = real::<F>(0.618_033_988_749_894_9);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (hi - lo) > real(1e-10) {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = (lo + hi) / real(2.0);
    let fm = f(mid);
    if fm >= best {
        (mid, fm)
    } else {
        (F::from_usize(best_k).unwrap() * step, best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::RateTriple;

    fn rd_spec() -> GaussianSpec<f64> {
        GaussianSpec::new(1.0, 1.0, 1.0, 2.0, 0.5f64.sqrt()).unwrap()
    }

    #[test]
    fn cap_values() {
        assert_eq!(cap(0.0f64).unwrap(), 0.0);
        assert!((cap(1.0f64).unwrap() - 0.5).abs() < 1e-15);
        assert!((cap(3.0f64).unwrap() - 1.0).abs() < 1e-15);
        assert!(cap(-0.1f64).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(GaussianSpec::new(1.0, 1.0, 0.0, 1.0, 0.0).is_err());
        assert!(GaussianSpec::new(1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(GaussianSpec::new(-1.0, 1.0, 1.0, 1.0, 0.0).is_err());
        assert!(GaussianSpec::new(1.0, 1.0, 1.0, 2.0, -0.3).is_ok());
    }

    #[test]
    fn n1_tilde_never_exceeds_n1_and_collapses_on_rd_line() {
        for &n1 in &[0.5, 1.0, 2.0] {
            for &n2 in &[0.5, 1.0, 2.0, 4.0] {
                for k in -9..10 {
                    let rho = k as f64 / 10.0;
                    let spec = GaussianSpec::new(1.0, 1.0, n1, n2, rho).unwrap();
                    let nt = spec.n1_tilde();
                    assert!(nt <= n1 + 1e-12, "n1_tilde {nt} > N1 {n1}");
                }
            }
        }
        let spec = rd_spec();
        assert!(spec.reversely_degraded());
        assert!((spec.n1_tilde() - spec.n1).abs() < 1e-12);
    }

    #[test]
    fn cap_is_monotone_and_concave() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = rng.random::<f64>() * 10.0;
            let y = rng.random::<f64>() * 10.0;
            let cx: f64 = cap(x).unwrap();
            let cy: f64 = cap(y).unwrap();
            if x <= y {
                assert!(cx <= cy + 1e-12);
            }
            let mid = cap((x + y) / 2.0).unwrap();
            assert!(mid >= (cx + cy) / 2.0 - 1e-12);
        }
    }

    #[test]
    fn origin_is_member_of_every_region() {
        let spec = GaussianSpec::new(2.0, 0.7, 1.3, 0.9, 0.2).unwrap();
        for region in GaussianRegionId::ALL {
            let m = gaussian_membership(region, &spec, RateTriple::zero(), 101).unwrap();
            assert!(m.member, "{} rejected the origin (slack {})", region.name(), m.best_slack);
        }
    }

    #[test]
    fn full_power_private_point_is_member() {
        // theta = 1 forces R0 = 0 and allows R1 up to cap(P1/N1) = 0.5
        let spec = GaussianSpec::new(1.0, 1.0, 1.0, 2.0, 0.0).unwrap();
        let t = RateTriple::new(0.0, 0.5, 0.0).unwrap();
        let m = gaussian_membership(GaussianRegionId::GdIn, &spec, t, 501).unwrap();
        assert!(m.member, "slack {}", m.best_slack);
        assert!(m.witness.theta > 0.99);
        // anything above the cap is out
        let t = RateTriple::new(0.0, 0.5 + 1e-6, 0.0).unwrap();
        let m = gaussian_membership(GaussianRegionId::GdIn, &spec, t, 501).unwrap();
        assert!(!m.member);
    }

    #[test]
    fn reversely_degraded_secrecy_capacity_closed_form() {
        let spec = rd_spec();
        let (lower, upper) = gaussian_secrecy_capacity(&spec);
        let expect = 0.5 - 0.5 * 1.5f64.log2();
        assert!((lower - expect).abs() < 1e-12);
        assert!((upper - expect).abs() < 1e-12);
    }

    #[test]
    fn secrecy_capacity_ignores_relay_power() {
        for &p2 in &[0.1, 1.0, 10.0] {
            let spec = GaussianSpec::new(1.0, p2, 1.0, 2.0, 0.5f64.sqrt()).unwrap();
            let (lower, upper) = gaussian_secrecy_capacity(&spec);
            let expect = 0.5 - 0.5 * 1.5f64.log2();
            assert!((lower - expect).abs() < 1e-12);
            assert!((upper - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_noises_give_zero_secrecy() {
        let spec = GaussianSpec::new(1.0, 1.0, 1.5, 1.5, 0.0).unwrap();
        let (lower, _) = gaussian_secrecy_capacity(&spec);
        assert_eq!(lower, 0.0);
    }

    #[test]
    fn rd_boundaries_coincide() {
        let spec = rd_spec();
        let inner = gaussian_boundary(GaussianRegionId::Gd1eIn, &spec, 101).unwrap();
        let outer = gaussian_boundary(GaussianRegionId::Gd1eOut, &spec, 101).unwrap();
        for (a, b) in inner.iter().zip(&outer) {
            assert!((a.r1 - b.r1).abs() <= 1e-9 && (a.re - b.re).abs() <= 1e-9);
        }
        // max Re at R0 = 0 equals cap(P1/N1) - cap(P1/N2)
        let re_top = inner.iter().map(|p| p.re).fold(0.0, f64::max);
        assert!((re_top - (0.5 - 0.5 * 1.5f64.log2())).abs() < 1e-9);
        let full = gaussian_boundary(GaussianRegionId::GdIn, &spec, 101).unwrap();
        let outer_full = gaussian_boundary(GaussianRegionId::GdOut, &spec, 101).unwrap();
        for (a, b) in full.iter().zip(&outer_full) {
            assert!((a.r1 - b.r1).abs() <= 1e-9, "r1 {} vs {}", a.r1, b.r1);
            assert!((a.re - b.re).abs() <= 1e-9);
        }
    }

    #[test]
    fn zero_sender_power_pins_private_rates_to_zero() {
        let spec = GaussianSpec::new(0.0, 2.0, 1.0, 2.0, 0.3).unwrap();
        let pts = gaussian_boundary(GaussianRegionId::GdIn, &spec, 21).unwrap();
        for p in &pts {
            assert_eq!(p.r1, 0.0);
            assert_eq!(p.re, 0.0);
        }
        // theta = 0 rows have R1 = 0 for any spec
        let spec = GaussianSpec::new(3.0, 2.0, 1.0, 2.0, 0.3).unwrap();
        let pts = gaussian_boundary(GaussianRegionId::GdIn, &spec, 21).unwrap();
        assert_eq!(pts[0].theta, 0.0);
        assert_eq!(pts[0].r1, 0.0);
    }

    #[test]
    fn inner_corners_satisfy_outer_constraints() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let spec = GaussianSpec::new(
                rng.random::<f64>() * 10.0,
                rng.random::<f64>() * 10.0,
                0.1 + rng.random::<f64>() * 5.0,
                0.1 + rng.random::<f64>() * 5.0,
                (rng.random::<f64>() - 0.5) * 1.98,
            )
            .unwrap();
            for k in 0..21 {
                let theta = k as f64 / 20.0;
                for j in 0..21 {
                    let eta = j as f64 / 20.0;
                    let r0 = spec.r0_cap(theta, eta);
                    let r1 = spec.r1_cap_inner(theta);
                    let re = (r1 - spec.relay_rate(theta)).max(0.0);
                    // same (theta, eta) witnesses the outer constraints
                    assert!(r0 <= spec.r0_cap(theta, eta) + 1e-9);
                    assert!(r1 <= spec.r1_cap_outer(theta) + 1e-9);
                    assert!(r0 + r1 <= spec.sum_cap(theta, eta) + 1e-9);
                    assert!(re <= (r1 - spec.relay_rate(theta)).max(0.0) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn stochastic_re_ceiling_is_maximal_at_full_theta_when_n1_below_n2() {
        let spec = GaussianSpec::new(2.0, 1.0, 0.7, 2.5, 0.1).unwrap();
        let mut prev = -1.0;
        for k in 0..=100 {
            let theta = k as f64 / 100.0;
            let ceiling = (spec.r1_cap_inner(theta) - spec.relay_rate(theta)).max(0.0);
            assert!(ceiling + 1e-12 >= prev, "Re ceiling not monotone at theta={theta}");
            prev = ceiling;
        }
    }
}
