//! Per-distribution rate-equivocation constraint sets, membership search
//! over auxiliary input distributions, boundary traces, and secrecy-capacity
//! bounds for discrete relay channels.
//!
//! Every bound is a list of inequalities on `(R0, R1, Re)` whose right-hand
//! sides are conditional mutual informations of one fixed joint
//! distribution; a region is the union of those sets over a class of input
//! distributions. Membership in an inner bound is certified by exhibiting a
//! distribution (a [`Witness`]); for outer bounds the search can only
//! produce an inner approximation, so a negative answer is reliable only up
//! to search quality. Reports carry per-constraint slacks so callers can
//! judge closeness.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::info::{cond_mutual_information, positive_part, zeta, Var, VarSet};
use crate::prob::{make_joint, make_joint_v, AuxInput, AuxInputV, JointDist, RelayChannel};
use crate::{real, Real};

/// Slack below which a constraint counts as violated.
pub const SLACK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RegionError {
    #[error("bound {bound} requires an input with the second auxiliary V")]
    WrongInputClass { bound: String },
    #[error("bound {bound} is only valid for class-NL channels (residual {residual:e})")]
    NotClassNl { bound: String, residual: f64 },
    #[error("{op} requires an {expected} bound, got {bound}")]
    WrongBoundKind { op: String, expected: String, bound: String },
    #[error("invalid search config: {0}")]
    BadConfig(String),
    #[error("invalid rate triple: {0}")]
    BadTriple(String),
}

/// A rate triple `(R0, R1, Re)` in bits per channel use.
///
/// `R0` is the common-message rate, `R1` the private-message rate, and `Re`
/// the equivocation rate guaranteed against the relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTriple<F> {
    pub r0: F,
    pub r1: F,
    pub re: F,
}

impl<F: Real> RateTriple<F> {
    pub fn new(r0: F, r1: F, re: F) -> Result<Self, RegionError> {
        for (name, v) in [("R0", r0), ("R1", r1), ("Re", re)] {
            if !v.is_finite() || v < F::zero() {
                return Err(RegionError::BadTriple(format!("{name} = {v} must be finite and >= 0")));
            }
        }
        Ok(Self { r0, r1, re })
    }

    pub fn zero() -> Self {
        Self { r0: F::zero(), r1: F::zero(), re: F::zero() }
    }
}

/// Identifier of one inner or outer bound.
///
/// The `d-` bounds constrain the deterministic-encoder region, the `s-`
/// bounds the stochastic-encoder region. `*-in-tilde`/`*-out-tilde` are the
/// basic single-auxiliary pairs, `d-in`/`d-out` the refined pair with the
/// combined sum-rate constraint, `d-out-hat` the class-NL outer bound with
/// the relay-cooperation correction, and `s-in`/`s-out` the two-auxiliary
/// stochastic pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundId {
    DInTilde,
    DOutTilde,
    DIn,
    DOut,
    DOutHat,
    SInTilde,
    SOutTilde,
    SIn,
    SOut,
}

impl BoundId {
    pub const ALL: [BoundId; 9] = [
        BoundId::DInTilde,
        BoundId::DOutTilde,
        BoundId::DIn,
        BoundId::DOut,
        BoundId::DOutHat,
        BoundId::SInTilde,
        BoundId::SOutTilde,
        BoundId::SIn,
        BoundId::SOut,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundId::DInTilde => "d-in-tilde",
            BoundId::DOutTilde => "d-out-tilde",
            BoundId::DIn => "d-in",
            BoundId::DOut => "d-out",
            BoundId::DOutHat => "d-out-hat",
            BoundId::SInTilde => "s-in-tilde",
            BoundId::SOutTilde => "s-out-tilde",
            BoundId::SIn => "s-in",
            BoundId::SOut => "s-out",
        }
    }

    pub fn parse(name: &str) -> Option<BoundId> {
        BoundId::ALL.into_iter().find(|b| b.name() == name)
    }

    /// Inner bounds are achievability results; a found witness certifies
    /// membership.
    pub fn is_inner(self) -> bool {
        matches!(self, BoundId::DInTilde | BoundId::DIn | BoundId::SInTilde | BoundId::SIn)
    }

    /// Bounds whose rate expressions involve the second auxiliary `V`.
    pub fn needs_v(self) -> bool {
        matches!(self, BoundId::SIn | BoundId::SOut)
    }

    /// Bounds of the stochastic-encoder region additionally require
    /// `Re <= R1`.
    pub fn is_stochastic(self) -> bool {
        matches!(self, BoundId::SInTilde | BoundId::SOutTilde | BoundId::SIn | BoundId::SOut)
    }

    /// The class-NL outer bound is only valid under that channel hypothesis.
    pub fn requires_class_nl(self) -> bool {
        self == BoundId::DOutHat
    }
}

/// Cross-section selector for region queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Slice {
    /// The full `(R0, R1, Re)` region.
    #[default]
    Full,
    /// The `R0 = 0` cross-section (no common message).
    R0Zero,
    /// The `Re = R1` cross-section (perfect secrecy on the private message).
    ReEqR1,
}

impl Slice {
    pub fn name(self) -> &'static str {
        match self {
            Slice::Full => "full",
            Slice::R0Zero => "r0-zero",
            Slice::ReEqR1 => "re-eq-r1",
        }
    }

    pub fn parse(name: &str) -> Option<Slice> {
        match name {
            "full" => Some(Slice::Full),
            "r0-zero" => Some(Slice::R0Zero),
            "re-eq-r1" => Some(Slice::ReEqR1),
            _ => None,
        }
    }
}

/// All conditional mutual informations a bound's right-hand sides can use,
/// evaluated at one joint distribution.
#[derive(Debug, Clone, Copy)]
pub struct RegionQuantities<F> {
    pub i_us_y: F,
    pub i_u_y: F,
    pub i_u_z_given_s: F,
    pub i_x_y_given_us: F,
    pub i_x_z_given_us: F,
    pub i_x_yz_given_us: F,
    pub i_xs_y: F,
    pub i_x_y_given_zus: F,
    pub i_u_z_given_xs: F,
    pub zeta: F,
    /// `I(V;Y|US)`; zero when the joint has no second auxiliary.
    pub i_v_y_given_us: F,
    /// `I(V;Z|US)`; zero when the joint has no second auxiliary.
    pub i_v_z_given_us: F,
    pub has_v: bool,
}

impl<F: Real> RegionQuantities<F> {
    pub fn from_joint(joint: &JointDist<F>) -> Self {
        let u = VarSet::new(&[Var::U]);
        let s = VarSet::new(&[Var::S]);
        let x = VarSet::new(&[Var::X]);
        let y = VarSet::new(&[Var::Y]);
        let z = VarSet::new(&[Var::Z]);
        let v = VarSet::new(&[Var::V]);
        let us = VarSet::new(&[Var::U, Var::S]);
        let xs = VarSet::new(&[Var::X, Var::S]);
        let yz = VarSet::new(&[Var::Y, Var::Z]);
        let zus = VarSet::new(&[Var::Z, Var::U, Var::S]);
        let mi = |a, b, c| cond_mutual_information(joint, a, b, c).expect("disjoint sets");
        let has_v = joint.has_v();
        Self {
            i_us_y: mi(us, y, VarSet::EMPTY),
            i_u_y: mi(u, y, VarSet::EMPTY),
            i_u_z_given_s: mi(u, z, s),
            i_x_y_given_us: mi(x, y, us),
            i_x_z_given_us: mi(x, z, us),
            i_x_yz_given_us: mi(x, yz, us),
            i_xs_y: mi(xs, y, VarSet::EMPTY),
            i_x_y_given_zus: mi(x, y, zus),
            i_u_z_given_xs: mi(u, z, xs),
            zeta: zeta(joint),
            i_v_y_given_us: if has_v { mi(v, y, us) } else { F::zero() },
            i_v_z_given_us: if has_v { mi(v, z, us) } else { F::zero() },
            has_v,
        }
    }

    /// Upper bound on feasible `R0` at this joint.
    pub fn r0_cap(&self, bound: BoundId) -> F {
        match bound {
            BoundId::DOutHat => self.i_u_y.min(self.i_u_z_given_s),
            _ => self.i_us_y.min(self.i_u_z_given_s),
        }
    }

    /// Cap on `R0 + R1` where the bound has one, otherwise `None`.
    fn sum_cap(&self, bound: BoundId) -> Option<F> {
        match bound {
            BoundId::DInTilde | BoundId::SInTilde => None,
            BoundId::DOutTilde | BoundId::SOutTilde => Some(self.i_xs_y),
            BoundId::DIn | BoundId::DOut => {
                Some(self.i_x_y_given_us + self.i_u_z_given_s.min(self.i_us_y))
            }
            BoundId::DOutHat => {
                Some(self.i_x_y_given_us + self.i_us_y.min(self.i_u_z_given_s + self.zeta))
            }
            BoundId::SIn | BoundId::SOut => {
                Some(self.i_v_y_given_us + self.i_u_z_given_s.min(self.i_us_y))
            }
        }
    }

    /// Direct cap on `R1` where the bound has one, otherwise `None`.
    fn r1_cap(&self, bound: BoundId) -> Option<F> {
        match bound {
            BoundId::DInTilde | BoundId::SInTilde => Some(self.i_x_y_given_us),
            BoundId::DOutTilde | BoundId::SOutTilde => Some(self.i_x_yz_given_us),
            _ => None,
        }
    }

    /// Largest `R1` admitted at fixed `r0`, or `None` when `r0` itself is
    /// infeasible at this joint.
    pub fn r1_max(&self, bound: BoundId, r0: F) -> Option<F> {
        if r0 > self.r0_cap(bound) + real(SLACK_TOL) {
            return None;
        }
        let mut best = F::infinity();
        if let Some(cap) = self.r1_cap(bound) {
            best = best.min(cap);
        }
        if let Some(cap) = self.sum_cap(bound) {
            best = best.min(cap - r0);
        }
        if best == F::infinity() {
            // every bound has at least one R1-limiting constraint
            unreachable!("bound without R1 constraint");
        }
        Some(best.max(F::zero()))
    }

    /// Largest `Re` admitted at `(r0, r1)` (assumes `r1` feasible).
    pub fn re_max(&self, bound: BoundId, r1: F) -> F {
        let mut best = match bound {
            BoundId::DInTilde | BoundId::DOutTilde => positive_part(r1 - self.i_x_z_given_us),
            BoundId::DIn => positive_part(r1 - self.i_x_z_given_us)
                .min(positive_part(self.i_x_y_given_us - self.i_x_z_given_us)),
            BoundId::DOut => positive_part(r1 - self.i_x_z_given_us + self.i_u_z_given_xs)
                .min(positive_part(self.i_x_y_given_us - self.i_x_z_given_us)),
            BoundId::DOutHat => positive_part(r1 - self.i_x_z_given_us)
                .min(positive_part(self.i_x_y_given_us - self.i_x_z_given_us + self.zeta)),
            BoundId::SInTilde => positive_part(self.i_x_y_given_us - self.i_x_z_given_us),
            BoundId::SOutTilde => self.i_x_y_given_zus,
            BoundId::SIn | BoundId::SOut => {
                positive_part(self.i_v_y_given_us - self.i_v_z_given_us)
            }
        };
        if bound.is_stochastic() {
            best = best.min(r1);
        }
        best.max(F::zero())
    }
}

/// Outcome of evaluating one bound's constraint list at a fixed joint and
/// rate triple. `slack = rhs - lhs`; nonnegative means satisfied.
#[derive(Debug, Clone)]
pub struct ConstraintReport<F> {
    pub bound: BoundId,
    pub ok: bool,
    pub slacks: Vec<(&'static str, F)>,
}

impl<F: Real> ConstraintReport<F> {
    pub fn min_slack(&self) -> F {
        self.slacks.iter().map(|&(_, s)| s).fold(F::infinity(), F::min)
    }
}

/// Evaluates the inequality list of `bound` at this joint and triple.
pub fn constraint_check<F: Real>(
    bound: BoundId,
    joint: &JointDist<F>,
    t: RateTriple<F>,
) -> Result<ConstraintReport<F>, RegionError> {
    if bound.needs_v() && !joint.has_v() {
        return Err(RegionError::WrongInputClass { bound: bound.name().into() });
    }
    let q = RegionQuantities::from_joint(joint);
    Ok(constraint_check_at(bound, &q, t))
}

/// Same as [`constraint_check`] from precomputed quantities.
pub fn constraint_check_at<F: Real>(
    bound: BoundId,
    q: &RegionQuantities<F>,
    t: RateTriple<F>,
) -> ConstraintReport<F> {
    let mut slacks: Vec<(&'static str, F)> = Vec::with_capacity(8);
    slacks.push(("R0 >= 0", t.r0));
    slacks.push(("R1 >= 0", t.r1));
    slacks.push(("Re >= 0", t.re));
    if bound.is_stochastic() {
        slacks.push(("Re <= R1", t.r1 - t.re));
    }
    slacks.push(("R0 <= r0-cap", q.r0_cap(bound) - t.r0));
    if let Some(cap) = q.r1_cap(bound) {
        slacks.push(("R1 <= r1-cap", cap - t.r1));
    }
    if let Some(cap) = q.sum_cap(bound) {
        slacks.push(("R0 + R1 <= sum-cap", cap - t.r0 - t.r1));
    }
    match bound {
        BoundId::DInTilde | BoundId::DOutTilde => {
            slacks.push(("Re <= [R1 - I(X;Z|US)]+", positive_part(t.r1 - q.i_x_z_given_us) - t.re));
        }
        BoundId::DIn => {
            slacks.push(("Re <= [R1 - I(X;Z|US)]+", positive_part(t.r1 - q.i_x_z_given_us) - t.re));
            slacks.push((
                "Re <= [I(X;Y|US) - I(X;Z|US)]+",
                positive_part(q.i_x_y_given_us - q.i_x_z_given_us) - t.re,
            ));
        }
        BoundId::DOut => {
            slacks.push((
                "Re <= [R1 - I(X;Z|US) + I(U;Z|XS)]+",
                positive_part(t.r1 - q.i_x_z_given_us + q.i_u_z_given_xs) - t.re,
            ));
            slacks.push((
                "Re <= [I(X;Y|US) - I(X;Z|US)]+",
                positive_part(q.i_x_y_given_us - q.i_x_z_given_us) - t.re,
            ));
        }
        BoundId::DOutHat => {
            slacks.push(("Re <= [R1 - I(X;Z|US)]+", positive_part(t.r1 - q.i_x_z_given_us) - t.re));
            slacks.push((
                "Re <= [I(X;Y|US) - I(X;Z|US) + zeta]+",
                positive_part(q.i_x_y_given_us - q.i_x_z_given_us + q.zeta) - t.re,
            ));
        }
        BoundId::SInTilde => {
            slacks.push((
                "Re <= [I(X;Y|US) - I(X;Z|US)]+",
                positive_part(q.i_x_y_given_us - q.i_x_z_given_us) - t.re,
            ));
        }
        BoundId::SOutTilde => {
            slacks.push(("Re <= I(X;Y|ZUS)", q.i_x_y_given_zus - t.re));
        }
        BoundId::SIn | BoundId::SOut => {
            slacks.push((
                "Re <= [I(V;Y|US) - I(V;Z|US)]+",
                positive_part(q.i_v_y_given_us - q.i_v_z_given_us) - t.re,
            ));
        }
    }
    let tol = -real::<F>(SLACK_TOL);
    let ok = slacks.iter().all(|&(_, s)| s >= tol);
    ConstraintReport { bound, ok, slacks }
}

// ---------------------------------------------------------------------------
// search over input distributions
// ---------------------------------------------------------------------------

/// Knobs for the derivative-free search over auxiliary input distributions.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Independent restarts (each a fresh random starting point). Must be >= 1.
    pub restarts: usize,
    /// Simplex grid resolution used to seed `p(s)` across restarts. Must be >= 2.
    pub resolution: usize,
    /// Hill-climbing sweeps per step-size level.
    pub refine_steps: usize,
    /// Master seed; identical seeds give identical results at any worker count.
    pub seed: u64,
    /// Wall-clock budget in milliseconds, checked between restarts.
    pub budget_ms: Option<u64>,
    /// Cap on the first auxiliary alphabet; defaults to `min(class cap, 4)`.
    pub max_u: Option<usize>,
    /// Cap on the second auxiliary alphabet; defaults to `min(class cap, 4)`.
    pub max_v: Option<usize>,
    /// Use the full cardinality caps of the distribution classes instead of
    /// the desk-scale default of 4.
    pub full_caps: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 48,
            resolution: 4,
            refine_steps: 2,
            seed: 0,
            budget_ms: None,
            max_u: None,
            max_v: None,
            full_caps: false,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), RegionError> {
        if self.restarts < 1 {
            return Err(RegionError::BadConfig("restarts must be >= 1".into()));
        }
        if self.resolution < 2 {
            return Err(RegionError::BadConfig("resolution must be >= 2".into()));
        }
        Ok(())
    }

    fn cap(&self, paper_cap: usize, user: Option<usize>) -> usize {
        let base = if self.full_caps { paper_cap } else { paper_cap.min(4) };
        user.map_or(base, |m| m.min(paper_cap)).max(1)
    }
}

/// Input distribution attached to a witness: plain or with the second
/// auxiliary.
#[derive(Debug, Clone)]
pub enum WitnessInput<F> {
    Plain(AuxInput<F>),
    WithV(AuxInputV<F>),
}

impl<F: Real> WitnessInput<F> {
    pub fn joint(&self, channel: &RelayChannel<F>) -> JointDist<F> {
        match self {
            WitnessInput::Plain(input) => make_joint(channel, input).expect("witness built for channel"),
            WitnessInput::WithV(input) => {
                make_joint_v(channel, input).expect("witness built for channel")
            }
        }
    }
}

/// A membership certificate: the achieving input distribution, the triple,
/// and the per-constraint slacks at that distribution.
#[derive(Debug, Clone)]
pub struct Witness<F> {
    pub input: WitnessInput<F>,
    pub triple: RateTriple<F>,
    pub slacks: Vec<(&'static str, F)>,
}

impl<F: Real> Witness<F> {
    pub fn min_slack(&self) -> F {
        self.slacks.iter().map(|&(_, s)| s).fold(F::infinity(), F::min)
    }
}

/// Result of a membership search.
#[derive(Debug, Clone)]
pub enum SearchResult<F> {
    /// A distribution satisfying every constraint was found.
    Member(Witness<F>),
    /// No satisfying distribution found; carries the best attempt. Not a
    /// disproof of membership.
    NotFound(Witness<F>),
    /// The wall-clock budget ran out; carries the best attempt so far.
    BudgetExceeded(Witness<F>),
}

impl<F: Real> SearchResult<F> {
    pub fn best(&self) -> &Witness<F> {
        match self {
            SearchResult::Member(w) | SearchResult::NotFound(w) | SearchResult::BudgetExceeded(w) => w,
        }
    }
}

/// Family of factorized input distributions the search walks over.
///
/// Plain inputs factor as `p(s) p(u|s) p(x|u,s)`; two-auxiliary inputs as
/// `p(v) p(u|v) p(s|v) p(x|v)` (which realizes both required chains exactly);
/// the `(X,S)`-only family as `p(s) p(x|s)` with `|U| = 1`.
#[derive(Debug, Clone, Copy)]
enum Family {
    Plain { nu: usize, ns: usize, nx: usize },
    WithV { nu: usize, nv: usize, ns: usize, nx: usize },
    XsOnly { ns: usize, nx: usize },
}

impl Family {
    fn rows(&self) -> Vec<usize> {
        match *self {
            Family::Plain { nu, ns, nx } => {
                let mut rows = vec![ns];
                rows.extend(std::iter::repeat(nu).take(ns));
                rows.extend(std::iter::repeat(nx).take(nu * ns));
                rows
            }
            Family::WithV { nu, nv, ns, nx } => {
                let mut rows = vec![nv];
                rows.extend(std::iter::repeat(nu).take(nv));
                rows.extend(std::iter::repeat(ns).take(nv));
                rows.extend(std::iter::repeat(nx).take(nv));
                rows
            }
            Family::XsOnly { ns, nx } => {
                let mut rows = vec![ns];
                rows.extend(std::iter::repeat(nx).take(ns));
                rows
            }
        }
    }

    /// Inverse of [`Family::to_input`] for inputs produced by this family
    /// (factor rows recovered from the joint tensors).
    fn point_of<F: Real>(&self, input: &WitnessInput<F>) -> Option<Vec<Vec<F>>> {
        match (*self, input) {
            (Family::Plain { nu, ns, nx }, WitnessInput::Plain(inp))
                if inp.nu() == nu && inp.ns() == ns && inp.nx() == nx =>
            {
                let f = inp.factorize();
                let mut rows: Vec<Vec<F>> = vec![f.p_s.clone()];
                for s in 0..ns {
                    rows.push((0..nu).map(|u| f.p_u_given_s[s * nu + u]).collect());
                }
                for u in 0..nu {
                    for s in 0..ns {
                        rows.push((0..nx).map(|x| f.p_x_given_us[(u * ns + s) * nx + x]).collect());
                    }
                }
                Some(rows)
            }
            (Family::XsOnly { ns, nx }, WitnessInput::Plain(inp))
                if inp.nu() == 1 && inp.ns() == ns && inp.nx() == nx =>
            {
                let f = inp.factorize();
                let mut rows: Vec<Vec<F>> = vec![f.p_s.clone()];
                for s in 0..ns {
                    rows.push((0..nx).map(|x| f.p_x_given_us[s * nx + x]).collect());
                }
                Some(rows)
            }
            (Family::WithV { nu, nv, ns, nx }, WitnessInput::WithV(inp))
                if inp.nu() == nu && inp.nv() == nv && inp.ns() == ns && inp.nx() == nx =>
            {
                let mut p_v = vec![F::zero(); nv];
                for u in 0..nu {
                    for v in 0..nv {
                        for s in 0..ns {
                            p_v[v] = p_v[v] + inp.prob_uvs(u, v, s);
                        }
                    }
                }
                let unif_u = F::one() / F::from_usize(nu).unwrap();
                let unif_s = F::one() / F::from_usize(ns).unwrap();
                let mut rows: Vec<Vec<F>> = vec![p_v.clone()];
                for v in 0..nv {
                    let row = if p_v[v] > F::zero() {
                        (0..nu)
                            .map(|u| {
                                (0..ns).map(|s| inp.prob_uvs(u, v, s)).sum::<F>() / p_v[v]
                            })
                            .collect()
                    } else {
                        vec![unif_u; nu]
                    };
                    rows.push(row);
                }
                for v in 0..nv {
                    let row = if p_v[v] > F::zero() {
                        (0..ns)
                            .map(|s| {
                                (0..nu).map(|u| inp.prob_uvs(u, v, s)).sum::<F>() / p_v[v]
                            })
                            .collect()
                    } else {
                        vec![unif_s; ns]
                    };
                    rows.push(row);
                }
                for v in 0..nv {
                    rows.push((0..nx).map(|x| inp.prob_x_given_v(v, x)).collect());
                }
                Some(rows)
            }
            _ => None,
        }
    }

    fn to_input<F: Real>(&self, point: &[Vec<F>]) -> WitnessInput<F> {
        match *self {
            Family::Plain { nu, ns, nx } => {
                let mut p = vec![F::zero(); nu * ns * nx];
                let p_s = &point[0];
                for s in 0..ns {
                    let p_u = &point[1 + s];
                    for u in 0..nu {
                        let p_x = &point[1 + ns + u * ns + s];
                        for x in 0..nx {
                            p[(u * ns + s) * nx + x] = p_s[s] * p_u[u] * p_x[x];
                        }
                    }
                }
                WitnessInput::Plain(renormalized_input(nu, ns, nx, p))
            }
            Family::WithV { nu, nv, ns, nx } => {
                let p_v = &point[0];
                let mut p_uvs = vec![F::zero(); nu * nv * ns];
                for v in 0..nv {
                    let p_u = &point[1 + v];
                    let p_s = &point[1 + nv + v];
                    for u in 0..nu {
                        for s in 0..ns {
                            p_uvs[(u * nv + v) * ns + s] = p_v[v] * p_u[u] * p_s[s];
                        }
                    }
                }
                let mut p_x_given_v = vec![F::zero(); nv * nx];
                for v in 0..nv {
                    let p_x = &point[1 + 2 * nv + v];
                    for x in 0..nx {
                        p_x_given_v[v * nx + x] = p_x[x];
                    }
                }
                WitnessInput::WithV(renormalized_input_v(nu, nv, ns, nx, p_uvs, p_x_given_v))
            }
            Family::XsOnly { ns, nx } => {
                let mut p = vec![F::zero(); ns * nx];
                let p_s = &point[0];
                for s in 0..ns {
                    let p_x = &point[1 + s];
                    for x in 0..nx {
                        p[s * nx + x] = p_s[s] * p_x[x];
                    }
                }
                WitnessInput::Plain(renormalized_input(1, ns, nx, p))
            }
        }
    }
}

/// Normalizes away accumulated float drift and wraps as an input.
fn renormalized_input<F: Real>(nu: usize, ns: usize, nx: usize, mut p: Vec<F>) -> AuxInput<F> {
    let total: F = p.iter().copied().sum();
    if total > F::zero() {
        for e in p.iter_mut() {
            *e = *e / total;
        }
    } else {
        let w = F::one() / F::from_usize(p.len()).unwrap();
        for e in p.iter_mut() {
            *e = w;
        }
    }
    AuxInput::new(nu, ns, nx, p).expect("normalized by construction")
}

fn renormalized_input_v<F: Real>(
    nu: usize,
    nv: usize,
    ns: usize,
    nx: usize,
    mut p_uvs: Vec<F>,
    p_x_given_v: Vec<F>,
) -> AuxInputV<F> {
    let total: F = p_uvs.iter().copied().sum();
    if total > F::zero() {
        for e in p_uvs.iter_mut() {
            *e = *e / total;
        }
    }
    AuxInputV::new(nu, nv, ns, nx, p_uvs, p_x_given_v).expect("normalized by construction")
}

fn dirichlet_row<F: Real>(rng: &mut ChaCha8Rng, len: usize) -> Vec<F> {
    let mut row = vec![F::zero(); len];
    let mut sum = 0.0f64;
    let mut raw = vec![0.0f64; len];
    for r in raw.iter_mut() {
        *r = -(rng.random::<f64>().max(1e-300)).ln();
        sum += *r;
    }
    for (e, r) in row.iter_mut().zip(raw) {
        *e = real(r / sum);
    }
    row
}

/// Compositions of `resolution` into `len` parts, as simplex points.
fn simplex_grid<F: Real>(len: usize, resolution: usize) -> Vec<Vec<F>> {
    fn rec(len: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if len == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(len - 1, left - k, cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    rec(len, resolution, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|comp| {
            comp.into_iter()
                .map(|k| F::from_usize(k).unwrap() / F::from_usize(resolution).unwrap())
                .collect()
        })
        .collect()
}

/// Hill-climbing over the product of simplices: move `delta` of mass between
/// two coordinates of one row; keep the move when the objective improves.
/// `delta` is halved ten times from 0.1.
fn refine_point<F: Real>(
    point: &mut Vec<Vec<F>>,
    start: F,
    sweeps: usize,
    mut eval: impl FnMut(&[Vec<F>]) -> F,
) -> F {
    let mut best = start;
    let mut delta = 0.1f64;
    for _ in 0..10 {
        for _ in 0..sweeps.max(1) {
            let mut improved = false;
            for r in 0..point.len() {
                let len = point[r].len();
                if len < 2 {
                    continue;
                }
                for i in 0..len {
                    for j in 0..len {
                        if i == j {
                            continue;
                        }
                        let step = real::<F>(delta).min(point[r][i]);
                        if step <= F::zero() {
                            continue;
                        }
                        point[r][i] = point[r][i] - step;
                        point[r][j] = point[r][j] + step;
                        let val = eval(point);
                        if val > best {
                            best = val;
                            improved = true;
                        } else {
                            point[r][i] = point[r][i] + step;
                            point[r][j] = point[r][j] - step;
                        }
                    }
                }
            }
            if !improved {
                break;
            }
        }
        delta /= 2.0;
    }
    best
}

/// Runs the restart/refine search, maximizing `objective` over the family.
/// Deterministic for a fixed seed at any worker count: restarts are
/// independent tasks reduced in index order (first strict improvement wins).
fn optimize_family<F: Real>(
    family: &Family,
    channel: &RelayChannel<F>,
    cfg: &SearchConfig,
    objective: impl Fn(&RegionQuantities<F>) -> F + Sync,
    stop_at: Option<F>,
) -> (WitnessInput<F>, RegionQuantities<F>, F, bool) {
    optimize_family_seeded(family, channel, cfg, objective, stop_at, &[])
}

/// As [`optimize_family`], with extra deterministic starting points refined
/// after the random restarts.
fn optimize_family_seeded<F: Real>(
    family: &Family,
    channel: &RelayChannel<F>,
    cfg: &SearchConfig,
    objective: impl Fn(&RegionQuantities<F>) -> F + Sync,
    stop_at: Option<F>,
    extra_seeds: &[Vec<Vec<F>>],
) -> (WitnessInput<F>, RegionQuantities<F>, F, bool) {
    let rows = family.rows();
    let eval_point = |point: &[Vec<F>]| -> (F, WitnessInput<F>, RegionQuantities<F>) {
        let input = family.to_input(point);
        let joint = input.joint(channel);
        let q = RegionQuantities::from_joint(&joint);
        (objective(&q), input, q)
    };
    let grid = simplex_grid::<F>(rows[0], cfg.resolution);
    let start = std::time::Instant::now();
    let deadline = cfg.budget_ms.map(std::time::Duration::from_millis);

    let mut overall: Option<(F, WitnessInput<F>, RegionQuantities<F>)> = None;
    let mut budget_hit = false;
    let batch = rayon::current_num_threads().max(1) * 2;
    let mut restart = 0usize;
    'outer: while restart < cfg.restarts {
        // the first batch always runs so a result exists to return
        if restart > 0 {
            if let Some(limit) = deadline {
                if start.elapsed() > limit {
                    budget_hit = true;
                    break;
                }
            }
        }
        let hi = (restart + batch).min(cfg.restarts);
        let results: Vec<(F, WitnessInput<F>, RegionQuantities<F>)> = (restart..hi)
            .into_par_iter()
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(r as u64 + 1);
                let mut point: Vec<Vec<F>> = rows
                    .iter()
                    .map(|&len| dirichlet_row::<F>(&mut rng, len))
                    .collect();
                if r == 0 {
                    // structured seed: uniform everywhere
                    for (row, &len) in point.iter_mut().zip(&rows) {
                        let w = F::one() / F::from_usize(len).unwrap();
                        *row = vec![w; len];
                    }
                } else {
                    point[0] = grid[r % grid.len()].clone();
                }
                let (start, _, _) = eval_point(&point);
                let best = refine_point(&mut point, start, cfg.refine_steps, |pt| eval_point(pt).0);
                // rejected moves are reverted, so `point` holds the best state
                let (val, input, q) = eval_point(&point);
                debug_assert!(val >= best - real::<F>(1e-12));
                (val, input, q)
            })
            .collect();
        for (val, input, q) in results {
            let better = overall.as_ref().map_or(true, |(b, _, _)| val > *b);
            if better {
                overall = Some((val, input, q));
            }
            if let (Some(target), Some((b, _, _))) = (stop_at, overall.as_ref()) {
                if *b >= target {
                    break 'outer;
                }
            }
        }
        restart = hi;
    }
    for seed_point in extra_seeds {
        if seed_point.iter().map(Vec::len).ne(rows.iter().copied()) {
            continue;
        }
        let mut point = seed_point.clone();
        let (start, _, _) = eval_point(&point);
        refine_point(&mut point, start, cfg.refine_steps, |pt| eval_point(pt).0);
        let (val, input, q) = eval_point(&point);
        if overall.as_ref().map_or(true, |(b, _, _)| val > *b) {
            overall = Some((val, input, q));
        }
    }
    let (val, input, q) = overall.expect("at least one restart");
    (input, q, val, budget_hit)
}

fn family_for<F: Real>(
    bound: BoundId,
    channel: &RelayChannel<F>,
    cfg: &SearchConfig,
) -> Family {
    let k = channel.nx() * channel.ns();
    if bound.needs_v() {
        let (ucap, vcap) = if bound.is_inner() {
            (k + 3, k * k + 4 * k + 3)
        } else {
            let kz = channel.nz() * k;
            (kz + 3, kz * kz + 4 * kz + 3)
        };
        Family::WithV {
            nu: cfg.cap(ucap, cfg.max_u),
            nv: cfg.cap(vcap, cfg.max_v),
            ns: channel.ns(),
            nx: channel.nx(),
        }
    } else {
        let ucap = if bound.is_inner() { k + 3 } else { channel.nz() * k + 3 };
        Family::Plain { nu: cfg.cap(ucap, cfg.max_u), ns: channel.ns(), nx: channel.nx() }
    }
}

fn guard_class_nl<F: Real>(bound: BoundId, channel: &RelayChannel<F>) -> Result<(), RegionError> {
    if bound.requires_class_nl() {
        let report = channel.classify(real(crate::prob::CLASSIFY_TOL));
        if !report.class_nl {
            return Err(RegionError::NotClassNl {
                bound: bound.name().into(),
                residual: report.residual_class_nl.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(())
}

fn search_membership<F: Real>(
    bound: BoundId,
    channel: &RelayChannel<F>,
    t: RateTriple<F>,
    cfg: &SearchConfig,
) -> Result<SearchResult<F>, RegionError> {
    cfg.validate()?;
    guard_class_nl(bound, channel)?;
    let family = family_for(bound, channel, cfg);
    let objective = |q: &RegionQuantities<F>| constraint_check_at(bound, q, t).min_slack();
    let (input, q, best, budget_hit) =
        optimize_family(&family, channel, cfg, objective, Some(F::zero()));
    let report = constraint_check_at(bound, &q, t);
    let witness = Witness { input, triple: t, slacks: report.slacks };
    if budget_hit && best < -real::<F>(SLACK_TOL) {
        return Ok(SearchResult::BudgetExceeded(witness));
    }
    if best >= -real::<F>(SLACK_TOL) {
        Ok(SearchResult::Member(witness))
    } else {
        Ok(SearchResult::NotFound(witness))
    }
}

/// Searches the inner bound's distribution class for a witness that `t` is
/// achievable. A returned witness is a sound membership certificate;
/// `NotFound` is not a disproof.
pub fn inner_membership<F: Real>(
    bound: BoundId,
    channel: &RelayChannel<F>,
    t: RateTriple<F>,
    cfg: &SearchConfig,
) -> Result<SearchResult<F>, RegionError> {
    if !bound.is_inner() {
        return Err(RegionError::WrongBoundKind {
            op: "inner_membership".into(),
            expected: "inner".into(),
            bound: bound.name().into(),
        });
    }
    search_membership(bound, channel, t, cfg)
}

/// Searches the outer bound's distribution class for a distribution
/// admitting `t`. Since outer membership quantifies over the whole class,
/// a negative result here only certifies exclusion from the searched inner
/// approximation of the outer bound.
pub fn outer_violation<F: Real>(
    bound: BoundId,
    channel: &RelayChannel<F>,
    t: RateTriple<F>,
    cfg: &SearchConfig,
) -> Result<SearchResult<F>, RegionError> {
    if bound.is_inner() {
        return Err(RegionError::WrongBoundKind {
            op: "outer_violation".into(),
            expected: "outer".into(),
            bound: bound.name().into(),
        });
    }
    search_membership(bound, channel, t, cfg)
}

/// One row of a boundary trace.
#[derive(Debug, Clone, Copy)]
pub struct TracePoint<F> {
    pub r0: F,
    pub r1: F,
    pub re: F,
    /// Minimum constraint slack of the emitted triple at its witness.
    pub slack_min: F,
}

/// Boundary trace evaluated over a fixed set of witness joints: for each
/// `R0` on a grid up to the witnesses' maximum, the largest `R1` any witness
/// admits, then the largest `Re` at that `(R0, R1)`.
pub fn trace_over_quantities<F: Real>(
    bound: BoundId,
    witnesses: &[RegionQuantities<F>],
    r0_grid: usize,
    slice: Slice,
) -> Vec<TracePoint<F>> {
    assert!(r0_grid >= 2, "r0_grid must be >= 2");
    let r0_top = match slice {
        Slice::R0Zero => F::zero(),
        _ => witnesses.iter().map(|q| q.r0_cap(bound)).fold(F::zero(), F::max),
    };
    let tol = real::<F>(SLACK_TOL);
    let mut points = Vec::with_capacity(r0_grid);
    for k in 0..r0_grid {
        let r0 = if matches!(slice, Slice::R0Zero) {
            F::zero()
        } else {
            r0_top * F::from_usize(k).unwrap() / F::from_usize(r0_grid - 1).unwrap()
        };
        let mut r1_best = F::zero();
        for q in witnesses {
            if let Some(r1) = q.r1_max(bound, r0) {
                let r1 = match slice {
                    // perfect secrecy: R1 realizable only up to the Re cap
                    Slice::ReEqR1 => r1.min(q.re_max(bound, r1)),
                    _ => r1,
                };
                r1_best = r1_best.max(r1);
            }
        }
        let mut re_best = F::zero();
        let mut slack_min = F::neg_infinity();
        for q in witnesses {
            match q.r1_max(bound, r0) {
                Some(cap) if cap + tol >= r1_best => {}
                _ => continue,
            }
            let re = match slice {
                Slice::ReEqR1 => r1_best,
                _ => q.re_max(bound, r1_best),
            };
            if re > re_best || slack_min == F::neg_infinity() {
                if matches!(slice, Slice::ReEqR1) && q.re_max(bound, r1_best) + tol < r1_best {
                    continue;
                }
                re_best = re.max(re_best);
                let triple = RateTriple { r0, r1: r1_best, re: re_best };
                slack_min = constraint_check_at(bound, q, triple).min_slack();
            }
        }
        points.push(TracePoint { r0, r1: r1_best, re: re_best, slack_min });
    }
    points
}

/// Result of a searched boundary trace: the grid points, the witness
/// distributions that generated them, and whether any search leg ran out of
/// wall-clock budget (in which case the trace covers best-so-far witnesses).
pub struct Trace<F> {
    pub points: Vec<TracePoint<F>>,
    pub witnesses: Vec<Witness<F>>,
    pub budget_exceeded: bool,
}

/// Searches input distributions and emits the boundary trace of `bound`:
/// for each `R0` on a grid of the searched maximum, the maximum `R1` found
/// and the maximum `Re` at that `(R0, R1)`.
pub fn boundary_trace<F: Real>(
    bound: BoundId,
    channel: &RelayChannel<F>,
    cfg: &SearchConfig,
    r0_grid: usize,
    slice: Slice,
) -> Result<Trace<F>, RegionError> {
    if r0_grid < 2 {
        return Err(RegionError::BadConfig("r0-grid must be >= 2".into()));
    }
    cfg.validate()?;
    guard_class_nl(bound, channel)?;
    let family = family_for(bound, channel, cfg);
    let tol = real::<F>(SLACK_TOL);
    let mut budget_exceeded = false;

    // top of the R0 axis; its witness seeds every later search leg so the
    // feasible needle at high R0 is always reachable
    let (r0_top, top_seed) = if matches!(slice, Slice::R0Zero) {
        (F::zero(), None)
    } else {
        let (input, q, _, hit) =
            optimize_family(&family, channel, cfg, |q: &RegionQuantities<F>| q.r0_cap(bound), None);
        budget_exceeded |= hit;
        let seed = family.point_of(&input);
        (q.r0_cap(bound).max(F::zero()), seed)
    };

    let mut points = Vec::with_capacity(r0_grid);
    let mut witnesses = Vec::with_capacity(r0_grid);
    let mut warm: Option<Vec<Vec<F>>> = None;
    for k in 0..r0_grid {
        let r0 = if matches!(slice, Slice::R0Zero) {
            F::zero()
        } else {
            r0_top * F::from_usize(k).unwrap() / F::from_usize(r0_grid - 1).unwrap()
        };
        let mut seeds: Vec<Vec<Vec<F>>> = Vec::new();
        seeds.extend(top_seed.iter().cloned());
        seeds.extend(warm.iter().cloned());
        // widest R1 any feasible distribution admits at this R0 (on the
        // perfect-secrecy slice, only up to the equivocation ceiling)
        let r1_objective = |q: &RegionQuantities<F>| match q.r1_max(bound, r0) {
            Some(r1) => match slice {
                Slice::ReEqR1 => r1.min(q.re_max(bound, r1)),
                _ => r1,
            },
            None => F::neg_infinity(),
        };
        let (input1, q1, r1_val, hit1) =
            optimize_family_seeded(&family, channel, cfg, r1_objective, None, &seeds);
        budget_exceeded |= hit1;
        let r1 = r1_val.max(F::zero());
        // largest Re at the fixed (R0, R1) corner
        let mut re_seeds = seeds.clone();
        re_seeds.extend(family.point_of(&input1));
        let re_objective = |q: &RegionQuantities<F>| match q.r1_max(bound, r0) {
            Some(cap) if cap + tol >= r1 => q.re_max(bound, r1),
            _ => F::neg_infinity(),
        };
        let (input2, q2, re_val, hit2) =
            optimize_family_seeded(&family, channel, cfg, re_objective, None, &re_seeds);
        budget_exceeded |= hit2;
        let (best_input, best_q, re) = if re_val > F::neg_infinity() {
            (input2, q2, re_val.max(F::zero()))
        } else {
            let re = q1.re_max(bound, r1).max(F::zero());
            (input1, q1, re)
        };
        let re = match slice {
            Slice::ReEqR1 => r1,
            _ => re,
        };
        let triple = RateTriple { r0, r1, re };
        let report = constraint_check_at(bound, &best_q, triple);
        warm = family.point_of(&best_input);
        points.push(TracePoint { r0, r1, re, slack_min: report.min_slack() });
        witnesses.push(Witness { input: best_input, triple, slacks: report.slacks });
    }
    Ok(Trace { points, witnesses, budget_exceeded })
}

/// Lower and upper bounds on the secrecy capacity of the channel.
#[derive(Debug, Clone)]
pub struct SecrecyBounds<F> {
    pub lower: F,
    pub upper: F,
    pub lower_witness: Witness<F>,
}

/// Encoder class for the secrecy-capacity search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncoderMode {
    Deterministic,
    Stochastic,
}

impl EncoderMode {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "det" | "deterministic" => Some(EncoderMode::Deterministic),
            "sto" | "stochastic" => Some(EncoderMode::Stochastic),
            _ => None,
        }
    }
}

/// Best secrecy rate found by search: the lower bound maximizes the
/// difference of receiver and relay informations over the inner class
/// (`[I(X;Y|US) - I(X;Z|US)]+`, or the `V` form for stochastic encoders);
/// the upper bound maximizes `I(X;Y|ZS)` over `(X,S)` distributions.
pub fn secrecy_capacity_bounds<F: Real>(
    channel: &RelayChannel<F>,
    mode: EncoderMode,
    cfg: &SearchConfig,
) -> Result<SecrecyBounds<F>, RegionError> {
    cfg.validate()?;
    let (lower_family, lower_obj): (Family, Box<dyn Fn(&RegionQuantities<F>) -> F + Sync>) =
        match mode {
            EncoderMode::Deterministic => (
                family_for(BoundId::DIn, channel, cfg),
                Box::new(|q: &RegionQuantities<F>| {
                    positive_part(q.i_x_y_given_us - q.i_x_z_given_us)
                }),
            ),
            EncoderMode::Stochastic => (
                family_for(BoundId::SIn, channel, cfg),
                Box::new(|q: &RegionQuantities<F>| {
                    positive_part(q.i_v_y_given_us - q.i_v_z_given_us)
                }),
            ),
        };
    let (lower_input, _lower_q, lower, _) =
        optimize_family(&lower_family, channel, cfg, lower_obj, None);

    let upper_family = Family::XsOnly { ns: channel.ns(), nx: channel.nx() };
    let upper_obj = |q: &RegionQuantities<F>| q.i_x_y_given_zus;
    let (_, _, mut upper, _) = optimize_family(&upper_family, channel, cfg, upper_obj, None);

    // the lower witness, restricted to its (x,s) sections given the
    // auxiliaries, also lower-bounds the upper objective; fold those in so
    // that lower <= upper holds regardless of search luck
    for section in xs_sections(&lower_input) {
        let joint = make_joint(channel, &section).expect("section over channel alphabets");
        let q = RegionQuantities::from_joint(&joint);
        upper = upper.max(q.i_x_y_given_zus);
    }

    let triple = RateTriple { r0: F::zero(), r1: lower, re: lower };
    let slacks = vec![("secrecy rate", lower)];
    Ok(SecrecyBounds { lower, upper, lower_witness: Witness { input: lower_input, triple, slacks } })
}

/// The `(x,s)` conditional sections of an input given each auxiliary value
/// with positive mass, as `|U| = 1` inputs.
fn xs_sections<F: Real>(input: &WitnessInput<F>) -> Vec<AuxInput<F>> {
    let mut out = Vec::new();
    match input {
        WitnessInput::Plain(inp) => {
            for u in 0..inp.nu() {
                let mut mass = F::zero();
                for s in 0..inp.ns() {
                    for x in 0..inp.nx() {
                        mass = mass + inp.prob(u, s, x);
                    }
                }
                if mass > real(1e-12) {
                    let mut p = vec![F::zero(); inp.ns() * inp.nx()];
                    for s in 0..inp.ns() {
                        for x in 0..inp.nx() {
                            p[s * inp.nx() + x] = inp.prob(u, s, x) / mass;
                        }
                    }
                    out.push(renormalized_input(1, inp.ns(), inp.nx(), p));
                }
            }
        }
        WitnessInput::WithV(inp) => {
            for u in 0..inp.nu() {
                let mut mass = F::zero();
                for v in 0..inp.nv() {
                    for s in 0..inp.ns() {
                        mass = mass + inp.prob_uvs(u, v, s);
                    }
                }
                if mass > real(1e-12) {
                    let mut p = vec![F::zero(); inp.ns() * inp.nx()];
                    for v in 0..inp.nv() {
                        for s in 0..inp.ns() {
                            for x in 0..inp.nx() {
                                p[s * inp.nx() + x] =
                                    p[s * inp.nx() + x] + inp.prob(u, v, s, x) / mass;
                            }
                        }
                    }
                    out.push(renormalized_input(1, inp.ns(), inp.nx(), p));
                }
            }
        }
    }
    out
}

/// Searches for the largest `Re` the bound admits anywhere (at `R0 = 0`).
pub fn max_re_search<F: Real>(
    bound: BoundId,
    channel: &RelayChannel<F>,
    cfg: &SearchConfig,
) -> Result<F, RegionError> {
    cfg.validate()?;
    guard_class_nl(bound, channel)?;
    let family = family_for(bound, channel, cfg);
    let objective = |q: &RegionQuantities<F>| {
        let r1 = q.r1_max(bound, F::zero()).unwrap_or(F::zero());
        q.re_max(bound, r1)
    };
    let (_, _, best, _) = optimize_family(&family, channel, cfg, objective, None);
    Ok(best)
}
