//! Named invariant suites runnable from the CLI, plus seeded random
//! generators for channels and inputs shared with the test suites.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::gaussian::{cap, GaussianSpec};
use crate::info::{cond_mutual_information, delta_gap, zeta, Var, VarSet};
use crate::prob::{make_joint, AuxInput, RelayChannel};
use crate::regions::{constraint_check_at, BoundId, RateTriple, RegionQuantities};
use crate::Real;

/// Random stochastic tensor channel with the given alphabet sizes.
pub fn random_channel<F: Real>(
    rng: &mut ChaCha8Rng,
    nx: usize,
    ns: usize,
    ny: usize,
    nz: usize,
) -> RelayChannel<F> {
    let mut g = vec![F::zero(); nx * ns * ny * nz];
    for row in g.chunks_mut(ny * nz) {
        let mut sum = 0.0f64;
        let mut raw = vec![0.0f64; row.len()];
        for e in raw.iter_mut() {
            *e = -(rng.random::<f64>().max(1e-12)).ln();
            sum += *e;
        }
        for (slot, e) in row.iter_mut().zip(raw) {
            *slot = F::from_f64(e / sum).unwrap();
        }
    }
    RelayChannel::from_tensor(nx, ns, ny, nz, g).expect("rows normalized")
}

/// Random joint input distribution over `(u,s,x)`.
pub fn random_input<F: Real>(
    rng: &mut ChaCha8Rng,
    nu: usize,
    ns: usize,
    nx: usize,
) -> AuxInput<F> {
    let mut raw = vec![0.0f64; nu * ns * nx];
    let mut sum = 0.0;
    for e in raw.iter_mut() {
        *e = -(rng.random::<f64>().max(1e-12)).ln();
        sum += *e;
    }
    let p: Vec<F> = raw.into_iter().map(|e| F::from_f64(e / sum).unwrap()).collect();
    AuxInput::new(nu, ns, nx, p).expect("normalized")
}

/// Channel factored as `gamma_Y(y|x,s) * q(z|y,s)` — reversely degraded by
/// construction.
pub fn random_reversely_degraded<F: Real>(
    rng: &mut ChaCha8Rng,
    nx: usize,
    ns: usize,
    ny: usize,
    nz: usize,
) -> RelayChannel<F> {
    let a = random_rows(rng, nx * ns, ny);
    let b = random_rows(rng, ny * ns, nz);
    let mut g = vec![F::zero(); nx * ns * ny * nz];
    for x in 0..nx {
        for s in 0..ns {
            for y in 0..ny {
                for z in 0..nz {
                    g[((x * ns + s) * ny + y) * nz + z] =
                        F::from_f64(a[(x * ns + s) * ny + y] * b[(y * ns + s) * nz + z]).unwrap();
                }
            }
        }
    }
    RelayChannel::from_tensor(nx, ns, ny, nz, g).expect("product of stochastic rows")
}

/// Channel factored as `gamma_Z(z|x,s) * q(y|z,s)` — degraded by
/// construction.
pub fn random_degraded<F: Real>(
    rng: &mut ChaCha8Rng,
    nx: usize,
    ns: usize,
    ny: usize,
    nz: usize,
) -> RelayChannel<F> {
    let a = random_rows(rng, nx * ns, nz);
    let b = random_rows(rng, nz * ns, ny);
    let mut g = vec![F::zero(); nx * ns * ny * nz];
    for x in 0..nx {
        for s in 0..ns {
            for y in 0..ny {
                for z in 0..nz {
                    g[((x * ns + s) * ny + y) * nz + z] =
                        F::from_f64(a[(x * ns + s) * nz + z] * b[(z * ns + s) * ny + y]).unwrap();
                }
            }
        }
    }
    RelayChannel::from_tensor(nx, ns, ny, nz, g).expect("product of stochastic rows")
}

fn random_rows(rng: &mut ChaCha8Rng, rows: usize, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; rows * len];
    for row in out.chunks_mut(len) {
        let mut sum = 0.0;
        for e in row.iter_mut() {
            *e = -(rng.random::<f64>().max(1e-12)).ln();
            sum += *e;
        }
        for e in row.iter_mut() {
            *e /= sum;
        }
    }
    out
}

/// One named check with its verdict and detail line.
#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Result of one invariant suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckLine>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub const SUITES: [&str; 5] = ["prob", "info", "regions", "gaussian", "all"];

/// Runs a named invariant suite. Returns `None` for an unknown name.
pub fn run_suite(name: &str, seed: u64) -> Option<Vec<SuiteReport>> {
    match name {
        "prob" => Some(vec![prob_suite(seed)]),
        "info" => Some(vec![info_suite(seed)]),
        "regions" => Some(vec![regions_suite(seed)]),
        "gaussian" => Some(vec![gaussian_suite(seed)]),
        "all" => Some(vec![
            prob_suite(seed),
            info_suite(seed),
            regions_suite(seed),
            gaussian_suite(seed),
        ]),
        _ => None,
    }
}

fn line(name: &str, passed: bool, detail: String) -> CheckLine {
    CheckLine { name: name.into(), passed, detail }
}

fn vsets() -> (VarSet, VarSet, VarSet, VarSet, VarSet, VarSet) {
    (
        VarSet::new(&[Var::U]),
        VarSet::new(&[Var::S]),
        VarSet::new(&[Var::X]),
        VarSet::new(&[Var::Y]),
        VarSet::new(&[Var::Z]),
        VarSet::new(&[Var::U, Var::S]),
    )
}

fn prob_suite(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mass_dev: f64 = 0.0;
    let mut marg_dev: f64 = 0.0;
    let mut nl_ok = true;
    for _ in 0..40 {
        let (nx, ns, ny, nz) =
            (rng.random_range(2..4), rng.random_range(1..4), rng.random_range(2..4), rng.random_range(2..4));
        let nu = rng.random_range(1..4);
        let ch = random_channel::<f64>(&mut rng, nx, ns, ny, nz);
        let input = random_input::<f64>(&mut rng, nu, ns, nx);
        let joint = make_joint(&ch, &input).unwrap();
        let total: f64 = joint.flat().iter().sum();
        mass_dev = mass_dev.max((total - 1.0).abs());
        // axis marginals against direct summation
        for axis in 0..6 {
            let dims = joint.dims();
            let mut direct = vec![0.0; dims[axis]];
            let mut idx = [0usize; 6];
            for &v in joint.flat() {
                direct[idx[axis]] += v;
                for a in (0..6).rev() {
                    idx[a] += 1;
                    if idx[a] < dims[a] {
                        break;
                    }
                    idx[a] = 0;
                }
            }
            for (d, c) in direct.iter().zip(joint.axis_marginal(axis)) {
                marg_dev = marg_dev.max((d - c).abs());
            }
        }
        if ns == 1 {
            let r = ch.classify(1e-9);
            nl_ok &= r.class_nl && r.residual_class_nl == 0.0;
        }
    }
    SuiteReport {
        suite: "prob".into(),
        checks: vec![
            line("joint mass within 1e-11", mass_dev <= 1e-11, format!("max deviation {mass_dev:e}")),
            line("cached marginals within 1e-12", marg_dev <= 1e-12, format!("max deviation {marg_dev:e}")),
            line("|S| = 1 channels are class NL", nl_ok, String::new()),
        ],
    }
}

fn info_suite(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let (u, s, x, y, z, us) = vsets();
    let mut chain_dev: f64 = 0.0;
    let mut dp_worst: f64 = 0.0;
    let mut zeta_dev: f64 = 0.0;
    let mut property_worst: f64 = f64::NEG_INFINITY;
    for _ in 0..60 {
        let (nx, ns, ny, nz) =
            (rng.random_range(2..4), rng.random_range(1..4), rng.random_range(2..4), rng.random_range(2..4));
        let nu = rng.random_range(1..4);
        let ch = random_channel::<f64>(&mut rng, nx, ns, ny, nz);
        let input = random_input::<f64>(&mut rng, nu, ns, nx);
        let joint = make_joint(&ch, &input).unwrap();
        let mi = |a, b, c| cond_mutual_information(&joint, a, b, c).unwrap();
        let yz = y.union(z);
        chain_dev = chain_dev.max((mi(x, yz, us) - mi(x, y, us) - delta_gap(&joint)).abs());
        dp_worst = dp_worst.max(
            mi(u, yz, VarSet::EMPTY) - mi(x.union(s), yz, VarSet::EMPTY),
        );
        let xs = x.union(s);
        let direct = zeta(&joint);
        let alt = mi(xs, y, u) - mi(xs, z, u) - (mi(x, y, us) - mi(x, z, us));
        zeta_dev = zeta_dev.max((direct - alt).abs());
        let h_s_z = crate::info::cond_entropy(&joint, s, z).unwrap();
        let i_xs_y_z = mi(xs, y, z);
        property_worst = property_worst.max(direct - h_s_z.min(i_xs_y_z));
    }
    SuiteReport {
        suite: "info".into(),
        checks: vec![
            line("chain rule within 1e-10", chain_dev <= 1e-10, format!("max deviation {chain_dev:e}")),
            line("data processing within 1e-10", dp_worst <= 1e-10, format!("worst excess {dp_worst:e}")),
            line("zeta forms agree within 1e-10", zeta_dev <= 1e-10, format!("max deviation {zeta_dev:e}")),
            line(
                "zeta <= min{H(S|Z), I(XS;Y|Z)} + 1e-10",
                property_worst <= 1e-10,
                format!("worst excess {property_worst:e}"),
            ),
        ],
    }
}

fn regions_suite(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let mut violations = 0usize;
    let mut checked = 0usize;
    let mut rd_delta: f64 = 0.0;
    for _ in 0..25 {
        let (nx, ns, ny, nz) =
            (rng.random_range(2..4), rng.random_range(1..4), rng.random_range(2..4), rng.random_range(2..4));
        let nu = rng.random_range(1..4);
        let ch = random_channel::<f64>(&mut rng, nx, ns, ny, nz);
        let input = random_input::<f64>(&mut rng, nu, ns, nx);
        let joint = make_joint(&ch, &input).unwrap();
        let q = RegionQuantities::from_joint(&joint);
        for _ in 0..20 {
            let t = RateTriple {
                r0: rng.random::<f64>() * 1.2,
                r1: rng.random::<f64>() * 1.5,
                re: rng.random::<f64>() * 1.2,
            };
            checked += 1;
            let inner = constraint_check_at(BoundId::DInTilde, &q, t);
            let outer = constraint_check_at(BoundId::DOutTilde, &q, t);
            if inner.ok && !outer.ok {
                violations += 1;
            }
        }
        let rd = random_reversely_degraded::<f64>(&mut rng, nx, ns, ny, nz);
        let joint = make_joint(&rd, &input).unwrap();
        rd_delta = rd_delta.max(delta_gap(&joint).abs());
    }
    SuiteReport {
        suite: "regions".into(),
        checks: vec![
            line(
                "per-distribution inner set contained in outer set",
                violations == 0,
                format!("{violations} violations over {checked} samples"),
            ),
            line(
                "reversely degraded channels have zero inner/outer gap",
                rd_delta <= 1e-10,
                format!("max delta {rd_delta:e}"),
            ),
        ],
    }
}

fn gaussian_suite(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(3));
    let mut tilde_ok = true;
    let mut inclusion_ok = true;
    let mut concave_ok = true;
    for _ in 0..200 {
        let spec = GaussianSpec::new(
            rng.random::<f64>() * 10.0,
            rng.random::<f64>() * 10.0,
            0.1 + rng.random::<f64>() * 5.0,
            0.1 + rng.random::<f64>() * 5.0,
            (rng.random::<f64>() - 0.5) * 1.98,
        )
        .unwrap();
        tilde_ok &= spec.n1_tilde() <= spec.n1 + 1e-12;
        for k in 0..11 {
            let theta = k as f64 / 10.0;
            for j in 0..6 {
                let eta = j as f64 / 5.0;
                let r0 = spec.r0_cap(theta, eta);
                let r1 = spec.r1_cap_inner(theta);
                inclusion_ok &= r1 <= spec.r1_cap_outer(theta) + 1e-9;
                inclusion_ok &= r0 + r1 <= spec.sum_cap(theta, eta) + 1e-9;
            }
        }
        let a = rng.random::<f64>() * 10.0;
        let b = rng.random::<f64>() * 10.0;
        concave_ok &= cap((a + b) / 2.0).unwrap() >= (cap(a).unwrap() + cap(b).unwrap()) / 2.0 - 1e-12;
    }
    SuiteReport {
        suite: "gaussian".into(),
        checks: vec![
            line("effective outer noise never exceeds N1", tilde_ok, String::new()),
            line("inner corners satisfy outer constraints", inclusion_ok, String::new()),
            line("cap is midpoint-concave", concave_ok, String::new()),
        ],
    }
}
