//! Strict JSON file formats for channels and input distributions, plus the
//! CSV emitters for region traces.
//!
//! Channel files: `{"X":int,"S":int,"Y":int,"Z":int,"gamma":[[[[...]]]]}`
//! with `gamma[x][s][y][z]`. Input files: `{"U":int,"p":[[[...]]]}` with
//! `p[u][s][x]`, or `{"U":int,"V":int,"p":[[[[...]]]]}` with `p[u][v][s][x]`
//! for two-auxiliary inputs (the tensor must factor as
//! `p(u,v,s) * p(x|v)`). Unknown keys are rejected. All file IO is `f64`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prob::ProbError;
use crate::regions::TracePoint;
use crate::{AuxInput, AuxInputV, Channel, GaussianSpec, Input, InputV, RelayChannel};

/// Tolerance for the `p(u,v,s,x) = p(u,v,s) p(x|v)` factorization check.
pub const FACTORIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error("p(u,v,s,x) does not factor as p(u,v,s) * p(x|v): residual {residual:e} exceeds {tol:e}")]
    NotFactorized { residual: f64, tol: f64 },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    #[serde(rename = "X")]
    x: usize,
    #[serde(rename = "S")]
    s: usize,
    #[serde(rename = "Y")]
    y: usize,
    #[serde(rename = "Z")]
    z: usize,
    gamma: Vec<Vec<Vec<Vec<f64>>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputFile {
    #[serde(rename = "U")]
    u: usize,
    #[serde(rename = "V", skip_serializing_if = "Option::is_none")]
    v: Option<usize>,
    p: serde_json::Value,
}

/// An input file can carry either input kind.
#[derive(Debug, Clone)]
pub enum ParsedInput {
    Plain(Input),
    WithV(InputV),
}

pub fn parse_channel(text: &str) -> Result<Channel, IoError> {
    let file: ChannelFile = serde_json::from_str(text)?;
    let (nx, ns, ny, nz) = (file.x, file.s, file.y, file.z);
    let mut gamma = Vec::with_capacity(nx * ns * ny * nz);
    if file.gamma.len() != nx {
        return Err(IoError::Shape(format!("gamma has {} x-slices, X = {nx}", file.gamma.len())));
    }
    for (x, sx) in file.gamma.iter().enumerate() {
        if sx.len() != ns {
            return Err(IoError::Shape(format!("gamma[{x}] has {} s-slices, S = {ns}", sx.len())));
        }
        for (s, sy) in sx.iter().enumerate() {
            if sy.len() != ny {
                return Err(IoError::Shape(format!(
                    "gamma[{x}][{s}] has {} y-rows, Y = {ny}",
                    sy.len()
                )));
            }
            for (y, sz) in sy.iter().enumerate() {
                if sz.len() != nz {
                    return Err(IoError::Shape(format!(
                        "gamma[{x}][{s}][{y}] has {} z-entries, Z = {nz}",
                        sz.len()
                    )));
                }
                gamma.extend_from_slice(sz);
            }
        }
    }
    Ok(RelayChannel::from_tensor(nx, ns, ny, nz, gamma)?)
}

pub fn write_channel(channel: &Channel) -> String {
    let (nx, ns, ny, nz) = (channel.nx(), channel.ns(), channel.ny(), channel.nz());
    let gamma: Vec<Vec<Vec<Vec<f64>>>> = (0..nx)
        .map(|x| {
            (0..ns)
                .map(|s| {
                    (0..ny)
                        .map(|y| (0..nz).map(|z| channel.gamma(x, s, y, z)).collect())
                        .collect()
                })
                .collect()
        })
        .collect();
    let file = ChannelFile { x: nx, s: ns, y: ny, z: nz, gamma };
    serde_json::to_string_pretty(&file).expect("channel serializes")
}

fn nested3(p: &serde_json::Value) -> Result<Vec<Vec<Vec<f64>>>, IoError> {
    serde_json::from_value(p.clone())
        .map_err(|e| IoError::Shape(format!("expected 3-level nested p[u][s][x]: {e}")))
}

fn nested4(p: &serde_json::Value) -> Result<Vec<Vec<Vec<Vec<f64>>>>, IoError> {
    serde_json::from_value(p.clone())
        .map_err(|e| IoError::Shape(format!("expected 4-level nested p[u][v][s][x]: {e}")))
}

pub fn parse_input(text: &str) -> Result<ParsedInput, IoError> {
    let file: InputFile = serde_json::from_str(text)?;
    match file.v {
        None => {
            let nested = nested3(&file.p)?;
            if nested.len() != file.u {
                return Err(IoError::Shape(format!("p has {} u-slices, U = {}", nested.len(), file.u)));
            }
            let ns = nested.first().map_or(0, |s| s.len());
            let nx = nested.first().and_then(|s| s.first()).map_or(0, |x| x.len());
            let mut flat = Vec::with_capacity(file.u * ns * nx);
            for (u, su) in nested.iter().enumerate() {
                if su.len() != ns {
                    return Err(IoError::Shape(format!("p[{u}] has {} s-slices, expected {ns}", su.len())));
                }
                for (s, sx) in su.iter().enumerate() {
                    if sx.len() != nx {
                        return Err(IoError::Shape(format!(
                            "p[{u}][{s}] has {} x-entries, expected {nx}",
                            sx.len()
                        )));
                    }
                    flat.extend_from_slice(sx);
                }
            }
            Ok(ParsedInput::Plain(AuxInput::new(file.u, ns, nx, flat)?))
        }
        Some(nv) => {
            let nested = nested4(&file.p)?;
            if nested.len() != file.u {
                return Err(IoError::Shape(format!("p has {} u-slices, U = {}", nested.len(), file.u)));
            }
            let ns = nested.first().and_then(|v| v.first()).map_or(0, |s| s.len());
            let nx = nested
                .first()
                .and_then(|v| v.first())
                .and_then(|s| s.first())
                .map_or(0, |x| x.len());
            let nu = file.u;
            let mut p_uvsx = vec![0.0; nu * nv * ns * nx];
            for (u, vslice) in nested.iter().enumerate() {
                if vslice.len() != nv {
                    return Err(IoError::Shape(format!("p[{u}] has {} v-slices, V = {nv}", vslice.len())));
                }
                for (v, sslice) in vslice.iter().enumerate() {
                    if sslice.len() != ns {
                        return Err(IoError::Shape(format!(
                            "p[{u}][{v}] has {} s-slices, expected {ns}",
                            sslice.len()
                        )));
                    }
                    for (s, xrow) in sslice.iter().enumerate() {
                        if xrow.len() != nx {
                            return Err(IoError::Shape(format!(
                                "p[{u}][{v}][{s}] has {} x-entries, expected {nx}",
                                xrow.len()
                            )));
                        }
                        for (x, &val) in xrow.iter().enumerate() {
                            p_uvsx[((u * nv + v) * ns + s) * nx + x] = val;
                        }
                    }
                }
            }
            // decompose into p(u,v,s) and p(x|v), then verify the factorization
            let mut p_uvs = vec![0.0; nu * nv * ns];
            let mut p_v = vec![0.0; nv];
            let mut p_vx = vec![0.0; nv * nx];
            for u in 0..nu {
                for v in 0..nv {
                    for s in 0..ns {
                        for x in 0..nx {
                            let val = p_uvsx[((u * nv + v) * ns + s) * nx + x];
                            p_uvs[(u * nv + v) * ns + s] += val;
                            p_v[v] += val;
                            p_vx[v * nx + x] += val;
                        }
                    }
                }
            }
            let mut p_x_given_v = vec![0.0; nv * nx];
            for v in 0..nv {
                for x in 0..nx {
                    p_x_given_v[v * nx + x] = if p_v[v] > 0.0 {
                        p_vx[v * nx + x] / p_v[v]
                    } else if x == 0 {
                        1.0
                    } else {
                        0.0
                    };
                }
            }
            let mut residual = 0.0f64;
            for u in 0..nu {
                for v in 0..nv {
                    for s in 0..ns {
                        for x in 0..nx {
                            let lhs = p_uvsx[((u * nv + v) * ns + s) * nx + x];
                            let rhs = p_uvs[(u * nv + v) * ns + s] * p_x_given_v[v * nx + x];
                            residual = residual.max((lhs - rhs).abs());
                        }
                    }
                }
            }
            if residual > FACTORIZATION_TOL {
                return Err(IoError::NotFactorized { residual, tol: FACTORIZATION_TOL });
            }
            Ok(ParsedInput::WithV(AuxInputV::new(nu, nv, ns, nx, p_uvs, p_x_given_v)?))
        }
    }
}

pub fn write_input(input: &Input) -> String {
    let nested: Vec<Vec<Vec<f64>>> = (0..input.nu())
        .map(|u| {
            (0..input.ns())
                .map(|s| (0..input.nx()).map(|x| input.prob(u, s, x)).collect())
                .collect()
        })
        .collect();
    let file = InputFile { u: input.nu(), v: None, p: serde_json::to_value(nested).unwrap() };
    serde_json::to_string_pretty(&file).expect("input serializes")
}

pub fn write_input_v(input: &InputV) -> String {
    let nested: Vec<Vec<Vec<Vec<f64>>>> = (0..input.nu())
        .map(|u| {
            (0..input.nv())
                .map(|v| {
                    (0..input.ns())
                        .map(|s| (0..input.nx()).map(|x| input.prob(u, v, s, x)).collect())
                        .collect()
                })
                .collect()
        })
        .collect();
    let file =
        InputFile { u: input.nu(), v: Some(input.nv()), p: serde_json::to_value(nested).unwrap() };
    serde_json::to_string_pretty(&file).expect("input serializes")
}

/// CSV for region boundary traces: `bound,R0,R1,Re,slack_min`.
pub fn trace_csv(bound: &str, points: &[TracePoint<f64>]) -> String {
    let mut out = String::from("bound,R0,R1,Re,slack_min\n");
    for p in points {
        out.push_str(&format!("{},{},{},{},{}\n", bound, p.r0, p.r1, p.re, p.slack_min));
    }
    out
}

/// CSV for Gaussian sweeps: `region,theta,eta,R0,R1,Re`.
pub fn gaussian_csv(region: &str, points: &[crate::gaussian::GaussianPoint<f64>]) -> String {
    let mut out = String::from("region,theta,eta,R0,R1,Re\n");
    for p in points {
        out.push_str(&format!("{},{},{},{},{},{}\n", region, p.theta, p.eta, p.r0, p.r1, p.re));
    }
    out
}

/// Whether a Gaussian spec round-trips the CLI flags (used by the `gaussian`
/// subcommand's validation path).
pub fn gaussian_from_flags(
    p1: f64,
    p2: f64,
    n1: f64,
    n2: f64,
    rho: f64,
) -> Result<GaussianSpec<f64>, crate::gaussian::GaussianError> {
    GaussianSpec::new(p1, p2, n1, n2, rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_round_trip() {
        let g = vec![
            0.1, 0.2, 0.3, 0.4, 0.4, 0.3, 0.2, 0.1, 0.25, 0.25, 0.25, 0.25, 0.7, 0.1, 0.1, 0.1,
        ];
        let ch = RelayChannel::from_tensor(2, 2, 2, 2, g).unwrap();
        let text = write_channel(&ch);
        let back = parse_channel(&text).unwrap();
        assert_eq!(ch, back);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"{"X":1,"S":1,"Y":1,"Z":1,"gamma":[[[[1.0]]]],"extra":2}"#;
        assert!(matches!(parse_channel(text), Err(IoError::Json(_))));
        let text = r#"{"U":1,"p":[[[1.0]]],"note":"hi"}"#;
        assert!(matches!(parse_input(text), Err(IoError::Json(_))));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let text = r#"{"X":2,"S":1,"Y":1,"Z":1,"gamma":[[[[1.0]]]]}"#;
        assert!(matches!(parse_channel(text), Err(IoError::Shape(_))));
    }

    #[test]
    fn plain_input_round_trip() {
        let input = AuxInput::new(2, 2, 2, vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.05, 0.1, 0.1]).unwrap();
        let text = write_input(&input);
        match parse_input(&text).unwrap() {
            ParsedInput::Plain(back) => assert_eq!(input, back),
            _ => panic!("expected plain input"),
        }
    }

    #[test]
    fn v_input_round_trip_and_factorization_check() {
        let input = AuxInput::new(2, 2, 2, vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.05, 0.1, 0.1]).unwrap();
        let with_v = AuxInputV::from_aux_input_v_eq_x(&input);
        let text = write_input_v(&with_v);
        match parse_input(&text).unwrap() {
            ParsedInput::WithV(back) => {
                for u in 0..2 {
                    for v in 0..2 {
                        for s in 0..2 {
                            for x in 0..2 {
                                assert!((back.prob(u, v, s, x) - with_v.prob(u, v, s, x)).abs() < 1e-12);
                            }
                        }
                    }
                }
            }
            _ => panic!("expected V input"),
        }
        // a non-factorizing tensor is rejected: x depends on u given v
        let bad = r#"{"U":2,"V":1,"p":[[[[0.5,0.0]]],[[[0.0,0.5]]]]}"#;
        match parse_input(bad) {
            Err(IoError::NotFactorized { .. }) => {}
            other => panic!("expected factorization rejection, got {other:?}"),
        }
    }

    #[test]
    fn csv_headers_are_exact() {
        assert!(trace_csv("d-in-tilde", &[]).starts_with("bound,R0,R1,Re,slack_min\n"));
        assert!(gaussian_csv("gd-in", &[]).starts_with("region,theta,eta,R0,R1,Re\n"));
    }
}
