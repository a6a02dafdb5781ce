//! Property tests: file-format round-trips and the joint-distribution
//! identities that must hold for arbitrary channels and inputs.

use proptest::prelude::*;

use rcc_core::info::{cond_mutual_information, delta_gap, VarSet};
use rcc_core::io::{parse_channel, parse_input, write_channel, write_input, ParsedInput};
use rcc_core::prob::make_joint;
use rcc_core::{AuxInput, Channel};

fn normalized_rows(rows: usize, len: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.001f64..1.0, rows * len).prop_map(move |mut raw| {
        for row in raw.chunks_mut(len) {
            let sum: f64 = row.iter().sum();
            for e in row.iter_mut() {
                *e /= sum;
            }
        }
        raw
    })
}

fn arb_channel() -> impl Strategy<Value = Channel> {
    (2usize..4, 1usize..3, 2usize..4, 2usize..4).prop_flat_map(|(nx, ns, ny, nz)| {
        normalized_rows(nx * ns, ny * nz)
            .prop_map(move |g| Channel::from_tensor(nx, ns, ny, nz, g).unwrap())
    })
}

fn arb_input(ns: usize, nx: usize) -> impl Strategy<Value = AuxInput<f64>> {
    (1usize..4).prop_flat_map(move |nu| {
        normalized_rows(1, nu * ns * nx)
            .prop_map(move |p| AuxInput::new(nu, ns, nx, p).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn channel_files_round_trip(ch in arb_channel()) {
        let text = write_channel(&ch);
        let back = parse_channel(&text).unwrap();
        prop_assert_eq!(ch, back);
    }

    #[test]
    fn input_files_round_trip(ch in arb_channel()) {
        let input = AuxInput::uniform(3, ch.ns(), ch.nx());
        let text = write_input(&input);
        match parse_input(&text).unwrap() {
            ParsedInput::Plain(back) => prop_assert_eq!(input, back),
            _ => prop_assert!(false, "plain input came back with V"),
        }
    }

    #[test]
    fn joints_are_normalized_with_consistent_marginals(
        (ch, input) in arb_channel().prop_flat_map(|ch| {
            let (ns, nx) = (ch.ns(), ch.nx());
            (Just(ch), arb_input(ns, nx))
        })
    ) {
        let joint = make_joint(&ch, &input).unwrap();
        let total: f64 = joint.flat().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-11);
        for axis in 0..6 {
            let cached: f64 = joint.axis_marginal(axis).iter().sum();
            prop_assert!((cached - 1.0).abs() <= 1e-11);
        }
    }

    #[test]
    fn chain_rule_holds(
        (ch, input) in arb_channel().prop_flat_map(|ch| {
            let (ns, nx) = (ch.ns(), ch.nx());
            (Just(ch), arb_input(ns, nx))
        })
    ) {
        let joint = make_joint(&ch, &input).unwrap();
        let x = VarSet::parse("X").unwrap();
        let y = VarSet::parse("Y").unwrap();
        let yz = VarSet::parse("YZ").unwrap();
        let us = VarSet::parse("US").unwrap();
        let i_x_yz = cond_mutual_information(&joint, x, yz, us).unwrap();
        let i_x_y = cond_mutual_information(&joint, x, y, us).unwrap();
        prop_assert!((i_x_yz - i_x_y - delta_gap(&joint)).abs() <= 1e-10);
    }

    #[test]
    fn classification_flags_are_monotone_in_tol(ch in arb_channel()) {
        let mut prev = [false; 4];
        for tol in [1e-12, 1e-9, 1e-6, 1e-3, 1.0] {
            let r = ch.classify(tol);
            let cur = [r.reversely_degraded, r.degraded, r.semi_deterministic, r.class_nl];
            for k in 0..4 {
                prop_assert!(!prev[k] || cur[k], "flag {} lost at tol {}", k, tol);
            }
            prev = cur;
        }
    }
}
