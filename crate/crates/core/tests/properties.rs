//! Invariants of the code, decoders and sampler, as property and statistical tests.

use proptest::prelude::*;
use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use parity_decode::channels::{
    awgn_observe, hard_decide, sample_iid_errors, AwgnParams, LlrVector,
};
use parity_decode::code::{LogicalState, ParityCode, SyndromeFamily};
use parity_decode::decoders::{
    bf_decode, bf_step, bp_decode, hamiltonian, inversion_function, BfConfig, BpConfig,
    InversionKind, InversionWeights, TieBreaker, TiePolicy,
};
use parity_decode::experiments::{
    gen_instance, logical_energy, trajectory_demo, ProblemInstance, TrajectorySource,
};
use parity_decode::mcmc::{
    average_error_matrix, energy, mcmc_decode, Chain, SampleRun, SlhzParams,
};
use parity_decode::rng::trial_rng;
use parity_decode::spin::n_pairs;
use parity_decode::{DecoderKind, SpinMatrix};

fn spins(n: usize) -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { -1i8 } else { 1 }), n)
}

/// `(k, readout)` with `k` in the given range.
fn readout(ks: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (usize, SpinMatrix)> {
    ks.prop_flat_map(|k| {
        spins(n_pairs(k)).prop_map(move |v| (k, SpinMatrix::from_edge_values(k, &v).unwrap()))
    })
}

fn logical(ks: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (usize, LogicalState)> {
    ks.prop_flat_map(|k| spins(k).prop_map(move |z| (k, LogicalState::new(z).unwrap())))
}

fn to_matrix(k: usize, bits: u64) -> SpinMatrix {
    let v: Vec<i8> = (0..n_pairs(k))
        .map(|b| if bits >> b & 1 == 1 { -1 } else { 1 })
        .collect();
    SpinMatrix::from_edge_values(k, &v).unwrap()
}

fn codeword(code: &ParityCode, bits: u64) -> SpinMatrix {
    let z: Vec<i8> = (0..code.k())
        .map(|i| if bits >> i & 1 == 1 { -1 } else { 1 })
        .collect();
    code.encode(&LogicalState::new(z).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn syndrome_is_multiplicative((k, x) in readout(3..=12), seed in any::<u64>()) {
        let code = ParityCode::new(k).unwrap();
        let mut rng = trial_rng(seed, 0);
        let v: Vec<i8> = (0..code.n_v()).map(|_| if rng.random::<bool>() { -1 } else { 1 }).collect();
        let y = SpinMatrix::from_edge_values(k, &v).unwrap();
        for family in [SyndromeFamily::Weight3, SyndromeFamily::Weight4] {
            let sx = code.syndrome(&x, family).unwrap();
            let sy = code.syndrome(&y, family).unwrap();
            let sxy = code.syndrome(&x.hadamard(&y).unwrap(), family).unwrap();
            prop_assert_eq!(sx.product(&sy), sxy);
        }
    }

    #[test]
    fn plaquettes_are_products_of_triangles((k, x) in readout(3..=12)) {
        let code = ParityCode::new(k).unwrap();
        let xv = x.edge_values();
        let tri = |a: usize, b: usize, c: usize| x.get(a, b) * x.get(b, c) * x.get(a, c);
        let s4 = code.syndrome_of_vector(&xv, SyndromeFamily::Weight4);
        let mut p = 0;
        for a in 0..k - 2 {
            for c in (a + 1)..(k - 1) {
                let expect = if a + 1 == c {
                    tri(a, a + 1, c + 1)
                } else {
                    tri(a, a + 1, c) * tri(a, a + 1, c + 1)
                };
                prop_assert_eq!(code.checks(SyndromeFamily::Weight4).evaluate(p, &xv), expect);
                p += 1;
            }
        }
        prop_assert_eq!(p, code.checks(SyndromeFamily::Weight4).len());
        // Both families agree on which readouts are codewords.
        let s3 = code.syndrome_of_vector(&xv, SyndromeFamily::Weight3);
        prop_assert_eq!(s3.all_satisfied(), s4.all_satisfied());
    }

    #[test]
    fn encoded_states_are_fixed_points((k, z) in logical(2..=40)) {
        let code = ParityCode::new(k).unwrap();
        let x = code.encode(&z).unwrap();
        prop_assert!(code.is_codeword(&x).unwrap());
        let step = bf_step(&code, &x, &mut TieBreaker::new(TiePolicy::Keep)).unwrap();
        prop_assert_eq!(step.flips, 0);
        prop_assert_eq!(&step.state, &x);
        // Z and -Z give the same readout.
        prop_assert_eq!(code.encode(&z.flipped()).unwrap(), x);
    }

    #[test]
    fn single_error_corrected_from_any_codeword(
        (k, z) in logical(4..=20),
        pick in any::<prop::sample::Index>(),
    ) {
        let code = ParityCode::new(k).unwrap();
        let target = code.encode(&z).unwrap();
        let (i, j) = code.edge(pick.index(code.n_v()));
        let mut x = target.clone();
        x.flip(i, j);
        let r = bf_decode(&code, &x, &BfConfig::default(), Some(&target)).unwrap();
        prop_assert!(r.success_without_ties());
        prop_assert_eq!(r.iterations, 1);
    }

    #[test]
    fn bf_commutes_with_codeword_gauge(
        (k, e) in readout(4..=14),
        zbits in any::<u64>(),
        seed in any::<u64>(),
    ) {
        let code = ParityCode::new(k).unwrap();
        let z = codeword(&code, zbits);
        for policy in [TiePolicy::Keep, TiePolicy::CoinToss { seed }] {
            let cfg = BfConfig { max_iters: 5, tie_policy: policy, record_trajectory: true };
            let a = bf_decode(&code, &e.hadamard(&z).unwrap(), &cfg, Some(&z)).unwrap();
            let b = bf_decode(&code, &e, &cfg, Some(&SpinMatrix::ones(k))).unwrap();
            prop_assert_eq!(a.success, b.success);
            prop_assert_eq!(a.ties, b.ties);
            prop_assert_eq!(a.final_state, b.final_state.hadamard(&z).unwrap());
        }
    }

    #[test]
    fn inversion_function_is_half_energy_change(
        (k, x) in readout(3..=8),
        pick in any::<prop::sample::Index>(),
        seed in any::<u64>(),
    ) {
        let code = ParityCode::new(k).unwrap();
        let mut rng = trial_rng(seed, 0);
        let j: Vec<f64> = (0..code.n_v()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v = pick.index(code.n_v());
        let (a, b) = code.edge(v);
        let mut y = x.clone();
        y.flip(a, b);
        for kind in InversionKind::ALL {
            for family in [SyndromeFamily::Weight3, SyndromeFamily::Weight4] {
                let n = code.checks(if kind == InversionKind::Bf { SyndromeFamily::Weight3 } else { family }).len();
                let w = InversionWeights {
                    w0: rng.random_range(0.1..2.0),
                    wk: (0..n).map(|_| rng.random_range(0.1..2.0)).collect(),
                    beta: rng.random_range(0.0..2.0),
                    gamma: rng.random_range(0.0..2.0),
                    lambda: 1.0,
                };
                let js = Some(j.as_slice());
                let dh = hamiltonian(kind, &code, &y, &x, js, &w, family).unwrap()
                    - hamiltonian(kind, &code, &x, &x, js, &w, family).unwrap();
                let d = inversion_function(kind, &code, &x, js, &w, family, v).unwrap();
                prop_assert!((dh - 2.0 * d).abs() <= 1e-12 * d.abs().max(1.0));
            }
        }
    }

    #[test]
    fn chain_flip_cost_matches_energy_difference(
        (k, x) in readout(3..=9),
        seed in any::<u64>(),
        beta in 0.0f64..3.0,
        gamma in 0.0f64..3.0,
    ) {
        let code = ParityCode::new(k).unwrap();
        let mut rng = trial_rng(seed, 0);
        let j: Vec<f64> = (0..code.n_v()).map(|_| rng.random_range(-1.0..1.0)).collect();
        for family in [SyndromeFamily::Weight3, SyndromeFamily::Weight4] {
            let params = SlhzParams::new(beta, gamma, Some(j.clone()), family).unwrap();
            let mut chain = Chain::new(&code, &params, &x).unwrap();
            for _ in 0..20 {
                let h0 = energy(&code, &params, chain.state()).unwrap();
                for v in 0..code.n_v() {
                    let (a, b) = code.edge(v);
                    let mut y = chain.state().clone();
                    y.flip(a, b);
                    let dh = energy(&code, &params, &y).unwrap() - h0;
                    prop_assert!((chain.flip_cost(v) - dh).abs() < 1e-9);
                }
                let info = chain.step(&mut rng).unwrap();
                prop_assert!(info.escape_rate > 0.0);
                // The flipped node is one of the pairs, never a diagonal entry.
                prop_assert!(info.flipped < code.n_v());
                prop_assert!((chain.energy() - energy(&code, &params, chain.state()).unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn spin_matrix_csv_and_hex_round_trip((k, x) in readout(2..=16)) {
        prop_assert_eq!(SpinMatrix::parse_csv(&x.to_csv_string()).unwrap(), x.clone());
        prop_assert_eq!(SpinMatrix::from_packed_hex(k, &x.packed_hex()).unwrap(), x);
    }
}

#[test]
fn every_codeword_is_a_bf_fixed_point_up_to_k12() {
    for k in 2..=12 {
        let code = ParityCode::new(k).unwrap();
        for bits in 0..1u64 << (k - 1) {
            let z = codeword(&code, bits);
            let step = bf_step(&code, &z, &mut TieBreaker::new(TiePolicy::Keep)).unwrap();
            assert_eq!(step.flips, 0, "K={k} z={bits:b}");
            assert_eq!(step.state, z);
        }
    }
}

#[test]
fn penalty_vanishes_exactly_on_codewords() {
    for k in 3..=6 {
        let code = ParityCode::new(k).unwrap();
        let params = SlhzParams::penalty_only(1.0f64, SyndromeFamily::Weight4).unwrap();
        let mut zeros = 0;
        for bits in 0..1u64 << n_pairs(k) {
            let x = to_matrix(k, bits);
            let h = energy(&code, &params, &x).unwrap();
            assert!(h >= 0.0);
            if h == 0.0 {
                zeros += 1;
                assert!(code.is_codeword(&x).unwrap());
            }
        }
        assert_eq!(zeros, 1 << (k - 1), "K={k}");
    }
}

#[test]
fn physical_energy_of_codewords_equals_logical_energy() {
    let k = 7;
    let code = ParityCode::new(k).unwrap();
    let inst: ProblemInstance<f64> = gen_instance(k, 5).unwrap();
    let params = SlhzParams::new(
        1.0,
        3.0,
        Some(inst.couplings.clone()),
        SyndromeFamily::Weight4,
    )
    .unwrap();
    for bits in 0..1u64 << k {
        let z: Vec<i8> = (0..k)
            .map(|i| if bits >> i & 1 == 1 { -1 } else { 1 })
            .collect();
        let z = LogicalState::new(z).unwrap();
        let x = code.encode(&z).unwrap();
        let lhs = energy(&code, &params, &x).unwrap();
        let rhs = logical_energy(k, &inst.couplings, &z).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
        assert!(rhs >= inst.ground_energy - 1e-12);
    }
}

#[test]
fn ground_state_matches_full_scan() {
    let k = 14;
    for seed in [1u64, 2, 3] {
        let inst: ProblemInstance<f64> = gen_instance(k, seed).unwrap();
        let mut best = f64::INFINITY;
        for bits in 0..1u64 << k {
            let z: Vec<i8> = (0..k)
                .map(|i| if bits >> i & 1 == 1 { -1 } else { 1 })
                .collect();
            let e = logical_energy(k, &inst.couplings, &LogicalState::new(z).unwrap()).unwrap();
            best = best.min(e);
        }
        assert!((best - inst.ground_energy).abs() < 1e-9, "seed {seed}");
        assert_eq!(inst.ground_state.spins()[0], 1);
        assert!(inst.couplings.iter().all(|j| j.abs() <= 0.25));
        let e = logical_energy(k, &inst.couplings, &inst.ground_state).unwrap();
        assert!((e - inst.ground_energy).abs() < 1e-12);
    }
}

#[test]
fn iid_flip_fraction_matches_epsilon() {
    let code = ParityCode::new(30).unwrap();
    let mut rng = trial_rng(41, 0);
    let eps = 0.17;
    let trials = 400;
    let flips: usize = (0..trials)
        .map(|_| {
            sample_iid_errors(&code, eps, &mut rng)
                .unwrap()
                .count_negative()
        })
        .sum();
    let n = (trials * code.n_v()) as f64;
    let p = flips as f64 / n;
    let se = (eps * (1.0 - eps) / n).sqrt();
    assert!((p - eps).abs() < 5.0 * se, "observed {p}");
}

#[test]
fn awgn_hard_decision_error_rate_matches_normal_tail() {
    let code = ParityCode::new(30).unwrap();
    let z = codeword(&code, 0b1_0110_1101);
    let params = AwgnParams::new(1.0f64, 0.8).unwrap();
    let expected = Normal::new(0.0, 1.0).unwrap().cdf(-1.0 / 0.8);
    let mut rng = trial_rng(43, 0);
    let trials = 400;
    let mut wrong = 0usize;
    for _ in 0..trials {
        let y = awgn_observe(&z, &params, &mut rng);
        wrong += hard_decide(&y).hamming(&z).unwrap();
    }
    let n = (trials * code.n_v()) as f64;
    let p = wrong as f64 / n;
    let se = (expected * (1.0 - expected) / n).sqrt();
    assert!(
        (p - expected).abs() < 5.0 * se,
        "observed {p}, expected {expected}"
    );
}

#[test]
fn bp_reliability_does_not_drop_on_final_iteration() {
    let k = 8;
    let code = ParityCode::new(k).unwrap();
    let mut rng = trial_rng(47, 0);
    let mut held = 0;
    let mut decoded = 0;
    for _ in 0..2000 {
        let e = sample_iid_errors(&code, 0.1, &mut rng).unwrap();
        let llr = LlrVector::uniform(&e, 0.1f64).unwrap();
        let cfg = BpConfig {
            early_stop: false,
            ..BpConfig::default()
        };
        let out = bp_decode(&code, &llr, &cfg, Some(&SpinMatrix::ones(k))).unwrap();
        let r = &out.min_reliability;
        assert_eq!(r.len(), cfg.max_iters + 1);
        if out.result.success {
            decoded += 1;
            if r[r.len() - 1] >= r[r.len() - 2] {
                held += 1;
            }
        }
    }
    eprintln!("final-iteration reliability held in {held} of {decoded} decodes");
    assert!(decoded > 1000);
    assert!(held as f64 >= 0.95 * decoded as f64, "{held} of {decoded}");
}

#[test]
fn bf_success_decreases_with_noise() {
    let k = 20;
    let code = ParityCode::new(k).unwrap();
    let target = SpinMatrix::ones(k);
    let rate = |eps: f64| {
        let mut rng = trial_rng(53, (eps * 1000.0) as u64);
        let ok = (0..2000)
            .filter(|_| {
                let e = sample_iid_errors(&code, eps, &mut rng).unwrap();
                bf_decode(&code, &e, &BfConfig::default(), Some(&target))
                    .unwrap()
                    .success_without_ties()
            })
            .count();
        ok as f64 / 2000.0
    };
    let rates: Vec<f64> = [0.05, 0.15, 0.25, 0.35, 0.45].map(rate).to_vec();
    assert!(rates.windows(2).all(|w| w[0] >= w[1]), "{rates:?}");
}

#[test]
fn zero_strength_chain_flips_uniformly() {
    let k = 5;
    let code = ParityCode::new(k).unwrap();
    let params = SlhzParams::penalty_only(0.0f64, SyndromeFamily::Weight4).unwrap();
    let mut rng = trial_rng(59, 0);
    let mut chain = Chain::new(&code, &params, &SpinMatrix::ones(k)).unwrap();
    let steps = 100_000;
    let mut counts = vec![0usize; code.n_v()];
    for _ in 0..steps {
        let info = chain.step(&mut rng).unwrap();
        assert!((info.escape_rate - code.n_v() as f64).abs() < 1e-12);
        counts[info.flipped] += 1;
    }
    let expect = steps as f64 / code.n_v() as f64;
    let chi2: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expect).powi(2) / expect)
        .sum();
    // 9 degrees of freedom; the 0.999 quantile is about 27.9.
    assert!(chi2 < 27.9, "chi2 {chi2}");
}

#[test]
fn strong_penalty_keeps_chain_near_codewords() {
    let k = 8;
    let code = ParityCode::new(k).unwrap();
    let params = SlhzParams::penalty_only(1000.0f64, SyndromeFamily::Weight4).unwrap();
    let mut rng = trial_rng(61, 0);
    let start = codeword(&code, 0b1011001);
    let mut chain = Chain::new(&code, &params, &start).unwrap();
    let mut max_violated = 0;
    for _ in 0..5000 {
        chain.step(&mut rng).unwrap();
        max_violated = max_violated.max(chain.violated());
    }
    // One flip breaks at most four plaquettes; the chain immediately repairs it.
    assert!(max_violated <= 4, "max violated {max_violated}");
}

#[test]
fn unbiased_chain_finds_each_codeword_equally_often() {
    let k = 6;
    let code = ParityCode::new(k).unwrap();
    let params = SlhzParams::penalty_only(1.0f64, SyndromeFamily::Weight4).unwrap();
    let trials = 3200;
    let mut counts = std::collections::HashMap::new();
    for t in 0..trials {
        let run = mcmc_decode(&code, &params, 5000, &SpinMatrix::ones(k), 1000 + t)
            .unwrap()
            .run;
        if let Some(z) = run.samples.iter().find_map(|x| code.logical_of(x)) {
            *counts.entry(z.spins().to_vec()).or_insert(0usize) += 1;
        }
    }
    let total: usize = counts.values().sum();
    assert!(total > trials as usize * 9 / 10);
    assert_eq!(counts.len(), 32);
    let expect = total as f64 / 32.0;
    let chi2: f64 = counts
        .values()
        .map(|&c| (c as f64 - expect).powi(2) / expect)
        .sum();
    // 31 degrees of freedom; the 0.999 quantile is about 61.1.
    assert!(chi2 < 61.1, "chi2 {chi2}");
}

#[test]
fn average_error_matrix_of_codeword_run() {
    let k = 5;
    let code = ParityCode::new(k).unwrap();
    let z = codeword(&code, 0b10110);
    let mut one_off = z.clone();
    one_off.flip(1, 3);
    let params = SlhzParams::penalty_only(1.0f64, SyndromeFamily::Weight4).unwrap();
    let run = SampleRun {
        samples: vec![z.clone(), z.clone(), one_off, z.clone()],
        energies: vec![0.0; 4],
        seed: 0,
        params,
        budget: 4,
    };
    let m = average_error_matrix(&run, &z).unwrap();
    for (i, row) in m.iter().enumerate() {
        for (j, &value) in row.iter().enumerate() {
            let expect = if (i, j) == (1, 3) || (i, j) == (3, 1) {
                0.5
            } else {
                1.0
            };
            assert_eq!(value, expect, "({i}, {j})");
        }
    }
}

#[test]
fn iid_trajectory_errors_track_snapshots() {
    for seed in 0..20 {
        let source: TrajectorySource<f64> = TrajectorySource::Iid {
            k: 16,
            epsilon: 0.15,
        };
        for decoder in [DecoderKind::Bf, DecoderKind::Bp] {
            let t = trajectory_demo(&source, decoder, 5, seed).unwrap();
            assert_eq!(t.snapshots.len(), t.errors.len());
            for (s, &e) in t.snapshots.iter().zip(&t.errors) {
                assert_eq!(s.hamming(&t.target).unwrap(), e);
            }
            assert_eq!(t.success, t.errors.last() == Some(&0));
            let mut buf = Vec::new();
            t.write_csv(&mut buf).unwrap();
            let parsed = parity_decode::experiments::Trajectory::parse_csv(
                std::str::from_utf8(&buf).unwrap(),
            )
            .unwrap();
            assert_eq!(parsed.len(), t.snapshots.len());
        }
    }
}
