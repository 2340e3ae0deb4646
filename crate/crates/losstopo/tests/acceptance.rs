//! Acceptance suite: one test per exit criterion, each printing a PASS line
//! (run with `cargo test --test acceptance -- --nocapture` to see them) and
//! checking its runtime budget.

mod common;

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::Pow;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use losstopo::bound::{closed_form_bound, zell_bound, DEFAULT_EXACT_BIT_CAP};
use losstopo::harness::{run_verify, ExperimentConfig, Verdict};
use losstopo::homology::{betti_fast2d, betti_gf2};
use losstopo::landscape::{Axis, ScalarField};
use losstopo::net::{backprop_grad, finite_diff_grad, Dataset, Network};
use losstopo::pfaffian::{
    apply_l2, apply_skip_connections, corollary_published_format, loss_format_bce,
    loss_format_mse, total_params, Activation, Architecture, LastLayer, LossKind, LossSpec,
    PfaffianFormat,
};

use common::{disk_mask, mask_complex};

fn finish(name: &str, t0: Instant, budget: Duration) {
    let elapsed = t0.elapsed();
    assert!(
        elapsed < budget,
        "{name} took {elapsed:?}, budget {budget:?}"
    );
    println!("acceptance: {name} PASS ({elapsed:?})");
}

fn uniform_arch(n0: usize, h: usize, depth: usize, last: LastLayer) -> Architecture {
    Architecture::new(n0, vec![h; depth - 1], last, false).unwrap()
}

/// Corollary tuples reproduced exactly for the nonlinear branches over
/// L in 2..=8, h in 1..=8, m in 1..=20; MSE/linear reproduces the theorem
/// value 3(L-2)+2 with the fixed +2 offset against the printed tuple.
#[test]
fn format_reproduction() {
    let t0 = Instant::now();
    let sig_last = LastLayer::Activated(Activation::LogSig);
    let tanh_last = LastLayer::Activated(Activation::Tanh);
    for sigma in [Activation::Tanh, Activation::LogSig] {
        for depth in 2usize..=8 {
            for h in 1usize..=8 {
                for m in 1u64..=20 {
                    let (l64, h64) = (depth as u64, h as u64);

                    let arch = uniform_arch(1, h, depth, sig_last);
                    assert_eq!(
                        loss_format_mse(&arch, sigma, m).unwrap(),
                        corollary_published_format(LossKind::Mse, &sig_last, l64, h64, m)
                            .unwrap()
                    );
                    assert_eq!(
                        loss_format_bce(&arch, sigma, m).unwrap(),
                        corollary_published_format(LossKind::Bce, &sig_last, l64, h64, m)
                            .unwrap()
                    );

                    let arch = uniform_arch(1, h, depth, tanh_last);
                    assert_eq!(
                        loss_format_bce(&arch, sigma, m).unwrap(),
                        corollary_published_format(LossKind::Bce, &tanh_last, l64, h64, m)
                            .unwrap()
                    );

                    let arch = uniform_arch(1, h, depth, LastLayer::Linear);
                    let theorem = loss_format_mse(&arch, sigma, m).unwrap();
                    let printed =
                        corollary_published_format(LossKind::Mse, &LastLayer::Linear, l64, h64, m)
                            .unwrap();
                    assert_eq!(theorem.alpha, 3 * (l64 - 2) + 2);
                    assert_eq!(printed.alpha, 3 * (l64 - 2));
                    assert_eq!(theorem.alpha - printed.alpha, 2, "fixed offset");
                    assert_eq!(theorem.beta, printed.beta);
                    assert_eq!(theorem.ell, printed.ell);
                }
            }
        }
    }
    finish("format reproduction", t0, Duration::from_secs(1));
}

/// zell_bound on (published tuple, total params) equals the closed-form
/// route as exact integers over L in 2..=5, h in 1..=4, m in 1..=6,
/// n0 in {1,2}; spot value 2^190 * 91^33.
#[test]
fn bound_pipeline_equality() {
    let t0 = Instant::now();
    let cases = [
        (LossKind::Mse, LastLayer::Linear),
        (LossKind::Mse, LastLayer::Activated(Activation::LogSig)),
        (LossKind::Bce, LastLayer::Activated(Activation::LogSig)),
    ];
    for (loss, last) in cases {
        for depth in 2u64..=5 {
            for h in 1u64..=4 {
                for m in 1u64..=6 {
                    for n0 in 1u64..=2 {
                        let format =
                            corollary_published_format(loss, &last, depth, h, m).unwrap();
                        let arch =
                            uniform_arch(n0 as usize, h as usize, depth as usize, last);
                        let via_format =
                            zell_bound(format, total_params(&arch), DEFAULT_EXACT_BIT_CAP)
                                .unwrap();
                        let via_closed_form = closed_form_bound(
                            loss,
                            &last,
                            n0,
                            h,
                            depth,
                            m,
                            DEFAULT_EXACT_BIT_CAP,
                        )
                        .unwrap();
                        assert!(via_format.exact.is_some());
                        assert_eq!(
                            via_format.exact, via_closed_form.exact,
                            "{loss:?}/{last:?} L={depth} h={h} m={m} n0={n0}"
                        );
                    }
                }
            }
        }
    }

    // spot value: MSE-linear, n0=1, h=2, L=3, m=5
    let spot = closed_form_bound(
        LossKind::Mse,
        &LastLayer::Linear,
        1,
        2,
        3,
        5,
        DEFAULT_EXACT_BIT_CAP,
    )
    .unwrap();
    let expected: BigUint = Pow::pow(&BigUint::from(91u32), 33u64) << 190usize;
    assert_eq!(spot.exact, Some(expected));
    assert!((spot.log2_value - 404.8).abs() < 0.1);

    finish("bound pipeline equality", t0, Duration::from_secs(5));
}

fn log2_bound(loss: LossKind, last: &LastLayer, n0: u64, h: u64, depth: u64, m: u64) -> f64 {
    let format = corollary_published_format(loss, last, depth, h, m).unwrap();
    let arch = uniform_arch(n0 as usize, h as usize, depth as usize, *last);
    zell_bound(format, total_params(&arch), 0).unwrap().log2_value
}

/// log2 B(m) / m^2 stays below a pinned constant up to m = 1000, and the
/// width growth matches the h^2 log h (deep) vs h log h (shallow) shapes
/// within a factor of 2.
#[test]
fn asymptotic_regime_property() {
    let t0 = Instant::now();

    // sample-count regime: kappa^{O(m^2)}
    let configs = [
        (LossKind::Mse, LastLayer::Linear, 2u64, 3u64, 1u64),
        (
            LossKind::Bce,
            LastLayer::Activated(Activation::LogSig),
            2,
            3,
            1,
        ),
    ];
    for (loss, last, h, depth, n0) in configs {
        let r1 = log2_bound(loss, &last, n0, h, depth, 1);
        let cap = r1 + 1.0;
        // the chain length per sample, squared and halved, is the analytic tail
        let ell_per_m = match loss {
            LossKind::Mse => ((depth - 1) * h) as f64,
            LossKind::Bce => ((depth - 1) * h + 1) as f64,
        };
        let tail_cap = ell_per_m * ell_per_m / 2.0 + 1.0;
        let mut last_ratio = f64::INFINITY;
        for m in 1u64..=1000 {
            let ratio = log2_bound(loss, &last, n0, h, depth, m) / (m * m) as f64;
            assert!(
                ratio <= cap,
                "{loss:?} m={m}: log2B/m^2 = {ratio} above pinned constant {cap}"
            );
            last_ratio = ratio;
        }
        assert!(
            last_ratio <= tail_cap,
            "{loss:?}: tail ratio {last_ratio} above analytic cap {tail_cap}"
        );
    }

    // width regime, deep L=3 vs shallow L=2, ratio test h: 8 -> 16
    let model = |h: f64, deep: bool| {
        if deep {
            h * h * h.log2()
        } else {
            h * h.log2()
        }
    };
    for (depth, deep) in [(3u64, true), (2u64, false)] {
        let actual = log2_bound(LossKind::Mse, &LastLayer::Linear, 1, 16, depth, 1)
            / log2_bound(LossKind::Mse, &LastLayer::Linear, 1, 8, depth, 1);
        let predicted = model(16.0, deep) / model(8.0, deep);
        let quotient = predicted / actual;
        assert!(
            (0.5..=2.0).contains(&quotient),
            "L={depth}: measured growth ratio {actual}, shape predicts {predicted}"
        );
    }

    finish("asymptotic regime property", t0, Duration::from_secs(10));
}

/// Known topologies over GF(2), fast-path equivalence on 500 random 64x64
/// masks, and the Euler identity on every instance.
#[test]
fn homology_oracles() {
    let t0 = Instant::now();
    let n = 33;

    let disk = mask_complex(&[n, n], &disk_mask(n, 16.0, 16.0, 10.0));
    assert_eq!(betti_gf2(&disk).unwrap().b[..2], [1, 0]);

    let annulus_mask: Vec<bool> = disk_mask(n, 16.0, 16.0, 10.0)
        .into_iter()
        .zip(disk_mask(n, 16.0, 16.0, 5.0))
        .map(|(outer, inner)| outer && !inner)
        .collect();
    let annulus = mask_complex(&[n, n], &annulus_mask);
    assert_eq!(betti_gf2(&annulus).unwrap().b[..2], [1, 1]);

    let blobs_mask: Vec<bool> = disk_mask(n, 8.0, 8.0, 5.0)
        .into_iter()
        .zip(disk_mask(n, 24.0, 24.0, 5.0))
        .map(|(a, b)| a || b)
        .collect();
    let blobs = mask_complex(&[n, n], &blobs_mask);
    assert_eq!(betti_gf2(&blobs).unwrap().b[..2], [2, 0]);

    // hollow shell: 5^3 vertices minus the interior, a topological sphere
    let s = 5;
    let shell_mask: Vec<bool> = (0..s * s * s)
        .map(|i| {
            let (z, y, x) = (i / (s * s), (i / s) % s, i % s);
            [x, y, z].iter().any(|&c| c == 0 || c == s - 1)
        })
        .collect();
    let shell = mask_complex(&[s, s, s], &shell_mask);
    let b = betti_gf2(&shell).unwrap();
    assert_eq!(b.b[..3], [1, 0, 1]);

    // 500 seeded random 64x64 masks: both algorithms agree, Euler holds
    let mut rng = ChaCha12Rng::seed_from_u64(2024);
    for trial in 0..500 {
        let density = rng.random_range(0.3..0.8);
        let mask: Vec<bool> = (0..64 * 64).map(|_| rng.random_bool(density)).collect();
        let complex = mask_complex(&[64, 64], &mask);
        let slow = betti_gf2(&complex).unwrap();
        let fast = betti_fast2d(&complex).unwrap();
        assert_eq!(slow, fast, "trial {trial}");

        let counts = complex.cell_counts();
        let chi = counts[0] as i64 - counts[1] as i64 + counts[2] as i64;
        assert_eq!(slow.euler, chi, "trial {trial}");
        let alternating: i64 = slow
            .b
            .iter()
            .enumerate()
            .map(|(k, &bk)| if k % 2 == 0 { bk as i64 } else { -(bk as i64) })
            .sum();
        assert_eq!(alternating, chi, "trial {trial}");
    }

    finish("homology oracles", t0, Duration::from_secs(60));
}

fn random_probe_net(rng: &mut ChaCha12Rng, skip: bool, bce: bool) -> Network {
    let depth = *[2usize, 3].choose(rng).unwrap();
    let n0 = rng.random_range(1..=3);
    let hidden: Vec<usize> = if skip {
        vec![rng.random_range(1..=3); depth - 1]
    } else {
        (0..depth - 1).map(|_| rng.random_range(1..=3)).collect()
    };
    let last = if bce {
        LastLayer::Activated(Activation::LogSig)
    } else {
        *[
            LastLayer::Linear,
            LastLayer::Activated(Activation::Tanh),
            LastLayer::Activated(Activation::LogSig),
        ]
        .choose(rng)
        .unwrap()
    };
    let sigma = *[Activation::Tanh, Activation::LogSig, Activation::ArcTan]
        .choose(rng)
        .unwrap();
    Network::new(Architecture::new(n0, hidden, last, skip).unwrap(), sigma)
}

fn gradient_probes(skip: bool) {
    let mut rng = ChaCha12Rng::seed_from_u64(if skip { 77 } else { 42 });
    for probe in 0..100 {
        let bce = rng.random_bool(0.4);
        let net = random_probe_net(&mut rng, skip, bce);
        let m = rng.random_range(1..=4);
        let inputs: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..net.arch.n0()).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let targets: Vec<f64> = (0..m)
            .map(|_| {
                if bce {
                    f64::from(rng.random_bool(0.5))
                } else {
                    rng.random_range(-1.0..1.0)
                }
            })
            .collect();
        let data = Dataset::new(inputs, targets).unwrap();
        let params: Vec<f64> = (0..net.num_params())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let lambda = if rng.random_bool(0.3) { 0.1 } else { 0.0 };
        let loss = LossSpec::new(
            if bce { LossKind::Bce } else { LossKind::Mse },
            lambda,
        )
        .unwrap();

        let bp = backprop_grad(&net, &params, &data, &loss).unwrap();
        let fd = finite_diff_grad(&net, &params, &data, &loss, 1e-5).unwrap();
        for (i, (b, f)) in bp.iter().zip(&fd).enumerate() {
            let err = (b - f).abs();
            let tol = 1e-8f64.max(1e-5 * b.abs().max(f.abs()));
            assert!(
                err <= tol,
                "probe {probe} (skip={skip}) coord {i}: backprop {b} vs fd {f}"
            );
        }
    }
}

/// Backprop matches central differences on 100 seeded probes, with and
/// without skip connections.
#[test]
fn gradient_verification() {
    let t0 = Instant::now();
    gradient_probes(false);
    gradient_probes(true);
    finish("gradient verification", t0, Duration::from_secs(5));
}

/// Desk-scale inequality: a 2-parameter tanh network (direct-check
/// configuration), m = 3, 200^2 grid, 16 thresholds; plus the analytic
/// double-well basin count.
#[test]
fn bound_inequality_desk_scale() {
    let t0 = Instant::now();
    let config = ExperimentConfig::from_json_str(
        r#"{
            "architecture": {"n0": 1, "hidden_widths": [1], "last_layer": "linear"},
            "activation": "tanh",
            "loss": {"kind": "mse"},
            "dataset": {"inline": {"inputs": [[-1.0], [0.0], [1.0]], "targets": [-0.5, 0.0, 0.5]}},
            "slice": {
                "varied_indices": [1, 3],
                "ranges": [[-3, 3], [-3, 3]],
                "resolution": [200, 200],
                "base_point": [0, 0, 0, 0]
            },
            "bound": {"direct_check": true}
        }"#,
    )
    .unwrap();
    let report = run_verify(&config).unwrap();
    assert_eq!(report.n_params.bound, 2, "direct check uses the varied count");
    assert_eq!(report.betti.len(), 16);
    assert_eq!(report.verdicts.inequality_overall, Verdict::Holds);
    for check in &report.verdicts.inequality {
        assert_eq!(check.verdict, Verdict::Holds, "c = {}", check.c);
    }
    // independent recomputation of the bound the verdicts compare against
    let exact = report.bound.exact.as_ref().unwrap();
    let recomputed = zell_bound(
        report.format.used_for_bound,
        report.n_params.bound,
        DEFAULT_EXACT_BIT_CAP,
    )
    .unwrap();
    assert_eq!(exact, &recomputed.exact.unwrap().to_string());
    for row in &report.betti {
        assert!(BigUint::from(row.sum) <= exact.parse::<BigUint>().unwrap());
    }

    // analytic double well: two basins below the saddle value, one above
    let axes = vec![
        Axis { index: 0, min: -2.0, max: 2.0, count: 200 },
        Axis { index: 1, min: -1.0, max: 1.0, count: 200 },
    ];
    let well = ScalarField::from_fn(axes, |p: &[f64]| {
        let (u, v) = (p[0], p[1]);
        (u * u - 1.0).powi(2) + v * v
    })
    .unwrap();
    let below = betti_fast2d(&losstopo::homology::sublevel_complex(&well, 0.5).unwrap()).unwrap();
    let above = betti_fast2d(&losstopo::homology::sublevel_complex(&well, 1.5).unwrap()).unwrap();
    assert_eq!(below.b[0], 2);
    assert_eq!(above.b[0], 1);

    finish("bound inequality at desk scale", t0, Duration::from_secs(60));
}

/// l2 on MSE and skip connections leave format and exact bound unchanged,
/// as exact equalities.
#[test]
fn invariance_claims() {
    let t0 = Instant::now();
    let sig_last = LastLayer::Activated(Activation::LogSig);

    for depth in 2u64..=5 {
        for h in 1u64..=4 {
            for m in 1u64..=4 {
                // l2 on MSE: beta is already >= 2, nothing moves
                for last in [LastLayer::Linear, sig_last] {
                    let arch = uniform_arch(1, h as usize, depth as usize, last);
                    let f = loss_format_mse(&arch, Activation::Tanh, m).unwrap();
                    assert_eq!(apply_l2(f), f);
                    let n = total_params(&arch);
                    assert_eq!(
                        zell_bound(apply_l2(f), n, DEFAULT_EXACT_BIT_CAP).unwrap().exact,
                        zell_bound(f, n, DEFAULT_EXACT_BIT_CAP).unwrap().exact
                    );
                }

                // skip transform: identity on every format, bound untouched
                let arch = uniform_arch(1, h as usize, depth as usize, sig_last);
                for f in [
                    loss_format_mse(&arch, Activation::Tanh, m).unwrap(),
                    loss_format_bce(&arch, Activation::Tanh, m).unwrap(),
                    PfaffianFormat::new(1, 1, 0).unwrap(),
                ] {
                    assert_eq!(apply_skip_connections(f), f);
                    let n = total_params(&arch);
                    assert_eq!(
                        zell_bound(apply_skip_connections(f), n, DEFAULT_EXACT_BIT_CAP)
                            .unwrap()
                            .exact,
                        zell_bound(f, n, DEFAULT_EXACT_BIT_CAP).unwrap().exact
                    );
                }

                // the skip flag itself does not move the theorem formulas
                let skip_arch = Architecture::new(
                    1,
                    vec![h as usize; depth as usize - 1],
                    sig_last,
                    true,
                )
                .unwrap();
                assert_eq!(
                    loss_format_mse(&skip_arch, Activation::Tanh, m).unwrap(),
                    loss_format_mse(&skip_arch.without_skips(), Activation::Tanh, m).unwrap()
                );
            }
        }
    }
    finish("invariance claims", t0, Duration::from_secs(1));
}
