//! Scratch pilot for calibrating toy training budgets. Not part of the suite.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use redactlab_core::distributions::RedactionSpec;
use redactlab_core::divergence::SmoothingParams;
use redactlab_core::evaluation::{empirical_invalidity, quality_tv};
use redactlab_core::gan::{
    eight_mode_mixture, in_mode_region, mode_region_spec, pretrain, TrainConfig,
};
use redactlab_core::redaction::{
    combine_specs, redact_classifier_based, redact_data_based, redact_validity_based,
    LogisticBump, MinClassifier, RedactionMethod, RedactionRunConfig, SoftClassifier,
};
use std::sync::Arc;
use std::time::Instant;

fn main() {
    let n_eval = 20_000;
    let full_ref = RedactionSpec::<Vec<f64>>::validity(|_| true);
    let bump0 = LogisticBump {
        center: -3.5,
        radius: 0.5,
        steepness: 8.0,
    };
    let bump3 = LogisticBump {
        center: -0.5,
        radius: 0.5,
        steepness: 8.0,
    };

    for seed in 0..5u64 {
        let mut data_rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let data = eight_mode_mixture(2000, &mut data_rng);
        let omega = mode_region_spec(0);

        let t0 = Instant::now();
        let report = pretrain(&data, &TrainConfig::pretrain_defaults(seed)).unwrap();
        let pre_secs = t0.elapsed().as_secs_f64();
        let model0 = report.model;
        let pre_inv = empirical_invalidity(&model0, &omega, n_eval, 7000 + seed);
        let pre_tv_full = quality_tv(&model0, &data, &full_ref, 64, n_eval, 7000 + seed).unwrap();
        let pre_tv_valid = quality_tv(&model0, &data, &omega, 64, n_eval, 7000 + seed).unwrap();
        println!(
            "seed {seed}: pretrain {pre_secs:.0}s inv={pre_inv:.4} tv_full={pre_tv_full:.3} tv_valid={pre_tv_valid:.3}"
        );

        let cfg = RedactionRunConfig {
            method: RedactionMethod::DataBased,
            smoothing: SmoothingParams::defaults(),
            train: TrainConfig::redaction_defaults(seed),
        };

        // Alg 1: data-based
        let omega_samples: Vec<Vec<f64>> =
            data.iter().filter(|x| omega.contains(x)).cloned().collect();
        let t = Instant::now();
        let m1 = redact_data_based(model0.clone(), &data, &omega_samples, &cfg).unwrap();
        let inv1 = empirical_invalidity(&m1, &omega, n_eval, 8000 + seed);
        let tv1 = quality_tv(&m1, &data, &omega, 64, n_eval, 8000 + seed).unwrap();
        println!(
            "  data:      {:.1}s inv {pre_inv:.4} -> {inv1:.5} ({:.0}x) tv {pre_tv_valid:.3} -> {tv1:.3}",
            t.elapsed().as_secs_f64(),
            if inv1 > 0.0 { pre_inv / inv1 } else { f64::INFINITY },
        );

        // Alg 2: validity-based, R=5, T=400
        let t = Instant::now();
        let out = redact_validity_based(
            model0.clone(),
            &data,
            &|x: &[f64]| !in_mode_region(0, x),
            5,
            400,
            &cfg,
        )
        .unwrap();
        let inv2 = empirical_invalidity(&out.model, &omega, n_eval, 8100 + seed);
        let tv2 = quality_tv(&out.model, &data, &omega, 64, n_eval, 8100 + seed).unwrap();
        println!(
            "  validity:  {:.1}s inv -> {inv2:.5} ({:.0}x) tv -> {tv2:.3} rounds {:?}",
            t.elapsed().as_secs_f64(),
            if inv2 > 0.0 { pre_inv / inv2 } else { f64::INFINITY },
            out.invalidity_per_round,
        );

        // Alg 3: classifier-based
        let t = Instant::now();
        let m3 = redact_classifier_based(model0.clone(), &data, &bump0, 0.5, &cfg).unwrap();
        let inv3 = empirical_invalidity(&m3, &omega, n_eval, 8200 + seed);
        let tv3 = quality_tv(&m3, &data, &omega, 64, n_eval, 8200 + seed).unwrap();
        println!(
            "  classifier:{:.1}s inv -> {inv3:.5} ({:.0}x) tv -> {tv3:.3}",
            t.elapsed().as_secs_f64(),
            if inv3 > 0.0 { pre_inv / inv3 } else { f64::INFINITY },
        );

        // multi-set, one round/epoch budget
        let union = combine_specs(&[mode_region_spec(0), mode_region_spec(3)]).unwrap();
        let pre_union = empirical_invalidity(&model0, &union, n_eval, 8300 + seed);
        let one_epoch = RedactionRunConfig {
            train: TrainConfig {
                epochs: 1,
                ..cfg.train
            },
            ..cfg.clone()
        };
        let union_samples: Vec<Vec<f64>> =
            data.iter().filter(|x| union.contains(x)).cloned().collect();
        let mu1 = redact_data_based(model0.clone(), &data, &union_samples, &one_epoch).unwrap();
        let u1 = empirical_invalidity(&mu1, &union, n_eval, 8400 + seed);
        let mu2 = redact_validity_based(
            model0.clone(),
            &data,
            &|x: &[f64]| !(in_mode_region(0, x) || in_mode_region(3, x)),
            1,
            400,
            &one_epoch,
        )
        .unwrap();
        let u2 = empirical_invalidity(&mu2.model, &union, n_eval, 8500 + seed);
        let min_cls = MinClassifier(vec![Arc::new(bump0), Arc::new(bump3)]);
        let mu3 = redact_classifier_based(model0.clone(), &data, &min_cls, 0.5, &one_epoch).unwrap();
        let u3 = empirical_invalidity(&mu3, &union, n_eval, 8600 + seed);
        println!(
            "  multi 1ep: pre {pre_union:.4} -> data {u1:.4} ({:.1}x) val {u2:.4} ({:.1}x) cls {u3:.4} ({:.1}x)",
            pre_union / u1.max(1e-9),
            pre_union / u2.max(1e-9),
            pre_union / u3.max(1e-9),
        );
    }
}
