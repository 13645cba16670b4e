mod common;

use common::random_tensor;
use thermal_odometry::train::{adam_update, berhu_loss, mse_loss, AdamState, TrainConfig};
use thermal_odometry::{Rng, Tensor};

fn t(v: &[f64]) -> Tensor<f64> {
    Tensor::from_vec(v.to_vec()).unwrap()
}

#[test]
fn berhu_three_residuals_by_hand() {
    let out = berhu_loss(&t(&[0.1, 0.5, 1.0]), &t(&[0.0, 0.0, 0.0])).unwrap();
    assert!((out.c - 0.2).abs() < 1e-12);
    // 0.1 is inside c; 0.5 and 1.0 use (r^2 + c^2) / 2c
    let want: f64 = (0.1 + (0.25 + 0.04) / 0.4 + (1.0 + 0.04) / 0.4) / 3.0;
    assert!((want - 1.141_666_666_666_666_7).abs() < 1e-12);
    assert!((out.loss - want).abs() < 1e-9);
    let g = out.grad.data();
    assert!((g[0] - 1.0 / 3.0).abs() < 1e-12);
    assert!((g[1] - 0.5 / 0.2 / 3.0).abs() < 1e-12);
    assert!((g[2] - 1.0 / 0.2 / 3.0).abs() < 1e-12);
}

#[test]
fn berhu_at_exactly_c_is_continuous() {
    // r = c lies on the linear branch; the quadratic branch agrees there
    let out = berhu_loss(&t(&[0.2, 1.0]), &t(&[0.0, 0.0])).unwrap();
    let want = (0.2 + (1.0 + 0.04) / 0.4) / 2.0;
    assert!((out.loss - want).abs() < 1e-12);
}

#[test]
fn berhu_zero_residuals_degenerate_to_l1() {
    let out = berhu_loss(&t(&[0.3, -0.2]), &t(&[0.3, -0.2])).unwrap();
    assert_eq!(out.loss, 0.0);
    assert!(out.grad.data().iter().all(|g| *g == 0.0));
}

#[test]
fn mse_random_batches_by_formula() {
    let mut rng = Rng::new(5);
    for _ in 0..20 {
        let n = 1 + rng.below(10);
        let p = random_tensor::<f64>(&mut rng, vec![n], 2.0);
        let y = random_tensor::<f64>(&mut rng, vec![n], 2.0);
        let (loss, grad) = mse_loss(&p, &y).unwrap();
        let mut want = 0.0;
        for i in 0..n {
            let r = p.data()[i] - y.data()[i];
            want += r * r;
            assert!((grad.data()[i] - 2.0 * r / n as f64).abs() < 1e-15);
        }
        assert!((loss - want / n as f64).abs() < 1e-14);
    }
}

#[test]
fn losses_reject_mismatched_batches() {
    assert!(mse_loss(&t(&[1.0]), &t(&[1.0, 2.0])).is_err());
    assert!(berhu_loss(&t(&[1.0, 2.0]), &t(&[1.0])).is_err());
}

#[test]
fn adam_ten_steps_constant_gradient() {
    // With a constant gradient g the bias-corrected moments are exactly g and
    // g^2, so every step moves the parameter by lr * g / (|g| + eps).
    let cfg = TrainConfig::default();
    let p0 = 1.0;
    let g = 0.5;
    let mut p = t(&[p0]);
    let grad = t(&[g]);
    let mut state = AdamState::new([&p]);
    let step = 0.001 * 0.5 / (0.5 + 1e-8);
    for k in 1..=10 {
        adam_update(&mut [&mut p], &[&grad], &mut state, &cfg).unwrap();
        let want = p0 - k as f64 * step;
        assert!(
            (p.data()[0] - want).abs() < 1e-12,
            "step {k}: {} vs {want}",
            p.data()[0]
        );
        // raw moments follow the geometric recursions
        let m_want = g * (1.0 - 0.9f64.powi(k));
        let v_want = g * g * (1.0 - 0.999f64.powi(k));
        assert!((state.m[0].data()[0] - m_want).abs() < 1e-15);
        assert!((state.v[0].data()[0] - v_want).abs() < 1e-15);
    }
    assert_eq!(state.t, 10);
}

#[test]
fn adam_first_step_is_lr_times_sign() {
    let cfg = TrainConfig::default();
    let mut p = t(&[0.0, 0.0, 0.0]);
    let grad = t(&[3.0, -0.01, 0.0]);
    let mut state = AdamState::new([&p]);
    adam_update(&mut [&mut p], &[&grad], &mut state, &cfg).unwrap();
    assert!((p.data()[0] + 0.001).abs() < 1e-9);
    assert!((p.data()[1] - 0.001).abs() < 1e-6);
    assert_eq!(p.data()[2], 0.0);
    assert!(state.v[0].data().iter().all(|v| *v >= 0.0));
}
