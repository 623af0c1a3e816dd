use qvar::qcore::RngStream;
use qvar::randmat::{remainder_experiment, RemainderConfig, RemainderCost};

fn config(theta: f64, cost: RemainderCost) -> RemainderConfig {
    RemainderConfig { n_qubits: 3, theta, l_max: 8, n_draws: 50, lambda_a: 1.0, lambda_b: 1.0, cost, commuting: false }
}

#[test]
fn predictions_fall_within_one_std_at_d8() {
    for cost in [RemainderCost::Potq, RemainderCost::Infidelity] {
        for theta in [0.5, 1.0] {
            let rows = remainder_experiment(&config(theta, cost), &RngStream::new(2024, 7)).unwrap();
            for r in &rows {
                assert!((r.pred_exact - r.emp_mean).abs() <= r.emp_std, "{cost:?} θ={theta} L={}: {r:?}", r.l);
            }
        }
    }
}

#[test]
fn series_error_crosses_finite_difference_error() {
    let cfg = RemainderConfig { l_max: 10, ..config(0.5, RemainderCost::Potq) };
    let rows = remainder_experiment(&cfg, &RngStream::new(2024, 7)).unwrap();
    assert!(rows[0].emp_mean > rows[0].fd_delta075);
    assert!(rows.iter().any(|r| r.emp_mean < r.fd_delta075));
}

#[test]
fn first_order_error_follows_theta_power_law() {
    let run = |theta| remainder_experiment(&RemainderConfig { l_max: 1, ..config(theta, RemainderCost::Potq) }, &RngStream::new(2024, 8)).unwrap();
    let ratio = run(0.4)[1].emp_mean / run(0.2)[1].emp_mean;
    assert!((ratio / 16.0 - 1.0).abs() < 0.4, "{ratio}");
}
