use hebm_cli::sweep::{write_kl_csv, write_noise_csv, write_timing_csv};
use hebm_cli::{kl_sweep, noise_sweep, run_samples, timing_sweep, ExperimentConfig, TargetSpec};

fn bundled(name: &str) -> ExperimentConfig {
    ExperimentConfig::bundled(name).unwrap().unwrap()
}

#[test]
fn timing_grows_with_frame_count() {
    let cfg = bundled("timing");
    let rows = timing_sweep(&cfg, &[1, 5, 10, 20, 40], 1e-4).unwrap();
    assert_eq!(
        rows.iter().map(|r| r.n_dt).collect::<Vec<_>>(),
        [1, 5, 10, 20, 40]
    );
    let times: Vec<f64> = rows.iter().map(|r| r.seconds_to_threshold.unwrap()).collect();
    assert!(rows.iter().all(|r| !r.flagged && r.best_loss < 1e-4));
    // consecutive entries may dip by scheduler jitter but not halve
    assert!(times.windows(2).all(|w| w[1] >= 0.5 * w[0]), "{times:?}");
    assert!(times[4] > times[0], "{times:?}");
    assert!(times[0] < 60.0);

    let dir = tempfile::tempdir().unwrap();
    let mut out = cfg.clone();
    out.output_dir = dir.path().to_path_buf();
    let text = std::fs::read_to_string(write_timing_csv(&out, &rows).unwrap()).unwrap();
    assert!(text.starts_with("n_dt,seconds_to_threshold,samples_reached,best_loss,flagged\n"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn empty_frame_list_gives_empty_table() {
    assert!(timing_sweep(&bundled("timing"), &[], 1e-4).unwrap().is_empty());
}

#[test]
fn unreachable_threshold_is_flagged() {
    let mut cfg = bundled("timing");
    cfg.n_samples = 1;
    cfg.optimizer.max_iterations = 2;
    let rows = timing_sweep(&cfg, &[1], 1e-12).unwrap();
    assert!(rows[0].flagged);
    assert_eq!(rows[0].seconds_to_threshold, None);
}

#[test]
fn noiseless_cell_matches_noiseless_run() {
    let cfg = bundled("noise-gibbs");
    let cells = noise_sweep(&cfg, &[0.0], &[0.0]).unwrap();
    let mut clean = cfg.clone();
    clean.noise = None;
    clean.n_samples = cfg.sweep().grid_samples.unwrap_or(cfg.n_samples);
    let best = run_samples(&clean).unwrap().best_final_loss();
    assert!(
        (cells[0].min_loss - best).abs() < 1e-9,
        "{} vs {best}",
        cells[0].min_loss
    );
}

#[test]
fn gibbs_noise_thresholds_at_five_and_thirty_degrees() {
    let mut cfg = bundled("noise-gibbs");
    cfg.sweep.as_mut().unwrap().grid_samples = None;
    let cells = noise_sweep(&cfg, &[5.0, 30.0], &[5.0, 30.0]).unwrap();
    let at = |a: f64, b: f64| {
        cells
            .iter()
            .find(|c| c.phase_variance_deg == a && c.pole_variance_deg == b)
            .unwrap()
            .min_loss
    };
    let (low, high) = (at(5.0, 5.0), at(30.0, 30.0));
    assert!(high >= 1e-3, "(30, 30): {high}");
    assert!(low < 1e-4, "(5, 5): {low}");
}

#[test]
fn pole_kicks_dominate() {
    let cfg = bundled("noise-gibbs");
    let phases = [0.0, 15.0, 30.0, 45.0];
    let cells = noise_sweep(&cfg, &phases, &[0.0, 45.0]).unwrap();
    assert_eq!(cells.len(), 8);
    for pair in cells.chunks(2) {
        assert_eq!(pair[0].phase_variance_deg, pair[1].phase_variance_deg);
        assert!(pair[1].min_loss >= pair[0].min_loss, "{pair:?}");
    }

    let dir = tempfile::tempdir().unwrap();
    let mut out = cfg.clone();
    out.output_dir = dir.path().to_path_buf();
    let text = std::fs::read_to_string(write_noise_csv(&out, &cells).unwrap()).unwrap();
    assert!(text.starts_with("phase_variance_deg,pole_variance_deg,min_loss,mean_loss\n"));
}

/// `sum_j f_j ln(16 f_j)` over the Gaussian weights written out directly.
fn direct_kl(b: f64) -> f64 {
    let w: Vec<f64> = (0..16)
        .map(|j| (-(j as f64 - 7.5).powi(2) / (2.0 * b)).exp())
        .collect();
    let z: f64 = w.iter().sum();
    w.iter()
        .map(|x| x / z)
        .filter(|f| *f > 0.0)
        .map(|f| f * (16.0 * f).ln())
        .sum()
}

#[test]
fn kl_column_matches_direct_sum() {
    let mut cfg = bundled("kl-gauss");
    cfg.n_samples = 1;
    cfg.optimizer.max_iterations = 0;
    let b = cfg.sweep().b_values;
    let rows = kl_sweep(&cfg, &b, &[0.0]).unwrap();
    for row in &rows {
        assert!((row.kl - direct_kl(row.b)).abs() < 1e-12, "b = {}", row.b);
    }
    assert!(rows.windows(2).all(|w| w[1].kl < w[0].kl));

    let dir = tempfile::tempdir().unwrap();
    cfg.output_dir = dir.path().to_path_buf();
    let text = std::fs::read_to_string(write_kl_csv(&cfg, &[0.0], &rows).unwrap()).unwrap();
    assert!(text.starts_with("b,kl,log10_min_loss_0\n"));
    assert_eq!(text.lines().count(), 1 + b.len());
}

#[test]
fn wide_gaussian_is_nearly_free() {
    let cfg = bundled("kl-gauss");
    let rows = kl_sweep(&cfg, &[1e6], &[0.0]).unwrap();
    assert!(rows[0].kl < 1e-9, "{}", rows[0].kl);
    assert!(rows[0].min_losses[0] < 1e-8, "{:?}", rows[0].min_losses);
}

#[test]
fn weak_noise_keeps_every_width_below_ten_to_the_minus_four() {
    let cfg = bundled("kl-gauss");
    let b = cfg.sweep().b_values;
    let variances = [0.0, 5.0, 10.0];
    let rows = kl_sweep(&cfg, &b, &variances).unwrap();
    let worst: Vec<(f64, f64, f64)> = rows
        .iter()
        .flat_map(|r| {
            variances
                .iter()
                .zip(&r.min_losses)
                .map(move |(&v, &l)| (r.b, v, l.log10()))
        })
        .filter(|(_, _, l)| *l >= -4.0)
        .collect();
    assert!(
        worst.is_empty(),
        "(b, variance, log10 loss) at or above -4: {worst:?}"
    );
}

#[test]
fn kl_sweep_needs_a_gaussian_target() {
    let mut cfg = bundled("kl-gauss");
    cfg.target = TargetSpec::Bas;
    assert!(kl_sweep(&cfg, &[1.0], &[0.0]).is_err());
}
