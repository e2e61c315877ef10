use rsgda_harness::data::gen_synthetic;
use rsgda_harness::experiment::{
    normalize, run_experiment, split, trailing_average, write_outputs, write_records,
    ExperimentKind,
};
use rsgda_harness::settings::Settings;

fn small() -> Settings {
    let mut s = Settings::default();
    s.apply_text(
        "n=200\ndv=6\ndh=3\nN_values=100,200,400\nstep_values=0.5,1,2\nwindow=20\ndraws=200\n",
    )
    .unwrap();
    s
}

#[test]
fn trailing_average_examples() {
    assert_eq!(trailing_average(&[3.0; 100], 100).unwrap(), 3.0);
    let ramp: Vec<f64> = (1..=200).map(f64::from).collect();
    assert_eq!(trailing_average(&ramp, 100).unwrap(), 150.5);
    assert_eq!(trailing_average(&[1.0, 2.0, 3.0], 100).unwrap(), 2.0);
    assert_eq!(trailing_average(&[], 10).unwrap_err().category(), "sweep");
}

#[test]
fn grad_vs_n_has_one_row_per_point_normalized_per_series() {
    let out = run_experiment(ExperimentKind::GradVsN, &small()).unwrap();
    assert_eq!(out.records.len(), 9);
    for series in ["D=0.5", "D=1", "D=2"] {
        let rows: Vec<_> = out.records.iter().filter(|r| r.series == series).collect();
        assert_eq!(rows.len(), 3);
        let xs: Vec<f64> = rows.iter().map(|r| r.x_value).collect();
        assert_eq!(xs, vec![100.0, 200.0, 400.0]);
        let max = rows.iter().map(|r| r.grad_raw).fold(0.0, f64::max);
        for r in rows {
            assert!(r.grad_raw > 0.0);
            assert_eq!(r.grad_norm, r.grad_raw / max);
            assert_eq!(r.x_name, "N");
        }
    }
}

#[test]
fn csv_output_is_deterministic_without_timing() {
    let mut s = small();
    s.set("timing", "false").unwrap();
    s.set("seeds", "2").unwrap();
    let base = std::env::temp_dir().join(format!("rsgda-exp-{}", std::process::id()));
    let mut texts = Vec::new();
    for run in 0..2 {
        let dir = base.join(run.to_string());
        let out = run_experiment(ExperimentKind::GradVsN, &s).unwrap();
        write_outputs(&out, &s, &dir).unwrap();
        texts.push((
            std::fs::read_to_string(dir.join("grad_vs_N.csv")).unwrap(),
            std::fs::read_to_string(dir.join("manifest.txt")).unwrap(),
        ));
    }
    assert_eq!(texts[0], texts[1]);
    assert_eq!(texts[0].0.lines().count(), 1 + 18);
    let mut replay = Settings::default();
    replay.apply_text(&texts[0].1).unwrap();
    assert_eq!(replay, s);
}

#[test]
fn shape_sweep_and_distributed_sweep_run() {
    let mut s = small();
    s.apply_text("dv_values=4,8\ndh_values=2\nN=300\nB_values=1,2\nzeta=0.6\nwarm_start=50\n")
        .unwrap();
    let shape = run_experiment(ExperimentKind::GradVsShape, &s).unwrap();
    assert_eq!(shape.records.len(), 2);
    assert!(shape.records.iter().all(|r| r.series == "dh=2"));
    let b = run_experiment(ExperimentKind::GradVsB, &s).unwrap();
    assert_eq!(b.records.len(), 2);
    assert!(b
        .records
        .iter()
        .all(|r| r.grad_raw > 0.0 && r.grad_norm <= 1.0));
}

#[test]
fn parity_summary_covers_every_b() {
    let mut s = small();
    s.apply_text("N=400\nB_values=2\nzeta=0.8\nsplits=3\nwarm_start=50\n")
        .unwrap();
    let out = run_experiment(ExperimentKind::GeneralizationParity, &s).unwrap();
    assert_eq!(out.records.len(), 3);
    assert_eq!(out.parity.len(), 1);
    assert_eq!(out.parity[0].ratios.len(), 3);
    assert!(out.parity[0].mean_ratio > 0.0);
}

#[test]
fn infeasible_sweeps_are_reported() {
    let mut s = small();
    s.set("N_values", "").unwrap();
    assert_eq!(
        run_experiment(ExperimentKind::GradVsN, &s)
            .unwrap_err()
            .category(),
        "config"
    );
    let mut s = small();
    s.apply_text("schedule=constant\nstep_values=1000\n")
        .unwrap();
    let e = run_experiment(ExperimentKind::GradVsN, &s).unwrap_err();
    assert_eq!(e.category(), "schedule-validity");
    assert!(e.to_string().contains("gamma=1000"), "{e}");
}

#[test]
fn split_is_a_partition() {
    let d = gen_synthetic(50, 3, 0.1, 5, true).unwrap();
    let (train, test) = split(&d, 0.2, 11).unwrap();
    assert_eq!(test.len(), 10);
    assert_eq!(train.len(), 40);
    let mut all: Vec<Vec<u64>> = train
        .rows()
        .chain(test.rows())
        .map(|r| r.iter().map(|v| v.to_bits()).collect())
        .collect();
    let mut orig: Vec<Vec<u64>> = d
        .rows()
        .map(|r| r.iter().map(|v| v.to_bits()).collect())
        .collect();
    all.sort();
    orig.sort();
    assert_eq!(all, orig);
}

#[test]
fn normalize_and_write_agree() {
    let mut out = run_experiment(ExperimentKind::GradVsN, &small())
        .unwrap()
        .records;
    normalize(&mut out).unwrap();
    let mut buf = Vec::new();
    write_records(&out, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(
        text.starts_with("experiment,series,x_name,x_value,grad_raw,grad_norm,seed,elapsed_ms\n")
    );
    assert_eq!(text.lines().count(), 10);
}
