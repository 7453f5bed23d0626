use a2g_mimo::csi::CsiTensor;
use a2g_mimo::frequency::freq_corr_series_with;
use a2g_mimo::geo::{synth_csi_with, Scene, SceneFile};
use a2g_mimo::pdp::averaged_pdp_from_csi_with;
use a2g_mimo::temporal::{cmd_map_with, CmdMapParams, MapAxis};
use a2g_mimo::Execution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const STRATEGIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn scene() -> (Scene, a2g_mimo::csi::MeasurementConfig) {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenes/height_11.toml")).unwrap();
    SceneFile::parse(&text).unwrap().build().unwrap()
}

fn tensor(seconds: f64) -> (Scene, CsiTensor) {
    let (s, c) = scene();
    let x = synth_csi_with(&s, &c, seconds, Execution::default()).unwrap();
    (s, x)
}

fn bench_synth(c: &mut Criterion) {
    let (s, cfg) = scene();
    let mut g = c.benchmark_group("synth_csi_0.2s");
    g.sample_size(10);
    for (name, exec) in STRATEGIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| synth_csi_with(&s, &cfg, 0.2, e).unwrap())
        });
    }
    g.finish();
}

fn bench_analysis(c: &mut Criterion) {
    let (s, x) = tensor(2.0);
    let pos: Vec<[f64; 3]> = x.timestamps().iter().map(|&t| s.trajectory.position_at(t)).collect();
    let params = CmdMapParams::default();
    let starts: Vec<usize> = (0..=x.snapshots() - params.window).step_by(params.stride).collect();

    let mut g = c.benchmark_group("cmd_map_2s");
    g.sample_size(10);
    for (name, exec) in STRATEGIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| cmd_map_with(&x, &pos, MapAxis::Distance, &params, e).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("averaged_pdp_2s");
    g.sample_size(10);
    for (name, exec) in STRATEGIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| averaged_pdp_from_csi_with(&x, params.window, e).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("freq_corr_2s");
    g.sample_size(10);
    for (name, exec) in STRATEGIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| freq_corr_series_with(&x, &starts, params.window, e).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_synth, bench_analysis);
criterion_main!(benches);
