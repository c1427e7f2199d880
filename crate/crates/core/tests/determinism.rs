use phisub::bounds::Resolution;
use phisub::process::{
    builtin_kernel, compute_coefficients, simulate_paths, verify_reliability, VerifySettings, XiMode,
};
use phisub::quadrature::{QuadratureRule, TimeGrid};
use phisub::{Family, Orlicz, Process, TailBound};

fn spec() -> Process {
    Process::new(
        builtin_kernel("exp-bounded", 1.0).unwrap(),
        Family::legendre(),
        1.0,
        2.0,
        Orlicz::sub_gaussian(),
        TailBound::new(1.0, 0.5).unwrap(),
    )
    .unwrap()
}

fn in_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn settings(seed: u64) -> VerifySettings<f64> {
    VerifySettings {
        model_n: 2,
        reference_n: 12,
        delta: 0.05,
        alpha: 0.05,
        paths: 400,
        mode: XiMode::NormDecaying,
        seed,
    }
}

#[test]
fn verification_independent_of_thread_count() {
    let res = Resolution { spectral_nodes: 64, reference_nodes: 128, time_points: 65, oracle_nodes: 64 };
    let s = spec();
    let one = in_pool(1, || verify_reliability(&s, &settings(7), &res).unwrap());
    let many = in_pool(8, || verify_reliability(&s, &settings(7), &res).unwrap());
    let again = in_pool(3, || verify_reliability(&s, &settings(7), &res).unwrap());
    assert_eq!(one, many);
    assert_eq!(one, again);
    let other = in_pool(8, || verify_reliability(&s, &settings(8), &res).unwrap());
    assert_ne!(one.mean_norm.to_bits(), other.mean_norm.to_bits());
}

#[test]
fn simulated_paths_bitwise_stable() {
    let s = spec();
    let rule = QuadratureRule::for_family(&s.family, 64).unwrap();
    let grid = TimeGrid::new(1.0, 33).unwrap();
    let table = compute_coefficients(&s, 5, &rule, &grid).unwrap();
    let a = in_pool(1, || simulate_paths(&s, &table, XiMode::UnitVariance, 50, 11).unwrap());
    let b = in_pool(6, || simulate_paths(&s, &table, XiMode::UnitVariance, 50, 11).unwrap());
    let bits = |p: &Vec<Vec<f64>>| p.iter().flatten().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
}
