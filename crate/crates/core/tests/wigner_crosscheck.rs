use plancherel_core::wigner::{
    exact_low_moment_covariance, overlap_monotonicity_report, sample_trace_batch, shifted_overlap_sets,
    trace_covariance, WignerConfig,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config(size: usize, sets: Vec<Vec<usize>>, seed: u64, replicas: u64, orders: Vec<u32>) -> WignerConfig {
    WignerConfig {
        size,
        index_sets: sets,
        seed,
        replicas,
        moment_orders: orders,
    }
}

fn mean_se(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = xs.collect();
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

#[test]
fn low_order_trace_moments() {
    let b: Vec<usize> = (3..=14).collect();
    let c = config(16, vec![b.clone()], 1, 4000, vec![1, 2]);
    let s = sample_trace_batch(&c).unwrap();
    let n = b.len() as f64;
    let (m1, se1) = mean_se(s.iter().map(|t| t.traces[0][0]));
    assert!(m1.abs() < 4.0 * se1);
    let (v1, sev) = mean_se(s.iter().map(|t| t.traces[0][0].powi(2)));
    assert!((v1 - n).abs() < 4.0 * sev, "Var Tr X_B = {v1}, want {n}");
    let (m2, se2) = mean_se(s.iter().map(|t| t.traces[0][1]));
    assert!((m2 - n * n).abs() < 4.0 * se2, "E Tr X_B² = {m2}, want {}", n * n);
}

#[test]
fn second_order_covariance_matches_exact() {
    let sets = shifted_overlap_sets(24, &[0.0, 0.25, 0.5, 0.75, 1.0]).unwrap();
    let c = config(48, sets.clone(), 2, 3000, vec![2]);
    let s = sample_trace_batch(&c).unwrap();
    for j in 1..sets.len() {
        let e = trace_covariance(&c, &s, (0, 0), (j, 0)).unwrap();
        let want = exact_low_moment_covariance(&sets[0], &sets[j], 2).unwrap();
        assert!((e.value - want).abs() < 4.0 * e.stderr, "set {j}: {} ± {} vs {want}", e.value, e.stderr);
    }
    let rep = overlap_monotonicity_report(&c, &s, 4.0).unwrap();
    assert!(rep.monotone && rep.zero_at_disjoint && rep.matches_exact);
    assert_eq!(rep.rows.len(), 5);
    assert!(rep.to_csv().starts_with("setsize_r,setsize_s,overlap"));
}

#[test]
fn disjoint_higher_traces_are_uncorrelated() {
    let c = config(20, vec![(1..=10).collect(), (11..=20).collect()], 4, 2000, vec![3, 4]);
    let s = sample_trace_batch(&c).unwrap();
    for o in 0..2 {
        let e = trace_covariance(&c, &s, (0, o), (1, o)).unwrap();
        assert!(e.value.abs() < 4.0 * e.stderr);
    }
}

#[test]
fn covariance_depends_only_on_set_sizes_and_overlap() {
    let sets = vec![(1..=10).collect::<Vec<_>>(), (6..=17).collect()];
    let mut perm: Vec<usize> = (1..=20).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(9));
    let moved: Vec<Vec<usize>> = sets.iter().map(|b| b.iter().map(|&v| perm[v - 1]).collect()).collect();
    let a = config(20, sets, 5, 3000, vec![2, 3]);
    let b = config(20, moved, 6, 3000, vec![2, 3]);
    let (sa, sb) = (sample_trace_batch(&a).unwrap(), sample_trace_batch(&b).unwrap());
    for o in 0..2 {
        let x = trace_covariance(&a, &sa, (0, o), (1, o)).unwrap();
        let y = trace_covariance(&b, &sb, (0, o), (1, o)).unwrap();
        // two-sided 1% level
        assert!((x.value - y.value).abs() < 2.576 * (x.stderr.powi(2) + y.stderr.powi(2)).sqrt());
    }
}

#[test]
fn batches_do_not_depend_on_thread_count() {
    let c = config(12, vec![(1..=6).collect(), (4..=12).collect()], 8, 40, vec![1, 2, 3]);
    let run = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(|| sample_trace_batch(&c).unwrap())
    };
    assert_eq!(run(1), run(4));
}
