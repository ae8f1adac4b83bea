use std::process::Command;

use corrlift::corpus::{coprime_pair, planted_pair, unit_circle_factor};
use corrlift::poly::{convolve, from_roots};
use corrlift::{RootSet, Signal, SolverOptions, C64};
use corrlift_cli::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn config(snr: Vec<f64>, trials: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        l1: 2,
        l2: 3,
        snr_db_list: snr,
        trials,
        seed,
        reduced: false,
        solver: SolverOptions::default(),
        out_path: None,
    }
}

/// `(which, re, im, multiplicity)` rows of a zero table.
fn zero_rows(csv_text: &str) -> Vec<(String, C64, usize)> {
    csv_text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[0].to_string(),
                C64::new(f[1].parse().unwrap(), f[2].parse().unwrap()),
                f[3].parse().unwrap(),
            )
        })
        .collect()
}

#[test]
fn generated_signals_follow_the_protocol() {
    let mut r = rng(1);
    let (mut sum, mut count) = (0.0, 0usize);
    for _ in 0..10_000 {
        let x = gen_signal(4, &mut r);
        assert!(x[0].norm() >= 0.1 && x[3].norm() >= 0.1);
        // interior entries are untouched by the edge rejection
        sum += x[1].norm_sqr() + x[2].norm_sqr();
        count += 2;
    }
    let var = sum / count as f64;
    assert!((var - 1.0).abs() <= 0.05, "{var}");
    assert_eq!(gen_signal(5, &mut rng(7)), gen_signal(5, &mut rng(7)));
}

#[test]
fn noiseless_sentinel_rows_recover() {
    let rows = run_sweep(&config(vec![f64::INFINITY], 10, 3)).unwrap();
    assert_eq!(rows.len(), 10);
    for r in &rows {
        assert_eq!(r.sigma, 0.0);
        assert!(!r.failed && r.mse <= 1e-5, "{r:?}");
    }
}

#[test]
fn rows_are_ordered_and_valid() {
    let cfg = config(vec![10.0, 30.0], 5, 4);
    let rows = run_sweep(&cfg).unwrap();
    let keys: Vec<(f64, usize)> = rows.iter().map(|r| (r.rsnr_db, r.trial)).collect();
    let want: Vec<(f64, usize)> = [10.0, 30.0]
        .iter()
        .flat_map(|&s| (0..5).map(move |t| (s, t)))
        .collect();
    assert_eq!(keys, want);
    for (k, r) in rows.iter().enumerate() {
        assert!(r.mse >= 0.0 && r.sigma > 0.0);
        assert_eq!((r.l1, r.l2), (2, 3));
        assert_eq!(r.seed, trial_seed(4, k / 5, k % 5));
        assert!((r.mse_per_dim_db - 10.0 * (r.mse / 5.0).log10()).abs() < 1e-12);
    }
}

#[test]
fn csv_round_trips() {
    let rows = run_sweep(&config(vec![20.0, f64::INFINITY], 3, 5)).unwrap();
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    assert!(buf.starts_with(CSV_HEADER.as_bytes()));
    assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
}

#[test]
fn thread_count_does_not_change_rows() {
    let cfg = config(vec![15.0, 25.0], 6, 6);
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_sweep(&cfg).unwrap());
    let parallel = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| run_sweep(&cfg).unwrap());
    assert_eq!(serial, parallel);
}

#[test]
fn reduced_sweep_recovers() {
    let mut cfg = config(vec![f64::INFINITY], 5, 8);
    cfg.reduced = true;
    for r in run_sweep(&cfg).unwrap() {
        assert!(r.mse <= 1e-5);
    }
}

#[test]
fn zero_table_examples() {
    let rows = zero_rows(&cmd_zeros(&parse_signal("1,-1").unwrap(), None).unwrap());
    assert_eq!(rows, vec![("x1".to_string(), C64::new(1.0, 0.0), 1)]);

    let sq = from_roots(&RootSet {
        unit: C64::new(1.0, 0.0),
        zeros: vec![C64::new(0.5, 0.2); 2],
        origin_power: 0,
    })
    .unwrap();
    let rows = zero_rows(&cmd_zeros(&sq, None).unwrap());
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].2, 2);
    assert!((rows[0].1 - C64::new(0.5, 0.2)).norm() < 1e-6);
}

#[test]
fn product_zeros_are_the_union() {
    let mut r = rng(9);
    for _ in 0..20 {
        let (x1, x2) = coprime_pair(3, 4, 0.05, &mut r);
        let rows = zero_rows(&cmd_zeros(&x1, Some(&x2)).unwrap());
        let mut factors: Vec<(C64, usize)> = rows
            .iter()
            .filter(|r| r.0 != "product")
            .map(|r| (r.1, r.2))
            .collect();
        let product: Vec<(C64, usize)> = rows
            .iter()
            .filter(|r| r.0 == "product")
            .map(|r| (r.1, r.2))
            .collect();
        assert_eq!(factors.len(), product.len());
        for (z, m) in product {
            let k = factors
                .iter()
                .position(|(w, n)| (w - z).norm() < 1e-8 && *n == m)
                .expect("matching zero");
            factors.swap_remove(k);
        }
    }
}

#[test]
fn certificate_reports() {
    let mut r = rng(10);
    let (x1, x2) = coprime_pair(3, 2, 0.0, &mut r);
    let rep = parse_report(&cmd_certify(&x1, &x2)).unwrap();
    assert!(rep.in_range && rep.injective);
    assert_eq!(rep.rank, 4);

    let f = unit_circle_factor(&mut r);
    let (y1, y2) = planted_pair(&f, 3, 3, 1e-2, &mut r);
    let rep = parse_report(&cmd_certify(&y1, &y2)).unwrap();
    assert!(!rep.injective && !rep.certifies());

    let text = cmd_certify(&Signal::from_re(&[0., 1.]), &Signal::from_re(&[1., 1.]));
    assert!(text.starts_with("error="));
    assert!(parse_report(&text).is_err());
}

#[test]
fn ambiguity_listing_examples() {
    let two = cmd_ambiguities(
        &parse_signal("1,-1").unwrap(),
        &parse_signal("1,-2").unwrap(),
    )
    .unwrap();
    assert!(two.contains("lower=2\nupper=4\n") && two.contains("classes=2\n"));
    let one = cmd_ambiguities(&parse_signal("1").unwrap(), &parse_signal("1,-2").unwrap()).unwrap();
    assert!(one.contains("classes=1\n"));
    let double = cmd_ambiguities(
        &parse_signal("1,-1").unwrap(),
        &parse_signal("1,-1").unwrap(),
    )
    .unwrap();
    assert!(double.contains("classes=1\n"));
    for line in two.lines().filter(|l| l.starts_with("class=")) {
        let get = |k: &str| line.split(' ').find_map(|f| f.strip_prefix(k)).unwrap();
        let (p, q) = (
            parse_signal(get("x1=")).unwrap(),
            parse_signal(get("x2=")).unwrap(),
        );
        assert!(convolve(&p, &q).rel_distance(&Signal::from_re(&[1., -3., 2.])) <= 1e-12);
    }
    let long = Signal::new(vec![C64::new(1.0, 0.0); 10]).unwrap();
    assert!(cmd_ambiguities(&long, &long).is_err());
}

#[test]
fn recover_command_reports_the_estimate() {
    let mut r = rng(11);
    let (x1, x2) = coprime_pair(2, 3, 0.0, &mut r);
    let input = RecoverInput {
        x1,
        x2,
        snr_db: f64::INFINITY,
        seed: 0,
        reduced: true,
        solver: SolverOptions::default(),
    };
    let out = cmd_recover(&input).unwrap();
    let get = |k: &str| {
        out.lines()
            .find_map(|l| l.strip_prefix(k))
            .unwrap()
            .to_string()
    };
    assert_eq!(get("measurements="), "12");
    assert!(get("mse=").parse::<f64>().unwrap() <= 1e-5);
    assert_eq!(parse_signal(&get("x2=")).unwrap().len(), 3);
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_corrlift");
    let ok = Command::new(bin)
        .args([
            "sweep", "--l1", "2", "--l2", "2", "--trials", "1", "--snr-db", "20",
        ])
        .output()
        .unwrap();
    assert!(ok.status.success());
    assert_eq!(
        String::from_utf8(ok.stdout)
            .unwrap()
            .lines()
            .next()
            .unwrap(),
        CSV_HEADER
    );
    for bad in [
        vec!["sweep", "--trials", "0"],
        vec!["sweep", "--snr-db", "ten"],
        vec!["certify", "--signal", "1,2"],
        vec!["zeros", "--signal", "1,x"],
    ] {
        let out = Command::new(bin).args(&bad).output().unwrap();
        assert!(!out.status.success(), "{bad:?}");
    }
    let cert = Command::new(bin)
        .args(["certify", "--signal", "1,-1", "--signal", "1,-2"])
        .output()
        .unwrap();
    assert!(cert.status.success());
    assert!(parse_report(&String::from_utf8(cert.stdout).unwrap())
        .unwrap()
        .certifies());
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 32,
        failure_persistence: None,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed),
        ..ProptestConfig::default()
    })]

    #[test]
    fn report_parses_back_losslessly(seed in any::<u64>(), l1 in 1usize..5, l2 in 1usize..5) {
        let (x1, x2) = coprime_pair(l1, l2, 0.0, &mut rng(seed));
        let text = cmd_certify(&x1, &x2);
        let rep = parse_report(&text).unwrap();
        prop_assert_eq!(&rep, &corrlift::sylvester::certify(&x1, &x2).unwrap());
        prop_assert_eq!(cmd_certify(&x1, &x2), text);
    }

    #[test]
    fn complex_literals_round_trip(re in -1e6f64..1e6, im in -1e6f64..1e6) {
        let z = C64::new(re, im);
        prop_assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
    }
}
