//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line.
//!
//! Run with `cargo test -p shardbench-core --test acceptance -- --nocapture --test-threads 1`
//! to see the report in order.

use std::collections::{HashMap, HashSet};
use std::num::NonZeroU64;
use std::time::{Duration, Instant};

use shardbench::digest::md5_hex;
use shardbench::{
    ascii_sum, ascii_sum_placement, build_histogram, build_histogram_par, compute_stats,
    counter_placement, fanout_report, generate_corpus, letter_path, md5_digest, md5_path,
    md5_placement, merge_histograms, normalize_username, AsciiSumConfig, CorpusSpec, Histogram,
    LetterConfig, MappingConfig, Md5Config, NameModel, Strategy, Username, DEFAULT_FANOUT_LIMIT,
};

fn u(s: &str) -> Username {
    normalize_username(s).unwrap()
}

fn verdict(criterion: u32, checks: &[(&str, bool)]) {
    let pass = checks.iter().all(|(_, ok)| *ok);
    let failed: Vec<&str> = checks
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| *name)
        .collect();
    if pass {
        println!("criterion {criterion}: PASS");
    } else {
        println!("criterion {criterion}: FAIL ({})", failed.join("; "));
    }
    assert!(pass, "criterion {criterion} failed: {failed:?}");
}

#[test]
fn criterion_1_digest_exactness() {
    let rfc = [
        ("", "d41d8cd98f00b204e9800998ecf8427e"),
        ("a", "0cc175b9c0f1b6a831c399e269772661"),
        ("abc", "900150983cd24fb0d6963f7d28e17f72"),
        ("message digest", "f96b697d7cb7938d525a2f31aaf161d0"),
        (
            "abcdefghijklmnopqrstuvwxyz",
            "c3fcd3d76192e4007dfb496cca67e13b",
        ),
        (
            "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789",
            "d174ab98d277d9f5a5611c2c9f419d9f",
        ),
        (
            "12345678901234567890123456789012345678901234567890123456789012345678901234567890",
            "57edf4a22be3c955ac49da2e2107b67a",
        ),
    ];
    let start = Instant::now();
    let mut checks = vec![(
        "md5_digest(frank)",
        md5_digest(&u("frank")).as_str() == "d268c8fe7f154537c2c9ed60a0b8f2fd",
    )];
    let rfc_ok = rfc
        .iter()
        .all(|(input, hex)| md5_hex(input.as_bytes()).as_str() == *hex);
    checks.push(("RFC 1321 appendix vectors", rfc_ok));
    checks.push(("runtime < 1s", start.elapsed() < Duration::from_secs(1)));
    verdict(1, &checks);
}

#[test]
fn criterion_2_worked_example_chain() {
    let bob = u("bob");
    let oracle_sum: u32 = [98u32, 111, 98].iter().sum();
    let placement: Vec<(u32, u32)> = ascii_sum_placement(&bob, &AsciiSumConfig::default())
        .levels()
        .iter()
        .map(|l| (l.bucket, l.modulus))
        .collect();
    let expected_ascii = vec![(oracle_sum % 31, 31), ((111 + 98) % 33, 33)];

    // Hex pairs re-read straight from the reference digest string.
    let reference = "d268c8fe7f154537c2c9ed60a0b8f2fd";
    let pair = |k: usize| u32::from_str_radix(&reference[2 * k..2 * k + 2], 16).unwrap();
    let expected_md5 = vec![pair(0) % 64, pair(1) % 64, pair(2) % 128];
    let md5: Vec<u32> = md5_placement(&u("frank"), &Md5Config::default())
        .buckets()
        .collect();

    verdict(
        2,
        &[
            (
                "ascii_sum(bob, 0) = 307",
                ascii_sum(&bob, 0) == Ok(307) && oracle_sum == 307,
            ),
            (
                "bob under [31,33] = [(28,31),(11,33)]",
                placement == expected_ascii && placement == [(28, 31), (11, 33)],
            ),
            (
                "frank under [64,64,128] = [18,40,72]",
                md5 == expected_md5 && md5 == [18, 40, 72],
            ),
        ],
    );
}

#[test]
fn criterion_3_letter_path_fidelity() {
    let path = letter_path(&u("frankie"), "/root_dir", 6).to_string();
    verdict(
        3,
        &[
            (
                "renders <root>/f/r/a/n/k/i/frankie",
                path == "/root_dir/f/r/a/n/k/i/frankie",
            ),
            ("suffix matches", path.ends_with("/f/r/a/n/k/i/frankie")),
        ],
    );
}

#[test]
fn criterion_4_fanout_counts() {
    let report = fanout_report(Md5Config::default().moduli(), DEFAULT_FANOUT_LIMIT);
    verdict(
        4,
        &[
            ("8,192 under one top", report.dirs_under_one_top == 8_192),
            ("524,288 leaf buckets", report.total_leaf_buckets == 524_288),
            ("within 64,000 limit", report.ok),
        ],
    );
}

/// Deals IDs out bucket by bucket without any division: fill the current
/// bucket to `bucket_size`, then move to the next server.
fn fill_servers(members: u64, bucket_size: u64, servers: usize) -> Vec<u64> {
    let mut loads = vec![0u64; servers];
    let mut server = 0;
    let mut in_bucket = 0;
    for _ in 0..members {
        if in_bucket == bucket_size {
            in_bucket = 0;
            server = (server + 1) % servers;
        }
        loads[server] += 1;
        in_bucket += 1;
    }
    loads
}

fn library_loads(members: u64, cfg: &MappingConfig) -> Vec<u64> {
    let mut loads = vec![0u64; cfg.num_servers() as usize];
    for id in 1..=members {
        loads[counter_placement(NonZeroU64::new(id).unwrap(), cfg).server as usize] += 1;
    }
    loads
}

#[test]
fn criterion_5_counter_mapping_scenario() {
    let start = Instant::now();
    let coarse = MappingConfig::new(50_000, 20).unwrap();
    let coarse_loads = library_loads(1_000_000, &coarse);
    let overflow = counter_placement(NonZeroU64::new(1_000_001).unwrap(), &coarse);

    let fine = MappingConfig::new(10_000, 20).unwrap();
    let fine_loads = library_loads(1_049_999, &fine);
    let oracle = fill_servers(1_049_999, 10_000, 20);
    let gap = fine_loads.iter().max().unwrap() - fine_loads.iter().min().unwrap();
    let elapsed = start.elapsed();

    let boundary = library_loads(1_009_999, &fine);
    println!(
        "criterion 5 loads: gap at 1,049,999 = {gap} ({:?}); gap at 1,009,999 = {}",
        &fine_loads[..6],
        boundary.iter().max().unwrap() - boundary.iter().min().unwrap()
    );
    verdict(
        5,
        &[
            (
                "every server holds 50,000",
                coarse_loads.iter().all(|&l| l == 50_000),
            ),
            (
                "oracle agrees at 1,000,000",
                coarse_loads == fill_servers(1_000_000, 50_000, 20),
            ),
            ("member 1,000,001 -> server 0", overflow.server == 0),
            ("brute force matches library", fine_loads == oracle),
            ("gap at 1,049,999 is 9,999", gap == 9_999),
            ("runtime < 5s", elapsed < Duration::from_secs(5)),
        ],
    );
}

#[test]
fn criterion_6_distribution_quality() {
    let start = Instant::now();
    let corpus: Vec<Username> = generate_corpus(CorpusSpec::new(NameModel::NameLike, 100_000, 7))
        .unwrap()
        .collect();
    let ratio = |strategy: Strategy| {
        let hist = build_histogram_par(&corpus, &strategy, 0).unwrap();
        compute_stats(&hist).unwrap().deviation_ratio
    };
    let md5 = ratio(Strategy::Md5(Md5Config::default()));
    let letter = ratio(Strategy::Letter(LetterConfig::default()));
    let ascii = ratio(Strategy::AsciiSum(AsciiSumConfig::default()));
    let expected_md5 = (64.0f64 / 100_000.0).sqrt();
    let elapsed = start.elapsed();

    println!(
        "criterion 6 ratios: md5={md5:.5} ascii-sum={ascii:.5} letter={letter:.5} \
         (multinomial floors: md5 {expected_md5:.5}, ascii-sum {:.5})",
        (31.0f64 / 100_000.0).sqrt()
    );
    verdict(
        6,
        &[
            ("md5 < 0.05", md5 < 0.05),
            (
                "md5 within 2x of sqrt(64/1e5)",
                md5 <= 2.0 * expected_md5 && md5 >= expected_md5 / 2.0,
            ),
            ("letter > 0.3", letter > 0.3),
            ("ascii-sum < 0.1", ascii < 0.1),
            ("md5 <= ascii-sum", md5 <= ascii),
            ("ascii-sum < letter", ascii < letter),
            ("runtime < 10s", elapsed < Duration::from_secs(10)),
        ],
    );
}

#[test]
fn criterion_7_injectivity() {
    let start = Instant::now();
    let names: Vec<Username> = generate_corpus(CorpusSpec::new(NameModel::Uniform, 100_000, 11))
        .unwrap()
        .collect();
    let distinct_names: HashSet<&Username> = names.iter().collect();
    let cfg = Md5Config::default();
    let md5_paths: HashSet<String> = names
        .iter()
        .map(|n| md5_path(n, &cfg, "/nas").to_string())
        .collect();
    let letter_paths: HashSet<String> = names
        .iter()
        .map(|n| letter_path(n, "/data", 6).to_string())
        .collect();
    let elapsed = start.elapsed();

    verdict(
        7,
        &[
            ("100,000 distinct names", distinct_names.len() == 100_000),
            ("100,000 distinct md5 paths", md5_paths.len() == 100_000),
            (
                "100,000 distinct letter paths",
                letter_paths.len() == 100_000,
            ),
            ("runtime < 10s", elapsed < Duration::from_secs(10)),
        ],
    );
}

const ALPHABET: &str = "0123456789abcdefghijklmnopqrstuvwxyz_";

/// Per-level buckets computed from first principles, without the strategy module.
fn naive_buckets(strategy: &Strategy, name: &str) -> Vec<(u64, u64)> {
    match strategy {
        Strategy::Letter(cfg) => name
            .chars()
            .take(usize::from(cfg.levels()))
            .map(|c| (ALPHABET.find(c).unwrap() as u64, 37))
            .collect(),
        Strategy::AsciiSum(cfg) => cfg
            .moduli()
            .iter()
            .enumerate()
            .take_while(|(drop, _)| *drop < name.len())
            .map(|(drop, &m)| {
                let sum: u64 = name.bytes().skip(drop).map(u64::from).sum();
                (sum % u64::from(m), u64::from(m))
            })
            .collect(),
        Strategy::Md5(cfg) => {
            let hex = md5_hex(format!("{name}\n").as_bytes()).to_string();
            cfg.moduli()
                .iter()
                .enumerate()
                .map(|(k, &m)| {
                    let pair = u64::from_str_radix(&hex[2 * k..2 * k + 2], 16).unwrap();
                    (pair % u64::from(m), u64::from(m))
                })
                .collect()
        }
    }
}

fn naive_histogram(
    names: &[Username],
    strategy: &Strategy,
    level: usize,
) -> (HashMap<u64, u64>, u64) {
    let mut counts = HashMap::new();
    let mut skipped = 0;
    for name in names {
        let buckets = naive_buckets(strategy, name.as_str());
        if buckets.len() <= level {
            skipped += 1;
            continue;
        }
        let mut index = 0u64;
        for &(bucket, modulus) in &buckets[..=level] {
            index = index * modulus + bucket;
        }
        *counts.entry(index).or_insert(0) += 1;
    }
    (counts, skipped)
}

fn matches_naive(hist: &Histogram, naive: &(HashMap<u64, u64>, u64)) -> bool {
    let dense_ok = hist
        .counts()
        .iter()
        .enumerate()
        .all(|(i, &c)| c == naive.0.get(&(i as u64)).copied().unwrap_or(0));
    let in_range = naive.0.keys().all(|&k| (k as usize) < hist.bucket_count());
    dense_ok
        && in_range
        && hist.skipped() == naive.1
        && hist.total() == naive.0.values().sum::<u64>()
}

#[test]
fn criterion_8_oracle_equivalence() {
    let names: Vec<Username> =
        generate_corpus(CorpusSpec::new(NameModel::NameLike, 1_000, 5).with_lengths(1, 8))
            .unwrap()
            .collect();
    let strategies = [
        Strategy::Letter(LetterConfig::new(3).unwrap()),
        Strategy::AsciiSum(AsciiSumConfig::default()),
        Strategy::Md5(Md5Config::default()),
    ];

    let mut checks = Vec::new();
    let mut labels = Vec::new();
    for strategy in &strategies {
        for level in 0..strategy.depth() {
            let naive = naive_histogram(&names, strategy, level);
            let single = build_histogram(&names, strategy, level).unwrap();
            let parallel = build_histogram_par(&names, strategy, level).unwrap();
            let streamed = names
                .chunks(300)
                .map(|chunk| build_histogram(chunk, strategy, level).unwrap())
                .reduce(|a, b| merge_histograms(&a, &b).unwrap())
                .unwrap();
            labels.push(format!("{} level {level}", strategy.name()));
            checks.push(
                matches_naive(&single, &naive)
                    && matches_naive(&parallel, &naive)
                    && matches_naive(&streamed, &naive),
            );
        }
    }
    let named: Vec<(&str, bool)> = labels.iter().map(String::as_str).zip(checks).collect();
    verdict(8, &named);
}

#[test]
fn criterion_9_stats_definition() {
    let mut hist = Histogram::zeroed(vec![10]).unwrap();
    for _ in 0..20 {
        hist.record(0);
    }
    let stats = compute_stats(&hist).unwrap();
    verdict(
        9,
        &[
            ("ideal_mean = 2", stats.ideal_mean == 2.0),
            ("std_dev = 6", stats.std_dev == 6.0),
            ("ratio = 3", stats.deviation_ratio == 3.0),
        ],
    );
}
