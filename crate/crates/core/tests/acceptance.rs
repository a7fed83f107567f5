//! Acceptance suite. Each criterion produces a deterministic text report and
//! a verdict; one PASS/FAIL line per criterion is printed, and criterion 10
//! re-runs 1..9 across worker counts and compares the reports byte for byte.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weil::explicit_formula::{rh_bound_ratio, riemann_approx, sieve_pi, PrimeCounter, ZeroTable};
use weil::finite_field::{make_field, FieldSpec};
use weil::motive::{motive_of_elliptic_curve, motive_of_projective_space, Motive};
use weil::variety::{
    count_affine, count_projective_space, count_projective_variety, parse_system,
    projective_space_closed_form, CountOptions, CountSequence, PolySystem, Polynomial,
};
use weil::weil::{
    correction_term, hasse_alpha, predict_affine_count, verify_weil_rh, weil_numbers_from_counts,
    FrobeniusAlpha,
};
use weil::zeta::{curve_denominator, rational_reconstruct, series_agree, zeta_series};

// Golden values.
const GOLDEN_COUNTS: [u64; 12] = [4, 4, 4, 24, 24, 64, 144, 224, 544, 1024, 1984, 4224];
const GOLDEN_CORRECTIONS: [i128; 10] = [2, 0, -4, 8, -8, 0, 16, -32, 32, 0];
/// α^n for α = −1 + i, n = 1..10, as (re, im).
const GOLDEN_ALPHA_POWERS: [(f64, f64); 10] = [
    (-1.0, 1.0),
    (0.0, -2.0),
    (2.0, 2.0),
    (-4.0, 0.0),
    (4.0, -4.0),
    (0.0, 8.0),
    (-8.0, -8.0),
    (16.0, 0.0),
    (-16.0, 16.0),
    (0.0, -32.0),
];
const GOLDEN_ALPHA_SUMS: [i128; 10] = [-2, 0, 4, -8, 8, 0, -16, 32, -32, 0];
/// Projective counts of y² + y = x⁵ over F_2, F_4, F_8, F_16 (independent
/// brute-force oracle).
const GENUS2_PROJECTIVE: [u64; 4] = [3, 5, 9, 33];

// Pinned tolerances.
const ZETA_MODULUS_TOL: f64 = 1e-9;
const GENUS2_MODULUS_TOL: f64 = 1e-6;
const EF_MAX_DEVIATION_K13: f64 = 1.0;
/// Oracle RMS errors over half-integers in [2, 230] for K = 0, 13, 50, 118.
const EF_ORACLE_RMS: [f64; 4] = [0.54784, 0.30467, 0.18847, 0.12888];
const EF_ORACLE_RMS_TOL: f64 = 5e-5;
/// Oracle values of the truncated formula: (K, x, approx).
const EF_ORACLE_POINTS: [(usize, f64, f64); 9] = [
    (0, 2.5, 1.04236308251632),
    (0, 19.5, 7.34599149937474),
    (0, 229.5, 49.8084806705944),
    (13, 2.5, 0.976785411543989),
    (13, 19.5, 7.87488191728099),
    (13, 229.5, 49.2772736048304),
    (118, 2.5, 1.01429384116662),
    (118, 19.5, 7.95966953923469),
    (118, 229.5, 49.7504966489937),
];
const EF_ORACLE_POINT_TOL: f64 = 1e-7;
const RH_RATIO_CEILING: f64 = 1.5;
/// sup_{3 ≤ n ≤ N} |π(n) − li(n)| / (√n ln n), attained at n = 4, for both
/// N = 10⁴ and N = 10⁵ (oracle).
const RH_ORACLE_SUP: f64 = 0.348982554562729;
const RH_ORACLE_TOL: f64 = 1e-9;

// Runtime budgets.
const C1_SERIAL_BUDGET: Duration = Duration::from_secs(60);
const C1_PARALLEL_BUDGET: Duration = Duration::from_secs(15);
const C8_BUDGET: Duration = Duration::from_secs(30);
const C9_BUDGET: Duration = Duration::from_secs(10);

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn opts(workers: usize, exhaustive: bool) -> CountOptions {
    CountOptions {
        workers,
        exhaustive,
        ..Default::default()
    }
}

fn system(text: &str) -> PolySystem {
    parse_system(text, None).expect("valid system")
}

fn supersingular() -> PolySystem {
    system("y^2 + y = x^3 + x")
}

fn affine_counts(sys: &PolySystem, p: u64, m: u32, o: CountOptions) -> Result<Vec<u64>, String> {
    (1..=m)
        .map(|n| {
            let f = make_field(p, n).map_err(|e| e.to_string())?;
            count_affine(sys, &f, o).map_err(|e| e.to_string())
        })
        .collect()
}

fn criterion_1(workers: usize) -> Outcome {
    let sys = supersingular();
    let start = Instant::now();
    let serial = affine_counts(&sys, 2, 12, opts(1, true))?;
    let serial_time = start.elapsed();
    let start = Instant::now();
    let parallel = affine_counts(&sys, 2, 12, opts(8, true))?;
    let parallel_time = start.elapsed();
    let shortcut = affine_counts(&sys, 2, 12, opts(workers, false))?;
    ensure(serial == GOLDEN_COUNTS, || {
        format!("exhaustive serial counts {serial:?}")
    })?;
    ensure(parallel == GOLDEN_COUNTS, || {
        format!("exhaustive 8-worker counts {parallel:?}")
    })?;
    ensure(shortcut == GOLDEN_COUNTS, || {
        format!("separable counts {shortcut:?}")
    })?;
    ensure(serial_time < C1_SERIAL_BUDGET, || {
        format!("serial took {serial_time:?}")
    })?;
    ensure(parallel_time < C1_PARALLEL_BUDGET, || {
        format!("parallel took {parallel_time:?}")
    })?;
    Ok(format!("counts {serial:?}"))
}

fn criterion_2(workers: usize) -> Outcome {
    let brute = affine_counts(&supersingular(), 2, 10, opts(workers, true))?;
    let by_subtraction: Vec<i128> = brute
        .iter()
        .enumerate()
        .map(|(i, &c)| c as i128 - 2i128.pow(i as u32 + 1))
        .collect();
    ensure(by_subtraction == GOLDEN_CORRECTIONS, || {
        format!("subtraction gives {by_subtraction:?}")
    })?;
    let alpha = hasse_alpha(2, brute[0]).map_err(|e| e.to_string())?;
    ensure(alpha.value() == Complex64::new(-1.0, 1.0), || {
        format!("alpha = {}", alpha.value())
    })?;
    let mut report = String::new();
    for n in 1..=10u32 {
        let i = n as usize - 1;
        let correction = correction_term(&alpha, n);
        ensure(correction == GOLDEN_CORRECTIONS[i], || {
            format!("recurrence correction at n = {n}: {correction}")
        })?;
        let power = alpha.power(n);
        let (re, im) = GOLDEN_ALPHA_POWERS[i];
        ensure(power == Complex64::new(re, im), || {
            format!("alpha^{n} = {power}")
        })?;
        ensure(alpha.power_sum(n) == GOLDEN_ALPHA_SUMS[i], || {
            format!("alpha^{n} + conj = {}", alpha.power_sum(n))
        })?;
        ensure(
            (2.0 * power.re - GOLDEN_ALPHA_SUMS[i] as f64).abs() < 1e-9,
            || format!("float and integer power sums differ at n = {n}"),
        )?;
        writeln!(report, "{n} {power} {} {correction}", alpha.power_sum(n)).unwrap();
    }
    Ok(report)
}

fn criterion_3(workers: usize) -> Outcome {
    let mut report = String::new();
    let mut curves = 0;
    for p in [3u64, 5, 7, 11, 13] {
        let fields: Vec<Arc<FieldSpec>> = (1..=4).map(|n| make_field(p, n).unwrap()).collect();
        for a in 0..p {
            for b in 0..p {
                let disc = (4 * a * a * a + 27 * b * b) % p;
                if disc == 0 {
                    continue;
                }
                curves += 1;
                let sys = system(&format!("y^2 = x^3 + {a}*x + {b}"));
                let counts: Vec<u64> = fields
                    .iter()
                    .map(|f| count_affine(&sys, f, opts(workers, false)).unwrap())
                    .collect();
                let alpha =
                    hasse_alpha(p, counts[0]).map_err(|e| format!("p={p} a={a} b={b}: {e}"))?;
                let t = alpha.trace_a;
                ensure((t * t) as u64 <= 4 * p, || {
                    format!("Hasse fails p={p} a={a} b={b}")
                })?;
                for (i, &c) in counts.iter().enumerate() {
                    let n = i as u32 + 1;
                    let predicted = predict_affine_count(&alpha, n);
                    ensure(predicted == c as i128, || {
                        format!("p={p} a={a} b={b} n={n}: predicted {predicted}, counted {c}")
                    })?;
                }
                writeln!(report, "{p} {a} {b} {counts:?}").unwrap();
            }
        }
    }
    writeln!(report, "curves {curves}").unwrap();
    Ok(report)
}

fn prime_power(q: u64) -> (u64, u32) {
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap();
    let mut n = 0;
    let mut r = q;
    while r > 1 {
        assert_eq!(r % p, 0, "{q} is not a prime power");
        r /= p;
        n += 1;
    }
    (p, n)
}

fn criterion_4(workers: usize) -> Outcome {
    let mut report = String::new();
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        let (p, n) = prime_power(q);
        let field = make_field(p, n).unwrap();
        for dim in 0..=3u32 {
            let closed: u64 = (0..=dim).map(|k| q.pow(k)).sum();
            let walked = count_projective_space(dim, &field);
            // Independent route: every point of P^dim satisfies the zero
            // polynomial, counted chart by chart.
            let zero =
                PolySystem::homogeneous(dim as usize + 1, vec![Polynomial::zero(dim as usize + 1)])
                    .map_err(|e| e.to_string())?;
            let charts = count_projective_variety(&zero, &field, opts(workers, false))
                .map_err(|e| e.to_string())?;
            ensure(
                walked == closed
                    && charts == closed
                    && projective_space_closed_form(q, dim) == closed,
                || format!("P^{dim}(F_{q}): walked {walked}, charts {charts}, expected {closed}"),
            )?;
            writeln!(report, "{q} {dim} {walked}").unwrap();
        }
    }
    Ok(report)
}

fn criterion_5(workers: usize) -> Outcome {
    let affine = affine_counts(&supersingular(), 2, 12, opts(workers, false))?;
    let seq = CountSequence::new(2, affine, false)
        .unwrap()
        .with_points_at_infinity(1);
    let series = zeta_series(&seq).map_err(|e| e.to_string())?;
    let z =
        rational_reconstruct(&series, 2, &curve_denominator(2), 2).map_err(|e| e.to_string())?;
    ensure(z.numerator == [1, 2, 2], || {
        format!("numerator {:?}", z.numerator)
    })?;
    ensure(z.denominator == [1, -3, 2], || {
        format!("denominator {:?}", z.denominator)
    })?;
    for r in &z.numerator_roots {
        let dev = (r.value().norm() - 2f64.sqrt()).abs();
        ensure(dev <= ZETA_MODULUS_TOL && r.weight == 1, || {
            format!("root {} off by {dev:e}", r.value())
        })?;
    }
    ensure(
        series.order() == 12 && series_agree(&z.expand(12), &series),
        || "re-expansion differs from the series".into(),
    )?;
    Ok(format!("{z} series {series}"))
}

fn criterion_6(workers: usize) -> Outcome {
    let affine = affine_counts(&system("y^2 + y = x^5"), 2, 4, opts(workers, false))?;
    let projective: Vec<u64> = affine.iter().map(|c| c + 1).collect();
    ensure(projective == GENUS2_PROJECTIVE, || {
        format!("brute force {projective:?}")
    })?;
    let first_two = CountSequence::new(2, projective[..2].to_vec(), true).unwrap();
    let w = weil_numbers_from_counts(2, 2, &first_two).map_err(|e| e.to_string())?;
    ensure(w.numerator == [1, 0, 0, 0, 4], || {
        format!("numerator {:?}", w.numerator)
    })?;
    for n in [3u32, 4] {
        let predicted = w.predict_projective_count(n);
        ensure(predicted == projective[n as usize - 1] as i128, || {
            format!("N_{n} predicted {predicted}")
        })?;
    }
    ensure(w.roots.len() == 4, || format!("{} roots", w.roots.len()))?;
    let check = verify_weil_rh(&w.roots, 2, 1);
    ensure(
        check.max_deviation * 2f64.sqrt() <= GENUS2_MODULUS_TOL,
        || format!("max modulus deviation {:e}", check.max_deviation),
    )?;
    Ok(format!("numerator {:?} counts {projective:?}", w.numerator))
}

/// A random motive of weight ≤ 2 over a prime q, as a direct sum of one to
/// three blocks.
fn random_motive(rng: &mut ChaCha8Rng, q: u64) -> Motive {
    let mut m = Motive::zero(q);
    for _ in 0..rng.gen_range(1..=3) {
        let block = match rng.gen_range(0..5) {
            0 => Motive::unit(q),
            1 => Motive::lefschetz(q),
            2 => motive_of_projective_space(1, q),
            3 => {
                let bound = (4.0 * q as f64).sqrt().floor() as i64;
                let a = rng.gen_range(-bound..=bound);
                motive_of_elliptic_curve(&FrobeniusAlpha::from_trace(q, a).unwrap())
            }
            _ => {
                let bound = (4.0 * q as f64).sqrt().floor() as i64;
                let a = rng.gen_range(-bound..=bound);
                let alpha = FrobeniusAlpha::from_trace(q, a).unwrap();
                Motive::new(q, BTreeMap::from([(1, vec![alpha.value(), alpha.conj()])])).unwrap()
            }
        };
        m = m.direct_sum(&block).unwrap();
    }
    m
}

fn criterion_7(workers: usize) -> Outcome {
    let mut report = String::new();
    for q in [2u64, 3, 4, 5, 7] {
        let (p, e) = prime_power(q);
        let motive = motive_of_projective_space(3, q);
        for dim in 0..=3u32 {
            let motive = motive_of_projective_space(dim, q);
            for n in 1..=3u32 {
                let field = make_field(p, e * n).unwrap();
                let walked = count_projective_space(dim, &field) as i128;
                let predicted = motive.point_count(n).map_err(|e| e.to_string())?;
                ensure(predicted == walked, || {
                    format!("h(P^{dim}) over F_{q}^{n}: {predicted} vs {walked}")
                })?;
            }
        }
        writeln!(
            report,
            "P^3 over F_{q}: {:?}",
            (1..=3)
                .map(|n| motive.point_count(n).unwrap())
                .collect::<Vec<_>>()
        )
        .unwrap();
    }

    let brute = affine_counts(&supersingular(), 2, 12, opts(workers, false))?;
    let alpha = FrobeniusAlpha::from_trace(2, -2).unwrap();
    let h = motive_of_elliptic_curve(&alpha);
    for (i, &c) in brute.iter().enumerate() {
        let n = i as u32 + 1;
        let predicted = h.point_count(n).map_err(|e| e.to_string())?;
        ensure(predicted == c as i128 + 1, || {
            format!("h(E) at n = {n}: {predicted} vs {}", c + 1)
        })?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let bases = [2u64, 3, 5, 7];
    for pair in 0..100 {
        let q = bases[rng.gen_range(0..bases.len())];
        let a = random_motive(&mut rng, q);
        let b = random_motive(&mut rng, q);
        let sum = a.direct_sum(&b).unwrap();
        let product = a.tensor(&b).unwrap();
        let mut line = format!("{pair} q={q}");
        for n in 1..=4u32 {
            let (x, y) = (a.point_count(n).unwrap(), b.point_count(n).unwrap());
            let s = sum.point_count(n).map_err(|e| e.to_string())?;
            let t = product.point_count(n).map_err(|e| e.to_string())?;
            ensure(s == x + y, || {
                format!("pair {pair}, n = {n}: sum {s} vs {x} + {y}")
            })?;
            ensure(t == x * y, || {
                format!("pair {pair}, n = {n}: tensor {t} vs {x} * {y}")
            })?;
            write!(line, " {x},{y},{s},{t}").unwrap();
        }
        ensure(
            sum.betti_numbers().values().sum::<usize>()
                == a.betti_numbers().values().sum::<usize>()
                    + b.betti_numbers().values().sum::<usize>(),
            || format!("pair {pair}: rank not additive"),
        )?;
        writeln!(report, "{line}").unwrap();
    }
    Ok(report)
}

fn half_integers(lo: u32, hi: u32) -> Vec<f64> {
    (lo..hi).map(|k| k as f64 + 0.5).collect()
}

fn criterion_8(_workers: usize) -> Outcome {
    let start = Instant::now();
    let zeros = ZeroTable::bundled();
    let pc = PrimeCounter::new(230);
    let mut report = String::new();

    let mut worst: f64 = 0.0;
    for x in half_integers(2, 20) {
        let pi = sieve_pi(x, &pc).unwrap() as f64;
        let approx = riemann_approx(x, &zeros, 13).map_err(|e| e.to_string())?;
        worst = worst.max((approx - pi).abs());
    }
    ensure(worst <= EF_MAX_DEVIATION_K13, || {
        format!("K = 13 max deviation {worst}")
    })?;
    writeln!(report, "K13 max {worst:?}").unwrap();

    let grid = half_integers(2, 230);
    let mut previous = f64::INFINITY;
    for (i, k) in [0usize, 13, 50, 118].into_iter().enumerate() {
        let sq: f64 = grid
            .iter()
            .map(|&x| {
                let e = riemann_approx(x, &zeros, k).unwrap() - sieve_pi(x, &pc).unwrap() as f64;
                e * e
            })
            .sum();
        let rms = (sq / grid.len() as f64).sqrt();
        ensure(rms < previous, || {
            format!("RMS at K = {k} is {rms}, not below {previous}")
        })?;
        ensure((rms - EF_ORACLE_RMS[i]).abs() <= EF_ORACLE_RMS_TOL, || {
            format!("RMS at K = {k} is {rms}, oracle {}", EF_ORACLE_RMS[i])
        })?;
        previous = rms;
        writeln!(report, "K{k} rms {rms:?}").unwrap();
    }
    for (k, x, want) in EF_ORACLE_POINTS {
        let got = riemann_approx(x, &zeros, k).unwrap();
        ensure((got - want).abs() <= EF_ORACLE_POINT_TOL, || {
            format!("approx_{k}({x}) = {got}, oracle {want}")
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < C8_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(report)
}

fn criterion_9(_workers: usize) -> Outcome {
    let start = Instant::now();
    let pc = PrimeCounter::new(100_000);
    let r4 = rh_bound_ratio(10_000, &pc).map_err(|e| e.to_string())?;
    let r5 = rh_bound_ratio(100_000, &pc).map_err(|e| e.to_string())?;
    ensure(r5.is_finite() && r5 <= RH_RATIO_CEILING, || {
        format!("ratio(1e5) = {r5}")
    })?;
    ensure(r5 <= r4.max(RH_ORACLE_SUP) + RH_ORACLE_TOL, || {
        format!("ratio grew from {r4} to {r5}")
    })?;
    for r in [r4, r5] {
        ensure((r - RH_ORACLE_SUP).abs() <= RH_ORACLE_TOL, || {
            format!("ratio {r}, oracle {RH_ORACLE_SUP}")
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < C9_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{r4:?} {r5:?}"))
}

type Criterion = fn(usize) -> Outcome;

const CRITERIA: [(u32, &str, Criterion); 9] = [
    (
        1,
        "golden table of y^2 + y = x^3 + x over F_2^n, n <= 12",
        criterion_1,
    ),
    (
        2,
        "correction terms and powers of alpha = -1+i",
        criterion_2,
    ),
    (
        3,
        "Hasse sweep over p in {3,5,7,11,13}, n <= 4",
        criterion_3,
    ),
    (4, "projective space counts", criterion_4),
    (
        5,
        "zeta round trip for the supersingular curve",
        criterion_5,
    ),
    (6, "genus-2 numerator from N1, N2", criterion_6),
    (
        7,
        "motive point counts, additivity, multiplicativity",
        criterion_7,
    ),
    (8, "explicit formula accuracy and RMS decrease", criterion_8),
    (9, "RH-equivalent bound ratio", criterion_9),
];

/// Run every criterion inside a pool with `workers` threads.
fn run_all(workers: usize) -> Vec<(Outcome, Duration)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .unwrap();
    pool.install(|| {
        CRITERIA
            .iter()
            .map(|(_, _, f)| {
                let start = Instant::now();
                let outcome = f(workers);
                (outcome, start.elapsed())
            })
            .collect()
    })
}

/// Writes straight to the process stdout so the summary survives the test
/// harness's output capture.
fn report(line: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

#[test]
fn acceptance() {
    let baseline = run_all(1);
    let mut failed = Vec::new();
    for ((id, name, _), (outcome, took)) in CRITERIA.iter().zip(&baseline) {
        let secs = took.as_secs_f64();
        match outcome {
            Ok(_) => report(&format!("criterion {id}: PASS  {name} ({secs:.2} s)")),
            Err(msg) => {
                report(&format!(
                    "criterion {id}: FAIL  {name}: {msg} ({secs:.2} s)"
                ));
                failed.push(*id);
            }
        }
    }

    let mut mismatches = Vec::new();
    let runs = [
        ("repeat", 1usize),
        ("workers=2", 2),
        ("workers=4", 4),
        ("workers=8", 8),
    ];
    for (label, workers) in runs {
        let again = run_all(workers);
        for ((id, _, _), (a, b)) in CRITERIA.iter().zip(baseline.iter().zip(&again)) {
            if a.0 != b.0 {
                mismatches.push(format!("criterion {id} differs on {label}"));
            }
        }
    }
    if mismatches.is_empty() {
        report("criterion 10: PASS  reports identical across runs and workers {1, 2, 4, 8}");
    } else {
        report(&format!("criterion 10: FAIL  {}", mismatches.join("; ")));
        failed.push(10);
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
