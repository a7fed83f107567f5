//! Property-based invariants across the library.

use std::sync::Arc;

use proptest::prelude::*;
use weil::cli::Report;
use weil::explicit_formula::{li, sieve_pi, PrimeCounter};
use weil::finite_field::{make_field, FFElement, FieldSpec};
use weil::motive::{motive_of_elliptic_curve, motive_of_projective_space};
use weil::variety::{count_affine, parse_system, CountOptions, CountSequence};
use weil::weil::{predict_affine_count, FrobeniusAlpha};
use weil::zeta::{curve_denominator, rational_reconstruct, zeta_series, PowerSeries};

const FIELDS: [(u64, u32); 9] = [
    (2, 1),
    (2, 3),
    (2, 5),
    (3, 1),
    (3, 2),
    (3, 3),
    (5, 2),
    (7, 1),
    (13, 2),
];

fn field_and_elements(count: usize) -> impl Strategy<Value = (Arc<FieldSpec>, Vec<FFElement>)> {
    (
        0..FIELDS.len(),
        prop::collection::vec(prop::collection::vec(any::<u64>(), 5), count),
    )
        .prop_map(|(i, raw)| {
            let (p, n) = FIELDS[i];
            let f = make_field(p, n).unwrap();
            let elems = raw
                .into_iter()
                .map(|c| {
                    f.element(c.iter().take(n as usize).map(|v| v % p).collect())
                        .unwrap()
                })
                .collect();
            (f, elems)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms((f, e) in field_and_elements(3)) {
        let (a, b, c) = (&e[0], &e[1], &e[2]);
        prop_assert_eq!(a.add(b).unwrap(), b.add(a).unwrap());
        prop_assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
        prop_assert_eq!(a.add(b).unwrap().add(c).unwrap(), a.add(&b.add(c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(b).unwrap().mul(c).unwrap(), a.mul(&b.mul(c).unwrap()).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(c).unwrap()).unwrap(),
            a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap()
        );
        prop_assert_eq!(a.add(&a.neg()).unwrap(), f.zero());
        prop_assert_eq!(a.mul(&f.one()).unwrap(), a.clone());
        if !a.is_zero() {
            prop_assert_eq!(a.mul(&a.inv().unwrap()).unwrap(), f.one());
            prop_assert_eq!(a.pow(f.q() - 1), f.one());
        } else {
            prop_assert!(a.inv().is_err());
        }
        // Frobenius is additive.
        let p = f.p();
        prop_assert_eq!(a.add(b).unwrap().pow(p), a.pow(p).add(&b.pow(p)).unwrap());
    }

    #[test]
    fn exp_log_are_inverse(coeffs in prop::collection::vec(-20i64..20, 1..9)) {
        let mut with_zero = vec![0i64];
        with_zero.extend(&coeffs);
        let s = PowerSeries::from_integers(&with_zero);
        prop_assert_eq!(s.exp().unwrap().log().unwrap(), s.clone());
        let mut with_one = vec![1i64];
        with_one.extend(&coeffs);
        let u = PowerSeries::from_integers(&with_one);
        prop_assert_eq!(u.log().unwrap().exp().unwrap(), u);
    }

    /// Counts generated from a trace reconstruct the numerator 1 − a t + p t².
    #[test]
    fn zeta_reconstruction_is_left_inverse(pi in 0usize..5, frac in 0.0f64..1.0) {
        let p = [2u64, 3, 5, 7, 11][pi];
        let bound = (4.0 * p as f64).sqrt().floor() as i64;
        let a = ((frac * (2 * bound + 1) as f64).floor() as i64 - bound).clamp(-bound, bound);
        let alpha = FrobeniusAlpha::from_trace(p, a).unwrap();
        let counts: Vec<u64> = (1..=8).map(|n| (predict_affine_count(&alpha, n) + 1) as u64).collect();
        let seq = CountSequence::new(p, counts, true).unwrap();
        let series = zeta_series(&seq).unwrap();
        prop_assert!(series.to_integers().is_some());
        let z = rational_reconstruct(&series, 2, &curve_denominator(p), p).unwrap();
        prop_assert_eq!(z.numerator, vec![1, -a, p as i64]);
    }

    #[test]
    fn motive_counts_add_and_multiply(pi in 0usize..4, a_frac in 0.0f64..1.0, dim in 0u32..3, n in 1u32..5) {
        let p = [2u64, 3, 5, 7][pi];
        let bound = (4.0 * p as f64).sqrt().floor() as i64;
        let a = ((a_frac * (2 * bound + 1) as f64).floor() as i64 - bound).clamp(-bound, bound);
        let e = motive_of_elliptic_curve(&FrobeniusAlpha::from_trace(p, a).unwrap());
        let ps = motive_of_projective_space(dim, p);
        let (x, y) = (e.point_count(n).unwrap(), ps.point_count(n).unwrap());
        prop_assert_eq!(e.direct_sum(&ps).unwrap().point_count(n).unwrap(), x + y);
        prop_assert_eq!(e.tensor(&ps).unwrap().point_count(n).unwrap(), x * y);
    }

    /// Serial and parallel counts agree for random cubic curves.
    #[test]
    fn counts_independent_of_workers(a in 0u64..7, b in 0u64..7, workers in 2usize..6) {
        let sys = parse_system(&format!("y^2 + x*y = x^3 + {a}*x + {b}"), None).unwrap();
        let f = make_field(7, 2).unwrap();
        let serial = count_affine(&sys, &f, CountOptions::default()).unwrap();
        let parallel = count_affine(&sys, &f, CountOptions::with_workers(workers)).unwrap();
        prop_assert_eq!(serial, parallel);
    }

    #[test]
    fn li_increases_and_pi_is_monotone(x in 2.0f64..5000.0, dx in 0.01f64..50.0) {
        prop_assert!(li(x + dx).unwrap() > li(x).unwrap());
        let pc = PrimeCounter::new(6000);
        prop_assert!(sieve_pi(x + dx, &pc).unwrap() >= sieve_pi(x, &pc).unwrap());
    }

    #[test]
    fn csv_reports_round_trip(cells in prop::collection::vec("[a-z0-9 ,\"-]{0,8}", 6), key in "[a-z]{1,6}", value in "[ -~]{0,12}") {
        let report = Report {
            meta: vec![(key, value.trim_start().to_string())],
            columns: vec!["a".into(), "b".into(), "c".into()],
            rows: vec![cells[..3].to_vec(), cells[3..].to_vec()],
        };
        let text = report.to_csv();
        let back = Report::from_csv(&text).unwrap();
        prop_assert_eq!(back.to_csv(), text);
        let json = report.to_json();
        prop_assert_eq!(Report::from_json(&json).unwrap().to_json(), json);
    }
}
