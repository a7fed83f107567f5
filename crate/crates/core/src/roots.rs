//! Roots of real polynomials by simultaneous Aberth–Ehrlich iteration.

use num_complex::Complex64;

const MAX_ITER: usize = 1000;

/// Evaluate a polynomial (coefficients low to high) and its derivative.
fn eval_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

pub fn eval(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// |P(z)| divided by Σ|c_i||z|^i, the scale at which rounding error lives.
pub fn relative_residual(coeffs: &[f64], z: Complex64) -> f64 {
    let scale = coeffs
        .iter()
        .rev()
        .fold(0.0, |acc, &c| acc * z.norm() + c.abs());
    if scale == 0.0 {
        return 0.0;
    }
    eval(coeffs, z).norm() / scale
}

/// All complex roots of a real polynomial given low-to-high coefficients.
/// Trailing zero coefficients are ignored. Roots come back conjugate-paired
/// and sorted by (real part, imaginary part).
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    let degree = c.len().saturating_sub(1);
    if degree == 0 {
        return Vec::new();
    }
    let lead = c[degree];
    let monic: Vec<f64> = c.iter().map(|x| x / lead).collect();

    // Initial guesses on a circle whose radius is the geometric mean of the
    // root moduli, rotated off the real axis so conjugate pairs separate.
    let radius = monic[0].abs().powf(1.0 / degree as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / degree as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    for _ in 0..MAX_ITER {
        let mut max_step: f64 = 0.0;
        for i in 0..degree {
            let (p, dp) = eval_with_derivative(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }

    // Newton polish on the original coefficients.
    for root in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval_with_derivative(&monic, *root);
            if dp.norm() == 0.0 {
                break;
            }
            let next = *root - p / dp;
            if !next.is_finite() || eval(&monic, next).norm() >= p.norm() {
                break;
            }
            *root = next;
        }
    }

    pair_conjugates(z)
}

/// Snap near-real roots onto the axis and average near-conjugate pairs so the
/// multiset is exactly closed under conjugation.
fn pair_conjugates(mut z: Vec<Complex64>) -> Vec<Complex64> {
    let tol = 1e-9;
    for r in z.iter_mut() {
        if r.im.abs() <= tol * r.norm().max(1.0) {
            r.im = 0.0;
        }
    }
    let mut upper: Vec<Complex64> = z.iter().copied().filter(|r| r.im > 0.0).collect();
    let mut lower: Vec<Complex64> = z.iter().copied().filter(|r| r.im < 0.0).collect();
    let mut out: Vec<Complex64> = z.iter().copied().filter(|r| r.im == 0.0).collect();
    if upper.len() == lower.len() {
        upper.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let mut matched = Vec::with_capacity(upper.len());
        for u in upper {
            let (idx, _) = lower
                .iter()
                .enumerate()
                .map(|(j, l)| (j, (l.conj() - u).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("balanced halves");
            let l = lower.swap_remove(idx);
            let mid = (u + l.conj()) * 0.5;
            matched.push(mid);
            matched.push(mid.conj());
        }
        out.extend(matched);
    } else {
        out.extend(upper);
        out.extend(lower);
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}
