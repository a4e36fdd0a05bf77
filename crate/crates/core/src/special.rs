//! Special functions used by the radial transforms and cutoffs.

use std::f64::consts::PI;

/// Surface area of the unit sphere in `n` dimensions.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// Gamma(n/2) for a positive integer `n`.
pub fn gamma_half(n: usize) -> f64 {
    assert!(n > 0, "gamma_half requires n > 0");
    let mut value = if n.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut k = if n.is_multiple_of(2) { 2 } else { 1 };
    while k < n {
        value *= k as f64 / 2.0;
        k += 2;
    }
    value
}

/// Odd double factorial (2m+1)!!.
fn odd_double_factorial(m: usize) -> f64 {
    (0..=m).map(|k| (2 * k + 1) as f64).product()
}

/// Reduced spherical Bessel function `j_m(x) / x^m`.
///
/// Even and entire in `x`; equals `1/(2m+1)!!` at the origin.
pub fn reduced_spherical_bessel(m: usize, x: f64) -> f64 {
    let ax = x.abs();
    if ax < m as f64 + 2.0 {
        let y = -0.5 * ax * ax;
        let mut term = 1.0 / odd_double_factorial(m);
        let mut sum = term;
        for l in 1..80 {
            term *= y / (l as f64 * (2 * (m + l) + 1) as f64);
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        return sum;
    }
    let (s, c) = ax.sin_cos();
    let mut prev = s / ax;
    if m == 0 {
        return prev;
    }
    let mut cur = s / (ax * ax) - c / ax;
    for l in 1..m {
        let next = (2 * l + 1) as f64 / ax * cur - prev;
        prev = cur;
        cur = next;
    }
    cur / ax.powi(m as i32)
}

/// Riemann zeta function for real `s != 1`.
///
/// Euler-Maclaurin summation for `s >= -1`; the functional equation below that.
pub fn zeta(s: f64) -> f64 {
    if s < -1.0 {
        let e = -s;
        if (e / 2.0).fract() == 0.0 {
            return 0.0;
        }
        return 2.0 * (2.0 * PI).powf(s - 1.0) * (0.5 * PI * s).sin() * gamma(1.0 - s) * zeta(1.0 - s);
    }
    const BERNOULLI: [f64; 10] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
        -3617.0 / 510.0,
        43867.0 / 798.0,
        -174611.0 / 330.0,
    ];
    let big_n = 16.0f64;
    let mut sum: f64 = (1..16).map(|k| (k as f64).powf(-s)).sum();
    sum += big_n.powf(1.0 - s) / (s - 1.0) + 0.5 * big_n.powf(-s);
    let mut rising = s;
    let mut fact = 2.0;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let k = (j + 1) as f64;
        if j > 0 {
            rising *= (s + 2.0 * k - 3.0) * (s + 2.0 * k - 2.0);
            fact *= (2.0 * k - 1.0) * (2.0 * k);
        }
        sum += b / fact * rising * big_n.powf(-s - 2.0 * k + 1.0);
    }
    sum
}

/// Gamma function for positive real arguments.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Smooth monotone step: 0 for `x <= 0`, 1 for `x >= 1`, built from `exp(-1/x)`.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

/// Compact bump `exp(-1/(1-x^2))` on `(-1, 1)`.
pub fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}
