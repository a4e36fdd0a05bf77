//! Finite-difference stencils on uniform radial grids.

/// Sixth-order first derivative of an even radial profile.
///
/// Values are reflected evenly through the origin and extended by zero past the outer node.
pub fn derivative6_even(values: &[f64], h: f64) -> Vec<f64> {
    const C: [f64; 3] = [3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
    let len = values.len() as isize;
    let at = |j: isize| -> f64 {
        let j = j.abs();
        if j < len {
            values[j as usize]
        } else {
            0.0
        }
    };
    (0..len)
        .map(|i| {
            let mut d = 0.0;
            for (k, c) in C.iter().enumerate() {
                let k = k as isize + 1;
                d += c * (at(i + k) - at(i - k));
            }
            d / h
        })
        .collect()
}

/// Second-order centred first derivative along a sampled line; one-sided at the ends.
pub fn derivative2(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 3 {
        return out;
    }
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
    }
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
    out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
    out
}

/// Second-order centred second derivative; one-sided at the ends.
pub fn second_derivative2(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 4 {
        return out;
    }
    let h2 = h * h;
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / h2;
    }
    out[0] = (2.0 * values[0] - 5.0 * values[1] + 4.0 * values[2] - values[3]) / h2;
    out[n - 1] =
        (2.0 * values[n - 1] - 5.0 * values[n - 2] + 4.0 * values[n - 3] - values[n - 4]) / h2;
    out
}

/// Fourth-order second derivative of an even radial profile, used as an independent check.
pub fn second_derivative4_even(values: &[f64], h: f64) -> Vec<f64> {
    let len = values.len() as isize;
    let at = |j: isize| -> f64 {
        let j = j.abs();
        if j < len {
            values[j as usize]
        } else {
            0.0
        }
    };
    (0..len)
        .map(|i| {
            (-at(i + 2) + 16.0 * at(i + 1) - 30.0 * at(i) + 16.0 * at(i - 1) - at(i - 2))
                / (12.0 * h * h)
        })
        .collect()
}
