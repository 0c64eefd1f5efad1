// SPDX-License-Identifier: Apache-2.0
//! Finite-difference weights (Fornberg's algorithm) and grid derivatives.

/// Weights for the `m`-th derivative at `x0` from samples at `xs`.
pub fn fornberg_weights(x0: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// First derivative of uniformly spaced samples with a stencil of
/// `order + 1` points: central in the interior, one-sided near the ends.
pub fn derivative_uniform(values: &[f64], h: f64, order: usize) -> Vec<f64> {
    let n = values.len();
    let width = order + 1;
    assert!(n >= width, "grid shorter than the stencil");
    let half = order / 2;
    let mut out = vec![0.0; n];
    let mut cache: Vec<(usize, Vec<f64>)> = Vec::new();
    for (i, o) in out.iter_mut().enumerate() {
        let start = i.saturating_sub(half).min(n - width);
        let offset = i - start;
        let w = match cache.iter().find(|(k, _)| *k == offset) {
            Some((_, w)) => w.clone(),
            None => {
                let xs: Vec<f64> = (0..width).map(|k| k as f64).collect();
                let w = fornberg_weights(offset as f64, &xs, 1);
                cache.push((offset, w.clone()));
                w
            }
        };
        *o = (0..width).map(|k| w[k] * values[start + k]).sum::<f64>() / h;
    }
    out
}

/// Central difference of `f` at `x` with step `h`, eighth order.
pub fn central_derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    const W: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    W.iter()
        .enumerate()
        .map(|(k, w)| {
            let d = (k + 1) as f64 * h;
            w * (f(x + d) - f(x - d))
        })
        .sum::<f64>()
        / h
}

/// Eighth-order central second derivative.
pub fn central_second_derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    const W0: f64 = -205.0 / 72.0;
    const W: [f64; 4] = [8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
    let s: f64 = W
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let d = (k + 1) as f64 * h;
            w * (f(x + d) + f(x - d))
        })
        .sum();
    (s + W0 * f(x)) / (h * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_reproduce_classic_stencils() {
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 1);
        assert!((w[0] + 0.5).abs() < 1e-15 && w[1].abs() < 1e-15 && (w[2] - 0.5).abs() < 1e-15);
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn sixth_order_grid_derivative_is_accurate_including_edges() {
        let h = 0.01;
        let v: Vec<f64> = (0..200).map(|i| (i as f64 * h).sin()).collect();
        let d = derivative_uniform(&v, h, 6);
        for (i, di) in d.iter().enumerate() {
            assert!((di - (i as f64 * h).cos()).abs() < 1e-10, "i={i}");
        }
    }

    #[test]
    fn central_rules_differentiate_exp() {
        assert!((central_derivative(f64::exp, 0.3, 0.05) - 0.3f64.exp()).abs() < 1e-12);
        assert!((central_second_derivative(f64::exp, 0.3, 0.05) - 0.3f64.exp()).abs() < 1e-10);
    }
}
