//! Small numerical helpers shared by the pipeline modules.

/// Uniform grid on `[-half_width, half_width]` whose step does not exceed
/// `max_step`. Both endpoints are grid nodes.
pub fn symmetric_grid(half_width: f64, max_step: f64) -> Vec<f64> {
    assert!(half_width > 0.0 && max_step > 0.0);
    let intervals = ((2.0 * half_width) / max_step).ceil().max(2.0) as usize;
    uniform_grid(-half_width, half_width, intervals)
}

/// `intervals + 1` equally spaced nodes from `start` to `end` inclusive.
pub fn uniform_grid(start: f64, end: f64, intervals: usize) -> Vec<f64> {
    let h = (end - start) / intervals as f64;
    (0..=intervals)
        .map(|i| if i == intervals { end } else { start + h * i as f64 })
        .collect()
}

/// Composite trapezoid rule on a uniform grid with step `h`.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (0.5 * values[0] + values[1..n - 1].iter().sum::<f64>() + 0.5 * values[n - 1]),
    }
}

/// Composite Simpson rule on a uniform grid; an odd number of intervals is
/// closed with Simpson's 3/8 rule on the last three.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        4 => 3.0 * h / 8.0 * (values[0] + 3.0 * values[1] + 3.0 * values[2] + values[3]),
        _ => {
            let intervals = n - 1;
            let even_end = if intervals.is_multiple_of(2) { n - 1 } else { n - 4 };
            let mut sum = values[0] + values[even_end];
            for (i, v) in values.iter().enumerate().take(even_end).skip(1) {
                sum += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            let mut total = h / 3.0 * sum;
            if even_end != n - 1 {
                let v = &values[even_end..];
                total += 3.0 * h / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3]);
            }
            total
        }
    }
}

/// Fourth-order derivative estimate on a uniform grid: five-point central
/// stencils in the interior, one-sided five-point stencils at the ends.
pub fn derivative5(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5, "need at least five samples");
    let f = values;
    (0..n)
        .map(|i| {
            let d = if i >= 2 && i + 2 < n {
                f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]
            } else if i < 2 {
                let j = i;
                // forward/offset stencils
                if j == 0 {
                    -25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]
                } else {
                    -3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]
                }
            } else if i == n - 2 {
                3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]
            } else {
                25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]
            };
            d / (12.0 * h)
        })
        .collect()
}

/// Least-squares line through `(x, y)`; returns `(slope, intercept)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2);
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Logistic function `1 / (1 + e^{-z})`, accurate in both tails.
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln Γ(k + 1)` for integer `k` by direct summation.
pub fn ln_factorial(k: u64) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// Index of the grid node closest to `t` on a sorted grid.
pub fn nearest_index(grid: &[f64], t: f64) -> usize {
    let i = grid.partition_point(|&g| g < t);
    if i == 0 {
        0
    } else if i >= grid.len() {
        grid.len() - 1
    } else if (grid[i] - t).abs() < (t - grid[i - 1]).abs() {
        i
    } else {
        i - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_endpoints_exact() {
        let g = symmetric_grid(7.5, 0.01);
        assert_eq!(g[0], -7.5);
        assert_eq!(*g.last().unwrap(), 7.5);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(g.len(), 1501);
    }

    #[test]
    fn simpson_exact_on_cubics() {
        for n in [5usize, 6, 7, 8, 11, 12] {
            let g = uniform_grid(0.0, 2.0, n - 1);
            let v: Vec<f64> = g.iter().map(|x| x * x * x - x + 1.0).collect();
            assert_relative_eq!(simpson(&v, 2.0 / (n - 1) as f64), 4.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn derivative_exact_on_quartics() {
        let g = uniform_grid(-1.0, 1.0, 20);
        let v: Vec<f64> = g.iter().map(|x| x.powi(4) - 2.0 * x).collect();
        let d = derivative5(&v, 0.1);
        for (x, dv) in g.iter().zip(d) {
            assert!((dv - (4.0 * x.powi(3) - 2.0)).abs() < 1e-11, "{x}");
        }
    }

    #[test]
    fn line_fit() {
        let x = [1.0, 2.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.5 * v).collect();
        let (s, c) = linear_fit(&x, &y);
        assert_relative_eq!(s, -0.5, max_relative = 1e-14);
        assert_relative_eq!(c, 3.0, max_relative = 1e-14);
    }

    #[test]
    fn logistic_tails() {
        assert_relative_eq!(logistic(-50.0), (-50.0f64).exp(), max_relative = 1e-14);
        assert_eq!(logistic(0.0), 0.5);
        assert_relative_eq!(1.0 - logistic(3.0), logistic(-3.0), max_relative = 1e-14);
    }

    #[test]
    fn nearest() {
        let g = [0.0, 1.0, 2.0];
        assert_eq!(nearest_index(&g, -1.0), 0);
        assert_eq!(nearest_index(&g, 0.6), 1);
        assert_eq!(nearest_index(&g, 1.4), 1);
        assert_eq!(nearest_index(&g, 9.0), 2);
    }
}
