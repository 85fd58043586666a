/// Natural cubic spline through `(xs, ys)` evaluated at `0..n`.
/// Outside the knot span the spline continues linearly (its second
/// derivative is zero at both ends).
///
/// # Panics
/// If fewer than two knots are given or `xs` is not strictly increasing.
pub fn natural_cubic_spline(xs: &[f64], ys: &[f64], n: usize) -> Vec<f64> {
    let m = xs.len();
    assert!(m >= 2 && ys.len() == m, "need at least two knots");
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(h.iter().all(|&d| d > 0.0), "knots must be strictly increasing");

    // Second derivatives; tridiagonal system on the interior knots.
    let mut second = vec![0.0; m];
    if m > 2 {
        let k = m - 2;
        let mut diag = vec![0.0; k];
        let mut upper = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for r in 0..k {
            let i = r + 1;
            diag[r] = 2.0 * (h[i - 1] + h[i]);
            upper[r] = h[i];
            rhs[r] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
        }
        // Thomas forward sweep; lower[r] = h[r] (= h[i-1]).
        for r in 1..k {
            let w = h[r] / diag[r - 1];
            diag[r] -= w * upper[r - 1];
            rhs[r] -= w * rhs[r - 1];
        }
        second[k] = rhs[k - 1] / diag[k - 1];
        for r in (0..k - 1).rev() {
            second[r + 1] = (rhs[r] - upper[r] * second[r + 2]) / diag[r];
        }
    }

    let slope_at = |i: usize, at_right: bool| -> f64 {
        // derivative of segment i at its left (or right) end
        let d = (ys[i + 1] - ys[i]) / h[i];
        if at_right {
            d + h[i] * (second[i] + 2.0 * second[i + 1]) / 6.0
        } else {
            d - h[i] * (2.0 * second[i] + second[i + 1]) / 6.0
        }
    };
    let left_slope = slope_at(0, false);
    let right_slope = slope_at(m - 2, true);

    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    for t in 0..n {
        let x = t as f64;
        if x <= xs[0] {
            out.push(ys[0] + left_slope * (x - xs[0]));
            continue;
        }
        if x >= xs[m - 1] {
            out.push(ys[m - 1] + right_slope * (x - xs[m - 1]));
            continue;
        }
        while xs[seg + 1] < x {
            seg += 1;
        }
        let (x0, x1) = (xs[seg], xs[seg + 1]);
        let hs = h[seg];
        let a = (x1 - x) / hs;
        let b = (x - x0) / hs;
        let v = a * ys[seg]
            + b * ys[seg + 1]
            + ((a * a * a - a) * second[seg] + (b * b * b - b) * second[seg + 1]) * hs * hs / 6.0;
        out.push(v);
    }
    out
}

/// Envelope through `knots` (sorted by index) over `0..n`.
///
/// When the knots do not reach an end of the signal, the `reflect` knots
/// nearest that end are mirrored across it before fitting. Returns `None`
/// when fewer than two knots are available after extension.
pub fn spline_envelope(n: usize, knots: &[(usize, f64)], reflect: usize) -> Option<Vec<f64>> {
    if knots.is_empty() || n == 0 {
        return None;
    }
    let last = (n - 1) as f64;
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(knots.len() + 2 * reflect);
    if knots[0].0 > 0 {
        pts.extend(
            knots
                .iter()
                .take(reflect)
                .rev()
                .map(|&(i, v)| (-(i as f64), v)),
        );
    }
    pts.extend(knots.iter().map(|&(i, v)| (i as f64, v)));
    if knots[knots.len() - 1].0 < n - 1 {
        pts.extend(
            knots
                .iter()
                .rev()
                .take(reflect)
                .map(|&(i, v)| (2.0 * last - i as f64, v)),
        );
    }
    if pts.len() < 2 {
        return None;
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    Some(natural_cubic_spline(&xs, &ys, n))
}
