use nsplace_core::geometry::Point;

/// Golden-section minimum of a convex function on `[lo, hi]`.
pub fn golden_min(mut lo: f64, mut hi: f64, iters: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - phi * (hi - lo);
    let mut b = lo + phi * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    for _ in 0..iters {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = f(b);
        }
    }
    if fa <= fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

fn raw_residual(pos: &[Point], neg: &[Point], u: (f64, f64), gamma: f64) -> f64 {
    let mut q1 = 0.0;
    for a in pos {
        let r = gamma + 1.0 - (a.x * u.0 + a.y * u.1);
        if r > 0.0 {
            q1 += r * r;
        }
    }
    let mut q2 = 0.0;
    for b in neg {
        let r = (b.x * u.0 + b.y * u.1) - gamma + 1.0;
        if r > 0.0 {
            q2 += r * r;
        }
    }
    q1.sqrt() + q2.sqrt()
}

/// min over γ for a fixed u, by golden section on a bracket that contains
/// every breakpoint.
fn best_over_gamma(pos: &[Point], neg: &[Point], u: (f64, f64)) -> f64 {
    let proj = pos.iter().chain(neg.iter()).map(|p| p.x * u.0 + p.y * u.1);
    let lo = proj.clone().fold(f64::INFINITY, f64::min) - 2.0;
    let hi = proj.fold(f64::NEG_INFINITY, f64::max) + 2.0;
    golden_min(lo, hi, 90, |g| raw_residual(pos, neg, u, g)).1
}

/// min over the norm along a fixed unit direction. Minimizing a jointly
/// convex function over γ keeps it convex along the ray, so golden section
/// over `[0, 1e4]` is exact up to its bracket.
fn best_along(pos: &[Point], neg: &[Point], theta: f64) -> f64 {
    let dir = (theta.cos(), theta.sin());
    golden_min(0.0, 1e4, 120, |t| best_over_gamma(pos, neg, (dir.0 * t, dir.1 * t))).1
}

/// Direction-grid brute force for the separator residual: 720 unit
/// directions, a log-spaced rescan of the norm over `[1e-2, 1e4]` with a
/// golden refinement around the best grid norm, exact γ line search
/// throughout, then an angular golden refinement around the five best grid
/// directions.
pub fn separator_residual_oracle(pos: &[Point], neg: &[Point]) -> f64 {
    let mut best = best_over_gamma(pos, neg, (0.0, 0.0));
    let norms: Vec<f64> = (0..=96).map(|i| 10f64.powf(-2.0 + 6.0 * i as f64 / 96.0)).collect();
    let step = std::f64::consts::PI / 360.0;
    let mut per_dir = Vec::with_capacity(720);
    for k in 0..720 {
        let theta = k as f64 * step;
        let dir = (theta.cos(), theta.sin());
        let vals: Vec<f64> = norms.iter().map(|&t| best_over_gamma(pos, neg, (dir.0 * t, dir.1 * t))).collect();
        let (i, &v) = vals.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        if v == 0.0 {
            return 0.0;
        }
        let lo = if i == 0 { 0.0 } else { norms[i - 1] };
        let hi = norms[(i + 1).min(norms.len() - 1)];
        let (_, refined) = golden_min(lo, hi, 50, |t| best_over_gamma(pos, neg, (dir.0 * t, dir.1 * t)));
        per_dir.push((theta, v.min(refined)));
        best = best.min(v).min(refined);
    }
    per_dir.sort_by(|a, b| a.1.total_cmp(&b.1));
    for &(theta, _) in per_dir.iter().take(5) {
        let (_, v) = golden_min(theta - step, theta + step, 40, |t| best_along(pos, neg, t));
        best = best.min(v);
    }
    best
}

/// Separating-axis test on the convex hulls of two point sets. Candidate
/// axes are the normal and direction of every pair of points within a set,
/// which covers every hull edge.
pub fn sat_intersect(a: &[Point], b: &[Point]) -> bool {
    let mut axes = Vec::new();
    for poly in [a, b] {
        for (i, p) in poly.iter().enumerate() {
            for q in &poly[i + 1..] {
                let d = Point::new(q.x - p.x, q.y - p.y);
                if d.x.abs() + d.y.abs() > 0.0 {
                    axes.push(Point::new(-d.y, d.x));
                    axes.push(d);
                }
            }
        }
    }
    // Point-vs-point and point-vs-shape cases need the connecting axis.
    for p in a {
        for q in b {
            let d = Point::new(q.x - p.x, q.y - p.y);
            if d.x.abs() + d.y.abs() > 0.0 {
                axes.push(d);
            }
        }
    }
    if axes.is_empty() {
        return a[0] == b[0];
    }
    for ax in axes {
        let len = (ax.x * ax.x + ax.y * ax.y).sqrt();
        let proj = |p: &Point| (p.x * ax.x + p.y * ax.y) / len;
        let (amin, amax) = a.iter().map(proj).fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
        let (bmin, bmax) = b.iter().map(proj).fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
        if amax < bmin - 1e-9 || bmax < amin - 1e-9 {
            return false;
        }
    }
    true
}

/// Central differences of `f` around `x` in every coordinate.
pub fn central_diff(x: &[f64], h: f64, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut work = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = work[i];
            work[i] = orig + h;
            let plus = f(&work);
            work[i] = orig - h;
            let minus = f(&work);
            work[i] = orig;
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

/// `‖a − b‖ / ‖b‖`, or the absolute norm when `b` vanishes.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let scale: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if scale > 1e-12 {
        diff / scale
    } else {
        diff
    }
}
