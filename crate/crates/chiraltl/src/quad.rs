//! Gauss-Legendre quadrature building blocks: node generation, composite
//! panels, adaptive bisection for real and complex integrands, and the
//! windowed oscillatory integrals used by the Talbot coefficient engine.

use crate::error::{numerical_err, Result};
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Computed by Newton iteration on P_n from Chebyshev initial guesses and
/// memoized per order; accurate to ~1e-15.
pub fn gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard.entry(n).or_insert_with(|| {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            // Chebyshev guess for the i-th root of P_n
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // evaluate P_n(x) and P_n'(x) by the three-term recurrence
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Box::leak(Box::new((nodes, weights)))
    })
}

/// One Gauss-Legendre panel of order n for a complex integrand.
pub fn gl_panel_complex(
    f: &mut dyn FnMut(f64) -> Complex64,
    a: f64,
    b: f64,
    n: usize,
) -> Complex64 {
    let (nodes, weights) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in nodes.iter().zip(weights) {
        acc += f(mid + half * x) * *w;
    }
    acc * half
}

/// One Gauss-Legendre panel of order n for a real integrand.
pub fn gl_panel(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += f(mid + half * x) * *w;
    }
    acc * half
}

/// Composite n_panels x GL(order) rule on [a, b].
pub fn composite_gl(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    order: usize,
    n_panels: usize,
) -> f64 {
    let h = (b - a) / n_panels as f64;
    let mut acc = 0.0;
    for i in 0..n_panels {
        acc += gl_panel(f, a + i as f64 * h, a + (i + 1) as f64 * h, order);
    }
    acc
}

/// Adaptive bisection quadrature for complex integrands with user-seeded
/// initial panels. Error per panel is estimated by GL(order) against its two
/// halves; a panel is accepted once the estimate fits its share of the global
/// budget. Fails if the panel stack exhausts the subdivision depth.
pub fn adaptive_complex_seeded(
    f: &mut dyn FnMut(f64) -> Complex64,
    edges: &[f64],
    order: usize,
    abs_tol: f64,
    rel_tol: f64,
    context: &str,
) -> Result<Complex64> {
    let total_width: f64 = edges.last().unwrap() - edges[0];
    let mut stack: Vec<(f64, f64, Complex64, u32)> = Vec::new();
    for pair in edges.windows(2) {
        let coarse = gl_panel_complex(f, pair[0], pair[1], order);
        stack.push((pair[0], pair[1], coarse, 0));
    }
    // rough scale for the relative part of the tolerance
    let coarse_total: Complex64 = stack.iter().map(|p| p.2).sum();
    let scale = coarse_total.norm().max(abs_tol);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut evals = stack.len() * order;
    while let Some((a, b, coarse, depth)) = stack.pop() {
        let mid = 0.5 * (a + b);
        let left = gl_panel_complex(f, a, mid, order);
        let right = gl_panel_complex(f, mid, b, order);
        evals += 2 * order;
        let fine = left + right;
        let err = (fine - coarse).norm();
        let budget = (abs_tol + rel_tol * scale) * ((b - a) / total_width).max(1e-300);
        if err <= budget || depth >= 48 {
            if depth >= 48 && err > 16.0 * budget {
                return numerical_err(format!(
                    "quadrature failed to converge in {context}: residual {err:.3e} on [{a:.6e}, {b:.6e}] after depth 48 ({evals} evaluations)"
                ));
            }
            acc += fine;
        } else {
            stack.push((a, mid, left, depth + 1));
            stack.push((mid, b, right, depth + 1));
        }
        if evals > 80_000_000 {
            return numerical_err(format!(
                "quadrature evaluation budget exhausted in {context}"
            ));
        }
    }
    Ok(acc)
}

/// Adaptive bisection quadrature for real integrands on [a, b].
pub fn adaptive_real(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    order: usize,
    abs_tol: f64,
    rel_tol: f64,
    context: &str,
) -> Result<f64> {
    let mut wrapped = |x: f64| Complex64::new(f(x), 0.0);
    let edges = [a, b];
    adaptive_complex_seeded(&mut wrapped, &edges, order, abs_tol, rel_tol, context).map(|z| z.re)
}

/// Panel edges for an oscillatory integral over [lo, hi]: uniform panels no
/// wider than half an oscillation period, with the outermost panel at each
/// end geometrically subdivided toward the edge (steep eikonal phases live
/// there).
pub fn oscillation_edges(lo: f64, hi: f64, cycles_per_unit: f64, edge_levels: u32) -> Vec<f64> {
    let width = hi - lo;
    let max_panel = if cycles_per_unit > 0.0 {
        0.5 / cycles_per_unit
    } else {
        width
    };
    let n = ((width / max_panel).ceil() as usize).clamp(1, 400_000);
    let h = width / n as f64;
    let mut edges = Vec::with_capacity(n + 1 + 2 * edge_levels as usize);
    // geometric grading into the first panel
    for k in (1..=edge_levels).rev() {
        edges.push(lo + h / (1u64 << k) as f64);
    }
    let first_interior = edges.len();
    for i in 1..n {
        edges.push(lo + i as f64 * h);
    }
    // geometric grading into the last panel
    for k in 1..=edge_levels {
        edges.push(hi - h / (1u64 << k) as f64);
    }
    edges.insert(0, lo);
    edges.push(hi);
    debug_assert!(edges.windows(2).all(|p| p[1] > p[0]), "{first_interior}");
    edges
}

/// (1/d) * integral over [lo, hi] of g(x) e^{-2 pi i l x / d} dx.
///
/// The workhorse for grating Fourier coefficients and Talbot overlap
/// integrals: pre-split against the e^{-2 pi i l x/d} oscillation, graded at
/// the window edges, then refined adaptively.
pub fn windowed_oscillatory(
    g: &mut dyn FnMut(f64) -> Complex64,
    lo: f64,
    hi: f64,
    l: i64,
    d: f64,
    abs_tol: f64,
    rel_tol: f64,
    context: &str,
) -> Result<Complex64> {
    if hi <= lo {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let cycles = l.unsigned_abs() as f64 / d;
    let edges = oscillation_edges(lo, hi, cycles, 10);
    let omega = 2.0 * PI * l as f64 / d;
    let mut f = |x: f64| g(x) * Complex64::from_polar(1.0, -omega * x);
    let v = adaptive_complex_seeded(&mut f, &edges, 8, abs_tol * d, rel_tol, context)?;
    Ok(v / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl_nodes_integrate_polynomials_exactly() {
        // GL(n) is exact for degree 2n-1
        for n in [2, 5, 8, 11, 16] {
            let deg = 2 * n - 1;
            let mut f = |x: f64| x.powi(deg as i32) + 3.0 * x * x;
            let got = gl_panel(&mut f, -1.0, 1.0, n);
            assert_relative_eq!(got, 2.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn gl11_weights_sum_to_two() {
        let (nodes, weights) = gauss_legendre(11);
        assert_relative_eq!(weights.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(nodes[5], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn adaptive_handles_steep_integrand() {
        // sqrt-type endpoint behaviour, the shape of the fly-through
        // fall-time integrand: int_0^1 sqrt(x) dx = 2/3
        let mut f = |x: f64| x.sqrt();
        let got = adaptive_real(&mut f, 0.0, 1.0, 8, 1e-13, 1e-11, "test").unwrap();
        assert_relative_eq!(got, 2.0 / 3.0, max_relative = 1e-10);
        // sharp interior peak
        let mut g = |x: f64| 1.0 / ((x - 0.3).powi(2) + 1e-6);
        let got = adaptive_real(&mut g, 0.0, 1.0, 8, 1e-12, 1e-10, "test").unwrap();
        let want = ((0.7f64 / 1e-3).atan() + (0.3f64 / 1e-3).atan()) / 1e-3;
        assert_relative_eq!(got, want, max_relative = 1e-9);
    }

    #[test]
    fn oscillatory_matches_closed_form() {
        // (1/d) int_{-w}^{w} e^{-2 pi i l x / d} dx = sin(2 pi l w / d) / (pi l)
        let d = 257.0e-9;
        let w = 0.45 * d / 2.0;
        for l in [1i64, 2, 7, 33, 128] {
            let mut g = |_x: f64| Complex64::new(1.0, 0.0);
            let got = windowed_oscillatory(&mut g, -w, w, l, d, 1e-14, 1e-10, "test").unwrap();
            let want = (2.0 * PI * l as f64 * w / d).sin() / (PI * l as f64);
            assert_relative_eq!(got.re, want, epsilon = 1e-12);
            assert!(got.im.abs() < 1e-12);
        }
    }

    #[test]
    fn oscillatory_with_phase_against_doubled_nodes() {
        let d = 1.0;
        let w = 0.225;
        let phi = |x: f64| 0.3 / (0.24 - x).powi(2) + 0.3 / (0.24 + x).powi(2);
        let mut g = |x: f64| Complex64::from_polar(1.0, -phi(x));
        let a = windowed_oscillatory(&mut g, -w, w, 5, d, 1e-14, 1e-10, "test").unwrap();
        // same integral with a manually doubled seed grid
        let edges = oscillation_edges(-w, w, 40.0, 12);
        let omega = 2.0 * PI * 5.0 / d;
        let mut f = |x: f64| g(x) * Complex64::from_polar(1.0, -omega * x);
        let b = adaptive_complex_seeded(&mut f, &edges, 8, 1e-15, 1e-11, "test").unwrap() / d;
        assert!((a - b).norm() < 1e-10, "{a} vs {b}");
    }
}
