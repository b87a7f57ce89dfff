//! Small local optimizers: golden-section, Nelder–Mead and finite-difference Newton.

use nalgebra::{DMatrix, DVector};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Minimum of a unimodal `f` on `[a, b]`, bracket shrunk below `tol`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if c == d {
            break;
        }
    }
    if fc < fd { (c, fc) } else { (d, fd) }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Stop once every vertex lies within this distance of the best one.
    pub diameter: f64,
    pub max_iter: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions { diameter: 1e-8, max_iter: 20_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], steps: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        let v = f(&x);
        simplex.push((x, v));
    }
    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect() };
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].0.clone();
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&best).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter < opts.diameter {
            converged = true;
            break;
        }
        iterations += 1;
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let xr = combine(&centroid, &worst.0, -1.0);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = combine(&centroid, &worst.0, -2.0);
            let fe = f(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let x = combine(&centroid, &worst.0, -0.5);
                let v = f(&x);
                (x, v)
            } else {
                let x = combine(&centroid, &worst.0, 0.5);
                let v = f(&x);
                (x, v)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let b = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let x = combine(&b, &v.0, 0.5);
                    let fx = f(&x);
                    *v = (x, fx);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    NelderMeadResult { x, value, iterations, converged }
}

/// Central differences at `h` and `h/2`, Richardson-extrapolated to fourth order.
pub fn gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let diff = |i: usize, h: f64| {
        let mut p = x.to_vec();
        let mut m = x.to_vec();
        p[i] += h;
        m[i] -= h;
        (f(&p) - f(&m)) / (2.0 * h)
    };
    (0..x.len()).map(|i| (4.0 * diff(i, 0.5 * h) - diff(i, h)) / 3.0).collect()
}

/// Newton iterations with a finite-difference Hessian. A step is kept if it
/// lowers `f`, or if `f` is flat to rounding and the gradient shrinks;
/// otherwise it is halved up to ten times.
pub fn newton_polish(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], gtol: f64, max_iter: usize) -> Vec<f64> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let hg = 1e-5;
    let hh = 1e-5;
    let gnorm = |y: &[f64]| gradient(f, y, hg).iter().map(|v| v * v).sum::<f64>().sqrt();
    for _ in 0..max_iter {
        let fx = f(&x);
        let g = DVector::from_vec(gradient(f, &x, hg));
        let gx = g.norm();
        if gx < gtol {
            break;
        }
        let at = |d: &[(usize, f64)]| {
            let mut y = x.clone();
            for &(i, s) in d {
                y[i] += s;
            }
            f(&y)
        };
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = if i == j {
                    (at(&[(i, hh)]) - 2.0 * fx + at(&[(i, -hh)])) / (hh * hh)
                } else {
                    (at(&[(i, hh), (j, hh)]) - at(&[(i, hh), (j, -hh)]) - at(&[(i, -hh), (j, hh)])
                        + at(&[(i, -hh), (j, -hh)]))
                        / (4.0 * hh * hh)
                };
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        let step = match h.clone().cholesky() {
            Some(c) => c.solve(&g),
            None => g.clone() * 1e-3,
        };
        let flat = 1e-13 * fx.abs().max(1.0);
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..10 {
            let y: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - t * s).collect();
            let fy = f(&y);
            if fy < fx || (fy <= fx + flat && gnorm(&y) < gx) {
                x = y;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    x
}
