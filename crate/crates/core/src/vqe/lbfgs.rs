//! Limited-memory BFGS with a strong-Wolfe line search.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsOptions {
    pub memory: usize,
    pub max_iters: usize,
    /// Stop when the largest gradient component falls below this.
    pub grad_tol: f64,
    /// Stop when an iteration lowers `f` by less than `f_tol * max(|f|, 1)`.
    pub f_tol: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        LbfgsOptions { memory: 10, max_iters: 5000, grad_tol: 1e-9, f_tol: 0.0, c1: 1e-4, c2: 0.9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    GradientTolerance,
    FunctionTolerance,
    MaxIterations,
    LineSearchFailed,
}

#[derive(Debug, Clone)]
pub struct LbfgsReport {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_inf_norm: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub termination: Termination,
    /// Objective value after each accepted step.
    pub trace: Vec<f64>,
}

impl LbfgsReport {
    pub fn converged(&self) -> bool {
        matches!(self.termination, Termination::GradientTolerance | Termination::FunctionTolerance)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

struct Objective<F> {
    f: F,
    evaluations: usize,
}

impl<F: FnMut(&[f64], &mut [f64]) -> f64> Objective<F> {
    fn eval(&mut self, x: &[f64], g: &mut [f64]) -> f64 {
        self.evaluations += 1;
        (self.f)(x, g)
    }
}

/// Minimise `f`, which returns the value at `x` and writes the gradient into
/// its second argument.
pub fn minimize<F>(f: F, x0: &[f64], opts: &LbfgsOptions) -> LbfgsReport
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut obj = Objective { f, evaluations: 0 };
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut fx = obj.eval(&x, &mut g);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut trace = vec![fx];
    let mut iterations = 0;

    let termination = loop {
        if inf_norm(&g) <= opts.grad_tol {
            break Termination::GradientTolerance;
        }
        if iterations >= opts.max_iters {
            break Termination::MaxIterations;
        }

        // two-loop recursion
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &d);
            d.iter_mut().zip(y).for_each(|(di, yi)| *di -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            let gamma = dot(s, y) / dot(y, y);
            d.iter_mut().for_each(|di| *di *= gamma);
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &d);
            d.iter_mut().zip(s).for_each(|(di, si)| *di += (a - b) * si);
        }
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            // not a descent direction: restart from steepest descent
            history.clear();
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }
        let initial_step = if history.is_empty() { (1.0 / inf_norm(&g)).min(1.0) } else { 1.0 };

        let Some(step) = line_search(&mut obj, &x, fx, &d, slope, initial_step, opts) else {
            if history.is_empty() {
                break Termination::LineSearchFailed;
            }
            history.clear();
            continue;
        };
        iterations += 1;

        let s: Vec<f64> = d.iter().map(|di| step.alpha * di).collect();
        let y: Vec<f64> = step.g.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        let decrease = fx - step.f;
        x = step.x;
        g = step.g;
        fx = step.f;
        trace.push(fx);
        if sy > 1e-300 {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        if decrease <= opts.f_tol * fx.abs().max(1.0) {
            break Termination::FunctionTolerance;
        }
    };

    LbfgsReport {
        grad_inf_norm: inf_norm(&g),
        x,
        f: fx,
        iterations,
        evaluations: obj.evaluations,
        termination,
        trace,
    }
}

struct Step {
    alpha: f64,
    x: Vec<f64>,
    f: f64,
    g: Vec<f64>,
}

struct Probe {
    alpha: f64,
    f: f64,
    slope: f64,
}

/// Strong-Wolfe bracketing search followed by cubic-interpolation zoom.
fn line_search<F>(
    obj: &mut Objective<F>,
    x: &[f64],
    f0: f64,
    d: &[f64],
    slope0: f64,
    initial: f64,
    opts: &LbfgsOptions,
) -> Option<Step>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    const MAX_EVALS: usize = 40;
    let n = x.len();
    let mut trial = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut evaluate = |alpha: f64, trial: &mut Vec<f64>, grad: &mut Vec<f64>| {
        for i in 0..n {
            trial[i] = x[i] + alpha * d[i];
        }
        let f = obj.eval(trial, grad);
        Probe { alpha, f, slope: dot(grad, d) }
    };
    let accept = |p: &Probe, trial: &[f64], grad: &[f64]| Step {
        alpha: p.alpha,
        x: trial.to_vec(),
        f: p.f,
        g: grad.to_vec(),
    };
    let sufficient = |p: &Probe| p.f <= f0 + opts.c1 * p.alpha * slope0;
    let curvature = |p: &Probe| p.slope.abs() <= -opts.c2 * slope0;

    let mut prev = Probe { alpha: 0.0, f: f0, slope: slope0 };
    let mut alpha = initial;
    let mut evals = 0;
    let (mut lo, mut hi);
    loop {
        let p = evaluate(alpha, &mut trial, &mut grad);
        evals += 1;
        if !p.f.is_finite() {
            alpha *= 0.5;
            if evals >= MAX_EVALS {
                return None;
            }
            continue;
        }
        if !sufficient(&p) || (evals > 1 && p.f >= prev.f) {
            lo = prev;
            hi = p;
            break;
        }
        if curvature(&p) {
            return Some(accept(&p, &trial, &grad));
        }
        if p.slope >= 0.0 {
            lo = p;
            hi = prev;
            break;
        }
        if evals >= MAX_EVALS {
            return None;
        }
        prev = p;
        alpha *= 2.0;
    }

    // zoom
    while evals < MAX_EVALS {
        let (a, b) = (lo.alpha.min(hi.alpha), lo.alpha.max(hi.alpha));
        let width = b - a;
        if width <= 1e-16 * b.max(1.0) {
            break;
        }
        let mut alpha = cubic_min(&lo, &hi).unwrap_or(0.5 * (lo.alpha + hi.alpha));
        // keep the trial well inside the bracket
        let margin = 0.1 * width;
        if !(alpha > a + margin && alpha < b - margin) {
            alpha = 0.5 * (a + b);
        }
        let p = evaluate(alpha, &mut trial, &mut grad);
        evals += 1;
        if !sufficient(&p) || p.f >= lo.f {
            hi = p;
        } else {
            if curvature(&p) {
                return Some(accept(&p, &trial, &grad));
            }
            if p.slope * (hi.alpha - lo.alpha) >= 0.0 {
                hi = lo;
            }
            lo = p;
        }
    }
    // Fall back to the best sufficient-decrease point found, if any.
    if lo.alpha > 0.0 && lo.f < f0 {
        let p = evaluate(lo.alpha, &mut trial, &mut grad);
        return Some(accept(&p, &trial, &grad));
    }
    None
}

fn cubic_min(a: &Probe, b: &Probe) -> Option<f64> {
    let d1 = a.slope + b.slope - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
    let disc = d1 * d1 - a.slope * b.slope;
    if disc < 0.0 {
        return None;
    }
    let d2 = (b.alpha - a.alpha).signum() * disc.sqrt();
    let denom = b.slope - a.slope + 2.0 * d2;
    if denom == 0.0 {
        return None;
    }
    let t = b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / denom;
    t.is_finite().then_some(t)
}
