//! Downhill simplex (Nelder-Mead) with a quadratic exterior penalty, box
//! projection and restarts.
//!
//! The penalized merit is `objective(x) + mu * max(0, -constraint(x))^2`,
//! so `constraint(x) >= 0` marks the feasible set. Every restart rebuilds the
//! simplex around the best point seen so far and multiplies `mu` by
//! `penalty_growth`, which drives the exterior optimum onto the boundary.

use serde::{Deserialize, Serialize};

use super::NumericsError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadOptions {
    /// Optional per-coordinate lower bounds. Points are projected onto the box.
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
    pub initial_penalty: f64,
    pub penalty_growth: f64,
    pub max_penalty: f64,
    /// Minimum number of simplex runs; more are made while the best point
    /// is infeasible and the penalty can still grow.
    pub restarts: usize,
    /// Iteration budget for a single simplex run.
    pub max_iterations: usize,
    pub xtol: f64,
    pub ftol: f64,
    pub feas_tol: f64,
    /// Relative edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            lower: None,
            upper: None,
            initial_penalty: 1e3,
            penalty_growth: 10.0,
            max_penalty: 1e14,
            restarts: 5,
            max_iterations: 4000,
            xtol: 1e-10,
            ftol: 1e-13,
            feas_tol: 1e-9,
            initial_step: 0.05,
        }
    }
}

/// What one simplex run achieved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    pub restart: usize,
    pub penalty: f64,
    pub iterations: usize,
    pub x: Vec<f64>,
    pub objective: f64,
    pub constraint: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadOutcome {
    pub x: Vec<f64>,
    pub objective: f64,
    pub constraint: f64,
    pub feasible: bool,
    /// The final run met its tolerances before its iteration budget.
    pub converged: bool,
    /// Set when the best point comes from a run that ran out of iterations.
    pub budget_exhausted: bool,
    pub evaluations: usize,
    pub trace: Vec<RestartRecord>,
}

struct Problem<'a, F, G> {
    objective: &'a F,
    constraint: &'a G,
    lower: Option<&'a [f64]>,
    upper: Option<&'a [f64]>,
    evaluations: usize,
}

impl<F, G> Problem<'_, F, G>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> f64,
{
    fn project(&self, x: &mut [f64]) {
        if let Some(lo) = self.lower {
            for (v, &l) in x.iter_mut().zip(lo) {
                *v = v.max(l);
            }
        }
        if let Some(hi) = self.upper {
            for (v, &h) in x.iter_mut().zip(hi) {
                *v = v.min(h);
            }
        }
    }

    fn merit(&mut self, x: &[f64], mu: f64) -> (f64, f64, f64) {
        self.evaluations += 1;
        let f = (self.objective)(x);
        let g = (self.constraint)(x);
        let viol = (-g).max(0.0);
        let m = f + mu * viol * viol;
        let m = if m.is_finite() { m } else { f64::INFINITY };
        (m, f, g)
    }
}

#[derive(Clone)]
struct Vertex {
    x: Vec<f64>,
    merit: f64,
    objective: f64,
    constraint: f64,
}

fn run_simplex<F, G>(
    p: &mut Problem<'_, F, G>,
    start: &[f64],
    mu: f64,
    step_sign: f64,
    opts: &NelderMeadOptions,
) -> (Vertex, usize, bool)
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> f64,
{
    let n = start.len();
    let nf = n as f64;
    // Dimension-adaptive coefficients keep the method effective beyond a
    // handful of variables.
    let rho = 1.0;
    let chi = 1.0 + 2.0 / nf;
    let gamma = 0.75 - 0.5 / nf;
    let sigma = 1.0 - 1.0 / nf.max(2.0);

    let make = |p: &mut Problem<'_, F, G>, mut x: Vec<f64>| {
        p.project(&mut x);
        let (merit, objective, constraint) = p.merit(&x, mu);
        Vertex {
            x,
            merit,
            objective,
            constraint,
        }
    };

    let mut simplex = Vec::with_capacity(n + 1);
    simplex.push(make(p, start.to_vec()));
    for i in 0..n {
        let mut x = start.to_vec();
        let h = if x[i] != 0.0 {
            opts.initial_step * x[i].abs()
        } else {
            2.5e-4
        };
        x[i] += step_sign * h;
        let mut probe = x.clone();
        p.project(&mut probe);
        if probe[i] == start[i] {
            x[i] = start[i] - step_sign * h;
        }
        simplex.push(make(p, x));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        simplex.sort_by(|a, b| a.merit.total_cmp(&b.merit));
        let best = &simplex[0];
        let scale = 1.0 + best.x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let xspread = simplex[1..]
            .iter()
            .map(|v| {
                v.x.iter()
                    .zip(&best.x)
                    .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
            })
            .fold(0.0_f64, f64::max);
        let fspread = simplex[1..]
            .iter()
            .map(|v| (v.merit - best.merit).abs())
            .fold(0.0_f64, f64::max);
        if xspread <= opts.xtol * scale && fspread <= opts.ftol * (1.0 + best.merit.abs()) {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(&v.x) {
                *c += xi / nf;
            }
        }
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.x)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let reflected = make(p, along(rho));
        if reflected.merit < simplex[0].merit {
            let expanded = make(p, along(rho * chi));
            simplex[n] = if expanded.merit < reflected.merit {
                expanded
            } else {
                reflected
            };
            continue;
        }
        if reflected.merit < simplex[n - 1].merit {
            simplex[n] = reflected;
            continue;
        }
        let contracted = if reflected.merit < worst.merit {
            let c = make(p, along(rho * gamma));
            (c.merit <= reflected.merit).then_some(c)
        } else {
            let c = make(p, along(-gamma));
            (c.merit < worst.merit).then_some(c)
        };
        if let Some(c) = contracted {
            simplex[n] = c;
            continue;
        }
        let anchor = simplex[0].x.clone();
        for v in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = anchor
                .iter()
                .zip(&v.x)
                .map(|(a, b)| a + sigma * (b - a))
                .collect();
            *v = make(p, x);
        }
    }
    simplex.sort_by(|a, b| a.merit.total_cmp(&b.merit));
    (simplex.swap_remove(0), iterations, converged)
}

// Feasible points beat infeasible ones; among feasible points the lower
// objective wins, among infeasible ones the smaller violation.
fn better(a: &Vertex, b: &Vertex, feas_tol: f64) -> bool {
    let fa = a.constraint >= -feas_tol;
    let fb = b.constraint >= -feas_tol;
    match (fa, fb) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => a.objective < b.objective,
        (false, false) => a.constraint > b.constraint,
    }
}

/// Minimize `objective` subject to `constraint(x) >= 0` and optional box
/// bounds.
///
/// Running out of iterations is not an error: the best point found is
/// returned with `budget_exhausted` set.
pub fn nelder_mead_penalized<F, G>(
    objective: F,
    constraint: G,
    start: &[f64],
    options: &NelderMeadOptions,
) -> Result<NelderMeadOutcome, NumericsError>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> f64,
{
    if start.is_empty() {
        return Err(NumericsError::Domain("simplex needs at least one variable".into()));
    }
    if start.iter().any(|v| !v.is_finite()) {
        return Err(NumericsError::Domain("non-finite start point".into()));
    }
    for bound in [&options.lower, &options.upper].into_iter().flatten() {
        if bound.len() != start.len() {
            return Err(NumericsError::Domain("bound length differs from start length".into()));
        }
    }
    let mut problem = Problem {
        objective: &objective,
        constraint: &constraint,
        lower: options.lower.as_deref(),
        upper: options.upper.as_deref(),
        evaluations: 0,
    };
    let mut trace = Vec::new();
    let mut best: Option<(Vertex, bool)> = None;
    let mut current = start.to_vec();
    let mut mu = options.initial_penalty;
    let mut restart = 0;
    let mut last_converged;
    loop {
        let sign = if restart % 2 == 0 { 1.0 } else { -1.0 };
        let (v, iterations, converged) = run_simplex(&mut problem, &current, mu, sign, options);
        trace.push(RestartRecord {
            restart,
            penalty: mu,
            iterations,
            x: v.x.clone(),
            objective: v.objective,
            constraint: v.constraint,
            converged,
        });
        last_converged = converged;
        current = v.x.clone();
        let replace = match &best {
            None => true,
            Some((b, _)) => better(&v, b, options.feas_tol),
        };
        if replace {
            best = Some((v, !converged));
        }
        restart += 1;
        let feasible = best
            .as_ref()
            .is_some_and(|(b, _)| b.constraint >= -options.feas_tol);
        let can_grow = mu < options.max_penalty;
        if restart >= options.restarts && (feasible || !can_grow) {
            break;
        }
        if restart >= 4 * options.restarts.max(1) + 20 {
            break;
        }
        if can_grow {
            mu = (mu * options.penalty_growth).min(options.max_penalty);
        }
    }
    let (b, exhausted) = best.expect("at least one simplex run");
    Ok(NelderMeadOutcome {
        feasible: b.constraint >= -options.feas_tol,
        x: b.x,
        objective: b.objective,
        constraint: b.constraint,
        converged: last_converged,
        budget_exhausted: exhausted,
        evaluations: problem.evaluations,
        trace,
    })
}
