//! Bounded Nelder-Mead simplex search.

/// Box constraints applied by projecting every trial point.
#[derive(Debug, Clone)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    fn project(&self, x: &mut [f64]) {
        for ((v, lo), hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(*lo, *hi);
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    /// Stop once the largest vertex distance from the best vertex drops below this.
    pub diameter_tol: f64,
    pub max_evaluations: usize,
    /// Relative size of the initial simplex edges.
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            diameter_tol: 1e-10,
            max_evaluations: 100_000,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

struct Search<'a, F> {
    f: F,
    bounds: &'a Bounds,
    evaluations: usize,
}

impl<F: Fn(&[f64]) -> f64> Search<'_, F> {
    fn eval(&mut self, mut x: Vec<f64>) -> (Vec<f64>, f64) {
        self.bounds.project(&mut x);
        self.evaluations += 1;
        let v = (self.f)(&x);
        (x, if v.is_nan() { f64::INFINITY } else { v })
    }
}

fn diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let best = &simplex[0].0;
    simplex[1..]
        .iter()
        .map(|(x, _)| {
            x.iter()
                .zip(best)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

fn run_once<F: Fn(&[f64]) -> f64>(
    search: &mut Search<'_, F>,
    start: &[f64],
    opts: &SimplexOptions,
    iterations: &mut usize,
) -> (Vec<f64>, f64, bool) {
    let n = start.len();
    let mut simplex = vec![search.eval(start.to_vec())];
    for i in 0..n {
        let mut x = simplex[0].0.clone();
        let step = if x[i].abs() > 1e-8 {
            opts.initial_step * x[i].abs()
        } else {
            opts.initial_step
        };
        x[i] += step;
        // Step inward when the upper bound would swallow the edge.
        if x[i] > search.bounds.upper[i] {
            x[i] = simplex[0].0[i] - step;
        }
        simplex.push(search.eval(x));
    }

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if diameter(&simplex) < opts.diameter_tol {
            let (x, v) = simplex.swap_remove(0);
            return (x, v, true);
        }
        if search.evaluations >= opts.max_evaluations {
            let (x, v) = simplex.swap_remove(0);
            return (x, v, false);
        }
        *iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|i| simplex[..n].iter().map(|(x, _)| x[i]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let towards = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let reflected = search.eval(towards(1.0));
        if reflected.1 < simplex[0].1 {
            let expanded = search.eval(towards(2.0));
            simplex[n] = if expanded.1 < reflected.1 { expanded } else { reflected };
            continue;
        }
        if reflected.1 < simplex[n - 1].1 {
            simplex[n] = reflected;
            continue;
        }
        let contracted = if reflected.1 < worst.1 {
            search.eval(towards(0.5))
        } else {
            search.eval(towards(-0.5))
        };
        if contracted.1 < worst.1.min(reflected.1) {
            simplex[n] = contracted;
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = best
                .iter()
                .zip(&vertex.0)
                .map(|(b, v)| b + 0.5 * (v - b))
                .collect();
            *vertex = search.eval(x);
        }
    }
}

/// Minimizes `f` from `start`, restarting at the optimum until a restart no
/// longer improves it (guards against a collapsed simplex).
pub fn minimize<F: Fn(&[f64]) -> f64>(
    f: F,
    start: &[f64],
    bounds: &Bounds,
    opts: &SimplexOptions,
) -> SimplexResult {
    let mut search = Search {
        f,
        bounds,
        evaluations: 0,
    };
    let mut iterations = 0;
    let (mut x, mut value, mut converged) = run_once(&mut search, start, opts, &mut iterations);
    while converged && search.evaluations < opts.max_evaluations {
        let (x2, v2, c2) = run_once(&mut search, &x, opts, &mut iterations);
        converged = c2;
        if v2 < value {
            x = x2;
            value = v2;
        } else {
            break;
        }
    }
    SimplexResult {
        x,
        value,
        evaluations: search.evaluations,
        iterations,
        converged,
    }
}
