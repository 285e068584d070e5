//! Derivative-free maximizers: golden-section search on an interval and
//! Nelder–Mead simplex search.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximizes `f` on `[a, b]` by golden-section search, returning the best
/// abscissa and value seen. Assumes `f` is unimodal on the bracket.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
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
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Stop when every vertex is this close to the best one.
    pub x_tol: f64,
    /// Stop when the value spread across the simplex falls below this.
    pub f_tol: f64,
    pub max_iter: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 1e-2,
            x_tol: 1e-12,
            f_tol: 1e-15,
            max_iter: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Maximizes `f` with the Nelder–Mead simplex method (standard reflection,
/// expansion, contraction and shrink coefficients 1, 2, ½, ½).
pub fn nelder_mead_max<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    opts: &NelderMeadOptions,
) -> SimplexResult {
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    // stored negated so the search minimizes
    let mut values: Vec<f64> = simplex.iter().map(|v| -f(v)).collect();

    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let size = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if size <= opts.x_tol || (spread <= opts.f_tol && size <= opts.x_tol.sqrt()) {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|v| v[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(1.0);
        let fr = -f(&xr);
        if fr < values[0] {
            let xe = along(2.0);
            let fe = -f(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            let (xc, fc) = if fr < values[n] {
                let xc = along(0.5);
                let fc = -f(&xc);
                (xc, fc)
            } else {
                let xc = along(-0.5);
                let fc = -f(&xc);
                (xc, fc)
            };
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                for i in 1..=n {
                    let shrunk: Vec<f64> = simplex[i]
                        .iter()
                        .zip(&simplex[0])
                        .map(|(v, b)| b + 0.5 * (v - b))
                        .collect();
                    values[i] = -f(&shrunk);
                    simplex[i] = shrunk;
                }
            }
        }
    }

    let best = (0..=n)
        .min_by(|&i, &j| values[i].total_cmp(&values[j]))
        .unwrap_or(0);
    SimplexResult {
        x: simplex[best].clone(),
        value: -values[best],
        iterations,
    }
}
