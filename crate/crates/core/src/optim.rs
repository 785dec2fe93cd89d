//! Small derivative-free minimizer used for two-dimensional local refinement
//! of a single disc parameter (real and imaginary part).

#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    pub initial_step: f64,
    pub max_evals: usize,
    /// Stop when the simplex diameter falls below this.
    pub xtol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            initial_step: 1e-2,
            max_evals: 400,
            xtol: 1e-12,
        }
    }
}

impl NelderMead {
    pub fn minimize<F>(&self, mut objective: F, x0: [f64; 2]) -> ([f64; 2], f64)
    where
        F: FnMut([f64; 2]) -> f64,
    {
        let step = self.initial_step;
        let mut simplex = [x0, [x0[0] + step, x0[1]], [x0[0], x0[1] + step]];
        let mut values = simplex.map(&mut objective);
        let mut evals = 3;

        let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];

        while evals < self.max_evals {
            let mut order = [0usize, 1, 2];
            order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
            simplex = order.map(|i| simplex[i]);
            values = order.map(|i| values[i]);

            let diameter = (1..3)
                .map(|i| ((simplex[i][0] - simplex[0][0]).powi(2) + (simplex[i][1] - simplex[0][1]).powi(2)).sqrt())
                .fold(0.0, f64::max);
            if diameter < self.xtol {
                break;
            }

            let centroid = lerp(simplex[0], simplex[1], 0.5);
            let worst = simplex[2];
            let reflected = lerp(centroid, worst, -1.0);
            let fr = objective(reflected);
            evals += 1;

            if fr < values[0] {
                let expanded = lerp(centroid, worst, -2.0);
                let fe = objective(expanded);
                evals += 1;
                if fe < fr {
                    simplex[2] = expanded;
                    values[2] = fe;
                } else {
                    simplex[2] = reflected;
                    values[2] = fr;
                }
            } else if fr < values[1] {
                simplex[2] = reflected;
                values[2] = fr;
            } else {
                let (contracted, fc) = if fr < values[2] {
                    let p = lerp(centroid, worst, -0.5);
                    (p, objective(p))
                } else {
                    let p = lerp(centroid, worst, 0.5);
                    (p, objective(p))
                };
                evals += 1;
                if fc < values[2].min(fr) {
                    simplex[2] = contracted;
                    values[2] = fc;
                } else {
                    // shrink toward the best vertex
                    for i in 1..3 {
                        simplex[i] = lerp(simplex[0], simplex[i], 0.5);
                        values[i] = objective(simplex[i]);
                    }
                    evals += 2;
                }
            }
        }
        let best = (0..3).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap_or(0);
        (simplex[best], values[best])
    }
}
