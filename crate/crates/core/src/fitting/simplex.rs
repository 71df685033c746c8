//! Nelder-Mead minimisation over an unconstrained box-free space.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub max_iter: usize,
    /// Stop once every vertex lies within this distance of the best one.
    pub diameter_tol: f64,
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            max_iter: 500,
            diameter_tol: 1e-6,
            initial_step: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum<const D: usize> {
    pub x: [f64; D],
    pub value: f64,
    pub iterations: usize,
}

fn lerp<const D: usize>(a: &[f64; D], b: &[f64; D], t: f64) -> [f64; D] {
    std::array::from_fn(|i| a[i] + t * (b[i] - a[i]))
}

fn dist<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

impl NelderMead {
    pub fn minimize<const D: usize>(
        &self,
        mut f: impl FnMut(&[f64; D]) -> f64,
        start: [f64; D],
    ) -> Minimum<D> {
        let mut simplex: Vec<([f64; D], f64)> = Vec::with_capacity(D + 1);
        simplex.push((start, f(&start)));
        for i in 0..D {
            let mut v = start;
            v[i] += self.initial_step;
            simplex.push((v, f(&v)));
        }
        // NaN sorts last
        let order = |a: &([f64; D], f64), b: &([f64; D], f64)| a.1.total_cmp(&b.1);

        let mut iterations = 0;
        while iterations < self.max_iter {
            simplex.sort_by(order);
            let best = simplex[0].0;
            if simplex
                .iter()
                .all(|(v, _)| dist(v, &best) < self.diameter_tol)
            {
                break;
            }
            iterations += 1;

            let centroid: [f64; D] = std::array::from_fn(|i| {
                simplex[..D].iter().map(|(v, _)| v[i]).sum::<f64>() / D as f64
            });
            let (worst, f_worst) = simplex[D];
            let f_best = simplex[0].1;
            let f_second = simplex[D - 1].1;

            let xr = lerp(&centroid, &worst, -self.reflection);
            let fr = f(&xr);
            if fr < f_best {
                let xe = lerp(&centroid, &worst, -self.reflection * self.expansion);
                let fe = f(&xe);
                simplex[D] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < f_second {
                simplex[D] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < f_worst {
                let xc = lerp(&centroid, &xr, self.contraction);
                (xc, f(&xc))
            } else {
                let xc = lerp(&centroid, &worst, self.contraction);
                (xc, f(&xc))
            };
            if fc < fr.min(f_worst) {
                simplex[D] = (xc, fc);
                continue;
            }
            for vertex in simplex.iter_mut().skip(1) {
                let v = lerp(&best, &vertex.0, self.shrink);
                *vertex = (v, f(&v));
            }
        }
        simplex.sort_by(order);
        Minimum {
            x: simplex[0].0,
            value: simplex[0].1,
            iterations,
        }
    }
}
