//! Nelder-Mead simplex minimisation, the direct-search workhorse behind the
//! maximum-likelihood fit. Standard reflection/expansion/contraction/shrink
//! coefficients (1, 2, 1/2, 1/2); convergence is declared when the simplex
//! diameter, measured coordinate-wise relative to `max(1, |best|)`, falls
//! below the requested tolerance. Objective values of `NaN` are treated as
//! `+inf` so penalty regions repel the simplex.

#[derive(Clone, Copy, Debug)]
pub(crate) struct Options {
    pub max_iters: usize,
    pub diameter_tol: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options { max_iters: 1000, diameter_tol: 1e-8 }
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Outcome<const N: usize> {
    pub x: [f64; N],
    pub fx: f64,
    pub converged: bool,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

pub(crate) fn minimize<const N: usize, F>(mut f: F, x0: [f64; N], opts: Options) -> Outcome<N>
where
    F: FnMut(&[f64; N]) -> f64,
{
    let mut eval = |x: &[f64; N]| -> f64 { sanitize(f(x)) };

    // Initial simplex: x0 plus one displaced vertex per coordinate.
    let mut vs: [[f64; N]; 4] = [[0.0; N]; 4]; // N + 1 vertices; N == 3 in practice
    let nv = N + 1;
    assert!(nv <= 4, "simplex storage sized for up to 3 dimensions");
    let mut fs = [f64::INFINITY; 4];
    vs[0] = x0;
    for i in 0..N {
        let mut v = x0;
        let scale = if v[i].abs() > 1.0 { v[i].abs() } else { 1.0 };
        v[i] += 0.05 * scale;
        vs[i + 1] = v;
    }
    for i in 0..nv {
        fs[i] = eval(&vs[i]);
    }

    let mut iters = 0;
    let mut converged = false;
    while iters < opts.max_iters {
        iters += 1;

        // Order vertices: index of best, worst, second worst.
        let mut order: [usize; 4] = [0, 1, 2, 3];
        order[..nv].sort_unstable_by(|&a, &b| fs[a].partial_cmp(&fs[b]).unwrap());
        let best = order[0];
        let worst = order[nv - 1];
        let second = order[nv - 2];

        // Scaled diameter against the best vertex.
        let mut diameter = 0.0f64;
        for i in 0..nv {
            for j in 0..N {
                let scale = if vs[best][j].abs() > 1.0 { vs[best][j].abs() } else { 1.0 };
                let d = (vs[i][j] - vs[best][j]).abs() / scale;
                if d > diameter {
                    diameter = d;
                }
            }
        }
        if diameter < opts.diameter_tol {
            converged = true;
            break;
        }

        // Centroid of all vertices but the worst.
        let mut centroid = [0.0; N];
        for i in 0..nv {
            if i == worst {
                continue;
            }
            for j in 0..N {
                centroid[j] += vs[i][j];
            }
        }
        for c in centroid.iter_mut() {
            *c /= N as f64;
        }

        let mut reflected = [0.0; N];
        for j in 0..N {
            reflected[j] = centroid[j] + (centroid[j] - vs[worst][j]);
        }
        let fr = eval(&reflected);

        if fr < fs[best] {
            let mut expanded = [0.0; N];
            for j in 0..N {
                expanded[j] = centroid[j] + 2.0 * (centroid[j] - vs[worst][j]);
            }
            let fe = eval(&expanded);
            if fe < fr {
                vs[worst] = expanded;
                fs[worst] = fe;
            } else {
                vs[worst] = reflected;
                fs[worst] = fr;
            }
            continue;
        }
        if fr < fs[second] {
            vs[worst] = reflected;
            fs[worst] = fr;
            continue;
        }

        // Contraction, outside or inside of the reflection.
        let mut contracted = [0.0; N];
        if fr < fs[worst] {
            for j in 0..N {
                contracted[j] = centroid[j] + 0.5 * (reflected[j] - centroid[j]);
            }
            let fc = eval(&contracted);
            if fc <= fr {
                vs[worst] = contracted;
                fs[worst] = fc;
                continue;
            }
        } else {
            for j in 0..N {
                contracted[j] = centroid[j] + 0.5 * (vs[worst][j] - centroid[j]);
            }
            let fc = eval(&contracted);
            if fc < fs[worst] {
                vs[worst] = contracted;
                fs[worst] = fc;
                continue;
            }
        }

        // Shrink toward the best vertex.
        for i in 0..nv {
            if i == best {
                continue;
            }
            for j in 0..N {
                vs[i][j] = vs[best][j] + 0.5 * (vs[i][j] - vs[best][j]);
            }
            fs[i] = eval(&vs[i]);
        }
    }

    let mut best = 0;
    for i in 1..nv {
        if fs[i] < fs[best] {
            best = i;
        }
    }
    Outcome { x: vs[best], fx: fs[best], converged }
}
