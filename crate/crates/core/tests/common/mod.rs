//! Brute-force oracles shared by the integration tests.

use spp_core::{assemble, BakhvalovMesh, QuadratureRule, TwoParamBvp};

/// Simpson panels per element in [`dense_oracle`].
pub const ORACLE_PANELS: usize = 50;

/// Dense assembly of the Galerkin matrix and load with a composite Simpson
/// rule of `ORACLE_PANELS` panels per element. Hats are parametrised by the
/// element coordinate so that elements of width ~1e-10 near x = 1 do not lose
/// digits to `x - x_i` cancellation.
pub fn dense_oracle(problem: &TwoParamBvp, nodes: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = nodes.len() - 1;
    let mut a = vec![vec![0.0; n + 1]; n + 1];
    let mut f = vec![0.0; n + 1];
    let dt = 1.0 / ORACLE_PANELS as f64;
    for e in 0..n {
        let (x0, h) = (nodes[e], nodes[e + 1] - nodes[e]);
        for k in 0..ORACLE_PANELS {
            let t0 = k as f64 * dt;
            for (t, wt) in [(t0, dt / 6.0), (t0 + 0.5 * dt, 4.0 * dt / 6.0), (t0 + dt, dt / 6.0)] {
                let x = x0 + t * h;
                let phi = [1.0 - t, t];
                let dphi = [-1.0 / h, 1.0 / h];
                for li in 0..2 {
                    f[e + li] += wt * h * problem.f.eval(x) * phi[li];
                    for lj in 0..2 {
                        a[e + li][e + lj] += wt
                            * h
                            * (problem.eps1 * dphi[lj] * dphi[li]
                                + problem.eps2 * problem.b.eval(x) * dphi[lj] * phi[li]
                                + problem.c.eval(x) * phi[lj] * phi[li]);
                    }
                }
            }
        }
    }
    (a, f)
}

/// Largest defect of the assembled system against [`dense_oracle`], each
/// matrix row scaled by its largest entry and the load by its largest entry.
/// Off-band dense entries are compared against zero.
pub fn oracle_defect(problem: &TwoParamBvp, mesh: &BakhvalovMesh, quad: &QuadratureRule) -> f64 {
    let (dense, load) = dense_oracle(problem, mesh.nodes());
    let n = mesh.n();
    let sys = assemble(problem, mesh, quad).unwrap();
    let fscale = load.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for r in 0..n - 1 {
        let i = r + 1;
        let scale = dense[i].iter().map(|v| v.abs()).fold(0.0, f64::max);
        // entries outside the tridiagonal band must vanish as well
        for (j, &v) in dense[i].iter().enumerate() {
            if j == 0 || j == n {
                continue;
            }
            let got = if j + 1 == i {
                sys.sub[r]
            } else if j == i {
                sys.diag[r]
            } else if j == i + 1 {
                sys.sup[r]
            } else {
                0.0
            };
            worst = worst.max((got - v).abs() / scale);
        }
        worst = worst.max((sys.rhs[r] - load[i]).abs() / fscale);
    }
    worst
}
