//! Direct-summation reference implementations over row-major `Vec<f64>` grids.

pub fn mean(v: &[f64]) -> f64 {
    let mut s = 0.0;
    for x in v {
        s += x;
    }
    s / v.len() as f64
}

fn centred_products(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for i in 0..a.len() {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    let n = a.len() as f64;
    (sab / n, saa / n, sbb / n)
}

pub fn cc(a: &[f64], b: &[f64]) -> f64 {
    let (c, va, vb) = centred_products(a, b);
    c / (va.sqrt() * vb.sqrt())
}

/// `4 σ_ab μ_a μ_b / ((σ_a² + σ_b²)(μ_a² + μ_b²))`
pub fn uiqi(a: &[f64], b: &[f64]) -> f64 {
    let (c, va, vb) = centred_products(a, b);
    let (ma, mb) = (mean(a), mean(b));
    4.0 * c * ma * mb / ((va + vb) * (ma * ma + mb * mb))
}

pub fn ergas(fused: &[Vec<f64>], reference: &[Vec<f64>], ratio: f64) -> f64 {
    let mut acc = 0.0;
    for (f, r) in fused.iter().zip(reference) {
        let mut se = 0.0;
        for i in 0..f.len() {
            se += (f[i] - r[i]) * (f[i] - r[i]);
        }
        let mse = se / f.len() as f64;
        acc += mse / (mean(r) * mean(r));
    }
    100.0 / ratio * (acc / fused.len() as f64).sqrt()
}

type Quat = [f64; 4];

fn hamilton(p: Quat, q: Quat) -> Quat {
    [
        p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
        p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
        p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
        p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0],
    ]
}

fn modulus(q: Quat) -> f64 {
    (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt()
}

/// Single-block Q4: `|σ_z1z2| / (σ_z1 σ_z2) · 2 σ_z1 σ_z2 / (σ_z1² + σ_z2²) · 2 |μ1||μ2| / (|μ1|² + |μ2|²)`.
pub fn q4(fused: &[Vec<f64>], reference: &[Vec<f64>]) -> f64 {
    let n = fused[0].len();
    let z = |img: &[Vec<f64>], i: usize| -> Quat { [img[0][i], img[1][i], img[2][i], img[3][i]] };
    let mut m1 = [0.0; 4];
    let mut m2 = [0.0; 4];
    for i in 0..n {
        for k in 0..4 {
            m1[k] += z(fused, i)[k] / n as f64;
            m2[k] += z(reference, i)[k] / n as f64;
        }
    }
    let mut cov = [0.0; 4];
    let (mut v1, mut v2) = (0.0, 0.0);
    for i in 0..n {
        let d1: Quat = std::array::from_fn(|k| z(fused, i)[k] - m1[k]);
        let d2: Quat = std::array::from_fn(|k| z(reference, i)[k] - m2[k]);
        let p = hamilton(d1, [d2[0], -d2[1], -d2[2], -d2[3]]);
        for k in 0..4 {
            cov[k] += p[k] / n as f64;
        }
        v1 += modulus(d1).powi(2) / n as f64;
        v2 += modulus(d2).powi(2) / n as f64;
    }
    let (s1, s2) = (v1.sqrt(), v2.sqrt());
    let (a1, a2) = (modulus(m1), modulus(m2));
    modulus(cov) / (s1 * s2) * (2.0 * s1 * s2 / (v1 + v2)) * (2.0 * a1 * a2 / (a1 * a1 + a2 * a2))
}

/// QNR with single-window quality indices, unit exponents and `pan_low` the
/// PAN image at the MS scale.
pub fn qnr(fused: &[Vec<f64>], ms: &[Vec<f64>], pan: &[f64], pan_low: &[f64]) -> (f64, f64, f64) {
    let n = fused.len();
    let mut dl = 0.0;
    for l in 0..n {
        for r in 0..n {
            if l != r {
                dl += (uiqi(&fused[l], &fused[r]) - uiqi(&ms[l], &ms[r])).abs();
            }
        }
    }
    let dl = if n > 1 { dl / (n * (n - 1)) as f64 } else { 0.0 };
    let mut ds = 0.0;
    for l in 0..n {
        ds += (uiqi(&fused[l], pan) - uiqi(&ms[l], pan_low)).abs();
    }
    let ds = ds / n as f64;
    ((1.0 - dl) * (1.0 - ds), dl, ds)
}

/// Unconstrained least squares through Gaussian elimination on the normal
/// equations, with partial pivoting. `columns[j]` is column `j` of `A`.
pub fn least_squares(columns: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = columns.len();
    let mut m = vec![vec![0.0; n + 1]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = columns[i].iter().zip(&columns[j]).map(|(x, y)| x * y).sum();
        }
        m[i][n] = columns[i].iter().zip(b).map(|(x, y)| x * y).sum();
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&r, &s| m[r][col].abs().total_cmp(&m[s][col].abs())).unwrap();
        m.swap(col, pivot);
        if m[col][col].abs() < 1e-300 {
            continue;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                let pivot_row = m[col].clone();
                for (v, p) in m[r].iter_mut().zip(&pivot_row).skip(col) {
                    *v -= f * p;
                }
            }
        }
    }
    (0..n).map(|i| if m[i][i].abs() < 1e-300 { 0.0 } else { m[i][n] / m[i][i] }).collect()
}

pub fn residual(columns: &[Vec<f64>], x: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for p in 0..b.len() {
        let mut v = -b[p];
        for j in 0..columns.len() {
            v += x[j] * columns[j][p];
        }
        s += v * v;
    }
    s.sqrt()
}

/// Largest violation of the non-negative least-squares optimality conditions.
pub fn kkt_violation(columns: &[Vec<f64>], x: &[f64], b: &[f64]) -> f64 {
    let mut r = b.to_vec();
    for p in 0..b.len() {
        for j in 0..columns.len() {
            r[p] -= x[j] * columns[j][p];
        }
    }
    let mut worst: f64 = 0.0;
    for j in 0..columns.len() {
        let g: f64 = columns[j].iter().zip(&r).map(|(a, e)| a * e).sum();
        worst = worst.max(if x[j] > 0.0 { g.abs() } else { g.max(0.0) });
        worst = worst.max((-x[j]).max(0.0));
    }
    worst
}
