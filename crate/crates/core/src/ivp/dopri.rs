//! Dormand–Prince 5(4) stepping for planar systems, with the standard
//! fourth-order continuous extension.

pub type Vec2 = [f64; 2];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[inline]
fn axpy(y: Vec2, terms: &[(f64, Vec2)], h: f64) -> Vec2 {
    let mut out = y;
    for &(c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// One attempted step from `(t, y)` with signed size `h`.
#[derive(Debug, Clone, Copy)]
pub struct Step {
    pub t: f64,
    pub h: f64,
    pub y0: Vec2,
    pub y1: Vec2,
    /// Derivative at the new point (first stage of the next step).
    pub k7: Vec2,
    pub err: Vec2,
    dense: [Vec2; 5],
}

impl Step {
    /// Continuous extension at `theta` in `[0, 1]`.
    pub fn dense(&self, theta: f64) -> Vec2 {
        let th1 = 1.0 - theta;
        let r = &self.dense;
        let mut out = [0.0; 2];
        for i in 0..2 {
            out[i] = r[0][i]
                + theta * (r[1][i] + th1 * (r[2][i] + theta * (r[3][i] + th1 * r[4][i])));
        }
        out
    }

    /// Weighted RMS error norm against `atol + rtol * max(|y0|, |y1|)`.
    pub fn error_norm(&self, atol: f64, rtol: f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..2 {
            let scale = atol + rtol * self.y0[i].abs().max(self.y1[i].abs());
            let r = self.err[i] / scale;
            acc += r * r;
        }
        (acc / 2.0).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.y1.iter().chain(self.err.iter()).all(|v| v.is_finite())
    }
}

pub fn step<F>(f: &F, t: f64, y: Vec2, k1: Vec2, h: f64) -> Step
where
    F: Fn(f64, Vec2) -> Vec2,
{
    let k2 = f(t + C2 * h, axpy(y, &[(A21, k1)], h));
    let k3 = f(t + C3 * h, axpy(y, &[(A31, k1), (A32, k2)], h));
    let k4 = f(t + C4 * h, axpy(y, &[(A41, k1), (A42, k2), (A43, k3)], h));
    let k5 = f(
        t + C5 * h,
        axpy(y, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)], h),
    );
    let k6 = f(
        t + h,
        axpy(y, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)], h),
    );
    let y1 = axpy(y, &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)], h);
    let k7 = f(t + h, y1);

    let mut err = [0.0; 2];
    let mut dense = [[0.0; 2]; 5];
    for i in 0..2 {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let ydiff = y1[i] - y[i];
        let bspl = h * k1[i] - ydiff;
        dense[0][i] = y[i];
        dense[1][i] = ydiff;
        dense[2][i] = bspl;
        dense[3][i] = ydiff - h * k7[i] - bspl;
        dense[4][i] =
            h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    Step {
        t,
        h,
        y0: y,
        y1,
        k7,
        err,
        dense,
    }
}

/// Hairer–Wanner starting step heuristic.
pub fn initial_step<F>(f: &F, t: f64, y: Vec2, k1: Vec2, span: f64, atol: f64, rtol: f64) -> f64
where
    F: Fn(f64, Vec2) -> Vec2,
{
    let dir = span.signum();
    let norm = |v: Vec2, w: Vec2| -> f64 {
        let mut acc = 0.0;
        for i in 0..2 {
            let s = atol + rtol * w[i].abs();
            acc += (v[i] / s).powi(2);
        }
        (acc / 2.0).sqrt()
    };
    let d0 = norm(y, y);
    let d1 = norm(k1, y);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(span.abs());
    let y1 = axpy(y, &[(1.0, k1)], dir * h0);
    let k2 = f(t + dir * h0, y1);
    let d2 = norm([k2[0] - k1[0], k2[1] - k1[1]], y) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1).min(span.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(_t: f64, y: Vec2) -> Vec2 {
        [y[1], -y[0]]
    }

    #[test]
    fn fifth_order_convergence() {
        let errs: Vec<f64> = [0.1f64, 0.05, 0.025]
            .iter()
            .map(|&h| {
                let mut y = [1.0, 0.0];
                let mut t = 0.0;
                let n = (1.0 / h).round() as usize;
                for _ in 0..n {
                    let s = step(&harmonic, t, y, harmonic(t, y), h);
                    y = s.y1;
                    t += h;
                }
                (y[0] - 1f64.cos()).abs()
            })
            .collect();
        let order = (errs[1] / errs[2]).log2();
        assert!(order > 4.7 && order < 5.5, "observed order {order}");
    }

    #[test]
    fn dense_output_interpolates_endpoints_and_interior() {
        let y = [1.0, 0.0];
        let s = step(&harmonic, 0.0, y, harmonic(0.0, y), 0.02);
        assert_eq!(s.dense(0.0), y);
        let end = s.dense(1.0);
        assert!((end[0] - s.y1[0]).abs() < 1e-15);
        let mid = s.dense(0.5);
        assert!((mid[0] - 0.01f64.cos()).abs() < 1e-11);
        assert!((mid[1] + 0.01f64.sin()).abs() < 1e-11);
    }

    #[test]
    fn backward_steps() {
        let y = [1.0f64.cos(), -1.0f64.sin()];
        let s = step(&harmonic, 1.0, y, harmonic(1.0, y), -0.01);
        assert!((s.y1[0] - 0.99f64.cos()).abs() < 1e-13);
    }
}
