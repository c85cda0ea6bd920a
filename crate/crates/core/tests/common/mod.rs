//! Test-only reference implementations.

#![allow(dead_code)]

/// Even power series `u(t) = a0 + a2 t^2 + a4 t^4 + a6 t^6` of the regular
/// solution of `t u'' + H(t) u' + t g(u) = 0` with `u(0) = alpha`, where
/// `H(t) = t h(t) = H0 + H2 t^2 + H4 t^4 + ...`, built by the coefficient
/// recurrence
/// `2j (2j - 1 + H0) a_2j = -c_(2j-2) - sum_(i=1..j-1) H_2i 2(j-i) a_(2j-2i)`
/// with `g(u(t)) = c0 + c2 t^2 + c4 t^4 + ...`.
#[derive(Debug, Clone, Copy)]
pub struct SeriesOracle {
    pub a: [f64; 4],
}

impl SeriesOracle {
    pub fn new(alpha: f64, h: [f64; 3], lambda: f64, q: f64) -> Self {
        let g0 = lambda * alpha * (alpha.abs().powf(q - 1.0) - 1.0);
        let g1 = lambda * (q * alpha.abs().powf(q - 1.0) - 1.0);
        let g2 = lambda * q * (q - 1.0) * alpha.abs().powf(q - 3.0) * alpha;
        let [h0, h2, h4] = h;

        let a2 = -g0 / (2.0 * (1.0 + h0));
        let c2 = g1 * a2;
        let a4 = -(c2 + h2 * 2.0 * a2) / (4.0 * (3.0 + h0));
        let c4 = g1 * a4 + 0.5 * g2 * a2 * a2;
        let a6 = -(c4 + h2 * 4.0 * a4 + h4 * 2.0 * a2) / (6.0 * (5.0 + h0));
        Self {
            a: [alpha, a2, a4, a6],
        }
    }

    pub fn eval(&self, t: f64) -> (f64, f64) {
        let [a0, a2, a4, a6] = self.a;
        let t2 = t * t;
        let u = a0 + t2 * (a2 + t2 * (a4 + t2 * a6));
        let up = t * (2.0 * a2 + t2 * (4.0 * a4 + t2 * 6.0 * a6));
        (u, up)
    }
}

/// `t h(t)` coefficients `[H0, H2, H4]` of the model profile
/// `H0 s cot(s t) - Hd s tan(s t)`, `s = pi / (2d)`, from
/// `x cot x = 1 - x^2/3 - x^4/45` and `x tan x = x^2 + x^4/3`.
pub fn model_h_coeffs(h0: f64, hd: f64, d: f64) -> [f64; 3] {
    let s = std::f64::consts::PI / (2.0 * d);
    let s2 = s * s;
    [h0, s2 * (-h0 / 3.0 - hd), s2 * s2 * (-h0 / 45.0 - hd / 3.0)]
}

/// Observed convergence orders between consecutive entries of an error
/// ladder with halving step.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}
