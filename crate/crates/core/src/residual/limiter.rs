use crate::basis::MAX_LOCAL;
use crate::law::ConservationLaw;

/// Output of the positive-part limiter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limited {
    pub beta: [f64; MAX_LOCAL],
    pub values: [f64; MAX_LOCAL],
    /// The total was below the threshold; nothing was distributed.
    pub bypassed: bool,
}

/// `beta_i = max(0, x_i) / sum max(0, x_j)` with `x_i = low_i / total`.
pub fn beta_limiter(low: &[f64], total: f64, threshold: f64) -> Limited {
    let mut out = Limited {
        beta: [0.0; MAX_LOCAL],
        values: [0.0; MAX_LOCAL],
        bypassed: total.abs() <= threshold,
    };
    if out.bypassed {
        return out;
    }
    let mut positive = [0.0; MAX_LOCAL];
    for (p, &l) in positive.iter_mut().zip(low) {
        *p = (l / total).max(0.0);
    }
    let sum: f64 = positive.iter().sum();
    for (i, p) in positive.iter().enumerate().take(low.len()) {
        out.beta[i] = p / sum;
        out.values[i] = out.beta[i] * total;
    }
    out
}

/// `1e-14 (1 + max |f(u_i)| h)`.
pub fn limiter_threshold(law: &ConservationLaw, u: &[f64], h: f64) -> f64 {
    let fmax = u.iter().map(|&v| law.flux(v).max_abs()).fold(0.0, f64::max);
    1e-14 * (1.0 + fmax * h)
}
