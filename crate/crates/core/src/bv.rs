//! Total-variation growth bound for the instantaneous model in the weakly
//! coupled regime `gamma * |n0|_1 < 1`.

use crate::hazard::HazardNorms;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvConstants {
    pub c1: f64,
    pub c2: f64,
}

/// `C1 = p_sup / (1 - gamma m)` and
/// `C2 = K + p_sup C1 m + p_sup n_sup` with `K = |d_s p|_inf m`, or
/// `K = p_sup n_sup` when the rate jumps in age. `None` outside the regime.
pub fn tv_constants(norms: &HazardNorms, mass0: f64, n0_sup: f64) -> Option<TvConstants> {
    let coupling = norms.gamma.max(0.0) * mass0;
    if !(coupling < 1.0) || !norms.p_sup.is_finite() {
        return None;
    }
    let c1 = norms.p_sup / (1.0 - coupling);
    let age_term = if norms.dsp_sup.is_finite() {
        norms.dsp_sup * mass0
    } else {
        norms.p_sup * n0_sup
    };
    let c2 = age_term + norms.p_sup * c1 * mass0 + norms.p_sup * n0_sup;
    Some(TvConstants { c1, c2 })
}

/// `e^{C1 t} TV0 + C2 (e^{C1 t} - 1)`.
pub fn tv_bound(k: &TvConstants, tv0: f64, t: f64) -> f64 {
    let g = (k.c1 * t).exp();
    g * tv0 + k.c2 * (g - 1.0)
}
