//! Multiplicative parameter noise `p̂ = μ (1 + ε)`, `ε ~ U(−δ, δ)`.

use rand::Rng;

use crate::model::params::{ParamValues, ParameterSet};

/// Draws one set of multipliers `1 + ε` for the randomized parameters of `set`,
/// writing them to `multipliers` (same order as `set.randomized()`) and the
/// perturbed values to `out`. Non-randomized parameters keep their nominal values.
///
/// One uniform draw is consumed per randomized parameter regardless of δ, so
/// the random stream does not depend on the uncertainty level.
pub fn sample_into<R: Rng + ?Sized>(set: &ParameterSet, rng: &mut R, out: &mut ParamValues, multipliers: &mut [f64]) {
    debug_assert_eq!(multipliers.len(), set.randomized().len());
    *out = *set.values();
    let delta = set.delta();
    for (m, &p) in multipliers.iter_mut().zip(set.randomized()) {
        let eps = delta * (2.0 * rng.random::<f64>() - 1.0);
        *m = 1.0 + eps;
        out[p] = set.values()[p] * *m;
    }
}

/// Returns a copy of `set` whose values are one draw of the randomized parameters.
/// δ stays attached; the returned values are strictly positive since δ < 1.
pub fn sample_parameters<R: Rng + ?Sized>(set: &ParameterSet, rng: &mut R) -> ParameterSet {
    let mut values = *set.values();
    let mut multipliers = alloc::vec![0.0; set.randomized().len()];
    sample_into(set, rng, &mut values, &mut multipliers);
    ParameterSet::new(values, set.randomized(), set.delta()).expect("perturbed values stay positive")
}
