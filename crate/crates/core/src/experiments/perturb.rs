//! Random parameter perturbation and path truncation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::model::NetworkModel;

const PAIR_ATTEMPTS: usize = 100;
const POSITIVE_ATTEMPTS: usize = 1000;

/// One draw of `max(N(y, (y/3)^2), 0)`.
pub fn perturb_value<R: rand::Rng>(rng: &mut R, y: f64) -> f64 {
    if y == 0.0 || !y.is_finite() {
        return y;
    }
    let normal = Normal::new(y, y.abs() / 3.0).expect("finite mean and positive deviation");
    normal.sample(rng).max(0.0)
}

fn perturb_positive<R: rand::Rng>(rng: &mut R, y: f64) -> f64 {
    for _ in 0..POSITIVE_ATTEMPTS {
        let v = perturb_value(rng, y);
        if v > 0.0 {
            return v;
        }
    }
    y
}

/// Replaces every numeric parameter `y` by an independent draw of
/// `max(N(y, y^2/9), 0)`. Revenue and fixed per-unit cost are redrawn
/// together until revenue covers the cost, and after 100 failed attempts
/// the cost is set to the revenue. Valuation weights are redrawn until
/// positive. Structure and attribute bounds are unchanged.
pub fn perturb(model: &NetworkModel, seed: u64) -> NetworkModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = model.clone();
    for isp in out.isps.iter_mut() {
        let (rho, phi0) = (isp.rho, isp.phi0);
        let mut pair = (perturb_value(&mut rng, rho), perturb_value(&mut rng, phi0));
        let mut attempts = 1;
        while pair.0 < pair.1 && attempts < PAIR_ATTEMPTS {
            pair = (perturb_value(&mut rng, rho), perturb_value(&mut rng, phi0));
            attempts += 1;
        }
        isp.rho = pair.0;
        isp.phi0 = pair.1.min(pair.0);
        for v in isp.phi.iter_mut().chain(isp.gamma.iter_mut()) {
            *v = perturb_value(&mut rng, *v);
        }
        isp.gamma0 = perturb_value(&mut rng, isp.gamma0);
    }
    for path in out.paths.iter_mut() {
        path.base_valuation = perturb_value(&mut rng, path.base_valuation);
        for row in path.valuation_coeffs.iter_mut() {
            for c in row.iter_mut() {
                *c = perturb_positive(&mut rng, *c);
            }
        }
    }
    for market in out.markets.iter_mut() {
        market.demand_limit = perturb_value(&mut rng, market.demand_limit);
    }
    out
}

/// Keeps the first `k` paths of every market.
pub fn truncate_paths(model: &NetworkModel, k: usize) -> NetworkModel {
    let mut out = model.clone();
    for market in out.markets.iter_mut() {
        market.paths.truncate(k.max(1));
    }
    out
}
