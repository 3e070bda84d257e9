//! Real-coded variation: simulated binary crossover, polynomial mutation,
//! and the repair that keeps genomes feasible.

use rand::Rng as _;

use crate::seed::Rng;

/// Per-gene `[low, high]` box.
pub type Bounds = [(f64, f64)];

/// Clamps every gene into its bounds.
pub fn clamp(genes: &mut [f64], bounds: &Bounds) {
    for (g, &(lo, hi)) in genes.iter_mut().zip(bounds) {
        *g = if g.is_nan() { lo } else { g.clamp(lo, hi) };
    }
}

/// Rescales `block` onto the unit simplex; an all-zero block becomes
/// uniform.
pub fn project_to_simplex(block: &mut [f64]) {
    let sum: f64 = block.iter().sum();
    if sum > 0.0 {
        for g in block.iter_mut() {
            *g /= sum;
        }
    } else {
        let uniform = 1.0 / block.len() as f64;
        block.fill(uniform);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SbxParams {
    /// Distribution index.
    pub eta: f64,
    /// Probability that a parent pair recombines at all.
    pub probability: f64,
}

impl Default for SbxParams {
    fn default() -> Self {
        SbxParams {
            eta: 20.0,
            probability: 0.9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct MutationParams {
    pub eta: f64,
    /// Per-gene mutation probability; `None` means `1 / genes`.
    pub probability: Option<f64>,
}

impl Default for MutationParams {
    fn default() -> Self {
        MutationParams {
            eta: 20.0,
            probability: None,
        }
    }
}

impl MutationParams {
    pub fn rate(&self, genes: usize) -> f64 {
        self.probability.unwrap_or(1.0 / genes.max(1) as f64)
    }
}

/// Spread factor of SBX for the uniform draw `u`.
pub fn sbx_beta(u: f64, eta: f64) -> f64 {
    let exponent = 1.0 / (eta + 1.0);
    if u <= 0.5 {
        (2.0 * u).powf(exponent)
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(exponent)
    }
}

/// Recombines one gene pair. The children's midpoint equals the parents'.
pub fn sbx_gene(p1: f64, p2: f64, u: f64, eta: f64) -> (f64, f64) {
    let beta = sbx_beta(u, eta);
    (
        0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2),
        0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2),
    )
}

/// Simulated binary crossover. With probability `params.probability` the
/// pair recombines, and then each gene is recombined with probability 0.5.
/// Children are clamped but not otherwise repaired.
pub fn sbx_crossover(
    p1: &[f64],
    p2: &[f64],
    bounds: &Bounds,
    params: SbxParams,
    rng: &mut Rng,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    if rng.random::<f64>() < params.probability {
        for i in 0..c1.len() {
            if rng.random::<f64>() < 0.5 && (p1[i] - p2[i]).abs() > 1e-14 {
                let u: f64 = rng.random();
                let (a, b) = sbx_gene(p1[i], p2[i], u, params.eta);
                // Swapping children per gene keeps both parents' traits mixed.
                if rng.random::<f64>() < 0.5 {
                    c1[i] = b;
                    c2[i] = a;
                } else {
                    c1[i] = a;
                    c2[i] = b;
                }
            }
        }
    }
    clamp(&mut c1, bounds);
    clamp(&mut c2, bounds);
    (c1, c2)
}

/// Bounded polynomial perturbation of one gene for the uniform draw `u`.
pub fn polynomial_gene(y: f64, lo: f64, hi: f64, u: f64, eta: f64) -> f64 {
    let span = hi - lo;
    if span <= 0.0 {
        return lo;
    }
    let d1 = (y - lo) / span;
    let d2 = (hi - y) / span;
    let power = 1.0 / (eta + 1.0);
    let delta = if u < 0.5 {
        let val = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1).powf(eta + 1.0);
        val.powf(power) - 1.0
    } else {
        let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2).powf(eta + 1.0);
        1.0 - val.powf(power)
    };
    (y + delta * span).clamp(lo, hi)
}

/// Polynomial mutation of each gene with probability `rate`.
pub fn polynomial_mutation(genes: &mut [f64], bounds: &Bounds, eta: f64, rate: f64, rng: &mut Rng) {
    for (g, &(lo, hi)) in genes.iter_mut().zip(bounds) {
        if rng.random::<f64>() < rate {
            let u: f64 = rng.random();
            *g = polynomial_gene(*g, lo, hi, u, eta);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    #[test]
    fn beta_is_one_at_midpoint() {
        assert_eq!(sbx_beta(0.5, 20.0), 1.0);
        assert_eq!(sbx_gene(0.2, 0.7, 0.5, 20.0), (0.2, 0.7));
    }

    #[test]
    fn zero_crossover_probability_copies_parents() {
        let mut rng = seed::rng(1);
        let bounds = [(0.0, 1.0); 4];
        let p1 = [0.1, 0.2, 0.3, 0.4];
        let p2 = [0.9, 0.8, 0.7, 0.6];
        let params = SbxParams {
            eta: 20.0,
            probability: 0.0,
        };
        let (c1, c2) = sbx_crossover(&p1, &p2, &bounds, params, &mut rng);
        assert_eq!((c1.as_slice(), c2.as_slice()), (&p1[..], &p2[..]));
    }

    #[test]
    fn mutation_midpoint_and_zero_rate() {
        assert_eq!(polynomial_gene(0.3, 0.0, 1.0, 0.5, 20.0), 0.3);
        let mut rng = seed::rng(2);
        let mut g = vec![0.1, 0.5, 0.9];
        polynomial_mutation(&mut g, &[(0.0, 1.0); 3], 20.0, 0.0, &mut rng);
        assert_eq!(g, vec![0.1, 0.5, 0.9]);
    }

    #[test]
    fn simplex_projection() {
        let mut b = [1.0; 5];
        project_to_simplex(&mut b);
        assert_eq!(b, [0.2; 5]);
        let mut z = [0.0; 5];
        project_to_simplex(&mut z);
        assert_eq!(z, [0.2; 5]);
    }
}
