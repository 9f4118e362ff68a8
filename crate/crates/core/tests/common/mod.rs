#![allow(dead_code)]

use epipolicy::Dominance;

pub const RHO: f64 = 0.04;
pub const S0: f64 = 0.96;

/// One printed line of the reference comparison table.
#[derive(Debug, Clone, Copy)]
pub struct Reference {
    pub alpha: f64,
    pub delta: f64,
    pub prev_tau0: f64,
    pub prev_taubar: f64,
    pub prev_cost: f64,
    pub treat_tau0: f64,
    pub treat_cost: f64,
    pub bold: Dominance,
}

#[allow(clippy::too_many_arguments)]
const fn r(
    alpha: f64,
    delta: f64,
    prev_tau0: f64,
    prev_taubar: f64,
    prev_cost: f64,
    treat_tau0: f64,
    treat_cost: f64,
    bold: Dominance,
) -> Reference {
    Reference {
        alpha,
        delta,
        prev_tau0,
        prev_taubar,
        prev_cost,
        treat_tau0,
        treat_cost,
        bold,
    }
}

use Dominance::{PreventionDominates as P, TreatmentDominates as T};

pub const REFERENCE: [Reference; 15] = [
    r(0.2, 0.185, 0.8643, 0.950, 0.0077, 0.0357, 0.0081, P),
    r(0.2, 0.2, 0.7074, 0.800, 0.0071, 0.0299, 0.0070, T),
    r(0.2, 0.26, 0.0783, 0.200, 0.0046, 0.0134, 0.0041, T),
    r(0.3, 0.281, 0.9096, 0.993, 0.0053, 0.0377, 0.0055, P),
    r(0.3, 0.3, 0.7774, 0.867, 0.0049, 0.07139, 0.0048, T),
    r(0.3, 0.4, 0.0801, 0.200, 0.0031, 0.0535, 0.0027, T),
    r(0.4, 0.381, 0.9114, 0.995, 0.0040, 0.0379, 0.0041, P),
    r(0.4, 0.4, 0.8123, 0.900, 0.0038, 0.0727, 0.0037, T),
    r(0.4, 0.5, 0.2902, 0.400, 0.0027, 0.0582, 0.0024, T),
    r(0.5, 0.485, 0.8958, 0.980, 0.0031, 0.0758, 0.0032, P),
    r(0.5, 0.5, 0.8333, 0.920, 0.002976387, 0.0736, 0.002975999, T),
    r(0.5, 0.6, 0.416, 0.520, 0.0023, 0.06129, 0.0021, T),
    r(0.6, 0.585, 0.8993, 0.983, 0.00261, 0.0760, 0.00263, P),
    r(0.6, 0.6, 0.8471, 0.933, 0.0026, 0.0355, 0.0025, T),
    r(0.6, 0.8, 0.1515, 0.267, 0.0016, 0.0162, 0.0014, T),
];
