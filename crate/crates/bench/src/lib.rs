//! Fixtures shared by the resolvent benchmarks.

use std::f64::consts::PI;

use accretive::operators::{
    Laplace, LaplaceSpec, PLaplace, PLaplaceSpec, TransportBirth, TransportBirthSpec, TransportNorm,
};
use accretive::GridFunction;

pub fn laplace_1d(nodes: usize) -> (Laplace, GridFunction) {
    let op = Laplace::new(LaplaceSpec::interval(1.0, nodes).expect("valid interval")).expect("valid operator");
    let g = op.sample(|p| (PI * p[0]).sin() + 0.3 * (5.0 * PI * p[0]).sin());
    (op, g)
}

pub fn laplace_2d(nodes: usize) -> (Laplace, GridFunction) {
    let op =
        Laplace::new(LaplaceSpec::rectangle(1.0, 1.0, nodes, nodes).expect("valid rectangle")).expect("valid operator");
    let g = op.sample(|p| (PI * p[0]).sin() * (PI * p[1]).sin());
    (op, g)
}

pub fn plaplace(p: f64, interior: usize) -> (PLaplace, GridFunction) {
    let op = PLaplace::new(PLaplaceSpec::new(p, 1.0, interior)).expect("valid operator");
    let g = op.sample(|x| (PI * x).sin());
    (op, g)
}

pub fn transport(nodes: usize) -> (TransportBirth, GridFunction) {
    let op = TransportBirth::new(TransportBirthSpec {
        age_horizon: 2.0,
        nodes,
        beta: vec![0.25; nodes],
        variant: TransportNorm::Sup,
    })
    .expect("admissible birth rate");
    let g = op.sample(|a| (-a).exp());
    (op, g)
}
