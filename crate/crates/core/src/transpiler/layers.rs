use crate::circuit::{Circuit, GateKind};

/// ASAP layering by gate id.
///
/// A gate lands in the earliest layer after every earlier gate on its qubits.
/// A barrier (any width) closes all open layers and is itself not placed.
pub fn layerize(circuit: &Circuit) -> Vec<Vec<usize>> {
    let mut free = vec![0usize; circuit.n_qubits];
    let mut floor = 0usize;
    let mut layers: Vec<Vec<usize>> = Vec::new();
    for g in &circuit.gates {
        if g.kind == GateKind::Barrier {
            floor = free.iter().copied().fold(floor, usize::max);
            continue;
        }
        let layer = g.qubits.iter().map(|&q| free[q]).fold(floor, usize::max);
        if layers.len() <= layer {
            layers.resize_with(layer + 1, Vec::new);
        }
        layers[layer].push(g.id);
        for &q in &g.qubits {
            free[q] = layer + 1;
        }
    }
    layers
}
