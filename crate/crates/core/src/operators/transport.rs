//! Multiplication by v_j in the Hermite basis.

use nalgebra::DMatrix;

use crate::basis::BasisSpec;

/// (V_j)_{αβ} = ⟨v_j ψ_β, ψ_α⟩ from v_j p_β = √(β_j+1) p_{β+e_j} + √β_j p_{β−e_j},
/// truncated to degree ≤ K.
pub fn transport_matrices(spec: &BasisSpec) -> [DMatrix<f64>; 3] {
    let n = spec.dim();
    let mut out = [DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n)];
    for (b, beta) in spec.alphas().iter().enumerate() {
        for (j, m) in out.iter_mut().enumerate() {
            let mut up = *beta;
            up[j] += 1;
            if let Some(a) = spec.index(up) {
                m[(a, b)] = ((beta[j] + 1) as f64).sqrt();
            }
            if beta[j] > 0 {
                let mut down = *beta;
                down[j] -= 1;
                let a = spec.index(down).unwrap();
                m[(a, b)] = (beta[j] as f64).sqrt();
            }
        }
    }
    out
}

/// Symbol of the transported operator at wave vector k: k·V.
pub fn transport_along(spec: &BasisSpec, k: [f64; 3]) -> DMatrix<f64> {
    let v = transport_matrices(spec);
    &v[0] * k[0] + &v[1] * k[1] + &v[2] * k[2]
}
