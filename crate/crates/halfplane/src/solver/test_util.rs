//! Shared helpers for the operator unit tests: dense stiffness assembly via
//! unit vectors, symmetry and positive-semidefiniteness checks, and a tiny
//! deterministic generator for random-looking fields.

use super::WaveField;

/// Deterministic pseudo-random field with entries in (-0.5, 0.5); Dirichlet
/// row included (callers zero it when needed).
pub(crate) fn lcg_field(nx: usize, n: usize, seed: u64) -> WaveField {
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1);
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64) / (1u64 << 53) as f64 - 0.5
    };
    let len = nx * n;
    WaveField { u: (0..len).map(|_| next()).collect(), v: (0..len).map(|_| next()).collect() }
}

/// Assembles the dense stiffness restricted to active rows (i < nx-1, zero
/// Dirichlet row) from a force closure and asserts it is symmetric.
pub(crate) fn assert_dense_symmetric<F>(nx: usize, n: usize, mut force: F)
where
    F: FnMut(&WaveField, &mut WaveField),
{
    let active = (nx - 1) * n;
    let dim = 2 * active;
    let len = nx * n;
    let mut k = vec![vec![0.0f64; dim]; dim];
    let mut w = WaveField { u: vec![0.0; len], v: vec![0.0; len] };
    let mut out = WaveField { u: vec![0.0; len], v: vec![0.0; len] };
    for col in 0..dim {
        if col < active {
            w.u[col] = 1.0;
        } else {
            w.v[col - active] = 1.0;
        }
        force(&w, &mut out);
        for row in 0..active {
            k[row][col] = -out.u[row];
            k[active + row][col] = -out.v[row];
        }
        if col < active {
            w.u[col] = 0.0;
        } else {
            w.v[col - active] = 0.0;
        }
    }
    let scale = k
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, &x| acc.max(x.abs()))
        .max(1e-300);
    for a in 0..dim {
        for b in 0..a {
            let diff = (k[a][b] - k[b][a]).abs();
            assert!(diff <= 1e-12 * scale, "K[{a}][{b}] = {} vs K[{b}][{a}] = {}", k[a][b], k[b][a]);
        }
    }
}

/// Checks w'Kw >= 0 (up to roundoff) on pseudo-random active-DOF vectors.
pub(crate) fn assert_psd<F>(nx: usize, n: usize, seed: u64, mut force: F)
where
    F: FnMut(&WaveField, &mut WaveField),
{
    let active = (nx - 1) * n;
    let len = nx * n;
    let mut out = WaveField { u: vec![0.0; len], v: vec![0.0; len] };
    for trial in 0..8 {
        let mut w = lcg_field(nx, n, seed + trial);
        for j in (nx - 1) * n..len {
            w.u[j] = 0.0;
            w.v[j] = 0.0;
        }
        force(&w, &mut out);
        // w'Kw = -w.force
        let mut quad = 0.0;
        let mut norm2 = 0.0;
        for i in 0..active {
            quad -= w.u[i] * out.u[i] + w.v[i] * out.v[i];
            norm2 += w.u[i] * w.u[i] + w.v[i] * w.v[i];
        }
        assert!(quad >= -1e-10 * norm2.max(1.0), "indefinite: w'Kw = {quad} on trial {trial}");
    }
}
