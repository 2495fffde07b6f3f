//! Cross-module consistency checks.

use regfall::cz_local::{assemble_ls, Sym2, SymmetricPath};
use regfall::hamiltonian::{cz_index, ham_hessian_matrix, ham_spectrum_numeric};
use regfall::lagrangian::amplitude;

/// Away from the special mode, the phase-space Hessian at `(x_k, y_k)` is
/// the constant-symbol local operator with `S = -diag(4/c^4, 1/(2c^2))`;
/// the non-local terms only touch the mode-k block. The two assembly
/// paths (operator application vs symbol multiplication) must agree
/// entrywise there.
#[test]
fn ham_hessian_local_part_matches_constant_symbol_operator() {
    for k in [1usize, 2] {
        let n_modes = 2 * k + 3;
        let c = amplitude(k);
        let s = Sym2 {
            s11: -4.0 / c.powi(4),
            s12: 0.0,
            s22: -1.0 / (2.0 * c * c),
        };
        let (local, _) = assemble_ls(&SymmetricPath::constant(s), n_modes);
        let (ham, _) = ham_hessian_matrix(k, n_modes).unwrap();
        assert_eq!(local.dim(), ham.dim());

        // slots of the mode-k block in the interleaved pair layout
        let base = 2 + 4 * (k - 1);
        let special: Vec<usize> = (base..base + 4).collect();
        let scale = ham.max_abs();
        for i in 0..ham.dim() {
            for j in 0..ham.dim() {
                if special.contains(&i) || special.contains(&j) {
                    continue;
                }
                let d = (local.get(i, j) - ham.get(i, j)).abs();
                assert!(
                    d <= 1e-12 * scale,
                    "k = {k}: entry ({i},{j}) differs by {d:e}"
                );
            }
        }
    }
}

/// The index data recomputed from the numeric spectrum alone (eigenvalues,
/// multiplicities and windings of the truncated Hessian) reproduces the
/// closed-form index report.
#[test]
fn index_recomputed_from_numeric_spectrum() {
    for k in 1..=3usize {
        let entries = ham_spectrum_numeric(k, 3 * k + 2).unwrap();
        let scale = entries.iter().fold(0.0f64, |m, e| m.max(e.lambda.abs()));
        let tol = 1e-9 * scale;
        let alpha = entries
            .iter()
            .filter(|e| e.lambda < -tol)
            .map(|e| e.winding)
            .max()
            .unwrap();
        let achieving: Vec<_> = entries.iter().filter(|e| e.winding == alpha).collect();
        let count: usize = achieving.iter().map(|e| e.multiplicity).sum();
        assert_eq!(count, 2, "k = {k}");
        let parity: u8 = if achieving.iter().any(|e| e.lambda > tol) {
            0
        } else {
            1
        };
        let report = cz_index(k).unwrap();
        assert_eq!(alpha, report.alpha_s, "k = {k}");
        assert_eq!(parity, report.parity, "k = {k}");
        assert_eq!(-(2 * alpha + parity as i64), report.morse, "k = {k}");
    }
}
