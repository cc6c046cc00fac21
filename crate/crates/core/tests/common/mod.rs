//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use fswe::spectral::{lambda, ModalVector, SineBasis};
use fswe::stepper::{drift_modal, Drift, PairState};
use fswe::ModalFbmEnsemble;

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

/// Direct (non-iterative) evaluation of the accumulated recursion:
///
/// u_{n+1} = C(t_{n+1})u0 + A^{-α/2}S(t_{n+1})v0 + Σ_j τ A^{-α/2}S(t_{n+1}−t_j) f(u_j)
///           + Σ_j ∫_{t_j}^{t_{j+1}} C(t_{n+1}−r) dr B(t_j)
/// ū_{n+1} = −A^{α/2}S(t_{n+1})u0 + C(t_{n+1})v0 + Σ_j τ C(t_{n+1}−t_j) f(u_j)
///           + B(t_{n+1}) − Σ_j ∫_{t_j}^{t_{j+1}} A^{α/2}S(t_{n+1}−r) dr B(t_j)
///
/// Returns every state `n = 0..=N`.
pub fn closed_recursion(
    basis: &SineBasis,
    alpha: f64,
    tau: f64,
    steps: usize,
    drift: Drift,
    ensemble: &ModalFbmEnsemble,
    initial: &PairState,
) -> Vec<PairState> {
    let m = basis.modes();
    let omega: Vec<f64> = (1..=m).map(|i| lambda(i).powf(0.5 * alpha)).collect();
    let b: Vec<ModalVector> = (0..=steps).map(|j| ensemble.field_at(j).unwrap()).collect();
    let mut states = vec![initial.clone()];
    let mut forces: Vec<ModalVector> = Vec::new();
    for n in 0..steps {
        forces.push(drift_modal(basis, &states[n].u, drift).unwrap());
        let t_next = (n + 1) as f64 * tau;
        let mut u = vec![0.0; m];
        let mut v = vec![0.0; m];
        for k in 0..m {
            let w = omega[k];
            let (u0, v0) = (initial.u.coeffs()[k], initial.v.coeffs()[k]);
            u[k] = (w * t_next).cos() * u0 + (w * t_next).sin() / w * v0;
            v[k] = -w * (w * t_next).sin() * u0 + (w * t_next).cos() * v0 + b[n + 1].coeffs()[k];
            for j in 0..=n {
                let tj = j as f64 * tau;
                let tj1 = (j + 1) as f64 * tau;
                let fj = forces[j].coeffs()[k];
                let bj = b[j].coeffs()[k];
                u[k] += tau * (w * (t_next - tj)).sin() / w * fj;
                v[k] += tau * (w * (t_next - tj)).cos() * fj;
                // ∫ cos(w(t−r)) dr and ∫ w sin(w(t−r)) dr over [t_j, t_{j+1}]
                let int_c = ((w * (t_next - tj)).sin() - (w * (t_next - tj1)).sin()) / w;
                let int_s = (w * (t_next - tj1)).cos() - (w * (t_next - tj)).cos();
                u[k] += int_c * bj;
                v[k] -= int_s * bj;
            }
        }
        states.push(PairState::new(ModalVector::from_coeffs(u), ModalVector::from_coeffs(v)).unwrap());
    }
    states
}
