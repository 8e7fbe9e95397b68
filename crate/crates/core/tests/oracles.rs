use approx::assert_relative_eq;
use twospectra::direct::{spectra_pair, Status};
use twospectra::inverse::{self, InverseInput, ZeroCaseHint};
use twospectra::mass_spring::{chain_to_jacobi, jacobi_to_chain, MassSpringChain};
use twospectra::{tridiag, JacobiMatrix, Shift, SpectralMeasure, Theta};

fn jm(q: &[f64], b: &[f64]) -> JacobiMatrix {
    JacobiMatrix::from_f64(q, b).unwrap()
}

#[test]
fn uniform_chain_spectrum_is_a_cosine_ladder() {
    let n = 12;
    let j = jm(&vec![-2.0; n], &vec![1.0; n - 1]);
    let eig = tridiag::eigen(&j).unwrap();
    let h = std::f64::consts::PI / (n as f64 + 1.0);
    for (i, lam) in eig.eigenvalues.iter().enumerate() {
        let k = (n - i) as f64;
        assert_relative_eq!(*lam, -2.0 + 2.0 * (k * h).cos(), epsilon = 1e-13);
    }
    // First components of the eigenvectors: sqrt(2/(N+1)) sin(kπ/(N+1)).
    for (i, u) in eig.first_components.iter().enumerate() {
        let k = (n - i) as f64;
        assert_relative_eq!(*u, (2.0 / (n as f64 + 1.0)).sqrt() * (k * h).sin(), epsilon = 1e-13);
    }
}

#[test]
fn two_by_two_pair_and_recovery() {
    let j = jm(&[0.0, 0.0], &[1.0]);
    let report = spectra_pair(&j, &Theta::new(2.0).unwrap()).unwrap();
    assert_eq!(report.status, Status::Pass);
    assert_eq!(report.pair.shift(), Shift::RightPos);
    assert_relative_eq!(report.pair.lambdas().values()[0], -1.0, epsilon = 1e-15);
    assert_relative_eq!(report.pair.mus().values()[1], 2.0, epsilon = 1e-15);

    let solved = inverse::solve(&InverseInput::new(report.pair, None).unwrap()).unwrap();
    assert_relative_eq!(solved.theta.get(), 2.0, epsilon = 1e-14);
    assert_relative_eq!(solved.matrix.off()[0], 1.0, epsilon = 1e-14);
    assert!(solved.matrix.diag().iter().all(|q| q.abs() < 1e-14));
}

#[test]
fn singular_three_by_three_with_each_hint() {
    let j = jm(&[0.0, 0.0, 0.0], &[1.0, 1.0]);
    let theta = Theta::new(2.0).unwrap();
    let pair = spectra_pair(&j, &theta).unwrap().pair;
    assert!(pair.has_zero());
    assert_relative_eq!(pair.mus().values()[2], 5f64.sqrt(), epsilon = 1e-14);

    let alpha0 = tridiag::eigen(&j).unwrap().normalizing_constants()[1];
    assert_relative_eq!(alpha0, 2.0, epsilon = 1e-13);
    for hint in [ZeroCaseHint::Alpha0(alpha0), ZeroCaseHint::Theta(theta.clone())] {
        let s = inverse::solve(&InverseInput::new(pair.clone(), Some(hint)).unwrap()).unwrap();
        assert_relative_eq!(s.theta.get(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(s.matrix.off()[1], 1.0, epsilon = 1e-12);
    }
}

#[test]
fn two_point_measure_gives_the_two_by_two_matrix() {
    let m = SpectralMeasure::new(vec![-1.0, 3.0], vec![0.5, 0.5]).unwrap();
    let j = inverse::reconstruct_jacobi(&m).unwrap();
    assert_relative_eq!(j.diag()[0], 1.0, epsilon = 1e-14);
    assert_relative_eq!(j.diag()[1], 1.0, epsilon = 1e-14);
    assert_relative_eq!(j.off()[0], 2.0, epsilon = 1e-14);
}

#[test]
fn single_mass_chain() {
    // One mass between two walls: q = -(k1 + k2)/m.
    let chain = MassSpringChain::new(vec![2.0], vec![3.0], 1.0).unwrap();
    let j = chain_to_jacobi(&chain);
    assert_eq!(j.diag(), &[-2.0]);
    let back = jacobi_to_chain(&j, 3.0, 2.0).unwrap();
    assert_relative_eq!(*back.terminal(), 1.0, epsilon = 1e-15);
}
