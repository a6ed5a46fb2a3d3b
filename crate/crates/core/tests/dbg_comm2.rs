use nalgebra::DMatrix;
use num_complex::Complex64;
use qosa_core::random;
use qosa_core::{SubAlgebra, DEFAULT_TOL};

#[test]
fn dbg() {
    let mut rng = random::seeded_rng(41);
    // skip streams consumed by n=2..5 (v0: 1 herm, v1: 2 herms each)
    for n in 2..=5usize {
        let _ = random::hermitian(n, &mut rng);
        let _ = random::hermitian(n, &mut rng);
        let _ = random::hermitian(n, &mut rng);
    }
    let n = 6;
    let _ = random::hermitian(n, &mut rng); // v0 for n=6
    let g1 = random::hermitian(n, &mut rng);
    let g2 = random::hermitian(n, &mut rng);
    let a = SubAlgebra::generate(n, &[g1, g2], DEFAULT_TOL).unwrap();
    println!("dim a = {}", a.dim());
    // gram defect of basis
    let mut gram_defect = 0.0f64;
    for (i, x) in a.basis().iter().enumerate() {
        for (j, y) in a.basis().iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            gram_defect = gram_defect.max((x.hs_inner(y).unwrap() - Complex64::new(expected, 0.0)).norm());
        }
    }
    println!("basis gram defect = {gram_defect:.3e}");
    // closure defect: products should lie in span
    let mut worst = 0.0f64;
    for x in a.basis().iter().take(8) {
        for y in a.basis().iter().take(8) {
            let p = x * y;
            let mut proj = qosa_core::HSMatrix::zeros(n);
            for b in a.basis() {
                proj = &proj + &b.scale(b.hs_inner(&p).unwrap());
            }
            worst = worst.max((&p - &proj).hs_norm());
        }
    }
    println!("closure residual (8x8 sample) = {worst:.3e}");
    // build the commutator Gram matrix and look at the small spectrum
    let eye = DMatrix::<Complex64>::identity(n, n);
    let mut m = DMatrix::<Complex64>::zeros(n * n, n * n);
    for bmat in a.basis() {
        let am = bmat.matrix();
        let ad = am.adjoint();
        let aconj = am.conjugate();
        let at = am.transpose();
        m += eye.kronecker(&(&ad * am));
        m += (&aconj * &at).kronecker(&eye);
        m -= at.kronecker(&ad);
        m -= aconj.kronecker(am);
    }
    let se = ((&m + m.adjoint()).scale(0.5)).symmetric_eigen();
    let mut vals: Vec<f64> = se.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    println!("smallest eigenvalues: {:?}", &vals[..6]);
    println!("largest eigenvalue: {:.4}", vals.last().unwrap());
    println!("cut = {:.3e}", 1e-9 * vals.last().unwrap());
}
