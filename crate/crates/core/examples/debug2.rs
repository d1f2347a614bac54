use num_bigint::BigInt;
use num_rational::BigRational;
use qell::qmod::lattice::{residue_eigenvalues, resonance_free_frame, LatticeFrame};
use qell::qmod::{build, classify, cyclic_decompose, IndecompLabel, QDiffModule};
use qell::qmod::classify::restrict_to_sector;
use qell::scalars::{FieldSpec, Scalar};
use qell::skew::AlgebraContext;

fn main() {
    let ctx = AlgebraContext::with_options(
        Scalar::from_integer(FieldSpec::Rational, 2), 32, 64, 24, false).unwrap();
    let a = Scalar::Rat(BigRational::new(BigInt::from(1), BigInt::from(1)));
    let lab = IndecompLabel::new(1, -1, 2, a, 24).unwrap();
    let m = build(&ctx, &[lab]).unwrap();
    let w = restrict_to_sector(&m, 1, -1).unwrap();
    let wf = cyclic_decompose(&w, 1).unwrap();
    println!("restriction factors: {}", wf.len());
    for f in &wf {
        let (_, anch) = f.anchored_at_zero().unwrap().monic_normalize().unwrap();
        println!("  span {} poly {}", f.span().unwrap(), anch);
        let vm = QDiffModule::from_cyclic(&anch).unwrap();
        let frame = LatticeFrame::standard(&vm);
        let phi = frame.gauged_phi().unwrap();
        let res0 = phi.residue().unwrap();
        println!("  initial eigenvalues: {:?}",
            residue_eigenvalues(&res0).unwrap().iter().map(|(a, m)| (a.to_string(), *m)).collect::<Vec<_>>());
        let improved = resonance_free_frame(&frame).unwrap();
        let res = improved.gauged_phi().unwrap().residue().unwrap();
        let eigs = residue_eigenvalues(&res).unwrap();
        for (alpha, mult) in &eigs {
            println!("  final eigen {} mult {} jordan {:?}", alpha, mult,
                res.jordan_sizes_at(alpha).unwrap());
        }
    }
    let out = classify(&m, 1).unwrap();
    for l in &out { println!("label: {}", l); }
}
