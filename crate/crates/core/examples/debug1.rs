use num_bigint::BigInt;
use num_rational::BigRational;
use qell::qmod::{build, classify, cyclic_decompose, IndecompLabel};
use qell::qmod::classify::restrict_to_sector;
use qell::scalars::{FieldSpec, Scalar};
use qell::skew::AlgebraContext;

fn main() {
    let ctx = AlgebraContext::with_options(
        Scalar::from_integer(FieldSpec::Rational, 2), 32, 64, 24, false).unwrap();
    let a = Scalar::Rat(BigRational::new(BigInt::from(-1), BigInt::from(3)));
    let lab = IndecompLabel::new(1, -1, 3, a, 24).unwrap();
    let m = build(&ctx, &[lab]).unwrap();
    println!("dim = {}", m.dim);
    let factors = cyclic_decompose(&m, 1).unwrap();
    println!("cyclic factors: {}", factors.len());
    for f in &factors {
        println!("  span {} polygon {:?}", f.span().unwrap(), f.newton_polygon().unwrap());
    }
    // sector restriction of the whole module
    let w = restrict_to_sector(&m, 1, -1).unwrap();
    let wf = cyclic_decompose(&w, 1).unwrap();
    println!("restriction factors: {}", wf.len());
    for f in &wf {
        println!("  span {} polygon {:?}", f.span().unwrap(), f.newton_polygon().unwrap());
        println!("  poly: {}", f);
    }
    let out = classify(&m, 1).unwrap();
    for l in &out { println!("label: {}", l); }
}
