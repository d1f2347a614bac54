use num_bigint::BigInt;
use num_rational::BigRational;
use qell::qmod::{build, classify, hom_dim, IndecompLabel};
use qell::scalars::{FieldSpec, Scalar};
use qell::skew::AlgebraContext;

fn main() {
    let ctx = AlgebraContext::with_options(
        Scalar::from_integer(FieldSpec::Rational, 2), 32, 64, 24, false).unwrap();
    // the case that failed: (1, -1, 3, -1/3) + (1, -1, 1, -4/3)
    let a = Scalar::Rat(BigRational::new(BigInt::from(-1), BigInt::from(3)));
    let b = Scalar::Rat(BigRational::new(BigInt::from(-4), BigInt::from(3)));
    let labs = vec![
        IndecompLabel::new(1, -1, 3, a, 24).unwrap(),
        IndecompLabel::new(1, -1, 1, b, 24).unwrap(),
    ];
    let m = build(&ctx, &labs).unwrap();
    let out = classify(&m, 1).unwrap();
    for l in &out { println!("label: {}", l); }
    println!("match: {}", qell::qmod::labels_equal(&labs, &out, &ctx).unwrap());
    // End dimension distinguishes the block from the split sum
    let block = build(&ctx, &[IndecompLabel::new(1, 1, 2,
        Scalar::from_integer(FieldSpec::Rational, 3), 24).unwrap()]).unwrap();
    let (e, st) = hom_dim(&block, &block, 6).unwrap();
    println!("End(block-2) dim = {e} stabilized {st}");
    let line = build(&ctx, &[IndecompLabel::new(1, 1, 1,
        Scalar::from_integer(FieldSpec::Rational, 3), 24).unwrap()]).unwrap();
    let sum = line.direct_sum(&line).unwrap();
    let (e2, _) = hom_dim(&sum, &sum, 6).unwrap();
    println!("End(line + line) dim = {e2}");
    // n = 2 block: (2, 1, 2, a): dim 4
    let blk2 = build(&ctx, &[IndecompLabel::new(2, 1, 2,
        Scalar::from_integer(FieldSpec::Rational, 3), 24).unwrap()]).unwrap();
    println!("dim = {}", blk2.dim);
    let out2 = classify(&blk2, 5).unwrap();
    for l in &out2 { println!("n2-label: {}", l); }
}
