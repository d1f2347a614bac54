use std::sync::Arc;
use std::time::Instant;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use qell::qmod::{build, classify, IndecompLabel};
use qell::scalars::{FieldSpec, QuadraticNumber, Scalar};
use qell::skew::AlgebraContext;

fn random_nonzero_scalar(rng: &mut ChaCha8Rng, field: FieldSpec) -> Scalar {
    loop {
        let num = rng.gen_range(-5i64..=5);
        let den = rng.gen_range(1i64..=4);
        let s = match field {
            FieldSpec::Quadratic(d) => {
                let num2 = rng.gen_range(-5i64..=5);
                Scalar::Quad(QuadraticNumber::new(
                    BigRational::new(BigInt::from(num), BigInt::from(den)),
                    BigRational::new(BigInt::from(num2), BigInt::from(den)), d).unwrap())
            }
            _ => Scalar::from_rational(field, BigRational::new(BigInt::from(num), BigInt::from(den))),
        };
        if !s.is_zero() { return s; }
    }
}

fn random_labels(rng: &mut ChaCha8Rng, ctx: &Arc<AlgebraContext>, max_dim: usize) -> Vec<IndecompLabel> {
    let field = ctx.field;
    let mut remaining = max_dim;
    let mut out = Vec::new();
    while remaining > 0 {
        if !out.is_empty() && rng.gen_bool(0.35) { break; }
        let shapes: Vec<(u32, u32)> = (1..=remaining as u32)
            .flat_map(|n| (1..=(remaining as u32 / n)).map(move |l| (n, l))).collect();
        let (n, l) = shapes[rng.gen_range(0..shapes.len())];
        let k = if n == 1 { rng.gen_range(-2i64..=2) } else {
            loop { let k = rng.gen_range(-5i64..=5);
                   if k != 0 && num_integer::gcd(n as i64, k.abs()) == 1 { break k; } }
        };
        let a = random_nonzero_scalar(rng, field);
        out.push(IndecompLabel::new(n, k, l, a, 24).unwrap());
        remaining -= (n * l) as usize;
    }
    out
}

fn main() {
    let q2 = AlgebraContext::with_options(Scalar::from_integer(FieldSpec::Rational, 2), 32, 64, 24, false).unwrap();
    let qi = AlgebraContext::with_options(Scalar::Quad(QuadraticNumber::new(
        BigRational::new(BigInt::from(3), BigInt::from(5)),
        BigRational::new(BigInt::from(4), BigInt::from(5)), -1).unwrap()), 32, 64, 24, false).unwrap();
    for (name, ctx, seed) in [("Q(q=2)", q2, 1000u64), ("Q(i)", qi, 2000u64)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t0 = Instant::now();
        let mut slowest = (0.0f64, String::new());
        for case in 0..100 {
            let labels = random_labels(&mut rng, &ctx, 4);
            let m = build(&ctx, &labels).unwrap();
            let t1 = Instant::now();
            let _ = classify(&m, seed + case).unwrap();
            let dt = t1.elapsed().as_secs_f64();
            if dt > slowest.0 { slowest = (dt, format!("{labels:?}")); }
        }
        println!("{name}: total {:.1}s slowest {:.2}s {}", t0.elapsed().as_secs_f64(), slowest.0, &slowest.1[..slowest.1.len().min(150)]);
    }
}
