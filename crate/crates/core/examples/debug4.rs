use num_bigint::BigInt;
use num_rational::BigRational;
use qell::polyroots::{factor_rational, qp_mul, rational_roots, scalar_poly_roots, QPoly};
use qell::scalars::{FieldSpec, QuadraticNumber, Scalar};

fn qr(n: i64, d: i64) -> BigRational { BigRational::new(BigInt::from(n), BigInt::from(d)) }

fn main() {
    // char poly from the failing case, coefficients in Q(i)
    let f = FieldSpec::Quadratic(-1);
    let c = |an: &str, ad: &str, bn: &str, bd: &str| -> Scalar {
        Scalar::Quad(QuadraticNumber::new(
            BigRational::new(an.parse().unwrap(), ad.parse().unwrap()),
            BigRational::new(bn.parse().unwrap(), bd.parse().unwrap()),
            -1,
        ).unwrap())
    };
    let coeffs = vec![
        c("2164987164433408", "3814697265625", "-3251402718879744", "3814697265625"),
        c("7974267165696", "30517578125", "8777019036672", "30517578125"),
        c("-3636365568", "48828125", "1947426624", "48828125"),
        c("-46176", "15625", "-184032", "15625"),
        Scalar::one(f),
    ];
    match scalar_poly_roots(&coeffs) {
        Ok(rs) => {
            println!("fully_split: {}", rs.fully_split);
            for (r, m) in &rs.roots { println!("root {} mult {}", r, m); }
        }
        Err(e) => println!("error: {e}"),
    }
    // sanity: known product with big coefficients over Q
    let a: QPoly = vec![qr(-7, 5), qr(1, 1)];
    let b: QPoly = vec![qr(3, 1), qr(0, 1), qr(1, 1)];
    let p = qp_mul(&a, &b);
    println!("factors of small product: {}", factor_rational(&p).len());
    println!("roots: {:?}", rational_roots(&p).len());
}
