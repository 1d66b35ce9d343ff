//! Storage/bandwidth tradeoff vertices for a file of size B, with k-node
//! recovery and d helpers.
//!
//!     cargo run --example tradeoff_curve -- 1 4 8

use regen::params::{tradeoff_bound, Rational};
use regen::sim::parse_rational;
use regen::tradeoff_curve;

fn main() -> regen::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let b = parse_rational(args.first().map_or("1", String::as_str))?;
    let k: u32 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let d: u32 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(8);

    println!("B = {b}, k = {k}, d = {d}");
    println!("{:>4} {:>10} {:>10} {:>12}", "ell", "alpha", "beta", "d*beta");
    for p in tradeoff_curve(b, k, d)? {
        let repair = p.beta * Rational::from_integer(i64::from(d));
        println!("{:>4} {:>10} {:>10} {:>12}", p.ell, p.alpha, p.beta, repair);
        // each vertex sits exactly on the cut-set bound
        assert_eq!(tradeoff_bound(p.alpha, p.beta, k, d)?, b);
    }
    Ok(())
}
