//! Parse coefficient expressions and evaluate them in polar and axis bindings.

use junction_lab::exprparse::{parse, Bindings};
use junction_lab::solver::ScalarFn;

fn main() -> junction_lab::Result<()> {
    let p = ScalarFn::parse("1 + 0.5*r*cos(t)")?;
    println!("p(0.2, pi/3) = {}", p.at_polar(0.2, std::f64::consts::FRAC_PI_3)?);
    let q = ScalarFn::parse("0.3 + 0.2*x")?;
    println!("q on the axis at x = 0.1: {}", q.at_axis(0.1)?);
    let e = parse("-2^2").expect("valid");
    println!("-2^2 = {}", e.eval(&Bindings::polar(1.0, 0.0)).expect("bound"));
    match ScalarFn::parse("1 + * r") {
        Err(err) => println!("rejected: {err}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
