use riccilie::expr::*;
use riccilie::sym::Sym;

#[test]
fn smoke_normalize() {
    let e = parse("x + y").unwrap();
    assert_eq!(render(&e), "x + y");
    let e = parse("y*exp(-x)").unwrap();
    println!("y*exp(-x) -> {e}");
    let e2 = parse(&render(&e)).unwrap();
    assert_eq!(e, e2);

    // cancellation
    assert!(parse("x*y - y*x").unwrap().is_zero_lit());
    // power merge
    let e = parse("x^2*x^3").unwrap();
    assert_eq!(render(&e), "x^5");
    // exp merge
    let e = parse("exp(x)*exp(-x)").unwrap();
    assert!(e.is_one_lit());
    // distribution
    let e = parse("(x+y)*(x-y)").unwrap();
    println!("(x+y)*(x-y) -> {e}");
    assert_eq!(e, parse("x^2 - y^2").unwrap());
    // rational folding
    assert_eq!(parse("2/4").unwrap(), Expr::rat(1, 2));
    assert_eq!(parse("1.5").unwrap(), Expr::rat(3, 2));

    // differentiation
    let e = parse("y*exp(-x)").unwrap();
    let d = differentiate(&e, Sym::X);
    println!("d/dx(y*e^-x) = {d}");
    assert_eq!(d, parse("-y*exp(-x)").unwrap());

    let e = parse("f(y*exp(-x), t)/y").unwrap();
    let d = differentiate(&e, Sym::T);
    println!("d/dt f(z,w)/y = {d}");
    assert_eq!(d, parse("f_w(y*exp(-x), t)/y").unwrap());

    // flag-on normalization
    let e = parse("exp(ln(y) - x)").unwrap();
    let p = normalize_in(&e, Domain::positive());
    println!("exp(ln y - x) [pos] -> {p}");
    assert_eq!(p, parse("y*exp(-x)").unwrap());

    let e = parse("ln(y*exp(-x))").unwrap();
    let p = normalize_in(&e, Domain::positive());
    assert_eq!(p, parse("ln(y) - x").unwrap());

    // unknown rendering round trip
    let e = parse("f_zw").unwrap();
    assert_eq!(render(&e), "f_zw");
    let e = parse("g''").unwrap();
    assert_eq!(render(&e), "g''");
    let e = parse("u(x,y,t)").unwrap();
    assert_eq!(parse(&render(&e)).unwrap(), e);

    // syntax error offset
    match parse("x +* y") {
        Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 3),
        other => panic!("expected syntax error, got {other:?}"),
    }
}
