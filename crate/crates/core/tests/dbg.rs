use riccilie::expr::*;
use riccilie::fields::*;
use riccilie::reduction::*;
use riccilie::sym::Sym;

fn vf(text: &str) -> VectorField {
    parse_vector_field(text, &CoordinateChart::main()).unwrap()
}

#[test]
fn chart_row1() {
    // X1 + X6 = d_x + y d_y - u d_u
    let x = vf("d_x + y*d_y - u*d_u");
    let c = characteristic_invariants(&x).unwrap();
    println!("z = {}", c.z);
    println!("w = {}", c.w);
    println!("f = {}", c.f_def);
    println!("u = {}", c.u_solve);
    assert_eq!(c.z, parse("y*exp(-x)").unwrap());
    assert_eq!(c.w, parse("t").unwrap());
    assert_eq!(c.f_def, parse("u*y").unwrap());
    assert_eq!(c.u_solve, parse("f/y").unwrap());
    let chk = verify_chart(&c).unwrap();
    println!("check: {:?}", chk);
    assert!(chk.passed());
}

#[test]
fn chart_x2() {
    let x = vf("d_y");
    let c = characteristic_invariants(&x).unwrap();
    assert_eq!(c.z, parse("x").unwrap());
    assert_eq!(c.w, parse("t").unwrap());
    assert_eq!(c.f_def, parse("u").unwrap());
    assert_eq!(c.u_solve, parse("f").unwrap());
}

#[test]
fn subchart_v2() {
    let v = parse_vector_field("d_w", &CoordinateChart::reduced()).unwrap();
    let s = characteristic_subchart(&v).unwrap();
    assert_eq!(s.s_inv, parse("z").unwrap());
    assert_eq!(s.g_def, parse("f").unwrap());
}

#[test]
fn reduce_row1() {
    let x = vf("d_x + y*d_y - u*d_u");
    let c = characteristic_invariants(&x).unwrap();
    let r = reduce(&pde_residual(), &c).unwrap();
    println!("prefactor = {}", r.prefactor);
    println!("equation  = {}", r.equation);
    assert_eq!(r.prefactor, parse("y^(-3)").unwrap());
    let printed = parse("f^2*f_w - z^2*f_z^2 + z*f*f_z + z^2*f*f_zz").unwrap();
    assert_eq!(r.equation, printed);
}

#[test]
fn reduce_ode_a11() {
    let x = vf("d_x + y*d_y - u*d_u");
    let c = characteristic_invariants(&x).unwrap();
    let r = reduce(&pde_residual(), &c).unwrap();
    let v2 = parse_vector_field("d_w", &CoordinateChart::reduced()).unwrap();
    let o = reduce_ode(&r, &v2).unwrap_or_else(|e| panic!("{e}"));
    println!("ode prefactor = {}", o.prefactor);
    println!("ode equation  = {}", o.equation);
    let printed = parse("s*g'^2 - g*g' - s*g*g''").unwrap();
    assert!(equations_match(&o.equation, &printed, Sym::G));
}
