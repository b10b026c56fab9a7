use riccilie::algebra::*;
use riccilie::fields::*;
use riccilie::expr::*;
use riccilie::sym::Sym;

#[test]
fn table1_from_basis() {
    let sc = structure_constants_from_basis(&symmetry_basis()).unwrap();
    assert_eq!(sc, StructureConstants::table1());
    assert!(sc.validate().is_valid());
}

#[test]
fn table2_adjoint() {
    let sc = StructureConstants::table1();
    for i in 0..6 {
        let m = sc.adjoint_matrix(i, Sym::S).unwrap();
        for j in 0..6 {
            let col = m.column(j);
            println!("Ad(exp(s X{}))X{} = {}", i+1, j+1, render_combination(&col));
        }
    }
    // spot checks from the table
    let m1 = sc.adjoint_matrix(0, Sym::S).unwrap();
    let col5 = m1.column(4); // X5 - s X1
    assert_eq!(col5[0], parse("-s").unwrap());
    assert_eq!(col5[4], Expr::one());
    let m4 = sc.adjoint_matrix(3, Sym::S).unwrap();
    assert_eq!(m4.column(2)[2], parse("exp(s)").unwrap());
    // identity at s = 0
    let x = vec![Expr::int(1), Expr::int(2), Expr::int(3), Expr::int(4), Expr::int(5), Expr::int(6)];
    let y = m4.apply(&Expr::zero(), &x);
    assert_eq!(y, x);
    // exact application at s = ln 2: e^s = 2
    let m5 = sc.adjoint_matrix(4, Sym::S).unwrap();
    let e1: Vec<Expr> = LieElement::basis(6, 0).to_exprs();
    let y = m5.apply(&Expr::ln(Expr::int(2)), &e1);
    assert_eq!(y[0], Expr::int(2));
}
