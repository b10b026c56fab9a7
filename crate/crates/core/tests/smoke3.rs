use riccilie::algebra::LieElement;
use riccilie::optimal::*;

#[test]
fn canonicalize_spec_examples() {
    // already normal: case 1, empty word
    let x = LieElement::from_ints(&[0, 0, 0, 1, 2, 3]);
    let (nf, w) = canonicalize(&x).unwrap();
    assert_eq!(nf.case_id, 1);
    assert!(w.steps.is_empty());
    assert_eq!(w.scale, riccilie::expr::qint(1));
    assert!(verify_orbit(&x, &w, &nf));
    println!("{x} -> {nf} via {w}");

    // (1,0,0,2,0,0): case 4, eps=1, word [(5, ln 2)], scale 1/2
    let x = LieElement::from_ints(&[1, 0, 0, 2, 0, 0]);
    let (nf, w) = canonicalize(&x).unwrap();
    println!("{x} -> {nf} via {w}");
    assert_eq!(nf.case_id, 4);
    assert_eq!(nf.eps, 1);
    assert_eq!(nf.eps_p, 0);
    assert_eq!(w.scale, riccilie::expr::qrat(1, 2));
    assert_eq!(w.steps.len(), 1);
    assert_eq!(w.steps[0].0, 5);
    assert_eq!(w.steps[0].1, AdjointParam::LnRational(riccilie::expr::qint(2)));
    assert!(verify_orbit(&x, &w, &nf));

    // (4,0,1,2,1,0): case 2 -> X4 + (1/2) X5 with eps=0
    let x = LieElement::from_ints(&[4, 0, 1, 2, 1, 0]);
    let (nf, w) = canonicalize(&x).unwrap();
    println!("{x} -> {nf} via {w}");
    assert_eq!(nf.case_id, 2);
    assert_eq!(nf.eps, 0);
    assert_eq!(nf.a, Some(riccilie::expr::qrat(1, 2)));
    assert!(verify_orbit(&x, &w, &nf));

    // X3 alone: case 8
    let x = LieElement::from_ints(&[0, 0, 1, 0, 0, 0]);
    let (nf, _) = canonicalize(&x).unwrap();
    assert_eq!(nf.case_id, 8);
    assert_eq!(nf.eps_p, 1);

    // negative pivot: -X4 must land on the case-4 template via negative scale
    let x = LieElement::from_ints(&[0, 0, 0, -1, 0, 0]);
    let (nf, w) = canonicalize(&x).unwrap();
    println!("{x} -> {nf} via {w}");
    assert!(verify_orbit(&x, &w, &nf));

    // wrong-sign word must fail verification
    let x = LieElement::from_ints(&[0, 0, 1, 1, 0, 0]);
    let (nf, mut w) = canonicalize(&x).unwrap();
    assert!(verify_orbit(&x, &w, &nf));
    if let AdjointParam::Rational(q) = &w.steps[0].1 {
        w.steps[0].1 = AdjointParam::Rational(-q.clone());
    }
    assert!(!verify_orbit(&x, &w, &nf));

    // snapping
    assert_eq!(snap_to_rational(0.5, 1e-12), riccilie::expr::qrat(1, 2));
    assert_eq!(snap_to_rational(-2.0 /3.0, 1e-12), riccilie::expr::qrat(-2, 3));
    assert_eq!(snap_to_rational(1e-14, 1e-12), riccilie::expr::qint(0));
}
