//! Hand-derivable values, each checked against an independent computation.

mod common;

use common::{basic_cases, generated_cases, oracle, q, Q};
use g2star_core::apcms::{axiom_audit, f_tensor, is_killing, AXIOM_PHI_SQUARED};
use g2star_core::classify::{normality_defect, paracontact_defect, proj_f11, proj_f12};
use g2star_core::exterior::{interior, wedge};
use g2star_core::g2::{calibrate, gram_matrix, standard_phi, G2Bundle};
use g2star_core::liealg::JacobiReport;
use g2star_core::presets::{example_algebra, example_bundle, example_phi, example_xi};
use g2star_core::{Apcms, Connection, Field, KForm, LieAlgebra, Mode, Ring, Vector};

#[test]
fn surd_inverse_and_roots() {
    let x = q("1/2*sqrt(2)");
    assert_eq!(x.clone() * x.clone(), Q::ratio(1, 2));
    assert_eq!(x.invert().unwrap(), q("sqrt(2)"));

    let a = q("1 + sqrt(2)");
    let inv = a.invert().unwrap();
    assert_eq!(inv, q("-1 + sqrt(2)"));
    assert_eq!(a * inv, Q::int(1));

    let small = q("1/32*sqrt(2)");
    let lambda = (small.clone() * small).nth_root(9).unwrap();
    assert_eq!(lambda, Q::ratio(1, 2));
    assert_eq!(Q::ratio(1, 2).pow(9), Q::ratio(1, 512));
}

#[test]
fn top_degree_wedge_sign() {
    let a = KForm::monomial(&[5, 6, 1, 2], Q::int(1));
    let b = KForm::monomial(&[3, 4, 7], Q::int(1));
    let sign = oracle::perm_sign(&[5, 6, 1, 2, 3, 4, 7]);
    assert_eq!(sign, 1);
    assert_eq!(wedge(&a, &b), KForm::monomial(&[1, 2, 3, 4, 5, 6, 7], Q::int(sign)));
}

#[test]
fn contraction_of_the_example_form() {
    let contracted = interior(&Vector::f(2), &example_phi::<Q>());
    let p = oracle::phi_array(&example_phi());
    for a in 1..=7 {
        for b in a + 1..=7 {
            assert_eq!(contracted.coeff(&[a, b]), p[1][a - 1][b - 1], "f^{a}{b}");
        }
    }
    assert_eq!(contracted.coeff(&[3, 6]), Q::int(-1));
    assert_eq!(contracted.coeff(&[4, 5]), Q::int(1));
    assert_eq!(contracted.coeff(&[1, 7]), Q::ratio(1, 2));
    assert_eq!(contracted.len(), 3);
}

#[test]
fn raising_f1_gives_f7() {
    let g = example_bundle(Mode::Literal).unwrap().metric().clone();
    let ginv = oracle::inverse(&oracle::metric_array(&g));
    let raised = g.raise(&KForm::covector(&Vector::f(1))).unwrap();
    assert_eq!(raised, Vector::f(7));
    assert_eq!(raised.0[..], ginv[0][..]);
}

fn brute_force_jacobi(l: &LieAlgebra<Q>) -> Option<((usize, usize, usize), Vector<Q>)> {
    let c = oracle::structure_constants(l);
    let br = |x: &Vector<Q>, y: &Vector<Q>| {
        Vector::from_fn(|k| {
            let mut v = Q::int(0);
            for i in 0..7 {
                for j in 0..7 {
                    v = v + x.0[i].clone() * y.0[j].clone() * c[i][j][k].clone();
                }
            }
            v
        })
    };
    for i in 1..=7 {
        for j in i + 1..=7 {
            for k in j + 1..=7 {
                let (a, b, d) = (Vector::f(i), Vector::f(j), Vector::f(k));
                let r = br(&br(&a, &b), &d) + br(&br(&b, &d), &a) + br(&br(&d, &a), &b);
                if !r.is_zero() {
                    return Some(((i, j, k), r));
                }
            }
        }
    }
    None
}

#[test]
fn jacobi_by_brute_force() {
    let l = example_algebra::<Q>();
    assert_eq!(brute_force_jacobi(&l), None);
    assert_eq!(l.check_jacobi(), JacobiReport::Pass);

    let bad = LieAlgebra::from_brackets([(1, 2, Vector::f(1)), (1, 3, Vector::f(2))]).unwrap();
    let (triple, residual) = brute_force_jacobi(&bad).unwrap();
    assert_eq!(triple, (1, 2, 3));
    assert_eq!(residual, Vector::f(2));
    assert_eq!(bad.check_jacobi(), JacobiReport::Fail { triple, residual });
}

#[test]
fn covariant_derivative_of_the_three_form() {
    let bundle = example_bundle(Mode::Literal).unwrap();
    let conn = Connection::levi_civita(&example_algebra(), bundle.metric()).unwrap();
    let d = conn.nabla_form(&Vector::f(7), bundle.phi());
    let gamma = oracle::koszul(&example_algebra(), bundle.metric());
    let p = oracle::phi_array(bundle.phi());
    // (∇_X φ)(A, B, C) = -φ(∇_X A, B, C) - φ(A, ∇_X B, C) - φ(A, B, ∇_X C)
    let (x, a, b, c) = (6, 3, 4, 1);
    let mut want = Q::int(0);
    for m in 0..7 {
        want = want
            - gamma[x][a][m].clone() * p[m][b][c].clone()
            - gamma[x][b][m].clone() * p[a][m][c].clone()
            - gamma[x][c][m].clone() * p[a][b][m].clone();
    }
    let got = g2star_core::exterior::eval_form(&d, &[Vector::f(4), Vector::f(5), Vector::f(2)]).unwrap();
    assert_eq!(got, want);
}

#[test]
fn gram_entries_by_brute_force() {
    let b = oracle::gram(&example_phi());
    assert_eq!(b[1][1], Q::int(3));
    assert_eq!(b[0][6], Q::ratio(-3, 2));
    assert_eq!(gram_matrix(&example_phi::<Q>()).unwrap().0, b);
    // B = 6 c g with c = -1/4
    let g = example_bundle(Mode::Literal).unwrap().metric().clone();
    assert_eq!(b[0][6].clone() / (Q::int(6) * Q::ratio(-1, 4)), g.entry(1, 7));
    assert_eq!(g.entry(1, 7), Q::int(1));
}

#[test]
fn normalized_calibration_of_the_example() {
    let (g, vol) = calibrate(&example_phi::<Q>(), -1).unwrap();
    let c = vol.top_coeff();
    assert_eq!(c, Q::ratio(-1, 2));
    assert_eq!(g.entry(2, 2), Q::int(-1));
    let b = oracle::gram(&example_phi());
    for i in 0..7 {
        for j in 0..7 {
            assert_eq!(Q::int(6) * c.clone() * g.matrix().0[i][j].clone(), b[i][j]);
        }
    }
    // det B = (6c)^7 det g and det g = c^2, so det B = 6^7 c^9
    let det_b = g2star_core::exterior::determinant(&g2star_core::Matrix(b));
    let six7 = Q::int(6).pow(7);
    assert_eq!(det_b, six7.clone() * c.pow(7) * g.determinant());
    assert_eq!(g.determinant(), c.pow(2));
    assert_eq!(det_b, six7 * c.pow(9));
}

fn standard() -> G2Bundle<Q> {
    G2Bundle::normalized(standard_phi(), 1).unwrap()
}

#[test]
fn standard_cross_products_and_structure() {
    let b = standard();
    assert_eq!(b.cross_product(&Vector::f(5), &Vector::f(6)), Vector::f(7));
    let p = oracle::cross(b.phi(), b.metric());
    for i in 0..7 {
        for j in 0..7 {
            assert_eq!(b.cross_basis(i + 1, j + 1).0[..], p[i][j][..]);
        }
    }
    let s = Apcms::induce(&b, Vector::f(1)).unwrap();
    assert_eq!(s.eta_of(&Vector::f(1)), Q::int(1));
    assert_eq!(s.phi_of(&Vector::f(2)), -Vector::f(7));
    assert!(axiom_audit(&s).all_pass());
}

#[test]
fn audits_of_the_example() {
    let literal = Apcms::induce(&example_bundle(Mode::Literal).unwrap(), example_xi(Mode::Literal)).unwrap();
    let check = axiom_audit(&literal).get(AXIOM_PHI_SQUARED).unwrap().clone();
    assert!(!check.passed);
    assert_eq!(check.witness, Some(vec![1]));
    let phi2 = literal.phi_of(&literal.phi_of(&Vector::f(1)));
    assert_eq!(phi2, Vector::f(1).scale(&Q::ratio(1, 8)));

    let normalized = Apcms::induce(&example_bundle(Mode::Normalized).unwrap(), example_xi(Mode::Normalized)).unwrap();
    assert!(axiom_audit(&normalized).all_pass());
}

#[test]
fn f_value_of_the_example() {
    let bundle = example_bundle(Mode::Literal).unwrap();
    let xi = example_xi(Mode::Literal);
    let conn = Connection::levi_civita(&example_algebra(), bundle.metric()).unwrap();
    let s = Apcms::induce(&bundle, xi.clone()).unwrap();
    let f = f_tensor(&s, &conn).unwrap();
    let o = oracle::f_tensor(&example_algebra(), &bundle, &xi);
    assert_eq!(*f.get(6, 1, 4), o[6][1][4]);
    assert_eq!(conn.nabla_vec(&Vector::f(7), &xi), Vector::f(4).scale(&q("1/4*sqrt(2)")));
}

#[test]
fn example_xi_is_killing() {
    // ∇_X ξ = (√2/4) x7 f4 + (√2/2) x5 f1 once ∇_{f5} f2 = f1 is included
    let bundle = example_bundle(Mode::Literal).unwrap();
    let xi = example_xi(Mode::Literal);
    let gamma = oracle::koszul(&example_algebra(), bundle.metric());
    let g = oracle::metric_array(bundle.metric());
    let nabla = |x: usize| -> Vec<Q> {
        (0..7)
            .map(|m| (0..7).fold(Q::int(0), |acc, j| acc + xi.0[j].clone() * gamma[x][j][m].clone()))
            .collect()
    };
    let pair = |x: usize, y: usize| -> Q {
        let v = nabla(x);
        (0..7).fold(Q::int(0), |acc, m| acc + v[m].clone() * g[m][y].clone())
    };
    for x in 0..7 {
        for y in 0..7 {
            assert!((pair(x, y) + pair(y, x)).is_zero(), "({x}, {y})");
        }
    }
    assert_eq!(pair(6, 4), q("-1/2*sqrt(2)"));
    let conn = Connection::levi_civita(&example_algebra(), bundle.metric()).unwrap();
    assert!(is_killing(&Apcms::induce(&bundle, xi).unwrap(), &conn));
}

#[test]
fn f12_witness_along_xi() {
    let mut seen = 0;
    for c in generated_cases(15, 9) {
        let (s, conn) = c.structure();
        let d = conn.nabla_vec(s.xi(), s.xi());
        if d.is_zero() {
            continue;
        }
        seen += 1;
        let f = f_tensor(&s, &conn).unwrap();
        let f12 = proj_f12(&f, &s);
        // F12(ξ, φY, ξ) = -F(ξ, ξ, φY) and F(ξ, ξ, Z) = g(φ∇ξξ, Z), so the
        // witness is -g(∇ξξ, ∇ξξ), which vanishes when ∇ξξ is null.
        let v = f12.eval(s.xi(), &s.phi_of(&d), s.xi());
        assert_eq!(v, -s.metric().apply(&d, &d), "{}", c.name);
        assert!(!f12.is_zero(), "{}", c.name);
    }
    assert!(seen > 0);
}

#[test]
fn f11_for_killing_xi() {
    for c in basic_cases() {
        let (s, conn) = c.structure();
        if !is_killing(&s, &conn) {
            continue;
        }
        let f = f_tensor(&s, &conn).unwrap();
        let d = interior(s.xi(), &conn.nabla_form(s.xi(), c.bundle.phi()));
        assert_eq!(proj_f11(&f, &s).is_zero(), d.is_zero(), "{}", c.name);
    }
}

#[test]
fn example_is_not_normal_and_standard_is_not_paracontact() {
    let bundle = example_bundle(Mode::Literal).unwrap();
    let conn = Connection::levi_civita(&example_algebra(), bundle.metric()).unwrap();
    let s = Apcms::induce(&bundle, example_xi(Mode::Literal)).unwrap();
    assert!(!normality_defect(&f_tensor(&s, &conn).unwrap(), &s).is_zero());

    let b = standard();
    let s = Apcms::induce(&b, Vector::f(1)).unwrap();
    let d = paracontact_defect(&s, &Connection::flat());
    // 2 g43(P(e1, e2), e7) with P(e1, e2) = -e7 and g43(e7, e7) = 1
    let p = oracle::cross(b.phi(), b.metric());
    let g = oracle::metric_array(b.metric());
    let want = (0..7).fold(Q::int(0), |acc, m| acc + Q::int(2) * p[0][1][m].clone() * g[m][6].clone());
    assert_eq!(want, Q::int(-2));
    assert_eq!(d.0[1][6], want);
}
