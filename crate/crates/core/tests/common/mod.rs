#![allow(dead_code)]

use braket_rhs::dsl::{Binding, Bindings, Value};
use braket_rhs::observable::{extend_operator, HermitianOperator};
use braket_rhs::permutation::{apply_permutation, dual_projector};
use braket_rhs::{
    compose_observable, composite_bra, composite_ket, functional_tensor, inner, make_bra, make_ket, Cplx,
    CompositeObservable, FactorObservable, Functional, FunctionalKind, HilbertVector, ModelConfig, Permutation,
    SymmetrizerKind, TensorVector,
};
use nalgebra::DMatrix;

pub fn c(re: f64, im: f64) -> Cplx {
    Cplx::new(re, im)
}

/// A three-factor qubit model with generic complex vectors and a
/// Kronecker-sum observable built from three different factor observables.
pub struct Fixture {
    pub model: ModelConfig,
    pub a: HilbertVector,
    pub b: HilbertVector,
    pub c: HilbertVector,
    pub x: FactorObservable,
    pub big_a: CompositeObservable,
    pub env: Bindings,
}

impl Fixture {
    pub fn new() -> Self {
        let model = ModelConfig::new(2, 3).unwrap();
        let a = HilbertVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let b = HilbertVector::new(vec![c(0.3, -0.4), c(-1.2, 0.5)]).unwrap();
        let cv = HilbertVector::new(vec![c(-0.7, 0.1), c(0.25, 0.9)]).unwrap();
        let x = FactorObservable::new("X", DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(1.0, -2.0), c(1.0, 2.0), c(-1.5, 0.0)]))
            .unwrap();
        let y = FactorObservable::new("Y", DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]))
            .unwrap();
        let z = FactorObservable::diagonal("Z", &[1.0, -1.0]);
        let big_a = compose_observable(vec![x.clone(), y.clone(), z.clone()]).unwrap();
        let mut env = Bindings::new(model);
        env.insert("a", Binding::Vector(a.clone())).unwrap();
        env.insert("b", Binding::Vector(b.clone())).unwrap();
        env.insert("c", Binding::Vector(cv.clone())).unwrap();
        env.insert("X", Binding::Factor(x.clone())).unwrap();
        env.insert("Y", Binding::Factor(y)).unwrap();
        env.insert("Z", Binding::Factor(z)).unwrap();
        env.insert("A", Binding::Composite(big_a.clone())).unwrap();
        env.set_hat(big_a.clone()).unwrap();
        Self { model, a, b, c: cv, x, big_a, env }
    }

    fn ket(&self, v: &HilbertVector) -> Functional {
        make_ket(&self.model, v).unwrap()
    }

    fn bra(&self, v: &HilbertVector) -> Functional {
        make_bra(&self.model, v).unwrap()
    }

    fn abc(&self) -> TensorVector {
        TensorVector::product(&[self.a.clone(), self.b.clone(), self.c.clone()]).unwrap()
    }

    fn x_on(&self, v: &HilbertVector) -> HilbertVector {
        let coords: Vec<Cplx> = (0..2).map(|i| (0..2).map(|j| self.x.matrix()[(i, j)] * v.coords()[j]).sum()).collect();
        HilbertVector::new(coords).unwrap()
    }
}

/// Expression corpus with values computed directly from library calls.
pub fn corpus(fx: &Fixture) -> Vec<(&'static str, Value)> {
    let (a, b, cv) = (&fx.a, &fx.b, &fx.c);
    let ka = fx.ket(a);
    let kb = fx.ket(b);
    let kc = fx.ket(cv);
    let ba = fx.bra(a);
    let bb = fx.bra(b);
    let abc = fx.abc();
    let k_abc = composite_ket(&fx.model, &abc).unwrap();
    let b_abc = composite_bra(&fx.model, &abc).unwrap();
    let k_ab = ka.tensor(&kb).unwrap();
    let x1 = HermitianOperator::new(2, 1, fx.x.matrix().clone(), 1e-12).unwrap();
    let ab_ip = inner(a, b).unwrap();
    let a_abc = fx.big_a.dense().apply(&abc).unwrap();
    let xb = fx.x_on(b);
    let xa = fx.x_on(a);
    let aab = TensorVector::product(&[a.clone(), a.clone(), b.clone()]).unwrap();
    let aaa = composite_ket(&fx.model, &TensorVector::product(&[a.clone(), a.clone(), a.clone()]).unwrap()).unwrap();

    let f = |x: Functional| Value::Functional(x);
    let s = Value::Scalar;
    vec![
        ("<a|b>", s(ab_ip)),
        ("<b|a>", s(inner(b, a).unwrap())),
        ("<a| |b>", s(ab_ip)),
        ("<a|a>", s(inner(a, a).unwrap())),
        ("|a>", f(ka.clone())),
        ("<a|", f(ba.clone())),
        ("|a> (x) |b>", f(k_ab.clone())),
        ("|a> ⊗ |b> ⊗ |c>", f(k_abc.clone())),
        ("|a> (x) |b> (x) |c>", f(functional_tensor(&fx.model, &[ka.clone(), kb.clone(), kc.clone()]).unwrap())),
        ("<a| (x) <b| (x) <c|", f(b_abc.clone())),
        ("2 * |a>", f(ka.scale(c(2.0, 0.0)))),
        ("0.5i * <a|", f(ba.scale(c(0.0, 0.5)))),
        ("|a> + |b>", f(ka.add(&kb).unwrap())),
        ("|a> - |b>", f(ka.add(&kb.scale(c(-1.0, 0.0))).unwrap())),
        ("(1 + 2i) * |a>", f(ka.scale(c(1.0, 2.0)))),
        ("-|a>", f(ka.scale(c(-1.0, 0.0)))),
        ("(|a> (x) |b>)'", f(k_ab.conjugate())),
        ("|a>†", f(ba.clone())),
        ("(<a| (x) <b| (x) <c|) (|a> (x) |b> (x) |c>)", s(c(abc.norm_sqr(), 0.0))),
        ("P_sym (|a> (x) |b> (x) |c>)", f(dual_projector(SymmetrizerKind::Sym, &k_abc).unwrap())),
        ("P_asym (|a> (x) |b> (x) |c>)", f(dual_projector(SymmetrizerKind::Antisym, &k_abc).unwrap())),
        ("P_asym (|a> (x) |a> (x) |b>)", f(Functional::zero(FunctionalKind::Ket, 2, 3).unwrap())),
        ("P_sym (<a| (x) <a| (x) <b|)", f(dual_projector(SymmetrizerKind::Sym, &composite_bra(&fx.model, &aab).unwrap()).unwrap())),
        ("U[2,3,1] (|a> (x) |b> (x) |c>)", {
            let sigma = Permutation::from_one_based(&[2, 3, 1]).unwrap();
            f(Functional::new(FunctionalKind::Ket, apply_permutation(&sigma, &abc).unwrap()))
        }),
        ("U[2,1] (|a> (x) |b>)", f(kb.tensor(&ka).unwrap())),
        ("A_hat (|a> (x) |b> (x) |c>)", f(extend_operator(&fx.big_a, &k_abc).unwrap())),
        ("A (|a> (x) |b> (x) |c>)", f(extend_operator(&fx.big_a, &k_abc).unwrap())),
        ("(<a| (x) <b| (x) <c|) (A (|a> (x) |b> (x) |c>))", s(braket_rhs::tensor_inner(&abc, &a_abc).unwrap())),
        ("A_hat (P_sym (|a> (x) |a> (x) |a>))", f(extend_operator(&fx.big_a, &dual_projector(SymmetrizerKind::Sym, &aaa).unwrap()).unwrap())),
        ("X |a>", f(extend_operator(&x1, &ka).unwrap())),
        ("<a| X", f(fx.bra(&xa))),
        ("<a| (X |b>)", s(inner(a, &xb).unwrap())),
        ("(<a| X) |b>", s(inner(&xa, b).unwrap())),
        ("<a|b> * <b|a>", s(c(ab_ip.norm_sqr(), 0.0))),
        ("(<a|b>)'", s(ab_ip.conj())),
        ("(2 * <a|) |b>", s(ab_ip * 2.0)),
        ("(2i * |b>)' |a>", s(inner(b, a).unwrap() * c(0.0, -2.0))),
        ("(<a| (x) <b|) U[2,1]", f(bb.tensor(&ba).unwrap())),
        ("a", Value::Vector(TensorVector::from_vector(a))),
        ("X a", Value::Vector(TensorVector::from_vector(&xa))),
        ("<a| a", s(inner(a, a).unwrap())),
        ("a'", f(ba.clone())),
        ("P_sym (|a> (x) |b>) + P_asym (|a> (x) |b>)", f(k_ab.clone())),
        ("3", s(c(3.0, 0.0))),
        ("(1 + 2i)'", s(c(1.0, -2.0))),
        ("-(|a> + -1 * |a>)", f(Functional::zero(FunctionalKind::Ket, 2, 1).unwrap())),
        ("1e-3 * <a|b>", s(ab_ip * 1e-3)),
    ]
}

/// Inputs that must fail with a spanned error.
pub const MALFORMED: &[&str] = &[
    "",
    "   ",
    "|a",
    "<a",
    "|>",
    "|a> (x)",
    "(|a>",
    "|a>)",
    "|a> $ |b>",
    "* |a>",
    "|a> + + |b>",
    "2abc",
    "1e999",
    "U[",
    "U[1,1] (|a> (x) |b>)",
    "U[0,1] (|a> (x) |b>)",
    "|zz>",
    "<a| |zz>",
    "|a> + <a|",
    "|a> |a>",
    "A A",
    "|a> (x) <b|",
    "|a> (x) |a> (x) |a> (x) |a>",
    "A |a>",
    "X (|a> (x) |b>)",
    "(<a| (x) <b|) |c>",
    "a |b>",
    "2 * A",
    "<a| * |b>",
    "P_sym * 2",
    "<a|b>'",
];
