use std::collections::BTreeMap;
use std::fmt;

use super::ast::{Ast, AstKind};
use super::{DslError, Span, Stage};
use crate::dual::{Functional, FunctionalKind};
use crate::error::ModelError;
use crate::hilbert::{Cplx, HilbertVector, ModelConfig, EXACT_TOL};
use crate::observable::{extend_operator, CompositeObservable, FactorObservable, HermitianOperator};
use crate::permutation::{apply_permutation, dual_projector, projector, Permutation, SymmetrizerKind};
use crate::tensor::TensorVector;

const RESERVED: [&str; 3] = ["P_sym", "P_asym", "A_hat"];

/// Something a name in an expression can refer to.
#[derive(Debug, Clone)]
pub enum Binding {
    Vector(HilbertVector),
    Tensor(TensorVector),
    Factor(FactorObservable),
    Composite(CompositeObservable),
}

/// Name table plus the model an expression is evaluated against.
#[derive(Debug, Clone)]
pub struct Bindings {
    model: ModelConfig,
    names: BTreeMap<String, Binding>,
    hat: Option<CompositeObservable>,
}

impl Bindings {
    pub fn new(model: ModelConfig) -> Self {
        Self { model, names: BTreeMap::new(), hat: None }
    }

    pub fn model(&self) -> &ModelConfig {
        &self.model
    }

    pub fn get(&self, name: &str) -> Option<&Binding> {
        self.names.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.keys().map(String::as_str)
    }

    /// Adds a name; builtins and duplicates are rejected.
    pub fn insert(&mut self, name: impl Into<String>, binding: Binding) -> crate::error::Result<()> {
        let name = name.into();
        if RESERVED.contains(&name.as_str()) || name.contains('[') {
            return Err(ModelError::InvalidConfig(format!("`{name}` is a reserved operator name")));
        }
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(ModelError::InvalidConfig(format!("`{name}` is not a valid identifier")));
        }
        if name.starts_with(|c: char| c.is_ascii_digit()) {
            return Err(ModelError::InvalidConfig(format!("`{name}` starts with a digit")));
        }
        let dim = match &binding {
            Binding::Vector(v) => v.dim(),
            Binding::Tensor(t) => {
                if t.arity() > self.model.factors() {
                    return Err(ModelError::ArityMismatch { expected: self.model.factors(), found: t.arity() });
                }
                t.dim()
            }
            Binding::Factor(f) => f.dim(),
            Binding::Composite(c) => {
                if c.arity() != self.model.factors() {
                    return Err(ModelError::ArityMismatch { expected: self.model.factors(), found: c.arity() });
                }
                c.dim()
            }
        };
        if dim != self.model.dim() {
            return Err(ModelError::DimensionMismatch { expected: self.model.dim(), found: dim });
        }
        if self.names.contains_key(&name) {
            return Err(ModelError::InvalidConfig(format!("`{name}` is bound twice")));
        }
        self.names.insert(name, binding);
        Ok(())
    }

    /// Sets the composite observable that `A_hat` extends.
    pub fn set_hat(&mut self, a: CompositeObservable) -> crate::error::Result<()> {
        if a.dim() != self.model.dim() || a.arity() != self.model.factors() {
            return Err(ModelError::InvalidConfig("A_hat must act on the model's tensor space".into()));
        }
        self.hat = Some(a);
        Ok(())
    }

    pub fn hat(&self) -> Option<&CompositeObservable> {
        self.hat.as_ref()
    }
}

/// Operators an expression can name.
#[derive(Debug, Clone)]
pub enum Operator {
    Factor(FactorObservable),
    Composite(CompositeObservable),
    Projector(SymmetrizerKind),
    Permutation(Permutation),
    /// The extension of the designated composite observable to functionals.
    Extension(CompositeObservable),
}

impl Operator {
    fn describe(&self) -> String {
        match self {
            Operator::Factor(f) => format!("factor observable `{}`", f.name()),
            Operator::Composite(_) => "composite observable".into(),
            Operator::Projector(c) => format!("projector P_{}", c.as_str()),
            Operator::Permutation(p) => format!("permutation U{:?}", p.one_based()),
            Operator::Extension(_) => "A_hat".into(),
        }
    }

    /// `O t`.
    fn act(&self, t: &TensorVector) -> crate::error::Result<TensorVector> {
        match self {
            Operator::Factor(f) => HermitianOperator::new(f.dim(), 1, f.matrix().clone(), f64::INFINITY)?.apply(t),
            Operator::Composite(a) | Operator::Extension(a) => a.dense().apply(t),
            Operator::Projector(c) => projector(*c, t),
            Operator::Permutation(p) => apply_permutation(p, t),
        }
    }

    /// `O^dagger t`.
    fn act_adjoint(&self, t: &TensorVector) -> crate::error::Result<TensorVector> {
        match self {
            Operator::Permutation(p) => apply_permutation(&p.inverse(), t),
            other => other.act(t),
        }
    }

    fn adjoint(&self) -> Operator {
        match self {
            Operator::Permutation(p) => Operator::Permutation(p.inverse()),
            other => other.clone(),
        }
    }

    /// Action on a functional's representing vector.
    fn act_functional(&self, f: &Functional) -> crate::error::Result<Functional> {
        match self {
            Operator::Projector(c) => dual_projector(*c, f),
            Operator::Composite(a) | Operator::Extension(a) => extend_operator(a, f),
            other => Ok(Functional::new(f.kind(), other.act(f.rep())?)),
        }
    }
}

/// Result of evaluating an expression.
#[derive(Debug, Clone)]
pub enum Value {
    Scalar(Cplx),
    Vector(TensorVector),
    Functional(Functional),
    Operator(Operator),
}

impl Value {
    fn describe(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "a scalar",
            Value::Vector(_) => "a vector",
            Value::Functional(f) => match f.kind() {
                FunctionalKind::Bra => "a bra",
                FunctionalKind::Ket => "a ket",
            },
            Value::Operator(_) => "an operator",
        }
    }

    pub fn as_scalar(&self) -> Option<Cplx> {
        match self {
            Value::Scalar(c) => Some(*c),
            _ => None,
        }
    }

    pub fn as_functional(&self) -> Option<&Functional> {
        match self {
            Value::Functional(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_vector(&self) -> Option<&TensorVector> {
        match self {
            Value::Vector(v) => Some(v),
            _ => None,
        }
    }

    /// Largest coordinate difference between two values of the same shape.
    pub fn max_diff(&self, other: &Value) -> Option<f64> {
        match (self, other) {
            (Value::Scalar(a), Value::Scalar(b)) => Some((a - b).norm()),
            (Value::Vector(a), Value::Vector(b)) => a.max_abs_diff(b).ok(),
            (Value::Functional(a), Value::Functional(b)) if a.kind() == b.kind() => a.rep().max_abs_diff(b.rep()).ok(),
            _ => None,
        }
    }
}

pub fn format_cplx(c: Cplx) -> String {
    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", c.re, c.im.abs())
}

fn fmt_coords(f: &mut fmt::Formatter<'_>, t: &TensorVector) -> fmt::Result {
    let parts: Vec<String> = t.dense().iter().map(|&c| format_cplx(c)).collect();
    write!(f, "[{}]", parts.join(", "))
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar(c) => write!(f, "{}", format_cplx(*c)),
            Value::Vector(t) => {
                write!(f, "vector on {} factor(s) ", t.arity())?;
                fmt_coords(f, t)
            }
            Value::Functional(g) if g.is_zero(EXACT_TOL) => write!(f, "zero functional"),
            Value::Functional(g) => {
                write!(f, "{} on {} factor(s), representing vector ", g.kind().as_str(), g.arity())?;
                fmt_coords(f, g.rep())
            }
            Value::Operator(op) => write!(f, "{}", op.describe()),
        }
    }
}

struct Evaluator<'a> {
    env: &'a Bindings,
}

impl Evaluator<'_> {
    fn err(span: Span, message: impl Into<String>) -> DslError {
        DslError::new(Stage::Eval, span, message)
    }

    fn lift<T>(span: Span, r: crate::error::Result<T>) -> Result<T, DslError> {
        r.map_err(|e| Self::err(span, e.to_string()))
    }

    fn check_arity(&self, span: Span, arity: usize) -> Result<(), DslError> {
        let n = self.env.model.factors();
        if arity > n {
            return Err(Self::err(span, format!("space-arity mismatch: {arity} factors in a {n}-factor model")));
        }
        Ok(())
    }

    fn leaf_vector(&self, span: Span, name: &str) -> Result<TensorVector, DslError> {
        match self.env.names.get(name) {
            Some(Binding::Vector(v)) => Ok(TensorVector::from_vector(v)),
            Some(Binding::Tensor(t)) => Ok(t.clone()),
            Some(_) => Err(Self::err(span, format!("`{name}` is an operator, not a vector"))),
            None => Err(Self::err(span, format!("unbound name `{name}`"))),
        }
    }

    fn operator(&self, span: Span, name: &str) -> Result<Value, DslError> {
        match name {
            "P_sym" => return Ok(Value::Operator(Operator::Projector(SymmetrizerKind::Sym))),
            "P_asym" => return Ok(Value::Operator(Operator::Projector(SymmetrizerKind::Antisym))),
            "A_hat" => {
                return match &self.env.hat {
                    Some(a) => Ok(Value::Operator(Operator::Extension(a.clone()))),
                    None => Err(Self::err(span, "A_hat needs a composite observable in the model")),
                }
            }
            _ => {}
        }
        if let Some(inner) = name.strip_prefix("U[").and_then(|s| s.strip_suffix(']')) {
            let images = inner
                .split(',')
                .map(|s| s.parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Self::err(span, format!("malformed permutation `{name}`")))?;
            let p = Self::lift(span, Permutation::from_one_based(&images))?;
            return Ok(Value::Operator(Operator::Permutation(p)));
        }
        match self.env.names.get(name) {
            Some(Binding::Factor(f)) => Ok(Value::Operator(Operator::Factor(f.clone()))),
            Some(Binding::Composite(c)) => Ok(Value::Operator(Operator::Composite(c.clone()))),
            Some(Binding::Vector(v)) => Ok(Value::Vector(TensorVector::from_vector(v))),
            Some(Binding::Tensor(t)) => Ok(Value::Vector(t.clone())),
            None => Err(Self::err(span, format!("unbound name `{name}`"))),
        }
    }

    fn eval(&self, ast: &Ast) -> Result<Value, DslError> {
        let span = ast.span;
        match &ast.kind {
            AstKind::KetLeaf(n) => Ok(Value::Functional(Functional::new(FunctionalKind::Ket, self.leaf_vector(span, n)?))),
            AstKind::BraLeaf(n) => Ok(Value::Functional(Functional::new(FunctionalKind::Bra, self.leaf_vector(span, n)?))),
            AstKind::OpLeaf(n) => self.operator(span, n),
            AstKind::Scalar(c) => Ok(Value::Scalar(*c)),
            AstKind::Tensor(a, b) => {
                let (l, r) = (self.eval(a)?, self.eval(b)?);
                let out = match (&l, &r) {
                    (Value::Functional(f), Value::Functional(g)) => {
                        if f.kind() != g.kind() {
                            return Err(Self::err(span, "cannot tensor a bra with a ket"));
                        }
                        Value::Functional(Self::lift(span, f.tensor(g))?)
                    }
                    (Value::Vector(u), Value::Vector(v)) => Value::Vector(Self::lift(span, u.tensor(v))?),
                    _ => return Err(Self::err(span, format!("cannot tensor {} with {}", l.describe(), r.describe()))),
                };
                match &out {
                    Value::Functional(f) => self.check_arity(span, f.arity())?,
                    Value::Vector(v) => self.check_arity(span, v.arity())?,
                    _ => {}
                }
                Ok(out)
            }
            AstKind::Apply(a, b) => {
                let (l, r) = (self.eval(a)?, self.eval(b)?);
                self.apply(span, l, r)
            }
            AstKind::Add(a, b) => {
                let (l, r) = (self.eval(a)?, self.eval(b)?);
                match (&l, &r) {
                    (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x + y)),
                    (Value::Vector(u), Value::Vector(v)) => Ok(Value::Vector(Self::lift(span, u.add(v))?)),
                    (Value::Functional(f), Value::Functional(g)) => {
                        if f.kind() != g.kind() {
                            return Err(Self::err(span, "cannot add a bra and a ket"));
                        }
                        Ok(Value::Functional(Self::lift(span, f.add(g))?))
                    }
                    _ => Err(Self::err(span, format!("cannot add {} and {}", l.describe(), r.describe()))),
                }
            }
            AstKind::Scale(a, b) => {
                let (l, r) = (self.eval(a)?, self.eval(b)?);
                match (l, r) {
                    (Value::Scalar(s), v) | (v, Value::Scalar(s)) => self.scale(span, s, v),
                    (l, r) => Err(Self::err(span, format!("`*` needs a scalar, got {} and {}", l.describe(), r.describe()))),
                }
            }
            AstKind::Dagger(a) => Ok(match self.eval(a)? {
                Value::Scalar(c) => Value::Scalar(c.conj()),
                Value::Vector(v) => Value::Functional(Functional::new(FunctionalKind::Bra, v)),
                Value::Functional(f) => Value::Functional(f.conjugate()),
                Value::Operator(op) => Value::Operator(op.adjoint()),
            }),
        }
    }

    fn scale(&self, span: Span, s: Cplx, v: Value) -> Result<Value, DslError> {
        Ok(match v {
            Value::Scalar(c) => Value::Scalar(s * c),
            Value::Vector(t) => Value::Vector(t.scale(s)),
            Value::Functional(f) => Value::Functional(f.scale(s)),
            Value::Operator(op) => {
                return Err(Self::err(span, format!("scaling {} is not supported", op.describe())));
            }
        })
    }

    fn apply(&self, span: Span, l: Value, r: Value) -> Result<Value, DslError> {
        match (l, r) {
            (Value::Scalar(s), v) | (v, Value::Scalar(s)) => self.scale(span, s, v),
            (Value::Functional(f), Value::Functional(g)) => {
                if f.kind() == FunctionalKind::Bra && g.kind() == FunctionalKind::Ket {
                    if f.arity() != g.arity() {
                        return Err(Self::err(span, format!("space-arity mismatch: {} against {} factors", f.arity(), g.arity())));
                    }
                    Ok(Value::Scalar(Self::lift(span, f.eval(g.rep()))?))
                } else {
                    Err(Self::err(span, format!("cannot apply a {} to a {}", f.kind().as_str(), g.kind().as_str())))
                }
            }
            (Value::Functional(f), Value::Vector(v)) => {
                if f.arity() != v.arity() {
                    return Err(Self::err(span, format!("space-arity mismatch: {} against {} factors", f.arity(), v.arity())));
                }
                Ok(Value::Scalar(Self::lift(span, f.eval(&v))?))
            }
            (Value::Functional(f), Value::Operator(op)) => {
                let rep = Self::lift(span, op.act_adjoint(f.rep()))?;
                Ok(Value::Functional(Functional::new(f.kind(), rep)))
            }
            (Value::Operator(op), Value::Functional(f)) => Ok(Value::Functional(Self::lift(span, op.act_functional(&f))?)),
            (Value::Operator(op), Value::Vector(v)) => Ok(Value::Vector(Self::lift(span, op.act(&v))?)),
            (Value::Operator(a), Value::Operator(b)) => Err(Self::err(
                span,
                format!("operator products are not supported ({} applied to {})", a.describe(), b.describe()),
            )),
            (Value::Vector(_), r) => Err(Self::err(span, format!("a vector cannot be applied to {}", r.describe()))),
        }
    }
}

/// Evaluates a parsed expression against a set of bindings.
pub fn evaluate(ast: &Ast, env: &Bindings) -> Result<Value, DslError> {
    Evaluator { env }.eval(ast)
}
