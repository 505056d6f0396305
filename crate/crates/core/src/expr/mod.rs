//! Scalar-field expressions over `x1..xn`: parsing, exact symbolic
//! differentiation, and pointwise evaluation.
//!
//! The function set `{exp, ln, sin, cos, sqrt}` with `+ − × ÷` and integer
//! powers is closed under differentiation. Simplification is limited to
//! constant folding and zero/one annihilation.

mod parser;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use parser::{ParseError, ParseErrorKind};

use crate::error::{Error, Result};
use crate::polynomial::{MultiIndex, Polynomial};
use crate::scalar::{format_rational, rational_to_f64};
use crate::ExactPolynomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, PartialEq)]
enum Node {
    Const { value: BigRational, approx: f64 },
    Var(usize),
    Neg(Arc<Node>),
    Add(Arc<Node>, Arc<Node>),
    Sub(Arc<Node>, Arc<Node>),
    Mul(Arc<Node>, Arc<Node>),
    Div(Arc<Node>, Arc<Node>),
    Pow(Arc<Node>, i32),
    Func(Func, Arc<Node>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainErrorKind {
    LogOfNonPositive,
    DivisionByZero,
    SqrtOfNegative,
}

impl fmt::Display for DomainErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainErrorKind::LogOfNonPositive => "logarithm of a non-positive value",
            DomainErrorKind::DivisionByZero => "division by zero",
            DomainErrorKind::SqrtOfNegative => "square root of a negative value",
        })
    }
}

/// A domain violation during evaluation, naming the offending subexpression.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} in `{subexpression}`")]
pub struct EvalError {
    pub kind: DomainErrorKind,
    pub subexpression: String,
}

/// Immutable expression in `n` variables. Cheap to clone; subtrees are shared.
#[derive(Clone, Debug)]
pub struct Expression {
    nvars: usize,
    root: Arc<Node>,
}

impl PartialEq for Expression {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.root == other.root
    }
}

fn konst(value: BigRational) -> Arc<Node> {
    let approx = rational_to_f64(&value);
    Arc::new(Node::Const { value, approx })
}

fn as_const(node: &Node) -> Option<&BigRational> {
    match node {
        Node::Const { value, .. } => Some(value),
        _ => None,
    }
}

fn is_zero(node: &Node) -> bool {
    as_const(node).is_some_and(Zero::is_zero)
}

fn is_one(node: &Node) -> bool {
    as_const(node).is_some_and(One::is_one)
}

fn neg(a: Arc<Node>) -> Arc<Node> {
    match &*a {
        Node::Const { value, .. } => konst(-value),
        Node::Neg(inner) => inner.clone(),
        _ => Arc::new(Node::Neg(a)),
    }
}

fn add(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
    if let (Some(x), Some(y)) = (as_const(&a), as_const(&b)) {
        return konst(x + y);
    }
    if is_zero(&a) {
        return b;
    }
    if is_zero(&b) {
        return a;
    }
    Arc::new(Node::Add(a, b))
}

fn sub(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
    if let (Some(x), Some(y)) = (as_const(&a), as_const(&b)) {
        return konst(x - y);
    }
    if is_zero(&b) {
        return a;
    }
    if is_zero(&a) {
        return neg(b);
    }
    Arc::new(Node::Sub(a, b))
}

fn mul(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
    if let (Some(x), Some(y)) = (as_const(&a), as_const(&b)) {
        return konst(x * y);
    }
    if is_zero(&a) || is_zero(&b) {
        return konst(BigRational::zero());
    }
    if is_one(&a) {
        return b;
    }
    if is_one(&b) {
        return a;
    }
    Arc::new(Node::Mul(a, b))
}

fn div(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
    if let (Some(x), Some(y)) = (as_const(&a), as_const(&b)) {
        if !y.is_zero() {
            return konst(x / y);
        }
    }
    if is_zero(&a) {
        return a;
    }
    if is_one(&b) {
        return a;
    }
    Arc::new(Node::Div(a, b))
}

fn pow(a: Arc<Node>, k: i32) -> Arc<Node> {
    if k == 0 {
        return konst(BigRational::one());
    }
    if k == 1 {
        return a;
    }
    if let Some(x) = as_const(&a) {
        if !x.is_zero() || k > 0 {
            return konst(num_traits::pow::Pow::pow(x, k));
        }
    }
    Arc::new(Node::Pow(a, k))
}

fn func(f: Func, a: Arc<Node>) -> Arc<Node> {
    Arc::new(Node::Func(f, a))
}

fn int(k: i64) -> Arc<Node> {
    konst(BigRational::from_integer(BigInt::from(k)))
}

fn derive(node: &Arc<Node>, i: usize) -> Arc<Node> {
    match &**node {
        Node::Const { .. } => int(0),
        Node::Var(j) => int(i64::from(*j == i)),
        Node::Neg(a) => neg(derive(a, i)),
        Node::Add(a, b) => add(derive(a, i), derive(b, i)),
        Node::Sub(a, b) => sub(derive(a, i), derive(b, i)),
        Node::Mul(a, b) => add(mul(derive(a, i), b.clone()), mul(a.clone(), derive(b, i))),
        Node::Div(a, b) => {
            let da = derive(a, i);
            let db = derive(b, i);
            sub(
                div(da, b.clone()),
                div(mul(a.clone(), db), pow(b.clone(), 2)),
            )
        }
        Node::Pow(a, k) => mul(mul(int(i64::from(*k)), pow(a.clone(), k - 1)), derive(a, i)),
        Node::Func(f, a) => {
            let da = derive(a, i);
            match f {
                Func::Exp => mul(node.clone(), da),
                Func::Ln => div(da, a.clone()),
                Func::Sin => mul(func(Func::Cos, a.clone()), da),
                Func::Cos => neg(mul(func(Func::Sin, a.clone()), da)),
                Func::Sqrt => div(da, mul(int(2), node.clone())),
            }
        }
    }
}

fn eval_node<S: Float>(node: &Node, x: &[S]) -> std::result::Result<S, DomainErrorKind> {
    let cast = |v: f64| S::from(v).unwrap_or_else(S::nan);
    Ok(match node {
        Node::Const { approx, .. } => cast(*approx),
        Node::Var(i) => x[*i],
        Node::Neg(a) => -eval_node(a, x)?,
        Node::Add(a, b) => eval_node(a, x)? + eval_node(b, x)?,
        Node::Sub(a, b) => eval_node(a, x)? - eval_node(b, x)?,
        Node::Mul(a, b) => eval_node(a, x)? * eval_node(b, x)?,
        Node::Div(a, b) => {
            let den = eval_node(b, x)?;
            if den.is_zero() {
                return Err(DomainErrorKind::DivisionByZero);
            }
            eval_node(a, x)? / den
        }
        Node::Pow(a, k) => {
            let base = eval_node(a, x)?;
            if *k < 0 && base.is_zero() {
                return Err(DomainErrorKind::DivisionByZero);
            }
            base.powi(*k)
        }
        Node::Func(f, a) => {
            let v = eval_node(a, x)?;
            match f {
                Func::Exp => v.exp(),
                Func::Ln if v <= S::zero() => return Err(DomainErrorKind::LogOfNonPositive),
                Func::Ln => v.ln(),
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Sqrt if v < S::zero() => return Err(DomainErrorKind::SqrtOfNegative),
                Func::Sqrt => v.sqrt(),
            }
        }
    })
}

/// Re-walks the tree to find the innermost node whose own operation fails.
fn locate_failure<'a, S: Float>(node: &'a Node, x: &[S]) -> Option<&'a Node> {
    let children: Vec<&Arc<Node>> = match node {
        Node::Const { .. } | Node::Var(_) => vec![],
        Node::Neg(a) | Node::Pow(a, _) | Node::Func(_, a) => vec![a],
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => vec![a, b],
    };
    for c in children {
        if eval_node(c, x).is_err() {
            return locate_failure(c, x);
        }
    }
    eval_node(node, x).is_err().then_some(node)
}

fn eval_exact(node: &Node, x: &[BigRational]) -> Option<BigRational> {
    Some(match node {
        Node::Const { value, .. } => value.clone(),
        Node::Var(i) => x[*i].clone(),
        Node::Neg(a) => -eval_exact(a, x)?,
        Node::Add(a, b) => eval_exact(a, x)? + eval_exact(b, x)?,
        Node::Sub(a, b) => eval_exact(a, x)? - eval_exact(b, x)?,
        Node::Mul(a, b) => eval_exact(a, x)? * eval_exact(b, x)?,
        Node::Div(a, b) => {
            let den = eval_exact(b, x)?;
            if den.is_zero() {
                return None;
            }
            eval_exact(a, x)? / den
        }
        Node::Pow(a, k) => {
            let base = eval_exact(a, x)?;
            if *k < 0 && base.is_zero() {
                return None;
            }
            num_traits::pow::Pow::pow(&base, *k)
        }
        Node::Func(f, a) => exact_func(*f, eval_exact(a, x)?)?,
    })
}

/// The points where a function takes a rational value at a rational argument.
fn exact_func(f: Func, a: BigRational) -> Option<BigRational> {
    let one = BigRational::one();
    match f {
        Func::Exp if a.is_zero() => Some(one),
        Func::Ln if a.is_one() => Some(BigRational::zero()),
        Func::Sin if a.is_zero() => Some(a),
        Func::Cos if a.is_zero() => Some(one),
        Func::Sqrt if !a.is_negative() => {
            let (n, d) = (a.numer().sqrt(), a.denom().sqrt());
            let root = BigRational::new(n, d);
            (&root * &root == a).then_some(root)
        }
        _ => None,
    }
}

fn to_poly(node: &Node, n: usize) -> Result<ExactPolynomial> {
    Ok(match node {
        Node::Const { value, .. } => Polynomial::constant(n, value.clone()),
        Node::Var(i) => Polynomial::var(n, *i),
        Node::Neg(a) => -to_poly(a, n)?,
        Node::Add(a, b) => to_poly(a, n)? + to_poly(b, n)?,
        Node::Sub(a, b) => to_poly(a, n)? - to_poly(b, n)?,
        Node::Mul(a, b) => to_poly(a, n)? * to_poly(b, n)?,
        Node::Div(a, b) => {
            let den = to_poly(b, n)?;
            match (den.total_degree(), den.constant_term()) {
                (0, c) if !c.is_zero() => to_poly(a, n)?.scalar_mul(&c.recip()),
                _ => {
                    return Err(Error::NotPolynomial(format!(
                        "division by `{}`",
                        Printer(b, n)
                    )))
                }
            }
        }
        Node::Pow(a, k) if *k >= 0 => to_poly(a, n)?.pow(*k as u32),
        Node::Pow(..) | Node::Func(..) => {
            return Err(Error::NotPolynomial(Printer(node, n).to_string()));
        }
    })
}

impl Expression {
    /// Parses infix text over `x1..xn`; see [`parser`](self::parser) for the grammar.
    pub fn parse(text: &str, dimension: usize) -> std::result::Result<Self, ParseError> {
        parser::parse(text, dimension)
    }

    pub fn constant(nvars: usize, value: BigRational) -> Self {
        Expression {
            nvars,
            root: konst(value),
        }
    }

    /// The coordinate `x_{i+1}` (0-based `i`).
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(
            i < nvars,
            "variable index {i} out of range for dimension {nvars}"
        );
        Expression {
            nvars,
            root: Arc::new(Node::Var(i)),
        }
    }

    pub fn from_polynomial(p: &ExactPolynomial) -> Self {
        let n = p.dimension();
        let mut acc = int(0);
        for (e, c) in p.terms() {
            let mut term = konst(c.clone());
            for (i, &k) in e.entries().iter().enumerate() {
                if k > 0 {
                    term = mul(term, pow(Arc::new(Node::Var(i)), k as i32));
                }
            }
            acc = add(acc, term);
        }
        Expression {
            nvars: n,
            root: acc,
        }
    }

    pub fn dimension(&self) -> usize {
        self.nvars
    }

    fn wrap(&self, root: Arc<Node>) -> Self {
        Expression {
            nvars: self.nvars,
            root,
        }
    }

    /// `∂e/∂x_{i+1}`.
    pub fn diff(&self, i: usize) -> Self {
        assert!(
            i < self.nvars,
            "variable index {i} out of range for dimension {}",
            self.nvars
        );
        self.wrap(derive(&self.root, i))
    }

    /// `D^α e`, coordinates applied in increasing index order.
    pub fn differentiate(&self, alpha: &MultiIndex) -> Result<Self> {
        if alpha.len() != self.nvars {
            return Err(Error::InvalidArgument(format!(
                "multi-index {alpha} has length {} but the expression has dimension {}",
                alpha.len(),
                self.nvars
            )));
        }
        let mut root = self.root.clone();
        for i in 0..self.nvars {
            for _ in 0..alpha.get(i) {
                root = derive(&root, i);
            }
        }
        Ok(self.wrap(root))
    }

    pub fn eval<S: Float>(&self, point: &[S]) -> std::result::Result<S, EvalError> {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        eval_node(&self.root, point).map_err(|kind| {
            let culprit = locate_failure(&self.root, point).unwrap_or(&self.root);
            EvalError {
                kind,
                subexpression: Printer(culprit, self.nvars).to_string(),
            }
        })
    }

    /// Checked evaluation that reports a length mismatch as an error.
    pub fn evaluate(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.nvars {
            return Err(Error::InvalidArgument(format!(
                "point has {} coordinates, expression has dimension {}",
                point.len(),
                self.nvars
            )));
        }
        Ok(self.eval(point)?)
    }

    /// Substitutes `x_i ↦ r·x_i` for every coordinate.
    pub fn scale_variables(&self, r: &BigRational) -> Self {
        fn go(node: &Arc<Node>, r: &Arc<Node>) -> Arc<Node> {
            match &**node {
                Node::Const { .. } => node.clone(),
                Node::Var(_) => mul(r.clone(), node.clone()),
                Node::Neg(a) => neg(go(a, r)),
                Node::Add(a, b) => add(go(a, r), go(b, r)),
                Node::Sub(a, b) => sub(go(a, r), go(b, r)),
                Node::Mul(a, b) => mul(go(a, r), go(b, r)),
                Node::Div(a, b) => div(go(a, r), go(b, r)),
                Node::Pow(a, k) => pow(go(a, r), *k),
                Node::Func(f, a) => func(*f, go(a, r)),
            }
        }
        self.wrap(go(&self.root, &konst(r.clone())))
    }

    /// Exact conversion when the expression is a polynomial (only `+ − ×`,
    /// non-negative integer powers, and division by nonzero constants).
    pub fn to_polynomial(&self) -> Result<ExactPolynomial> {
        to_poly(&self.root, self.nvars)
    }

    /// Exact value at a rational point, when every subexpression has a rational
    /// value there (rational operations, `exp(0)`, `ln(1)`, `sin(0)`, `cos(0)`,
    /// square roots of rational squares).
    pub fn eval_rational(&self, point: &[BigRational]) -> Option<BigRational> {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        eval_exact(&self.root, point)
    }

    /// Number of nodes in the tree (shared subtrees counted each time they occur).
    pub fn tree_size(&self) -> usize {
        fn go(node: &Node) -> usize {
            1 + match node {
                Node::Const { .. } | Node::Var(_) => 0,
                Node::Neg(a) | Node::Pow(a, _) | Node::Func(_, a) => go(a),
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                    go(a) + go(b)
                }
            }
        }
        go(&self.root)
    }

    fn binary(&self, other: &Self, op: fn(Arc<Node>, Arc<Node>) -> Arc<Node>) -> Self {
        assert_eq!(self.nvars, other.nvars, "expression dimension mismatch");
        self.wrap(op(self.root.clone(), other.root.clone()))
    }

    pub fn powi(&self, k: i32) -> Self {
        self.wrap(pow(self.root.clone(), k))
    }

    pub fn apply(&self, f: Func) -> Self {
        self.wrap(func(f, self.root.clone()))
    }
}

macro_rules! expr_op {
    ($trait:ident, $method:ident, $ctor:ident) => {
        impl std::ops::$trait<&Expression> for &Expression {
            type Output = Expression;
            fn $method(self, rhs: &Expression) -> Expression {
                self.binary(rhs, $ctor)
            }
        }
    };
}

expr_op!(Add, add, add);
expr_op!(Sub, sub, sub);
expr_op!(Mul, mul, mul);
expr_op!(Div, div, div);

impl std::ops::Neg for &Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        self.wrap(neg(self.root.clone()))
    }
}

// Precedence: 1 additive, 2 multiplicative, 3 unary minus, 4 power, 5 atom.
fn precedence(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) => 1,
        Node::Mul(..) | Node::Div(..) => 2,
        Node::Neg(..) => 3,
        Node::Pow(..) => 4,
        Node::Const { value, .. } if value.is_negative() || !value.denom().is_one() => 0,
        Node::Const { .. } | Node::Var(_) | Node::Func(..) => 5,
    }
}

struct Printer<'a>(&'a Node, usize);

impl Printer<'_> {
    fn child(&self, f: &mut fmt::Formatter<'_>, node: &Node, min: u8) -> fmt::Result {
        if precedence(node) < min {
            write!(f, "({})", Printer(node, self.1))
        } else {
            write!(f, "{}", Printer(node, self.1))
        }
    }
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Node::Const { value, .. } => write!(f, "{}", format_rational(value)),
            Node::Var(i) => write!(f, "x{}", i + 1),
            Node::Neg(a) => {
                write!(f, "-")?;
                self.child(f, a, 4)
            }
            Node::Add(a, b) => {
                self.child(f, a, 1)?;
                write!(f, " + ")?;
                self.child(f, b, 2)
            }
            Node::Sub(a, b) => {
                self.child(f, a, 1)?;
                write!(f, " - ")?;
                self.child(f, b, 2)
            }
            Node::Mul(a, b) => {
                self.child(f, a, 2)?;
                write!(f, "*")?;
                self.child(f, b, 3)
            }
            Node::Div(a, b) => {
                self.child(f, a, 2)?;
                write!(f, "/")?;
                self.child(f, b, 3)
            }
            Node::Pow(a, k) => {
                self.child(f, a, 5)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Node::Func(func, a) => write!(f, "{}({})", func.name(), Printer(a, self.1)),
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer(&self.root, self.nvars).fmt(f)
    }
}

impl Expression {
    /// Value of the rational constant if the whole expression folded to one.
    pub fn as_constant(&self) -> Option<&BigRational> {
        as_const(&self.root)
    }

    /// `f64` value of a constant expression.
    pub fn constant_value(&self) -> Option<f64> {
        self.as_constant().and_then(ToPrimitive::to_f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, n: usize) -> Expression {
        Expression::parse(text, n).unwrap()
    }

    #[test]
    fn differentiate_examples() {
        let e = parse("x1^2*x2", 2);
        let d = e.differentiate(&MultiIndex::new(vec![1, 1])).unwrap();
        for p in [[0.3, -0.7], [1.5, 2.0]] {
            assert_eq!(d.eval(&p).unwrap(), 2.0 * p[0]);
        }
        assert_eq!(e.differentiate(&MultiIndex::zeros(2)).unwrap(), e);
        let ex = parse("exp(x1)", 2);
        let d3 = ex.differentiate(&MultiIndex::new(vec![3, 0])).unwrap();
        assert_eq!(d3.eval(&[0.4, 0.0]).unwrap(), 0.4f64.exp());
        assert!(e.differentiate(&MultiIndex::zeros(3)).is_err());
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(parse("ln(1+x1^2+x2^2)", 2).eval(&[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(parse("x1*x2", 2).eval(&[0.5, -0.5]).unwrap(), -0.25);
        let err = parse("1/x1", 2).eval(&[0.0, 0.0]).unwrap_err();
        assert_eq!(err.kind, DomainErrorKind::DivisionByZero);
        assert_eq!(err.subexpression, "1/x1");
        let err = parse("x2 + ln(x1 - 1)", 2).eval(&[0.5, 0.0]).unwrap_err();
        assert_eq!(err.kind, DomainErrorKind::LogOfNonPositive);
        assert_eq!(err.subexpression, "ln(x1 - 1)");
        let err = parse("sqrt(x1)", 1).eval(&[-1.0]).unwrap_err();
        assert_eq!(err.kind, DomainErrorKind::SqrtOfNegative);
        assert!(parse("x1^(-2)", 1).eval(&[0.0]).is_err());
        assert!(parse("x1", 2).evaluate(&[1.0]).is_err());
    }

    #[test]
    fn generic_scalar_eval() {
        let e = parse("sin(x1)*exp(x2)", 2);
        let v32: f32 = e.eval(&[0.5f32, 0.25f32]).unwrap();
        let v64: f64 = e.eval(&[0.5, 0.25]).unwrap();
        assert!((f64::from(v32) - v64).abs() < 1e-6);
    }

    #[test]
    fn derivative_rules() {
        let cases = [
            ("ln(x1)", "1/x1"),
            ("sqrt(x1)", "1/(2*sqrt(x1))"),
            ("cos(x1)", "-sin(x1)"),
            ("x1^(-3)", "-3*x1^(-4)"),
            ("x1/(1+x1^2)", "(1 - x1^2)/(1+x1^2)^2"),
        ];
        for (f, df) in cases {
            let d = parse(f, 1).diff(0);
            let expect = parse(df, 1);
            for x in [0.3, 1.1, 2.7] {
                let (a, b) = (d.eval(&[x]).unwrap(), expect.eval(&[x]).unwrap());
                assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()), "{f}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn simplifies_constants() {
        assert_eq!(
            parse("2*3 + x1*0", 1).as_constant(),
            Some(&crate::scalar::rational(6, 1))
        );
        assert_eq!(parse("x1", 1).diff(0).constant_value(), Some(1.0));
        assert_eq!(parse("x1*x1", 1).diff(0).to_string(), "x1 + x1");
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [
            "-x1^2 + 3/4*x2 - (x1 - x2)",
            "exp(-x1^2)*sin(x2)/(1 + x1^2)",
            "x1^(-2) - -x2",
            "(-1/3)*x1 + 2^3",
            "sqrt(x1^2 + 1)^3",
        ] {
            let e = parse(text, 2);
            let again = parse(&e.to_string(), 2);
            for p in [[0.3, -0.4], [1.2, 0.9], [-0.7, 2.0]] {
                assert_eq!(
                    e.eval(&p).unwrap(),
                    again.eval(&p).unwrap(),
                    "{text} -> {e}"
                );
            }
        }
    }

    #[test]
    fn polynomial_conversion() {
        let p = parse("(x1 + x2)^2/2 - 3", 2).to_polynomial().unwrap();
        assert_eq!(p.eval_f64(&[1.0, 1.0]).unwrap(), -1.0);
        assert!(parse("sin(x1)", 1).to_polynomial().is_err());
        assert!(parse("1/x1", 1).to_polynomial().is_err());
        let back = Expression::from_polynomial(&p);
        assert_eq!(
            back.eval(&[0.5, -2.0]).unwrap(),
            p.eval_f64(&[0.5, -2.0]).unwrap()
        );
    }

    #[test]
    fn exact_rational_evaluation() {
        use crate::scalar::rational;
        let e = parse("(x1 + 1/3)^2/x2 - x1^(-1)", 2);
        assert_eq!(
            e.eval_rational(&[rational(1, 5), rational(2, 1)]),
            Some(rational(-1093, 225))
        );
        assert_eq!(e.eval_rational(&[rational(0, 1), rational(2, 1)]), None);
        assert_eq!(parse("exp(x1)", 1).eval_rational(&[rational(1, 1)]), None);
        let special = parse(
            "exp(x1) + ln(1 + x1) - sin(x1) + cos(x1) + sqrt(9/4 + x1)",
            1,
        );
        assert_eq!(
            special.eval_rational(&[rational(0, 1)]),
            Some(rational(7, 2))
        );
        assert_eq!(parse("sqrt(x1)", 1).eval_rational(&[rational(2, 1)]), None);
        assert_eq!(parse("sqrt(x1)", 1).eval_rational(&[rational(-4, 1)]), None);
    }

    #[test]
    fn scaling_variables() {
        let e = parse("exp(x1)*x2^2", 2);
        let s = e.scale_variables(&crate::scalar::rational(3, 1));
        assert_eq!(
            s.eval(&[0.1, 0.2]).unwrap(),
            e.eval(&[0.30000000000000004, 0.6000000000000001]).unwrap()
        );
    }
}
