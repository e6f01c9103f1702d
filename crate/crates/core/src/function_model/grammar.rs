//! Plain-text prefix syntax for expressions.
//!
//! ```text
//! expr  := const(k)
//!        | logabs(poly c_d ... c_0)            univariate in C^1, highest degree first
//!        | logabs(mpoly n {c e_1 .. e_n} ...)  n variables, one brace group per term
//!        | lognorm(x_1 y_1 ... x_n y_n [| j ...])   1-based coordinates, default all
//!        | sum(w expr, w expr, ...)
//!        | max(expr, expr, ...)
//!        | scale(c, expr)
//!        | add(k, expr)
//!        | compose(chi [gamma g], expr)
//! chi   := neginv | neglogneg | negpow a | iter m | affine a b
//! c     := real | [re im]
//! ```
//!
//! Printing produces the same syntax and parsing the printed text gives back
//! an equal expression.

use std::fmt::{self, Display, Write as _};
use std::str::FromStr;

use num_complex::Complex64;

use super::chi::{ChiKind, ConvexChi};
use super::expr::{Node, PshExpr};
use super::point::Point;
use super::poly::Polynomial;
use super::ModelError;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Num(f64),
    Sym(char),
}

/// Tokenizer and cursor shared by the expression and domain parsers.
pub(crate) struct Lexer {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    src_len: usize,
}

impl Lexer {
    pub fn new(src: &str) -> Result<Self, ModelError> {
        let mut toks = Vec::new();
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_whitespace() {
                i += 1;
            } else if "()[]{},|".contains(c) {
                toks.push((i, Tok::Sym(c)));
                i += 1;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((start, Tok::Ident(src[start..i].to_string())));
            } else if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' {
                let start = i;
                i += 1;
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    let exp_sign = (d == '-' || d == '+') && matches!(bytes[i - 1], b'e' | b'E');
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text
                    .parse()
                    .map_err(|_| ModelError::Parse(format!("bad number '{text}' at {start}")))?;
                if !v.is_finite() {
                    return Err(ModelError::Parse(format!("non-finite number at {start}")));
                }
                toks.push((start, Tok::Num(v)));
            } else {
                return Err(ModelError::Parse(format!("unexpected character '{c}' at {i}")));
            }
        }
        Ok(Lexer { toks, pos: 0, src_len: src.len() })
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.src_len, |t| t.0)
    }

    pub fn err<T>(&self, msg: impl Display) -> Result<T, ModelError> {
        Err(ModelError::Parse(format!("{msg} at {}", self.here())))
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    pub fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }

    pub fn at_sym(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Sym(c))
    }

    pub fn expect_sym(&mut self, c: char) -> Result<(), ModelError> {
        if self.at_sym(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    pub fn ident(&mut self) -> Result<String, ModelError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected a name"),
        }
    }

    pub fn number(&mut self) -> Result<f64, ModelError> {
        match self.peek() {
            Some(Tok::Num(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(v)
            }
            _ => self.err("expected a number"),
        }
    }

    pub fn integer(&mut self) -> Result<u32, ModelError> {
        let v = self.number()?;
        if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
            Ok(v as u32)
        } else {
            self.err(format!("expected a nonnegative integer, got {v}"))
        }
    }

    /// Numbers up to the next non-number token.
    pub fn numbers(&mut self) -> Vec<f64> {
        let mut out = Vec::new();
        while let Some(Tok::Num(v)) = self.peek() {
            out.push(*v);
            self.pos += 1;
        }
        out
    }

    pub fn finish(&self) -> Result<(), ModelError> {
        if self.pos < self.toks.len() {
            self.err("trailing input")
        } else {
            Ok(())
        }
    }
}

fn coefficient(lx: &mut Lexer) -> Result<Complex64, ModelError> {
    if lx.at_sym('[') {
        lx.expect_sym('[')?;
        let re = lx.number()?;
        let im = lx.number()?;
        lx.expect_sym(']')?;
        Ok(Complex64::new(re, im))
    } else {
        Ok(Complex64::new(lx.number()?, 0.0))
    }
}

fn coefficients(lx: &mut Lexer) -> Result<Vec<Complex64>, ModelError> {
    let mut out = Vec::new();
    while matches!(lx.peek(), Some(Tok::Num(_)) | Some(Tok::Sym('['))) {
        out.push(coefficient(lx)?);
    }
    Ok(out)
}

fn chi(lx: &mut Lexer) -> Result<ConvexChi, ModelError> {
    let name = lx.ident()?;
    let kind = match name.as_str() {
        "neginv" => ChiKind::NegInverse,
        "neglogneg" => ChiKind::NegLogNeg,
        "negpow" => ChiKind::NegPowNeg { alpha: lx.number()? },
        "iter" => ChiKind::IteratedT { m: lx.integer()? },
        "affine" => {
            let slope = lx.number()?;
            let intercept = lx.number()?;
            ChiKind::AffineIncreasing { slope, intercept }
        }
        other => return lx.err(format!("unknown outer function '{other}'")),
    };
    let gamma = if matches!(lx.peek(), Some(Tok::Ident(s)) if s == "gamma") {
        lx.next();
        lx.number()?
    } else {
        ConvexChi::default_gamma(kind)
    };
    ConvexChi::new(kind, gamma)
}

pub(crate) fn expr(lx: &mut Lexer) -> Result<PshExpr, ModelError> {
    let name = lx.ident()?;
    lx.expect_sym('(')?;
    let e = match name.as_str() {
        "const" => PshExpr::constant(lx.number()?)?,
        "logabs" => {
            let kind = lx.ident()?;
            match kind.as_str() {
                "poly" => PshExpr::log_abs(Polynomial::univariate(&coefficients(lx)?)?),
                "mpoly" => {
                    let n = lx.integer()? as usize;
                    let mut terms = Vec::new();
                    while lx.at_sym('{') {
                        lx.expect_sym('{')?;
                        let c = coefficient(lx)?;
                        let e = (0..n).map(|_| lx.integer()).collect::<Result<Vec<_>, _>>()?;
                        lx.expect_sym('}')?;
                        terms.push((c, e));
                    }
                    PshExpr::log_abs(Polynomial::new(n, terms)?)
                }
                other => return lx.err(format!("unknown polynomial form '{other}'")),
            }
        }
        "lognorm" => {
            let center = Point::new(lx.numbers())?;
            let coords = if lx.at_sym('|') {
                lx.expect_sym('|')?;
                let idx = lx.numbers();
                let mut out = Vec::new();
                for j in idx {
                    if j < 1.0 || j.fract() != 0.0 {
                        return lx.err(format!("bad coordinate index {j}"));
                    }
                    out.push(j as usize - 1);
                }
                Some(out)
            } else {
                None
            };
            PshExpr::log_norm(center, coords)?
        }
        "sum" => {
            let mut terms = vec![(lx.number()?, expr(lx)?)];
            while lx.at_sym(',') {
                lx.expect_sym(',')?;
                terms.push((lx.number()?, expr(lx)?));
            }
            PshExpr::sum(terms)?
        }
        "max" => {
            let mut children = vec![expr(lx)?];
            while lx.at_sym(',') {
                lx.expect_sym(',')?;
                children.push(expr(lx)?);
            }
            PshExpr::max(children)?
        }
        "scale" | "add" => {
            let k = lx.number()?;
            lx.expect_sym(',')?;
            let child = expr(lx)?;
            if name == "scale" {
                PshExpr::scale(k, child)?
            } else {
                PshExpr::add_const(k, child)?
            }
        }
        "compose" => {
            let c = chi(lx)?;
            lx.expect_sym(',')?;
            PshExpr::compose(c, expr(lx)?)
        }
        other => return lx.err(format!("unknown expression '{other}'")),
    };
    lx.expect_sym(')')?;
    Ok(e)
}

impl FromStr for PshExpr {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lx = Lexer::new(s)?;
        let e = expr(&mut lx)?;
        lx.finish()?;
        Ok(e)
    }
}

fn write_coef(out: &mut String, c: Complex64) {
    if c.im == 0.0 {
        let _ = write!(out, "{}", c.re);
    } else {
        let _ = write!(out, "[{} {}]", c.re, c.im);
    }
}

impl Display for ConvexChi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            ChiKind::NegInverse => f.write_str("neginv")?,
            ChiKind::NegLogNeg => f.write_str("neglogneg")?,
            ChiKind::NegPowNeg { alpha } => write!(f, "negpow {alpha}")?,
            ChiKind::IteratedT { m } => write!(f, "iter {m}")?,
            ChiKind::AffineIncreasing { slope, intercept } => write!(f, "affine {slope} {intercept}")?,
        }
        if self.gamma() != ConvexChi::default_gamma(self.kind()) {
            write!(f, " gamma {}", self.gamma())?;
        }
        Ok(())
    }
}

impl Display for PshExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(k) => write!(f, "const({k})"),
            Node::LogAbsPoly(p) => {
                let mut s = String::new();
                if let Some(coefs) = p.descending_coefficients() {
                    s.push_str("poly");
                    for c in coefs {
                        s.push(' ');
                        write_coef(&mut s, c);
                    }
                } else {
                    let _ = write!(s, "mpoly {}", p.nvars());
                    for (e, c) in p.terms() {
                        s.push_str(" {");
                        write_coef(&mut s, c);
                        for k in e {
                            let _ = write!(s, " {k}");
                        }
                        s.push('}');
                    }
                }
                write!(f, "logabs({s})")
            }
            Node::LogNorm(l) => {
                write!(f, "lognorm({}", l.center())?;
                if l.coords().len() != l.center().dim() {
                    f.write_str(" |")?;
                    for j in l.coords() {
                        write!(f, " {}", j + 1)?;
                    }
                }
                f.write_str(")")
            }
            Node::Sum(terms) => {
                f.write_str("sum(")?;
                for (i, (w, e)) in terms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{w} {e}")?;
                }
                f.write_str(")")
            }
            Node::Max(children) => {
                f.write_str("max(")?;
                for (i, e) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(")")
            }
            Node::Scale(c, e) => write!(f, "scale({c}, {e})"),
            Node::AddConst(k, e) => write!(f, "add({k}, {e})"),
            Node::Compose(chi, e) => write!(f, "compose({chi}, {e})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(s: &str) -> PshExpr {
        s.parse().unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    #[test]
    fn examples_parse() {
        let f = parse("compose(neglogneg, logabs(poly 1 -1))");
        assert_eq!(f.to_string(), "compose(neglogneg, logabs(poly 1 -1))");
        let g = parse("logabs(poly 1 [0 -1])");
        assert_eq!(g.to_string(), "logabs(poly 1 [0 -1])");
        let h = parse("lognorm(0 0 0 0)");
        assert_eq!(h.dim(), Some(2));
        let k = parse("lognorm(0 0 1 0 | 2)");
        assert_eq!(k.to_string(), "lognorm(0 0 1 0 | 2)");
        let m = parse("logabs(mpoly 2 {1 1 0} {[0 2] 0 3})");
        assert_eq!(m.to_string(), "logabs(mpoly 2 {[0 2] 0 3} {1 1 0})");
        let c = parse("compose(negpow 0.5 gamma 2, scale(2, logabs(mpoly 2 {1 1 0})))");
        assert_eq!(c.to_string(), "compose(negpow 0.5 gamma 2, scale(2, logabs(mpoly 2 {1 1 0})))");
        let s = parse("sum(1 logabs(poly 1 0), 0.5 const(-1e-7))");
        assert_eq!(s.to_string(), "sum(1 logabs(poly 1 0), 0.5 const(-0.0000001))");
    }

    #[test]
    fn malformed_inputs_rejected() {
        for bad in [
            "",
            "logabs(poly)",
            "logabs(poly 0)",
            "const(1",
            "const(1) extra",
            "scale(-1, const(0))",
            "max(logabs(poly 1 0), lognorm(0 0 0 0))",
            "compose(iter 3 gamma 1, const(-5))",
            "lognorm(0 0 | 2)",
            "frob(1)",
            "const(1e400)",
        ] {
            assert!(bad.parse::<PshExpr>().is_err(), "{bad:?} should fail");
        }
    }

    fn num() -> impl Strategy<Value = f64> {
        prop_oneof![-100.0f64..100.0, (-5i32..5).prop_map(f64::from), Just(1e-9), Just(-0.0)]
    }

    fn positive() -> impl Strategy<Value = f64> {
        prop_oneof![0.01f64..50.0, (1i32..5).prop_map(f64::from)]
    }

    fn coef() -> impl Strategy<Value = Complex64> {
        prop_oneof![num().prop_map(|r| Complex64::new(r, 0.0)), (num(), num()).prop_map(|(a, b)| Complex64::new(a, b))]
    }

    fn leaf(n: usize) -> BoxedStrategy<PshExpr> {
        let poly = if n == 1 {
            (coef(), prop::collection::vec(coef(), 0..3))
                .prop_filter_map("zero polynomial", |(lead, rest)| {
                    let mut v = vec![lead];
                    v.extend(rest);
                    Polynomial::univariate(&v).ok().map(PshExpr::log_abs)
                })
                .boxed()
        } else {
            prop::collection::vec((coef(), prop::collection::vec(0u32..3, n)), 1..4)
                .prop_filter_map("zero polynomial", move |terms| {
                    Polynomial::new(n, terms).ok().map(PshExpr::log_abs)
                })
                .boxed()
        };
        let norm = (prop::collection::vec(num(), 2 * n), prop::collection::vec(0..n, 1..=n))
            .prop_map(|(c, s)| PshExpr::log_norm(Point::new(c).unwrap(), Some(s)).unwrap());
        prop_oneof![num().prop_map(|k| PshExpr::constant(k).unwrap()), poly, norm].boxed()
    }

    fn chi_strategy() -> impl Strategy<Value = ConvexChi> {
        prop_oneof![
            Just(ChiKind::NegInverse),
            Just(ChiKind::NegLogNeg),
            (0.05f64..0.95).prop_map(|alpha| ChiKind::NegPowNeg { alpha }),
            (1u32..4).prop_map(|m| ChiKind::IteratedT { m }),
            (0.0f64..3.0, num()).prop_map(|(slope, intercept)| ChiKind::AffineIncreasing { slope, intercept }),
        ]
        .prop_flat_map(|k| {
            let g0 = ConvexChi::default_gamma(k);
            prop_oneof![Just(g0), (g0..g0 + 5.0)].prop_map(move |g| ConvexChi::new(k, g).unwrap())
        })
    }

    pub(crate) fn tree(n: usize) -> impl Strategy<Value = PshExpr> {
        leaf(n).prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                prop::collection::vec((prop_oneof![Just(0.0), positive()], inner.clone()), 1..3)
                    .prop_map(|t| PshExpr::sum(t).unwrap()),
                prop::collection::vec(inner.clone(), 1..3).prop_map(|c| PshExpr::max(c).unwrap()),
                (positive(), inner.clone()).prop_map(|(c, e)| PshExpr::scale(c, e).unwrap()),
                (num(), inner.clone()).prop_map(|(k, e)| PshExpr::add_const(k, e).unwrap()),
                (chi_strategy(), inner).prop_map(|(c, e)| PshExpr::compose(c, e)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in (1usize..=3).prop_flat_map(tree)) {
            let text = e.to_string();
            let back: PshExpr = text.parse().unwrap();
            prop_assert_eq!(&back, &e);
            prop_assert_eq!(back.to_string(), text);
        }
    }
}
