use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rational::Rational;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type ExactFn = Arc<dyn Fn(&Rational) -> Option<Rational> + Send + Sync>;

/// A real function of one variable with an optional closed-form derivative
/// and, where available, an exact evaluator on rationals.
#[derive(Clone)]
pub struct Func1D {
    name: String,
    eval: RealFn,
    deriv: Option<RealFn>,
    exact: Option<ExactFn>,
    /// Caller's claim that `f` is convex on the intervals it is used with.
    pub convexity_claim: bool,
}

impl fmt::Debug for Func1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Func1D")
            .field("name", &self.name)
            .field("deriv", &self.deriv.is_some())
            .field("exact", &self.exact.is_some())
            .field("convexity_claim", &self.convexity_claim)
            .finish()
    }
}

/// Registered function names accepted by [`Func1D::named`].
pub const REGISTRY: [&str; 6] = ["square", "abs", "exp", "neg_log", "neg_sinc", "floor_like"];

impl Func1D {
    pub fn new(name: impl Into<String>, eval: impl Fn(f64) -> f64 + Send + Sync + 'static, convex: bool) -> Self {
        Func1D {
            name: name.into(),
            eval: Arc::new(eval),
            deriv: None,
            exact: None,
            convexity_claim: convex,
        }
    }

    pub fn with_deriv(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.deriv = Some(Arc::new(d));
        self
    }

    pub fn with_exact(mut self, e: impl Fn(&Rational) -> Option<Rational> + Send + Sync + 'static) -> Self {
        self.exact = Some(Arc::new(e));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// Exact value, when the function has a rational evaluator.
    pub fn eval_exact(&self, x: &Rational) -> Option<Rational> {
        self.exact.as_ref().and_then(|e| e(x))
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// `true` when [`Func1D::deriv`] falls back to finite differences.
    pub fn derivative_is_approximate(&self) -> bool {
        self.deriv.is_none()
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match &self.deriv {
            Some(d) => d(x),
            None => {
                let h = 1e-6f64.max(1e-6 * x.abs());
                (self.eval(x + h) - self.eval(x - h)) / (2.0 * h)
            }
        }
    }

    /// `x ↦ m·x + k`.
    pub fn linear(m: Rational, k: Rational) -> Self {
        let (mf, kf) = (crate::rational::to_f64(&m), crate::rational::to_f64(&k));
        Func1D::new(format!("linear({m},{k})"), move |x| mf * x + kf, true)
            .with_deriv(move |_| mf)
            .with_exact(move |x| Some(&m * x + &k))
    }

    /// `x ↦ xᵏ` for even `k ≥ 2`.
    pub fn even_power(k: u32) -> Self {
        assert!(k >= 2 && k % 2 == 0, "even_power needs an even exponent");
        Func1D::new(format!("pow{k}"), move |x| x.powi(k as i32), true)
            .with_deriv(move |x| k as f64 * x.powi(k as i32 - 1))
            .with_exact(move |x| Some(num_traits::pow(x.clone(), k as usize)))
    }

    /// `x ↦ |x − t|`.
    pub fn abs_shifted(t: f64) -> Self {
        Func1D::new(format!("abs_shifted({t})"), move |x| (x - t).abs(), true)
            .with_deriv(move |x| if x == t { 0.0 } else { (x - t).signum() })
    }

    pub fn named(name: &str) -> Result<Self> {
        Ok(match name {
            "square" => Func1D::new("square", |x| x * x, true)
                .with_deriv(|x| 2.0 * x)
                .with_exact(|x| Some(x * x)),
            "abs" => Func1D::new("abs", f64::abs, true)
                .with_deriv(|x| if x == 0.0 { 0.0 } else { x.signum() })
                .with_exact(|x| Some(num_traits::Signed::abs(x))),
            "exp" => Func1D::new("exp", f64::exp, true).with_deriv(f64::exp),
            "neg_log" => Func1D::new("neg_log", |x| -x.ln(), true).with_deriv(|x| -1.0 / x),
            "neg_sinc" => Func1D::new(
                "neg_sinc",
                |x| if x == 0.0 { -1.0 } else { -x.sin() / x },
                false,
            )
            .with_deriv(|x| {
                if x == 0.0 {
                    0.0
                } else {
                    (x.sin() - x * x.cos()) / (x * x)
                }
            }),
            "floor_like" => Func1D::new("floor_like", f64::floor, false)
                .with_deriv(|_| 0.0)
                .with_exact(|x| Some(Rational::from_integer(x.floor().to_integer()))),
            other => return Err(Error::UnknownFunction(other.to_string())),
        })
    }
}
