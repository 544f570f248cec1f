//! One handler per verb. Each returns the result document and, when asked,
//! the named checks that `verify` reports.

use barydecomp_core::bounds::{
    adaptive_simpson, amgm_bound, hh_sequences, hh_weights_density, hh_weights_discrete, jensen_gap_bound,
    natural_assignment, quad_mean_func, quad_mean_poly, squeeze_bounds, two_point_gap, Func1D, HhSequences,
    PartitionWeights, PiecewisePoly,
};
use barydecomp_core::caratheodory::{check_reduction, decompose_nd, SystemND};
use barydecomp_core::convexity::{
    f2_star, gap_set, is_convex_at, is_convex_on, is_weighted_convex_at, propagate_membership,
    two_sample_membership, weighted_implies_pointwise_check, TabulatedFunction, Verdict,
};
use barydecomp_core::error::Error;
use barydecomp_core::interval::{test_bridge, test_common_point, test_connected, test_pairwise, IntervalSet};
use barydecomp_core::pointmass1d::{
    barycenter, check_decomposition, check_transport, decompose_pairs, refine_pair, transport,
};
use barydecomp_core::rational::{to_f64, Rational, Scalar};
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::sample;
use crate::wire::*;

/// Verbs in the order they are documented.
pub const VERBS: [&str; 19] = [
    "barycenter",
    "decompose",
    "refine",
    "transport",
    "reduce-nd",
    "gap-bound",
    "amgm",
    "hh-weights",
    "hh-discrete",
    "hh-seq",
    "squeeze",
    "hull",
    "gap-set",
    "check-convex-at",
    "check-weighted-convex-at",
    "propagate",
    "interval-union",
    "quad-mean",
    "verify",
];

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub exact: bool,
    pub seed: u64,
}

/// Random samples drawn per sampled check.
const SAMPLES: usize = 500;

#[derive(Default)]
pub struct Checks(Vec<(String, bool)>);

impl Checks {
    fn add(&mut self, name: &str, pass: bool) {
        self.0.push((name.to_string(), pass));
    }

    fn extend(&mut self, list: Vec<(&'static str, bool)>) {
        self.0.extend(list.into_iter().map(|(n, p)| (n.to_string(), p)));
    }

    pub fn into_vec(self) -> Vec<(String, bool)> {
        self.0
    }
}

pub struct Outcome {
    pub result: Value,
    pub checks: Checks,
}

impl Outcome {
    fn new(result: Value) -> Self {
        Outcome {
            result,
            checks: Checks::default(),
        }
    }
}

pub fn run(verb: &str, input: &Value, opts: Options, verify: bool) -> CliResult<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let rng = &mut rng;
    match verb {
        "barycenter" => cmd_barycenter(input, verify),
        "decompose" => cmd_decompose(input, verify),
        "refine" => cmd_refine(input, verify),
        "transport" => cmd_transport(input, verify),
        "reduce-nd" => cmd_reduce_nd(input, opts, verify),
        "gap-bound" => cmd_gap_bound(input, verify, rng),
        "amgm" => cmd_amgm(input, verify),
        "hh-weights" => cmd_hh_weights(input, verify),
        "hh-discrete" => cmd_hh_discrete(input, verify),
        "hh-seq" => cmd_hh_seq(input, opts, verify),
        "squeeze" => cmd_squeeze(input, opts, verify, rng),
        "hull" => cmd_hull(input, opts, verify, rng),
        "gap-set" => cmd_gap_set(input, opts, verify, rng),
        "check-convex-at" => cmd_check_convex_at(input, opts, verify, rng),
        "check-weighted-convex-at" => cmd_check_weighted(input, opts, verify, rng),
        "propagate" => cmd_propagate(input, opts, verify),
        "interval-union" => cmd_interval_union(input, verify),
        "quad-mean" => cmd_quad_mean(input, verify),
        "verify" => cmd_verify(input, opts),
        other => schema(format!("unknown verb `{other}`")),
    }
}

fn cmd_verify(input: &Value, opts: Options) -> CliResult<Outcome> {
    let verb = field(input, "verb")?
        .as_str()
        .map_or_else(|| schema("`verb` must be a string"), Ok)?;
    if verb == "verify" || !VERBS.contains(&verb) {
        return schema(format!("cannot verify verb `{verb}`"));
    }
    let inner = run(verb, field(input, "input")?, opts, true)?;
    let checks = inner.checks.into_vec();
    let all_pass = checks.iter().all(|(_, p)| *p);
    Ok(Outcome::new(json!({
        "verb": verb,
        "result": inner.result,
        "checks": checks_json(&checks),
        "all_pass": all_pass,
    })))
}

fn cmd_barycenter(input: &Value, verify: bool) -> CliResult<Outcome> {
    let s = system(field(input, "system")?, "system")?;
    let c = barycenter(&s);
    let mut out = Outcome::new(json!({ "barycenter": rat_json(&c), "total_mass": rat_json(&s.total_mass()) }));
    if verify {
        let moment: Rational = s.points().iter().map(|(x, m)| m * (x - &c)).sum();
        out.checks.add("moment_balance", moment.is_zero());
        out.checks
            .add("within_hull", s.min_position() <= &c && &c <= s.max_position());
    }
    Ok(out)
}

fn cmd_decompose(input: &Value, verify: bool) -> CliResult<Outcome> {
    let s = system(field(input, "system")?, "system")?;
    let d = decompose_pairs(&s);
    let mut out = Outcome::new(decomposition_json(&d));
    if verify {
        out.checks.extend(check_decomposition(&s, &d));
    }
    Ok(out)
}

fn cmd_refine(input: &Value, verify: bool) -> CliResult<Outcome> {
    let a = rational(field(input, "a")?, "a")?;
    let b = rational(field(input, "b")?, "b")?;
    let p = rational(field(input, "p")?, "p")?;
    let q = rational(field(input, "q")?, "q")?;
    let targets = array(field(input, "targets")?, "targets")?
        .iter()
        .map(|t| Ok((rational(field(t, "pos")?, "pos")?, rational(field(t, "mass")?, "mass")?)))
        .collect::<CliResult<Vec<_>>>()?;
    let split = refine_pair(&a, &b, &p, &q, &targets)?;
    let items: Vec<Value> = targets
        .iter()
        .zip(&split)
        .map(|((c, _), (pi, qi))| json!({ "target": rat_json(c), "p": rat_json(pi), "q": rat_json(qi) }))
        .collect();
    let mut out = Outcome::new(json!({ "split": items }));
    if verify {
        let sum_p: Rational = split.iter().map(|(x, _)| x).sum();
        let sum_q: Rational = split.iter().map(|(_, y)| y).sum();
        out.checks.add("left_mass", sum_p == p);
        out.checks.add("right_mass", sum_q == q);
        out.checks.add(
            "target_masses",
            split.iter().zip(&targets).all(|((pi, qi), (_, w))| &(pi + qi) == w),
        );
        out.checks.add(
            "target_means",
            split
                .iter()
                .zip(&targets)
                .all(|((pi, qi), (c, _))| pi * &a + qi * &b == (pi + qi) * c),
        );
        out.checks.add(
            "nonnegative",
            split.iter().all(|(pi, qi)| !pi.is_negative() && !qi.is_negative()),
        );
    }
    Ok(out)
}

fn cmd_transport(input: &Value, verify: bool) -> CliResult<Outcome> {
    let outer = system(field(input, "outer")?, "outer")?;
    let inner = system(field(input, "inner")?, "inner")?;
    let m = transport(&outer, &inner)?;
    let mut out = Outcome::new(json!({
        "rows": rats_json(outer.positions()),
        "cols": rats_json(inner.positions()),
        "matrix": m.iter().map(|r| rats_json(r)).collect::<Vec<_>>(),
    }));
    if verify {
        out.checks.extend(check_transport(&outer, &inner, &m));
    }
    Ok(out)
}

fn reduce_nd_with<T: Scalar>(
    input: &Value,
    verify: bool,
    parse: impl Fn(&Value, &str) -> CliResult<T>,
    emit: impl Fn(&T) -> Value,
) -> CliResult<Outcome> {
    let dim = uint(field(input, "dim")?, "dim")?;
    let points = array(field(input, "points")?, "points")?
        .iter()
        .map(|p| {
            let pos = array(field(p, "pos")?, "pos")?
                .iter()
                .map(|x| parse(x, "pos"))
                .collect::<CliResult<Vec<T>>>()?;
            Ok((pos, parse(field(p, "mass")?, "mass")?))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let s = SystemND::new(dim, points)?;
    let r = decompose_nd(&s);
    let mut out = Outcome::new(json!({
        "mode": if T::EXACT { "exact" } else { "float" },
        "barycenter": s.barycenter().iter().map(&emit).collect::<Vec<_>>(),
        "components": reduction_json(&r, &emit),
    }));
    if verify {
        out.checks.extend(check_reduction(&s, &r));
    }
    Ok(out)
}

fn cmd_reduce_nd(input: &Value, opts: Options, verify: bool) -> CliResult<Outcome> {
    if opts.exact {
        reduce_nd_with::<Rational>(input, verify, rational, rat_json)
    } else {
        reduce_nd_with::<f64>(input, verify, real, |x| real_json(*x))
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn cmd_gap_bound(input: &Value, verify: bool, rng: &mut ChaCha8Rng) -> CliResult<Outcome> {
    let f = func(field(input, "f")?)?;
    let a = real(field(input, "a")?, "a")?;
    let b = real(field(input, "b")?, "b")?;
    let g = jensen_gap_bound(&f, a, b)?;
    let mut out = Outcome::new(json!({
        "c_star": real_json(g.c_star),
        "p": real_json(g.p),
        "q": real_json(g.q),
        "gap": real_json(g.gap),
        "plateau": g.plateau,
        "derivative_approximated": g.derivative_approximated,
    }));
    if verify {
        out.checks.add("p_plus_q", close(g.p + g.q, 1.0, 1e-15));
        out.checks.add("c_star_in_interval", a <= g.c_star && g.c_star <= b);
        out.checks.add("attained", close(two_point_gap(&f, a, b, g.p), g.gap, 1e-12));
        if !g.plateau {
            let slope = (f.eval(b) - f.eval(a)) / (b - a);
            let tol = if g.derivative_approximated { 1e-4 } else { 1e-6 };
            out.checks.add("secant_condition", close(f.deriv(g.c_star), slope, tol));
        }
        if f.convexity_claim {
            let scale = f.eval(a).abs().max(f.eval(b).abs()).max(1.0);
            let ok = (0..SAMPLES).all(|_| {
                let n = rng.gen_range(1..=8);
                let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(a..=b)).collect();
                let ws: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
                let total: f64 = ws.iter().sum();
                let mean: f64 = xs.iter().zip(&ws).map(|(x, w)| x * w).sum::<f64>() / total;
                let avg: f64 = xs.iter().zip(&ws).map(|(x, w)| f.eval(*x) * w).sum::<f64>() / total;
                let gap = avg - f.eval(mean);
                gap >= -1e-12 * scale && gap <= g.gap + 1e-12 * scale
            });
            out.checks.add("sampled_envelope", ok);
        }
    }
    Ok(out)
}

fn cmd_amgm(input: &Value, verify: bool) -> CliResult<Outcome> {
    let r = real(field(input, "r")?, "r")?;
    let m = amgm_bound(r)?;
    let mut out = Outcome::new(json!({
        "rho": real_json(m.rho),
        "ratio_bound": real_json(m.ratio_bound),
        "weight_a": real_json(m.weight_a),
        "weight_b": real_json(m.weight_b),
    }));
    if verify {
        out.checks.add("weights_sum_one", close(m.weight_a + m.weight_b, 1.0, 1e-12));
        out.checks.add(
            "weights_in_unit_interval",
            (0.0..1.0).contains(&m.weight_a) && m.weight_a > 0.0 && m.weight_b > 0.0 && m.weight_b < 1.0,
        );
        out.checks.add("ratio_at_least_one", m.ratio_bound >= 1.0);
        out.checks.add("ratio_below_cap", m.ratio_bound < 1.0 + r * r / 8.0);
        let neg_log = Func1D::named("neg_log")?;
        let g = jensen_gap_bound(&neg_log, 1.0, 1.0 + r)?;
        out.checks
            .add("consistent_with_gap_bound", close(g.gap.exp(), m.ratio_bound, 1e-12));
    }
    Ok(out)
}

fn weights_json(w: &PartitionWeights) -> Value {
    json!({ "partition": rats_json(&w.partition), "weights": rats_json(&w.weights), "mean": rat_json(&w.mean) })
}

fn weight_laws(checks: &mut Checks, w: &PartitionWeights) {
    checks.add("weights_sum_one", w.weights.iter().sum::<Rational>().is_one());
    checks.add("nonnegative", w.weights.iter().all(|x| !x.is_negative()));
}

fn cmd_hh_weights(input: &Value, verify: bool) -> CliResult<Outcome> {
    let partition = rationals(field(input, "partition")?, "partition")?;
    let (c0, cn) = match (partition.first(), partition.last()) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        _ => return Err(Error::InvalidPartition.into()),
    };
    let density = match opt_field(input, "density") {
        None => PiecewisePoly::uniform(c0.clone(), cn.clone())?,
        Some(Value::String(s)) if s == "uniform" => PiecewisePoly::uniform(c0.clone(), cn.clone())?,
        Some(v) => poly(v)?,
    };
    let w = hh_weights_density(&partition, &density)?;
    let mut out = Outcome::new(weights_json(&w));
    if verify {
        weight_laws(&mut out.checks, &w);
        out.checks
            .add("first_moment", w.mean == density.integral_moment(&c0, &cn, 1)?);
        let second = density.integral_moment(&c0, &cn, 2)?;
        let upper = w.upper(|c: &Rational| c * c);
        out.checks
            .add("sandwich_square", &w.mean * &w.mean <= second && second <= upper);
        let lam = |x: f64| density.eval_f64(x).unwrap_or(0.0);
        let integral = adaptive_simpson(&|x| lam(x) * x.exp(), to_f64(&c0), to_f64(&cn), 1e-12);
        let upper = w.upper(|c: &Rational| to_f64(c).exp());
        out.checks.add(
            "sandwich_exp",
            to_f64(&w.mean).exp() <= integral + 1e-9 && integral <= upper + 1e-9,
        );
    }
    Ok(out)
}

fn cmd_hh_discrete(input: &Value, verify: bool) -> CliResult<Outcome> {
    let partition = rationals(field(input, "partition")?, "partition")?;
    let s = system(field(input, "system")?, "system")?;
    let assignment = match opt_field(input, "assignment") {
        None => natural_assignment(&partition, &s)?,
        Some(v) => array(v, "assignment")?
            .iter()
            .map(|cell| array(cell, "assignment")?.iter().map(|i| uint(i, "assignment")).collect())
            .collect::<CliResult<Vec<Vec<usize>>>>()?,
    };
    let w = hh_weights_discrete(&partition, &s, &assignment)?;
    let mut result = weights_json(&w);
    result["assignment"] = json!(assignment);
    let mut out = Outcome::new(result);
    if verify {
        weight_laws(&mut out.checks, &w);
        let c = barycenter(&s);
        out.checks.add("first_moment", w.mean == c);
        for (name, f) in [
            ("sandwich_square", Box::new(|x: &Rational| x * x) as Box<dyn Fn(&Rational) -> Rational>),
            ("sandwich_abs_at_mean", Box::new(move |x: &Rational| (x - &c).abs())),
        ] {
            let mid: Rational = s.points().iter().map(|(x, m)| m * f(x)).sum();
            out.checks.add(name, f(&w.mean) <= mid && mid <= w.upper(&f));
        }
    }
    Ok(out)
}

fn sequences_json<T>(seq: &HhSequences<T>, emit: impl Fn(&T) -> Value) -> (Value, Value) {
    let list = |v: &[(usize, T)]| {
        Value::Array(v.iter().map(|(n, x)| json!({ "n": n, "value": emit(x) })).collect())
    };
    (list(&seq.inner), list(&seq.outer))
}

fn sequence_checks<T: Scalar>(checks: &mut Checks, seq: &HhSequences<T>, convex: bool) {
    if !convex {
        return;
    }
    checks.add("inner_increasing", seq.inner.windows(2).all(|w| w[0].1 <= w[1].1));
    checks.add("outer_decreasing", seq.outer.windows(2).all(|w| w[0].1 >= w[1].1));
    let max_inner = seq.inner.last().map(|x| x.1.clone());
    let min_outer = seq.outer.last().map(|x| x.1.clone());
    if let (Some(i), Some(o)) = (max_inner, min_outer) {
        checks.add("bracketing", i <= o);
    }
}

fn cmd_hh_seq(input: &Value, opts: Options, verify: bool) -> CliResult<Outcome> {
    let f = func(field(input, "f")?)?;
    let n_max = uint(field(input, "n_max")?, "n_max")?;
    let (a, b) = (field(input, "a")?, field(input, "b")?);
    let (ra, rb) = (rational(a, "a")?, rational(b, "b")?);
    if ra >= rb {
        return Err(Error::EmptyInterval.into());
    }
    let mut out;
    if opts.exact {
        if f.eval_exact(&ra).is_none() || f.eval_exact(&rb).is_none() {
            return Err(Error::InvalidFunction(format!("`{}` has no exact evaluator on [{ra}, {rb}]", f.name())).into());
        }
        let seq = hh_sequences(|x: &Rational| f.eval_exact(x).expect("checked on the interval"), &ra, &rb, n_max);
        let (inner, outer) = sequences_json(&seq, rat_json);
        out = Outcome::new(json!({ "mode": "exact", "inner": inner, "outer": outer }));
        if verify {
            sequence_checks(&mut out.checks, &seq, f.convexity_claim);
        }
    } else {
        let (fa, fb) = (to_f64(&ra), to_f64(&rb));
        let seq = hh_sequences(|x: &f64| f.eval(*x), &fa, &fb, n_max);
        let (inner, outer) = sequences_json(&seq, |x| real_json(*x));
        out = Outcome::new(json!({ "mode": "float", "inner": inner, "outer": outer }));
        if verify {
            sequence_checks(&mut out.checks, &seq, f.convexity_claim);
        }
    }
    if verify && f.convexity_claim && n_max >= 2 {
        let mean = quad_mean_func(&f, &IntervalSet::union([&barydecomp_core::interval::IntervalE::closed(ra, rb)]))?;
        let last = |key: &str| {
            out.result[key]
                .as_array()
                .and_then(|v| v.last())
                .and_then(|e| real(&e["value"], key).ok())
                .unwrap_or(f64::NAN)
        };
        let (i, o) = (last("inner"), last("outer"));
        out.checks.add("brackets_quad_mean", i <= mean + 1e-9 && mean <= o + 1e-9);
    }
    Ok(out)
}

fn cmd_squeeze(input: &Value, opts: Options, verify: bool, rng: &mut ChaCha8Rng) -> CliResult<Outcome> {
    let pair = |key: &str| -> CliResult<(Rational, Rational)> {
        let v = rationals(field(input, key)?, key)?;
        match v.as_slice() {
            [a, b] => Ok((a.clone(), b.clone())),
            _ => schema(format!("`{key}` must hold two numbers")),
        }
    };
    let (a0, b0) = pair("inner")?;
    let (a1, b1) = pair("outer")?;
    let c = rational(field(input, "c")?, "c")?;
    let f = opt_field(input, "f").map(func).transpose()?;
    let values: Vec<Rational> = match (&f, opt_field(input, "values")) {
        (Some(f), _) => [&a0, &b0, &a1, &b1]
            .iter()
            .map(|x| func_value(f, x, opts.exact).ok_or_else(|| Error::MissingValue(x.to_string()).into()))
            .collect::<CliResult<_>>()?,
        (None, Some(v)) => rationals(v, "values")?,
        (None, None) => return schema("squeeze needs `f` or `values`"),
    };
    if values.len() != 4 {
        return schema("`values` must hold f(a0), f(b0), f(a1), f(b1)");
    }
    let sq = squeeze_bounds((&a0, &b0), (&a1, &b1), [&values[0], &values[1], &values[2], &values[3]], &c)?;
    let mut out = Outcome::new(json!({
        "lower": rat_json(&sq.lower),
        "upper": rat_json(&sq.upper),
        "inner_weights": [rat_json(&sq.inner_weights.0), rat_json(&sq.inner_weights.1)],
        "outer_weights": [rat_json(&sq.outer_weights.0), rat_json(&sq.outer_weights.1)],
    }));
    if verify {
        let (p0, q0) = &sq.inner_weights;
        let (p1, q1) = &sq.outer_weights;
        out.checks.add("inner_mean", p0 * &a0 + q0 * &b0 == c && (p0 + q0).is_one());
        out.checks.add("outer_mean", p1 * &a1 + q1 * &b1 == c && (p1 + q1).is_one());
        if let Some(f) = f.filter(|f| f.convexity_claim) {
            out.checks.add("lower_le_upper", sq.lower <= sq.upper);
            let (lo, hi) = (to_f64(&sq.lower), to_f64(&sq.upper));
            let ok = (0..SAMPLES).all(|_| {
                let k = rng.gen_range(1..=3);
                let pairs: Vec<_> = (0..k)
                    .map(|_| (sample::rat_between(rng, &a1, &a0), sample::rat_between(rng, &b0, &b1)))
                    .collect();
                let pts = sample::mix_pairs(rng, &pairs, &c);
                let v: f64 = pts
                    .iter()
                    .map(|(x, m)| to_f64(m) * to_f64(&func_value(&f, x, opts.exact).unwrap_or_default()))
                    .sum();
                let tol = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
                lo - tol <= v && v <= hi + tol
            });
            out.checks.add("sampled_mixtures", ok);
        }
    }
    Ok(out)
}

/// `Σλf(x)` over a tabulated domain.
fn mix_value(f: &TabulatedFunction, pts: &[(Rational, Rational)]) -> Rational {
    pts.iter()
        .map(|(x, m)| m * f.value_at(x).expect("sampled from the domain"))
        .sum()
}

/// Random three-point mixtures over `f`'s domain with mean `c`.
fn three_point_values(f: &TabulatedFunction, c: &Rational, rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    let d = f.domain();
    if d.len() < 3 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for _ in 0..n {
        let mut idx: Vec<usize> = (0..d.len()).collect::<Vec<_>>().choose_multiple(rng, 3).copied().collect();
        idx.sort_unstable();
        let xs = [&d[idx[0]], &d[idx[1]], &d[idx[2]]];
        if !(xs[0] <= c && c <= xs[2]) {
            continue;
        }
        if let Some(l) = sample::three_point(rng, xs, c) {
            out.push(
                l.iter()
                    .zip(idx)
                    .map(|(w, i)| w * &f.values()[i])
                    .sum(),
            );
        }
    }
    out
}

fn cmd_hull(input: &Value, opts: Options, verify: bool, rng: &mut ChaCha8Rng) -> CliResult<Outcome> {
    let f = tabulated(field(input, "f")?, opts.exact)?;
    let c = rational(field(input, "c")?, "c")?;
    let h = f2_star(&f, &c)?;
    let mut out = Outcome::new(json!({
        "finite_values": rats_json(&h.finite_values),
        "hull": interval_json(&h.hull),
    }));
    if verify {
        let (lo, hi) = (&h.finite_values[0], &h.finite_values[h.finite_values.len() - 1]);
        out.checks.add(
            "hull_endpoints",
            h.hull == barydecomp_core::interval::IntervalE::closed(lo.clone(), hi.clone()),
        );
        out.checks.add("sorted_distinct", h.finite_values.windows(2).all(|w| w[0] < w[1]));
        if let Some(fc) = f.value_at(&c) {
            out.checks.add("contains_f_c", h.finite_values.contains(fc));
        }
        let samples = three_point_values(&f, &c, rng, SAMPLES);
        out.checks
            .add("three_point_samples_inside", samples.iter().all(|v| h.hull.contains(v)));
    }
    Ok(out)
}

fn cmd_gap_set(input: &Value, opts: Options, verify: bool, rng: &mut ChaCha8Rng) -> CliResult<Outcome> {
    let f = tabulated(field(input, "f")?, opts.exact)?;
    let b = rationals(field(input, "B")?, "B")?;
    let g = gap_set(&f, &b)?;
    let mut out = Outcome::new(json!({ "gap_set": interval_json(&g) }));
    if verify {
        out.checks.add("contains_zero", g.contains(&Rational::zero()));
        let monotone = b
            .iter()
            .map(|c| gap_set(&f, std::slice::from_ref(c)))
            .collect::<Result<Vec<_>, _>>()?
            .iter()
            .all(|gi| g.contains_interval(gi));
        out.checks.add("monotone_in_B", monotone);
        let ok = b.iter().all(|c| {
            let fc = f.value_at(c).expect("B lies in the domain");
            three_point_values(&f, c, rng, SAMPLES / b.len().max(1) + 1)
                .iter()
                .all(|v| g.contains(&(v - fc)))
        });
        out.checks.add("three_point_gaps_inside", ok);
    }
    Ok(out)
}

fn verdict_json(v: &Verdict) -> Value {
    json!({
        "result": v.holds,
        "witness": v.witness.as_ref().map_or(Value::Null, |w| rats_json(w)),
    })
}

/// Admissible `(a, b)` pairs at `c`: `a < c < b`, plus `(c, c)` when `c ∈ D`.
fn admissible(f: &TabulatedFunction, c: &Rational) -> Vec<(Rational, Rational)> {
    let d = f.domain();
    let mut pairs = Vec::new();
    if f.value_at(c).is_some() {
        pairs.push((c.clone(), c.clone()));
    }
    for a in d.iter().filter(|x| *x < c) {
        for b in d.iter().filter(|x| *x > c) {
            pairs.push((a.clone(), b.clone()));
        }
    }
    pairs
}

fn pair_value(f: &TabulatedFunction, a: &Rational, b: &Rational, c: &Rational) -> Rational {
    if a == b {
        return f.value_at(a).expect("domain point").clone();
    }
    let p = (b - c) / (b - a);
    let q = Rational::one() - &p;
    p * f.value_at(a).expect("domain point") + q * f.value_at(b).expect("domain point")
}

fn cmd_check_convex_at(input: &Value, opts: Options, verify: bool, rng: &mut ChaCha8Rng) -> CliResult<Outcome> {
    let f = tabulated(field(input, "f")?, opts.exact)?;
    let strict = boolean(opt_field(input, "strict"), "strict", false)?;
    let c = opt_field(input, "c").map(|v| rational(v, "c")).transpose()?;
    let v = match &c {
        Some(c) => is_convex_at(&f, c, strict)?,
        None => is_convex_on(&f, strict),
    };
    let mut out = Outcome::new(verdict_json(&v));
    if !verify {
        return Ok(out);
    }
    let val = |x: &Rational| f.value_at(x).expect("witness lies in the domain").clone();
    match (&c, &v.witness) {
        (Some(c), Some(w)) => {
            let pv = pair_value(&f, &w[0], &w[1], c);
            let fc = val(c);
            out.checks
                .add("witness_violates", if strict { pv <= fc } else { pv < fc });
        }
        (None, Some(w)) => {
            let left = (val(&w[1]) - val(&w[0])) / (&w[1] - &w[0]);
            let right = (val(&w[2]) - val(&w[1])) / (&w[2] - &w[1]);
            out.checks
                .add("witness_violates", if strict { left >= right } else { left > right });
        }
        (Some(c), None) => {
            let pairs: Vec<_> = admissible(&f, c).into_iter().filter(|(a, b)| a != b).collect();
            let fc = val(c);
            let ok = pairs.is_empty()
                || (0..SAMPLES).all(|_| {
                    let k = rng.gen_range(1..=3.min(pairs.len()));
                    let chosen: Vec<_> = pairs.choose_multiple(rng, k).cloned().collect();
                    mix_value(&f, &sample::mix_pairs(rng, &chosen, c)) >= fc
                });
            out.checks.add("jensen_at_point_samples", ok);
        }
        (None, None) => {
            let ok = f.domain().iter().all(|c| is_convex_at(&f, c, strict).map_or(false, |v| v.holds));
            out.checks.add("convex_at_every_point", ok);
        }
    }
    Ok(out)
}

fn cmd_check_weighted(input: &Value, opts: Options, verify: bool, rng: &mut ChaCha8Rng) -> CliResult<Outcome> {
    let f = tabulated(field(input, "f")?, opts.exact)?;
    let strict = boolean(opt_field(input, "strict"), "strict", false)?;
    let c = rational(field(input, "c")?, "c")?;
    let v = is_weighted_convex_at(&f, &c, strict)?;
    let mut out = Outcome::new(verdict_json(&v));
    if !verify {
        return Ok(out);
    }
    if f.value_at(&c).is_some() {
        out.checks
            .add("implies_pointwise", weighted_implies_pointwise_check(&f, &c)?);
    }
    match &v.witness {
        Some(w) => {
            let inner = pair_value(&f, &w[0], &w[1], &c);
            let outer = pair_value(&f, &w[2], &w[3], &c);
            let nested = w[2] <= w[0] && w[1] <= w[3];
            let violates = if strict { inner >= outer } else { inner > outer };
            out.checks.add("witness_violates", nested && violates);
        }
        None => {
            let pairs = admissible(&f, &c);
            let ok = (0..SAMPLES).all(|_| {
                let k = rng.gen_range(1..=2.min(pairs.len()));
                let inner: Vec<_> = pairs.choose_multiple(rng, k).cloned().collect();
                let lo = inner.iter().map(|p| &p.0).min().expect("non-empty").clone();
                let hi = inner.iter().map(|p| &p.1).max().expect("non-empty").clone();
                let outer_pool: Vec<_> = pairs.iter().filter(|(a, b)| *a <= lo && *b >= hi).cloned().collect();
                let k = rng.gen_range(1..=2.min(outer_pool.len()));
                let outer: Vec<_> = outer_pool.choose_multiple(rng, k).cloned().collect();
                let vi = mix_value(&f, &sample::mix_pairs(rng, &inner, &c));
                let vo = mix_value(&f, &sample::mix_pairs(rng, &outer, &c));
                vi <= vo
            });
            out.checks.add("two_sample_dominance_samples", ok);
        }
    }
    Ok(out)
}

/// A lookup `x ↦ value` from a tabulated object or a function spec.
fn lookup(v: &Value, exact: bool) -> CliResult<Box<dyn Fn(&Rational) -> Option<Rational>>> {
    if v.get("domain").is_some() {
        let t = tabulated(v, exact)?;
        return Ok(Box::new(move |x| t.value_at(x).cloned()));
    }
    let f = func(v)?;
    Ok(Box::new(move |x| func_value(&f, x, exact)))
}

fn cmd_propagate(input: &Value, opts: Options, verify: bool) -> CliResult<Outcome> {
    let j = interval(field(input, "J")?)?;
    if opt_field(input, "outer").is_some() {
        let outer = system(field(input, "outer")?, "outer")?;
        let inner = system(field(input, "inner")?, "inner")?;
        let f = lookup(field(input, "f")?, opts.exact)?;
        let g = lookup(field(input, "g")?, opts.exact)?;
        let t = two_sample_membership(&outer, &f, &inner, &g, &j)?;
        let mut out = Outcome::new(json!({
            "value": rat_json(&t.value),
            "inside": t.inside,
            "transport": t.transport.iter().map(|r| rats_json(r)).collect::<Vec<_>>(),
            "column_values": rats_json(&t.column_values),
        }));
        if verify {
            let (on, inn) = (outer.normalized(), inner.normalized());
            out.checks.extend(check_transport(&on, &inn, &t.transport));
            let recombined: Rational = t
                .column_values
                .iter()
                .zip(inn.points())
                .map(|(v, (_, q))| v * q)
                .sum();
            out.checks.add("column_identity", recombined == t.value);
        }
        return Ok(out);
    }
    let f = tabulated(field(input, "f")?, opts.exact)?;
    let g = lookup(field(input, "g")?, opts.exact)?;
    let s = system(field(input, "system")?, "system")?;
    let p = propagate_membership(&f, &g, &j, &s)?;
    let cert = &p.certificate;
    let mut out = Outcome::new(json!({
        "value": rat_json(&p.value),
        "inside": p.inside,
        "pair_condition": p.pair_condition,
        "certificate": {
            "decomposition": decomposition_json(&cert.decomposition),
            "pair_values": rats_json(&cert.pair_values),
            "fixed_value": cert.fixed_value.as_ref().map_or(Value::Null, rat_json),
        },
    }));
    if verify {
        out.checks.add("certificate_identity", cert.recombined() == p.value);
        out.checks.extend(check_decomposition(&s, &cert.decomposition));
        out.checks
            .add("pair_condition_implies_inside", !p.pair_condition || p.inside);
    }
    Ok(out)
}

fn cmd_interval_union(input: &Value, verify: bool) -> CliResult<Outcome> {
    let family = intervals(field(input, "intervals")?, "intervals")?;
    let u = IntervalSet::union(&family);
    let mut result = json!({
        "union": u.parts().iter().map(interval_json).collect::<Vec<_>>(),
        "is_interval": u.is_single_interval(),
        "pairwise_intersecting": test_pairwise(&family),
        "connected": test_connected(&family),
    });
    if let Some(x) = opt_field(input, "point") {
        result["common_point"] = json!(test_common_point(&family, &rational(x, "point")?));
    }
    if let Some(j) = opt_field(input, "bridge") {
        result["bridge_condition"] = json!(test_bridge(&family, &interval(j)?)?);
    }
    let mut out = Outcome::new(result);
    if verify {
        out.checks.add("canonical", u.is_canonical());
        out.checks
            .add("covers_inputs", family.iter().all(|i| i.is_empty() || u.contains_interval(i)));
        let lengths: Option<Rational> = family
            .iter()
            .map(|i| if i.is_empty() { Some(Rational::zero()) } else { i.length() })
            .sum();
        if let (Some(m), Some(total)) = (u.measure(), lengths) {
            out.checks.add("measure_subadditive", m <= total);
        }
        let sufficient = test_pairwise(&family) || test_connected(&family);
        out.checks.add(
            "sufficient_conditions_hold",
            !sufficient || family.iter().all(|i| i.is_empty()) || u.is_single_interval(),
        );
    }
    Ok(out)
}

fn cmd_quad_mean(input: &Value, verify: bool) -> CliResult<Outcome> {
    let domain = IntervalSet::union(&intervals(field(input, "domain")?, "domain")?);
    let fv = field(input, "f")?;
    let mut out;
    let f = match fv {
        Value::Object(_) => {
            let p = poly(fv)?;
            let mean = quad_mean_poly(&p, &domain)?;
            out = Outcome::new(json!({ "mean": rat_json(&mean), "exact": true }));
            if verify {
                let approx = quad_mean_func(&poly_func(p.clone()), &domain)?;
                out.checks.add("simpson_agrees", close(approx, to_f64(&mean), 1e-9));
            }
            poly_func(p)
        }
        _ => {
            let f = func(fv)?;
            let mean = quad_mean_func(&f, &domain)?;
            out = Outcome::new(json!({ "mean": real_json(mean), "exact": false }));
            f
        }
    };
    if verify {
        let mean = real(&out.result["mean"], "mean")?;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for part in domain.parts() {
            let b = part.bounds().expect("canonical parts are non-empty");
            let (a, z) = (b.lo().to_f64(), b.hi().to_f64());
            for k in 0..=1000 {
                let y = f.eval(a + (z - a) * k as f64 / 1000.0);
                lo = lo.min(y);
                hi = hi.max(y);
            }
        }
        let tol = 1e-9 * lo.abs().max(hi.abs()).max(1.0);
        out.checks.add("within_sampled_range", lo - tol <= mean && mean <= hi + tol);
    }
    Ok(out)
}
