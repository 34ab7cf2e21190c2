//! The subcommands. Each returns a [`Report`] or a [`CliError`].

use std::sync::Arc;

use rosen_core::cf::{
    self, convergence_estimate, enumerate_geodesic_expansions, expansion_count_bounds,
    geodesic_distance, nearest_integer_expansion, parse_cf, parse_q_prefix,
    reduce_to_geodesic_with_trace, InfiniteRosenCF, ParsedCF,
};
use rosen_core::farey::{chain_length_d, q_chain};
use rosen_core::oracle;
use rosen_core::{make_context, BoundaryPoint, Error, HeckeIndex, QContext, RosenCF, Vertex};
use serde_json::{json, Value};

use crate::render::{self, Figure};
use crate::{CliError, Options, Report};

type CmdResult = std::result::Result<Report, CliError>;

/// Splits off a leading `q=<n>` argument and settles the context.
///
/// Returns the q given explicitly (flag or leading argument) and the
/// remaining positional arguments.
fn leading_q<'a>(
    opts: &Options,
    args: &'a [String],
) -> Result<(Option<HeckeIndex>, Vec<&'a str>), CliError> {
    let mut rest: Vec<&str> = args.iter().map(String::as_str).collect();
    let mut q = opts.q;
    if let Some(first) = rest.first() {
        let (prefix, used) = parse_q_prefix(first)?;
        if let Some(p) = prefix {
            if used == first.chars().count() {
                if q.is_some_and(|flag| flag != p) {
                    return Err(Error::InvalidParameter(format!(
                        "--q {} conflicts with q={p}",
                        q.expect("checked")
                    ))
                    .into());
                }
                q = Some(p);
                rest.remove(0);
            }
        }
    }
    Ok((q, rest))
}

fn context_for(q: Option<HeckeIndex>) -> Result<Arc<QContext>, CliError> {
    let q = q.ok_or_else(|| Error::Parse {
        position: 0,
        message: "missing q (pass --q, a leading q=<n> argument, or a q= prefix)".into(),
    })?;
    Ok(make_context(q).map_err(|e| Error::Parse {
        position: 0,
        message: e.to_string(),
    })?)
}

fn one_arg<'a>(rest: &[&'a str], what: &str) -> Result<&'a str, CliError> {
    match rest {
        [a] => Ok(a),
        _ => Err(Error::Parse {
            position: 0,
            message: format!("expected exactly one {what}, got {}", rest.len()),
        }
        .into()),
    }
}

fn parse_any_cf(opts: &Options, args: &[String]) -> Result<ParsedCF, CliError> {
    let (q, rest) = leading_q(opts, args)?;
    let text = one_arg(&rest, "continued fraction")?;
    Ok(parse_cf(text, q)?)
}

fn parse_finite(opts: &Options, args: &[String]) -> Result<RosenCF, CliError> {
    match parse_any_cf(opts, args)? {
        ParsedCF::Finite(cf) => Ok(cf),
        ParsedCF::Infinite(_) => Err(Error::InvalidParameter(
            "this command needs a finite continued fraction (use `limit` for periodic ones)".into(),
        )
        .into()),
    }
}

/// A target vertex: a continued fraction (whose value is used), `inf`, or
/// a field literal such as `5/7` or `1 + lambda`.
fn parse_point(text: &str, q: Option<HeckeIndex>) -> Result<BoundaryPoint, CliError> {
    let trimmed = text.trim_start();
    let (inline_q, _) = parse_q_prefix(trimmed)?;
    if trimmed.starts_with('[') || inline_q.is_some() {
        return match parse_cf(trimmed, q)? {
            ParsedCF::Finite(cf) => {
                if let (Some(a), Some(b)) = (q, inline_q) {
                    if a != b {
                        return Err(Error::ContextMismatch {
                            left: a.to_string(),
                            right: b.to_string(),
                        }
                        .into());
                    }
                }
                Ok(cf.evaluate())
            }
            ParsedCF::Infinite(_) => Err(Error::InvalidParameter(
                "a target must be a finite continued fraction or a number".into(),
            )
            .into()),
        };
    }
    let ctx = context_for(q)?;
    Ok(BoundaryPoint::parse(&ctx, text)?)
}

fn parse_vertex(text: &str, q: Option<HeckeIndex>) -> Result<Vertex, CliError> {
    let p = parse_point(text, q)?;
    let ctx = context_for(q.or_else(|| context_of(&p)))?;
    Ok(Vertex::from_point(&ctx, &p)?)
}

fn context_of(p: &BoundaryPoint) -> Option<HeckeIndex> {
    p.finite().map(|x| x.context().q())
}

/// Exact value, radical form and a labelled decimal.
fn value_json(p: &BoundaryPoint, bits: u64) -> Value {
    match p {
        BoundaryPoint::Infinity => json!({ "exact": "inf" }),
        BoundaryPoint::Finite(x) => {
            let digits = ((bits as f64) * std::f64::consts::LOG10_2).floor() as usize;
            json!({
                "exact": x.to_string(),
                "coeffs": json!(x)["coeffs"].clone(),
                "radical": x.radical_form(),
                "decimal": x.approximate(bits + 8).decimal(digits.saturating_sub(1)),
                "precision_bits": bits,
            })
        }
    }
}

fn cf_json(cf: &RosenCF) -> Value {
    json!({ "coeffs": cf.coeffs(), "text": cf.to_string() })
}

fn exact_strings(points: impl IntoIterator<Item = BoundaryPoint>) -> Vec<String> {
    points.into_iter().map(|p| p.to_string()).collect()
}

fn write_svg(opts: &Options, figure: &Figure) -> Result<Option<String>, CliError> {
    let Some(path) = &opts.svg else {
        return Ok(None);
    };
    std::fs::write(path, render::svg(figure)).map_err(|e| CliError::Io(path.clone(), e))?;
    Ok(Some(path.display().to_string()))
}

fn path_points(cf: &RosenCF) -> Vec<BoundaryPoint> {
    cf.convergents()
        .vertices()
        .iter()
        .map(|v| v.point().clone())
        .collect()
}

pub fn eval(opts: &Options, args: &[String]) -> CmdResult {
    let cf = parse_finite(opts, args)?;
    let value = cf.evaluate();
    let convergents = exact_strings(path_points(&cf).into_iter().skip(1));
    let svg = write_svg(opts, &Figure::path(cf.context(), path_points(&cf)))?;
    Ok(Report {
        q: cf.context().q(),
        inputs: json!({ "cf": cf_json(&cf) }),
        outputs: json!({
            "value": value_json(&value, opts.precision_bits),
            "convergents": convergents,
            "length": cf.len(),
            "svg": svg,
        }),
        summary: format!("{cf} = {value}"),
    })
}

pub fn expand(opts: &Options, args: &[String]) -> CmdResult {
    let (q, rest) = leading_q(opts, args)?;
    let text = one_arg(&rest, "target")?;
    let y = parse_vertex(text, q)?;
    let ctx = y.context();
    let expansion = nearest_integer_expansion(ctx, y.point())?;
    let distance = oracle::distance(&Vertex::infinity(ctx), &y)?;
    let svg = write_svg(opts, &Figure::path(ctx, path_points(&expansion)))?;
    Ok(Report {
        q: ctx.q(),
        inputs: json!({ "target": value_json(y.point(), opts.precision_bits) }),
        outputs: json!({
            "expansion": cf_json(&expansion),
            "length": expansion.len(),
            "oracle_distance": distance,
            "agrees": expansion.len() == distance,
            "svg": svg,
        }),
        summary: format!(
            "{y} = {expansion} (length {}, distance {distance})",
            expansion.len()
        ),
    })
}

pub fn check(opts: &Options, args: &[String]) -> CmdResult {
    let cf = parse_finite(opts, args)?;
    let report = cf::check_geodesic(&cf)?;
    let cross = if opts.oracle || report.via_oracle {
        let o = oracle::is_geodesic_oracle(&cf)?;
        Some(json!({ "oracle": o, "agrees": o == report.geodesic }))
    } else {
        None
    };
    Ok(Report {
        q: cf.context().q(),
        inputs: json!({ "cf": cf_json(&cf) }),
        outputs: json!({
            "geodesic": report.geodesic,
            "reason": report.reason(),
            "violation": report.violation,
            "via_oracle": report.via_oracle,
            "cross_check": cross,
        }),
        summary: match report.reason() {
            None => format!("{cf} is geodesic"),
            Some(r) => format!("{cf} is not geodesic: {r}"),
        },
    })
}

pub fn reduce(opts: &Options, args: &[String]) -> CmdResult {
    let cf = parse_finite(opts, args)?;
    let (reduced, steps) = reduce_to_geodesic_with_trace(&cf)?;
    let preserved = reduced.evaluate() == cf.evaluate();
    let cross = if opts.oracle {
        let y = Vertex::from_group(&cf.matrix());
        let d = oracle::distance(&Vertex::infinity(cf.context()), &y)?;
        Some(json!({ "oracle_distance": d, "agrees": d == reduced.len() }))
    } else {
        None
    };
    Ok(Report {
        q: cf.context().q(),
        inputs: json!({ "cf": cf_json(&cf) }),
        outputs: json!({
            "reduced": cf_json(&reduced),
            "length": reduced.len(),
            "steps": steps,
            "value_preserved": preserved,
            "value": value_json(&reduced.evaluate(), opts.precision_bits),
            "cross_check": cross,
        }),
        summary: format!("{cf} -> {reduced} in {} step(s)", steps.len()),
    })
}

pub fn enumerate(opts: &Options, args: &[String]) -> CmdResult {
    let (q, rest) = leading_q(opts, args)?;
    let text = one_arg(&rest, "target")?;
    let y = parse_vertex(text, q)?;
    let all = enumerate_geodesic_expansions(&y)?;
    let bounds = expansion_count_bounds(&y)?;
    let best = bounds.best();
    let cross = if opts.oracle && !y.context().q().is_infinite() {
        let paths = oracle::all_geodesic_paths(&Vertex::infinity(y.context()), &y)?;
        Some(json!({ "oracle_paths": paths.len(), "agrees": paths.len() == all.len() }))
    } else {
        None
    };
    Ok(Report {
        q: y.context().q(),
        inputs: json!({ "target": value_json(y.point(), opts.precision_bits) }),
        outputs: json!({
            "count": all.len(),
            "expansions": all.iter().map(cf_json).collect::<Vec<_>>(),
            "length": bounds.length,
            "d_chain": bounds.d_chain,
            "bound": bounds.fibonacci_bound.map(|b| b.to_string()),
            "refined_bound": bounds.refined.map(|b| b.to_string()),
            "within_bound": best.is_none_or(|b| all.len() as u128 <= b),
            "cross_check": cross,
        }),
        summary: format!(
            "{} geodesic expansion(s) of {y}; bound {}",
            all.len(),
            best.map_or("none".into(), |b| b.to_string())
        ),
    })
}

fn endpoints(
    opts: &Options,
    args: &[String],
    allow_single: bool,
) -> Result<(Vertex, Vertex), CliError> {
    let (q, rest) = leading_q(opts, args)?;
    match rest.as_slice() {
        [y] if allow_single => {
            let y = parse_vertex(y, q)?;
            Ok((Vertex::infinity(y.context()), y))
        }
        [x, y] => {
            let x = parse_vertex(x, q)?;
            let y = parse_vertex(y, q.or(Some(x.context().q())))?;
            if x.context().q() != y.context().q() {
                return Err(Error::ContextMismatch {
                    left: x.context().q().to_string(),
                    right: y.context().q().to_string(),
                }
                .into());
            }
            Ok((x, y))
        }
        _ => Err(Error::Parse {
            position: 0,
            message: format!(
                "expected {} vertices, got {}",
                if allow_single { "one or two" } else { "two" },
                rest.len()
            ),
        }
        .into()),
    }
}

pub fn chain(opts: &Options, args: &[String]) -> CmdResult {
    let (x, y) = endpoints(opts, args, true)?;
    let chain = q_chain(&x, &y)?;
    let faces: Vec<Vec<String>> = chain
        .faces()
        .iter()
        .map(|f| exact_strings(f.vertices().iter().map(|v| v.point().clone())))
        .collect();
    let bridges: Vec<[String; 2]> = chain
        .bridges()
        .iter()
        .map(|(a, b)| [a.to_string(), b.to_string()])
        .collect();
    let geodesics = oracle::all_geodesic_paths(&x, &y)?;
    let figure = Figure::chain(
        x.context(),
        &chain,
        geodesics
            .first()
            .map(|p| p.iter().map(|v| v.point().clone()).collect()),
    );
    let svg = write_svg(opts, &figure)?;
    Ok(Report {
        q: x.context().q(),
        inputs: json!({ "x": x.to_string(), "y": y.to_string() }),
        outputs: json!({
            "d_chain": chain.len(),
            "faces": faces,
            "bridges": bridges,
            "geodesic_paths": geodesics.len(),
            "svg": svg,
        }),
        summary: format!("chain from {x} to {y}: D = {}", chain.len()),
    })
}

pub fn distance(opts: &Options, args: &[String]) -> CmdResult {
    let (x, y) = endpoints(opts, args, false)?;
    let d = oracle::distance(&x, &y)?;
    let fast = geodesic_distance(&x, &y)?;
    let d_chain = if x.context().q().is_infinite() {
        None
    } else {
        Some(chain_length_d(&x, &y)?)
    };
    Ok(Report {
        q: x.context().q(),
        inputs: json!({ "x": x.to_string(), "y": y.to_string() }),
        outputs: json!({
            "distance": d,
            "nearest_integer_length": fast,
            "agrees": d == fast,
            "d_chain": d_chain,
        }),
        summary: format!("d({x}, {y}) = {d}"),
    })
}

pub fn limit(opts: &Options, args: &[String]) -> CmdResult {
    let cf: InfiniteRosenCF = match parse_any_cf(opts, args)? {
        ParsedCF::Infinite(cf) => cf,
        ParsedCF::Finite(cf) => {
            // A finite expansion is its own limit: repeat nothing.
            return Ok(Report {
                q: cf.context().q(),
                inputs: json!({ "cf": cf_json(&cf) }),
                outputs: json!({
                    "converged": true,
                    "terms": cf.len(),
                    "limit": value_json(&cf.evaluate(), opts.precision_bits),
                }),
                summary: format!("{cf} is finite with value {}", cf.evaluate()),
            });
        }
    };
    let report = convergence_estimate(&cf, opts.tol, opts.max_n)?;
    let digits = ((opts.precision_bits as f64) * std::f64::consts::LOG10_2).floor() as usize;
    let interval = report.interval.as_ref().map(|iv| {
        json!({
            "lo": iv.lo.to_string(),
            "hi": iv.hi.to_string(),
            "estimate": iv.decimal(digits.saturating_sub(1)),
        })
    });
    Ok(Report {
        q: cf.context().q(),
        inputs: json!({ "cf": cf.to_string(), "tol": opts.tol, "max_n": opts.max_n }),
        outputs: json!({
            "converged": report.converged,
            "terms": report.terms,
            "interval": interval,
            "last_convergent": value_json(&report.last, opts.precision_bits),
            "repeated_convergent": report.repeated.as_ref().map(ToString::to_string),
        }),
        summary: match report.estimate() {
            Some(e) if report.converged => format!("{cf} -> {e:.12} after {} terms", report.terms),
            _ => format!("{cf}: no convergence within {} terms", report.terms),
        },
    })
}

pub fn render(opts: &Options, args: &[String], with_chain: bool) -> CmdResult {
    if opts.svg.is_none() {
        return Err(Error::InvalidParameter("render needs --svg OUT".into()).into());
    }
    let cf = parse_finite(opts, args)?;
    let ctx = cf.context();
    let path = path_points(&cf);
    let figure = if with_chain {
        let y = Vertex::from_group(&cf.matrix());
        let chain = q_chain(&Vertex::infinity(ctx), &y)?;
        Figure::chain(ctx, &chain, Some(path))
    } else {
        Figure::path(ctx, path)
    };
    let svg = write_svg(opts, &figure)?;
    Ok(Report {
        q: ctx.q(),
        inputs: json!({ "cf": cf_json(&cf), "chain": with_chain }),
        outputs: json!({
            "svg": svg,
            "vertices": figure.vertex_count(),
            "faces": figure.face_count(),
        }),
        summary: format!("wrote {}", svg.unwrap_or_default()),
    })
}
