//! The six subcommands: each consumes a job file and produces a primary
//! artifact on stdout plus optional files under `--out`.

use cfclosure_core::cf::{convergents, PerturbedCf};
use cfclosure_core::closure::{
    cauchy_params, circle_geometry, det_product, empirical_distribution, sequential_closure,
    ClosureDescriptor, ClosureKind, ClosureOptions, UnitaryCharacteristic,
};
use cfclosure_core::error::Error as CoreError;
use cfclosure_core::linalg::ComplexMat;
use cfclosure_core::mobius::MobiusMap;
use cfclosure_core::qseries::{product_identity_check, qcf_mobius, QParams};
use cfclosure_core::recurrence::{
    poincare_asymptotics, rs_approximant, rs_asymptotics, PoincareRecurrence, RsClosure, RsMatrixCf,
};
use cfclosure_core::sphere::SpherePoint;
use cfclosure_core::subseq::{target_indices, TargetSelector};
use cfclosure_core::C64;

use crate::emit::{csv_float, csv_point, Json};
use crate::job::{complex, FractionSpec, JobFile, RecurrenceSpec};
use crate::svg::Canvas;
use crate::{CliError, Ctx};

pub struct Output {
    pub stdout: String,
    pub files: Vec<(String, String)>,
}

impl Output {
    fn text(stdout: String) -> Output {
        Output {
            stdout,
            files: Vec::new(),
        }
    }
}

fn closure_opts(ctx: &Ctx) -> ClosureOptions {
    ClosureOptions {
        tol: ctx.tol,
        max_iter: ctx.max_iter,
        line_tol: 1e-6,
        modulus_tol: 1e-10,
    }
}

fn need_fraction(job: &JobFile) -> Result<&FractionSpec, CliError> {
    job.fraction
        .as_ref()
        .ok_or_else(|| CliError::invalid("job must contain a \"fraction\" section".into()))
}

/// Maps a core failure to the exit-code discipline: iteration caps become
/// exit 3 with an uncertified partial report, anything else is exit 2.
fn core_err(e: CoreError) -> CliError {
    match e {
        CoreError::NonConvergence { steps, residual } => CliError::NonConvergence {
            partial: Json::Obj(vec![
                ("uncertified", Json::Bool(true)),
                (
                    "reason",
                    Json::Str(format!("no convergence after {steps} steps")),
                ),
                ("residual", Json::Num(residual)),
            ])
            .render(),
        },
        other => CliError::invalid(format!("{other}")),
    }
}

fn characteristic_json(c: &UnitaryCharacteristic) -> Json {
    match c {
        UnitaryCharacteristic::Zero => Json::Str("zero".into()),
        UnitaryCharacteristic::FullCircle => Json::Str("full-circle".into()),
        UnitaryCharacteristic::RootsOfUnity(m) => Json::Obj(vec![
            ("kind", Json::Str("roots-of-unity".into())),
            ("order", Json::Int(*m as i64)),
        ]),
        UnitaryCharacteristic::Infinity => Json::Str("infinity".into()),
    }
}

fn map_json(h: &MobiusMap) -> Json {
    Json::Obj(vec![
        ("a", Json::complex(h.a)),
        ("b", Json::complex(h.b)),
        ("c", Json::complex(h.c)),
        ("d", Json::complex(h.d)),
    ])
}

fn descriptor_json(desc: &ClosureDescriptor) -> Json {
    let mut fields: Vec<(&'static str, Json)> = Vec::new();
    let (kind, rank, points) = match &desc.kind {
        ClosureKind::Point(p) => ("point", Json::Int(1), vec![*p]),
        ClosureKind::FiniteSet { points, rank } => {
            ("finite-set", Json::Int(*rank as i64), points.clone())
        }
        ClosureKind::Circle { .. } => ("circle", Json::Str("continuum".into()), Vec::new()),
        ClosureKind::Line => ("line", Json::Str("continuum".into()), Vec::new()),
    };
    fields.push(("kind", Json::Str(kind.into())));
    fields.push(("rank", rank));
    fields.push(("characteristic", characteristic_json(&desc.characteristic)));
    fields.push(("map", map_json(&desc.map)));
    if !points.is_empty() {
        fields.push((
            "points",
            Json::Arr(points.iter().map(|p| Json::sphere(*p)).collect()),
        ));
    }
    let geo = circle_geometry(&desc.map, desc.map.det(), 1e-6);
    fields.push((
        "center",
        geo.center.map(Json::complex).unwrap_or(Json::Null),
    ));
    fields.push(("radius", geo.radius.map(Json::Num).unwrap_or(Json::Null)));
    fields.push(("hi", geo.hi.map(Json::sphere).unwrap_or(Json::Null)));
    fields.push(("lo", geo.lo.map(Json::sphere).unwrap_or(Json::Null)));
    fields.push(("uniform_concentration", Json::Bool(geo.uniform)));
    fields.push((
        "cauchy",
        match &desc.distribution {
            Some(p) => Json::Obj(vec![
                ("x0", Json::complex(p.x0)),
                ("delta", Json::complex(p.delta)),
                ("real_line", Json::Bool(p.real_line)),
            ]),
            None => Json::Null,
        },
    ));
    fields.push((
        "det_residual",
        desc.det_residual.map(Json::Num).unwrap_or(Json::Null),
    ));
    fields.push(("rate_certified", Json::Bool(desc.rate_certified)));
    fields.push(("uncertified", Json::Bool(false)));
    Json::Obj(fields)
}

pub fn cmd_closure(job: &JobFile, ctx: &Ctx) -> Result<Output, CliError> {
    let pcf = need_fraction(job)?.to_fraction()?;
    let desc = sequential_closure(&pcf, &closure_opts(ctx)).map_err(core_err)?;
    Ok(Output::text(descriptor_json(&desc).render()))
}

pub fn cmd_approximants(job: &JobFile, ctx: &Ctx) -> Result<Output, CliError> {
    let pcf = need_fraction(job)?.to_fraction()?;
    let count = job.count.unwrap_or(50);
    let desc = sequential_closure(&pcf, &closure_opts(ctx)).map_err(core_err)?;
    let mut csv = String::from("n,re_f,im_f,re_predicted,im_predicted,chordal_gap\n");
    // Row n holds the truncation after n+1 partial quotients, so row 0 is
    // b0 + a1/b1 and the prediction is h(lambda^{n+2}).
    let mut stream = convergents(&pcf).skip(1);
    for n in 0..count {
        let conv = stream
            .next()
            .ok_or_else(|| CliError::invalid("approximant stream ended".into()))?
            .map_err(core_err)?;
        let f = conv.approximant().map_err(core_err)?;
        let predicted = match &desc.kind {
            ClosureKind::Point(p) => *p,
            _ => cfclosure_core::closure::predicted_approximant(&pcf, &desc.map, conv.n),
        };
        csv.push_str(&format!(
            "{n},{},{},{}\n",
            csv_point(f),
            csv_point(predicted),
            csv_float(f.chordal(predicted))
        ));
    }
    Ok(Output::text(csv))
}

pub fn cmd_distribution(job: &JobFile, ctx: &Ctx) -> Result<Output, CliError> {
    let pcf = need_fraction(job)?.to_fraction()?;
    let count = job.count.unwrap_or(3000);
    let bins = job.bins.unwrap_or(60);
    if bins == 0 {
        return Err(CliError::invalid("bins must be positive".into()));
    }
    let desc = sequential_closure(&pcf, &closure_opts(ctx)).map_err(core_err)?;
    let hist = empirical_distribution(&pcf, &desc, count, bins)
        .map_err(|e| CliError::invalid(format!("{e}")))?;
    let mut csv = String::from("bin_lo,bin_hi,count,expected_count\n");
    for i in 0..bins {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            csv_float(hist.edges[i]),
            csv_float(hist.edges[i + 1]),
            hist.counts[i],
            csv_float(hist.expected[i] * hist.total as f64)
        ));
    }
    let mut files = Vec::new();
    if ctx.out.is_some() {
        files.push((
            "distribution.svg".to_string(),
            render_distribution_svg(&pcf, &desc, &hist, count),
        ));
    }
    Ok(Output { stdout: csv, files })
}

fn render_distribution_svg(
    pcf: &PerturbedCf,
    desc: &ClosureDescriptor,
    hist: &cfclosure_core::closure::Histogram,
    count: usize,
) -> String {
    let real_line = desc.distribution.map(|p| p.real_line).unwrap_or(false);
    if real_line {
        let params = desc.distribution.expect("line case");
        let lo = hist.edges[0];
        let hi = *hist.edges.last().expect("edges");
        let peak = params.density(params.x0.re);
        let mut canvas = Canvas::new(lo, hi, 0.0, 1.2 * peak);
        let bins = hist.counts.len();
        let width = (hi - lo) / bins as f64;
        for i in 0..bins {
            // Bar height as an empirical density.
            let density = hist.counts[i] as f64 / (hist.total as f64 * width);
            canvas.bar(hist.edges[i], hist.edges[i + 1], density, "steelblue");
        }
        let curve: Vec<(f64, f64)> = (0..=400)
            .map(|k| {
                let x = lo + (hi - lo) * k as f64 / 400.0;
                (x, params.density(x))
            })
            .collect();
        canvas.path(curve, "crimson");
        canvas.vertical_marker(params.x0.re, "black");
        canvas.finish()
    } else {
        let points: Vec<C64> = convergents(pcf)
            .take(count + 1)
            .skip(1)
            .filter_map(|c| c.ok().and_then(|c| c.approximant().ok()))
            .filter_map(|p| p.to_complex())
            .collect();
        let geo = circle_geometry(&desc.map, desc.map.det(), 1e-6);
        let (center, radius) = (
            geo.center.unwrap_or(C64::new(0.0, 0.0)),
            geo.radius.unwrap_or(1.0),
        );
        let pad = 1.4 * radius;
        let mut canvas = Canvas::new(
            center.re - pad,
            center.re + pad,
            center.im - pad,
            center.im + pad,
        );
        canvas.scatter(points, 1.2, "steelblue");
        canvas.circle_outline(center, radius, "crimson");
        if let Some(SpherePoint::Finite(hi)) = geo.hi {
            canvas.dot(hi, 4.0, "black");
        }
        if let Some(SpherePoint::Finite(lo)) = geo.lo {
            canvas.dot(lo, 4.0, "dimgray");
        }
        canvas.finish()
    }
}

pub fn cmd_subseq(job: &JobFile, ctx: &Ctx) -> Result<Output, CliError> {
    let pcf = need_fraction(job)?.to_fraction()?;
    let thetas = job
        .theta
        .clone()
        .ok_or_else(|| CliError::invalid("subseq needs a \"theta\" list".into()))?;
    let depth = job.depth.unwrap_or(8);
    let desc = sequential_closure(&pcf, &closure_opts(ctx)).map_err(core_err)?;
    if !matches!(desc.characteristic, UnitaryCharacteristic::FullCircle) {
        return Err(CliError::invalid(
            "subsequence targeting needs the full-circle case (irrational rotation)".into(),
        ));
    }
    let gamma = pcf.rotation_number();
    let settle = (0..=ctx.max_iter).find(|&s| pcf.eps(s) == 0.0);
    let mut targets = Vec::new();
    for theta in thetas {
        let sel = TargetSelector {
            gamma,
            theta,
            depth,
        };
        let idx = target_indices(&sel).map_err(|e| CliError::invalid(format!("{e}")))?;
        let target = desc
            .map
            .apply_complex(C64::from_polar(1.0, std::f64::consts::TAU * theta));
        let mut gaps = Vec::new();
        for t in &idx {
            let n = t.index as usize - 1;
            let f = match settle {
                Some(s) => pcf.approximant_tail_exact(n, s).map_err(core_err)?,
                None if n <= ctx.max_iter => {
                    cfclosure_core::cf::approximant(&pcf, n).map_err(core_err)?
                }
                None => {
                    return Err(CliError::NonConvergence {
                        partial: Json::Obj(vec![
                            ("uncertified", Json::Bool(true)),
                            (
                                "reason",
                                Json::Str(format!(
                                    "index {n} exceeds --max-iter and the tail never settles"
                                )),
                            ),
                        ])
                        .render(),
                    })
                }
            };
            gaps.push(f.chordal(target));
        }
        targets.push(Json::Obj(vec![
            ("theta", Json::Num(theta)),
            ("target", Json::sphere(target)),
            (
                "indices",
                Json::Arr(idx.iter().map(|t| Json::Int(t.index as i64)).collect()),
            ),
            (
                "denominators",
                Json::Arr(idx.iter().map(|t| Json::Int(t.denom as i64)).collect()),
            ),
            (
                "fractional_parts",
                Json::Arr(idx.iter().map(|t| Json::Num(t.frac)).collect()),
            ),
            (
                "chordal_gaps",
                Json::Arr(gaps.into_iter().map(Json::Num).collect()),
            ),
        ]));
    }
    let out = Json::Obj(vec![
        ("gamma", Json::Num(gamma)),
        ("targets", Json::Arr(targets)),
        ("uncertified", Json::Bool(false)),
    ]);
    Ok(Output::text(out.render()))
}

pub fn cmd_qeval(job: &JobFile, ctx: &Ctx) -> Result<Output, CliError> {
    let spec = need_fraction(job)?;
    if spec.p_list.is_some() || spec.q_list.is_some() {
        return Err(CliError::invalid(
            "qeval needs the geometric (x, y, q) form of the fraction".into(),
        ));
    }
    let pcf = spec.to_fraction()?;
    let params = QParams {
        q: spec.q.map(complex).unwrap_or(C64::new(0.0, 0.0)),
        alpha: pcf.alpha_value(),
        beta: pcf.beta_value(),
        x: spec.x.map(complex).unwrap_or(C64::new(0.0, 0.0)),
        y: spec.y.map(complex).unwrap_or(C64::new(0.0, 0.0)),
    };
    if params.alpha.norm() * params.beta.norm() == 0.0 {
        return Err(CliError::invalid(
            "qeval needs alpha and beta nonzero".into(),
        ));
    }
    let ra = pcf.alpha().modulus;
    let rb = pcf.beta().modulus;
    // Parabolic case: the fraction converges to the series quotient, the
    // same point for every annihilation representative.
    if (params.alpha - params.beta).norm() <= 1e-12 * ra.max(rb) {
        let v = cfclosure_core::qseries::qcf_parabolic_value(
            params.alpha,
            params.x,
            params.y,
            params.q,
            ctx.tol.min(1e-12),
        )
        .map_err(core_err)?;
        let out = Json::Obj(vec![
            ("kind", Json::Str("point".into())),
            ("rank", Json::Int(1)),
            ("characteristic", Json::Str("parabolic".into())),
            ("value", Json::complex(v)),
            ("uncertified", Json::Bool(false)),
        ]);
        return Ok(Output::text(out.render()));
    }
    let elliptic = pcf.is_elliptic(1e-10);
    if !elliptic {
        // The annihilated evaluation excludes α/β an exact integer power of
        // q; report those as unsupported.
        let ratio = (ra / rb).ln() / params.q.norm().ln();
        let k = ratio.round();
        if (ratio - k).abs() < 1e-9 && k.abs() < 1e6 {
            let q_pow = params.q.powi(k as i32);
            if (params.alpha / params.beta - q_pow).norm() < 1e-9 * q_pow.norm().max(1.0) {
                return Err(CliError::invalid(
                    "unsupported: log_q(alpha/beta) is an integer in the loxodromic case".into(),
                ));
            }
        }
    }
    let h = qcf_mobius(&params, ctx.tol.min(1e-12)).map_err(core_err)?;
    let characteristic =
        cfclosure_core::closure::unitary_characteristic_exact(ra / rb, &pcf.lambda_angle(), 1e-10);
    let (kind, rank): (&str, Json) = match characteristic {
        UnitaryCharacteristic::Zero | UnitaryCharacteristic::Infinity => ("point", Json::Int(1)),
        UnitaryCharacteristic::RootsOfUnity(m) => ("finite-set", Json::Int(m as i64)),
        UnitaryCharacteristic::FullCircle => {
            let (nc, nd) = (h.c.norm(), h.d.norm());
            if (nc - nd).abs() <= 1e-6 * nc.max(nd) {
                ("line", Json::Str("continuum".into()))
            } else {
                ("circle", Json::Str("continuum".into()))
            }
        }
    };
    let det_res = det_product(&pcf, ctx.tol.min(1e-12), ctx.max_iter)
        .ok()
        .map(|dp| (h.det() - dp).norm() / h.det().norm().max(f64::MIN_POSITIVE));
    let bmr = product_identity_check(params.q, ctx.tol.min(1e-10), ctx.max_iter)
        .map(|c| c.gap)
        .ok();
    let geo = circle_geometry(&h, h.det(), 1e-6);
    let cauchy = cauchy_params(&h, 1e-6).ok();
    let out = Json::Obj(vec![
        ("map", map_json(&h)),
        ("kind", Json::Str(kind.into())),
        ("rank", rank),
        ("characteristic", characteristic_json(&characteristic)),
        (
            "center",
            geo.center.map(Json::complex).unwrap_or(Json::Null),
        ),
        ("radius", geo.radius.map(Json::Num).unwrap_or(Json::Null)),
        ("hi", geo.hi.map(Json::sphere).unwrap_or(Json::Null)),
        ("lo", geo.lo.map(Json::sphere).unwrap_or(Json::Null)),
        (
            "cauchy",
            match cauchy {
                Some(p) => Json::Obj(vec![
                    ("x0", Json::complex(p.x0)),
                    ("delta", Json::complex(p.delta)),
                    ("real_line", Json::Bool(p.real_line)),
                ]),
                None => Json::Null,
            },
        ),
        ("det_residual", det_res.map(Json::Num).unwrap_or(Json::Null)),
        (
            "product_identity_gap",
            bmr.map(Json::Num).unwrap_or(Json::Null),
        ),
        ("uncertified", Json::Bool(false)),
    ]);
    Ok(Output::text(out.render()))
}

pub fn cmd_recurrence(job: &JobFile, ctx: &Ctx) -> Result<Output, CliError> {
    let spec = job
        .recurrence
        .as_ref()
        .ok_or_else(|| CliError::invalid("job must contain a \"recurrence\" section".into()))?;
    match spec {
        RecurrenceSpec::Poincare {
            limits,
            init,
            coeffs,
            ratio,
            window,
        } => {
            let p = limits.len();
            if init.len() != p || p == 0 {
                return Err(CliError::invalid(
                    "init and limits must have the same positive length".into(),
                ));
            }
            let limits: Vec<C64> = limits.iter().copied().map(complex).collect();
            let init: Vec<C64> = init.iter().copied().map(complex).collect();
            let coeffs: Vec<C64> = match coeffs {
                Some(c) if c.len() == p => c.iter().copied().map(complex).collect(),
                Some(_) => return Err(CliError::invalid("coeffs must have length p".into())),
                None => vec![C64::new(0.0, 0.0); p],
            };
            let ratio = ratio.map(complex).unwrap_or(C64::new(0.0, 0.0));
            if ratio.norm() >= 1.0 {
                return Err(CliError::invalid(
                    "perturbation ratio needs |ratio| < 1".into(),
                ));
            }
            let rho = ratio.norm();
            let cmax = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let rec = PoincareRecurrence {
                order: p,
                coeffs: {
                    let limits = limits.clone();
                    let coeffs = coeffs.clone();
                    move |n: usize| {
                        (0..p)
                            .map(|r| limits[r] + coeffs[r] * ratio.powi(n as i32 + 1))
                            .collect()
                    }
                },
                limits: limits.clone(),
                tail: move |n: usize| {
                    if rho == 0.0 {
                        0.0
                    } else {
                        cmax * rho.powi(n as i32 + 2) / (1.0 - rho)
                    }
                },
            };
            let window = window.map(|[a, b]| (a, b)).unwrap_or((5, 40));
            let out = poincare_asymptotics(&rec, &init, ctx.tol, ctx.max_iter, window)
                .map_err(core_err)?;
            let json = Json::Obj(vec![
                (
                    "roots",
                    Json::Arr(out.roots.iter().map(|z| Json::complex(*z)).collect()),
                ),
                (
                    "coefficients",
                    Json::Arr(out.coefficients.iter().map(|z| Json::complex(*z)).collect()),
                ),
                ("modulus", Json::Num(out.modulus)),
                (
                    "rate",
                    Json::Obj(vec![
                        ("residual_slope", Json::Num(out.rate.residual_slope)),
                        ("tail_slope", Json::Num(out.rate.tail_slope)),
                        ("n_lo", Json::Int(out.rate.n_lo as i64)),
                        ("n_hi", Json::Int(out.rate.n_hi as i64)),
                        ("points_used", Json::Int(out.rate.points_used as i64)),
                    ]),
                ),
                ("uncertified", Json::Bool(false)),
            ]);
            Ok(Output::text(json.render()))
        }
        RecurrenceSpec::Rs {
            dim,
            r,
            s,
            limit,
            coeffs,
            ratio,
            k_max,
        } => {
            let (dim, rr, ss) = (*dim, *r, *s);
            if rr + ss != dim {
                return Err(CliError::invalid("need r + s = dim".into()));
            }
            let parse_matrix = |rows: &Vec<Vec<[f64; 2]>>| -> Result<ComplexMat, CliError> {
                if rows.len() != dim || rows.iter().any(|row| row.len() != dim) {
                    return Err(CliError::invalid("matrix shape must be dim x dim".into()));
                }
                let mut entries = Vec::with_capacity(dim * dim);
                for row in rows {
                    entries.extend(row.iter().copied().map(complex));
                }
                ComplexMat::new(dim, entries).map_err(|e| CliError::invalid(format!("{e}")))
            };
            let theta = parse_matrix(limit)?;
            let coeff = match coeffs {
                Some(c) => parse_matrix(c)?,
                None => ComplexMat::zeros(dim),
            };
            let ratio = ratio.map(complex).unwrap_or(C64::new(0.0, 0.0));
            if ratio.norm() >= 1.0 {
                return Err(CliError::invalid(
                    "perturbation ratio needs |ratio| < 1".into(),
                ));
            }
            let rho = ratio.norm();
            let cnorm = coeff.norm();
            let cf = RsMatrixCf {
                dim,
                r: rr,
                s: ss,
                terms: {
                    let theta = theta.clone();
                    let coeff = coeff.clone();
                    move |k: usize| {
                        theta
                            .add(&coeff.scale(ratio.powi(k as i32)))
                            .expect("same dims")
                    }
                },
                limit: theta.clone(),
                tail: move |n: usize| {
                    if rho == 0.0 {
                        0.0
                    } else {
                        cnorm * rho.powi(n as i32 + 1) / (1.0 - rho)
                    }
                },
            };
            let asym = rs_asymptotics(&cf, ctx.tol, ctx.max_iter).map_err(core_err)?;
            let mat_json = |m: &ComplexMat| -> Json {
                Json::Arr(
                    (0..m.dim())
                        .map(|i| {
                            Json::Arr((0..m.dim()).map(|j| Json::complex(m.get(i, j))).collect())
                        })
                        .collect(),
                )
            };
            let closure = match &asym.closure {
                RsClosure::Converges(v) => Json::Obj(vec![
                    ("kind", Json::Str("converges".into())),
                    ("limit", mat_json(v)),
                ]),
                RsClosure::Parity { even, odd } => Json::Obj(vec![
                    ("kind", Json::Str("parity".into())),
                    ("even", mat_json(even)),
                    ("odd", mat_json(odd)),
                ]),
                RsClosure::AsymptoticOnly => {
                    Json::Obj(vec![("kind", Json::Str("asymptotic-only".into()))])
                }
            };
            let mut fields = vec![
                ("f", mat_json(&asym.f)),
                ("f_err", Json::Num(asym.err)),
                ("closure", closure),
            ];
            let approximants = match k_max {
                Some(k_max) => {
                    let mut arr = Vec::new();
                    for k in 1..=*k_max {
                        match rs_approximant(&cf, k, 1e-300) {
                            Ok(m) => arr.push(mat_json(&m)),
                            Err(_) => arr.push(Json::Str("singular".into())),
                        }
                    }
                    Json::Arr(arr)
                }
                None => Json::Null,
            };
            fields.push(("approximants", approximants));
            fields.push(("uncertified", Json::Bool(false)));
            Ok(Output::text(Json::Obj(fields).render()))
        }
    }
}
