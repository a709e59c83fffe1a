use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use retract_core::case_studies::{self, HullOptions};
use retract_core::geometry::{self, FaceProbeMode, ProbeOptions};
use retract_core::lp::{self, LinearSubspace};
use retract_core::modular::idempotency_screen;
use retract_core::parse::parse_vector;
use retract_core::region::Region;
use retract_core::report::{parse_domain, parse_point, show_vec, Report, RunConfig};
use retract_core::retraction::{verify_idempotent, verify_self_map};
use retract_core::straighten::ring_retract_generator;
use retract_core::verdict::Verdict;
use retract_core::{BalancedDomain, ExactComplex, PolyMap, Result, RetractError};

/// Retracts of balanced domains: gauges, projections, boundary probes and
/// straightening of polynomial retractions of the plane.
#[derive(Parser)]
#[command(name = "retract", version)]
struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Named sample count, e.g. `self_map=5000` (repeatable).
    #[arg(long = "samples", global = true, value_name = "NAME=N")]
    samples: Vec<String>,
    /// Named tolerance, e.g. `norm=1e-8` (repeatable).
    #[arg(long = "tol", global = true, value_name = "NAME=X")]
    tol: Vec<String>,
    /// Write the JSON report here (`-` for standard output).
    #[arg(long = "json", global = true, value_name = "OUT")]
    json: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Complex,
    Real,
}

#[derive(clap::Args)]
struct MapInput {
    /// Components separated by `;`, e.g. `z; z^2`.
    #[arg(long, conflicts_with = "file")]
    map: Option<String>,
    /// File with one component per line.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Minkowski gauge of a point.
    Mink {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        point: String,
    },
    /// Does a subspace or a polynomial map give a retract of the domain?
    RetractTest {
        #[arg(long)]
        domain: String,
        /// Basis vectors separated by `;`, e.g. `(1,0,0);(0,1,1/2)`.
        #[arg(long, conflicts_with_all = ["kernel", "map"])]
        subspace: Option<String>,
        /// Functionals whose common kernel is the subspace.
        #[arg(long, conflicts_with = "map")]
        kernel: Option<String>,
        #[arg(long)]
        map: Option<String>,
        /// On ℓ^p rejection, also search a grid of projections for norm one.
        #[arg(long)]
        grid: bool,
    },
    /// Conjugate a polynomial retraction of C² to a coordinate projection.
    Straighten {
        #[command(flatten)]
        input: MapInput,
    },
    /// Constants and optimizer sweep for D_h.
    DhReport {
        /// Random rib base points in the cap sweep.
        #[arg(long, default_value_t = 200)]
        sweep: usize,
    },
    /// Exact check of F ∘ F = F.
    VerifyIdempotent {
        #[command(flatten)]
        input: MapInput,
    },
    /// Supporting functionals, analytic discs in the boundary and rib genericity.
    ProbeExtremality {
        #[arg(long)]
        domain: String,
        /// Direction; it is scaled onto the boundary.
        #[arg(long)]
        point: String,
        #[arg(long, value_enum, default_value = "complex")]
        mode: Mode,
        #[arg(long, default_value_t = 1e-3)]
        radius: f64,
        /// Two face indices `j,k` for a rib genericity probe (polyhedra).
        #[arg(long)]
        faces: Option<String>,
    },
    /// Share of grid directions spanning a linear retract.
    OpenPiece {
        #[arg(long)]
        domain: String,
    },
}

fn read_map(input: &MapInput) -> Result<(String, PolyMap)> {
    let text = match (&input.map, &input.file) {
        (Some(m), _) => m.clone(),
        (None, Some(path)) => fs::read_to_string(path)
            .map_err(|e| RetractError::Invalid(format!("cannot read {}: {e}", path.display())))?,
        (None, None) => return Err(RetractError::Invalid("give --map or --file".into())),
    };
    let n = text
        .split(['\n', ';'])
        .map(str::trim)
        .filter(|s| !s.is_empty() && !s.starts_with('#'))
        .count();
    let f = PolyMap::parse(&text, n)?;
    Ok((text, f))
}

fn vectors(text: &str) -> Result<Vec<Vec<ExactComplex>>> {
    text.split(';').map(str::trim).filter(|s| !s.is_empty()).map(parse_vector).collect()
}

fn cmd_mink(domain: &str, point: &str, cfg: &RunConfig) -> Result<Report> {
    let d = parse_domain(domain)?;
    let z = parse_point(point)?;
    let mut rep = Report::new("mink", json!({ "domain": d.to_spec(), "point": point }), cfg);
    let m = d.minkowski(&z)?;
    rep.certificate("gauge", m.value);
    rep.certificate("method", m.method);
    rep.certificate("bisection", d.minkowski_bisection(&z)?.value);
    rep.certificate("inside", m.value < 1.0);
    if m.value > 0.0 {
        rep.certificate("radial_boundary", show_vec(&d.radial_boundary(&z)?));
    }
    Ok(rep)
}

fn subspace_of(n: usize, subspace: &Option<String>, kernel: &Option<String>) -> Result<LinearSubspace> {
    match (subspace, kernel) {
        (Some(s), _) => LinearSubspace::new(n, vectors(s)?),
        (None, Some(k)) => LinearSubspace::kernel_of(&vectors(k)?, n),
        _ => Err(RetractError::Invalid("give --subspace, --kernel or --map".into())),
    }
}

fn lp_ball_test(p: f64, l: &LinearSubspace, grid: bool, cfg: &RunConfig, rep: &mut Report) -> Result<()> {
    let anchor = "lp.norm_one_projection";
    let basis = lp::disjoint_basis_search(l);
    let pr = match (&basis, p == 2.0) {
        (_, true) => Some(lp::orthogonal_projection(l)),
        (Some(b), false) => Some(lp::lp_norm_one_projection(p, b)?),
        (None, false) => None,
    };
    if let Some(b) = &basis {
        rep.certificate("disjoint_supports", &b.supports);
    }
    let Some(pr) = pr else {
        rep.verdict(Verdict::no(anchor, "no disjointly supported basis; no norm-one projection", json!({})));
        if grid {
            let g = lp::projection_grid_search(l, p, cfg.samples("grid"), 1.0 + cfg.tol("grid_norm"), cfg.seed);
            let v = if g.norm_one_candidates == 0 {
                Verdict::no("lp.grid_search", format!("{} grid projections, none of norm one", g.projections_tested), json!(g))
            } else {
                Verdict::inconclusive("lp.grid_search", "grid projections with sampled norm one found", json!(g))
            };
            rep.verdict(v);
        }
        return Ok(());
    };
    let norm = lp::sampled_operator_norm(&pr, p, cfg.samples("norm"), cfg.seed);
    let ok = pr.is_idempotent() && norm <= 1.0 + cfg.tol("norm");
    rep.certificate("projection", &pr);
    rep.certificate("sampled_norm", norm);
    let ev = json!({ "idempotent": pr.is_idempotent(), "sampled_norm": norm });
    rep.verdict(if ok {
        Verdict::yes(anchor, "constructed projection has norm one", ev)
    } else {
        Verdict::no(anchor, "constructed projection exceeds norm one on samples", ev)
    });
    Ok(())
}

fn cmd_retract_test(
    domain: &str,
    subspace: &Option<String>,
    kernel: &Option<String>,
    map: &Option<String>,
    grid: bool,
    cfg: &RunConfig,
) -> Result<Report> {
    let d = parse_domain(domain)?;
    let n = d.dim();
    let inputs = json!({ "domain": d.to_spec(), "subspace": subspace, "kernel": kernel, "map": map });
    let mut rep = Report::new("retract-test", inputs, cfg);
    if let Some(m) = map {
        let f = PolyMap::parse(m, n)?;
        let idem = verify_idempotent(&f);
        rep.verdict(if idem {
            Verdict::yes("retraction.idempotent", "F ∘ F = F exactly", json!({}))
        } else {
            Verdict::no("retraction.idempotent", "F ∘ F ≠ F", json!({}))
        });
        rep.verdict(verify_self_map(&f, &Region::from(d), cfg.samples("self_map"), cfg.seed));
        return Ok(rep);
    }
    let l = subspace_of(n, subspace, kernel)?;
    rep.certificate("dimension", l.dim());
    match &d {
        BalancedDomain::LpBall { p, .. } if p.is_infinite() => {
            let t = lp::polydisc_retract_test(&l)?;
            rep.certificate("index_sets_tried", t.index_sets_tried);
            match t.accepted {
                Some(a) => {
                    let check = verify_self_map(&a.retraction, &Region::from(d.clone()), cfg.samples("self_map"), cfg.seed);
                    rep.certificate("retraction", a.retraction.to_string());
                    rep.certificate("index_set", &a.index_set);
                    rep.verdict(Verdict::yes(
                        "polydisc.row_sum",
                        "row sums over the index set are at most 1",
                        json!({ "row_sums": a.row_sums, "idempotent": a.projection.is_idempotent() }),
                    ));
                    rep.verdict(check);
                }
                None => rep.verdict(Verdict::no("polydisc.row_sum", "no index set satisfies the row-sum bound", json!({}))),
            }
        }
        BalancedDomain::LpBall { p, .. } if *p >= 1.0 => lp_ball_test(*p, &l, grid, cfg, &mut rep)?,
        BalancedDomain::DecoupledEgg { q } if q.iter().all(|&x| x < 1.0) => {
            let opts = HullOptions {
                self_map_samples: cfg.samples("self_map"),
                seed: cfg.seed,
                ..Default::default()
            };
            let h = case_studies::hull_obstruction_test(&d, &l, &opts)?;
            rep.certificate("projections_tested", h.projections_tested);
            rep.certificate("projections_falsified", h.projections_falsified);
            rep.verdict(h.verdict);
        }
        BalancedDomain::PolyPolyhedron(_) if case_studies::is_dh(&d) && l.dim() == 1 => {
            let b = d.radial_boundary(&l.float_basis()[0])?;
            let v = case_studies::dh_direction_test(&b, cfg.samples("self_map"), cfg.seed)?;
            rep.certificate("boundary_point", show_vec(&b));
            rep.certificate("reason", v.reason);
            rep.verdict(v.verdict);
        }
        _ => {
            return Err(RetractError::Unsupported(
                "subspace tests cover ℓ^p balls with p ≥ 1, polydiscs, eggs with all exponents below 1 \
                 and lines in D_h; use --map for other domains"
                    .into(),
            ))
        }
    }
    Ok(rep)
}

fn cmd_straighten(input: &MapInput, cfg: &RunConfig) -> Result<Report> {
    let (text, f) = read_map(input)?;
    let mut rep = Report::new("straighten", json!({ "map": text.trim() }), cfg);
    let rr = ring_retract_generator(&f)?;
    let st = &rr.straightening;
    rep.certificate("chain", st.chain.to_string());
    rep.certificate("chain_steps", &st.chain);
    rep.certificate("normal_form", st.normal_form.to_string());
    rep.certificate("form", st.form_tag);
    rep.certificate("generator", rr.generator.to_string());
    rep.certificate(
        "components_in_generator",
        rr.components_in_generator.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    );
    let c = &st.certificate;
    let v = if c.all_hold() {
        Verdict::yes("straighten.certificate", "chain conjugates F to a projection onto the first axis", json!(c))
    } else {
        Verdict::no("straighten.certificate", "certificate checks failed", json!(c))
    };
    rep.verdict(v);
    Ok(rep)
}

fn cmd_dh_report(sweep: usize, cfg: &RunConfig) -> Result<Report> {
    let mut rep = Report::new("dh-report", json!({ "sweep": sweep }), cfg);
    let e = case_studies::eps0();
    rep.certificate("eps0", e);
    rep.certificate("sqrt17", 17f64.sqrt());
    for c in case_studies::dh_constants()? {
        let ev = json!(c);
        let text = format!("{} = {:.12}", c.anchor, c.value);
        rep.verdict(if c.holds {
            Verdict::yes(c.anchor, text, ev)
        } else {
            Verdict::no(c.anchor, text, ev)
        });
    }
    let gate = case_studies::integer_gate();
    let text = format!("8⁶·15 = {} > 1921² = {}", gate.lhs, gate.rhs);
    rep.verdict(if gate.holds {
        Verdict::yes("dh.integer_gate", text, json!(gate))
    } else {
        Verdict::no("dh.integer_gate", text, json!(gate))
    });
    let worst_excess = case_studies::dh_cap_sweep(sweep, cfg.seed)?;
    let ev = json!({ "points": sweep, "max_excess_over_cap": worst_excess });
    rep.verdict(if worst_excess <= 1e-6 {
        Verdict::yes("dh.cauchy_schwarz_cap", format!("rib maximum stays below |p|²√17 on {sweep} base points"), ev)
    } else {
        Verdict::no("dh.cauchy_schwarz_cap", "rib maximum exceeds |p|²√17", ev)
    });
    let examples = [
        ("rib, θ₀ = 0", case_studies::rib_point(0.0, 0.0, true)?),
        ("rib, θ₀ = ε₀", case_studies::rib_point(e, 0.0, true)?),
    ];
    for (name, p) in examples {
        let v = case_studies::dh_direction_test(&p, 2000, cfg.seed)?;
        rep.certificate(&format!("direction {name}"), json!(v.admits_linear_retract));
    }
    Ok(rep)
}

fn cmd_verify_idempotent(input: &MapInput, cfg: &RunConfig) -> Result<Report> {
    let (text, f) = read_map(input)?;
    let mut rep = Report::new("verify-idempotent", json!({ "map": text.trim() }), cfg);
    rep.certificate("modular_screen", idempotency_screen(&f, 16, cfg.seed));
    let ok = verify_idempotent(&f);
    rep.verdict(if ok {
        Verdict::yes("retraction.idempotent", "F ∘ F = F exactly", json!({}))
    } else {
        Verdict::no("retraction.idempotent", "F ∘ F ≠ F", json!({}))
    });
    Ok(rep)
}

fn cmd_probe(domain: &str, point: &str, mode: Mode, radius: f64, faces: &Option<String>, cfg: &RunConfig) -> Result<Report> {
    let d = parse_domain(domain)?;
    let b = d.radial_boundary(&parse_point(point)?)?;
    let inputs = json!({ "domain": d.to_spec(), "point": point, "radius": radius, "faces": faces });
    let mut rep = Report::new("probe-extremality", inputs, cfg);
    rep.certificate("boundary_point", show_vec(&b));
    rep.certificate("smooth", d.is_smooth_at(&b));
    if let BalancedDomain::PolyPolyhedron(_) = d {
        rep.certificate("stratum", d.classify_boundary(&b, cfg.tol("boundary"))?);
    }
    let opts = ProbeOptions {
        samples: cfg.samples("probe"),
        seed: cfg.seed,
        tol: cfg.tol("convexity"),
    };
    let cv = geometry::convexity_at(&d, &b, &opts)?;
    rep.verdict(Verdict::new(
        cv.decision,
        "boundary.supporting_functional",
        format!("best functional reaches {:.6} on the boundary", cv.worst_ratio),
        json!(cv),
    ));
    let mode = match mode {
        Mode::Complex => FaceProbeMode::ComplexDisc,
        Mode::Real => FaceProbeMode::RealSegment,
    };
    let fp = geometry::c_extremality_probe(&d, &b, cfg.samples("probe"), radius, mode, cfg.seed)?;
    let found = fp.directions_in_face.len();
    rep.verdict(if found == 0 {
        Verdict::yes("boundary.extremal", format!("no boundary segment through the point among {} directions", fp.directions_tried), json!(fp))
    } else {
        Verdict::no("boundary.extremal", format!("{found} directions stay in the boundary"), json!(fp))
    });
    if let Some(fk) = faces {
        let idx: Vec<usize> = fk
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| RetractError::Parse { pos: 0, msg: format!("bad face list {fk:?}") }))
            .collect::<Result<_>>()?;
        if idx.len() != 2 {
            return Err(RetractError::Invalid("--faces takes two indices".into()));
        }
        let probe = case_studies::rib_genericity_probe(&d, idx[0], idx[1], cfg.samples("probe"), cfg.seed)?;
        rep.verdict(probe.verdict);
    }
    Ok(rep)
}

fn cmd_open_piece(domain: &str, cfg: &RunConfig) -> Result<Report> {
    let d = parse_domain(domain)?;
    let mut rep = Report::new("open-piece", json!({ "domain": d.to_spec() }), cfg);
    let opts = ProbeOptions {
        samples: 64,
        seed: cfg.seed,
        tol: cfg.tol("convexity"),
    };
    let m = case_studies::open_piece_measure(&d, cfg.samples("directions"), cfg.seed, &opts)?;
    rep.certificate("fraction", m.fraction);
    rep.certificate("criterion", m.criterion);
    rep.certificate("directions", m.directions);
    rep.certificate("hits", m.hits);
    Ok(rep)
}

fn run(cli: &Cli) -> Result<Report> {
    let mut cfg = RunConfig {
        seed: cli.seed,
        output: cli.json.clone(),
        ..Default::default()
    };
    for t in &cli.tol {
        cfg.set_tol(t)?;
    }
    for s in &cli.samples {
        cfg.set_samples(s)?;
    }
    let rep = match &cli.command {
        Command::Mink { domain, point } => cmd_mink(domain, point, &cfg),
        Command::RetractTest { domain, subspace, kernel, map, grid } => {
            cmd_retract_test(domain, subspace, kernel, map, *grid, &cfg)
        }
        Command::Straighten { input } => cmd_straighten(input, &cfg),
        Command::DhReport { sweep } => cmd_dh_report(*sweep, &cfg),
        Command::VerifyIdempotent { input } => cmd_verify_idempotent(input, &cfg),
        Command::ProbeExtremality { domain, point, mode, radius, faces } => {
            cmd_probe(domain, point, *mode, *radius, faces, &cfg)
        }
        Command::OpenPiece { domain } => cmd_open_piece(domain, &cfg),
    }?;
    Ok(rep.finish())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(rep) => {
            // a closed pipe (`retract ... | head`) is not an error worth a panic
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{}", rep.summary());
            match cli.json.as_deref() {
                Some("-") => {
                    let _ = writeln!(out, "{}", rep.to_json());
                }
                Some(path) => {
                    if let Err(e) = fs::write(path, rep.to_json()) {
                        eprintln!("error: cannot write {path}: {e}");
                        return ExitCode::from(2);
                    }
                }
                None => {}
            }
            ExitCode::from(rep.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
