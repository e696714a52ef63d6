//! One function per subcommand. Each builds a [`Report`]; errors abort with
//! a message and are reported by the caller.

use crate::config::{CocycleChoice, RunConfig};
use ncf::algebra::{lp_norm, AlgebraElement};
use ncf::branches::{
    branch_lp_family, branch_square_report, damped_symbol, gram_off_pattern, hm_branch_condition, ht_sweep, Branch,
    BranchPartition,
};
use ncf::cocycles::{
    build_cocycle_gns, cyclic_word_cocycle, free_word_cocycle, is_conditionally_negative, negativity_form,
    schoenberg_check, Cocycle, LengthFunction,
};
use ncf::euclidean::besov::{besov_t28_norm, gamma_band};
use ncf::euclidean::fractional::{fractional_length, kn};
use ncf::euclidean::poisson::{default_time_grid, gaussian, meyer_failure_report};
use ncf::euclidean::sobolev::{theorem_b1_report, theorem_b2_norm, BuiltinSymbol};
use ncf::euclidean::{Domain, GridFunction, GridSpec, PartitionOfUnity, CONVENTION};
use ncf::gaussian::khintchine_report;
use ncf::groups::{Group, GroupRef};
use ncf::io::{load_group, parse_length_spec, read_branch_specs, read_element_csv, read_grid_csv, BranchSpec};
use ncf::quad::log_grid;
use ncf::report::{Report, Source, Table};
use ncf::riesz::{project_mean_zero, riesz_family, theorem_a_report, CrossedElement};
use ncf::{Complex64, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Why a command stopped early.
#[derive(Debug)]
pub enum Failure {
    /// Bad or missing configuration.
    Config(String),
    /// An error raised by the numerical core.
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Config(s)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(s) => write!(f, "invalid configuration: {s}"),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

type Out = Result<(), Failure>;

pub fn run(command: &str, cfg: &RunConfig, report: &mut Report) -> Out {
    match command {
        "verify-cn" => verify_cn(cfg, report),
        "cocycle-build" => cocycle_build(cfg, report),
        "riesz-report" => riesz_report(cfg, report),
        "khintchine" => khintchine(cfg, report),
        "gfunction" => gfunction(cfg, report),
        "sobolev-b1" => sobolev_b1(cfg, report),
        "sobolev-b2" => sobolev_b2(cfg, report),
        "besov-t28" => besov_t28(cfg, report),
        "meyer-poisson" => meyer_poisson(cfg, report),
        "fractional-kn" => fractional(cfg, report),
        "branch-lp" => branch_lp(cfg, report),
        "branch-hm" => branch_hm(cfg, report),
        "dump-cocycle" => dump_cocycle(cfg, report),
        other => Err(Failure::Config(format!("unknown command {other:?}"))),
    }
}

fn group(cfg: &RunConfig) -> Result<GroupRef, Failure> {
    Ok(load_group(cfg.require(&cfg.group, "group")?)?)
}

fn length(cfg: &RunConfig, g: &GroupRef) -> Result<LengthFunction, Failure> {
    let spec = cfg.psi.as_deref().unwrap_or("word");
    Ok(parse_length_spec(spec, g)?)
}

/// The cocycle selected by `--cocycle`, defaulting to free on balls and GNS
/// on finite groups.
fn cocycle(cfg: &RunConfig, report: &mut Report) -> Result<Cocycle, Failure> {
    let g = group(cfg)?;
    let choice = cfg.cocycle.unwrap_or(match g.as_ref() {
        Group::FreeBall(_) => CocycleChoice::Free,
        Group::Finite(_) => CocycleChoice::Gns,
    });
    let c = match choice {
        CocycleChoice::Gns => build_cocycle_gns(&length(cfg, &g)?, 1e-10)?,
        CocycleChoice::Free => free_word_cocycle(&g)?,
        CocycleChoice::Cyclic => {
            let n = g.as_finite()?.order();
            if n % 2 != 0 || cfg.psi.as_deref().is_some_and(|p| p != "word") {
                return Err(Failure::Config("the cyclic cocycle needs Z_{2m} with --psi word".into()));
            }
            cyclic_word_cocycle(n / 2)?.0
        }
    };
    report.value("cocycle_provenance", &c.provenance().to_string())?;
    report.value("cocycle_dimension", &c.dim())?;
    report.value("psi_id", &c.length().id())?;
    report.convention("action extended by the identity off the span of the cocycle");
    Ok(c)
}

/// `--element` file, or a seeded random element projected to mean zero.
fn element(cfg: &RunConfig, c: &Cocycle) -> Result<AlgebraElement, Failure> {
    let f = match &cfg.element {
        Some(p) => read_element_csv(p, c.group())?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
            AlgebraElement::random(c.group(), &mut rng)
        }
    };
    Ok(project_mean_zero(c.length(), &f))
}

fn grid_spec(cfg: &RunConfig, n_default: usize, m_default: usize, l_default: f64) -> Result<GridSpec, Failure> {
    Ok(GridSpec::new(cfg.dim.unwrap_or(n_default), cfg.grid.unwrap_or(m_default), cfg.half_width.unwrap_or(l_default))?)
}

fn symbol(cfg: &RunConfig, spec: GridSpec) -> Result<GridFunction, Failure> {
    let name = cfg.symbol.as_deref().unwrap_or("sign");
    match BuiltinSymbol::parse(name) {
        Ok(b) => Ok(b.sample(spec)),
        Err(_) => Ok(read_grid_csv(std::path::Path::new(name), spec, Domain::Frequency)?),
    }
}

fn partition(cfg: &RunConfig) -> Result<PartitionOfUnity, Failure> {
    Ok(PartitionOfUnity::new(cfg.jmin.unwrap_or(-2), cfg.jmax.unwrap_or(2))?)
}

fn verify_cn(cfg: &RunConfig, r: &mut Report) -> Out {
    let g = group(cfg)?;
    let psi = length(cfg, &g)?;
    let tol = cfg.tol_or(1e-9);
    r.value("group", &g.describe())?;
    r.value("psi_id", &psi.id())?;
    let v = is_conditionally_negative(&psi, tol)?;
    r.value("min_eigenvalue", &v.min_eigenvalue)?;
    if let Some(w) = &v.witness {
        r.value("witness", w)?;
        r.value("witness_form", &negativity_form(&psi, w)?)?;
    }
    let sch = schoenberg_check(&psi, &[0.1, 1.0, 10.0], tol)?;
    let agree = sch.iter().all(|e| e.positive) == v.verdict;
    r.value("schoenberg", &sch)?;
    r.check_flag("schoenberg-agreement", agree, Source::Paper);
    r.check_flag("conditionally-negative", v.verdict, Source::Derived);
    Ok(())
}

fn cocycle_build(cfg: &RunConfig, r: &mut Report) -> Out {
    let c = cocycle(cfg, r)?;
    let contracts = c.check_contracts()?;
    r.value("contracts", &contracts)?;
    r.check_at_most("contract-max-gap", contracts.max_gap(), cfg.tol_or(1e-9), Source::Derived);
    Ok(())
}

fn dump_cocycle(cfg: &RunConfig, r: &mut Report) -> Out {
    let c = cocycle(cfg, r)?;
    r.value("cocycle", &c.dump())?;
    Ok(())
}

fn riesz_report(cfg: &RunConfig, r: &mut Report) -> Out {
    let c = cocycle(cfg, r)?;
    let f = element(cfg, &c)?;
    let tol = cfg.tol_or(1e-9);
    let fam = riesz_family(&c, &f)?;
    let lhs: f64 = fam.iter().map(|x| x.l2_coeff_norm().powi(2)).sum();
    let rhs = 4.0 * PI * PI * f.l2_coeff_norm().powi(2);
    if rhs > 0.0 {
        r.check_relative("riesz-isometry", lhs / rhs, 1.0, tol, Source::Trivial);
    }
    let mut table = Table::new(&["p", "lp_norm", "col", "row", "twisted_row", "ratio"]);
    for p in cfg.ps_or(&[2.0]) {
        let t = theorem_a_report(&c, &f, p, false)?;
        table.push(vec![p, t.lp_norm, t.col, t.row, t.twisted_row, t.ratio]);
        if p == 2.0 {
            r.check_relative("ratio-p2", t.ratio, 1.0, tol, Source::Trivial);
        } else {
            r.observe(&format!("ratio-p{p}"), t.ratio, Source::Derived);
        }
        r.value(&format!("p{p}"), &t)?;
    }
    r.table("ratios", table);
    Ok(())
}

fn khintchine(cfg: &RunConfig, r: &mut Report) -> Out {
    let c = cocycle(cfg, r)?;
    let trials = cfg.trials.unwrap_or(20_000);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let x = CrossedElement::random(c.group(), c.dim(), &mut rng);
    let mut table = Table::new(&["p", "gp", "stderr", "rcp", "ratio"]);
    for p in cfg.ps_or(&[2.0, 4.0]) {
        let k = khintchine_report(&c, &x, p, trials, cfg.seed())?;
        table.push(vec![p, k.gp.estimate, k.gp.stderr, k.rcp, k.ratio]);
        r.check_at_least(&format!("lower-bound-p{p}"), k.ratio, 1.0 - 3.0 * k.stderr, Source::Paper);
        r.value(&format!("p{p}"), &k)?;
    }
    r.value("trials", &trials)?;
    r.value("seed", &cfg.seed())?;
    r.table("khintchine", table);
    Ok(())
}

fn gfunction(cfg: &RunConfig, r: &mut Report) -> Out {
    let c = cocycle(cfg, r)?;
    let f = element(cfg, &c)?;
    let profile = |x: f64| x * (-x).exp();
    r.convention("profile φ(x) = x e^{−x}; ∫φ(x)² dx/x = 1/4");
    let mut table = Table::new(&["p", "g_norm", "lp_norm", "ratio"]);
    for p in cfg.ps_or(&[2.0]) {
        let gn = ncf::riesz::g_function_norm(c.length(), &f, p, profile, 40)?;
        let lp = lp_norm(&f, p)?;
        table.push(vec![p, gn, lp, gn / lp]);
        if p == 2.0 {
            r.check_relative("plancherel-p2", gn, 0.5 * lp, cfg.tol_or(1e-6), Source::Derived);
        } else {
            r.observe(&format!("ratio-p{p}"), gn / lp, Source::Derived);
        }
    }
    r.table("gfunction", table);
    Ok(())
}

fn sobolev_b1(cfg: &RunConfig, r: &mut Report) -> Out {
    let spec = grid_spec(cfg, 1, 4096, 16.0)?;
    let sym = symbol(cfg, spec)?;
    let eps = cfg.eps.unwrap_or(0.5);
    let b1 = theorem_b1_report(&sym, eps, &partition(cfg)?)?;
    r.convention(CONVENTION);
    let mut table = Table::new(&["j", "value", "edge_fraction"]);
    for b in &b1.per_j {
        table.push(vec![b.j as f64, b.value, b.edge_fraction]);
    }
    r.check_flag("bands-finite", b1.per_j.iter().all(|b| b.value.is_finite()), Source::Trivial);
    r.observe("sup", b1.sup, Source::Derived);
    r.observe("divergent", if b1.divergent { 1.0 } else { 0.0 }, Source::Derived);
    r.value("b1", &b1)?;
    r.table("bands", table);
    Ok(())
}

fn sobolev_b2(cfg: &RunConfig, r: &mut Report) -> Out {
    let spec = grid_spec(cfg, 1, 4096, 16.0)?;
    let sym = symbol(cfg, spec)?;
    let eps = cfg.eps.unwrap_or(0.5);
    let b2 = theorem_b2_norm(&sym, eps, &log_grid(1e-3, 1e2, 4))?;
    r.convention(CONVENTION);
    let mut table = Table::new(&["s", "value"]);
    for &(s, v) in &b2.profile {
        table.push(vec![s, v]);
    }
    r.check_flag("scales-finite", b2.profile.iter().all(|p| p.1.is_finite()), Source::Trivial);
    r.observe("max", b2.max, Source::Derived);
    r.observe("spread", b2.spread, Source::Derived);
    r.value("b2", &b2)?;
    r.table("profile", table);
    Ok(())
}

fn besov_t28(cfg: &RunConfig, r: &mut Report) -> Out {
    let spec = grid_spec(cfg, 1, 1024, 16.0)?;
    let sym = symbol(cfg, spec)?;
    let part = partition(cfg)?;
    r.convention(CONVENTION);
    let band = gamma_band(&log_grid(1e-3, 1.0, 5))?;
    let mut gt = Table::new(&["xi", "gamma_times_log"]);
    for &(x, v) in &band.table {
        gt.push(vec![x, v]);
    }
    r.observe("gamma-band-constant", band.c_obs, Source::Derived);
    let mut bt = Table::new(&["j", "value"]);
    let mut skipped = Vec::new();
    for j in part.indices() {
        match besov_t28_norm(&sym, j, &part) {
            Ok(b) => bt.push(vec![j as f64, b.value]),
            Err(Error::Grid(_)) => skipped.push(j),
            Err(e) => return Err(e.into()),
        }
    }
    r.check_flag("bands-finite", bt.rows.iter().all(|row| row[1].is_finite()), Source::Trivial);
    r.value("skipped", &skipped)?;
    r.table("gamma", gt);
    r.table("besov", bt);
    Ok(())
}

fn meyer_poisson(cfg: &RunConfig, r: &mut Report) -> Out {
    let n = cfg.dim.unwrap_or(1);
    let (m, l) = if n == 1 { (8192, 256.0) } else { (1024, 128.0) };
    let spec = grid_spec(cfg, n, m, l)?;
    let f = gaussian(spec);
    let p = cfg.p.first().copied().unwrap_or(2.0 * n as f64 / (n as f64 + 1.0));
    let times = default_time_grid(if n == 1 { 12 } else { 6 });
    let rep = meyer_failure_report(&f, p, Some(&times))?;
    r.convention(CONVENTION);
    if let Some(gap) = rep.route_gap {
        r.check_at_most("route-gap", gap, cfg.tol_or(1e-2), Source::Derived);
    }
    r.check_close("decay-slope", rep.slope, -(n as f64 + 1.0), 0.2, Source::Paper);
    r.check_flag("non-decaying-annuli", rep.non_decaying && rep.annuli.len() >= 3, Source::Paper);
    r.check_flag("half-derivative-finite", rep.half_derivative_norm.is_finite(), Source::Trivial);
    let mut t = Table::new(&["k", "mass"]);
    for a in &rep.annuli {
        t.push(vec![a.k as f64, a.mass]);
    }
    r.value("meyer", &rep)?;
    r.table("annuli", t);
    Ok(())
}

fn fractional(cfg: &RunConfig, r: &mut Report) -> Out {
    let n = cfg.dim.unwrap_or(1);
    let beta = cfg.beta.unwrap_or(0.5);
    let tol = cfg.tol_or(1e-6);
    let k = kn(n, beta)?;
    r.value("kn", &k)?;
    if n == 1 && beta == 0.5 {
        r.check_relative("k1-half", k, 4.0 * PI * PI, 1e-3, Source::Paper);
    }
    let mut xi = vec![0.0; n];
    xi[0] = 0.7;
    let one = fractional_length(n, beta, &xi)?;
    xi[0] = 1.4;
    let two = fractional_length(n, beta, &xi)?;
    r.check_relative("homogeneity", two.psi_direct / one.psi_direct, 2f64.powf(2.0 * beta), tol, Source::Trivial);
    r.check_relative("routes", one.psi_direct, one.psi, 1e-3, Source::Derived);
    let mut t = Table::new(&["beta", "kn"]);
    for b in [0.2, 0.1, 0.05] {
        t.push(vec![b, kn(n, b)?]);
    }
    r.check_flag("blowup-as-beta-vanishes", t.rows.windows(2).all(|w| w[1][1] > w[0][1]), Source::Paper);
    r.table("blowup", t);
    Ok(())
}

fn ball_group(cfg: &RunConfig) -> Result<GroupRef, Failure> {
    let g = load_group(cfg.group.as_deref().unwrap_or("free:2,6"))?;
    g.as_free()?;
    Ok(g)
}

fn branch_lp(cfg: &RunConfig, r: &mut Report) -> Out {
    let g = ball_group(cfg)?;
    let ball = g.as_free()?;
    let part = BranchPartition::greedy(ball)?;
    let fam = branch_lp_family(ball, &part)?;
    r.value("group", &g.describe())?;
    r.value("branches", &part.branches.len())?;
    r.value("bands", &fam.bands)?;
    r.value("truncated", &fam.truncated)?;
    r.check_close("gram-off-pattern", gram_off_pattern(&fam), 0.0, 0.0, Source::Paper);
    r.observe("max-h-norm", fam.max_norm, Source::Derived);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let f = match &cfg.element {
        Some(p) => read_element_csv(p, &g)?,
        None => AlgebraElement::random(&g, &mut rng),
    };
    let mut t = Table::new(&["p", "square", "norm", "ratio"]);
    for p in cfg.ps_or(&[2.0, 4.0]) {
        if p.fract() != 0.0 {
            return Err(Failure::Config(format!("branch square functions need an even integer p, got {p}")));
        }
        let s = branch_square_report(&fam, &f, p as u32)?;
        t.push(vec![p, s.square, s.norm, s.ratio]);
        if p == 2.0 {
            r.check_relative("plancherel-p2", s.square, s.plancherel, cfg.tol_or(1e-9), Source::Derived);
        } else {
            r.observe(&format!("ratio-p{p}"), s.ratio, Source::Derived);
        }
    }
    r.table("square", t);
    Ok(())
}

/// `one`, `inverse` (m̃(j) = 1/j, m̃(0) = 1), `alternating` or `csv:(...)`.
fn radial_symbol(name: &str, radius: usize) -> Result<Vec<Complex64>, Failure> {
    let re = |v: f64| Complex64::new(v, 0.0);
    let v: Vec<Complex64> = match name {
        "one" => vec![re(1.0); radius + 1],
        "inverse" => (0..=radius).map(|j| re(if j == 0 { 1.0 } else { 1.0 / j as f64 })).collect(),
        "alternating" => (0..=radius).map(|j| re(if j % 2 == 0 { 1.0 } else { -1.0 })).collect(),
        other => {
            let inner = other
                .strip_prefix("csv:")
                .ok_or_else(|| Failure::Config(format!("unknown radial symbol {other:?}")))?
                .trim_matches(|c| c == '(' || c == ')');
            inner
                .split(',')
                .map(|t| t.trim().parse::<f64>().map(re).map_err(|_| Failure::Config(format!("bad value {t:?}"))))
                .collect::<Result<_, _>>()?
        }
    };
    if v.len() <= radius {
        return Err(Failure::Config(format!("the radial symbol needs {} values", radius + 1)));
    }
    Ok(v)
}

fn branch_hm(cfg: &RunConfig, r: &mut Report) -> Out {
    let g = ball_group(cfg)?;
    let ball = g.as_free()?;
    let sym = radial_symbol(cfg.symbol.as_deref().unwrap_or("inverse"), ball.radius())?;
    let hm = hm_branch_condition(&sym)?;
    r.value("condition", &hm)?;
    r.observe("hm-condition", hm.value, Source::Derived);
    let branches: Vec<Branch> = match &cfg.branches {
        Some(p) => read_branch_specs(p)?.iter().map(|s| s.build(ball)).collect::<ncf::Result<_>>()?,
        None => vec![BranchSpec { root: "a".into(), depth: ball.radius() }.build(ball)?],
    };
    let c = free_word_cocycle(&g)?;
    let mut t = Table::new(&["branch", "t", "norm", "tail_bound"]);
    let mut recon: f64 = 0.0;
    for (k, b) in branches.iter().enumerate() {
        let (hs, sup) = ht_sweep(ball, &sym, b)?;
        for h in &hs {
            t.push(vec![k as f64, h.t, h.norm, h.tail_bound]);
            if b.is_principal(ball) {
                for &e in b.elements() {
                    let v = c.vector(e);
                    let pair: Complex64 = (0..v.len()).map(|i| h.coeffs[i] * v[i]).sum();
                    let l = ball.length(e);
                    recon = recon.max((pair / (l as f64).sqrt() - damped_symbol(&sym, h.t, l)).norm());
                }
            }
        }
        r.observe(&format!("sup-ht-norm-{k}"), sup, Source::Derived);
    }
    if branches.iter().any(|b| b.is_principal(ball)) {
        r.check_at_most("principal-reconstruction", recon, cfg.tol_or(1e-12), Source::Derived);
    }
    r.table("ht", t);
    Ok(())
}
