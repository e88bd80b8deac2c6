//! Figure-reproduction experiments and sweeps.
//!
//! Every experiment evaluates its grid points independently (in parallel
//! under rayon) and collects rows in grid order, so output bytes do not
//! depend on the thread count.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use oris_link_core::beam::PhaseProfile;
use oris_link_core::link::{Link, LinkState};
use oris_link_core::montecarlo::{
    check_samples, chunk_count, combine, run_chunk, GmlSampler, IntensitySampler, McResult, Moments, PlobSampler,
    Sampler,
};
use oris_link_core::numerics::{gauss_laguerre, QuadratureRule};
use oris_link_core::skr::{focus_grid, plob_average_exact, plob_average_gl};
use oris_link_core::{gml, to_db, Error as CoreError};

use crate::config::{ConfigError, PePreset, ScenarioConfig};
use crate::output::{Cell, PlotSpec, Table};

/// Available experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Experiment {
    /// Scintillation index against zenith angle and slant distance.
    Scintillation,
    /// Footprint on the ORIS and receiver-plane beam widths.
    Beamwidths,
    /// Averaged GML per profile and PE preset.
    GmlFixed,
    /// QPS averaged GML over zenith angle and focus distance.
    GmlQpsMap,
    /// Averaged PLOB bound per profile and PE preset.
    SkrFixed,
    /// QPS averaged PLOB bound over zenith angle and focus distance.
    SkrQpsMap,
    /// Optimal QPS focus per zenith angle.
    OptimizeF,
    /// Monte-Carlo check of every closed form.
    ValidateMc,
    /// Gauss-Laguerre nodes and weights.
    DumpNodes,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Scintillation,
        Experiment::Beamwidths,
        Experiment::GmlFixed,
        Experiment::GmlQpsMap,
        Experiment::SkrFixed,
        Experiment::SkrQpsMap,
        Experiment::OptimizeF,
        Experiment::ValidateMc,
        Experiment::DumpNodes,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Scintillation => "scintillation",
            Experiment::Beamwidths => "beamwidths",
            Experiment::GmlFixed => "gml-fixed",
            Experiment::GmlQpsMap => "gml-qps-map",
            Experiment::SkrFixed => "skr-fixed",
            Experiment::SkrQpsMap => "skr-qps-map",
            Experiment::OptimizeF => "optimize-f",
            Experiment::ValidateMc => "validate-mc",
            Experiment::DumpNodes => "dump-nodes",
        }
    }
}

/// Failure of a run, mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numeric(#[from] CoreError),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Numeric(_) | RunError::Io(_) => 2,
            RunError::Validation(_) => 3,
        }
    }
}

/// Zenith grid `start:stop:step` in degrees, `stop` included when it lands on the grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid `{spec}` must be start:stop:step"));
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("grid `{spec}`: {e}")))
        .collect::<Result<_, _>>()?;
    let (start, stop, step) = (v[0], v[1], v[2]);
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(format!("grid `{spec}` needs finite start <= stop and step > 0"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if n > 100_000 {
        return Err(format!("grid `{spec}` has too many points"));
    }
    Ok((0..n).map(|i| start + step * i as f64).collect())
}

fn default_grid(last_deg: usize) -> Vec<f64> {
    (0..=last_deg).map(|d| d as f64).collect()
}

/// Settings beyond the scenario file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Zenith grid in degrees; each experiment has its own default.
    pub phi_grid: Option<Vec<f64>>,
}

struct Ctx<'a> {
    cfg: &'a ScenarioConfig,
    link: Link,
    phi: Vec<f64>,
}

impl Ctx<'_> {
    fn profiles(&self) -> Vec<PhaseProfile> {
        match self.cfg.profile {
            Some(p) => vec![p],
            None => vec![PhaseProfile::Lps, PhaseProfile::Qps { focus: self.link.d2() }, PhaseProfile::Fps],
        }
    }

    fn presets(&self, all: &[PePreset]) -> Vec<PePreset> {
        match self.cfg.pe {
            Some(p) => vec![p],
            None => all.to_vec(),
        }
    }

    fn rule(&self) -> Result<QuadratureRule, RunError> {
        Ok(gauss_laguerre(self.cfg.g)?)
    }

    /// Rows from each zenith angle, evaluated in parallel and kept in grid order.
    fn sweep<F>(&self, f: F) -> Result<Vec<Vec<Cell>>, RunError>
    where
        F: Fn(f64, &LinkState) -> Result<Vec<Vec<Cell>>, RunError> + Sync,
    {
        let per_angle: Vec<Result<Vec<Vec<Cell>>, RunError>> = self
            .phi
            .par_iter()
            .map(|&deg| {
                let state = self.link.at_zenith_deg(deg)?;
                f(deg, &state)
            })
            .collect();
        let mut rows = Vec::new();
        for r in per_angle {
            rows.extend(r?);
        }
        Ok(rows)
    }
}

pub fn profile_label(p: &PhaseProfile) -> String {
    match p {
        PhaseProfile::Qps { focus } => format!("qps:{focus}"),
        other => other.name().to_string(),
    }
}

/// Runs one experiment and writes its tables into `out_dir`.
pub fn run_experiment(
    exp: Experiment,
    cfg: &ScenarioConfig,
    opts: &RunOptions,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, RunError> {
    let tables = compute(exp, cfg, opts)?;
    let mut written = Vec::new();
    for t in &tables.tables {
        written.extend(t.write(out_dir)?);
    }
    if let Some(msg) = tables.failure {
        return Err(RunError::Validation(msg));
    }
    Ok(written)
}

/// Tables produced by an experiment, plus a validation failure that must
/// still be reported after the tables are written.
pub struct Output {
    pub tables: Vec<Table>,
    pub failure: Option<String>,
}

/// Computes the tables of an experiment without touching the file system.
pub fn compute(exp: Experiment, cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Output, RunError> {
    let link = cfg.validate()?;
    let default_last = if exp == Experiment::Scintillation { 80 } else { 68 };
    let phi = opts.phi_grid.clone().unwrap_or_else(|| default_grid(default_last));
    if let Some(bad) = phi.iter().find(|d| !(0.0..90.0).contains(*d)) {
        return Err(ConfigError {
            file: None,
            line: None,
            key: Some("grid-phi".into()),
            message: format!("zenith angle {bad} outside [0, 90)"),
        }
        .into());
    }
    let ctx = Ctx { cfg, link, phi };
    let single = |t: Table| Ok(Output { tables: vec![t], failure: None });
    match exp {
        Experiment::Scintillation => single(scintillation(&ctx)?),
        Experiment::Beamwidths => single(beamwidths(&ctx)?),
        Experiment::GmlFixed => single(gml_fixed(&ctx)?),
        Experiment::GmlQpsMap => Ok(Output { tables: qps_map(&ctx, false)?, failure: None }),
        Experiment::SkrFixed => single(skr_fixed(&ctx)?),
        Experiment::SkrQpsMap => Ok(Output { tables: qps_map(&ctx, true)?, failure: None }),
        Experiment::OptimizeF => single(optimize_f(&ctx)?),
        Experiment::ValidateMc => validate_mc(&ctx, opts),
        Experiment::DumpNodes => single(dump_nodes(&ctx)?),
    }
}

fn scintillation(ctx: &Ctx) -> Result<Table, RunError> {
    let mut t = Table::new("scintillation", &["phi_i_deg", "d1_m", "sigma_I2"]).with_plot(PlotSpec::Lines {
        x: "phi_i_deg",
        y: "sigma_I2",
        group: vec![],
        logy: false,
    });
    t.rows = ctx.sweep(|deg, s| Ok(vec![vec![deg.into(), s.geometry.d1.into(), s.scintillation_index().into()]]))?;
    Ok(t)
}

fn beamwidths(ctx: &Ctx) -> Result<Table, RunError> {
    let mut t = Table::new(
        "beamwidths",
        &[
            "phi_i_deg",
            "profile",
            "vacuum",
            "d1_m",
            "w_d1_m",
            "T",
            "w_ix_m",
            "w_iy_m",
            "fits_oris",
            "rho0_m",
            "epsilon",
            "lambda1",
            "w_rx_x_m",
            "w_rx_y_m",
        ],
    )
    .with_plot(PlotSpec::Lines { x: "phi_i_deg", y: "w_rx_x_m", group: vec!["profile"], logy: true });
    let profiles = ctx.profiles();
    let vacuum = ctx.cfg.vacuum_mode();
    t.rows = ctx.sweep(|deg, s| {
        profiles
            .iter()
            .map(|p| {
                let rx = s.rx_beam(*p)?;
                let b = &s.beam;
                Ok(vec![
                    deg.into(),
                    profile_label(p).into(),
                    vacuum.into(),
                    s.geometry.d1.into(),
                    b.w_d1.into(),
                    b.t.into(),
                    b.w_ix.into(),
                    b.w_iy.into(),
                    b.fits_oris.into(),
                    rx.rho0.into(),
                    rx.epsilon.into(),
                    rx.lambda1.into(),
                    rx.w_rx_x.into(),
                    rx.w_rx_y.into(),
                ])
            })
            .collect()
    })?;
    Ok(t)
}

fn gml_fixed(ctx: &Ctx) -> Result<Table, RunError> {
    let mut t =
        Table::new("gml-fixed", &["phi_i_deg", "profile", "pe_preset", "w_rx_x_m", "w_rx_y_m", "gml_linear", "gml_db"])
            .with_plot(PlotSpec::Lines {
                x: "phi_i_deg",
                y: "gml_db",
                group: vec!["profile", "pe_preset"],
                logy: false,
            });
    let profiles = ctx.profiles();
    let presets = ctx.presets(&PePreset::PRESETS);
    let a = ctx.link.params().aperture_radius_m;
    t.rows = ctx.sweep(|deg, s| {
        let mut rows = Vec::new();
        for p in &profiles {
            let rx = s.rx_beam(*p)?;
            for pe in &presets {
                let g = gml::average_gml(&rx, &pe.hover(), a);
                rows.push(vec![
                    deg.into(),
                    profile_label(p).into(),
                    pe.name().into(),
                    rx.w_rx_x.into(),
                    rx.w_rx_y.into(),
                    g.into(),
                    to_db(g).into(),
                ]);
            }
        }
        Ok(rows)
    })?;
    Ok(t)
}

fn qps_map(ctx: &Ctx, skr: bool) -> Result<Vec<Table>, RunError> {
    let presets = ctx.presets(&[PePreset::Weak, PePreset::Moderate, PePreset::Strong]);
    let f_grid = focus_grid(ctx.link.d2(), 60);
    let rule = if skr { Some(ctx.rule()?) } else { None };
    let a = ctx.link.params().aperture_radius_m;
    let mut tables = Vec::new();
    for pe in presets {
        let hover = pe.hover();
        let (stem, header, z): (&str, &[&'static str], &'static str) = if skr {
            ("skr-qps-map", &["phi_i_deg", "f_m", "skr_bits_per_use"], "skr_bits_per_use")
        } else {
            ("gml-qps-map", &["phi_i_deg", "f_m", "gml_linear", "gml_db"], "gml_db")
        };
        let mut t = Table::new(format!("{stem}-{}", pe.name()), header).with_plot(PlotSpec::Map {
            x: "phi_i_deg",
            y: "f_m",
            z,
        });
        t.rows = ctx.sweep(|deg, s| {
            f_grid
                .iter()
                .map(|&f| {
                    let g = gml::average_gml(&s.rx_beam(PhaseProfile::Qps { focus: f })?, &hover, a);
                    Ok(match &rule {
                        Some(rule) => vec![deg.into(), f.into(), plob_average_gl(&s.budget(g), rule)?.into()],
                        None => vec![deg.into(), f.into(), g.into(), to_db(g).into()],
                    })
                })
                .collect()
        })?;
        tables.push(t);
    }
    Ok(tables)
}

fn skr_fixed(ctx: &Ctx) -> Result<Table, RunError> {
    let mut t = Table::new(
        "skr-fixed",
        &[
            "phi_i_deg",
            "profile",
            "pe_preset",
            "tau_l",
            "tau_p",
            "sigma_R_sq",
            "skr_gl_bits_per_use",
            "skr_exact_bits_per_use",
        ],
    )
    .with_plot(PlotSpec::Lines {
        x: "phi_i_deg",
        y: "skr_gl_bits_per_use",
        group: vec!["profile", "pe_preset"],
        logy: true,
    });
    let profiles = ctx.profiles();
    let presets = ctx.presets(&PePreset::PRESETS);
    let rule = ctx.rule()?;
    let a = ctx.link.params().aperture_radius_m;
    t.rows = ctx.sweep(|deg, s| {
        let mut rows = Vec::new();
        for p in &profiles {
            let rx = s.rx_beam(*p)?;
            for pe in &presets {
                let b = s.budget(gml::average_gml(&rx, &pe.hover(), a));
                rows.push(vec![
                    deg.into(),
                    profile_label(p).into(),
                    pe.name().into(),
                    b.tau_l.into(),
                    b.tau_p.into(),
                    b.sigma_r_sq.into(),
                    plob_average_gl(&b, &rule)?.into(),
                    plob_average_exact(&b)?.into(),
                ]);
            }
        }
        Ok(rows)
    })?;
    Ok(t)
}

fn optimize_f(ctx: &Ctx) -> Result<Table, RunError> {
    let mut t = Table::new(
        "optimize-f",
        &["phi_i_deg", "pe_preset", "f_opt_m", "skr_opt_bits_per_use", "skr_lps_bits_per_use", "lps_optimal"],
    )
    .with_plot(PlotSpec::Lines { x: "phi_i_deg", y: "f_opt_m", group: vec!["pe_preset"], logy: true });
    let presets = ctx.presets(&[PePreset::Weak, PePreset::Moderate, PePreset::Strong]);
    let rule = ctx.rule()?;
    let f_grid = focus_grid(ctx.link.d2(), 60);
    let f_min = ctx.link.min_focus();
    t.rows = ctx.sweep(|deg, s| {
        presets
            .iter()
            .map(|pe| {
                let hover = pe.hover();
                let r = s.optimize_focus(&hover, &f_grid, true, &rule)?;
                let lps = s.skr(PhaseProfile::Lps, &hover, &rule)?;
                Ok(vec![
                    deg.into(),
                    pe.name().into(),
                    r.f_opt.into(),
                    r.skr_opt.into(),
                    lps.into(),
                    (r.f_opt == f_min).into(),
                ])
            })
            .collect()
    })?;
    Ok(t)
}

/// Parallel Monte-Carlo run; chunk moments are merged in chunk order.
pub fn mc_parallel<S: Sampler + Sync>(sampler: &S, n: u64, seed: u64) -> Result<McResult, CoreError> {
    check_samples(n)?;
    let chunks: Vec<Moments> = (0..chunk_count(n)).into_par_iter().map(|j| run_chunk(sampler, n, seed, j)).collect();
    Ok(combine(&chunks, seed))
}

fn z_score(closed: f64, mc: &McResult) -> f64 {
    let d = mc.mean - closed;
    if mc.stderr > 0.0 {
        d / mc.stderr
    } else if d == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(d)
    }
}

fn validate_mc(ctx: &Ctx, opts: &RunOptions) -> Result<Output, RunError> {
    let mut t = Table::new("validate-mc", &["case", "closed_form", "mc_mean", "mc_stderr", "z_score", "rel_diff"]);
    let phi = opts.phi_grid.clone().unwrap_or_else(|| vec![0.0, 30.0, 60.0]);
    let presets = ctx.presets(&[PePreset::Weak, PePreset::Moderate, PePreset::Strong]);
    let profiles = ctx.profiles();
    let rule = ctx.rule()?;
    let (n, seed) = (ctx.cfg.mc_samples, ctx.cfg.mc_seed);
    let a = ctx.link.params().aperture_radius_m;

    let mut case_index = 0u64;
    let mut next_seed = || {
        let s = seed.wrapping_add(case_index);
        case_index += 1;
        s
    };
    let push = |t: &mut Table, name: String, closed: f64, mc: McResult| {
        t.push(vec![
            name.into(),
            closed.into(),
            mc.mean.into(),
            mc.stderr.into(),
            z_score(closed, &mc).into(),
            ((mc.mean - closed) / closed).into(),
        ]);
    };

    for &deg in &phi {
        let s = ctx.link.at_zenith_deg(deg)?;
        for p in &profiles {
            let rx = s.rx_beam(*p)?;
            for pe in &presets {
                let hover = pe.hover();
                let closed = gml::average_gml(&rx, &hover, a);
                let mc = mc_parallel(&GmlSampler { rx, hover, aperture_radius: a }, n, next_seed())?;
                push(&mut t, format!("gml/{}/{}/{deg}", p.name(), pe.name()), closed, mc);

                let budget = s.budget(closed);
                let closed = plob_average_gl(&budget, &rule)?;
                let mc = mc_parallel(&PlobSampler::new(&budget), n, next_seed())?;
                push(&mut t, format!("plob/{}/{}/{deg}", p.name(), pe.name()), closed, mc);
            }
        }
    }
    for s2 in [1e-4, 0.04, 0.5] {
        let mc = mc_parallel(&IntensitySampler { sigma_sq: s2 }, n, next_seed())?;
        push(&mut t, format!("intensity/{s2}"), 1.0, mc);
    }

    let worst = t
        .rows
        .iter()
        .filter_map(|r| match (&r[0], &r[4]) {
            (Cell::S(name), Cell::F(z)) if !(z.abs() <= 3.0) => Some(format!("{name} (z = {z:.2})")),
            _ => None,
        })
        .collect::<Vec<_>>();
    let failure = (!worst.is_empty()).then(|| format!("|z| > 3 for {}", worst.join(", ")));
    Ok(Output { tables: vec![t], failure })
}

fn dump_nodes(ctx: &Ctx) -> Result<Table, RunError> {
    let rule = ctx.rule()?;
    let mut t = Table::new("dump-nodes", &["g", "x_g", "w_hat_g", "w_g"]).with_plot(PlotSpec::Lines {
        x: "x_g",
        y: "w_hat_g",
        group: vec![],
        logy: true,
    });
    for (i, ((x, w_hat), w)) in rule.nodes().iter().zip(rule.scaled_weights()).zip(rule.weights()).enumerate() {
        t.push(vec![(i as u64 + 1).into(), (*x).into(), (*w_hat).into(), w.into()]);
    }
    Ok(t)
}
