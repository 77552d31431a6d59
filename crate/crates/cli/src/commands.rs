//! The `wplab` subcommands.

use std::io::Write;

use serde::Serialize;
use wplab_core::energy::{
    energy_profile, pole_negativity_report, EnergyProfile, MomentTables, PoleNegativityReport,
};
use wplab_core::model::solve_potential;
use wplab_core::moments::GTable;
use wplab_core::wigner::{slice_negativity, wigner_grids, Axis, NegativityInterval};
use wplab_core::{
    fmt17, DensityMatrix, EigenState, OscillatorFrame, PolynomialPotential, SpectralBasis,
};

use crate::config::{Format, RunConfig, SampleRange};
use crate::error::CliError;
use crate::output::OutputDir;
use crate::svg::{heatmap, render_charts, with_margin, Chart, Series, PALETTE};
use crate::verify::{self, SuiteResult};

/// Solved states of one configuration.
pub struct Session {
    pub config: RunConfig,
    pub frame: OscillatorFrame,
    pub potential: PolynomialPotential,
    /// The requested states, in the order given by the configuration.
    pub states: Vec<EigenState>,
}

impl Session {
    pub fn new(config: RunConfig) -> Result<Self, CliError> {
        let frame = OscillatorFrame::new(config.frame.mass, config.frame.omega, config.frame.hbar)?;
        let potential = config.potential_model()?;
        let states = match config.states.iter().max() {
            None => Vec::new(),
            Some(&top) => {
                let basis = SpectralBasis::new(config.basis_size, frame)?;
                let all = solve_potential(&basis, &potential, top + 1)?;
                config.states.iter().map(|&s| all[s].clone()).collect()
            }
        };
        Ok(Self {
            config,
            frame,
            potential,
            states,
        })
    }

    pub fn rho(&self, i: usize) -> DensityMatrix {
        DensityMatrix::from_state(&self.states[i])
    }

    pub fn tables(&self) -> Result<MomentTables, CliError> {
        Ok(MomentTables::new(
            self.config.basis_size,
            self.potential.degree(),
        )?)
    }

    fn window(range: &SampleRange) -> (f64, f64) {
        (range.lo, range.hi)
    }
}

fn open_output(config: &RunConfig) -> Result<OutputDir, CliError> {
    let mut out = OutputDir::acquire(&config.out_dir)?;
    out.write_text("config.json", &config.to_json())?;
    Ok(out)
}

fn csv_rows<F>(out: &mut OutputDir, name: &str, header: &str, rows: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    out.write_with(name, |w| {
        writeln!(w, "{header}")?;
        rows(w)
    })
}

#[derive(Serialize)]
struct StateRecord<'a> {
    index: usize,
    energy: f64,
    coefficients: &'a [f64],
}

#[derive(Serialize)]
struct SolveRecord<'a> {
    frame: OscillatorFrame,
    potential: &'a [f64],
    basis_size: usize,
    states: Vec<StateRecord<'a>>,
}

/// Eigenvalues, coefficients and position densities.
pub fn cmd_solve(session: &Session) -> Result<OutputDir, CliError> {
    let cfg = &session.config;
    let mut out = open_output(cfg)?;
    let xs = cfg.profile.x.coords();
    let densities: Vec<Vec<f64>> = session
        .states
        .iter()
        .map(|st| {
            xs.iter()
                .map(|&x| st.position_density(&session.frame, x))
                .collect()
        })
        .collect();
    if cfg.wants(Format::Csv) {
        csv_rows(&mut out, "energies.csv", "state,energy", |w| {
            for st in &session.states {
                writeln!(w, "{},{}", st.index, fmt17(st.energy))?;
            }
            Ok(())
        })?;
        csv_rows(&mut out, "coefficients.csv", "state,k,coefficient", |w| {
            for st in &session.states {
                for (k, c) in st.coeffs.iter().enumerate() {
                    writeln!(w, "{},{k},{}", st.index, fmt17(*c))?;
                }
            }
            Ok(())
        })?;
        csv_rows(&mut out, "densities.csv", "state,x,density", |w| {
            for (st, dens) in session.states.iter().zip(&densities) {
                for (x, d) in xs.iter().zip(dens) {
                    writeln!(w, "{},{},{}", st.index, fmt17(*x), fmt17(*d))?;
                }
            }
            Ok(())
        })?;
    }
    if cfg.wants(Format::Json) {
        let record = SolveRecord {
            frame: session.frame,
            potential: session.potential.coeffs(),
            basis_size: cfg.basis_size,
            states: session
                .states
                .iter()
                .map(|st| StateRecord {
                    index: st.index,
                    energy: st.energy,
                    coefficients: &st.coeffs,
                })
                .collect(),
        };
        out.write_json("solve.json", &record)?;
    }
    if cfg.wants(Format::Svg) && !session.states.is_empty() {
        let series = session
            .states
            .iter()
            .zip(&densities)
            .enumerate()
            .map(|(i, (st, d))| {
                Series::new(
                    format!("s = {}", st.index),
                    PALETTE[i % PALETTE.len()],
                    xs.iter().zip(d).map(|(&x, &v)| Some((x, v))).collect(),
                )
            })
            .collect();
        let chart = Chart {
            title: "Probability densities |Ψ_s(x)|²".into(),
            x_label: "x".into(),
            y_label: "density".into(),
            series,
            ..Chart::default()
        };
        out.write_text("densities.svg", &render_charts(&[chart]))?;
    }
    for st in &session.states {
        println!("state {}: E = {}", st.index, fmt17(st.energy));
    }
    Ok(out)
}

#[derive(Serialize)]
struct NegativitySummary {
    state: usize,
    integral: f64,
    min: f64,
    max: f64,
    negativity_tol: f64,
    negative_cells: usize,
    x_intervals: Vec<NegativityInterval>,
    p_intervals: Vec<NegativityInterval>,
}

/// Wigner grids, heatmaps and slice negativity intervals.
pub fn cmd_wigner_grid(session: &Session) -> Result<OutputDir, CliError> {
    let cfg = &session.config;
    let mut out = open_output(cfg)?;
    let xs = cfg.wigner_grid.x.coords();
    let ps = cfg.wigner_grid.p.coords();
    let rhos: Vec<DensityMatrix> = (0..session.states.len()).map(|i| session.rho(i)).collect();
    let labelled: Vec<(usize, &DensityMatrix)> = session
        .states
        .iter()
        .map(|s| s.index)
        .zip(rhos.iter())
        .collect();
    let fields = wigner_grids(&session.frame, &labelled, &xs, &ps);
    let tol = cfg.negativity_tol();
    for (field, rho) in fields.iter().zip(&rhos) {
        let s = field.state_index;
        let (_, x_intervals) =
            slice_negativity(&session.frame, rho, Axis::X, &cfg.profile.x.coords(), tol);
        let (_, p_intervals) =
            slice_negativity(&session.frame, rho, Axis::P, &cfg.profile.p.coords(), tol);
        let summary = NegativitySummary {
            state: s,
            integral: field.integral(),
            min: field.min(),
            max: field.max(),
            negativity_tol: tol,
            negative_cells: field.negative_cells(tol),
            x_intervals,
            p_intervals,
        };
        if cfg.wants(Format::Csv) {
            out.write_with(&format!("wigner_s{s}.csv"), |w| field.write_csv(w))?;
        }
        if cfg.wants(Format::Svg) {
            let title = format!("W_{s}(x, p)");
            out.write_text(
                &format!("wigner_s{s}.svg"),
                &heatmap(&title, &xs, &ps, &field.values),
            )?;
        }
        if cfg.wants(Format::Json) {
            out.write_json(&format!("negativity_s{s}.json"), &summary)?;
        }
        println!(
            "state {s}: grid integral = {:.9}, min W = {:.3e}, negativity intervals x: {}, p: {}",
            summary.integral,
            summary.min,
            summary.x_intervals.len(),
            summary.p_intervals.len()
        );
    }
    Ok(out)
}

fn profile_chart(session: &Session, prof: &EnergyProfile) -> Chart {
    let m = session.frame.mass;
    let reference: Vec<Option<(f64, f64)>> = prof
        .samples
        .iter()
        .map(|s| {
            let v = match prof.axis {
                Axis::X => session.potential.eval(s.coord),
                Axis::P => s.coord * s.coord / (2.0 * m),
            };
            Some((s.coord, v))
        })
        .collect();
    let energy: Vec<Option<(f64, f64)>> = prof
        .samples
        .iter()
        .map(|s| {
            if s.is_gap {
                None
            } else {
                Some((s.coord, s.energy))
            }
        })
        .collect();
    // y range from the reference curve and the profile away from its poles
    let max_den = prof
        .samples
        .iter()
        .fold(0.0f64, |a, s| a.max(s.denominator.abs()));
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (s, r) in prof.samples.iter().zip(&reference) {
        let r = r.expect("reference is total").1;
        lo = lo.min(r);
        hi = hi.max(r);
        if s.denominator.abs() >= 1e-2 * max_den && s.energy.is_finite() {
            lo = lo.min(s.energy);
            hi = hi.max(s.energy);
        }
    }
    let (ref_label, axis_label) = match prof.axis {
        Axis::X => ("U(x)", "x"),
        Axis::P => ("T(p)", "p"),
    };
    Chart {
        title: format!("⟨E⟩ along {} for s = {}", axis_label, prof.state_index),
        x_label: axis_label.into(),
        y_label: "energy".into(),
        series: vec![
            Series::new(format!("⟨E⟩_{{s,{axis_label}}}"), PALETTE[0], energy),
            Series::new(ref_label, PALETTE[1], reference).dashed(),
        ],
        markers: prof.poles.clone(),
        y_range: Some(with_margin(lo, hi)),
        ..Chart::default()
    }
}

fn profiles(session: &Session, tables: &MomentTables) -> Result<Vec<EnergyProfile>, CliError> {
    let cfg = &session.config;
    let mut all = Vec::new();
    for i in 0..session.states.len() {
        let sm = tables.state(&session.frame, &session.potential, &session.rho(i))?;
        for (axis, range) in [(Axis::X, &cfg.profile.x), (Axis::P, &cfg.profile.p)] {
            all.push(energy_profile(
                &sm,
                session.states[i].index,
                axis,
                Session::window(range),
                range.points,
            )?);
        }
    }
    Ok(all)
}

/// Conditional average-energy profiles along both axes.
pub fn cmd_energy_profile(session: &Session) -> Result<OutputDir, CliError> {
    let cfg = &session.config;
    let tables = session.tables()?;
    let profs = profiles(session, &tables)?;
    let mut out = open_output(cfg)?;
    for prof in &profs {
        let stem = format!("profile_{}_s{}", prof.axis.name(), prof.state_index);
        if cfg.wants(Format::Csv) {
            out.write_with(&format!("{stem}.csv"), |w| prof.write_csv(w))?;
        }
        if cfg.wants(Format::Json) {
            out.write_json(&format!("{stem}.json"), prof)?;
        }
        if cfg.wants(Format::Svg) {
            out.write_text(
                &format!("{stem}.svg"),
                &render_charts(&[profile_chart(session, prof)]),
            )?;
        }
        println!(
            "state {} {}-axis: {} poles, {} dips",
            prof.state_index,
            prof.axis.name(),
            prof.poles.len(),
            prof.dips.len()
        );
        for d in &prof.diagnostics {
            eprintln!("state {}: {d}", prof.state_index);
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct PoleRecord<'a> {
    state: usize,
    axis: Axis,
    poles: &'a [f64],
    dips: &'a [wplab_core::energy::Dip],
    diagnostics: &'a [String],
}

/// Pole positions of the energy profiles.
pub fn cmd_poles(session: &Session) -> Result<OutputDir, CliError> {
    let cfg = &session.config;
    let tables = session.tables()?;
    let profs = profiles(session, &tables)?;
    let mut out = open_output(cfg)?;
    if cfg.wants(Format::Csv) {
        csv_rows(&mut out, "poles.csv", "state,axis,coord", |w| {
            for prof in &profs {
                for p in &prof.poles {
                    writeln!(w, "{},{},{}", prof.state_index, prof.axis.name(), fmt17(*p))?;
                }
            }
            Ok(())
        })?;
    }
    if cfg.wants(Format::Json) {
        let records: Vec<PoleRecord> = profs
            .iter()
            .map(|p| PoleRecord {
                state: p.state_index,
                axis: p.axis,
                poles: &p.poles,
                dips: &p.dips,
                diagnostics: &p.diagnostics,
            })
            .collect();
        out.write_json("poles.json", &records)?;
    }
    for prof in &profs {
        let list: Vec<String> = prof.poles.iter().map(|p| format!("{p:.6}")).collect();
        println!(
            "state {} {}-axis poles: [{}]",
            prof.state_index,
            prof.axis.name(),
            list.join(", ")
        );
    }
    Ok(out)
}

#[derive(Serialize)]
struct StateReport {
    state: usize,
    energy: f64,
    negativity_tol: f64,
    axes: Vec<PoleNegativityReport>,
}

#[derive(Serialize)]
struct AxisSummary {
    axis: Axis,
    poles: usize,
    intervals: usize,
    bijection: bool,
}

#[derive(Serialize)]
struct ReportSummary {
    state: usize,
    energy: f64,
    axes: Vec<AxisSummary>,
}

/// Wigner slices, negativity intervals, poles and their matching, per state.
pub fn cmd_report(session: &Session) -> Result<OutputDir, CliError> {
    let cfg = &session.config;
    let tol = cfg.negativity_tol();
    let tables = if session.states.is_empty() {
        None
    } else {
        Some(session.tables()?)
    };
    let mut out = open_output(cfg)?;
    let mut summary = Vec::new();
    for i in 0..session.states.len() {
        let st = &session.states[i];
        let rho = session.rho(i);
        let sm = tables
            .as_ref()
            .expect("tables exist when states do")
            .state(&session.frame, &session.potential, &rho)?;
        let mut axes = Vec::new();
        let mut charts = Vec::new();
        for (axis, range) in [(Axis::X, &cfg.profile.x), (Axis::P, &cfg.profile.p)] {
            let (_, rep) = pole_negativity_report(
                &sm,
                &rho,
                st.index,
                axis,
                Session::window(range),
                range.points,
                tol,
            )?;
            let coords = range.coords();
            let (values, _) = slice_negativity(&session.frame, &rho, axis, &coords, tol);
            charts.push(Chart {
                title: format!("W_{} along {} (other coordinate 0)", st.index, axis.name()),
                x_label: axis.name().into(),
                y_label: "W".into(),
                series: vec![Series::new(
                    "W",
                    PALETTE[0],
                    coords
                        .iter()
                        .zip(&values)
                        .map(|(&c, &v)| Some((c, v)))
                        .collect(),
                )],
                bands: rep.intervals.iter().map(|iv| (iv.lo, iv.hi)).collect(),
                markers: rep.poles.clone(),
                ..Chart::default()
            });
            println!(
                "state {} {}-axis: {} poles, {} negativity intervals, bijection: {}",
                st.index,
                axis.name(),
                rep.poles.len(),
                rep.intervals.len(),
                rep.bijection
            );
            axes.push(rep);
        }
        summary.push(ReportSummary {
            state: st.index,
            energy: st.energy,
            axes: axes
                .iter()
                .map(|r| AxisSummary {
                    axis: r.axis,
                    poles: r.poles.len(),
                    intervals: r.intervals.len(),
                    bijection: r.bijection,
                })
                .collect(),
        });
        if cfg.wants(Format::Json) {
            let record = StateReport {
                state: st.index,
                energy: st.energy,
                negativity_tol: tol,
                axes,
            };
            out.write_json(&format!("report_s{}.json", st.index), &record)?;
        }
        if cfg.wants(Format::Svg) {
            out.write_text(
                &format!("report_s{}.svg", st.index),
                &render_charts(&charts),
            )?;
        }
    }
    if cfg.wants(Format::Json) {
        out.write_json("report.json", &summary)?;
    }
    Ok(out)
}

#[derive(Serialize)]
struct Verdict {
    passed: bool,
    suites: Vec<SuiteResult>,
}

/// Runs the cross-check suites; fails when any suite fails.
pub fn cmd_verify(session: &Session) -> Result<OutputDir, CliError> {
    let cfg = &session.config;
    let frame = session.frame;
    let max_nk = cfg.verify.max_nk;
    let table = if cfg.verify.perturb_g != 0.0 {
        GTable::with_perturbation(cfg.verify.perturb_g)
    } else {
        GTable::shared().clone()
    };
    let mut suites = vec![
        verify::theorem_equivalence(&frame, &table, max_nk, 25)?,
        verify::g_table(&table, 8)?,
        verify::closed_form_vs_quadrature(&frame, max_nk.min(10), 3, 4, 4)?,
        verify::parity_law(&frame, max_nk.min(10), 50, 7)?,
        verify::kernel_consistency(&frame, max_nk.min(10), 200, 11)?,
        verify::harmonic_regression(
            &frame,
            cfg.basis_size,
            6.min(cfg.basis_size.saturating_sub(2)),
            13,
        )?,
    ];
    if !session.states.is_empty() {
        suites.push(verify::energy_identity(
            &frame,
            &session.potential,
            &session.states,
            &session.tables()?,
        )?);
    }
    let passed = suites.iter().all(|s| s.passed);
    let mut out = open_output(cfg)?;
    for s in &suites {
        println!(
            "{} {:<28} checks {:>7}  failures {:>5}  worst error/tol {:.3e}",
            if s.passed { "PASS" } else { "FAIL" },
            s.name,
            s.checks,
            s.failures,
            s.worst_ratio
        );
        if !s.passed {
            eprintln!("  worst case: {}", s.detail);
        }
    }
    out.write_json(
        "verify.json",
        &Verdict {
            passed,
            suites: suites.clone(),
        },
    )?;
    if !passed {
        let failed: Vec<&str> = suites
            .iter()
            .filter(|s| !s.passed)
            .map(|s| s.name.as_str())
            .collect();
        return Err(CliError::VerifyFailed(failed.join(", ")));
    }
    Ok(out)
}
