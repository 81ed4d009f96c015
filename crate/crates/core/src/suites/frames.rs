use std::f64::consts::PI;

use super::{displacement_oracle, fmt_times, max_over, SuiteConfig, EXACT_TOL, IDENTITY_TOL, SPECTRUM_TOL};
use crate::error::Result;
use crate::fock::linalg::hermitian_eigenvalues;
use crate::fock::{displacement_conditioned, ladder_operators, mech_headroom, OperatorMatrix};
use crate::hamiltonians::{h_c, h_cm, h_displaced, h_pump_frame, h_pumped, h_standard, ModelParams};
use crate::report::DeviationReport;
use crate::transforms::{conjugate, interior_deviation, rotating_frame_residual, verify_identity, FrameGenerator};
use crate::C64;

pub(super) fn pump_frame(cfg: &SuiteConfig) -> Result<Vec<DeviationReport>> {
    let p = &cfg.params;
    let space = cfg.optomech_space()?;
    let l = ladder_operators(space);
    let frame = FrameGenerator::new(l.n_a.scale(p.omega_p))?;
    let ts = cfg.sample_times("pump-frame", 10.0 * cfg.period());
    let dev = max_over(&ts, |&t| {
        let lhs = rotating_frame_residual(&frame, &h_pumped(p, space, t)?, t)?;
        interior_deviation(&lhs, &h_pump_frame(p, space, t)?, cfg.buffer_cav, cfg.buffer_mech)
    })?;
    let id = OperatorMatrix::identity(space);
    let unitarity = max_over(&ts, |&t| {
        let u = frame.unitary(t)?;
        Ok((&u * &u.dagger()).max_abs_diff(&id))
    })?;
    let group = max_over(ts.windows(2), |w| {
        let lhs = &frame.unitary(w[0])? * &frame.unitary(w[1])?;
        Ok(lhs.max_abs_diff(&frame.unitary(w[0] + w[1])?))
    })?;
    Ok(vec![
        DeviationReport::new("conjugated-h_pumped", dev, IDENTITY_TOL)
            .with_buffers(cfg.buffer_cav, cfg.buffer_mech)
            .with_notes(fmt_times(&ts)),
        DeviationReport::new("frame-unitarity", unitarity, IDENTITY_TOL),
        DeviationReport::new("frame-composition", group, 1e-9),
    ])
}

pub(super) fn rwa_average(cfg: &SuiteConfig) -> Result<Vec<DeviationReport>> {
    let p = &cfg.params;
    let space = cfg.optomech_space()?;
    // the dropped terms oscillate at 2ω_p; 16 nodes over one period average
    // them exactly
    let nodes = 16;
    let period = PI / p.omega_p;
    let mut avg = OperatorMatrix::zeros(space);
    for j in 0..nodes {
        avg = avg + h_pump_frame(p, space, period * j as f64 / nodes as f64)?.scale(1.0 / nodes as f64);
    }
    Ok(vec![verify_identity("time-average", &avg, &h_c(p, space)?, cfg.buffer_cav, cfg.buffer_mech, IDENTITY_TOL)?
        .with_notes(format!("{nodes}-point average over π/ω_p"))])
}

pub(super) fn polaron(cfg: &SuiteConfig) -> Result<Vec<DeviationReport>> {
    let p = &cfg.params;
    let space = cfg.optomech_space()?;
    let alpha = p.alpha()?;
    let pad = mech_headroom(alpha * (cfg.n_cavity - 1) as f64, cfg.n_mech);
    let work = space.with_headroom(0, pad);
    let d = displacement_conditioned(work, C64::new(alpha, 0.0), 0.0)?;
    let lhs = conjugate(&d, &h_c(p, work)?).restrict_to(space)?;
    let rhs = h_displaced(p, work)?.restrict_to(space)?;
    let note = format!("working space carries {pad} extra mechanical levels");

    let l = ladder_operators(work);
    let d1 = crate::fock::displacement(
        work,
        C64::new(alpha, 0.0),
        crate::fock::Subsystem::Mech,
        crate::fock::DisplacementMethod::Expm,
    )?;
    let shifted = conjugate(&d1, &l.b).restrict_to(space)?;
    let expect = (l.b.clone() + OperatorMatrix::identity(work).scale(alpha)).restrict_to(space)?;

    let g0 = ModelParams { g: 0.0, ..*p };
    let zero = conjugate(&displacement_conditioned(space, C64::new(0.0, 0.0), 0.0)?, &h_c(&g0, space)?);
    let zero_dev = zero.max_abs_diff(&h_displaced(&g0, space)?);

    Ok(vec![
        verify_identity("conjugated-h_c", &lhs, &rhs, cfg.buffer_cav, cfg.buffer_mech, IDENTITY_TOL)?
            .with_notes(note.clone()),
        verify_identity("displacement-shift", &shifted, &expect, cfg.buffer_cav, cfg.buffer_mech, IDENTITY_TOL)?
            .with_notes(note),
        DeviationReport::new("uncoupled-limit", zero_dev, EXACT_TOL),
        displacement_oracle(alpha, cfg.n_mech, cfg.buffer_mech)?,
    ])
}

pub(super) fn cm_frame(cfg: &SuiteConfig) -> Result<Vec<DeviationReport>> {
    let p = &cfg.params;
    let space = cfg.optomech_space()?;
    let l = ladder_operators(space);
    let frame = FrameGenerator::new(l.n_a.scale(p.delta_p()) + l.n_b.scale(p.omega_m))?;
    let hd = h_displaced(p, space)?;
    let ts = cfg.sample_times("cm-frame", 10.0 * cfg.period());
    let dev = max_over(&ts, |&t| {
        let lhs = rotating_frame_residual(&frame, &hd, t)?;
        interior_deviation(&lhs, &h_cm(p, space, t)?, cfg.buffer_cav, cfg.buffer_mech)
    })?;
    Ok(vec![DeviationReport::new("conjugated-h_displaced", dev, IDENTITY_TOL)
        .with_buffers(cfg.buffer_cav, cfg.buffer_mech)
        .with_notes(fmt_times(&ts))])
}

pub(super) fn kerr_spectrum(cfg: &SuiteConfig) -> Result<Vec<DeviationReport>> {
    let p = ModelParams { pump_strength: 0.0, ..cfg.params };
    let space = cfg.optomech_space()?;
    let kerr = p.kerr()?;
    let alpha = p.alpha()?;
    let pad = mech_headroom(alpha * (cfg.n_cavity - 1) as f64, cfg.n_mech);
    let work = space.with_headroom(0, pad);
    let h = h_standard(&p, work)?;
    let nm = work.n_mech();
    let keep_m = cfg.n_mech - cfg.buffer_mech;
    let mut dev = 0.0_f64;
    for n in 0..(cfg.n_cavity - cfg.buffer_cav) {
        let base = work.index(0, n, 0);
        let block = h.data().slice(ndarray::s![base..base + nm, base..base + nm]).to_owned();
        let ev = hermitian_eigenvalues(&block);
        for (m, e) in ev.iter().take(keep_m).enumerate() {
            let want = p.omega_c * n as f64 + p.omega_m * m as f64 - kerr * (n * n) as f64;
            dev = dev.max((e - want).abs());
        }
    }
    Ok(vec![DeviationReport::new("interior-spectrum", dev, SPECTRUM_TOL)
        .with_buffers(cfg.buffer_cav, cfg.buffer_mech)
        .with_notes(format!("Ω = 0, photon blocks diagonalized with {pad} extra mechanical levels"))])
}
