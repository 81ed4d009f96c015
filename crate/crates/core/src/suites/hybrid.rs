use std::f64::consts::FRAC_PI_4;

use super::{fmt_times, max_over, SuiteConfig, EXACT_TOL, IDENTITY_TOL, PROPAGATOR_TOL};
use crate::error::Result;
use crate::fock::{
    displacement_conditioned, embed, expm, ladder_operators, mech_headroom, number_function, pauli_operators, qubit,
    HilbertSpace, OperatorMatrix, Subsystem,
};
use crate::hamiltonians::{h_am, h_am_analytic, h_d, h_hybrid, h_hybrid_rotated, h_k, h_t, ModelParams};
use crate::report::DeviationReport;
use crate::transforms::{
    conjugate, interior_deviation, right_unitary_t, rotating_frame_residual, ry_rotation, verify_identity,
    FrameGenerator,
};
use crate::C64;

fn propagator(h: &OperatorMatrix, t: f64) -> Result<OperatorMatrix> {
    expm(&h.scale(C64::new(0.0, -t)))
}

pub(super) fn rearrangement(cfg: &SuiteConfig) -> Result<Vec<DeviationReport>> {
    let p = &cfg.params;
    let space = cfg.hybrid_space()?;
    let l = ladder_operators(space);
    let s = pauli_operators(space)?;
    let pe = embed(&qubit::projector(qubit::EXCITED), Subsystem::Qubit, space)?;
    let x = l.x_b();
    let shifted_n = number_function(space, Subsystem::Cavity, |n| C64::new(n as f64 - 0.5, 0.0))?;
    let lhs = (&x * &pe).scale(p.g) - (&l.n_a * &x).scale(p.g);
    let rhs = (&x * &s.sz).scale(p.g / 2.0) - (&shifted_n * &x).scale(p.g);

    let sqrt_n = number_function(space, Subsystem::Cavity, |n| C64::new((n as f64).sqrt(), 0.0))?;
    let rewritten =
        s.sz.scale(p.delta() / 2.0) + l.n_b.scale(p.omega_m) + (&sqrt_n * &s.sx).scale(p.lambda) + rhs.clone();
    Ok(vec![
        verify_identity("coupling-terms", &lhs, &rhs, 0, 0, IDENTITY_TOL)?,
        verify_identity("h_T-rewritten", &h_t(p, space)?, &rewritten, 0, 0, IDENTITY_TOL)?,
    ])
}

pub(super) fn right_unitary(cfg: &SuiteConfig) -> Result<Vec<DeviationReport>> {
    let p = &cfg.params;
    let space = cfg.hybrid_space()?;
    let (bc, bm) = (cfg.buffer_cav, cfg.buffer_mech);
    let tp = right_unitary_t(space)?;
    let id = OperatorMatrix::identity(space);
    let ht = h_t(p, space)?;
    let hr = h_hybrid_rotated(p, space)?;

    let tt = &tp.t * &tp.t_dag;
    let left = interior_deviation(&tt, &id, bc, 0)?;
    let (_, right) = tp.defects();
    let kernel_term = (&(&tp.t * &ht) * &tp.kernel).max_abs();
    let chain = tp.forward(&ht);
    let squared = tp.forward(&(&ht * &ht));
    let hr2 = &hr * &hr;

    let ts = cfg.sample_times("right-unitary", 5.0 * cfg.period());
    let prop = max_over(&ts, |&t| {
        let lhs = propagator(&hr, t)?;
        let rhs = tp.forward(&propagator(&ht, t)?);
        interior_deviation(&lhs, &rhs, bc, bm)
    })?;

    Ok(vec![
        DeviationReport::new("T-Tdag", left, EXACT_TOL).with_buffers(bc, 0),
        DeviationReport::new("Tdag-T", right, EXACT_TOL),
        DeviationReport::new("kernel-term", kernel_term, EXACT_TOL),
        verify_identity("T-h_T-Tdag", &chain, &hr, bc, bm, IDENTITY_TOL)?,
        verify_identity("squared", &squared, &hr2, bc, bm, 1e-9)?,
        DeviationReport::new("propagator", prop, PROPAGATOR_TOL).with_buffers(bc, bm).with_notes(fmt_times(&ts)),
    ])
}

/// The displacement `D_b[α(n_a − ½)]`, `R_y(π/4)` and `T` on one space.
struct Chain {
    d: OperatorMatrix,
    r: OperatorMatrix,
    t: OperatorMatrix,
}

impl Chain {
    fn new(p: &ModelParams, space: HilbertSpace) -> Result<Self> {
        Ok(Chain {
            d: displacement_conditioned(space, C64::new(p.alpha()?, 0.0), 0.5)?,
            r: ry_rotation(FRAC_PI_4, space)?,
            t: right_unitary_t(space)?.t,
        })
    }

    /// `T D R^{±1} X R^{∓1} D† T†`; `dagger_first` selects `R† X R`.
    fn unfold(&self, x: &OperatorMatrix, dagger_first: bool) -> OperatorMatrix {
        let r = if dagger_first { self.r.dagger() } else { self.r.clone() };
        let w = &(&self.t * &self.d) * &r;
        &(&w * x) * &w.dagger()
    }
}

pub(super) fn hybrid_chain(cfg: &SuiteConfig) -> Result<Vec<DeviationReport>> {
    let p = &cfg.params;
    let space = cfg.hybrid_space()?;
    let (bc, bm) = (cfg.buffer_cav, cfg.buffer_mech);
    let mut out = Vec::new();

    // lab frame to the frame rotating with ω_c(n_a + σ_z/2)
    let l = ladder_operators(space);
    let s = pauli_operators(space)?;
    let frame = FrameGenerator::new((l.n_a.clone() + s.sz.scale(0.5)).scale(p.omega_c))?;
    let hh = h_hybrid(p, space)?;
    let hr_user = h_hybrid_rotated(p, space)?;
    let ts = cfg.sample_times("hybrid-rotating-frame", 10.0 * cfg.period());
    let dev = max_over(&ts, |&t| interior_deviation(&rotating_frame_residual(&frame, &hh, t)?, &hr_user, bc, bm))?;
    out.push(DeviationReport::new("rotating-frame", dev, IDENTITY_TOL).with_buffers(bc, bm).with_notes(fmt_times(&ts)));

    let alpha = p.alpha()?;
    let pad = mech_headroom(alpha * (cfg.n_cavity as f64 - 0.5), cfg.n_mech);
    let work = space.with_headroom(0, pad);
    let chain = Chain::new(p, work)?;
    let pad_note = format!("working space carries {pad} extra mechanical levels");

    let hd_conj = conjugate(&chain.d, &h_t(p, work)?);
    let hd = h_d(p, work)?;
    out.push(
        verify_identity("h_d", &hd_conj.restrict_to(space)?, &hd.restrict_to(space)?, bc, bm, IDENTITY_TOL)?
            .with_notes(pad_note.clone()),
    );

    // R σ_z R† and R σ_x R†
    let rs = conjugate(&ry_rotation(FRAC_PI_4, space)?.dagger(), &s.sz);
    out.push(
        DeviationReport::new("ry-sign", rs.max_abs_diff(&s.sx), EXACT_TOL)
            .with_notes("R_y(π/4) σ_z R_y(π/4)† = +σ_x and R_y(π/4) σ_x R_y(π/4)† = −σ_z"),
    );

    let ha = conjugate(&chain.r.dagger(), &hd);
    let hk_work = h_k(p, work)?;
    let ham_conj = ha.clone() - hk_work.clone();
    let coeff = |c: f64| -> Result<f64> { Ok(ham_conj.max_abs_diff(&h_am_analytic(p, work, c)?)) };
    out.push(
        DeviationReport::new("h_am-omega-tilde-full-kerr", coeff(1.0)?, IDENTITY_TOL)
            .with_notes("Ω̃ = δ/2 + (g²/ω_m)(n_a − ½) reproduces R H_d R† − H_K"),
    );
    out.push(
        DeviationReport::new("h_am-omega-tilde-half-kerr", coeff(0.5)?, IDENTITY_TOL)
            .with_notes("Ω̃ = δ/2 + (g²/(2ω_m))(n_a − ½)")
            .informational(),
    );

    let ham = h_am(p, space)?;
    let hk = h_k(p, space)?;
    out.push(DeviationReport::new("kerr-commutes", hk.commutator(&ham).max_abs(), EXACT_TOL));

    // factorized propagator through T, D and R
    let hr = h_hybrid_rotated(p, work)?;
    let ts = cfg.sample_times("hybrid-propagator", 5.0 * cfg.period());
    let mut worst = [0.0_f64; 2];
    for &t in &ts {
        let lhs = propagator(&hr, t)?.restrict_to(space)?;
        let e = propagator(&ha, t)?;
        for (slot, dagger_first) in worst.iter_mut().zip([true, false]) {
            let rhs = chain.unfold(&e, dagger_first).restrict_to(space)?;
            *slot = slot.max(interior_deviation(&lhs, &rhs, bc, bm)?);
        }
    }
    out.push(
        DeviationReport::new("propagator-R-dagger-inside", worst[0], PROPAGATOR_TOL)
            .with_buffers(bc, bm)
            .with_notes(format!("T D R† e^(-i H_a t) R D† T†; {}; {pad_note}", fmt_times(&ts))),
    );
    out.push(
        DeviationReport::new("propagator-R-inside", worst[1], PROPAGATOR_TOL)
            .with_buffers(bc, bm)
            .with_notes("T D R e^(-i H_a t) R† D† T†")
            .informational(),
    );
    Ok(out)
}
