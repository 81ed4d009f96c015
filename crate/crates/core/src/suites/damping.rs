use ndarray::Array2;

use super::{
    cptp_reports, cptp_values, random_density, random_hermitian, SuiteConfig, DISPLACEMENT_TOL, EXACT_TOL, IDENTITY_TOL,
};
use crate::error::Result;
use crate::fock::linalg::trace_distance;
use crate::fock::{
    annihilation, displacement_conditioned, mech_headroom, number, thermal_factor, HilbertSpace, QuantumState,
    Subsystem,
};
use crate::hamiltonians::ModelParams;
use crate::open_dynamics::{
    closed_form_damped, closed_form_damped_ordered, displaced_master_generator, displaced_master_generator_with,
    field_reduction_residual, lindblad_apply, original_damped_generator, rk4_propagate, ClosedFormOrdering,
    DampedModelParams, DephasingCoefficient, LindbladGenerator, PropagationOptions,
};
use crate::report::DeviationReport;
use crate::C64;

/// Closed form against RK4, in trace distance.
pub const CLOSED_FORM_TOL: f64 = 1e-6;
const RANDOM_STATES: usize = 10;

fn max_abs(m: &Array2<C64>) -> f64 {
    m.iter().fold(0.0_f64, |a, z| a.max(z.norm()))
}

fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

pub(super) fn damped_reduction(cfg: &SuiteConfig) -> Result<Vec<DeviationReport>> {
    let p = &cfg.params;
    let space = cfg.optomech_space()?;
    let (nc, nm) = (cfg.n_cavity, cfg.n_mech);
    let mut rng = cfg.rng("damped-reduction");
    let sigmas: Vec<Array2<C64>> = (0..3).map(|_| random_density(&mut rng, nm, nm)).collect();

    let thermal = thermal_factor(nc, p.nbar)?;
    let mut fock = Array2::<C64>::zeros((nc, nc));
    fock[[2.min(nc - 1), 2.min(nc - 1)]] = C64::new(1.0, 0.0);
    let diag_random = {
        let r = random_density(&mut rng, nc, nc);
        Array2::from_diag(&r.diag().to_owned())
    };
    let coherent = QuantumState::coherent(HilbertSpace::optomechanical(nc, 2)?, C64::new(1.0, 0.0), Subsystem::Cavity)?
        .to_density();
    // cavity factor of |α⟩⊗|0⟩
    let coherent = Array2::from_shape_fn((nc, nc), |(i, j)| coherent[[2 * i, 2 * j]]);

    let mut out = Vec::new();
    for (name, field) in [("thermal", &thermal), ("fock", &fock), ("random-diagonal", &diag_random)] {
        let mut worst = 0.0_f64;
        for s in &sigmas {
            worst = worst.max(field_reduction_residual(p, space, field, s)?);
        }
        out.push(DeviationReport::new(format!("reduction-{name}-field"), worst, IDENTITY_TOL));
    }
    let coh = field_reduction_residual(p, space, &coherent, &sigmas[0])?;
    out.push(
        DeviationReport::new("reduction-coherent-field", coh, IDENTITY_TOL)
            .with_notes("field not diagonal in photon number")
            .informational(),
    );

    let gen = displaced_master_generator(p, space)?;
    let dim = space.dim();
    let (mut tr, mut herm) = (0.0_f64, 0.0_f64);
    for _ in 0..20 {
        let rho = random_density(&mut rng, dim, dim);
        tr = tr.max(lindblad_apply(&gen, &rho)?.diag().sum().norm());
        let h = random_hermitian(&mut rng, dim);
        let lh = lindblad_apply(&gen, &h)?;
        herm = herm.max(max_abs(&(&lh - &dagger(&lh))));
    }
    out.push(DeviationReport::new("generator-trace", tr, IDENTITY_TOL));
    out.push(DeviationReport::new("generator-hermiticity", herm, EXACT_TOL));

    // D 𝓛_D[ρ_D] D† = 𝓛[D ρ_D D†] with D = D_b(β n_a)
    let beta = DampedModelParams::new(p)?.beta;
    let pad = mech_headroom(beta.norm() * (nc - 1) as f64, nm);
    let work = space.with_headroom(0, pad);
    let d = displacement_conditioned(work, beta, 0.0)?;
    let (dd, ddag) = (d.data(), dagger(d.data()));
    let orig = original_damped_generator(p, work)?;
    let mut worst = [0.0_f64; 2];
    for _ in 0..3 {
        let sigma = random_density(&mut rng, space.dim(), space.dim());
        let rho_d = embed_corner(&sigma, space, work);
        let rhs = lindblad_apply(&orig, &dd.dot(&rho_d).dot(&ddag))?;
        for (slot, deph) in worst.iter_mut().zip([DephasingCoefficient::Displaced, DephasingCoefficient::Bare]) {
            let g = displaced_master_generator_with(p, work, beta, deph)?;
            let lhs = dd.dot(&lindblad_apply(&g, &rho_d)?).dot(&ddag);
            *slot = slot.max(corner_deviation(&lhs, &rhs, space, work, cfg.buffer_cav, cfg.buffer_mech));
        }
    }
    let note = format!("working space carries {pad} extra mechanical levels");
    out.push(
        DeviationReport::new("conjugation-dephasing-gamma-beta2", worst[0], DISPLACEMENT_TOL)
            .with_buffers(cfg.buffer_cav, cfg.buffer_mech)
            .with_notes(format!("rate γ|β|² on L_(n_a); {note}")),
    );
    out.push(
        DeviationReport::new("conjugation-dephasing-gamma", worst[1], DISPLACEMENT_TOL)
            .with_buffers(cfg.buffer_cav, cfg.buffer_mech)
            .with_notes("rate γ on L_(n_a)")
            .informational(),
    );
    Ok(out)
}

/// Place a state of `small` in the low corner of `big`.
fn embed_corner(rho: &Array2<C64>, small: HilbertSpace, big: HilbertSpace) -> Array2<C64> {
    let n = big.dim();
    let map: Vec<usize> = (0..small.dim())
        .map(|i| {
            let (q, c, m) = small.decompose(i);
            big.index(q, c, m)
        })
        .collect();
    let mut out = Array2::<C64>::zeros((n, n));
    for (i, &gi) in map.iter().enumerate() {
        for (j, &gj) in map.iter().enumerate() {
            out[[gi, gj]] = rho[[i, j]];
        }
    }
    out
}

fn corner_deviation(
    a: &Array2<C64>,
    b: &Array2<C64>,
    small: HilbertSpace,
    big: HilbertSpace,
    buffer_cav: usize,
    buffer_mech: usize,
) -> f64 {
    let idx: Vec<usize> = (0..small.dim())
        .filter_map(|i| {
            let (q, c, m) = small.decompose(i);
            (c + buffer_cav < small.n_cavity() && m + buffer_mech < small.n_mech()).then(|| big.index(q, c, m))
        })
        .collect();
    let mut worst = 0.0_f64;
    for &i in &idx {
        for &j in &idx {
            worst = worst.max((a[[i, j]] - b[[i, j]]).norm());
        }
    }
    worst
}

/// Closed-form damped oscillator against RK4 for random initial states,
/// plus the alternative exponential orderings and the asymptotic state.
pub fn closed_form_reports(
    p: &ModelParams,
    n_mech: usize,
    dt: f64,
    seed_cfg: &SuiteConfig,
) -> Result<Vec<DeviationReport>> {
    let gamma = p.gamma;
    let t_max = 5.0 / gamma;
    let gen = LindbladGenerator::from_matrix(number(n_mech).mapv(|z| z * p.omega_m))
        .with_dissipator_matrix(gamma, &annihilation(n_mech))?;
    let steps = (t_max / dt).ceil() as usize;
    let opts =
        PropagationOptions { record_every: (steps / 20).max(1), eig_every: 1, keep_states: true, ..Default::default() };
    let mut rng = seed_cfg.rng("closed-form");
    let mut dist = [0.0_f64; 3];
    let mut out = Vec::new();
    let mut cptp = [0.0_f64, 0.0, f64::INFINITY];
    for _ in 0..RANDOM_STATES {
        let rho0 = random_density(&mut rng, n_mech, n_mech / 2);
        let series = rk4_propagate(&gen, &rho0, t_max, dt, &[], &opts)?;
        for (t, rho) in series.t.iter().zip(&series.states) {
            for (slot, ord) in dist.iter_mut().zip(ClosedFormOrdering::ALL) {
                let cf = closed_form_damped_ordered(&rho0, *t, p.omega_m, gamma, ord)?;
                *slot = slot.max(trace_distance(&cf, rho));
            }
        }
        cptp[0] = cptp[0].max(series.max_trace_drift);
        cptp[1] = cptp[1].max(series.max_hermiticity_defect);
        cptp[2] = cptp[2].min(series.min_eigenvalue);
    }
    for (d, ord) in dist.iter().zip(ClosedFormOrdering::ALL) {
        let r = DeviationReport::new(format!("rk4-vs-{}", ord.as_str()), *d, CLOSED_FORM_TOL)
            .with_notes(format!("{RANDOM_STATES} random states, t ≤ 5/γ = {t_max}"));
        out.push(if ord == ClosedFormOrdering::JumpThenDecay { r } else { r.informational() });
    }
    out.extend(cptp_values("rk4", cptp[0], cptp[1], cptp[2]));

    let rho0 = random_density(&mut rng, n_mech, n_mech / 2);
    let late = closed_form_damped(&rho0, 20.0 / gamma, p.omega_m, gamma)?;
    let mut ground = Array2::<C64>::zeros((n_mech, n_mech));
    ground[[0, 0]] = C64::new(1.0, 0.0);
    out.push(DeviationReport::new("asymptotic-ground-state", trace_distance(&late, &ground), CLOSED_FORM_TOL));
    Ok(out)
}

pub(super) fn closed_form(cfg: &SuiteConfig) -> Result<Vec<DeviationReport>> {
    let p = &cfg.params;
    let mut out = closed_form_reports(p, cfg.n_mech, cfg.dt(), cfg)?;

    // the displaced model with a thermal field evolves as ρ_th ⊗ σ(t)
    let small = HilbertSpace::optomechanical(3, 10)?;
    let gen = displaced_master_generator(p, small)?;
    let mut rng = cfg.rng("closed-form-thermal");
    let sigma = random_density(&mut rng, 10, 5);
    let field = thermal_factor(3, p.nbar)?;
    let rho0 = ndarray::linalg::kron(&field, &sigma);
    let t_max = 5.0 / p.gamma;
    let opts = PropagationOptions { record_every: 1000, keep_states: true, ..Default::default() };
    let series = rk4_propagate(&gen, &rho0, t_max, cfg.dt(), &[], &opts)?;
    let mut worst = 0.0_f64;
    for (t, rho) in series.t.iter().zip(&series.states) {
        let cf = ndarray::linalg::kron(&field, &closed_form_damped(&sigma, *t, p.omega_m, p.gamma)?);
        worst = worst.max(trace_distance(&cf, rho));
    }
    out.push(
        DeviationReport::new("displaced-thermal-vs-closed-form", worst, CLOSED_FORM_TOL)
            .with_notes("3 photon levels, 10 mechanical levels"),
    );
    out.extend(cptp_reports("displaced-thermal", &series));
    Ok(out)
}
