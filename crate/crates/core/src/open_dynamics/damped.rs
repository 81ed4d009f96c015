use ndarray::Array2;

use super::generator::{lindblad_apply, CrossTerm, LindbladGenerator};
use crate::error::{Error, Result};
use crate::fock::{annihilation, ladder_operators, thermal_factor, HilbertSpace};
use crate::hamiltonians::{h_damped_section, ModelParams};
use crate::C64;

/// Displacement parameter and the coefficients of the displaced
/// Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedModelParams {
    /// `β = −g / (ω_m − iγ)`
    pub beta: C64,
    /// `μ = g + ω_m β`
    pub mu: C64,
    /// `ε = 2g Re β + ω_m |β|²`
    pub epsilon: f64,
}

impl DampedModelParams {
    pub fn new(p: &ModelParams) -> Result<Self> {
        p.alpha()?;
        let beta = -p.g / C64::new(p.omega_m, -p.gamma);
        Ok(Self::with_beta(p, beta))
    }

    /// Coefficients for an arbitrary displacement `β`.
    pub fn with_beta(p: &ModelParams, beta: C64) -> Self {
        DampedModelParams {
            beta,
            mu: p.g + beta * p.omega_m,
            epsilon: 2.0 * p.g * beta.re + p.omega_m * beta.norm_sqr(),
        }
    }
}

/// Rate multiplying `𝓛_{n_a}` in the displaced generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DephasingCoefficient {
    /// `γ|β|²`, which follows from expanding `𝓛_{b + βn_a}`.
    Displaced,
    /// Bare `γ`.
    Bare,
}

/// `−i[ω_m n_b + g n_a(b + b†), ρ] + γ 𝓛_b[ρ]`
pub fn original_damped_generator(p: &ModelParams, space: HilbertSpace) -> Result<LindbladGenerator> {
    let h = h_damped_section(p, space)?;
    let l = ladder_operators(space);
    LindbladGenerator::new(&h).with_dissipator(p.gamma, &l.b)
}

/// `−i[ω_m n_b, ρ] + γ 𝓛_b[ρ]` on the full space.
pub fn free_damped_generator(p: &ModelParams, space: HilbertSpace) -> Result<LindbladGenerator> {
    let l = ladder_operators(space);
    LindbladGenerator::new(&l.n_b.scale(p.omega_m)).with_dissipator(p.gamma, &l.b)
}

/// Generator for `ρ_D = D†ρD` with `D = D_b(β n_a)`:
/// `−i[ε n_a² + ω_m n_b + n_a(μ b† + μ* b), ·] + γ𝓛_b + c 𝓛_{n_a} + γβ𝒩 + γβ*𝒩†`,
/// where `𝒩 = 𝒟_{n_a, b}`, `𝒩† = 𝒟_{b, n_a}` and `c` is set by `dephasing`.
pub fn displaced_master_generator_with(
    p: &ModelParams,
    space: HilbertSpace,
    beta: C64,
    dephasing: DephasingCoefficient,
) -> Result<LindbladGenerator> {
    if space.has_qubit() {
        return Err(Error::UnexpectedQubit);
    }
    p.alpha()?;
    let d = DampedModelParams::with_beta(p, beta);
    let l = ladder_operators(space);
    let n2 = &l.n_a * &l.n_a;
    let h = n2.scale(d.epsilon) + l.n_b.scale(p.omega_m) + &l.n_a * &(l.bdag.scale(d.mu) + l.b.scale(d.mu.conj()));
    let rate_n = match dephasing {
        DephasingCoefficient::Displaced => p.gamma * beta.norm_sqr(),
        DephasingCoefficient::Bare => p.gamma,
    };
    LindbladGenerator::new(&h)
        .with_dissipator(p.gamma, &l.b)?
        .with_dissipator(rate_n, &l.n_a)?
        .with_extra_term(CrossTerm::new("N", beta * p.gamma, &l.n_a, &l.b))?
        .with_extra_term(CrossTerm::new("N_dag", beta.conj() * p.gamma, &l.b, &l.n_a))
}

/// Displaced generator at `β = −g/(ω_m − iγ)`.
pub fn displaced_master_generator(p: &ModelParams, space: HilbertSpace) -> Result<LindbladGenerator> {
    let beta = DampedModelParams::new(p)?.beta;
    displaced_master_generator_with(p, space, beta, DephasingCoefficient::Displaced)
}

/// Max-abs difference between the displaced generator and the free damped
/// oscillator, both applied to `field ⊗ σ`.
pub fn field_reduction_residual(
    p: &ModelParams,
    space: HilbertSpace,
    field: &Array2<C64>,
    sigma_mech: &Array2<C64>,
) -> Result<f64> {
    if field.nrows() != space.n_cavity() {
        return Err(Error::DimensionMismatch { expected: space.n_cavity(), actual: field.nrows() });
    }
    if sigma_mech.nrows() != space.n_mech() {
        return Err(Error::DimensionMismatch { expected: space.n_mech(), actual: sigma_mech.nrows() });
    }
    let rho = ndarray::linalg::kron(field, sigma_mech);
    let lhs = lindblad_apply(&displaced_master_generator(p, space)?, &rho)?;
    let rhs = lindblad_apply(&free_damped_generator(p, space)?, &rho)?;
    Ok((&lhs - &rhs).iter().fold(0.0_f64, |a, z| a.max(z.norm())))
}

/// [`field_reduction_residual`] with the thermal field `ρ_th(n̄)`.
pub fn thermal_reduction_residual(p: &ModelParams, space: HilbertSpace, sigma_mech: &Array2<C64>) -> Result<f64> {
    let field = thermal_factor(space.n_cavity(), p.nbar)?;
    field_reduction_residual(p, space, &field, sigma_mech)
}

/// Order in which the jump and decay exponentials act.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormOrdering {
    /// `e^{𝓛t} e^{f(t)𝒥}`: the jump series acts first.
    JumpThenDecay,
    /// `e^{f(t)𝒥} e^{𝓛t}`: the decay acts first.
    DecayThenJump,
    /// Jump series first, with exponent `((1 − e^{−2γ})/(2γ))·t`.
    PrintedExponent,
}

impl ClosedFormOrdering {
    pub const ALL: [ClosedFormOrdering; 3] =
        [ClosedFormOrdering::JumpThenDecay, ClosedFormOrdering::DecayThenJump, ClosedFormOrdering::PrintedExponent];

    pub fn as_str(&self) -> &'static str {
        match self {
            ClosedFormOrdering::JumpThenDecay => "jump-then-decay",
            ClosedFormOrdering::DecayThenJump => "decay-then-jump",
            ClosedFormOrdering::PrintedExponent => "printed-exponent",
        }
    }
}

/// `(1 − e^{−2γt}) / (2γ)`, which tends to `t` as `γ → 0`.
fn jump_weight(gamma: f64, t: f64) -> f64 {
    let x = 2.0 * gamma * t;
    if x.abs() < 1e-8 {
        t * (1.0 - x / 2.0)
    } else {
        -(-x).exp_m1() / (2.0 * gamma)
    }
}

fn apply_jump_series(rho: &Array2<C64>, f: f64, gamma: f64) -> Array2<C64> {
    let n = rho.nrows();
    let b = annihilation(n);
    let bd = b.t().to_owned();
    let mut term = rho.clone();
    let mut out = rho.clone();
    for k in 1..n {
        term = b.dot(&term).dot(&bd).mapv(|z| z * (2.0 * gamma * f / k as f64));
        out += &term;
    }
    out
}

fn apply_decay(rho: &mut Array2<C64>, gamma: f64, t: f64) {
    for ((m, k), z) in rho.indexed_iter_mut() {
        *z *= (-gamma * (m + k) as f64 * t).exp();
    }
}

/// Damped oscillator `dρ/dt = −iω_m[n_b, ρ] + γ𝓛_b[ρ]` in closed form.
pub fn closed_form_damped(rho0: &Array2<C64>, t: f64, omega_m: f64, gamma: f64) -> Result<Array2<C64>> {
    closed_form_damped_ordered(rho0, t, omega_m, gamma, ClosedFormOrdering::JumpThenDecay)
}

pub fn closed_form_damped_ordered(
    rho0: &Array2<C64>,
    t: f64,
    omega_m: f64,
    gamma: f64,
    ordering: ClosedFormOrdering,
) -> Result<Array2<C64>> {
    if !rho0.is_square() {
        return Err(Error::InvalidState("density matrix must be square".into()));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} must be ≥ 0")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("t = {t} must be ≥ 0")));
    }
    let mut rho = rho0.clone();
    for ((m, k), z) in rho.indexed_iter_mut() {
        *z *= C64::from_polar(1.0, -omega_m * (m as f64 - k as f64) * t);
    }
    Ok(match ordering {
        ClosedFormOrdering::JumpThenDecay => {
            let mut r = apply_jump_series(&rho, jump_weight(gamma, t), gamma);
            apply_decay(&mut r, gamma, t);
            r
        }
        ClosedFormOrdering::DecayThenJump => {
            apply_decay(&mut rho, gamma, t);
            apply_jump_series(&rho, jump_weight(gamma, t), gamma)
        }
        ClosedFormOrdering::PrintedExponent => {
            let mut r = apply_jump_series(&rho, jump_weight(gamma, 1.0) * t, gamma);
            apply_decay(&mut r, gamma, t);
            r
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::linalg::trace_distance;

    fn pop(n: usize, i: usize) -> Array2<C64> {
        let mut r = Array2::zeros((n, n));
        r[[i, i]] = C64::new(1.0, 0.0);
        r
    }

    #[test]
    fn one_phonon_populations() {
        let gamma = 0.05;
        for &t in &[0.0, 1.0, 7.5, 40.0] {
            let r = closed_form_damped(&pop(5, 1), t, 1.0, gamma).unwrap();
            let p1 = (-2.0 * gamma * t).exp();
            assert!((r[[1, 1]].re - p1).abs() < 1e-14);
            assert!((r[[0, 0]].re - (1.0 - p1)).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_time_and_zero_damping() {
        let mut rho = pop(4, 2) * C64::new(0.5, 0.0) + pop(4, 0) * C64::new(0.5, 0.0);
        rho[[0, 2]] = C64::new(0.5, 0.0);
        rho[[2, 0]] = C64::new(0.5, 0.0);
        let r = closed_form_damped(&rho, 0.0, 1.0, 0.1).unwrap();
        assert!(trace_distance(&r, &rho) < 1e-15);
        let r = closed_form_damped(&rho, 3.0, 1.0, 0.0).unwrap();
        for i in 0..4 {
            assert!((r[[i, i]] - rho[[i, i]]).norm() < 1e-15);
        }
        assert!((r[[0, 2]] - C64::from_polar(0.5, 6.0)).norm() < 1e-14);
    }

    #[test]
    fn decay_first_ordering_loses_trace() {
        let r = closed_form_damped_ordered(&pop(3, 1), 5.0, 1.0, 0.1, ClosedFormOrdering::DecayThenJump).unwrap();
        let tr: f64 = (0..3).map(|i| r[[i, i]].re).sum();
        assert!((tr - 1.0).abs() > 0.1);
    }

    #[test]
    fn beta_parameters() {
        let p = ModelParams::default();
        let d = DampedModelParams::new(&p).unwrap();
        let beta = -p.g / C64::new(p.omega_m, -p.gamma);
        assert!((d.beta - beta).norm() < 1e-16);
        assert!((d.mu - (p.g + p.omega_m * beta)).norm() < 1e-16);
        let zero = DampedModelParams::with_beta(&p, C64::new(0.0, 0.0));
        assert_eq!(zero.mu, C64::new(p.g, 0.0));
        assert_eq!(zero.epsilon, 0.0);
    }

    #[test]
    fn reduction_vanishes_without_coupling() {
        let p = ModelParams { g: 0.0, ..Default::default() };
        let space = HilbertSpace::optomechanical(3, 4).unwrap();
        let r = thermal_reduction_residual(&p, space, &pop(4, 1)).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn reduction_on_thermal_field() {
        let p = ModelParams::default();
        let space = HilbertSpace::optomechanical(8, 24).unwrap();
        assert!(thermal_reduction_residual(&p, space, &pop(24, 0)).unwrap() < 1e-10);
    }
}
