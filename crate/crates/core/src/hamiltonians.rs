//! Hamiltonian builders for the standard, driven, damped and hybrid models.
//!
//! Every builder returns a Hermitian operator on the space it is given.
//! Functions of number operators (`√n̂`, factorial ratios, Laguerre
//! polynomials) are evaluated on the Fock-basis eigenvalues.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    annihilation, creation, diagonal, displacement_factor, laguerre, ln_factorial, number, qubit, DisplacementMethod,
    HilbertSpace, OperatorMatrix,
};
use crate::transforms::{conjugate, ry_rotation};
use crate::C64;

/// Physical parameters shared by every model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    /// Cavity frequency.
    pub omega_c: f64,
    /// Mechanical frequency.
    pub omega_m: f64,
    /// Radiation-pressure coupling.
    pub g: f64,
    /// Pump strength `Ω`.
    #[serde(rename = "Omega")]
    pub pump_strength: f64,
    /// Pump frequency.
    pub omega_p: f64,
    /// Qubit transition frequency.
    pub omega_0: f64,
    /// Qubit-field coupling.
    pub lambda: f64,
    /// Mechanical decay rate.
    pub gamma: f64,
    /// Thermal mean photon number.
    pub nbar: f64,
    /// Sideband order.
    pub s: u32,
    /// Sign of the sideband detuning, `δ_p = sign · s · ω_m`.
    pub sideband_sign: i32,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            omega_c: 100.0,
            omega_m: 1.0,
            g: 0.1,
            pump_strength: 0.2,
            omega_p: 99.0,
            omega_0: 100.5,
            lambda: 0.1,
            gamma: 0.05,
            nbar: 1.0,
            s: 1,
            sideband_sign: 1,
        }
    }
}

impl ModelParams {
    /// `δ_p = ω_c − ω_p`
    pub fn delta_p(&self) -> f64 {
        self.omega_c - self.omega_p
    }

    /// `δ = ω_0 − ω_c`
    pub fn delta(&self) -> f64 {
        self.omega_0 - self.omega_c
    }

    /// `α = g / ω_m`
    pub fn alpha(&self) -> Result<f64> {
        if self.omega_m.is_nan() || self.omega_m <= 0.0 {
            return Err(Error::InvalidArgument(format!("omega_m = {} must be > 0", self.omega_m)));
        }
        Ok(self.g / self.omega_m)
    }

    /// `g² / ω_m`
    pub fn kerr(&self) -> Result<f64> {
        Ok(self.g * self.alpha()?)
    }

    /// Copy tuned to the sideband `δ_p = sign · s · ω_m`.
    pub fn at_sideband(&self, s: u32, sign: i32) -> Self {
        ModelParams { omega_p: self.omega_c - sign as f64 * s as f64 * self.omega_m, s, sideband_sign: sign, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.omega_c,
            self.omega_m,
            self.g,
            self.pump_strength,
            self.omega_p,
            self.omega_0,
            self.lambda,
            self.gamma,
            self.nbar,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("parameters must be finite".into()));
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidArgument(format!("gamma = {} must be ≥ 0", self.gamma)));
        }
        if self.nbar < 0.0 {
            return Err(Error::InvalidArgument(format!("nbar = {} must be ≥ 0", self.nbar)));
        }
        if self.sideband_sign != 1 && self.sideband_sign != -1 {
            return Err(Error::InvalidArgument(format!("sideband_sign = {} must be ±1", self.sideband_sign)));
        }
        Ok(())
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Operator assembly on one space from per-factor matrices.
struct Factors {
    space: HilbertSpace,
}

impl Factors {
    fn new(space: HilbertSpace) -> Self {
        Factors { space }
    }

    fn prod(&self, q: Option<&Array2<C64>>, c: Option<&Array2<C64>>, m: Option<&Array2<C64>>) -> OperatorMatrix {
        OperatorMatrix::from_factors(self.space, q, c, m).expect("factor dimensions come from the space")
    }

    fn a(&self) -> Array2<C64> {
        annihilation(self.space.n_cavity())
    }

    fn adag(&self) -> Array2<C64> {
        creation(self.space.n_cavity())
    }

    fn n_a(&self) -> Array2<C64> {
        number(self.space.n_cavity())
    }

    fn cav_fn(&self, f: impl Fn(f64) -> f64) -> Array2<C64> {
        diagonal(self.space.n_cavity(), |k| re(f(k as f64)))
    }

    fn b(&self) -> Array2<C64> {
        annihilation(self.space.n_mech())
    }

    fn bdag(&self) -> Array2<C64> {
        creation(self.space.n_mech())
    }

    fn n_b(&self) -> Array2<C64> {
        number(self.space.n_mech())
    }

    fn x_b(&self) -> Array2<C64> {
        self.b() + self.bdag()
    }

    /// `ω_m n_b − g n_a (b + b†)`, optionally with the cavity term `w_a n_a`.
    fn optomech_core(&self, w_a: f64, omega_m: f64, g: f64) -> OperatorMatrix {
        let mut h = self.prod(None, Some(&self.n_a()), None) * w_a;
        h = h + self.prod(None, None, Some(&self.n_b())) * omega_m;
        h - self.prod(None, Some(&self.n_a()), Some(&self.x_b())) * g
    }

    /// `c·a† + c*·a`
    fn drive(&self, c: C64) -> OperatorMatrix {
        self.prod(None, Some(&self.adag()), None) * c + self.prod(None, Some(&self.a()), None) * c.conj()
    }
}

fn require_no_qubit(space: HilbertSpace) -> Result<()> {
    if space.has_qubit() {
        Err(Error::UnexpectedQubit)
    } else {
        Ok(())
    }
}

fn require_qubit(space: HilbertSpace) -> Result<()> {
    if space.has_qubit() {
        Ok(())
    } else {
        Err(Error::NoQubit)
    }
}

/// `H = ω_c n_a + ω_m n_b − g n_a (b† + b)`
pub fn h_standard(p: &ModelParams, space: HilbertSpace) -> Result<OperatorMatrix> {
    require_no_qubit(space)?;
    Ok(Factors::new(space).optomech_core(p.omega_c, p.omega_m, p.g))
}

/// `H_p(t) = H + Ω cos(ω_p t)(a† + a)`
pub fn h_pumped(p: &ModelParams, space: HilbertSpace, t: f64) -> Result<OperatorMatrix> {
    let f = Factors::new(space);
    Ok(h_standard(p, space)? + f.drive(re(p.pump_strength * (p.omega_p * t).cos())))
}

/// Pumped model in the frame rotating at the pump frequency, before any RWA.
pub fn h_pump_frame(p: &ModelParams, space: HilbertSpace, t: f64) -> Result<OperatorMatrix> {
    require_no_qubit(space)?;
    let f = Factors::new(space);
    let c = (C64::new(1.0, 0.0) + C64::from_polar(1.0, 2.0 * p.omega_p * t)) * (p.pump_strength / 2.0);
    Ok(f.optomech_core(p.delta_p(), p.omega_m, p.g) + f.drive(c))
}

/// Pump-frame Hamiltonian with the `e^{±2iω_p t}` terms dropped.
pub fn h_c(p: &ModelParams, space: HilbertSpace) -> Result<OperatorMatrix> {
    require_no_qubit(space)?;
    let f = Factors::new(space);
    Ok(f.optomech_core(p.delta_p(), p.omega_m, p.g) + f.drive(re(p.pump_strength / 2.0)))
}

/// `(Ω/2)[a† D†(ξ) + a D(ξ)]` with `D` on the mechanical factor.
fn displaced_drive(f: &Factors, pump: f64, cav_phase: C64, xi: C64) -> Result<OperatorMatrix> {
    let d = displacement_factor(f.space.n_mech(), xi, DisplacementMethod::Expm)?;
    let ddag = d.t().mapv(|z| z.conj());
    let up = f.prod(None, Some(&f.adag()), Some(&ddag)) * (cav_phase * (pump / 2.0));
    let down = f.prod(None, Some(&f.a()), Some(&d)) * (cav_phase.conj() * (pump / 2.0));
    Ok(up + down)
}

fn kerr_term(f: &Factors, kerr: f64, offset: f64) -> OperatorMatrix {
    f.prod(None, Some(&f.cav_fn(|n| -kerr * (n - offset).powi(2))), None)
}

/// Polaron-displaced driven model: Kerr term plus displaced drive.
pub fn h_displaced(p: &ModelParams, space: HilbertSpace) -> Result<OperatorMatrix> {
    require_no_qubit(space)?;
    let f = Factors::new(space);
    let alpha = p.alpha()?;
    let mut h = f.prod(None, Some(&f.n_a()), None) * p.delta_p();
    h = h + kerr_term(&f, p.kerr()?, 0.0);
    h = h + f.prod(None, None, Some(&f.n_b())) * p.omega_m;
    Ok(h + displaced_drive(&f, p.pump_strength, re(1.0), re(alpha))?)
}

/// Displaced model in the frame rotating with `δ_p n_a + ω_m n_b`.
pub fn h_cm(p: &ModelParams, space: HilbertSpace, t: f64) -> Result<OperatorMatrix> {
    require_no_qubit(space)?;
    let f = Factors::new(space);
    let alpha = p.alpha()?;
    let xi = C64::from_polar(alpha, p.omega_m * t);
    let phase = C64::from_polar(1.0, p.delta_p() * t);
    Ok(kerr_term(&f, p.kerr()?, 0.0) + displaced_drive(&f, p.pump_strength, phase, xi)?)
}

/// Mechanical factor `f_s(n_b) = n_b!/(n_b + s)! · L^{(s)}_{n_b}(α²)`.
pub fn sideband_weight(n_mech: usize, s: usize, alpha: f64) -> Array2<C64> {
    diagonal(n_mech, |m| re((ln_factorial(m) - ln_factorial(m + s)).exp() * laguerre(m, s, alpha * alpha)))
}

/// The `a`-side mechanical operator of the printed sideband Hamiltonians:
/// `f_s(n_b)(αb)^s` for the `+` sign and `(−αb†)^s f_s(n_b)` for `−`.
pub fn sideband_printed_coupling(n_mech: usize, s: usize, alpha: f64, sign: i32) -> Array2<C64> {
    let f = sideband_weight(n_mech, s, alpha);
    let mut out = Array2::<C64>::eye(n_mech);
    if sign >= 0 {
        let b = annihilation(n_mech).mapv(|z| z * alpha);
        for _ in 0..s {
            out = out.dot(&b);
        }
        f.dot(&out)
    } else {
        let b = creation(n_mech).mapv(|z| z * -alpha);
        for _ in 0..s {
            out = out.dot(&b);
        }
        out.dot(&f)
    }
}

/// Resonant sideband Hamiltonian in its printed Laguerre form.
///
/// The `a` term is taken as printed; the `a†` term is its Hermitian
/// conjugate (the printed `a†` term differs from it by `(−1)^s`).
pub fn h_sideband_printed(p: &ModelParams, space: HilbertSpace) -> Result<OperatorMatrix> {
    require_no_qubit(space)?;
    p.validate()?;
    let f = Factors::new(space);
    let alpha = p.alpha()?;
    let m_op = sideband_printed_coupling(space.n_mech(), p.s as usize, alpha, p.sideband_sign);
    let lower = f.prod(None, Some(&f.a()), Some(&m_op)) * (p.pump_strength / 2.0 * (-alpha * alpha / 2.0).exp());
    let drive = lower.dagger() + lower;
    Ok(kerr_term(&f, p.kerr()?, 0.0) + drive)
}

/// `H_m = ω_m n_b + g n_a (b† + b)`, the sign of `g` as used for the
/// damped model.
pub fn h_damped_section(p: &ModelParams, space: HilbertSpace) -> Result<OperatorMatrix> {
    require_no_qubit(space)?;
    Ok(Factors::new(space).optomech_core(0.0, p.omega_m, -p.g))
}

fn qubit_terms(_: &Factors) -> (Array2<C64>, Array2<C64>, Array2<C64>, Array2<C64>) {
    (qubit::sigma_z(), qubit::sigma_x(), qubit::sigma_plus(), qubit::sigma_minus())
}

/// `λ(a σ₊ + a† σ₋)` with `σ₊ = |e⟩⟨g|`.
fn jc_interaction(f: &Factors, lambda: f64) -> OperatorMatrix {
    let (_, _, sp, sm) = qubit_terms(f);
    (f.prod(Some(&sp), Some(&f.a()), None) + f.prod(Some(&sm), Some(&f.adag()), None)) * lambda
}

/// Hybrid qubit-optomechanical Hamiltonian.
pub fn h_hybrid(p: &ModelParams, space: HilbertSpace) -> Result<OperatorMatrix> {
    require_qubit(space)?;
    let f = Factors::new(space);
    let (sz, ..) = qubit_terms(&f);
    Ok(f.optomech_core(p.omega_c, p.omega_m, p.g)
        + f.prod(Some(&sz), None, None) * (p.omega_0 / 2.0)
        + jc_interaction(&f, p.lambda))
}

/// Hybrid model in the frame rotating with `ω_c (n_a + σ_z/2)`.
pub fn h_hybrid_rotated(p: &ModelParams, space: HilbertSpace) -> Result<OperatorMatrix> {
    require_qubit(space)?;
    let f = Factors::new(space);
    let (sz, ..) = qubit_terms(&f);
    Ok(f.prod(Some(&sz), None, None) * (p.delta() / 2.0)
        + f.optomech_core(0.0, p.omega_m, p.g)
        + jc_interaction(&f, p.lambda))
}

fn sqrt_n_sigma_x(f: &Factors, lambda: f64) -> OperatorMatrix {
    let (_, sx, ..) = qubit_terms(f);
    f.prod(Some(&sx), Some(&f.cav_fn(f64::sqrt)), None) * lambda
}

/// Auxiliary Hamiltonian whose right-unitary image is the rotated hybrid
/// model.
pub fn h_t(p: &ModelParams, space: HilbertSpace) -> Result<OperatorMatrix> {
    require_qubit(space)?;
    let f = Factors::new(space);
    let (sz, ..) = qubit_terms(&f);
    let pe = qubit::projector(qubit::EXCITED);
    Ok(f.prod(Some(&sz), None, None) * (p.delta() / 2.0)
        + f.optomech_core(0.0, p.omega_m, p.g)
        + sqrt_n_sigma_x(&f, p.lambda)
        + f.prod(Some(&pe), None, Some(&f.x_b())) * p.g)
}

/// Auxiliary Hamiltonian after the `D_b[α(n_a − ½)]` displacement.
pub fn h_d(p: &ModelParams, space: HilbertSpace) -> Result<OperatorMatrix> {
    require_qubit(space)?;
    let f = Factors::new(space);
    let (sz, ..) = qubit_terms(&f);
    let kerr = p.kerr()?;
    let sz_coeff = f.prod(None, Some(&f.cav_fn(|n| p.delta() / 2.0 + kerr * (n - 0.5))), None)
        + f.prod(None, None, Some(&f.x_b())) * (p.g / 2.0);
    let sz_full = f.prod(Some(&sz), None, None);
    Ok(&sz_coeff * &sz_full
        + f.prod(None, None, Some(&f.n_b())) * p.omega_m
        + sqrt_n_sigma_x(&f, p.lambda)
        + kerr_term(&f, kerr, 0.5))
}

/// `H_K = −(g²/ω_m)(n_a − ½)²`
pub fn h_k(p: &ModelParams, space: HilbertSpace) -> Result<OperatorMatrix> {
    require_qubit(space)?;
    Ok(kerr_term(&Factors::new(space), p.kerr()?, 0.5))
}

/// `ω_m n_b + ω̃ σ_z + Ω̃ σ_x + (g/2)(b† + b)σ_x` with `ω̃ = −λ√n_a` and
/// `Ω̃ = δ/2 + c·(g²/ω_m)(n_a − ½)`. The printed form has `c = ½`.
pub fn h_am_analytic(p: &ModelParams, space: HilbertSpace, omega_tilde_factor: f64) -> Result<OperatorMatrix> {
    require_qubit(space)?;
    let f = Factors::new(space);
    let (sz, sx, ..) = qubit_terms(&f);
    let kerr = p.kerr()?;
    let w_tilde = f.cav_fn(|n| -p.lambda * n.sqrt());
    let o_tilde = f.cav_fn(|n| p.delta() / 2.0 + omega_tilde_factor * kerr * (n - 0.5));
    Ok(f.prod(None, None, Some(&f.n_b())) * p.omega_m
        + f.prod(Some(&sz), Some(&w_tilde), None)
        + f.prod(Some(&sx), Some(&o_tilde), None)
        + f.prod(Some(&sx), None, Some(&f.x_b())) * (p.g / 2.0))
}

/// Printed `H_am`.
pub fn h_am_printed(p: &ModelParams, space: HilbertSpace) -> Result<OperatorMatrix> {
    h_am_analytic(p, space, 0.5)
}

/// `H_am = R_y(π/4) H_d R_y†(π/4) − H_K`, obtained by explicit conjugation.
pub fn h_am(p: &ModelParams, space: HilbertSpace) -> Result<OperatorMatrix> {
    let r = ry_rotation(FRAC_PI_4, space)?;
    let ha = conjugate(&r.dagger(), &h_d(p, space)?);
    Ok(ha - h_k(p, space)?)
}

/// Catalog of buildable models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelId {
    Standard,
    Pumped,
    PumpFrame,
    RwaPump,
    Displaced,
    Cm,
    Sideband,
    Damped,
    Hybrid,
    HybridRotated,
    HybridT,
    HybridDisplaced,
    HybridK,
    HybridAm,
}

impl ModelId {
    pub const ALL: [ModelId; 14] = [
        ModelId::Standard,
        ModelId::Pumped,
        ModelId::PumpFrame,
        ModelId::RwaPump,
        ModelId::Displaced,
        ModelId::Cm,
        ModelId::Sideband,
        ModelId::Damped,
        ModelId::Hybrid,
        ModelId::HybridRotated,
        ModelId::HybridT,
        ModelId::HybridDisplaced,
        ModelId::HybridK,
        ModelId::HybridAm,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelId::Standard => "standard",
            ModelId::Pumped => "pumped",
            ModelId::PumpFrame => "pump-frame",
            ModelId::RwaPump => "rwa-pump",
            ModelId::Displaced => "displaced",
            ModelId::Cm => "cm",
            ModelId::Sideband => "sideband",
            ModelId::Damped => "damped",
            ModelId::Hybrid => "hybrid",
            ModelId::HybridRotated => "hybrid-rotated",
            ModelId::HybridT => "hybrid-T",
            ModelId::HybridDisplaced => "hybrid-displaced",
            ModelId::HybridK => "hybrid-K",
            ModelId::HybridAm => "hybrid-am",
        }
    }

    pub fn needs_qubit(&self) -> bool {
        matches!(
            self,
            ModelId::Hybrid
                | ModelId::HybridRotated
                | ModelId::HybridT
                | ModelId::HybridDisplaced
                | ModelId::HybridK
                | ModelId::HybridAm
        )
    }

    pub fn is_time_dependent(&self) -> bool {
        matches!(self, ModelId::Pumped | ModelId::PumpFrame | ModelId::Cm)
    }

    /// Evaluate the model at time `t` (ignored for static models).
    pub fn build(&self, p: &ModelParams, space: HilbertSpace, t: f64) -> Result<OperatorMatrix> {
        match self {
            ModelId::Standard => h_standard(p, space),
            ModelId::Pumped => h_pumped(p, space, t),
            ModelId::PumpFrame => h_pump_frame(p, space, t),
            ModelId::RwaPump => h_c(p, space),
            ModelId::Displaced => h_displaced(p, space),
            ModelId::Cm => h_cm(p, space, t),
            ModelId::Sideband => h_sideband_printed(p, space),
            ModelId::Damped => h_damped_section(p, space),
            ModelId::Hybrid => h_hybrid(p, space),
            ModelId::HybridRotated => h_hybrid_rotated(p, space),
            ModelId::HybridT => h_t(p, space),
            ModelId::HybridDisplaced => h_d(p, space),
            ModelId::HybridK => h_k(p, space),
            ModelId::HybridAm => h_am(p, space),
        }
    }

    pub fn catalog() -> String {
        Self::ALL.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::UnknownModel(s.to_string(), Self::catalog()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        ModelParams { g: 0.13, pump_strength: 0.3, omega_0: 100.7, ..Default::default() }
    }

    fn space_for(id: ModelId) -> HilbertSpace {
        if id.needs_qubit() {
            HilbertSpace::hybrid(4, 6).unwrap()
        } else {
            HilbertSpace::optomechanical(4, 6).unwrap()
        }
    }

    #[test]
    fn every_model_is_hermitian() {
        for id in ModelId::ALL {
            let h = id.build(&params(), space_for(id), 0.37).unwrap();
            assert!(h.hermiticity_defect() < 1e-13, "{id}: {:e}", h.hermiticity_defect());
            assert!(h.is_finite());
        }
    }

    #[test]
    fn models_reject_the_wrong_space() {
        for id in ModelId::ALL {
            let wrong = if id.needs_qubit() {
                HilbertSpace::optomechanical(3, 3).unwrap()
            } else {
                HilbertSpace::hybrid(3, 3).unwrap()
            };
            // the bare pumped model is defined on either space
            if id != ModelId::Pumped {
                assert!(id.build(&params(), wrong, 0.0).is_err(), "{id}");
            }
        }
    }

    #[test]
    fn decoupled_standard_is_diagonal() {
        let p = ModelParams { g: 0.0, ..params() };
        let space = HilbertSpace::optomechanical(3, 5).unwrap();
        let h = h_standard(&p, space).unwrap();
        for i in 0..space.dim() {
            for j in 0..space.dim() {
                let (_, n, m) = space.decompose(i);
                let expected = if i == j { p.omega_c * n as f64 + p.omega_m * m as f64 } else { 0.0 };
                assert_eq!(h.get(i, j), C64::new(expected, 0.0));
            }
        }
    }

    #[test]
    fn standard_coupling_entry() {
        // ⟨n, m+1| −g n_a (b + b†) |n, m⟩ = −g n √(m+1)
        let p = params();
        let space = HilbertSpace::optomechanical(4, 6).unwrap();
        let h = h_standard(&p, space).unwrap();
        let (n, m) = (3, 2);
        let v = h.get(space.index(0, n, m + 1), space.index(0, n, m));
        assert!((v.re + p.g * n as f64 * ((m + 1) as f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hybrid_k_is_a_shifted_kerr_diagonal() {
        let p = params();
        let space = HilbertSpace::hybrid(5, 3).unwrap();
        let h = h_k(&p, space).unwrap();
        let kerr = p.g * p.g / p.omega_m;
        for i in 0..space.dim() {
            let (_, n, _) = space.decompose(i);
            let expected = -kerr * (n as f64 - 0.5).powi(2);
            assert!((h.get(i, i).re - expected).abs() < 1e-15);
            for j in (0..space.dim()).filter(|&j| j != i) {
                assert_eq!(h.get(i, j), C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn pump_frame_averages_to_rwa() {
        // the e^{2iω_p t} drive term averages out over a pump half-period
        let p = params();
        let space = HilbertSpace::optomechanical(3, 4).unwrap();
        let period = std::f64::consts::PI / p.omega_p;
        let pts = 16;
        let mut avg = OperatorMatrix::zeros(space);
        for j in 0..pts {
            avg = avg + h_pump_frame(&p, space, period * j as f64 / pts as f64).unwrap().scale(1.0 / pts as f64);
        }
        assert!(avg.max_abs_diff(&h_c(&p, space).unwrap()) < 1e-13);
    }

    #[test]
    fn sideband_tuning() {
        let p = params().at_sideband(2, -1);
        assert_eq!(p.delta_p(), -2.0 * p.omega_m);
        assert_eq!((p.s, p.sideband_sign), (2, -1));
    }

    #[test]
    fn sideband_weight_at_zero_order() {
        // f_0(n) = L_n(α²)
        let w = sideband_weight(4, 0, 0.5);
        let x: f64 = 0.25;
        let l = [1.0, 1.0 - x, 1.0 - 2.0 * x + x * x / 2.0, 1.0 - 3.0 * x + 1.5 * x * x - x.powi(3) / 6.0];
        for (k, lk) in l.iter().enumerate() {
            assert!((w[[k, k]].re - lk).abs() < 1e-14);
        }
    }

    #[test]
    fn catalog_round_trip() {
        for id in ModelId::ALL {
            assert_eq!(id.as_str().parse::<ModelId>().unwrap(), id);
        }
        let err = "hybrid-x".parse::<ModelId>().unwrap_err().to_string();
        assert!(err.contains("hybrid-K") && err.contains("standard"));
    }

    #[test]
    fn parameter_validation() {
        assert!(ModelParams { omega_m: 0.0, ..params() }.alpha().is_err());
        assert!(ModelParams { gamma: -1.0, ..params() }.validate().is_err());
        assert!(ModelParams { sideband_sign: 0, ..params() }.validate().is_err());
        assert!(ModelParams { g: f64::NAN, ..params() }.validate().is_err());
        assert!(params().validate().is_ok());
    }

    #[test]
    fn json_uses_flat_symbol_names() {
        let v = serde_json::to_value(params()).unwrap();
        assert!(v.get("Omega").is_some() && v.get("pump_strength").is_none());
        let back: ModelParams = serde_json::from_str(r#"{"g": 0.2}"#).unwrap();
        assert_eq!(back, ModelParams { g: 0.2, ..Default::default() });
    }
}
