//! Initial-state specifications.
//!
//! A spec is either `fock:c,m` (or `fock:q,c,m` with `q ∈ {e, g}`) or a
//! `;`-separated list of per-mode entries `cav=…`, `mech=…`, `qubit=e|g`,
//! each mode taking `fock:k`, `coherent:re,im` or `thermal:nbar`. A bare
//! `coherent:` or `thermal:` entry applies to the mechanical mode. Modes not
//! mentioned start in the ground state.

use ndarray::{linalg::kron, Array1, Array2};

use crate::error::{Error, Result};
use crate::fock::{displacement_factor, qubit, thermal_factor, DisplacementMethod, HilbertSpace};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub enum ModeState {
    Fock(usize),
    Coherent(C64),
    Thermal(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateSpec {
    /// `qubit::EXCITED` or `qubit::GROUND`.
    pub qubit: Option<usize>,
    pub cavity: ModeState,
    pub mech: ModeState,
}

/// A prepared initial state: pure when every factor is.
#[derive(Debug, Clone, PartialEq)]
pub enum Prepared {
    Ket(Array1<C64>),
    Density(Array2<C64>),
}

impl Prepared {
    pub fn density(&self) -> Array2<C64> {
        match self {
            Prepared::Density(r) => r.clone(),
            Prepared::Ket(k) => Array2::from_shape_fn((k.len(), k.len()), |(i, j)| k[i] * k[j].conj()),
        }
    }
}

fn bad(raw: &str, why: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("state spec `{raw}`: {why}"))
}

fn parse_qubit(raw: &str, s: &str) -> Result<usize> {
    match s.trim() {
        "e" | "excited" => Ok(qubit::EXCITED),
        "g" | "ground" => Ok(qubit::GROUND),
        other => Err(bad(raw, format!("qubit level `{other}` must be e or g"))),
    }
}

fn parse_f64(raw: &str, s: &str) -> Result<f64> {
    let x: f64 = s.trim().parse().map_err(|_| bad(raw, format!("`{s}` is not a number")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad(raw, format!("`{s}` is not finite")))
    }
}

fn parse_level(raw: &str, s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| bad(raw, format!("`{s}` is not a Fock level")))
}

fn parse_mode(raw: &str, s: &str) -> Result<ModeState> {
    let (kind, args) = s.split_once(':').ok_or_else(|| bad(raw, format!("`{s}` needs KIND:ARGS")))?;
    match kind.trim() {
        "fock" => Ok(ModeState::Fock(parse_level(raw, args)?)),
        "coherent" => {
            let (re, im) = args.split_once(',').unwrap_or((args, "0"));
            Ok(ModeState::Coherent(C64::new(parse_f64(raw, re)?, parse_f64(raw, im)?)))
        }
        "thermal" => {
            let nbar = parse_f64(raw, args)?;
            if nbar < 0.0 {
                return Err(bad(raw, "thermal occupation must be ≥ 0"));
            }
            Ok(ModeState::Thermal(nbar))
        }
        other => Err(bad(raw, format!("unknown state kind `{other}`; use fock, coherent or thermal"))),
    }
}

impl StateSpec {
    pub fn parse(raw: &str) -> Result<Self> {
        let mut spec = StateSpec { qubit: None, cavity: ModeState::Fock(0), mech: ModeState::Fock(0) };
        let text = raw.trim();
        if text.is_empty() {
            return Err(bad(raw, "empty"));
        }
        if let Some(args) = text.strip_prefix("fock:").filter(|a| a.contains(',')) {
            let parts: Vec<&str> = args.split(',').collect();
            match parts.as_slice() {
                [c, m] => {
                    spec.cavity = ModeState::Fock(parse_level(raw, c)?);
                    spec.mech = ModeState::Fock(parse_level(raw, m)?);
                }
                [q, c, m] => {
                    spec.qubit = Some(parse_qubit(raw, q)?);
                    spec.cavity = ModeState::Fock(parse_level(raw, c)?);
                    spec.mech = ModeState::Fock(parse_level(raw, m)?);
                }
                _ => return Err(bad(raw, "fock takes cav,mech or qubit,cav,mech")),
            }
            return Ok(spec);
        }
        let mut seen = Vec::new();
        for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (mode, body) = match item.split_once('=') {
                Some((m, b)) => (m.trim(), b),
                None => ("mech", item),
            };
            if seen.contains(&mode) {
                return Err(bad(raw, format!("mode `{mode}` given twice")));
            }
            seen.push(mode);
            match mode {
                "cav" | "cavity" => spec.cavity = parse_mode(raw, body)?,
                "mech" => spec.mech = parse_mode(raw, body)?,
                "qubit" | "q" => spec.qubit = Some(parse_qubit(raw, body)?),
                other => return Err(bad(raw, format!("unknown mode `{other}`; use cav, mech or qubit"))),
            }
        }
        Ok(spec)
    }

    pub fn prepare(&self, space: HilbertSpace) -> Result<Prepared> {
        if self.qubit.is_some() && !space.has_qubit() {
            return Err(Error::NoQubit);
        }
        let mut factors = Vec::new();
        if space.has_qubit() {
            let mut q = Array1::zeros(2);
            q[self.qubit.unwrap_or(qubit::GROUND)] = C64::new(1.0, 0.0);
            factors.push(Factor::Ket(q));
        }
        factors.push(mode_factor(&self.cavity, space.n_cavity(), "cavity")?);
        factors.push(mode_factor(&self.mech, space.n_mech(), "mechanical")?);
        if factors.iter().all(|f| matches!(f, Factor::Ket(_))) {
            let ket = factors.into_iter().fold(Array1::from_elem(1, C64::new(1.0, 0.0)), |acc, f| match f {
                Factor::Ket(k) => kron_vec(&acc, &k),
                Factor::Mixed(_) => unreachable!(),
            });
            Ok(Prepared::Ket(ket))
        } else {
            let rho = factors
                .into_iter()
                .fold(Array2::from_elem((1, 1), C64::new(1.0, 0.0)), |acc, f| kron(&acc, &f.density()));
            Ok(Prepared::Density(rho))
        }
    }
}

enum Factor {
    Ket(Array1<C64>),
    Mixed(Array2<C64>),
}

impl Factor {
    fn density(&self) -> Array2<C64> {
        match self {
            Factor::Mixed(r) => r.clone(),
            Factor::Ket(k) => Array2::from_shape_fn((k.len(), k.len()), |(i, j)| k[i] * k[j].conj()),
        }
    }
}

fn mode_factor(state: &ModeState, n: usize, name: &str) -> Result<Factor> {
    match *state {
        ModeState::Fock(k) if k >= n => {
            Err(Error::InvalidArgument(format!("{name} Fock level {k} does not fit in {n} levels")))
        }
        ModeState::Fock(k) => {
            let mut v = Array1::zeros(n);
            v[k] = C64::new(1.0, 0.0);
            Ok(Factor::Ket(v))
        }
        ModeState::Coherent(alpha) => {
            // column of a unitary, so normalized on the truncated ladder
            let d = displacement_factor(n, alpha, DisplacementMethod::Expm)?;
            Ok(Factor::Ket(d.column(0).to_owned()))
        }
        ModeState::Thermal(nbar) => Ok(Factor::Mixed(thermal_factor(n, nbar)?)),
    }
}

fn kron_vec(a: &Array1<C64>, b: &Array1<C64>) -> Array1<C64> {
    Array1::from_iter(a.iter().flat_map(|x| b.iter().map(move |y| x * y)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar() {
        let s = StateSpec::parse("fock:1,2").unwrap();
        assert_eq!((s.cavity, s.mech, s.qubit), (ModeState::Fock(1), ModeState::Fock(2), None));
        let s = StateSpec::parse("fock:e,0,3").unwrap();
        assert_eq!(s.qubit, Some(qubit::EXCITED));
        let s = StateSpec::parse("cav=coherent:0.5,-0.25; mech=thermal:1").unwrap();
        assert_eq!(s.cavity, ModeState::Coherent(C64::new(0.5, -0.25)));
        assert_eq!(s.mech, ModeState::Thermal(1.0));
        assert_eq!(StateSpec::parse("fock:1").unwrap().mech, ModeState::Fock(1));
        assert_eq!(StateSpec::parse("coherent:0.3,0").unwrap().mech, ModeState::Coherent(C64::new(0.3, 0.0)));
        for bad in ["", "fock:1,2,3,4", "squeezed:1", "thermal:-1", "cav=fock:1;cav=fock:2", "spin=fock:0", "fock:x,1"]
        {
            assert!(StateSpec::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn prepared_states_are_normalized() {
        let space = HilbertSpace::optomechanical(4, 12).unwrap();
        let ket = StateSpec::parse("cav=fock:1;mech=coherent:0.5,0.5").unwrap().prepare(space).unwrap();
        let Prepared::Ket(k) = &ket else { panic!("expected a ket") };
        let norm: f64 = k.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-13);
        let rho = StateSpec::parse("thermal:0.5").unwrap().prepare(space).unwrap();
        assert!(matches!(rho, Prepared::Density(_)));
        let tr: C64 = rho.density().diag().sum();
        assert!((tr.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fock_index_layout() {
        let space = HilbertSpace::hybrid(3, 4).unwrap();
        let Prepared::Ket(k) = StateSpec::parse("fock:g,2,1").unwrap().prepare(space).unwrap() else {
            panic!("expected a ket")
        };
        let idx = space.index(qubit::GROUND, 2, 1);
        assert_eq!(k[idx], C64::new(1.0, 0.0));
        assert_eq!(k.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn dimension_errors() {
        let space = HilbertSpace::optomechanical(3, 3).unwrap();
        assert!(StateSpec::parse("fock:3,0").unwrap().prepare(space).is_err());
        assert!(StateSpec::parse("qubit=e").unwrap().prepare(space).is_err());
    }
}
