//! Linear optomechanical system descriptions and their quadrature-space
//! drift models.
//!
//! A [`SystemSpec`] declares modes, Hamiltonian couplings, and collective
//! dissipative channels; [`build_drift`] turns it into the real state-space
//! model
//!
//!   v̇ = A v + Σ_q B_q u_q + f F,   y_p = C_p v + D_p u_p,
//!
//! with v the stacked quadratures. Cavity Langevin convention: a mode with
//! damping κ couples to its port as v̇ ⊃ √(2κ) u, y = −u + √(2κ) v.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{coupling_block, symplectic_form};

/// Mode flavor. Cavities carry an (amplitude, phase) quadrature pair,
/// mechanics an (x, p) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Cavity,
    Mechanical,
}

/// A single mode of the network.
#[derive(Debug, Clone)]
pub struct ModeSpec {
    pub name: String,
    pub kind: ModeKind,
    /// Amplitude damping rate κ (cavities). Must be 0 for mechanics.
    pub damping: f64,
    /// Inertia m (mechanical only).
    pub mass: f64,
    /// Resonance ω_m ≥ 0 (mechanical only); 0 = free mass.
    pub resonance: f64,
}

impl ModeSpec {
    pub fn cavity(name: &str, damping: f64) -> Self {
        ModeSpec {
            name: name.to_owned(),
            kind: ModeKind::Cavity,
            damping,
            mass: 0.0,
            resonance: 0.0,
        }
    }

    pub fn mechanical(name: &str, mass: f64, resonance: f64) -> Self {
        ModeSpec {
            name: name.to_owned(),
            kind: ModeKind::Mechanical,
            damping: 0.0,
            mass,
            resonance,
        }
    }
}

/// Hamiltonian coupling between two modes.
#[derive(Debug, Clone)]
pub enum CouplingSpec {
    /// H = −ħ J â†b̂ + H.c. between two cavity modes.
    BeamSplitter {
        mode_a: String,
        mode_b: String,
        rate: Complex64,
    },
    /// H = s ħ α x̂ (ĉ + ĉ†) between a cavity and the mechanical mode.
    /// `sign` encodes the ± pattern of the two-cavity interaction.
    Optomechanical {
        cavity: String,
        mechanical: String,
        strength: f64,
        sign: f64,
    },
}

/// Collective dissipative channel L = Σ_k w_k m̂_k with its own vacuum port.
///
/// Produced by [`eliminate_reservoir`]; drift contribution −w_j* w_k, input
/// coupling i√2 w_j* per member mode, output i√2 w_k, feedthrough +1.
#[derive(Debug, Clone)]
pub struct CollectiveChannel {
    /// Port name exposed to the solver (inherits the eliminated mode's name).
    pub port: String,
    pub weights: Vec<(String, Complex64)>,
}

/// Declarative description of the network.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub modes: Vec<ModeSpec>,
    pub couplings: Vec<CouplingSpec>,
    pub channels: Vec<CollectiveChannel>,
    /// Cavity modes slated for adiabatic elimination.
    pub reservoir_modes: Vec<String>,
    /// Mechanical mode the external force acts on.
    pub force_target: Option<String>,
    /// Normalized power γ = Θ/(8κ³) carried for bookkeeping.
    pub power: f64,
}

impl SystemSpec {
    fn mode(&self, name: &str) -> Option<&ModeSpec> {
        self.modes.iter().find(|m| m.name == name)
    }

    fn mode_index(&self, name: &str) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m.name == name)
            .ok_or_else(|| Error::UnknownMode(name.to_owned()))
    }

    /// Structural validation. Returns non-fatal warnings (Markov-regime
    /// flags and power-consistency notes).
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        for (i, m) in self.modes.iter().enumerate() {
            if self.modes[..i].iter().any(|o| o.name == m.name) {
                return Err(Error::DuplicatePort(m.name.clone()));
            }
            if !m.damping.is_finite() || m.damping < 0.0 {
                return Err(Error::InvalidModel(format!(
                    "mode `{}` has negative or non-finite damping",
                    m.name
                )));
            }
            if m.kind == ModeKind::Mechanical && !(m.mass > 0.0 && m.mass.is_finite()) {
                return Err(Error::InvalidModel(format!(
                    "mechanical mode `{}` needs mass > 0",
                    m.name
                )));
            }
            if m.kind == ModeKind::Mechanical && m.resonance < 0.0 {
                return Err(Error::InvalidModel(format!(
                    "mechanical mode `{}` has negative resonance",
                    m.name
                )));
            }
        }
        let n_mech = self
            .modes
            .iter()
            .filter(|m| m.kind == ModeKind::Mechanical)
            .count();
        if n_mech > 1 {
            return Err(Error::InvalidModel(
                "more than one mechanical mode is unsupported".into(),
            ));
        }
        for c in &self.couplings {
            match c {
                CouplingSpec::BeamSplitter { mode_a, mode_b, .. } => {
                    let (a, b) = (
                        self.mode(mode_a)
                            .ok_or_else(|| Error::UnknownMode(mode_a.clone()))?,
                        self.mode(mode_b)
                            .ok_or_else(|| Error::UnknownMode(mode_b.clone()))?,
                    );
                    if mode_a == mode_b {
                        return Err(Error::InvalidModel(format!(
                            "beam splitter couples `{mode_a}` to itself"
                        )));
                    }
                    if a.kind != ModeKind::Cavity || b.kind != ModeKind::Cavity {
                        return Err(Error::InvalidModel(
                            "beam splitters couple cavity modes only".into(),
                        ));
                    }
                }
                CouplingSpec::Optomechanical {
                    cavity,
                    mechanical,
                    strength,
                    sign,
                } => {
                    let cav = self
                        .mode(cavity)
                        .ok_or_else(|| Error::UnknownMode(cavity.clone()))?;
                    let mech = self
                        .mode(mechanical)
                        .ok_or_else(|| Error::UnknownMode(mechanical.clone()))?;
                    if cav.kind != ModeKind::Cavity || mech.kind != ModeKind::Mechanical {
                        return Err(Error::InvalidModel(
                            "optomechanical coupling needs one cavity and one mechanical mode"
                                .into(),
                        ));
                    }
                    if !strength.is_finite() {
                        return Err(Error::InvalidModel("non-finite coupling strength".into()));
                    }
                    if *sign != 1.0 && *sign != -1.0 {
                        return Err(Error::InvalidModel(
                            "optomechanical sign must be +1 or -1".into(),
                        ));
                    }
                }
            }
        }
        for ch in &self.channels {
            if self.modes.iter().any(|m| m.name == ch.port) {
                return Err(Error::DuplicatePort(ch.port.clone()));
            }
            for (name, _) in &ch.weights {
                self.mode_index(name)?;
            }
        }
        for r in &self.reservoir_modes {
            let m = self
                .mode(r)
                .ok_or_else(|| Error::UnknownMode(r.clone()))?;
            if m.kind != ModeKind::Cavity {
                return Err(Error::InvalidModel(format!(
                    "reservoir mode `{r}` must be a cavity"
                )));
            }
            // Markovian regime flag: the reservoir should damp faster than
            // every other rate in the spec.
            let mut rates: Vec<f64> = Vec::new();
            for o in &self.modes {
                if o.name != *r {
                    rates.push(o.damping);
                    rates.push(o.resonance);
                }
            }
            for c in &self.couplings {
                match c {
                    CouplingSpec::BeamSplitter { rate, .. } => rates.push(rate.norm()),
                    CouplingSpec::Optomechanical { strength, .. } => rates.push(strength.abs()),
                }
            }
            let max_other = rates.iter().cloned().fold(0.0f64, f64::max);
            if m.damping <= max_other {
                warnings.push(format!(
                    "reservoir `{r}` damping {} does not exceed the largest system rate {}; \
                     adiabatic elimination may be inaccurate",
                    m.damping, max_other
                ));
            }
        }
        if let Some(t) = &self.force_target {
            let m = self
                .mode(t)
                .ok_or_else(|| Error::UnknownMode(t.clone()))?;
            if m.kind != ModeKind::Mechanical {
                return Err(Error::NonMechanicalForceTarget(t.clone()));
            }
        }
        if !(self.power > 0.0 && self.power.is_finite()) {
            return Err(Error::InvalidModel("power must be positive".into()));
        }
        Ok(warnings)
    }
}

/// Which kind of port a [`DriftModel`] port is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortKind {
    /// Damping port of a cavity mode.
    Mode,
    /// Shared vacuum port of a collective dissipative channel.
    Channel,
}

/// Real quadrature-space state-space model.
#[derive(Debug, Clone)]
pub struct DriftModel {
    pub mode_names: Vec<String>,
    pub mode_kinds: Vec<ModeKind>,
    /// Quadrature dimension 2N.
    pub dim: usize,
    pub drift: DMatrix<f64>,
    pub port_names: Vec<String>,
    pub port_kinds: Vec<PortKind>,
    /// Per input port, 2N×2.
    pub input: Vec<DMatrix<f64>>,
    /// Per output port, 2×2N.
    pub output: Vec<DMatrix<f64>>,
    /// Per-port feedthrough sign: −1 for physical ports, +1 for eliminated
    /// reservoir channels (the κ_c → ∞ limit of −ĉ_in + √(2κ_c) Ĉ).
    pub feedthrough: Vec<f64>,
    /// Unit force applied to the momentum row.
    pub force_column: DVector<f64>,
    /// Mechanical mass (1 when the system has no mechanics).
    pub mass: f64,
    /// Local damping per quadrature (for the Hamiltonian-structure check).
    damping_diag: DVector<f64>,
}

impl DriftModel {
    pub fn n_ports(&self) -> usize {
        self.port_names.len()
    }

    pub fn port_index(&self, name: &str) -> Result<usize> {
        self.port_names
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| Error::UnknownMode(name.to_owned()))
    }

    fn mode_rows(&self, name: &str) -> Result<usize> {
        self.mode_names
            .iter()
            .position(|m| m == name)
            .map(|i| 2 * i)
            .ok_or_else(|| Error::UnknownMode(name.to_owned()))
    }

    /// Asymmetry of Σ⁻¹(drift + dampingDiagonal). Zero (to rounding) for
    /// any model built from Hamiltonian data alone; collective channels
    /// contribute non-Hamiltonian terms and break it.
    pub fn hamiltonian_defect(&self) -> f64 {
        let n = self.dim / 2;
        let sigma_inv = -symplectic_form(n); // Σ⁻¹ = −Σ
        let mut h = self.drift.clone();
        for i in 0..self.dim {
            h[(i, i)] += self.damping_diag[i];
        }
        let g = sigma_inv * h;
        let asym = &g - g.transpose();
        asym.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
    }
}

/// Build the quadrature drift model realizing the declared Hamiltonians,
/// local damping, and collective channels.
pub fn build_drift(spec: &SystemSpec) -> Result<DriftModel> {
    spec.validate()?;
    let n = spec.modes.len();
    let dim = 2 * n;
    let mut drift = DMatrix::<f64>::zeros(dim, dim);
    let mut damping_diag = DVector::<f64>::zeros(dim);
    let mut mass = 1.0f64;

    for (i, m) in spec.modes.iter().enumerate() {
        let r = 2 * i;
        match m.kind {
            ModeKind::Cavity => {
                drift[(r, r)] -= m.damping;
                drift[(r + 1, r + 1)] -= m.damping;
                damping_diag[r] = m.damping;
                damping_diag[r + 1] = m.damping;
            }
            ModeKind::Mechanical => {
                if m.damping != 0.0 {
                    return Err(Error::InvalidModel(format!(
                        "mechanical damping on `{}` is unsupported (no commutator-preserving \
                         free-mass bath implemented)",
                        m.name
                    )));
                }
                mass = m.mass;
                // dx/dt = p/m, dp/dt = −m ω_m² x
                drift[(r, r + 1)] = 1.0 / m.mass;
                drift[(r + 1, r)] = -m.mass * m.resonance * m.resonance;
            }
        }
    }

    for c in &spec.couplings {
        match c {
            CouplingSpec::BeamSplitter { mode_a, mode_b, rate } => {
                let ia = 2 * spec.mode_index(mode_a)?;
                let ib = 2 * spec.mode_index(mode_b)?;
                let i = Complex64::new(0.0, 1.0);
                // dâ/dt ⊃ iJ b̂ ; db̂/dt ⊃ iJ* â
                add_block(&mut drift, ia, ib, &coupling_block(i * rate));
                add_block(&mut drift, ib, ia, &coupling_block(i * rate.conj()));
            }
            CouplingSpec::Optomechanical {
                cavity,
                mechanical,
                strength,
                sign,
            } => {
                let ic = 2 * spec.mode_index(cavity)?;
                let im = 2 * spec.mode_index(mechanical)?;
                let g = sign * std::f64::consts::SQRT_2 * strength;
                // dĉ₂/dt ⊃ −s√2 α x ; dp/dt ⊃ −s√2 ħ α ĉ₁
                drift[(ic + 1, im)] -= g;
                drift[(im + 1, ic)] -= g;
            }
        }
    }

    let mut port_names = Vec::new();
    let mut port_kinds = Vec::new();
    let mut input = Vec::new();
    let mut output = Vec::new();
    let mut feedthrough = Vec::new();

    for (i, m) in spec.modes.iter().enumerate() {
        if m.kind == ModeKind::Cavity && m.damping > 0.0 {
            let r = 2 * i;
            let g = (2.0 * m.damping).sqrt();
            let mut b = DMatrix::<f64>::zeros(dim, 2);
            b[(r, 0)] = g;
            b[(r + 1, 1)] = g;
            let mut c = DMatrix::<f64>::zeros(2, dim);
            c[(0, r)] = g;
            c[(1, r + 1)] = g;
            port_names.push(m.name.clone());
            port_kinds.push(PortKind::Mode);
            input.push(b);
            output.push(c);
            feedthrough.push(-1.0);
        }
    }

    for ch in &spec.channels {
        let i = Complex64::new(0.0, 1.0);
        let s2 = std::f64::consts::SQRT_2;
        let mut b = DMatrix::<f64>::zeros(dim, 2);
        let mut c = DMatrix::<f64>::zeros(2, dim);
        for (mj, wj) in &ch.weights {
            let rj = 2 * spec.mode_index(mj)?;
            // drift ⊃ −w_j* w_k on the (j, k) block
            for (mk, wk) in &ch.weights {
                let rk = 2 * spec.mode_index(mk)?;
                add_block(&mut drift, rj, rk, &coupling_block(-wj.conj() * wk));
            }
            // v̇_j ⊃ i√2 w_j* ĉ_in ;  ĉ_out = ĉ_in + i√2 Σ w_k v̂_k
            let bin = coupling_block(i * wj.conj()) * s2;
            let bout = coupling_block(i * wj) * s2;
            for (a, bcol) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
                b[(rj + a, bcol)] += bin[(a, bcol)];
                c[(a, rj + bcol)] += bout[(a, bcol)];
            }
        }
        if port_names.iter().any(|p| p == &ch.port) {
            return Err(Error::DuplicatePort(ch.port.clone()));
        }
        port_names.push(ch.port.clone());
        port_kinds.push(PortKind::Channel);
        input.push(b);
        output.push(c);
        feedthrough.push(1.0);
    }

    let mut force_column = DVector::<f64>::zeros(dim);
    if let Some(t) = &spec.force_target {
        let im = 2 * spec.mode_index(t)?;
        force_column[im + 1] = 1.0;
    }

    Ok(DriftModel {
        mode_names: spec.modes.iter().map(|m| m.name.clone()).collect(),
        mode_kinds: spec.modes.iter().map(|m| m.kind).collect(),
        dim,
        drift,
        port_names,
        port_kinds,
        input,
        output,
        feedthrough,
        force_column,
        mass,
        damping_diag,
    })
}

fn add_block(m: &mut DMatrix<f64>, row: usize, col: usize, block: &nalgebra::Matrix2<f64>) {
    for a in 0..2 {
        for b in 0..2 {
            m[(row + a, col + b)] += block[(a, b)];
        }
    }
}

/// Adiabatically eliminate every declared reservoir mode, replacing it with
/// a collective dissipative channel of weights w_k = J′_k/√κ_c (so the pair
/// rate is Γ = |J′|²/κ_c) plus the shared noise port.
pub fn eliminate_reservoir(spec: &SystemSpec) -> Result<SystemSpec> {
    spec.validate()?;
    let mut out = spec.clone();
    for r in &spec.reservoir_modes {
        let rm = spec
            .mode(r)
            .ok_or_else(|| Error::UnknownMode(r.clone()))?;
        if rm.damping <= 0.0 {
            return Err(Error::Elimination(r.clone(), "κ_c must be positive".into()));
        }
        if spec
            .channels
            .iter()
            .any(|ch| ch.weights.iter().any(|(m, _)| m == r))
        {
            return Err(Error::Elimination(
                r.clone(),
                "mode participates in a collective channel".into(),
            ));
        }
        let sqrt_kc = rm.damping.sqrt();
        let mut weights: Vec<(String, Complex64)> = Vec::new();
        for c in &spec.couplings {
            match c {
                CouplingSpec::BeamSplitter { mode_a, mode_b, rate } => {
                    // H = −ħ J r̂† m̂ contributes w_m = J/√κ_c; the reversed
                    // orientation contributes the conjugate.
                    let w = if mode_a == r && mode_b != r {
                        Some((mode_b.clone(), rate / sqrt_kc))
                    } else if mode_b == r && mode_a != r {
                        Some((mode_a.clone(), rate.conj() / sqrt_kc))
                    } else if mode_a == r && mode_b == r {
                        return Err(Error::Elimination(r.clone(), "self-coupling".into()));
                    } else {
                        None
                    };
                    if let Some((m, w)) = w {
                        if spec.reservoir_modes.contains(&m) {
                            return Err(Error::Elimination(
                                r.clone(),
                                "coupled to another reservoir mode".into(),
                            ));
                        }
                        match weights.iter_mut().find(|(name, _)| *name == m) {
                            Some((_, acc)) => *acc += w,
                            None => weights.push((m, w)),
                        }
                    }
                }
                CouplingSpec::Optomechanical { cavity, .. } if cavity == r => {
                    return Err(Error::Elimination(
                        r.clone(),
                        "carries an optomechanical coupling".into(),
                    ));
                }
                CouplingSpec::Optomechanical { .. } => {}
            }
        }
        out.modes.retain(|m| m.name != *r);
        out.couplings.retain(|c| match c {
            CouplingSpec::BeamSplitter { mode_a, mode_b, .. } => mode_a != r && mode_b != r,
            CouplingSpec::Optomechanical { .. } => true,
        });
        out.channels.push(CollectiveChannel {
            port: r.clone(),
            weights,
        });
    }
    out.reservoir_modes.clear();
    Ok(out)
}

/// Frobenius norms of the drift blocks coupling two cavity modes:
/// `forward` drives `to` from `from`, `backward` the reverse.
pub fn nonreciprocity_defect(
    model: &DriftModel,
    from: &str,
    to: &str,
) -> Result<(f64, f64)> {
    for name in [from, to] {
        let idx = model
            .mode_names
            .iter()
            .position(|m| m == name)
            .ok_or_else(|| Error::UnknownMode(name.to_owned()))?;
        if model.mode_kinds[idx] != ModeKind::Cavity {
            return Err(Error::InvalidModel(format!(
                "`{name}` is not a cavity mode"
            )));
        }
    }
    let rf = model.mode_rows(from)?;
    let rt = model.mode_rows(to)?;
    let norm = |row: usize, col: usize| -> f64 {
        let mut s = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                s += model.drift[(row + a, col + b)].powi(2);
            }
        }
        s.sqrt()
    };
    Ok((norm(rt, rf), norm(rf, rt)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn sm_spec(gamma: f64) -> SystemSpec {
        crate::scenarios::speed_meter_system(gamma, None).unwrap()
    }

    #[test]
    fn speed_meter_a_from_b_block_vanishes_at_j_equals_i_gamma() {
        // (iJ + Γ) = 0 for J = iΓ in the A row
        let model = build_drift(&sm_spec(1.0)).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert!(model.drift[(a, 2 + b)].abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_coupling_decouples_optics_from_mechanics() {
        let mut spec = sm_spec(1.0);
        for c in &mut spec.couplings {
            if let CouplingSpec::Optomechanical { strength, .. } = c {
                *strength = 0.0;
            }
        }
        let model = build_drift(&spec).unwrap();
        let mech = 4; // modes a, b, mech
        for r in 0..4 {
            assert_eq!(model.drift[(r, mech)], 0.0);
            assert_eq!(model.drift[(r, mech + 1)], 0.0);
            assert_eq!(model.drift[(mech, r)], 0.0);
            assert_eq!(model.drift[(mech + 1, r)], 0.0);
        }
    }

    #[test]
    fn single_cavity_drift_and_input() {
        let kappa = 0.35;
        let spec = SystemSpec {
            modes: vec![ModeSpec::cavity("a", kappa)],
            couplings: vec![],
            channels: vec![],
            reservoir_modes: vec![],
            force_target: None,
            power: 1.0,
        };
        let model = build_drift(&spec).unwrap();
        assert_eq!(model.dim, 2);
        assert!((model.drift + kappa * DMatrix::identity(2, 2)).norm() < 1e-15);
        let g = (2.0 * kappa).sqrt();
        assert!((model.input[0][(0, 0)] - g).abs() < 1e-15);
        assert!((model.input[0][(1, 1)] - g).abs() < 1e-15);
        assert_eq!(model.feedthrough[0], -1.0);
    }

    #[test]
    fn elimination_rate_is_jprime_squared_over_kappa_c() {
        // J' = 2, κ_c = 8 → Γ = 0.5
        let spec = SystemSpec {
            modes: vec![
                ModeSpec::cavity("a", 0.5),
                ModeSpec::cavity("c", 8.0),
            ],
            couplings: vec![CouplingSpec::BeamSplitter {
                mode_a: "c".into(),
                mode_b: "a".into(),
                rate: C::new(2.0, 0.0),
            }],
            channels: vec![],
            reservoir_modes: vec!["c".into()],
            force_target: None,
            power: 1.0,
        };
        let out = eliminate_reservoir(&spec).unwrap();
        assert_eq!(out.modes.len(), 1);
        assert_eq!(out.channels.len(), 1);
        let w = out.channels[0].weights[0].1;
        assert!((w.norm_sqr() - 0.5).abs() < 1e-15); // Γ = |w|²
    }

    #[test]
    fn elimination_matches_effective_langevin_pattern() {
        // Eliminated speed meter: A row gets (iJ+Γ), B row −(iJ−Γ), both
        // diagonals −(κ+Γ).
        let full = crate::scenarios::speed_meter_system(1.0, Some(200.0)).unwrap();
        let elim = eliminate_reservoir(&full).unwrap();
        let model = build_drift(&elim).unwrap();
        let gam = 0.5;
        let j = C::new(0.0, gam);
        let i = C::new(0.0, 1.0);
        let a_from_b = coupling_block(i * j + C::new(gam, 0.0));
        let b_from_a = coupling_block(i * j.conj() + C::new(gam, 0.0));
        for a in 0..2 {
            for b in 0..2 {
                assert!((model.drift[(a, 2 + b)] - a_from_b[(a, b)]).abs() < 1e-14);
                assert!((model.drift[(2 + a, b)] - b_from_a[(a, b)]).abs() < 1e-14);
            }
            assert!((model.drift[(a, a)] + 0.5 + gam).abs() < 1e-14);
            assert!((model.drift[(2 + a, 2 + a)] + 0.5 + gam).abs() < 1e-14);
        }
    }

    #[test]
    fn gamma_invariant_under_kappa_c_rescaling() {
        // κ_c and |J'|² doubled together leave the eliminated spec identical.
        let e1 = eliminate_reservoir(
            &crate::scenarios::speed_meter_system(1.0, Some(100.0)).unwrap(),
        )
        .unwrap();
        let e2 = eliminate_reservoir(
            &crate::scenarios::speed_meter_system(1.0, Some(200.0)).unwrap(),
        )
        .unwrap();
        let m1 = build_drift(&e1).unwrap();
        let m2 = build_drift(&e2).unwrap();
        assert!((&m1.drift - &m2.drift).norm() < 1e-13);
        for (b1, b2) in m1.input.iter().zip(&m2.input) {
            assert!((b1 - b2).norm() < 1e-13);
        }
    }

    #[test]
    fn elimination_phase_covariance() {
        // J' → J' e^{iθ}: Γ and the drift are invariant; the channel input
        // acquires the port-phase rotation R(−θ) on the right.
        let theta = 0.7f64;
        let make = |phase: f64| {
            let mut spec = crate::scenarios::speed_meter_system(1.0, Some(100.0)).unwrap();
            for c in &mut spec.couplings {
                if let CouplingSpec::BeamSplitter { mode_a, rate, .. } = c {
                    if mode_a == "c" {
                        *rate *= C::from_polar(1.0, phase);
                    }
                }
            }
            build_drift(&eliminate_reservoir(&spec).unwrap()).unwrap()
        };
        let m0 = make(0.0);
        let m1 = make(theta);
        assert!((&m0.drift - &m1.drift).norm() < 1e-12);
        let r = crate::quad::rotation(-theta);
        let rotated = &m0.input[2] * r;
        assert!((&m1.input[2] - rotated).norm() < 1e-12);
    }

    #[test]
    fn nonreciprocity_forward_only_at_j_equals_i_gamma() {
        let model = build_drift(&sm_spec(1.0)).unwrap();
        let (forward, backward) = nonreciprocity_defect(&model, "a", "b").unwrap();
        // forward B←A block is M(2Γ), Frobenius norm 2√2 Γ = √2 at Γ = 1/2
        assert!(backward < 1e-14);
        assert!((forward - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn nonreciprocity_roles_swap_at_minus_i_gamma() {
        let mut spec = sm_spec(1.0);
        for c in &mut spec.couplings {
            if let CouplingSpec::BeamSplitter { rate, .. } = c {
                *rate = -*rate;
            }
        }
        let model = build_drift(&spec).unwrap();
        let (forward, backward) = nonreciprocity_defect(&model, "a", "b").unwrap();
        assert!(forward < 1e-14);
        assert!(backward > 1.0);
    }

    #[test]
    fn reciprocal_at_real_j() {
        let mut spec = sm_spec(1.0);
        for c in &mut spec.couplings {
            if let CouplingSpec::BeamSplitter { rate, .. } = c {
                *rate = C::new(0.0, 0.0);
            }
        }
        let model = build_drift(&spec).unwrap();
        let (forward, backward) = nonreciprocity_defect(&model, "a", "b").unwrap();
        assert!((forward - backward).abs() < 1e-14);
        assert!(forward > 0.0);
    }

    #[test]
    fn hamiltonian_structure_before_elimination() {
        let full = crate::scenarios::speed_meter_system(2.0, Some(100.0)).unwrap();
        let model = build_drift(&full).unwrap();
        assert!(model.hamiltonian_defect() < 1e-12);
    }

    #[test]
    fn unknown_mode_and_bad_force_target_errors() {
        let mut spec = sm_spec(1.0);
        spec.force_target = Some("a".into());
        assert!(matches!(
            build_drift(&spec),
            Err(Error::NonMechanicalForceTarget(_))
        ));
        let mut spec = sm_spec(1.0);
        spec.couplings.push(CouplingSpec::BeamSplitter {
            mode_a: "a".into(),
            mode_b: "nope".into(),
            rate: C::new(0.0, 0.0),
        });
        assert!(matches!(build_drift(&spec), Err(Error::UnknownMode(_))));
    }

    #[test]
    fn duplicate_mode_name_rejected() {
        let spec = SystemSpec {
            modes: vec![ModeSpec::cavity("a", 0.5), ModeSpec::cavity("a", 0.5)],
            couplings: vec![],
            channels: vec![],
            reservoir_modes: vec![],
            force_target: None,
            power: 1.0,
        };
        assert!(matches!(build_drift(&spec), Err(Error::DuplicatePort(_))));
    }

    #[test]
    fn reservoir_with_optomechanical_coupling_rejected() {
        let mut spec = crate::scenarios::speed_meter_system(1.0, Some(100.0)).unwrap();
        spec.couplings.push(CouplingSpec::Optomechanical {
            cavity: "c".into(),
            mechanical: "mech".into(),
            strength: 0.1,
            sign: 1.0,
        });
        assert!(matches!(
            eliminate_reservoir(&spec),
            Err(Error::Elimination(_, _))
        ));
    }

    #[test]
    fn markov_warning_when_reservoir_is_slow() {
        let mut spec = crate::scenarios::speed_meter_system(1.0, Some(100.0)).unwrap();
        let warnings = spec.validate().unwrap();
        assert!(warnings.is_empty());
        for m in &mut spec.modes {
            if m.name == "c" {
                m.damping = 0.1;
            }
        }
        // J' must shrink with κ_c to keep the spec meaningful; rebuild by hand
        let warnings = spec.validate().unwrap();
        assert!(!warnings.is_empty());
    }
}
