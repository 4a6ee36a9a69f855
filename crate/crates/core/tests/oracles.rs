//! Independent re-derivations checked against the library: drift matrices
//! from the Hamiltonian by commutator algebra, a hand-assembled extended
//! Fourier system, brute-force noise sums and the general constant-pump
//! transmission at Δ = ω_m.

use nalgebra::DMatrix;

use xduct::matrix_builder::{build_drift_constant, build_drift_fourier, build_port_layout};
use xduct::params::{hz_to_rad, steady_amplitude};
use xduct::sideband_solver::{solve_constant, solve_parametric};
use xduct::{metrics, Cavity, DriveProtocol, PortLayout, Quadrature, SidebandSign, SystemParams, C64};

const STATES: usize = 6;

fn z() -> C64 {
    C64::new(0.0, 0.0)
}

/// `[x_i, x_j]` for `x = [a_o, a_e, a_o†, a_e†, b, b†]`.
fn commutator_form() -> DMatrix<C64> {
    let mut j = DMatrix::from_element(STATES, STATES, z());
    for (a, ad) in [(0, 2), (1, 3), (4, 5)] {
        j[(a, ad)] = C64::new(1.0, 0.0);
        j[(ad, a)] = C64::new(-1.0, 0.0);
    }
    j
}

/// Heisenberg drift of `H = Σ h_ij x_i x_j`: `ẋ_k = −i[x_k, H]`, so the
/// coefficient matrix is `−i(J h + J hᵀ)`.
fn heisenberg(h: &DMatrix<C64>) -> DMatrix<C64> {
    let j = commutator_form();
    (&j * h + &j * h.transpose()) * C64::new(0.0, -1.0)
}

/// Quadratic form of the linearised Hamiltonian
/// `Δ_o a_o†a_o + Δ_e a_e†a_e + ω_m b†b + Σ (G a† + G* a)(b + b†)`,
/// split into the parts carrying `G` and `G*`.
fn hamiltonian(p: &SystemParams, go: C64, ge: C64) -> (DMatrix<C64>, DMatrix<C64>, DMatrix<C64>) {
    let mut free = DMatrix::from_element(STATES, STATES, z());
    free[(2, 0)] = C64::new(p.delta_o, 0.0);
    free[(3, 1)] = C64::new(p.delta_e, 0.0);
    free[(5, 4)] = C64::new(p.omega_m, 0.0);
    let mut with_g = DMatrix::from_element(STATES, STATES, z());
    let mut with_gc = DMatrix::from_element(STATES, STATES, z());
    for (g, ad, a) in [(go, 2, 0), (ge, 3, 1)] {
        for mech in [4, 5] {
            with_g[(ad, mech)] = g;
            with_gc[(a, mech)] = g.conj();
        }
    }
    (free, with_g, with_gc)
}

fn damping(p: &SystemParams) -> DMatrix<C64> {
    let k = [p.kappa_o, p.kappa_e, p.kappa_o, p.kappa_e, p.kappa_m, p.kappa_m];
    DMatrix::from_fn(STATES, STATES, |r, c| if r == c { C64::new(-0.5 * k[r], 0.0) } else { z() })
}

fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn dyn6(m: &nalgebra::Matrix6<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(STATES, STATES, |r, c| m[(r, c)])
}

fn test_points() -> Vec<SystemParams> {
    let t = SystemParams::reference_device();
    vec![
        t,
        SystemParams::symmetric_study(hz_to_rad(0.3)),
        SystemParams {
            delta_o: t.omega_m,
            delta_e: 0.7 * t.omega_m,
            g_o: 2.0 * t.g_o,
            ..t
        },
    ]
}

#[test]
fn constant_drift_matches_commutator_algebra() {
    for p in test_points() {
        let v = p.validate().unwrap();
        let amps = steady_amplitude(&v, &DriveProtocol::constant(hz_to_rad(400e6))).unwrap();
        let (free, g, gc) = hamiltonian(&p, amps.g_eff_o, amps.g_eff_e);
        let expected = heisenberg(&(free + g + gc)) + damping(&p);
        let got = dyn6(&build_drift_constant(&v, &amps).a);
        let scale = expected.iter().map(|x| x.norm()).fold(0.0, f64::max);
        assert!(max_diff(&got, &expected) <= 1e-15 * scale, "{got}\n{expected}");
    }
}

#[test]
fn fourier_blocks_match_commutator_algebra() {
    // G(t) = G^s e^{−2iω_m t}: the G part rotates with e^{−2iω_m t}, the G* part with e^{+2iω_m t}
    for p in test_points() {
        let v = p.validate().unwrap();
        let amps = steady_amplitude(&v, &DriveProtocol::parametric(hz_to_rad(400e6), 2)).unwrap();
        let (free, g, gc) = hamiltonian(&p, amps.g_eff_o, amps.g_eff_e);
        let set = build_drift_fourier(&v, &amps);
        let scale = amps.g_eff_o.norm().max(amps.g_eff_e.norm());
        assert!(max_diff(&dyn6(&set.a_d), &(heisenberg(&free) + damping(&p))) <= 1e-15 * p.max_rate());
        assert!(max_diff(&dyn6(&set.a_minus), &heisenberg(&g)) <= 1e-15 * scale);
        assert!(max_diff(&dyn6(&set.a_plus), &heisenberg(&gc)) <= 1e-15 * scale);
    }
}

/// Extended system over Fourier components `a(ω + 2kω_m)`, k = −n..n.
/// Row k reads `−i(ω+2kω_m) a_k = A_d a_k + A_- a_{k−1} + A_+ a_{k+1} + B a_in,k`.
/// Returns `T` and `T_±[k]` for k = 1..n.
fn extended_transfer(
    p: &SystemParams,
    omega_drive: f64,
    probe: f64,
    n: usize,
) -> (PortLayout, DMatrix<C64>, Vec<(SidebandSign, usize, DMatrix<C64>)>) {
    let v = p.validate().unwrap();
    let amps = steady_amplitude(&v, &DriveProtocol::parametric(omega_drive, n)).unwrap();
    let (free, g, gc) = hamiltonian(p, amps.g_eff_o, amps.g_eff_e);
    let a_d = heisenberg(&free) + damping(p);
    let a_minus = heisenberg(&g);
    let a_plus = heisenberg(&gc);
    let layout = build_port_layout(&v);

    let blocks = 2 * n + 1;
    let dim = STATES * blocks;
    let mut m = DMatrix::from_element(dim, dim, z());
    for bi in 0..blocks {
        let k = bi as f64 - n as f64;
        let nu = probe + 2.0 * k * p.omega_m;
        for r in 0..STATES {
            for c in 0..STATES {
                let diag = if r == c { C64::new(0.0, -nu) } else { z() };
                m[(bi * STATES + r, bi * STATES + c)] = diag - a_d[(r, c)];
                if bi > 0 {
                    m[(bi * STATES + r, (bi - 1) * STATES + c)] = -a_minus[(r, c)];
                }
                if bi + 1 < blocks {
                    m[(bi * STATES + r, (bi + 1) * STATES + c)] = -a_plus[(r, c)];
                }
            }
        }
    }
    let inv = m.lu().try_inverse().expect("extended system is regular");

    let b = DMatrix::from_fn(STATES, layout.n_columns(), |r, c| {
        let col = &layout.columns[c];
        if col.cavity.state_index(col.quad) == r {
            C64::new(col.rate.sqrt(), 0.0)
        } else {
            z()
        }
    });
    let central = n * STATES;
    let block = |bk: usize| inv.view((central, bk * STATES), (STATES, STATES)).into_owned();
    let mut t = b.transpose() * block(n) * &b;
    for i in 0..t.nrows() {
        t[(i, i)] -= C64::new(1.0, 0.0);
    }
    let mut side = Vec::new();
    for k in 1..=n {
        side.push((SidebandSign::Plus, k, b.transpose() * block(n + k) * &b));
        side.push((SidebandSign::Minus, k, b.transpose() * block(n - k) * &b));
    }
    (layout, t, side)
}

#[test]
fn recursion_matches_hand_assembled_extended_system() {
    for p in test_points() {
        for n in 1..=4 {
            for probe in [p.omega_m, 0.8 * p.omega_m, -0.3 * p.omega_m] {
                let w = hz_to_rad(350e6);
                let (layout, t, side) = extended_transfer(&p, w, probe, n);
                let v = p.validate().unwrap();
                let amps = steady_amplitude(&v, &DriveProtocol::parametric(w, n)).unwrap();
                let sol = solve_parametric(&build_drift_fourier(&v, &amps), &layout, probe, n).unwrap();
                let scale = sol.scale();
                assert!(max_diff(&sol.t_central, &t) <= 1e-10 * scale, "n={n} probe={probe}");
                for (sign, k, expected) in &side {
                    match sol.sideband(*sign, *k) {
                        Some(got) => assert!(max_diff(got, expected) <= 1e-10 * scale, "{sign}{k}"),
                        // not materialised: must vanish in the full solve
                        None => assert!(
                            expected.iter().all(|x| x.norm() <= 1e-13 * scale),
                            "{sign}{k} is nonzero"
                        ),
                    }
                }
            }
        }
    }
}

/// General constant-pump `T_oe(ω_m)` at `Δ_o = Δ_e = ω_m`.
fn constant_t_oe_resonant(p: &SystemParams, go: C64, ge: C64) -> C64 {
    let i = C64::i();
    let w = p.omega_m;
    let (ko, ke, km) = (p.kappa_o, p.kappa_e, p.kappa_m);
    let num = 32.0 * w * (p.kappa_o_ex * p.kappa_e_ex).sqrt() * (ke - 4.0 * i * w) * (ko - 4.0 * i * w) * ge.conj() * go;
    let den = 64.0 * w * w * ko * (i * ko + 4.0 * w) * ge.norm_sqr()
        + ke * (i * ke + 4.0 * w)
            * (-km * ko * (km - 4.0 * i * w) * (ko - 4.0 * i * w) + 64.0 * w * w * go.norm_sqr());
    num / den
}

#[test]
fn constant_pump_general_transmission() {
    let t = SystemParams::reference_device();
    let cases = [
        SystemParams {
            delta_o: t.omega_m,
            delta_e: t.omega_m,
            ..t
        },
        SystemParams {
            delta_o: t.omega_m,
            delta_e: t.omega_m,
            kappa_m: 1e3,
            kappa_m_ex: 1e3,
            ..t
        },
        SystemParams::symmetric_study(hz_to_rad(5.0)),
    ];
    for p in cases {
        for drive_hz in [150e6, 500e6, 900e6] {
            let v = p.validate().unwrap();
            let amps = steady_amplitude(&v, &DriveProtocol::constant(hz_to_rad(drive_hz))).unwrap();
            let sol = solve_constant(&build_drift_constant(&v, &amps), &build_port_layout(&v), p.omega_m).unwrap();
            let got = sol
                .element(("o.ex", Quadrature::Annihilation), ("e.ex", Quadrature::Annihilation))
                .unwrap();
            let expected = constant_t_oe_resonant(&p, amps.g_eff_o, amps.g_eff_e);
            assert!((got - expected).norm() <= 1e-9 * expected.norm(), "{got} vs {expected}");
        }
    }
}

/// `η²S` summed by hand over every input column and sideband.
fn brute_force_noise(sol: &xduct::TransferSolution) -> (f64, f64) {
    let l = &sol.layout;
    let row = l.column_index("o.ex", Quadrature::Annihilation).unwrap();
    let sig = l.column_index("e.ex", Quadrature::Annihilation).unwrap();
    let sig_conj = l.column_index("e.ex", Quadrature::Creation).unwrap();
    let exists = |c: usize, nu: f64| {
        let col = &l.columns[c];
        match (col.cavity, col.quad) {
            (Cavity::Mechanical, Quadrature::Annihilation) => nu >= 0.0,
            (Cavity::Mechanical, Quadrature::Creation) => nu <= 0.0,
            _ => true,
        }
    };
    let eta = sol.t_central[(row, sig)].norm();
    let mut total = 0.0;
    let mut comm = 0.0;
    let mut add = |t: C64, c: usize, nu: f64, central: bool| {
        if !exists(c, nu) {
            return;
        }
        let sq = t.norm_sqr();
        comm += if l.columns[c].quad == Quadrature::Annihilation { sq } else { -sq };
        if central && c == sig {
            return;
        }
        total += if central && c == sig_conj { 1.5 * sq } else { 0.5 * sq };
    };
    for c in 0..l.n_columns() {
        add(sol.t_central[(row, c)], c, sol.probe_omega, true);
    }
    for b in &sol.t_sideband {
        let shift = match b.sign {
            SidebandSign::Plus => 2.0 * b.k as f64 * sol.omega_m,
            SidebandSign::Minus => -2.0 * b.k as f64 * sol.omega_m,
        };
        for c in 0..l.n_columns() {
            add(b.t[(row, c)], c, sol.probe_omega + shift, false);
        }
    }
    (total / (eta * eta), (comm - 1.0).abs())
}

#[test]
fn noise_matches_brute_force_sum() {
    for p in test_points() {
        for drive in [
            DriveProtocol::constant(hz_to_rad(600e6)),
            DriveProtocol::parametric(hz_to_rad(600e6), 1),
            DriveProtocol::parametric(hz_to_rad(600e6), 2),
        ] {
            let t = xduct::Transducer::new(p, drive).unwrap();
            let sol = t.solve(p.omega_m).unwrap();
            let r = metrics::added_noise(&sol, "e.ex", "o.ex").unwrap();
            let (s, comm) = brute_force_noise(&sol);
            assert!((r.s_added - s).abs() <= 1e-12 * s.max(1.0), "{} vs {s}", r.s_added);
            assert!((r.commutator_residual - comm).abs() <= 1e-12);
        }
    }
}

#[test]
fn steady_amplitudes_match_closed_forms() {
    let p = SystemParams::reference_device();
    let v = p.validate().unwrap();
    let w = hz_to_rad(500e6);
    let i = C64::i();
    let c = steady_amplitude(&v, &DriveProtocol::constant(w)).unwrap();
    let expect_c = 2.0 * w / (i * p.kappa_o - 2.0 * p.delta_o);
    assert!((c.alpha_o - expect_c).norm() <= 1e-14 * expect_c.norm());
    assert!((c.g_eff_o - p.g_o * expect_c).norm() <= 1e-14 * c.g_eff_o.norm());
    let pd = steady_amplitude(&v, &DriveProtocol::parametric(w, 2)).unwrap();
    let expect_p = 2.0 * w / (4.0 * p.omega_m - 2.0 * p.delta_e + i * p.kappa_e);
    assert!((pd.alpha_e - expect_p).norm() <= 1e-14 * expect_p.norm());
}
