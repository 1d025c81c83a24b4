//! Acceptance run: one line per criterion, `[PASS]` or `[FAIL]`.
//!
//! Every reference value is recomputed here from first principles (see
//! `common`), never read back from the library.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use common::*;
use qdos_core::diagram::{build_complete_diagram, diagram_to_unitary, render, simplify_diagram, RenderStyle};
use qdos_core::random::{random_special_unitary, random_state, random_unitary};
use qdos_core::synth::*;
use qdos_core::{circuit_to_unitary, gate_matrix, immerse, simulate, Complex, GateKind, StateVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn euler_synthesis() -> Outcome {
    let mut r = rng(1);
    let (mut worst, mut worst_det) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let (a, d, g) = (random_angle(&mut r), random_angle(&mut r), random_angle(&mut r));
        let res = su2_from_euler(EulerAngles::new(a, d, g)).map_err(|e| e.to_string())?;
        let u = dense(&circuit_to_unitary(&res.circuit).map_err(|e| e.to_string())?);
        worst = worst.max(max_diff(&u, &euler_closed_form(a, d, g)));
        let strip = cis(-(g + d + a) / 2.0);
        let su: Dense = u.iter().map(|row| row.iter().map(|z| z * strip).collect()).collect();
        worst_det = worst_det.max((det2(&su) - c(1.0, 0.0)).norm());
    }
    verdict(
        worst <= 1e-12 && worst_det <= 1e-12,
        format!("1000 draws, max entry error {worst:.2e}, max |det - 1| {worst_det:.2e} (tol 1e-12)"),
    )
}

fn gate_catalogue() -> Outcome {
    let reference: Vec<(GateKind, Dense)> = vec![
        (GateKind::Cnot, from_real(&[&[1., 0., 0., 0.], &[0., 1., 0., 0.], &[0., 0., 0., 1.], &[0., 0., 1., 0.]])),
        (GateKind::CnotBar, from_real(&[&[0., 1., 0., 0.], &[1., 0., 0., 0.], &[0., 0., 1., 0.], &[0., 0., 0., 1.]])),
        (GateKind::CnotR, from_real(&[&[1., 0., 0., 0.], &[0., 0., 0., 1.], &[0., 0., 1., 0.], &[0., 1., 0., 0.]])),
        (GateKind::CnotRBar, from_real(&[&[0., 0., 1., 0.], &[0., 1., 0., 0.], &[1., 0., 0., 0.], &[0., 0., 0., 1.]])),
        (GateKind::Swap, from_real(&[&[1., 0., 0., 0.], &[0., 0., 1., 0.], &[0., 1., 0., 0.], &[0., 0., 0., 1.]])),
    ];
    let mut worst = 0.0f64;
    for (kind, m) in &reference {
        worst = worst.max(max_diff_m(&gate_matrix(kind).map_err(|e| e.to_string())?, m));
    }
    for delta in [0.0, 0.3, -1.2, PI / 2.0, PI] {
        let mut m = identity(4);
        m[3][3] = cis(delta);
        worst = worst.max(max_diff_m(&gate_matrix(&GateKind::cphase(delta)).unwrap(), &m));
    }
    let mut toffoli = identity(8);
    toffoli[6][6] = c(0.0, 0.0);
    toffoli[7][7] = c(0.0, 0.0);
    toffoli[6][7] = c(1.0, 0.0);
    toffoli[7][6] = c(1.0, 0.0);
    worst = worst.max(max_diff_m(&gate_matrix(&GateKind::Toffoli).unwrap(), &toffoli));
    verdict(worst <= 1e-15, format!("CNOT family, SWAP, CPHASE, Toffoli; max error {worst:.2e} (tol 1e-15)"))
}

/// Reference layouts of a 4x4 `U = [a..p]` on three qubits; `.` is zero.
const U01: [&str; 8] = ["abcd....", "efgh....", "ijkl....", "mnop....", "....abcd", "....efgh", "....ijkl", "....mnop"];
const U12: [&str; 8] = ["a.b.c.d.", ".a.b.c.d", "e.f.g.h.", ".e.f.g.h", "i.j.k.l.", ".i.j.k.l", "m.n.o.p.", ".m.n.o.p"];
const U02: [&str; 8] = ["ab..cd..", "ef..gh..", "..ab..cd", "..ef..gh", "ij..kl..", "mn..op..", "..ij..kl", "..mn..op"];

fn from_layout(layout: &[&str; 8], u: &Dense) -> Dense {
    layout
        .iter()
        .map(|row| {
            row.chars()
                .map(|ch| match ch {
                    '.' => c(0.0, 0.0),
                    letter => {
                        let k = letter as usize - 'a' as usize;
                        u[k / 4][k % 4]
                    }
                })
                .collect()
        })
        .collect()
}

fn immersions() -> Outcome {
    let mut r = rng(3);
    let (mut layout_err, mut oracle) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let u = random_unitary(4, &mut r);
        let ud = dense(&u);
        for (targets, layout) in [([0, 1], &U01), ([1, 2], &U12), ([0, 2], &U02)] {
            let m = dense(&immerse(&u, &targets, 3).map_err(|e| e.to_string())?);
            layout_err = layout_err.max(max_diff(&m, &from_layout(layout, &ud)));
            oracle = oracle.max(max_diff(&m, &permutation_conjugation(&ud, &targets, 3)));
            oracle = oracle.max(max_diff(&m, &immersion_oracle(&ud, &targets, 3)));
        }
        layout_err = layout_err.max(max_diff(&from_layout(&U01, &ud), &kron(&identity(2), &ud)));
        layout_err = layout_err.max(max_diff(&from_layout(&U12, &ud), &kron(&ud, &identity(2))));
    }
    verdict(
        layout_err <= 1e-12 && oracle <= 1e-12,
        format!("100 U(4) x 3 placements; vs reference {layout_err:.2e}, vs permutation oracle {oracle:.2e} (tol 1e-12)"),
    )
}

fn swap_synthesis() -> Outcome {
    let res = synth_swap().map_err(|e| e.to_string())?;
    let u = circuit_to_unitary(&res.circuit).map_err(|e| e.to_string())?;
    let swap = from_real(&[&[1., 0., 0., 0.], &[0., 0., 1., 0.], &[0., 1., 0., 0.], &[0., 0., 0., 1.]]);
    let err = max_diff_m(&u, &swap);
    let cnots = res
        .circuit
        .ops()
        .iter()
        .filter(|op| matches!(op.kind, GateKind::Cnot | GateKind::CnotR))
        .count();
    verdict(
        err <= 1e-12 && cnots == 3 && res.circuit.len() == 3,
        format!("{cnots} CNOTs, error {err:.2e} (tol 1e-12)"),
    )
}

fn controlled_syntheses() -> Outcome {
    let mut r = rng(5);
    let not = from_real(&[&[0., 1.], &[1., 0.]]);
    let mut worst = [0.0f64; 5];
    let mut relations = 0.0f64;
    for _ in 0..200 {
        let delta = random_angle(&mut r);
        let mut cp = identity(4);
        cp[3][3] = cis(delta);
        let res = synth_cphase(delta).map_err(|e| e.to_string())?;
        worst[0] = worst[0].max(phase_distance(&cp, &dense(&circuit_to_unitary(&res.circuit).unwrap())));

        let su = random_special_unitary(2, &mut r);
        let res = synth_csu2(&su).map_err(|e| e.to_string())?;
        let target = all_ones_controlled(&dense(&su), 2);
        worst[1] = worst[1].max(phase_distance(&target, &dense(&circuit_to_unitary(&res.circuit).unwrap())));
        let f = csu2_factors(&su).map_err(|e| e.to_string())?;
        let (a, b, cc) = (dense(&f.a), dense(&f.b), dense(&f.c));
        relations = relations.max(max_diff(&mul(&mul(&a, &b), &cc), &identity(2)));
        let axbxc = mul(&mul(&mul(&mul(&a, &not), &b), &not), &cc);
        relations = relations.max(max_diff(&axbxc, &dense(&su)));

        let u = random_unitary(2, &mut r);
        let res = synth_cu(&u).map_err(|e| e.to_string())?;
        let target = all_ones_controlled(&dense(&u), 2);
        worst[2] = worst[2].max(phase_distance(&target, &dense(&circuit_to_unitary(&res.circuit).unwrap())));

        let u = random_unitary(2, &mut r);
        let res = synth_c2u(&u).map_err(|e| e.to_string())?;
        let target = all_ones_controlled(&dense(&u), 3);
        worst[3] = worst[3].max(phase_distance(&target, &dense(&circuit_to_unitary(&res.circuit).unwrap())));

        let delta = random_angle(&mut r);
        let mut c2p = identity(8);
        c2p[7][7] = cis(delta);
        let res = synth_c2phase(delta).map_err(|e| e.to_string())?;
        worst[4] = worst[4].max(phase_distance(&c2p, &dense(&circuit_to_unitary(&res.circuit).unwrap())));
    }
    let res = synth_c2u(&gate_matrix(&GateKind::Not).unwrap()).map_err(|e| e.to_string())?;
    let toffoli = all_ones_controlled(&not, 3);
    let toffoli_err = phase_distance(&toffoli, &dense(&circuit_to_unitary(&res.circuit).unwrap()));
    let max = worst.iter().copied().fold(0.0, f64::max);
    verdict(
        max <= 1e-9 && relations <= 1e-9 && toffoli_err <= 1e-9,
        format!(
            "200 draws; cphase {:.1e}, csu2 {:.1e}, cu {:.1e}, c2u {:.1e}, c2phase {:.1e}; ABC relations {relations:.1e}; C2U(X) vs Toffoli {toffoli_err:.1e} (tol 1e-9)",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

fn rot(t: f64) -> Dense {
    from_real(&[&[t.cos(), -t.sin()], &[t.sin(), t.cos()]])
}

fn dtilde_and_d0() -> Outcome {
    let x = from_real(&[&[0., 1.], &[1., 0.]]);
    let swap = from_real(&[&[1., 0., 0., 0.], &[0., 0., 1., 0.], &[0., 1., 0., 0.], &[0., 0., 0., 1.]]);
    let (mut identity_err, mut pattern_err, mut circuit_err) = (0.0f64, 0.0f64, 0.0f64);
    let grid: Vec<f64> = (0..24).map(|k| -PI + k as f64 * PI / 12.0).collect();
    for &t0 in &grid {
        for &t1 in &grid {
            let lhs = mul(&mul(&mul(&x, &rot(t1)), &x), &rot(t0));
            identity_err = identity_err.max(max_diff(&lhs, &rot(t0 - t1)));

            let (ca, sa) = ((t0 + t1).cos(), (t0 + t1).sin());
            let (cb, sb) = ((t0 - t1).cos(), (t0 - t1).sin());
            let dt = from_real(&[&[ca, -sa, 0., 0.], &[sa, ca, 0., 0.], &[0., 0., cb, -sb], &[0., 0., sb, cb]]);
            let d0 = from_real(&[&[ca, 0., -sa, 0.], &[0., cb, 0., -sb], &[sa, 0., ca, 0.], &[0., sb, 0., cb]]);
            let p = DTildeParams::new(t0, t1);
            pattern_err = pattern_err.max(max_diff_m(&build_dtilde(&p), &dt));
            pattern_err = pattern_err.max(max_diff_m(&build_d0(&p), &d0));
            pattern_err = pattern_err.max(max_diff(&mul(&mul(&swap, &dt), &swap), &d0));
            let circ = circuit_to_unitary(&d0_circuit(&p).unwrap()).unwrap();
            circuit_err = circuit_err.max(max_diff_m(&circ, &d0));
        }
    }
    verdict(
        identity_err <= 1e-12 && pattern_err <= 1e-12 && circuit_err <= 1e-12,
        format!(
            "24x24 grid; XR(t1)XR(t0) vs R(t0-t1) {identity_err:.1e}, reference D~/D0 {pattern_err:.1e}, SWAP D~ SWAP circuit {circuit_err:.1e} (tol 1e-12)"
        ),
    )
}

fn two_qubit_synthesis() -> Outcome {
    let mut r = rng(7);
    let mut worst = 0.0f64;
    let mut controlled_blocks = true;
    for _ in 0..100 {
        let u = random_unitary(4, &mut r);
        let res = synth_2q_unitary(&u).map_err(|e| e.to_string())?;
        worst = worst.max(phase_distance(&dense(&u), &dense(&circuit_to_unitary(&res.circuit).unwrap())));
        let cu = res.circuit.ops().iter().filter(|op| matches!(op.kind, GateKind::Cu { .. })).count();
        controlled_blocks &= cu == 4;
    }
    verdict(
        worst <= 1e-8 && controlled_blocks,
        format!("100 U(4), four controlled blocks around D0; max error {worst:.2e} (tol 1e-8)"),
    )
}

fn diagonal_schedules() -> Outcome {
    let mut r = rng(11);
    let (mut relation_err, mut synth_err, mut verbatim_err) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..200 {
        let n = 2 + k % 2;
        let phis: Vec<f64> = (0..(1 << n) - 1).map(|_| random_angle(&mut r)).collect();
        let phases = DiagonalPhases::new(n, phis.clone()).map_err(|e| e.to_string())?;
        let d = diag_schedule(&phases).deltas;
        let p = |i: usize| phases.phis()[i - 1];
        let forward: Vec<f64> = if n == 2 {
            vec![d[0], d[1], d[0] + d[1] + d[2]]
        } else {
            vec![
                d[0],
                d[1],
                d[0] + d[1] + d[5],
                d[2],
                d[0] + d[2] + d[4],
                d[1] + d[2] + d[3],
                d[0] + d[1] + d[2] + d[3] + d[4] + d[5] + d[6],
            ]
        };
        for (i, f) in forward.iter().enumerate() {
            relation_err = relation_err.max((f - p(i + 1)).abs());
        }
        if n == 3 {
            let verbatim = [
                p(1),
                p(2),
                p(4),
                p(6) - p(2) - p(4),
                p(5) - p(1) - p(4),
                p(3) - p(1) - p(2),
                p(7) + p(1) + p(2) + p(4) - p(3) - p(5) - p(6),
            ];
            for (a, b) in verbatim.iter().zip(&d) {
                verbatim_err = verbatim_err.max((a - b).abs());
            }
        }
        let mut target = identity(1 << n);
        for (i, &phi) in phis.iter().enumerate() {
            target[i + 1][i + 1] = cis(phi);
        }
        let res = synth_diag(&phases).map_err(|e| e.to_string())?;
        synth_err = synth_err.max(max_diff_m(&circuit_to_unitary(&res.circuit).unwrap(), &target));
    }
    verdict(
        relation_err <= 1e-14 && verbatim_err == 0.0 && synth_err <= 1e-10,
        format!(
            "200 phase vectors; forward/inverse round trip {relation_err:.1e}, inverse formulas {verbatim_err:.1e}, synthesized diagonal {synth_err:.1e} (tol 1e-10)"
        ),
    )
}

fn state_distance(a: &[Complex], b: &[Complex]) -> f64 {
    let overlap: Complex = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let z = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { c(1.0, 0.0) };
    a.iter().zip(b).map(|(x, y)| (z * x - y).norm()).fold(0.0, f64::max)
}

fn state_synthesis() -> Outcome {
    let mut r = rng(13);
    let mut worst = 0.0f64;
    for k in 0..500 {
        let n = 2 + k % 2;
        let target = random_state(n, &mut r);
        let res = synth_state(&target).map_err(|e| e.to_string())?;
        let out = simulate(&res.circuit, &StateVector::basis(n, 0).unwrap()).unwrap();
        worst = worst.max(state_distance(target.amps(), out.amps()));
    }
    let angles = amplitude_angles(&[0.5; 4]).map_err(|e| e.to_string())?;
    let uniform = angles.iter().map(|a| (a - PI / 2.0).abs()).fold(0.0, f64::max);
    verdict(
        worst <= 1e-9 && uniform <= 1e-12,
        format!("500 random states (n = 2, 3); max error {worst:.2e} (tol 1e-9); uniform-state angles off pi/2 by {uniform:.1e}"),
    )
}

fn diagram_faithfulness() -> Outcome {
    let mut r = rng(17);
    let (mut faithful, mut simplified, mut oracle) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..500 {
        let n = 1 + k % 4;
        let len = k % 21;
        let circuit = random_circuit(n, len, &mut r);
        let u = circuit_to_unitary(&circuit).unwrap();
        let mut product = identity(1 << n);
        for op in circuit.ops() {
            let g = dense(&gate_matrix(&op.kind).unwrap());
            product = mul(&immersion_oracle(&g, &op.targets, n), &product);
        }
        oracle = oracle.max(max_diff_m(&u, &product));
        let d = build_complete_diagram(&circuit).map_err(|e| e.to_string())?;
        faithful = faithful.max(max_diff_m(&diagram_to_unitary(&d).unwrap(), &product));
        let s = simplify_diagram(&d).map_err(|e| e.to_string())?;
        simplified = simplified.max(phase_distance(&product, &dense(&diagram_to_unitary(&s).unwrap())));
    }
    verdict(
        faithful <= 1e-10 && simplified <= 1e-10 && oracle <= 1e-10,
        format!(
            "500 circuits (n <= 4, <= 20 ops); complete {faithful:.1e}, simplified {simplified:.1e}, circuit vs oracle {oracle:.1e} (tol 1e-10)"
        ),
    )
}

fn attribute(tag: &str, name: &str) -> f64 {
    let key = format!(" {name}=\"");
    let start = tag.find(&key).expect("attribute present") + key.len();
    let end = start + tag[start..].find('"').unwrap();
    tag[start..end].parse().unwrap()
}

fn renderer_structure() -> Outcome {
    let mut circuit = qdos_core::Circuit::new(2).unwrap();
    circuit.add(GateKind::Cnot, [0, 1]).unwrap();
    let d = build_complete_diagram(&circuit).map_err(|e| e.to_string())?;
    let style = RenderStyle::default();
    let svg = render(&d, &style);
    let state_lines: Vec<&str> = svg.lines().filter(|l| l.contains("class=\"state-line\"")).collect();
    let ys: Vec<f64> = state_lines
        .iter()
        .map(|l| {
            let d = l.split(" d=\"M ").nth(1).unwrap();
            d.split_whitespace().nth(1).unwrap().parse().unwrap()
        })
        .collect();
    let diagonals: Vec<(f64, f64)> = svg
        .lines()
        .filter(|l| l.contains("segment diagonal"))
        .map(|l| (attribute(l, "y1"), attribute(l, "y2")))
        .collect();
    let one_crossing = diagonals.len() == 2
        && ys.len() == 4
        && diagonals.contains(&(ys[2], ys[3]))
        && diagonals.contains(&(ys[3], ys[2]));
    let repeat = (0..5).all(|_| render(&d, &style) == svg)
        && render(&d, &RenderStyle::ascii()) == render(&d, &RenderStyle::ascii());
    verdict(
        state_lines.len() == 4 && one_crossing && repeat,
        format!(
            "{} state lines, {} diagonal segments crossing lines 10/11, byte-identical repeats: {repeat}",
            state_lines.len(),
            diagonals.len()
        ),
    )
}

fn main() {
    let start = Instant::now();
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("euler synthesis", euler_synthesis),
        ("gate catalogue", gate_catalogue),
        ("immersions", immersions),
        ("swap synthesis", swap_synthesis),
        ("controlled syntheses", controlled_syntheses),
        ("d-tilde and d0", dtilde_and_d0),
        ("two-qubit synthesis", two_qubit_synthesis),
        ("diagonal schedules", diagonal_schedules),
        ("state synthesis", state_synthesis),
        ("diagram faithfulness", diagram_faithfulness),
        ("renderer structure", renderer_structure),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failures += outcome.is_err() as usize;
        println!("[{tag}] {:>2} {name}: {detail}", k + 1);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let fast = elapsed <= 60.0;
    failures += !fast as usize;
    println!(
        "[{}] 12 runtime: acceptance criteria ran in {elapsed:.2} s (limit 60 s)",
        if fast { "PASS" } else { "FAIL" }
    );
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
