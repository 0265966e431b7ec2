use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use memddg_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(memddg_last_error()) }.to_string_lossy().into_owned()
}

fn preset(name: &str) -> *mut MemddgSystem {
    let name = CString::new(name).unwrap();
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { memddg_system_from_preset(name.as_ptr(), &mut sys) }, MemddgStatus::Ok);
    assert!(!sys.is_null());
    sys
}

#[test]
fn preset_round_trip_through_the_abi() {
    let sys = preset("vesicle-dumbbell");
    unsafe {
        let mut n = 0;
        assert_eq!(memddg_system_vertex_count(sys, &mut n), MemddgStatus::Ok);
        let mut nf = 0;
        assert_eq!(memddg_system_face_count(sys, &mut nf), MemddgStatus::Ok);
        assert_eq!(2 * n, nf + 4);

        let mut pos = vec![0.0; 3 * n];
        assert_eq!(memddg_system_positions(sys, pos.as_mut_ptr(), pos.len()), MemddgStatus::Ok);
        let mut faces = vec![0usize; 3 * nf];
        assert_eq!(memddg_system_faces(sys, faces.as_mut_ptr(), faces.len()), MemddgStatus::Ok);
        assert!(faces.iter().all(|&v| v < n));

        let mut e0 = MemddgEnergy::default();
        assert_eq!(memddg_system_energy(sys, &mut e0), MemddgStatus::Ok);
        assert!(e0.total > 0.0);
        let sum = e0.bending + e0.surface + e0.pressure + e0.dirichlet + e0.adsorption + e0.regularization + e0.external;
        assert!((sum - e0.total).abs() <= 1e-15 * e0.total.abs().max(1.0));

        let mut f = vec![0.0; 3 * n];
        assert_eq!(memddg_system_forces(sys, f.as_mut_ptr(), f.len()), MemddgStatus::Ok);
        let net: f64 = (0..3).map(|c| f.iter().skip(c).step_by(3).sum::<f64>().abs()).sum();
        assert!(net < 1e-14);

        let mut report = MemddgRunReport { reason: MemddgReason::Failed, steps: 0, time: 0.0, residual: 0.0, chem_residual: 0.0 };
        assert_eq!(memddg_system_run(sys, 5, &mut report), MemddgStatus::Ok);
        assert_eq!(report.steps, 5);
        assert_eq!(report.reason, MemddgReason::MaxSteps);
        let mut e1 = MemddgEnergy::default();
        memddg_system_energy(sys, &mut e1);
        assert!(e1.total < e0.total);

        // writing the original positions back restores the energy
        assert_eq!(memddg_system_set_positions(sys, pos.as_ptr(), pos.len()), MemddgStatus::Ok);
        let mut e2 = MemddgEnergy::default();
        memddg_system_energy(sys, &mut e2);
        assert_eq!(e2.total, e0.total);
        memddg_system_free(sys);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut sys = ptr::null_mut();
        let bad = CString::new("no-such-preset").unwrap();
        assert_eq!(memddg_system_from_preset(bad.as_ptr(), &mut sys), MemddgStatus::InvalidArgument);
        assert!(sys.is_null());
        assert!(last_error().starts_with("UnknownPreset"), "{}", last_error());

        let missing = CString::new("/nonexistent/run.cfg").unwrap();
        assert_eq!(memddg_system_from_config(missing.as_ptr(), &mut sys), MemddgStatus::Io);
        assert_eq!(memddg_system_from_preset(ptr::null(), &mut sys), MemddgStatus::NullPointer);

        let sys = preset("spine-protein");
        let mut n = 0;
        memddg_system_vertex_count(sys, &mut n);
        let mut small = vec![0.0; n];
        assert_eq!(memddg_system_positions(sys, small.as_mut_ptr(), small.len()), MemddgStatus::BufferTooSmall);
        let mut phi = vec![0.5; n];
        phi[3] = 1.5;
        assert_eq!(memddg_system_set_phi(sys, phi.as_ptr(), n), MemddgStatus::InvalidArgument);
        assert!(last_error().contains("phi[3]"));
        phi[3] = 0.25;
        assert_eq!(memddg_system_set_phi(sys, phi.as_ptr(), n), MemddgStatus::Ok);
        let mut back = vec![0.0; n];
        memddg_system_phi(sys, back.as_mut_ptr(), n);
        assert_eq!(back, phi);
        assert_eq!(memddg_system_set_phi(sys, phi.as_ptr(), n - 1), MemddgStatus::InvalidArgument);
        memddg_system_free(sys);

        let mut count = 0;
        assert_eq!(memddg_system_vertex_count(ptr::null(), &mut count), MemddgStatus::NullPointer);
        memddg_system_free(ptr::null_mut());
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(memddg_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/memddg.h");
    let text = std::fs::read_to_string(header).unwrap();
    for sym in ["memddg_system_from_preset", "memddg_last_error", "MEMDDG_STATUS_BUFFER_TOO_SMALL", "MemddgSystem"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        match Command::new(compiler).args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, header]).output() {
            Ok(o) => assert!(o.status.success(), "{compiler}: {}", String::from_utf8_lossy(&o.stderr)),
            Err(e) => eprintln!("skipping {compiler}: {e}"),
        }
    }
}
