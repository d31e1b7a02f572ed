use std::ffi::{c_char, CString};
use std::ptr;

use orlc::mdp::{gen_random_contextual, gen_random_tabular, Instance, InstanceDocument, ShiftPhase};
use orlc_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let n = unsafe { orlc_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(255)].iter().map(|c| *c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn tabular_runner_round_trip() {
    unsafe {
        let mut mdp = ptr::null_mut();
        assert_eq!(orlc_mdp_random_tabular(5, 3, 4, 2, &mut mdp), OrlcStatus::Ok);
        let (mut s, mut a, mut h) = (0, 0, 0);
        assert_eq!(orlc_mdp_dims(mdp, &mut s, &mut a, &mut h), OrlcStatus::Ok);
        assert_eq!((s, a, h), (5, 3, 4));
        let mut opt = 0.0;
        assert_eq!(orlc_mdp_optimal_return(mdp, &mut opt), OrlcStatus::Ok);

        let mut runner = ptr::null_mut();
        assert_eq!(orlc_runner_new(mdp, 0.1, 1, 2, &mut runner), OrlcStatus::Ok);
        let mut ep = OrlcEpisode::default();
        for k in 1..=500 {
            assert_eq!(orlc_runner_next_episode(runner, &mut ep), OrlcStatus::Ok);
            assert_eq!(ep.episode, k);
            assert_eq!(ep.violation, 0);
            assert_eq!(ep.optimal_return, opt);
        }
        let mut needed = 0;
        assert_eq!(orlc_runner_checkpoint_json(runner, ptr::null_mut(), 0, &mut needed), OrlcStatus::Ok);
        let mut buf = vec![0 as c_char; needed + 1];
        assert_eq!(orlc_runner_checkpoint_json(runner, buf.as_mut_ptr(), buf.len(), &mut needed), OrlcStatus::Ok);
        let text: Vec<u8> = buf[..needed].iter().map(|c| *c as u8).collect();
        assert!(String::from_utf8(text).unwrap().contains("\"episodesDone\":500"));
        orlc_runner_free(runner);
        orlc_mdp_free(mdp);
    }
}

#[test]
fn tables_are_validated() {
    unsafe {
        let p = [0.5, 0.5, 1.0, 0.0, 0.0, 1.0, 0.3, 0.7];
        let mut mdp = ptr::null_mut();
        assert_eq!(orlc_mdp_from_tables(2, 2, 2, p.as_ptr(), [0.1, 0.9, 0.0, 0.5].as_ptr(), &mut mdp), OrlcStatus::Ok);
        let mut opt = 0.0;
        orlc_mdp_optimal_return(mdp, &mut opt);
        assert!(opt > 0.9);
        orlc_mdp_free(mdp);

        let mut bad = ptr::null_mut();
        let status = orlc_mdp_from_tables(2, 2, 2, p.as_ptr(), [0.1, 1.5, 0.0, 0.5].as_ptr(), &mut bad);
        assert_eq!(status, OrlcStatus::InvalidMdp);
        assert!(bad.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(orlc_mdp_from_tables(0, 2, 2, p.as_ptr(), p.as_ptr(), &mut bad), OrlcStatus::InvalidArgument);
        assert_eq!(orlc_mdp_from_tables(2, 2, 2, ptr::null(), p.as_ptr(), &mut bad), OrlcStatus::NullPointer);
        assert!(last_error().contains("transitions"));
    }
}

#[test]
fn json_instances() {
    let tab = InstanceDocument::new(Instance::Tabular(gen_random_tabular(3, 2, 2, 1)), None).to_json();
    let phases = vec![ShiftPhase { start_episode: 1, alpha: vec![0.7; 3] }];
    let ctx = InstanceDocument::new(Instance::Contextual(gen_random_contextual(3, 2, 2, 3, phases, 1)), None).to_json();
    let (tab, ctx) = (CString::new(tab).unwrap(), CString::new(ctx).unwrap());
    unsafe {
        let mut mdp = ptr::null_mut();
        assert_eq!(orlc_mdp_from_json(tab.as_ptr(), &mut mdp), OrlcStatus::Ok);
        orlc_mdp_free(mdp);
        assert_eq!(orlc_mdp_from_json(ctx.as_ptr(), &mut mdp), OrlcStatus::InvalidArgument);
        let junk = CString::new("{not json").unwrap();
        assert_eq!(orlc_mdp_from_json(junk.as_ptr(), &mut mdp), OrlcStatus::ParseError);

        let mut si = ptr::null_mut();
        assert_eq!(orlc_si_runner_from_json(ctx.as_ptr(), 0.1, 1.0, 1, 3, &mut si), OrlcStatus::Ok);
        let mut ep = OrlcEpisode::default();
        for _ in 0..300 {
            assert_eq!(orlc_si_runner_next_episode(si, &mut ep), OrlcStatus::Ok);
            assert_eq!(ep.violation, 0);
        }
        assert_eq!(ep.episode, 300);
        orlc_si_runner_free(si);
        assert_eq!(orlc_si_runner_from_json(ctx.as_ptr(), 0.1, -1.0, 1, 3, &mut si), OrlcStatus::InvalidArgument);
    }
}

#[test]
fn numeric_helpers() {
    unsafe {
        let mut out = 0.0;
        assert_eq!(orlc_prob_est_norm([0.25; 4].as_ptr(), [3.0, 7.0, 7.0, 1.0].as_ptr(), 4, 1.0, &mut out), OrlcStatus::Ok);
        assert_eq!(out, 7.0);
        assert_eq!(
            orlc_prob_est_norm([0.1, 0.1].as_ptr(), [1.0, 0.0].as_ptr(), 2, 0.1, &mut out),
            OrlcStatus::InfeasibleBox
        );
        assert_eq!(orlc_phi(0, 5, 3, 4, 0.1, 0, &mut out), OrlcStatus::Ok);
        assert_eq!(out, 1.0);
        assert_eq!(orlc_phi(1_000_000, 5, 3, 4, 0.1, 0, &mut out), OrlcStatus::Ok);
        assert!(out > 0.0 && out < 0.01);
        assert_eq!(orlc_phi(10, 5, 3, 4, 1.5, 0, &mut out), OrlcStatus::InvalidArgument);
        orlc_mdp_free(ptr::null_mut());
        orlc_runner_free(ptr::null_mut());
        orlc_si_runner_free(ptr::null_mut());
    }
}

/// Compiles a C program against the generated header and the static
/// library, when a C compiler is on the PATH.
#[test]
fn c_program_links_against_the_header() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let target = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../target");
    let profile = if cfg!(debug_assertions) { "debug" } else { "release" };
    let lib = target.join(profile).join("liborlc_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if std::process::Command::new(&cc).arg("--version").output().is_err() || !lib.exists() {
        eprintln!("no C compiler or static library; header smoke test not run");
        return;
    }
    let exe = tempfile_path("orlc_smoke");
    let status = std::process::Command::new(&cc)
        .args(["-std=c11", "-Wall", "-Werror", "-I"])
        .arg(format!("{dir}/include"))
        .arg(format!("{dir}/tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = std::process::Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "smoke program exited with {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with(env!("CARGO_PKG_VERSION")));
    let _ = std::fs::remove_file(exe);
}

fn tempfile_path(stem: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("{stem}_{}", std::process::id()))
}
