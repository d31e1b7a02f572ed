//! C interface to the `orlc` learners.
//!
//! Every function returns an [`OrlcStatus`]; on failure a message for the
//! calling thread is available from [`orlc_last_error_message`]. Objects are
//! opaque handles created by `*_new`/`*_from_*` functions and released with
//! the matching `*_free`. Handles are not thread-safe; use one per thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use orlc::harness::{audit_episode, audit_with_optimum, EpisodeClaim};
use orlc::mdp::{gen_random_tabular, solve_exact, Instance, InstanceDocument, RewardNoise, TabularMdp};
use orlc::orlc::{phi, BonusKind, ConfidenceConfig, ConfidenceVariant, OrlcRunner as TabularRunner};
use orlc::si::{prob_est_norm, EllipsoidConfig, OrlcSiRunner as ContextualRunner, SiPlanner};
use orlc::Error;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrlcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidMdp = 3,
    InfeasibleBox = 4,
    ParseError = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

/// Tabular MDP.
pub struct OrlcMdp(TabularMdp);

/// ORLC learner bound to a tabular MDP.
pub struct OrlcRunner {
    runner: TabularRunner,
    optimal: orlc::mdp::PlanningResult,
}

/// ORLC-SI learner bound to a contextual MDP.
pub struct OrlcSiRunner(ContextualRunner);

/// Announced return interval and optimality certificate.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct OrlcCertificate {
    pub epsilon: f64,
    pub lo: f64,
    pub hi: f64,
}

/// One played and audited episode.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct OrlcEpisode {
    pub episode: u64,
    pub certificate: OrlcCertificate,
    pub realized_reward: f64,
    pub policy_return: f64,
    pub optimal_return: f64,
    pub gap: f64,
    /// Nonzero when the certificate failed the audit.
    pub violation: u8,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> OrlcStatus {
    match e {
        Error::InvalidMdp(_) | Error::InvalidRealization(_) => OrlcStatus::InvalidMdp,
        Error::InfeasibleBox { .. } => OrlcStatus::InfeasibleBox,
        _ => OrlcStatus::InvalidArgument,
    }
}

fn fail(status: OrlcStatus, msg: impl Into<String>) -> OrlcStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> OrlcStatus) -> OrlcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == OrlcStatus::Ok {
                set_error("");
            }
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(OrlcStatus::Internal, msg)
        }
    }
}

macro_rules! try_lib {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return fail(status_of(&err), err.to_string()),
        }
    };
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(OrlcStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL.
#[no_mangle]
pub unsafe extern "C" fn orlc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn orlc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Build an MDP from dense tables: `transitions[(s*A + a)*S + s']` and
/// `rewards[s*A + a]` (mean rewards in [0,1], Bernoulli noise). Start state 0.
#[no_mangle]
pub unsafe extern "C" fn orlc_mdp_from_tables(
    states: usize,
    actions: usize,
    horizon: usize,
    transitions: *const f64,
    rewards: *const f64,
    out: *mut *mut OrlcMdp,
) -> OrlcStatus {
    guard(|| {
        non_null!(transitions, rewards, out);
        if states == 0 || actions == 0 || horizon == 0 {
            return fail(OrlcStatus::InvalidArgument, "dimensions must be positive");
        }
        let p = std::slice::from_raw_parts(transitions, states * actions * states);
        let r = std::slice::from_raw_parts(rewards, states * actions);
        let mdp = TabularMdp {
            states,
            actions,
            horizon,
            transitions: (0..states)
                .map(|s| (0..actions).map(|a| p[(s * actions + a) * states..][..states].to_vec()).collect())
                .collect(),
            rewards: (0..states).map(|s| r[s * actions..][..actions].to_vec()).collect(),
            reward_noise: RewardNoise::Bernoulli,
            initial_state: 0,
            initial_distribution: None,
        };
        try_lib!(mdp.ensure_valid());
        *out = Box::into_raw(Box::new(OrlcMdp(mdp)));
        OrlcStatus::Ok
    })
}

/// Seeded random sparse-reward MDP.
#[no_mangle]
pub unsafe extern "C" fn orlc_mdp_random_tabular(
    states: usize,
    actions: usize,
    horizon: usize,
    seed: u64,
    out: *mut *mut OrlcMdp,
) -> OrlcStatus {
    guard(|| {
        non_null!(out);
        if states == 0 || actions == 0 || horizon == 0 {
            return fail(OrlcStatus::InvalidArgument, "dimensions must be positive");
        }
        *out = Box::into_raw(Box::new(OrlcMdp(gen_random_tabular(states, actions, horizon, seed))));
        OrlcStatus::Ok
    })
}

unsafe fn read_document(json: *const c_char) -> Result<InstanceDocument, OrlcStatus> {
    let text = CStr::from_ptr(json).to_str().map_err(|e| fail(OrlcStatus::ParseError, e.to_string()))?;
    InstanceDocument::from_json(text).map_err(|e| fail(OrlcStatus::ParseError, e.to_string()))
}

/// Load a tabular MDP from an instance JSON document.
#[no_mangle]
pub unsafe extern "C" fn orlc_mdp_from_json(json: *const c_char, out: *mut *mut OrlcMdp) -> OrlcStatus {
    guard(|| {
        non_null!(json, out);
        let doc = match read_document(json) {
            Ok(d) => d,
            Err(s) => return s,
        };
        match doc.instance {
            Instance::Tabular(m) => {
                try_lib!(m.ensure_valid());
                *out = Box::into_raw(Box::new(OrlcMdp(m)));
                OrlcStatus::Ok
            }
            Instance::Contextual(_) => fail(OrlcStatus::InvalidArgument, "document holds a contextual instance"),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn orlc_mdp_dims(
    mdp: *const OrlcMdp,
    states: *mut usize,
    actions: *mut usize,
    horizon: *mut usize,
) -> OrlcStatus {
    guard(|| {
        non_null!(mdp, states, actions, horizon);
        let m = &(*mdp).0;
        (*states, *actions, *horizon) = (m.states, m.actions, m.horizon);
        OrlcStatus::Ok
    })
}

/// Optimal expected return from the start state.
#[no_mangle]
pub unsafe extern "C" fn orlc_mdp_optimal_return(mdp: *const OrlcMdp, out: *mut f64) -> OrlcStatus {
    guard(|| {
        non_null!(mdp, out);
        let m = &(*mdp).0;
        *out = try_lib!(solve_exact(m)).optimal_return(m.initial_state);
        OrlcStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn orlc_mdp_free(mdp: *mut OrlcMdp) {
    if !mdp.is_null() {
        drop(Box::from_raw(mdp));
    }
}

/// ORLC learner on a copy of `mdp`. `refined_bonus` selects the refined
/// widths (nonzero) or the simple ones (zero).
#[no_mangle]
pub unsafe extern "C" fn orlc_runner_new(
    mdp: *const OrlcMdp,
    delta: f64,
    refined_bonus: u8,
    seed: u64,
    out: *mut *mut OrlcRunner,
) -> OrlcStatus {
    guard(|| {
        non_null!(mdp, out);
        let env = (*mdp).0.clone();
        let bonus = if refined_bonus != 0 { BonusKind::Refined } else { BonusKind::Simple };
        let cfg = ConfidenceConfig { delta, bonus, ..Default::default() };
        let optimal = try_lib!(solve_exact(&env));
        let runner = try_lib!(TabularRunner::new(env, cfg, seed));
        *out = Box::into_raw(Box::new(OrlcRunner { runner, optimal }));
        OrlcStatus::Ok
    })
}

/// Plan, announce, play and audit one episode.
#[no_mangle]
pub unsafe extern "C" fn orlc_runner_next_episode(runner: *mut OrlcRunner, out: *mut OrlcEpisode) -> OrlcStatus {
    guard(|| {
        non_null!(runner, out);
        let r = &mut *runner;
        let ep = r.runner.next_episode();
        let claim = EpisodeClaim::from(&ep);
        let rec = try_lib!(audit_with_optimum(r.runner.env(), r.optimal.optimal_return(claim.start), claim));
        *out = episode_struct(&rec);
        OrlcStatus::Ok
    })
}

/// Serialize the learner state as JSON into `buf` (NUL-terminated). Returns
/// the needed length excluding the NUL in `needed`; call with a null buffer
/// to size it.
#[no_mangle]
pub unsafe extern "C" fn orlc_runner_checkpoint_json(
    runner: *const OrlcRunner,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> OrlcStatus {
    guard(|| {
        non_null!(runner, needed);
        let text = serde_json::to_string(&(*runner).runner.checkpoint()).expect("checkpoints serialize");
        *needed = text.len();
        if !buf.is_null() && len > 0 {
            let n = text.len().min(len - 1);
            std::ptr::copy_nonoverlapping(text.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        OrlcStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn orlc_runner_free(runner: *mut OrlcRunner) {
    if !runner.is_null() {
        drop(Box::from_raw(runner));
    }
}

fn episode_struct(rec: &orlc::harness::RunRecord) -> OrlcEpisode {
    OrlcEpisode {
        episode: rec.k,
        certificate: OrlcCertificate { epsilon: rec.epsilon, lo: rec.interval_lo, hi: rec.interval_hi },
        realized_reward: rec.realized_reward,
        policy_return: rec.policy_return,
        optimal_return: rec.optimal_return,
        gap: rec.gap,
        violation: rec.is_violation() as u8,
    }
}

/// ORLC-SI learner on a contextual instance document. `mass_constrained`
/// selects the box-constrained planner (nonzero) or the plain one (zero).
#[no_mangle]
pub unsafe extern "C" fn orlc_si_runner_from_json(
    json: *const c_char,
    delta: f64,
    lambda: f64,
    mass_constrained: u8,
    seed: u64,
    out: *mut *mut OrlcSiRunner,
) -> OrlcStatus {
    guard(|| {
        non_null!(json, out);
        let doc = match read_document(json) {
            Ok(d) => d,
            Err(s) => return s,
        };
        let env = match doc.instance {
            Instance::Contextual(c) => c,
            Instance::Tabular(_) => return fail(OrlcStatus::InvalidArgument, "document holds a tabular instance"),
        };
        let planner = if mass_constrained != 0 { SiPlanner::MassConstrained } else { SiPlanner::Plain };
        let cfg = EllipsoidConfig { delta, lambda, planner, ..Default::default() };
        *out = Box::into_raw(Box::new(OrlcSiRunner(try_lib!(ContextualRunner::new(env, cfg, seed)))));
        OrlcStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn orlc_si_runner_next_episode(runner: *mut OrlcSiRunner, out: *mut OrlcEpisode) -> OrlcStatus {
    guard(|| {
        non_null!(runner, out);
        let ep = try_lib!((*runner).0.next_episode());
        let rec = try_lib!(audit_episode(&ep.realized, EpisodeClaim::from(&ep.output)));
        *out = episode_struct(&rec);
        OrlcStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn orlc_si_runner_free(runner: *mut OrlcSiRunner) {
    if !runner.is_null() {
        drop(Box::from_raw(runner));
    }
}

/// Largest `p . v` over distributions within `psi` of `p_hat` per coordinate.
#[no_mangle]
pub unsafe extern "C" fn orlc_prob_est_norm(
    p_hat: *const f64,
    v: *const f64,
    n: usize,
    psi: f64,
    out: *mut f64,
) -> OrlcStatus {
    guard(|| {
        non_null!(p_hat, v, out);
        let p = std::slice::from_raw_parts(p_hat, n);
        let v = std::slice::from_raw_parts(v, n);
        *out = try_lib!(prob_est_norm(p, psi, v));
        OrlcStatus::Ok
    })
}

/// Confidence scalar for `n` visits; `main_text_variant` nonzero selects the
/// main-text constants instead of the default ones.
#[no_mangle]
pub unsafe extern "C" fn orlc_phi(
    n: u64,
    states: usize,
    actions: usize,
    horizon: usize,
    delta: f64,
    main_text_variant: u8,
    out: *mut f64,
) -> OrlcStatus {
    guard(|| {
        non_null!(out);
        if !(delta > 0.0 && delta < 1.0) || states == 0 || actions == 0 || horizon == 0 {
            return fail(OrlcStatus::InvalidArgument, "need delta in (0,1) and positive dimensions");
        }
        let variant = if main_text_variant != 0 { ConfidenceVariant::MainText } else { ConfidenceVariant::Appendix };
        *out = phi(n, states, actions, horizon, delta, variant);
        OrlcStatus::Ok
    })
}
