//! Named, seed-driven scenarios: each one builds a world from a seed, runs
//! an honest exchange or an attack, and reports whether the outcome matched
//! the scenario's registered expectation. Attack scenarios expect the attack
//! to land; defense and honest scenarios expect their stated outcome.
//!
//! Everything a scenario does flows from `(name, scheme, width, delta,
//! seed)` plus the dictionary file where one is needed, so two runs with the
//! same configuration produce byte-identical transcripts.

use std::io;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::attacks::{
    self, extract_card_secrets, read_dictionary, AttackVerdict, DictionaryError, ExtractionBlocked,
};
use crate::kuchen::{self, RejectReason, ServerState, ServerVerdict};
use crate::simnet::{
    CapabilityError, Card, EventKind, Message, ScenarioMeta, SchemeKind, SessionOutcome, Taps,
    Transcript, UserCard, World,
};
use crate::words::{random_word, Identity, Password, Width, WordError};
use crate::yoon::{self, ChangeOutcome, RegistrationRecord};

/// Everything a scenario run is parameterized on.
#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub scenario: String,
    /// Scheme override for scenarios that support both; pinned scenarios
    /// reject a conflicting choice.
    pub scheme: Option<SchemeKind>,
    pub width_bits: usize,
    /// Freshness window in ticks.
    pub delta: u64,
    pub seed: u64,
    pub dict_path: Option<PathBuf>,
    pub out_path: Option<PathBuf>,
    /// Ticks between the server's reply going out and the fabricated
    /// request being injected (parallel-session timing experiments).
    pub inject_delay: u64,
}

impl ScenarioConfig {
    pub fn new(scenario: impl Into<String>) -> ScenarioConfig {
        ScenarioConfig {
            scenario: scenario.into(),
            scheme: None,
            width_bits: 256,
            delta: 60,
            seed: 0,
            dict_path: None,
            out_path: None,
            inject_delay: 0,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("unknown scenario '{name}'; known scenarios: {known}")]
    UnknownScenario { name: String, known: String },
    #[error("scenario '{scenario}' runs against the {required} scheme only")]
    SchemeMismatch {
        scenario: &'static str,
        required: SchemeKind,
    },
    #[error("scenario '{0}' requires a dictionary (--dict PATH)")]
    MissingDictionary(&'static str),
    #[error("dictionary has no entries")]
    EmptyDictionary,
    #[error(transparent)]
    Dictionary(#[from] DictionaryError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Capability(#[from] CapabilityError),
    #[error(transparent)]
    Extraction(#[from] ExtractionBlocked),
}

/// What a scenario produced: an honest session outcome or an attack verdict.
#[derive(Clone, Debug)]
pub enum ScenarioOutcome {
    Honest(SessionOutcome),
    Attack(AttackVerdict),
}

/// A finished run: the transcript, the outcome, and whether it matched the
/// scenario's registered expectation.
#[derive(Clone, Debug)]
pub struct ScenarioReport {
    pub transcript: Transcript,
    pub outcome: ScenarioOutcome,
    pub matched_expectation: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Expectation {
    SessionAccepted,
    WrongPasswordRejected,
    AttackSucceeds,
    AttackFails,
}

struct ScenarioSpec {
    name: &'static str,
    default_scheme: SchemeKind,
    /// Pinned scenarios only make sense against one scheme.
    pinned: bool,
    needs_dict: bool,
    adversary: bool,
    expectation: Expectation,
}

const REGISTRY: &[ScenarioSpec] = &[
    ScenarioSpec {
        name: "honest-login",
        default_scheme: SchemeKind::KuChen,
        pinned: false,
        needs_dict: false,
        adversary: false,
        expectation: Expectation::SessionAccepted,
    },
    ScenarioSpec {
        name: "wrong-password",
        default_scheme: SchemeKind::KuChen,
        pinned: false,
        needs_dict: false,
        adversary: false,
        expectation: Expectation::WrongPasswordRejected,
    },
    ScenarioSpec {
        name: "password-change-honest",
        default_scheme: SchemeKind::KuChen,
        pinned: false,
        needs_dict: false,
        adversary: false,
        expectation: Expectation::SessionAccepted,
    },
    ScenarioSpec {
        name: "attack-parallel-session",
        default_scheme: SchemeKind::KuChen,
        pinned: false,
        needs_dict: false,
        adversary: true,
        expectation: Expectation::AttackSucceeds,
    },
    ScenarioSpec {
        name: "attack-kuchen-pwchange",
        default_scheme: SchemeKind::KuChen,
        pinned: true,
        needs_dict: false,
        adversary: true,
        expectation: Expectation::AttackSucceeds,
    },
    ScenarioSpec {
        name: "attack-yoon-guess",
        default_scheme: SchemeKind::Yoon,
        pinned: true,
        needs_dict: true,
        adversary: true,
        expectation: Expectation::AttackSucceeds,
    },
    ScenarioSpec {
        name: "attack-yoon-takeover",
        default_scheme: SchemeKind::Yoon,
        pinned: true,
        needs_dict: true,
        adversary: true,
        expectation: Expectation::AttackSucceeds,
    },
    ScenarioSpec {
        name: "attack-yoon-insider",
        default_scheme: SchemeKind::Yoon,
        pinned: true,
        needs_dict: false,
        adversary: true,
        expectation: Expectation::AttackSucceeds,
    },
    ScenarioSpec {
        name: "defense-yoon-keyed-change",
        default_scheme: SchemeKind::Yoon,
        pinned: true,
        needs_dict: false,
        adversary: true,
        expectation: Expectation::AttackFails,
    },
];

/// The registered scenario names, in registry order.
pub fn scenario_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|s| s.name).collect()
}

/// Runs one scenario end to end and reports the transcript, the outcome,
/// and whether the outcome matched the registered expectation.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioReport, ScenarioError> {
    let spec = REGISTRY
        .iter()
        .find(|s| s.name == cfg.scenario)
        .ok_or_else(|| ScenarioError::UnknownScenario {
            name: cfg.scenario.clone(),
            known: scenario_names().join(", "),
        })?;
    let scheme = match cfg.scheme {
        None => spec.default_scheme,
        Some(s) if !spec.pinned || s == spec.default_scheme => s,
        Some(_) => {
            return Err(ScenarioError::SchemeMismatch {
                scenario: spec.name,
                required: spec.default_scheme,
            })
        }
    };
    let width = Width::new(cfg.width_bits)?;
    let dictionary = match (&cfg.dict_path, spec.needs_dict) {
        (Some(path), _) => {
            let dict = read_dictionary(path, width)?;
            if dict.is_empty() {
                return Err(ScenarioError::EmptyDictionary);
            }
            Some(dict)
        }
        (None, true) => return Err(ScenarioError::MissingDictionary(spec.name)),
        (None, false) => None,
    };

    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let server = ServerState::new(random_word(&mut rng, width), cfg.delta)?;
    let meta = ScenarioMeta {
        scenario: spec.name.to_string(),
        scheme,
        width,
        delta: cfg.delta,
        seed: cfg.seed,
    };
    let taps = if spec.adversary {
        Taps::all()
    } else {
        Taps::none()
    };
    let mut world = World::new(scheme, server, meta, taps);

    let outcome = match spec.name {
        "honest-login" => honest_login(&mut world, &mut rng)?,
        "wrong-password" => wrong_password(&mut world, &mut rng)?,
        "password-change-honest" => password_change_honest(&mut world, &mut rng)?,
        "attack-parallel-session" => parallel_session(&mut world, &mut rng, cfg.inject_delay)?,
        "attack-kuchen-pwchange" | "defense-yoon-keyed-change" => {
            pwchange_with_guess(&mut world, &mut rng)?
        }
        "attack-yoon-guess" => {
            yoon_guess(&mut world, &mut rng, dictionary.as_deref().unwrap())?
        }
        "attack-yoon-takeover" => {
            yoon_takeover(&mut world, &mut rng, dictionary.as_deref().unwrap())?
        }
        "attack-yoon-insider" => yoon_insider(&mut world, &mut rng)?,
        _ => unreachable!("scenario is in the registry"),
    };

    let matched_expectation = expectation_met(spec.expectation, &outcome);
    world
        .transcript
        .set_verdict(verdict_text(&outcome, matched_expectation));
    Ok(ScenarioReport {
        transcript: world.transcript,
        outcome,
        matched_expectation,
    })
}

fn expectation_met(expectation: Expectation, outcome: &ScenarioOutcome) -> bool {
    match (expectation, outcome) {
        (Expectation::SessionAccepted, ScenarioOutcome::Honest(SessionOutcome::Accepted)) => true,
        (
            Expectation::WrongPasswordRejected,
            ScenarioOutcome::Honest(SessionOutcome::ServerRejected(
                RejectReason::BadAuthenticator,
            )),
        ) => true,
        (Expectation::AttackSucceeds, ScenarioOutcome::Attack(v)) => v.succeeded,
        (Expectation::AttackFails, ScenarioOutcome::Attack(v)) => !v.succeeded,
        _ => false,
    }
}

fn verdict_text(outcome: &ScenarioOutcome, matched: bool) -> String {
    let mut text = match outcome {
        ScenarioOutcome::Honest(SessionOutcome::Accepted) => "outcome=session-accepted".to_string(),
        ScenarioOutcome::Honest(SessionOutcome::ServerRejected(reason)) => {
            format!("outcome=server-rejected reason={reason:?}")
        }
        ScenarioOutcome::Honest(SessionOutcome::UserRejected(reason)) => {
            format!("outcome=user-rejected reason={reason:?}")
        }
        ScenarioOutcome::Attack(v) if v.succeeded => "outcome=attack-succeeded".to_string(),
        ScenarioOutcome::Attack(_) => "outcome=attack-failed".to_string(),
    };
    if let ScenarioOutcome::Attack(v) = outcome {
        if let Some(pw) = &v.recovered_password {
            text.push_str(&format!(" recovered={pw}"));
        }
    }
    text.push_str(&format!(" match={matched}"));
    text
}

/// One event per line (`seq at kind payload`), terminated by a summary line
/// carrying the scenario parameters and the verdict.
pub fn render_transcript(t: &Transcript, out: &mut impl io::Write) -> io::Result<()> {
    for e in t.events() {
        writeln!(out, "{} {} {} {}", e.seq, e.at, e.kind, e.payload)?;
    }
    writeln!(out, "{}", summary_line(t))
}

/// The transcript's final line: scenario parameters plus the verdict.
pub fn summary_line(t: &Transcript) -> String {
    let m = t.meta();
    let mut line = format!(
        "summary scenario={} scheme={} width={} delta={} seed={}",
        m.scenario,
        m.scheme,
        m.width.bits(),
        m.delta,
        m.seed
    );
    if let Some(verdict) = t.verdict() {
        line.push(' ');
        line.push_str(verdict);
    }
    line
}

struct Victim {
    id: Identity,
    pw: Password,
    card: Card,
    record: Option<RegistrationRecord>,
}

/// A fixed victim identity that fits the width's identity budget.
fn victim_identity(width: Width) -> Identity {
    if width.max_identity_len() >= 5 {
        Identity::from("alice")
    } else {
        Identity::from("u0")
    }
}

/// Random lowercase-alphanumeric password sized to the width.
fn random_password(rng: &mut ChaCha20Rng, width: Width) -> Password {
    const CHARSET: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789";
    let max_len = width.max_password_len().min(12);
    let len = rng.random_range(4..=max_len);
    Password::new(
        (0..len)
            .map(|_| CHARSET[rng.random_range(0..CHARSET.len())])
            .collect::<Vec<u8>>(),
    )
}

/// Changes the last character so the result is always a different, equally
/// legal password.
fn perturb(pw: &Password) -> Password {
    let mut bytes = pw.as_bytes().to_vec();
    let last = bytes.last_mut().expect("passwords are nonempty");
    *last = if *last == b'a' { b'b' } else { b'a' };
    Password::new(bytes)
}

fn register_victim(
    world: &mut World,
    rng: &mut ChaCha20Rng,
    pw: Password,
) -> Result<Victim, ScenarioError> {
    let width = world.server.width();
    let id = victim_identity(width);
    let b = random_word(rng, width);
    let (card, record) = match world.scheme {
        SchemeKind::KuChen => (
            Card::KuChen(kuchen::register(&mut world.server, &id, &pw, b)?),
            None,
        ),
        SchemeKind::Yoon => {
            let (card, record) = yoon::register(&mut world.server, &id, &pw, b)?;
            (Card::Yoon(card), Some(record))
        }
    };
    Ok(Victim {
        id,
        pw,
        card,
        record,
    })
}

fn honest_login(
    world: &mut World,
    rng: &mut ChaCha20Rng,
) -> Result<ScenarioOutcome, ScenarioError> {
    let pw = random_password(rng, world.server.width());
    let victim = register_victim(world, rng, pw)?;
    let outcome = world.run_honest_session(&victim.card, &victim.pw, &victim.id)?;
    Ok(ScenarioOutcome::Honest(outcome))
}

fn wrong_password(
    world: &mut World,
    rng: &mut ChaCha20Rng,
) -> Result<ScenarioOutcome, ScenarioError> {
    let pw = random_password(rng, world.server.width());
    let victim = register_victim(world, rng, pw)?;
    let wrong = perturb(&victim.pw);
    let outcome = world.run_honest_session(&victim.card, &wrong, &victim.id)?;
    Ok(ScenarioOutcome::Honest(outcome))
}

fn password_change_honest(
    world: &mut World,
    rng: &mut ChaCha20Rng,
) -> Result<ScenarioOutcome, ScenarioError> {
    let pw = random_password(rng, world.server.width());
    let mut victim = register_victim(world, rng, pw)?;
    let pw_new = random_password(rng, world.server.width());
    let at = world.now();
    match &mut victim.card {
        Card::KuChen(card) => {
            kuchen::change_password(card, &victim.pw, &pw_new)?;
            world
                .transcript
                .record(at, EventKind::CardChanged, "path=unchecked".to_string());
        }
        Card::Yoon(card) => match yoon::change_password_keyed(card, &victim.pw, &pw_new)? {
            ChangeOutcome::Changed => {
                world
                    .transcript
                    .record(at, EventKind::CardChanged, "path=keyed".to_string());
            }
            ChangeOutcome::Rejected => {
                world
                    .transcript
                    .record(at, EventKind::CardRejected, "path=keyed".to_string());
            }
        },
    }
    world.advance(1);
    let outcome = world.run_honest_session(&victim.card, &pw_new, &victim.id)?;
    Ok(ScenarioOutcome::Honest(outcome))
}

fn parallel_session(
    world: &mut World,
    rng: &mut ChaCha20Rng,
    inject_delay: u64,
) -> Result<ScenarioOutcome, ScenarioError> {
    let pw = random_password(rng, world.server.width());
    let victim = register_victim(world, rng, pw)?;

    // Honest session up to the server's reply going out on the wire.
    let t_u = world.now();
    let (req, session) = victim.card.login(&victim.pw, &victim.id, t_u)?;
    world.send_login(req);
    world.advance(world.latency);
    if let ServerVerdict::Reject(_) = world.deliver_to_server() {
        // No reply to replay; the attack cannot even be mounted.
        let seq = world.transcript.next_seq() - 1;
        return Ok(ScenarioOutcome::Attack(AttackVerdict {
            succeeded: false,
            evidence: vec![seq],
            recovered_password: None,
        }));
    }

    // The adversary taps the wire, waits, and injects the fabrication.
    let observed = world.observe()?;
    let resp = observed
        .iter()
        .find_map(|m| match m {
            Message::Auth(resp) => Some(resp.clone()),
            _ => None,
        })
        .expect("the server's reply crossed the channel");
    world.advance(inject_delay);
    let verdict = attacks::parallel_session(world, &resp, &victim.id)?;

    // The original reply still reaches the user.
    world.advance(world.latency);
    world.deliver_to_user(&session);
    Ok(ScenarioOutcome::Attack(verdict))
}

/// Body shared by `attack-kuchen-pwchange` and `defense-yoon-keyed-change`:
/// the same stolen-card move against whichever card the scheme issued.
fn pwchange_with_guess(
    world: &mut World,
    rng: &mut ChaCha20Rng,
) -> Result<ScenarioOutcome, ScenarioError> {
    let width = world.server.width();
    let pw = random_password(rng, width);
    let mut victim = register_victim(world, rng, pw)?;
    let guess = loop {
        let g = random_password(rng, width);
        if g != victim.pw {
            break g;
        }
    };
    let new_pw = random_password(rng, width);
    let verdict = attacks::stolen_card_pwchange(
        world,
        &mut victim.card,
        &guess,
        &new_pw,
        &victim.id,
        &victim.pw,
    )?;
    Ok(ScenarioOutcome::Attack(verdict))
}

/// Shared setup for the guessing scenarios: victim registered with a
/// password drawn from the dictionary, one observed login, secrets pulled
/// off the card, and the dictionary scan.
fn guess_setup(
    world: &mut World,
    rng: &mut ChaCha20Rng,
    dictionary: &[Password],
) -> Result<(Victim, AttackVerdict), ScenarioError> {
    let pw = dictionary[rng.random_range(0..dictionary.len())].clone();
    let victim = register_victim(world, rng, pw)?;
    world.run_honest_session(&victim.card, &victim.pw, &victim.id)?;

    let observed = world.observe()?;
    let observed_login = observed
        .iter()
        .find_map(|m| match m {
            Message::Login(req) => Some(req.clone()),
            _ => None,
        })
        .expect("the victim's login crossed the channel");

    let at = world.now();
    let secrets = extract_card_secrets(&victim.card, &mut world.transcript, at)?;
    let verdict = attacks::guess_password(
        &secrets,
        &observed_login,
        dictionary,
        &mut world.transcript,
        at,
    );
    Ok((victim, verdict))
}

fn yoon_guess(
    world: &mut World,
    rng: &mut ChaCha20Rng,
    dictionary: &[Password],
) -> Result<ScenarioOutcome, ScenarioError> {
    let (_, verdict) = guess_setup(world, rng, dictionary)?;
    Ok(ScenarioOutcome::Attack(verdict))
}

fn yoon_takeover(
    world: &mut World,
    rng: &mut ChaCha20Rng,
    dictionary: &[Password],
) -> Result<ScenarioOutcome, ScenarioError> {
    let (victim, guess_verdict) = guess_setup(world, rng, dictionary)?;
    let Some(recovered) = guess_verdict.recovered_password else {
        return Ok(ScenarioOutcome::Attack(guess_verdict));
    };
    let Card::Yoon(mut card) = victim.card else {
        unreachable!("the scenario is pinned to the yoon scheme");
    };
    let new_pw = random_password(rng, world.server.width());
    world.advance(1);
    let verdict = attacks::takeover(world, &mut card, &recovered, &new_pw, &victim.id)?;
    Ok(ScenarioOutcome::Attack(AttackVerdict {
        recovered_password: Some(recovered),
        ..verdict
    }))
}

fn yoon_insider(
    world: &mut World,
    rng: &mut ChaCha20Rng,
) -> Result<ScenarioOutcome, ScenarioError> {
    let width = world.server.width();
    let pw = random_password(rng, width);
    let victim = register_victim(world, rng, pw)?;
    let record = victim
        .record
        .expect("yoon registration yields an insider record");
    let Card::Yoon(mut card) = victim.card else {
        unreachable!("the scenario is pinned to the yoon scheme");
    };
    let new_digest = random_word(rng, width);
    let verdict =
        attacks::insider_pwchange(world, &record, &mut card, &new_digest, &victim.pw)?;
    Ok(ScenarioOutcome::Attack(verdict))
}
