//! Mechanized attacks against both schemes. Each attack returns an
//! [`AttackVerdict`] whose `evidence` field points at the transcript events
//! that prove what happened, so scenarios and tests can assert on outcomes
//! instead of trusting the attack code's own accounting.
//!
//! The catalogue:
//!
//! - [`parallel_session`]: replays the server's own reply `(C3, T_S)` back
//!   at it as a fresh login request. Works against both schemes.
//! - [`stolen_card_pwchange`]: with brief physical access, changes the
//!   card's password using an arbitrary wrong guess. Succeeds against the
//!   baseline card (no check) and is refused by the revised card.
//! - [`extract_card_secrets`] + [`guess_password`]: pulls `R` and `b` off a
//!   readable card and runs an offline dictionary scan against one observed
//!   login request.
//! - [`takeover`]: uses a recovered password to change the victim's
//!   password through the honest keyed interface.
//! - [`insider_pwchange`]: a registration insider replays the stored
//!   `PW_S = f(b ^ PW)` digest through the raw interface, no password needed.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::kuchen::{self, AuthResponse, LoginRequest};
use crate::simnet::{Card, CapabilityError, EventKind, Transcript, World};
use crate::words::{
    encode_password, encode_timestamp, one_way, Identity, Password, Timestamp, Width, Word,
    WordError,
};
use crate::yoon::{self, ChangeOutcome, RegistrationRecord, SmartCardYoon};

/// What a side-channel adversary reads out of a card.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BreachedSecrets {
    pub r: Word,
    /// Present only for cards of the revised scheme.
    pub v: Option<Word>,
    pub b: Word,
}

/// Outcome of one attack run, backed by transcript evidence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackVerdict {
    pub succeeded: bool,
    /// Sequence numbers of the transcript events supporting the verdict.
    pub evidence: Vec<u64>,
    pub recovered_password: Option<Password>,
}

/// The card refused extraction: its `readable` switch models a
/// tamper-resistant card outside the side-channel assumption.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("card is tamper-resistant; stored secrets cannot be extracted")]
pub struct ExtractionBlocked;

/// Reads the stored secrets off a card, modeling side-channel extraction as
/// an oracle gated on the card's `readable` flag.
pub fn extract_card_secrets(
    card: &Card,
    transcript: &mut Transcript,
    at: Timestamp,
) -> Result<BreachedSecrets, ExtractionBlocked> {
    if !card.readable() {
        return Err(ExtractionBlocked);
    }
    let secrets = match card {
        Card::KuChen(c) => BreachedSecrets {
            r: c.r().clone(),
            v: None,
            b: c.b().clone(),
        },
        Card::Yoon(c) => BreachedSecrets {
            r: c.r().clone(),
            v: Some(c.v().clone()),
            b: c.b().clone(),
        },
    };
    let v_text = match &secrets.v {
        Some(v) => v.to_hex(),
        None => "-".to_string(),
    };
    transcript.record(
        at,
        EventKind::SecretsExtracted,
        format!("r={} b={} v={}", secrets.r, secrets.b, v_text),
    );
    Ok(secrets)
}

/// Replays an observed server reply `(C3, T_S)` as the fabricated login
/// request `(ID, C3, T_S)`. The fabrication passes verification because `C3`
/// satisfies the very equation the server checks; only the freshness window
/// can stop it.
///
/// On acceptance the server's reply to the fabricated session is
/// intercepted and dropped, as the attack prescribes; success is judged
/// solely on the server's accept.
pub fn parallel_session(
    world: &mut World,
    observed: &AuthResponse,
    victim: &Identity,
) -> Result<AttackVerdict, CapabilityError> {
    let fabricated = LoginRequest {
        id: victim.clone(),
        c2: observed.c3.clone(),
        t_u: observed.t_s,
    };
    let start = world.transcript.next_seq();
    let verdict = world.inject_login(fabricated)?;
    let succeeded = verdict.is_accept();
    if succeeded {
        world.drop_newest()?;
    }
    let evidence = evidence_since(
        &world.transcript,
        start,
        &[EventKind::ServerAccept, EventKind::ServerReject],
    );
    Ok(AttackVerdict {
        succeeded,
        evidence,
        recovered_password: None,
    })
}

/// With the card in hand, requests a password change using an arbitrary
/// guess for the old password, then lets the legitimate user try their true
/// password.
///
/// The baseline card applies the change without any check, so the attack
/// always lands and the victim's next login fails. The revised card
/// recomputes the verifier first and refuses, which is exactly the layer
/// this attack cannot cross.
pub fn stolen_card_pwchange(
    world: &mut World,
    card: &mut Card,
    guess: &Password,
    new_pw: &Password,
    victim_id: &Identity,
    true_pw: &Password,
) -> Result<AttackVerdict, WordError> {
    let at = world.now();
    let start = world.transcript.next_seq();
    let changed = match card {
        Card::KuChen(c) => {
            kuchen::change_password(c, guess, new_pw)?;
            world
                .transcript
                .record(at, EventKind::CardChanged, "path=unchecked".to_string());
            true
        }
        Card::Yoon(c) => match yoon::change_password_keyed(c, guess, new_pw)? {
            ChangeOutcome::Changed => {
                world
                    .transcript
                    .record(at, EventKind::CardChanged, "path=keyed".to_string());
                true
            }
            ChangeOutcome::Rejected => {
                world
                    .transcript
                    .record(at, EventKind::CardRejected, "path=keyed".to_string());
                false
            }
        },
    };

    // The legitimate user comes back and keys the true password.
    world.advance(1);
    world.run_honest_session(&*card, true_pw, victim_id)?;

    let evidence = evidence_since(
        &world.transcript,
        start,
        &[
            EventKind::CardChanged,
            EventKind::CardRejected,
            EventKind::ServerAccept,
            EventKind::ServerReject,
        ],
    );
    Ok(AttackVerdict {
        succeeded: changed,
        evidence,
        recovered_password: None,
    })
}

/// Offline dictionary scan using breached card secrets and one intercepted
/// login request: for each candidate, recompute `C1* = R ^ f(b ^ PW*)` and
/// `C2* = f(C1* ^ T_U)` and compare against the observed `C2`. The first
/// candidate that matches, in dictionary order, wins.
pub fn guess_password(
    secrets: &BreachedSecrets,
    observed: &LoginRequest,
    dictionary: &[Password],
    transcript: &mut Transcript,
    at: Timestamp,
) -> AttackVerdict {
    let width = Width::new(secrets.r.width_bits()).expect("breached words carry a valid width");
    let t_word = encode_timestamp(observed.t_u, width);
    for (idx, candidate) in dictionary.iter().enumerate() {
        let Ok(pw_word) = encode_password(candidate, width) else {
            // Unencodable candidates could never have been registered;
            // they count as tested non-matches.
            continue;
        };
        let salted = one_way(
            &secrets
                .b
                .xor(&pw_word)
                .expect("breached words share the card's width"),
        );
        let c1 = secrets
            .r
            .xor(&salted)
            .expect("breached words share the card's width");
        let c2 = one_way(
            &c1.xor(&t_word)
                .expect("breached words share the card's width"),
        );
        if c2 == observed.c2 {
            let seq = transcript.record(
                at,
                EventKind::GuessFound,
                format!(
                    "password={} tested={} of={}",
                    candidate,
                    idx + 1,
                    dictionary.len()
                ),
            );
            return AttackVerdict {
                succeeded: true,
                evidence: vec![seq],
                recovered_password: Some(candidate.clone()),
            };
        }
    }
    let seq = transcript.record(
        at,
        EventKind::GuessExhausted,
        format!("tested={}", dictionary.len()),
    );
    AttackVerdict {
        succeeded: false,
        evidence: vec![seq],
        recovered_password: None,
    }
}

/// With a recovered password, takes over the card through the honest keyed
/// change interface, then demonstrates both halves of the damage: the
/// attacker's new password logs in, the victim's old one no longer does.
pub fn takeover(
    world: &mut World,
    card: &mut SmartCardYoon,
    recovered_pw: &Password,
    new_pw: &Password,
    victim_id: &Identity,
) -> Result<AttackVerdict, WordError> {
    let at = world.now();
    let start = world.transcript.next_seq();
    match yoon::change_password_keyed(card, recovered_pw, new_pw)? {
        ChangeOutcome::Rejected => {
            let seq = world
                .transcript
                .record(at, EventKind::CardRejected, "path=keyed".to_string());
            Ok(AttackVerdict {
                succeeded: false,
                evidence: vec![seq],
                recovered_password: None,
            })
        }
        ChangeOutcome::Changed => {
            world
                .transcript
                .record(at, EventKind::CardChanged, "path=keyed".to_string());

            // The attacker logs in with the password of their choice.
            world.advance(1);
            world.run_honest_session(&*card, new_pw, victim_id)?;
            // The legitimate user's password stopped working.
            world.advance(1);
            world.run_honest_session(&*card, recovered_pw, victim_id)?;

            let evidence = evidence_since(
                &world.transcript,
                start,
                &[
                    EventKind::CardChanged,
                    EventKind::ServerAccept,
                    EventKind::ServerReject,
                ],
            );
            Ok(AttackVerdict {
                succeeded: true,
                evidence,
                recovered_password: None,
            })
        }
    }
}

/// A registration insider holds `PW_S = f(b ^ PW)` from the secure channel.
/// Feeding it through the raw change interface passes the card's verifier
/// check without knowing any password, after which the victim's true
/// password no longer logs in.
pub fn insider_pwchange(
    world: &mut World,
    record: &RegistrationRecord,
    card: &mut SmartCardYoon,
    new_digest: &Word,
    true_pw: &Password,
) -> Result<AttackVerdict, WordError> {
    let at = world.now();
    let start = world.transcript.next_seq();
    match yoon::change_password_raw(card, &record.pw_s, new_digest)? {
        ChangeOutcome::Rejected => {
            let seq = world
                .transcript
                .record(at, EventKind::CardRejected, "path=raw".to_string());
            Ok(AttackVerdict {
                succeeded: false,
                evidence: vec![seq],
                recovered_password: None,
            })
        }
        ChangeOutcome::Changed => {
            world
                .transcript
                .record(at, EventKind::CardChanged, "path=raw".to_string());

            // The legitimate user comes back with the true password.
            world.advance(1);
            world.run_honest_session(&*card, true_pw, &record.id)?;

            let evidence = evidence_since(
                &world.transcript,
                start,
                &[
                    EventKind::CardChanged,
                    EventKind::ServerAccept,
                    EventKind::ServerReject,
                ],
            );
            Ok(AttackVerdict {
                succeeded: true,
                evidence,
                recovered_password: None,
            })
        }
    }
}

/// Sequence numbers of matching events recorded at or after `from`.
fn evidence_since(transcript: &Transcript, from: u64, kinds: &[EventKind]) -> Vec<u64> {
    transcript.events()[from as usize..]
        .iter()
        .filter(|e| kinds.contains(&e.kind))
        .map(|e| e.seq)
        .collect()
}

/// Errors from dictionary files: one UTF-8 password per line.
#[derive(Debug, thiserror::Error)]
pub enum DictionaryError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(
        "{path}:{line}: password must be 1..={max} bytes and must not end in a zero byte, \
         got {len} bytes"
    )]
    IllegalPassword {
        path: String,
        line: usize,
        len: usize,
        max: usize,
    },
}

/// Loads a dictionary: one password per line, rejecting lines that could not
/// be a legal password at the given width, with the offending line number.
pub fn read_dictionary(path: &Path, width: Width) -> Result<Vec<Password>, DictionaryError> {
    let display = path.display().to_string();
    let file = File::open(path).map_err(|source| DictionaryError::Io {
        path: display.clone(),
        source,
    })?;
    let max = width.max_password_len();
    let mut passwords = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| DictionaryError::Io {
            path: display.clone(),
            source,
        })?;
        let bytes = line.as_bytes();
        if bytes.is_empty() || bytes.len() > max || bytes.ends_with(&[0]) {
            return Err(DictionaryError::IllegalPassword {
                path: display,
                line: idx + 1,
                len: bytes.len(),
                max,
            });
        }
        passwords.push(Password::new(bytes.to_vec()));
    }
    Ok(passwords)
}
