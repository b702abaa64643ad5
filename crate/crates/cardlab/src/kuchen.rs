//! The baseline card scheme: registration, login, server verification with
//! mutual authentication, and a password change phase that never checks the
//! old password.
//!
//! Registration derives the card secret `R = f(EID ^ x) ^ f(b ^ PW)` from the
//! server secret `x`, the extended identity `EID = (ID || n)`, and the user's
//! salted password digest. Login recomputes `C1 = R ^ f(b ^ PW)` and sends
//! `C2 = f(C1 ^ T_U)`; the server accepts when `C2` matches its own
//! recomputation and answers with `C3 = f(f(EID ^ x) ^ T_S)`.
//!
//! The password change phase rewrites `R` unconditionally from whatever old
//! password is typed. That missing check is deliberate and load-bearing: it
//! is the flaw the attack suite demonstrates.

use std::collections::BTreeMap;

use crate::words::{
    encode_eid, encode_password, encode_timestamp, one_way, Identity, Password, RegCounter,
    Timestamp, Width, Word, WordError,
};

/// Card state for the baseline scheme: the derived secret `R` and the user's
/// random `b`. `readable` models whether a side-channel adversary can pull
/// the stored words off the card.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmartCardKuChen {
    r: Word,
    b: Word,
    pub readable: bool,
}

impl SmartCardKuChen {
    pub fn r(&self) -> &Word {
        &self.r
    }

    pub fn b(&self) -> &Word {
        &self.b
    }

    pub(crate) fn width(&self) -> Width {
        Width::new(self.r.width_bits()).expect("card words carry a valid width")
    }
}

/// Authentication-server state shared by both schemes: the global secret
/// `x`, the per-identity registration counters, and the freshness window.
///
/// The server never stores passwords or password digests.
#[derive(Clone, Debug)]
pub struct ServerState {
    x: Word,
    width: Width,
    accounts: BTreeMap<Identity, RegCounter>,
    freshness_delta: u64,
    last_now: Timestamp,
}

impl ServerState {
    pub fn new(x: Word, freshness_delta: u64) -> Result<ServerState, WordError> {
        let width = Width::new(x.width_bits())?;
        Ok(ServerState {
            x,
            width,
            accounts: BTreeMap::new(),
            freshness_delta,
            last_now: Timestamp(0),
        })
    }

    pub fn width(&self) -> Width {
        self.width
    }

    pub fn freshness_delta(&self) -> u64 {
        self.freshness_delta
    }

    /// Registration counter currently on file for `id`, if any.
    pub fn counter_of(&self, id: &Identity) -> Option<RegCounter> {
        self.accounts.get(id).copied()
    }

    /// Counter the next registration of `id` would receive.
    fn next_counter(&self, id: &Identity) -> RegCounter {
        match self.accounts.get(id) {
            Some(n) => n.next(),
            None => RegCounter::initial(),
        }
    }

    fn commit_registration(&mut self, id: &Identity, n: RegCounter) {
        self.accounts.insert(id.clone(), n);
    }

    pub(crate) fn secret(&self) -> &Word {
        &self.x
    }

    pub(crate) fn note_verification_time(&mut self, t_s: Timestamp) {
        debug_assert!(t_s >= self.last_now, "server clock went backwards");
        self.last_now = t_s;
    }
}

/// The wire message `C = (ID, C2, T_U)`. Fields are public because the
/// adversary fabricates these at will.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoginRequest {
    pub id: Identity,
    pub c2: Word,
    pub t_u: Timestamp,
}

/// The server's mutual-authentication reply `(C3, T_S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuthResponse {
    pub c3: Word,
    pub t_s: Timestamp,
}

/// What the user's terminal retains from a login in order to verify the
/// server's reply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserSession {
    pub c1: Word,
    pub t_u: Timestamp,
}

/// Why the server turned a login request away.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RejectReason {
    UnknownIdentity,
    StaleTimestamp,
    BadAuthenticator,
}

/// Server-side outcome of a login request.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ServerVerdict {
    Accept(AuthResponse),
    Reject(RejectReason),
}

impl ServerVerdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, ServerVerdict::Accept(_))
    }
}

/// Why the user turned the server's reply away.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UserRejectReason {
    ReflectedTimestamp,
    BadAuthenticator,
}

/// User-side outcome of the mutual-authentication check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UserVerdict {
    Accepted,
    Rejected(UserRejectReason),
}

/// Registers `id` (or re-registers it, bumping its counter) and issues a
/// card. The server learns only the salted digest `f(b ^ PW)`, never the
/// password itself.
pub fn register(
    server: &mut ServerState,
    id: &Identity,
    pw: &Password,
    b: Word,
) -> Result<SmartCardKuChen, WordError> {
    let e = enroll(server, id, pw, b)?;
    Ok(SmartCardKuChen {
        r: e.r,
        b: e.b,
        readable: true,
    })
}

/// Everything the registration phase derives, shared by both schemes.
pub(crate) struct Enrollment {
    pub r: Word,
    pub b: Word,
    pub pw_s: Word,
    pub n: RegCounter,
}

/// Shared registration arithmetic: validates the inputs, commits the counter
/// bump, and derives the card secret `R = f(EID ^ x) ^ f(b ^ PW)`.
pub(crate) fn enroll(
    server: &mut ServerState,
    id: &Identity,
    pw: &Password,
    b: Word,
) -> Result<Enrollment, WordError> {
    let width = server.width();
    let n = server.next_counter(id);
    let eid = encode_eid(id, n, width)?;
    let pw_s = one_way(&b.xor(&encode_password(pw, width)?)?);
    let secret = one_way(&eid.xor(server.secret())?);
    server.commit_registration(id, n);
    let r = secret.xor(&pw_s)?;
    Ok(Enrollment { r, b, pw_s, n })
}

/// Computes the login request the card emits when `pw` is keyed in. The card
/// has no way to tell a wrong password apart from the right one; it simply
/// folds whatever was typed into `C1`.
pub fn login(
    card: &SmartCardKuChen,
    pw: &Password,
    id: &Identity,
    t_u: Timestamp,
) -> Result<(LoginRequest, UserSession), WordError> {
    login_with(&card.r, &card.b, card.width(), pw, id, t_u)
}

pub(crate) fn login_with(
    r: &Word,
    b: &Word,
    width: Width,
    pw: &Password,
    id: &Identity,
    t_u: Timestamp,
) -> Result<(LoginRequest, UserSession), WordError> {
    let c1 = r.xor(&one_way(&b.xor(&encode_password(pw, width)?)?))?;
    let c2 = one_way(&c1.xor(&encode_timestamp(t_u, width))?);
    Ok((
        LoginRequest {
            id: id.clone(),
            c2,
            t_u,
        },
        UserSession { c1, t_u },
    ))
}

/// Server-side verification at time `t_s`: identity on file, `T_U` within
/// the freshness window `t_s - delta <= t_u <= t_s`, and `C2` equal to the
/// server's recomputation. Acceptance yields the reply `(C3, T_S)`.
///
/// There is deliberately no replay cache: the server keeps no memory of
/// previously seen `(ID, T_U)` pairs.
pub fn verify(server: &mut ServerState, req: &LoginRequest, t_s: Timestamp) -> ServerVerdict {
    server.note_verification_time(t_s);
    let Some(n) = server.counter_of(&req.id) else {
        return ServerVerdict::Reject(RejectReason::UnknownIdentity);
    };
    if req.t_u > t_s || t_s.0 - req.t_u.0 > server.freshness_delta() {
        return ServerVerdict::Reject(RejectReason::StaleTimestamp);
    }
    let width = server.width();
    let eid = encode_eid(&req.id, n, width).expect("registered identity encodes");
    let secret = one_way(&eid.xor(server.secret()).expect("server words share one width"));
    let expected_c2 = one_way(
        &secret
            .xor(&encode_timestamp(req.t_u, width))
            .expect("server words share one width"),
    );
    if req.c2 != expected_c2 {
        return ServerVerdict::Reject(RejectReason::BadAuthenticator);
    }
    let c3 = one_way(
        &secret
            .xor(&encode_timestamp(t_s, width))
            .expect("server words share one width"),
    );
    ServerVerdict::Accept(AuthResponse { c3, t_s })
}

/// User-side verification of the server's reply: a reply whose timestamp
/// merely echoes `T_U` is rejected outright, otherwise `C3` must equal
/// `f(C1 ^ T_S)`.
pub fn user_verify(session: &UserSession, resp: &AuthResponse) -> UserVerdict {
    if resp.t_s == session.t_u {
        return UserVerdict::Rejected(UserRejectReason::ReflectedTimestamp);
    }
    let width = Width::new(session.c1.width_bits()).expect("session words carry a valid width");
    let expected = one_way(
        &session
            .c1
            .xor(&encode_timestamp(resp.t_s, width))
            .expect("session words share one width"),
    );
    if resp.c3 == expected {
        UserVerdict::Accepted
    } else {
        UserVerdict::Rejected(UserRejectReason::BadAuthenticator)
    }
}

/// Card-local password change. Whatever is typed as the old password is
/// folded out of `R` and the new password folded in, with no check at any
/// point; keying a wrong old password silently corrupts the card.
pub fn change_password(
    card: &mut SmartCardKuChen,
    pw_old: &Password,
    pw_new: &Password,
) -> Result<(), WordError> {
    let width = card.width();
    let old_digest = one_way(&card.b.xor(&encode_password(pw_old, width)?)?);
    let new_digest = one_way(&card.b.xor(&encode_password(pw_new, width)?)?);
    card.r = card.r.xor(&old_digest)?.xor(&new_digest)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::random_word;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn fresh_server(rng: &mut ChaCha20Rng, width: Width) -> ServerState {
        ServerState::new(random_word(rng, width), 60).unwrap()
    }

    /// Recomputes `f(EID ^ x)` straight from the formula for comparison
    /// against card state.
    fn expected_secret(server: &ServerState, id: &Identity, n: u32) -> Word {
        let eid = encode_eid(id, RegCounter(n), server.width()).unwrap();
        one_way(&eid.xor(server.secret()).unwrap())
    }

    #[test]
    fn first_registration_creates_account_and_satisfies_card_identity() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let mut server = fresh_server(&mut rng, Width::W256);
        let id = Identity::from("alice");
        let pw = Password::from("hunter2");
        let b = random_word(&mut rng, Width::W256);
        let card = register(&mut server, &id, &pw, b.clone()).unwrap();

        assert_eq!(server.counter_of(&id), Some(RegCounter(0)));
        let pw_s = one_way(
            &b.xor(&encode_password(&pw, Width::W256).unwrap())
                .unwrap(),
        );
        assert_eq!(
            card.r().xor(&pw_s).unwrap(),
            expected_secret(&server, &id, 0)
        );
    }

    #[test]
    fn re_registration_bumps_counter_and_changes_r() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let mut server = fresh_server(&mut rng, Width::W256);
        let id = Identity::from("alice");
        let pw = Password::from("hunter2");
        let b = random_word(&mut rng, Width::W256);

        let card0 = register(&mut server, &id, &pw, b.clone()).unwrap();
        let card1 = register(&mut server, &id, &pw, b).unwrap();
        assert_eq!(server.counter_of(&id), Some(RegCounter(1)));
        assert_ne!(card0.r(), card1.r());

        let pw_s = one_way(
            &card1
                .b()
                .xor(&encode_password(&pw, Width::W256).unwrap())
                .unwrap(),
        );
        assert_eq!(
            card1.r().xor(&pw_s).unwrap(),
            expected_secret(&server, &id, 1)
        );
    }

    #[test]
    fn distinct_identities_get_distinct_cards() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let mut server = fresh_server(&mut rng, Width::W256);
        let pw = Password::from("shared");
        let b = random_word(&mut rng, Width::W256);
        let a = register(&mut server, &Identity::from("alice"), &pw, b.clone()).unwrap();
        let c = register(&mut server, &Identity::from("carol"), &pw, b).unwrap();
        assert_ne!(a.r(), c.r());
    }

    #[test]
    fn correct_password_completes_mutual_auth() {
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let mut server = fresh_server(&mut rng, Width::W256);
        let id = Identity::from("alice");
        let pw = Password::from("hunter2");
        let b = random_word(&mut rng, Width::W256);
        let card = register(&mut server, &id, &pw, b).unwrap();

        let (req, session) = login(&card, &pw, &id, Timestamp(5)).unwrap();
        let ServerVerdict::Accept(resp) = verify(&mut server, &req, Timestamp(6)) else {
            panic!("honest request rejected");
        };
        assert_eq!(user_verify(&session, &resp), UserVerdict::Accepted);
    }

    #[test]
    fn wrong_password_is_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(14);
        let mut server = fresh_server(&mut rng, Width::W256);
        let id = Identity::from("alice");
        let b = random_word(&mut rng, Width::W256);
        let card = register(&mut server, &id, &Password::from("hunter2"), b).unwrap();

        let (req, _) = login(&card, &Password::from("hunter3"), &id, Timestamp(5)).unwrap();
        assert_eq!(
            verify(&mut server, &req, Timestamp(6)),
            ServerVerdict::Reject(RejectReason::BadAuthenticator)
        );
    }

    #[test]
    fn login_is_deterministic() {
        let mut rng = ChaCha20Rng::seed_from_u64(15);
        let mut server = fresh_server(&mut rng, Width::W256);
        let id = Identity::from("alice");
        let pw = Password::from("hunter2");
        let b = random_word(&mut rng, Width::W256);
        let card = register(&mut server, &id, &pw, b).unwrap();

        let first = login(&card, &pw, &id, Timestamp(9)).unwrap();
        let second = login(&card, &pw, &id, Timestamp(9)).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn unknown_identity_is_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(16);
        let mut server = fresh_server(&mut rng, Width::W256);
        let req = LoginRequest {
            id: Identity::from("nobody"),
            c2: random_word(&mut rng, Width::W256),
            t_u: Timestamp(1),
        };
        assert_eq!(
            verify(&mut server, &req, Timestamp(1)),
            ServerVerdict::Reject(RejectReason::UnknownIdentity)
        );
    }

    #[test]
    fn freshness_window_is_enforced() {
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        let mut server = fresh_server(&mut rng, Width::W256);
        let id = Identity::from("alice");
        let pw = Password::from("hunter2");
        let b = random_word(&mut rng, Width::W256);
        let card = register(&mut server, &id, &pw, b).unwrap();

        // Exactly at the window edge: accepted.
        let (req, _) = login(&card, &pw, &id, Timestamp(10)).unwrap();
        assert!(verify(&mut server, &req, Timestamp(70)).is_accept());

        // One past the window: stale.
        let (req, _) = login(&card, &pw, &id, Timestamp(10)).unwrap();
        assert_eq!(
            verify(&mut server, &req, Timestamp(71)),
            ServerVerdict::Reject(RejectReason::StaleTimestamp)
        );

        // From the future: stale.
        let (req, _) = login(&card, &pw, &id, Timestamp(80)).unwrap();
        assert_eq!(
            verify(&mut server, &req, Timestamp(79)),
            ServerVerdict::Reject(RejectReason::StaleTimestamp)
        );
    }

    #[test]
    fn replayed_response_passes_verification_as_fresh_login() {
        // The server's own reply (C3, T_S) satisfies the verification
        // equation when fed back as (ID, C3, T_S) within the window.
        let mut rng = ChaCha20Rng::seed_from_u64(18);
        let mut server = fresh_server(&mut rng, Width::W256);
        let id = Identity::from("alice");
        let pw = Password::from("hunter2");
        let b = random_word(&mut rng, Width::W256);
        let card = register(&mut server, &id, &pw, b).unwrap();

        let (req, _) = login(&card, &pw, &id, Timestamp(5)).unwrap();
        let ServerVerdict::Accept(resp) = verify(&mut server, &req, Timestamp(6)) else {
            panic!("honest request rejected");
        };

        let fabricated = LoginRequest {
            id: id.clone(),
            c2: resp.c3.clone(),
            t_u: resp.t_s,
        };
        assert!(verify(&mut server, &fabricated, Timestamp(7)).is_accept());
    }

    #[test]
    fn user_rejects_reflection_and_tampering() {
        let mut rng = ChaCha20Rng::seed_from_u64(19);
        let mut server = fresh_server(&mut rng, Width::W256);
        let id = Identity::from("alice");
        let pw = Password::from("hunter2");
        let b = random_word(&mut rng, Width::W256);
        let card = register(&mut server, &id, &pw, b).unwrap();

        let (req, session) = login(&card, &pw, &id, Timestamp(5)).unwrap();

        // Reflection: the request's own authenticator echoed back with
        // T_S = T_U.
        let reflected = AuthResponse {
            c3: req.c2.clone(),
            t_s: req.t_u,
        };
        assert_eq!(
            user_verify(&session, &reflected),
            UserVerdict::Rejected(UserRejectReason::ReflectedTimestamp)
        );

        // Any bit flip in C3 breaks the equality.
        let ServerVerdict::Accept(resp) = verify(&mut server, &req, Timestamp(6)) else {
            panic!("honest request rejected");
        };
        let mut tampered_bytes = resp.c3.as_bytes().to_vec();
        tampered_bytes[0] ^= 0x01;
        let tampered = AuthResponse {
            c3: Word::from_bytes(tampered_bytes),
            t_s: resp.t_s,
        };
        assert_eq!(
            user_verify(&session, &tampered),
            UserVerdict::Rejected(UserRejectReason::BadAuthenticator)
        );
    }

    #[test]
    fn password_change_with_correct_old_password_keeps_card_working() {
        let mut rng = ChaCha20Rng::seed_from_u64(20);
        let mut server = fresh_server(&mut rng, Width::W256);
        let id = Identity::from("alice");
        let pw = Password::from("hunter2");
        let pw_new = Password::from("correct horse");
        let b = random_word(&mut rng, Width::W256);
        let mut card = register(&mut server, &id, &pw, b).unwrap();

        change_password(&mut card, &pw, &pw_new).unwrap();
        let (req, session) = login(&card, &pw_new, &id, Timestamp(5)).unwrap();
        let ServerVerdict::Accept(resp) = verify(&mut server, &req, Timestamp(6)) else {
            panic!("login with new password rejected");
        };
        assert_eq!(user_verify(&session, &resp), UserVerdict::Accepted);
    }

    #[test]
    fn password_change_with_wrong_old_password_bricks_the_card() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let mut server = fresh_server(&mut rng, Width::W256);
        let id = Identity::from("alice");
        let pw = Password::from("hunter2");
        let guess = Password::from("letmein");
        let pw_new = Password::from("attacker-choice");
        let b = random_word(&mut rng, Width::W256);
        let mut card = register(&mut server, &id, &pw, b).unwrap();

        // The card applies the change without any check.
        change_password(&mut card, &guess, &pw_new).unwrap();

        // Every password involved is now useless for honest login.
        for candidate in [&pw, &guess, &pw_new] {
            let (req, _) = login(&card, candidate, &id, Timestamp(5)).unwrap();
            assert_eq!(
                verify(&mut server, &req, Timestamp(6)),
                ServerVerdict::Reject(RejectReason::BadAuthenticator),
                "password {candidate} unexpectedly works"
            );
        }
    }

    #[test]
    fn password_change_to_same_password_is_a_no_op() {
        let mut rng = ChaCha20Rng::seed_from_u64(22);
        let mut server = fresh_server(&mut rng, Width::W256);
        let id = Identity::from("alice");
        let pw = Password::from("hunter2");
        let b = random_word(&mut rng, Width::W256);
        let mut card = register(&mut server, &id, &pw, b).unwrap();

        let before = card.r().clone();
        change_password(&mut card, &pw, &pw).unwrap();
        assert_eq!(card.r(), &before);
    }

    #[test]
    fn card_identity_survives_honest_change_chains() {
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        let mut server = fresh_server(&mut rng, Width::W256);
        let id = Identity::from("alice");
        let b = random_word(&mut rng, Width::W256);
        let passwords: Vec<Password> = (0..6)
            .map(|i| Password::new(format!("pw-{i}")))
            .collect();
        let mut card = register(&mut server, &id, &passwords[0], b).unwrap();

        for pair in passwords.windows(2) {
            change_password(&mut card, &pair[0], &pair[1]).unwrap();
        }
        let current = passwords.last().unwrap();
        let pw_s = one_way(
            &card
                .b()
                .xor(&encode_password(current, Width::W256).unwrap())
                .unwrap(),
        );
        assert_eq!(
            card.r().xor(&pw_s).unwrap(),
            expected_secret(&server, &id, 0)
        );
    }

    #[test]
    fn completeness_over_randomized_instances() {
        // Smoke-scale version of the full acceptance property, at both
        // supported widths.
        let mut rng = ChaCha20Rng::seed_from_u64(24);
        for width in [Width::W64, Width::W256] {
            for i in 0..200u64 {
                let mut server = fresh_server(&mut rng, width);
                // Keep identities within the 4-byte budget of W = 64.
                let id = Identity::new(format!("u{i}"));
                let pw = Password::new(format!("pw{i}"));
                let b = random_word(&mut rng, width);
                let card = register(&mut server, &id, &pw, b).unwrap();

                let t_u = Timestamp(i);
                let (req, session) = login(&card, &pw, &id, t_u).unwrap();
                let ServerVerdict::Accept(resp) = verify(&mut server, &req, Timestamp(i + 1))
                else {
                    panic!("honest request rejected at width {}", width.bits());
                };
                assert_eq!(user_verify(&session, &resp), UserVerdict::Accepted);
            }
        }
    }
}
