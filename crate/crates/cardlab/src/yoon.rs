//! The revised card scheme: login and server verification are identical to
//! the baseline, but registration stores a second secret `V = f(EID ^ x)` on
//! the card and the password change phase checks the old password against it
//! before rewriting `R`.
//!
//! Two change entry points model two terminals: [`change_password_keyed`]
//! hashes a typed password the way an honest reader does, while
//! [`change_password_raw`] feeds digests straight to the card, the move
//! available to anyone who already holds `f(b ^ PW)` — such as an insider
//! who observed it during registration.

use crate::kuchen::{
    self, enroll, login_with, AuthResponse, LoginRequest, ServerState, ServerVerdict, UserSession,
    UserVerdict,
};
use crate::words::{
    encode_password, one_way, Identity, Password, RegCounter, Timestamp, Width, Word, WordError,
};

/// Card state for the revised scheme: the verifier `V`, the derived secret
/// `R`, and the user's random `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmartCardYoon {
    v: Word,
    r: Word,
    b: Word,
    pub readable: bool,
}

impl SmartCardYoon {
    pub fn v(&self) -> &Word {
        &self.v
    }

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

/// Everything an insider at the server observes while a user registers:
/// the identity, the submitted digest `PW_S = f(b ^ PW)`, and the derived
/// secrets. The honest server state retains none of this.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegistrationRecord {
    pub id: Identity,
    pub pw_s: Word,
    pub v: Word,
    pub r: Word,
    pub n: RegCounter,
}

/// Outcome of a password change request.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChangeOutcome {
    Changed,
    Rejected,
}

/// Registers `id` and issues a card carrying both `V` and `R`. Also returns
/// the registration record an insider would walk away with.
pub fn register(
    server: &mut ServerState,
    id: &Identity,
    pw: &Password,
    b: Word,
) -> Result<(SmartCardYoon, RegistrationRecord), WordError> {
    let e = enroll(server, id, pw, b)?;
    // V = f(EID ^ x) = R ^ PW_S.
    let v = e.r.xor(&e.pw_s)?;
    let record = RegistrationRecord {
        id: id.clone(),
        pw_s: e.pw_s,
        v: v.clone(),
        r: e.r.clone(),
        n: e.n,
    };
    Ok((
        SmartCardYoon {
            v,
            r: e.r,
            b: e.b,
            readable: true,
        },
        record,
    ))
}

/// Same login computation as the baseline scheme; `V` plays no part here.
pub fn login(
    card: &SmartCardYoon,
    pw: &Password,
    id: &Identity,
    t_u: Timestamp,
) -> Result<(LoginRequest, UserSession), WordError> {
    login_with(&card.r, &card.b, card.width(), pw, id, t_u)
}

/// Same verification equation as the baseline scheme.
pub fn verify(server: &mut ServerState, req: &LoginRequest, t_s: Timestamp) -> ServerVerdict {
    kuchen::verify(server, req, t_s)
}

/// Same mutual-authentication check as the baseline scheme.
pub fn user_verify(session: &UserSession, resp: &AuthResponse) -> UserVerdict {
    kuchen::user_verify(session, resp)
}

/// Password change through an honest terminal: the typed old password is
/// hashed, `V* = R ^ f(b ^ PW_old)` is compared against the stored `V`, and
/// only on a match is `R` rewritten for the new password.
pub fn change_password_keyed(
    card: &mut SmartCardYoon,
    pw_old: &Password,
    pw_new: &Password,
) -> Result<ChangeOutcome, WordError> {
    let width = card.width();
    let old_digest = one_way(&card.b.xor(&encode_password(pw_old, width)?)?);
    let new_digest = one_way(&card.b.xor(&encode_password(pw_new, width)?)?);
    change_password_raw(card, &old_digest, &new_digest)
}

/// Password change with caller-supplied digests, bypassing the hash step.
/// Supplying `old_digest = V ^ R` (that is, `PW_S`) always passes the check.
pub fn change_password_raw(
    card: &mut SmartCardYoon,
    old_digest: &Word,
    new_digest: &Word,
) -> Result<ChangeOutcome, WordError> {
    let v_star = card.r.xor(old_digest)?;
    if v_star != card.v {
        return Ok(ChangeOutcome::Rejected);
    }
    card.r = v_star.xor(new_digest)?;
    Ok(ChangeOutcome::Changed)
}
