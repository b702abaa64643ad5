//! Shared generators and the independent brute-force oracle used by the
//! acceptance suite. The oracle recomputes the guessing check for every
//! candidate through its own code path and cross-checks it against the
//! algebraic identity available when the card's verifier word is known.

use cardlab::attacks::BreachedSecrets;
use cardlab::kuchen::LoginRequest;
use cardlab::words::{
    encode_password, encode_timestamp, one_way, Identity, Password, Width,
};
use rand::Rng;
use rand_chacha::ChaCha20Rng;

pub const CHARSET: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789";

pub fn random_identity(rng: &mut ChaCha20Rng, width: Width) -> Identity {
    let max = width.max_identity_len().min(8);
    let len = rng.random_range(1..=max);
    Identity::new(
        (0..len)
            .map(|_| CHARSET[rng.random_range(0..CHARSET.len())])
            .collect::<Vec<u8>>(),
    )
}

pub fn random_password_sized(rng: &mut ChaCha20Rng, min_len: usize, max_len: usize) -> Password {
    let len = rng.random_range(min_len..=max_len);
    Password::new(
        (0..len)
            .map(|_| CHARSET[rng.random_range(0..CHARSET.len())])
            .collect::<Vec<u8>>(),
    )
}

pub fn random_password(rng: &mut ChaCha20Rng, width: Width) -> Password {
    random_password_sized(rng, 4, width.max_password_len().min(12))
}

/// A different, equally legal password: the last character is flipped.
pub fn perturb(pw: &Password) -> Password {
    let mut bytes = pw.as_bytes().to_vec();
    let last = bytes.last_mut().expect("passwords are nonempty");
    *last = if *last == b'a' { b'b' } else { b'a' };
    Password::new(bytes)
}

/// Brute-force oracle: indices of every dictionary candidate that satisfies
/// the guessing check against the observed request, computed independently
/// of the attack implementation.
///
/// When the breached secrets include the verifier word, each candidate is
/// also checked through the algebraic route `f(b ^ PW*) == V ^ R`, and the
/// two routes must agree.
pub fn oracle_matches(
    secrets: &BreachedSecrets,
    observed: &LoginRequest,
    dictionary: &[Password],
) -> Vec<usize> {
    let width = Width::new(secrets.r.width_bits()).expect("breached words carry a valid width");
    let t_word = encode_timestamp(observed.t_u, width);
    let algebraic_target = secrets
        .v
        .as_ref()
        .map(|v| v.xor(&secrets.r).expect("breached words share one width"));

    let mut matches = Vec::new();
    for (idx, candidate) in dictionary.iter().enumerate() {
        let Ok(pw_word) = encode_password(candidate, width) else {
            continue;
        };
        let salted = one_way(&secrets.b.xor(&pw_word).unwrap());
        let c1 = secrets.r.xor(&salted).unwrap();
        let c2 = one_way(&c1.xor(&t_word).unwrap());
        let paper_route = c2 == observed.c2;
        if let Some(target) = &algebraic_target {
            let algebraic_route = &salted == target;
            assert_eq!(
                paper_route, algebraic_route,
                "oracle routes disagree on candidate {idx}"
            );
        }
        if paper_route {
            matches.push(idx);
        }
    }
    matches
}
