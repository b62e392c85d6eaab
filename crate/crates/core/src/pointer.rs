//! Minimal JSON Pointer construction (RFC 6901 escaping only).

pub fn escape_token(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

pub fn push(base: &str, token: &str) -> String {
    let mut out = String::with_capacity(base.len() + token.len() + 1);
    out.push_str(base);
    out.push('/');
    out.push_str(&escape_token(token));
    out
}

pub fn push_index(base: &str, index: usize) -> String {
    format!("{base}/{index}")
}
