//! Canonical news-source identifiers.
//!
//! Every graph node and every labeled outlet is keyed by a [`SourceId`]: a
//! lowercase host name with the scheme, any leading `www.`, the port, and the
//! path/query removed. Subdomains other than `www.` are kept as they are.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical domain of a news outlet, e.g. `newrepublic.com`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SourceId(String);

impl SourceId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for SourceId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl FromStr for SourceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        normalize_domain(s)
    }
}

impl TryFrom<String> for SourceId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        normalize_domain(&s)
    }
}

impl From<SourceId> for String {
    fn from(id: SourceId) -> String {
        id.0
    }
}

fn is_forbidden(c: char) -> bool {
    c.is_whitespace() || c.is_control() || c.is_uppercase() || matches!(c, '/' | '\\' | ':' | '?' | '#' | '@' | ',' | '"')
}

/// Reduce a URL or bare domain to its canonical [`SourceId`].
///
/// ```
/// use biasgraph::normalize_domain;
/// let id = normalize_domain("https://www.NewRepublic.com/article/x").unwrap();
/// assert_eq!(id.as_str(), "newrepublic.com");
/// ```
pub fn normalize_domain(raw: &str) -> Result<SourceId> {
    let lowered = raw.trim().to_lowercase();
    let mut rest = lowered.as_str();

    if let Some(i) = rest.find("://") {
        rest = &rest[i + 3..];
    } else if let Some(stripped) = rest.strip_prefix("//") {
        rest = stripped;
    }
    if let Some(i) = rest.find(['/', '?', '#']) {
        rest = &rest[..i];
    }
    if let Some(i) = rest.rfind('@') {
        rest = &rest[i + 1..];
    }
    if let Some(i) = rest.find(':') {
        rest = &rest[..i];
    }
    rest = rest.trim_end_matches('.');
    while let Some(stripped) = rest.strip_prefix("www.") {
        rest = stripped;
    }

    if rest.is_empty() {
        return Err(Error::EmptyDomain);
    }
    if !rest.contains('.')
        || rest.split('.').any(str::is_empty)
        || rest.chars().any(is_forbidden)
    {
        return Err(Error::MalformedDomain(raw.trim().to_string()));
    }
    Ok(SourceId(rest.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn norm(s: &str) -> String {
        normalize_domain(s).unwrap().0
    }

    #[test]
    fn strips_scheme_www_and_path() {
        assert_eq!(norm("https://www.NewRepublic.com/article/x"), "newrepublic.com");
        assert_eq!(norm("example.org"), "example.org");
        assert_eq!(norm("HTTP://News.Site.co.uk:8080/p?q=1"), "news.site.co.uk");
    }

    #[test]
    fn keeps_non_www_subdomains() {
        assert_eq!(norm("edition.cnn.com"), "edition.cnn.com");
        assert_eq!(norm("  www.www.bbc.co.uk.  "), "bbc.co.uk");
        assert_eq!(norm("//user@host.net:443#frag"), "host.net");
    }

    #[test]
    fn empty_and_malformed() {
        assert!(matches!(normalize_domain("   "), Err(Error::EmptyDomain)));
        assert!(matches!(normalize_domain("https://"), Err(Error::EmptyDomain)));
        assert!(matches!(normalize_domain("https://www./x"), Err(Error::MalformedDomain(_))));
        assert!(matches!(normalize_domain("localhost"), Err(Error::MalformedDomain(_))));
        assert!(matches!(normalize_domain("a..com"), Err(Error::MalformedDomain(_))));
        assert!(matches!(normalize_domain("a b.com"), Err(Error::MalformedDomain(_))));
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent(raw in ".{0,40}") {
            if let Ok(id) = normalize_domain(&raw) {
                let again = normalize_domain(id.as_str()).unwrap();
                prop_assert_eq!(&again, &id);
                let s = id.as_str();
                prop_assert!(s.contains('.'));
                prop_assert!(!s.contains('/'));
                prop_assert!(!s.chars().any(char::is_uppercase));
            }
        }

        #[test]
        fn url_decorations_are_removed(
            host in "[a-z0-9-]{1,10}(\\.[a-z0-9-]{1,8}){1,3}",
            scheme in prop::sample::select(vec!["", "http://", "HTTPS://"]),
            www in any::<bool>(),
            port in prop::option::of(1u16..),
            path in "(/[a-z0-9]{0,6}){0,3}",
        ) {
            prop_assume!(!host.starts_with("www."));
            let mut url = String::from(scheme);
            if www { url.push_str("www."); }
            url.push_str(&host.to_uppercase());
            if let Some(p) = port { url.push_str(&format!(":{p}")); }
            url.push_str(&path);
            prop_assert_eq!(norm(&url), host);
        }
    }
}
