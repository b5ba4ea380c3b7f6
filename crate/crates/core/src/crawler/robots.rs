//! robots.txt disallow rules and crawl-delay.

use std::time::Duration;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RobotsRules {
    disallow: Vec<String>,
    crawl_delay: Option<Duration>,
}

#[derive(Default)]
struct Group {
    agents: Vec<String>,
    disallow: Vec<String>,
    crawl_delay: Option<Duration>,
}

impl RobotsRules {
    /// Permissive rules, used when robots.txt is missing.
    pub fn allow_all() -> Self {
        Self::default()
    }

    /// Parses robots.txt for `user_agent`, falling back to the `*` group.
    pub fn parse(text: &str, user_agent: &str) -> Self {
        let token = user_agent
            .split(['/', ' '])
            .next()
            .unwrap_or("")
            .to_ascii_lowercase();
        let mut groups: Vec<Group> = Vec::new();
        let mut in_agent_lines = false;
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            let Some((key, value)) = line.split_once(':') else {
                continue;
            };
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim();
            match key.as_str() {
                "user-agent" => {
                    if !in_agent_lines {
                        groups.push(Group::default());
                    }
                    in_agent_lines = true;
                    if let Some(g) = groups.last_mut() {
                        g.agents.push(value.to_ascii_lowercase());
                    }
                }
                "disallow" | "crawl-delay" => {
                    in_agent_lines = false;
                    let Some(g) = groups.last_mut() else { continue };
                    if key == "disallow" {
                        if !value.is_empty() {
                            g.disallow.push(value.to_owned());
                        }
                    } else if let Ok(secs) = value.parse::<f64>() {
                        if secs.is_finite() && secs >= 0.0 {
                            g.crawl_delay = Some(Duration::from_secs_f64(secs));
                        }
                    }
                }
                _ => in_agent_lines = false,
            }
        }
        let specific = groups
            .iter()
            .position(|g| !token.is_empty() && g.agents.iter().any(|a| a != "*" && token.contains(a.as_str())));
        let chosen = specific.or_else(|| groups.iter().position(|g| g.agents.iter().any(|a| a == "*")));
        match chosen {
            Some(i) => {
                let g = groups.swap_remove(i);
                RobotsRules { disallow: g.disallow, crawl_delay: g.crawl_delay }
            }
            None => RobotsRules::allow_all(),
        }
    }

    pub fn crawl_delay(&self) -> Option<Duration> {
        self.crawl_delay
    }

    /// `path` is the URL path plus query, e.g. `/a/b?x=1`.
    pub fn is_allowed(&self, path: &str) -> bool {
        !self.disallow.iter().any(|p| pattern_matches(p, path))
    }
}

/// Prefix match with `*` wildcards and an optional trailing `$` anchor.
fn pattern_matches(pattern: &str, path: &str) -> bool {
    let (pattern, anchored) = match pattern.strip_suffix('$') {
        Some(p) => (p, true),
        None => (pattern, false),
    };
    let parts: Vec<&str> = pattern.split('*').collect();
    let Some(rest) = path.strip_prefix(parts[0]) else {
        return false;
    };
    if parts.len() == 1 {
        return !anchored || rest.is_empty();
    }
    let mut pos = 0;
    let last = parts.len() - 1;
    for (i, part) in parts.iter().enumerate().skip(1) {
        if i == last && anchored {
            return rest[pos..].ends_with(part) && rest.len() - part.len() >= pos;
        }
        match rest[pos..].find(part) {
            Some(off) => pos += off + part.len(),
            None => return false,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROBOTS: &str = "\
# comment
User-agent: paramine
Disallow: /only-for-us/

User-agent: *
Disallow: /private/
Disallow: /*.pdf$
Crawl-delay: 2.5

User-agent: other
Disallow: /
";

    #[test]
    fn wildcard_group() {
        let r = RobotsRules::parse(ROBOTS, "somebot/1.0");
        assert!(!r.is_allowed("/private/x.html"));
        assert!(r.is_allowed("/public/x.html"));
        assert!(!r.is_allowed("/docs/a.pdf"));
        assert!(r.is_allowed("/docs/a.pdf?x"));
        assert_eq!(r.crawl_delay(), Some(Duration::from_millis(2500)));
    }

    #[test]
    fn specific_group_wins() {
        let r = RobotsRules::parse(ROBOTS, "paramine/0.1 (+http://x)");
        assert!(!r.is_allowed("/only-for-us/a"));
        assert!(r.is_allowed("/private/a"));
        assert_eq!(r.crawl_delay(), None);
    }

    #[test]
    fn empty_and_missing() {
        assert!(RobotsRules::parse("", "x").is_allowed("/"));
        assert!(RobotsRules::parse("User-agent: *\nDisallow:\n", "x").is_allowed("/a"));
        assert!(!RobotsRules::parse("User-agent: *\nDisallow: /\n", "x").is_allowed("/a"));
    }

    #[test]
    fn patterns() {
        assert!(pattern_matches("/a*c", "/abbbc/d"));
        assert!(!pattern_matches("/a*c$", "/abbbc/d"));
        assert!(pattern_matches("/a*c$", "/abbbc"));
        assert!(pattern_matches("/x$", "/x"));
        assert!(!pattern_matches("/x$", "/xy"));
    }
}
