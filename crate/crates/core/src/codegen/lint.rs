//! Static whitelist lint for Blender scripts.
//!
//! Works on tokens and logical lines only; nothing is executed. A script
//! passes when it imports only allowed modules, calls only library
//! functions, allowed builtins, allowed module functions or functions it
//! defines itself, keeps every path literal inside the asset root and has a
//! plausible block structure.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::manifest::{FunctionManifest, LIBRARY_MODULE};
use super::pytoken::{tokenize, LogicalLine, Tok, Token};
use super::ScriptText;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FindingKind {
    ForbiddenCall,
    UnlistedCall,
    ForeignImport,
    PathEscape,
    DunderAccess,
    Syntax,
}

impl FindingKind {
    pub fn label(self) -> &'static str {
        match self {
            FindingKind::ForbiddenCall => "forbidden call",
            FindingKind::UnlistedCall => "unlisted call",
            FindingKind::ForeignImport => "foreign import",
            FindingKind::PathEscape => "path escape",
            FindingKind::DunderAccess => "dunder access",
            FindingKind::Syntax => "syntax",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub kind: FindingKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.kind.label(), self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LintReport {
    pub verdict: Verdict,
    pub findings: Vec<Finding>,
}

impl LintReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

impl fmt::Display for LintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict {
            Verdict::Pass => write!(f, "PASS (0 findings)"),
            Verdict::Fail => {
                write!(f, "FAIL ({} findings)", self.findings.len())?;
                for finding in &self.findings {
                    write!(f, "\n  {finding}")?;
                }
                Ok(())
            }
        }
    }
}

/// Builtins a script may call.
const ALLOWED_BUILTINS: &[&str] = &[
    "abs", "bool", "dict", "enumerate", "float", "int", "len", "list", "max", "min", "print", "range",
    "reversed", "round", "sorted", "str", "sum", "tuple", "zip",
];

/// Calls that are rejected outright, wherever they appear.
const FORBIDDEN: &[&str] = &[
    "eval", "exec", "compile", "open", "__import__", "getattr", "setattr", "delattr", "globals", "locals",
    "vars", "input", "breakpoint", "exit", "quit",
];

/// Module prefixes whose every member is forbidden.
const FORBIDDEN_MODULES: &[&str] = &[
    "subprocess", "shutil", "socket", "ctypes", "importlib", "multiprocessing", "urllib", "http", "requests",
    "pickle", "marshal", "sys", "pty", "signal", "threading", "asyncio",
];

const FORBIDDEN_OS: &[&str] = &[
    "system", "popen", "fork", "forkpty", "kill", "killpg", "remove", "unlink", "rmdir", "removedirs",
    "rename", "renames", "replace", "chmod", "chown", "chdir", "putenv", "unsetenv", "makedirs", "mkdir",
    "startfile", "truncate", "symlink", "link",
];

const FORBIDDEN_OS_PREFIXES: &[&str] = &["exec", "spawn", "posix_spawn", "wait"];

const PYTHON_KEYWORDS: &[&str] = &[
    "and", "as", "assert", "async", "await", "break", "class", "continue", "def", "del", "elif", "else",
    "except", "finally", "for", "from", "global", "if", "import", "in", "is", "lambda", "nonlocal", "not",
    "or", "pass", "raise", "return", "try", "while", "with", "yield", "None", "True", "False",
];

const ALLOWED_DUNDERS: &[&str] = &["__name__"];

/// Which modules may be imported and which of their members may be called.
#[derive(Debug, Clone)]
pub struct LintPolicy {
    /// Module name -> callable dotted members (`*` allows all).
    pub modules: BTreeMap<String, Vec<String>>,
}

impl Default for LintPolicy {
    fn default() -> Self {
        let mut modules = BTreeMap::new();
        modules.insert(LIBRARY_MODULE.to_string(), vec!["*".to_string()]);
        modules.insert("math".to_string(), vec!["*".to_string()]);
        modules.insert(
            "os".to_string(),
            ["path.join", "path.basename", "path.dirname", "path.splitext"].map(String::from).to_vec(),
        );
        Self { modules }
    }
}

impl LintPolicy {
    /// `dotted` is a full name such as `os.path.join`.
    fn module_allows(&self, dotted: &str) -> bool {
        self.modules.iter().any(|(module, members)| {
            let Some(rest) = dotted.strip_prefix(module.as_str()) else { return false };
            if rest.is_empty() {
                return false;
            }
            let Some(member) = rest.strip_prefix('.') else { return false };
            members.iter().any(|m| m == "*" || m == member)
        })
    }

    fn module_known(&self, module: &str) -> bool {
        self.modules.contains_key(module)
    }
}

fn forbidden(dotted: &str) -> bool {
    if FORBIDDEN.contains(&dotted) {
        return true;
    }
    let root = dotted.split('.').next().unwrap_or(dotted);
    if FORBIDDEN_MODULES.contains(&root) {
        return true;
    }
    if let Some(member) = dotted.strip_prefix("os.") {
        return FORBIDDEN_OS.contains(&member) || FORBIDDEN_OS_PREFIXES.iter().any(|p| member.starts_with(p));
    }
    false
}

fn path_escapes(s: &str) -> bool {
    let bytes = s.as_bytes();
    let absolute = s.starts_with('/')
        || s.starts_with('\\')
        || s.starts_with('~')
        || (bytes.len() >= 3 && bytes[0].is_ascii_alphabetic() && bytes[1] == b':' && matches!(bytes[2], b'/' | b'\\'));
    absolute || s.split(['/', '\\']).any(|part| part == "..")
}

struct Linter<'a> {
    manifest: &'a FunctionManifest,
    policy: &'a LintPolicy,
    /// Local name -> dotted import target.
    aliases: HashMap<String, String>,
    /// Names bound by `def` or `class`.
    defined: HashSet<String>,
    findings: Vec<Finding>,
}

impl Linter<'_> {
    fn find(&mut self, kind: FindingKind, tok: &Token, message: String) {
        self.findings.push(Finding { kind, line: tok.line, column: tok.column, message });
    }

    fn import(&mut self, line: &LogicalLine) {
        let toks = &line.tokens;
        let name_at = |i: usize| match toks.get(i).map(|t| &t.tok) {
            Some(Tok::Name(n)) => Some(n.clone()),
            _ => None,
        };
        // Reads `a.b.c` starting at i; returns (dotted, next index).
        let dotted_at = |mut i: usize| {
            let mut parts = Vec::new();
            while let Some(n) = name_at(i) {
                parts.push(n);
                if matches!(toks.get(i + 1).map(|t| &t.tok), Some(Tok::Op(o)) if o == ".") {
                    i += 2;
                } else {
                    i += 1;
                    break;
                }
            }
            (parts.join("."), i)
        };
        let is_op = |i: usize, op: &str| matches!(toks.get(i).map(|t| &t.tok), Some(Tok::Op(o)) if o == op);
        let is_name = |i: usize, n: &str| matches!(toks.get(i).map(|t| &t.tok), Some(Tok::Name(x)) if x == n);

        if is_name(0, "import") {
            let mut i = 1;
            loop {
                let (module, next) = dotted_at(i);
                if module.is_empty() {
                    break;
                }
                let root = module.split('.').next().unwrap_or("").to_string();
                if !self.policy.module_known(&module) && !self.policy.module_known(&root) {
                    self.find(FindingKind::ForeignImport, &toks[i], format!("import of unlisted module `{module}`"));
                }
                i = next;
                if is_name(i, "as") {
                    if let Some(alias) = name_at(i + 1) {
                        self.aliases.insert(alias, module);
                    }
                    i += 2;
                } else {
                    self.aliases.insert(root.clone(), root);
                }
                if is_op(i, ",") {
                    i += 1;
                } else {
                    break;
                }
            }
        } else if is_name(0, "from") {
            if is_op(1, ".") {
                self.find(FindingKind::ForeignImport, &toks[1], "relative imports are not allowed".into());
                return;
            }
            let (module, mut i) = dotted_at(1);
            let known = self.policy.module_known(&module);
            if !known {
                self.find(FindingKind::ForeignImport, &toks[1], format!("import of unlisted module `{module}`"));
            }
            if !is_name(i, "import") {
                return;
            }
            i += 1;
            if is_op(i, "(") {
                i += 1;
            }
            loop {
                if is_op(i, "*") {
                    if known && module != LIBRARY_MODULE {
                        self.find(
                            FindingKind::ForeignImport,
                            &toks[i],
                            format!("star import is only allowed from `{LIBRARY_MODULE}`"),
                        );
                    }
                    break;
                }
                let Some(name) = name_at(i) else { break };
                let target = format!("{module}.{name}");
                if known && module != LIBRARY_MODULE && !self.policy.modules[&module].iter().any(|m| {
                    m == "*" || m == &name || m.starts_with(&format!("{name}."))
                }) {
                    let kind = if forbidden(&target) { FindingKind::ForbiddenCall } else { FindingKind::ForeignImport };
                    self.find(kind, &toks[i], format!("`{name}` may not be imported from `{module}`"));
                }
                let mut local = name;
                i += 1;
                if is_name(i, "as") {
                    if let Some(alias) = name_at(i + 1) {
                        local = alias;
                    }
                    i += 2;
                }
                self.aliases.insert(local, target);
                if is_op(i, ",") {
                    i += 1;
                } else {
                    break;
                }
            }
        }
    }

    fn collect_definitions(&mut self, lines: &[LogicalLine]) {
        for line in lines {
            for pair in line.tokens.windows(2) {
                if let (Tok::Name(kw), Tok::Name(name)) = (&pair[0].tok, &pair[1].tok) {
                    if kw == "def" || kw == "class" {
                        self.defined.insert(name.clone());
                    }
                }
            }
        }
    }

    fn calls(&mut self, line: &LogicalLine) {
        let toks = &line.tokens;
        for (i, tok) in toks.iter().enumerate() {
            match &tok.tok {
                Tok::Str(s) if path_escapes(s) => {
                    self.find(FindingKind::PathEscape, tok, format!("path `{s}` escapes the asset root"));
                }
                Tok::Name(n) if n.starts_with("__") && n.ends_with("__") && !ALLOWED_DUNDERS.contains(&n.as_str()) => {
                    self.find(FindingKind::DunderAccess, tok, format!("access to `{n}`"));
                }
                Tok::Op(o) if o == "(" && i > 0 => self.call_at(toks, i),
                _ => {}
            }
        }
    }

    /// `toks[open]` is `(`; decide whether it is a call and check its target.
    fn call_at(&mut self, toks: &[Token], open: usize) {
        let prev = &toks[open - 1];
        match &prev.tok {
            Tok::Name(n) if PYTHON_KEYWORDS.contains(&n.as_str()) => return,
            Tok::Name(_) => {}
            Tok::Op(o) if o == ")" || o == "]" => {
                self.find(FindingKind::UnlistedCall, prev, "call through a computed expression".into());
                return;
            }
            Tok::Str(_) => {
                self.find(FindingKind::UnlistedCall, prev, "call on a string literal".into());
                return;
            }
            _ => return,
        }
        // Walk back over `name(.name)*`.
        let mut start = open - 1;
        while start >= 2
            && matches!(&toks[start - 1].tok, Tok::Op(o) if o == ".")
            && matches!(&toks[start - 2].tok, Tok::Name(_))
        {
            start -= 2;
        }
        if start >= 1 {
            match &toks[start - 1].tok {
                Tok::Name(kw) if kw == "def" || kw == "class" => return,
                Tok::Op(o) if o == "." => {
                    self.find(FindingKind::UnlistedCall, &toks[start], "method call on a computed expression".into());
                    return;
                }
                _ => {}
            }
        }
        let parts: Vec<&str> = toks[start..open]
            .iter()
            .filter_map(|t| match &t.tok {
                Tok::Name(n) => Some(n.as_str()),
                _ => None,
            })
            .collect();
        let raw = parts.join(".");
        let head = parts[0];
        let resolved = match self.aliases.get(head) {
            Some(target) => std::iter::once(target.as_str()).chain(parts[1..].iter().copied()).collect::<Vec<_>>().join("."),
            None => raw.clone(),
        };
        let site = &toks[start];

        if forbidden(&resolved) || forbidden(&raw) {
            self.find(FindingKind::ForbiddenCall, site, format!("forbidden call `{resolved}`"));
            return;
        }
        let allowed = if self.aliases.contains_key(head) {
            let from_library = resolved
                .strip_prefix(LIBRARY_MODULE)
                .and_then(|r| r.strip_prefix('.'))
                .is_some_and(|f| self.manifest.contains(f));
            from_library || self.policy.module_allows(&resolved)
        } else if parts.len() == 1 {
            self.defined.contains(head) || ALLOWED_BUILTINS.contains(&head) || self.manifest.contains(head)
        } else {
            false
        };
        if !allowed {
            self.find(FindingKind::UnlistedCall, site, format!("call to `{resolved}` is not in the whitelist"));
        }
    }

    fn structure(&mut self, lines: &[LogicalLine]) {
        let mut levels = vec![0usize];
        let mut expect_indent: Option<&Token> = None;
        for line in lines {
            let first = &line.tokens[0];
            if let Some(header) = expect_indent.take() {
                if line.indent <= *levels.last().unwrap() {
                    self.find(FindingKind::Syntax, first, format!("expected an indented block after line {}", header.line));
                } else {
                    levels.push(line.indent);
                }
            } else if line.indent > *levels.last().unwrap() {
                self.find(FindingKind::Syntax, first, "unexpected indent".into());
            } else {
                while line.indent < *levels.last().unwrap() {
                    levels.pop();
                }
                if line.indent != *levels.last().unwrap() {
                    self.find(FindingKind::Syntax, first, "dedent does not match any outer indentation level".into());
                    levels.push(line.indent);
                }
            }
            // Last real token before the Newline.
            let n = line.tokens.len();
            let opens_block = n >= 2
                && matches!(&line.tokens[n - 2].tok, Tok::Op(o) if o == ":")
                && matches!(&line.tokens[0].tok, Tok::Name(k) if [
                    "def", "class", "if", "elif", "else", "for", "while", "with", "try", "except", "finally",
                ].contains(&k.as_str()));
            if opens_block {
                expect_indent = Some(first);
            }
        }
        if let Some(header) = expect_indent {
            self.find(FindingKind::Syntax, header, "block has no body".into());
        }
    }
}

/// Lint with the default module policy.
pub fn lint_script(script: &ScriptText, manifest: &FunctionManifest) -> LintReport {
    lint_with_policy(script, manifest, &LintPolicy::default())
}

pub fn lint_with_policy(script: &ScriptText, manifest: &FunctionManifest, policy: &LintPolicy) -> LintReport {
    let tokenized = tokenize(&script.body);
    let mut linter = Linter {
        manifest,
        policy,
        aliases: HashMap::new(),
        defined: HashSet::new(),
        findings: Vec::new(),
    };
    for err in &tokenized.errors {
        linter.findings.push(Finding {
            kind: FindingKind::Syntax,
            line: err.line,
            column: err.column,
            message: err.message.clone(),
        });
    }
    linter.collect_definitions(&tokenized.lines);
    for line in &tokenized.lines {
        linter.import(line);
    }
    for line in &tokenized.lines {
        linter.calls(line);
    }
    linter.structure(&tokenized.lines);
    if script.body.trim().is_empty() {
        linter.findings.push(Finding { kind: FindingKind::Syntax, line: 1, column: 1, message: "script is empty".into() });
    }

    let mut findings = linter.findings;
    findings.sort_by_key(|f| (f.line, f.column, f.kind));
    findings.dedup();
    let verdict = if findings.is_empty() { Verdict::Pass } else { Verdict::Fail };
    LintReport { verdict, findings }
}
