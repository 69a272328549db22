//! Lexer and parser for the `.scene` language.
//!
//! The grammar is deliberately flat:
//!
//! ```text
//! file  := block*
//! block := keyword [name] '{' stmt* '}'
//! stmt  := word value* ';'
//! value := number | word
//! ```
//!
//! `#` and `//` start a comment that runs to the end of the line.

use std::collections::HashMap;

use super::validate::{finalize, Spans};
use super::{
    CameraSpec, FloorSpec, ForceKind, ForceSpec, ObjectSpec, Physics, PinEdge, PrimitiveKind,
    SceneError, SceneErrorKind, SceneSpec, Source, Vec3, WorldConfig, DEFAULT_FPS, DEFAULT_FRAMES,
    DEFAULT_RESOLUTION,
};
use crate::assets::AssetCatalog;

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Word(String),
    Number(String),
    LBrace,
    RBrace,
    Semi,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    line: usize,
    column: usize,
}

impl Token {
    fn describe(&self) -> String {
        match &self.kind {
            TokenKind::Word(w) => format!("`{w}`"),
            TokenKind::Number(n) => format!("number `{n}`"),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::Semi => "`;`".into(),
        }
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> SceneError {
    SceneError::at_text(SceneErrorKind::Syntax, line, column, message)
}

fn lex(source: &str) -> Result<Vec<Token>, SceneError> {
    let mut tokens = Vec::new();
    for (line_idx, line) in source.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, column) = (line_idx + 1, i + 1);
            let push = |tokens: &mut Vec<Token>, kind| tokens.push(Token { kind, line, column });
            match c {
                _ if c.is_whitespace() => i += 1,
                '#' => break,
                '/' if chars.get(i + 1) == Some(&'/') => break,
                '{' => {
                    push(&mut tokens, TokenKind::LBrace);
                    i += 1;
                }
                '}' => {
                    push(&mut tokens, TokenKind::RBrace);
                    i += 1;
                }
                ';' => {
                    push(&mut tokens, TokenKind::Semi);
                    i += 1;
                }
                _ if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len()
                        && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '-')
                    {
                        i += 1;
                    }
                    let word: String = chars[start..i].iter().collect();
                    push(&mut tokens, TokenKind::Word(word));
                }
                _ if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                    let start = i;
                    i = scan_number(&chars, i).ok_or_else(|| {
                        syntax(line, column, format!("malformed number starting with `{c}`"))
                    })?;
                    let text: String = chars[start..i].iter().collect();
                    push(&mut tokens, TokenKind::Number(text));
                }
                _ => return Err(syntax(line, column, format!("unexpected character `{c}`"))),
            }
        }
    }
    Ok(tokens)
}

/// Returns the index one past the number starting at `i`.
fn scan_number(chars: &[char], mut i: usize) -> Option<usize> {
    let digits = |chars: &[char], mut i: usize| {
        let start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        (i, i - start)
    };
    if matches!(chars[i], '-' | '+') {
        i += 1;
    }
    let (after_int, n_int) = digits(chars, i);
    i = after_int;
    let mut n_frac = 0;
    if i < chars.len() && chars[i] == '.' {
        let (after_frac, n) = digits(chars, i + 1);
        i = after_frac;
        n_frac = n;
    }
    if n_int + n_frac == 0 {
        return None;
    }
    if i < chars.len() && matches!(chars[i], 'e' | 'E') {
        let mut j = i + 1;
        if j < chars.len() && matches!(chars[j], '-' | '+') {
            j += 1;
        }
        let (after_exp, n_exp) = digits(chars, j);
        if n_exp == 0 {
            return None;
        }
        i = after_exp;
    }
    // A number glued to a letter (`4m`) is not a number.
    if i < chars.len() && (chars[i].is_ascii_alphabetic() || chars[i] == '_') {
        return None;
    }
    Some(i)
}

/// One `word value* ;` statement.
struct Statement {
    keyword: String,
    values: Vec<Token>,
    line: usize,
    column: usize,
}

impl Statement {
    fn arity(&self, n: usize) -> Result<(), SceneError> {
        if self.values.len() != n {
            let found = self.values.len();
            return Err(syntax(
                self.line,
                self.column,
                format!("`{}` expects {n} value(s), found {found}", self.keyword),
            ));
        }
        Ok(())
    }

    fn number(&self, idx: usize) -> Result<f64, SceneError> {
        let tok = &self.values[idx];
        match &tok.kind {
            TokenKind::Number(text) => text
                .parse::<f64>()
                .map_err(|_| syntax(tok.line, tok.column, format!("invalid number `{text}`"))),
            _ => Err(syntax(tok.line, tok.column, format!("expected a number, found {}", tok.describe()))),
        }
    }

    fn integer(&self, idx: usize) -> Result<u32, SceneError> {
        let tok = &self.values[idx];
        match &tok.kind {
            TokenKind::Number(text) => text.parse::<u32>().map_err(|_| {
                syntax(tok.line, tok.column, format!("expected a non-negative integer, found `{text}`"))
            }),
            _ => Err(syntax(tok.line, tok.column, format!("expected an integer, found {}", tok.describe()))),
        }
    }

    fn word(&self, idx: usize) -> Result<(&str, &Token), SceneError> {
        let tok = &self.values[idx];
        match &tok.kind {
            TokenKind::Word(w) => Ok((w.as_str(), tok)),
            _ => Err(syntax(tok.line, tok.column, format!("expected a word, found {}", tok.describe()))),
        }
    }

    fn single_number(&self) -> Result<f64, SceneError> {
        self.arity(1)?;
        self.number(0)
    }

    fn single_integer(&self) -> Result<u32, SceneError> {
        self.arity(1)?;
        self.integer(0)
    }

    fn vec3(&self) -> Result<Vec3, SceneError> {
        self.arity(3)?;
        Ok([self.number(0)?, self.number(1)?, self.number(2)?])
    }

    fn unknown(&self, block: &str) -> SceneError {
        SceneError::at_text(
            SceneErrorKind::UnknownKeyword,
            self.line,
            self.column,
            format!("unknown keyword `{}` in `{block}` block", self.keyword),
        )
    }
}

struct Block {
    keyword: String,
    name: Option<Token>,
    statements: Vec<Statement>,
    line: usize,
    column: usize,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    /// Position of the end of input, for "unexpected end" errors.
    eof: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        tok
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<Token, SceneError> {
        match self.next() {
            Some(tok) if tok.kind == kind => Ok(tok),
            Some(tok) => Err(syntax(tok.line, tok.column, format!("expected {what}, found {}", tok.describe()))),
            None => Err(syntax(self.eof.0, self.eof.1, format!("expected {what}, found end of input"))),
        }
    }

    fn block(&mut self) -> Result<Block, SceneError> {
        let head = self.next().expect("caller checked for a token");
        let keyword = match &head.kind {
            TokenKind::Word(w) => w.clone(),
            _ => return Err(syntax(head.line, head.column, format!("expected a block keyword, found {}", head.describe()))),
        };
        let name = match self.peek() {
            Some(Token { kind: TokenKind::Word(_), .. }) => self.next(),
            _ => None,
        };
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut statements = Vec::new();
        loop {
            match self.next() {
                Some(Token { kind: TokenKind::RBrace, .. }) => break,
                Some(Token { kind: TokenKind::Word(word), line, column }) => {
                    let mut values = Vec::new();
                    loop {
                        match self.next() {
                            Some(Token { kind: TokenKind::Semi, .. }) => break,
                            Some(tok @ Token { kind: TokenKind::Word(_) | TokenKind::Number(_), .. }) => values.push(tok),
                            Some(tok) => {
                                return Err(syntax(tok.line, tok.column, format!("expected `;`, found {}", tok.describe())))
                            }
                            None => {
                                return Err(syntax(self.eof.0, self.eof.1, "expected `;`, found end of input"))
                            }
                        }
                    }
                    statements.push(Statement { keyword: word, values, line, column });
                }
                Some(tok) => {
                    return Err(syntax(tok.line, tok.column, format!("expected a statement or `}}`, found {}", tok.describe())))
                }
                None => {
                    return Err(syntax(
                        self.eof.0,
                        self.eof.1,
                        format!("unclosed `{keyword}` block opened at {}:{}", head.line, head.column),
                    ))
                }
            }
        }
        Ok(Block { keyword, name, statements, line: head.line, column: head.column })
    }
}

/// Tracks repeated statements inside one block.
struct Seen(HashMap<String, (usize, usize)>);

impl Seen {
    fn new() -> Self {
        Self(HashMap::new())
    }

    fn check(&mut self, stmt: &Statement) -> Result<(), SceneError> {
        if let Some((l, c)) = self.0.insert(stmt.keyword.clone(), (stmt.line, stmt.column)) {
            return Err(SceneError::at_text(
                SceneErrorKind::Invalid,
                stmt.line,
                stmt.column,
                format!("`{}` already set at {l}:{c}", stmt.keyword),
            ));
        }
        Ok(())
    }
}

fn forbid_name(block: &Block) -> Result<(), SceneError> {
    if let Some(tok) = &block.name {
        return Err(syntax(tok.line, tok.column, format!("`{}` block takes no name", block.keyword)));
    }
    Ok(())
}

/// Parse `.scene` text against the builtin asset catalog.
pub fn parse_scene(source: &str) -> Result<SceneSpec, SceneError> {
    parse_scene_with(source, &AssetCatalog::builtin())
}

pub fn parse_scene_with(source: &str, catalog: &AssetCatalog) -> Result<SceneSpec, SceneError> {
    let tokens = lex(source)?;
    let eof = {
        let lines = source.lines().count().max(1);
        let last = source.lines().last().map_or(0, |l| l.chars().count());
        (lines, last + 1)
    };
    let mut parser = Parser { tokens, pos: 0, eof };

    let mut spans = Spans::default();
    let mut scene_block: Option<(usize, usize)> = None;
    let mut name = String::from("untitled");
    let mut frames = DEFAULT_FRAMES;
    let mut fps = DEFAULT_FPS;
    let mut resolution = DEFAULT_RESOLUTION;
    let mut world = WorldConfig::default();
    let mut camera: Option<(CameraSpec, usize, usize)> = None;
    let mut floor: Option<FloorSpec> = None;
    let mut objects: Vec<ObjectSpec> = Vec::new();
    let mut forces: Vec<ForceSpec> = Vec::new();
    let mut object_sites: HashMap<String, (usize, usize)> = HashMap::new();

    while parser.peek().is_some() {
        let block = parser.block()?;
        let (bl, bc) = (block.line, block.column);
        let mut seen = Seen::new();
        match block.keyword.as_str() {
            "scene" => {
                if let Some((l, c)) = scene_block {
                    return Err(SceneError::at_text(
                        SceneErrorKind::Invalid,
                        bl,
                        bc,
                        format!("duplicate scene block (first at {l}:{c})"),
                    ));
                }
                scene_block = Some((bl, bc));
                if let Some(tok) = &block.name {
                    if let TokenKind::Word(w) = &tok.kind {
                        name = w.clone();
                        spans.insert("name", tok.line, tok.column);
                    }
                }
                for stmt in &block.statements {
                    seen.check(stmt)?;
                    match stmt.keyword.as_str() {
                        "frames" => {
                            frames = stmt.single_integer()?;
                            spans.insert("frames", stmt.line, stmt.column);
                        }
                        "fps" => {
                            fps = stmt.single_integer()?;
                            spans.insert("fps", stmt.line, stmt.column);
                        }
                        "resolution" => {
                            stmt.arity(2)?;
                            resolution = (stmt.integer(0)?, stmt.integer(1)?);
                            spans.insert("resolution", stmt.line, stmt.column);
                        }
                        "world" => {
                            world.dimensions = stmt.vec3()?;
                            spans.insert("world", stmt.line, stmt.column);
                        }
                        _ => return Err(stmt.unknown("scene")),
                    }
                }
            }
            "camera" => {
                forbid_name(&block)?;
                if let Some((_, l, c)) = camera {
                    return Err(SceneError::at_text(
                        SceneErrorKind::DuplicateCamera,
                        bl,
                        bc,
                        format!("duplicate camera (first defined at {l}:{c})"),
                    ));
                }
                let mut position = None;
                let mut look_at = None;
                for stmt in &block.statements {
                    seen.check(stmt)?;
                    match stmt.keyword.as_str() {
                        "position" => {
                            position = Some(stmt.vec3()?);
                            spans.insert("camera.position", stmt.line, stmt.column);
                        }
                        "look_at" => {
                            look_at = Some(stmt.vec3()?);
                            spans.insert("camera.look_at", stmt.line, stmt.column);
                        }
                        _ => return Err(stmt.unknown("camera")),
                    }
                }
                let missing = |what: &str| {
                    SceneError::at_text(SceneErrorKind::Invalid, bl, bc, format!("camera is missing `{what}`"))
                };
                let position = position.ok_or_else(|| missing("position"))?;
                let look_at = look_at.ok_or_else(|| missing("look_at"))?;
                spans.insert("camera", bl, bc);
                camera = Some((CameraSpec { position, look_at }, bl, bc));
            }
            "floor" => {
                forbid_name(&block)?;
                if floor.is_some() {
                    return Err(SceneError::at_text(SceneErrorKind::Invalid, bl, bc, "duplicate floor block"));
                }
                let mut spec = FloorSpec::default();
                spans.insert("floor", bl, bc);
                for stmt in &block.statements {
                    seen.check(stmt)?;
                    match stmt.keyword.as_str() {
                        "elasticity" => {
                            spec.elasticity = stmt.single_number()?;
                            spans.insert("floor.elasticity", stmt.line, stmt.column);
                        }
                        _ => return Err(stmt.unknown("floor")),
                    }
                }
                floor = Some(spec);
            }
            "wind" | "gravity" => {
                forbid_name(&block)?;
                let kind = if block.keyword == "wind" { ForceKind::Wind } else { ForceKind::GravityOverride };
                let path = format!("forces[{}]", forces.len());
                spans.insert(&path, bl, bc);
                let mut direction = None;
                let mut strength = None;
                for stmt in &block.statements {
                    seen.check(stmt)?;
                    match stmt.keyword.as_str() {
                        "direction" => {
                            direction = Some(stmt.vec3()?);
                            spans.insert(&format!("{path}.direction"), stmt.line, stmt.column);
                        }
                        "strength" => {
                            strength = Some(stmt.single_number()?);
                            spans.insert(&format!("{path}.strength"), stmt.line, stmt.column);
                        }
                        _ => return Err(stmt.unknown(&block.keyword)),
                    }
                }
                let missing = |what: &str| {
                    SceneError::at_text(
                        SceneErrorKind::Invalid,
                        bl,
                        bc,
                        format!("`{}` block is missing `{what}`", block.keyword),
                    )
                };
                forces.push(ForceSpec {
                    kind,
                    direction: direction.ok_or_else(|| missing("direction"))?,
                    strength: strength.ok_or_else(|| missing("strength"))?,
                });
            }
            "object" => {
                let name_tok = block
                    .name
                    .as_ref()
                    .ok_or_else(|| syntax(bl, bc, "`object` block requires a name"))?;
                let TokenKind::Word(obj_name) = &name_tok.kind else { unreachable!() };
                if let Some((l, c)) = object_sites.get(obj_name) {
                    return Err(SceneError::at_text(
                        SceneErrorKind::DuplicateObject,
                        name_tok.line,
                        name_tok.column,
                        format!("duplicate object name `{obj_name}` (first defined at {l}:{c})"),
                    ));
                }
                object_sites.insert(obj_name.clone(), (name_tok.line, name_tok.column));
                let path = format!("objects[{}]", objects.len());
                spans.insert(&path, name_tok.line, name_tok.column);
                spans.insert(&format!("{path}.name"), name_tok.line, name_tok.column);
                let object = parse_object(obj_name, &block, &path, &mut spans)?;
                objects.push(object);
            }
            other => {
                return Err(SceneError::at_text(
                    SceneErrorKind::UnknownKeyword,
                    bl,
                    bc,
                    format!("unknown block `{other}`"),
                ))
            }
        }
    }

    let Some((camera, _, _)) = camera else {
        return Err(SceneError::at_text(SceneErrorKind::MissingCamera, 1, 1, "scene has no camera block"));
    };

    let spec = SceneSpec {
        name,
        frames,
        fps,
        resolution,
        camera,
        objects,
        forces,
        floor,
        world,
    };
    finalize(spec, catalog).map_err(|issue| issue.locate(&spans))
}

fn parse_object(name: &str, block: &Block, path: &str, spans: &mut Spans) -> Result<ObjectSpec, SceneError> {
    let mut object = ObjectSpec::new(name, [0.0; 3]);
    let mut seen = Seen::new();
    let mut has_position = false;
    for stmt in &block.statements {
        // `asset` and `primitive` both set the source.
        let key = match stmt.keyword.as_str() {
            "asset" | "primitive" => "asset/primitive",
            other => other,
        };
        seen.check(&Statement { keyword: key.to_string(), values: Vec::new(), line: stmt.line, column: stmt.column })?;
        let field = match stmt.keyword.as_str() {
            "asset" => {
                stmt.arity(1)?;
                let (key, _) = stmt.word(0)?;
                object.source = Source::Asset(key.to_string());
                "source"
            }
            "primitive" => {
                stmt.arity(1)?;
                let (word, tok) = stmt.word(0)?;
                let kind = PrimitiveKind::from_keyword(word).ok_or_else(|| {
                    SceneError::at_text(
                        SceneErrorKind::UnknownKeyword,
                        tok.line,
                        tok.column,
                        format!("unknown primitive `{word}`"),
                    )
                })?;
                object.source = Source::Primitive(kind);
                "source"
            }
            "size" => {
                object.size = stmt.single_number()?;
                "size"
            }
            "mass" => {
                object.mass = Some(stmt.single_number()?);
                "mass"
            }
            "position" => {
                object.position = stmt.vec3()?;
                has_position = true;
                "position"
            }
            "physics" => {
                stmt.arity(1)?;
                let (word, tok) = stmt.word(0)?;
                object.physics = Physics::from_keyword(word).ok_or_else(|| {
                    SceneError::at_text(
                        SceneErrorKind::UnknownKeyword,
                        tok.line,
                        tok.column,
                        format!("unknown physics kind `{word}`"),
                    )
                })?;
                "physics"
            }
            "elasticity" => {
                object.elasticity = Some(stmt.single_number()?);
                "elasticity"
            }
            "velocity" => {
                object.initial_velocity = Some(stmt.vec3()?);
                "initial_velocity"
            }
            "rotation" => {
                object.initial_rotation = Some(stmt.vec3()?);
                "initial_rotation"
            }
            "throw_at" => {
                stmt.arity(1)?;
                let (word, tok) = stmt.word(0)?;
                if word != "camera" {
                    return Err(SceneError::at_text(
                        SceneErrorKind::UnknownKeyword,
                        tok.line,
                        tok.column,
                        format!("unknown throw target `{word}` (only `camera` is supported)"),
                    ));
                }
                object.throw_at_camera = true;
                "throw_at_camera"
            }
            "pin" => {
                stmt.arity(1)?;
                let (word, tok) = stmt.word(0)?;
                object.pin = Some(PinEdge::from_keyword(word).ok_or_else(|| {
                    SceneError::at_text(
                        SceneErrorKind::UnknownKeyword,
                        tok.line,
                        tok.column,
                        format!("unknown pin edge `{word}`"),
                    )
                })?);
                "pin"
            }
            _ => return Err(stmt.unknown("object")),
        };
        spans.insert(&format!("{path}.{field}"), stmt.line, stmt.column);
    }
    if !has_position {
        return Err(SceneError::at_text(
            SceneErrorKind::Invalid,
            block.line,
            block.column,
            format!("object `{name}` is missing `position`"),
        ));
    }
    Ok(object)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::Location;

    const CAMERA: &str = "camera { position 0 -10 2; look_at 0 0 1; }\n";

    #[test]
    fn empty_scene_gets_defaults() {
        let spec = parse_scene(&format!("scene s {{ }}\n{CAMERA}")).unwrap();
        assert_eq!(spec.frames, 80);
        assert_eq!(spec.fps, 24);
        assert_eq!(spec.resolution, (1920, 1080));
        assert_eq!(spec.name, "s");
    }

    #[test]
    fn basketball_object_values() {
        let src = format!("{CAMERA}object ball {{ size 0.24; mass 0.625; position 0 0 4; physics rigid; }}");
        let spec = parse_scene(&src).unwrap();
        let ball = spec.object("ball").unwrap();
        assert_eq!(ball.size, 0.24);
        assert_eq!(ball.mass, Some(0.625));
        assert_eq!(ball.position, [0.0, 0.0, 4.0]);
        assert_eq!(ball.physics, Physics::RigidActive);
    }

    #[test]
    fn duplicate_camera() {
        let err = parse_scene(&format!("{CAMERA}{CAMERA}")).unwrap_err();
        assert_eq!(err.kind, SceneErrorKind::DuplicateCamera);
        assert!(err.message.contains("duplicate camera"));
        assert_eq!(err.location, Location::Text { line: 2, column: 1 });
    }

    #[test]
    fn missing_camera() {
        let err = parse_scene("scene s { frames 10; }").unwrap_err();
        assert_eq!(err.kind, SceneErrorKind::MissingCamera);
    }

    #[test]
    fn duplicate_object() {
        let src = format!("{CAMERA}object a {{ position 0 0 1; }}\nobject a {{ position 0 0 2; }}");
        let err = parse_scene(&src).unwrap_err();
        assert_eq!(err.kind, SceneErrorKind::DuplicateObject);
        assert_eq!(err.location, Location::Text { line: 3, column: 8 });
    }

    #[test]
    fn unknown_keyword_reports_position() {
        let src = format!("{CAMERA}object a {{\n  position 0 0 1;\n  colour red;\n}}");
        let err = parse_scene(&src).unwrap_err();
        assert_eq!(err.kind, SceneErrorKind::UnknownKeyword);
        assert_eq!(err.location, Location::Text { line: 4, column: 3 });
    }

    #[test]
    fn unknown_block() {
        let err = parse_scene(&format!("{CAMERA}light {{ }}")).unwrap_err();
        assert_eq!(err.kind, SceneErrorKind::UnknownKeyword);
    }

    #[test]
    fn syntax_errors_have_positions() {
        let err = parse_scene("camera { position 0 0 1 look_at 0 0 0; }").unwrap_err();
        assert_eq!(err.kind, SceneErrorKind::Syntax);
        let err = parse_scene("camera { position 0 0 1;").unwrap_err();
        assert_eq!(err.kind, SceneErrorKind::Syntax);
        assert!(err.message.contains("unclosed"));
        let err = parse_scene("camera { position 0 0 $; }").unwrap_err();
        assert_eq!(err.location, Location::Text { line: 1, column: 23 });
    }

    #[test]
    fn frames_must_be_integer() {
        let err = parse_scene(&format!("scene s {{ frames 2.5; }}\n{CAMERA}")).unwrap_err();
        assert_eq!(err.kind, SceneErrorKind::Syntax);
    }

    #[test]
    fn validation_errors_map_to_text_positions() {
        let src = format!("{CAMERA}object a {{\n  position 0 0 1;\n  physics rigid;\n  mass -2;\n}}");
        let err = parse_scene(&src).unwrap_err();
        assert_eq!(err.location, Location::Text { line: 5, column: 3 });
    }

    #[test]
    fn comments_are_ignored() {
        let src = "# header\ncamera { // inline\n position 0 -10 2; look_at 0 0 1; # trailing\n}";
        assert!(parse_scene(src).is_ok());
    }

    #[test]
    fn numbers() {
        let chars: Vec<char> = "-1.5e3;".chars().collect();
        assert_eq!(scan_number(&chars, 0), Some(6));
        let chars: Vec<char> = ".5".chars().collect();
        assert_eq!(scan_number(&chars, 0), Some(2));
        let chars: Vec<char> = "4m".chars().collect();
        assert_eq!(scan_number(&chars, 0), None);
        let chars: Vec<char> = "-".chars().collect();
        assert_eq!(scan_number(&chars, 0), None);
    }
}
