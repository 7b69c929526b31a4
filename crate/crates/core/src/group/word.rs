use std::fmt;

use super::GroupError;

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize) -> Self {
        Letter {
            generator,
            inverse: false,
        }
    }

    pub fn inv(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    /// Column index in a coset table with two columns per generator.
    pub fn column(self) -> usize {
        2 * self.generator + self.inverse as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn power(generator: usize, exponent: i64) -> Self {
        let l = Letter {
            generator,
            inverse: exponent < 0,
        };
        Word(vec![l; exponent.unsigned_abs() as usize])
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v).reduced()
    }

    /// Free reduction.
    pub fn reduced(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Free and cyclic reduction (conjugate-equivalent as a relator).
    pub fn cyclically_reduced(&self) -> Word {
        let mut w = self.reduced().0;
        while w.len() >= 2 && w[0] == w[w.len() - 1].inv() {
            w.pop();
            w.remove(0);
        }
        Word(w)
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self, generators: usize) -> Vec<i64> {
        let mut sums = vec![0; generators];
        for l in &self.0 {
            sums[l.generator] += if l.inverse { -1 } else { 1 };
        }
        sums
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> WordDisplay<'a> {
        WordDisplay { word: self, names }
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in &self.word.0 {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let name = &self.names[l.generator];
            if !l.inverse {
                f.write_str(name)?;
            } else if is_single_lowercase(name) {
                f.write_str(&name.to_uppercase())?;
            } else {
                write!(f, "{name}^-1")?;
            }
        }
        Ok(())
    }
}

fn is_single_lowercase(name: &str) -> bool {
    let mut chars = name.chars();
    matches!((chars.next(), chars.next()), (Some(c), None) if c.is_ascii_lowercase())
}

/// A finitely presented group `<generators | relators>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self, GroupError> {
        if generators.is_empty() {
            return Err(GroupError::EmptyGenerators);
        }
        for (i, g) in generators.iter().enumerate() {
            if !is_valid_name(g) {
                return Err(GroupError::BadGeneratorName(g.clone()));
            }
            if generators[..i].contains(g) {
                return Err(GroupError::DuplicateGenerator(g.clone()));
            }
        }
        for r in &relators {
            if let Some(l) = r.0.iter().find(|l| l.generator >= generators.len()) {
                return Err(GroupError::UnknownGenerator(format!("#{}", l.generator)));
            }
        }
        Ok(Presentation {
            generators,
            relators,
        })
    }

    /// Parses relators written in the word syntax (see [`parse_word`]).
    pub fn parse(generators: &[&str], relators: &[&str]) -> Result<Self, GroupError> {
        let generators: Vec<String> = generators.iter().map(|s| s.to_string()).collect();
        let words = relators
            .iter()
            .map(|r| parse_word(r, &generators))
            .collect::<Result<Vec<_>, _>>()?;
        Presentation::new(generators, words)
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    pub fn relator_strings(&self) -> Vec<String> {
        self.relators
            .iter()
            .map(|r| r.display(&self.generators).to_string())
            .collect()
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "< {} | ", self.generators.join(", "))?;
        let rels = self.relator_strings();
        write!(f, "{} >", rels.join(", "))
    }
}

pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
}

/// Parses a word over `generators`.
///
/// Syntax: whitespace separated items; an item is a generator name, the
/// upper-case form of a single-letter generator (its inverse), or a
/// parenthesised sub-word, optionally followed by `^k` with `k` a possibly
/// negative integer. A run of letters that is not itself a name is split
/// into single-letter generators, so `abAB` equals `a b A B`. `1` or an
/// empty string is the empty word.
pub fn parse_word(text: &str, generators: &[String]) -> Result<Word, GroupError> {
    let mut p = WordParser {
        chars: text.chars().collect(),
        pos: 0,
        generators,
        text,
    };
    let w = p.sequence()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(p.error("unexpected character"));
    }
    Ok(w)
}

struct WordParser<'a> {
    chars: Vec<char>,
    pos: usize,
    generators: &'a [String],
    text: &'a str,
}

impl WordParser<'_> {
    fn error(&self, msg: &str) -> GroupError {
        GroupError::WordSyntax {
            word: self.text.to_string(),
            position: self.pos,
            message: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && (self.chars[self.pos].is_whitespace() || self.chars[self.pos] == '*') {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn sequence(&mut self) -> Result<Word, GroupError> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None | Some(')') => break,
                Some('1') => {
                    self.pos += 1;
                }
                Some('(') => {
                    self.pos += 1;
                    let inner = self.sequence()?;
                    self.skip_ws();
                    if self.peek() != Some(')') {
                        return Err(self.error("missing ')'"));
                    }
                    self.pos += 1;
                    let e = self.exponent()?;
                    out.extend(raise(&inner, e).0);
                }
                Some(c) if c.is_ascii_alphabetic() => {
                    let start = self.pos;
                    while self
                        .peek()
                        .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
                    {
                        self.pos += 1;
                    }
                    let run: String = self.chars[start..self.pos].iter().collect();
                    let mut letters = self.resolve_run(&run, start)?;
                    let e = self.exponent()?;
                    let last = letters.pop().expect("non-empty run");
                    out.extend(letters);
                    out.extend(raise(&Word(vec![last]), e).0);
                }
                Some(_) => return Err(self.error("unexpected character")),
            }
        }
        Ok(Word(out))
    }

    fn exponent(&mut self) -> Result<i64, GroupError> {
        if self.peek() != Some('^') {
            return Ok(1);
        }
        self.pos += 1;
        let start = self.pos;
        if self.peek() == Some('-') {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<i64>().map_err(|_| self.error("bad exponent"))
    }

    fn lookup(&self, name: &str) -> Option<Letter> {
        if let Some(i) = self.generators.iter().position(|g| g == name) {
            return Some(Letter::new(i));
        }
        let mut cs = name.chars();
        if let (Some(c), None) = (cs.next(), cs.next()) {
            if c.is_ascii_uppercase() {
                let lower = c.to_ascii_lowercase().to_string();
                if let Some(i) = self.generators.iter().position(|g| *g == lower) {
                    return Some(Letter::new(i).inv());
                }
            }
        }
        None
    }

    fn resolve_run(&self, run: &str, start: usize) -> Result<Vec<Letter>, GroupError> {
        if let Some(l) = self.lookup(run) {
            return Ok(vec![l]);
        }
        run.chars()
            .enumerate()
            .map(|(k, c)| {
                self.lookup(&c.to_string()).ok_or_else(|| {
                    if run.chars().count() == 1 || !c.is_ascii_alphabetic() {
                        GroupError::UnknownGenerator(run.to_string())
                    } else {
                        GroupError::WordSyntax {
                            word: self.text.to_string(),
                            position: start + k,
                            message: format!("unknown generator '{c}' in '{run}'"),
                        }
                    }
                })
            })
            .collect()
    }
}

fn raise(w: &Word, e: i64) -> Word {
    let base = if e < 0 { w.inverse() } else { w.clone() };
    let mut v = Vec::with_capacity(base.len() * e.unsigned_abs() as usize);
    for _ in 0..e.unsigned_abs() {
        v.extend_from_slice(&base.0);
    }
    Word(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gens(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_compact_and_spaced_forms() {
        let g = gens(&["a", "b"]);
        let w1 = parse_word("abAB", &g).unwrap();
        let w2 = parse_word("a b A B", &g).unwrap();
        let w3 = parse_word("a b a^-1 b^-1", &g).unwrap();
        assert_eq!(w1, w2);
        assert_eq!(w1, w3);
        assert_eq!(w1.len(), 4);
        assert_eq!(w1.display(&g).to_string(), "a b A B");
    }

    #[test]
    fn parses_powers_and_groups() {
        let g = gens(&["a", "b"]);
        assert_eq!(parse_word("(ab)^2", &g).unwrap(), parse_word("abab", &g).unwrap());
        assert_eq!(parse_word("a^3", &g).unwrap(), Word::power(0, 3));
        assert_eq!(parse_word("(ab)^-1", &g).unwrap(), parse_word("BA", &g).unwrap());
        assert!(parse_word("", &g).unwrap().is_empty());
        assert!(parse_word("1", &g).unwrap().is_empty());
    }

    #[test]
    fn multi_char_names() {
        let g = gens(&["x1", "x2"]);
        let w = parse_word("x1 x2^-1 x1^2", &g).unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.display(&g).to_string(), "x1 x2^-1 x1 x1");
    }

    #[test]
    fn unknown_generator_is_an_error() {
        let g = gens(&["a"]);
        assert!(parse_word("a c", &g).is_err());
        assert!(parse_word("a)", &g).is_err());
        assert!(parse_word("(a", &g).is_err());
    }

    #[test]
    fn reduction() {
        let g = gens(&["a", "b"]);
        let w = parse_word("a b B A b", &g).unwrap().reduced();
        assert_eq!(w, parse_word("b", &g).unwrap());
        let c = parse_word("B a b a b", &g).unwrap().cyclically_reduced();
        assert_eq!(c, parse_word("a b a", &g).unwrap());
    }

    #[test]
    fn presentation_rejects_bad_generators() {
        assert!(matches!(Presentation::parse(&[], &[]), Err(GroupError::EmptyGenerators)));
        assert!(matches!(
            Presentation::parse(&["a", "a"], &[]),
            Err(GroupError::DuplicateGenerator(_))
        ));
    }
}
