use std::collections::BTreeMap;

use super::lexer::{tokenize, Tok, Token};
use super::{is_keyword, ParseError, SourceSpan};
use crate::program::{
    derive_failure_order, Assertion, Atom, Cond, Instruction, Loc, MemoryOrder, Operand, Program,
    Quantifier, Reg, RmwOp, Thread, Value,
};

type PResult<T> = Result<T, ParseError>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    errors: Vec<ParseError>,
}

/// Parses a litmus file. Instruction-level errors are collected line by
/// line; structural errors stop the parse.
pub fn parse_litmus(text: &str) -> Result<Program, Vec<ParseError>> {
    let toks = tokenize(text).map_err(|e| vec![e])?;
    let mut p = Parser {
        toks,
        pos: 0,
        errors: Vec::new(),
    };
    match p.file() {
        Ok(program) if p.errors.is_empty() => Ok(program),
        Ok(_) => Err(p.errors),
        Err(e) => {
            p.errors.push(e);
            Err(p.errors)
        }
    }
}

/// Like [`parse_litmus`] for raw bytes; invalid UTF-8 is a parse error.
pub fn parse_litmus_bytes(bytes: &[u8]) -> Result<Program, Vec<ParseError>> {
    match std::str::from_utf8(bytes) {
        Ok(s) => parse_litmus(s),
        Err(e) => {
            let at = e.valid_up_to();
            let prefix = &bytes[..at];
            let line = prefix.iter().filter(|&&b| b == b'\n').count() + 1;
            let line_start = prefix.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
            let column = std::str::from_utf8(&prefix[line_start..])
                .map_or(1, |s| s.chars().count() + 1);
            Err(vec![ParseError {
                message: "input is not valid UTF-8".into(),
                span: SourceSpan {
                    line,
                    column,
                    start: at,
                    end: (at + e.error_len().unwrap_or(1)).min(bytes.len()),
                },
            }])
        }
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError {
            message: message.into(),
            span: self.peek().span,
        })
    }

    fn unexpected<T>(&self, what: &str) -> PResult<T> {
        self.error(format!("expected {what}, found {}", self.peek().tok.describe()))
    }

    fn skip_newlines(&mut self) {
        while self.peek().tok == Tok::Newline {
            self.advance();
        }
    }

    fn at_word(&self, word: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(w) if w == word)
    }

    fn expect(&mut self, tok: Tok) -> PResult<Token> {
        if self.peek().tok == tok {
            Ok(self.advance())
        } else {
            self.unexpected(&tok.describe())
        }
    }

    fn expect_header(&mut self, word: &str) -> PResult<()> {
        if self.at_word(word) && *self.peek_at(1) == Tok::Colon {
            self.advance();
            self.advance();
            Ok(())
        } else {
            self.unexpected(&format!("{word} header"))
        }
    }

    /// A non-keyword identifier.
    fn name(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match &self.peek().tok {
            Tok::Ident(w) if !is_keyword(w) => {
                let t = self.advance();
                match t.tok {
                    Tok::Ident(w) => Ok((w, t.span)),
                    _ => unreachable!(),
                }
            }
            Tok::Ident(w) => {
                let msg = format!("expected {what}, found keyword '{w}'");
                self.error(msg)
            }
            _ => self.unexpected(what),
        }
    }

    fn number(&mut self) -> PResult<Value> {
        match &self.peek().tok {
            Tok::Num(n) => match n.parse::<Value>() {
                Ok(v) => {
                    self.advance();
                    Ok(v)
                }
                Err(_) => {
                    let msg = format!("value {n} out of range 0..255");
                    self.error(msg)
                }
            },
            _ => self.unexpected("number"),
        }
    }

    fn order(&mut self) -> Option<MemoryOrder> {
        let o = match &self.peek().tok {
            Tok::Ident(w) => MemoryOrder::from_keyword(w),
            _ => None,
        };
        if o.is_some() {
            self.advance();
        }
        o
    }

    fn operand(&mut self) -> PResult<Operand> {
        match &self.peek().tok {
            Tok::Num(_) => Ok(Operand::Lit(self.number()?)),
            Tok::Ident(_) => Ok(Operand::Reg(Reg(self.name("register or number")?.0))),
            _ => self.unexpected("register or number"),
        }
    }

    fn file(&mut self) -> PResult<Program> {
        self.skip_newlines();
        if self.peek().tok == Tok::Eof {
            return self.error("expected name header");
        }
        self.expect_header("name")?;
        let (name, _) = self.name("test name")?;
        self.skip_newlines();

        self.expect_header("init")?;
        let mut init = BTreeMap::new();
        loop {
            self.skip_newlines();
            if self.at_word("thread") || self.at_word("exists") || self.at_word("forall") {
                break;
            }
            if self.peek().tok == Tok::Eof {
                return self.unexpected("thread block or condition");
            }
            let (loc, span) = self.name("location")?;
            self.expect(Tok::Eq)?;
            let v = self.number()?;
            if init.insert(Loc(loc.clone()), v).is_some() {
                return Err(ParseError {
                    message: format!("duplicate init location {loc}"),
                    span,
                });
            }
        }

        let mut threads: Vec<Thread> = Vec::new();
        while self.at_word("thread") {
            self.advance();
            let (tname, span) = self.name("thread name")?;
            if threads.iter().any(|t| t.name == tname) {
                return Err(ParseError {
                    message: format!("duplicate thread name {tname}"),
                    span,
                });
            }
            self.expect(Tok::Colon)?;
            let mut instructions = Vec::new();
            loop {
                self.skip_newlines();
                if self.at_word("thread")
                    || ((self.at_word("exists") || self.at_word("forall"))
                        && *self.peek_at(1) == Tok::Colon)
                    || self.peek().tok == Tok::Eof
                {
                    break;
                }
                match self.instruction() {
                    Ok(i) => instructions.push(i),
                    Err(e) => {
                        self.errors.push(e);
                        while !matches!(self.peek().tok, Tok::Newline | Tok::Eof) {
                            self.advance();
                        }
                    }
                }
            }
            threads.push(Thread {
                name: tname,
                instructions,
            });
        }

        let quantifier = if self.at_word("exists") {
            Quantifier::Exists
        } else if self.at_word("forall") {
            Quantifier::Forall
        } else {
            return self.unexpected("thread block or exists:/forall: condition");
        };
        self.advance();
        self.expect(Tok::Colon)?;
        // the condition may span lines
        let rest = self.toks.split_off(self.pos);
        self.toks
            .extend(rest.into_iter().filter(|t| t.tok != Tok::Newline));
        let cond = self.disjunction()?;
        if self.peek().tok != Tok::Eof {
            return self.unexpected("end of input after condition");
        }
        Ok(Program {
            name,
            init,
            threads,
            assertion: Assertion { quantifier, cond },
        })
    }

    fn end_of_line(&mut self) -> PResult<()> {
        match self.peek().tok {
            Tok::Newline | Tok::Eof => Ok(()),
            _ => self.unexpected("end of line"),
        }
    }

    fn instruction(&mut self) -> PResult<Instruction> {
        let instr = if self.at_word("store") {
            self.advance();
            let loc = Loc(self.name("location")?.0);
            let val = self.operand()?;
            let order = self.order().unwrap_or(MemoryOrder::SeqCst);
            Instruction::Store { loc, val, order }
        } else if self.at_word("na_store") {
            self.advance();
            let loc = Loc(self.name("location")?.0);
            let val = self.operand()?;
            Instruction::NaStore { loc, val }
        } else if self.at_word("fence") {
            self.advance();
            match self.order() {
                Some(order) => Instruction::Fence { order },
                None => return self.unexpected("memory order after fence"),
            }
        } else {
            let dst = Reg(self.name("instruction")?.0);
            self.expect(Tok::Eq)?;
            let mnemonic = match &self.peek().tok {
                Tok::Ident(w) => w.clone(),
                _ => return self.unexpected("load, na_load, read-modify-write or cas"),
            };
            match mnemonic.as_str() {
                "load" => {
                    self.advance();
                    let loc = Loc(self.name("location")?.0);
                    let order = self.order().unwrap_or(MemoryOrder::SeqCst);
                    Instruction::Load { dst, loc, order }
                }
                "na_load" => {
                    self.advance();
                    let loc = Loc(self.name("location")?.0);
                    Instruction::NaLoad { dst, loc }
                }
                "cas_strong" | "cas_weak" => {
                    self.advance();
                    let loc = Loc(self.name("location")?.0);
                    let expected = self.number()?;
                    let desired = self.number()?;
                    let success = self.order().unwrap_or(MemoryOrder::SeqCst);
                    let failure = self.order().unwrap_or_else(|| derive_failure_order(success));
                    Instruction::Cas {
                        weak: mnemonic == "cas_weak",
                        dst,
                        loc,
                        expected,
                        desired,
                        success,
                        failure,
                    }
                }
                other => match RmwOp::from_keyword(other) {
                    Some(op) => {
                        self.advance();
                        let loc = Loc(self.name("location")?.0);
                        let val = self.operand()?;
                        let order = self.order().unwrap_or(MemoryOrder::SeqCst);
                        Instruction::Rmw {
                            op,
                            dst,
                            loc,
                            val,
                            order,
                        }
                    }
                    None => return self.unexpected("load, na_load, read-modify-write or cas"),
                },
            }
        };
        self.end_of_line()?;
        Ok(instr)
    }

    fn disjunction(&mut self) -> PResult<Cond> {
        let mut lhs = self.conjunction()?;
        while self.peek().tok == Tok::Or {
            self.advance();
            lhs = Cond::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<Cond> {
        let mut lhs = self.unary()?;
        while self.peek().tok == Tok::And {
            self.advance();
            lhs = Cond::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Cond> {
        match self.peek().tok {
            Tok::Not => {
                self.advance();
                Ok(Cond::not(self.unary()?))
            }
            Tok::LParen => {
                self.advance();
                let c = self.disjunction()?;
                self.expect(Tok::RParen)?;
                Ok(c)
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> PResult<Cond> {
        let (first, _) = self.name("register or location atom")?;
        if self.peek().tok == Tok::Colon {
            self.advance();
            let reg = Reg(self.name("register")?.0);
            self.expect(Tok::Eq)?;
            let value = self.number()?;
            Ok(Cond::Atom(Atom::Reg {
                thread: first,
                reg,
                value,
            }))
        } else {
            self.expect(Tok::Eq)?;
            let value = self.number()?;
            Ok(Cond::Atom(Atom::Loc {
                loc: Loc(first),
                value,
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEKKER: &str = "\
# classic store buffering
name: dekker
init: x = 0 y = 0
thread P0:
  store x 1
  r1 = load y
thread P1:
  store y 1
  r2 = load x
exists: P0:r1 = 0 /\\ P1:r2 = 0
";

    #[test]
    fn dekker_shape() {
        let p = parse_litmus(DEKKER).unwrap();
        assert_eq!(p.name, "dekker");
        assert_eq!(p.threads.len(), 2);
        assert!(p.threads.iter().all(|t| t.instructions.len() == 2));
        assert_eq!(
            p.threads[0].instructions[1],
            Instruction::Load {
                dst: Reg::new("r1"),
                loc: Loc::new("y"),
                order: MemoryOrder::SeqCst
            }
        );
        assert_eq!(
            p.assertion.cond,
            Cond::and(Cond::reg("P0", "r1", 0), Cond::reg("P1", "r2", 0))
        );
    }

    #[test]
    fn message_passing_orders() {
        let src = "name: mp init: x = 0 y = 0
thread A:
  store x 1 relaxed
  store y 2 release
thread B:
  ry = load y acquire
  rx = load x relaxed
exists: B:ry = 2 /\\ B:rx = 0";
        let p = parse_litmus(src).unwrap();
        let orders: Vec<MemoryOrder> = p
            .threads
            .iter()
            .flat_map(|t| &t.instructions)
            .map(|i| match i {
                Instruction::Load { order, .. } | Instruction::Store { order, .. } => *order,
                _ => unreachable!(),
            })
            .collect();
        use MemoryOrder::*;
        assert_eq!(orders, vec![Relaxed, Release, Acquire, Relaxed]);
    }

    #[test]
    fn empty_input() {
        let e = parse_litmus("").unwrap_err();
        assert_eq!(e[0].message, "expected name header");
        let e = parse_litmus("  # only a comment\n\n").unwrap_err();
        assert_eq!(e[0].message, "expected name header");
    }

    #[test]
    fn cas_single_order_derives_failure() {
        let p = parse_litmus("name: c init: thread P0:\n r = cas_weak x 0 1 acq_rel\n exists: x = 1").unwrap();
        assert_eq!(
            p.threads[0].instructions[0],
            Instruction::Cas {
                weak: true,
                dst: Reg::new("r"),
                loc: Loc::new("x"),
                expected: 0,
                desired: 1,
                success: MemoryOrder::AcqRel,
                failure: MemoryOrder::Acquire,
            }
        );
    }

    #[test]
    fn duplicates_rejected() {
        let e = parse_litmus("name: d init: x = 0 x = 1 thread P0:\n fence seq_cst\n exists: x = 0")
            .unwrap_err();
        assert!(e[0].message.contains("duplicate init location x"));
        let e = parse_litmus("name: d init:\nthread P0:\n fence seq_cst\nthread P0:\n fence seq_cst\nexists: x = 0")
            .unwrap_err();
        assert!(e[0].message.contains("duplicate thread name P0"));
        assert_eq!(e[0].span.line, 4);
    }

    #[test]
    fn errors_collected_per_line() {
        let src = "name: t init:\nthread P0:\n store x\n r = load\n fence seq_cst\nexists: x = 0";
        let e = parse_litmus(src).unwrap_err();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].span.line, 3);
        assert_eq!(e[1].span.line, 4);
    }

    #[test]
    fn one_instruction_per_line() {
        let e = parse_litmus("name: t init:\nthread P0:\n store x 1 store y 1\nexists: x = 0").unwrap_err();
        assert!(e[0].message.starts_with("expected end of line"));
    }

    #[test]
    fn values_are_bytes() {
        let e = parse_litmus("name: t init: x = 256 thread P0:\n fence seq_cst\nexists: x = 0").unwrap_err();
        assert_eq!(e[0].message, "value 256 out of range 0..255");
    }

    #[test]
    fn keywords_are_reserved() {
        let e = parse_litmus("name: t init:\nthread P0:\n store load 1\nexists: x = 0").unwrap_err();
        assert_eq!(e[0].message, "expected location, found keyword 'load'");
    }

    #[test]
    fn condition_precedence() {
        let p = parse_litmus("name: t init: x = 0 y = 0\nforall: !x = 1 \\/ y = 1 /\\ (x = 0 \\/ y = 0)").unwrap();
        assert_eq!(
            p.assertion.cond,
            Cond::or(
                Cond::not(Cond::loc("x", 1)),
                Cond::and(Cond::loc("y", 1), Cond::or(Cond::loc("x", 0), Cond::loc("y", 0)))
            )
        );
        assert!(p.threads.is_empty());
    }

    #[test]
    fn invalid_utf8() {
        let e = parse_litmus_bytes(b"name: a\n\xff").unwrap_err();
        assert_eq!((e[0].span.line, e[0].span.column, e[0].span.start), (2, 1, 8));
    }
}
