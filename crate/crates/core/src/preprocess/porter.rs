//! Porter (1980) suffix-stripping stemmer, steps 1a through 5b, without the
//! later extensions (no short-word guard, `abli -> able`, no `logi` rule).

/// Stem one lowercase ASCII word. Words containing anything other than
/// `a-z` are returned unchanged.
pub fn stem_word(word: &str) -> String {
    if word.is_empty() || !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return word.to_string();
    }
    let mut w = Word(word.as_bytes().to_vec());
    w.step1a();
    w.step1b();
    w.step1c();
    w.step2();
    w.step3();
    w.step4();
    w.step5a();
    w.step5b();
    // only ASCII bytes are ever written
    String::from_utf8(w.0).expect("stemmer output is ASCII")
}

struct Word(Vec<u8>);

type Rule = (&'static [u8], &'static [u8]);

const STEP2: &[Rule] = &[
    (b"ational", b"ate"),
    (b"tional", b"tion"),
    (b"enci", b"ence"),
    (b"anci", b"ance"),
    (b"izer", b"ize"),
    (b"abli", b"able"),
    (b"alli", b"al"),
    (b"entli", b"ent"),
    (b"eli", b"e"),
    (b"ousli", b"ous"),
    (b"ization", b"ize"),
    (b"ation", b"ate"),
    (b"ator", b"ate"),
    (b"alism", b"al"),
    (b"iveness", b"ive"),
    (b"fulness", b"ful"),
    (b"ousness", b"ous"),
    (b"aliti", b"al"),
    (b"iviti", b"ive"),
    (b"biliti", b"ble"),
];

const STEP3: &[Rule] = &[
    (b"icate", b"ic"),
    (b"ative", b""),
    (b"alize", b"al"),
    (b"iciti", b"ic"),
    (b"ical", b"ic"),
    (b"ful", b""),
    (b"ness", b""),
];

const STEP4: &[&[u8]] = &[
    b"al", b"ance", b"ence", b"er", b"ic", b"able", b"ible", b"ant", b"ement", b"ment", b"ent", b"ion", b"ou", b"ism",
    b"ate", b"iti", b"ous", b"ive", b"ize",
];

fn is_vowel_letter(b: u8) -> bool {
    matches!(b, b'a' | b'e' | b'i' | b'o' | b'u')
}

impl Word {
    fn is_consonant(&self, i: usize) -> bool {
        let b = self.0[i];
        if is_vowel_letter(b) {
            return false;
        }
        if b == b'y' {
            return i == 0 || !self.is_consonant(i - 1);
        }
        true
    }

    /// Measure `m` of the prefix `[0, len)`: the number of VC sequences in
    /// `[C](VC)^m[V]`.
    fn measure(&self, len: usize) -> usize {
        let mut m = 0;
        let mut i = 0;
        while i < len && self.is_consonant(i) {
            i += 1;
        }
        loop {
            while i < len && !self.is_consonant(i) {
                i += 1;
            }
            if i >= len {
                return m;
            }
            while i < len && self.is_consonant(i) {
                i += 1;
            }
            m += 1;
            if i >= len {
                return m;
            }
        }
    }

    fn has_vowel(&self, len: usize) -> bool {
        (0..len).any(|i| !self.is_consonant(i))
    }

    fn ends_double_consonant(&self, len: usize) -> bool {
        len >= 2 && self.0[len - 1] == self.0[len - 2] && self.is_consonant(len - 1)
    }

    /// `*o`: prefix ends consonant-vowel-consonant, last not w, x or y.
    fn ends_cvc(&self, len: usize) -> bool {
        len >= 3
            && self.is_consonant(len - 3)
            && !self.is_consonant(len - 2)
            && self.is_consonant(len - 1)
            && !matches!(self.0[len - 1], b'w' | b'x' | b'y')
    }

    fn ends_with(&self, suffix: &[u8]) -> bool {
        self.0.ends_with(suffix)
    }

    fn stem_len(&self, suffix: &[u8]) -> usize {
        self.0.len() - suffix.len()
    }

    fn replace_suffix(&mut self, suffix_len: usize, with: &[u8]) {
        let keep = self.0.len() - suffix_len;
        self.0.truncate(keep);
        self.0.extend_from_slice(with);
    }

    /// Longest matching rule wins; if its condition fails nothing changes.
    fn apply_rules(&mut self, rules: &[Rule], min_measure: usize) {
        let best = rules
            .iter()
            .filter(|(suffix, _)| self.ends_with(suffix))
            .max_by_key(|(suffix, _)| suffix.len());
        if let Some((suffix, replacement)) = best {
            if self.measure(self.stem_len(suffix)) > min_measure {
                self.replace_suffix(suffix.len(), replacement);
            }
        }
    }

    fn step1a(&mut self) {
        if self.ends_with(b"sses") {
            self.replace_suffix(4, b"ss");
        } else if self.ends_with(b"ies") {
            self.replace_suffix(3, b"i");
        } else if self.ends_with(b"ss") {
        } else if self.ends_with(b"s") {
            self.replace_suffix(1, b"");
        }
    }

    fn step1b(&mut self) {
        if self.ends_with(b"eed") {
            if self.measure(self.stem_len(b"eed")) > 0 {
                self.replace_suffix(1, b"");
            }
            return;
        }
        let removed = [&b"ed"[..], &b"ing"[..]]
            .into_iter()
            .find(|suffix| self.ends_with(suffix) && self.has_vowel(self.stem_len(suffix)));
        let Some(suffix) = removed else {
            return;
        };
        self.replace_suffix(suffix.len(), b"");

        if self.ends_with(b"at") || self.ends_with(b"bl") || self.ends_with(b"iz") {
            self.0.push(b'e');
        } else if self.ends_double_consonant(self.0.len()) && !matches!(self.0[self.0.len() - 1], b'l' | b's' | b'z') {
            self.0.pop();
        } else if self.measure(self.0.len()) == 1 && self.ends_cvc(self.0.len()) {
            self.0.push(b'e');
        }
    }

    fn step1c(&mut self) {
        if self.ends_with(b"y") && self.has_vowel(self.0.len() - 1) {
            let last = self.0.len() - 1;
            self.0[last] = b'i';
        }
    }

    fn step2(&mut self) {
        self.apply_rules(STEP2, 0);
    }

    fn step3(&mut self) {
        self.apply_rules(STEP3, 0);
    }

    fn step4(&mut self) {
        let best = STEP4
            .iter()
            .filter(|suffix| self.ends_with(suffix))
            .max_by_key(|suffix| suffix.len());
        let Some(suffix) = best else {
            return;
        };
        let stem = self.stem_len(suffix);
        if self.measure(stem) <= 1 {
            return;
        }
        if *suffix == b"ion" && !(stem > 0 && matches!(self.0[stem - 1], b's' | b't')) {
            return;
        }
        self.replace_suffix(suffix.len(), b"");
    }

    fn step5a(&mut self) {
        if !self.ends_with(b"e") {
            return;
        }
        let stem = self.0.len() - 1;
        let m = self.measure(stem);
        if m > 1 || (m == 1 && !self.ends_cvc(stem)) {
            self.0.pop();
        }
    }

    fn step5b(&mut self) {
        let len = self.0.len();
        if self.measure(len) > 1 && self.ends_double_consonant(len) && self.0[len - 1] == b'l' {
            self.0.pop();
        }
    }
}
