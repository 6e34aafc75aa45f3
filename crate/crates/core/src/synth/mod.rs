//! Seeded generator of template-structured documents.
//!
//! Each class gets one jitter-free template: a set of keyword phrases at fixed
//! positions plus filler words. Test instances of a class shift every keyword
//! phrase by a uniform per-axis offset in `[-jitter, jitter]`, drop each
//! keyword with probability `drop_prob`, and scatter fresh filler words. The
//! same keyword never sits closer than `min_separation` (Manhattan) to itself
//! across two templates, so with `2 * jitter < min_separation` every instance
//! is nearest to its own template.

mod disk;
mod vocab;

pub use disk::{read_corpus, write_corpus, MANIFEST_FILE, TEMPLATES_FILE};
pub use vocab::{DISTRACTOR_POOL, KEYWORD_POOL};

use std::collections::HashSet;
use std::ops::RangeInclusive;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::LabeledDoc;
use crate::ingest::KeywordSpec;
use crate::model::{manhattan, normalize_text, Coord, Document, WordBox};

/// Approximate glyph metrics at 300 dpi.
const CHAR_WIDTH: u32 = 22;
const TOKEN_HEIGHT: u32 = 30;
const TOKEN_GAP: u32 = 16;
/// Extra clearance between keyword phrases of one template, on top of twice
/// the jitter. Larger than the default line and gap tolerances.
const PHRASE_CLEARANCE: u32 = 80;
const PLACEMENT_ATTEMPTS: usize = 5_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n_templates: usize,
    pub instances_per_template: usize,
    pub keywords_per_template: RangeInclusive<usize>,
    pub page_width: u32,
    pub page_height: u32,
    /// Largest per-axis shift applied to a keyword phrase in a test instance.
    pub jitter: u32,
    pub drop_prob: f64,
    /// Filler words per document.
    pub distractor_words: usize,
    /// Minimum Manhattan distance between one keyword's positions in any two
    /// templates.
    pub min_separation: u32,
    /// Let filler words reuse keyword tokens.
    pub collision_stress: bool,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n_templates: 53,
            instances_per_template: 10,
            keywords_per_template: 4..=8,
            page_width: 2480,
            page_height: 3500,
            jitter: 20,
            drop_prob: 0.1,
            distractor_words: 40,
            min_separation: 500,
            collision_stress: false,
            seed: 42,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Generation(m.to_owned()));
        if self.n_templates == 0 {
            return fail("n_templates must be positive");
        }
        if self.instances_per_template == 0 {
            return fail("instances_per_template must be positive");
        }
        let (lo, hi) = (
            *self.keywords_per_template.start(),
            *self.keywords_per_template.end(),
        );
        if lo == 0 || lo > hi {
            return fail("keywords_per_template must be a non-empty range of positive counts");
        }
        if hi > KEYWORD_POOL.len() {
            return Err(Error::Generation(format!(
                "at most {} keywords per template are available",
                KEYWORD_POOL.len()
            )));
        }
        if self.page_width == 0 || self.page_height == 0 {
            return fail("page dimensions must be positive");
        }
        if !(0.0..=1.0).contains(&self.drop_prob) {
            return fail("drop_prob must lie in [0, 1]");
        }
        if self.min_separation == 0 {
            return fail("min_separation must be positive");
        }
        Ok(())
    }
}

/// One class: its training sample and keyword list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub class_id: String,
    pub doc: Document,
    pub keywords: Vec<KeywordSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub templates: Vec<Template>,
    pub test_set: Vec<LabeledDoc>,
}

impl Corpus {
    /// `(document, keywords)` pairs ready for matrix building.
    pub fn training_samples(&self) -> impl Iterator<Item = (&Document, &[KeywordSpec])> + '_ {
        self.templates
            .iter()
            .map(|t| (&t.doc, t.keywords.as_slice()))
    }

    /// Total keyword count across templates.
    pub fn total_keywords(&self) -> usize {
        self.templates.iter().map(|t| t.keywords.len()).sum()
    }
}

/// Planted keyword positions for one template, aligned with its keywords.
pub type Layout = Vec<Coord>;

#[derive(Debug, Clone, Copy)]
struct Rect {
    top: u32,
    left: u32,
    width: u32,
    height: u32,
}

impl Rect {
    fn near(&self, other: &Rect, clearance: u32) -> bool {
        let (a, b, c) = (self, other, u64::from(clearance));
        let right = |r: &Rect| u64::from(r.left) + u64::from(r.width);
        let bottom = |r: &Rect| u64::from(r.top) + u64::from(r.height);
        u64::from(a.left) < right(b) + c
            && u64::from(b.left) < right(a) + c
            && u64::from(a.top) < bottom(b) + c
            && u64::from(b.top) < bottom(a) + c
    }
}

fn token_width(token: &str) -> u32 {
    CHAR_WIDTH * token.chars().count().max(1) as u32
}

fn phrase_width(phrase: &str) -> u32 {
    let tokens: Vec<&str> = phrase.split_whitespace().collect();
    tokens.iter().map(|t| token_width(t)).sum::<u32>() + TOKEN_GAP * (tokens.len() as u32 - 1)
}

/// Lays a phrase out left to right on one line starting at `at`.
fn phrase_words(phrase: &str, at: Coord) -> Vec<WordBox> {
    let mut left = at.left;
    phrase
        .split_whitespace()
        .map(|token| {
            let w = token_width(token);
            let word = WordBox::new(token, Coord::new(at.top, left), w, TOKEN_HEIGHT);
            left += w + TOKEN_GAP;
            word
        })
        .collect()
}

struct Generator<'a> {
    spec: &'a SynthSpec,
    rng: ChaCha8Rng,
    fillers: Vec<&'static str>,
}

impl Generator<'_> {
    fn filler_words(&mut self) -> Vec<Vec<WordBox>> {
        (0..self.spec.distractor_words)
            .map(|_| {
                let token = *self
                    .fillers
                    .choose(&mut self.rng)
                    .expect("non-empty filler pool");
                let width = token_width(token);
                let top = self
                    .rng
                    .gen_range(0..=self.spec.page_height.saturating_sub(TOKEN_HEIGHT));
                let left = self
                    .rng
                    .gen_range(0..=self.spec.page_width.saturating_sub(width));
                vec![WordBox::new(
                    token,
                    Coord::new(top, left),
                    width,
                    TOKEN_HEIGHT,
                )]
            })
            .collect()
    }

    fn document(&mut self, id: String, mut blocks: Vec<Vec<WordBox>>) -> Result<Document> {
        blocks.extend(self.filler_words());
        blocks.sort_by_key(|b| b[0].coord);
        let words = blocks.into_iter().flatten().collect();
        Document::single_page(id, self.spec.page_width, self.spec.page_height, words)
    }

    /// Chooses a position for `phrase` in template `class`, keeping clear of
    /// phrases already placed in the same template and far from the same
    /// phrase in earlier templates.
    fn place(
        &mut self,
        phrase_index: usize,
        placed_here: &[Rect],
        history: &[Vec<Coord>],
        class: usize,
    ) -> Result<Coord> {
        let spec = self.spec;
        let phrase = KEYWORD_POOL[phrase_index];
        let width = phrase_width(phrase);
        let jitter = spec.jitter;
        let max_top = spec.page_height.checked_sub(TOKEN_HEIGHT + jitter);
        let max_left = spec.page_width.checked_sub(width + jitter);
        let (Some(max_top), Some(max_left)) = (max_top, max_left) else {
            return Err(Error::Generation(format!(
                "page {}x{} cannot hold {phrase:?} with jitter {jitter}",
                spec.page_width, spec.page_height
            )));
        };
        if max_top < jitter || max_left < jitter {
            return Err(Error::Generation(format!(
                "page {}x{} cannot hold {phrase:?} with jitter {jitter}",
                spec.page_width, spec.page_height
            )));
        }
        let clearance = 2 * jitter + PHRASE_CLEARANCE;
        for _ in 0..PLACEMENT_ATTEMPTS {
            let at = Coord::new(
                self.rng.gen_range(jitter..=max_top),
                self.rng.gen_range(jitter..=max_left),
            );
            let rect = Rect {
                top: at.top,
                left: at.left,
                width,
                height: TOKEN_HEIGHT,
            };
            if placed_here.iter().any(|r| r.near(&rect, clearance)) {
                continue;
            }
            if history[phrase_index]
                .iter()
                .any(|&prev| manhattan(prev, at) < u64::from(spec.min_separation))
            {
                continue;
            }
            return Ok(at);
        }
        Err(Error::Generation(format!(
            "could not place {phrase:?} in template {} at least {} px from its other uses",
            class + 1,
            spec.min_separation
        )))
    }
}

pub fn gen_corpus(spec: &SynthSpec) -> Result<Corpus> {
    gen_corpus_with_layout(spec).map(|(corpus, _)| corpus)
}

/// Generates a corpus and also returns each template's planted keyword
/// coordinates (aligned with `Template::keywords`).
pub fn gen_corpus_with_layout(spec: &SynthSpec) -> Result<(Corpus, Vec<Layout>)> {
    spec.validate()?;
    let keyword_tokens: HashSet<String> = KEYWORD_POOL
        .iter()
        .flat_map(|k| {
            normalize_text(k)
                .split(' ')
                .map(str::to_owned)
                .collect::<Vec<_>>()
        })
        .collect();
    let mut fillers: Vec<&'static str> = DISTRACTOR_POOL
        .iter()
        .copied()
        .filter(|d| !keyword_tokens.contains(&normalize_text(d)))
        .collect();
    if spec.collision_stress {
        fillers.extend(KEYWORD_POOL.iter().flat_map(|k| k.split_whitespace()));
    }

    let mut gen = Generator {
        spec,
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        fillers,
    };
    let digits = (spec.n_templates - 1).to_string().len().max(2);
    let test_digits = (spec.instances_per_template - 1).to_string().len().max(3);
    let mut history: Vec<Vec<Coord>> = vec![Vec::new(); KEYWORD_POOL.len()];
    let mut templates = Vec::with_capacity(spec.n_templates);
    let mut layouts = Vec::with_capacity(spec.n_templates);
    let mut chosen_phrases = Vec::with_capacity(spec.n_templates);

    for class in 0..spec.n_templates {
        let class_id = format!("template_{class:0digits$}");
        let count = gen.rng.gen_range(spec.keywords_per_template.clone());
        let phrases = sample(&mut gen.rng, KEYWORD_POOL.len(), count).into_vec();
        let mut rects = Vec::with_capacity(count);
        let mut layout = Vec::with_capacity(count);
        let mut keywords = Vec::with_capacity(count);
        for &p in &phrases {
            let at = gen.place(p, &rects, &history, class)?;
            rects.push(Rect {
                top: at.top,
                left: at.left,
                width: phrase_width(KEYWORD_POOL[p]),
                height: TOKEN_HEIGHT,
            });
            layout.push(at);
            let value = format!(
                "{:06}-{:08}",
                gen.rng.gen_range(0..1_000_000u32),
                gen.rng.gen_range(0..100_000_000u32)
            );
            keywords.push(KeywordSpec::new(class_id.as_str(), KEYWORD_POOL[p], value)?);
        }
        for (&p, &at) in phrases.iter().zip(&layout) {
            history[p].push(at);
        }
        let blocks = phrases
            .iter()
            .zip(&layout)
            .map(|(&p, &at)| phrase_words(KEYWORD_POOL[p], at))
            .collect();
        let doc = gen.document(class_id.clone(), blocks)?;
        templates.push(Template {
            class_id,
            doc,
            keywords,
        });
        layouts.push(layout);
        chosen_phrases.push(phrases);
    }

    let mut test_set = Vec::with_capacity(spec.n_templates * spec.instances_per_template);
    for (template, (phrases, layout)) in templates.iter().zip(chosen_phrases.iter().zip(&layouts)) {
        for n in 0..spec.instances_per_template {
            let mut blocks = Vec::new();
            for (&p, &at) in phrases.iter().zip(layout) {
                if gen.rng.gen_bool(spec.drop_prob) {
                    continue;
                }
                let j = i64::from(spec.jitter);
                let dt = gen.rng.gen_range(-j..=j);
                let dl = gen.rng.gen_range(-j..=j);
                let shifted = Coord::new(
                    (i64::from(at.top) + dt) as u32,
                    (i64::from(at.left) + dl) as u32,
                );
                blocks.push(phrase_words(KEYWORD_POOL[p], shifted));
            }
            let id = format!("{}/test_{n:0test_digits$}", template.class_id);
            let doc = gen.document(id, blocks)?;
            test_set.push(LabeledDoc {
                doc,
                true_class: template.class_id.clone(),
            });
        }
    }
    Ok((
        Corpus {
            templates,
            test_set,
        },
        layouts,
    ))
}
