"""Adversarial treebank generation.

Both attacks rewrite token forms only: ids, heads and relations stay
byte-identical, so downstream metric deltas isolate the surface noise.
The historical attack substitutes whole forms from a lexicon; the OCR
attack corrupts a fixed share of characters in a few tokens per
sentence, never reproducing the original character, so the Hamming
distance of an attacked token equals the number of corrupted positions.
"""

import logging
import math
from dataclasses import dataclass, field

from .conllu import SentenceRecord, Treebank
from .errors import UsageError
from .seeding import derive_rng
from .tree import PUNCT_TAG

log = logging.getLogger(__name__)

GERMAN_ALPHABET = "abcdefghijklmnopqrstuvwxyzäöüß"
ENGLISH_ALPHABET = "abcdefghijklmnopqrstuvwxyz"
ALPHABET_PROFILES = {"german": GERMAN_ALPHABET, "english": ENGLISH_ALPHABET}


@dataclass(frozen=True)
class SpellingLexicon:
    """Case-sensitive modern form -> historical form substitutions."""

    mapping: dict

    def __post_init__(self):
        for modern, historical in self.mapping.items():
            if not modern:
                raise UsageError("lexicon keys must be non-empty")
            if modern == historical:
                raise UsageError(f"identity mapping for {modern!r}")

    @classmethod
    def from_file(cls, path):
        """Load `modern<TAB>historical` pairs; `#` lines are comments."""
        mapping = {}
        with open(path, encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise UsageError(
                        f"{path}:{line_no}: expected two tab-separated fields")
                mapping[parts[0]] = parts[1]
        return cls(mapping)


@dataclass(frozen=True)
class AttackConfig:
    char_fraction: float = 0.10
    tokens_per_sentence: int = 1
    alphabet: str = GERMAN_ALPHABET
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.char_fraction <= 1:
            raise UsageError("char fraction must be in (0, 1]")
        if self.tokens_per_sentence < 1:
            raise UsageError("tokens per sentence must be >= 1")
        if not self.alphabet:
            raise UsageError("alphabet must be non-empty")


def _copy_record(record, tokens):
    return SentenceRecord(tokens=tokens, comments=list(record.comments),
                          extras=list(record.extras))


def historical_attack(treebank, lexicon):
    """Replace every token form found in the lexicon by its old spelling.

    Returns the perturbed treebank and the number of sentences with at
    least one replacement.
    """
    sentences = []
    affected = 0
    for record in treebank:
        hit = False
        tokens = []
        for tok in record.tokens:
            replacement = lexicon.mapping.get(tok.form)
            if replacement is not None:
                tokens.append(tok.replace_form(replacement))
                hit = True
            else:
                tokens.append(tok)
        sentences.append(_copy_record(record, tokens))
        affected += hit
    return Treebank(sentences, source=treebank.source), affected


def corrupted_char_count(fraction, length):
    """Characters to replace: round-half-up of fraction x length, at least 1."""
    return min(length, max(1, math.floor(fraction * length + 0.5)))


def _corrupt_form(form, fraction, alphabet, rng):
    chars = list(form)
    k = corrupted_char_count(fraction, len(chars))
    positions = sorted(int(p) for p in rng.choice(len(chars), size=k, replace=False))
    for pos in positions:
        original = chars[pos]
        if set(alphabet) == {original}:
            # nothing else to draw; skip this position
            log.warning("alphabet offers no replacement for %r", original)
            continue
        while True:
            drawn = alphabet[int(rng.integers(0, len(alphabet)))]
            if drawn != original:
                break
        chars[pos] = drawn
    return "".join(chars)


def ocr_attack(treebank, config):
    """Corrupt characters in a few non-punctuation tokens per sentence.

    Target tokens are drawn uniformly per sentence from a generator
    derived from (seed, sent_id); sentences with fewer candidates than
    requested are attacked as far as possible and logged.
    """
    sentences = []
    for index, record in enumerate(treebank):
        key = record.sent_id if record.sent_id is not None else index
        rng = derive_rng(config.seed, "ocr", key)
        candidates = [i for i, tok in enumerate(record.tokens)
                      if tok.upos != PUNCT_TAG and len(tok.form) >= 1]
        take = min(config.tokens_per_sentence, len(candidates))
        if take < config.tokens_per_sentence:
            log.warning("sentence %s: only %d attackable tokens of %d requested",
                        key, len(candidates), config.tokens_per_sentence)
        tokens = list(record.tokens)
        if take:
            picks = rng.choice(len(candidates), size=take, replace=False)
            for pick in sorted(int(p) for p in picks):
                i = candidates[pick]
                corrupted = _corrupt_form(tokens[i].form, config.char_fraction,
                                          config.alphabet, rng)
                tokens[i] = tokens[i].replace_form(corrupted)
        sentences.append(_copy_record(record, tokens))
    return Treebank(sentences, source=treebank.source)
