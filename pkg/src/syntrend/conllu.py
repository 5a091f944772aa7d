"""Reading and writing treebanks in the 10-column CoNLL-U format.

Only ID, FORM, UPOS, HEAD and DEPREL are interpreted; the remaining
columns ride along untouched so a parse/serialize round trip is lossless.
Multiword-token range lines (``4-5``) and empty-node lines (``8.1``) are
kept verbatim at their original positions but excluded from the token
list. Per-sentence metadata lives in ``# key = value`` comments; ``date``
(YYYY-MM-DD) or ``decade`` (YYYY) carry the time period, ``parser`` the
producing system.
"""

from dataclasses import dataclass, field

from .errors import ConlluParseError, ConlluStructureError

N_COLUMNS = 10


@dataclass(frozen=True)
class Token:
    """One word line: 1-based position, surface form, POS, head, relation."""

    id: int
    form: str
    upos: str
    head: int
    deprel: str
    lemma: str = "_"
    xpos: str = "_"
    feats: str = "_"
    deps: str = "_"
    misc: str = "_"

    def replace_form(self, form):
        return Token(self.id, form, self.upos, self.head, self.deprel,
                     self.lemma, self.xpos, self.feats, self.deps, self.misc)

    def to_line(self):
        return "\t".join((str(self.id), self.form, self.lemma, self.upos,
                          self.xpos, self.feats, str(self.head), self.deprel,
                          self.deps, self.misc))


@dataclass
class SentenceRecord:
    """Tokens plus raw comments and pass-through range/empty-node lines.

    ``extras`` holds (k, raw_line) pairs meaning the raw line appeared
    after the k-th plain token line (k = 0 puts it before token 1).
    """

    tokens: list
    comments: list = field(default_factory=list)
    extras: list = field(default_factory=list)

    @property
    def meta(self):
        """Metadata mapping parsed from ``# key = value`` comments."""
        out = {}
        for line in self.comments:
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                out[key.strip()] = value.strip()
        return out

    def set_meta(self, key, value):
        """Add or replace a ``# key = value`` comment."""
        new_line = f"# {key} = {value}"
        for i, line in enumerate(self.comments):
            body = line[1:].strip()
            if "=" in body and body.split("=", 1)[0].strip() == key:
                self.comments[i] = new_line
                return
        self.comments.append(new_line)

    @property
    def sent_id(self):
        return self.meta.get("sent_id")

    def __len__(self):
        return len(self.tokens)


@dataclass
class Treebank:
    sentences: list
    source: str = field(default="", compare=False)

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)


def _is_plain_id(col):
    return col.isdigit()


def _is_passthrough_id(col):
    # multiword ranges like "4-5" and empty nodes like "8.1"
    for sep in ("-", "."):
        if sep in col:
            a, _, b = col.partition(sep)
            return a.isdigit() and b.isdigit()
    return False


def parse_conllu(text, source=""):
    """Parse CoNLL-U text (a string or an iterable of lines) into a Treebank.

    Raises ConlluParseError on malformed lines (with the line number) and
    ConlluStructureError on bad token ids or out-of-range heads (naming
    the sentence).
    """
    if isinstance(text, str):
        lines = text.splitlines()
    else:
        lines = [line.rstrip("\n").rstrip("\r") for line in text]

    sentences = []
    tokens, comments, extras = [], [], []
    sentence_no = 0

    def flush():
        nonlocal tokens, comments, extras, sentence_no
        if not tokens and not comments and not extras:
            return
        sentence_no += 1
        record = SentenceRecord(tokens, comments, extras)
        _check_structure(record, sentence_no)
        sentences.append(record)
        tokens, comments, extras = [], [], []

    for line_no, line in enumerate(lines, start=1):
        if line.strip() == "":
            flush()
            continue
        if line.startswith("#"):
            comments.append(line)
            continue
        cols = line.split("\t")
        if len(cols) != N_COLUMNS:
            raise ConlluParseError(
                f"expected {N_COLUMNS} tab-separated columns, got {len(cols)}",
                line_no=line_no)
        if _is_plain_id(cols[0]):
            try:
                head = int(cols[6])
            except ValueError:
                raise ConlluParseError(
                    f"HEAD column is not an integer: {cols[6]!r}", line_no=line_no)
            if not cols[1]:
                raise ConlluParseError("empty FORM column", line_no=line_no)
            tokens.append(Token(
                id=int(cols[0]), form=cols[1], lemma=cols[2], upos=cols[3],
                xpos=cols[4], feats=cols[5], head=head, deprel=cols[7],
                deps=cols[8], misc=cols[9]))
        elif _is_passthrough_id(cols[0]):
            extras.append((len(tokens), line))
        else:
            raise ConlluParseError(f"unrecognised ID column: {cols[0]!r}",
                                   line_no=line_no)
    flush()
    return Treebank(sentences, source=source)


def _check_structure(record, sentence_no):
    sent_id = record.sent_id or f"#{sentence_no}"
    n = len(record.tokens)
    for i, tok in enumerate(record.tokens, start=1):
        if tok.id != i:
            raise ConlluStructureError(
                f"token ids must run 1..{n} without gaps; "
                f"saw id {tok.id} at position {i}", sent_id=sent_id)
        if not 0 <= tok.head <= n:
            raise ConlluStructureError(
                f"head {tok.head} of token {tok.id} outside 0..{n}",
                sent_id=sent_id)


def serialize_sentence(record):
    """Render one sentence as CoNLL-U lines (no trailing blank line)."""
    lines = list(record.comments)
    extras_at = {}
    for pos, raw in record.extras:
        extras_at.setdefault(pos, []).append(raw)
    for k in range(len(record.tokens) + 1):
        lines.extend(extras_at.get(k, ()))
        if k < len(record.tokens):
            lines.append(record.tokens[k].to_line())
    return lines


def serialize_conllu(treebank):
    """Inverse of parse_conllu; an empty treebank serialises to ''."""
    chunks = []
    for record in treebank:
        chunks.append("\n".join(serialize_sentence(record)))
    if not chunks:
        return ""
    return "\n\n".join(chunks) + "\n"


def read_conllu(path):
    with open(path, encoding="utf-8") as handle:
        return parse_conllu(handle.read(), source=str(path))


def write_conllu(treebank, path):
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(serialize_conllu(treebank))
