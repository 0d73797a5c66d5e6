"""Time-stamped transcripts and augmentation annotations.

A transcript is an ordered sequence of word tokens, each with an onset and
offset in seconds relative to scan start and a sentence index. Augmentation
annotations attach extra content to a sentence; merging inserts the new
tokens directly after the sentence's last word, with onset and offset both
equal to that word's offset, so downstream temporal pooling bins them with
the end of the sentence.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError

TRANSCRIPT_COLUMNS = ("word", "onset", "offset", "sentence_id")
ANNOTATION_COLUMNS = ("sentence_id", "level", "content")
ANNOTATION_LEVELS = ("word", "sentence")


@dataclass(frozen=True)
class WordToken:
    """One token: text, onset/offset in seconds, owning sentence index."""

    text: str
    onset: float
    offset: float
    sentence_id: int


@dataclass(frozen=True)
class Transcript:
    tokens: tuple[WordToken, ...]
    story_id: str = ""

    def __post_init__(self):
        if not self.tokens:
            raise InputError("transcript has no tokens")
        prev = None
        for i, tok in enumerate(self.tokens):
            if not tok.text:
                raise InputError(f"token {i}: empty word text")
            if not (tok.onset <= tok.offset):
                raise InputError(
                    f"token {i} ({tok.text!r}): onset {tok.onset!r} exceeds "
                    f"offset {tok.offset!r}"
                )
            if tok.sentence_id < 0:
                raise InputError(f"token {i}: negative sentence_id")
            if prev is not None:
                if tok.onset < prev.onset:
                    raise InputError(
                        f"token {i} ({tok.text!r}): onset decreases "
                        f"({tok.onset!r} after {prev.onset!r})"
                    )
                if tok.sentence_id < prev.sentence_id:
                    raise InputError(
                        f"token {i}: sentence_id decreases "
                        f"({tok.sentence_id} after {prev.sentence_id})"
                    )
            prev = tok

    def __len__(self):
        return len(self.tokens)

    def onsets(self):
        return [tok.onset for tok in self.tokens]


@dataclass(frozen=True)
class AugmentationRecord:
    """Content to append to one sentence, at word or sentence granularity."""

    sentence_id: int
    level: str
    content: str

    def __post_init__(self):
        if self.level not in ANNOTATION_LEVELS:
            raise InputError(
                f"annotation level must be one of {ANNOTATION_LEVELS}, "
                f"got {self.level!r}"
            )
        if not self.content.strip():
            raise InputError(
                f"annotation for sentence {self.sentence_id} has empty content"
            )


def _decode(data) -> str:
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InputError(f"file is not valid UTF-8: {exc}") from None


def _rows(text: str, columns, what: str):
    lines = text.splitlines()
    if not lines:
        raise InputError(f"empty {what} file")
    header = tuple(lines[0].rstrip("\n").split("\t"))
    if header != columns:
        raise InputError(
            f"{what} header must be {list(columns)}, got {list(header)}"
        )
    out = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            if any(rest.strip() for rest in lines[lineno:]):
                raise InputError(f"{what} line {lineno}: blank line")
            break
        fields = line.split("\t")
        if len(fields) != len(columns):
            raise InputError(
                f"{what} line {lineno}: expected {len(columns)} fields, "
                f"got {len(fields)}"
            )
        out.append((lineno, fields))
    return out


def parse_transcript(data, story_id: str = "") -> Transcript:
    """Parse TSV bytes/str with columns word, onset, offset, sentence_id."""
    tokens: list[WordToken] = []
    for lineno, (word, onset_s, offset_s, sid_s) in _rows(
        _decode(data), TRANSCRIPT_COLUMNS, "transcript"
    ):
        if not word:
            raise InputError(f"transcript line {lineno}: empty word")
        try:
            onset, offset = float(onset_s), float(offset_s)
        except ValueError:
            raise InputError(
                f"transcript line {lineno}: onset/offset must be numeric"
            ) from None
        try:
            sid = int(sid_s)
        except ValueError:
            raise InputError(
                f"transcript line {lineno}: sentence_id must be an integer"
            ) from None
        if not (onset <= offset):
            raise InputError(
                f"transcript line {lineno}: onset {onset!r} exceeds "
                f"offset {offset!r}"
            )
        if tokens:
            if onset < tokens[-1].onset:
                raise InputError(
                    f"transcript line {lineno}: onset decreases "
                    f"({onset!r} after {tokens[-1].onset!r})"
                )
            if sid < tokens[-1].sentence_id:
                raise InputError(
                    f"transcript line {lineno}: sentence_id decreases "
                    f"({sid} after {tokens[-1].sentence_id})"
                )
        tokens.append(WordToken(word, onset, offset, sid))
    if not tokens:
        raise InputError("transcript has no tokens")
    return Transcript(tuple(tokens), story_id)


def _fmt_seconds(x: float) -> str:
    # shortest of the fixed 3-decimal form and repr that round-trips exactly;
    # the float() coercion keeps numpy scalars from repring as np.float64(...)
    x = float(x)
    s = f"{x:.3f}"
    return s if float(s) == x else repr(x)


def write_transcript(transcript: Transcript) -> bytes:
    lines = ["\t".join(TRANSCRIPT_COLUMNS)]
    for tok in transcript.tokens:
        lines.append(
            f"{tok.text}\t{_fmt_seconds(tok.onset)}\t"
            f"{_fmt_seconds(tok.offset)}\t{tok.sentence_id}"
        )
    return ("\n".join(lines) + "\n").encode("utf-8")


def load_transcript(path, story_id: str = "") -> Transcript:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read transcript {path}: {exc}") from None
    return parse_transcript(data, story_id)


def save_transcript(transcript: Transcript, path):
    with open(path, "wb") as fh:
        fh.write(write_transcript(transcript))


def parse_annotations(data) -> list[AugmentationRecord]:
    """Parse TSV bytes/str with columns sentence_id, level, content."""
    records = []
    for lineno, (sid_s, level, content) in _rows(
        _decode(data), ANNOTATION_COLUMNS, "annotations"
    ):
        try:
            sid = int(sid_s)
        except ValueError:
            raise InputError(
                f"annotations line {lineno}: sentence_id must be an integer"
            ) from None
        if level not in ANNOTATION_LEVELS:
            raise InputError(
                f"annotations line {lineno}: level must be one of "
                f"{ANNOTATION_LEVELS}, got {level!r}"
            )
        if not content.strip():
            raise InputError(f"annotations line {lineno}: empty content")
        records.append(AugmentationRecord(sid, level, content))
    return records


def load_annotations(path) -> list[AugmentationRecord]:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read annotations {path}: {exc}") from None
    return parse_annotations(data)


def sentence_spans(transcript: Transcript) -> dict[int, tuple[int, int]]:
    """Map sentence_id -> (first, last) token index. Sentences are contiguous."""
    spans: dict[int, tuple[int, int]] = {}
    for i, tok in enumerate(transcript.tokens):
        if tok.sentence_id in spans:
            spans[tok.sentence_id] = (spans[tok.sentence_id][0], i)
        else:
            spans[tok.sentence_id] = (i, i)
    return spans


def _content_words(content: str) -> list[str]:
    # commas and periods are separators, not token characters
    return content.replace(",", " ").replace(".", " ").split()


def merge_augmentation(
    transcript: Transcript, records: list[AugmentationRecord]
) -> Transcript:
    """Insert annotation content after each annotated sentence's last word.

    Inserted tokens get onset == offset == the last word's offset and the
    sentence's id, so they carry no duration of their own. Record order is
    preserved within a sentence. Raises InputError for unknown sentence ids
    or content with no words.
    """
    spans = sentence_spans(transcript)
    inserts: dict[int, list[WordToken]] = {}
    for rec in records:
        if rec.sentence_id not in spans:
            raise InputError(
                f"annotation references sentence {rec.sentence_id}, which is "
                f"not in the transcript"
            )
        words = _content_words(rec.content)
        if not words:
            raise InputError(
                f"annotation for sentence {rec.sentence_id} has no words "
                f"after tokenization: {rec.content!r}"
            )
        anchor = transcript.tokens[spans[rec.sentence_id][1]]
        inserts.setdefault(rec.sentence_id, []).extend(
            WordToken(w, anchor.offset, anchor.offset, rec.sentence_id)
            for w in words
        )
    out: list[WordToken] = []
    for i, tok in enumerate(transcript.tokens):
        out.append(tok)
        if spans[tok.sentence_id][1] == i and tok.sentence_id in inserts:
            out.extend(inserts[tok.sentence_id])
    return Transcript(tuple(out), transcript.story_id)
