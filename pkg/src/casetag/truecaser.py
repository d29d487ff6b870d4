"""Character-level truecaser: a BiLSTM over the characters of a sentence with
a two-way softmax per position (uppercase vs lowercase).

Training data is manufactured from any cased text: the input is the
lowercased sentence, the labels are the original case values.  A configurable
fraction of sentences is passed through with casing intact so the model
learns to keep capitals it is given.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from casetag.errors import ConfigError, InputError
from casetag.metrics import PrfScore, char_f1
from casetag.nn import (
    Adam,
    BiLSTM,
    Container,
    Embedding,
    Linear,
    Tensor,
    clip_global_norm,
    cross_entropy,
    dropout,
    no_grad,
    prefixed,
    restore_params,
    softmax,
    store_params,
)

# class order of every case distribution: index 0 = uppercase, 1 = lowercase
UPPER, LOWER = 0, 1


def case_labels(text: str) -> np.ndarray:
    """Per-character gold labels; anything without an uppercase form is lowercase."""
    return np.array([UPPER if ch.isupper() else LOWER for ch in text], dtype=np.intp)


def lowercase_keep_length(text: str) -> tuple[str, int]:
    """Simple per-character lowercasing.

    Characters whose lowercase form is not a single character are passed
    through unchanged; the count of such characters is returned.
    """
    out = []
    skipped = 0
    for ch in text:
        low = ch.lower()
        if len(low) == 1:
            out.append(low)
        else:
            out.append(ch)
            skipped += 1
    return "".join(out), skipped


def uppercase_char(ch: str) -> str:
    up = ch.upper()
    return up if len(up) == 1 else ch


@dataclass
class TruecaserExample:
    chars: str
    labels: np.ndarray  # one label per character, from the original casing

    def __post_init__(self):
        if len(self.chars) != len(self.labels):
            raise InputError(
                f"{len(self.chars)} characters vs {len(self.labels)} labels")


def make_training_example(sentence: str, pass_through_prob: float,
                          rng: np.random.Generator) -> TruecaserExample:
    """Lowercase the input (or keep it, with probability pass_through_prob);
    labels always come from the original casing."""
    if not sentence:
        raise InputError("empty sentence")
    labels = case_labels(sentence)
    if pass_through_prob > 0.0 and rng.random() < pass_through_prob:
        chars = sentence
    else:
        chars, _ = lowercase_keep_length(sentence)
    return TruecaserExample(chars, labels)


class CharVocab:
    """Characters mapped to ids; id 0 is the unknown character."""

    UNK = 0

    def __init__(self, chars: list[str]):
        self.chars = list(chars)
        self.index = {ch: i + 1 for i, ch in enumerate(self.chars)}

    def __len__(self) -> int:
        return len(self.chars) + 1

    def encode(self, text: str) -> np.ndarray:
        return np.array([self.index.get(ch, self.UNK) for ch in text], dtype=np.intp)

    @classmethod
    def build(cls, sentences, min_freq: int = 1) -> "CharVocab":
        """Count characters of each sentence and its lowercased form, so both
        cased (pass-through) and lowercased inputs are covered."""
        counts: dict[str, int] = {}
        for sent in sentences:
            lowered, _ = lowercase_keep_length(sent)
            for ch in sent + lowered:
                counts[ch] = counts.get(ch, 0) + 1
        kept = sorted((ch for ch, n in counts.items() if n >= min_freq),
                      key=lambda ch: (-counts[ch], ch))
        return cls(kept)

    def to_lines(self) -> list[str]:
        return [f"{i + 1}\t{ord(ch)}" for i, ch in enumerate(self.chars)]

    @classmethod
    def from_lines(cls, lines: list[str]) -> "CharVocab":
        chars = []
        for line in lines:
            _, _, code = line.partition("\t")
            chars.append(chr(int(code)))
        return cls(chars)


@dataclass
class TruecaserConfig:
    char_emb_dim: int = 50
    hidden_dim: int = 100
    dropout: float = 0.25
    epochs: int = 20
    lr: float = 0.001
    seed: int = 1
    pass_through_prob: float = 0.2
    min_char_freq: int = 5
    max_sentence_chars: int = 1000
    dev_fraction: float = 0.1
    clip_norm: float = 5.0


class Truecaser:
    def __init__(self, vocab: CharVocab, char_emb_dim: int = 50, hidden_dim: int = 100,
                 dropout_rate: float = 0.25, seed: int = 0):
        rng = np.random.default_rng(seed)
        self.vocab = vocab
        self.char_emb_dim = char_emb_dim
        self.hidden_dim = hidden_dim
        self.dropout_rate = dropout_rate
        self.emb = Embedding(len(vocab), char_emb_dim, rng)
        self.rnn = BiLSTM(char_emb_dim, hidden_dim, rng)
        self.out = Linear(2 * hidden_dim, 2, rng)

    def named_params(self, prefix: str = "tc"):
        return (prefixed(f"{prefix}.emb", self.emb)
                + prefixed(f"{prefix}.rnn", self.rnn)
                + prefixed(f"{prefix}.out", self.out))

    def logits(self, text: str, train: bool = False,
               rng: np.random.Generator | None = None) -> Tensor:
        """(n, 2) class scores, one row per input character."""
        if not text:
            raise InputError("truecaser forward over an empty string")
        vecs = self.emb(self.vocab.encode(text))
        vecs = dropout(vecs, self.dropout_rate, rng, train)
        hidden = self.rnn(vecs)
        hidden = dropout(hidden, self.dropout_rate, rng, train)
        return self.out(hidden)

    def distributions(self, text: str) -> np.ndarray:
        """(n, 2) rows (p_upper, p_lower); no gradients, evaluation mode."""
        with no_grad():
            return softmax(self.logits(text), axis=-1).data

    # -- persistence -------------------------------------------------------

    def to_container(self, container: Container | None = None, prefix: str = "tc") -> Container:
        c = container if container is not None else Container()
        c.meta[f"{prefix}.char_emb_dim"] = str(self.char_emb_dim)
        c.meta[f"{prefix}.hidden_dim"] = str(self.hidden_dim)
        c.meta[f"{prefix}.dropout"] = repr(self.dropout_rate)
        c.sections[f"{prefix}.vocab"] = self.vocab.to_lines()
        store_params(c, self.named_params(prefix))
        return c

    @classmethod
    def from_container(cls, c: Container, prefix: str = "tc") -> "Truecaser":
        vocab = CharVocab.from_lines(c.sections[f"{prefix}.vocab"])
        model = cls(vocab,
                    char_emb_dim=int(c.meta[f"{prefix}.char_emb_dim"]),
                    hidden_dim=int(c.meta[f"{prefix}.hidden_dim"]),
                    dropout_rate=float(c.meta[f"{prefix}.dropout"]))
        restore_params(c, model.named_params(prefix))
        return model

    def save(self, path: str) -> None:
        self.to_container().save(path)

    @classmethod
    def load(cls, path: str) -> "Truecaser":
        return cls.from_container(Container.load(path))


@dataclass
class TrainStats:
    skipped_empty: int = 0
    truncated: int = 0
    epoch_log: list = field(default_factory=list)


def train_truecaser(sentences: list[str], cfg: TruecaserConfig,
                    log=None, stats: TrainStats | None = None) -> Truecaser:
    """Per-character cross-entropy training; deterministic given cfg.seed."""
    sentences = [s for s in sentences]
    if not sentences:
        raise ConfigError("empty training corpus")
    stats = stats if stats is not None else TrainStats()
    rng = np.random.default_rng(cfg.seed)

    order = rng.permutation(len(sentences))
    n_dev = int(len(sentences) * cfg.dev_fraction)
    dev = [sentences[i] for i in order[:n_dev]]
    train = [sentences[i] for i in order[n_dev:]]
    if not train:
        raise ConfigError("no training sentences left after the held-out split")

    vocab = CharVocab.build(train, min_freq=cfg.min_char_freq)
    model = Truecaser(vocab, cfg.char_emb_dim, cfg.hidden_dim, cfg.dropout,
                      seed=int(rng.integers(2 ** 31)))
    params = model.named_params()
    opt = Adam([p for _, p in params], lr=cfg.lr)

    for epoch in range(cfg.epochs):
        perm = rng.permutation(len(train))
        total, count = 0.0, 0
        for idx in perm:
            sent = train[idx]
            if not sent:
                stats.skipped_empty += 1
                continue
            if len(sent) > cfg.max_sentence_chars:
                sent = sent[:cfg.max_sentence_chars]
                stats.truncated += 1
            ex = make_training_example(sent, cfg.pass_through_prob, rng)
            loss = cross_entropy(model.logits(ex.chars, train=True, rng=rng), ex.labels)
            total += loss.item()
            count += 1
            loss.backward()
            clip_global_norm(opt.params, cfg.clip_norm)
            opt.step()
        entry = {"epoch": epoch + 1, "train_loss": total / max(count, 1),
                 "dev_loss": held_out_loss(model, dev)}
        stats.epoch_log.append(entry)
        if log is not None:
            log(f"epoch {entry['epoch']}: train_loss={entry['train_loss']:.4f} "
                f"dev_loss={entry['dev_loss']:.4f}")
    return model


def held_out_loss(model: Truecaser, sentences: list[str]) -> float:
    """Mean per-character loss on fully lowercased inputs; NaN-free even when empty."""
    if not sentences:
        return 0.0
    total, count = 0.0, 0
    with no_grad():
        for sent in sentences:
            if not sent:
                continue
            lowered, _ = lowercase_keep_length(sent)
            loss = cross_entropy(model.logits(lowered), case_labels(sent))
            total += loss.item() * len(sent)
            count += len(sent)
    return total / max(count, 1)


def apply_truecaser(model: Truecaser, text: str) -> str:
    """Uppercase exactly the characters predicted uppercase; input text is
    consumed as given (pass-through training makes cased input meaningful)."""
    if not text:
        return text
    dist = model.distributions(text)
    out = []
    for ch, row in zip(text, dist):
        out.append(uppercase_char(ch) if int(np.argmax(row)) == UPPER else ch)
    return "".join(out)


def split_distributions(dist: np.ndarray, tokens: list[str]) -> list[np.ndarray]:
    """Split per-character rows over space-joined tokens into one block per
    token, dropping the rows at the joining spaces."""
    expected = sum(len(t) for t in tokens) + max(len(tokens) - 1, 0)
    if len(dist) != expected:
        raise InputError(
            f"{len(dist)} distributions cannot cover {len(tokens)} tokens "
            f"joined by spaces (need {expected})")
    out = []
    offset = 0
    for tok in tokens:
        out.append(dist[offset:offset + len(tok)])
        offset += len(tok) + 1  # skip the joining space
    return out


def case_distributions_for_tokens(model: Truecaser, tokens: list[str]) -> list[np.ndarray]:
    """Run the truecaser over the space-joined, lowercased token sequence and
    return one (len(token), 2) distribution block per token."""
    if not tokens:
        return []
    lowered = [lowercase_keep_length(tok)[0] for tok in tokens]
    return split_distributions(model.distributions(" ".join(lowered)), tokens)


def eval_truecaser(model: Truecaser, cased_sentences: list[str]) -> PrfScore:
    """Char-level P/R/F1 of predictions on the lowercased corpus against the
    original casing."""
    preds = []
    for sent in cased_sentences:
        lowered, _ = lowercase_keep_length(sent)
        preds.append(apply_truecaser(model, lowered))
    return char_f1(cased_sentences, preds)
