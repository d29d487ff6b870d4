"""BiLSTM-CRF named-entity tagger whose per-character inputs can carry case
distributions from a truecaser.

Case vector modes:
    none       plain character embeddings
    predicted  truecaser output appended per character, detached from the
               tag-loss gradient so the tagger learns from the truecaser's
               actual mistakes
    gold       one-hot casing of the original text, the ceiling condition

Truecaser regimes (predicted mode only):
    fixed      pretrained truecaser, parameters frozen
    finetuned  pretrained truecaser, updated through an auxiliary casing loss
    scratch    randomly initialized truecaser, trained jointly via the same
               auxiliary loss
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from casetag.crf import Crf, crf_nll, viterbi_decode
from casetag.errors import AlignmentError, ConfigError, InputError
from casetag.metrics import Span, bio_decode, span_f1
from casetag.nn import (
    Adam,
    BiLSTM,
    CharCNN,
    Container,
    Embedding,
    Linear,
    Tensor,
    clip_global_norm,
    concat,
    cross_entropy,
    dropout,
    no_grad,
    prefixed,
    restore_params,
    softmax,
    stack,
    store_params,
)
from casetag.truecaser import (
    CharVocab,
    LOWER,
    Truecaser,
    UPPER,
    case_distributions_for_tokens,
    lowercase_keep_length,
    make_training_example,
    split_distributions,
)

MODE_NONE = "none"
MODE_PREDICTED = "predicted"
MODE_GOLD = "gold"
CASE_MODES = (MODE_NONE, MODE_PREDICTED, MODE_GOLD)

REGIME_FIXED = "fixed"
REGIME_FINETUNED = "finetuned"
REGIME_SCRATCH = "scratch"
REGIMES = (REGIME_FIXED, REGIME_FINETUNED, REGIME_SCRATCH)


@dataclass
class NerExample:
    tokens: list[str]
    tags: list[str]
    cased_tokens: list[str] | None = None  # original surfaces when tokens were lowercased

    def __post_init__(self):
        if len(self.tokens) != len(self.tags):
            raise InputError(f"{len(self.tokens)} tokens vs {len(self.tags)} tags")

    def source_tokens(self) -> list[str]:
        return self.cased_tokens if self.cased_tokens is not None else self.tokens


def lowercase_example(example: NerExample) -> NerExample:
    return NerExample(
        tokens=[lowercase_keep_length(tok)[0] for tok in example.tokens],
        tags=list(example.tags),
        cased_tokens=list(example.source_tokens()))


def lowercase_dataset(dataset: list[NerExample]) -> list[NerExample]:
    """Every token lowercased, tags unchanged; the original casing is kept
    aside for gold case vectors and the auxiliary loss.  Idempotent."""
    return [lowercase_example(ex) for ex in dataset]


def augment_lowercase(dataset: list[NerExample]) -> list[NerExample]:
    """The dataset followed by a fully lowercased copy of itself."""
    return list(dataset) + [lowercase_example(ex) for ex in dataset]


class EmbeddingTable:
    """Word vectors keyed by lowercased word, with a learned fallback vector."""

    def __init__(self, words: list[str], vectors: np.ndarray, unk: np.ndarray,
                 trainable: bool):
        self.words = list(words)
        self.index = {w: i for i, w in enumerate(self.words)}
        if len(self.index) != len(self.words):
            raise ConfigError("duplicate words in embedding table")
        self.vectors = Tensor(np.asarray(vectors, dtype=np.float64), requires_grad=trainable)
        self.unk = Tensor(np.asarray(unk, dtype=np.float64), requires_grad=True)
        self.trainable = trainable

    @property
    def dim(self) -> int:
        return self.vectors.data.shape[1]

    def lookup(self, word: str) -> Tensor:
        i = self.index.get(word.lower())
        return self.unk if i is None else self.vectors[i]

    @classmethod
    def random(cls, words: list[str], dim: int, rng: np.random.Generator) -> "EmbeddingTable":
        limit = np.sqrt(6.0 / (len(words) + dim)) if words else 1.0
        vectors = rng.uniform(-limit, limit, size=(len(words), dim))
        unk = rng.uniform(-limit, limit, size=dim)
        return cls(words, vectors, unk, trainable=True)

    def named_params(self):
        params = [("unk", self.unk)]
        if self.trainable:
            params.append(("vectors", self.vectors))
        return params


def build_word_list(dataset: list[NerExample]) -> list[str]:
    """Lowercased vocabulary in first-occurrence order."""
    seen: dict[str, None] = {}
    for ex in dataset:
        for tok in ex.tokens:
            seen.setdefault(tok.lower(), None)
    return list(seen)


def build_tagset(dataset: list[NerExample]) -> list[str]:
    return sorted({tag for ex in dataset for tag in ex.tags})


def build_char_vocab(dataset: list[NerExample], min_freq: int = 1) -> CharVocab:
    texts = [" ".join(ex.tokens) for ex in dataset]
    texts += [" ".join(ex.source_tokens()) for ex in dataset]
    return CharVocab.build(texts, min_freq=min_freq)


@dataclass
class NerConfig:
    word_emb_dim: int = 100
    char_emb_dim: int = 16
    cnn_filters: int = 128
    cnn_width: int = 3
    hidden_dim: int = 256
    dropout: float = 0.25
    lr: float = 0.001
    epochs: int = 50
    patience: int = 5
    seed: int = 1
    clip_norm: float = 5.0
    aux_weight: float = 1.0
    pass_through_prob: float = 0.2
    case_mode: str = MODE_NONE
    regime: str = REGIME_FIXED


def gold_case_vectors(cased_token: str) -> np.ndarray:
    """One-hot casing rows: (1,0) for an uppercase character, (0,1) otherwise."""
    rows = np.zeros((len(cased_token), 2), dtype=np.float64)
    for i, ch in enumerate(cased_token):
        rows[i, UPPER if ch.isupper() else LOWER] = 1.0
    return rows


class NerModel:
    def __init__(self, word_table: EmbeddingTable, tagset: list[str],
                 char_vocab: CharVocab, cfg: NerConfig,
                 truecaser: Truecaser | None = None, seed: int = 0):
        if cfg.case_mode not in CASE_MODES:
            raise ConfigError(f"unknown case mode {cfg.case_mode!r}; use one of {CASE_MODES}")
        if cfg.case_mode == MODE_PREDICTED and truecaser is None:
            raise ConfigError("predicted case mode needs an attached truecaser")
        rng = np.random.default_rng(seed)
        self.cfg = cfg
        self.word_table = word_table
        self.tagset = list(tagset)
        self.tag_index = {t: i for i, t in enumerate(self.tagset)}
        self.char_vocab = char_vocab
        self.truecaser = truecaser
        self.case_mode = cfg.case_mode
        char_in = cfg.char_emb_dim + (2 if cfg.case_mode != MODE_NONE else 0)
        self.char_emb = Embedding(len(char_vocab), cfg.char_emb_dim, rng)
        self.cnn = CharCNN(char_in, cfg.cnn_filters, cfg.cnn_width, rng)
        self.lstm = BiLSTM(word_table.dim + cfg.cnn_filters, cfg.hidden_dim, rng)
        self.emit = Linear(2 * cfg.hidden_dim, len(self.tagset), rng)
        self.crf = Crf(len(self.tagset), rng)

    def named_params(self):
        out = prefixed("ner.words", self.word_table)
        out += prefixed("ner.chars", self.char_emb)
        out += prefixed("ner.cnn", self.cnn)
        out += prefixed("ner.lstm", self.lstm)
        out += prefixed("ner.emit", self.emit)
        out += prefixed("ner.crf", self.crf)
        return out

    # -- forward -----------------------------------------------------------

    def token_repr(self, token: str, cased_token: str,
                   dists: np.ndarray | None = None,
                   train: bool = False, rng: np.random.Generator | None = None) -> Tensor:
        """Word vector concatenated with the char-CNN encoding of the token."""
        word_vec = self.word_table.lookup(token)
        char_mat = self.char_emb(self.char_vocab.encode(token))
        if self.case_mode == MODE_PREDICTED:
            if dists is None or len(dists) != len(token):
                got = "none" if dists is None else str(len(dists))
                raise AlignmentError(
                    f"token {token!r} needs {len(token)} case distributions, got {got}")
            char_mat = concat([char_mat, Tensor(np.asarray(dists, dtype=np.float64))], axis=1)
        elif self.case_mode == MODE_GOLD:
            if len(cased_token) != len(token):
                raise AlignmentError(
                    f"cased form {cased_token!r} does not align with token {token!r}")
            char_mat = concat([char_mat, Tensor(gold_case_vectors(cased_token))], axis=1)
        x = concat([word_vec, self.cnn(char_mat)], axis=0)
        return dropout(x, self.cfg.dropout, rng, train)

    def emissions(self, example: NerExample, train: bool = False,
                  rng: np.random.Generator | None = None,
                  dists_per_token: list[np.ndarray] | None = None) -> Tensor:
        if not example.tokens:
            raise InputError("empty sentence")
        if self.case_mode == MODE_PREDICTED and dists_per_token is None:
            dists_per_token = case_distributions_for_tokens(self.truecaser, example.tokens)
        source = example.source_tokens()
        reps = []
        for i, tok in enumerate(example.tokens):
            dists = dists_per_token[i] if dists_per_token is not None else None
            reps.append(self.token_repr(tok, source[i], dists, train, rng))
        hidden = self.lstm(stack(reps, axis=0))
        hidden = dropout(hidden, self.cfg.dropout, rng, train)
        return self.emit(hidden)

    def tag_ids(self, tags: list[str]) -> np.ndarray:
        try:
            return np.array([self.tag_index[t] for t in tags], dtype=np.intp)
        except KeyError as exc:
            raise InputError(f"tag {exc.args[0]!r} not in the model tag inventory") from exc

    # -- persistence ---------------------------------------------------------

    def to_container(self) -> Container:
        c = Container()
        c.meta["kind"] = "ner"
        for key in ("word_emb_dim", "char_emb_dim", "cnn_filters", "cnn_width",
                    "hidden_dim"):
            c.meta[key] = str(getattr(self.cfg, key))
        c.meta["dropout"] = repr(self.cfg.dropout)
        c.meta["case_mode"] = self.case_mode
        c.meta["words_trainable"] = "1" if self.word_table.trainable else "0"
        c.sections["tags"] = list(self.tagset)
        c.sections["words"] = list(self.word_table.words)
        c.sections["char_vocab"] = self.char_vocab.to_lines()
        store_params(c, self.named_params())
        if self.truecaser is not None:
            self.truecaser.to_container(c, prefix="tc")
        return c

    def save(self, path: str) -> None:
        self.to_container().save(path)

    @classmethod
    def load(cls, path: str) -> "NerModel":
        c = Container.load(path)
        cfg = NerConfig(
            word_emb_dim=int(c.meta["word_emb_dim"]),
            char_emb_dim=int(c.meta["char_emb_dim"]),
            cnn_filters=int(c.meta["cnn_filters"]),
            cnn_width=int(c.meta["cnn_width"]),
            hidden_dim=int(c.meta["hidden_dim"]),
            dropout=float(c.meta["dropout"]),
            case_mode=c.meta["case_mode"],
        )
        words = c.sections["words"]
        dim = cfg.word_emb_dim
        trainable = c.meta["words_trainable"] == "1"
        table = EmbeddingTable(words, np.zeros((len(words), dim)), np.zeros(dim), trainable)
        truecaser = None
        if "tc.vocab" in c.sections:
            truecaser = Truecaser.from_container(c, prefix="tc")
        model = cls(table, c.sections["tags"], CharVocab.from_lines(c.sections["char_vocab"]),
                    cfg, truecaser=truecaser)
        restore_params(c, model.named_params())
        return model


def predict_tags(model: NerModel, example: NerExample) -> list[str]:
    with no_grad():
        em = model.emissions(example)
    return [model.tagset[i] for i in viterbi_decode(em.data, model.crf)]


def predict(model: NerModel, example: NerExample) -> list[Span]:
    return bio_decode(predict_tags(model, example))


def evaluate_ner(model: NerModel, dataset: list[NerExample]):
    gold = [bio_decode(ex.tags) for ex in dataset]
    pred = [predict(model, ex) for ex in dataset]
    return span_f1(gold, pred)


def _dataset_has_casing(dataset: list[NerExample]) -> bool:
    return any(ch.isupper() for ex in dataset for tok in ex.source_tokens() for ch in tok)


@dataclass
class NerTrainStats:
    epoch_log: list = field(default_factory=list)
    best_dev_f1: float | None = None
    stopped_epoch: int | None = None


def train_ner(dataset: list[NerExample], cfg: NerConfig, model: NerModel,
              dev: list[NerExample] | None = None, log=None,
              stats: NerTrainStats | None = None) -> NerModel:
    """Sentence-at-a-time training; loss = CRF NLL plus (in the finetuned and
    scratch regimes) aux_weight times the truecasing cross-entropy on the
    sentence's original casing.  Tag-loss gradients never reach the truecaser."""
    if not dataset:
        raise ConfigError("empty training dataset")
    if cfg.regime not in REGIMES:
        raise ConfigError(f"unknown regime {cfg.regime!r}; use one of {REGIMES}")
    if cfg.regime != REGIME_FIXED and cfg.case_mode != MODE_PREDICTED:
        raise ConfigError(f"regime {cfg.regime!r} requires case mode 'predicted'")
    if cfg.case_mode == MODE_GOLD and not _dataset_has_casing(dataset):
        raise ConfigError("gold case vectors requested but the training text carries no casing")
    aux_active = cfg.case_mode == MODE_PREDICTED and cfg.regime in (REGIME_FINETUNED,
                                                                    REGIME_SCRATCH)
    stats = stats if stats is not None else NerTrainStats()
    rng = np.random.default_rng(cfg.seed)

    trained = list(model.named_params())
    if aux_active:
        trained += model.truecaser.named_params("tc")
    opt = Adam([p for _, p in trained], lr=cfg.lr)

    best_f1, best_state, bad_epochs = -1.0, None, 0
    for epoch in range(cfg.epochs):
        perm = rng.permutation(len(dataset))
        total = 0.0
        for idx in perm:
            ex = dataset[idx]
            gold_ids = model.tag_ids(ex.tags)
            aux = None
            dists = None
            if model.case_mode == MODE_PREDICTED:
                aux, dists = _truecaser_pass(model, ex, cfg, aux_active, rng)
            loss = crf_nll(model.emissions(ex, train=True, rng=rng,
                                           dists_per_token=dists), gold_ids, model.crf)
            if aux is not None:
                loss = loss + aux * cfg.aux_weight
            total += loss.item()
            loss.backward()
            clip_global_norm(opt.params, cfg.clip_norm)
            opt.step()
        entry = {"epoch": epoch + 1, "train_loss": total / len(dataset)}
        if dev:
            score = evaluate_ner(model, dev)
            entry["dev_f1"] = 100 * score.f1
            if cfg.patience > 0:
                if score.f1 > best_f1:
                    best_f1, bad_epochs = score.f1, 0
                    best_state = {n: p.data.copy() for n, p in trained}
                else:
                    bad_epochs += 1
        stats.epoch_log.append(entry)
        if log is not None:
            extra = f" dev_f1={entry['dev_f1']:.1f}" if "dev_f1" in entry else ""
            log(f"epoch {entry['epoch']}: train_loss={entry['train_loss']:.4f}{extra}")
        if dev and cfg.patience > 0 and bad_epochs >= cfg.patience:
            stats.stopped_epoch = epoch + 1
            break
    if best_state is not None:
        for name, p in trained:
            p.data[...] = best_state[name]
        stats.best_dev_f1 = 100 * best_f1
    return model


def _truecaser_pass(model: NerModel, ex: NerExample, cfg: NerConfig,
                    aux_active: bool, rng: np.random.Generator):
    """One truecaser forward per sentence.

    Predictions for the tagger always come from the lowercased sentence and
    are detached.  The auxiliary loss trains on the original casing, with the
    same pass-through trick as pretraining; when the pass-through draw keeps
    the casing, the prediction input differs and gets its own forward.
    """
    tokens = ex.tokens
    lowered = " ".join(lowercase_keep_length(t)[0] for t in tokens)
    if not aux_active:
        with no_grad():
            dist = model.truecaser.distributions(lowered)
        return None, split_distributions(dist, tokens)
    source_text = " ".join(ex.source_tokens())
    tc_ex = make_training_example(source_text, cfg.pass_through_prob, rng)
    logits = model.truecaser.logits(tc_ex.chars, train=True, rng=rng)
    aux = cross_entropy(logits, tc_ex.labels)
    if tc_ex.chars == lowered:
        dist = softmax(logits.detach(), axis=-1).data
    else:
        with no_grad():
            dist = model.truecaser.distributions(lowered)
    return aux, split_distributions(dist, tokens)
