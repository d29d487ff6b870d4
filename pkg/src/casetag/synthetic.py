"""Deterministic synthetic fixtures: a small world of person and place names,
common nouns, and sentence frames.

Entities are capitalized wherever they occur; everything else stays lowercase
(first words included, mirroring a normalized corpus).  A configurable slice
of person-name slots is filled with words that also occur as common nouns, so
casing is the only reliable signal on those tokens.  Test splits can draw on
names never seen in the tagger's training data but present in the truecasing
corpus, which is what makes pretraining worth anything here.
"""

from __future__ import annotations

import numpy as np

from casetag.ner import NerExample

PER_TRAIN = [
    "alice", "robert", "clara", "victor", "henry", "oliver", "teresa", "samuel",
    "ingrid", "walter", "nora", "felix", "diane", "marcus", "elena", "gordon",
    "priya", "anton", "lucia", "harold", "yusuf", "greta", "simon", "amara",
]
PER_EXTRA = [
    "dmitri", "carla", "bruno", "sylvia", "otto", "renata", "pavel", "jasmine",
    "hugo", "celine", "ravi", "marta",
]
AMBIG = [
    "mark", "bill", "rose", "jack", "grace", "hazel", "iris", "penny", "ruby",
    "violet",
]
SURNAMES = [
    "miller", "baker", "cooper", "fisher", "mason", "porter", "turner",
    "walker", "harper", "carter",
]
LOC_TRAIN = [
    "boston", "dublin", "oslo", "cairo", "lisbon", "madrid", "quebec",
    "geneva", "nairobi", "bergen", "osaka", "perth", "delhi", "turin",
]
LOC_EXTRA = [
    "zagreb", "tunis", "quito", "manila", "bonn", "leeds", "cusco", "dakar",
]
COMMON = [
    "cup", "table", "ladder", "bread", "fish", "paper", "stone", "chair",
    "basket", "lamp", "coat", "wheel", "box", "kettle", "rope", "jar",
] + AMBIG

FRAMES = [
    ("X", "visited", "G", "yesterday", "."),
    ("X", "bought", "a", "C", "at", "the", "market", "."),
    ("X", "spoke", "with", "X", "about", "the", "C", "."),
    ("the", "C", "from", "G", "was", "heavy", "."),
    ("X", "lives", "near", "G", "."),
    ("people", "from", "G", "brought", "C", "."),
    ("X", "found", "the", "C", "by", "the", "river", "."),
    ("X", "and", "X", "walked", "to", "G", "."),
    ("yesterday", "X", "sold", "the", "C", "."),
    ("the", "old", "C", "pleased", "X", "."),
]

# per-frame entity probabilities for the "contextual" world, where the frame
# itself carries most of the signal about whether a slot holds an entity
CONTEXTUAL_X_P = [0.9, 0.85, 0.9, 0.5, 0.85, 0.5, 0.8, 0.85, 0.8, 0.8]
CONTEXTUAL_G_P = [0.85, 0.5, 0.5, 0.7, 0.9, 0.85, 0.5, 0.9, 0.5, 0.5]


def _cap(word: str) -> str:
    return word[0].upper() + word[1:]


def _fill_sentence(rng: np.random.Generator, per_pool: list[str], loc_pool: list[str],
                   ambig_frac: float, contextual: bool = False,
                   surname_prob: float = 0.3) -> tuple[list[str], list[str]]:
    frame_id = int(rng.integers(len(FRAMES)))
    frame = FRAMES[frame_id]
    x_prob = CONTEXTUAL_X_P[frame_id] if contextual else 0.5
    g_prob = CONTEXTUAL_G_P[frame_id] if contextual else 0.5
    tokens: list[str] = []
    tags: list[str] = []
    for slot in frame:
        if slot == "X":
            if rng.random() < x_prob:
                if AMBIG and rng.random() < ambig_frac:
                    name = AMBIG[rng.integers(len(AMBIG))]
                else:
                    name = per_pool[rng.integers(len(per_pool))]
                tokens.append(_cap(name))
                tags.append("B-PER")
                if rng.random() < surname_prob:
                    tokens.append(_cap(SURNAMES[rng.integers(len(SURNAMES))]))
                    tags.append("I-PER")
            else:
                tokens.append(COMMON[rng.integers(len(COMMON))])
                tags.append("O")
        elif slot == "G":
            if rng.random() < g_prob:
                tokens.append(_cap(loc_pool[rng.integers(len(loc_pool))]))
                tags.append("B-LOC")
            else:
                tokens.append(COMMON[rng.integers(len(COMMON))])
                tags.append("O")
        elif slot == "C":
            tokens.append(COMMON[rng.integers(len(COMMON))])
            tags.append("O")
        else:
            tokens.append(slot)
            tags.append("O")
    return tokens, tags


def truecaser_corpus(n_train: int, n_test: int, seed: int, ambig_frac: float = 0.0,
                     contextual: bool = False) -> tuple[list[str], list[str]]:
    """Cased sentences over the full name inventory; entity-filled slots are
    capitalized, everything else is lowercase."""
    rng = np.random.default_rng(seed)
    per_pool = PER_TRAIN + PER_EXTRA
    loc_pool = LOC_TRAIN + LOC_EXTRA
    out = []
    for _ in range(n_train + n_test):
        tokens, _ = _fill_sentence(rng, per_pool, loc_pool, ambig_frac, contextual)
        out.append(" ".join(tokens))
    return out[:n_train], out[n_train:]


def ner_dataset(n_train: int, n_test: int, seed: int, ambig_frac: float = 0.25,
                unseen_frac: float = 0.5,
                contextual: bool = False) -> tuple[list[NerExample], list[NerExample]]:
    """Cased tagged sentences; a configurable share of test sentences draws
    its names from pools unseen in training.

    contextual=False gives flat 50/50 entity slots, so casing is the only
    reliable signal on ambiguous fills; contextual=True biases slots per
    frame, so context carries signal that survives lowercasing.
    """
    rng = np.random.default_rng(seed)
    train = []
    for _ in range(n_train):
        tokens, tags = _fill_sentence(rng, PER_TRAIN, LOC_TRAIN, ambig_frac, contextual)
        train.append(NerExample(tokens, tags))
    test = []
    for _ in range(n_test):
        per_pool = PER_EXTRA if rng.random() < unseen_frac else PER_TRAIN
        loc_pool = LOC_EXTRA if rng.random() < unseen_frac else LOC_TRAIN
        tokens, tags = _fill_sentence(rng, per_pool, loc_pool, ambig_frac, contextual)
        test.append(NerExample(tokens, tags))
    return train, test
