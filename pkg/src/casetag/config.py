"""Flat run configuration shared by the CLI subcommands.

Stored as key=value lines; parse -> serialize -> parse is the identity.
Path fields default to "" meaning unset.  Command-line flags override file
values, which override the defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from casetag.errors import ConfigError, ParseError

ENV_CONFIG = "CASETAG_CONFIG"


@dataclass
class RunConfig:
    # paths
    input: str = ""
    output: str = ""
    model: str = ""
    truecaser_model: str = ""
    train: str = ""
    dev: str = ""
    test: str = ""
    embeddings: str = ""
    stats: str = ""
    rules: str = ""
    gold: str = ""
    pred: str = ""
    # shared knobs
    seed: int = 1
    epochs: int = 20
    lr: float = 0.001
    dropout: float = 0.25
    pass_through_prob: float = 0.2
    caps_threshold: float = 0.20
    clip_norm: float = 5.0
    # truecaser dimensions and handling
    char_emb_dim: int = 50
    tc_hidden_dim: int = 100
    min_char_freq: int = 5
    max_sentence_chars: int = 1000
    dev_fraction: float = 0.1
    # tagger dimensions
    word_emb_dim: int = 100
    ner_char_emb_dim: int = 16
    cnn_filters: int = 128
    cnn_width: int = 3
    ner_hidden_dim: int = 256
    # tagger training
    case_mode: str = "none"
    regime: str = "fixed"
    scenario: str = "cased"
    aux_weight: float = 1.0
    patience: int = 5
    lowercase: bool = False
    augment: bool = False

    def to_lines(self) -> list[str]:
        out = []
        for f in fields(self):
            value = getattr(self, f.name)
            if f.type == "bool" or isinstance(value, bool):
                value = "true" if value else "false"
            out.append(f"{f.name}={value}")
        return out

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(self.to_lines()) + "\n")

    def apply_line(self, line: str, where: str = "<config>") -> None:
        key, sep, value = line.partition("=")
        if not sep:
            raise ParseError(f"{where}: expected key=value, got {line!r}")
        self.apply(key.strip(), value.strip(), where)

    def apply(self, key: str, value: str, where: str = "<config>") -> None:
        for f in fields(self):
            if f.name == key:
                current = getattr(self, f.name)
                try:
                    if isinstance(current, bool):
                        if value not in ("true", "false"):
                            raise ValueError(f"expected true/false, got {value!r}")
                        setattr(self, f.name, value == "true")
                    elif isinstance(current, int):
                        setattr(self, f.name, int(value))
                    elif isinstance(current, float):
                        setattr(self, f.name, float(value))
                    else:
                        setattr(self, f.name, value)
                except ValueError as exc:
                    raise ParseError(f"{where}: bad value for {key}: {exc}") from exc
                return
        raise ParseError(f"{where}: unknown config key {key!r}")

    @classmethod
    def from_file(cls, path: str, base: "RunConfig | None" = None) -> "RunConfig":
        cfg = base if base is not None else cls()
        with open(path, encoding="utf-8") as fh:
            for i, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                cfg.apply_line(line, where=f"{path} line {i}")
        return cfg

    def validate(self) -> None:
        if self.case_mode not in ("none", "predicted", "gold"):
            raise ConfigError(f"case_mode must be none|predicted|gold, got {self.case_mode!r}")
        if self.regime not in ("fixed", "finetuned", "scratch"):
            raise ConfigError(f"regime must be fixed|finetuned|scratch, got {self.regime!r}")
        if self.scenario not in ("cased", "uncased"):
            raise ConfigError(f"scenario must be cased|uncased, got {self.scenario!r}")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must be in [0, 1), got {self.dropout}")
        if not 0.0 <= self.pass_through_prob <= 1.0:
            raise ConfigError(f"pass_through_prob must be in [0, 1], got {self.pass_through_prob}")
