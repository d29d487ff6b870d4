#!/usr/bin/env python3
"""Write the synthetic fixture corpora and datasets to disk so the CLI can be
exercised end to end without any external downloads.

    python3 scripts/make_fixtures.py [--out DIR]

Produces, under DIR (default fixtures/):
    truecaser_train.txt / truecaser_test.txt     cased sentences
    ner_train.conll / ner_test.conll             cased tagged data (flat frames)
    ner_ctx_train.conll / ner_ctx_test.conll     contextual-frame variant
"""

import argparse
from pathlib import Path

from casetag.data import write_conll
from casetag.synthetic import ner_dataset, truecaser_corpus


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="fixtures", help="output directory")
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    tc_train, tc_test = truecaser_corpus(320, 55, seed=101, ambig_frac=0.0)
    (out / "truecaser_train.txt").write_text("\n".join(tc_train) + "\n", encoding="utf-8")
    (out / "truecaser_test.txt").write_text("\n".join(tc_test) + "\n", encoding="utf-8")

    train, test = ner_dataset(150, 60, seed=21, ambig_frac=0.25, unseen_frac=0.5)
    write_conll(train, str(out / "ner_train.conll"))
    write_conll(test, str(out / "ner_test.conll"))

    ctx_train, ctx_test = ner_dataset(150, 70, seed=31, ambig_frac=0.35,
                                      unseen_frac=0.5, contextual=True)
    write_conll(ctx_train, str(out / "ner_ctx_train.conll"))
    write_conll(ctx_test, str(out / "ner_ctx_test.conll"))

    print(f"wrote fixtures to {out}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
