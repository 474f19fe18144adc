#!/usr/bin/env python3
# Copyright 2026 The snrg Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes a random 4-gram ARPA model and kenlm scores for it.

Output (frozen into tests/data, regenerate only on purpose):
  lm4.arpa         the model
  lm4_scores.tsv   sentence <TAB> full score (<s> ... </s>) <TAB> score with
                   no boundary symbols and no outside context
"""

import os
import random
import sys

import kenlm

ORDER = 4


def main(out_dir):
    rng = random.Random(20261014)
    vocab = ["w%02d" % i for i in range(25)]
    text = []
    for _ in range(40):
        n = rng.randint(3, 8)
        text.append(["<s>"] + [rng.choice(vocab[: rng.randint(5, 25)]) for _ in range(n)] + ["</s>"])

    grams = [set() for _ in range(ORDER + 1)]
    for sent in text:
        for n in range(1, ORDER + 1):
            for i in range(len(sent) - n + 1):
                grams[n].add(tuple(sent[i : i + n]))
    grams[1].add(("<unk>",))

    lines = ["\\data\\"]
    for n in range(1, ORDER + 1):
        lines.append("ngram %d=%d" % (n, len(grams[n])))
    for n in range(1, ORDER + 1):
        lines.append("")
        lines.append("\\%d-grams:" % n)
        for g in sorted(grams[n]):
            prob = -99.0 if g == ("<s>",) else round(rng.uniform(-3.0, -0.05), 6)
            fields = ["%.6f" % prob, " ".join(g)]
            if n < ORDER and g != ("</s>",):
                fields.append("%.6f" % round(rng.uniform(-1.2, 0.0), 6))
            lines.append("\t".join(fields))
    lines.append("")
    lines.append("\\end\\")
    arpa = os.path.join(out_dir, "lm4.arpa")
    with open(arpa, "w") as f:
        f.write("\n".join(lines) + "\n")

    model = kenlm.Model(arpa)
    sentences = [""]
    for _ in range(49):
        words = [rng.choice(vocab + ["zz_unknown", "qq_unknown"]) for _ in range(rng.randint(1, 10))]
        sentences.append(" ".join(words))
    with open(os.path.join(out_dir, "lm4_scores.tsv"), "w") as f:
        for s in sentences:
            full = model.score(s, bos=True, eos=True)
            bare = model.score(s, bos=False, eos=False)
            f.write("%s\t%.10f\t%.10f\n" % (s, full, bare))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "data"))
