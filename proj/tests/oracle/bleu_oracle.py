# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The Mondegreen Authors
#
# Independent BLEU oracle. This is a from-scratch evaluation of the declared
# BLEU variant, used to compute the expected values frozen into
# tests/test_eval.cpp and the acceptance suite. Keep it independent of the
# C++ implementation: if the two ever disagree, the C++ side is wrong until
# proven otherwise.
#
# Declared variant:
#   * tokens are space-separated words of normalized queries
#   * n-gram precisions for n = 1..N with N = min(4, len(candidate))
#   * reference-clipped counts; add-one smoothing on numerator and
#     denominator for n >= 2 (never for n = 1)
#   * uniform geometric mean over the N precisions; BLEU = 0 if p1 = 0
#   * brevity penalty exp(1 - r/c) when c < r, else 1
#   * corpus BLEU pools raw match/total counts over all pairs (smoothing
#     applied once, at the pooled level) with a single pooled brevity penalty
#
# Run:  python3 tests/oracle/bleu_oracle.py

import math
from fractions import Fraction


def ngrams(tokens, n):
    counts = {}
    for i in range(len(tokens) - n + 1):
        g = tuple(tokens[i:i + n])
        counts[g] = counts.get(g, 0) + 1
    return counts


def pair_stats(candidate, reference, n):
    cand = candidate.split()
    ref = reference.split()
    if len(cand) < n:
        return 0, 0
    cg = ngrams(cand, n)
    rg = ngrams(ref, n)
    matched = sum(min(c, rg.get(g, 0)) for g, c in cg.items())
    total = len(cand) - n + 1
    return matched, total


def bleu(pairs):
    """pairs: list of (candidate, reference) strings."""
    max_n = min(4, max(len(c.split()) for c, _ in pairs))
    cand_len = sum(len(c.split()) for c, _ in pairs)
    ref_len = sum(len(r.split()) for _, r in pairs)

    log_sum = Fraction(0)
    precisions = []
    for n in range(1, max_n + 1):
        m = sum(pair_stats(c, r, n)[0] for c, r in pairs)
        t = sum(pair_stats(c, r, n)[1] for c, r in pairs)
        smooth = 0 if n == 1 else 1
        p = Fraction(m + smooth, t + smooth)
        precisions.append(p)
    if precisions[0] == 0:
        return 0.0
    log_mean = sum(math.log(float(p)) for p in precisions) / max_n
    bp = 1.0 if cand_len >= ref_len else math.exp(1.0 - ref_len / cand_len)
    return bp * math.exp(log_mean)


def sentence_bleu(candidate, reference):
    return bleu([(candidate, reference)])


FIXTURES_SENTENCE = [
    ("roxanne", "roxanne songs"),
    ("work out music", "look out music"),
    ("house tours", "how stores"),
    ("gaming chair", "gaming chair"),
    ("rock sand castle", "rocks and castle"),
]

FIXTURE_CORPUS_3PAIR = [
    ("roxanne", "roxanne songs"),
    ("work out music", "look out music"),
    ("gaming chair", "gaming chair"),
]


def main():
    print("sentence fixtures:")
    for cand, ref in FIXTURES_SENTENCE:
        print("  sentence_bleu(%r, %r) = %.17g" % (cand, ref, sentence_bleu(cand, ref)))
    print("corpus fixture (3 pairs): %.17g" % bleu(FIXTURE_CORPUS_3PAIR))
    single = bleu([FIXTURE_CORPUS_3PAIR[0]])
    print("corpus of single pair:    %.17g" % single)
    print("matches sentence:         %s" % (single == sentence_bleu(*FIXTURE_CORPUS_3PAIR[0])))


if __name__ == "__main__":
    main()
